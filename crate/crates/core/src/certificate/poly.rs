//! Sparse multivariate polynomials with per-variable degree at most 2 and
//! exact integer coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

/// Largest supported variable count; keeps packed exponents well inside `u64`.
pub const MAX_VARS: usize = 20;

/// An exponent vector in `{0,1,2}^n`, packed as a base-3 integer with
/// variable 0 in the least significant digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn from_exponents(exponents: &[u8]) -> Self {
        assert!(exponents.len() <= MAX_VARS, "too many variables");
        let mut code = 0u64;
        for &e in exponents.iter().rev() {
            assert!(e <= 2, "exponent {e} exceeds 2");
            code = code * 3 + e as u64;
        }
        Monomial(code)
    }

    pub fn exponents(self, n_vars: usize) -> Vec<u8> {
        let mut code = self.0;
        (0..n_vars)
            .map(|_| {
                let e = (code % 3) as u8;
                code /= 3;
                e
            })
            .collect()
    }

    pub fn exponent(self, var: usize) -> u8 {
        ((self.0 / 3u64.pow(var as u32)) % 3) as u8
    }

    /// Product of two monomials, or `None` if some exponent would exceed 2.
    pub fn checked_mul(self, other: Monomial) -> Option<Monomial> {
        let (mut x, mut y) = (self.0, other.0);
        let mut place = 1u64;
        let mut code = 0u64;
        while x > 0 || y > 0 {
            let e = x % 3 + y % 3;
            if e > 2 {
                return None;
            }
            code += e * place;
            place *= 3;
            x /= 3;
            y /= 3;
        }
        Some(Monomial(code))
    }

    pub fn total_degree(self) -> u32 {
        let mut code = self.0;
        let mut degree = 0;
        while code > 0 {
            degree += (code % 3) as u32;
            code /= 3;
        }
        degree
    }
}

/// Polynomial in a fixed number of variables. Zero coefficients are never
/// stored, so the zero polynomial has no terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePoly {
    n_vars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl SparsePoly {
    pub fn zero(n_vars: usize) -> Self {
        assert!(n_vars <= MAX_VARS, "too many variables");
        Self {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, value: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(n_vars);
        p.add_term(Monomial::ONE, value.into());
        p
    }

    pub fn one(n_vars: usize) -> Self {
        Self::constant(n_vars, 1)
    }

    /// The variable `phi_var`.
    pub fn var(n_vars: usize, var: usize) -> Self {
        assert!(var < n_vars, "variable {var} out of range");
        let mut exponents = vec![0u8; n_vars];
        exponents[var] = 1;
        let mut p = Self::zero(n_vars);
        p.add_term(Monomial::from_exponents(&exponents), BigInt::one());
        p
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    /// Coefficient of `monomial`, zero when absent.
    pub fn coefficient(&self, monomial: Monomial) -> BigInt {
        self.terms.get(&monomial).cloned().unwrap_or_default()
    }

    pub fn coefficient_ref(&self, monomial: Monomial) -> Option<&BigInt> {
        self.terms.get(&monomial)
    }

    fn add_term(&mut self, monomial: Monomial, value: BigInt) {
        if value.is_zero() {
            return;
        }
        let slot = self.terms.entry(monomial).or_default();
        *slot += value;
        if slot.is_zero() {
            self.terms.remove(&monomial);
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    /// Largest exponent of any variable in any term.
    pub fn max_var_degree(&self) -> u8 {
        self.terms
            .keys()
            .flat_map(|m| m.exponents(self.n_vars))
            .max()
            .unwrap_or(0)
    }

    pub fn evaluate(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.n_vars, "point dimension");
        self.terms
            .iter()
            .map(|(m, c)| {
                let coef = c.to_f64().unwrap_or(f64::NAN);
                m.exponents(self.n_vars)
                    .iter()
                    .zip(point)
                    .fold(coef, |acc, (&e, &x)| acc * x.powi(e as i32))
            })
            .sum()
    }

    pub fn scale(&self, factor: &BigInt) -> Self {
        let mut out = Self::zero(self.n_vars);
        for (m, c) in &self.terms {
            out.add_term(*m, c * factor);
        }
        out
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.n_vars, other.n_vars, "variable count mismatch");
    }
}

impl Add for &SparsePoly {
    type Output = SparsePoly;

    fn add(self, other: &SparsePoly) -> SparsePoly {
        self.check_compatible(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &SparsePoly {
    type Output = SparsePoly;

    fn sub(self, other: &SparsePoly) -> SparsePoly {
        self + &(-other)
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;

    fn neg(self) -> SparsePoly {
        SparsePoly {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Mul for &SparsePoly {
    type Output = SparsePoly;

    /// # Panics
    /// If a product term would raise a variable above degree 2.
    fn mul(self, other: &SparsePoly) -> SparsePoly {
        self.check_compatible(other);
        let mut out = SparsePoly::zero(self.n_vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = m1
                    .checked_mul(*m2)
                    .expect("product exceeds per-variable degree 2");
                out.add_term(m, c1 * c2);
            }
        }
        out
    }
}

/// `e_0, ..., e_|vars|` over the variables `vars` of an `n_vars`-variable ring,
/// by the incremental product `prod (1 + phi_v z)`.
pub fn elem_sym_all(n_vars: usize, vars: &[usize]) -> Vec<SparsePoly> {
    let mut e = vec![SparsePoly::one(n_vars)];
    for &v in vars {
        let x = SparsePoly::var(n_vars, v);
        e.push(SparsePoly::zero(n_vars));
        for k in (1..e.len()).rev() {
            let lifted = &x * &e[k - 1];
            e[k] = &e[k] + &lifted;
        }
    }
    e
}

/// Elementary symmetric polynomial `e_k` over `vars`; zero for `k < 0` or `k > |vars|`.
pub fn elem_sym(n_vars: usize, vars: &[usize], k: i64) -> SparsePoly {
    if k < 0 || k as usize > vars.len() {
        return SparsePoly::zero(n_vars);
    }
    elem_sym_all(n_vars, vars).swap_remove(k as usize)
}

/// `Phi_m = e_0 + ... + e_m` over `vars`; zero for `m < 0`.
pub fn phi_poly(n_vars: usize, vars: &[usize], m: i64) -> SparsePoly {
    partial_sum(n_vars, &elem_sym_all(n_vars, vars), m)
}

fn partial_sum(n_vars: usize, e: &[SparsePoly], m: i64) -> SparsePoly {
    let mut out = SparsePoly::zero(n_vars);
    if m < 0 {
        return out;
    }
    for p in e.iter().take(m as usize + 1) {
        out = &out + p;
    }
    out
}

/// Turan defect `T_N = Phi_{N-1}^2 - Phi_{N-2} Phi_N` over `vars`.
pub fn turan_defect(n_vars: usize, vars: &[usize], n_level: i64) -> SparsePoly {
    let e = elem_sym_all(n_vars, vars);
    let prev = partial_sum(n_vars, &e, n_level - 1);
    let square = &prev * &prev;
    let cross = &partial_sum(n_vars, &e, n_level - 2) * &partial_sum(n_vars, &e, n_level);
    &square - &cross
}
