//! The cleared-denominator matrix `Mt = Phi_N^2 D M0 D` with `D = diag(1 + phi_t)`.

use nalgebra::DMatrix;

use super::poly::{elem_sym, phi_poly, turan_defect, SparsePoly};
use crate::error::{ContestError, Result};

/// Largest battle count for the symbolic construction.
pub const MAX_SYMBOLIC_BATTLES: usize = 9;

/// Symmetric matrix of polynomials in the loss odds `phi_1..phi_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialMatrix {
    n: usize,
    entries: Vec<SparsePoly>,
}

impl PolynomialMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_level(&self) -> usize {
        self.n / 2
    }

    pub fn entry(&self, t: usize, s: usize) -> &SparsePoly {
        &self.entries[t * self.n + s]
    }

    pub fn evaluate(&self, phi: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |t, s| self.entry(t, s).evaluate(phi))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|t| (0..t).all(|s| self.entry(t, s) == self.entry(s, t)))
    }

    pub fn max_var_degree(&self) -> u8 {
        self.entries.iter().map(SparsePoly::max_var_degree).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.entries.iter().map(SparsePoly::total_degree).max().unwrap_or(0)
    }
}

/// Builds the matrix in exact integers. Diagonal entries are
/// `phi_t e_N(phi_-t) (2 Phi_N(phi) + phi_t e_N(phi_-t))`; off-diagonal entries
/// `phi_t phi_s (1 + phi_t)(1 + phi_s) T_N(phi_-ts)`.
pub fn build_tilde_m(n: usize) -> Result<PolynomialMatrix> {
    if n < 3 || n.is_multiple_of(2) || n > MAX_SYMBOLIC_BATTLES {
        return Err(ContestError::UnsupportedSize(n));
    }
    let level = (n / 2) as i64;
    let all: Vec<usize> = (0..n).collect();
    let without = |skip: &[usize]| -> Vec<usize> {
        all.iter().copied().filter(|i| !skip.contains(i)).collect()
    };
    let one = SparsePoly::one(n);
    let phi_n = phi_poly(n, &all, level);
    let twice_phi_n = &phi_n + &phi_n;

    let mut entries = vec![SparsePoly::zero(n); n * n];
    for t in 0..n {
        let x_t = SparsePoly::var(n, t);
        let e = elem_sym(n, &without(&[t]), level);
        let lead = &x_t * &e;
        entries[t * n + t] = &lead * &(&twice_phi_n + &lead);
        for s in 0..t {
            let x_s = SparsePoly::var(n, s);
            let prefactor = &(&(&x_t * &x_s) * &(&one + &x_t)) * &(&one + &x_s);
            let entry = &prefactor * &turan_defect(n, &without(&[t, s]), level);
            entries[s * n + t] = entry.clone();
            entries[t * n + s] = entry;
        }
    }
    Ok(PolynomialMatrix { n, entries })
}
