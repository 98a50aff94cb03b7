//! Coefficient matrices of individual monomials and their two-block form.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::PolynomialMatrix;
use super::poly::Monomial;
use crate::error::{ContestError, Result};
use crate::verification::eigen_extremes;

/// Binomial coefficient, zero whenever `m < 0`, `r < 0` or `r > m`.
pub fn binomial(m: i64, r: i64) -> BigInt {
    if m < 0 || r < 0 || r > m {
        return BigInt::zero();
    }
    let r = r.min(m - r);
    let mut acc = BigInt::from(1);
    for i in 0..r {
        acc = acc * BigInt::from(m - i) / BigInt::from(i + 1);
    }
    acc
}

fn positive_part(x: BigInt) -> BigInt {
    if x.is_negative() {
        BigInt::zero()
    } else {
        x
    }
}

/// Coefficient of a monomial with `squared` squared and `linear` first-power
/// variables in the Turan defect `T_N`: `[C(r, L'-1) - C(r, L')]_+`, `L' = N - squared`.
pub fn turan_coefficient(squared: i64, linear: i64, n_level: i64) -> BigInt {
    let l = n_level - squared;
    positive_part(binomial(linear, l - 1) - binomial(linear, l))
}

/// One coefficient matrix in its five-value form. `S1` holds the `b` indices
/// with exponent 1, `S2` the `a` indices with exponent 2; `l = N - a`.
///
/// Fields that have no entry in a matrix of this shape are zero: `d1`, `c11`
/// and `c12` when `b = 0`, `d2`, `c22` and `c12` when `a = 0`, `c11` when
/// `b < 2` and `c22` when `a < 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientBlock {
    pub b: usize,
    pub a: usize,
    pub l: i64,
    pub d1: BigInt,
    pub d2: BigInt,
    pub c11: BigInt,
    pub c12: BigInt,
    pub c22: BigInt,
}

impl CoefficientBlock {
    /// Copy with the fields that have no matrix entry set to zero.
    pub fn observable(&self) -> Self {
        let mut out = self.clone();
        if self.b == 0 {
            out.d1 = BigInt::zero();
            out.c12 = BigInt::zero();
        }
        if self.a == 0 {
            out.d2 = BigInt::zero();
            out.c12 = BigInt::zero();
        }
        if self.b < 2 {
            out.c11 = BigInt::zero();
        }
        if self.a < 2 {
            out.c22 = BigInt::zero();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        let o = self.observable();
        [&o.d1, &o.d2, &o.c11, &o.c12, &o.c22].iter().all(|x| x.is_zero())
    }

    /// `(d1, d2, c11, c12, c22)` as machine integers.
    pub fn five_tuple(&self) -> [i64; 5] {
        [&self.d1, &self.d2, &self.c11, &self.c12, &self.c22]
            .map(|x| x.to_i64().expect("coefficient fits in i64"))
    }

    /// Dense `(b + a) x (b + a)` matrix with `S1` ordered first.
    pub fn assemble(&self) -> DMatrix<f64> {
        let o = self.observable();
        let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
        let size = self.b + self.a;
        DMatrix::from_fn(size, size, |i, j| {
            let (first_i, first_j) = (i < self.b, j < self.b);
            match (first_i, first_j, i == j) {
                (true, true, true) => f(&o.d1),
                (true, true, false) => f(&o.c11),
                (false, false, true) => f(&o.d2),
                (false, false, false) => f(&o.c22),
                _ => f(&o.c12),
            }
        })
    }
}

/// The binomial closed forms:
/// `d1 = 2 C(b-1, L) [b-1 <= 2L]`,
/// `d2 = 2 C(b, L+1) [b <= 2L+1] + C(b, L+1) [b = 2L+2]`,
/// `c11 = [C(b-2, L-1) - C(b-2, L)]_+`, `c12 = [C(b-1, L) - C(b-1, L+1)]_+`,
/// `c22 = [C(b, L+1) - C(b, L+2)]_+`.
pub fn closed_form_block(b: usize, a: usize, n_level: usize) -> CoefficientBlock {
    let (bi, ai) = (b as i64, a as i64);
    let l = n_level as i64 - ai;
    let d1 = if bi - 1 <= 2 * l {
        binomial(bi - 1, l) * 2
    } else {
        BigInt::zero()
    };
    let mut d2 = BigInt::zero();
    if bi <= 2 * l + 1 {
        d2 += binomial(bi, l + 1) * 2;
    }
    if bi == 2 * l + 2 {
        d2 += binomial(bi, l + 1);
    }
    CoefficientBlock {
        b,
        a,
        l,
        d1,
        d2,
        c11: positive_part(binomial(bi - 2, l - 1) - binomial(bi - 2, l)),
        c12: positive_part(binomial(bi - 1, l) - binomial(bi - 1, l + 1)),
        c22: positive_part(binomial(bi, l + 1) - binomial(bi, l + 2)),
    }
}

/// Reads the five values off one coefficient matrix, verifying that it
/// vanishes outside `S1 u S2` and is constant on each index-pair type.
pub fn classify_matrix(alpha: &[u8], coefficients: &DMatrix<BigInt>, n_level: usize) -> Result<CoefficientBlock> {
    let n = alpha.len();
    let fail = |reason: String| ContestError::BlockStructure {
        alpha: alpha.to_vec(),
        reason,
    };
    let b = alpha.iter().filter(|&&e| e == 1).count();
    let a = alpha.iter().filter(|&&e| e == 2).count();
    let mut values: [Option<BigInt>; 5] = Default::default();
    const NAMES: [&str; 5] = ["d1", "d2", "c11", "c12", "c22"];
    for t in 0..n {
        for s in 0..n {
            let x = &coefficients[(t, s)];
            let slot = match (alpha[t], alpha[s], t == s) {
                (0, _, _) | (_, 0, _) => {
                    if !x.is_zero() {
                        return Err(fail(format!("nonzero entry ({t},{s}) outside the support")));
                    }
                    continue;
                }
                (1, 1, true) => 0,
                (2, 2, true) => 1,
                (1, 1, false) => 2,
                (2, 2, false) => 4,
                _ => 3,
            };
            match &values[slot] {
                None => values[slot] = Some(x.clone()),
                Some(v) if v == x => {}
                Some(v) => {
                    return Err(fail(format!(
                        "{} takes two values ({v} and {x}) at entry ({t},{s})",
                        NAMES[slot]
                    )))
                }
            }
        }
    }
    let [d1, d2, c11, c12, c22] = values.map(Option::unwrap_or_default);
    Ok(CoefficientBlock {
        b,
        a,
        l: n_level as i64 - a as i64,
        d1,
        d2,
        c11,
        c12,
        c22,
    })
}

/// All monomials sharing one `(b, a)` shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockClass {
    pub block: CoefficientBlock,
    /// First exponent pattern of this shape, in base-3 order.
    pub representative: Vec<u8>,
    /// Number of exponent patterns with a nonzero coefficient matrix.
    pub multiplicity: usize,
}

/// Result of scanning every exponent pattern of a polynomial matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    /// Classes keyed by `(b, a)`.
    pub classes: BTreeMap<(usize, usize), BlockClass>,
    /// Exponent patterns with a nonzero coefficient matrix.
    pub n_alpha: usize,
    /// Largest `b + 2a` over nonzero patterns.
    pub max_total_degree: usize,
}

/// Scans `{0,1,2}^n` densely and collapses the coefficient matrices onto
/// their `(b, a)` classes, rejecting any class whose members disagree.
pub fn extract_blocks(pm: &PolynomialMatrix) -> Result<Extraction> {
    let n = pm.n();
    let n_level = pm.n_level();
    let mut extraction = Extraction {
        classes: BTreeMap::new(),
        n_alpha: 0,
        max_total_degree: 0,
    };
    for code in 0..3u64.pow(n as u32) {
        let monomial = Monomial(code);
        let coefficients = DMatrix::from_fn(n, n, |t, s| pm.entry(t, s).coefficient(monomial));
        if coefficients.iter().all(Zero::is_zero) {
            continue;
        }
        let alpha = monomial.exponents(n);
        let block = classify_matrix(&alpha, &coefficients, n_level)?;
        extraction.n_alpha += 1;
        extraction.max_total_degree = extraction.max_total_degree.max(block.b + 2 * block.a);
        match extraction.classes.get_mut(&(block.b, block.a)) {
            Some(class) if class.block == block => class.multiplicity += 1,
            Some(class) => {
                return Err(ContestError::BlockStructure {
                    alpha,
                    reason: format!(
                        "block differs from the one at {:?} with the same (b, a)",
                        class.representative
                    ),
                })
            }
            None => {
                extraction.classes.insert(
                    (block.b, block.a),
                    BlockClass {
                        block,
                        representative: alpha,
                        multiplicity: 1,
                    },
                );
            }
        }
    }
    Ok(extraction)
}

/// Outcome of the scalar PSD reduction for one block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdCheck {
    /// Names of the inequalities that failed.
    pub failed: Vec<String>,
    /// Smallest eigenvalue of the assembled block, in floating point.
    pub min_eigenvalue: f64,
    pub pass: bool,
}

/// Relative slack for the floating-point eigenvalue cross-check.
pub const BLOCK_EIGEN_TOLERANCE: f64 = 1e-10;

/// Checks `d1 - c11 >= 0`, `d2 - c22 >= 0` and
/// `(d1 + (b-1) c11)(d2 + (a-1) c22) >= a b c12^2` exactly, skipping the ones
/// that involve an empty index set, together with a nonnegative diagonal for
/// the reduced 2x2 matrix. The dense block's eigenvalues are a redundant check.
pub fn check_block_psd(block: &CoefficientBlock) -> PsdCheck {
    let o = block.observable();
    let (b, a) = (BigInt::from(block.b), BigInt::from(block.a));
    let one = BigInt::from(1);
    let mut failed = Vec::new();
    let first = &o.d1 + (&b - &one) * &o.c11;
    let second = &o.d2 + (&a - &one) * &o.c22;
    if block.b > 0 {
        if (&o.d1 - &o.c11).is_negative() {
            failed.push("d1 - c11 >= 0".to_string());
        }
        if first.is_negative() {
            failed.push("d1 + (b-1) c11 >= 0".to_string());
        }
    }
    if block.a > 0 {
        if (&o.d2 - &o.c22).is_negative() {
            failed.push("d2 - c22 >= 0".to_string());
        }
        if second.is_negative() {
            failed.push("d2 + (a-1) c22 >= 0".to_string());
        }
    }
    if block.a > 0 && block.b > 0 && &first * &second < &a * &b * &o.c12 * &o.c12 {
        failed.push("(d1 + (b-1) c11)(d2 + (a-1) c22) >= a b c12^2".to_string());
    }
    let dense = block.assemble();
    let min_eigenvalue = if dense.nrows() == 0 {
        0.0
    } else {
        let (min, _, norm) = eigen_extremes(&dense);
        if min < -BLOCK_EIGEN_TOLERANCE * norm {
            failed.push("min eigenvalue >= -1e-10 |C|".to_string());
        }
        min
    };
    PsdCheck {
        pass: failed.is_empty(),
        failed,
        min_eigenvalue,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::matrix::build_tilde_m;

    fn tuple(block: &CoefficientBlock) -> [i64; 5] {
        block.five_tuple()
    }

    #[test]
    fn binomial_conventions() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(-1, 0), BigInt::zero());
        assert_eq!(binomial(3, 4), BigInt::zero());
        assert_eq!(binomial(3, -1), BigInt::zero());
        assert_eq!(binomial(0, 0), BigInt::from(1));
    }

    #[test]
    fn closed_form_examples() {
        let degenerate = closed_form_block(0, 2, 1);
        assert_eq!(degenerate.l, -1);
        assert_eq!(degenerate.d2, BigInt::from(1));
        assert_eq!(degenerate.c22, BigInt::from(1));
        assert_eq!(tuple(&closed_form_block(3, 1, 2)), [4, 6, 0, 1, 2]);
        // b = 2L + 2 decouples the two index sets
        for n_level in 1..5 {
            for a in 0..=n_level {
                let l = n_level as i64 - a as i64;
                if l >= -1 {
                    let b = (2 * l + 2) as usize;
                    assert!(closed_form_block(b, a, n_level).c12.is_zero());
                }
            }
        }
    }

    #[test]
    fn extracted_blocks_for_small_cases() {
        let ex = extract_blocks(&build_tilde_m(3).unwrap()).unwrap();
        let j2 = &ex.classes[&(0, 2)].block;
        assert_eq!(j2.d2, BigInt::from(1));
        assert_eq!(j2.c22, BigInt::from(1));
        assert!(j2.d1.is_zero() && j2.c12.is_zero());

        let ex = extract_blocks(&build_tilde_m(5).unwrap()).unwrap();
        let block = &ex.classes[&(3, 1)].block;
        // c22 has no entry when a = 1
        assert_eq!(tuple(block), [4, 6, 0, 1, 0]);
        assert_eq!(*block, closed_form_block(3, 1, 2).observable());
        assert!(ex.max_total_degree <= 6);
    }

    #[test]
    fn block_psd_examples() {
        assert!(check_block_psd(&closed_form_block(3, 1, 2)).pass);
        let j = closed_form_block(0, 3, 2);
        assert_eq!(tuple(&j), [0, 1, 0, 0, 1]);
        let report = check_block_psd(&j);
        assert!(report.pass);
        assert!(report.min_eigenvalue.abs() < 1e-12);
        let zero = CoefficientBlock {
            b: 2,
            a: 1,
            l: 0,
            d1: BigInt::zero(),
            d2: BigInt::zero(),
            c11: BigInt::zero(),
            c12: BigInt::zero(),
            c22: BigInt::zero(),
        };
        assert!(check_block_psd(&zero).pass);
    }

    #[test]
    fn psd_failures_are_named() {
        let bad = CoefficientBlock {
            b: 2,
            a: 2,
            l: 0,
            d1: BigInt::from(1),
            d2: BigInt::from(1),
            c11: BigInt::from(0),
            c12: BigInt::from(3),
            c22: BigInt::from(2),
        };
        let report = check_block_psd(&bad);
        assert!(!report.pass);
        assert!(report.failed.iter().any(|f| f.starts_with("d2 - c22")));
        assert!(report.failed.iter().any(|f| f.contains("c12^2")));
    }

    #[test]
    fn classify_rejects_broken_pattern() {
        let alpha = [1u8, 1, 0];
        let mut m = DMatrix::from_element(3, 3, BigInt::zero());
        m[(0, 0)] = BigInt::from(2);
        m[(1, 1)] = BigInt::from(3);
        assert!(matches!(
            classify_matrix(&alpha, &m, 1),
            Err(ContestError::BlockStructure { .. })
        ));
        let mut m = DMatrix::from_element(3, 3, BigInt::zero());
        m[(2, 2)] = BigInt::from(1);
        assert!(classify_matrix(&alpha, &m, 1).is_err());
    }
}
