//! Exact-integer positive-semidefiniteness certificate for `M0`.
//!
//! The matrix is rescaled to a polynomial matrix in the loss odds, every
//! monomial's coefficient matrix is extracted, matched against binomial
//! closed forms, and shown PSD through three scalar inequalities.

mod blocks;
mod matrix;
mod poly;

pub use blocks::{
    binomial, check_block_psd, classify_matrix, closed_form_block, extract_blocks, turan_coefficient,
    BlockClass, CoefficientBlock, Extraction, PsdCheck, BLOCK_EIGEN_TOLERANCE,
};
pub use matrix::{build_tilde_m, PolynomialMatrix, MAX_SYMBOLIC_BATTLES};
pub use poly::{elem_sym, elem_sym_all, phi_poly, turan_defect, Monomial, SparsePoly};

use serde::{Deserialize, Serialize};

use crate::error::{ContestError, Result};

/// Largest `N` accepted by [`certify`].
pub const MAX_CERTIFY_LEVEL: usize = 4;

/// One `(b, a)` class in a certificate report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub b: usize,
    pub a: usize,
    pub l: i64,
    /// Closed-form `(d1, d2, c11, c12, c22)`.
    pub five_tuple: [i64; 5],
    pub representative: Vec<u8>,
    pub multiplicity: usize,
    pub matches_closed_form: bool,
    pub psd: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub n_level: usize,
    pub n_battles: usize,
    /// Exponent patterns with a nonzero coefficient matrix.
    pub n_alpha: usize,
    pub n_classes: usize,
    pub classes: Vec<ClassReport>,
    pub failures: Vec<String>,
    pub pass: bool,
}

/// Builds, extracts and checks every coefficient block for `2N+1` battles.
///
/// Mismatches and PSD failures are listed in the report; a coefficient
/// matrix that breaks the two-block pattern is an error.
pub fn certify(n_level: usize) -> Result<CertificateReport> {
    if !(1..=MAX_CERTIFY_LEVEL).contains(&n_level) {
        return Err(ContestError::InvalidArgument(format!(
            "certificate level must be in 1..={MAX_CERTIFY_LEVEL}, got {n_level}"
        )));
    }
    let n = 2 * n_level + 1;
    let extraction = extract_blocks(&build_tilde_m(n)?)?;
    let mut failures = Vec::new();
    if extraction.max_total_degree > n + 1 {
        failures.push(format!(
            "total degree {} exceeds {}",
            extraction.max_total_degree,
            n + 1
        ));
    }
    let mut classes = Vec::new();
    for b in 0..=n {
        for a in 0..=(n - b) {
            let closed = closed_form_block(b, a, n_level);
            let Some(class) = extraction.classes.get(&(b, a)) else {
                if !closed.is_zero() {
                    failures.push(format!("closed form predicts a nonzero block for (b, a) = ({b}, {a})"));
                }
                continue;
            };
            let matches = class.block == closed.observable();
            if !matches {
                failures.push(format!(
                    "alpha {:?}: extracted {:?} differs from closed form {:?}",
                    class.representative,
                    class.block.five_tuple(),
                    closed.observable().five_tuple()
                ));
            }
            let psd = check_block_psd(&class.block);
            if !psd.pass {
                failures.push(format!("alpha {:?}: {}", class.representative, psd.failed.join("; ")));
            }
            classes.push(ClassReport {
                b,
                a,
                l: closed.l,
                five_tuple: closed.five_tuple(),
                representative: class.representative.clone(),
                multiplicity: class.multiplicity,
                matches_closed_form: matches,
                psd: psd.pass,
            });
        }
    }
    Ok(CertificateReport {
        n_level,
        n_battles: n,
        n_alpha: extraction.n_alpha,
        n_classes: classes.len(),
        classes,
        pass: failures.is_empty(),
        failures,
    })
}
