//! Independent checks that the closed form is a global equilibrium.
//!
//! Everything here works from first principles rather than from the closed
//! form: conditional moments come from enumerating all outcome vectors, best
//! responses from numerical ascent, and the grid oracle from brute force.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Allocation, ContestSpec, Team};
use crate::equilibrium;
use crate::error::{ContestError, Result};
use crate::probability;

/// Largest battle count accepted by the outcome enumeration.
pub const MAX_ENUMERATION_BATTLES: usize = 25;

/// Relative eigenvalue tolerance, scaled by the spectral norm.
pub const EIGEN_TOLERANCE: f64 = 1e-10;

/// Moments of the battle outcomes conditional on team A's majority win.
#[derive(Debug, Clone)]
pub struct ConditionalMoments {
    /// `G_t = E[X_t | A] - p_t`.
    pub g: Vec<f64>,
    /// `Cov(X | A)`.
    pub sigma_a: DMatrix<f64>,
    /// Unconditional variances `p_t (1 - p_t)`.
    pub d: Vec<f64>,
    /// `P(A)`.
    pub prob_a: f64,
}

struct MomentSums {
    majority: usize,
    total: f64,
    first: Vec<f64>,
    second: DMatrix<f64>,
}

impl MomentSums {
    fn visit(&mut self, probs: &[f64], t: usize, weight: f64, wins: &mut Vec<usize>) {
        if t == probs.len() {
            if wins.len() >= self.majority {
                self.total += weight;
                for (i, &a) in wins.iter().enumerate() {
                    self.first[a] += weight;
                    for &b in &wins[..=i] {
                        self.second[(a, b)] += weight;
                    }
                }
            }
            return;
        }
        // prune branches that can no longer reach a majority
        if wins.len() + (probs.len() - t) < self.majority {
            return;
        }
        let p = probs[t];
        if p > 0.0 {
            wins.push(t);
            self.visit(probs, t + 1, weight * p, wins);
            wins.pop();
        }
        if p < 1.0 {
            self.visit(probs, t + 1, weight * (1.0 - p), wins);
        }
    }
}

/// Exact conditional moments by enumerating all `2^(2N+1)` outcomes.
pub fn conditional_moments(probs: &[f64]) -> Result<ConditionalMoments> {
    let n = probs.len();
    if n > MAX_ENUMERATION_BATTLES {
        return Err(ContestError::TooManyBattles {
            count: n,
            max: MAX_ENUMERATION_BATTLES,
        });
    }
    if let Some(t) = probs.iter().position(|p| !(0.0..=1.0).contains(p)) {
        return Err(ContestError::InvalidArgument(format!(
            "battle {t} probability {} outside [0,1]",
            probs[t]
        )));
    }
    let mut sums = MomentSums {
        majority: n / 2 + 1,
        total: 0.0,
        first: vec![0.0; n],
        second: DMatrix::zeros(n, n),
    };
    sums.visit(probs, 0, 1.0, &mut Vec::with_capacity(n));
    let f = sums.total;
    if f <= 0.0 {
        return Err(ContestError::InvalidArgument(
            "the majority event has probability zero".to_string(),
        ));
    }
    let mean: Vec<f64> = sums.first.iter().map(|x| x / f).collect();
    let sigma_a = DMatrix::from_fn(n, n, |i, j| {
        let joint = if i >= j {
            sums.second[(i, j)]
        } else {
            sums.second[(j, i)]
        };
        joint / f - mean[i] * mean[j]
    });
    Ok(ConditionalMoments {
        g: mean.iter().zip(probs).map(|(m, p)| m - p).collect(),
        sigma_a,
        d: probs.iter().map(|p| p * (1.0 - p)).collect(),
        prob_a: f,
    })
}

/// `M0 = D + diag(G) - Cov(X | A)`.
pub fn m0_from_moments(moments: &ConditionalMoments) -> DMatrix<f64> {
    let mut m = -moments.sigma_a.clone();
    for t in 0..moments.g.len() {
        m[(t, t)] += moments.d[t] + moments.g[t];
    }
    m
}

/// Elementary symmetric polynomials `e_0..=e_m` evaluated at `values`.
fn elementary_symmetric(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut e = vec![1.0];
    for x in values {
        e.push(0.0);
        for k in (1..e.len()).rev() {
            e[k] += x * e[k - 1];
        }
    }
    e
}

/// Partial sum `e_0 + ... + e_m`; zero for negative `m`.
fn partial_sum(e: &[f64], m: i64) -> f64 {
    if m < 0 {
        return 0.0;
    }
    e.iter().take(m as usize + 1).sum()
}

/// `M0` from its closed-form entries in the loss odds `phi_t = (1 - p_t) / p_t`.
///
/// Diagonal: `phi_t e_N(phi_-t) (2 Phi_N(phi) + phi_t e_N(phi_-t)) / ((1 + phi_t)^2 Phi_N^2)`;
/// off-diagonal: `phi_t phi_s T_N(phi_-ts) / Phi_N^2` with the Turan defect
/// `T_N = Phi_{N-1}^2 - Phi_{N-2} Phi_N`.
pub fn m0_closed_form(probs: &[f64]) -> DMatrix<f64> {
    let n = probs.len();
    let level = (n / 2) as i64;
    let phi: Vec<f64> = probs.iter().map(|p| (1.0 - p) / p).collect();
    let all = elementary_symmetric(phi.iter().copied());
    let phi_n = partial_sum(&all, level);
    let others = |skip: &[usize]| {
        elementary_symmetric(
            phi.iter()
                .enumerate()
                .filter(|(i, _)| !skip.contains(i))
                .map(|(_, &x)| x),
        )
    };
    DMatrix::from_fn(n, n, |t, s| {
        if t == s {
            let e = others(&[t]);
            let en = e.get(level as usize).copied().unwrap_or(0.0);
            phi[t] * en * (2.0 * phi_n + phi[t] * en) / ((1.0 + phi[t]).powi(2) * phi_n * phi_n)
        } else {
            let e = others(&[t, s]);
            let turan = partial_sum(&e, level - 1).powi(2)
                - partial_sum(&e, level - 2) * partial_sum(&e, level);
            phi[t] * phi[s] * turan / (phi_n * phi_n)
        }
    })
}

/// Log-Hessian of team A's winning probability in its own shares, with
/// the matrices `M` and `M0` whose positive semidefiniteness it reduces to.
#[derive(Debug, Clone)]
pub struct HessianReport {
    pub h: DMatrix<f64>,
    /// `D + diag(G / r) - Cov(X | A)`.
    pub m: DMatrix<f64>,
    /// `D + diag(G) - Cov(X | A)`.
    pub m0: DMatrix<f64>,
    pub max_eig_h: f64,
    pub min_eig_m: f64,
    pub min_eig_m0: f64,
    /// Spectral norms, for relative eigenvalue tolerances.
    pub norm_h: f64,
    pub norm_m: f64,
    pub norm_m0: f64,
}

impl HessianReport {
    /// `max_eig_h <= tol * |H|`.
    pub fn h_is_nsd(&self, tol: f64) -> bool {
        self.max_eig_h <= tol * self.norm_h
    }

    /// `min_eig_m0 >= -tol * |M0|`.
    pub fn m0_is_psd(&self, tol: f64) -> bool {
        self.min_eig_m0 >= -tol * self.norm_m0
    }

    pub fn m_is_psd(&self, tol: f64) -> bool {
        self.min_eig_m >= -tol * self.norm_m
    }
}

/// Extreme eigenvalues `(min, max, spectral norm)` of a symmetric matrix.
pub fn eigen_extremes(m: &DMatrix<f64>) -> (f64, f64, f64) {
    let eig = SymmetricEigen::new(m.clone()).eigenvalues;
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min, max, min.abs().max(max.abs()))
}

/// Builds `H = (R V^-1)(Cov(X|A) - D)(R V^-1) - R V^-2 diag(G)` at an
/// interior allocation pair, with `V = diag(v_A)` and `R = diag(r)`.
pub fn log_hessian(
    alloc_a: &Allocation,
    alloc_b: &Allocation,
    spec: &ContestSpec,
) -> Result<HessianReport> {
    alloc_a.require_interior()?;
    alloc_b.require_interior()?;
    let n = spec.n_battles();
    if alloc_a.len() != n || alloc_b.len() != n {
        return Err(ContestError::LengthMismatch {
            expected: n,
            got: alloc_a.len().min(alloc_b.len()),
        });
    }
    let probs = probability::battle_probs(alloc_a, alloc_b, spec);
    let moments = conditional_moments(&probs)?;
    let r = spec.powers();
    let v = &alloc_a.shares;
    let scale: Vec<f64> = (0..n).map(|t| r[t] / v[t]).collect();

    let h = DMatrix::from_fn(n, n, |t, s| {
        let mut x = scale[t] * scale[s] * moments.sigma_a[(t, s)];
        if t == s {
            x -= scale[t] * scale[t] * moments.d[t] + r[t] * moments.g[t] / (v[t] * v[t]);
        }
        x
    });
    let m0 = m0_from_moments(&moments);
    let mut m = m0.clone();
    for t in 0..n {
        m[(t, t)] += moments.g[t] / r[t] - moments.g[t];
    }
    let (_, max_eig_h, norm_h) = eigen_extremes(&h);
    let (min_eig_m, _, norm_m) = eigen_extremes(&m);
    let (min_eig_m0, _, norm_m0) = eigen_extremes(&m0);
    Ok(HessianReport {
        h,
        m,
        m0,
        max_eig_h,
        min_eig_m,
        min_eig_m0,
        norm_h,
        norm_m,
        norm_m0,
    })
}

/// The responder's contest-winning probability as a function of its own
/// budget fractions, with the opponent's shares held fixed.
struct Responder<'a> {
    spec: &'a ContestSpec,
    side: Team,
    opponent: &'a [f64],
    budget: f64,
}

impl<'a> Responder<'a> {
    fn new(spec: &'a ContestSpec, side: Team, opponent: &'a [f64]) -> Self {
        Self {
            spec,
            side,
            opponent,
            budget: spec.budget(side),
        }
    }

    /// Team A's battle probabilities for own fractions `x`.
    fn probs_a(&self, x: &[f64]) -> Vec<f64> {
        self.spec
            .battles
            .iter()
            .enumerate()
            .map(|(t, b)| {
                let own = self.budget * x[t];
                match self.side {
                    Team::A => probability::battle_win_prob(own, self.opponent[t], b),
                    Team::B => probability::battle_win_prob(self.opponent[t], own, b),
                }
            })
            .collect()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let pa = self.probs_a(x);
        match self.side {
            Team::A => probability::team_win_prob(&pa),
            Team::B => {
                let pb: Vec<f64> = pa.iter().map(|p| 1.0 - p).collect();
                probability::team_win_prob(&pb)
            }
        }
    }

    /// Value and the gradient of its logarithm in the fractions `x`.
    fn value_and_log_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let pa = self.probs_a(x);
        let value = match self.side {
            Team::A => probability::team_win_prob(&pa),
            Team::B => probability::team_win_prob(&pa.iter().map(|p| 1.0 - p).collect::<Vec<_>>()),
        };
        let grad = self
            .spec
            .battles
            .iter()
            .enumerate()
            .map(|(t, b)| {
                let theta = probability::pivotality(&pa, t);
                // d p_own / d x_t = r p_A p_B / x_t
                theta * b.power * pa[t] * (1.0 - pa[t]) / x[t] / value
            })
            .collect();
        (value, grad)
    }

    fn allocation(&self, x: &[f64]) -> Allocation {
        Allocation {
            owner: self.side,
            shares: x.iter().map(|f| self.budget * f).collect(),
        }
    }
}

fn projected_norm(g: &[f64]) -> f64 {
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    g.iter().map(|x| (x - mean).powi(2)).sum::<f64>().sqrt()
}

/// Result of a numerical best-response computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestResponse {
    pub allocation: Allocation,
    pub value: f64,
    pub iterations: usize,
    /// Norm of the log-gradient projected onto the simplex tangent space.
    pub grad_norm: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct AscentOptions {
    pub max_iterations: usize,
    pub grad_tolerance: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            grad_tolerance: 1e-10,
        }
    }
}

fn check_opponent(opponent: &Allocation, spec: &ContestSpec, side: Team) -> Result<()> {
    if opponent.owner != side.opponent() {
        return Err(ContestError::OwnerMismatch {
            expected: side.opponent(),
            got: opponent.owner,
        });
    }
    if opponent.len() != spec.n_battles() {
        return Err(ContestError::LengthMismatch {
            expected: spec.n_battles(),
            got: opponent.len(),
        });
    }
    opponent.require_interior()
}

/// Maximizes `side`'s contest-winning probability against a fixed interior
/// opponent by exponentiated-gradient ascent on the log-objective.
pub fn best_response(opponent: &Allocation, spec: &ContestSpec, side: Team) -> Result<BestResponse> {
    best_response_with(opponent, spec, side, AscentOptions::default())
}

pub fn best_response_with(
    opponent: &Allocation,
    spec: &ContestSpec,
    side: Team,
    options: AscentOptions,
) -> Result<BestResponse> {
    check_opponent(opponent, spec, side)?;
    let responder = Responder::new(spec, side, &opponent.shares);
    let n = spec.n_battles();
    let mut x = vec![1.0 / n as f64; n];
    let (mut value, mut grad) = responder.value_and_log_grad(&x);
    let mut step = 1.0;
    let mut grad_norm = projected_norm(&grad);

    for iteration in 0..options.max_iterations {
        if grad_norm < options.grad_tolerance {
            return Ok(BestResponse {
                allocation: responder.allocation(&x),
                value,
                iterations: iteration,
                grad_norm,
            });
        }
        let top = grad.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut accepted = None;
        for _ in 0..80 {
            let mut y: Vec<f64> = x
                .iter()
                .zip(&grad)
                .map(|(xi, gi)| xi * (step * (gi - top)).exp())
                .collect();
            let total: f64 = y.iter().sum();
            y.iter_mut().for_each(|yi| *yi /= total);
            if y.iter().all(|&yi| yi > 0.0) {
                let (v_new, g_new) = responder.value_and_log_grad(&y);
                // By log-concavity, a nonnegative slope at the far end of the
                // segment certifies ascent, even below value resolution. The
                // gradient is centred because `y - x` sums to zero only up to
                // rounding.
                let centre = g_new.iter().sum::<f64>() / n as f64;
                let slope: f64 = g_new
                    .iter()
                    .zip(y.iter().zip(&x))
                    .map(|(g, (a, b))| (g - centre) * (a - b))
                    .sum();
                if v_new > value || slope >= 0.0 {
                    accepted = Some((y, v_new, g_new));
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some((y, v_new, g_new)) => {
                x = y;
                value = v_new;
                grad = g_new;
                grad_norm = projected_norm(&grad);
                step = (step * 2.0).min(1e6);
            }
            None => {
                return Err(ContestError::NonConvergence {
                    iterations: iteration,
                    grad_norm,
                })
            }
        }
    }
    if grad_norm < options.grad_tolerance {
        return Ok(BestResponse {
            allocation: responder.allocation(&x),
            value,
            iterations: options.max_iterations,
            grad_norm,
        });
    }
    Err(ContestError::NonConvergence {
        iterations: options.max_iterations,
        grad_norm,
    })
}

/// Calls `visit` on every composition of `units` into `parts` nonnegative
/// integer parts, in lexicographic order.
fn for_each_composition(parts: usize, units: usize, visit: &mut impl FnMut(&[usize])) {
    fn rec(buf: &mut Vec<usize>, parts: usize, left: usize, visit: &mut impl FnMut(&[usize])) {
        if buf.len() + 1 == parts {
            buf.push(left);
            visit(buf);
            buf.pop();
            return;
        }
        for k in 0..=left {
            buf.push(k);
            rec(buf, parts, left - k, visit);
            buf.pop();
        }
    }
    rec(&mut Vec::with_capacity(parts), parts, units, visit);
}

/// Default grid spacing for the brute-force oracle, by battle count.
pub fn default_grid_resolution(n_battles: usize) -> f64 {
    match n_battles {
        0..=3 => 0.002,
        4..=5 => 0.05,
        6..=7 => 0.1,
        _ => 0.25,
    }
}

/// Outcome of a brute-force scan of the responder's simplex.
#[derive(Debug, Clone)]
pub struct GridScan {
    /// Best grid point over the whole simplex, as budget fractions.
    pub best: Vec<f64>,
    pub best_value: f64,
    /// Best grid point with at least one zero share.
    pub best_boundary: Vec<f64>,
    pub best_boundary_value: f64,
    pub points: usize,
}

/// Evaluates the responder's value at every point of the simplex grid with
/// the given spacing. Ties keep the earliest point in lexicographic order.
pub fn grid_scan(
    opponent: &Allocation,
    spec: &ContestSpec,
    side: Team,
    resolution: f64,
) -> Result<GridScan> {
    check_opponent(opponent, spec, side)?;
    if !(resolution > 0.0 && resolution <= 1.0) {
        return Err(ContestError::InvalidArgument(format!(
            "grid resolution must lie in (0,1], got {resolution}"
        )));
    }
    let responder = Responder::new(spec, side, &opponent.shares);
    let n = spec.n_battles();
    let units = (1.0 / resolution).round() as usize;
    let mut scan = GridScan {
        best: Vec::new(),
        best_value: f64::NEG_INFINITY,
        best_boundary: Vec::new(),
        best_boundary_value: f64::NEG_INFINITY,
        points: 0,
    };
    let mut x = vec![0.0; n];
    for_each_composition(n, units, &mut |c| {
        for (xi, &ci) in x.iter_mut().zip(c) {
            *xi = ci as f64 / units as f64;
        }
        let value = responder.value(&x);
        scan.points += 1;
        if value > scan.best_value {
            scan.best_value = value;
            scan.best.clone_from(&x);
        }
        if c.contains(&0) && value > scan.best_boundary_value {
            scan.best_boundary_value = value;
            scan.best_boundary.clone_from(&x);
        }
    });
    Ok(scan)
}

/// Pattern search that moves mass between pairs of battles, halving the
/// transfer size whenever no move improves the value.
fn refine(responder: &Responder<'_>, start: &[f64], initial_step: f64) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut x = start.to_vec();
    let mut value = responder.value(&x);
    let mut delta = initial_step;
    while delta > 1e-13 {
        let mut improved = false;
        for i in 0..n {
            for j in 0..n {
                if i == j || x[j] < delta {
                    continue;
                }
                let mut y = x.clone();
                y[i] += delta;
                y[j] -= delta;
                let v = responder.value(&y);
                if v > value {
                    x = y;
                    value = v;
                    improved = true;
                }
            }
        }
        if !improved {
            delta *= 0.5;
        }
    }
    (x, value)
}

/// Brute-force best response: grid scan followed by local refinement.
pub fn grid_best_response(
    opponent: &Allocation,
    spec: &ContestSpec,
    side: Team,
    resolution: f64,
) -> Result<(Allocation, f64)> {
    let scan = grid_scan(opponent, spec, side, resolution)?;
    let responder = Responder::new(spec, side, &opponent.shares);
    let (x, value) = refine(&responder, &scan.best, resolution);
    Ok((responder.allocation(&x), value))
}

/// One named pass/fail check with its residual and threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `residual <= threshold`.
    pub fn at_most(name: impl Into<String>, residual: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            threshold,
            pass: residual <= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub team_prob_a: f64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(team_prob_a: f64, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            team_prob_a,
            checks,
            pass,
        }
    }
}

/// Relative spread `(max - min) / mean` of the Lagrange condition components.
pub fn foc_spread(gradient: &[f64]) -> f64 {
    let max = gradient.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = gradient.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = gradient.iter().sum::<f64>() / gradient.len() as f64;
    (max - min) / mean.abs()
}

/// Threshold on the relative spread of the first-order condition.
pub const FOC_TOLERANCE: f64 = 1e-10;
/// Required agreement in value between the ascent and the grid oracle.
pub const GRID_VALUE_TOLERANCE: f64 = 1e-5;
/// Slack for rounding when comparing boundary values with the equilibrium.
pub const BOUNDARY_SLACK: f64 = 1e-12;

/// Solves the contest and checks the closed form against best responses,
/// boundary deviations, the grid oracle and the first-order conditions.
pub fn verify_equilibrium(spec: &ContestSpec, tol: f64) -> Result<VerificationReport> {
    let eq = equilibrium::solve(spec)?;
    let n = spec.n_battles();
    let resolution = default_grid_resolution(n);
    let mut checks = Vec::new();
    for side in [Team::A, Team::B] {
        let tag = match side {
            Team::A => "a",
            Team::B => "b",
        };
        let own = eq.allocation(side);
        let opponent = eq.allocation(side.opponent());
        let br = best_response(opponent, spec, side)?;
        let deviation = br
            .allocation
            .shares
            .iter()
            .zip(&own.shares)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        checks.push(Check::at_most(format!("best_response_{tag}"), deviation, tol));

        let eq_value = match side {
            Team::A => eq.team_prob_a,
            Team::B => probability::team_win_prob_at(&eq.alloc_a, &eq.alloc_b, spec).mul_add(-1.0, 1.0),
        };
        let scan = grid_scan(opponent, spec, side, resolution)?;
        checks.push(Check::at_most(
            format!("boundary_grid_{tag}"),
            scan.best_boundary_value - eq_value,
            BOUNDARY_SLACK,
        ));
        let responder = Responder::new(spec, side, &opponent.shares);
        let (_, grid_value) = refine(&responder, &scan.best, resolution);
        checks.push(Check::at_most(
            format!("grid_oracle_{tag}"),
            (grid_value - br.value).abs(),
            GRID_VALUE_TOLERANCE,
        ));

        let gradient = probability::grad_team_win_prob_for(side, &eq.alloc_a, &eq.alloc_b, spec)?;
        checks.push(Check::at_most(
            format!("foc_stationarity_{tag}"),
            foc_spread(&gradient),
            FOC_TOLERANCE,
        ));
    }
    Ok(VerificationReport::new(eq.team_prob_a, checks))
}

/// Values of the majority probability at two battle-probability vectors and
/// their midpoint, showing that the majority probability is not
/// quasiconcave in the battle probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiconcavityReport {
    pub first: f64,
    pub second: f64,
    pub midpoint: f64,
    pub violated: bool,
}

pub fn quasiconcavity_counterexample() -> QuasiconcavityReport {
    let p = [0.999, 0.999, 0.001];
    let q = [0.001, 0.999, 0.999];
    let mid: Vec<f64> = p.iter().zip(&q).map(|(a, b)| 0.5 * (a + b)).collect();
    let first = probability::team_win_prob(&p);
    let second = probability::team_win_prob(&q);
    let midpoint = probability::team_win_prob(&mid);
    QuasiconcavityReport {
        first,
        second,
        midpoint,
        violated: midpoint < first.min(second),
    }
}

/// Uniformly distributed point of the open simplex, scaled to `budget`.
pub fn random_interior_allocation(rng: &mut impl Rng, owner: Team, n: usize, budget: f64) -> Allocation {
    let weights: Vec<f64> = (0..n)
        .map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-12)
        .collect();
    let total: f64 = weights.iter().sum();
    Allocation {
        owner,
        shares: weights.iter().map(|w| budget * w / total).collect(),
    }
}

/// Largest violation of `log f(l v + (1-l) w) >= l log f(v) + (1-l) log f(w)`
/// for team A's shares `v`, `w` against a fixed opponent, over
/// `l = 0.1, ..., 0.9`.
pub fn segment_violation(v: &Allocation, w: &Allocation, opponent: &Allocation, spec: &ContestSpec) -> f64 {
    let log_f = |shares: &[f64]| {
        let probs: Vec<f64> = spec
            .battles
            .iter()
            .enumerate()
            .map(|(t, b)| probability::battle_win_prob(shares[t], opponent.shares[t], b))
            .collect();
        probability::team_win_prob(&probs).ln()
    };
    let (fv, fw) = (log_f(&v.shares), log_f(&w.shares));
    (1..10)
        .map(|i| {
            let l = i as f64 / 10.0;
            let mix: Vec<f64> = v
                .shares
                .iter()
                .zip(&w.shares)
                .map(|(a, b)| l * a + (1.0 - l) * b)
                .collect();
            l * fv + (1.0 - l) * fw - log_f(&mix)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Segment slack for the log-concavity inequality.
pub const SEGMENT_TOLERANCE: f64 = 1e-12;

/// Log-concavity spot checks at `samples` random interior allocation pairs.
///
/// Sample `i` draws from its own generator seeded with `seed + i`, so the
/// result does not depend on how the samples are scheduled.
pub fn log_concavity_spot_checks(spec: &ContestSpec, samples: usize, seed: u64) -> Result<Vec<Check>> {
    let n = spec.n_battles();
    let per_sample: Vec<Result<(f64, f64, f64)>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let a = random_interior_allocation(&mut rng, Team::A, n, spec.budget_a);
            let b = random_interior_allocation(&mut rng, Team::B, n, spec.budget_b);
            let w = random_interior_allocation(&mut rng, Team::A, n, spec.budget_a);
            let report = log_hessian(&a, &b, spec)?;
            Ok((
                report.max_eig_h / report.norm_h,
                -report.min_eig_m0 / report.norm_m0,
                segment_violation(&a, &w, &b, spec),
            ))
        })
        .collect();
    let mut worst = (f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for r in per_sample {
        let (h, m0, seg) = r?;
        worst = (worst.0.max(h), worst.1.max(m0), worst.2.max(seg));
    }
    Ok(vec![
        Check::at_most("log_hessian_nsd", worst.0, EIGEN_TOLERANCE),
        Check::at_most("m0_psd", worst.1, EIGEN_TOLERANCE),
        Check::at_most("segment_log_concavity", worst.2, SEGMENT_TOLERANCE),
    ])
}
