//! Closed-form equilibrium: proportional prizes allocated by salience.

use serde::{Deserialize, Serialize};

use crate::domain::{Allocation, Battle, ContestSpec, Equilibrium, Team};
use crate::error::{ContestError, Result};
use crate::probability::{self, contest_share};

/// Total equilibrium effort cost together with its two salience factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffortCost {
    /// `E* = (W_A + W_B) * total_salience * hhi`.
    pub total: f64,
    pub hhi: f64,
    pub total_salience: f64,
}

/// Solves the contest in closed form.
///
/// Both managers split their budgets in proportion to battle salience
/// `S_t = pivotality_t * r_t * p_At * p_Bt`, where `p_At = c_t / (c_t + k^r_t)`
/// depends only on the battle's own primitives and the budget ratio `k`.
pub fn solve(spec: &ContestSpec) -> Result<Equilibrium> {
    spec.validate()?;
    Ok(solve_with_cost_index(spec, spec.cost_indices()))
}

/// Solver core with the cost indices supplied directly. `spec` provides
/// powers, budgets and the per-player costs used for effort levels.
pub(crate) fn solve_with_cost_index(spec: &ContestSpec, cost_index: Vec<f64>) -> Equilibrium {
    let n = spec.n_battles();
    let k = spec.budget_ratio();
    let ln_k = k.ln();

    let mut prob_a = Vec::with_capacity(n);
    let mut prob_b = Vec::with_capacity(n);
    for (battle, &c) in spec.battles.iter().zip(&cost_index) {
        let (own, other) = (c.ln(), battle.power * ln_k);
        prob_a.push(contest_share(own, other));
        prob_b.push(contest_share(other, own));
    }

    let pivotality = probability::pivotalities(&prob_a);
    let responsiveness: Vec<f64> = spec
        .battles
        .iter()
        .enumerate()
        .map(|(t, b)| b.power * prob_a[t] * prob_b[t])
        .collect();
    let salience: Vec<f64> = pivotality
        .iter()
        .zip(&responsiveness)
        .map(|(theta, r)| theta * r)
        .collect();
    let total_salience: f64 = salience.iter().sum();

    let shares = |budget: f64| -> Vec<f64> {
        salience
            .iter()
            .map(|s| budget * s / total_salience)
            .collect()
    };
    let alloc_a = Allocation {
        owner: Team::A,
        shares: shares(spec.budget_a),
    };
    let alloc_b = Allocation {
        owner: Team::B,
        shares: shares(spec.budget_b),
    };
    let team_prob_a = probability::team_win_prob(&prob_a);

    let mut eq = Equilibrium {
        k,
        cost_index,
        prob_a,
        pivotality,
        responsiveness,
        salience,
        alloc_a,
        alloc_b,
        team_prob_a,
        efforts_a: Vec::new(),
        efforts_b: Vec::new(),
        total_effort_cost: 0.0,
        hhi: 0.0,
    };
    let (efforts_a, efforts_b) = battle_efforts(&eq, spec);
    eq.efforts_a = efforts_a;
    eq.efforts_b = efforts_b;
    let cost = total_effort_cost(&eq);
    eq.total_effort_cost = cost.total;
    eq.hhi = cost.hhi;
    eq
}

/// Equilibrium efforts `e_it = R_t * pivotality_t * v_it / c_it` of both teams.
pub fn battle_efforts(eq: &Equilibrium, spec: &ContestSpec) -> (Vec<f64>, Vec<f64>) {
    let effort = |team: Team| -> Vec<f64> {
        let alloc = eq.allocation(team);
        spec.battles
            .iter()
            .enumerate()
            .map(|(t, b)| eq.responsiveness[t] * eq.pivotality[t] * alloc.shares[t] / b.cost(team))
            .collect()
    };
    (effort(Team::A), effort(Team::B))
}

/// Herfindahl index of the salience shares.
pub fn salience_hhi(salience: &[f64]) -> f64 {
    let total: f64 = salience.iter().sum();
    salience.iter().map(|s| (s / total).powi(2)).sum()
}

/// Total effort cost through its decomposition into budget, total salience
/// and salience concentration.
pub fn total_effort_cost(eq: &Equilibrium) -> EffortCost {
    let total_salience = eq.total_salience();
    let hhi = salience_hhi(&eq.salience);
    let budget = eq.alloc_a.total() + eq.alloc_b.total();
    EffortCost {
        total: budget * total_salience * hhi,
        hhi,
        total_salience,
    }
}

/// Per-battle effort cost `c_At e_At + c_Bt e_Bt`.
pub fn battle_effort_costs(eq: &Equilibrium, spec: &ContestSpec) -> Vec<f64> {
    spec.battles
        .iter()
        .enumerate()
        .map(|(t, b)| b.cost_a * eq.efforts_a[t] + b.cost_b * eq.efforts_b[t])
        .collect()
}

/// The Tullock reduced form of one battle as a black-box prize-based CSF.
pub fn tullock_csf(battle: Battle) -> impl Fn(f64, f64) -> f64 {
    move |v_a, v_b| probability::battle_win_prob(v_a, v_b, &battle)
}

/// Salience of a battle under an arbitrary reduced-form CSF that is
/// homogeneous of degree zero in the two prizes:
/// `pivotality * x * dp/dv_A` at `(x, k x)`.
///
/// The derivative is a central difference with step `x * 1e-6`.
pub fn salience_hd0<F>(reduced_csf: F, pivotality: f64, k: f64, x: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    if !(x > 0.0 && x.is_finite()) {
        return Err(ContestError::InvalidArgument(format!(
            "reference scale must be positive, got {x}"
        )));
    }
    let h = x * 1e-6;
    let v_b = k * x;
    let derivative = (reduced_csf(x + h, v_b) - reduced_csf(x - h, v_b)) / (2.0 * h);
    if !derivative.is_finite() {
        return Err(ContestError::NonFiniteDerivative(derivative));
    }
    Ok(pivotality * x * derivative)
}
