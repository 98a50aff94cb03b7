//! Battle-level winning probabilities and majority-rule aggregation.

use crate::domain::{Allocation, Battle, ContestSpec, Team};
use crate::error::{ContestError, Result};

/// Logistic share `1 / (1 + exp(other - own))` of two log-strengths.
///
/// The smaller of the two complementary shares is always computed by the
/// division and the larger as its complement, so
/// `contest_share(x, y) + contest_share(y, x) == 1.0` holds exactly.
pub(crate) fn contest_share(own: f64, other: f64) -> f64 {
    if own <= other {
        1.0 / (1.0 + (other - own).exp())
    } else {
        1.0 - 1.0 / (1.0 + (own - other).exp())
    }
}

/// Log-strengths `r ln(c_B v_A)` and `r ln(c_A v_B)` of the two sides.
fn log_strengths(v_a: f64, v_b: f64, battle: &Battle) -> (f64, f64) {
    let r = battle.power;
    (
        r * (battle.cost_b.ln() + v_a.ln()),
        r * (battle.cost_a.ln() + v_b.ln()),
    )
}

/// Reduced-form probability that team A wins the battle given prize shares
/// `v_a` and `v_b`: `(c_B v_A)^r / ((c_B v_A)^r + (c_A v_B)^r)`.
///
/// Zero shares follow the zero-effort convention: both zero gives 1/2, a
/// single zero share loses the battle with certainty.
pub fn battle_win_prob(v_a: f64, v_b: f64, battle: &Battle) -> f64 {
    match (v_a > 0.0, v_b > 0.0) {
        (false, false) => 0.5,
        (false, true) => 0.0,
        (true, false) => 1.0,
        (true, true) => {
            let (la, lb) = log_strengths(v_a, v_b, battle);
            contest_share(la, lb)
        }
    }
}

/// Team B's probability of winning the battle, computed with the roles of
/// the two players exchanged.
pub fn battle_win_prob_b(v_a: f64, v_b: f64, battle: &Battle) -> f64 {
    battle_win_prob(v_b, v_a, &battle.swapped())
}

/// Probability that `team` wins the battle.
pub fn battle_win_prob_for(team: Team, v_a: f64, v_b: f64, battle: &Battle) -> f64 {
    match team {
        Team::A => battle_win_prob(v_a, v_b, battle),
        Team::B => battle_win_prob_b(v_a, v_b, battle),
    }
}

/// `(d p_A / d v_A, d p_A / d v_B)` at an interior point:
/// `(r p_A p_B / v_A, -r p_A p_B / v_B)`.
pub fn battle_win_prob_partials(v_a: f64, v_b: f64, battle: &Battle) -> (f64, f64) {
    let pa = battle_win_prob(v_a, v_b, battle);
    let pb = battle_win_prob_b(v_a, v_b, battle);
    let core = battle.power * pa * pb;
    (core / v_a, -core / v_b)
}

/// Law of the number of battles won by team A over a set of independent
/// battles, indexed by win count `0..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct WinDistribution {
    mass: Vec<f64>,
}

impl WinDistribution {
    /// Poisson-binomial law by adding one battle at a time.
    pub fn new(probs: &[f64]) -> Self {
        Self::from_iter(probs.iter().copied())
    }

    /// Law over all battles except `skip`.
    pub fn excluding(probs: &[f64], skip: usize) -> Self {
        Self::from_iter(
            probs
                .iter()
                .enumerate()
                .filter(|&(s, _)| s != skip)
                .map(|(_, &p)| p),
        )
    }

    fn from_iter(probs: impl Iterator<Item = f64>) -> Self {
        let mut mass = Vec::with_capacity(16);
        mass.push(1.0);
        for p in probs {
            let q = 1.0 - p;
            mass.push(0.0);
            for k in (1..mass.len()).rev() {
                mass[k] = mass[k] * q + mass[k - 1] * p;
            }
            mass[0] *= q;
        }
        Self { mass }
    }

    /// Number of battles covered.
    pub fn n_battles(&self) -> usize {
        self.mass.len() - 1
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Probability of exactly `k` A-wins.
    pub fn at(&self, k: usize) -> f64 {
        self.mass.get(k).copied().unwrap_or(0.0)
    }

    /// Probability of at least `k` A-wins.
    pub fn at_least(&self, k: usize) -> f64 {
        self.mass.iter().skip(k).sum()
    }
}

/// Convenience wrapper over [`WinDistribution::new`].
pub fn win_distribution(probs: &[f64]) -> WinDistribution {
    WinDistribution::new(probs)
}

/// Probability that team A wins a majority of the `2N+1` battles.
pub fn team_win_prob(probs: &[f64]) -> f64 {
    debug_assert!(probs.len() % 2 == 1, "odd battle count required");
    WinDistribution::new(probs).at_least(probs.len() / 2 + 1)
}

/// Probability that team A wins at least `N+1` of the battles other than `t`.
pub fn team_win_prob_without(probs: &[f64], t: usize) -> f64 {
    WinDistribution::excluding(probs, t).at_least(probs.len() / 2 + 1)
}

/// Probability that the battles other than `t` split evenly, `N` wins each.
pub fn pivotality(probs: &[f64], t: usize) -> f64 {
    debug_assert!(t < probs.len());
    WinDistribution::excluding(probs, t).at(probs.len() / 2)
}

pub fn pivotalities(probs: &[f64]) -> Vec<f64> {
    (0..probs.len()).map(|t| pivotality(probs, t)).collect()
}

fn check_pair(alloc_a: &Allocation, alloc_b: &Allocation, spec: &ContestSpec) -> Result<()> {
    for (alloc, team) in [(alloc_a, Team::A), (alloc_b, Team::B)] {
        if alloc.owner != team {
            return Err(ContestError::OwnerMismatch {
                expected: team,
                got: alloc.owner,
            });
        }
        if alloc.len() != spec.n_battles() {
            return Err(ContestError::LengthMismatch {
                expected: spec.n_battles(),
                got: alloc.len(),
            });
        }
    }
    Ok(())
}

/// Team A's battle-winning probabilities induced by a pair of allocations.
pub fn battle_probs(alloc_a: &Allocation, alloc_b: &Allocation, spec: &ContestSpec) -> Vec<f64> {
    spec.battles
        .iter()
        .zip(alloc_a.shares.iter().zip(&alloc_b.shares))
        .map(|(battle, (&va, &vb))| battle_win_prob(va, vb, battle))
        .collect()
}

/// Team A's probability of winning the contest under a pair of allocations.
pub fn team_win_prob_at(alloc_a: &Allocation, alloc_b: &Allocation, spec: &ContestSpec) -> f64 {
    team_win_prob(&battle_probs(alloc_a, alloc_b, spec))
}

/// Gradient of team A's contest-winning probability in its own shares.
pub fn grad_team_win_prob(
    alloc_a: &Allocation,
    alloc_b: &Allocation,
    spec: &ContestSpec,
) -> Result<Vec<f64>> {
    grad_team_win_prob_for(Team::A, alloc_a, alloc_b, spec)
}

/// Gradient of `team`'s contest-winning probability in its own shares,
/// `pivotality(t) * d p_team,t / d v_team,t`.
///
/// Both allocations must be strictly interior.
pub fn grad_team_win_prob_for(
    team: Team,
    alloc_a: &Allocation,
    alloc_b: &Allocation,
    spec: &ContestSpec,
) -> Result<Vec<f64>> {
    check_pair(alloc_a, alloc_b, spec)?;
    alloc_a.require_interior()?;
    alloc_b.require_interior()?;
    let probs = battle_probs(alloc_a, alloc_b, spec);
    Ok(spec
        .battles
        .iter()
        .enumerate()
        .map(|(t, battle)| {
            let (va, vb) = (alloc_a.shares[t], alloc_b.shares[t]);
            let (da, db) = battle_win_prob_partials(va, vb, battle);
            // dp_B/dv_B = -dp_A/dv_B
            let own = match team {
                Team::A => da,
                Team::B => -db,
            };
            pivotality(&probs, t) * own
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn battle(cost_a: f64, cost_b: f64, power: f64) -> Battle {
        Battle::new(cost_a, cost_b, power)
    }

    /// Direct sum over all 2^n outcome vectors.
    fn enumerate(probs: &[f64]) -> (Vec<f64>, f64) {
        let n = probs.len();
        let mut mass = vec![0.0; n + 1];
        for mask in 0u32..(1 << n) {
            let mut w = 1.0;
            for (t, &p) in probs.iter().enumerate() {
                w *= if mask >> t & 1 == 1 { p } else { 1.0 - p };
            }
            mass[mask.count_ones() as usize] += w;
        }
        let team = mass[n / 2 + 1..].iter().sum();
        (mass, team)
    }

    #[test]
    fn battle_prob_examples() {
        assert_eq!(battle_win_prob(1.0, 1.0, &battle(1.0, 1.0, 1.0)), 0.5);
        assert!((battle_win_prob(1.0, 1.0, &battle(1.0, 4.0, 1.0)) - 0.8).abs() < 1e-15);
        assert_eq!(battle_win_prob(0.0, 0.0, &battle(3.0, 1.0, 0.5)), 0.5);
        assert_eq!(battle_win_prob(0.0, 1.0, &battle(3.0, 1.0, 0.5)), 0.0);
        assert_eq!(battle_win_prob(1.0, 0.0, &battle(3.0, 1.0, 0.5)), 1.0);
    }

    #[test]
    fn battle_prob_matches_power_formula() {
        let b = battle(1.3, 0.7, 0.6);
        let (va, vb) = (0.4, 1.9);
        let x = (b.cost_b * va).powf(b.power);
        let y = (b.cost_a * vb).powf(b.power);
        assert!((battle_win_prob(va, vb, &b) - x / (x + y)).abs() < 1e-15);
    }

    #[test]
    fn fair_binomial_distribution() {
        let d = win_distribution(&[0.5, 0.5, 0.5]);
        assert_eq!(d.mass(), &[0.125, 0.375, 0.375, 0.125]);
        let d = win_distribution(&[1.0, 1.0, 1.0]);
        assert_eq!(d.mass(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn worked_example_probabilities() {
        let probs = [0.5, 0.8, 2.0 / 3.0];
        // 2^3 enumeration gives 11/15 for the majority event.
        let (mass, team) = enumerate(&probs);
        assert!((team - 11.0 / 15.0).abs() < 1e-15);
        let d = win_distribution(&probs);
        assert!((d.at(2) + d.at(3) - 11.0 / 15.0).abs() < 1e-15);
        for k in 0..4 {
            assert!((d.at(k) - mass[k]).abs() < 1e-15);
        }
        assert!((team_win_prob(&probs) - 11.0 / 15.0).abs() < 1e-15);
        assert!((pivotality(&probs, 0) - 0.4).abs() < 1e-15);
        assert!((pivotality(&probs, 1) - 0.5).abs() < 1e-15);
        assert!((pivotality(&probs, 2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quasiconcavity_midpoint_value() {
        assert!((team_win_prob(&[0.5, 0.999, 0.5]) - 0.7495).abs() < 1e-12);
        assert_eq!(team_win_prob(&[0.5, 0.5, 0.5]), 0.5);
    }

    #[test]
    fn certain_battles_are_never_pivotal() {
        assert_eq!(pivotality(&[1.0, 1.0, 0.3], 2), 0.0);
    }

    #[test]
    fn decomposition_and_team_symmetry() {
        let probs = [0.31, 0.77, 0.52, 0.08, 0.64];
        let flipped: Vec<f64> = probs.iter().map(|p| 1.0 - p).collect();
        let total = team_win_prob(&probs);
        for t in 0..probs.len() {
            let via = team_win_prob_without(&probs, t) + pivotality(&probs, t) * probs[t];
            assert!((total - via).abs() < 1e-15);
            let from_b = pivotality(&flipped, t);
            assert!((pivotality(&probs, t) - from_b).abs() < 1e-15);
        }
    }

    #[test]
    fn gradient_rejects_boundary() {
        let spec = ContestSpec::uniform(3, battle(1.0, 1.0, 1.0), 1.0, 1.0).unwrap();
        let a = Allocation::new(Team::A, vec![0.0, 0.5, 0.5], 1.0).unwrap();
        let b = Allocation::uniform(Team::B, 3, 1.0);
        assert!(matches!(
            grad_team_win_prob(&a, &b, &spec),
            Err(ContestError::BoundaryAllocation { team: Team::A, battle: 0 })
        ));
        assert!(matches!(
            grad_team_win_prob(&b, &a, &spec),
            Err(ContestError::OwnerMismatch { .. })
        ));
    }

    #[test]
    fn gradient_symmetric_uniform() {
        let spec = ContestSpec::uniform(3, battle(1.0, 1.0, 1.0), 1.0, 1.0).unwrap();
        let a = Allocation::uniform(Team::A, 3, 1.0);
        let b = Allocation::uniform(Team::B, 3, 1.0);
        let g = grad_team_win_prob(&a, &b, &spec).unwrap();
        // pivotality 1/2, dp/dv = (1/4) / (1/3) = 3/4
        for x in g {
            assert!((x - 0.375).abs() < 1e-15);
        }
    }
}
