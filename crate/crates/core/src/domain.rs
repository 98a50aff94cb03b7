//! Contest primitives and solution records.
//!
//! Battles are indexed from zero inside the library. Only the CLI cluster
//! syntax and the `t` column of exported tables use 1-based indices.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ContestError, Result};

/// Relative tolerance for an allocation's shares to sum to its budget.
pub const BUDGET_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Team {
    A,
    B,
}

impl Team {
    pub fn opponent(self) -> Team {
        match self {
            Team::A => Team::B,
            Team::B => Team::A,
        }
    }
}

impl fmt::Display for Team {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Team::A => f.write_str("A"),
            Team::B => f.write_str("B"),
        }
    }
}

/// One pairwise Tullock battle between the matched players of both teams.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Battle {
    /// Marginal effort cost of team A's player.
    pub cost_a: f64,
    /// Marginal effort cost of team B's player.
    pub cost_b: f64,
    /// Discriminatory power, in (0, 1].
    pub power: f64,
}

impl Battle {
    pub fn new(cost_a: f64, cost_b: f64, power: f64) -> Self {
        Self {
            cost_a,
            cost_b,
            power,
        }
    }

    pub fn cost(&self, team: Team) -> f64 {
        match team {
            Team::A => self.cost_a,
            Team::B => self.cost_b,
        }
    }

    /// Cost ratio `cost_b / cost_a`.
    pub fn cost_ratio(&self) -> f64 {
        self.cost_b / self.cost_a
    }

    /// Cost index `(cost_b / cost_a)^power`, evaluated in log space so that
    /// extreme ratios neither overflow nor underflow prematurely.
    pub fn cost_index(&self) -> f64 {
        (self.power * (self.cost_b.ln() - self.cost_a.ln())).exp()
    }

    /// The same battle seen with the team labels exchanged.
    pub fn swapped(&self) -> Self {
        Self::new(self.cost_b, self.cost_a, self.power)
    }
}

/// Primitives of one contest: `2N+1` battles and the two team budgets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContestSpec {
    pub battles: Vec<Battle>,
    pub budget_a: f64,
    pub budget_b: f64,
}

impl ContestSpec {
    /// Builds and validates a spec.
    pub fn new(battles: Vec<Battle>, budget_a: f64, budget_b: f64) -> Result<Self> {
        validate_spec(Self {
            battles,
            budget_a,
            budget_b,
        })
    }

    /// Spec with every battle sharing the same costs and power.
    pub fn uniform(n_battles: usize, battle: Battle, budget_a: f64, budget_b: f64) -> Result<Self> {
        Self::new(vec![battle; n_battles], budget_a, budget_b)
    }

    /// Spec with `cost_a = 1`, unit power and `cost_b` equal to the given cost index.
    pub fn from_cost_indices(indices: &[f64], budget_a: f64, budget_b: f64) -> Result<Self> {
        let battles = indices.iter().map(|&c| Battle::new(1.0, c, 1.0)).collect();
        Self::new(battles, budget_a, budget_b)
    }

    pub fn validate(&self) -> Result<()> {
        let count = self.battles.len();
        if count.is_multiple_of(2) {
            return Err(ContestError::EvenBattleCount { count });
        }
        if count < 3 {
            return Err(ContestError::TooFewBattles { count });
        }
        for (t, battle) in self.battles.iter().enumerate() {
            for team in [Team::A, Team::B] {
                let value = battle.cost(team);
                if !(value > 0.0 && value.is_finite()) {
                    return Err(ContestError::NonPositiveCost {
                        battle: t,
                        team,
                        value,
                    });
                }
            }
            if !(battle.power > 0.0 && battle.power <= 1.0) {
                return Err(ContestError::PowerOutOfRange {
                    battle: t,
                    value: battle.power,
                });
            }
        }
        for team in [Team::A, Team::B] {
            let value = self.budget(team);
            if !(value > 0.0 && value.is_finite()) {
                return Err(ContestError::NonPositiveBudget { team, value });
            }
        }
        Ok(())
    }

    pub fn n_battles(&self) -> usize {
        self.battles.len()
    }

    /// `N` in `2N+1`.
    pub fn n_level(&self) -> usize {
        self.battles.len() / 2
    }

    pub fn budget(&self, team: Team) -> f64 {
        match team {
            Team::A => self.budget_a,
            Team::B => self.budget_b,
        }
    }

    /// `k = W_B / W_A`.
    pub fn budget_ratio(&self) -> f64 {
        self.budget_b / self.budget_a
    }

    pub fn powers(&self) -> Vec<f64> {
        self.battles.iter().map(|b| b.power).collect()
    }

    pub fn cost_indices(&self) -> Vec<f64> {
        self.battles.iter().map(Battle::cost_index).collect()
    }

    /// The same contest with the team labels exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            battles: self.battles.iter().map(Battle::swapped).collect(),
            budget_a: self.budget_b,
            budget_b: self.budget_a,
        }
    }

    /// Copy with both budgets multiplied by `factor`.
    pub fn scaled_budgets(&self, factor: f64) -> Self {
        Self {
            battles: self.battles.clone(),
            budget_a: self.budget_a * factor,
            budget_b: self.budget_b * factor,
        }
    }

    /// Copy with budgets chosen so that `W_B / W_A = k` and `W_A + W_B` is unchanged.
    pub fn with_budget_ratio(&self, k: f64) -> Self {
        let total = self.budget_a + self.budget_b;
        Self {
            battles: self.battles.clone(),
            budget_a: total / (1.0 + k),
            budget_b: total * k / (1.0 + k),
        }
    }

    /// Copy whose battle `t` has cost index `c`, realised by moving `cost_b`
    /// while keeping `cost_a` and the power.
    pub fn with_cost_index(&self, t: usize, c: f64) -> Self {
        let mut out = self.clone();
        let b = &mut out.battles[t];
        b.cost_b = b.cost_a * (c.ln() / b.power).exp();
        out
    }

    /// Copy whose battle `t` has cost ratio `cost_b / cost_a = rho`.
    pub fn with_cost_ratio(&self, t: usize, rho: f64) -> Self {
        let mut out = self.clone();
        let b = &mut out.battles[t];
        b.cost_b = b.cost_a * rho;
        out
    }

    pub fn with_power(&self, t: usize, power: f64) -> Self {
        let mut out = self.clone();
        out.battles[t].power = power;
        out
    }

    /// True when every battle has `cost_a == cost_b` and all powers coincide.
    pub fn is_symmetric(&self) -> bool {
        let r0 = self.battles[0].power;
        self.battles
            .iter()
            .all(|b| b.cost_a == b.cost_b && b.power == r0)
    }

    pub fn check_index(&self, t: usize) -> Result<()> {
        if t < self.n_battles() {
            Ok(())
        } else {
            Err(ContestError::IndexOutOfRange {
                index: t,
                count: self.n_battles(),
            })
        }
    }
}

/// Returns the spec unchanged if every invariant holds, otherwise the first
/// violation found (parity, costs and powers by battle index, then budgets).
pub fn validate_spec(spec: ContestSpec) -> Result<ContestSpec> {
    spec.validate()?;
    Ok(spec)
}

/// A team's division of its budget across the battles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub owner: Team,
    pub shares: Vec<f64>,
}

impl Allocation {
    /// Validates nonnegativity and that the shares sum to `budget`.
    pub fn new(owner: Team, shares: Vec<f64>, budget: f64) -> Result<Self> {
        for (t, &v) in shares.iter().enumerate() {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(ContestError::InvalidShare { battle: t, value: v });
            }
        }
        let sum: f64 = shares.iter().sum();
        if (sum - budget).abs() > BUDGET_TOLERANCE * budget {
            return Err(ContestError::BudgetMismatch { sum, budget });
        }
        Ok(Self { owner, shares })
    }

    /// Allocation for `owner` under `spec`, checking length and owner budget.
    pub fn for_spec(owner: Team, shares: Vec<f64>, spec: &ContestSpec) -> Result<Self> {
        if shares.len() != spec.n_battles() {
            return Err(ContestError::LengthMismatch {
                expected: spec.n_battles(),
                got: shares.len(),
            });
        }
        Self::new(owner, shares, spec.budget(owner))
    }

    /// Scales arbitrary nonnegative weights onto the budget.
    pub fn from_weights(owner: Team, weights: &[f64], budget: f64) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(ContestError::InvalidArgument(format!(
                "weights must have a positive finite sum, got {total}"
            )));
        }
        let shares: Vec<f64> = weights.iter().map(|w| budget * w / total).collect();
        Self::new(owner, shares, budget)
    }

    pub fn uniform(owner: Team, n: usize, budget: f64) -> Self {
        Self {
            owner,
            shares: vec![budget / n as f64; n],
        }
    }

    pub fn len(&self) -> usize {
        self.shares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shares.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.shares.iter().sum()
    }

    pub fn is_interior(&self) -> bool {
        self.shares.iter().all(|&v| v > 0.0)
    }

    /// Error naming the first zero share, if any.
    pub fn require_interior(&self) -> Result<()> {
        match self.shares.iter().position(|&v| v <= 0.0) {
            Some(battle) => Err(ContestError::BoundaryAllocation {
                team: self.owner,
                battle,
            }),
            None => Ok(()),
        }
    }

    /// Shares as fractions of their sum.
    pub fn fractions(&self) -> Vec<f64> {
        let total = self.total();
        self.shares.iter().map(|v| v / total).collect()
    }
}

/// Closed-form equilibrium of one contest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    /// Budget ratio `W_B / W_A`.
    pub k: f64,
    /// `c_t = (cost_b / cost_a)^r_t`.
    pub cost_index: Vec<f64>,
    /// Equilibrium battle-winning probabilities of team A.
    pub prob_a: Vec<f64>,
    pub pivotality: Vec<f64>,
    /// `R_t = r_t p_At p_Bt`.
    pub responsiveness: Vec<f64>,
    /// `S_t = pivotality_t * R_t`.
    pub salience: Vec<f64>,
    pub alloc_a: Allocation,
    pub alloc_b: Allocation,
    pub team_prob_a: f64,
    pub efforts_a: Vec<f64>,
    pub efforts_b: Vec<f64>,
    pub total_effort_cost: f64,
    pub hhi: f64,
}

impl Equilibrium {
    pub fn n_battles(&self) -> usize {
        self.prob_a.len()
    }

    /// Team B's battle-winning probability `k^r / (c + k^r)`, evaluated
    /// in log space so that it complements `prob_a[t]` exactly.
    pub fn prob_b(&self, t: usize, power: f64) -> f64 {
        crate::probability::contest_share(power * self.k.ln(), self.cost_index[t].ln())
    }

    pub fn total_salience(&self) -> f64 {
        self.salience.iter().sum()
    }

    pub fn allocation(&self, team: Team) -> &Allocation {
        match team {
            Team::A => &self.alloc_a,
            Team::B => &self.alloc_b,
        }
    }
}

/// Ordered partition of the battles into clusters that are played in
/// sequence; battles inside a cluster are simultaneous.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemporalStructure {
    clusters: Vec<Vec<usize>>,
}

impl TemporalStructure {
    /// Validates that `clusters` partitions `0..n_battles` into nonempty sets.
    pub fn new(clusters: Vec<Vec<usize>>, n_battles: usize) -> Result<Self> {
        let mut seen = vec![false; n_battles];
        for (z, cluster) in clusters.iter().enumerate() {
            if cluster.is_empty() {
                return Err(ContestError::InvalidPartition(format!("cluster {} is empty", z + 1)));
            }
            for &t in cluster {
                if t >= n_battles {
                    return Err(ContestError::InvalidPartition(format!(
                        "battle index {} out of range for {} battles",
                        t + 1,
                        n_battles
                    )));
                }
                if seen[t] {
                    return Err(ContestError::InvalidPartition(format!(
                        "battle {} appears more than once",
                        t + 1
                    )));
                }
                seen[t] = true;
            }
        }
        if let Some(t) = seen.iter().position(|s| !s) {
            return Err(ContestError::InvalidPartition(format!(
                "battle {} is not assigned to any cluster",
                t + 1
            )));
        }
        Ok(Self { clusters })
    }

    /// One battle per cluster, in index order.
    pub fn sequential(n_battles: usize) -> Self {
        Self {
            clusters: (0..n_battles).map(|t| vec![t]).collect(),
        }
    }

    /// A single cluster holding every battle.
    pub fn simultaneous(n_battles: usize) -> Self {
        Self {
            clusters: vec![(0..n_battles).collect()],
        }
    }

    /// Parses `"1;2,3"`: clusters separated by `;`, 1-based indices by `,`.
    pub fn parse(text: &str, n_battles: usize) -> Result<Self> {
        let mut clusters = Vec::new();
        for part in text.split(';') {
            let mut cluster = Vec::new();
            for item in part.split(',') {
                let item = item.trim();
                let idx: usize = item.parse().map_err(|_| {
                    ContestError::InvalidPartition(format!("'{item}' is not a battle index"))
                })?;
                if idx == 0 {
                    return Err(ContestError::InvalidPartition(
                        "battle indices are 1-based".to_string(),
                    ));
                }
                cluster.push(idx - 1);
            }
            clusters.push(cluster);
        }
        Self::new(clusters, n_battles)
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn n_battles(&self) -> usize {
        self.clusters.iter().map(Vec::len).sum()
    }

    /// Position of the cluster containing battle `t`.
    pub fn cluster_of(&self, t: usize) -> Option<usize> {
        self.clusters.iter().position(|c| c.contains(&t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Battle {
        Battle::new(1.0, 1.0, 1.0)
    }

    #[test]
    fn symmetric_baseline_is_valid() {
        let spec = ContestSpec::uniform(3, unit(), 1.0, 1.0).unwrap();
        assert_eq!(spec.n_level(), 1);
        assert!(spec.is_symmetric());
    }

    #[test]
    fn even_count_rejected() {
        let err = ContestSpec::uniform(4, unit(), 1.0, 1.0).unwrap_err();
        assert_eq!(err, ContestError::EvenBattleCount { count: 4 });
        assert!(err.to_string().contains("even battle count"));
    }

    #[test]
    fn single_battle_rejected() {
        let err = ContestSpec::uniform(1, unit(), 1.0, 1.0).unwrap_err();
        assert_eq!(err, ContestError::TooFewBattles { count: 1 });
    }

    #[test]
    fn power_above_one_rejected() {
        let battles = vec![unit(), Battle::new(1.0, 1.0, 1.5), unit()];
        let err = ContestSpec::new(battles, 1.0, 1.0).unwrap_err();
        assert_eq!(err, ContestError::PowerOutOfRange { battle: 1, value: 1.5 });
        assert!(err.to_string().contains("power outside (0,1]"));
    }

    #[test]
    fn first_violation_reported() {
        let battles = vec![unit(), Battle::new(0.0, 1.0, 2.0), Battle::new(1.0, -1.0, 1.0)];
        let err = ContestSpec::new(battles, 1.0, 1.0).unwrap_err();
        assert_eq!(
            err,
            ContestError::NonPositiveCost {
                battle: 1,
                team: Team::A,
                value: 0.0
            }
        );
    }

    #[test]
    fn nonpositive_budget_rejected() {
        let err = ContestSpec::uniform(3, unit(), 1.0, 0.0).unwrap_err();
        assert!(matches!(err, ContestError::NonPositiveBudget { team: Team::B, .. }));
    }

    #[test]
    fn json_schema_field_names() {
        let text = r#"{"battles":[{"cost_a":1.0,"cost_b":1.0,"power":1.0},
            {"cost_a":1.0,"cost_b":4.0,"power":1.0},{"cost_a":1.0,"cost_b":2.0,"power":1.0}],
            "budget_a":1.0,"budget_b":1.0}"#;
        let spec: ContestSpec = serde_json::from_str(text).unwrap();
        let spec = validate_spec(spec).unwrap();
        assert_eq!(spec.battles[1].cost_b, 4.0);
        let bad = r#"{"battles":[],"budget_a":1.0,"budget_b":1.0,"extra":1}"#;
        assert!(serde_json::from_str::<ContestSpec>(bad).is_err());
    }

    #[test]
    fn allocation_budget_closure() {
        assert!(Allocation::new(Team::A, vec![0.2, 0.3, 0.5], 1.0).is_ok());
        let err = Allocation::new(Team::A, vec![0.2, 0.3, 0.6], 1.0).unwrap_err();
        assert!(matches!(err, ContestError::BudgetMismatch { .. }));
        let err = Allocation::new(Team::A, vec![-0.1, 0.6, 0.5], 1.0).unwrap_err();
        assert!(matches!(err, ContestError::InvalidShare { battle: 0, .. }));
        let alloc = Allocation::new(Team::B, vec![0.0, 1.0, 1.0], 2.0).unwrap();
        assert!(matches!(
            alloc.require_interior(),
            Err(ContestError::BoundaryAllocation { team: Team::B, battle: 0 })
        ));
    }

    #[test]
    fn cost_index_is_log_stable() {
        let b = Battle::new(1e-200, 1e200, 1.0);
        assert!(b.cost_index().is_infinite() || b.cost_index() > 1e300);
        let b = Battle::new(1.0, 1.0 / 9801.0, 1.0);
        assert!((b.cost_index() * 9801.0 - 1.0).abs() < 1e-14);
        let b = Battle::new(2.0, 8.0, 0.5);
        assert!((b.cost_index() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn with_cost_index_round_trips() {
        let spec = ContestSpec::new(
            vec![unit(), Battle::new(2.0, 3.0, 0.4), unit()],
            1.0,
            2.0,
        )
        .unwrap();
        let edited = spec.with_cost_index(1, 5.0);
        assert!((edited.battles[1].cost_index() - 5.0).abs() < 1e-13);
        assert_eq!(edited.battles[1].cost_a, 2.0);
    }

    #[test]
    fn partition_parsing() {
        let s = TemporalStructure::parse("1;2,3", 3).unwrap();
        assert_eq!(s.clusters(), &[vec![0], vec![1, 2]]);
        assert_eq!(s.cluster_of(2), Some(1));
        assert!(TemporalStructure::parse("1;2", 3).is_err());
        assert!(TemporalStructure::parse("1;2,2;3", 3).is_err());
        assert!(TemporalStructure::parse("0;1,2", 3).is_err());
        assert!(TemporalStructure::parse("1;;2,3", 3).is_err());
        assert!(TemporalStructure::parse("1;2,x", 3).is_err());
        assert!(TemporalStructure::parse("1;2,3,4", 3).is_err());
    }
}
