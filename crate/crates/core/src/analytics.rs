//! Comparative-statics sweeps over the closed-form equilibrium.
//!
//! Each sweep returns a [`Table`] of rows in grid order together with the
//! assertions evaluated on it.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::domain::ContestSpec;
use crate::equilibrium::{solve, solve_with_cost_index};
use crate::error::{ContestError, Result};
use crate::verification::Check;

/// Named columns of floating-point rows plus the assertions checked on them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub assertions: Vec<Check>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            assertions: Vec::new(),
        }
    }

    pub fn pass(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// One header row, then one line per row with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format_number(*x)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Scientific notation with 17 significant digits, enough to round-trip any `f64`.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn check_grid(grid: &[f64], what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(ContestError::InvalidArgument(format!("empty {what} grid")));
    }
    if let Some(x) = grid.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(ContestError::InvalidArgument(format!(
            "{what} grid values must be positive, got {x}"
        )));
    }
    Ok(())
}

/// Counts consecutive pairs where `sign(dy) != direction * sign(dx)`.
fn monotone_violations(xs: &[f64], ys: &[f64], direction: f64) -> usize {
    xs.windows(2)
        .zip(ys.windows(2))
        .filter(|(x, y)| {
            let dx = (x[1] - x[0]).partial_cmp(&0.0);
            let dy = (direction * (y[1] - y[0])).partial_cmp(&0.0);
            dx != dy
        })
        .count()
}

/// Team A's winning probability as battle `t`'s cost index moves over `grid`,
/// all other primitives and `k` held fixed. Asserts that it moves in the
/// same direction as the index between consecutive grid points.
pub fn sweep_cost_index(spec: &ContestSpec, t: usize, grid: &[f64]) -> Result<Table> {
    spec.validate()?;
    spec.check_index(t)?;
    check_grid(grid, "cost index")?;
    let mut table = Table::new(&["c_t", "team_prob_a"]);
    for &c in grid {
        let mut indices = spec.cost_indices();
        indices[t] = c;
        let eq = solve_with_cost_index(&spec.with_cost_index(t, c), indices);
        table.rows.push(vec![c, eq.team_prob_a]);
    }
    let probs = table.column("team_prob_a").unwrap_or_default();
    table.assertions.push(Check::at_most(
        "team_prob_a_increasing_in_c_t",
        monotone_violations(grid, &probs, 1.0) as f64,
        0.0,
    ));
    Ok(table)
}

/// Sweep over `k = W_B / W_A` at fixed `W_A + W_B`. Asserts team A's
/// probability falls as `k` rises; for symmetric specs with `k = 1` on the
/// grid, also asserts that total effort cost peaks there.
pub fn sweep_budget_ratio(spec: &ContestSpec, grid: &[f64]) -> Result<Table> {
    spec.validate()?;
    check_grid(grid, "budget ratio")?;
    let mut table = Table::new(&["k", "team_prob_a", "E_star"]);
    for &k in grid {
        let eq = solve(&spec.with_budget_ratio(k))?;
        table.rows.push(vec![k, eq.team_prob_a, eq.total_effort_cost]);
    }
    let probs = table.column("team_prob_a").unwrap_or_default();
    table.assertions.push(Check::at_most(
        "team_prob_a_decreasing_in_k",
        monotone_violations(grid, &probs, -1.0) as f64,
        0.0,
    ));
    if spec.is_symmetric() {
        if let Some(at_one) = grid.iter().position(|&k| k == 1.0) {
            let cost = table.column("E_star").unwrap_or_default();
            let best_other = cost
                .iter()
                .enumerate()
                .filter(|&(i, _)| grid[i] != 1.0)
                .map(|(_, &e)| e)
                .fold(f64::NEG_INFINITY, f64::max);
            table.assertions.push(Check::at_most(
                "effort_cost_peaks_at_k_1",
                best_other - cost[at_one],
                0.0,
            ));
        }
    }
    Ok(table)
}

/// Counts sign changes of consecutive differences other than a single `+` to `-`.
fn single_peak_violations(ys: &[f64]) -> usize {
    let mut descending = false;
    let mut violations = 0;
    for w in ys.windows(2) {
        if w[1] > w[0] {
            if descending {
                violations += 1;
            }
        } else if w[1] < w[0] {
            descending = true;
        } else {
            violations += 1;
        }
    }
    violations
}

/// Salience and symmetry level of battle `t` as its cost ratio
/// `rho_t = cost_b / cost_a` moves over an increasing grid that contains `k`.
/// Asserts a single peak located at `rho_t = k`.
pub fn salience_profile(spec: &ContestSpec, t: usize, grid: &[f64]) -> Result<Table> {
    spec.validate()?;
    spec.check_index(t)?;
    check_grid(grid, "cost ratio")?;
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ContestError::InvalidArgument(
            "cost ratio grid must be strictly increasing".to_string(),
        ));
    }
    let k = spec.budget_ratio();
    let Some(at_k) = grid.iter().position(|&rho| (rho - k).abs() <= 1e-12 * k) else {
        return Err(ContestError::InvalidArgument(format!(
            "cost ratio grid must contain the budget ratio {k}"
        )));
    };
    let mut table = Table::new(&["rho_t", "S_t", "sym_t"]);
    for &rho in grid {
        let eq = solve(&spec.with_cost_ratio(t, rho))?;
        let p = eq.prob_a[t];
        table.rows.push(vec![rho, eq.salience[t], p * (1.0 - p)]);
    }
    let salience = table.column("S_t").unwrap_or_default();
    table.assertions.push(Check::at_most(
        "salience_single_peaked",
        single_peak_violations(&salience) as f64,
        0.0,
    ));
    let peak = salience
        .iter()
        .enumerate()
        .fold(0, |best, (i, &s)| if s > salience[best] { i } else { best });
    table.assertions.push(Check::at_most(
        "salience_peak_at_rho_k",
        (grid[peak] - grid[at_k]).abs(),
        0.0,
    ));
    Ok(table)
}

/// Analytic and finite-difference elasticity of a battle's symmetry level
/// with respect to the budget ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Elasticity {
    /// `r_t (p_At - p_Bt)`.
    pub analytic: f64,
    /// Central difference of `log Sym_t` in `log k`.
    pub finite_difference: f64,
    /// `|analytic - finite_difference| / max(|analytic|, ELASTICITY_FLOOR)`.
    pub relative_error: f64,
}

/// Step in `log k` for the elasticity cross-check.
pub const ELASTICITY_STEP: f64 = 1e-6;
/// Floor on the relative-error denominator for nearly balanced battles.
pub const ELASTICITY_FLOOR: f64 = 1e-3;

pub fn symmetry_elasticity(spec: &ContestSpec, t: usize) -> Result<Elasticity> {
    spec.check_index(t)?;
    let eq = solve(spec)?;
    let p = eq.prob_a[t];
    let analytic = spec.battles[t].power * (p - (1.0 - p));
    let log_sym = |log_k: f64| -> Result<f64> {
        let q = solve(&spec.with_budget_ratio(log_k.exp()))?.prob_a[t];
        Ok((q * (1.0 - q)).ln())
    };
    let log_k = eq.k.ln();
    let finite_difference =
        (log_sym(log_k + ELASTICITY_STEP)? - log_sym(log_k - ELASTICITY_STEP)?) / (2.0 * ELASTICITY_STEP);
    Ok(Elasticity {
        analytic,
        finite_difference,
        relative_error: (analytic - finite_difference).abs() / analytic.abs().max(ELASTICITY_FLOOR),
    })
}

/// Total effort cost as battle `t`'s power moves over an increasing grid,
/// for a spec with `k = 1` and `rho_t = 1`. Rows record whether
/// `S_t >= max_{s != t} S_s / 2`; between consecutive rows that both meet
/// it, effort cost must rise.
pub fn effort_cost_r_monotonicity(spec: &ContestSpec, t: usize, grid: &[f64]) -> Result<Table> {
    spec.validate()?;
    spec.check_index(t)?;
    check_grid(grid, "power")?;
    let battle = spec.battles[t];
    if spec.budget_a != spec.budget_b || battle.cost_a != battle.cost_b {
        return Err(ContestError::InvalidArgument(
            "effort-cost power sweep needs equal budgets and equal costs in the swept battle".to_string(),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ContestError::InvalidArgument(
            "power grid must be strictly increasing".to_string(),
        ));
    }
    let mut table = Table::new(&["r_t", "S_t", "E_star", "condition"]);
    for &r in grid {
        let eq = solve(&spec.with_power(t, r))?;
        let others = eq
            .salience
            .iter()
            .enumerate()
            .filter(|&(s, _)| s != t)
            .map(|(_, &x)| x)
            .fold(f64::NEG_INFINITY, f64::max);
        let condition = eq.salience[t] >= 0.5 * others;
        table
            .rows
            .push(vec![r, eq.salience[t], eq.total_effort_cost, f64::from(u8::from(condition))]);
    }
    let violations = table
        .rows
        .windows(2)
        .filter(|w| w[0][3] == 1.0 && w[1][3] == 1.0 && w[1][2] <= w[0][2])
        .count();
    table.assertions.push(Check::at_most(
        "effort_cost_increasing_in_r_t",
        violations as f64,
        0.0,
    ));
    Ok(table)
}

/// Worst relative deviation of `E*(lambda W) / (lambda E*(W))` from 1 over `factors`.
pub fn effort_cost_budget_linearity(spec: &ContestSpec, factors: &[f64]) -> Result<Check> {
    check_grid(factors, "budget factor")?;
    let base = solve(spec)?.total_effort_cost;
    let mut worst: f64 = 0.0;
    for &f in factors {
        let scaled = solve(&spec.scaled_budgets(f))?.total_effort_cost;
        worst = worst.max((scaled / (f * base) - 1.0).abs());
    }
    Ok(Check::at_most("effort_cost_linear_in_budget", worst, 1e-12))
}

/// A spec whose cost indices multiply to one yet strongly favours team A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductCounterexample {
    pub cost_index_product: f64,
    pub team_prob_a: f64,
    /// Team A's probability after exchanging the team labels.
    pub swapped_team_prob_a: f64,
    pub pass: bool,
}

pub fn product_conjecture_counterexample() -> Result<ProductCounterexample> {
    let spec = ContestSpec::from_cost_indices(&[99.0, 99.0, 1.0 / 9801.0], 1.0, 1.0)?;
    let eq = solve(&spec)?;
    let swapped = solve(&spec.swapped())?;
    let cost_index_product: f64 = eq.cost_index.iter().product();
    let team_prob_a = eq.team_prob_a;
    Ok(ProductCounterexample {
        cost_index_product,
        team_prob_a,
        swapped_team_prob_a: swapped.team_prob_a,
        pass: (cost_index_product - 1.0).abs() <= 1e-9 && team_prob_a > 0.97,
    })
}

/// Team A's probability in `spec` and, for the relabelled contest, team B's.
pub fn relabeling_pair(spec: &ContestSpec) -> Result<(f64, f64)> {
    let direct = solve(spec)?.team_prob_a;
    let swapped = solve(&spec.swapped())?;
    Ok((direct, 1.0 - swapped.team_prob_a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Battle;

    fn worked_example() -> ContestSpec {
        ContestSpec::from_cost_indices(&[1.0, 4.0, 2.0], 1.0, 1.0).unwrap()
    }

    fn symmetric() -> ContestSpec {
        ContestSpec::uniform(3, Battle::new(1.0, 1.0, 1.0), 1.0, 1.0).unwrap()
    }

    #[test]
    fn cost_index_sweep() {
        let table = sweep_cost_index(&worked_example(), 2, &[0.5, 1.0, 2.0, 4.0]).unwrap();
        assert!(table.pass());
        let same = sweep_cost_index(&worked_example(), 2, &[2.0, 2.0]).unwrap();
        assert_eq!(same.rows[0][1], same.rows[1][1]);
        assert!(same.pass());
        let through = sweep_cost_index(&symmetric(), 0, &[0.5, 1.0, 2.0]).unwrap();
        assert!((through.rows[1][1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn budget_sweep_on_symmetric_spec() {
        let table = sweep_budget_ratio(&symmetric(), &[0.5, 0.8, 1.0, 1.25, 2.0]).unwrap();
        assert!(table.pass(), "{:?}", table.assertions);
        assert_eq!(table.assertions.len(), 2);
        assert!((table.rows[2][1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn relabeling() {
        let spec = ContestSpec::new(
            vec![
                Battle::new(1.0, 2.0, 0.8),
                Battle::new(0.5, 1.0, 0.4),
                Battle::new(3.0, 1.0, 1.0),
            ],
            1.0,
            1.7,
        )
        .unwrap();
        let (a, b) = relabeling_pair(&spec).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn salience_peaks_at_budget_ratio() {
        let grid = [0.1, 0.5, 1.0, 2.0, 10.0];
        let table = salience_profile(&symmetric(), 0, &grid).unwrap();
        assert!(table.pass());
        assert_eq!(table.rows[2][2], 0.25);
        let spec = symmetric().with_budget_ratio(2.0);
        let table = salience_profile(&spec, 0, &[0.1, 0.5, 1.0, 2.0, 10.0]).unwrap();
        assert!(table.pass());
        // rho and k^2 / rho give the same symmetry level
        let sym = table.column("sym_t").unwrap();
        let mirrored = salience_profile(&spec, 0, &[0.5, 2.0, 8.0]).unwrap().column("sym_t").unwrap();
        assert!((mirrored[0] - mirrored[2]).abs() < 1e-15);
        assert!(sym[3] > sym[2]);
        assert!(salience_profile(&spec, 0, &[0.5, 1.0]).is_err());
    }

    #[test]
    fn elasticity_examples() {
        let e = symmetry_elasticity(&worked_example(), 1).unwrap();
        assert!((e.analytic - 0.6).abs() < 1e-15);
        assert!(e.relative_error < 1e-5);
        let balanced = symmetry_elasticity(&worked_example(), 0).unwrap();
        assert_eq!(balanced.analytic, 0.0);
        assert!(balanced.relative_error < 1e-5);
        let behind = ContestSpec::from_cost_indices(&[0.3, 1.0, 1.0], 1.0, 1.0).unwrap();
        assert!(symmetry_elasticity(&behind, 0).unwrap().analytic < 0.0);
    }

    #[test]
    fn power_sweep_raises_effort_cost() {
        let table = effort_cost_r_monotonicity(&symmetric(), 1, &[0.6, 0.8, 1.0]).unwrap();
        assert!(table.pass());
        let equal = ContestSpec::uniform(3, Battle::new(1.0, 1.0, 0.5), 1.0, 1.0).unwrap();
        let table = effort_cost_r_monotonicity(&equal, 0, &[0.5, 0.51]).unwrap();
        assert_eq!(table.column("condition").unwrap(), vec![1.0, 1.0]);
        assert!(table.rows[1][2] > table.rows[0][2]);
        assert!(effort_cost_r_monotonicity(&worked_example(), 1, &[0.5]).is_err());
    }

    #[test]
    fn weak_battle_rows_are_recorded_only() {
        let table = effort_cost_r_monotonicity(&symmetric(), 1, &[0.05, 0.1]).unwrap();
        assert_eq!(table.column("condition").unwrap(), vec![0.0, 0.0]);
        assert!(table.pass());
    }

    #[test]
    fn budget_linearity() {
        assert!(effort_cost_budget_linearity(&worked_example(), &[0.5, 2.0, 10.0]).unwrap().pass);
    }

    #[test]
    fn product_counterexample() {
        let report = product_conjecture_counterexample().unwrap();
        assert!(report.pass);
        assert!((report.team_prob_a - 0.9801).abs() < 1e-3);
        assert!((report.swapped_team_prob_a - (1.0 - report.team_prob_a)).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trips() {
        let table = sweep_cost_index(&worked_example(), 2, &[0.5, 1.0 / 3.0]).unwrap();
        let csv = table.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("c_t,team_prob_a"));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(row, table.rows[0]);
        let again = sweep_cost_index(&worked_example(), 2, &[0.5, 1.0 / 3.0]).unwrap();
        assert_eq!(again, table);
    }
}
