//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use team_contest::{Allocation, Battle, ContestSpec, Team, TemporalStructure};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn worked_example() -> ContestSpec {
    ContestSpec::from_cost_indices(&[1.0, 4.0, 2.0], 1.0, 1.0).unwrap()
}

pub fn symmetric_baseline() -> ContestSpec {
    ContestSpec::uniform(3, Battle::new(1.0, 1.0, 1.0), 1.0, 1.0).unwrap()
}

/// Costs in [0.25, 4] (log-uniform), powers in [0.3, 1], budgets in [0.5, 2].
pub fn random_spec(rng: &mut impl Rng, n_level: usize) -> ContestSpec {
    let n = 2 * n_level + 1;
    let cost = |rng: &mut dyn rand::RngCore| (rng.random_range(-1.0f64..1.0) * 4f64.ln()).exp();
    let battles = (0..n)
        .map(|_| Battle::new(cost(rng), cost(rng), rng.random_range(0.3..=1.0)))
        .collect();
    ContestSpec::new(battles, rng.random_range(0.5..2.0), rng.random_range(0.5..2.0)).unwrap()
}

/// Flat Dirichlet draw scaled to `budget`.
pub fn random_allocation(rng: &mut impl Rng, owner: Team, n: usize, budget: f64) -> Allocation {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-9).collect();
    let total: f64 = w.iter().sum();
    Allocation::new(owner, w.iter().map(|x| budget * x / total).collect(), budget).unwrap()
}

/// Ordered partition with a random number of clusters.
pub fn random_partition(rng: &mut impl Rng, n: usize) -> TemporalStructure {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut clusters = vec![vec![order[0]]];
    for &t in &order[1..] {
        if rng.random_bool(0.5) {
            clusters.push(vec![t]);
        } else {
            clusters.last_mut().unwrap().push(t);
        }
    }
    TemporalStructure::new(clusters, n).unwrap()
}

/// Battle probability straight from the power form `x^r / (x^r + y^r)`.
pub fn power_form_prob(v_a: f64, v_b: f64, b: &Battle) -> f64 {
    let x = (b.cost_b * v_a).powf(b.power);
    let y = (b.cost_a * v_b).powf(b.power);
    x / (x + y)
}

/// Law of the A-win count by summing over all `2^n` outcome vectors.
pub fn enumerate_counts(probs: &[f64]) -> Vec<f64> {
    let n = probs.len();
    let mut mass = vec![0.0; n + 1];
    for mask in 0u64..(1 << n) {
        let w: f64 = probs
            .iter()
            .enumerate()
            .map(|(t, &p)| if mask >> t & 1 == 1 { p } else { 1.0 - p })
            .product();
        mass[mask.count_ones() as usize] += w;
    }
    mass
}

pub fn enumerate_team_prob(probs: &[f64]) -> f64 {
    enumerate_counts(probs)[probs.len() / 2 + 1..].iter().sum()
}

/// Probability that the battles other than `t` split evenly, by enumeration.
pub fn enumerate_pivotality(probs: &[f64], t: usize) -> f64 {
    let rest: Vec<f64> = probs
        .iter()
        .enumerate()
        .filter(|&(s, _)| s != t)
        .map(|(_, &p)| p)
        .collect();
    enumerate_counts(&rest)[probs.len() / 2]
}

/// `log P(A)` as a function of team A's shares against fixed B shares,
/// with battle probabilities from the power form.
pub fn log_team_prob(spec: &ContestSpec, v_a: &[f64], v_b: &[f64]) -> f64 {
    let probs: Vec<f64> = spec
        .battles
        .iter()
        .enumerate()
        .map(|(t, b)| power_form_prob(v_a[t], v_b[t], b))
        .collect();
    enumerate_team_prob(&probs).ln()
}

/// Gradient of `log P(A)` in team A's shares by central differences.
pub fn fd_log_gradient(spec: &ContestSpec, v_a: &[f64], v_b: &[f64], rel_step: f64) -> Vec<f64> {
    (0..v_a.len())
        .map(|t| {
            let h = rel_step * v_a[t];
            let mut up = v_a.to_vec();
            up[t] += h;
            let mut down = v_a.to_vec();
            down[t] -= h;
            (log_team_prob(spec, &up, v_b) - log_team_prob(spec, &down, v_b)) / (2.0 * h)
        })
        .collect()
}

/// Hessian of `log P(A)` by central differences of an analytic gradient.
pub fn fd_hessian(gradient: impl Fn(&[f64]) -> Vec<f64>, v_a: &[f64], rel_step: f64) -> Vec<Vec<f64>> {
    let n = v_a.len();
    let mut h = vec![vec![0.0; n]; n];
    for s in 0..n {
        let step = rel_step * v_a[s];
        let mut up = v_a.to_vec();
        up[s] += step;
        let mut down = v_a.to_vec();
        down[s] -= step;
        let (gu, gd) = (gradient(&up), gradient(&down));
        for t in 0..n {
            h[t][s] = (gu[t] - gd[t]) / (2.0 * step);
        }
    }
    h
}

pub fn max_abs(m: &[Vec<f64>]) -> f64 {
    m.iter().flatten().fold(0.0, |a: f64, x| a.max(x.abs()))
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}
