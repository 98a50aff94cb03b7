//! Majority probability when battles are played in clusters over time.
//!
//! The recursion tracks the pair of win counts. Within each cluster the
//! battles resolve independently, so the cluster's contribution is the
//! Poisson-binomial law of its A-wins.

use crate::domain::{Team, TemporalStructure};
use crate::error::{ContestError, Result};
use crate::probability::WinDistribution;

/// How battles played after the contest is decided are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrivialRule {
    /// At their own winning probabilities.
    Primitive,
    /// As fair coin flips.
    Fair,
}

fn check_inputs(probs: &[f64], structure: &TemporalStructure) -> Result<()> {
    if structure.n_battles() != probs.len() {
        return Err(ContestError::InvalidPartition(format!(
            "partition covers {} battles, probabilities given for {}",
            structure.n_battles(),
            probs.len()
        )));
    }
    if probs.len().is_multiple_of(2) {
        return Err(ContestError::EvenBattleCount { count: probs.len() });
    }
    if let Some(t) = probs.iter().position(|p| !(0.0..=1.0).contains(p)) {
        return Err(ContestError::InvalidArgument(format!(
            "battle {} probability {} outside [0,1]",
            t + 1,
            probs[t]
        )));
    }
    Ok(())
}

/// Open (undecided) states indexed by `(a_wins, b_wins)`, each at most `N`,
/// with the mass already absorbed by either team's clinch.
#[derive(Debug, Clone)]
struct CountState {
    level: usize,
    open: Vec<f64>,
    clinched_a: f64,
    clinched_b: f64,
}

impl CountState {
    fn start(level: usize, a: usize, b: usize) -> Self {
        let mut state = Self {
            level,
            open: vec![0.0; (level + 1) * (level + 1)],
            clinched_a: 0.0,
            clinched_b: 0.0,
        };
        state.deposit(a, b, 1.0);
        state
    }

    fn deposit(&mut self, a: usize, b: usize, mass: f64) {
        if a > self.level {
            self.clinched_a += mass;
        } else if b > self.level {
            self.clinched_b += mass;
        } else {
            self.open[a * (self.level + 1) + b] += mass;
        }
    }

    /// Plays one cluster of battles with the given A-winning probabilities.
    fn play(&mut self, cluster_probs: &[f64]) {
        let law = WinDistribution::new(cluster_probs);
        let m = cluster_probs.len();
        let side = self.level + 1;
        let before = std::mem::replace(&mut self.open, vec![0.0; side * side]);
        for a in 0..side {
            for b in 0..side {
                let mass = before[a * side + b];
                if mass == 0.0 {
                    continue;
                }
                for (k, &w) in law.mass().iter().enumerate() {
                    self.deposit(a + k, b + m - k, mass * w);
                }
            }
        }
    }

    fn open_mass(&self, a: usize, b: usize) -> f64 {
        self.open[a * (self.level + 1) + b]
    }
}

fn cluster_probs(probs: &[f64], cluster: &[usize]) -> Vec<f64> {
    cluster.iter().map(|&t| probs[t]).collect()
}

/// Probability that team A reaches `N+1` wins when the clusters are played
/// in order. Once a team has clinched, later battles leave the winner fixed.
pub fn eval_temporal(probs: &[f64], structure: &TemporalStructure) -> Result<f64> {
    check_inputs(probs, structure)?;
    let mut state = CountState::start(probs.len() / 2, 0, 0);
    for cluster in structure.clusters() {
        state.play(&cluster_probs(probs, cluster));
    }
    Ok(state.clinched_a)
}

/// Full count recursion with no absorption: battles in clusters that start
/// after the contest is decided are resolved by `rule`.
pub fn eval_temporal_resolving(probs: &[f64], structure: &TemporalStructure, rule: TrivialRule) -> Result<f64> {
    check_inputs(probs, structure)?;
    let n = probs.len();
    let majority = n / 2 + 1;
    let side = n + 1;
    let mut counts = vec![0.0; side * side];
    counts[0] = 1.0;
    let mut played = 0;
    for cluster in structure.clusters() {
        let primitive = WinDistribution::new(&cluster_probs(probs, cluster));
        let fair = WinDistribution::new(&vec![0.5; cluster.len()]);
        let m = cluster.len();
        let mut next = vec![0.0; side * side];
        for a in 0..=played {
            let b = played - a;
            let mass = counts[a * side + b];
            if mass == 0.0 {
                continue;
            }
            let decided = a >= majority || b >= majority;
            let law = match (decided, rule) {
                (true, TrivialRule::Fair) => &fair,
                _ => &primitive,
            };
            for (k, &w) in law.mass().iter().enumerate() {
                next[(a + k) * side + (b + m - k)] += mass * w;
            }
        }
        counts = next;
        played += m;
    }
    Ok((majority..=n).map(|a| counts[a * side + (n - a)]).sum())
}

/// Resolved battles and their winners; `None` marks a battle not yet played.
pub type History = [Option<Team>];

/// Index of the next cluster to be played, after checking that `history`
/// records exactly the battles of some prefix of the cluster sequence.
fn next_cluster(structure: &TemporalStructure, history: &History) -> Result<usize> {
    if history.len() != structure.n_battles() {
        return Err(ContestError::InvalidHistory(format!(
            "history has {} entries for {} battles",
            history.len(),
            structure.n_battles()
        )));
    }
    let clusters = structure.clusters();
    let resolved = |c: &Vec<usize>| c.iter().filter(|&&t| history[t].is_some()).count();
    let z = clusters.iter().take_while(|c| resolved(c) == c.len()).count();
    if let Some(c) = clusters[z..].iter().find(|c| resolved(c) > 0) {
        return Err(ContestError::InvalidHistory(format!(
            "battle {} is resolved before an earlier cluster is complete",
            c.iter().find(|&&t| history[t].is_some()).map_or(0, |t| t + 1)
        )));
    }
    Ok(z)
}

/// Pivotal gaps of both teams for battle `t` at a history node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotalGap {
    pub team_a: f64,
    pub team_b: f64,
}

fn gap_state(
    probs: &[f64],
    structure: &TemporalStructure,
    history: &History,
    t: usize,
) -> Result<Option<CountState>> {
    check_inputs(probs, structure)?;
    if t >= probs.len() {
        return Err(ContestError::IndexOutOfRange {
            index: t,
            count: probs.len(),
        });
    }
    let z = next_cluster(structure, history)?;
    let clusters = structure.clusters();
    if z == clusters.len() || !clusters[z].contains(&t) {
        return Err(ContestError::InvalidHistory(format!(
            "battle {} is not in the next unresolved cluster",
            t + 1
        )));
    }
    let level = probs.len() / 2;
    let a = history.iter().filter(|h| **h == Some(Team::A)).count();
    let b = history.iter().filter(|h| **h == Some(Team::B)).count();
    if a > level || b > level {
        return Ok(None);
    }
    let mut state = CountState::start(level, a, b);
    let rest: Vec<usize> = clusters[z].iter().copied().filter(|&s| s != t).collect();
    state.play(&cluster_probs(probs, &rest));
    for cluster in &clusters[z + 1..] {
        state.play(&cluster_probs(probs, cluster));
    }
    Ok(Some(state))
}

/// `P(win | win t, history) - P(win | lose t, history)` for each team.
///
/// Battle `t` changes the winner only when the other battles leave the
/// counts at `(N, N)`, so both gaps equal the mass of that one state.
/// Zero when the history has already decided the contest.
pub fn pivotal_gap(probs: &[f64], structure: &TemporalStructure, history: &History, t: usize) -> Result<PivotalGap> {
    let gap = gap_state(probs, structure, history, t)?.map_or(0.0, |s| s.open_mass(s.level, s.level));
    Ok(PivotalGap {
        team_a: gap,
        team_b: gap,
    })
}

/// The same gap straight from its definition: two recursions with battle
/// `t` forced each way, differenced.
pub fn conditional_gap(
    probs: &[f64],
    structure: &TemporalStructure,
    history: &History,
    t: usize,
    team: Team,
) -> Result<f64> {
    gap_state(probs, structure, history, t)?;
    let forced = |winner: Team| {
        let mut p = probs.to_vec();
        p[t] = if winner == Team::A { 1.0 } else { 0.0 };
        let mut h = history.to_vec();
        h[t] = Some(winner);
        let a = h.iter().filter(|x| **x == Some(Team::A)).count();
        let b = h.iter().filter(|x| **x == Some(Team::B)).count();
        let level = probs.len() / 2;
        let z = structure.cluster_of(t).expect("validated");
        let mut state = CountState::start(level, a, b);
        let rest: Vec<usize> = structure.clusters()[z].iter().copied().filter(|&s| s != t).collect();
        state.play(&cluster_probs(&p, &rest));
        for cluster in &structure.clusters()[z + 1..] {
            state.play(&cluster_probs(&p, cluster));
        }
        match team {
            Team::A => state.clinched_a,
            Team::B => state.clinched_b,
        }
    };
    Ok(forced(team) - forced(team.opponent()))
}
