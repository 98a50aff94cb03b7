mod common;

use common::*;
use rand::Rng;
use team_contest::probability::team_win_prob;
use team_contest::temporal::{
    conditional_gap, eval_temporal, eval_temporal_resolving, pivotal_gap, TrivialRule,
};
use team_contest::{solve, ContestError, Team, TemporalStructure};

/// Reveals every battle in the first `z` clusters at random.
fn random_history(rng: &mut impl Rng, probs: &[f64], structure: &TemporalStructure, z: usize) -> Vec<Option<Team>> {
    let mut history = vec![None; probs.len()];
    for cluster in &structure.clusters()[..z] {
        for &t in cluster {
            history[t] = Some(if rng.random_bool(probs[t]) { Team::A } else { Team::B });
        }
    }
    history
}

/// `P(A | X_t = 1, history) - P(A | X_t = 0, history)` by enumerating the
/// unrevealed battles.
fn enumerated_gap(probs: &[f64], history: &[Option<Team>], t: usize) -> f64 {
    let n = probs.len();
    let known = history.iter().filter(|h| **h == Some(Team::A)).count();
    let free: Vec<f64> = (0..n)
        .filter(|&s| s != t && history[s].is_none())
        .map(|s| probs[s])
        .collect();
    let counts = enumerate_counts(&free);
    let majority = n / 2 + 1;
    let win_prob = |extra: usize| -> f64 {
        counts
            .iter()
            .enumerate()
            .filter(|(k, _)| known + extra + k >= majority)
            .map(|(_, m)| m)
            .sum()
    };
    win_prob(1) - win_prob(0)
}

#[test]
fn order_invariance_across_partitions() {
    let mut rng = rng(21);
    for i in 0..50 {
        let spec = random_spec(&mut rng, 1 + i % 4);
        let probs = solve(&spec).unwrap().prob_a;
        let simultaneous = team_win_prob(&probs);
        for _ in 0..20 {
            let structure = random_partition(&mut rng, probs.len());
            let sequential = eval_temporal(&probs, &structure).unwrap();
            assert!((sequential - simultaneous).abs() <= 1e-12);
        }
    }
}

#[test]
fn order_invariance_off_equilibrium() {
    let mut rng = rng(22);
    for i in 0..100 {
        let n = 2 * (1 + i % 5) + 1;
        let probs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let structure = random_partition(&mut rng, n);
        let oracle = enumerate_team_prob(&probs);
        assert!((eval_temporal(&probs, &structure).unwrap() - oracle).abs() <= 1e-12);
    }
}

#[test]
fn pivotal_gaps_agree_and_match_definition() {
    let mut rng = rng(23);
    for i in 0..60 {
        let spec = random_spec(&mut rng, 1 + i % 3);
        let probs = solve(&spec).unwrap().prob_a;
        let structure = random_partition(&mut rng, probs.len());
        let z = rng.random_range(0..structure.clusters().len());
        let history = random_history(&mut rng, &probs, &structure, z);
        for &t in &structure.clusters()[z] {
            let gap = pivotal_gap(&probs, &structure, &history, t).unwrap();
            assert_eq!(gap.team_a, gap.team_b);
            let oracle = enumerated_gap(&probs, &history, t);
            assert!((gap.team_a - oracle).abs() <= 1e-12, "{} vs {oracle}", gap.team_a);
            for team in [Team::A, Team::B] {
                let direct = conditional_gap(&probs, &structure, &history, t, team).unwrap();
                assert!((direct - gap.team_a).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn clinched_histories_have_zero_gap() {
    let probs = [0.6, 0.3, 0.7, 0.5, 0.9];
    let structure = TemporalStructure::parse("1;2;3;4;5", 5).unwrap();
    let history = [Some(Team::A), Some(Team::A), Some(Team::A), None, None];
    let gap = pivotal_gap(&probs, &structure, &history, 3).unwrap();
    assert_eq!((gap.team_a, gap.team_b), (0.0, 0.0));
    assert_eq!(enumerated_gap(&probs, &history, 3), 0.0);
}

#[test]
fn resolution_of_decided_battles_is_irrelevant() {
    let mut rng = rng(24);
    for i in 0..100 {
        let n = 2 * (1 + i % 4) + 1;
        let probs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let structure = random_partition(&mut rng, n);
        let absorbing = eval_temporal(&probs, &structure).unwrap();
        for rule in [TrivialRule::Primitive, TrivialRule::Fair] {
            let resolving = eval_temporal_resolving(&probs, &structure, rule).unwrap();
            assert!((resolving - absorbing).abs() <= 1e-12);
        }
    }
}

#[test]
fn invalid_histories_are_rejected() {
    let probs = [0.5, 0.5, 0.5];
    let structure = TemporalStructure::parse("1;2,3", 3).unwrap();
    // battle 2 is not in the next cluster
    let err = pivotal_gap(&probs, &structure, &[None, None, None], 1).unwrap_err();
    assert!(matches!(err, ContestError::InvalidHistory(_)));
    // a later cluster revealed before an earlier one
    let err = pivotal_gap(&probs, &structure, &[None, Some(Team::A), None], 0).unwrap_err();
    assert!(matches!(err, ContestError::InvalidHistory(_)));
    let err = eval_temporal(&[0.5, 0.5], &TemporalStructure::parse("1,2", 2).unwrap()).unwrap_err();
    assert!(matches!(err, ContestError::EvenBattleCount { .. }));
}
