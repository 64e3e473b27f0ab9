use std::collections::HashSet;

use dagtrail::io::GraphDocument;
use dagtrail::verify::{self, generate, replay, CheckConfig, GenSpec};
use dagtrail::{decompose, minimal_trails, Dag};

#[test]
fn labeled_dag_counts() {
    for (n, want) in [(1, 1), (2, 3), (3, 25), (4, 543), (5, 29281)] {
        assert_eq!(generate(&GenSpec::exhaustive(n)).unwrap().count(), want, "n = {n}");
    }
}

#[test]
fn exhaustive_graphs_are_distinct() {
    for n in 1..=4 {
        let docs: Vec<String> = generate(&GenSpec::exhaustive(n))
            .unwrap()
            .map(|d| serde_json::to_string(&GraphDocument::from_dag(&d)).unwrap())
            .collect();
        let uniq: HashSet<&String> = docs.iter().collect();
        assert_eq!(uniq.len(), docs.len());
    }
}

#[test]
fn every_check_passes_on_four_nodes() {
    let reports = verify::run_suite(&GenSpec::exhaustive(4), &verify::all_checks(), &CheckConfig::default()).unwrap();
    for r in &reports {
        assert!(r.passed(), "{}: {:?}", r.summary_line(), r.failures.first());
        assert_eq!(r.graphs_examined, 543);
    }
}

#[test]
fn active_cycle_filter_matches_skip_counts() {
    let kept = generate(&GenSpec::exhaustive(4).without_active_cycles()).unwrap().count() as u64;
    let reports = verify::run_suite(&GenSpec::exhaustive(4), &["no-chords"], &CheckConfig::default()).unwrap();
    assert_eq!(kept, 543 - reports[0].graphs_skipped);
}

#[test]
fn random_suite_is_reproducible() {
    let spec = GenSpec::random(6, 0.4, 7, 40);
    let names = ["minimal-trail-theorem", "dsep-agreement"];
    let a = verify::run_suite(&spec, &names, &CheckConfig::default()).unwrap();
    let b = verify::run_suite(&spec, &names, &CheckConfig::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn ignoring_the_hypothesis_exposes_failures_that_replay() {
    let cfg = CheckConfig {
        enforce_hypotheses: false,
        seed: 0,
    };
    let r = &verify::run_suite(&GenSpec::exhaustive(4), &["no-chords", "common-children"], &cfg).unwrap();
    let failing: Vec<_> = r.iter().flat_map(|r| &r.failures).collect();
    assert!(!failing.is_empty());
    for f in failing {
        let round: verify::Failure = serde_json::from_str(&serde_json::to_string(f).unwrap()).unwrap();
        assert!(replay(&round, &cfg).unwrap(), "{round:?}");
        let d = round.graph.to_dag().unwrap();
        assert!(dagtrail::has_active_cycle(&d));
    }
}

/// On six nodes the last subtrail of a minimal trail need not be a shortest
/// admissible trail: the shorter route reuses a node of the first subtrail.
#[test]
fn shortest_last_subtrail_clause_fails_on_six_nodes() {
    let d = Dag::new(
        6,
        &[(0, 5), (2, 4), (2, 5), (3, 1), (3, 2), (3, 5), (4, 5), (5, 1)],
        None,
    )
    .unwrap();
    assert!(!dagtrail::has_active_cycle(&d));
    let (x, y, z) = (d.node_set([0usize]), d.node_set([4usize]), d.node_set([1usize]));
    let m = minimal_trails(&d, &x, &y, &z).unwrap();
    assert_eq!(m.minimizers.len(), 1);
    let t = &m.minimizers[0];
    assert_eq!(t.render(&d), "0 -> 5 -> 1 <- 3 -> 2 -> 4");
    let dec = decompose(&d, t, &z).unwrap();
    assert_eq!(dec.subtrails[1].len(), 4);

    let r = verify::check_minimal_trail_theorem(&d);
    assert!(!r.passed());
    assert!(r.failures.iter().all(|f| f.clause.starts_with("(v)")), "{:?}", r.failures);
    assert!(r.failures.iter().any(|f| f.query["trail"] == "0 -> 5 -> 1 <- 3 -> 2 -> 4"));
    assert!(replay(&r.failures[0], &CheckConfig::default()).unwrap());

    // the shorter admissible trail 1 <- 5 <- 4 passes through 5, already on the trail
    let short = dagtrail::shortest_constrained_trail(
        &d,
        dagtrail::NodeId(1),
        dagtrail::NodeId(4),
        &dagtrail::TrailConstraints::converging_free()
            .within(z.complement())
            .starting(dagtrail::Direction::Backward),
    );
    assert_eq!(short.len(), 1);
    assert_eq!(short[0].render(&d), "1 <- 5 <- 4");
    assert!(dec.subtrails[0].contains(dagtrail::NodeId(5)));
}
