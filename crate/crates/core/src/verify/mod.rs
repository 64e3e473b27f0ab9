//! Graph generation and mechanical checking of the trail theorems.
//!
//! [`run_suite`] feeds a generated graph stream through a list of named
//! checks and aggregates one [`CheckReport`] per check. Every failure
//! carries the graph in the JSON document format, so [`replay`] can rerun
//! the single check on it.

pub mod checks;
pub mod gen;
pub mod report;

use rayon::prelude::*;
use thiserror::Error;

use crate::dag::Dag;
use crate::io::{GraphDocument, IoError};

pub use checks::{minimal_trail_violations, CheckConfig, CheckFn, GraphCtx, Outcome};
pub use gen::{generate, GenMode, GenSpec};
pub use report::{CheckReport, Failure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("unknown check {0:?}")]
    UnknownCheckName(String),
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("stored graph is invalid: {0}")]
    Graph(#[from] IoError),
}

/// The checks backing the theorems, in report order.
pub const THEOREM_CHECKS: [&str; 6] = [
    "activation-lemma",
    "no-chords",
    "common-children",
    "subgraph-theorems",
    "minimal-trail-theorem",
    "local-rel-theorem",
];

/// Cross-checks of the library's own algorithms.
pub const EXTRA_CHECKS: [&str; 5] = [
    "dsep-agreement",
    "minimal-dominance",
    "removal-closure",
    "local-structure",
    "active-cycle-witness",
];

pub fn all_checks() -> Vec<&'static str> {
    THEOREM_CHECKS.iter().chain(&EXTRA_CHECKS).copied().collect()
}

pub fn lookup(name: &str) -> Result<CheckFn, VerifyError> {
    Ok(match name {
        "activation-lemma" => checks::activation_lemma,
        "no-chords" => checks::no_chords,
        "common-children" => checks::common_children,
        "subgraph-theorems" => checks::subgraph_theorems,
        "minimal-trail-theorem" => checks::minimal_trail_theorem,
        "local-rel-theorem" => checks::local_rel_theorem,
        "dsep-agreement" => checks::dsep_agreement,
        "minimal-dominance" => checks::minimal_dominance,
        "removal-closure" => checks::removal_closure,
        "local-structure" => checks::local_structure,
        "active-cycle-witness" => checks::active_cycle_witness,
        other => return Err(VerifyError::UnknownCheckName(other.to_string())),
    })
}

fn report_for(name: &str, serial: u64, d: &Dag, o: Outcome) -> CheckReport {
    let mut r = CheckReport::new(name);
    r.graphs_examined = 1;
    r.graphs_skipped = o.graph_skipped as u64;
    r.instances_examined = o.instances;
    r.instances_skipped = o.instances_skipped;
    r.failure_count = o.failures.len() as u64;
    if !o.failures.is_empty() {
        let graph = GraphDocument::from_dag(d);
        r.failures = o
            .failures
            .into_iter()
            .take(report::MAX_RECORDED_FAILURES)
            .map(|(query, clause)| Failure {
                check: name.to_string(),
                graph_serial: serial,
                graph: graph.clone(),
                query,
                clause,
            })
            .collect();
    }
    r
}

/// Runs one check on one graph.
pub fn check_graph(name: &str, d: &Dag, cfg: &CheckConfig) -> Result<CheckReport, VerifyError> {
    let f = lookup(name)?;
    Ok(report_for(name, 0, d, f(&GraphCtx::new(d), cfg)))
}

macro_rules! single_graph_checks {
    ($($fn_name:ident => $check:literal),* $(,)?) => {
        $(
            pub fn $fn_name(d: &Dag) -> CheckReport {
                check_graph($check, d, &CheckConfig::default()).expect("registered check")
            }
        )*
    };
}

single_graph_checks! {
    check_activation_lemma => "activation-lemma",
    check_no_chords => "no-chords",
    check_common_children => "common-children",
    check_subgraph_theorems => "subgraph-theorems",
    check_minimal_trail_theorem => "minimal-trail-theorem",
    check_local_rel_theorem => "local-rel-theorem",
}

const CHUNK: usize = 512;

/// Runs `names` over every graph of `spec`. Graphs are processed in
/// parallel; the reports do not depend on scheduling.
pub fn run_suite<S: AsRef<str>>(
    spec: &GenSpec,
    names: &[S],
    cfg: &CheckConfig,
) -> Result<Vec<CheckReport>, VerifyError> {
    let fns = names
        .iter()
        .map(|n| lookup(n.as_ref()).map(|f| (n.as_ref(), f)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut totals: Vec<CheckReport> = fns.iter().map(|(n, _)| CheckReport::new(n)).collect();
    let mut stream = generate(spec)?;
    let mut serial = 0u64;
    loop {
        let chunk: Vec<Dag> = stream.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let base = serial;
        serial += chunk.len() as u64;
        let per_graph: Vec<Vec<CheckReport>> = chunk
            .par_iter()
            .enumerate()
            .map(|(i, d)| {
                let ctx = GraphCtx::new(d);
                fns.iter()
                    .map(|(name, f)| report_for(name, base + i as u64, d, f(&ctx, cfg)))
                    .collect()
            })
            .collect();
        for reports in per_graph {
            for (total, r) in totals.iter_mut().zip(reports) {
                total.merge(r);
            }
        }
    }
    Ok(totals)
}

/// Reruns the failing check on the stored graph; true when the same query
/// fails the same clause again.
pub fn replay(f: &Failure, cfg: &CheckConfig) -> Result<bool, VerifyError> {
    let d = f.graph.to_dag()?;
    let check = lookup(&f.check)?;
    let o = check(&GraphCtx::new(&d), cfg);
    Ok(o
        .failures
        .iter()
        .any(|(q, clause)| *q == f.query && *clause == f.clause))
}
