use serde::{Deserialize, Serialize};

use crate::io::GraphDocument;

/// Failures kept per report; the total is always counted.
pub const MAX_RECORDED_FAILURES: usize = 50;

/// A counter-example: the graph, the query that exposed it and the clause
/// that did not hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub check: String,
    pub graph_serial: u64,
    pub graph: GraphDocument,
    pub query: serde_json::Value,
    pub clause: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub graphs_examined: u64,
    /// Graphs outside the check's hypotheses; nothing was asserted on them.
    pub graphs_skipped: u64,
    pub instances_examined: u64,
    pub instances_skipped: u64,
    pub failure_count: u64,
    /// The failures with the smallest graph serial numbers.
    pub failures: Vec<Failure>,
}

impl CheckReport {
    pub fn new(check: &str) -> CheckReport {
        CheckReport {
            check: check.to_string(),
            graphs_examined: 0,
            graphs_skipped: 0,
            instances_examined: 0,
            instances_skipped: 0,
            failure_count: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    /// Adds `other` in place. Associative; failures stay ordered by graph
    /// serial regardless of merge order.
    pub fn merge(&mut self, other: CheckReport) {
        debug_assert_eq!(self.check, other.check);
        self.graphs_examined += other.graphs_examined;
        self.graphs_skipped += other.graphs_skipped;
        self.instances_examined += other.instances_examined;
        self.instances_skipped += other.instances_skipped;
        self.failure_count += other.failure_count;
        self.failures.extend(other.failures);
        self.failures.sort_by_key(|f| f.graph_serial);
        self.failures.truncate(MAX_RECORDED_FAILURES);
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{:<22} {}  graphs {} (skipped {})  instances {} (skipped {})  failures {}",
            self.check,
            if self.passed() { "PASS" } else { "FAIL" },
            self.graphs_examined,
            self.graphs_skipped,
            self.instances_examined,
            self.instances_skipped,
            self.failure_count
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn failing(serial: u64) -> CheckReport {
        let mut r = CheckReport::new("c");
        r.graphs_examined = 1;
        r.failure_count = 1;
        r.failures.push(Failure {
            check: "c".into(),
            graph_serial: serial,
            graph: GraphDocument {
                nodes: vec![],
                edges: vec![],
            },
            query: serde_json::Value::Null,
            clause: "x".into(),
        });
        r
    }

    #[test]
    fn merge_is_order_insensitive() {
        let mut a = failing(3);
        a.merge(failing(1));
        let mut b = failing(1);
        b.merge(failing(3));
        assert_eq!(a, b);
        assert_eq!(a.graphs_examined, 2);
        assert!(!a.passed());
        assert!(CheckReport::new("c").passed());
    }
}
