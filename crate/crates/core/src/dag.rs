//! Immutable directed acyclic graphs over dense node indices.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet, VecDeque};

use thiserror::Error;

use crate::nodeset::{NodeId, NodeSet};

/// Reasons a node/arc list does not describe a simple DAG.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("arc ({from}, {to}) refers to a node outside [0, {n})")]
    NodeOutOfRange { from: usize, to: usize, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("arc ({0}, {1}) listed more than once")]
    DuplicateArc(usize, usize),
    #[error("both ({0}, {1}) and ({1}, {0}) present")]
    AntiparallelArcs(usize, usize),
    #[error("directed cycle {0:?}")]
    CycleDetected(Vec<usize>),
    #[error("label {0:?} used for more than one node")]
    DuplicateLabel(String),
    #[error("{labels} labels given for {n} nodes")]
    LabelCount { labels: usize, n: usize },
}

/// A simple directed acyclic graph.
///
/// Adjacency lists are kept sorted by index; `children_set` gives O(1) arc
/// lookups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    n: usize,
    parents: Vec<Vec<NodeId>>,
    children: Vec<Vec<NodeId>>,
    neighbors: Vec<Vec<NodeId>>,
    children_set: Vec<NodeSet>,
    labels: Option<Vec<String>>,
}

impl Dag {
    /// Validates `arcs` and builds the graph. Duplicates are errors, never
    /// silently merged.
    pub fn new(
        n: usize,
        arcs: &[(usize, usize)],
        labels: Option<Vec<String>>,
    ) -> Result<Dag, BuildError> {
        let mut seen = HashSet::with_capacity(arcs.len());
        for &(u, v) in arcs {
            if u >= n || v >= n {
                return Err(BuildError::NodeOutOfRange { from: u, to: v, n });
            }
            if u == v {
                return Err(BuildError::SelfLoop(u));
            }
            if !seen.insert((u, v)) {
                return Err(BuildError::DuplicateArc(u, v));
            }
            if seen.contains(&(v, u)) {
                return Err(BuildError::AntiparallelArcs(v, u));
            }
        }
        if let Some(ls) = &labels {
            if ls.len() != n {
                return Err(BuildError::LabelCount { labels: ls.len(), n });
            }
            let mut uniq = HashSet::with_capacity(n);
            for l in ls {
                if !uniq.insert(l.as_str()) {
                    return Err(BuildError::DuplicateLabel(l.clone()));
                }
            }
        }

        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let mut children_set = vec![NodeSet::empty(n); n];
        for &(u, v) in arcs {
            children[u].push(NodeId(v));
            parents[v].push(NodeId(u));
            children_set[u].insert(NodeId(v));
        }
        for l in parents.iter_mut().chain(children.iter_mut()) {
            l.sort_unstable();
        }
        let neighbors = (0..n)
            .map(|i| {
                let mut nb: Vec<NodeId> =
                    parents[i].iter().chain(&children[i]).copied().collect();
                nb.sort_unstable();
                nb
            })
            .collect();

        if let Some(cycle) = find_cycle(n, &children) {
            return Err(BuildError::CycleDetected(cycle));
        }

        Ok(Dag {
            n,
            parents,
            children,
            neighbors,
            children_set,
            labels,
        })
    }

    /// A graph on `n` nodes without arcs.
    pub fn empty(n: usize) -> Dag {
        Dag::new(n, &[], None).expect("arcless graph is a DAG")
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.n).map(NodeId)
    }

    /// All arcs, sorted by (tail, head).
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(u, cs)| cs.iter().map(move |&v| (NodeId(u), v)))
    }

    #[inline]
    pub fn has_arc(&self, from: NodeId, to: NodeId) -> bool {
        self.children_set[from.0].contains(to)
    }

    /// Adjacent in the skeleton.
    #[inline]
    pub fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.has_arc(a, b) || self.has_arc(b, a)
    }

    #[inline]
    pub fn parents_of(&self, v: NodeId) -> &[NodeId] {
        &self.parents[v.0]
    }

    #[inline]
    pub fn children_of(&self, v: NodeId) -> &[NodeId] {
        &self.children[v.0]
    }

    /// Skeleton neighbours, ascending.
    #[inline]
    pub fn neighbors_of(&self, v: NodeId) -> &[NodeId] {
        &self.neighbors[v.0]
    }

    pub fn parents(&self, v: NodeId) -> NodeSet {
        NodeSet::from_nodes(self.n, self.parents[v.0].iter().copied())
    }

    pub fn children(&self, v: NodeId) -> NodeSet {
        self.children_set[v.0].clone()
    }

    /// Proper ancestors: `v` itself is excluded.
    pub fn ancestors(&self, v: NodeId) -> NodeSet {
        self.closure(v, |u| self.parents_of(u))
    }

    /// Proper descendants: `v` itself is excluded.
    pub fn descendants(&self, v: NodeId) -> NodeSet {
        self.closure(v, |u| self.children_of(u))
    }

    /// `set` together with every ancestor of a member.
    pub fn ancestors_of_set(&self, set: &NodeSet) -> NodeSet {
        let mut out = set.clone();
        let mut stack: Vec<NodeId> = set.to_vec();
        while let Some(u) = stack.pop() {
            for &p in self.parents_of(u) {
                if out.insert(p) {
                    stack.push(p);
                }
            }
        }
        out
    }

    fn closure<'a>(&'a self, v: NodeId, step: impl Fn(NodeId) -> &'a [NodeId]) -> NodeSet {
        let mut out = NodeSet::empty(self.n);
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            for &w in step(u) {
                if out.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        out
    }

    /// Kahn's algorithm, always releasing the smallest available index.
    pub fn topological_order(&self) -> Vec<NodeId> {
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<usize>> = indeg
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d == 0)
            .map(|(i, _)| Reverse(i))
            .collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(Reverse(u)) = ready.pop() {
            order.push(NodeId(u));
            for &c in &self.children[u] {
                indeg[c.0] -= 1;
                if indeg[c.0] == 0 {
                    ready.push(Reverse(c.0));
                }
            }
        }
        debug_assert_eq!(order.len(), self.n);
        order
    }

    /// The subgraph induced by `keep`, renumbered densely in ascending
    /// order. `mapping[old]` is the new id of a kept node.
    pub fn induced_subgraph(&self, keep: &NodeSet) -> (Dag, Vec<Option<NodeId>>) {
        let mut mapping = vec![None; self.n];
        let mut next = 0;
        for v in keep.iter() {
            mapping[v.0] = Some(NodeId(next));
            next += 1;
        }
        let arcs: Vec<(usize, usize)> = self
            .arcs()
            .filter_map(|(u, v)| Some((mapping[u.0]?.0, mapping[v.0]?.0)))
            .collect();
        let labels = self
            .labels
            .as_ref()
            .map(|ls| keep.iter().map(|v| ls[v.0].clone()).collect());
        let sub = Dag::new(next, &arcs, labels).expect("induced subgraph of a DAG is a DAG");
        (sub, mapping)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// The node's label, or its index when the graph is unlabeled.
    pub fn label(&self, v: NodeId) -> String {
        match &self.labels {
            Some(ls) => ls[v.0].clone(),
            None => v.0.to_string(),
        }
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        match &self.labels {
            Some(ls) => ls.iter().position(|l| l == label).map(NodeId),
            None => label.parse::<usize>().ok().filter(|&i| i < self.n).map(NodeId),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Dag, BuildError> {
        let arcs: Vec<(usize, usize)> = self.arcs().map(|(u, v)| (u.0, v.0)).collect();
        self.labels = None;
        Dag::new(self.n, &arcs, Some(labels))
    }

    /// Shorthand for a set over this graph's nodes.
    pub fn node_set<I>(&self, nodes: I) -> NodeSet
    where
        I: IntoIterator,
        I::Item: Into<NodeId>,
    {
        NodeSet::from_nodes(self.n, nodes)
    }
}

/// Returns a directed cycle (first node repeated at the end) if one exists.
fn find_cycle(n: usize, children: &[Vec<NodeId>]) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let mut mark = vec![Mark::New; n];
    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        // (node, next child index)
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::Open;
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            if let Some(&c) = children[u].get(*next) {
                *next += 1;
                match mark[c.0] {
                    Mark::New => {
                        mark[c.0] = Mark::Open;
                        stack.push((c.0, 0));
                    }
                    Mark::Open => {
                        let start = stack.iter().position(|&(w, _)| w == c.0).unwrap();
                        let mut cycle: Vec<usize> = stack[start..].iter().map(|&(w, _)| w).collect();
                        cycle.push(c.0);
                        return Some(cycle);
                    }
                    Mark::Done => {}
                }
            } else {
                mark[u] = Mark::Done;
                stack.pop();
            }
        }
    }
    None
}
