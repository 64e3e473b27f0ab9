//! Enumeration of simple trails, optionally under structural constraints.
//!
//! Enumeration is a depth-first walk over ascending neighbour indices, so
//! trails come out in lexicographic order of their node sequences.

use std::collections::VecDeque;

use crate::dag::Dag;
use crate::nodeset::{NodeId, NodeSet};
use crate::trail::{Direction, Trail};

/// Restrictions on the trails produced by [`Trails`].
#[derive(Debug, Clone, Default)]
pub struct TrailConstraints {
    /// Reject trails with a converging interior node.
    pub no_converging: bool,
    /// Interior nodes must lie in this set (`None` allows every node).
    pub allowed_interior: Option<NodeSet>,
    /// Required direction of the step leaving the start node.
    pub first_dir: Option<Direction>,
    /// Required direction of the step entering the end node.
    pub last_dir: Option<Direction>,
}

impl TrailConstraints {
    pub fn converging_free() -> Self {
        TrailConstraints {
            no_converging: true,
            ..Default::default()
        }
    }

    pub fn within(mut self, allowed: NodeSet) -> Self {
        self.allowed_interior = Some(allowed);
        self
    }

    pub fn starting(mut self, dir: Direction) -> Self {
        self.first_dir = Some(dir);
        self
    }

    pub fn ending(mut self, dir: Direction) -> Self {
        self.last_dir = Some(dir);
        self
    }

    fn interior_ok(&self, v: NodeId) -> bool {
        self.allowed_interior.as_ref().is_none_or(|s| s.contains(v))
    }
}

/// Lazy stream of simple trails from `source` to `target`.
pub struct Trails<'a> {
    d: &'a Dag,
    target: NodeId,
    cons: TrailConstraints,
    max_nodes: usize,
    // skeleton distance to the target through admissible interior nodes
    dist: Vec<usize>,
    nodes: Vec<NodeId>,
    dirs: Vec<Direction>,
    cursor: Vec<usize>,
    on_path: NodeSet,
}

impl<'a> Trails<'a> {
    pub fn new(d: &'a Dag, source: NodeId, target: NodeId, cons: TrailConstraints) -> Self {
        Self::bounded(d, source, target, cons, d.node_count())
    }

    /// Only trails with at most `max_nodes` nodes.
    pub fn bounded(
        d: &'a Dag,
        source: NodeId,
        target: NodeId,
        cons: TrailConstraints,
        max_nodes: usize,
    ) -> Self {
        assert_ne!(source, target, "trail endpoints must differ");
        let dist = distances_to(d, target, &cons);
        let mut on_path = NodeSet::empty(d.node_count());
        on_path.insert(source);
        Trails {
            d,
            target,
            cons,
            max_nodes,
            dist,
            nodes: vec![source],
            dirs: Vec::new(),
            cursor: vec![0],
            on_path,
        }
    }
}

/// Undirected BFS distance from every node to `target`, where only the
/// target itself and admissible interior nodes may be passed through.
fn distances_to(d: &Dag, target: NodeId, cons: &TrailConstraints) -> Vec<usize> {
    let mut dist = vec![usize::MAX; d.node_count()];
    dist[target.0] = 0;
    let mut queue = VecDeque::from([target]);
    while let Some(u) = queue.pop_front() {
        if u != target && !cons.interior_ok(u) {
            continue;
        }
        for &w in d.neighbors_of(u) {
            if dist[w.0] == usize::MAX {
                dist[w.0] = dist[u.0] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

impl Iterator for Trails<'_> {
    type Item = Trail;

    fn next(&mut self) -> Option<Trail> {
        loop {
            let k = self.nodes.len().checked_sub(1)?;
            let u = self.nodes[k];
            let nb = self.d.neighbors_of(u);
            let Some(&w) = nb.get(self.cursor[k]) else {
                self.nodes.pop();
                self.cursor.pop();
                self.on_path.remove(u);
                if !self.nodes.is_empty() {
                    self.dirs.pop();
                }
                continue;
            };
            self.cursor[k] += 1;
            if self.on_path.contains(w) {
                continue;
            }
            let dir = if self.d.has_arc(u, w) {
                Direction::Forward
            } else {
                Direction::Backward
            };
            if k == 0 && self.cons.first_dir.is_some_and(|f| f != dir) {
                continue;
            }
            if self.cons.no_converging
                && k >= 1
                && self.dirs[k - 1] == Direction::Forward
                && dir == Direction::Backward
            {
                continue;
            }
            if w == self.target {
                if self.cons.last_dir.is_some_and(|l| l != dir) {
                    continue;
                }
                let mut nodes = self.nodes.clone();
                nodes.push(w);
                let mut dirs = self.dirs.clone();
                dirs.push(dir);
                return Some(Trail::from_parts(nodes, dirs));
            }
            // w becomes interior: at least one more node must follow
            if !self.cons.interior_ok(w)
                || self.dist[w.0] == usize::MAX
                || self.nodes.len() + 1 + self.dist[w.0] > self.max_nodes
            {
                continue;
            }
            self.nodes.push(w);
            self.dirs.push(dir);
            self.cursor.push(0);
            self.on_path.insert(w);
        }
    }
}

/// Every simple trail from `x` to `y` in the skeleton, lexicographically.
pub fn enumerate_trails(d: &Dag, x: NodeId, y: NodeId) -> Trails<'_> {
    Trails::new(d, x, y, TrailConstraints::default())
}

/// All trails of minimum node count from `a` to `b` satisfying `cons`;
/// empty when none exists.
pub fn shortest_constrained_trail(
    d: &Dag,
    a: NodeId,
    b: NodeId,
    cons: &TrailConstraints,
) -> Vec<Trail> {
    assert_ne!(a, b, "trail endpoints must differ");
    let lower = distances_to(d, b, cons)[a.0];
    if lower == usize::MAX {
        return Vec::new();
    }
    for max_nodes in lower + 1..=d.node_count() {
        let found: Vec<Trail> = Trails::bounded(d, a, b, cons.clone(), max_nodes).collect();
        if !found.is_empty() {
            debug_assert!(found.iter().all(|t| t.len() == max_nodes));
            return found;
        }
    }
    Vec::new()
}
