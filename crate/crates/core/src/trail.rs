//! Trails: simple paths in the skeleton, annotated with arc directions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dag::Dag;
use crate::error::QueryError;
use crate::nodeset::{NodeId, NodeSet};

/// Orientation of one trail step relative to the direction of travel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    /// `left -> right`
    Forward,
    /// `left <- right`
    Backward,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }

    /// The direction of the step `from ⇿ to`, if the nodes are adjacent.
    pub fn between(d: &Dag, from: NodeId, to: NodeId) -> Option<Direction> {
        if d.has_arc(from, to) {
            Some(Direction::Forward)
        } else if d.has_arc(to, from) {
            Some(Direction::Backward)
        } else {
            None
        }
    }

    pub fn arrow(self) -> &'static str {
        match self {
            Direction::Forward => "->",
            Direction::Backward => "<-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConnectionKind {
    /// `a -> v <- b`
    Converging,
    /// `a -> v -> b` or `a <- v <- b`
    Serial,
    /// `a <- v -> b`
    Diverging,
}

/// A simple trail. Equality is orientation-sensitive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trail {
    nodes: Vec<NodeId>,
    dirs: Vec<Direction>,
}

impl Trail {
    /// Builds the trail through `nodes`, reading directions off `d`.
    pub fn new(d: &Dag, nodes: Vec<NodeId>) -> Result<Trail, QueryError> {
        if nodes.len() < 2 {
            return Err(QueryError::InvalidTrail("a trail needs at least two nodes".into()));
        }
        let mut seen = NodeSet::empty(d.node_count());
        for &v in &nodes {
            if v.0 >= d.node_count() {
                return Err(QueryError::InvalidTrail(format!("node {v} out of range")));
            }
            if !seen.insert(v) {
                return Err(QueryError::InvalidTrail(format!("node {v} repeated")));
            }
        }
        let dirs = nodes
            .windows(2)
            .map(|w| {
                Direction::between(d, w[0], w[1]).ok_or_else(|| {
                    QueryError::InvalidTrail(format!("{} and {} are not adjacent", w[0], w[1]))
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Trail { nodes, dirs })
    }

    /// Caller guarantees the invariants.
    pub(crate) fn from_parts(nodes: Vec<NodeId>, dirs: Vec<Direction>) -> Trail {
        debug_assert_eq!(nodes.len(), dirs.len() + 1);
        Trail { nodes, dirs }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn dirs(&self) -> &[Direction] {
        &self.dirs
    }

    /// Number of nodes, endpoints included.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Trails always have two or more nodes.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn last(&self) -> NodeId {
        *self.nodes.last().unwrap()
    }

    pub fn interior(&self) -> &[NodeId] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.nodes.contains(&v)
    }

    pub fn reversed(&self) -> Trail {
        Trail {
            nodes: self.nodes.iter().rev().copied().collect(),
            dirs: self.dirs.iter().rev().map(|d| d.flip()).collect(),
        }
    }

    /// Connection type at interior position `i` (`1 <= i <= len - 2`).
    pub fn connection_at(&self, i: usize) -> ConnectionKind {
        assert!(
            i >= 1 && i + 1 < self.nodes.len(),
            "position {i} is not interior"
        );
        match (self.dirs[i - 1], self.dirs[i]) {
            (Direction::Forward, Direction::Backward) => ConnectionKind::Converging,
            (Direction::Backward, Direction::Forward) => ConnectionKind::Diverging,
            _ => ConnectionKind::Serial,
        }
    }

    /// Interior positions holding a converging connection, in trail order.
    pub fn converging_positions(&self) -> Vec<usize> {
        (1..self.nodes.len() - 1)
            .filter(|&i| self.connection_at(i) == ConnectionKind::Converging)
            .collect()
    }

    pub fn is_converging_free(&self) -> bool {
        self.dirs
            .windows(2)
            .all(|w| !(w[0] == Direction::Forward && w[1] == Direction::Backward))
    }

    /// The sub-trail between positions `from` and `to`, both inclusive.
    pub fn slice(&self, from: usize, to: usize) -> Trail {
        assert!(from < to && to < self.nodes.len());
        Trail {
            nodes: self.nodes[from..=to].to_vec(),
            dirs: self.dirs[from..to].to_vec(),
        }
    }

    /// Joins `self` and `next`, which must start where `self` ends.
    pub fn concat(&self, next: &Trail) -> Trail {
        assert_eq!(self.last(), next.first(), "trails do not meet");
        let mut nodes = self.nodes.clone();
        nodes.extend_from_slice(&next.nodes[1..]);
        let mut dirs = self.dirs.clone();
        dirs.extend_from_slice(&next.dirs);
        Trail { nodes, dirs }
    }

    /// Renders with labels, e.g. `v1 -> v2 <- v3`.
    pub fn render(&self, d: &Dag) -> String {
        let mut out = d.label(self.nodes[0]);
        for (dir, &v) in self.dirs.iter().zip(&self.nodes[1..]) {
            out.push(' ');
            out.push_str(dir.arrow());
            out.push(' ');
            out.push_str(&d.label(v));
        }
        out
    }

    /// Parses the notation produced by [`Trail::render`]; every arrow must
    /// match an arc of `d`.
    pub fn parse(d: &Dag, text: &str) -> Result<Trail, QueryError> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() < 3 || tokens.len().is_multiple_of(2) {
            return Err(QueryError::InvalidTrail(format!("malformed trail {text:?}")));
        }
        let lookup = |s: &str| {
            d.node_by_label(s)
                .ok_or_else(|| QueryError::InvalidTrail(format!("unknown node {s:?}")))
        };
        let mut nodes = vec![lookup(tokens[0])?];
        let mut dirs = Vec::new();
        for pair in tokens[1..].chunks(2) {
            let dir = match pair[0] {
                "->" => Direction::Forward,
                "<-" => Direction::Backward,
                other => {
                    return Err(QueryError::InvalidTrail(format!("unknown arrow {other:?}")))
                }
            };
            nodes.push(lookup(pair[1])?);
            dirs.push(dir);
        }
        let trail = Trail::new(d, nodes)?;
        if trail.dirs != dirs {
            return Err(QueryError::InvalidTrail(format!(
                "arrows in {text:?} disagree with the graph"
            )));
        }
        Ok(trail)
    }
}

impl fmt::Display for Trail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.nodes[0])?;
        for (dir, v) in self.dirs.iter().zip(&self.nodes[1..]) {
            write!(f, " {} {}", dir.arrow(), v)?;
        }
        Ok(())
    }
}

/// Arcs of `d` joining two non-consecutive nodes of `t`, oriented as in
/// `d`, ordered by trail position.
pub fn chords(d: &Dag, t: &Trail) -> Vec<(NodeId, NodeId)> {
    let ns = t.nodes();
    let mut out = Vec::new();
    for i in 0..ns.len() {
        for j in i + 2..ns.len() {
            if d.has_arc(ns[i], ns[j]) {
                out.push((ns[i], ns[j]));
            } else if d.has_arc(ns[j], ns[i]) {
                out.push((ns[j], ns[i]));
            }
        }
    }
    out
}

/// Position of the common ancestor of a converging-free trail: the
/// diverging node, or for an all-serial trail the endpoint the arcs point
/// away from.
pub fn common_ancestor(t: &Trail) -> Result<usize, QueryError> {
    if let Some(&p) = t.converging_positions().first() {
        return Err(QueryError::HasConvergingConnection(p));
    }
    if let Some(m) = (1..t.len() - 1).find(|&i| t.connection_at(i) == ConnectionKind::Diverging) {
        return Ok(m);
    }
    Ok(match t.dirs()[0] {
        Direction::Forward => 0,
        Direction::Backward => t.len() - 1,
    })
}

/// `Z` together with the precomputed set `Z ∪ an(Z)`: a converging node is
/// unblocked exactly when it lies in the latter.
#[derive(Debug, Clone)]
pub struct Conditioning {
    z: NodeSet,
    z_or_ancestors: NodeSet,
}

impl Conditioning {
    pub fn new(d: &Dag, z: &NodeSet) -> Conditioning {
        Conditioning {
            z: z.clone(),
            z_or_ancestors: d.ancestors_of_set(z),
        }
    }

    pub fn set(&self) -> &NodeSet {
        &self.z
    }

    /// `({v} ∪ de(v)) ∩ Z ≠ ∅`
    pub fn opens_collider(&self, v: NodeId) -> bool {
        self.z_or_ancestors.contains(v)
    }

    pub fn activates(&self, t: &Trail) -> bool {
        (1..t.len() - 1).all(|i| {
            let v = t.nodes()[i];
            match t.connection_at(i) {
                ConnectionKind::Converging => self.opens_collider(v),
                _ => !self.z.contains(v),
            }
        })
    }
}

/// Whether `t` is activated (not blocked) by `z`.
pub fn is_activated(d: &Dag, t: &Trail, z: &NodeSet) -> bool {
    Conditioning::new(d, z).activates(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> Dag {
        let labels = (1..=7).map(|i| format!("v{i}")).collect();
        Dag::new(
            7,
            &[(0, 3), (0, 1), (0, 6), (1, 3), (1, 4), (1, 6), (2, 4), (2, 5), (5, 6)],
            Some(labels),
        )
        .unwrap()
    }

    fn diamond_with_chord() -> Dag {
        // 1->2, 2->4, 1->3, 3->4, 2->3 as indices 0..3
        Dag::new(4, &[(0, 1), (1, 3), (0, 2), (2, 3), (1, 2)], None).unwrap()
    }

    fn t(d: &Dag, s: &str) -> Trail {
        Trail::parse(d, s).unwrap()
    }

    #[test]
    fn connection_kinds() {
        let d = fig1();
        let tr = t(&d, "v2 -> v5 <- v3 -> v6");
        assert_eq!(tr.connection_at(1), ConnectionKind::Converging);
        assert_eq!(tr.connection_at(2), ConnectionKind::Diverging);
        let chain = Dag::new(3, &[(0, 1), (1, 2)], None).unwrap();
        assert_eq!(t(&chain, "0 -> 1 -> 2").connection_at(1), ConnectionKind::Serial);
        let fork = Dag::new(3, &[(1, 0), (1, 2)], None).unwrap();
        assert_eq!(t(&fork, "0 <- 1 -> 2").connection_at(1), ConnectionKind::Diverging);
    }

    #[test]
    fn activation_on_fig1() {
        let d = fig1();
        let tr = t(&d, "v2 -> v5 <- v3 -> v6");
        assert!(!is_activated(&d, &tr, &NodeSet::empty(7)));
        assert!(is_activated(&d, &tr, &d.node_set([4usize])));
        let arc = t(&d, "v1 -> v2");
        assert!(is_activated(&d, &arc, &d.node_set([3usize, 6])));
        // a serial node in Z blocks
        let serial = t(&d, "v1 -> v2 -> v5");
        assert!(!is_activated(&d, &serial, &d.node_set([1usize])));
    }

    #[test]
    fn chords_of_diamond_trail() {
        let d = diamond_with_chord();
        let tr = Trail::new(&d, vec![NodeId(0), NodeId(1), NodeId(2), NodeId(3)]).unwrap();
        assert_eq!(
            chords(&d, &tr),
            vec![(NodeId(0), NodeId(2)), (NodeId(1), NodeId(3))]
        );
        let two = Trail::new(&d, vec![NodeId(0), NodeId(1)]).unwrap();
        assert!(chords(&d, &two).is_empty());
    }

    #[test]
    fn chords_fig3_trail() {
        // v1->v2, v1->v3, v1->v4, v2->v3, v3->v4, v2->v5, v3->v5, v4->v5
        let d = Dag::new(
            5,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3), (1, 4), (2, 4), (3, 4)],
            None,
        )
        .unwrap();
        let tr = Trail::new(&d, vec![NodeId(1), NodeId(0), NodeId(3)]).unwrap();
        assert!(chords(&d, &tr).is_empty());
    }

    #[test]
    fn common_ancestors() {
        let fork = Dag::new(3, &[(1, 0), (1, 2)], None).unwrap();
        assert_eq!(common_ancestor(&t(&fork, "0 <- 1 -> 2")), Ok(1));
        let chain = Dag::new(3, &[(0, 1), (1, 2)], None).unwrap();
        assert_eq!(common_ancestor(&t(&chain, "0 -> 1 -> 2")), Ok(0));
        assert_eq!(common_ancestor(&t(&chain, "2 <- 1 <- 0")), Ok(2));
        let collider = Dag::new(3, &[(0, 1), (2, 1)], None).unwrap();
        assert_eq!(
            common_ancestor(&t(&collider, "0 -> 1 <- 2")),
            Err(QueryError::HasConvergingConnection(1))
        );
    }

    #[test]
    fn common_ancestor_of_counter_example_subtrail() {
        // c1 <- t1 -> c2
        let d = Dag::new(3, &[(1, 0), (1, 2), (0, 2)], None).unwrap();
        assert_eq!(common_ancestor(&t(&d, "0 <- 1 -> 2")), Ok(1));
    }

    #[test]
    fn render_parse_reverse() {
        let d = fig1();
        let tr = t(&d, "v1 -> v2 -> v5 <- v3 -> v6");
        assert_eq!(tr.render(&d), "v1 -> v2 -> v5 <- v3 -> v6");
        let rev = tr.reversed();
        assert_eq!(rev.render(&d), "v6 <- v3 -> v5 <- v2 <- v1");
        assert_eq!(rev.reversed(), tr);
        assert!(Trail::parse(&d, "v1 <- v2").is_err());
        assert!(Trail::parse(&d, "v1 -> v5").is_err());
        assert!(Trail::parse(&d, "v1 -> v2 -> v1").is_err());
    }

    #[test]
    fn slice_and_concat() {
        let d = fig1();
        let tr = t(&d, "v1 -> v2 -> v5 <- v3 -> v6");
        let a = tr.slice(0, 2);
        let b = tr.slice(2, 4);
        assert_eq!(a.concat(&b), tr);
    }
}
