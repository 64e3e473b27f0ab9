//! Active cycles and local relationships.

use std::collections::VecDeque;

use serde::Serialize;

use crate::dag::Dag;
use crate::dsep::d_separated;
use crate::error::QueryError;
use crate::nodeset::{NodeId, NodeSet};
use crate::search::{TrailConstraints, Trails};
use crate::trail::{chords, Trail};

/// A chordless closed trail `apex <- left_parent ⇿ ... ⇿ right_parent -> apex`
/// whose connector has at least one interior node and no converging
/// connection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveCycle {
    pub apex: NodeId,
    pub left_parent: NodeId,
    pub right_parent: NodeId,
    /// Trail from `left_parent` to `right_parent`.
    pub connector: Trail,
}

impl ActiveCycle {
    /// Nodes of the closed trail starting at the apex (apex not repeated).
    pub fn cycle_nodes(&self) -> Vec<NodeId> {
        let mut v = vec![self.apex];
        v.extend_from_slice(self.connector.nodes());
        v
    }

    /// Renders as `v5 <- v2 <- v1 -> v4 -> v5`.
    pub fn render(&self, d: &Dag) -> String {
        format!(
            "{} <- {} -> {}",
            d.label(self.apex),
            self.connector.render(d),
            d.label(self.apex)
        )
    }

    /// Re-checks every defining condition from scratch against `d`.
    pub fn validate(&self, d: &Dag) -> Result<(), String> {
        let (v, w, z) = (self.apex, self.left_parent, self.right_parent);
        if w == z {
            return Err("parents coincide".into());
        }
        if !d.has_arc(w, v) || !d.has_arc(z, v) {
            return Err("endpoints are not both parents of the apex".into());
        }
        let ns = self.connector.nodes();
        if ns.first() != Some(&w) || ns.last() != Some(&z) {
            return Err("connector does not join the two parents".into());
        }
        if ns.len() < 3 {
            return Err("connector has no interior node".into());
        }
        if ns.contains(&v) {
            return Err("apex lies on the connector".into());
        }
        for win in ns.windows(2) {
            if !d.adjacent(win[0], win[1]) {
                return Err("connector steps are not arcs".into());
            }
        }
        for i in 1..ns.len() - 1 {
            if d.has_arc(ns[i - 1], ns[i]) && d.has_arc(ns[i + 1], ns[i]) {
                return Err(format!("converging connection at {}", ns[i]));
            }
        }
        // closed trail: apex, w, x1 .. xn, z, back to apex
        let cyc = self.cycle_nodes();
        let k = cyc.len();
        for i in 0..k {
            for j in i + 1..k {
                let consecutive = j == i + 1 || (i == 0 && j == k - 1);
                if !consecutive && d.adjacent(cyc[i], cyc[j]) {
                    return Err(format!("chord between {} and {}", cyc[i], cyc[j]));
                }
            }
        }
        Ok(())
    }
}

/// Active cycles of `d`, ordered by apex, then parent pair, then connector.
/// With `stop_at_first` at most one is returned.
pub fn find_active_cycles(d: &Dag, stop_at_first: bool) -> Vec<ActiveCycle> {
    let mut out = Vec::new();
    for v in d.nodes() {
        let pa = d.parents_of(v);
        for (i, &w) in pa.iter().enumerate() {
            for &z in &pa[i + 1..] {
                // an arc between w and z would be a chord of every candidate
                if d.adjacent(w, z) {
                    continue;
                }
                let mut allowed = NodeSet::full(d.node_count());
                allowed.remove(v);
                for &u in d.neighbors_of(v) {
                    allowed.remove(u);
                }
                let cons = TrailConstraints::converging_free().within(allowed);
                for connector in Trails::new(d, w, z, cons) {
                    if connector.len() >= 3 && chords(d, &connector).is_empty() {
                        out.push(ActiveCycle {
                            apex: v,
                            left_parent: w,
                            right_parent: z,
                            connector,
                        });
                        if stop_at_first {
                            return out;
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn has_active_cycle(d: &Dag) -> bool {
    !find_active_cycles(d, true).is_empty()
}

/// Two members of `K` joined by a converging-free trail through nodes
/// outside `K` without being adjacent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalWitness {
    pub v1: NodeId,
    pub v2: NodeId,
    pub trail: Trail,
}

/// Shortest converging-free trails from `start` whose interior avoids
/// `blocked`; returns, for each node, the predecessor state that first
/// reached it. A converging-free trail climbs from `start` through
/// ancestors, then descends, so the state is `(node, descending)`.
fn converging_free_reach(
    d: &Dag,
    start: NodeId,
    blocked: &NodeSet,
) -> Vec<[Option<(NodeId, bool)>; 2]> {
    let n = d.node_count();
    let mut pred: Vec<[Option<(NodeId, bool)>; 2]> = vec![[None, None]; n];
    let mut queue = VecDeque::from([(start, false)]);
    pred[start.0][0] = Some((start, false));
    while let Some((u, desc)) = queue.pop_front() {
        if u != start && blocked.contains(u) {
            continue;
        }
        let mut step = |w: NodeId, wdesc: bool, q: &mut VecDeque<(NodeId, bool)>| {
            let slot = &mut pred[w.0][wdesc as usize];
            if slot.is_none() && w != start {
                *slot = Some((u, desc));
                q.push_back((w, wdesc));
            }
        };
        if !desc {
            for &p in d.parents_of(u) {
                step(p, false, &mut queue);
            }
        }
        for &c in d.children_of(u) {
            step(c, true, &mut queue);
        }
    }
    pred
}

fn rebuild(
    d: &Dag,
    start: NodeId,
    end: NodeId,
    pred: &[[Option<(NodeId, bool)>; 2]],
) -> Option<Trail> {
    let mut state = if pred[end.0][0].is_some() {
        (end, false)
    } else {
        (end, true)
    };
    pred[end.0][state.1 as usize]?;
    let mut nodes = vec![end];
    while state.0 != start {
        state = pred[state.0 .0][state.1 as usize].expect("predecessor chain");
        nodes.push(state.0);
    }
    nodes.reverse();
    Trail::new(d, nodes).ok()
}

/// The first pair (in index order) violating local relationships, if any.
pub fn local_violation(d: &Dag, k: &NodeSet) -> Option<LocalWitness> {
    for v1 in k.iter() {
        let pred = converging_free_reach(d, v1, k);
        for v2 in k.iter().filter(|&v2| v2 > v1) {
            if d.adjacent(v1, v2) || (pred[v2.0][0].is_none() && pred[v2.0][1].is_none()) {
                continue;
            }
            let trail = rebuild(d, v1, v2, &pred).expect("shortest converging-free walk is simple");
            return Some(LocalWitness { v1, v2, trail });
        }
    }
    None
}

pub fn has_local_relationships(d: &Dag, k: &NodeSet) -> bool {
    local_violation(d, k).is_none()
}

/// Same verdict as [`has_local_relationships`], by enumerating trails.
pub fn has_local_relationships_by_trails(d: &Dag, k: &NodeSet) -> bool {
    let outside = k.complement();
    let ks = k.to_vec();
    for (i, &v1) in ks.iter().enumerate() {
        for &v2 in &ks[i + 1..] {
            if d.adjacent(v1, v2) {
                continue;
            }
            let cons = TrailConstraints::converging_free().within(outside.clone());
            if Trails::new(d, v1, v2, cons).next().is_some() {
                return false;
            }
        }
    }
    true
}

/// A partition of a node set into blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub blocks: Vec<NodeSet>,
}

impl Partition {
    /// Lists every way the partition fails to be a decomposition of `k`
    /// into connected, locally related, pairwise ∅-d-separated blocks.
    pub fn violations(&self, d: &Dag, k: &NodeSet) -> Vec<String> {
        let mut out = Vec::new();
        let mut union = NodeSet::empty(d.node_count());
        for (i, b) in self.blocks.iter().enumerate() {
            if b.is_empty() {
                out.push(format!("block {i} is empty"));
            }
            if !union.is_disjoint(b) {
                out.push(format!("block {i} overlaps an earlier block"));
            }
            union = union.union(b);
            if components(d, b).len() > 1 {
                out.push(format!("block {i} is not connected"));
            }
            if !has_local_relationships(d, b) {
                out.push(format!("block {i} lacks local relationships"));
            }
        }
        if &union != k {
            out.push("blocks do not cover K".into());
        }
        let empty = NodeSet::empty(d.node_count());
        for i in 0..self.blocks.len() {
            for j in i + 1..self.blocks.len() {
                if d_separated(d, &self.blocks[i], &self.blocks[j], &empty) != Ok(true) {
                    out.push(format!("blocks {i} and {j} are d-connected given the empty set"));
                }
            }
        }
        out
    }
}

/// Connected components of the skeleton induced on `k`, ordered by their
/// smallest member.
fn components(d: &Dag, k: &NodeSet) -> Vec<NodeSet> {
    let mut seen = NodeSet::empty(d.node_count());
    let mut out = Vec::new();
    for root in k.iter() {
        if seen.contains(root) {
            continue;
        }
        let mut block = NodeSet::empty(d.node_count());
        let mut queue = VecDeque::from([root]);
        seen.insert(root);
        while let Some(u) = queue.pop_front() {
            block.insert(u);
            for &w in d.neighbors_of(u) {
                if k.contains(w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        out.push(block);
    }
    out
}

/// Splits a set with local relationships into its classes under "is
/// connected in `k` to".
pub fn decompose_local(d: &Dag, k: &NodeSet) -> Result<Partition, QueryError> {
    if let Some(w) = local_violation(d, k) {
        return Err(QueryError::NotLocal(w.v1, w.v2));
    }
    let p = Partition {
        blocks: components(d, k),
    };
    debug_assert!(p.violations(d, k).is_empty(), "{:?}", p.violations(d, k));
    Ok(p)
}

/// Whether `V ∖ {v}` has local relationships: every two neighbours of `v`
/// meeting at a serial or diverging connection must be adjacent.
pub fn local_after_removal(d: &Dag, v: NodeId) -> bool {
    let nb = d.neighbors_of(v);
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            let converging = d.has_arc(a, v) && d.has_arc(b, v);
            if !converging && !d.adjacent(a, b) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LocalVerdict {
    ConnectedInK,
    DSeparatedByEmpty,
}

/// Which alternatives hold for a pair of nodes in a set with local
/// relationships. Both may hold at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Dichotomy {
    pub connected_in_k: bool,
    pub dseparated_by_empty: bool,
}

pub fn dichotomy(d: &Dag, k: &NodeSet, v1: NodeId, v2: NodeId) -> Result<Dichotomy, QueryError> {
    if v1 == v2 || !k.contains(v1) || !k.contains(v2) {
        return Err(QueryError::InvalidQuery(
            "expected two distinct members of K".into(),
        ));
    }
    if let Some(w) = local_violation(d, k) {
        return Err(QueryError::NotLocal(w.v1, w.v2));
    }
    let connected_in_k = components(d, k).iter().any(|b| b.contains(v1) && b.contains(v2));
    let n = d.node_count();
    let dseparated_by_empty = d_separated(
        d,
        &NodeSet::singleton(n, v1),
        &NodeSet::singleton(n, v2),
        &NodeSet::empty(n),
    )?;
    Ok(Dichotomy {
        connected_in_k,
        dseparated_by_empty,
    })
}

/// Connected in `K` (reported first when both hold) or d-separated given
/// the empty set.
pub fn connected_or_dsep(
    d: &Dag,
    k: &NodeSet,
    v1: NodeId,
    v2: NodeId,
) -> Result<LocalVerdict, QueryError> {
    let dich = dichotomy(d, k, v1, v2)?;
    if dich.connected_in_k {
        Ok(LocalVerdict::ConnectedInK)
    } else if dich.dseparated_by_empty {
        Ok(LocalVerdict::DSeparatedByEmpty)
    } else {
        Err(QueryError::Violated(format!(
            "{v1} and {v2} are neither connected in K nor d-separated"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> Dag {
        Dag::new(
            7,
            &[(0, 3), (0, 1), (0, 6), (1, 3), (1, 4), (1, 6), (2, 4), (2, 5), (5, 6)],
            None,
        )
        .unwrap()
    }

    fn fig3() -> Dag {
        Dag::new(
            5,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3), (1, 4), (2, 4), (3, 4)],
            None,
        )
        .unwrap()
    }

    #[test]
    fn fig3_has_exactly_one_active_cycle() {
        let d = fig3();
        let all = find_active_cycles(&d, false);
        assert_eq!(all.len(), 1);
        let c = &all[0];
        assert_eq!((c.apex, c.left_parent, c.right_parent), (NodeId(4), NodeId(1), NodeId(3)));
        assert_eq!(c.connector.nodes(), &[NodeId(1), NodeId(0), NodeId(3)]);
        assert_eq!(c.validate(&d), Ok(()));
    }

    #[test]
    fn fig1_and_forests_have_none() {
        assert!(find_active_cycles(&fig1(), false).is_empty());
        let tree = Dag::new(5, &[(0, 1), (0, 2), (3, 2), (2, 4)], None).unwrap();
        assert!(!has_active_cycle(&tree));
    }

    #[test]
    fn plain_diamond_is_an_active_cycle() {
        let d = Dag::new(4, &[(0, 1), (0, 2), (1, 3), (2, 3)], None).unwrap();
        assert!(has_active_cycle(&d));
        // the horizontal arc is a chord
        let d = Dag::new(4, &[(0, 1), (0, 2), (1, 3), (2, 3), (1, 2)], None).unwrap();
        assert!(!has_active_cycle(&d));
    }

    #[test]
    fn validate_rejects_chorded_cycle() {
        let d = Dag::new(4, &[(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)], None).unwrap();
        let c = ActiveCycle {
            apex: NodeId(3),
            left_parent: NodeId(1),
            right_parent: NodeId(2),
            connector: Trail::new(&d, vec![NodeId(1), NodeId(0), NodeId(2)]).unwrap(),
        };
        assert!(c.validate(&d).is_err());
        assert!(!has_active_cycle(&d));
    }

    #[test]
    fn remark_graph_lacks_local_relationships() {
        // 1->2->3->4, 1->5->4 as 0..4
        let d = Dag::new(5, &[(0, 1), (1, 2), (2, 3), (0, 4), (4, 3)], None).unwrap();
        let k = d.node_set([0usize, 1, 2, 3]);
        let w = local_violation(&d, &k).unwrap();
        assert_eq!((w.v1, w.v2), (NodeId(0), NodeId(3)));
        assert_eq!(w.trail.nodes(), &[NodeId(0), NodeId(4), NodeId(3)]);
        assert!(!has_local_relationships_by_trails(&d, &k));
        assert!(has_local_relationships(&d, &NodeSet::full(5)));
        assert!(has_local_relationships_by_trails(&d, &NodeSet::full(5)));
        assert!(has_local_relationships(&d, &d.node_set([2usize])));
    }

    #[test]
    fn decompose_local_blocks() {
        // a -> b, c isolated from them
        let d = Dag::new(3, &[(0, 1)], None).unwrap();
        let k = NodeSet::full(3);
        let p = decompose_local(&d, &k).unwrap();
        assert_eq!(p.blocks, vec![d.node_set([0usize, 1]), d.node_set([2usize])]);
        assert!(p.violations(&d, &k).is_empty());
        let single = decompose_local(&d, &d.node_set([2usize])).unwrap();
        assert_eq!(single.blocks.len(), 1);
    }

    #[test]
    fn fig1_v4_v5_not_local() {
        let d = fig1();
        assert_eq!(
            decompose_local(&d, &d.node_set([4usize, 3])),
            Err(QueryError::NotLocal(NodeId(3), NodeId(4)))
        );
    }

    #[test]
    fn removal_characterisation() {
        let sink = Dag::new(3, &[(0, 2), (1, 2)], None).unwrap();
        assert!(local_after_removal(&sink, NodeId(2)));
        let chain = Dag::new(3, &[(0, 1), (1, 2)], None).unwrap();
        assert!(!local_after_removal(&chain, NodeId(1)));
        let closed = Dag::new(3, &[(0, 1), (1, 2), (0, 2)], None).unwrap();
        assert!(local_after_removal(&closed, NodeId(1)));
    }

    #[test]
    fn verdicts() {
        let d = Dag::new(3, &[(0, 1)], None).unwrap();
        let k = NodeSet::full(3);
        assert_eq!(connected_or_dsep(&d, &k, NodeId(0), NodeId(1)), Ok(LocalVerdict::ConnectedInK));
        assert_eq!(
            connected_or_dsep(&d, &k, NodeId(0), NodeId(2)),
            Ok(LocalVerdict::DSeparatedByEmpty)
        );
        assert!(connected_or_dsep(&d, &k, NodeId(0), NodeId(0)).is_err());
    }

    #[test]
    fn both_alternatives_can_hold() {
        // 0 -> 1 <- 2 with K = V: connected in K and d-separated by ∅
        let d = Dag::new(3, &[(0, 1), (2, 1)], None).unwrap();
        let dich = dichotomy(&d, &NodeSet::full(3), NodeId(0), NodeId(2)).unwrap();
        assert!(dich.connected_in_k && dich.dseparated_by_empty);
    }
}
