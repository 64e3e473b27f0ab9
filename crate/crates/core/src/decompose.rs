//! Splitting an activated trail at its converging nodes.

use std::collections::VecDeque;

use serde::Serialize;

use crate::dag::Dag;
use crate::error::QueryError;
use crate::nodeset::{NodeId, NodeSet};
use crate::trail::{Conditioning, Trail};

/// A shortest directed path `source -> interior... -> target` with
/// `target ∈ Z` and no interior node in `Z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DescendantPath {
    pub source: NodeId,
    pub interior: Vec<NodeId>,
    pub target: NodeId,
}

impl DescendantPath {
    /// Number of interior nodes.
    pub fn len(&self) -> usize {
        self.interior.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interior.is_empty()
    }

    pub fn nodes(&self) -> Vec<NodeId> {
        let mut v = Vec::with_capacity(self.interior.len() + 2);
        v.push(self.source);
        v.extend_from_slice(&self.interior);
        v.push(self.target);
        v
    }
}

/// Why a converging node does not block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ActivationWitness {
    InZ,
    ViaDescendant(DescendantPath),
}

impl ActivationWitness {
    /// Interior length of the descendant path, 0 for `InZ`.
    pub fn path_len(&self) -> usize {
        match self {
            ActivationWitness::InZ => 0,
            ActivationWitness::ViaDescendant(p) => p.len(),
        }
    }

    /// The node of `Z` that activates the converging node.
    pub fn anchor(&self, c: NodeId) -> NodeId {
        match self {
            ActivationWitness::InZ => c,
            ActivationWitness::ViaDescendant(p) => p.target,
        }
    }
}

/// For every node `v ∉ Z`, the number of arcs on a shortest directed path
/// from `v` into `Z` whose interior avoids `Z`; 0 on `Z`, `None` when no
/// such path exists.
fn steps_into(d: &Dag, z: &NodeSet) -> Vec<Option<usize>> {
    let mut h = vec![None; d.node_count()];
    let mut queue = VecDeque::new();
    for v in z.iter() {
        h[v.0] = Some(0);
        queue.push_back(v);
    }
    while let Some(w) = queue.pop_front() {
        let hw = h[w.0].unwrap();
        for &u in d.parents_of(w) {
            if h[u.0].is_none() {
                h[u.0] = Some(hw + 1);
                queue.push_back(u);
            }
        }
    }
    h
}

/// The closest descendant of `c` in `z`. Among shortest descendant paths
/// the lexicographically smallest node sequence is returned.
pub fn closest_descendant(d: &Dag, c: NodeId, z: &NodeSet) -> Result<ActivationWitness, QueryError> {
    closest_with(d, c, z, &steps_into(d, z))
}

fn closest_with(
    d: &Dag,
    c: NodeId,
    z: &NodeSet,
    h: &[Option<usize>],
) -> Result<ActivationWitness, QueryError> {
    if z.contains(c) {
        return Ok(ActivationWitness::InZ);
    }
    let Some(mut left) = h[c.0] else {
        return Err(QueryError::NoDescendantInZ(c));
    };
    let mut interior = Vec::new();
    let mut at = c;
    loop {
        // smallest child one step closer; children are sorted
        let next = *d
            .children_of(at)
            .iter()
            .find(|w| h[w.0] == Some(left - 1))
            .expect("distance labels are consistent");
        left -= 1;
        if left == 0 {
            return Ok(ActivationWitness::ViaDescendant(DescendantPath {
                source: c,
                interior,
                target: next,
            }));
        }
        interior.push(next);
        at = next;
    }
}

/// An activated trail split into converging nodes, their witnesses, and
/// the `C + 1` subtrails between consecutive converging nodes (with the
/// trail endpoints closing off the first and last one).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrailDecomposition {
    pub converging: Vec<NodeId>,
    pub witnesses: Vec<ActivationWitness>,
    pub subtrails: Vec<Trail>,
}

impl TrailDecomposition {
    /// Number of converging nodes.
    pub fn count(&self) -> usize {
        self.converging.len()
    }

    /// Interior lengths of the subtrails.
    pub fn subtrail_lengths(&self) -> Vec<usize> {
        self.subtrails.iter().map(|t| t.len() - 2).collect()
    }

    /// Glues the subtrails back together.
    pub fn reassemble(&self) -> Trail {
        let mut it = self.subtrails.iter();
        let first = it.next().expect("at least one subtrail").clone();
        it.fold(first, |acc, t| acc.concat(t))
    }
}

/// Decomposes `t`, which must be activated by `z`.
pub fn decompose(d: &Dag, t: &Trail, z: &NodeSet) -> Result<TrailDecomposition, QueryError> {
    if !Conditioning::new(d, z).activates(t) {
        return Err(QueryError::NotActivated);
    }
    let positions = t.converging_positions();
    let h = steps_into(d, z);
    let converging: Vec<NodeId> = positions.iter().map(|&p| t.nodes()[p]).collect();
    let witnesses = converging
        .iter()
        .map(|&c| closest_with(d, c, z, &h))
        .collect::<Result<Vec<_>, _>>()?;
    let mut cuts = Vec::with_capacity(positions.len() + 2);
    cuts.push(0);
    cuts.extend_from_slice(&positions);
    cuts.push(t.len() - 1);
    let subtrails = cuts.windows(2).map(|w| t.slice(w[0], w[1])).collect();
    Ok(TrailDecomposition {
        converging,
        witnesses,
        subtrails,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Counter-example graph: x c1 t1 c2 t2 c3 d1 y = 0..7
    pub(crate) fn counter_example() -> Dag {
        let labels = ["x", "c1", "t1", "c2", "t2", "c3", "d1", "y"]
            .map(String::from)
            .to_vec();
        Dag::new(
            8,
            &[
                (0, 1),
                (1, 3),
                (5, 3),
                (7, 5),
                (2, 1),
                (2, 3),
                (4, 3),
                (4, 5),
                (1, 6),
                (3, 6),
                (5, 6),
            ],
            Some(labels),
        )
        .unwrap()
    }

    #[test]
    fn closest_descendant_in_counter_example() {
        let d = counter_example();
        let z = d.node_set([1usize, 6, 5]);
        assert_eq!(
            closest_descendant(&d, NodeId(3), &z),
            Ok(ActivationWitness::ViaDescendant(DescendantPath {
                source: NodeId(3),
                interior: vec![],
                target: NodeId(6),
            }))
        );
        assert_eq!(closest_descendant(&d, NodeId(1), &z), Ok(ActivationWitness::InZ));
    }

    #[test]
    fn closest_descendant_on_chain() {
        let d = Dag::new(3, &[(0, 1), (1, 2)], None).unwrap();
        let w = closest_descendant(&d, NodeId(0), &d.node_set([2usize])).unwrap();
        let ActivationWitness::ViaDescendant(p) = w else { panic!() };
        assert_eq!(p.nodes(), vec![NodeId(0), NodeId(1), NodeId(2)]);
        assert_eq!(p.len(), 1);
        assert_eq!(
            closest_descendant(&d, NodeId(2), &d.node_set([0usize])),
            Err(QueryError::NoDescendantInZ(NodeId(2)))
        );
    }

    #[test]
    fn descendant_path_ties_break_lexicographically() {
        // 0 -> 2 -> 3, 0 -> 1 -> 3
        let d = Dag::new(4, &[(0, 2), (2, 3), (0, 1), (1, 3)], None).unwrap();
        let ActivationWitness::ViaDescendant(p) =
            closest_descendant(&d, NodeId(0), &d.node_set([3usize])).unwrap()
        else {
            panic!()
        };
        assert_eq!(p.interior, vec![NodeId(1)]);
    }

    #[test]
    fn descendant_path_interior_avoids_z() {
        // 0 -> 1 -> 2 with Z = {1, 2}: the path stops at 1
        let d = Dag::new(3, &[(0, 1), (1, 2)], None).unwrap();
        let ActivationWitness::ViaDescendant(p) =
            closest_descendant(&d, NodeId(0), &d.node_set([1usize, 2])).unwrap()
        else {
            panic!()
        };
        assert_eq!((p.target, p.len()), (NodeId(1), 0));
    }

    #[test]
    fn decompose_counter_example_trail() {
        let d = counter_example();
        let t = Trail::parse(&d, "x -> c1 <- t1 -> c2 <- t2 -> c3 <- y").unwrap();
        let z = d.node_set([1usize, 6, 5]);
        let dec = decompose(&d, &t, &z).unwrap();
        assert_eq!(dec.converging, vec![NodeId(1), NodeId(3), NodeId(5)]);
        assert_eq!(dec.witnesses[0], ActivationWitness::InZ);
        assert!(matches!(&dec.witnesses[1], ActivationWitness::ViaDescendant(p) if p.target == NodeId(6) && p.is_empty()));
        assert_eq!(dec.witnesses[2], ActivationWitness::InZ);
        assert_eq!(dec.subtrail_lengths(), vec![0, 1, 1, 0]);
        assert_eq!(dec.reassemble(), t);
    }

    #[test]
    fn decompose_without_converging_nodes() {
        let d = Dag::new(3, &[(0, 1), (1, 2)], None).unwrap();
        let t = Trail::new(&d, vec![NodeId(0), NodeId(1), NodeId(2)]).unwrap();
        let dec = decompose(&d, &t, &NodeSet::empty(3)).unwrap();
        assert_eq!(dec.count(), 0);
        assert_eq!(dec.subtrails, vec![t.clone()]);
        assert_eq!(
            decompose(&d, &t, &d.node_set([1usize])),
            Err(QueryError::NotActivated)
        );
    }
}
