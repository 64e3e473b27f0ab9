//! d-separation queries.
//!
//! Two independent implementations are provided: [`d_separated_by_trails`]
//! checks every simple trail, [`d_separated`] runs a reachability search over
//! `(node, direction of travel)` states. The first serves as the oracle for
//! the second.

use std::collections::VecDeque;

use crate::dag::Dag;
use crate::error::QueryError;
use crate::nodeset::NodeSet;
use crate::search::enumerate_trails;
use crate::trail::{Conditioning, Trail};

/// Checks that `x`, `y`, `z` are pairwise disjoint and `x`, `y` nonempty.
pub fn validate_query(d: &Dag, x: &NodeSet, y: &NodeSet, z: &NodeSet) -> Result<(), QueryError> {
    for s in [x, y, z] {
        if s.universe() != d.node_count() {
            return Err(QueryError::InvalidQuery(
                "node set built for a different graph".into(),
            ));
        }
    }
    if x.is_empty() || y.is_empty() {
        return Err(QueryError::InvalidQuery("X and Y must be nonempty".into()));
    }
    if !x.is_disjoint(y) || !x.is_disjoint(z) || !y.is_disjoint(z) {
        return Err(QueryError::InvalidQuery("X, Y and Z must be disjoint".into()));
    }
    Ok(())
}

/// Enumeration-based d-separation: true iff every trail from `x` to `y` is
/// blocked by `z`.
pub fn d_separated_by_trails(
    d: &Dag,
    x: &NodeSet,
    y: &NodeSet,
    z: &NodeSet,
) -> Result<bool, QueryError> {
    validate_query(d, x, y, z)?;
    let cond = Conditioning::new(d, z);
    for a in x.iter() {
        for b in y.iter() {
            if enumerate_trails(d, a, b).any(|t| cond.activates(&t)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Travel {
    /// Entered the node from one of its children.
    Up,
    /// Entered the node from one of its parents.
    Down,
}

/// Reachability-based d-separation.
pub fn d_separated(d: &Dag, x: &NodeSet, y: &NodeSet, z: &NodeSet) -> Result<bool, QueryError> {
    validate_query(d, x, y, z)?;
    let opens = d.ancestors_of_set(z);
    let n = d.node_count();
    let mut seen = vec![[false; 2]; n];
    let slot = |t: Travel| match t {
        Travel::Up => 0,
        Travel::Down => 1,
    };
    let mut queue = VecDeque::new();
    for v in x.iter() {
        seen[v.0][slot(Travel::Up)] = true;
        queue.push_back((v, Travel::Up));
    }
    while let Some((v, t)) = queue.pop_front() {
        if y.contains(v) {
            return Ok(false);
        }
        let in_z = z.contains(v);
        let mut go = |w: crate::NodeId, t: Travel, q: &mut VecDeque<_>| {
            if !seen[w.0][slot(t)] {
                seen[w.0][slot(t)] = true;
                q.push_back((w, t));
            }
        };
        match t {
            Travel::Up if !in_z => {
                for &p in d.parents_of(v) {
                    go(p, Travel::Up, &mut queue);
                }
                for &c in d.children_of(v) {
                    go(c, Travel::Down, &mut queue);
                }
            }
            Travel::Up => {}
            Travel::Down => {
                if !in_z {
                    for &c in d.children_of(v) {
                        go(c, Travel::Down, &mut queue);
                    }
                }
                if opens.contains(v) {
                    for &p in d.parents_of(v) {
                        go(p, Travel::Up, &mut queue);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// All simple trails from `x` to `y` activated by `z`, sorted by node
/// sequence.
pub fn trails_xyz(
    d: &Dag,
    x: &NodeSet,
    y: &NodeSet,
    z: &NodeSet,
) -> Result<Vec<Trail>, QueryError> {
    validate_query(d, x, y, z)?;
    let cond = Conditioning::new(d, z);
    let mut out: Vec<Trail> = x
        .iter()
        .flat_map(|a| y.iter().map(move |b| (a, b)))
        .flat_map(|(a, b)| enumerate_trails(d, a, b).filter(|t| cond.activates(t)))
        .collect();
    out.sort();
    Ok(out)
}
