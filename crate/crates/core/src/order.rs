//! The strict partial order on activated trails and its minimal elements.
//!
//! A trail is summarised by a [`TrailKey`]; one trail is smaller than
//! another when its key is lexicographically smaller. Trails with equal keys
//! are incomparable, so the minimal elements of a trail set are exactly the
//! trails carrying the least key.

use std::cmp::Ordering;

use serde::Serialize;

use crate::dag::Dag;
use crate::decompose::{decompose, TrailDecomposition};
use crate::dsep::trails_xyz;
use crate::error::QueryError;
use crate::nodeset::NodeSet;
use crate::trail::Trail;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TrailKey {
    /// Converging nodes outside `Z`.
    pub converging_outside_z: usize,
    /// All converging nodes.
    pub converging: usize,
    /// Total interior length of the descendant paths.
    pub descendant_len: usize,
    /// Total interior length of the subtrails.
    pub subtrail_len: usize,
}

impl TrailKey {
    pub fn as_tuple(&self) -> (usize, usize, usize, usize) {
        (
            self.converging_outside_z,
            self.converging,
            self.descendant_len,
            self.subtrail_len,
        )
    }

    pub fn from_decomposition(dec: &TrailDecomposition, z: &NodeSet) -> TrailKey {
        TrailKey {
            converging_outside_z: dec.converging.iter().filter(|&&c| !z.contains(c)).count(),
            converging: dec.count(),
            descendant_len: dec.witnesses.iter().map(|w| w.path_len()).sum(),
            subtrail_len: dec.subtrail_lengths().iter().sum(),
        }
    }
}

impl From<(usize, usize, usize, usize)> for TrailKey {
    fn from((a, b, c, d): (usize, usize, usize, usize)) -> Self {
        TrailKey {
            converging_outside_z: a,
            converging: b,
            descendant_len: c,
            subtrail_len: d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrderResult {
    Less,
    Greater,
    Incomparable,
}

pub fn trail_key(d: &Dag, t: &Trail, z: &NodeSet) -> Result<TrailKey, QueryError> {
    Ok(TrailKey::from_decomposition(&decompose(d, t, z)?, z))
}

pub fn compare(a: &TrailKey, b: &TrailKey) -> OrderResult {
    match a.cmp(b) {
        Ordering::Less => OrderResult::Less,
        Ordering::Greater => OrderResult::Greater,
        Ordering::Equal => OrderResult::Incomparable,
    }
}

/// Result of [`minimal_trails`]. `min_key` is `None` exactly when no trail
/// is activated, i.e. when `X` and `Y` are d-separated by `Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalTrails {
    pub min_key: Option<TrailKey>,
    pub minimizers: Vec<Trail>,
}

/// Minimal elements of the activated trails from `x` to `y`, found by an
/// exhaustive key scan.
pub fn minimal_trails(
    d: &Dag,
    x: &NodeSet,
    y: &NodeSet,
    z: &NodeSet,
) -> Result<MinimalTrails, QueryError> {
    let keyed = keyed_trails(d, x, y, z)?;
    let Some(min_key) = keyed.iter().map(|(_, k)| *k).min() else {
        return Ok(MinimalTrails {
            min_key: None,
            minimizers: Vec::new(),
        });
    };
    let minimizers = keyed
        .into_iter()
        .filter(|(_, k)| *k == min_key)
        .map(|(t, _)| t)
        .collect();
    Ok(MinimalTrails {
        min_key: Some(min_key),
        minimizers,
    })
}

/// Every activated trail with its key, sorted by node sequence.
pub fn keyed_trails(
    d: &Dag,
    x: &NodeSet,
    y: &NodeSet,
    z: &NodeSet,
) -> Result<Vec<(Trail, TrailKey)>, QueryError> {
    trails_xyz(d, x, y, z)?
        .into_iter()
        .map(|t| {
            let k = trail_key(d, &t, z)?;
            Ok((t, k))
        })
        .collect()
}

/// Indices of the elements no other element is strictly below, by direct
/// pairwise comparison.
pub fn minimal_by_dominance(keys: &[TrailKey]) -> Vec<usize> {
    (0..keys.len())
        .filter(|&i| {
            !keys
                .iter()
                .any(|k| compare(k, &keys[i]) == OrderResult::Less)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::NodeId;

    fn diamond_with_chord() -> Dag {
        Dag::new(4, &[(0, 1), (1, 3), (0, 2), (2, 3), (1, 2)], None).unwrap()
    }

    fn fig1() -> Dag {
        let labels = (1..=7).map(|i| format!("v{i}")).collect();
        Dag::new(
            7,
            &[(0, 3), (0, 1), (0, 6), (1, 3), (1, 4), (1, 6), (2, 4), (2, 5), (5, 6)],
            Some(labels),
        )
        .unwrap()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare(&(0, 1, 0, 2).into(), &(0, 1, 0, 4).into()), OrderResult::Less);
        assert_eq!(compare(&(1, 2, 0, 0).into(), &(0, 5, 9, 9).into()), OrderResult::Greater);
        assert_eq!(
            compare(&(0, 0, 0, 2).into(), &(0, 0, 0, 2).into()),
            OrderResult::Incomparable
        );
    }

    #[test]
    fn keys() {
        let d = fig1();
        let t = Trail::parse(&d, "v1 -> v2 -> v5 <- v3 -> v6").unwrap();
        assert_eq!(trail_key(&d, &t, &d.node_set([4usize])).unwrap().as_tuple(), (0, 1, 0, 2));
        let arc = Trail::parse(&d, "v1 -> v2").unwrap();
        assert_eq!(trail_key(&d, &arc, &NodeSet::empty(7)).unwrap().as_tuple(), (0, 0, 0, 0));
        assert_eq!(
            trail_key(&d, &Trail::parse(&d, "v2 -> v5 <- v3").unwrap(), &NodeSet::empty(7)),
            Err(QueryError::NotActivated)
        );
    }

    #[test]
    fn diamond_minimal_set() {
        let d = diamond_with_chord();
        let (x, y, z) = (d.node_set([0usize]), d.node_set([3usize]), NodeSet::empty(4));
        let m = minimal_trails(&d, &x, &y, &z).unwrap();
        assert_eq!(m.min_key.unwrap().as_tuple(), (0, 0, 0, 1));
        let seqs: Vec<Vec<usize>> = m
            .minimizers
            .iter()
            .map(|t| t.nodes().iter().map(|v| v.0).collect())
            .collect();
        assert_eq!(seqs, vec![vec![0, 1, 3], vec![0, 2, 3]]);

        let t3 = Trail::new(&d, vec![NodeId(0), NodeId(1), NodeId(2), NodeId(3)]).unwrap();
        let k3 = trail_key(&d, &t3, &z).unwrap();
        for t in &m.minimizers {
            assert_eq!(compare(&k3, &trail_key(&d, t, &z).unwrap()), OrderResult::Greater);
        }
    }

    #[test]
    fn fig1_unique_minimizer_and_separated_query() {
        let d = fig1();
        let m = minimal_trails(&d, &d.node_set([0usize]), &d.node_set([5usize]), &d.node_set([4usize]))
            .unwrap();
        assert_eq!(m.minimizers.len(), 1);
        assert_eq!(m.minimizers[0].render(&d), "v1 -> v2 -> v5 <- v3 -> v6");

        let none = minimal_trails(&d, &d.node_set([1usize]), &d.node_set([5usize]), &NodeSet::empty(7))
            .unwrap();
        assert_eq!(none.min_key, None);
        assert!(none.minimizers.is_empty());
    }

    #[test]
    fn dominance_agrees_with_min_key() {
        let keys: Vec<TrailKey> = [(0, 1, 0, 3), (0, 1, 0, 2), (1, 0, 0, 0), (0, 1, 0, 2)]
            .into_iter()
            .map(Into::into)
            .collect();
        assert_eq!(minimal_by_dominance(&keys), vec![1, 3]);
    }
}
