//! Dense node identifiers and bitset-backed node sets.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Index of a node in a [`Dag`](crate::Dag). Always dense in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

const WORD: usize = 64;

/// A subset of the nodes `[0, universe)` of a graph.
///
/// Iteration is always in ascending index order, which is what makes every
/// search in this crate deterministic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NodeSet {
    universe: usize,
    words: Vec<u64>,
}

impl NodeSet {
    pub fn empty(universe: usize) -> Self {
        NodeSet {
            universe,
            words: vec![0; universe.div_ceil(WORD)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for i in 0..universe {
            s.insert(NodeId(i));
        }
        s
    }

    /// Panics if a member lies outside the universe.
    pub fn from_nodes<I>(universe: usize, nodes: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<NodeId>,
    {
        let mut s = Self::empty(universe);
        for v in nodes {
            s.insert(v.into());
        }
        s
    }

    pub fn singleton(universe: usize, v: NodeId) -> Self {
        Self::from_nodes(universe, [v])
    }

    /// Builds the set whose members are the set bits of `mask`.
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        let mut s = Self::empty(universe);
        for i in 0..universe.min(WORD) {
            if mask >> i & 1 == 1 {
                s.insert(NodeId(i));
            }
        }
        s
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn contains(&self, v: NodeId) -> bool {
        v.0 < self.universe && self.words[v.0 / WORD] >> (v.0 % WORD) & 1 == 1
    }

    /// Returns `true` when `v` was not already present.
    pub fn insert(&mut self, v: NodeId) -> bool {
        assert!(
            v.0 < self.universe,
            "node {} outside universe of size {}",
            v.0,
            self.universe
        );
        let w = &mut self.words[v.0 / WORD];
        let bit = 1u64 << (v.0 % WORD);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    pub fn remove(&mut self, v: NodeId) -> bool {
        if v.0 >= self.universe {
            return false;
        }
        let w = &mut self.words[v.0 / WORD];
        let bit = 1u64 << (v.0 % WORD);
        let present = *w & bit != 0;
        *w &= !bit;
        present
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(NodeId(wi * WORD + b))
            })
        })
    }

    pub fn first(&self) -> Option<NodeId> {
        self.iter().next()
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &NodeSet) -> NodeSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &NodeSet) -> NodeSet {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> NodeSet {
        NodeSet::full(self.universe).difference(self)
    }

    pub fn is_disjoint(&self, other: &NodeSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn to_vec(&self) -> Vec<NodeId> {
        self.iter().collect()
    }

    fn zip_with(&self, other: &NodeSet, f: impl Fn(u64, u64) -> u64) -> NodeSet {
        assert_eq!(self.universe, other.universe, "node sets over different graphs");
        NodeSet {
            universe: self.universe,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|v| v.0)).finish()
    }
}

impl Extend<NodeId> for NodeSet {
    fn extend<T: IntoIterator<Item = NodeId>>(&mut self, iter: T) {
        for v in iter {
            self.insert(v);
        }
    }
}
