//! Spanning subgraphs as edge subsets of some ambient edge set.

use crate::bitset::BitSet;

/// An edge subset of an ambient edge set (E, some E_u, or a residual E₂),
/// both indexed by the canonical edge ordering of the instance.
///
/// Invariant: `edges ⊆ ambient`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subgraph {
    edges: BitSet,
    ambient: BitSet,
}

impl Subgraph {
    pub fn new(edges: BitSet, ambient: BitSet) -> Self {
        assert!(edges.is_subset_of(&ambient), "subgraph edges escape ambient edge set");
        Subgraph { edges, ambient }
    }

    pub fn empty(ambient: BitSet) -> Self {
        let edges = BitSet::new(ambient.len());
        Subgraph { edges, ambient }
    }

    #[inline]
    pub fn edges(&self) -> &BitSet {
        &self.edges
    }

    #[inline]
    pub fn ambient(&self) -> &BitSet {
        &self.ambient
    }

    pub fn into_edges(self) -> BitSet {
        self.edges
    }
}
