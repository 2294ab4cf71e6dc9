//! DAG representation and the reachability primitives shared by every
//! other module.
//!
//! Vertices and edges carry dense 0-based ids. The edge list order is the
//! canonical edge ordering: every edge-indexed `BitSet` in this crate refers
//! to it.

use crate::bitset::BitSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("graph contains a cycle")]
    Cyclic,
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("parallel edge ({0}, {1})")]
    ParallelEdge(usize, usize),
    #[error("edge endpoint {0} out of range (n = {1})")]
    VertexOutOfRange(usize, usize),
}

/// A simple directed acyclic graph. Acyclicity is checked at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Dag {
    n: usize,
    edges: Vec<(usize, usize)>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl Dag {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &edges {
            if u >= n {
                return Err(GraphError::VertexOutOfRange(u, n));
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange(v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !seen.insert((u, v)) {
                return Err(GraphError::ParallelEdge(u, v));
            }
        }
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            out_edges[u].push(i);
            in_edges[v].push(i);
        }
        let dag = Dag { n, edges, out_edges, in_edges };
        dag.topological_order()?;
        Ok(dag)
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    pub fn out_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out_edges[v].iter().map(|&e| self.edges[e].1)
    }

    /// Deterministic topological order: Kahn's algorithm, always expanding
    /// the smallest-id vertex among those with zero remaining in-degree.
    pub fn topological_order(&self) -> Result<Vec<usize>, GraphError> {
        let mut indeg: Vec<usize> = self.in_edges.iter().map(|es| es.len()).collect();
        let mut heap = std::collections::BinaryHeap::new();
        for v in 0..self.n {
            if indeg[v] == 0 {
                heap.push(std::cmp::Reverse(v));
            }
        }
        let mut order = Vec::with_capacity(self.n);
        while let Some(std::cmp::Reverse(v)) = heap.pop() {
            order.push(v);
            for &e in &self.out_edges[v] {
                let w = self.edges[e].1;
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    heap.push(std::cmp::Reverse(w));
                }
            }
        }
        if order.len() != self.n {
            return Err(GraphError::Cyclic);
        }
        Ok(order)
    }

    /// rch(u, V, E'): vertices reachable from `u` using only edges in
    /// `edge_set` whose endpoints lie in `vertices`. Always contains `u`.
    pub fn reach_set(&self, u: usize, vertices: &BitSet, edge_set: &BitSet) -> BitSet {
        debug_assert!(vertices.contains(u));
        let mut reached = BitSet::new(self.n);
        reached.insert(u);
        let mut stack = vec![u];
        while let Some(v) = stack.pop() {
            for &e in &self.out_edges[v] {
                if !edge_set.contains(e) {
                    continue;
                }
                let w = self.edges[e].1;
                if vertices.contains(w) && !reached.contains(w) {
                    reached.insert(w);
                    stack.push(w);
                }
            }
        }
        reached
    }

    /// Vertices that can reach `t` inside the subgraph (`vertices`,
    /// `edge_set`): a backward BFS from `t`. O(|V| + |E|).
    pub fn reaches_sink_set(&self, t: usize, vertices: &BitSet, edge_set: &BitSet) -> BitSet {
        let mut reaching = BitSet::new(self.n);
        if !vertices.contains(t) {
            return reaching;
        }
        reaching.insert(t);
        let mut stack = vec![t];
        while let Some(v) = stack.pop() {
            for &e in &self.in_edges[v] {
                if !edge_set.contains(e) {
                    continue;
                }
                let w = self.edges[e].0;
                if vertices.contains(w) && !reaching.contains(w) {
                    reaching.insert(w);
                    stack.push(w);
                }
            }
        }
        reaching
    }

    /// ∂Λ = { w ∉ Λ | ∃ (w', w) ∈ E₂ with w' ∈ Λ }.
    pub fn boundary(&self, lambda: &BitSet, edge_set: &BitSet) -> BitSet {
        let mut boundary = BitSet::new(self.n);
        for e in edge_set.iter() {
            let (tail, head) = self.edges[e];
            if lambda.contains(tail) && !lambda.contains(head) {
                boundary.insert(head);
            }
        }
        boundary
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// s=0, a=1, b=2, t=3; edges in canonical order.
    pub fn diamond() -> Dag {
        Dag::new(4, vec![(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn topological_order_path() {
        let d = Dag::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(d.topological_order().unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn topological_order_diamond_tiebreak() {
        assert_eq!(diamond().topological_order().unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn cycle_rejected() {
        assert_eq!(Dag::new(2, vec![(0, 1), (1, 0)]).unwrap_err(), GraphError::Cyclic);
    }

    #[test]
    fn self_loop_rejected() {
        assert_eq!(Dag::new(2, vec![(1, 1)]).unwrap_err(), GraphError::SelfLoop(1));
    }

    #[test]
    fn reach_set_cases() {
        let d = diamond();
        let all_v = BitSet::full(4);
        assert_eq!(d.reach_set(0, &all_v, &BitSet::new(4)), BitSet::singleton(4, 0));
        assert_eq!(
            d.reach_set(0, &all_v, &BitSet::singleton(4, 0)),
            BitSet::from_indices(4, [0, 1])
        );
        assert_eq!(d.reach_set(0, &all_v, &BitSet::full(4)), BitSet::full(4));
    }

    #[test]
    fn reaches_sink_cases() {
        let d = diamond();
        let all_v = BitSet::full(4);
        assert_eq!(d.reaches_sink_set(3, &all_v, &BitSet::new(4)), BitSet::singleton(4, 3));
        assert_eq!(
            d.reaches_sink_set(3, &all_v, &BitSet::singleton(4, 2)),
            BitSet::from_indices(4, [1, 3])
        );
        assert_eq!(
            d.reaches_sink_set(3, &all_v, &BitSet::from_indices(4, [0, 2])),
            BitSet::from_indices(4, [0, 1, 3])
        );
    }

    #[test]
    fn boundary_cases() {
        let d = diamond();
        let s_only = BitSet::singleton(4, 0);
        assert_eq!(d.boundary(&s_only, &BitSet::full(4)), BitSet::from_indices(4, [1, 2]));
        assert_eq!(d.boundary(&BitSet::full(4), &BitSet::full(4)), BitSet::new(4));
        // E₂ = {(a,t)} only: no edge leaves Λ = {s}.
        assert_eq!(d.boundary(&s_only, &BitSet::singleton(4, 2)), BitSet::new(4));
    }
}
