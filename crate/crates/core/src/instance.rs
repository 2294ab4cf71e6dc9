//! Problem instances and preprocessing.
//!
//! Preprocessing merges parallel edges, drops edges that always fail,
//! restricts to the relevant subgraph G_s, and relabels everything into
//! canonical form: vertex ids equal topological positions (so s = 0 and
//! t = n-1) and edges are sorted by (head, tail). Original labels are kept
//! in a side map for I/O.

use crate::bitset::BitSet;
use crate::graph::{Dag, GraphError};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("failure probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("epsilon {0} outside (0, 1)")]
    BadEpsilon(f64),
    #[error("source and sink coincide")]
    SourceIsSink,
}

/// Raw input before preprocessing: may contain parallel edges, q = 1 edges,
/// and vertices irrelevant to s-t connectivity.
#[derive(Debug, Clone, PartialEq)]
pub struct RawInstance {
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize, f64)>,
    pub s: usize,
    pub t: usize,
}

/// A preprocessed instance: simple DAG, all q_e < 1, every vertex lies on
/// some s-t path, canonical ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub dag: Dag,
    pub q: Vec<f64>,
    pub s: usize,
    pub t: usize,
    pub eps: f64,
    /// Original label of each canonical vertex id.
    pub labels: Vec<String>,
}

/// Outcome of preprocessing. `TrivialZero` is the first-class "s cannot
/// reach t" result; the estimator is never run on it.
#[derive(Debug, Clone, PartialEq)]
pub enum Preprocessed {
    Ready(Instance),
    TrivialZero,
}

impl Preprocessed {
    pub fn ready(self) -> Option<Instance> {
        match self {
            Preprocessed::Ready(inst) => Some(inst),
            Preprocessed::TrivialZero => None,
        }
    }
}

pub fn preprocess(raw: &RawInstance, eps: f64) -> Result<Preprocessed, InstanceError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(InstanceError::BadEpsilon(eps));
    }
    if raw.s == raw.t {
        return Err(InstanceError::SourceIsSink);
    }
    let n0 = raw.labels.len();
    for &(u, v, q) in &raw.edges {
        if u >= n0 {
            return Err(GraphError::VertexOutOfRange(u, n0).into());
        }
        if v >= n0 {
            return Err(GraphError::VertexOutOfRange(v, n0).into());
        }
        if u == v {
            return Err(GraphError::SelfLoop(u).into());
        }
        if !(0.0..=1.0).contains(&q) || q.is_nan() {
            return Err(InstanceError::BadProbability(q));
        }
    }

    // Merge parallel edges (q = product) and drop q = 1 edges.
    let mut merged: std::collections::BTreeMap<(usize, usize), f64> = Default::default();
    for &(u, v, q) in &raw.edges {
        *merged.entry((u, v)).or_insert(1.0) *= q;
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut qs: Vec<f64> = Vec::new();
    for (&(u, v), &q) in &merged {
        if q < 1.0 {
            edges.push((u, v));
            qs.push(q);
        }
    }

    // Acyclicity check before restriction, so cyclic junk outside G_s is
    // still an error rather than silently dropped.
    let full = Dag::new(n0, edges.clone())?;

    // Restrict to G_s: vertices reachable from s that also reach t.
    let all_v = BitSet::full(n0);
    let all_e = BitSet::full(full.edge_count());
    let from_s = full.reach_set(raw.s, &all_v, &all_e);
    let to_t = full.reaches_sink_set(raw.t, &all_v, &all_e);
    let mut relevant = from_s;
    relevant.intersect_with(&to_t);
    if !relevant.contains(raw.t) || !relevant.contains(raw.s) {
        return Ok(Preprocessed::TrivialZero);
    }

    let kept: Vec<usize> = relevant.iter().collect();
    let mut dense = vec![usize::MAX; n0];
    for (i, &v) in kept.iter().enumerate() {
        dense[v] = i;
    }
    let kept_edges: Vec<(usize, usize, f64)> = edges
        .iter()
        .zip(&qs)
        .filter(|(&(u, v), _)| relevant.contains(u) && relevant.contains(v))
        .map(|(&(u, v), &q)| (dense[u], dense[v], q))
        .collect();

    // Relabel vertices so that id = topological position.
    let interim = Dag::new(
        kept.len(),
        kept_edges.iter().map(|&(u, v, _)| (u, v)).collect(),
    )?;
    let order = interim.topological_order()?;
    let mut topo_pos = vec![0; kept.len()];
    for (pos, &v) in order.iter().enumerate() {
        topo_pos[v] = pos;
    }

    // Canonical edge order: (topological index of head, then of tail).
    let mut final_edges: Vec<(usize, usize, f64)> = kept_edges
        .iter()
        .map(|&(u, v, q)| (topo_pos[u], topo_pos[v], q))
        .collect();
    final_edges.sort_by_key(|&(u, v, _)| (v, u));

    let dag = Dag::new(
        kept.len(),
        final_edges.iter().map(|&(u, v, _)| (u, v)).collect(),
    )?;
    let q: Vec<f64> = final_edges.iter().map(|&(_, _, q)| q).collect();
    let labels: Vec<String> = {
        let mut labels = vec![String::new(); kept.len()];
        for (interim_id, &orig) in kept.iter().enumerate() {
            labels[topo_pos[interim_id]] = raw.labels[orig].clone();
        }
        labels
    };

    let s = topo_pos[dense[raw.s]];
    let t = topo_pos[dense[raw.t]];
    debug_assert_eq!(s, 0, "source must be the unique topological minimum of G_s");
    debug_assert_eq!(t, kept.len() - 1, "sink must be the topological maximum of G_s");

    Ok(Preprocessed::Ready(Instance { dag, q, s, t, eps, labels }))
}

impl Instance {
    pub fn vertex_count(&self) -> usize {
        self.dag.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.dag.edge_count()
    }

    /// (V_u, E_u): vertices reachable from u that also reach t, plus the
    /// induced edges.
    pub fn relevant_subgraph(&self, u: usize) -> (BitSet, BitSet) {
        let n = self.vertex_count();
        let m = self.edge_count();
        let all_v = BitSet::full(n);
        let all_e = BitSet::full(m);
        let from_u = self.dag.reach_set(u, &all_v, &all_e);
        let to_t = self.dag.reaches_sink_set(self.t, &all_v, &all_e);
        let mut vu = from_u;
        vu.intersect_with(&to_t);
        let mut eu = BitSet::new(m);
        for (e, &(a, b)) in self.dag.edges().iter().enumerate() {
            if vu.contains(a) && vu.contains(b) {
                eu.insert(e);
            }
        }
        (vu, eu)
    }

    /// Reconstruct a raw instance from the canonical form (used for
    /// round-trips and idempotence checks).
    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            labels: self.labels.clone(),
            edges: self
                .dag
                .edges()
                .iter()
                .zip(&self.q)
                .map(|(&(u, v), &q)| (u, v, q))
                .collect(),
            s: self.s,
            t: self.t,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{diamond_instance, raw_from_edges};

    #[test]
    fn parallel_edges_merge() {
        let raw = raw_from_edges(2, &[(0, 1, 0.5), (0, 1, 0.5)], 0, 1);
        let inst = preprocess(&raw, 0.5).unwrap().ready().unwrap();
        assert_eq!(inst.edge_count(), 1);
        assert!((inst.q[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn q_one_edges_dropped() {
        let raw = raw_from_edges(3, &[(0, 1, 1.0), (0, 2, 0.5), (1, 2, 0.5)], 0, 2);
        let inst = preprocess(&raw, 0.5).unwrap().ready().unwrap();
        // Vertex 1 loses its incoming edge and becomes unreachable from s.
        assert_eq!(inst.vertex_count(), 2);
        assert_eq!(inst.edge_count(), 1);
    }

    #[test]
    fn dangling_vertices_removed() {
        let raw = raw_from_edges(4, &[(0, 1, 0.5), (2, 3, 0.5), (1, 3, 0.4)], 0, 3);
        // Vertex 2 is unreachable from s = 0.
        let inst = preprocess(&raw, 0.5).unwrap().ready().unwrap();
        assert_eq!(inst.vertex_count(), 3);
    }

    #[test]
    fn trivial_zero_when_disconnected() {
        let raw = raw_from_edges(3, &[(0, 1, 0.5)], 0, 2);
        assert_eq!(preprocess(&raw, 0.5).unwrap(), Preprocessed::TrivialZero);
    }

    #[test]
    fn cyclic_input_rejected() {
        let raw = raw_from_edges(3, &[(0, 1, 0.5), (1, 0, 0.5), (0, 2, 0.5)], 0, 2);
        assert!(preprocess(&raw, 0.5).is_err());
    }

    #[test]
    fn preprocess_idempotent() {
        let inst = diamond_instance(0.5);
        let again = preprocess(&inst.to_raw(), inst.eps).unwrap().ready().unwrap();
        assert_eq!(again.dag.edges(), inst.dag.edges());
        assert_eq!(again.q, inst.q);
        assert_eq!(again.labels, inst.labels);
    }

    #[test]
    fn relevant_subgraph_diamond() {
        let inst = diamond_instance(0.5);
        // Vertex 1 is `a`; V_a = {a, t}, E_a = {(a, t)}.
        let (va, ea) = inst.relevant_subgraph(1);
        assert_eq!(va, BitSet::from_indices(4, [1, 3]));
        assert_eq!(ea.iter().collect::<Vec<_>>().len(), 1);
        let e = ea.iter().next().unwrap();
        assert_eq!(inst.dag.edge(e), (1, 3));
        // u = t: sink only.
        let (vt, et) = inst.relevant_subgraph(3);
        assert_eq!(vt, BitSet::singleton(4, 3));
        assert!(et.is_empty());
        // u = s: whole preprocessed graph.
        let (vs, es) = inst.relevant_subgraph(0);
        assert_eq!(vs, BitSet::full(4));
        assert_eq!(es, BitSet::full(4));
    }
}
