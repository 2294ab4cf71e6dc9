//! Small fixtures shared by unit, integration and bench code.

use crate::instance::{preprocess, Instance, RawInstance};

pub fn raw_from_edges(n: usize, edges: &[(usize, usize, f64)], s: usize, t: usize) -> RawInstance {
    RawInstance {
        labels: (0..n).map(|i| format!("v{i}")).collect(),
        edges: edges.to_vec(),
        s,
        t,
    }
}

/// The 4-edge diamond s→a→t, s→b→t with uniform failure probability.
pub fn diamond_instance(q: f64) -> Instance {
    let raw = raw_from_edges(4, &[(0, 1, q), (0, 2, q), (1, 3, q), (2, 3, q)], 0, 3);
    preprocess(&raw, 0.5).unwrap().ready().unwrap()
}

/// The series path s→a→t with uniform failure probability.
pub fn series_path_instance(q: f64) -> Instance {
    let raw = raw_from_edges(3, &[(0, 1, q), (1, 2, q)], 0, 2);
    preprocess(&raw, 0.5).unwrap().ready().unwrap()
}

/// A single edge s→t.
pub fn single_edge_instance(q: f64) -> Instance {
    let raw = raw_from_edges(2, &[(0, 1, q)], 0, 1);
    preprocess(&raw, 0.5).unwrap().ready().unwrap()
}
