//! Instance generators: fixed benchmark families plus seeded random DAGs.

use crate::instance::RawInstance;
use rand::Rng;

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// k diamonds in series: v₀ ⇒ v₁ ⇒ … ⇒ v_k, each step through two
/// parallel length-2 paths. k = 1 is the plain 4-edge diamond.
pub fn diamond_chain(k: usize, q: f64) -> RawInstance {
    assert!(k >= 1, "need at least one diamond");
    let n = 3 * k + 1; // k+1 joints + 2k middle vertices
    let joint = |i: usize| i * 3;
    let mut edges = Vec::with_capacity(4 * k);
    for i in 0..k {
        let (a, b) = (joint(i) + 1, joint(i) + 2);
        edges.push((joint(i), a, q));
        edges.push((joint(i), b, q));
        edges.push((a, joint(i + 1), q));
        edges.push((b, joint(i + 1), q));
    }
    RawInstance { labels: labels(n), edges, s: 0, t: joint(k) }
}

/// `layers` layers of `width` vertices, fully bipartite between consecutive
/// layers, with s feeding the first layer and the last layer feeding t.
pub fn layered(layers: usize, width: usize, q: f64) -> RawInstance {
    assert!(layers >= 1 && width >= 1);
    let n = layers * width + 2;
    let s = 0;
    let t = n - 1;
    let v = |layer: usize, i: usize| 1 + layer * width + i;
    let mut edges = Vec::new();
    for i in 0..width {
        edges.push((s, v(0, i), q));
    }
    for layer in 1..layers {
        for i in 0..width {
            for j in 0..width {
                edges.push((v(layer - 1, i), v(layer, j), q));
            }
        }
    }
    for i in 0..width {
        edges.push((v(layers - 1, i), t, q));
    }
    RawInstance { labels: labels(n), edges, s, t }
}

/// `parallel` disjoint s-t paths of `series` edges each.
pub fn series_parallel(series: usize, parallel: usize, q: f64) -> RawInstance {
    assert!(series >= 1 && parallel >= 1);
    let n = 2 + parallel * (series - 1);
    let s = 0;
    let t = n - 1;
    let mut edges = Vec::new();
    for p in 0..parallel {
        let inner = |i: usize| 1 + p * (series - 1) + i;
        let mut prev = s;
        for i in 0..series - 1 {
            edges.push((prev, inner(i), q));
            prev = inner(i);
        }
        edges.push((prev, t, q));
    }
    RawInstance { labels: labels(n), edges, s, t }
}

/// Random DAG on vertices 0..n in their natural order: each forward pair
/// (i, j) becomes an edge with probability `density`, q uniform in
/// [q_lo, q_hi]. s = 0, t = n−1; unless `allow_trivial`, resamples until
/// s can reach t (giving up after 1000 attempts).
pub fn random_dag<R: Rng>(
    n: usize,
    density: f64,
    q_lo: f64,
    q_hi: f64,
    allow_trivial: bool,
    rng: &mut R,
) -> RawInstance {
    assert!(n >= 2);
    assert!((0.0..=1.0).contains(&density));
    assert!(0.0 <= q_lo && q_lo <= q_hi && q_hi <= 1.0);
    for _ in 0..1000 {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen::<f64>() < density {
                    edges.push((i, j, rng.gen_range(q_lo..=q_hi)));
                }
            }
        }
        let raw = RawInstance { labels: labels(n), edges, s: 0, t: n - 1 };
        if allow_trivial || connects(&raw) {
            return raw;
        }
    }
    panic!("no s-t-connected DAG found in 1000 attempts (density too low?)");
}

fn connects(raw: &RawInstance) -> bool {
    matches!(
        crate::instance::preprocess(raw, 0.5),
        Ok(crate::instance::Preprocessed::Ready(_))
    )
}

/// Random preprocessed instance with at most `max_edges` surviving edges,
/// for brute-force-checkable corpora.
pub fn random_small_instance<R: Rng>(max_edges: usize, rng: &mut R) -> crate::instance::Instance {
    loop {
        let n = rng.gen_range(3..=6);
        let density = rng.gen_range(0.3..0.8);
        let raw = random_dag(n, density, 0.1, 0.9, false, rng);
        let inst = crate::instance::preprocess(&raw, 0.5)
            .expect("generated instance is valid")
            .ready()
            .expect("generator filtered trivial instances");
        if inst.edge_count() <= max_edges {
            return inst;
        }
    }
}
