//! Brute-force ground truth for small instances.
//!
//! Everything here enumerates all 2^|E| edge subsets, so it is only usable
//! under a configurable edge cap, but it is exact and serves as the oracle
//! for every statistical test of the approximate machinery.

use crate::bitset::BitSet;
use crate::graph::Dag;
use rand::Rng;
use std::collections::HashMap;
use thiserror::Error;

pub const DEFAULT_EDGE_CAP: usize = 24;

#[derive(Debug, Error, PartialEq)]
pub enum ExactError {
    #[error("edge set has {0} edges, above the enumeration cap {1}")]
    TooManyEdges(usize, usize),
    #[error("the target distribution has empty support (R = 0)")]
    EmptySupport,
}

/// Graph context for Λ-to-t reliability queries.
#[derive(Clone, Copy)]
pub struct ExactCtx<'a> {
    pub dag: &'a Dag,
    pub q: &'a [f64],
    pub t: usize,
}

impl<'a> ExactCtx<'a> {
    pub fn new(dag: &'a Dag, q: &'a [f64], t: usize) -> Self {
        ExactCtx { dag, q, t }
    }

    fn lambda_reaches_t(&self, vertices: &BitSet, edges: &BitSet, lambda: &BitSet) -> bool {
        let reaching = self.dag.reaches_sink_set(self.t, vertices, edges);
        lambda.intersects(&reaching)
    }
}

fn subset_weight(edge_ids: &[usize], q: &[f64], mask: u64) -> f64 {
    let mut w = 1.0;
    for (bit, &e) in edge_ids.iter().enumerate() {
        if mask >> bit & 1 == 1 {
            w *= 1.0 - q[e];
        } else {
            w *= q[e];
        }
    }
    w
}

/// Exact Λ-to-t reliability in (`vertices`, `edges`) by enumeration:
/// Σ over E_H ⊆ E of Π(1−q)·Πq · 1[Λ reaches t in (V, E_H)].
pub fn exact_reliability(
    ctx: ExactCtx,
    vertices: &BitSet,
    edges: &BitSet,
    lambda: &BitSet,
    cap: usize,
) -> Result<f64, ExactError> {
    let edge_ids: Vec<usize> = edges.iter().collect();
    if edge_ids.len() > cap {
        return Err(ExactError::TooManyEdges(edge_ids.len(), cap));
    }
    let m = edges.len();
    // Kahan summation in fixed subset order keeps the result deterministic.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut subset = BitSet::new(m);
    for mask in 0u64..1u64 << edge_ids.len() {
        for (bit, &e) in edge_ids.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                subset.insert(e);
            } else {
                subset.remove(e);
            }
        }
        if ctx.lambda_reaches_t(vertices, &subset, lambda) {
            let w = subset_weight(&edge_ids, ctx.q, mask);
            let y = w - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    }
    Ok(sum)
}

/// The fully enumerated distribution π_Λ: every connected subgraph with its
/// normalized weight, plus a CDF for exact sampling.
pub struct ExactDistribution {
    support: Vec<BitSet>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
    index: HashMap<BitSet, usize>,
    total: f64,
}

impl ExactDistribution {
    pub fn build(
        ctx: ExactCtx,
        vertices: &BitSet,
        edges: &BitSet,
        lambda: &BitSet,
        cap: usize,
    ) -> Result<Self, ExactError> {
        let edge_ids: Vec<usize> = edges.iter().collect();
        if edge_ids.len() > cap {
            return Err(ExactError::TooManyEdges(edge_ids.len(), cap));
        }
        let m = edges.len();
        let mut support = Vec::new();
        let mut weights = Vec::new();
        let mut total = 0.0;
        for mask in 0u64..1u64 << edge_ids.len() {
            let mut subset = BitSet::new(m);
            for (bit, &e) in edge_ids.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    subset.insert(e);
                }
            }
            if ctx.lambda_reaches_t(vertices, &subset, lambda) {
                let w = subset_weight(&edge_ids, ctx.q, mask);
                if w > 0.0 {
                    support.push(subset);
                    weights.push(w);
                    total += w;
                }
            }
        }
        if total <= 0.0 {
            return Err(ExactError::EmptySupport);
        }
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        let index = support
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(ExactDistribution { support, probs, cumulative, index, total })
    }

    pub fn reliability(&self) -> f64 {
        self.total
    }

    pub fn support(&self) -> &[BitSet] {
        &self.support
    }

    pub fn prob(&self, subgraph: &BitSet) -> f64 {
        self.index.get(subgraph).map_or(0.0, |&i| self.probs[i])
    }

    /// CDF inversion: returns H with probability w_Λ(H)/R_Λ exactly
    /// (up to floating point).
    pub fn sample<R: Rng>(&self, rng: &mut R) -> &BitSet {
        let x: f64 = rng.gen();
        let i = self.cumulative.partition_point(|&c| c < x);
        &self.support[i.min(self.support.len() - 1)]
    }
}

/// Exact sample from π_Λ via full enumeration + CDF inversion.
pub fn exact_sample<R: Rng>(
    ctx: ExactCtx,
    vertices: &BitSet,
    edges: &BitSet,
    lambda: &BitSet,
    cap: usize,
    rng: &mut R,
) -> Result<BitSet, ExactError> {
    let dist = ExactDistribution::build(ctx, vertices, edges, lambda, cap)?;
    Ok(dist.sample(rng).clone())
}

/// Exact union decomposition R_Λ = |∪ᵢ Ω^(i)_Λ| in weighted form: one
/// R^(i)_Λ per boundary vertex uᵢ (in ascending topological order) plus
/// the exact R_Λ.
pub struct UnionDecomposition {
    pub boundary: Vec<usize>,
    pub parts: Vec<f64>,
    pub total: f64,
}

pub fn exact_union_decomposition(
    ctx: ExactCtx,
    vertices: &BitSet,
    edges: &BitSet,
    lambda: &BitSet,
    cap: usize,
) -> Result<UnionDecomposition, ExactError> {
    assert!(!lambda.contains(ctx.t), "t must not lie in Λ");
    let boundary_set = ctx.dag.boundary(lambda, edges);
    let boundary: Vec<usize> = boundary_set.iter().collect();
    assert!(!boundary.is_empty(), "∂Λ must be non-empty");
    let edge_ids: Vec<usize> = edges.iter().collect();
    if edge_ids.len() > cap {
        return Err(ExactError::TooManyEdges(edge_ids.len(), cap));
    }
    let m = edges.len();
    let mut parts = vec![0.0f64; boundary.len()];
    let mut total = 0.0f64;
    let mut subset = BitSet::new(m);
    for mask in 0u64..1u64 << edge_ids.len() {
        for (bit, &e) in edge_ids.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                subset.insert(e);
            } else {
                subset.remove(e);
            }
        }
        let reaching = ctx.dag.reaches_sink_set(ctx.t, vertices, &subset);
        let w = subset_weight(&edge_ids, ctx.q, mask);
        if lambda.intersects(&reaching) {
            total += w;
        }
        for (i, &u) in boundary.iter().enumerate() {
            // H ∈ Ω^(i): some Λ-to-uᵢ edge is present and uᵢ reaches t.
            if !reaching.contains(u) {
                continue;
            }
            let has_delta_edge = ctx.dag.in_edges(u).iter().any(|&e| {
                subset.contains(e) && lambda.contains(ctx.dag.edge(e).0)
            });
            if has_delta_edge {
                parts[i] += w;
            }
        }
    }
    let sum: f64 = parts.iter().sum();
    let d = boundary.len() as f64;
    debug_assert!(total <= sum + 1e-9 && sum <= d * total + 1e-9, "union sandwich violated");
    Ok(UnionDecomposition { boundary, parts, total })
}

/// ½ Σ_H |freq(H) − exact(H)| over the union of supports.
pub fn empirical_tv(samples: &[BitSet], exact: &ExactDistribution) -> f64 {
    let mut counts: HashMap<&BitSet, usize> = HashMap::new();
    for s in samples {
        *counts.entry(s).or_insert(0) += 1;
    }
    let n = samples.len() as f64;
    let mut tv = 0.0;
    for (h, &c) in &counts {
        tv += (c as f64 / n - exact.prob(h)).abs();
    }
    for (i, h) in exact.support.iter().enumerate() {
        if !counts.contains_key(h) {
            tv += exact.probs[i];
        }
    }
    tv / 2.0
}
