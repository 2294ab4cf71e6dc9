//! Top-level estimation driver.
//!
//! Walks the vertices in reverse topological order; for each vertex u it
//! first estimates R̃_u via the union-based counter, then fills the sample
//! store S_u with ℓ subgraph samples drawn by the rejection sampler (which
//! itself queries the counter on residual graphs). Any sampler crash aborts
//! the whole run with output 0.

use crate::bitset::BitSet;
use crate::config::Config;
use crate::estimator::{approx_count, CountTables};
use crate::instance::Instance;
use crate::rng::substream;
use crate::sampler::{sample, CountOracle, CrashKind, SampleOutcome, SamplerCounters, SamplerParams};
use crate::store::{EstimateTable, MemoTable, SampleStore};
use crate::subgraph::Subgraph;

/// Counting backend used while sampling: the shared memoized estimator.
struct ApproxOracle<'a, 'b> {
    tables: &'b CountTables<'a>,
    memo: &'b mut MemoTable,
}

impl CountOracle for ApproxOracle<'_, '_> {
    fn count(&mut self, v0: &BitSet, e0: &BitSet, lambda: &BitSet) -> f64 {
        approx_count(self.tables, v0, e0, lambda, self.memo)
    }
}

#[derive(Debug, Clone)]
pub struct VertexReport {
    pub vertex: usize,
    pub estimate: f64,
    pub trajectories: u64,
    pub rejections: u64,
    pub min_filter_prob: f64,
    pub max_filter_prob: f64,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    /// R̃_s, or 0 after a crash.
    pub estimate: f64,
    pub crash: Option<(usize, CrashKind)>,
    /// Per-vertex statistics in processing order (reverse topological).
    pub vertices: Vec<VertexReport>,
    pub memo_entries: usize,
    pub memo_computed: u64,
    pub memo_hits: u64,
    /// Distinct (V₀, E₀, Λ₀) keys computed more than once (must be 0).
    pub memo_duplicates: u64,
}

impl RunReport {
    pub fn crashed(&self) -> bool {
        self.crash.is_some()
    }
}

/// One full estimation run on a preprocessed instance.
pub fn run(inst: &Instance, config: &Config, master_seed: u64) -> RunReport {
    let n = inst.vertex_count();
    let relevant: Vec<(BitSet, BitSet)> =
        (0..n).map(|u| inst.relevant_subgraph(u)).collect();
    let mut estimates = EstimateTable::new(n);
    let mut stores = SampleStore::new(n);
    let mut memo = MemoTable::new();
    let mut vertices = Vec::with_capacity(n);
    let ell = config.per_vertex_samples() as usize;

    // Vertex ids are topological positions, so reverse topological order is
    // id n-1 (= t) down to 0 (= s).
    for u in (0..n).rev() {
        let (v_u, e_u) = &relevant[u];

        if u == inst.t {
            estimates.set(u, 1.0);
            stores.write(u, vec![Subgraph::empty(e_u.clone()); ell]);
            vertices.push(VertexReport {
                vertex: u,
                estimate: 1.0,
                trajectories: 0,
                rejections: 0,
                min_filter_prob: f64::NAN,
                max_filter_prob: f64::NAN,
            });
            continue;
        }

        let tables = CountTables {
            dag: &inst.dag,
            q: &inst.q,
            t: inst.t,
            config,
            relevant: &relevant,
            estimates: &estimates,
            stores: &stores,
            master_seed,
        };
        let lambda_u = BitSet::singleton(n, u);
        let r_u = approx_count(&tables, v_u, e_u, &lambda_u, &mut memo);

        let params = SamplerParams {
            dag: &inst.dag,
            q: &inst.q,
            t: inst.t,
            u,
            v_u,
            e_u,
            relevant: &relevant,
            p0: r_u,
            attempts: config.sample_attempts,
            filter_denominator: config.filter_denominator,
        };
        let mut counters = SamplerCounters::new();
        let mut rng = substream(master_seed, "sample", u as u64);
        let mut samples = Vec::with_capacity(if u == inst.s { 0 } else { ell });
        let mut crash = None;
        // S_s has no consumer (s is never a boundary vertex), so skip it.
        let wanted = if u == inst.s { 0 } else { ell };
        for _ in 0..wanted {
            let mut oracle = ApproxOracle { tables: &tables, memo: &mut memo };
            match sample(&params, &mut oracle, &mut counters, &mut rng) {
                SampleOutcome::Sampled(h) => samples.push(h),
                SampleOutcome::Crash(kind) => {
                    crash = Some((u, kind));
                    break;
                }
            }
        }
        vertices.push(VertexReport {
            vertex: u,
            estimate: r_u,
            trajectories: counters.trajectories,
            rejections: counters.rejections,
            min_filter_prob: counters.min_filter_prob,
            max_filter_prob: counters.max_filter_prob,
        });
        if let Some((v, kind)) = crash {
            return RunReport {
                estimate: 0.0,
                crash: Some((v, kind)),
                vertices,
                memo_entries: memo.len(),
                memo_computed: memo.computed,
                memo_hits: memo.hits,
                memo_duplicates: memo.duplicate_computations,
            };
        }
        estimates.set(u, r_u);
        if u != inst.s {
            stores.write(u, samples);
        }
    }

    RunReport {
        estimate: estimates.get(inst.s),
        crash: None,
        vertices,
        memo_entries: memo.len(),
        memo_computed: memo.computed,
        memo_hits: memo.hits,
        memo_duplicates: memo.duplicate_computations,
    }
}
