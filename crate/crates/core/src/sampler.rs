//! JVV-style subgraph sampling: scan edges of G_u in boundary order,
//! include each according to its estimated conditional marginal, then
//! correct the distribution with a rejection filter. Conditional on
//! acceptance the output is an exact π_u sample.

use crate::bitset::BitSet;
use crate::graph::Dag;
use crate::subgraph::Subgraph;
use rand::Rng;

/// Reliability-counting backend used for the conditional marginals: the
/// real pipeline plugs in ApproxCount, tests may plug in the exact oracle.
pub trait CountOracle {
    fn count(&mut self, v0: &BitSet, e0: &BitSet, lambda: &BitSet) -> f64;
}

/// The four abnormal terminations. Any of them aborts the whole run with
/// output R̃_s = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrashKind {
    /// ∂Λ = ∅ before reaching t.
    EmptyBoundary,
    /// q_e·c₀ + (1−q_e)·c₁ = 0 at a marginal.
    ZeroDenominator,
    /// Filter probability above 1 (beyond floating-point slack).
    FilterOverflow,
    /// All T trajectory attempts rejected (the ⊥ return).
    AllRejected,
}

impl std::fmt::Display for CrashKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CrashKind::EmptyBoundary => "empty-boundary",
            CrashKind::ZeroDenominator => "zero-denominator",
            CrashKind::FilterOverflow => "filter-overflow",
            CrashKind::AllRejected => "all-rejected",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, PartialEq)]
pub enum SampleOutcome {
    Sampled(Subgraph),
    Crash(CrashKind),
}

/// Filter probabilities within (1, 1 + slack] are clamped to 1; anything
/// larger crashes.
const FILTER_SLACK: f64 = 1e-9;

pub struct SamplerParams<'a> {
    pub dag: &'a Dag,
    pub q: &'a [f64],
    pub t: usize,
    pub u: usize,
    pub v_u: &'a BitSet,
    pub e_u: &'a BitSet,
    /// (V_w, E_w) per vertex, for the scanned-edge-exclusion invariant.
    pub relevant: &'a [(BitSet, BitSet)],
    /// p₀ = R̃_u.
    pub p0: f64,
    /// T: trajectory attempts before giving up.
    pub attempts: u64,
    pub filter_denominator: f64,
}

/// Observability knobs and counters; the distribution tests read the filter
/// probabilities and the bookkeeping cross-checks read the decision probs.
#[derive(Debug, Default)]
pub struct SamplerCounters {
    pub trajectories: u64,
    pub rejections: u64,
    pub min_filter_prob: f64,
    pub max_filter_prob: f64,
    pub record_decisions: bool,
    /// Per-edge decision probabilities of the last trajectory.
    pub decision_probs: Vec<f64>,
    /// log p of the last trajectory.
    pub last_log_p: f64,
}

impl SamplerCounters {
    pub fn new() -> Self {
        SamplerCounters { min_filter_prob: f64::INFINITY, ..Default::default() }
    }
}

/// The accept probability of edge e: (1−q_e)·c₁ / (q_e·c₀ + (1−q_e)·c₁).
/// `None` when the denominator vanishes (the ZeroDenominator crash).
pub fn conditional_marginal(q_e: f64, c0: f64, c1: f64) -> Option<f64> {
    let denom = q_e * c0 + (1.0 - q_e) * c1;
    if denom <= 0.0 {
        return None;
    }
    Some((1.0 - q_e) * c1 / denom)
}

pub fn sample<R: Rng>(
    params: &SamplerParams,
    oracle: &mut dyn CountOracle,
    counters: &mut SamplerCounters,
    rng: &mut R,
) -> SampleOutcome {
    if params.p0 <= 0.0 {
        // w_u(H)/(4·p·p₀) is unbounded; treat as a filter overflow.
        return SampleOutcome::Crash(CrashKind::FilterOverflow);
    }
    let log_p0 = params.p0.ln();
    for _ in 0..params.attempts {
        counters.trajectories += 1;
        match run_trajectory(params, oracle, counters, rng) {
            TrajectoryOutcome::Crash(kind) => return SampleOutcome::Crash(kind),
            TrajectoryOutcome::Candidate { chosen, log_p } => {
                let log_w = subgraph_log_weight(params, &chosen);
                let filter =
                    (log_w - params.filter_denominator.ln() - log_p - log_p0).exp();
                if filter > 1.0 + FILTER_SLACK {
                    return SampleOutcome::Crash(CrashKind::FilterOverflow);
                }
                let filter = filter.min(1.0);
                counters.min_filter_prob = counters.min_filter_prob.min(filter);
                counters.max_filter_prob = counters.max_filter_prob.max(filter);
                if rng.gen::<f64>() < filter {
                    return SampleOutcome::Sampled(Subgraph::new(chosen, params.e_u.clone()));
                }
                counters.rejections += 1;
            }
        }
    }
    SampleOutcome::Crash(CrashKind::AllRejected)
}

enum TrajectoryOutcome {
    Candidate { chosen: BitSet, log_p: f64 },
    Crash(CrashKind),
}

fn run_trajectory<R: Rng>(
    params: &SamplerParams,
    oracle: &mut dyn CountOracle,
    counters: &mut SamplerCounters,
    rng: &mut R,
) -> TrajectoryOutcome {
    let dag = params.dag;
    let m = dag.edge_count();
    let mut chosen = BitSet::new(m);
    let mut scanned = BitSet::new(m); // E₁
    let mut unscanned = params.e_u.clone(); // E₂
    let mut lambda = BitSet::singleton(dag.vertex_count(), params.u);
    let mut log_p = 0.0f64;
    if counters.record_decisions {
        counters.decision_probs.clear();
    }

    while !lambda.contains(params.t) {
        let boundary = dag.boundary(&lambda, &unscanned);
        // Scanned-edge exclusion: E₁ ∩ E_w = ∅ for every boundary vertex.
        for w in boundary.iter() {
            assert!(
                !scanned.intersects(&params.relevant[w].1),
                "scanned-edge exclusion violated at vertex {w}"
            );
        }
        // Vertex ids are topological positions, so min id = topological min.
        let Some(w_star) = boundary.iter().next() else {
            return TrajectoryOutcome::Crash(CrashKind::EmptyBoundary);
        };
        let e = dag
            .in_edges(w_star)
            .iter()
            .copied()
            .filter(|&e| unscanned.contains(e) && lambda.contains(dag.edge(e).0))
            .min_by_key(|&e| dag.edge(e).0)
            .expect("boundary vertex has a Λ-leaving edge");

        let mut with_e = chosen.clone();
        with_e.insert(e);
        let lambda1 = dag.reach_set(params.u, params.v_u, &with_e);
        {
            let mut expected = lambda.clone();
            expected.insert(w_star);
            assert_eq!(lambda1, expected, "Λ₁ must equal Λ ∪ {{w*}}");
        }
        scanned.insert(e);
        unscanned.remove(e);

        let c0 = oracle.count(params.v_u, &unscanned, &lambda);
        let c1 = oracle.count(params.v_u, &unscanned, &lambda1);
        let q_e = params.q[e];
        let Some(alpha) = conditional_marginal(q_e, c0, c1) else {
            return TrajectoryOutcome::Crash(CrashKind::ZeroDenominator);
        };
        let accept = rng.gen::<f64>() < alpha;
        let decision_prob = if accept {
            chosen.insert(e);
            lambda = lambda1;
            alpha
        } else {
            1.0 - alpha
        };
        log_p += decision_prob.ln();
        if counters.record_decisions {
            counters.decision_probs.push(decision_prob);
        }
    }

    // t reached: the remaining unscanned edges are unconditioned.
    for e in unscanned.iter() {
        let q_e = params.q[e];
        let decision_prob = if rng.gen::<f64>() < 1.0 - q_e {
            chosen.insert(e);
            1.0 - q_e
        } else {
            q_e
        };
        log_p += decision_prob.ln();
        if counters.record_decisions {
            counters.decision_probs.push(decision_prob);
        }
    }
    counters.last_log_p = log_p;
    TrajectoryOutcome::Candidate { chosen, log_p }
}

/// ln w_u(H) for H ⊆ E_u; the trajectory guarantees u reaches t.
fn subgraph_log_weight(params: &SamplerParams, chosen: &BitSet) -> f64 {
    let mut log_w = 0.0;
    for e in params.e_u.iter() {
        log_w += if chosen.contains(e) { 1.0 - params.q[e] } else { params.q[e] }.ln();
    }
    log_w
}

/// Memoized brute-force counting backend, for running the sampler with
/// exact subroutines on small instances.
pub struct ExactOracle<'a> {
    ctx: crate::exact::ExactCtx<'a>,
    cap: usize,
    memo: std::collections::HashMap<(BitSet, BitSet), f64>,
}

impl<'a> ExactOracle<'a> {
    pub fn new(inst: &'a crate::instance::Instance) -> Self {
        ExactOracle {
            ctx: crate::exact::ExactCtx::new(&inst.dag, &inst.q, inst.t),
            cap: crate::exact::DEFAULT_EDGE_CAP,
            memo: Default::default(),
        }
    }
}

impl CountOracle for ExactOracle<'_> {
    fn count(&mut self, v0: &BitSet, e0: &BitSet, lambda: &BitSet) -> f64 {
        let key = (e0.clone(), lambda.clone());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = crate::exact::exact_reliability(self.ctx, v0, e0, lambda, self.cap)
            .expect("exact oracle instance above the enumeration cap");
        self.memo.insert(key, v);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{exact_reliability, ExactCtx, ExactDistribution};
    use crate::instance::Instance;
    use crate::testutil::{diamond_instance, single_edge_instance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn params_for<'a>(
        inst: &'a Instance,
        relevant: &'a [(BitSet, BitSet)],
        u: usize,
        p0: f64,
    ) -> SamplerParams<'a> {
        SamplerParams {
            dag: &inst.dag,
            q: &inst.q,
            t: inst.t,
            u,
            v_u: &relevant[u].0,
            e_u: &relevant[u].1,
            relevant,
            p0,
            attempts: 64,
            filter_denominator: 4.0,
        }
    }

    #[test]
    fn marginal_edge_cases() {
        assert_eq!(conditional_marginal(0.5, 0.0, 0.3), Some(1.0));
        assert_eq!(conditional_marginal(0.5, 0.3, 0.0), Some(0.0));
        assert_eq!(conditional_marginal(0.5, 0.4, 0.4), Some(0.5));
        assert_eq!(conditional_marginal(0.5, 0.0, 0.0), None);
    }

    #[test]
    fn single_edge_sample_and_filter() {
        // One edge u→t with exact subroutines: the edge is forced (c₀ = 0)
        // and the filter probability is exactly 1/4.
        let inst = single_edge_instance(0.3);
        let relevant: Vec<_> = (0..2).map(|u| inst.relevant_subgraph(u)).collect();
        let p0 = 0.7;
        let params = params_for(&inst, &relevant, 0, p0);
        let mut oracle = ExactOracle::new(&inst);
        let mut counters = SamplerCounters::new();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..50 {
            match sample(&params, &mut oracle, &mut counters, &mut rng) {
                SampleOutcome::Sampled(h) => assert!(h.edges().contains(0)),
                SampleOutcome::Crash(k) => panic!("unexpected crash {k:?}"),
            }
        }
        assert!((counters.min_filter_prob - 0.25).abs() < 1e-12);
        assert!((counters.max_filter_prob - 0.25).abs() < 1e-12);
    }

    #[test]
    fn diamond_distribution_with_exact_subroutines() {
        let inst = diamond_instance(0.5);
        let relevant: Vec<_> = (0..4).map(|u| inst.relevant_subgraph(u)).collect();
        let ectx = ExactCtx::new(&inst.dag, &inst.q, inst.t);
        let v0 = BitSet::full(4);
        let e0 = BitSet::full(4);
        let lam_s = BitSet::singleton(4, 0);
        let p0 = exact_reliability(ectx, &v0, &e0, &lam_s, 24).unwrap();
        let params = params_for(&inst, &relevant, 0, p0);
        let mut oracle = ExactOracle::new(&inst);
        let mut counters = SamplerCounters::new();
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let n = 30_000;
        let mut samples = Vec::with_capacity(n);
        for _ in 0..n {
            match sample(&params, &mut oracle, &mut counters, &mut rng) {
                SampleOutcome::Sampled(h) => samples.push(h.into_edges()),
                SampleOutcome::Crash(k) => panic!("crash {k:?}"),
            }
        }
        let dist = ExactDistribution::build(ectx, &v0, &e0, &lam_s, 24).unwrap();
        let tv = crate::exact::empirical_tv(&samples, &dist);
        assert!(tv < 0.02, "TV {tv}");
        assert!(counters.min_filter_prob >= 1.0 / 16.0 - 1e-12);
        assert!(counters.max_filter_prob <= 1.0 + 1e-12);
    }

    #[test]
    fn trajectory_probability_bookkeeping() {
        let inst = diamond_instance(0.5);
        let relevant: Vec<_> = (0..4).map(|u| inst.relevant_subgraph(u)).collect();
        let ectx = ExactCtx::new(&inst.dag, &inst.q, inst.t);
        let v0 = BitSet::full(4);
        let e0 = BitSet::full(4);
        let lam_s = BitSet::singleton(4, 0);
        let p0 = exact_reliability(ectx, &v0, &e0, &lam_s, 24).unwrap();
        let params = params_for(&inst, &relevant, 0, p0);
        let mut oracle = ExactOracle::new(&inst);
        let mut counters = SamplerCounters::new();
        counters.record_decisions = true;
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        for _ in 0..200 {
            let _ = sample(&params, &mut oracle, &mut counters, &mut rng);
            let direct: f64 = counters.decision_probs.iter().map(|p| p.ln()).sum();
            assert!((direct - counters.last_log_p).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_p0_crashes_as_overflow() {
        let inst = single_edge_instance(0.3);
        let relevant: Vec<_> = (0..2).map(|u| inst.relevant_subgraph(u)).collect();
        let params = params_for(&inst, &relevant, 0, 0.0);
        let mut oracle = ExactOracle::new(&inst);
        let mut counters = SamplerCounters::new();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        assert_eq!(
            sample(&params, &mut oracle, &mut counters, &mut rng),
            SampleOutcome::Crash(CrashKind::FilterOverflow)
        );
    }
}
