//! Karp–Luby union estimation over the boundary decomposition
//! Ω_Λ = ∪ᵢ Ω^(i)_Λ, with two-round estimation, median boosting over B
//! blocks, and memoization of results keyed by (V₀, E₀, Λ₀).

use crate::bitset::BitSet;
use crate::config::Config;
use crate::graph::Dag;
use crate::store::{partition_blocks, EstimateTable, MemoTable, SampleStore};
use crate::subgraph::Subgraph;
use crate::subset::nonempty_subset_sample;
use rand::Rng;

/// One boundary vertex uᵢ of Λ with everything needed to weigh, lift and
/// test membership for its slice Ω^(i)_Λ of the union.
#[derive(Debug, Clone)]
pub struct BoundaryArm {
    pub vertex: usize,
    /// R̃^(i)_Λ = (1 − Π_{e ∈ δ_Λ(uᵢ)} q_e) · R̃_{uᵢ}.
    pub weight: f64,
    /// δ_Λ(uᵢ): edge ids from Λ into uᵢ, within E₀.
    pub delta: Vec<usize>,
    pub delta_q: Vec<f64>,
    /// E_{uᵢ}: edge set of G_{uᵢ} in the ambient instance.
    pub e_u: BitSet,
    /// E₀ ∖ (E_{uᵢ} ∪ δ_Λ(uᵢ)): the independent-fill edges of the lift.
    pub rest: Vec<usize>,
}

/// The union decomposition context shared by both estimation rounds.
pub struct UnionCtx<'a> {
    pub dag: &'a Dag,
    pub q: &'a [f64],
    pub t: usize,
    pub v0: &'a BitSet,
    pub e0: &'a BitSet,
    pub arms: Vec<BoundaryArm>,
}

impl<'a> UnionCtx<'a> {
    /// Builds the boundary arms of Λ within (V₀, E₀). Boundary vertices are
    /// listed in ascending topological order; `weight_of` supplies R̃_w and
    /// `relevant` the per-vertex (V_w, E_w) tables.
    pub fn build(
        dag: &'a Dag,
        q: &'a [f64],
        t: usize,
        v0: &'a BitSet,
        e0: &'a BitSet,
        lambda: &BitSet,
        relevant: &[(BitSet, BitSet)],
        weight_of: impl Fn(usize) -> f64,
    ) -> Self {
        let boundary = dag.boundary(lambda, e0);
        let mut arms = Vec::new();
        for u in boundary.iter() {
            let e_u = relevant[u].1.clone();
            // Input consistency: each boundary vertex's relevant edges must
            // already lie inside the ambient edge set.
            assert!(
                e_u.is_subset_of(e0),
                "approx-count input violates E_w ⊆ E₀ for boundary vertex {u}"
            );
            let delta: Vec<usize> = dag
                .in_edges(u)
                .iter()
                .copied()
                .filter(|&e| e0.contains(e) && lambda.contains(dag.edge(e).0))
                .collect();
            let delta_q: Vec<f64> = delta.iter().map(|&e| q[e]).collect();
            let fail_all: f64 = delta_q.iter().product();
            let mut covered = e_u.clone();
            for &e in &delta {
                covered.insert(e);
            }
            let rest: Vec<usize> = e0.iter().filter(|&e| !covered.contains(e)).collect();
            arms.push(BoundaryArm {
                vertex: u,
                weight: (1.0 - fail_all) * weight_of(u),
                delta,
                delta_q,
                e_u,
                rest,
            });
        }
        UnionCtx { dag, q, t, v0, e0, arms }
    }

    pub fn total_weight(&self) -> f64 {
        self.arms.iter().map(|a| a.weight).sum()
    }

    /// Lifts a π_{uᵢ} sample to a π^(i)_Λ sample over E₀: keep H, add a
    /// non-empty subset of δ_Λ(uᵢ), fill the remaining edges independently.
    /// The three steps touch disjoint edge sets.
    pub fn lift_sample<R: Rng>(&self, arm: &BoundaryArm, h: &BitSet, rng: &mut R) -> BitSet {
        assert!(!arm.delta.is_empty(), "uᵢ is not a boundary vertex of Λ");
        debug_assert!(h.is_subset_of(&arm.e_u), "sample escapes E_{{uᵢ}}");
        let mut lifted = h.clone();
        for d in nonempty_subset_sample(&arm.delta_q, rng) {
            lifted.insert(arm.delta[d]);
        }
        for &e in &arm.rest {
            if rng.gen::<f64>() < 1.0 - self.q[e] {
                lifted.insert(e);
            }
        }
        lifted
    }

    /// Smallest index j with H' ∈ Ω^(j)_Λ: some δ_Λ(uⱼ) edge present and uⱼ
    /// reaching t. One backward BFS answers all arms.
    pub fn smallest_member_index(&self, lifted: &BitSet) -> Option<usize> {
        let reaching = self.dag.reaches_sink_set(self.t, self.v0, lifted);
        self.arms.iter().position(|arm| {
            reaching.contains(arm.vertex) && arm.delta.iter().any(|&e| lifted.contains(e))
        })
    }
}

/// One Karp–Luby estimation pass: T trials of the smallest-index indicator,
/// consuming samples sequentially from the given per-arm slices. Returns 0
/// immediately if any slice is exhausted (cᵢ > ℓ_es).
pub fn estimate<R: Rng>(
    ctx: &UnionCtx,
    slices: &[&[Subgraph]],
    ell_es: u64,
    trials: u64,
    rng: &mut R,
) -> f64 {
    assert_eq!(slices.len(), ctx.arms.len());
    let total = ctx.total_weight();
    debug_assert!(total > 0.0, "caller must handle ΣR̃ = 0");
    let cum: Vec<f64> = ctx
        .arms
        .iter()
        .scan(0.0, |acc, a| {
            *acc += a.weight;
            Some(*acc)
        })
        .collect();
    let mut consumed = vec![0u64; ctx.arms.len()];
    let mut hits = 0u64;
    for _ in 0..trials {
        let x: f64 = rng.gen::<f64>() * total;
        let i = cum.partition_point(|&c| c <= x).min(ctx.arms.len() - 1);
        consumed[i] += 1;
        if consumed[i] > ell_es {
            return 0.0;
        }
        let h = &slices[i][(consumed[i] - 1) as usize];
        let lifted = ctx.lift_sample(&ctx.arms[i], h.edges(), rng);
        if ctx.smallest_member_index(&lifted) == Some(i) {
            hits += 1;
        }
    }
    hits as f64 / trials as f64
}

/// Everything ApproxCount needs besides the query itself.
pub struct CountTables<'a> {
    pub dag: &'a Dag,
    pub q: &'a [f64],
    pub t: usize,
    pub config: &'a Config,
    /// (V_w, E_w) per vertex of the preprocessed instance.
    pub relevant: &'a [(BitSet, BitSet)],
    pub estimates: &'a EstimateTable,
    pub stores: &'a SampleStore,
    pub master_seed: u64,
}

/// ApproxCount: estimates the Λ₀-to-t reliability in (V₀, E₀) via the
/// boundary union, two estimation rounds per block and a median over
/// blocks. Results are memoized on (V₀, E₀, Λ₀).
pub fn approx_count(
    tables: &CountTables,
    v0: &BitSet,
    e0: &BitSet,
    lambda0: &BitSet,
    memo: &mut MemoTable,
) -> f64 {
    let key = (v0.clone(), e0.clone(), lambda0.clone());
    if let Some(value) = memo.lookup(&key) {
        return value;
    }
    let value = approx_count_fresh(tables, v0, e0, lambda0, memo.computed);
    memo.store(key, value);
    value
}

fn approx_count_fresh(
    tables: &CountTables,
    v0: &BitSet,
    e0: &BitSet,
    lambda0: &BitSet,
    stream_index: u64,
) -> f64 {
    if lambda0.contains(tables.t) {
        return 1.0;
    }
    let reaching = tables.dag.reaches_sink_set(tables.t, v0, e0);
    if !lambda0.intersects(&reaching) {
        return 0.0;
    }

    let ctx = UnionCtx::build(
        tables.dag,
        tables.q,
        tables.t,
        v0,
        e0,
        lambda0,
        tables.relevant,
        |w| {
            assert!(tables.estimates.has(w), "R̃_{w} missing for boundary vertex");
            tables.estimates.get(w)
        },
    );
    let total = ctx.total_weight();
    if total <= 0.0 {
        return 0.0;
    }

    let cfg = tables.config;
    let blocks_per_arm: Vec<_> = ctx
        .arms
        .iter()
        .map(|arm| {
            assert!(tables.stores.has(arm.vertex), "S_{} missing", arm.vertex);
            partition_blocks(tables.stores.get(arm.vertex), cfg)
                .expect("store length matches configuration")
        })
        .collect();

    let mut rng = crate::rng::substream(tables.master_seed, "approx-count", stream_index);
    let n = tables.dag.vertex_count() as f64;
    let mut block_values: Vec<f64> = Vec::with_capacity(cfg.block_count as usize);
    for j in 0..cfg.block_count as usize {
        let round1: Vec<&[Subgraph]> = blocks_per_arm.iter().map(|b| b[j].round1).collect();
        let z_hat = estimate(&ctx, &round1, cfg.round1_len, cfg.round1_len, &mut rng);
        // Ẑ = 0 makes 2/Ẑ infinite, so min picks 4n.
        let scale = if z_hat > 0.0 { (2.0 / z_hat).min(4.0 * n) } else { 4.0 * n };
        let t2 = (cfg.round2_coeff * scale).ceil().max(1.0) as u64;
        let round2: Vec<&[Subgraph]> = blocks_per_arm.iter().map(|b| b[j].round2).collect();
        let z_tilde = estimate(&ctx, &round2, cfg.round2_len, t2, &mut rng);
        block_values.push(z_tilde * total);
    }
    median(&mut block_values)
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{exact_union_decomposition, ExactCtx, ExactDistribution};
    use crate::instance::Instance;
    use crate::testutil::diamond_instance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn relevant_tables(inst: &Instance) -> Vec<(BitSet, BitSet)> {
        (0..inst.vertex_count()).map(|u| inst.relevant_subgraph(u)).collect()
    }

    /// Exact-weight, perfect-sample union context on the diamond with
    /// Λ = {s}.
    fn diamond_ctx<'a>(
        inst: &'a Instance,
        v0: &'a BitSet,
        e0: &'a BitSet,
        relevant: &'a [(BitSet, BitSet)],
    ) -> UnionCtx<'a> {
        let ctx = ExactCtx::new(&inst.dag, &inst.q, inst.t);
        let lambda = BitSet::singleton(4, 0);
        UnionCtx::build(&inst.dag, &inst.q, inst.t, v0, e0, &lambda, relevant, |w| {
            let (vw, ew) = &relevant[w];
            let lam = BitSet::singleton(4, w);
            crate::exact::exact_reliability(ctx, vw, ew, &lam, 24).unwrap()
        })
    }

    #[test]
    fn arm_weights_match_exact_decomposition() {
        let inst = diamond_instance(0.5);
        let v0 = BitSet::full(4);
        let e0 = BitSet::full(4);
        let relevant = relevant_tables(&inst);
        let uc = diamond_ctx(&inst, &v0, &e0, &relevant);
        let lambda = BitSet::singleton(4, 0);
        let ectx = ExactCtx::new(&inst.dag, &inst.q, inst.t);
        let dec = exact_union_decomposition(ectx, &v0, &e0, &lambda, 24).unwrap();
        assert_eq!(uc.arms.len(), dec.boundary.len());
        for (arm, (&u, &part)) in uc.arms.iter().zip(dec.boundary.iter().zip(&dec.parts)) {
            assert_eq!(arm.vertex, u);
            assert!((arm.weight - part).abs() < 1e-12, "Lemma R^(i) = (1−Πq)·R_u");
        }
    }

    #[test]
    fn lift_forced_delta_edge() {
        // Λ = {s}, uᵢ = a, H = {(a,t)}: H' always contains (s,a) and (a,t),
        // and each of (s,b), (b,t) independently w.p. 1/2.
        let inst = diamond_instance(0.5);
        let v0 = BitSet::full(4);
        let e0 = BitSet::full(4);
        let relevant = relevant_tables(&inst);
        let uc = diamond_ctx(&inst, &v0, &e0, &relevant);
        let arm_a = &uc.arms[0];
        assert_eq!(arm_a.vertex, 1);
        // Canonical edge order: (0,1)=0, (0,2)=1, (1,3)=2, (2,3)=3.
        let h = BitSet::singleton(4, 2);
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let mut count_sb = 0;
        let n = 40_000;
        for _ in 0..n {
            let lifted = uc.lift_sample(arm_a, &h, &mut rng);
            assert!(lifted.contains(0) && lifted.contains(2));
            if lifted.contains(1) {
                count_sb += 1;
            }
        }
        let f = count_sb as f64 / n as f64;
        assert!((f - 0.5).abs() < 0.01);
    }

    #[test]
    fn lift_no_third_category_edges() {
        // On the single-edge graph there is nothing beyond E_u ∪ δ.
        let inst = crate::testutil::single_edge_instance(0.3);
        let v0 = BitSet::full(2);
        let e0 = BitSet::full(1);
        let relevant = relevant_tables(&inst);
        let lambda = BitSet::singleton(2, 0);
        let uc = UnionCtx::build(&inst.dag, &inst.q, inst.t, &v0, &e0, &lambda, &relevant, |_| 1.0);
        assert!(uc.arms[0].rest.is_empty());
    }

    #[test]
    fn estimator_mean_on_diamond() {
        // With exact weights and perfect samples the mean of Z converges to
        // R_Λ / ΣR^(i) = (7/16)/(1/2) = 7/8.
        let inst = diamond_instance(0.5);
        let v0 = BitSet::full(4);
        let e0 = BitSet::full(4);
        let relevant = relevant_tables(&inst);
        let uc = diamond_ctx(&inst, &v0, &e0, &relevant);
        let ectx = ExactCtx::new(&inst.dag, &inst.q, inst.t);
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let trials: u64 = 100_000;
        let slices: Vec<Vec<Subgraph>> = uc
            .arms
            .iter()
            .map(|arm| {
                let (vw, ew) = &relevant[arm.vertex];
                let lam = BitSet::singleton(4, arm.vertex);
                let dist = ExactDistribution::build(ectx, vw, ew, &lam, 24).unwrap();
                (0..trials)
                    .map(|_| Subgraph::new(dist.sample(&mut rng).clone(), ew.clone()))
                    .collect()
            })
            .collect();
        let views: Vec<&[Subgraph]> = slices.iter().map(|s| s.as_slice()).collect();
        let mean = estimate(&uc, &views, trials, trials, &mut rng);
        let p = 7.0 / 8.0;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((mean - p).abs() <= 4.0 * sigma, "mean {mean} vs {p}");
    }

    #[test]
    fn estimate_single_arm_is_one() {
        let inst = crate::testutil::single_edge_instance(0.3);
        let v0 = BitSet::full(2);
        let e0 = BitSet::full(1);
        let relevant = relevant_tables(&inst);
        let lambda = BitSet::singleton(2, 0);
        let uc =
            UnionCtx::build(&inst.dag, &inst.q, inst.t, &v0, &e0, &lambda, &relevant, |_| 0.7);
        let samples: Vec<Subgraph> =
            (0..16).map(|_| Subgraph::empty(relevant[1].1.clone())).collect();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let z = estimate(&uc, &[&samples], 16, 16, &mut rng);
        assert_eq!(z, 1.0);
    }

    #[test]
    fn estimate_exhausted_slice_returns_zero() {
        let inst = crate::testutil::single_edge_instance(0.3);
        let v0 = BitSet::full(2);
        let e0 = BitSet::full(1);
        let relevant = relevant_tables(&inst);
        let lambda = BitSet::singleton(2, 0);
        let uc =
            UnionCtx::build(&inst.dag, &inst.q, inst.t, &v0, &e0, &lambda, &relevant, |_| 0.7);
        let samples: Vec<Subgraph> =
            (0..4).map(|_| Subgraph::empty(relevant[1].1.clone())).collect();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let z = estimate(&uc, &[&samples], 4, 10, &mut rng);
        assert_eq!(z, 0.0);
    }

    #[test]
    fn median_conventions() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
