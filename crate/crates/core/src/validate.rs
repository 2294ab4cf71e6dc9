//! Statistical validation suites.
//!
//! Each suite replays a family of randomized experiments against the exact
//! brute-force oracles and reports pass/fail per check in a flat
//! key-value document. Every tolerance here is part of the project's
//! acceptance gate, so the checks must not be loosened ad hoc.

use crate::bitset::BitSet;
use crate::config::Config;
use crate::estimator::{estimate, UnionCtx};
use crate::exact::{
    empirical_tv, exact_reliability, exact_union_decomposition, ExactCtx, ExactDistribution,
    DEFAULT_EDGE_CAP,
};
use crate::generate::{diamond_chain, layered, random_dag, random_small_instance};
use crate::instance::{preprocess, Instance};
use crate::reductions::{
    bis_to_unreliability, count_accepting_strings, count_disconnected_subsets_bruteforce,
    count_independent_sets_bruteforce, dag_to_nfa, enumerate_accepted, exact_vertex_reliability,
    vertex_to_edge_failures, Bipartite, SplitMode,
};
use crate::rng::substream;
use crate::sampler::{sample, ExactOracle, SampleOutcome, SamplerCounters, SamplerParams};
use crate::subgraph::Subgraph;
use crate::subset::{conditional_marginals, nonempty_subset_sample};
use crate::testutil::{diamond_instance, series_path_instance};
use rand::Rng;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub info: String,
}

#[derive(Debug, Clone)]
pub struct HarnessReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl HarnessReport {
    fn new(suite: &str, seed: u64) -> Self {
        HarnessReport { suite: suite.into(), seed, checks: Vec::new() }
    }

    fn push(&mut self, name: &str, passed: bool, info: String) {
        self.checks.push(Check { name: name.into(), passed, info });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Flat machine-readable key-value rendering.
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "suite={}", self.suite).unwrap();
        writeln!(out, "seed={}", self.seed).unwrap();
        for c in &self.checks {
            writeln!(out, "check.{}.pass={}", c.name, c.passed).unwrap();
            writeln!(out, "check.{}.info={}", c.name, c.info).unwrap();
        }
        writeln!(out, "result={}", if self.passed() { "pass" } else { "fail" }).unwrap();
        out
    }
}

fn whole_parts<'a>(inst: &'a Instance) -> (ExactCtx<'a>, BitSet, BitSet, BitSet) {
    let ctx = ExactCtx::new(&inst.dag, &inst.q, inst.t);
    let v = BitSet::full(inst.vertex_count());
    let e = BitSet::full(inst.edge_count());
    let l = BitSet::singleton(inst.vertex_count(), inst.s);
    (ctx, v, e, l)
}

fn relevant_tables(inst: &Instance) -> Vec<(BitSet, BitSet)> {
    (0..inst.vertex_count()).map(|u| inst.relevant_subgraph(u)).collect()
}

fn exact_weight_ctx<'a>(
    inst: &'a Instance,
    v0: &'a BitSet,
    e0: &'a BitSet,
    lambda: &BitSet,
    relevant: &'a [(BitSet, BitSet)],
) -> UnionCtx<'a> {
    let ctx = ExactCtx::new(&inst.dag, &inst.q, inst.t);
    UnionCtx::build(&inst.dag, &inst.q, inst.t, v0, e0, lambda, relevant, |w| {
        if w == inst.t {
            return 1.0;
        }
        let (vw, ew) = &relevant[w];
        let lam = BitSet::singleton(inst.vertex_count(), w);
        exact_reliability(ctx, vw, ew, &lam, DEFAULT_EDGE_CAP).unwrap()
    })
}

/// Estimator checks: the union-estimator expectation identity with exact
/// weights and perfect samples, the per-arm weight identity, the lifting
/// distribution, and the non-empty-subset sampler (law and linear cost).
pub fn estimator_suite(seed: u64, trials: u64, corpus: usize) -> HarnessReport {
    let mut report = HarnessReport::new("estimator", seed);
    let mut gen_rng = substream(seed, "estimator-corpus", 0);

    // Unbiasedness: empirical mean of the indicator vs R_Λ / ΣR^(i).
    let mut max_sigma_dev = 0.0f64;
    let mut worst = String::new();
    for g in 0..corpus {
        let inst = random_small_instance(8, &mut gen_rng);
        let (ectx, v0, e0, lambda) = whole_parts(&inst);
        let relevant = relevant_tables(&inst);
        let uc = exact_weight_ctx(&inst, &v0, &e0, &lambda, &relevant);
        let dec = exact_union_decomposition(ectx, &v0, &e0, &lambda, DEFAULT_EDGE_CAP).unwrap();
        let p = dec.total / uc.total_weight();
        let mut rng = substream(seed, "estimator-trials", g as u64);
        let slices: Vec<Vec<Subgraph>> = uc
            .arms
            .iter()
            .map(|arm| {
                let (vw, ew) = &relevant[arm.vertex];
                let lam = BitSet::singleton(inst.vertex_count(), arm.vertex);
                let dist =
                    ExactDistribution::build(ectx, vw, ew, &lam, DEFAULT_EDGE_CAP).unwrap();
                (0..trials)
                    .map(|_| Subgraph::new(dist.sample(&mut rng).clone(), ew.clone()))
                    .collect()
            })
            .collect();
        let views: Vec<&[Subgraph]> = slices.iter().map(|s| s.as_slice()).collect();
        let mean = estimate(&uc, &views, trials, trials, &mut rng);
        let sigma = (p * (1.0 - p) / trials as f64).sqrt().max(1e-12);
        let dev = (mean - p).abs() / sigma;
        if dev > max_sigma_dev {
            max_sigma_dev = dev;
            worst = format!("graph={g} mean={mean:.6} p={p:.6}");
        }
    }
    report.push(
        "unbiasedness",
        max_sigma_dev <= 4.0,
        format!("graphs={corpus} trials={trials} max_dev_sigma={max_sigma_dev:.2} {worst}"),
    );

    // Per-arm weight identity against the exact union decomposition, for
    // Λ = {s} and for random larger Λ.
    let mut max_weight_err = 0.0f64;
    let mut lambdas_checked = 0usize;
    for g in 0..corpus {
        let inst = random_small_instance(8, &mut gen_rng);
        let (ectx, v0, e0, lambda_s) = whole_parts(&inst);
        let relevant = relevant_tables(&inst);
        let mut lam_rng = substream(seed, "estimator-lambda", g as u64);
        let mut lambdas = vec![lambda_s];
        // A random Λ ⊇ {s} avoiding t.
        let mut lam = BitSet::singleton(inst.vertex_count(), inst.s);
        for v in 1..inst.vertex_count() - 1 {
            if lam_rng.gen::<f64>() < 0.4 {
                lam.insert(v);
            }
        }
        lambdas.push(lam);
        for lambda in lambdas {
            if inst.dag.boundary(&lambda, &e0).is_empty() {
                continue;
            }
            let uc = exact_weight_ctx(&inst, &v0, &e0, &lambda, &relevant);
            let dec =
                exact_union_decomposition(ectx, &v0, &e0, &lambda, DEFAULT_EDGE_CAP).unwrap();
            for (arm, part) in uc.arms.iter().zip(&dec.parts) {
                max_weight_err = max_weight_err.max((arm.weight - part).abs());
            }
            lambdas_checked += 1;
        }
    }
    report.push(
        "arm_weight_identity",
        max_weight_err <= 1e-12,
        format!("lambdas={lambdas_checked} max_err={max_weight_err:.3e}"),
    );

    // Lifting: TV between lifted samples and the exact per-arm law.
    let mut max_lift_tv = 0.0f64;
    for g in 0..corpus.min(5) {
        let inst = random_small_instance(8, &mut gen_rng);
        let (ectx, v0, e0, lambda) = whole_parts(&inst);
        let relevant = relevant_tables(&inst);
        let uc = exact_weight_ctx(&inst, &v0, &e0, &lambda, &relevant);
        let mut rng = substream(seed, "estimator-lift", g as u64);
        for (i, arm) in uc.arms.iter().enumerate() {
            let law = arm_law(&inst, &uc, i);
            let (vw, ew) = &relevant[arm.vertex];
            let dist = if arm.vertex == inst.t {
                None
            } else {
                let lam = BitSet::singleton(inst.vertex_count(), arm.vertex);
                Some(ExactDistribution::build(ectx, vw, ew, &lam, DEFAULT_EDGE_CAP).unwrap())
            };
            let mut counts: HashMap<BitSet, usize> = HashMap::new();
            for _ in 0..trials {
                let h = match &dist {
                    Some(d) => d.sample(&mut rng).clone(),
                    None => BitSet::new(inst.edge_count()),
                };
                let lifted = uc.lift_sample(arm, &h, &mut rng);
                *counts.entry(lifted).or_insert(0) += 1;
            }
            let mut tv = 0.0;
            for (h, &c) in &counts {
                tv += (c as f64 / trials as f64 - law.get(h).copied().unwrap_or(0.0)).abs();
            }
            for (h, p) in &law {
                if !counts.contains_key(h) {
                    tv += p;
                }
            }
            max_lift_tv = max_lift_tv.max(tv / 2.0);
        }
    }
    let tol = tv_tolerance(trials);
    report.push(
        "lift_distribution_tv",
        max_lift_tv <= tol,
        format!("samples={trials} max_tv={max_lift_tv:.4} tol={tol:.4}"),
    );

    subset_sampler_checks(&mut report, seed, trials);
    report
}

/// Exact law of the lifted per-arm distribution π^(i)_Λ: weights of all
/// H' ⊆ E₀ that contain a δ-edge of the arm and whose arm vertex reaches t.
fn arm_law(inst: &Instance, uc: &UnionCtx, arm_index: usize) -> HashMap<BitSet, f64> {
    let arm = &uc.arms[arm_index];
    let edge_ids: Vec<usize> = uc.e0.iter().collect();
    let mut law = HashMap::new();
    let mut total = 0.0;
    for mask in 0u64..1 << edge_ids.len() {
        let mut h = BitSet::new(inst.edge_count());
        let mut w = 1.0;
        for (bit, &e) in edge_ids.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                h.insert(e);
                w *= 1.0 - inst.q[e];
            } else {
                w *= inst.q[e];
            }
        }
        if !arm.delta.iter().any(|&e| h.contains(e)) {
            continue;
        }
        let reaching = inst.dag.reaches_sink_set(inst.t, uc.v0, &h);
        if !reaching.contains(arm.vertex) {
            continue;
        }
        total += w;
        *law.entry(h).or_insert(0.0) += w;
    }
    law.values_mut().for_each(|w| *w /= total);
    law
}

fn subset_sampler_checks(report: &mut HarnessReport, seed: u64, trials: u64) {
    // Analytic marginals vs brute-force enumeration, |S| ≤ 10.
    let mut rng = substream(seed, "subset-marginals", 0);
    let mut max_err = 0.0f64;
    for _ in 0..30 {
        let n = rng.gen_range(1..=10);
        let qs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..0.95)).collect();
        let (zero_prefix, with_one) = conditional_marginals(&qs);
        // Brute force: P[σᵢ = 1 | σ₀..σ_{i-1} = 0] and | some earlier 1].
        for i in 0..n {
            let mut num = 0.0;
            let mut den = 0.0;
            for mask in 1u64..1 << n {
                if mask & ((1 << i) - 1) != 0 {
                    continue;
                }
                let mut w = 1.0;
                for (j, q) in qs.iter().enumerate() {
                    w *= if mask >> j & 1 == 1 { 1.0 - q } else { *q };
                }
                den += w;
                if mask >> i & 1 == 1 {
                    num += w;
                }
            }
            max_err = max_err.max((num / den - zero_prefix[i]).abs());
            max_err = max_err.max((with_one[i] - (1.0 - qs[i])).abs());
        }
    }
    report.push(
        "subset_marginals",
        max_err <= 1e-12,
        format!("max_err={max_err:.3e}"),
    );

    // Empirical subset frequencies within 4σ.
    let qs = [0.3, 0.6, 0.5, 0.8];
    let mut law: HashMap<u64, f64> = HashMap::new();
    let mut total = 0.0;
    for mask in 1u64..1 << qs.len() {
        let mut w = 1.0;
        for (j, q) in qs.iter().enumerate() {
            w *= if mask >> j & 1 == 1 { 1.0 - q } else { *q };
        }
        law.insert(mask, w);
        total += w;
    }
    law.values_mut().for_each(|w| *w /= total);
    let mut rng = substream(seed, "subset-empirical", 0);
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for _ in 0..trials {
        let mask = nonempty_subset_sample(&qs, &mut rng)
            .iter()
            .fold(0u64, |m, &i| m | 1 << i);
        *counts.entry(mask).or_insert(0) += 1;
    }
    let mut max_dev = 0.0f64;
    for (mask, p) in &law {
        let f = *counts.get(mask).unwrap_or(&0) as f64 / trials as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        max_dev = max_dev.max((f - p).abs() / sigma);
    }
    report.push(
        "subset_empirical",
        max_dev <= 4.0,
        format!("draws={trials} max_dev_sigma={max_dev:.2}"),
    );

    // Per-draw cost is linear in |S|: least-squares fit over sizes up to
    // 10⁴, requiring R² ≥ 0.98 on median-of-5 timings.
    let sizes: Vec<usize> = (1..=10).map(|k| k * 1000).collect();
    let reps = 50;
    let mut rng = substream(seed, "subset-timing", 0);
    let mut points = Vec::new();
    for &n in &sizes {
        let qs = vec![0.5f64; n];
        let mut times: Vec<f64> = (0..5)
            .map(|_| {
                let start = Instant::now();
                for _ in 0..reps {
                    std::hint::black_box(nonempty_subset_sample(&qs, &mut rng));
                }
                start.elapsed().as_secs_f64() / reps as f64
            })
            .collect();
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        points.push((n as f64, times[2]));
    }
    let r2 = linear_r2(&points);
    report.push(
        "subset_linear_cost",
        r2 >= 0.98,
        format!("sizes=1000..10000 r_squared={r2:.4}"),
    );
}

/// TV tolerance: 0.02 at the reference 10⁵ samples, scaled by the binomial
/// 1/√N law when smoke runs use fewer samples (never below 0.02).
fn tv_tolerance(trials: u64) -> f64 {
    0.02 * (100_000.0 / trials as f64).sqrt().max(1.0)
}

fn linear_r2(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    sxy * sxy / (sxx * syy)
}

/// Sampler checks: the rejection sampler with exact counting subroutines
/// must reproduce π_u, keep its filter probabilities in [1/16, 1], and
/// survive fuzzing with its structural invariants enabled.
pub fn sampler_suite(seed: u64, trials: u64, corpus: usize) -> HarnessReport {
    let mut report = HarnessReport::new("sampler", seed);
    let mut gen_rng = substream(seed, "sampler-corpus", 0);
    let mut instances = vec![diamond_instance(0.5)];
    for _ in 0..corpus {
        instances.push(random_small_instance(8, &mut gen_rng));
    }

    let mut max_tv = 0.0f64;
    let mut min_filter = f64::INFINITY;
    let mut max_filter = 0.0f64;
    let mut trajectories = 0u64;
    let mut crashes = 0u64;
    for (g, inst) in instances.iter().enumerate() {
        let (ectx, v0, e0, lam_s) = whole_parts(inst);
        let relevant = relevant_tables(inst);
        let p0 = exact_reliability(ectx, &v0, &e0, &lam_s, DEFAULT_EDGE_CAP).unwrap();
        let params = SamplerParams {
            dag: &inst.dag,
            q: &inst.q,
            t: inst.t,
            u: inst.s,
            v_u: &v0,
            e_u: &e0,
            relevant: &relevant,
            p0,
            attempts: 256,
            filter_denominator: 4.0,
        };
        let mut oracle = ExactOracle::new(inst);
        let mut counters = SamplerCounters::new();
        let mut rng = substream(seed, "sampler-draws", g as u64);
        let mut samples = Vec::with_capacity(trials as usize);
        for _ in 0..trials {
            match sample(&params, &mut oracle, &mut counters, &mut rng) {
                SampleOutcome::Sampled(h) => samples.push(h.into_edges()),
                SampleOutcome::Crash(_) => crashes += 1,
            }
        }
        let dist = ExactDistribution::build(ectx, &v0, &e0, &lam_s, DEFAULT_EDGE_CAP).unwrap();
        max_tv = max_tv.max(empirical_tv(&samples, &dist));
        min_filter = min_filter.min(counters.min_filter_prob);
        max_filter = max_filter.max(counters.max_filter_prob);
        trajectories += counters.trajectories;
    }
    let tol = tv_tolerance(trials);
    report.push(
        "distribution_tv",
        max_tv <= tol && crashes == 0,
        format!(
            "instances={} accepted_per_instance={trials} max_tv={max_tv:.4} tol={tol:.4} crashes={crashes}",
            instances.len()
        ),
    );
    report.push(
        "filter_bounds",
        min_filter >= 1.0 / 16.0 - 1e-12 && max_filter <= 1.0 + 1e-12,
        format!("min={min_filter:.4} max={max_filter:.4}"),
    );
    // The Λ₁ = Λ ∪ {w*} and scanned-edge-exclusion invariants are hard
    // asserts inside every trajectory; reaching here means zero violations.
    report.push(
        "invariant_fuzz",
        trajectories >= 10_000,
        format!("trajectories={trajectories} violations=0"),
    );
    report
}

/// Reduction checks: the independent-set bijection, the vertex-split
/// transformations, and the automaton counting equality.
pub fn reductions_suite(seed: u64, corpus: usize) -> HarnessReport {
    let mut report = HarnessReport::new("reductions", seed);

    // Bijection on random bipartite graphs with ≤ 12 vertices.
    let mut rng = substream(seed, "reductions-bis", 0);
    let mut checked = 0;
    let mut bijection_ok = true;
    for _ in 0..corpus {
        let left = rng.gen_range(1..=6);
        let right = rng.gen_range(1..=(12 - left).min(6));
        let mut edges = Vec::new();
        for u in 0..left {
            for v in 0..right {
                if rng.gen::<f64>() < 0.4 {
                    edges.push((u, v));
                }
            }
        }
        let g = Bipartite { left, right, edges };
        let d = bis_to_unreliability(&g).unwrap();
        let is = count_independent_sets_bruteforce(&g).unwrap();
        let disc = count_disconnected_subsets_bruteforce(&d).unwrap();
        if is != disc {
            bijection_ok = false;
        }
        checked += 1;
    }
    report.push(
        "is_bijection",
        bijection_ok,
        format!("graphs={checked} all_equal={bijection_ok}"),
    );

    // Vertex-split exactness on small instances, plus the bundle bound.
    let mut max_split_err = 0.0f64;
    let mut rng = substream(seed, "reductions-split", 0);
    for _ in 0..corpus.min(20) {
        let left = rng.gen_range(1..=2);
        let right = rng.gen_range(1..=2);
        let mut edges = Vec::new();
        for u in 0..left {
            for v in 0..right {
                if rng.gen::<f64>() < 0.6 {
                    edges.push((u, v));
                }
            }
        }
        let g = Bipartite { left, right, edges };
        let d = bis_to_unreliability(&g).unwrap();
        let truth = exact_vertex_reliability(&d).unwrap();
        let raw = vertex_to_edge_failures(&d, SplitMode::KeepZero);
        let inst = preprocess(&raw, 0.5).unwrap().ready();
        let got = match inst {
            Some(inst) => {
                let (ctx, v, e, l) = whole_parts(&inst);
                exact_reliability(ctx, &v, &e, &l, DEFAULT_EDGE_CAP).unwrap()
            }
            None => 0.0,
        };
        max_split_err = max_split_err.max((got - truth).abs());
    }
    report.push(
        "vertex_split_exact",
        max_split_err <= 1e-12,
        format!("max_err={max_split_err:.3e}"),
    );

    {
        let g = Bipartite { left: 1, right: 2, edges: vec![(0, 0), (0, 1)] };
        let d = bis_to_unreliability(&g).unwrap();
        let direct = {
            let raw = vertex_to_edge_failures(&d, SplitMode::KeepZero);
            let inst = preprocess(&raw, 0.5).unwrap().ready().unwrap();
            let (ctx, v, e, l) = whole_parts(&inst);
            exact_reliability(ctx, &v, &e, &l, DEFAULT_EDGE_CAP).unwrap()
        };
        let bundle = {
            let raw = vertex_to_edge_failures(&d, SplitMode::Bundle { k: 20, q: 0.5 });
            let inst = preprocess(&raw, 0.5).unwrap().ready().unwrap();
            let (ctx, v, e, l) = whole_parts(&inst);
            exact_reliability(ctx, &v, &e, &l, DEFAULT_EDGE_CAP).unwrap()
        };
        let bound = d.edges.len() as f64 * 0.5f64.powi(20);
        report.push(
            "bundle_bound",
            (bundle - direct).abs() <= bound + 1e-15,
            format!("err={:.3e} bound={bound:.3e}", (bundle - direct).abs()),
        );
    }

    // Automaton equality: accepting-string count = 2^m · R at q ≡ 1/2,
    // exactly, and all accepted strings end in 1.
    let mut rng = substream(seed, "reductions-nfa", 0);
    let mut nfa_ok = true;
    let mut last_bit_ok = true;
    let mut nfa_checked = 0;
    while nfa_checked < corpus {
        let n = rng.gen_range(3..=6);
        let density = rng.gen_range(0.3..0.8);
        let raw = random_dag(n, density, 0.5, 0.5, false, &mut rng);
        let inst = preprocess(&raw, 0.5).unwrap().ready().unwrap();
        let m = inst.edge_count();
        if m > 10 {
            continue;
        }
        let nfa = dag_to_nfa(&inst.dag);
        let count = count_accepting_strings(&nfa, m + 1).unwrap();
        let (ctx, v, e, l) = whole_parts(&inst);
        let r = exact_reliability(ctx, &v, &e, &l, DEFAULT_EDGE_CAP).unwrap();
        let expected = (r * (1u64 << m) as f64).round() as u128;
        if count != expected {
            nfa_ok = false;
        }
        let accepted = enumerate_accepted(&nfa, m + 1).unwrap();
        if accepted.len() as u128 != count
            || accepted.iter().any(|s| *s.last().unwrap() != 1)
        {
            last_bit_ok = false;
        }
        nfa_checked += 1;
    }
    report.push(
        "nfa_count_equality",
        nfa_ok,
        format!("instances={nfa_checked} all_equal={nfa_ok}"),
    );
    report.push(
        "nfa_last_bit_one",
        last_bit_ok,
        format!("instances={nfa_checked}"),
    );
    report
}

/// End-to-end accuracy and determinism of the scaled-preset estimator.
pub fn end2end_suite(seed: u64, seeds_per_instance: u64) -> HarnessReport {
    let mut report = HarnessReport::new("end2end", seed);
    let cfg = Config::scaled();
    let cases: Vec<(&str, Instance)> = vec![
        ("diamond", diamond_instance(0.5)),
        ("series_path", series_path_instance(0.5)),
        (
            "diamond_chain_3",
            preprocess(&diamond_chain(3, 0.5), 0.5).unwrap().ready().unwrap(),
        ),
        (
            "layered_3x2",
            preprocess(&layered(3, 2, 0.5), 0.5).unwrap().ready().unwrap(),
        ),
    ];
    for (name, inst) in &cases {
        let (ctx, v, e, l) = whole_parts(inst);
        let truth = exact_reliability(ctx, &v, &e, &l, DEFAULT_EDGE_CAP).unwrap();
        let mut estimates = Vec::new();
        let mut crashes = 0u64;
        for run_seed in 0..seeds_per_instance {
            let r = crate::fpras::run(inst, &cfg, seed.wrapping_add(run_seed));
            if r.crashed() {
                crashes += 1;
            }
            estimates.push(r.estimate);
        }
        let mut sorted = estimates.clone();
        let med = crate::estimator::median(&mut sorted);
        let med_err = (med - truth).abs() / truth;
        let within10 = estimates
            .iter()
            .filter(|&&x| (x - truth).abs() / truth <= 0.10)
            .count() as f64
            / estimates.len() as f64;
        report.push(
            &format!("{name}_accuracy"),
            med_err <= 0.05 && within10 >= 0.75,
            format!(
                "seeds={seeds_per_instance} exact={truth:.6} median={med:.6} \
                 median_rel_err={med_err:.4} within_10pct={within10:.2} crashes={crashes}"
            ),
        );
    }

    // Determinism and memo hygiene.
    let inst = &cases[0].1;
    let a = crate::fpras::run(inst, &cfg, seed);
    let b = crate::fpras::run(inst, &cfg, seed);
    report.push(
        "determinism",
        a.estimate == b.estimate && a.memo_computed == b.memo_computed,
        format!("estimate={:.6} repeat={:.6}", a.estimate, b.estimate),
    );
    let mut dup = 0;
    for (_, inst) in &cases {
        dup += crate::fpras::run(inst, &cfg, seed ^ 0x5eed).memo_duplicates;
    }
    report.push("memo_no_duplicates", dup == 0, format!("duplicates={dup}"));
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimator_suite_quick() {
        let r = estimator_suite(1, 20_000, 5);
        assert!(r.passed(), "{}", r.render());
    }

    #[test]
    fn sampler_suite_quick() {
        let r = sampler_suite(2, 8_000, 3);
        assert!(r.passed(), "{}", r.render());
    }

    #[test]
    fn reductions_suite_quick() {
        let r = reductions_suite(3, 15);
        assert!(r.passed(), "{}", r.render());
    }

    #[test]
    fn end2end_suite_quick() {
        let r = end2end_suite(4, 15);
        assert!(r.passed(), "{}", r.render());
    }

    #[test]
    fn report_rendering_is_flat() {
        let mut r = HarnessReport::new("demo", 7);
        r.push("a", true, "x=1".into());
        let text = r.render();
        assert!(text.contains("suite=demo"));
        assert!(text.contains("check.a.pass=true"));
        assert!(text.contains("result=pass"));
    }
}
