//! O(n) sampler for random non-empty subsets.
//!
//! Draws D ⊆ {0..n-1} with probability proportional to
//! 1[D ≠ ∅] · Π_{i∈D}(1−qᵢ) · Π_{j∉D}qⱼ, by fixing coordinates left to
//! right from their conditional marginals. Suffix products of q make each
//! marginal O(1).

use rand::Rng;

/// Conditional marginal of σᵢ = 1 given the prefix, as used by the sampler:
/// if the prefix already contains a 1 the condition is vacuous and the
/// marginal is 1−qᵢ; otherwise the suffix must be non-empty, giving
/// (1−qᵢ)/(1−Π_{j≥i}qⱼ).
pub fn conditional_marginals(qs: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = qs.len();
    let mut suffix = vec![1.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] * qs[i];
    }
    let with_prior_one: Vec<f64> = qs.iter().map(|q| 1.0 - q).collect();
    let all_zero_prefix: Vec<f64> = (0..n).map(|i| (1.0 - qs[i]) / (1.0 - suffix[i])).collect();
    (all_zero_prefix, with_prior_one)
}

pub fn nonempty_subset_sample<R: Rng>(qs: &[f64], rng: &mut R) -> Vec<usize> {
    assert!(!qs.is_empty(), "need a non-empty index set");
    assert!(qs.iter().all(|&q| (0.0..1.0).contains(&q)), "need all q < 1");
    let n = qs.len();
    let mut suffix = vec![1.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] * qs[i];
    }
    let mut chosen = Vec::new();
    for i in 0..n {
        let p_one = if chosen.is_empty() {
            (1.0 - qs[i]) / (1.0 - suffix[i])
        } else {
            1.0 - qs[i]
        };
        if rng.gen::<f64>() < p_one {
            chosen.push(i);
        }
    }
    debug_assert!(!chosen.is_empty());
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::collections::HashMap;

    /// Brute-force law of the non-empty-subset distribution.
    pub fn enumerate_law(qs: &[f64]) -> HashMap<u64, f64> {
        let n = qs.len();
        let mut weights = HashMap::new();
        let mut total = 0.0;
        for mask in 1u64..1 << n {
            let mut w = 1.0;
            for (i, q) in qs.iter().enumerate() {
                w *= if mask >> i & 1 == 1 { 1.0 - q } else { *q };
            }
            weights.insert(mask, w);
            total += w;
        }
        weights.values_mut().for_each(|w| *w /= total);
        weights
    }

    fn mask_of(subset: &[usize]) -> u64 {
        subset.iter().fold(0u64, |m, &i| m | 1 << i)
    }

    #[test]
    fn singleton_forced() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert_eq!(nonempty_subset_sample(&[0.3], &mut rng), vec![0]);
        }
    }

    #[test]
    fn symmetric_two_elements() {
        // qs = [0.5, 0.5]: each of {0}, {1}, {0,1} with probability 1/3.
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let mut counts = HashMap::new();
        let n = 60_000;
        for _ in 0..n {
            *counts.entry(mask_of(&nonempty_subset_sample(&[0.5, 0.5], &mut rng))).or_insert(0) += 1;
        }
        for mask in [1u64, 2, 3] {
            let f = counts[&mask] as f64 / n as f64;
            assert!((f - 1.0 / 3.0).abs() < 0.01, "mask {mask}: {f}");
        }
    }

    #[test]
    fn zero_probability_index_always_present() {
        // qs = [0.0, 0.5]: {0} w.p. 0.5, {0,1} w.p. 0.5, never {1} alone.
        let law = enumerate_law(&[0.0, 0.5]);
        assert!((law[&1] - 0.5).abs() < 1e-12);
        assert!((law[&3] - 0.5).abs() < 1e-12);
        assert!(law[&2].abs() < 1e-12);
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..200 {
            let d = nonempty_subset_sample(&[0.0, 0.5], &mut rng);
            assert!(d.contains(&0));
        }
    }

    #[test]
    fn marginals_match_enumeration() {
        // Analytic conditional marginals vs. brute force, |S| ≤ 10.
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        use rand::Rng;
        for _ in 0..20 {
            let n = rng.gen_range(1..=10);
            let qs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..0.95)).collect();
            let law = enumerate_law(&qs);
            // P[σ₀ = 1] from the law vs. the analytic first marginal.
            let p0: f64 = law.iter().filter(|(m, _)| *m & 1 == 1).map(|(_, w)| w).sum();
            let (zero_prefix, _) = conditional_marginals(&qs);
            assert!((p0 - zero_prefix[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn empirical_matches_law() {
        let qs = [0.2, 0.7, 0.5];
        let law = enumerate_law(&qs);
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let n = 100_000;
        let mut counts: HashMap<u64, usize> = HashMap::new();
        for _ in 0..n {
            *counts.entry(mask_of(&nonempty_subset_sample(&qs, &mut rng))).or_insert(0) += 1;
        }
        for (mask, p) in law {
            let f = *counts.get(&mask).unwrap_or(&0) as f64 / n as f64;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((f - p).abs() <= 4.0 * sigma + 1e-9, "mask {mask}: f={f} p={p}");
        }
    }
}
