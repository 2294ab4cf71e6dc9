//! Run state: per-vertex sample stores, the estimate table, and the
//! memo table for ApproxCount results.

use crate::bitset::BitSet;
use crate::config::{Config, ConfigError};
use crate::subgraph::Subgraph;
use std::collections::HashMap;

/// Write-once multiset S_u of subgraph samples per vertex.
#[derive(Debug, Default)]
pub struct SampleStore {
    per_vertex: Vec<Option<Vec<Subgraph>>>,
}

impl SampleStore {
    pub fn new(n: usize) -> Self {
        SampleStore { per_vertex: (0..n).map(|_| None).collect() }
    }

    pub fn write(&mut self, v: usize, samples: Vec<Subgraph>) {
        assert!(self.per_vertex[v].is_none(), "S_{v} already written");
        self.per_vertex[v] = Some(samples);
    }

    pub fn get(&self, v: usize) -> &[Subgraph] {
        self.per_vertex[v]
            .as_deref()
            .unwrap_or_else(|| panic!("S_{v} not yet generated"))
    }

    pub fn has(&self, v: usize) -> bool {
        self.per_vertex[v].is_some()
    }
}

/// One of the B blocks of a store, split into its two round slices.
#[derive(Debug, Clone, Copy)]
pub struct Block<'a> {
    pub round1: &'a [Subgraph],
    pub round2: &'a [Subgraph],
}

/// Deterministic contiguous partition of a store into B blocks of
/// ℓ₀ = round1_len + round2_len samples each.
pub fn partition_blocks<'a>(
    samples: &'a [Subgraph],
    config: &Config,
) -> Result<Vec<Block<'a>>, ConfigError> {
    let expected = config.per_vertex_samples();
    if samples.len() as u64 != expected {
        return Err(ConfigError::StoreLengthMismatch(samples.len(), expected));
    }
    let l0 = config.block_len() as usize;
    let l1 = config.round1_len as usize;
    Ok((0..config.block_count as usize)
        .map(|j| {
            let block = &samples[j * l0..(j + 1) * l0];
            Block { round1: &block[..l1], round2: &block[l1..] }
        })
        .collect())
}

/// R̃_u per vertex, populated in reverse topological order.
#[derive(Debug)]
pub struct EstimateTable {
    values: Vec<Option<f64>>,
}

impl EstimateTable {
    pub fn new(n: usize) -> Self {
        EstimateTable { values: vec![None; n] }
    }

    pub fn set(&mut self, v: usize, value: f64) {
        assert!(self.values[v].is_none(), "R̃_{v} already set");
        self.values[v] = Some(value);
    }

    pub fn get(&self, v: usize) -> f64 {
        self.values[v].unwrap_or_else(|| panic!("R̃_{v} not yet computed"))
    }

    pub fn has(&self, v: usize) -> bool {
        self.values[v].is_some()
    }
}

pub type MemoKey = (BitSet, BitSet, BitSet);

/// Memoized ApproxCount results keyed by (V₀, E₀, Λ₀), with counters that
/// prove each key is computed at most once.
#[derive(Debug, Default)]
pub struct MemoTable {
    map: HashMap<MemoKey, f64>,
    pub computed: u64,
    pub hits: u64,
    pub duplicate_computations: u64,
}

impl MemoTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&mut self, key: &MemoKey) -> Option<f64> {
        let hit = self.map.get(key).copied();
        if hit.is_some() {
            self.hits += 1;
        }
        hit
    }

    pub fn store(&mut self, key: MemoKey, value: f64) {
        self.computed += 1;
        if self.map.insert(key, value).is_some() {
            self.duplicate_computations += 1;
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Preset;

    fn tiny_config(b: u64, l1: u64, l2_len: u64) -> Config {
        Config {
            preset: Preset::Scaled,
            block_count: b,
            round1_len: l1,
            ell2: l2_len,
            round2_len: l2_len,
            round2_coeff: 1.0,
            sample_attempts: 4,
            filter_denominator: 4.0,
        }
    }

    fn dummy_samples(k: usize) -> Vec<Subgraph> {
        (0..k).map(|_| Subgraph::empty(BitSet::new(3))).collect()
    }

    #[test]
    fn contiguous_blocks() {
        // ℓ = 12, B = 2, ℓ₁ = 2, ℓ₀ = 6 → blocks [0..5], [6..11].
        let cfg = tiny_config(2, 2, 4);
        let samples = dummy_samples(12);
        let blocks = partition_blocks(&samples, &cfg).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].round1.len(), 2);
        assert_eq!(blocks[0].round2.len(), 4);
        assert_eq!(blocks[1].round2.len(), 4);
    }

    #[test]
    fn single_block_is_whole_store() {
        let cfg = tiny_config(1, 2, 4);
        let samples = dummy_samples(6);
        let blocks = partition_blocks(&samples, &cfg).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].round1.len() + blocks[0].round2.len(), 6);
    }

    #[test]
    fn wrong_length_rejected() {
        let cfg = tiny_config(2, 2, 4);
        let samples = dummy_samples(11);
        assert_eq!(
            partition_blocks(&samples, &cfg).unwrap_err(),
            ConfigError::StoreLengthMismatch(11, 12)
        );
    }

    #[test]
    fn memo_counts_unique_computations() {
        let mut memo = MemoTable::new();
        let key = (BitSet::new(2), BitSet::new(2), BitSet::new(2));
        assert!(memo.lookup(&key).is_none());
        memo.store(key.clone(), 0.5);
        assert_eq!(memo.lookup(&key), Some(0.5));
        assert_eq!(memo.computed, 1);
        assert_eq!(memo.hits, 1);
        assert_eq!(memo.duplicate_computations, 0);
    }

    #[test]
    #[should_panic(expected = "already written")]
    fn store_is_write_once() {
        let mut store = SampleStore::new(2);
        store.write(1, dummy_samples(1));
        store.write(1, dummy_samples(1));
    }
}
