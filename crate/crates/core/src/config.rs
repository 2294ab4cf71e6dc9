//! Estimator parameters.
//!
//! The paper preset reproduces the published constants exactly: they are
//! astronomically large even for toy graphs (ℓ is already above 10¹² at
//! n = 5, m = 6), so it exists to be checked arithmetically and refused at
//! allocation time. The scaled preset shrinks every budget to desk scale;
//! the formal accuracy guarantee is claimed only under the paper preset.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("need n ≥ 2, got {0}")]
    BadVertexCount(u64),
    #[error("need m ≥ n − 1, got m = {0} with n = {1}")]
    BadEdgeCount(u64, u64),
    #[error("epsilon {0} outside (0, 1)")]
    BadEpsilon(f64),
    #[error("sample store holds {0} samples but the configuration requires {1}")]
    StoreLengthMismatch(usize, u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Paper,
    Scaled,
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Preset::Paper => write!(f, "paper"),
            Preset::Scaled => write!(f, "scaled"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub preset: Preset,
    /// B: number of median-boosting blocks.
    pub block_count: u64,
    /// ℓ₁: round-1 slice length (also the round-1 trial count).
    pub round1_len: u64,
    /// ℓ₂: accuracy parameter of the second round.
    pub ell2: u64,
    /// Round-2 slice length per block (500·ℓ₂ under the paper preset).
    pub round2_len: u64,
    /// Coefficient c in the round-2 trial count ⌈c · min{2/Ẑ, 4n}⌉
    /// (25·ℓ₂ under the paper preset).
    pub round2_coeff: f64,
    /// T: trajectory attempts per sample call.
    pub sample_attempts: u64,
    /// The 4 in the filter probability w_u(H)/(4·p·p₀).
    pub filter_denominator: f64,
}

impl Config {
    /// The faithful theoretical constants: B = 60n+150m, ℓ₁ = 400n,
    /// ℓ₂ = ⌈10⁴·n²·max{m², ε⁻²}⌉, round-2 slices of 500ℓ₂,
    /// T = ⌈1000·ln(n/ε)⌉.
    pub fn paper(n: u64, m: u64, eps: f64) -> Result<Config, ConfigError> {
        if n < 2 {
            return Err(ConfigError::BadVertexCount(n));
        }
        if m + 1 < n {
            return Err(ConfigError::BadEdgeCount(m, n));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(ConfigError::BadEpsilon(eps));
        }
        let ell2 = (1e4 * (n * n) as f64 * ((m * m) as f64).max(eps.powi(-2))).ceil() as u64;
        Ok(Config {
            preset: Preset::Paper,
            block_count: 60 * n + 150 * m,
            round1_len: 400 * n,
            ell2,
            round2_len: 500 * ell2,
            round2_coeff: 25.0 * ell2 as f64,
            sample_attempts: (1000.0 * (n as f64 / eps).ln()).ceil() as u64,
            filter_denominator: 4.0,
        })
    }

    /// Desk-scale defaults: the whole pipeline runs in seconds on n ≤ 10
    /// instances. No formal accuracy guarantee.
    pub fn scaled() -> Config {
        Config {
            preset: Preset::Scaled,
            block_count: 31,
            round1_len: 64,
            ell2: 256,
            round2_len: 256,
            round2_coeff: 256.0 / 20.0,
            sample_attempts: 256,
            filter_denominator: 4.0,
        }
    }

    /// ℓ₀: samples per block.
    pub fn block_len(&self) -> u64 {
        self.round1_len + self.round2_len
    }

    /// ℓ: total samples kept per vertex.
    pub fn per_vertex_samples(&self) -> u64 {
        self.block_count * self.block_len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_constants_n5_m6() {
        let c = Config::paper(5, 6, 0.5).unwrap();
        assert_eq!(c.block_count, 1200);
        assert_eq!(c.round1_len, 2000);
        assert_eq!(c.ell2, 9_000_000);
        assert_eq!(c.per_vertex_samples(), 5_400_002_400_000);
        // ℓ = B·(ℓ₁ + 500·ℓ₂) by construction.
        assert_eq!(c.round2_len, 500 * c.ell2);
    }

    #[test]
    fn paper_constants_n2_m1() {
        let c = Config::paper(2, 1, 0.5).unwrap();
        assert_eq!(c.block_count, 270);
        assert_eq!(c.round1_len, 800);
        // max{m², ε⁻²} = max{1, 4} = 4.
        assert_eq!(c.ell2, 160_000);
        assert_eq!(c.per_vertex_samples(), 270 * (800 + 500 * 160_000));
    }

    #[test]
    fn paper_rejects_bad_eps() {
        assert_eq!(Config::paper(3, 3, 1.0).unwrap_err(), ConfigError::BadEpsilon(1.0));
        assert!(Config::paper(3, 3, 0.0).is_err());
    }
}
