//! Scenario configuration, read from TOML text with one table per module.
//!
//! Every key is optional; missing keys take the defaults below.
//!
//! ```toml
//! seed = 7
//! format = "csv"
//!
//! [barrier]
//! a_values = [100.0, 200.0, 400.0]
//!
//! [anderson_chow]
//! samples = 100000
//! ```

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid value for {key}: {reason}")]
    Invalid { key: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Soliton,
    Barrier,
    Evolve,
    NeckSpectral,
    Lichnerowicz,
    AndersonChow,
    VerifyAll,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Soliton => "soliton",
            Scenario::Barrier => "barrier",
            Scenario::Evolve => "evolve",
            Scenario::NeckSpectral => "neck-spectral",
            Scenario::Lichnerowicz => "lichnerowicz",
            Scenario::AndersonChow => "anderson-chow",
            Scenario::VerifyAll => "verify-all",
        }
    }

    /// Wall-clock budget in seconds for the release build.
    pub fn budget(&self) -> f64 {
        match self {
            Scenario::Soliton => 10.0,
            Scenario::Barrier => 60.0,
            Scenario::Evolve => 120.0,
            Scenario::NeckSpectral => 60.0,
            Scenario::Lichnerowicz => 300.0,
            Scenario::AndersonChow => 120.0,
            Scenario::VerifyAll => 900.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolitonSection {
    pub amplitude: f64,
    pub fit_window: [f64; 2],
    /// Relative tolerance on the tail coefficients (1, 2).
    pub tail_tol: f64,
    pub residual_tol: f64,
}

impl Default for SolitonSection {
    fn default() -> Self {
        SolitonSection { amplitude: 1.0, fit_window: [10.0, 100.0], tail_tol: 0.02, residual_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BarrierSection {
    pub a_values: Vec<f64>,
    /// Scales at which the whole barrier is a strict supersolution.
    pub large_a: Vec<f64>,
    pub samples: usize,
    pub max_n: u32,
    pub zeta_s_min: f64,
    pub zeta_log_nodes: usize,
    pub zeta_right_nodes: usize,
    pub anchor_tol: f64,
    pub lead_tol: f64,
    pub junction_tol: f64,
    pub slope_window: [f64; 2],
    pub positivity_tol: f64,
}

impl Default for BarrierSection {
    fn default() -> Self {
        BarrierSection {
            a_values: vec![100.0, 200.0, 400.0],
            large_a: vec![1e7, 2e7, 4e7],
            samples: 10_000,
            max_n: 50,
            zeta_s_min: 1e-9,
            zeta_log_nodes: 10_000,
            zeta_right_nodes: 500,
            anchor_tol: 1e-6,
            lead_tol: 0.01,
            junction_tol: 1e-8,
            slope_window: [-1.6, -1.4],
            positivity_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveSection {
    pub comparison_a: f64,
    pub gap_tol: f64,
    pub sphere_dt: Vec<f64>,
    pub order_min: f64,
    pub static_tol: f64,
    pub identity_tol: f64,
}

impl Default for EvolveSection {
    fn default() -> Self {
        EvolveSection { comparison_a: 1e7, gap_tol: 1e-6, sphere_dt: vec![0.01, 0.005, 0.0025], order_min: 1.8, static_tol: 1e-8, identity_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NeckSpectralSection {
    pub order: usize,
    pub n_max: usize,
    pub eigen_n: usize,
    pub eigen_tol: f64,
    pub algebra_tol: f64,
    /// Recursion constant for the synthetic classifier suites.
    pub c: f64,
}

impl Default for NeckSpectralSection {
    fn default() -> Self {
        NeckSpectralSection { order: 64, n_max: 32, eigen_n: 10, eigen_tol: 1e-6, algebra_tol: 1e-10, c: 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LichnerowiczSection {
    pub lengths: Vec<f64>,
    pub l_max: usize,
    pub l_data: usize,
    pub exponent_tol: f64,
    pub total_max: f64,
    pub order_min: f64,
    pub solver_tol: f64,
    pub psi_tol: f64,
    pub neutral_tol: f64,
}

impl Default for LichnerowiczSection {
    fn default() -> Self {
        LichnerowiczSection {
            lengths: vec![64.0, 128.0, 256.0],
            l_max: 2,
            l_data: 2,
            exponent_tol: 0.2,
            total_max: -0.4,
            order_min: 1.8,
            solver_tol: 1e-8,
            psi_tol: 1e-6,
            neutral_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AndersonChowSection {
    pub simplex_n: usize,
    pub rho_samples: usize,
    pub samples: usize,
    pub candidates: Vec<f64>,
    pub identity_tol: f64,
    pub det_tol: f64,
    pub c_max: f64,
}

impl Default for AndersonChowSection {
    fn default() -> Self {
        AndersonChowSection { simplex_n: 400, rho_samples: 40, samples: 1_000_000, candidates: vec![10.0, 20.0, 50.0, 100.0], identity_tol: 1e-12, det_tol: 1e-10, c_max: 100.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub format: Format,
    pub soliton: SolitonSection,
    pub barrier: BarrierSection,
    pub evolve: EvolveSection,
    pub neck_spectral: NeckSpectralSection,
    pub lichnerowicz: LichnerowiczSection,
    pub anderson_chow: AndersonChowSection,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seed: 7,
            format: Format::Csv,
            soliton: SolitonSection::default(),
            barrier: BarrierSection::default(),
            evolve: EvolveSection::default(),
            neck_spectral: NeckSpectralSection::default(),
            lichnerowicz: LichnerowiczSection::default(),
            anderson_chow: AndersonChowSection::default(),
        }
    }
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.into(), reason: reason.into() }
}

fn positive(key: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(key, format!("{v} is not a positive number")))
    }
}

fn positive_list(key: &str, v: &[f64], min_len: usize) -> Result<(), ConfigError> {
    if v.len() < min_len {
        return Err(invalid(key, format!("needs at least {min_len} entries")));
    }
    v.iter().try_for_each(|&x| positive(key, x))
}

fn at_least(key: &str, v: usize, min: usize) -> Result<(), ConfigError> {
    if v >= min {
        Ok(())
    } else {
        Err(invalid(key, format!("{v} is below the minimum {min}")))
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.soliton;
        positive("soliton.amplitude", s.amplitude)?;
        positive("soliton.tail_tol", s.tail_tol)?;
        positive("soliton.residual_tol", s.residual_tol)?;
        if !(s.fit_window[0] > 0.0 && s.fit_window[1] > s.fit_window[0]) {
            return Err(invalid("soliton.fit_window", "needs 0 < lo < hi"));
        }
        let b = &self.barrier;
        positive_list("barrier.a_values", &b.a_values, 1)?;
        positive_list("barrier.large_a", &b.large_a, 1)?;
        at_least("barrier.samples", b.samples, 2)?;
        at_least("barrier.max_n", b.max_n as usize, 1)?;
        at_least("barrier.zeta_log_nodes", b.zeta_log_nodes, 10)?;
        at_least("barrier.zeta_right_nodes", b.zeta_right_nodes, 10)?;
        for (k, v) in [("barrier.zeta_s_min", b.zeta_s_min), ("barrier.anchor_tol", b.anchor_tol), ("barrier.lead_tol", b.lead_tol), ("barrier.junction_tol", b.junction_tol), ("barrier.positivity_tol", b.positivity_tol)] {
            positive(k, v)?;
        }
        if b.slope_window[0] >= b.slope_window[1] {
            return Err(invalid("barrier.slope_window", "needs lo < hi"));
        }
        let e = &self.evolve;
        positive("evolve.comparison_a", e.comparison_a)?;
        positive_list("evolve.sphere_dt", &e.sphere_dt, 2)?;
        for (k, v) in [("evolve.gap_tol", e.gap_tol), ("evolve.order_min", e.order_min), ("evolve.static_tol", e.static_tol), ("evolve.identity_tol", e.identity_tol)] {
            positive(k, v)?;
        }
        let h = &self.neck_spectral;
        at_least("neck_spectral.order", h.order, 8)?;
        at_least("neck_spectral.n_max", h.n_max, 3)?;
        if h.eigen_n > h.n_max {
            return Err(invalid("neck_spectral.eigen_n", "exceeds n_max"));
        }
        for (k, v) in [("neck_spectral.eigen_tol", h.eigen_tol), ("neck_spectral.algebra_tol", h.algebra_tol), ("neck_spectral.c", h.c)] {
            positive(k, v)?;
        }
        let l = &self.lichnerowicz;
        positive_list("lichnerowicz.lengths", &l.lengths, 2)?;
        at_least("lichnerowicz.l_max", l.l_max, 2)?;
        at_least("lichnerowicz.l_data", l.l_data, 1)?;
        if l.l_data > l.l_max {
            return Err(invalid("lichnerowicz.l_data", "exceeds l_max"));
        }
        for (k, v) in [("lichnerowicz.exponent_tol", l.exponent_tol), ("lichnerowicz.order_min", l.order_min), ("lichnerowicz.solver_tol", l.solver_tol), ("lichnerowicz.psi_tol", l.psi_tol), ("lichnerowicz.neutral_tol", l.neutral_tol)] {
            positive(k, v)?;
        }
        let a = &self.anderson_chow;
        at_least("anderson_chow.simplex_n", a.simplex_n, 3)?;
        at_least("anderson_chow.rho_samples", a.rho_samples, 2)?;
        at_least("anderson_chow.samples", a.samples, 1)?;
        if a.candidates.is_empty() || a.candidates.iter().any(|&c| !(c > 1.0)) {
            return Err(invalid("anderson_chow.candidates", "needs at least one value above 1"));
        }
        for (k, v) in [("anderson_chow.identity_tol", a.identity_tol), ("anderson_chow.det_tol", a.det_tol), ("anderson_chow.c_max", a.c_max)] {
            positive(k, v)?;
        }
        Ok(())
    }
}
