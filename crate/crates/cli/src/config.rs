use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use umbrella::foliation::{DeformationJet, JetRecord};
use umbrella::numerics::IntegratorConfig;

/// Run configuration: the jet fields (`A`, `B`, `C`, `D`, `higher`, `mode`)
/// at top level, or a `jet_file` pointing at them, plus run settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub jet: Option<JetRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jet_file: Option<PathBuf>,
    pub order: i32,
    pub epsilon: f64,
    pub integrator: IntegratorSettings,
    pub seed: u64,
    pub out: PathBuf,
    pub claim_samples: usize,
    pub separatrix: SeparatrixSettings,
    pub transversality_samples: usize,
    /// Orbit seeds for `orbits`; empty means a ring at radius ε/2.
    pub orbit_seeds: Vec<[f64; 2]>,
    /// Treat an UNRESOLVED portrait as a verification failure.
    pub fail_on_unresolved: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorSettings {
    pub rtol: f64,
    pub atol: f64,
    /// Core radius as a fraction of ε.
    pub core_ratio: f64,
    pub max_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeparatrixSettings {
    pub t0: f64,
    pub tolerance: f64,
    pub offset: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            jet: None,
            jet_file: None,
            order: 7,
            epsilon: 0.05,
            integrator: IntegratorSettings::default(),
            seed: 0,
            out: PathBuf::from("out"),
            claim_samples: 10_000,
            separatrix: SeparatrixSettings::default(),
            transversality_samples: 1000,
            orbit_seeds: Vec::new(),
            fail_on_unresolved: false,
        }
    }
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings { rtol: 1e-9, atol: 1e-16, core_ratio: 1e-4, max_steps: 200_000 }
    }
}

impl Default for SeparatrixSettings {
    fn default() -> Self {
        SeparatrixSettings { t0: 0.02, tolerance: 1e-4, offset: 1e-3 }
    }
}

const JET_KEYS: [&str; 6] = ["A", "B", "C", "D", "higher", "mode"];

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: RunConfig = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        // A flattened Option swallows a malformed jet; parse it on its own
        // to surface the real error.
        if cfg.jet.is_none() {
            let raw: serde_json::Value = serde_json::from_str(&text)?;
            if JET_KEYS.iter().any(|k| raw.get(k).is_some()) {
                serde_json::from_value::<JetRecord>(raw)
                    .with_context(|| format!("parsing the jet in {}", path.display()))?;
            }
        }
        // Relative jet paths are taken from the config's directory.
        if let (Some(p), Some(dir)) = (&cfg.jet_file, path.parent()) {
            if p.is_relative() {
                cfg.jet_file = Some(dir.join(p));
            }
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 5 {
            bail!("order must be at least 5 (got {})", self.order);
        }
        let positive = [
            ("epsilon", self.epsilon),
            ("integrator.rtol", self.integrator.rtol),
            ("integrator.atol", self.integrator.atol),
            ("integrator.core_ratio", self.integrator.core_ratio),
            ("separatrix.t0", self.separatrix.t0),
            ("separatrix.tolerance", self.separatrix.tolerance),
            ("separatrix.offset", self.separatrix.offset),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name} must be positive (got {v})");
            }
        }
        if self.integrator.max_steps == 0 {
            bail!("integrator.max_steps must be positive");
        }
        if self.jet.is_some() && self.jet_file.is_some() {
            bail!("give the jet inline or as jet_file, not both");
        }
        Ok(())
    }

    /// The configured jet; the undeformed umbrella when none is given.
    pub fn jet(&self) -> Result<DeformationJet> {
        if let Some(rec) = &self.jet {
            return Ok(rec.to_jet()?);
        }
        if let Some(p) = &self.jet_file {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            return Ok(DeformationJet::from_json(&text)?);
        }
        Ok(DeformationJet::identity())
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            epsilon: self.epsilon,
            core: self.integrator.core_ratio * self.epsilon,
            rtol: self.integrator.rtol,
            atol: self.integrator.atol,
            max_steps: self.integrator.max_steps,
            tau_max: None,
        }
    }
}
