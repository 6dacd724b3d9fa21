use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::criteria::{EvalConfig, LatticeParams};
use crate::error::{Error, Result};

/// Full experiment configuration; every report embeds a copy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub eval: EvalConfig,
    /// Lattice for synthesis, round trips and multipliers.
    pub atomic_lattice: LatticeParams,
    /// Lattice for the synthesized members of the standard corpus.
    pub corpus_lattice: LatticeParams,
    /// Coarse lattice whose nodes join the `T_p^inf` box grid.
    pub box_lattice: LatticeParams,
    pub seed: u64,
    /// Random draws in the atomic experiments.
    pub draws: usize,
    /// Recompute coupling constants on a refined mesh.
    pub refinement_check: bool,
    /// Boundary samples for `T_p^q` norms in the aperture comparison.
    pub aperture_eta_samples: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            eval: EvalConfig::default(),
            atomic_lattice: LatticeParams { r: 0.5, kappa: 0.2, cap: 0.9 },
            corpus_lattice: LatticeParams { r: 1.0, kappa: 0.4, cap: 0.9 },
            box_lattice: LatticeParams { r: 1.0, kappa: 0.4, cap: 0.9 },
            seed: 20_240_917,
            draws: 10,
            refinement_check: true,
            aperture_eta_samples: 64,
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Config> {
        serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("config at line {}, column {}: {e}", e.line(), e.column())))
    }

    pub fn load(path: &Path) -> Result<Config> {
        Config::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.eval.settings.quad.validate()?;
        crate::geometry::Aperture::new(self.eval.settings.aperture.value())?;
        if let Some(t) = self.eval.t {
            if !(t > 0.0) {
                return Err(crate::error::invalid(format!("t must be positive, got {t}")));
            }
        }
        if self.eval.degree == 0 {
            return Err(crate::error::invalid("degree must be positive"));
        }
        Ok(())
    }

    /// The same configuration on the next finer quadrature mesh.
    pub fn refined(&self) -> Config {
        let mut c = self.clone();
        c.eval.settings.quad = c.eval.settings.quad.refined();
        c
    }
}
