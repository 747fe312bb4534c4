//! Run configuration: a flat JSON object whose keys mirror the long flags.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use fracws::spectrum::{nuclear_params, NUCLEON_MASS};
use fracws::{FractionalOrder, PotentialParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Fractional order α in (0, 1]
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Second fractional parameter in (0, 1]
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_frac: Option<f64>,
    /// Depth V0 in MeV (explicit parameter group)
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    /// Deformation q (explicit parameter group)
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Surface term strength in MeV
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Range parameter β1 in fm⁻¹ (explicit parameter group)
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta1: Option<f64>,
    /// Reduced mass in MeV/c²
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Mass number A (nuclear parameter group)
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_mass: Option<f64>,
    /// Radius parameter r0 in fm (nuclear parameter group)
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    /// Diffuseness a in fm (nuclear parameter group)
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_diff: Option<f64>,
    /// Level index
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Highest level index
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Upper end of the radial range in fm
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    /// Number of sample points
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_max: Option<f64>,
    /// Number of α values in the scan, endpoints included
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Output file; standard output when absent
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Sample the wavefunction in r (fm) instead of the NU coordinate x
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_space: Option<bool>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($field:ident),+ $(,)?) => {
        RunConfig { $($field: $top.$field.clone().or($base.$field.clone())),+ }
    };
}

impl RunConfig {
    /// Fields set in `top` win over fields set in `self`.
    pub fn overlay(&self, top: &RunConfig) -> RunConfig {
        overlay!(
            self, top, alpha, beta_frac, v0, q, c, beta1, mu, a_mass, r0, a_diff, n, n_max, r_max, points,
            alpha_min, alpha_max, steps, format, out, r_space,
        )
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    #[cfg(test)]
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn order(&self) -> Result<FractionalOrder, CliError> {
        FractionalOrder::new(self.alpha.unwrap_or(1.0), self.beta_frac.unwrap_or(1.0)).map_err(CliError::usage)
    }

    pub fn model(&self) -> Result<Model, CliError> {
        let explicit = [self.v0, self.q, self.beta1];
        let nuclear = [self.a_mass, self.r0, self.a_diff];
        let any_explicit = explicit.iter().any(Option::is_some);
        let any_nuclear = nuclear.iter().any(Option::is_some);
        let c = self.c.unwrap_or(REFERENCE.c);
        let mu = self.mu.unwrap_or(NUCLEON_MASS);
        if any_explicit && any_nuclear {
            return Err(CliError::Usage(
                "give either --v0/--q/--beta1 or --a-mass/--r0/--a-diff, not both".into(),
            ));
        }
        if any_explicit {
            let [Some(v0), Some(q), Some(beta1)] = explicit else {
                return Err(CliError::Usage("--v0, --q and --beta1 must be given together".into()));
            };
            let pp = PotentialParams::new(v0, q, c, beta1, mu).map_err(CliError::usage)?;
            return Ok(Model { pp, nuclear: None });
        }
        let a_mass = self.a_mass.unwrap_or(REFERENCE.a_mass);
        let r0 = self.r0.unwrap_or(REFERENCE.r0);
        let a_diff = self.a_diff.unwrap_or(REFERENCE.a_diff);
        if !(a_mass >= 1.0) || !(r0 > 0.0) || !(a_diff > 0.0) {
            return Err(CliError::Usage(format!(
                "nuclear parameters need A >= 1, r0 > 0, a > 0 (got {a_mass}, {r0}, {a_diff})"
            )));
        }
        let pp = nuclear_params(a_mass, r0, a_diff, c, mu).map_err(CliError::usage)?;
        Ok(Model {
            pp,
            nuclear: Some((a_mass, r0, a_diff)),
        })
    }
}

pub struct Reference {
    pub a_mass: f64,
    pub r0: f64,
    pub a_diff: f64,
    pub c: f64,
}

/// A = 56, r0 = 1.285 fm, a = 0.65 fm, c = 10 MeV.
pub const REFERENCE: Reference = Reference {
    a_mass: 56.0,
    r0: 1.285,
    a_diff: 0.65,
    c: 10.0,
};

pub struct Model {
    pub pp: PotentialParams,
    /// `(A, r0, a)` when built from the nuclear group.
    pub nuclear: Option<(f64, f64, f64)>,
}
