//! Run manifests: a JSON document that pins everything a run needs, so that
//! re-running the echoed manifest reproduces the outputs byte for byte.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use plurisolve_core::envelope::EnvelopeConfig;
use plurisolve_core::geometry::Polynomial;
use plurisolve_core::unbounded::{BarrierKind, BarrierParams};
use plurisolve_core::DomainSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SolveBounded,
    SolveUnbounded,
    ContinuousSolution,
    CertifyContinuity,
    CheckLupacciolu,
    Sandwich,
    Properties,
    Qsolve,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SolveBounded => "solve-bounded",
            Command::SolveUnbounded => "solve-unbounded",
            Command::ContinuousSolution => "continuous-solution",
            Command::CertifyContinuity => "certify-continuity",
            Command::CheckLupacciolu => "check-lupacciolu",
            Command::Sandwich => "sandwich",
            Command::Properties => "properties",
            Command::Qsolve => "qsolve",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r#box: Option<Vec<[f64; 2]>>,
    pub spacing: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSpec {
    #[serde(default = "default_nu_max")]
    pub nu_max: usize,
    pub slab_step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recession: Option<Vec<f64>>,
    #[serde(default)]
    pub collar: f64,
}

fn default_nu_max() -> usize {
    plurisolve_core::defaults::NU_MAX
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    /// Either explicit sample abscissas or a uniform range.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xs: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(default = "default_profile_count")]
    pub count: usize,
    /// Growth law over the frame coordinate, written in `x1`.
    pub g_expr: String,
}

fn default_profile_count() -> usize {
    64
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierSpec {
    pub kind: BarrierKind,
    pub eps: f64,
    pub z0: [f64; 2],
    #[serde(default)]
    pub params: BarrierParams,
    pub profile: ProfileSpec,
    /// Frame-coordinate samples witnessing the containment hypothesis.
    pub region_samples: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertiesSpec {
    pub h1_expr: String,
    pub h2_expr: String,
    pub c: f64,
    #[serde(default = "default_norm_tol")]
    pub norm_tol: f64,
}

fn default_norm_tol() -> f64 {
    1e-2
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub command: Command,
    pub domain: DomainSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfg: Option<EnvelopeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patch_radius: Option<f64>,
    /// Radius of an origin-centered truncation ball for unbounded domains.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncate_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncate_center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barrier: Option<BarrierSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<Polynomial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub properties: Option<PropertiesSpec>,
    /// Worker threads; 0 or absent uses the process default. All algorithms
    /// are deterministic, so the count never changes results.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub output_dir: PathBuf,
}

impl RunManifest {
    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serialization");
        s.push('\n');
        s
    }
}
