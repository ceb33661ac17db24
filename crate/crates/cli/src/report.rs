//! The machine-readable run report.
//!
//! Reports are TOML with a fixed section order; identical configurations and
//! seeds produce byte-identical reports except for the `[timings]` table,
//! which is always the last section so that consumers can compare the
//! remainder verbatim.

use serde::Serialize;

use loopaction::bounds::{AprioriBound, CompactnessReport, SoundnessReport};
use loopaction::dynamics::{HomotopyStage, MorseFiltration};
use loopaction::selfcheck::SelfCheckReport;
use loopaction::topology::{CupLengthCertificate, SubadditivityOutcome, SuspensionTable};
use loopaction::{FourierLoop, SolverConfig};

#[derive(Clone, Debug, Serialize)]
pub struct Versions {
    pub core: String,
    pub cli: String,
}

impl Default for Versions {
    fn default() -> Self {
        Self {
            core: loopaction_version(),
            cli: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

fn loopaction_version() -> String {
    // the workspace pins both crates to one version
    env!("CARGO_PKG_VERSION").to_string()
}

/// Pass/fail summary; `pass` drives the process exit code.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    /// The lower bound 2n+1.
    pub required: usize,
    pub found: usize,
    pub arnold_pass: bool,
    pub residual_pass: bool,
    pub ode_pass: bool,
    pub apriori_pass: bool,
    pub filtration_pass: bool,
    pub pass: bool,
}

impl Verdict {
    pub fn trivially(pass: bool) -> Self {
        Self {
            required: 0,
            found: 0,
            arnold_pass: pass,
            residual_pass: pass,
            ode_pass: pass,
            apriori_pass: pass,
            filtration_pass: pass,
            pass,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    pub action: f64,
    pub residual: f64,
    pub degenerate: bool,
    pub kernel_dim: usize,
    pub provenance: String,
    /// (negative, zero, positive) eigenvalue counts of the Hessian.
    pub signature: [usize; 3],
    pub x0: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ode_pass: Option<bool>,
    /// Full coefficient record: the mean block followed by the (+k, −k)
    /// blocks for k = 1..N, each of width 2n.
    pub fourier: FourierLoop,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitsSection {
    pub count: usize,
    pub required: usize,
    pub seeds_tried: usize,
    pub seeds_failed: usize,
    pub any_degenerate: bool,
    pub max_norm: f64,
    pub critical_values: Vec<f64>,
    pub warnings: Vec<String>,
    pub orbit: Vec<OrbitRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CuplengthSection {
    pub expected: usize,
    pub computed: usize,
    pub matches: bool,
    pub certificate: CupLengthCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixture_certificate: Option<CupLengthCertificate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomotopyReport {
    pub lambda_grid: Vec<f64>,
    pub counts: Vec<usize>,
    pub max_norms: Vec<f64>,
    pub stage: Vec<HomotopyStage>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubadditivityReport {
    pub all_pass: bool,
    pub outcome: Vec<SubadditivityOutcome>,
}

/// Flow diagnostic attached to `solve` runs; the raw samples are kept for
/// CSV export but stay out of the TOML body.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectorySection {
    pub steps: usize,
    pub rejected_steps: usize,
    pub escaped: bool,
    pub start_action: f64,
    pub final_action: f64,
    pub max_action_increase: f64,
    pub monotone: bool,
    #[serde(skip)]
    pub samples: Vec<(f64, f64, f64)>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Timings {
    pub total_ms: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub phases: Vec<(String, u64)>,
}

/// The complete report; `[timings]` is serialized last by construction.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub versions: Versions,
    pub config: SolverConfig,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbits: Option<OrbitsSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filtration: Option<MorseFiltration>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub apriori: Option<AprioriBound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub soundness: Option<SoundnessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cuplength: Option<CuplengthSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suspension: Option<SuspensionTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subadditivity: Option<SubadditivityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub homotopy: Option<HomotopyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compactness: Option<CompactnessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selfcheck: Option<SelfCheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<TrajectorySection>,
    pub timings: Timings,
}

impl RunReport {
    pub fn new(command: &str, config: SolverConfig) -> Self {
        Self {
            schema_version: 1,
            command: command.to_string(),
            versions: Versions::default(),
            config,
            verdict: Verdict::trivially(false),
            orbits: None,
            filtration: None,
            apriori: None,
            soundness: None,
            cuplength: None,
            suspension: None,
            subadditivity: None,
            homotopy: None,
            compactness: None,
            selfcheck: None,
            trajectory: None,
            timings: Timings::default(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("report sections order values before tables")
    }

    /// 0 when the verdict passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.verdict.pass {
            0
        } else {
            1
        }
    }
}

/// Removes the `[timings]` table (always the final section) for determinism
/// comparisons.
pub fn strip_timings(report_text: &str) -> &str {
    match report_text.find("\n[timings]") {
        Some(idx) => &report_text[..idx],
        None => report_text,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stripping_timings_keeps_the_body() {
        let text = "a = 1\n\n[section]\nb = 2\n\n[timings]\ntotal_ms = 9\n";
        assert_eq!(strip_timings(text), "a = 1\n\n[section]\nb = 2\n");
        assert_eq!(strip_timings("a = 1\n"), "a = 1\n");
    }

    #[test]
    fn empty_report_serializes() {
        let cfg = SolverConfig::for_catalog("zero", 1, 4);
        let report = RunReport::new("solve", cfg);
        let text = report.to_toml();
        assert!(text.contains("schema_version = 1"));
        assert!(text.contains("[timings]"));
    }
}
