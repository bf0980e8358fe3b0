//! The record of a pipeline run.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::linearity::LinearityStep;
use crate::bohr::StructuredSet;
use crate::linalg::{AffineEndo, Ambient, GVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMode {
    /// Uniform constants in terms of `c` and `k`.
    WorstCase,
    /// Spectrum threshold from the measured `min C_x`.
    Adaptive,
}

impl ThresholdMode {
    pub fn name(&self) -> &'static str {
        match self {
            ThresholdMode::WorstCase => "worst-case",
            ThresholdMode::Adaptive => "adaptive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

/// One verdict: `achieved` compared with `bound`. Containments are
/// recorded as a count of violating pairs at most 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub stage: String,
    pub name: String,
    pub achieved: f64,
    pub relation: Relation,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub ambient: Ambient,
    pub seed: u64,
    pub mode: ThresholdMode,
    pub budget: usize,
    pub k_cap: usize,
    /// `|A|`.
    pub input_size: u64,
    /// `c = |A| / N²`.
    pub density: f64,
    /// `E f`.
    pub mean_f: f64,
    /// `|Y|`.
    pub y_size: usize,
    /// Columns of `f` with zero mass.
    pub empty_columns: usize,
    pub xi: f64,
    pub linearity_certified: bool,
    pub linearity_failure: Option<String>,
    pub linearity_steps: Vec<LinearityStep>,
    /// Quadruple counts above are absolute, out of `|dom σ|³`.
    pub quadruple_normalization: String,
    pub k: usize,
    pub family: Vec<AffineEndo>,
    /// `|Y′|`.
    pub y_prime_size: usize,
    /// `|C|`, `C = (G × Y′) ∩ B`.
    pub c_size: u64,
    /// `|D|`, `D` the row-wise `C + C − C − C`.
    pub d_size: u64,
    pub codim_v0: usize,
    pub large_spectrum_size: usize,
    pub codim_v1: usize,
    pub codim_v2: usize,
    pub codim_v: usize,
    /// `min_{x ∈ V} C_x`.
    pub min_row_density: f64,
    pub t_threshold: f64,
    /// `|T|`.
    pub t_size: usize,
    pub structured: StructuredSet,
    pub structured_size: u64,
    /// Members of the structured set outside `A⁽³⁾`, if any.
    pub witnesses: Vec<(GVector, GVector)>,
    pub checks: Vec<Check>,
    pub failed_stages: Vec<String>,
    pub pass: bool,
}

impl Certificate {
    /// Key-value text, one block per stage.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let fam = |f: &[AffineEndo]| {
            f.iter()
                .map(|a| format!("{:?}+{}", a.linear(), a.translation()))
                .collect::<Vec<_>>()
                .join("; ")
        };
        let blocks: Vec<(&str, Vec<(&str, String)>)> = vec![
            (
                "input",
                vec![
                    ("ambient", self.ambient.to_string()),
                    ("seed", self.seed.to_string()),
                    ("mode", self.mode.name().to_string()),
                    ("budget", self.budget.to_string()),
                    ("k_cap", self.k_cap.to_string()),
                    ("size", self.input_size.to_string()),
                    ("density", self.density.to_string()),
                ],
            ),
            (
                "first-convolution",
                vec![("mean_f", self.mean_f.to_string())],
            ),
            (
                "columns",
                vec![
                    ("y_size", self.y_size.to_string()),
                    ("empty_columns", self.empty_columns.to_string()),
                ],
            ),
            (
                "linearity",
                vec![
                    ("xi", self.xi.to_string()),
                    ("certified", self.linearity_certified.to_string()),
                    ("failure", self.linearity_failure.clone().unwrap_or_else(|| "none".into())),
                    ("k", self.k.to_string()),
                    ("family", fam(&self.family)),
                    (
                        "quadruples",
                        self.linearity_steps
                            .iter()
                            .map(|s| format!("{}/{}^3", s.quadruples, s.active))
                            .collect::<Vec<_>>()
                            .join(" "),
                    ),
                    ("y_prime_size", self.y_prime_size.to_string()),
                ],
            ),
            (
                "variety",
                vec![
                    ("c_size", self.c_size.to_string()),
                    ("d_size", self.d_size.to_string()),
                ],
            ),
            (
                "dense-columns",
                vec![
                    ("codim_v0", self.codim_v0.to_string()),
                    ("large_spectrum_size", self.large_spectrum_size.to_string()),
                    ("codim_v1", self.codim_v1.to_string()),
                    ("codim_v2", self.codim_v2.to_string()),
                    ("codim_v", self.codim_v.to_string()),
                    ("min_row_density", self.min_row_density.to_string()),
                ],
            ),
            (
                "spectrum",
                vec![
                    ("t_threshold", self.t_threshold.to_string()),
                    ("t_size", self.t_size.to_string()),
                ],
            ),
            (
                "structured",
                vec![
                    ("codim_u", self.structured.u.codim().to_string()),
                    ("codim_v", self.structured.v.codim().to_string()),
                    ("variety_codim", self.structured.variety.codim().to_string()),
                    ("size", self.structured_size.to_string()),
                    (
                        "witnesses",
                        self.witnesses
                            .iter()
                            .map(|(x, y)| format!("{x}{y}"))
                            .collect::<Vec<_>>()
                            .join(" "),
                    ),
                ],
            ),
        ];
        for (name, entries) in blocks {
            let _ = writeln!(out, "[{name}]");
            for (k, v) in entries {
                let _ = writeln!(out, "{k} = {v}");
            }
            for c in self.checks.iter().filter(|c| c.stage == name) {
                let rel = match c.relation {
                    Relation::AtMost => "<=",
                    Relation::AtLeast => ">=",
                };
                let _ = writeln!(
                    out,
                    "check {} = {} {} {} : {}",
                    c.name,
                    c.achieved,
                    rel,
                    c.bound,
                    if c.holds { "ok" } else { "FAIL" }
                );
            }
            out.push('\n');
        }
        let _ = writeln!(out, "[verdict]");
        let _ = writeln!(out, "failed_stages = {}", self.failed_stages.join(" "));
        let _ = writeln!(out, "pass = {}", self.pass);
        out
    }
}
