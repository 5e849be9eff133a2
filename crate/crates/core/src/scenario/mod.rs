//! Configuration-driven runs: sample, extract and track a catalog solution,
//! run named verification checks, and write polylines, events, a summary
//! and optional plot data.

mod checks;
mod presets;
mod run;
mod svg;

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::consts::PhysicalConstants;
use crate::error::{Error, Result};
use crate::tracker::{EventKind, Grid3};
use crate::SolutionSpec;

pub use checks::{CheckResult, Tolerances};
pub use presets::{list_presets, preset, PresetInfo};
pub use run::{run, RunReport, Summary};
pub use svg::render_frame_svg;

/// Seed for randomized sample points when none is given.
pub const DEFAULT_SEED: u64 = 20_021;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Governing-equation residual at random spacetime points.
    Residual,
    /// Quantized circulation around extracted lines.
    Circulation,
    /// Extracted loci against closed-form curves.
    Locus,
    /// Tracked events against expected kinds and times.
    Events,
    /// Split-step evolution against the closed form.
    Oracle,
    /// Line-velocity law and node speeds.
    NodeSpeed,
    /// Numeric k-differentiation of the plane-wave carrier.
    Generation,
}

impl CheckKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Residual => "residual",
            Self::Circulation => "circulation",
            Self::Locus => "locus",
            Self::Events => "events",
            Self::Oracle => "oracle",
            Self::NodeSpeed => "node_speed",
            Self::Generation => "generation",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// Polylines as JSON Lines.
    #[default]
    Text,
    /// JSON Lines plus one CSV row per point.
    Table,
    /// JSON Lines plus one SVG snapshot per frame.
    Svg,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Self::Text),
            "table" => Ok(Self::Table),
            "svg" => Ok(Self::Svg),
            _ => Err(Error::Config(format!("unknown format `{s}` (text, table, svg)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("qvortex-out"), format: OutputFormat::Text }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedEvent {
    pub kind: EventKind,
    pub t: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum SpeedTarget {
    /// Every node moves at `value` (relative tolerance `rel_tol`).
    Exact { value: f64, rel_tol: f64 },
    /// Mean tracked node speed lies in `[min, max]`.
    Range { min: f64, max: f64 },
}

/// Check parameters beyond the pinned tolerances.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    /// Required for the `events` check; an empty list asserts no events.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events: Option<Vec<ExpectedEvent>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_speed: Option<SpeedTarget>,
    /// Gaussian window width for oracle runs of plane-wave-carried families.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_points: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub time_range: [f64; 2],
    pub n_frames: usize,
    pub checks: Vec<CheckKind>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub spec: SolutionSpec,
    #[serde(default)]
    pub consts: PhysicalConstants,
    pub grid: Grid3,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub expect: Expectations,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// One validation finding, tied to a config field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn diag(field: impl Into<String>, message: impl Into<String>) -> Diagnostic {
    Diagnostic { field: field.into(), message: message.into() }
}

impl ScenarioConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn has(&self, check: CheckKind) -> bool {
        self.checks.contains(&check)
    }

    /// Oracle runs use a periodic box, whose extent is `dims · spacing`.
    fn periodic(&self) -> bool {
        self.has(CheckKind::Oracle)
    }

    /// Same box sampled with `n` nodes per axis.
    pub fn with_resolution(&self, n: usize) -> Self {
        let mut c = self.clone();
        let g = &mut c.grid;
        for a in 0..3 {
            let span = if self.periodic() {
                g.dims[a] as f64 * g.spacing[a]
            } else {
                (g.dims[a] - 1).max(1) as f64 * g.spacing[a]
            };
            g.dims[a] = n;
            g.spacing[a] = if self.periodic() { span / n as f64 } else { span / (n.max(2) - 1) as f64 };
        }
        c
    }

    /// Every violation found, not only the first.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.name.trim().is_empty() {
            out.push(diag("name", "must not be empty"));
        }
        for (f, m) in self.spec.violations() {
            out.push(diag(format!("spec.{f}"), m));
        }
        if let Err(e) = self.consts.validate() {
            out.push(diag("consts", e.to_string()));
        }
        if let Err(e) = self.grid.validate() {
            out.push(diag("grid", e.to_string()));
        }
        let [t0, t1] = self.time_range;
        if !(t0.is_finite() && t1.is_finite()) {
            out.push(diag("time_range", "bounds must be finite"));
        } else if t0 >= t1 {
            out.push(diag("time_range", format!("t0 = {t0} must be below t1 = {t1}")));
        }
        if self.n_frames == 0 {
            out.push(diag("n_frames", "must be at least 1"));
        }
        if self.checks.is_empty() {
            out.push(diag("checks", "no checks requested"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.checks {
            if !seen.insert(*c) {
                out.push(diag("checks", format!("`{}` listed twice", c.name())));
            }
        }
        self.validate_checks(&mut out);
        out
    }

    fn validate_checks(&self, out: &mut Vec<Diagnostic>) {
        let s = &self.spec;
        let e = &self.expect;
        if self.has(CheckKind::Events) {
            if self.n_frames < 3 {
                out.push(diag("n_frames", "the events check needs at least 3 frames"));
            }
            match &e.events {
                None => out.push(diag("expect.events", "required by the events check")),
                Some(list) => {
                    for (i, ev) in list.iter().enumerate() {
                        if !ev.t.is_finite() {
                            out.push(diag(format!("expect.events[{i}].t"), "must be finite"));
                        }
                    }
                }
            }
        }
        if self.has(CheckKind::Oracle) {
            if s.is_magnetic() || s.is_relativistic() {
                out.push(diag("checks", format!("oracle is unavailable for {}", s.family())));
            }
            if s.is_carrier() && checks::needs_window(s) {
                out.push(diag("checks", format!("oracle needs a localized field, {} is a bare plane wave", s.family())));
            }
            if let Some(&n) = self.grid.dims.iter().find(|&&n| !crate::propagator::is_fft_friendly(n)) {
                out.push(diag("grid.dims", format!("{n} is not a product of 2, 3 and 5 (oracle)")));
            }
            if let Some(w) = e.window {
                if !(w.is_finite() && w > 0.0) {
                    out.push(diag("expect.window", "must be positive"));
                }
            }
            if let Some(dt) = e.oracle_dt {
                if !(dt.is_finite() && dt > 0.0) {
                    out.push(diag("expect.oracle_dt", "must be positive"));
                }
            }
        }
        if self.has(CheckKind::NodeSpeed) {
            if matches!(e.node_speed, Some(SpeedTarget::Range { .. })) && self.n_frames < 2 {
                out.push(diag("n_frames", "tracked node speeds need at least 2 frames"));
            }
            match e.node_speed {
                Some(SpeedTarget::Exact { value, rel_tol }) if !(value > 0.0 && rel_tol > 0.0) => {
                    out.push(diag("expect.node_speed", "value and rel_tol must be positive"))
                }
                Some(SpeedTarget::Range { min, max }) if !(min <= max) => {
                    out.push(diag("expect.node_speed", "min must not exceed max"))
                }
                _ => {}
            }
        }
        if self.has(CheckKind::Generation) && checks::generation_carrier(s).is_none() {
            out.push(diag(
                "checks",
                format!("generation needs a plane-wave-carried free family, not {}", s.family()),
            ));
        }
        if matches!(e.residual_points, Some(0)) {
            out.push(diag("expect.residual_points", "must be at least 1"));
        }
    }

    /// `Ok` when [`validate`](Self::validate) finds nothing; otherwise a
    /// [`Error::Config`] listing every diagnostic.
    pub fn check(&self) -> Result<()> {
        let d = self.validate();
        if d.is_empty() {
            return Ok(());
        }
        let msg: Vec<String> = d.iter().map(|d| d.to_string()).collect();
        Err(Error::Config(msg.join("; ")))
    }
}

#[cfg(test)]
mod tests;
