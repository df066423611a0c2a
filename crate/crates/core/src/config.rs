//! Scenario files: TOML with one table per concern, SI units throughout.
//!
//! ```toml
//! [curve]
//! kind = "circle"          # circle | line | ellipse
//! center = [0.0, 0.0]
//! radius = 0.02
//! direction = "ccw"
//!
//! [leg]
//! mass = 0.0025
//! inertia = 4e-7
//! rest_length = 0.017
//! alpha_min = 0.5235987755982989
//! alpha_max = 1.0471975511965979
//!
//! [initial]
//! position = [0.1, 0.0]
//! speed = 0.2
//! heading = 1.0471975511965979
//! side = "right"
//!
//! [tracking]
//! gain = 0.5
//! rho_c = 0.03
//!
//! [run]
//! q_target = 0.0153
//! max_stances = 40
//! ```
//!
//! Any key can be overridden from the command line as `table.key=value`,
//! where `value` is parsed as a TOML value (bare words fall back to strings).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::body::PostureGains;
use crate::error::{Error, Result};
use crate::geometry::{CurveModel, Direction, Ellipse, Point};
use crate::stance::{IntegratorSettings, LegParams, Side};
use crate::tracking::{TrackingGains, SIMPLIFIED_RATIO};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CurveSpec {
    Circle {
        center: [f64; 2],
        radius: f64,
        direction: Direction,
    },
    Line {
        point: [f64; 2],
        direction: [f64; 2],
    },
    Ellipse {
        center: [f64; 2],
        semi_x: f64,
        semi_y: f64,
        #[serde(default)]
        rotation: f64,
        direction: Direction,
    },
}

impl CurveSpec {
    pub fn build(&self) -> Result<CurveModel> {
        let p = |a: &[f64; 2]| Point::new(a[0], a[1]);
        match self {
            CurveSpec::Circle {
                center,
                radius,
                direction,
            } => {
                if !(*radius > 0.0) {
                    return Err(Error::Config(format!(
                        "circle radius {radius} must be positive"
                    )));
                }
                Ok(CurveModel::circle(p(center), *radius, *direction))
            }
            CurveSpec::Line { point, direction } => {
                let d = p(direction);
                if !(d.norm() > 0.0) {
                    return Err(Error::Config("line direction must be nonzero".into()));
                }
                Ok(CurveModel::line(p(point), d))
            }
            CurveSpec::Ellipse {
                center,
                semi_x,
                semi_y,
                rotation,
                direction,
            } => {
                if !(*semi_x > 0.0 && *semi_y > 0.0) {
                    return Err(Error::Config("ellipse semi-axes must be positive".into()));
                }
                Ok(CurveModel::Parametric(std::sync::Arc::new(Ellipse {
                    center: p(center),
                    semi_x: *semi_x,
                    semi_y: *semi_y,
                    rotation: *rotation,
                    direction: *direction,
                })))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub position: [f64; 2],
    pub speed: f64,
    pub heading: f64,
    pub side: Side,
    /// Body orientation; defaults to the heading.
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub p_sigma: f64,
}

/// How each stance's leg angle is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Exact leg plan or failure.
    Inverse,
    /// Exact leg plan when admissible, otherwise the approximation method.
    #[serde(alias = "constant-q")]
    Approx,
}

/// What advances the COM between touchdowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceModel {
    /// Integrate every stance.
    Exact,
    /// Small-step distance recursion, circles and lines only.
    Simplified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_strategy")]
    pub strategy: Strategy,
    #[serde(default = "default_model")]
    pub model: DistanceModel,
    /// Chord length held on every stance (m).
    pub q_target: f64,
    /// Touchdown leg length; defaults to the rest length.
    #[serde(default)]
    pub eta_td: Option<f64>,
    pub max_stances: usize,
    #[serde(default = "default_true")]
    pub stop_on_convergence: bool,
    #[serde(default = "default_window")]
    pub convergence_window: usize,
    /// Smallest error band that counts as converged (m).
    #[serde(default = "default_floor")]
    pub convergence_floor: f64,
    /// Allowed steering-angle difference residual between stances (rad).
    #[serde(default = "default_invariant_tolerance")]
    pub invariant_tolerance: f64,
    /// `q < lambda / ratio` check of the simplified model.
    #[serde(default = "default_ratio")]
    pub simplified_ratio: f64,
}

fn default_strategy() -> Strategy {
    Strategy::Approx
}
fn default_model() -> DistanceModel {
    DistanceModel::Exact
}
fn default_true() -> bool {
    true
}
fn default_window() -> usize {
    3
}
fn default_floor() -> f64 {
    1e-4
}
fn default_invariant_tolerance() -> f64 {
    1e-8
}
fn default_ratio() -> f64 {
    SIMPLIFIED_RATIO
}

/// Leg-angle grid for the chord and stiffness sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub points: usize,
    /// Fixed stiffness for the chord sweep (N/m).
    pub stiffness: f64,
    /// Chord held fixed for the stiffness sweep (m).
    pub q_target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub curve: CurveSpec,
    pub leg: LegParams,
    pub initial: InitialSection,
    pub tracking: TrackingGains,
    #[serde(default)]
    pub posture: PostureGains,
    pub run: RunSection,
    #[serde(default)]
    pub integrator: IntegratorSettings,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

impl ScenarioConfig {
    pub fn eta_td(&self) -> f64 {
        self.run.eta_td.unwrap_or(self.leg.rest_length)
    }

    /// Check every cross-field constraint; failures are configuration errors.
    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| match e {
            Error::InvalidParameter(s) => Error::Config(s),
            other => other,
        };
        self.curve.build()?;
        self.leg.validate().map_err(cfg)?;
        self.tracking.validate().map_err(cfg)?;
        self.posture.validate().map_err(cfg)?;
        let bad = |s: String| Err(Error::Config(s));
        if !(self.initial.speed > 0.0) {
            return bad(format!(
                "initial speed {} must be positive",
                self.initial.speed
            ));
        }
        let eta = self.eta_td();
        if !(eta > 0.0) {
            return bad(format!("touchdown leg length {eta} must be positive"));
        }
        let q = self.run.q_target;
        if !(q > 0.0 && q < 2.0 * self.leg.rest_length && q < 2.0 * eta) {
            return bad(format!("q_target {q} must lie in (0, 2 * leg length)"));
        }
        if self.run.max_stances == 0 {
            return bad("max_stances must be at least 1".into());
        }
        if self.run.convergence_window == 0 {
            return bad("convergence_window must be at least 1".into());
        }
        if !(self.run.convergence_floor >= 0.0 && self.run.invariant_tolerance > 0.0) {
            return bad("convergence_floor and invariant_tolerance must be non-negative".into());
        }
        if !(self.integrator.steps_per_timescale >= 1.0 && self.integrator.max_steps > 0) {
            return bad("integrator needs steps_per_timescale >= 1 and max_steps > 0".into());
        }
        if self.run.model == DistanceModel::Simplified
            && matches!(self.curve, CurveSpec::Ellipse { .. })
        {
            return bad("the simplified model supports circle and line curves only".into());
        }
        if let Some(s) = &self.sweep {
            if s.points == 0 {
                return bad("sweep grid is empty".into());
            }
            if !(s.alpha_min > 0.0
                && s.alpha_min <= s.alpha_max
                && s.alpha_max < std::f64::consts::FRAC_PI_2)
            {
                return bad("sweep range must satisfy 0 < alpha_min <= alpha_max < pi/2".into());
            }
            if !(s.stiffness > 0.0 && s.q_target > 0.0) {
                return bad("sweep stiffness and q_target must be positive".into());
            }
        }
        Ok(())
    }

    pub fn body_sigma(&self) -> f64 {
        self.initial.sigma.unwrap_or(self.initial.heading)
    }
}

/// Parse a scenario from TOML text, apply `key=value` overrides and validate.
pub fn parse(text: &str, overrides: &[String]) -> Result<ScenarioConfig> {
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let config: ScenarioConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

pub fn load(path: &Path, overrides: &[String]) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text, overrides)
}

/// Set `a.b.c = value` in a TOML table, creating intermediate tables.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("override key `{key}` is malformed")));
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let (last, parents) = path.split_last().expect("nonempty path");
    let mut cur = table;
    for p in parents {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override `{key}`: `{p}` is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}
