//! Run configuration: flat `key = value` files with `#` comments.
//!
//! Natural units (c = ħ = 1) throughout. A `preset` line fills every design
//! key first; the remaining lines override it regardless of their order.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quadrature::{QuadConfig, TailPolicy};

pub const DEFAULT_ORACLE_MODES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Paper,
    Gaussian,
}

impl Preset {
    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Paper => "paper-preset",
            Preset::Gaussian => "gaussian-preset",
        }
    }

    pub fn design(self) -> Design {
        match self {
            Preset::Paper => Design {
                preset: self,
                duration: 1.0,
                l_over_t: 2.0,
                n_policy: NPolicy::Square,
                n_fixed: 4.0,
                hat_order: 6,
                envelope_order: 2,
                smearing: 0.01,
                mass: 0.0,
                eps0_a: 1e-3,
                eps0_b: 1e-3,
                gap_scale: 1.0,
                normalize: true,
                window_a: WindowChoice::Superoscillating,
                window_b: WindowChoice::Hat,
                omega_a: None,
                omega_b: None,
            },
            Preset::Gaussian => Design {
                preset: self,
                duration: 1.0,
                l_over_t: 3.0,
                n_policy: NPolicy::Fixed,
                n_fixed: 1.0,
                hat_order: 6,
                envelope_order: 2,
                smearing: 0.1,
                mass: 0.0,
                eps0_a: 1e-3,
                eps0_b: 1e-3,
                gap_scale: 1.0,
                normalize: true,
                window_a: WindowChoice::Gaussian,
                window_b: WindowChoice::Gaussian,
                omega_a: Some(1.0),
                omega_b: Some(1.0),
            },
        }
    }
}

impl FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "paper-preset" | "paper" => Ok(Preset::Paper),
            "gaussian-preset" | "gaussian" => Ok(Preset::Gaussian),
            _ => Err(format!("unknown preset '{s}' (expected paper-preset or gaussian-preset)")),
        }
    }
}

/// How the superoscillation index follows the separation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NPolicy {
    /// N = ⌈(L/T)²⌉.
    Square,
    /// N = ⌈L/T⌉.
    Linear,
    /// N from the `N` key.
    Fixed,
}

impl NPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            NPolicy::Square => "square",
            NPolicy::Linear => "linear",
            NPolicy::Fixed => "fixed",
        }
    }

    pub fn index(self, l_over_t: f64, fixed: f64) -> f64 {
        match self {
            NPolicy::Square => (l_over_t * l_over_t).ceil(),
            NPolicy::Linear => l_over_t.ceil(),
            NPolicy::Fixed => fixed,
        }
    }
}

impl FromStr for NPolicy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "square" => Ok(NPolicy::Square),
            "linear" => Ok(NPolicy::Linear),
            "fixed" => Ok(NPolicy::Fixed),
            _ => Err(format!("unknown N_policy '{s}' (expected square, linear or fixed)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowChoice {
    Superoscillating,
    Hat,
    Gaussian,
}

impl WindowChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            WindowChoice::Superoscillating => "superoscillating",
            WindowChoice::Hat => "hat",
            WindowChoice::Gaussian => "gaussian",
        }
    }
}

impl FromStr for WindowChoice {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "superoscillating" | "superosc" => Ok(WindowChoice::Superoscillating),
            "hat" => Ok(WindowChoice::Hat),
            "gaussian" => Ok(WindowChoice::Gaussian),
            _ => Err(format!("unknown window '{s}' (expected superoscillating, hat or gaussian)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Separation,
    Gap,
    SuperoscIndex,
    FilterEta,
}

impl SweepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepKind::Separation => "separation",
            SweepKind::Gap => "gap",
            SweepKind::SuperoscIndex => "superosc_index",
            SweepKind::FilterEta => "filter_eta",
        }
    }

    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepKind::Separation => vec![1.5, 2.0, 2.5, 3.0],
            SweepKind::Gap => vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0],
            SweepKind::SuperoscIndex => vec![1.0, 2.0, 4.0, 8.0],
            SweepKind::FilterEta => vec![1e-4, 1e-3, 1e-2, 1e-1, 1.0],
        }
    }
}

impl FromStr for SweepKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "separation" => Ok(SweepKind::Separation),
            "gap" => Ok(SweepKind::Gap),
            "superosc_index" => Ok(SweepKind::SuperoscIndex),
            "filter_eta" => Ok(SweepKind::FilterEta),
            _ => Err(format!("unknown sweep '{s}'")),
        }
    }
}

/// Physical design of one detector pair; a template for sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub preset: Preset,
    /// Interaction duration T of both windows.
    pub duration: f64,
    pub l_over_t: f64,
    pub n_policy: NPolicy,
    pub n_fixed: f64,
    /// Convolution order k of hat windows.
    pub hat_order: u32,
    /// Envelope order q of the superoscillating window.
    pub envelope_order: u32,
    pub smearing: f64,
    pub mass: f64,
    pub eps0_a: f64,
    pub eps0_b: f64,
    /// Multiplies both gaps.
    pub gap_scale: f64,
    /// Rescale both windows to unit L² norm on [0, ∞).
    pub normalize: bool,
    pub window_a: WindowChoice,
    pub window_b: WindowChoice,
    /// Explicit gaps; default to the superoscillatory selection.
    pub omega_a: Option<f64>,
    pub omega_b: Option<f64>,
}

impl Default for Design {
    fn default() -> Self {
        Preset::Paper.design()
    }
}

impl Design {
    pub fn separation(&self) -> f64 {
        self.l_over_t * self.duration
    }

    pub fn index(&self) -> f64 {
        self.n_policy.index(self.l_over_t, self.n_fixed)
    }

    pub fn normalization_tag(&self) -> &'static str {
        if self.normalize {
            "unit-l2"
        } else {
            "unnormalized"
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub design: Design,
    pub sweep: Option<SweepKind>,
    pub sweep_values: Option<Vec<f64>>,
    pub quad: QuadConfig,
    pub emit_oracle_check: bool,
    pub oracle_modes: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            design: Design::default(),
            sweep: None,
            sweep_values: None,
            quad: QuadConfig::default(),
            emit_oracle_check: false,
            oracle_modes: DEFAULT_ORACLE_MODES,
        }
    }
}

fn parse_value<V: FromStr>(line: usize, key: &str, raw: &str) -> Result<V>
where
    V::Err: fmt::Display,
{
    raw.parse::<V>().map_err(|e| Error::Config { line, msg: format!("{key}: {e}") })
}

fn parse_bool(line: usize, key: &str, raw: &str) -> Result<bool> {
    match raw {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config { line, msg: format!("{key}: expected true or false, got '{raw}'") }),
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::Config { line, msg: format!("expected `key = value`, got '{content}'") })?;
            let key = key.trim().to_string();
            if let Some((first, _)) = entries.insert(key.clone(), (line, value.trim().to_string())) {
                return Err(Error::Config { line, msg: format!("duplicate key '{key}' (first on line {first})") });
            }
        }

        let mut cfg = RunConfig::default();
        if let Some((line, v)) = entries.remove("preset") {
            cfg.design = parse_value::<Preset>(line, "preset", &v)?.design();
        }
        let d = &mut cfg.design;
        for (key, (line, v)) in &entries {
            let (line, v) = (*line, v.as_str());
            match key.as_str() {
                "T" => d.duration = parse_value(line, key, v)?,
                "L_over_T" => d.l_over_t = parse_value(line, key, v)?,
                "N_policy" => d.n_policy = parse_value(line, key, v)?,
                "N" => d.n_fixed = parse_value(line, key, v)?,
                "k" => d.hat_order = parse_value(line, key, v)?,
                "q" => d.envelope_order = parse_value(line, key, v)?,
                "R" => d.smearing = parse_value(line, key, v)?,
                "m" => d.mass = parse_value(line, key, v)?,
                "eps0_A" => d.eps0_a = parse_value(line, key, v)?,
                "eps0_B" => d.eps0_b = parse_value(line, key, v)?,
                "gap_scale" => d.gap_scale = parse_value(line, key, v)?,
                "normalize" => d.normalize = parse_bool(line, key, v)?,
                "window_A" => d.window_a = parse_value(line, key, v)?,
                "window_B" => d.window_b = parse_value(line, key, v)?,
                "Omega_A" => d.omega_a = Some(parse_value(line, key, v)?),
                "Omega_B" => d.omega_b = Some(parse_value(line, key, v)?),
                "sweep" => cfg.sweep = Some(parse_value(line, key, v)?),
                "sweep_values" => {
                    let values = v
                        .split(',')
                        .map(|x| parse_value::<f64>(line, key, x.trim()))
                        .collect::<Result<Vec<_>>>()?;
                    cfg.sweep_values = Some(values);
                }
                "rel_tol" => cfg.quad.rel_tol = parse_value(line, key, v)?,
                "abs_tol" => cfg.quad.abs_tol = parse_value(line, key, v)?,
                "max_subdivisions" => cfg.quad.max_subdivisions = parse_value(line, key, v)?,
                "precision" => cfg.quad.precision = parse_value(line, key, v)?,
                "emit_oracle_check" => cfg.emit_oracle_check = parse_bool(line, key, v)?,
                "oracle_modes" => cfg.oracle_modes = parse_value(line, key, v)?,
                _ => return Err(Error::Config { line, msg: format!("unknown key '{key}'") }),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks that do not need any numerics; physical constraints at each
    /// point are checked when the point is built.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config { line: 0, msg });
        let d = &self.design;
        for (name, v) in [
            ("T", d.duration),
            ("L_over_T", d.l_over_t),
            ("R", d.smearing),
            ("gap_scale", d.gap_scale),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return bad(format!("{name} must be finite and > 0, got {v}"));
            }
        }
        for (name, v) in [("m", d.mass), ("eps0_A", d.eps0_a), ("eps0_B", d.eps0_b)] {
            if !(v >= 0.0) || !v.is_finite() {
                return bad(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        if d.n_policy == NPolicy::Fixed && !(d.n_fixed >= 1.0) {
            return bad(format!("N must be >= 1, got {}", d.n_fixed));
        }
        if d.hat_order < 1 {
            return bad("k must be >= 1".into());
        }
        if d.envelope_order < 2 {
            return bad("q must be >= 2".into());
        }
        if d.window_a != WindowChoice::Superoscillating && (d.omega_a.is_none() || d.omega_b.is_none()) {
            return bad("Omega_A and Omega_B are required unless window_A is superoscillating".into());
        }
        if let Some(values) = &self.sweep_values {
            check_sweep_values(values).or_else(bad)?;
        }
        if self.oracle_modes % 8 != 0 || self.oracle_modes < crate::oracle::MIN_COMPARISON_MODES {
            return bad(format!(
                "oracle_modes must be a multiple of 8 and >= {}, got {}",
                crate::oracle::MIN_COMPARISON_MODES,
                self.oracle_modes
            ));
        }
        self.quad.validate().map_err(|e| Error::Config { line: 0, msg: e.to_string() })
    }

    pub fn values_for(&self, kind: SweepKind) -> Result<Vec<f64>> {
        if let Some(k) = self.sweep {
            if k != kind {
                return Err(Error::Config {
                    line: 0,
                    msg: format!("config sweeps {} but the command sweeps {}", k.as_str(), kind.as_str()),
                });
            }
        }
        let values = self.sweep_values.clone().unwrap_or_else(|| kind.default_values());
        check_sweep_values(&values).map_err(|msg| Error::Config { line: 0, msg })?;
        let floor_ok = match kind {
            SweepKind::Separation => values.iter().all(|&v| v > 1.0),
            SweepKind::Gap => values.iter().all(|&v| v >= 1.0),
            SweepKind::SuperoscIndex => values.iter().all(|&v| v >= 1.0),
            SweepKind::FilterEta => values.iter().all(|&v| v > 0.0 && v <= 1.0),
        };
        if !floor_ok {
            let want = match kind {
                SweepKind::Separation => "L/T > 1",
                SweepKind::Gap | SweepKind::SuperoscIndex => "values >= 1",
                SweepKind::FilterEta => "0 < eta <= 1",
            };
            return Err(Error::Config { line: 0, msg: format!("{} sweep needs {want}", kind.as_str()) });
        }
        Ok(values)
    }

    /// Every setting that affects a number, as ordered `key = value` lines.
    pub fn echo(&self) -> Vec<(String, String)> {
        let d = &self.design;
        let opt = |v: Option<f64>| v.map_or_else(|| "selected".to_string(), |x| format!("{x:.16e}"));
        let tail = match self.quad.tail {
            TailPolicy::GaussianBound => "gaussian-bound".to_string(),
            TailPolicy::FixedMultiple(c) => format!("fixed-multiple {c:.16e}"),
        };
        let values = self
            .sweep_values
            .as_ref()
            .map_or_else(|| "default".to_string(), |v| v.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(","));
        vec![
            ("preset".into(), d.preset.as_str().into()),
            ("T".into(), format!("{:.16e}", d.duration)),
            ("L_over_T".into(), format!("{:.16e}", d.l_over_t)),
            ("N_policy".into(), d.n_policy.as_str().into()),
            ("N".into(), format!("{:.16e}", d.n_fixed)),
            ("k".into(), d.hat_order.to_string()),
            ("q".into(), d.envelope_order.to_string()),
            ("R".into(), format!("{:.16e}", d.smearing)),
            ("m".into(), format!("{:.16e}", d.mass)),
            ("eps0_A".into(), format!("{:.16e}", d.eps0_a)),
            ("eps0_B".into(), format!("{:.16e}", d.eps0_b)),
            ("gap_scale".into(), format!("{:.16e}", d.gap_scale)),
            ("normalize".into(), d.normalize.to_string()),
            ("window_A".into(), d.window_a.as_str().into()),
            ("window_B".into(), d.window_b.as_str().into()),
            ("Omega_A".into(), opt(d.omega_a)),
            ("Omega_B".into(), opt(d.omega_b)),
            ("sweep".into(), self.sweep.map_or("none", SweepKind::as_str).into()),
            ("sweep_values".into(), values),
            ("rel_tol".into(), format!("{:.16e}", self.quad.rel_tol)),
            ("abs_tol".into(), format!("{:.16e}", self.quad.abs_tol)),
            ("max_subdivisions".into(), self.quad.max_subdivisions.to_string()),
            ("precision".into(), self.quad.precision.as_str().into()),
            ("tail_policy".into(), tail),
            ("emit_oracle_check".into(), self.emit_oracle_check.to_string()),
            ("oracle_modes".into(), self.oracle_modes.to_string()),
        ]
    }
}

fn check_sweep_values(values: &[f64]) -> std::result::Result<(), String> {
    if values.is_empty() {
        return Err("sweep_values must not be empty".into());
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err("sweep_values must be finite".into());
    }
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err("sweep_values must be strictly increasing".into());
    }
    Ok(())
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.echo() {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}
