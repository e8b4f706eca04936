//! Parameter sweeps and the separation-scaling fit.
//!
//! Points are evaluated on the current rayon pool; rows come back in sweep
//! order.

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::config::{Design, NPolicy, RunConfig, SweepKind};
use super::point::{evaluate_point, ResultRow};

/// Fitted slopes of ln 𝒩 against (L/T)² at or above this pass.
pub const SLOPE_FLOOR: f64 = -1.3;

fn run_designs(cfg: &RunConfig, designs: Vec<Design>, fixed_eta: Option<&[f64]>) -> Vec<ResultRow> {
    let quad = cfg.quad;
    designs
        .into_par_iter()
        .enumerate()
        .map(|(i, d)| evaluate_point(&d, &quad, fixed_eta.map(|v| v[i])))
        .collect()
}

/// One row per L/T value and the fitted scaling slope.
pub fn sweep_separation(cfg: &RunConfig) -> Result<(Vec<ResultRow>, ScalingReport)> {
    let values = cfg.values_for(SweepKind::Separation)?;
    let designs = values.iter().map(|&x| Design { l_over_t: x, ..cfg.design.clone() }).collect();
    let rows = run_designs(cfg, designs, None);
    let fit = fit_scaling(&rows);
    Ok((rows, fit))
}

/// Both gaps multiplied by each value; windows stay fixed.
pub fn sweep_gap(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    let values = cfg.values_for(SweepKind::Gap)?;
    let designs = values.iter().map(|&s| Design { gap_scale: cfg.design.gap_scale * s, ..cfg.design.clone() }).collect();
    Ok(run_designs(cfg, designs, None))
}

/// Superoscillation index fixed at each value.
pub fn sweep_superosc_index(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    let values = cfg.values_for(SweepKind::SuperoscIndex)?;
    let designs =
        values.iter().map(|&n| Design { n_policy: NPolicy::Fixed, n_fixed: n, ..cfg.design.clone() }).collect();
    Ok(run_designs(cfg, designs, None))
}

/// The design point under symmetric filters of each fixed strength η.
pub fn sweep_eta(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    let values = cfg.values_for(SweepKind::FilterEta)?;
    let designs = vec![cfg.design.clone(); values.len()];
    Ok(run_designs(cfg, designs, Some(&values)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// Least-squares fit of ln 𝒩 = slope·(L/T)² + intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub slope: f64,
    pub intercept: f64,
    /// L/T of the points used, with their fit residuals.
    pub used: Vec<(f64, f64)>,
    /// L/T of points with non-positive or failed negativity.
    pub excluded: Vec<f64>,
    pub verdict: Verdict,
}

/// Fits (L/T, negativity) pairs; needs three positive points for a verdict.
pub fn fit_points(points: &[(f64, f64)]) -> ScalingReport {
    let (good, bad): (Vec<_>, Vec<_>) = points.iter().partition(|(_, n)| *n > 0.0 && n.is_finite());
    let excluded: Vec<f64> = bad.iter().map(|(x, _)| *x).collect();
    for x in &excluded {
        log::warn!("scaling fit: excluding L/T = {x} (negativity not positive)");
    }
    if good.len() < 3 {
        return ScalingReport {
            slope: f64::NAN,
            intercept: f64::NAN,
            used: good.iter().map(|(x, _)| (*x, f64::NAN)).collect(),
            excluded,
            verdict: Verdict::Inconclusive,
        };
    }
    let xs: Vec<f64> = good.iter().map(|(x, _)| x * x).collect();
    let ys: Vec<f64> = good.iter().map(|(_, n)| n.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let used = good.iter().zip(xs.iter().zip(&ys)).map(|((l, _), (x, y))| (*l, y - (slope * x + intercept))).collect();
    let verdict = if slope >= SLOPE_FLOOR { Verdict::Pass } else { Verdict::Fail };
    ScalingReport { slope, intercept, used, excluded, verdict }
}

pub fn fit_scaling(rows: &[ResultRow]) -> ScalingReport {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.l_over_t, if r.status.is_ok() { r.report.negativity } else { f64::NAN }))
        .collect();
    fit_points(&points)
}

/// Separation sweep of at least four points followed by the scaling fit.
pub fn scaling_check(cfg: &RunConfig) -> Result<(Vec<ResultRow>, ScalingReport)> {
    let n = cfg.values_for(SweepKind::Separation)?.len();
    if n < 4 {
        return Err(Error::Config { line: 0, msg: format!("scaling check needs >= 4 separation points, got {n}") });
    }
    sweep_separation(cfg)
}
