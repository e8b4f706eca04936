//! Lattice-oracle comparison and the built-in self test.

use crate::amplitudes::{compute_amplitudes_f64, emission_norm, DetectorConfig};
use crate::error::Result;
use crate::oracle::{lattice_amplitudes_with, LatticeOptions};
use crate::quadrature::QuadConfig;
use crate::state::{horodecki_m, negativity, TwoQubitState};
use crate::windows::WindowSpec;

use super::config::Design;
use super::point::build_pair;

/// Relative agreement required between lattice and quadrature amplitudes.
pub const ORACLE_REL_TOL: f64 = 1e-6;
/// Relative agreement required between the double sum and the Wick form.
pub const WICK_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison {
    pub n_modes: usize,
    /// (name, quadrature, lattice, relative difference) per amplitude.
    pub entries: Vec<(&'static str, f64, f64, f64)>,
    pub wick_double_sum: f64,
    pub wick_formula: f64,
    pub wick_rel_diff: f64,
}

impl OracleComparison {
    pub fn max_rel_diff(&self) -> f64 {
        self.entries.iter().map(|e| e.3).fold(0.0, f64::max)
    }

    pub fn passes(&self) -> bool {
        self.max_rel_diff() <= ORACLE_REL_TOL && self.wick_rel_diff <= WICK_REL_TOL
    }

    pub fn lines(&self, prefix: &str) -> Vec<(String, String)> {
        let mut out = vec![(format!("{prefix}.n_modes"), self.n_modes.to_string())];
        for (name, q, l, d) in &self.entries {
            out.push((format!("{prefix}.{name}.quadrature"), format!("{q:.16e}")));
            out.push((format!("{prefix}.{name}.lattice"), format!("{l:.16e}")));
            out.push((format!("{prefix}.{name}.rel_diff"), format!("{d:.3e}")));
        }
        out.push((format!("{prefix}.wick.double_sum"), format!("{:.16e}", self.wick_double_sum)));
        out.push((format!("{prefix}.wick.formula"), format!("{:.16e}", self.wick_formula)));
        out.push((format!("{prefix}.wick.rel_diff"), format!("{:.3e}", self.wick_rel_diff)));
        out.push((format!("{prefix}.verdict"), if self.passes() { "PASS" } else { "FAIL" }.into()));
        out
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

/// Quadrature amplitudes of a design against the mode-lattice oracle.
pub fn oracle_compare(d: &Design, quad: &QuadConfig, n_modes: usize) -> Result<OracleComparison> {
    let pair = build_pair::<f64>(d, quad)?;
    let quadrature = compute_amplitudes_f64(&pair, quad)?;
    let lattice = lattice_amplitudes_with(&pair, &LatticeOptions::new(&pair, n_modes))?;
    let l = &lattice.amplitudes;
    let entries = vec![
        ("X0", quadrature.x0.re, l.x0.re, rel(l.x0.re, quadrature.x0.re)),
        ("nEA2", quadrature.n_ea2, l.n_ea2, rel(l.n_ea2, quadrature.n_ea2)),
        ("nEB2", quadrature.n_eb2, l.n_eb2, rel(l.n_eb2, quadrature.n_eb2)),
        ("EAB", quadrature.eab.re, l.eab.re, rel(l.eab.re, quadrature.eab.re)),
        ("nX2", quadrature.n_x2, l.n_x2, rel(l.n_x2, quadrature.n_x2)),
    ];
    Ok(OracleComparison {
        n_modes,
        entries,
        wick_double_sum: l.n_x2,
        wick_formula: lattice.wick_n_x2,
        wick_rel_diff: rel(l.n_x2, lattice.wick_n_x2),
    })
}

/// Fast consistency checks of the installed build, as (name, passed, detail).
pub fn selftest() -> Vec<(&'static str, bool, String)> {
    let mut out = Vec::new();
    let bell = TwoQubitState::<f64>::bell();
    let (n, m) = (negativity(&bell), horodecki_m(&bell));
    out.push(("bell-state", (n - 0.5).abs() < 1e-12 && (m - 2.0).abs() < 1e-12, format!("N = {n}, M = {m}")));

    let ground = TwoQubitState::<f64>::ground();
    let (n, m) = (negativity(&ground), horodecki_m(&ground));
    out.push(("product-state", n == 0.0 && (m - 1.0).abs() < 1e-12, format!("N = {n}, M = {m}")));

    let crossing = TwoQubitState::<f64>::werner(std::f64::consts::FRAC_1_SQRT_2).map(|w| horodecki_m(&w));
    out.push((
        "werner-threshold",
        crossing.as_ref().is_ok_and(|m| (m - 1.0).abs() < 1e-12),
        format!("M(1/sqrt 2) = {crossing:?}"),
    ));

    let (r, t) = (0.3f64, 1.0f64);
    let q = QuadConfig::default();
    let emission = WindowSpec::gaussian(t).and_then(|w| DetectorConfig::new(0.0, r, w, 1.0)).and_then(|d| emission_norm(&d, 0.0, &q));
    let want = 1.0 / (2.0 * (r * r + t * t / 2.0));
    out.push((
        "gaussian-emission",
        emission.as_ref().is_ok_and(|v| ((v - want) / want).abs() < 1e-10),
        format!("{emission:?} vs {want}"),
    ));
    out
}
