//! One scenario: design → detector pair → amplitudes → state → Bell report.

use std::fmt;
use std::time::{Duration, Instant};

use crate::amplitudes::{compute_amplitudes, AmplitudeSet, DetectorConfig, PairConfig};
use crate::error::{Error, Result};
use crate::quadrature::QuadConfig;
use crate::scalar::{f128, Precision, Real};
use crate::state::{apply_filter, bell_report, horodecki_m, BellReport, FilterPair};
use crate::windows::{select_gaps, WindowSpec};

use super::config::{Design, WindowChoice};

/// Outcome tag of a row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed { tag: String, message: String },
}

impl Status {
    pub fn is_ok(&self) -> bool {
        matches!(self, Status::Ok)
    }

    pub fn failed(err: &Error) -> Self {
        Status::Failed { tag: err.tag().to_string(), message: err.to_string() }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Ok => f.write_str("ok"),
            Status::Failed { tag, .. } => write!(f, "failed:{tag}"),
        }
    }
}

/// Inputs, amplitudes and Bell measures of one sweep point.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub l_over_t: f64,
    pub duration: f64,
    pub index: f64,
    pub hat_order: u32,
    pub envelope_order: u32,
    pub smearing: f64,
    pub mass: f64,
    pub eps0_a: f64,
    pub eps0_b: f64,
    pub omega_a: f64,
    pub omega_b: f64,
    pub amplitudes: AmplitudeSet<f64>,
    pub report: BellReport<f64>,
    pub status: Status,
    /// Window family and parameters of each detector.
    pub window_a: String,
    pub window_b: String,
    pub normalization: &'static str,
    /// Fixed filter strength of a filter sweep, if any.
    pub fixed_eta: Option<f64>,
    pub wall_time: Duration,
}

impl ResultRow {
    /// Numeric CSV columns in header order.
    pub fn values(&self) -> [f64; 26] {
        let a = &self.amplitudes;
        let r = &self.report;
        [
            self.l_over_t,
            self.duration,
            self.index,
            self.hat_order as f64,
            self.envelope_order as f64,
            self.smearing,
            self.mass,
            self.eps0_a,
            self.eps0_b,
            self.omega_a,
            self.omega_b,
            a.x0.re,
            a.n_ea2,
            a.n_eb2,
            a.eab.re,
            a.n_x2,
            r.negativity,
            r.negativity_approx,
            r.m,
            r.eta_opt,
            r.m_filtered,
            r.chsh_max_filtered,
            r.eq11_lhs,
            r.eq11_rhs,
            r.filter_success_prob,
            a.error_budget,
        ]
    }

    /// Bitwise equality of everything except the wall time.
    pub fn same_result(&self, other: &Self) -> bool {
        let bits = |r: &Self| r.values().map(f64::to_bits);
        bits(self) == bits(other)
            && self.amplitudes.x0.im.to_bits() == other.amplitudes.x0.im.to_bits()
            && self.amplitudes.eab.im.to_bits() == other.amplitudes.eab.im.to_bits()
            && self.report.eta_modulus.to_bits() == other.report.eta_modulus.to_bits()
            && self.status == other.status
            && self.window_a == other.window_a
            && self.window_b == other.window_b
            && self.normalization == other.normalization
    }
}

fn nan_amplitudes() -> AmplitudeSet<f64> {
    let z = num_complex::Complex::new(f64::NAN, f64::NAN);
    AmplitudeSet { x0: z, n_ea2: f64::NAN, n_eb2: f64::NAN, eab: z, n_x2: f64::NAN, error_budget: f64::NAN }
}

fn nan_report() -> BellReport<f64> {
    let n = f64::NAN;
    BellReport {
        negativity: n,
        negativity_approx: n,
        m: n,
        chsh_max: n,
        eq11_lhs: n,
        eq11_rhs: n,
        eq11_holds: false,
        eta_modulus: n,
        eta_opt: n,
        m_filtered: n,
        chsh_max_filtered: n,
        filter_success_prob: n,
    }
}

fn cast_report<T: Real>(r: &BellReport<T>) -> BellReport<f64> {
    let c = |x: T| x.to_f64_lossy();
    BellReport {
        negativity: c(r.negativity),
        negativity_approx: c(r.negativity_approx),
        m: c(r.m),
        chsh_max: c(r.chsh_max),
        eq11_lhs: c(r.eq11_lhs),
        eq11_rhs: c(r.eq11_rhs),
        eq11_holds: r.eq11_holds,
        eta_modulus: c(r.eta_modulus),
        eta_opt: c(r.eta_opt),
        m_filtered: c(r.m_filtered),
        chsh_max_filtered: c(r.chsh_max_filtered),
        filter_success_prob: c(r.filter_success_prob),
    }
}

fn window<T: Real>(choice: WindowChoice, d: &Design, index: T, separation: T) -> Result<WindowSpec<T>> {
    let t = T::of(d.duration);
    match choice {
        WindowChoice::Superoscillating => WindowSpec::superoscillating(t, index, separation, d.envelope_order),
        WindowChoice::Hat => WindowSpec::convolved_hat(t, d.hat_order),
        WindowChoice::Gaussian => WindowSpec::gaussian(t),
    }
}

fn describe(choice: WindowChoice, d: &Design) -> String {
    match choice {
        WindowChoice::Superoscillating => {
            format!("superoscillating(N={},L={:e},q={})", d.index(), d.separation(), d.envelope_order)
        }
        WindowChoice::Hat => format!("hat(k={})", d.hat_order),
        WindowChoice::Gaussian => "gaussian".to_string(),
    }
}

/// Gaps (Ω_A, Ω_B) of a design before scaling: explicit values, or the
/// superoscillatory selection.
pub fn base_gaps<T: Real>(d: &Design) -> Result<(T, T)> {
    match (d.omega_a, d.omega_b) {
        (Some(a), Some(b)) => Ok((T::of(a), T::of(b))),
        (a, b) => {
            let g = select_gaps(T::of(d.index()), T::of(d.separation()), T::of(d.duration))?;
            Ok((a.map_or(g.omega_a, T::of), b.map_or(g.omega_b, T::of)))
        }
    }
}

/// The detector pair of a design, with windows normalized in `T`.
pub fn build_pair<T: Real>(d: &Design, quad: &QuadConfig) -> Result<PairConfig<T>> {
    let l = T::of(d.l_over_t) * T::of(d.duration);
    let index = T::of(d.index());
    let (ga, gb) = base_gaps::<T>(d)?;
    let scale = T::of(d.gap_scale);
    let mut wa = window(d.window_a, d, index, l)?;
    let mut wb = window(d.window_b, d, index, l)?;
    if d.normalize {
        wa = wa.normalized(quad)?;
        wb = wb.normalized(quad)?;
    }
    let r = T::of(d.smearing);
    let det_a = DetectorConfig::new(ga * scale, r, wa, T::of(d.eps0_a))?;
    let det_b = DetectorConfig::new(gb * scale, r, wb, T::of(d.eps0_b))?;
    PairConfig::new(det_a, det_b, l, T::of(d.mass))
}

fn evaluate_in<T: Real>(
    d: &Design,
    quad: &QuadConfig,
    fixed_eta: Option<f64>,
) -> Result<(PairConfig<f64>, AmplitudeSet<f64>, BellReport<f64>)> {
    let pair = build_pair::<T>(d, quad)?;
    let amps = compute_amplitudes(&pair, quad)?;
    let (state, mut report) = bell_report(&amps)?;
    if let Some(eta) = fixed_eta {
        let (filtered, success) = apply_filter(&state, FilterPair::symmetric(T::of(eta))?)?;
        let m = horodecki_m(&filtered);
        report.eta_opt = T::of(eta);
        report.m_filtered = m;
        report.chsh_max_filtered = T::of(2.0) * m.max(T::zero()).sqrt();
        report.filter_success_prob = success;
    }
    Ok((pair.cast(), amps.cast(), cast_report(&report)))
}

/// Evaluates one design point in the working precision of `quad`. A
/// numerical failure yields a row with NaN results and a failure tag.
pub fn evaluate_point(d: &Design, quad: &QuadConfig, fixed_eta: Option<f64>) -> ResultRow {
    let start = Instant::now();
    let outcome = match quad.precision {
        Precision::Standard => evaluate_in::<f64>(d, quad, fixed_eta),
        Precision::Extended => evaluate_in::<f128>(d, quad, fixed_eta),
    };
    let (gaps, amplitudes, report, status) = match outcome {
        Ok((pair, amps, report)) => ((pair.det_a.gap, pair.det_b.gap), amps, report, Status::Ok),
        Err(e) => {
            log::warn!("point L/T = {} failed: {e}", d.l_over_t);
            let gaps = base_gaps::<f64>(d).map_or((f64::NAN, f64::NAN), |(a, b)| (a * d.gap_scale, b * d.gap_scale));
            (gaps, nan_amplitudes(), nan_report(), Status::failed(&e))
        }
    };
    let row = ResultRow {
        l_over_t: d.l_over_t,
        duration: d.duration,
        index: d.index(),
        hat_order: d.hat_order,
        envelope_order: d.envelope_order,
        smearing: d.smearing,
        mass: d.mass,
        eps0_a: d.eps0_a,
        eps0_b: d.eps0_b,
        omega_a: gaps.0,
        omega_b: gaps.1,
        amplitudes,
        report,
        status,
        window_a: describe(d.window_a, d),
        window_b: describe(d.window_b, d),
        normalization: d.normalization_tag(),
        fixed_eta,
        wall_time: start.elapsed(),
    };
    log::info!("point L/T = {} done in {:.3?} ({})", d.l_over_t, row.wall_time, row.status);
    row
}
