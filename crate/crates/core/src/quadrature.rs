//! Globally adaptive Gauss–Legendre quadrature for smooth oscillatory
//! integrands, with phase-aligned panels on the half line.
//!
//! Every interval is integrated with a 12- and a 24-point Gauss–Legendre
//! rule; the difference is the error estimate, floored at the rounding
//! level of the 24-point sum. The interval with the largest estimate is
//! bisected until the total estimate meets `max(rel_tol·|value|, abs_tol)`.
//! Rule nodes are computed by Newton iteration in the working scalar, so the
//! same code runs in `f64` and `f128`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{invalid, Error, Result};
use crate::scalar::{Precision, Real};
use crate::sum::CompensatedSum;

const LOW_ORDER: usize = 12;
const HIGH_ORDER: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Bisections allowed beyond the initial partition.
    pub max_subdivisions: usize,
    pub precision: Precision,
    pub tail: TailPolicy,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-16,
            max_subdivisions: 4000,
            precision: Precision::Standard,
            tail: TailPolicy::GaussianBound,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(invalid(format!("rel_tol must be > 0, got {}", self.rel_tol)));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(invalid(format!("abs_tol must be >= 0, got {}", self.abs_tol)));
        }
        if self.max_subdivisions < 1 {
            return Err(invalid("max_subdivisions must be >= 1"));
        }
        if let TailPolicy::FixedMultiple(c) = self.tail {
            if !(c > 0.0) {
                return Err(invalid("fixed tail multiple must be > 0"));
            }
        }
        Ok(())
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }
}

/// How the half line is truncated for integrands carrying a Gaussian
/// smearing factor exp(-ω²R²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailPolicy {
    /// Smallest ω_max with `B·ω_max^(p+1)·exp(-ω_max²R²) ≤ abs_tol`, for an
    /// integrand bounded by `B·ω^p·exp(-ω²R²)`.
    GaussianBound,
    /// ω_max = c / R.
    FixedMultiple(f64),
}

/// Envelope `bound·ω^power·exp(-ω²R²)` dominating a half-line integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound<T> {
    pub bound: T,
    pub power: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error_estimate: T,
    pub subdivisions_used: usize,
    pub converged: bool,
    pub evaluations: usize,
}

impl<T: Real> QuadResult<T> {
    /// Turns a non-converged result into [`Error::NotConverged`].
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                value: self.value.to_f64_lossy(),
                error: self.error_estimate.to_f64_lossy(),
                subdivisions: self.subdivisions_used,
            })
        }
    }

    pub fn scaled(self, factor: T) -> Self {
        Self { value: self.value * factor, error_estimate: self.error_estimate * factor.abs(), ..self }
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussRule<T> {
    pub fn legendre(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = T::of_usize(n);
        let tol = T::epsilon() * T::of(4.0);
        for i in 0..n.div_ceil(2) {
            let guess = (T::PI() * (T::of_usize(i) + T::of(0.75)) / (nf + T::of(0.5))).cos();
            let mut x = guess;
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x = x - dx;
                if dx.abs() <= tol {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = T::of(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[i] = x;
            nodes[n - 1 - i] = -x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::of_usize(k);
        let p2 = ((T::of_usize(2 * k - 1)) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::of_usize(n);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    frozen: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Priority {
    error: f64,
    index: usize,
}

impl Eq for Priority {}

impl PartialOrd for Priority {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Priority {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.index.cmp(&self.index))
    }
}

/// Reusable integrator holding the rule pair for one scalar type.
#[derive(Debug, Clone)]
pub struct Integrator<T> {
    cfg: QuadConfig,
    low: GaussRule<T>,
    high: GaussRule<T>,
}

impl<T: Real> Integrator<T> {
    pub fn new(cfg: QuadConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg, low: GaussRule::legendre(LOW_ORDER), high: GaussRule::legendre(HIGH_ORDER) })
    }

    pub fn config(&self) -> &QuadConfig {
        &self.cfg
    }

    fn rule_pair<F: Fn(T) -> T>(&self, f: &F, a: T, b: T, evals: &mut usize) -> Result<Segment<T>> {
        let half = (b - a) * T::of(0.5);
        let mid = (a + b) * T::of(0.5);
        let mut high = CompensatedSum::new();
        let mut magnitude = T::zero();
        for (x, w) in self.high.nodes.iter().zip(&self.high.weights) {
            let xv = mid + half * *x;
            let fx = f(xv);
            if !fx.is_finite() {
                return Err(Error::NonFinite { x: xv.to_f64_lossy() });
            }
            high.add(*w * fx);
            magnitude = magnitude + *w * fx.abs();
        }
        let mut low = CompensatedSum::new();
        for (x, w) in self.low.nodes.iter().zip(&self.low.weights) {
            let xv = mid + half * *x;
            let fx = f(xv);
            if !fx.is_finite() {
                return Err(Error::NonFinite { x: xv.to_f64_lossy() });
            }
            low.add(*w * fx);
        }
        *evals += HIGH_ORDER + LOW_ORDER;
        let hv = high.value() * half;
        let lv = low.value() * half;
        let roundoff = T::of(4.0) * T::epsilon() * magnitude * half.abs();
        let diff = (hv - lv).abs();
        let frozen = diff <= roundoff;
        Ok(Segment { a, b, value: hv, error: if frozen { roundoff } else { diff }, frozen })
    }

    /// Global adaptive integration starting from the given partition.
    pub fn integrate_partition<F: Fn(T) -> T>(&self, f: F, breakpoints: &[T]) -> Result<QuadResult<T>> {
        self.partition_with_floor(f, breakpoints, T::of(self.cfg.abs_tol))
    }

    fn partition_with_floor<F: Fn(T) -> T>(&self, f: F, breakpoints: &[T], abs: T) -> Result<QuadResult<T>> {
        if breakpoints.len() < 2 {
            return Err(invalid("partition needs at least two breakpoints"));
        }
        let mut evals = 0;
        let mut segments = Vec::with_capacity(breakpoints.len() + 64);
        for w in breakpoints.windows(2) {
            if !(w[0] < w[1]) {
                return Err(invalid("partition breakpoints must be strictly increasing"));
            }
            segments.push(self.rule_pair(&f, w[0], w[1], &mut evals)?);
        }
        let mut heap: BinaryHeap<Priority> = segments
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.frozen)
            .map(|(index, s)| Priority { error: s.error.to_f64_lossy(), index })
            .collect();

        let mut value: T = segments.iter().map(|s| s.value).collect::<CompensatedSum<T>>().value();
        let mut error: T = segments.iter().fold(T::zero(), |acc, s| acc + s.error);
        let rel = T::of(self.cfg.rel_tol);
        let mut subdivisions = 0;
        let tolerance = |v: T| (rel * v.abs()).max(abs);

        while error > tolerance(value) && subdivisions < self.cfg.max_subdivisions {
            let Some(top) = heap.pop() else { break };
            let seg = segments[top.index];
            let mid = (seg.a + seg.b) * T::of(0.5);
            if !(seg.a < mid && mid < seg.b) {
                segments[top.index].frozen = true;
                continue;
            }
            let left = self.rule_pair(&f, seg.a, mid, &mut evals)?;
            let right = self.rule_pair(&f, mid, seg.b, &mut evals)?;
            subdivisions += 1;
            value = value + (left.value + right.value - seg.value);
            error = error + (left.error + right.error - seg.error);
            segments[top.index] = left;
            let right_index = segments.len();
            segments.push(right);
            if !left.frozen {
                heap.push(Priority { error: left.error.to_f64_lossy(), index: top.index });
            }
            if !right.frozen {
                heap.push(Priority { error: right.error.to_f64_lossy(), index: right_index });
            }
        }

        segments.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal));
        let value = segments.iter().map(|s| s.value).collect::<CompensatedSum<T>>().value();
        let error = segments.iter().fold(T::zero(), |acc, s| acc + s.error);
        Ok(QuadResult {
            value,
            error_estimate: error,
            subdivisions_used: subdivisions,
            converged: error <= tolerance(value),
            evaluations: evals,
        })
    }

    pub fn integrate_finite<F: Fn(T) -> T>(&self, f: F, a: T, b: T) -> Result<QuadResult<T>> {
        if !(a < b) {
            return Err(invalid(format!("integration bounds must satisfy a < b, got [{a}, {b}]")));
        }
        self.integrate_partition(f, &[a, b])
    }

    /// Cut-off frequency for an integrand dominated by
    /// `bound·ω^power·exp(-ω²R²)`.
    pub fn tail_cutoff(&self, gaussian_width: T, bound: TailBound<T>) -> Result<T> {
        if !(gaussian_width > T::zero()) || !gaussian_width.is_finite() {
            return Err(invalid(format!("smearing width R must be > 0, got {gaussian_width}")));
        }
        match self.cfg.tail {
            TailPolicy::FixedMultiple(c) => Ok(T::of(c) / gaussian_width),
            TailPolicy::GaussianBound => {
                let abs = T::of(self.cfg.abs_tol);
                if bound.bound <= T::zero() {
                    return Ok(T::one() / gaussian_width);
                }
                if !(abs > T::zero()) {
                    return Err(invalid("GaussianBound tail policy needs abs_tol > 0"));
                }
                let p1 = T::of_usize(bound.power as usize + 1);
                // log of the envelope; decreasing beyond its maximum
                let log_env = |w: T| bound.bound.ln() + p1 * w.ln() - w * w * gaussian_width * gaussian_width;
                let target = abs.ln();
                let peak = (p1 / (T::of(2.0) * gaussian_width * gaussian_width)).sqrt();
                let mut lo = peak;
                if log_env(lo) <= target {
                    return Ok(lo.max(T::one() / gaussian_width));
                }
                let mut hi = lo * T::of(2.0);
                while log_env(hi) > target {
                    hi = hi * T::of(2.0);
                    if !hi.is_finite() {
                        return Err(invalid("tail bound cannot be satisfied"));
                    }
                }
                for _ in 0..200 {
                    let mid = (lo + hi) * T::of(0.5);
                    if log_env(mid) > target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= hi * T::of(1e-12) {
                        break;
                    }
                }
                Ok(hi)
            }
        }
    }

    /// Integral over [0, ∞) of an integrand carrying exp(-ω²R²).
    ///
    /// The half line is cut at [`Integrator::tail_cutoff`] and split into
    /// panels of width `half_period` (π/L for a sin(ωL) factor) before
    /// adaptive refinement. With `bound = None` the envelope constant is
    /// estimated by sampling `|f|·exp(ω²R²)/ω^power` on [0, 3/R].
    pub fn integrate_halfline<F: Fn(T) -> T>(
        &self,
        f: F,
        half_period: T,
        gaussian_width: T,
        bound: Option<TailBound<T>>,
    ) -> Result<QuadResult<T>> {
        if !(half_period > T::zero()) || !half_period.is_finite() {
            return Err(invalid(format!("panel width must be > 0, got {half_period}")));
        }
        if !(gaussian_width > T::zero()) || !gaussian_width.is_finite() {
            return Err(invalid(format!("smearing width R must be > 0, got {gaussian_width}")));
        }
        let bound = match bound {
            Some(b) => b,
            None => estimate_bound(&f, gaussian_width),
        };
        let cutoff = self.tail_cutoff(gaussian_width, bound)?;
        let panels = (cutoff / half_period).ceil().to_f64_lossy();
        if !(panels <= 5.0e6) {
            return Err(invalid(format!("{panels} panels requested; cutoff {cutoff} too large for panel width")));
        }
        let n = (panels as usize).max(1);
        let breakpoints: Vec<T> = (0..=n).map(|i| half_period * T::of_usize(i)).collect();
        self.integrate_partition(f, &breakpoints)
    }

    /// Integral over [0, ∞) with panels of width `panel` up to `split` and the
    /// remainder mapped onto (0, 1] by ω = split/u. Suitable for integrands
    /// decaying faster than 1/ω without a Gaussian factor.
    pub fn integrate_to_infinity<F: Fn(T) -> T>(&self, f: F, panel: T, split: T) -> Result<QuadResult<T>> {
        if !(panel > T::zero()) || !(split > T::zero()) {
            return Err(invalid("panel and split must be positive"));
        }
        let n = (split / panel).ceil().to_f64_lossy().max(1.0) as usize;
        let width = split / T::of_usize(n);
        let mut breakpoints: Vec<T> = (0..=n).map(|i| width * T::of_usize(i)).collect();
        breakpoints[n] = split;
        let head = self.integrate_partition(&f, &breakpoints)?;
        let mapped = |u: T| {
            let w = split / u;
            f(w) * split / (u * u)
        };
        // the tail only has to be accurate relative to the whole integral
        let floor = (T::of(0.5 * self.cfg.rel_tol) * head.value.abs()).max(T::of(self.cfg.abs_tol));
        let tail = self.partition_with_floor(mapped, &[T::zero(), T::one()], floor)?;
        let value = head.value + tail.value;
        let error = head.error_estimate + tail.error_estimate;
        let tol = (T::of(self.cfg.rel_tol) * value.abs()).max(T::of(self.cfg.abs_tol));
        Ok(QuadResult {
            value,
            error_estimate: error,
            subdivisions_used: head.subdivisions_used + tail.subdivisions_used,
            converged: error <= tol,
            evaluations: head.evaluations + tail.evaluations,
        })
    }
}

fn estimate_bound<T: Real, F: Fn(T) -> T>(f: &F, gaussian_width: T) -> TailBound<T> {
    let samples = 257;
    let span = T::of(3.0) / gaussian_width;
    let mut sup = T::zero();
    for i in 0..samples {
        let w = span * T::of_usize(i) / T::of_usize(samples - 1);
        let v = f(w).abs() * (w * w * gaussian_width * gaussian_width).exp();
        if v.is_finite() && v > sup {
            sup = v;
        }
    }
    TailBound { bound: sup * T::of(2.0), power: 0 }
}

/// One-shot finite-interval integration.
pub fn integrate_finite<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, cfg: &QuadConfig) -> Result<QuadResult<T>> {
    Integrator::new(*cfg)?.integrate_finite(f, a, b)
}

/// One-shot half-line integration; see [`Integrator::integrate_halfline`].
pub fn integrate_halfline<T: Real, F: Fn(T) -> T>(
    f: F,
    half_period: T,
    gaussian_width: T,
    bound: Option<TailBound<T>>,
    cfg: &QuadConfig,
) -> Result<QuadResult<T>> {
    Integrator::new(*cfg)?.integrate_halfline(f, half_period, gaussian_width, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::f128;
    use num_traits::Float;
    use std::f64::consts::PI;

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        let rule = GaussRule::<f64>::legendre(12);
        // degree 23 is the highest exact degree for 12 nodes
        for deg in [0usize, 1, 2, 7, 22] {
            let sum: f64 = rule.nodes().iter().zip(rule.weights()).map(|(x, w)| w * x.powi(deg as i32)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((sum - exact).abs() < 1e-14, "degree {deg}: {sum} vs {exact}");
        }
        let sum: f64 = rule.weights().iter().sum();
        assert!((sum - 2.0).abs() < 1e-15);
    }

    #[test]
    fn constant_is_exact() {
        let r = integrate_finite(|_| 1.0, 0.0, 1.0, &QuadConfig::default()).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(r.converged);
        assert!(r.error_estimate < 1e-15);
    }

    #[test]
    fn sine_over_half_period() {
        let r = integrate_finite(f64::sin, 0.0, PI, &QuadConfig::default()).unwrap();
        assert!((r.value - 2.0).abs() < 2e-10);
        assert!(r.converged);
    }

    #[test]
    fn reversed_bounds_rejected() {
        assert!(integrate_finite(|x| x, 1.0, 0.0, &QuadConfig::default()).is_err());
    }

    #[test]
    fn non_finite_sample_is_hard_error() {
        let err = integrate_finite(|x: f64| if x > 0.5 { f64::NAN } else { x }, 0.0, 1.0, &QuadConfig::default());
        assert!(matches!(err, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn budget_exhaustion_is_flagged_not_raised() {
        let cfg = QuadConfig { max_subdivisions: 1, rel_tol: 1e-14, ..QuadConfig::default() };
        let r = integrate_finite(|x: f64| (1.0 / (x + 1e-6)).sin(), 0.0, 1.0, &cfg).unwrap();
        assert!(!r.converged);
        assert_eq!(r.subdivisions_used, 1);
        assert!(r.require_converged().is_err());
    }

    #[test]
    fn gaussian_moment_on_half_line() {
        let r = integrate_halfline(|w: f64| w * (-w * w).exp(), 1.0, 1.0, None, &QuadConfig::default()).unwrap();
        assert!((r.value - 0.5).abs() < 0.5e-10);
        assert!(r.converged);
    }

    #[test]
    fn zero_integrand() {
        let r = integrate_halfline(|_| 0.0, 0.5, 1.0, None, &QuadConfig::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn halfline_rejects_bad_width() {
        let cfg = QuadConfig::default();
        assert!(integrate_halfline(|w: f64| w, 1.0, 0.0, None, &cfg).is_err());
        assert!(integrate_halfline(|w: f64| w, 1.0, f64::NAN, None, &cfg).is_err());
    }

    #[test]
    fn cutoff_meets_bound() {
        let q = Integrator::<f64>::new(QuadConfig::default()).unwrap();
        let r = 0.01;
        let b = TailBound { bound: 1.0, power: 0 };
        let w = q.tail_cutoff(r, b).unwrap();
        assert!(w * (-w * w * r * r).exp() <= 1e-16 * 1.0000001);
        assert!(w > 600.0 && w < 700.0);
    }

    #[test]
    fn mapped_tail_handles_power_decay() {
        let q = Integrator::<f64>::new(QuadConfig::default()).unwrap();
        let r = q.integrate_to_infinity(|w: f64| 1.0 / (1.0 + w * w), 1.0, 10.0).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn quad_precision_beats_double() {
        let cfg = QuadConfig { rel_tol: 1e-28, abs_tol: 0.0, ..QuadConfig::default() };
        let r = integrate_finite(|x: f128| x.exp(), f128::of(0.0), f128::of(1.0), &cfg).unwrap();
        let e = f128::of(1.0).exp() - f128::of(1.0);
        assert!(r.converged);
        assert!(((r.value - e).abs()).to_f64_lossy() < 1e-30);
    }

    fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut acc = crate::sum::CompensatedSum::new();
        for i in 0..n {
            acc.add(f(a + (i as f64 + 0.5) * h));
        }
        acc.value() * h
    }

    // mpmath at 40 digits
    const OSC_GAUSS_REF: f64 = 0.025031367926403672;
    const DAWSON_PANEL_REF: f64 = 0.044616744433487096;

    fn osc_gauss(x: f64) -> f64 {
        (40.0 * x).sin() * (-x * x).exp()
    }

    fn sin_over_l(w: f64) -> f64 {
        (5.0 * w).sin() / 5.0 * (-w * w).exp()
    }

    #[test]
    fn oscillatory_gaussian_matches_composite_rule() {
        let r = integrate_finite(osc_gauss, 0.0, 10.0, &QuadConfig::default()).unwrap();
        assert!(r.converged);
        let brute = midpoint(osc_gauss, 0.0, 10.0, 10_000_000);
        assert!(((r.value - brute) / brute).abs() < 1e-9, "{} vs {brute}", r.value);
        assert!(((r.value - OSC_GAUSS_REF) / OSC_GAUSS_REF).abs() < 1e-9);
    }

    #[test]
    fn halfline_sine_matches_composite_rule() {
        let r = integrate_halfline(sin_over_l, PI / 5.0, 1.0, None, &QuadConfig::default()).unwrap();
        assert!(r.converged);
        let brute = midpoint(sin_over_l, 0.0, 12.0, 10_000_000);
        assert!(((r.value - brute) / brute).abs() < 1e-9, "{} vs {brute}", r.value);
        assert!(((r.value - DAWSON_PANEL_REF) / DAWSON_PANEL_REF).abs() < 1e-10);
    }

    fn corpus() -> Vec<(Box<dyn Fn(f64) -> f64>, f64)> {
        vec![
            (Box::new(sin_over_l), PI / 5.0),
            (Box::new(|w: f64| w * (-w * w).exp()), 1.0),
            (Box::new(|w: f64| (3.0 * w).sin() * w * w * (-w * w).exp()), PI / 3.0),
            (Box::new(|w: f64| (w / (1.0 + w)) * (2.0 * w).cos() * (-w * w).exp()), PI / 2.0),
        ]
    }

    #[test]
    fn halving_panels_stays_within_error_estimate() {
        let cfg = QuadConfig::default();
        for (f, h) in corpus() {
            let coarse = integrate_halfline(&f, h, 1.0, None, &cfg).unwrap();
            let fine = integrate_halfline(&f, h / 2.0, 1.0, None, &cfg).unwrap();
            let change = (coarse.value - fine.value).abs();
            assert!(
                change <= coarse.error_estimate.max(fine.error_estimate),
                "change {change:e} vs estimates {:e}, {:e}",
                coarse.error_estimate,
                fine.error_estimate
            );
        }
    }

    #[test]
    fn repeated_runs_are_bit_identical() {
        let cfg = QuadConfig::default();
        for (f, h) in corpus() {
            let a = integrate_halfline(&f, h, 1.0, None, &cfg).unwrap();
            let b = integrate_halfline(&f, h, 1.0, None, &cfg).unwrap();
            assert_eq!(a.value.to_bits(), b.value.to_bits());
            assert_eq!(a.error_estimate.to_bits(), b.error_estimate.to_bits());
        }
    }

    #[test]
    fn extended_agrees_with_standard() {
        let cfg = QuadConfig::default();
        let std = integrate_halfline(sin_over_l, PI / 5.0, 1.0, None, &cfg).unwrap();
        let ext = integrate_halfline(
            |w: f128| (f128::of(5.0) * w).sin() / f128::of(5.0) * (-w * w).exp(),
            <f128 as num_traits::FloatConst>::PI() / f128::of(5.0),
            f128::of(1.0),
            None,
            &cfg.with_precision(Precision::Extended),
        )
        .unwrap();
        assert!((std.value - ext.value.to_f64_lossy()).abs() <= std.error_estimate);
        let std = integrate_finite(osc_gauss, 0.0, 10.0, &cfg).unwrap();
        let ext = integrate_finite(
            |x: f128| (f128::of(40.0) * x).sin() * (-x * x).exp(),
            f128::of(0.0),
            f128::of(10.0),
            &cfg,
        )
        .unwrap();
        assert!((std.value - ext.value.to_f64_lossy()).abs() <= std.error_estimate);
    }

    proptest::proptest! {
        #[test]
        fn integration_is_linear(
            alpha in -3.0f64..3.0,
            beta in -3.0f64..3.0,
            k in 0.5f64..20.0,
            c in 0.1f64..2.0,
        ) {
            let cfg = QuadConfig::default();
            let f = |x: f64| (k * x).sin() * (-x * x).exp();
            let g = |x: f64| (1.0 + c * x * x) * (-c * x).exp();
            let both = integrate_finite(|x| alpha * f(x) + beta * g(x), 0.0, 4.0, &cfg).unwrap();
            let fi = integrate_finite(f, 0.0, 4.0, &cfg).unwrap();
            let gi = integrate_finite(g, 0.0, 4.0, &cfg).unwrap();
            for r in [&both, &fi, &gi] {
                proptest::prop_assert!(r.error_estimate >= 0.0);
                if r.converged {
                    proptest::prop_assert!(r.error_estimate <= (cfg.rel_tol * r.value.abs()).max(cfg.abs_tol));
                }
            }
            let combined = alpha * fi.value + beta * gi.value;
            let scale = (alpha * fi.value).abs() + (beta * gi.value).abs();
            proptest::prop_assert!((both.value - combined).abs() <= 10.0 * cfg.rel_tol * scale + 1e-15);
        }
    }
}
