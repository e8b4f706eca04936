//! Second-order matrix elements of the two-detector state as frequency
//! integrals over the radial field-mode variable ω.
//!
//! With unit couplings factored out, the five elements are
//!
//! ```text
//! X0   = (1/L) ∫ sin(ωL) μ(ω) e^{-ω²R²} ε̃_A(Ω_A+ω) ε̃_B(Ω_B-ω) dω
//! ‖E‖² =       ∫ ω μ(ω) e^{-ω²R²} |ε̃(Ω+ω)|² dω
//! EAB  = (1/L) ∫ sin(ωL) μ(ω) e^{-ω²R²} ε̃_A(Ω_A+ω)* ε̃_B(Ω_B+ω) dω
//! ‖X‖² = ‖E_A‖²‖E_B‖² + |EAB|² + |X0|²
//! ```
//!
//! where μ(ω) = ω/sqrt(ω²+m²). Two-detector integrals use
//! R² = (R_A² + R_B²)/2.

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{Integrator, QuadConfig, QuadResult, TailBound};
use crate::scalar::{f128, Precision, Real};
use crate::windows::WindowSpec;

/// Emission norms at or above this are outside the perturbative regime.
pub const PERTURBATIVE_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig<T> {
    /// Energy gap Ω.
    pub gap: T,
    /// Smearing radius R.
    pub smearing: T,
    pub window: WindowSpec<T>,
    /// Overall coupling ε₀.
    pub coupling: T,
}

impl<T: Real> DetectorConfig<T> {
    pub fn new(gap: T, smearing: T, window: WindowSpec<T>, coupling: T) -> Result<Self> {
        let d = Self { gap, smearing, window, coupling };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gap >= T::zero()) || !self.gap.is_finite() {
            return Err(invalid(format!("gap must be finite and >= 0, got {}", self.gap)));
        }
        if !(self.smearing > T::zero()) || !self.smearing.is_finite() {
            return Err(invalid(format!("smearing radius R must be > 0, got {}", self.smearing)));
        }
        if !(self.coupling >= T::zero()) || !self.coupling.is_finite() {
            return Err(invalid(format!("coupling must be finite and >= 0, got {}", self.coupling)));
        }
        self.window.validate()
    }

    pub fn cast<U: Real>(&self) -> DetectorConfig<U> {
        DetectorConfig {
            gap: U::of(self.gap.to_f64_lossy()),
            smearing: U::of(self.smearing.to_f64_lossy()),
            window: self.window.cast(),
            coupling: U::of(self.coupling.to_f64_lossy()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairConfig<T> {
    pub det_a: DetectorConfig<T>,
    pub det_b: DetectorConfig<T>,
    pub separation: T,
    pub field_mass: T,
}

impl<T: Real> PairConfig<T> {
    pub fn new(det_a: DetectorConfig<T>, det_b: DetectorConfig<T>, separation: T, field_mass: T) -> Result<Self> {
        let p = Self { det_a, det_b, separation, field_mass };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.det_a.validate()?;
        self.det_b.validate()?;
        let l = self.separation;
        if !(l > T::zero()) || !l.is_finite() {
            return Err(invalid(format!("separation L must be > 0, got {l}")));
        }
        if !(self.field_mass >= T::zero()) || !self.field_mass.is_finite() {
            return Err(invalid(format!("field mass must be >= 0, got {}", self.field_mass)));
        }
        for (name, det) in [("A", &self.det_a), ("B", &self.det_b)] {
            let t = det.window.duration;
            if !(l > t) {
                return Err(invalid(format!("detectors not causally disconnected: L = {l} <= T_{name} = {t}")));
            }
            if l < T::of(3.0) * t {
                log::warn!("L = {l} < 3·T_{name}; the short-interaction regime cT << L is not well satisfied");
            }
        }
        Ok(())
    }

    /// Relabels A ↔ B.
    pub fn swapped(&self) -> Self {
        Self { det_a: self.det_b, det_b: self.det_a, ..*self }
    }

    /// R² used in the two-detector integrals.
    pub fn pair_smearing_sq(&self) -> T {
        let (ra, rb) = (self.det_a.smearing, self.det_b.smearing);
        (ra * ra + rb * rb) * T::of(0.5)
    }

    pub fn cast<U: Real>(&self) -> PairConfig<U> {
        PairConfig {
            det_a: self.det_a.cast(),
            det_b: self.det_b.cast(),
            separation: U::of(self.separation.to_f64_lossy()),
            field_mass: U::of(self.field_mass.to_f64_lossy()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeSet<T> {
    /// Exchange amplitude ⟨0|X_AB⟩.
    pub x0: Complex<T>,
    pub n_ea2: T,
    pub n_eb2: T,
    /// Overlap ⟨E_A|E_B⟩.
    pub eab: Complex<T>,
    /// Two-photon norm ‖X_AB‖².
    pub n_x2: T,
    /// Sum of the quadrature error estimates of the four integrals.
    pub error_budget: T,
}

impl<T: Real> AmplitudeSet<T> {
    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self { x0: z, n_ea2: T::zero(), n_eb2: T::zero(), eab: z, n_x2: T::zero(), error_budget: T::zero() }
    }

    /// |X0| − ‖E_A‖‖E_B‖.
    pub fn entanglement_margin(&self) -> T {
        self.x0.norm() - (self.n_ea2 * self.n_eb2).sqrt()
    }

    /// Checks Cauchy–Schwarz and nX2 ≥ |X0|², allowing `slack` for each.
    pub fn check_invariants(&self, slack: T) -> Result<()> {
        let cs = self.eab.norm_sqr() - self.n_ea2 * self.n_eb2;
        if cs > slack {
            return Err(Error::Inconsistent {
                which: "Cauchy-Schwarz |EAB|^2 <= nEA2 nEB2",
                excess: cs.to_f64_lossy(),
                budget: slack.to_f64_lossy(),
            });
        }
        let vac = self.x0.norm_sqr() - self.n_x2;
        if vac > slack {
            return Err(Error::Inconsistent {
                which: "nX2 >= |X0|^2",
                excess: vac.to_f64_lossy(),
                budget: slack.to_f64_lossy(),
            });
        }
        Ok(())
    }

    pub fn cast<U: Real>(&self) -> AmplitudeSet<U> {
        let c = |x: T| U::of(x.to_f64_lossy());
        let cc = |z: Complex<T>| Complex::new(c(z.re), c(z.im));
        AmplitudeSet {
            x0: cc(self.x0),
            n_ea2: c(self.n_ea2),
            n_eb2: c(self.n_eb2),
            eab: cc(self.eab),
            n_x2: c(self.n_x2),
            error_budget: c(self.error_budget),
        }
    }
}

/// ω/sqrt(ω²+m²), identically 1 for m = 0.
pub fn mode_measure<T: Real>(omega: T, mass: T) -> T {
    if mass == T::zero() {
        T::one()
    } else {
        omega / (omega * omega + mass * mass).sqrt()
    }
}

fn sup_from<T: Real>(det: &DetectorConfig<T>, from: T) -> T {
    det.window.amplitude * det.window.shape_sup_from(from)
}

fn exchange_integral<T: Real>(pair: &PairConfig<T>, q: &Integrator<T>) -> Result<QuadResult<T>> {
    let (a, b) = (&pair.det_a, &pair.det_b);
    let l = pair.separation;
    let r2 = pair.pair_smearing_sq();
    let m = pair.field_mass;
    let f = |w: T| {
        (w * l).sin() / l
            * mode_measure(w, m)
            * (-w * w * r2).exp()
            * a.window.eval(a.gap + w)
            * b.window.eval(b.gap - w)
    };
    let bound = sup_from(a, a.gap) * sup_from(b, T::neg_infinity()) / l;
    q.integrate_halfline(f, T::PI() / l, r2.sqrt(), Some(TailBound { bound, power: 0 }))?
        .require_converged()
}

fn emission_integral<T: Real>(det: &DetectorConfig<T>, mass: T, q: &Integrator<T>) -> Result<QuadResult<T>> {
    let r2 = det.smearing * det.smearing;
    let f = |w: T| {
        let e = det.window.eval(det.gap + w);
        w * mode_measure(w, mass) * (-w * w * r2).exp() * e * e
    };
    let sup = sup_from(det, det.gap);
    let panel = T::PI() / (T::of(2.0) * det.window.duration);
    q.integrate_halfline(f, panel, det.smearing, Some(TailBound { bound: sup * sup, power: 1 }))?
        .require_converged()
}

fn overlap_integral<T: Real>(pair: &PairConfig<T>, q: &Integrator<T>) -> Result<QuadResult<T>> {
    let (a, b) = (&pair.det_a, &pair.det_b);
    let l = pair.separation;
    let r2 = pair.pair_smearing_sq();
    let m = pair.field_mass;
    let f = |w: T| {
        (w * l).sin() / l
            * mode_measure(w, m)
            * (-w * w * r2).exp()
            * a.window.eval(a.gap + w)
            * b.window.eval(b.gap + w)
    };
    let bound = sup_from(a, a.gap) * sup_from(b, b.gap) / l;
    q.integrate_halfline(f, T::PI() / l, r2.sqrt(), Some(TailBound { bound, power: 0 }))?
        .require_converged()
}

/// ⟨0|X_AB⟩.
pub fn exchange_amplitude<T: Real>(pair: &PairConfig<T>, quad: &QuadConfig) -> Result<Complex<T>> {
    pair.validate()?;
    let q = Integrator::new(*quad)?;
    let r = exchange_integral(pair, &q)?;
    Ok(Complex::new(r.value * pair.det_a.coupling * pair.det_b.coupling, T::zero()))
}

/// ‖E‖² of a single detector in a field of mass `mass`.
pub fn emission_norm<T: Real>(det: &DetectorConfig<T>, mass: T, quad: &QuadConfig) -> Result<T> {
    det.validate()?;
    if !(mass >= T::zero()) {
        return Err(invalid(format!("field mass must be >= 0, got {mass}")));
    }
    let q = Integrator::new(*quad)?;
    let r = emission_integral(det, mass, &q)?;
    Ok(r.value * det.coupling * det.coupling)
}

/// ⟨E_A|E_B⟩.
pub fn cross_overlap<T: Real>(pair: &PairConfig<T>, quad: &QuadConfig) -> Result<Complex<T>> {
    pair.validate()?;
    let q = Integrator::new(*quad)?;
    let r = overlap_integral(pair, &q)?;
    Ok(Complex::new(r.value * pair.det_a.coupling * pair.det_b.coupling, T::zero()))
}

/// ‖X_AB‖² from the other four elements.
pub fn x_norm_squared<T: Real>(x0: Complex<T>, n_ea2: T, n_eb2: T, eab: Complex<T>) -> T {
    n_ea2 * n_eb2 + eab.norm_sqr() + x0.norm_sqr()
}

/// All five elements with their combined error budget.
pub fn compute_amplitudes<T: Real>(pair: &PairConfig<T>, quad: &QuadConfig) -> Result<AmplitudeSet<T>> {
    pair.validate()?;
    let q = Integrator::new(*quad)?;
    let (ea, eb) = (pair.det_a.coupling, pair.det_b.coupling);

    let x = exchange_integral(pair, &q)?.scaled(ea * eb);
    let na = emission_integral(&pair.det_a, pair.field_mass, &q)?.scaled(ea * ea);
    let nb = emission_integral(&pair.det_b, pair.field_mass, &q)?.scaled(eb * eb);
    let o = overlap_integral(pair, &q)?.scaled(ea * eb);

    let x0 = Complex::new(x.value, T::zero());
    let eab = Complex::new(o.value, T::zero());
    let amps = AmplitudeSet {
        x0,
        n_ea2: na.value,
        n_eb2: nb.value,
        eab,
        n_x2: x_norm_squared(x0, na.value, nb.value, eab),
        error_budget: x.error_estimate + na.error_estimate + nb.error_estimate + o.error_estimate,
    };

    let limit = T::of(PERTURBATIVE_LIMIT);
    for (name, v) in [("A", amps.n_ea2), ("B", amps.n_eb2)] {
        if !(v < limit) {
            return Err(Error::NonPerturbative {
                what: format!("emission norm of detector {name}"),
                value: v.to_f64_lossy(),
                limit: PERTURBATIVE_LIMIT,
            });
        }
    }
    // first-order propagation of the integral errors into |EAB|² − nEA2·nEB2
    let two = T::of(2.0);
    let slack = two * o.value.abs() * o.error_estimate
        + amps.n_ea2 * nb.error_estimate
        + amps.n_eb2 * na.error_estimate
        + o.error_estimate * o.error_estimate
        + na.error_estimate * nb.error_estimate;
    amps.check_invariants(slack)?;
    Ok(amps)
}

/// Runs [`compute_amplitudes`] in the working precision named by
/// `quad.precision` and returns the result in double precision.
pub fn compute_amplitudes_f64(pair: &PairConfig<f64>, quad: &QuadConfig) -> Result<AmplitudeSet<f64>> {
    match quad.precision {
        Precision::Standard => compute_amplitudes(pair, quad),
        Precision::Extended => compute_amplitudes(&pair.cast::<f128>(), quad).map(|a| a.cast()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::windows::{select_gaps, WindowSpec};

    fn quad() -> QuadConfig {
        QuadConfig::default()
    }

    fn gaussian_det(gap: f64, r: f64, eps: f64) -> DetectorConfig<f64> {
        DetectorConfig::new(gap, r, WindowSpec::gaussian(1.0).unwrap(), eps).unwrap()
    }

    fn hat_det(gap: f64, k: u32, eps: f64) -> DetectorConfig<f64> {
        DetectorConfig::new(gap, 0.01, WindowSpec::convolved_hat(1.0, k).unwrap(), eps).unwrap()
    }

    fn reference_preset(eps: f64) -> PairConfig<f64> {
        let (n, l) = (4.0, 2.0);
        let g = select_gaps(n, l, 1.0).unwrap();
        let wa = WindowSpec::superoscillating(1.0, n, l, 2).unwrap().normalized(&quad()).unwrap();
        let wb = WindowSpec::convolved_hat(1.0, 6).unwrap().normalized(&quad()).unwrap();
        let a = DetectorConfig::new(g.omega_a, 0.01, wa, eps).unwrap();
        let b = DetectorConfig::new(g.omega_b, 0.01, wb, eps).unwrap();
        PairConfig::new(a, b, l, 0.0).unwrap()
    }

    #[test]
    fn gaussian_emission_closed_form() {
        for (r, eps) in [(0.01, 1e-3), (0.5, 0.2), (1.0, 1.0)] {
            let det = gaussian_det(0.0, r, eps);
            let got = emission_norm(&det, 0.0, &quad()).unwrap();
            let want = eps * eps / (2.0 * (r * r + 0.5));
            assert!(((got - want) / want).abs() < 1e-10, "R={r}: {got} vs {want}");
        }
    }

    #[test]
    fn gaussian_exchange_matches_dawson_value() {
        // (1/L)·a^{-1/2}·D(L/(2√a)), a = R² + T²/2, from mpmath at 30 digits
        let pair = PairConfig::new(gaussian_det(0.0, 0.01, 1.0), gaussian_det(0.0, 0.01, 1.0), 3.0, 0.0).unwrap();
        let got = exchange_amplitude(&pair, &quad()).unwrap();
        let want = 0.13106047054831495;
        assert!(((got.re - want) / want).abs() < 1e-10, "{} vs {want}", got.re);
        assert_eq!(got.im, 0.0);
    }

    #[test]
    fn gaussian_exchange_matches_composite_rule() {
        let (l, r) = (3.0, 0.01);
        let pair = PairConfig::new(gaussian_det(0.0, r, 1.0), gaussian_det(0.0, r, 1.0), l, 0.0).unwrap();
        let got = exchange_amplitude(&pair, &quad()).unwrap().re;
        let a = r * r + 0.5;
        let f = |w: f64| (w * l).sin() / l * (-w * w * a).exp();
        // composite Simpson, 10⁷ intervals on [0, 12]
        let n = 10_000_000usize;
        let h = 12.0 / n as f64;
        let mut s = crate::sum::CompensatedSum::new();
        s.add(f(0.0) + f(12.0));
        for i in 1..n {
            s.add(if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h));
        }
        let want = s.value() * h / 3.0;
        assert!(((got - want) / want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn zero_coupling_gives_zero() {
        let mut pair = reference_preset(1e-3);
        pair.det_a.coupling = 0.0;
        let amps = compute_amplitudes(&pair, &quad()).unwrap();
        assert_eq!(amps.x0.norm(), 0.0);
        assert_eq!(amps.eab.norm(), 0.0);
        assert_eq!(amps.n_ea2, 0.0);
        assert!(amps.n_eb2 > 0.0);
        assert_eq!(amps.n_x2, 0.0);
        pair.det_b.coupling = 0.0;
        let amps = compute_amplitudes(&pair, &quad()).unwrap();
        assert_eq!(amps, AmplitudeSet::zero());
    }

    #[test]
    fn couplings_scale_exactly() {
        let base = compute_amplitudes(&reference_preset(1e-3), &quad()).unwrap();
        let twice = compute_amplitudes(&reference_preset(2e-3), &quad()).unwrap();
        let close = |x: f64, y: f64| ((x - y) / y).abs() < 1e-13;
        assert!(close(twice.x0.re, 4.0 * base.x0.re));
        assert!(close(twice.eab.re, 4.0 * base.eab.re));
        assert!(close(twice.n_ea2, 4.0 * base.n_ea2));
        assert!(close(twice.n_eb2, 4.0 * base.n_eb2));

        let mut only_a = reference_preset(1e-3);
        only_a.det_a.coupling = 2e-3;
        let one = compute_amplitudes(&only_a, &quad()).unwrap();
        assert!(close(one.x0.re, 2.0 * base.x0.re));
        assert!(close(one.n_ea2, 4.0 * base.n_ea2));
        assert!(close(one.n_eb2, base.n_eb2));
    }

    #[test]
    fn reference_point_values() {
        // independent prototype with scipy quadrature and a 7·10⁶-point composite rule
        let amps = compute_amplitudes(&reference_preset(1e-3), &quad()).unwrap();
        let close = |x: f64, y: f64, tol: f64| ((x * 1e6 - y) / y).abs() < tol;
        assert!(close(amps.x0.re, -6.47e-5, 5e-3), "X0 {}", amps.x0.re);
        assert!(close(amps.n_ea2, 1.98e-7, 5e-3), "nEA2 {}", amps.n_ea2);
        assert!(close(amps.n_eb2, 1.423, 5e-3), "nEB2 {}", amps.n_eb2);
        assert!(close(amps.eab.re, -5.46e-5, 5e-3), "EAB {}", amps.eab.re);
    }

    #[test]
    fn massless_limit_is_continuous() {
        let pair = reference_preset(1e-3);
        let m0 = compute_amplitudes(&pair, &quad()).unwrap();
        let m1 = compute_amplitudes(&PairConfig { field_mass: 1e-6, ..pair }, &quad()).unwrap();
        let tol = 10.0 * m0.error_budget;
        assert!((m0.x0 - m1.x0).norm() <= tol);
        assert!((m0.eab - m1.eab).norm() <= tol);
        assert!((m0.n_ea2 - m1.n_ea2).abs() <= tol);
        // the emission norm moves by about (m²/2)·ln(1/m)·|ε̃_B(Ω_B)|²
        assert!(((m0.n_eb2 - m1.n_eb2) / m0.n_eb2).abs() < 1e-11);
    }

    #[test]
    fn emission_decreases_with_mass() {
        let det = hat_det(2.0, 6, 1e-2);
        let vals: Vec<f64> = [0.0, 1.0, 10.0].iter().map(|&m| emission_norm(&det, m, &quad()).unwrap()).collect();
        assert!(vals[0] > vals[1] && vals[1] > vals[2], "{vals:?}");
    }

    #[test]
    fn emission_decreases_off_resonance() {
        let vals: Vec<f64> =
            [5.0, 10.0, 20.0].iter().map(|&g| emission_norm(&hat_det(g, 6, 1e-2), 0.0, &quad()).unwrap()).collect();
        assert!(vals[0] > vals[1] && vals[1] > vals[2], "{vals:?}");
    }

    #[test]
    fn swap_relabels_elements_for_causal_pairs() {
        let pair = PairConfig::new(hat_det(3.0, 6, 1e-2), hat_det(1.5, 4, 2e-2), 5.0, 0.0).unwrap();
        let p = compute_amplitudes(&pair, &quad()).unwrap();
        let s = compute_amplitudes(&pair.swapped(), &quad()).unwrap();
        let scale = p.x0.norm().max(p.eab.norm());
        assert!((p.x0 - s.x0).norm() < 1e-8 * scale, "{} vs {}", p.x0, s.x0);
        assert!((p.eab - s.eab.conj()).norm() < 1e-8 * scale);
        assert_eq!(p.n_ea2, s.n_eb2);
        assert_eq!(p.n_eb2, s.n_ea2);
    }

    #[test]
    fn disjoint_supports_suppress_overlap() {
        // |ε̃_B(Ω_B+ω)| on ω ≥ 0 is confined to ω ≲ 1/(Ω_B T²), well below the
        // first zero of sin(ωL) for large L
        let pair = PairConfig::new(gaussian_det(0.0, 0.1, 1e-2), gaussian_det(10.0, 0.1, 1e-2), 300.0, 0.0).unwrap();
        let cfg = QuadConfig { abs_tol: 1e-60, ..quad() };
        let eab = cross_overlap(&pair, &cfg).unwrap();
        let na = emission_norm(&pair.det_a, 0.0, &cfg).unwrap();
        let nb = emission_norm(&pair.det_b, 0.0, &cfg).unwrap();
        let ratio = eab.norm_sqr() / (na * nb);
        assert!(ratio < 1e-6, "ratio {ratio:e}");
    }

    #[test]
    fn overlap_falls_with_distance() {
        let near = PairConfig::new(hat_det(2.0, 6, 1e-2), hat_det(2.0, 6, 1e-2), 5.0, 0.0).unwrap();
        let far = PairConfig { separation: 50.0, ..near };
        let a = cross_overlap(&near, &quad()).unwrap();
        let b = cross_overlap(&far, &quad()).unwrap();
        assert!(b.norm() < a.norm(), "{} vs {}", b.norm(), a.norm());
    }

    #[test]
    fn emission_grows_faster_than_exchange_falls_off_resonance() {
        // nEA2·nEB2/|X0| as both gaps move off resonance
        let ratios: Vec<f64> = [1.0, 2.0, 4.0]
            .iter()
            .map(|&g| {
                let pair = PairConfig::new(hat_det(g, 6, 1e-2), hat_det(g, 6, 1e-2), 5.0, 0.0).unwrap();
                let a = compute_amplitudes(&pair, &quad()).unwrap();
                a.n_ea2 * a.n_eb2 / a.x0.norm()
            })
            .collect();
        assert!(ratios[0] > ratios[1] && ratios[1] > ratios[2], "{ratios:?}");
    }

    #[test]
    fn wick_combination_special_cases() {
        let z = Complex::new(0.0, 0.0);
        assert_eq!(x_norm_squared(z, 0.3, 0.2, z), 0.3 * 0.2);
        assert_eq!(x_norm_squared(z, 0.0, 0.0, z), 0.0);
    }

    #[test]
    fn invariants_hold_on_reference_point() {
        let amps = compute_amplitudes(&reference_preset(1e-3), &quad()).unwrap();
        assert!(amps.eab.norm_sqr() <= amps.n_ea2 * amps.n_eb2);
        assert!(amps.n_x2 >= amps.x0.norm_sqr());
        assert!(amps.error_budget > 0.0 && amps.error_budget < 1e-9 * amps.x0.norm());
    }

    #[test]
    fn causality_guard() {
        let d = hat_det(1.0, 6, 1e-3);
        assert!(PairConfig::new(d, d, 0.9, 0.0).is_err());
        assert!(PairConfig::new(d, d, 1.0, 0.0).is_err());
        assert!(PairConfig::new(d, d, -2.0, 0.0).is_err());
        assert!(PairConfig::new(d, d, 2.0, -1.0).is_err());
        assert!(DetectorConfig::new(1.0, 0.0, d.window, 1e-3).is_err());
    }

    #[test]
    fn non_perturbative_coupling_rejected() {
        assert!(compute_amplitudes(&reference_preset(1.0), &quad()).is_err());
        let err = compute_amplitudes(&reference_preset(0.3), &quad()).unwrap_err();
        assert!(matches!(err, Error::NonPerturbative { .. }), "{err}");
        assert!(compute_amplitudes(&reference_preset(0.1), &quad()).is_ok());
    }

    #[test]
    fn extended_precision_agrees() {
        let pair = reference_preset(1e-3);
        let cfg = quad();
        let std = compute_amplitudes_f64(&pair, &cfg).unwrap();
        let ext = compute_amplitudes_f64(&pair, &cfg.with_precision(Precision::Extended)).unwrap();
        assert!((std.x0 - ext.x0).norm() <= std.error_budget + 1e-15 * std.x0.norm());
        assert!((std.n_eb2 - ext.n_eb2).abs() <= std.error_budget + 1e-15 * std.n_eb2);
    }
}
