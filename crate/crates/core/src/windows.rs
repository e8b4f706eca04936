//! Frequency-domain switching functions ε̃(ω) and the superoscillatory
//! gap design.
//!
//! All windows are real and even in ω (real, time-symmetric ε(t)). The
//! superoscillating window is
//!
//! ```text
//! ε̃_A(ω) = f(ω) · J0( sqrt((ωT)² − N²((L/T)² − 1)) ),   f(ω) = sinc(ωT/2q)^q
//! ```
//!
//! with the Bessel function continued to I0 below the threshold
//! ωT = N·sqrt((L/T)² − 1). The hat window is sinc(ωT/k)^k.

use crate::error::{invalid, Error, Result};
use crate::quadrature::{Integrator, QuadConfig};
use crate::scalar::Real;
use crate::special::{bessel_i0, bessel_j0};

/// Largest superoscillation exponent N·sqrt((L/T)²−1) accepted; beyond it
/// I0² overflows a double during normalization.
pub const MAX_SUPEROSC_EXPONENT: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowKind<T> {
    SuperoscillatingBessel {
        /// Superoscillation index N.
        index: T,
        /// Separation L the design is tuned to.
        separation: T,
        /// Envelope order q of f(ω).
        envelope_order: u32,
    },
    ConvolvedHat {
        order: u32,
    },
    Gaussian,
}

impl<T> WindowKind<T> {
    pub fn name(&self) -> &'static str {
        match self {
            WindowKind::SuperoscillatingBessel { .. } => "superoscillating-bessel",
            WindowKind::ConvolvedHat { .. } => "convolved-hat",
            WindowKind::Gaussian => "gaussian",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec<T> {
    pub kind: WindowKind<T>,
    /// Interaction duration T.
    pub duration: T,
    pub amplitude: T,
}

fn sinc_pow<T: Real>(x: T, n: u32) -> T {
    if x == T::zero() {
        T::one()
    } else {
        (x.sin() / x).powi(n as i32)
    }
}

impl<T: Real> WindowSpec<T> {
    pub fn superoscillating(duration: T, index: T, separation: T, envelope_order: u32) -> Result<Self> {
        Self { kind: WindowKind::SuperoscillatingBessel { index, separation, envelope_order }, duration, amplitude: T::one() }
            .validated()
    }

    pub fn convolved_hat(duration: T, order: u32) -> Result<Self> {
        Self { kind: WindowKind::ConvolvedHat { order }, duration, amplitude: T::one() }.validated()
    }

    pub fn gaussian(duration: T) -> Result<Self> {
        Self { kind: WindowKind::Gaussian, duration, amplitude: T::one() }.validated()
    }

    pub fn with_amplitude(self, amplitude: T) -> Result<Self> {
        Self { amplitude, ..self }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > T::zero()) || !self.duration.is_finite() {
            return Err(invalid(format!("window duration T must be > 0, got {}", self.duration)));
        }
        if !(self.amplitude > T::zero()) || !self.amplitude.is_finite() {
            return Err(invalid(format!("window amplitude must be finite and > 0, got {}", self.amplitude)));
        }
        match self.kind {
            WindowKind::SuperoscillatingBessel { index, separation, envelope_order } => {
                if !(index >= T::one()) || !index.is_finite() {
                    return Err(invalid(format!("superoscillation index N must be >= 1, got {index}")));
                }
                if !(separation > self.duration) {
                    return Err(invalid(format!(
                        "superoscillatory design needs L > T (L = {separation}, T = {})",
                        self.duration
                    )));
                }
                if envelope_order < 2 {
                    return Err(invalid(format!("envelope order q must be >= 2, got {envelope_order}")));
                }
                let a = self.threshold_exponent();
                if !(a.to_f64_lossy() <= MAX_SUPEROSC_EXPONENT) {
                    return Err(invalid(format!(
                        "N·sqrt((L/T)²−1) = {a} exceeds {MAX_SUPEROSC_EXPONENT}; window not representable"
                    )));
                }
            }
            WindowKind::ConvolvedHat { order } => {
                if order < 1 {
                    return Err(invalid("hat convolution order k must be >= 1"));
                }
            }
            WindowKind::Gaussian => {}
        }
        Ok(())
    }

    /// N·sqrt((L/T)² − 1) for the superoscillating window, zero otherwise.
    pub fn threshold_exponent(&self) -> T {
        match self.kind {
            WindowKind::SuperoscillatingBessel { index, separation, .. } => {
                let r = separation / self.duration;
                index * (r * r - T::one()).max(T::zero()).sqrt()
            }
            _ => T::zero(),
        }
    }

    /// Window value divided by its amplitude.
    pub fn shape(&self, omega: T) -> T {
        let w = omega.abs();
        let t = self.duration;
        match self.kind {
            WindowKind::SuperoscillatingBessel { envelope_order: q, .. } => {
                let a = self.threshold_exponent();
                let envelope = sinc_pow(w * t / T::of(2.0 * q as f64), q);
                let wt = w * t;
                let z = wt * wt - a * a;
                if z >= T::zero() {
                    envelope * bessel_j0(z.sqrt())
                } else {
                    envelope * bessel_i0((-z).sqrt())
                }
            }
            WindowKind::ConvolvedHat { order } => sinc_pow(w * t / T::of(order as f64), order),
            WindowKind::Gaussian => (-(w * w * t * t) / T::of(4.0)).exp(),
        }
    }

    pub fn eval(&self, omega: T) -> T {
        self.amplitude * self.shape(omega)
    }

    /// Supremum of |shape| over [from, ∞) (pass `-inf` for the whole line).
    pub fn shape_sup_from(&self, from: T) -> T {
        match self.kind {
            WindowKind::SuperoscillatingBessel { .. } => {
                let a = self.threshold_exponent();
                let wt = from.max(T::zero()) * self.duration;
                if from <= T::zero() {
                    bessel_i0(a)
                } else if wt >= a {
                    T::one()
                } else {
                    bessel_i0((a * a - wt * wt).sqrt())
                }
            }
            _ => T::one(),
        }
    }

    /// Half-width of the time support of ε(t); infinite for the Gaussian.
    pub fn time_half_support(&self) -> T {
        match self.kind {
            WindowKind::SuperoscillatingBessel { .. } => self.duration * T::of(1.5),
            WindowKind::ConvolvedHat { .. } => self.duration,
            WindowKind::Gaussian => T::infinity(),
        }
    }

    /// ∫₀^∞ |ε̃(ω)|² dω.
    pub fn l2_norm_squared(&self, quad: &QuadConfig) -> Result<T> {
        let integrator = Integrator::<T>::new(*quad)?;
        let t = self.duration;
        let panel = T::PI() / (T::of(2.0) * t);
        let split = self.threshold_exponent() / t + T::of(60.0) / t;
        let shape = |w: T| {
            let v = self.shape(w);
            v * v
        };
        let r = integrator.integrate_to_infinity(shape, panel, split)?;
        let r = r.require_converged()?;
        Ok(r.value * self.amplitude * self.amplitude)
    }

    /// Rescales the amplitude to unit L² norm on [0, ∞).
    pub fn normalized(&self, quad: &QuadConfig) -> Result<Self> {
        let unit = Self { amplitude: T::one(), ..*self };
        let norm = unit.l2_norm_squared(quad)?;
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::NotConverged { value: norm.to_f64_lossy(), error: f64::NAN, subdivisions: 0 });
        }
        unit.with_amplitude(T::one() / norm.sqrt())
    }

    pub fn cast<U: Real>(&self) -> WindowSpec<U> {
        let c = |x: T| U::of(x.to_f64_lossy());
        WindowSpec {
            kind: match self.kind {
                WindowKind::SuperoscillatingBessel { index, separation, envelope_order } => {
                    WindowKind::SuperoscillatingBessel { index: c(index), separation: c(separation), envelope_order }
                }
                WindowKind::ConvolvedHat { order } => WindowKind::ConvolvedHat { order },
                WindowKind::Gaussian => WindowKind::Gaussian,
            },
            duration: c(self.duration),
            amplitude: c(self.amplitude),
        }
    }
}

pub fn eval_window<T: Real>(spec: &WindowSpec<T>, omega: T) -> T {
    spec.eval(omega)
}

pub fn normalize_window<T: Real>(spec: &WindowSpec<T>, quad: &QuadConfig) -> Result<WindowSpec<T>> {
    spec.normalized(quad)
}

/// Detector gaps placing the hat window of B inside A's superoscillation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectedGaps<T> {
    pub omega_a: T,
    pub omega_b: T,
    /// Superoscillation centre ω_s, with T·ω_s = N·L/T.
    pub omega_s: T,
    /// Large-L approximation N/(2L) of Ω_B, for diagnostics.
    pub omega_b_approx: T,
}

fn check_design<T: Real>(n: T, l: T, t: T) -> Result<()> {
    if !(t > T::zero()) || !(l > t) {
        return Err(invalid(format!("gap selection needs L > T > 0 (L = {l}, T = {t})")));
    }
    if !(n >= T::one()) || !n.is_finite() {
        return Err(invalid(format!("superoscillation index N must be >= 1, got {n}")));
    }
    Ok(())
}

pub fn select_gaps<T: Real>(n: T, l: T, t: T) -> Result<SelectedGaps<T>> {
    check_design(n, l, t)?;
    let r = l / t;
    let omega_a = n / t * (r * r - T::one()).sqrt();
    let omega_s = n * l / (t * t);
    Ok(SelectedGaps { omega_a, omega_b: omega_s - omega_a, omega_s, omega_b_approx: n / (T::of(2.0) * l) })
}

/// [ω_s − √N/(2L), ω_s + √N/(2L)], where A oscillates like sin(ωL).
pub fn superosc_band<T: Real>(n: T, l: T, t: T) -> Result<(T, T)> {
    let gaps = select_gaps(n, l, t)?;
    let half = n.sqrt() / (T::of(2.0) * l);
    Ok((gaps.omega_s - half, gaps.omega_s + half))
}
