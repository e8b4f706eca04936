//! Bessel functions J0 and I0 in any working precision.
//!
//! Small arguments use the periodic trapezoid rule on the integral
//! representations
//!
//! ```text
//! J0(z) = (1/2π) ∫ cos(z sin θ) dθ,    I0(z) = (1/2π) ∫ exp(z cos θ) dθ,
//! ```
//!
//! whose aliasing error is 2·J_M(z) (resp. 2·I_M(z)/I0(z)) for an M-point
//! rule. Large arguments use the Hankel asymptotic series, whose smallest
//! term is about e^{-2z}; the switch point is where that drops below the
//! scalar's epsilon.

use crate::scalar::Real;

fn asymptotic_threshold<T: Real>() -> T {
    T::of(0.5) * (-T::epsilon().ln()) + T::of(6.0)
}

/// Bessel function of the first kind, order zero.
pub fn bessel_j0<T: Real>(x: T) -> T {
    let z = x.abs();
    if z.is_nan() {
        return z;
    }
    if z < asymptotic_threshold::<T>() {
        j0_trapezoid(z)
    } else {
        j0_asymptotic(z)
    }
}

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0<T: Real>(x: T) -> T {
    let z = x.abs();
    if z.is_nan() {
        return z;
    }
    if z < asymptotic_threshold::<T>() {
        i0_trapezoid(z)
    } else {
        i0_asymptotic(z)
    }
}

fn nodes_for(z: f64) -> usize {
    // M = 4m points, M >= 2z + 40 keeps J_M(z) and I_M(z)/I0(z) below 1e-35
    // on the range where the trapezoid branch is used.
    let m = ((2.0 * z + 40.0) / 4.0).ceil() as usize;
    m.max(2)
}

fn j0_trapezoid<T: Real>(z: T) -> T {
    // Quarter-period folding of the 4m-point rule: θ_j = π j / (2m).
    let m = nodes_for(z.to_f64_lossy());
    let step = T::FRAC_PI_2() / T::of_usize(m);
    let mut inner = crate::sum::CompensatedSum::new();
    for j in 1..m {
        let s = (step * T::of_usize(j)).sin();
        inner.add((z * s).cos());
    }
    let ends = T::one() + z.cos();
    (T::of(2.0) * ends + T::of(4.0) * inner.value()) / T::of_usize(4 * m)
}

fn i0_trapezoid<T: Real>(z: T) -> T {
    // 2m-point rule folded onto θ_j = π j / m, j = 0..=m.
    let m = 2 * nodes_for(z.to_f64_lossy());
    let step = T::PI() / T::of_usize(m);
    let mut inner = crate::sum::CompensatedSum::new();
    for j in 1..m {
        inner.add((z * (step * T::of_usize(j)).cos()).exp());
    }
    (z.exp() + (-z).exp() + T::of(2.0) * inner.value()) / T::of_usize(2 * m)
}

/// Terms b_k = Π_{j≤k} (2j-1)² / (j·8z) of the order-zero Hankel series.
/// Summation stops once terms fall below epsilon or start to grow.
fn hankel_terms<T: Real>(z: T, mut visit: impl FnMut(usize, T)) {
    let eps = T::epsilon();
    let eight_z = T::of(8.0) * z;
    let mut b = T::one();
    visit(0, b);
    for k in 1..400 {
        let odd = T::of_usize(2 * k - 1);
        let next = b * odd * odd / (T::of_usize(k) * eight_z);
        if next > b {
            break;
        }
        b = next;
        visit(k, b);
        if b < eps * T::of(1e-3) {
            break;
        }
    }
}

fn j0_asymptotic<T: Real>(z: T) -> T {
    let mut p = T::zero();
    let mut q = T::zero();
    hankel_terms(z, |k, b| {
        let sign = if (k / 2) % 2 == 0 { T::one() } else { -T::one() };
        if k % 2 == 0 {
            p = p + sign * b;
        } else {
            q = q - sign * b;
        }
    });
    let (s, c) = z.sin_cos();
    // cos(z - π/4) and sin(z - π/4) without losing the reduction of z
    let root_half = T::FRAC_1_SQRT_2();
    let cos_chi = (c + s) * root_half;
    let sin_chi = (s - c) * root_half;
    (T::of(2.0) / (T::PI() * z)).sqrt() * (p * cos_chi - q * sin_chi)
}

fn i0_asymptotic<T: Real>(z: T) -> T {
    let mut series = T::zero();
    hankel_terms(z, |_, b| series = series + b);
    z.exp() / (T::of(2.0) * T::PI() * z).sqrt() * series
}
