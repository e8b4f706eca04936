//! Two-detector density matrix, negativity, Horodecki's CHSH measure and
//! local filtering.
//!
//! Basis order is {↑↑, ↑↓, ↓↑, ↓↓}; the index of |a b⟩ is 2a + b with
//! ↑ = 0 and ↓ = 1. Pauli σ_z is diag(1, −1) in the {↑, ↓} basis.

use num_complex::Complex;

use crate::amplitudes::AmplitudeSet;
use crate::error::{invalid, Error, Result};
use crate::linalg::{hermitian_eigen, symmetric_eigen, trace, zero, Matrix};
use crate::scalar::Real;

/// Most negative eigenvalue accepted when a state is constructed.
pub const TOL_PSD: f64 = 1e-12;
const TOL_HERMITIAN: f64 = 1e-14;
/// Largest nEA2 + nEB2 accepted by [`build_state`].
pub const PERTURBATIVE_SUM_LIMIT: f64 = 0.2;
/// Filter success probabilities below this are treated as annihilation.
pub const MIN_SUCCESS_PROB: f64 = 1e-300;

const FILTER_GRID: usize = 64;
const FILTER_LN_TOL: f64 = 1e-10;
const FILTER_FLOOR: f64 = 1e-150;

type C<T> = Complex<T>;

fn c<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState<T> {
    pub matrix: Matrix<T, 4>,
    pub trace_before_normalization: T,
}

impl<T: Real> TwoQubitState<T> {
    /// Normalizes `matrix` by its trace and validates it.
    pub fn from_matrix(matrix: Matrix<T, 4>) -> Result<Self> {
        Self::with_tolerance(matrix, T::of(TOL_PSD))
    }

    pub fn with_tolerance(mut matrix: Matrix<T, 4>, tol_psd: T) -> Result<Self> {
        let scale = matrix.iter().flatten().fold(T::zero(), |m, z| m.max(z.norm()));
        if !scale.is_finite() {
            return Err(invalid("density matrix has non-finite entries"));
        }
        for i in 0..4 {
            for j in 0..4 {
                if (matrix[i][j] - matrix[j][i].conj()).norm() > T::of(TOL_HERMITIAN) * scale {
                    return Err(invalid(format!("density matrix is not Hermitian at ({i}, {j})")));
                }
            }
        }
        let tr = trace(&matrix).re;
        if !(tr > T::zero()) {
            return Err(invalid(format!("density matrix trace must be > 0, got {tr}")));
        }
        for z in matrix.iter_mut().flatten() {
            *z = *z / tr;
        }
        let min = hermitian_eigen(&matrix).values[0];
        if min < -tol_psd {
            return Err(Error::NotPositive { min_eigenvalue: min.to_f64_lossy() });
        }
        Ok(Self { matrix, trace_before_normalization: tr })
    }

    /// Projector onto a normalized pure state.
    pub fn pure(psi: [C<T>; 4]) -> Result<Self> {
        let mut m = zero();
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = psi[i] * psi[j].conj();
            }
        }
        Self::from_matrix(m)
    }

    /// |↓↓⟩⟨↓↓|.
    pub fn ground() -> Self {
        let mut m = zero();
        m[3][3] = c(T::one());
        Self { matrix: m, trace_before_normalization: T::one() }
    }

    /// (|↑↑⟩ − |↓↓⟩)/√2.
    pub fn bell() -> Self {
        let h = c(T::of(0.5));
        let mut m = zero();
        m[0][0] = h;
        m[3][3] = h;
        m[0][3] = -h;
        m[3][0] = -h;
        Self { matrix: m, trace_before_normalization: T::one() }
    }

    /// p·|ψ⁻⟩⟨ψ⁻| + (1 − p)·I/4.
    pub fn werner(p: T) -> Result<Self> {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(invalid(format!("Werner weight must be in [0, 1], got {p}")));
        }
        let mut m = zero();
        let noise = (T::one() - p) / T::of(4.0);
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = c(noise);
        }
        let h = p * T::of(0.5);
        m[1][1] = m[1][1] + c(h);
        m[2][2] = m[2][2] + c(h);
        m[1][2] = c(-h);
        m[2][1] = c(-h);
        Self::from_matrix(m)
    }

    /// The same state written with the qubit order reversed.
    pub fn swap_qubits(&self) -> Self {
        let idx = |i: usize| ((i & 1) << 1) | (i >> 1);
        let mut m = zero();
        for i in 0..4 {
            for j in 0..4 {
                m[idx(i)][idx(j)] = self.matrix[i][j];
            }
        }
        Self { matrix: m, ..*self }
    }

    pub fn cast<U: Real>(&self) -> TwoQubitState<U> {
        let mut m = zero::<U, 4>();
        for i in 0..4 {
            for j in 0..4 {
                let z = self.matrix[i][j];
                m[i][j] = Complex::new(U::of(z.re.to_f64_lossy()), U::of(z.im.to_f64_lossy()));
            }
        }
        TwoQubitState { matrix: m, trace_before_normalization: U::of(self.trace_before_normalization.to_f64_lossy()) }
    }
}

/// Density matrix of the detectors from the second-order amplitudes,
/// divided by its trace 1 + nX2.
pub fn build_state<T: Real>(amps: &AmplitudeSet<T>) -> Result<TwoQubitState<T>> {
    if !(amps.n_ea2 + amps.n_eb2 < T::of(PERTURBATIVE_SUM_LIMIT)) {
        return Err(Error::NonPerturbative {
            what: "nEA2 + nEB2".into(),
            value: (amps.n_ea2 + amps.n_eb2).to_f64_lossy(),
            limit: PERTURBATIVE_SUM_LIMIT,
        });
    }
    let mut m = zero();
    m[0][0] = c(amps.n_x2);
    m[1][1] = c(amps.n_ea2);
    m[2][2] = c(amps.n_eb2);
    m[3][3] = c(T::one() - amps.n_ea2 - amps.n_eb2);
    m[0][3] = -amps.x0;
    m[3][0] = -amps.x0.conj();
    m[1][2] = amps.eab.conj();
    m[2][1] = amps.eab;
    TwoQubitState::from_matrix(m)
}

/// ρ^{T_B}: element (ab, a'b') ← (ab', a'b).
pub fn partial_transpose_b<T: Real>(m: &Matrix<T, 4>) -> Matrix<T, 4> {
    let mut out = zero();
    for a in 0..2 {
        for b in 0..2 {
            for ap in 0..2 {
                for bp in 0..2 {
                    out[2 * a + b][2 * ap + bp] = m[2 * a + bp][2 * ap + b];
                }
            }
        }
    }
    out
}

/// ρ^{T_A}: element (ab, a'b') ← (a'b, ab').
pub fn partial_transpose_a<T: Real>(m: &Matrix<T, 4>) -> Matrix<T, 4> {
    let mut out = zero();
    for a in 0..2 {
        for b in 0..2 {
            for ap in 0..2 {
                for bp in 0..2 {
                    out[2 * a + b][2 * ap + bp] = m[2 * ap + b][2 * a + bp];
                }
            }
        }
    }
    out
}

fn negative_part<T: Real>(m: &Matrix<T, 4>) -> T {
    hermitian_eigen(m).values.iter().fold(T::zero(), |acc, &l| acc + (-l).max(T::zero()))
}

/// Sum of |negative eigenvalues| of the partial transpose on B.
pub fn negativity<T: Real>(state: &TwoQubitState<T>) -> T {
    negative_part(&partial_transpose_b(&state.matrix))
}

/// Same measure with the partial transpose taken on A.
pub fn negativity_a<T: Real>(state: &TwoQubitState<T>) -> T {
    negative_part(&partial_transpose_a(&state.matrix))
}

/// Leading-order negativity max(0, |X0| − ‖E_A‖‖E_B‖).
pub fn negativity_approx<T: Real>(amps: &AmplitudeSet<T>) -> T {
    amps.entanglement_margin().max(T::zero())
}

fn pauli<T: Real>(i: usize) -> [[C<T>; 2]; 2] {
    let (o, z) = (T::one(), T::zero());
    match i {
        0 => [[c(z), c(o)], [c(o), c(z)]],
        1 => [[c(z), Complex::new(z, -o)], [Complex::new(z, o), c(z)]],
        _ => [[c(o), c(z)], [c(z), c(-o)]],
    }
}

/// tr(ρ·(u·σ)⊗(v·σ)) for real 3-vectors u, v.
pub fn spin_correlation<T: Real>(state: &TwoQubitState<T>, u: [T; 3], v: [T; 3]) -> T {
    let axis = |n: [T; 3]| {
        let mut s = [[c(T::zero()); 2]; 2];
        for (k, nk) in n.iter().enumerate() {
            let p = pauli::<T>(k);
            for i in 0..2 {
                for j in 0..2 {
                    s[i][j] = s[i][j] + p[i][j] * *nk;
                }
            }
        }
        s
    };
    let (sa, sb) = (axis(u), axis(v));
    // tr(ρ O) = Σ ρ_{rc} O_{cr}
    let mut acc = c(T::zero());
    for row in 0..4 {
        for col in 0..4 {
            let o = sa[col >> 1][row >> 1] * sb[col & 1][row & 1];
            acc = acc + state.matrix[row][col] * o;
        }
    }
    acc.re
}

/// T_ij = tr(ρ σ_i ⊗ σ_j) with (x, y, z) ordering.
pub fn correlation_matrix<T: Real>(state: &TwoQubitState<T>) -> [[T; 3]; 3] {
    let mut t = [[T::zero(); 3]; 3];
    for (i, row) in t.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let mut u = [T::zero(); 3];
            let mut v = [T::zero(); 3];
            u[i] = T::one();
            v[j] = T::one();
            *slot = spin_correlation(state, u, v);
        }
    }
    t
}

fn gram<T: Real>(t: &[[T; 3]; 3]) -> [[T; 3]; 3] {
    let mut u = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            u[i][j] = (0..3).fold(T::zero(), |acc, k| acc + t[k][i] * t[k][j]);
        }
    }
    u
}

/// Sum of the two largest eigenvalues of TᵀT; CHSH is violable iff M > 1.
pub fn horodecki_m<T: Real>(state: &TwoQubitState<T>) -> T {
    let (values, _) = symmetric_eigen(&gram(&correlation_matrix(state)));
    values[1] + values[2]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterPair<T> {
    pub eta_a: T,
    pub eta_b: T,
}

impl<T: Real> FilterPair<T> {
    pub fn new(eta_a: T, eta_b: T) -> Result<Self> {
        for (name, e) in [("eta_A", eta_a), ("eta_B", eta_b)] {
            if !(e > T::zero() && e <= T::one()) {
                return Err(invalid(format!("{name} must be in (0, 1], got {e}")));
            }
        }
        Ok(Self { eta_a, eta_b })
    }

    pub fn symmetric(eta: T) -> Result<Self> {
        Self::new(eta, eta)
    }
}

/// Filtered, renormalized state and the success probability of the filter
/// diag(1, η_A) ⊗ diag(1, η_B).
pub fn apply_filter<T: Real>(state: &TwoQubitState<T>, f: FilterPair<T>) -> Result<(TwoQubitState<T>, T)> {
    let f = FilterPair::new(f.eta_a, f.eta_b)?;
    let factor = |i: usize| {
        let a = if i >> 1 == 1 { f.eta_a } else { T::one() };
        let b = if i & 1 == 1 { f.eta_b } else { T::one() };
        a * b
    };
    let mut m = state.matrix;
    for (i, row) in m.iter_mut().enumerate() {
        for (j, z) in row.iter_mut().enumerate() {
            *z = *z * (factor(i) * factor(j));
        }
    }
    let success = trace(&m).re;
    if !(success >= T::of(MIN_SUCCESS_PROB)) {
        return Err(Error::FilterAnnihilates(success.to_f64_lossy()));
    }
    let filtered = TwoQubitState::from_matrix(m)?;
    Ok((filtered, success))
}

fn filtered_m<T: Real>(state: &TwoQubitState<T>, ln_eta: T) -> Option<T> {
    let eta = ln_eta.exp().min(T::one());
    let f = FilterPair::symmetric(eta).ok()?;
    apply_filter(state, f).ok().map(|(s, _)| horodecki_m(&s))
}

/// Symmetric filter strength maximizing M of the filtered state, with that
/// maximum. Log-spaced grid over [η_lo, 1], then golden-section search in
/// ln η around the best grid point.
pub fn optimal_filter<T: Real>(state: &TwoQubitState<T>) -> (FilterPair<T>, T) {
    let rho00 = state.matrix[0][0].re.max(T::zero());
    let rho33 = state.matrix[3][3].re;
    let mut lo = T::of(1e-2);
    if rho33 > T::zero() && rho00 > T::zero() {
        lo = lo.min(T::of(1e-3) * (rho00 / rho33).powf(T::of(0.25)));
    }
    let lo = lo.max(T::of(FILTER_FLOOR));
    let ln_lo = lo.ln();
    let grid: Vec<T> =
        (0..FILTER_GRID).map(|i| ln_lo * (T::one() - T::of_usize(i) / T::of_usize(FILTER_GRID - 1))).collect();
    let identity_m = horodecki_m(state);
    let mut best = (FILTER_GRID - 1, identity_m);
    for (i, &g) in grid.iter().enumerate().take(FILTER_GRID - 1) {
        if let Some(m) = filtered_m(state, g) {
            if m > best.1 || (i < best.0 && m == best.1) {
                best = (i, m);
            }
        }
    }
    let (bi, bm) = best;
    let mut a = grid[bi.saturating_sub(1)];
    let mut b = if bi + 1 < FILTER_GRID { grid[bi + 1] } else { T::zero() };
    let phi = (T::of(5.0).sqrt() - T::one()) * T::of(0.5);
    let eval = |x: T| filtered_m(state, x).unwrap_or(T::neg_infinity());
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    let tol = T::of(FILTER_LN_TOL);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        // ">=" keeps the lower bracket on ties
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = eval(x2);
        }
    }
    let (mut x, mut fx) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    if !(fx > bm) {
        x = grid[bi];
        fx = bm;
    }
    let eta = x.exp().min(T::one());
    (FilterPair { eta_a: eta, eta_b: eta }, fx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshCondition<T> {
    pub holds: bool,
    /// |X0| / (‖E_A‖‖E_B‖).
    pub lhs: T,
    /// 4‖X_AB‖ / |X0|.
    pub rhs: T,
}

/// Filtered-CHSH condition |X0|/(‖E_A‖‖E_B‖) > 4‖X_AB‖/|X0|.
pub fn chsh_condition<T: Real>(amps: &AmplitudeSet<T>) -> ChshCondition<T> {
    let x = amps.x0.norm();
    if x == T::zero() {
        return ChshCondition { holds: false, lhs: T::zero(), rhs: T::infinity() };
    }
    let denom = (amps.n_ea2 * amps.n_eb2).sqrt();
    let lhs = if denom == T::zero() { T::infinity() } else { x / denom };
    let rhs = T::of(4.0) * amps.n_x2.sqrt() / x;
    ChshCondition { holds: lhs > rhs, lhs, rhs }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings<T> {
    pub a: [T; 3],
    pub a_prime: [T; 3],
    pub b: [T; 3],
    pub b_prime: [T; 3],
    /// ⟨ab⟩ + ⟨ab′⟩ + ⟨a′b⟩ − ⟨a′b′⟩ evaluated on the state.
    pub value: T,
}

fn apply3<T: Real>(t: &[[T; 3]; 3], v: [T; 3]) -> [T; 3] {
    let mut out = [T::zero(); 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..3).fold(T::zero(), |acc, k| acc + t[i][k] * v[k]);
    }
    out
}

fn norm3<T: Real>(v: [T; 3]) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn scale3<T: Real>(v: [T; 3], s: T) -> [T; 3] {
    [v[0] * s, v[1] * s, v[2] * s]
}

fn cross3<T: Real>(u: [T; 3], v: [T; 3]) -> [T; 3] {
    [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
}

/// Unit vector orthogonal to `u`, preferring the first axis it is least aligned with.
fn orthogonal_to<T: Real>(u: [T; 3]) -> [T; 3] {
    let k = (0..3).fold(0, |best, i| if u[i].abs() < u[best].abs() { i } else { best });
    let mut e = [T::zero(); 3];
    e[k] = T::one();
    let w = cross3(u, e);
    let n = norm3(w);
    if n == T::zero() {
        return e;
    }
    scale3(w, T::one() / n)
}

/// CHSH combination for the given four axes.
pub fn chsh_value<T: Real>(state: &TwoQubitState<T>, a: [T; 3], ap: [T; 3], b: [T; 3], bp: [T; 3]) -> T {
    spin_correlation(state, a, b) + spin_correlation(state, a, bp) + spin_correlation(state, ap, b)
        - spin_correlation(state, ap, bp)
}

/// Measurement axes attaining the maximal CHSH value 2√M.
///
/// Within a degenerate eigenspace the axes follow the Jacobi eigenbasis,
/// with each eigenvector's sign fixed so its largest component is positive.
pub fn optimal_settings<T: Real>(state: &TwoQubitState<T>) -> ChshSettings<T> {
    let t = correlation_matrix(state);
    let (values, vecs) = symmetric_eigen(&gram(&t));
    let fix_sign = |v: [T; 3]| {
        let k = (0..3).fold(0, |best, i| if v[i].abs() > v[best].abs() { i } else { best });
        if v[k] < T::zero() {
            scale3(v, -T::one())
        } else {
            v
        }
    };
    let (l1, l2) = (values[2].max(T::zero()), values[1].max(T::zero()));
    let (v1, v2) = (fix_sign(vecs[2]), fix_sign(vecs[1]));
    let (cos_t, sin_t) = if l1 + l2 > T::zero() {
        let s = (l1 + l2).sqrt();
        (l1.sqrt() / s, l2.sqrt() / s)
    } else {
        (T::one(), T::zero())
    };
    let b = [
        cos_t * v1[0] + sin_t * v2[0],
        cos_t * v1[1] + sin_t * v2[1],
        cos_t * v1[2] + sin_t * v2[2],
    ];
    let b_prime = [
        cos_t * v1[0] - sin_t * v2[0],
        cos_t * v1[1] - sin_t * v2[1],
        cos_t * v1[2] - sin_t * v2[2],
    ];
    let tv1 = apply3(&t, v1);
    let tv2 = apply3(&t, v2);
    let a = if norm3(tv1) > T::zero() { scale3(tv1, T::one() / norm3(tv1)) } else { v1 };
    let a_prime = if norm3(tv2) > T::zero() { scale3(tv2, T::one() / norm3(tv2)) } else { orthogonal_to(a) };
    let value = chsh_value(state, a, a_prime, b, b_prime);
    ChshSettings { a, a_prime, b, b_prime, value }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellReport<T> {
    pub negativity: T,
    pub negativity_approx: T,
    pub m: T,
    /// 2√M.
    pub chsh_max: T,
    pub eq11_lhs: T,
    pub eq11_rhs: T,
    pub eq11_holds: bool,
    /// sqrt(|X0|), the filter strength with η² = |⟨0|X_AB⟩|.
    pub eta_modulus: T,
    pub eta_opt: T,
    pub m_filtered: T,
    pub chsh_max_filtered: T,
    /// Trace of the filtered state before renormalization, at `eta_opt`.
    pub filter_success_prob: T,
}

/// Every entanglement and Bell measure for one amplitude set.
pub fn bell_report<T: Real>(amps: &AmplitudeSet<T>) -> Result<(TwoQubitState<T>, BellReport<T>)> {
    let state = build_state(amps)?;
    let m = horodecki_m(&state);
    let cond = chsh_condition(amps);
    let (filter, m_filtered) = optimal_filter(&state);
    let (_, success) = apply_filter(&state, filter)?;
    let report = BellReport {
        negativity: negativity(&state),
        negativity_approx: negativity_approx(amps),
        m,
        chsh_max: T::of(2.0) * m.max(T::zero()).sqrt(),
        eq11_lhs: cond.lhs,
        eq11_rhs: cond.rhs,
        eq11_holds: cond.holds,
        eta_modulus: amps.x0.norm().sqrt(),
        eta_opt: filter.eta_a,
        m_filtered,
        chsh_max_filtered: T::of(2.0) * m_filtered.max(T::zero()).sqrt(),
        filter_success_prob: success,
    };
    Ok((state, report))
}
