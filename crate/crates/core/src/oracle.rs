//! Brute-force cross-checks: midpoint sums over a lattice of field-mode
//! shells, an explicit symmetrized two-photon double sum, and a grid search
//! for the CHSH maximum.
//!
//! Each shell ω_j carries a two-channel angular basis. Detector A couples to
//! (1, 0) and detector B to (s_j, sqrt(1 − s_j²)) with s_j = sin(ω_j L)/(ω_j L),
//! the angular overlap of the two smeared detectors at separation L.

use num_complex::Complex;
use rayon::prelude::*;

use crate::amplitudes::{mode_measure, AmplitudeSet, PairConfig};
use crate::error::{invalid, Error, Result};
use crate::state::TwoQubitState;
use crate::sum::CompensatedSum;

type C64 = Complex<f64>;

/// Smallest shell count accepted for a comparison run.
pub const MIN_COMPARISON_MODES: usize = 1000;
pub const DEFAULT_PAIR_MODES: usize = 65_536;
pub const DEFAULT_LATTICE_TOL: f64 = 1e-7;

/// Frequency above which every smearing factor is below 1e-20.
pub fn default_omega_max(pair: &PairConfig<f64>) -> f64 {
    let r = pair.det_a.smearing.min(pair.det_b.smearing);
    46.1f64.sqrt() / r
}

#[derive(Debug, Clone)]
pub struct ModeLattice {
    pub omega_max: f64,
    pub n_modes: usize,
    /// Shell width Δω.
    pub weight: f64,
    /// Midpoints (j + ½)Δω.
    pub nodes: Vec<f64>,
    /// One-photon amplitudes per shell and channel.
    pub f_a: Vec<[C64; 2]>,
    pub f_b: Vec<[C64; 2]>,
    /// Absorption-branch amplitudes, window argument Ω − ω.
    pub h_a: Vec<[C64; 2]>,
    pub h_b: Vec<[C64; 2]>,
}

impl ModeLattice {
    pub fn new(pair: &PairConfig<f64>, omega_max: f64, n_modes: usize) -> Result<Self> {
        pair.validate()?;
        if !(omega_max > 0.0) || !omega_max.is_finite() {
            return Err(invalid(format!("omega_max must be > 0, got {omega_max}")));
        }
        if n_modes == 0 {
            return Err(invalid("lattice needs at least one mode"));
        }
        let (a, b) = (&pair.det_a, &pair.det_b);
        let l = pair.separation;
        let dw = omega_max / n_modes as f64;
        let mut lat = Self {
            omega_max,
            n_modes,
            weight: dw,
            nodes: Vec::with_capacity(n_modes),
            f_a: Vec::with_capacity(n_modes),
            f_b: Vec::with_capacity(n_modes),
            h_a: Vec::with_capacity(n_modes),
            h_b: Vec::with_capacity(n_modes),
        };
        for j in 0..n_modes {
            let w = (j as f64 + 0.5) * dw;
            let measure = (dw * w * mode_measure(w, pair.field_mass)).sqrt();
            let ga = measure * (-0.5 * w * w * a.smearing * a.smearing).exp() * a.coupling;
            let gb = measure * (-0.5 * w * w * b.smearing * b.smearing).exp() * b.coupling;
            let s = (w * l).sin() / (w * l);
            let t = (1.0 - s * s).max(0.0).sqrt();
            let ea = a.window.eval(a.gap + w);
            let eb = b.window.eval(b.gap + w);
            let ha = a.window.eval(a.gap - w);
            let hb = b.window.eval(b.gap - w);
            let re = |x: f64| Complex::new(x, 0.0);
            lat.nodes.push(w);
            lat.f_a.push([re(ga * ea), re(0.0)]);
            lat.f_b.push([re(gb * eb * s), re(gb * eb * t)]);
            lat.h_a.push([re(ga * ha), re(0.0)]);
            lat.h_b.push([re(gb * hb * s), re(gb * hb * t)]);
        }
        Ok(lat)
    }

    fn inner(u: &[[C64; 2]], v: &[[C64; 2]]) -> C64 {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for (x, y) in u.iter().zip(v) {
            let z = x[0].conj() * y[0] + x[1].conj() * y[1];
            re.add(z.re);
            im.add(z.im);
        }
        Complex::new(re.value(), im.value())
    }

    fn bilinear(u: &[[C64; 2]], v: &[[C64; 2]]) -> C64 {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for (x, y) in u.iter().zip(v) {
            let z = x[0] * y[0] + x[1] * y[1];
            re.add(z.re);
            im.add(z.im);
        }
        Complex::new(re.value(), im.value())
    }

    /// Exchange amplitude: A emits into the shell, B absorbs from it.
    pub fn exchange(&self) -> C64 {
        Self::bilinear(&self.f_a, &self.h_b)
    }

    pub fn emission_a(&self) -> f64 {
        Self::inner(&self.f_a, &self.f_a).re
    }

    pub fn emission_b(&self) -> f64 {
        Self::inner(&self.f_b, &self.f_b).re
    }

    pub fn overlap(&self) -> C64 {
        Self::inner(&self.f_a, &self.f_b)
    }

    /// ½ Σ_{p,q} |f_A(p) f_B(q) + f_A(q) f_B(p)|² over all (shell, channel)
    /// mode labels, summed explicitly over pairs.
    pub fn two_photon_norm(&self) -> f64 {
        let a: Vec<C64> = self.f_a.iter().flatten().copied().collect();
        let b: Vec<C64> = self.f_b.iter().flatten().copied().collect();
        let n = a.len();
        let rows: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|p| {
                let mut s = CompensatedSum::new();
                let (ap, bp) = (a[p], b[p]);
                s.add(2.0 * (ap * bp).norm_sqr());
                for q in (p + 1)..n {
                    s.add((ap * b[q] + a[q] * bp).norm_sqr());
                }
                s.value()
            })
            .collect();
        crate::sum::compensated_sum(rows)
    }

    /// Raw midpoint amplitudes; nX2 from the double sum.
    pub fn amplitudes(&self) -> AmplitudeSet<f64> {
        let x0 = self.exchange();
        AmplitudeSet {
            x0,
            n_ea2: self.emission_a(),
            n_eb2: self.emission_b(),
            eab: self.overlap(),
            n_x2: self.two_photon_norm() + x0.norm_sqr(),
            error_budget: 0.0,
        }
    }
}

/// One-photon midpoint sums without the double sum.
fn one_photon(pair: &PairConfig<f64>, omega_max: f64, n: usize) -> Result<[f64; 6]> {
    let lat = ModeLattice::new(pair, omega_max, n)?;
    let (x, e) = (lat.exchange(), lat.overlap());
    Ok([x.re, x.im, lat.emission_a(), lat.emission_b(), e.re, e.im])
}

fn pair_sum(pair: &PairConfig<f64>, omega_max: f64, n: usize) -> Result<f64> {
    Ok(ModeLattice::new(pair, omega_max, n)?.two_photon_norm())
}

/// Midpoint amplitudes at a single resolution, no extrapolation.
pub fn midpoint_amplitudes(pair: &PairConfig<f64>, omega_max: f64, n_modes: usize) -> Result<AmplitudeSet<f64>> {
    Ok(ModeLattice::new(pair, omega_max, n_modes)?.amplitudes())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeOptions {
    pub omega_max: f64,
    pub n_modes: usize,
    /// Shells used for the O(n²) two-photon double sum.
    pub pair_modes: usize,
    /// Largest relative change allowed between the two extrapolations.
    pub tol: f64,
}

impl LatticeOptions {
    pub fn new(pair: &PairConfig<f64>, n_modes: usize) -> Self {
        Self {
            omega_max: default_omega_max(pair),
            n_modes,
            pair_modes: DEFAULT_PAIR_MODES.min(n_modes),
            tol: DEFAULT_LATTICE_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeReport {
    /// Extrapolated amplitudes; nX2 is the double sum plus |X0|².
    pub amplitudes: AmplitudeSet<f64>,
    /// nEA2·nEB2 + |EAB|² + |X0|² from the extrapolated one-photon values.
    pub wick_n_x2: f64,
    /// Largest relative change between the two extrapolations.
    pub worst_change: f64,
}

/// Midpoint error has the form c₂Δ² + c₄Δ⁴ + …; two Richardson steps
/// remove the first two terms. Returns the extrapolation from the three
/// finest of n/8, n/4, n/2, n and the one from the three coarsest.
fn romberg(v: [f64; 4]) -> (f64, f64) {
    let step = |a: f64, b: f64, c: f64| {
        let r1_mid = (4.0 * b - a) / 3.0;
        let r1_fine = (4.0 * c - b) / 3.0;
        (16.0 * r1_fine - r1_mid) / 15.0
    };
    (step(v[1], v[2], v[3]), step(v[0], v[1], v[2]))
}

fn resolutions(n: usize) -> [usize; 4] {
    [n / 8, n / 4, n / 2, n]
}

fn check(quantity: &'static str, best: f64, previous: f64, scale: f64, tol: f64) -> Result<f64> {
    let change = (best - previous).abs() / scale.max(f64::MIN_POSITIVE);
    if change > tol {
        return Err(Error::LatticeUnconverged { quantity, change, tol });
    }
    Ok(change)
}

/// Every amplitude from lattice sums, extrapolated over four resolutions.
pub fn lattice_amplitudes_with(pair: &PairConfig<f64>, opts: &LatticeOptions) -> Result<LatticeReport> {
    if opts.n_modes < MIN_COMPARISON_MODES || opts.pair_modes < MIN_COMPARISON_MODES {
        return Err(invalid(format!("lattice comparison runs need >= {MIN_COMPARISON_MODES} modes")));
    }
    if opts.n_modes % 8 != 0 || opts.pair_modes % 8 != 0 {
        return Err(invalid("n_modes and pair_modes must be multiples of 8"));
    }
    let r = pair.det_a.smearing.min(pair.det_b.smearing);
    if !((-opts.omega_max * opts.omega_max * r * r).exp() < 1e-20) {
        return Err(invalid(format!("omega_max = {} leaves exp(-w²R²) >= 1e-20", opts.omega_max)));
    }
    let levels: Vec<[f64; 6]> = resolutions(opts.n_modes)
        .iter()
        .map(|&n| one_photon(pair, opts.omega_max, n))
        .collect::<Result<_>>()?;
    let names = ["X0.re", "X0.im", "nEA2", "nEB2", "EAB.re", "EAB.im"];
    let mut best = [0.0; 6];
    let mut worst = 0.0f64;
    // complex parts share the scale of their modulus
    let scale_of = |k: usize, v: &[f64; 6]| match k {
        0 | 1 => v[0].hypot(v[1]),
        4 | 5 => v[4].hypot(v[5]),
        _ => v[k].abs(),
    };
    let mut prev = [0.0; 6];
    for k in 0..6 {
        let (r2, r1) = romberg([levels[0][k], levels[1][k], levels[2][k], levels[3][k]]);
        best[k] = r2;
        prev[k] = r1;
    }
    for k in 0..6 {
        worst = worst.max(check(names[k], best[k], prev[k], scale_of(k, &best), opts.tol)?);
    }

    let pair_levels: Vec<f64> = resolutions(opts.pair_modes)
        .iter()
        .map(|&n| pair_sum(pair, opts.omega_max, n))
        .collect::<Result<_>>()?;
    let (two_photon, two_prev) = romberg([pair_levels[0], pair_levels[1], pair_levels[2], pair_levels[3]]);
    worst = worst.max(check("two-photon double sum", two_photon, two_prev, two_photon.abs(), opts.tol)?);

    let x0 = Complex::new(best[0], best[1]);
    let eab = Complex::new(best[4], best[5]);
    let amplitudes = AmplitudeSet {
        x0,
        n_ea2: best[2],
        n_eb2: best[3],
        eab,
        n_x2: two_photon + x0.norm_sqr(),
        error_budget: 0.0,
    };
    let wick_n_x2 = crate::amplitudes::x_norm_squared(x0, best[2], best[3], eab);
    Ok(LatticeReport { amplitudes, wick_n_x2, worst_change: worst })
}

/// [`lattice_amplitudes_with`] with default options for `n_modes` shells
/// below `omega_max`.
pub fn lattice_amplitudes(pair: &PairConfig<f64>, omega_max: f64, n_modes: usize) -> Result<AmplitudeSet<f64>> {
    let opts = LatticeOptions { omega_max, ..LatticeOptions::new(pair, n_modes) };
    Ok(lattice_amplitudes_with(pair, &opts)?.amplitudes)
}

/// Pauli correlation matrix by explicit Kronecker products, independent of
/// the routine in `state`.
fn correlations(state: &TwoQubitState<f64>) -> [[f64; 3]; 3] {
    let i = Complex::new(0.0, 1.0);
    let o = Complex::new(1.0, 0.0);
    let z = Complex::new(0.0, 0.0);
    let sigma = [[[z, o], [o, z]], [[z, -i], [i, z]], [[o, z], [z, -o]]];
    let mut t = [[0.0; 3]; 3];
    for (a, sa) in sigma.iter().enumerate() {
        for (b, sb) in sigma.iter().enumerate() {
            let mut kron = [[z; 4]; 4];
            for r in 0..4 {
                for c in 0..4 {
                    kron[r][c] = sa[r / 2][c / 2] * sb[r % 2][c % 2];
                }
            }
            let mut acc = z;
            for r in 0..4 {
                for c in 0..4 {
                    acc += state.matrix[r][c] * kron[c][r];
                }
            }
            t[a][b] = acc.re;
        }
    }
    t
}

/// Largest CHSH value over a polar/azimuthal grid for Bob's two axes. For
/// fixed b, b′ the maximum over Alice's axes is |T(b + b′)| + |T(b − b′)|,
/// so the result is a lower bound on 2√M. Grids nest when g doubles.
pub fn brute_chsh(state: &TwoQubitState<f64>, grid_per_angle: usize) -> Result<f64> {
    if grid_per_angle < 20 {
        return Err(invalid(format!("grid_per_angle must be >= 20, got {grid_per_angle}")));
    }
    let g = grid_per_angle;
    let t = correlations(state);
    let pi = std::f64::consts::PI;
    let mut dirs = Vec::with_capacity((g + 1) * g);
    for i in 0..=g {
        let th = pi * i as f64 / g as f64;
        for j in 0..g {
            let ph = 2.0 * pi * j as f64 / g as f64;
            dirs.push([th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]);
        }
    }
    let tv: Vec<[f64; 3]> = dirs
        .iter()
        .map(|v| {
            let mut out = [0.0; 3];
            for (r, o) in out.iter_mut().enumerate() {
                *o = t[r][0] * v[0] + t[r][1] * v[1] + t[r][2] * v[2];
            }
            out
        })
        .collect();
    let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let best = (0..tv.len())
        .into_par_iter()
        .map(|p| {
            let mut m = 0.0f64;
            for q in p..tv.len() {
                let (x, y) = (tv[p], tv[q]);
                let plus = norm([x[0] + y[0], x[1] + y[1], x[2] + y[2]]);
                let minus = norm([x[0] - y[0], x[1] - y[1], x[2] - y[2]]);
                m = m.max(plus + minus);
            }
            m
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}
