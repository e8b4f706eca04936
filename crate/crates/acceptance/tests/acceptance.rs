//! One PASS/FAIL line per acceptance criterion, followed by the invariants
//! that are checked only here. The test fails if any line fails.

use std::time::{Duration, Instant};

use num_complex::Complex;
use vacuum_bell::amplitudes::{compute_amplitudes, emission_norm, exchange_amplitude};
use vacuum_bell::experiments::{
    self, build_pair, evaluate_point, oracle_compare, scaling_check, sweep_gap, sweep_separation, Design, NPolicy,
    Preset, RunConfig,
};
use vacuum_bell::oracle::brute_chsh;
use vacuum_bell::state::{horodecki_m, negativity, optimal_settings};
use vacuum_bell::windows::{superosc_band, WindowSpec};
use vacuum_bell::{DetectorConfig, PairConfig, QuadConfig, TwoQubitState};
use vacuum_bell_acceptance::Report;

const ENTANGLEMENT_RUNTIME: Duration = Duration::from_secs(10);
const MARGIN_OVER_BUDGET: f64 = 10.0;
const SLOPE_FLOOR: f64 = -1.3;
const SCALING_RUNTIME: Duration = Duration::from_secs(300);
const M_TOL: f64 = 1e-9;
const RATIO_FOR_STRONG_VIOLATION: f64 = 10.0;
const STRONG_M_FILTERED: f64 = 1.8;
const ORACLE_MODES: usize = 100_000;
const ORACLE_TOL: f64 = 1e-6;
const WICK_TOL: f64 = 1e-8;
const ORACLE_RUNTIME: Duration = Duration::from_secs(600);
const CLOSED_FORM_TOL: f64 = 1e-10;
const COMPOSITE_TOL: f64 = 1e-9;
const UNIT_TOL: f64 = 1e-12;
const WERNER_CROSSING_TOL: f64 = 1e-6;
const BRUTE_GRID: usize = 60;
const BRUTE_TOL: f64 = 2e-3;
const ORDER_WINDOW: (f64, f64) = (10.0, 24.0);

/// Gap scale at which the gap sweep is deep in the CHSH-condition regime.
const STRONG_GAP_SCALE: f64 = 48.0;

fn paper() -> Design {
    Preset::Paper.design()
}

fn quad() -> QuadConfig {
    QuadConfig::default()
}

fn criterion_1(rep: &mut Report) {
    let start = Instant::now();
    let row = evaluate_point(&paper(), &quad(), None);
    let elapsed = start.elapsed();
    let a = &row.amplitudes;
    let margin = a.x0.norm() - (a.n_ea2 * a.n_eb2).sqrt();
    let pass = row.status.is_ok()
        && row.report.negativity > 0.0
        && margin > 0.0
        && margin > MARGIN_OVER_BUDGET * a.error_budget
        && elapsed < ENTANGLEMENT_RUNTIME;
    rep.record(
        "criterion 1 (entanglement at L/T = 2, N = 4, k = 6)",
        pass,
        format!(
            "negativity = {:e}, |X0| - |E_A||E_B| = {margin:e} (|X0|/|E_A||E_B| = {:.4}), budget = {:e}, {elapsed:.2?}",
            row.report.negativity,
            a.x0.norm() / (a.n_ea2 * a.n_eb2).sqrt(),
            a.error_budget
        ),
    );
}

fn criterion_2(rep: &mut Report) {
    let cfg = RunConfig {
        design: Design { n_policy: NPolicy::Square, ..paper() },
        sweep_values: Some(vec![1.5, 2.0, 2.5, 3.0]),
        ..RunConfig::default()
    };
    let start = Instant::now();
    let outcome = scaling_check(&cfg);
    let elapsed = start.elapsed();
    match outcome {
        Ok((rows, fit)) => {
            let negs: Vec<String> = rows.iter().map(|r| format!("{:e}", r.report.negativity)).collect();
            let pass = fit.slope >= SLOPE_FLOOR && elapsed < SCALING_RUNTIME;
            rep.record(
                "criterion 2 (scaling slope of ln N vs (L/T)^2)",
                pass,
                format!(
                    "slope = {:.4}, verdict {}, negativities [{}], excluded {:?}, {elapsed:.2?}",
                    fit.slope,
                    fit.verdict.as_str(),
                    negs.join(", "),
                    fit.excluded
                ),
            );
        }
        Err(e) => rep.record("criterion 2 (scaling slope of ln N vs (L/T)^2)", false, e.to_string()),
    }
}

fn criterion_3(rep: &mut Report) {
    let sep = RunConfig { sweep_values: Some(vec![1.5, 2.0, 2.5, 3.0]), ..RunConfig::default() };
    let gap = RunConfig {
        sweep_values: Some(vec![1.0, 2.0, 4.0, 8.0, 16.0, 24.0, 32.0, 40.0, 48.0, 64.0]),
        ..RunConfig::default()
    };
    let mut rows = sweep_separation(&sep).map(|r| r.0).unwrap_or_default();
    rows.extend(sweep_gap(&gap).unwrap_or_default());
    let mut holding = 0;
    let mut bad = Vec::new();
    for r in rows.iter().filter(|r| r.status.is_ok() && r.report.eq11_holds) {
        holding += 1;
        let unfiltered_ok = r.report.m <= 1.0 + r.amplitudes.error_budget + M_TOL;
        let filtered_ok = r.report.m_filtered > 1.0 + M_TOL;
        if !(unfiltered_ok && filtered_ok) {
            bad.push(format!("L/T {} Omega_A {:.3}: M {} M_f {}", r.l_over_t, r.omega_a, r.report.m, r.report.m_filtered));
        }
    }
    let failed_rows = rows.iter().filter(|r| !r.status.is_ok()).count();
    rep.record(
        "criterion 3a (condition holds => no unfiltered violation, filtered violation)",
        holding > 0 && bad.is_empty() && failed_rows == 0,
        format!("{holding} of {} preset points satisfy the condition; violations: {bad:?}", rows.len()),
    );

    let d = Design { gap_scale: STRONG_GAP_SCALE, ..paper() };
    let row = evaluate_point(&d, &quad(), None);
    let ratio = row.report.eq11_lhs / row.report.eq11_rhs;
    // the optimal settings reproduce 2√M, which pins M to the tolerance
    let settings_gap = build_pair::<f64>(&d, &quad())
        .and_then(|p| compute_amplitudes(&p, &quad()))
        .and_then(|a| vacuum_bell::state::build_state(&a))
        .map(|s| {
            let (f, _) = vacuum_bell::state::optimal_filter(&s);
            let (fs, _) = vacuum_bell::state::apply_filter(&s, f).expect("filter");
            (optimal_settings(&fs).value - 2.0 * horodecki_m(&fs).sqrt()).abs()
        });
    let settings_ok = settings_gap.as_ref().is_ok_and(|g| *g <= 2.0 * M_TOL);
    rep.record(
        "criterion 3b (strong violation after filtering at lhs/rhs >= 10)",
        ratio >= RATIO_FOR_STRONG_VIOLATION && row.report.m_filtered >= STRONG_M_FILTERED && settings_ok && row.report.m <= 1.0 + row.amplitudes.error_budget + M_TOL,
        format!(
            "gap scale {STRONG_GAP_SCALE}: lhs/rhs = {ratio:.2}, M = {:.12}, M_filtered = {:.9} at eta = {:e}, settings vs 2 sqrt M: {settings_gap:?}",
            row.report.m, row.report.m_filtered, row.report.eta_opt
        ),
    );
}

fn criterion_4(rep: &mut Report) {
    for preset in [Preset::Gaussian, Preset::Paper] {
        let start = Instant::now();
        let outcome = oracle_compare(&preset.design(), &quad(), ORACLE_MODES);
        let elapsed = start.elapsed();
        match outcome {
            Ok(c) => {
                let worst = c.max_rel_diff();
                let diffs: Vec<String> = c.entries.iter().map(|e| format!("{} {:.1e}", e.0, e.3)).collect();
                rep.record(
                    &format!("criterion 4 (oracle, {})", preset.as_str()),
                    worst <= ORACLE_TOL && c.wick_rel_diff <= WICK_TOL && elapsed < ORACLE_RUNTIME,
                    format!("n = {ORACLE_MODES}: {}; Wick {:.1e}; {elapsed:.1?}", diffs.join(", "), c.wick_rel_diff),
                );
            }
            Err(e) => rep.record(&format!("criterion 4 (oracle, {})", preset.as_str()), false, e.to_string()),
        }
    }
}

fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    // pairwise accumulation over blocks keeps the rounding error near 1e-16
    let mut blocks = Vec::with_capacity(n / 1000 + 1);
    let mut acc = 0.0;
    for i in 0..n {
        acc += f(a + (i as f64 + 0.5) * h);
        if i % 1000 == 999 {
            blocks.push(acc);
            acc = 0.0;
        }
    }
    blocks.push(acc);
    blocks.iter().sum::<f64>() * h
}

fn criterion_5(rep: &mut Report) {
    let (r, t, eps) = (0.1f64, 1.0f64, 1e-3f64);
    let window = WindowSpec::gaussian(t).unwrap();
    let det = DetectorConfig::new(0.0, r, window, eps).unwrap();
    let got = emission_norm(&det, 0.0, &quad()).unwrap();
    let want = eps * eps / (2.0 * (r * r + t * t / 2.0));
    let rel_e = ((got - want) / want).abs();
    rep.record(
        "criterion 5a (Gaussian emission closed form)",
        rel_e <= CLOSED_FORM_TOL,
        format!("{got:e} vs {want:e}, relative {rel_e:.1e}"),
    );

    let (l, ga, gb) = (3.0f64, 1.0f64, 1.0f64);
    let a = DetectorConfig::new(ga, r, window, 1.0).unwrap();
    let b = DetectorConfig::new(gb, r, window, 1.0).unwrap();
    let pair = PairConfig::new(a, b, l, 0.0).unwrap();
    let x0 = exchange_amplitude(&pair, &quad()).unwrap();
    let integrand = |w: f64| {
        (w * l).sin() / l * (-w * w * r * r).exp() * (-(ga + w).powi(2) * t * t / 4.0).exp() * (-(gb - w).powi(2) * t * t / 4.0).exp()
    };
    let reference = midpoint(integrand, 0.0, 15.0, 10_000_000);
    let rel_x = ((x0.re - reference) / reference).abs();
    rep.record(
        "criterion 5b (Gaussian exchange vs composite rule)",
        rel_x <= COMPOSITE_TOL && x0.im == 0.0,
        format!("{:e} vs {reference:e}, relative {rel_x:.1e}", x0.re),
    );
}

fn criterion_6(rep: &mut Report) {
    let bell = TwoQubitState::<f64>::bell();
    let ground = TwoQubitState::<f64>::ground();
    let (nb, mb, ng, mg) = (negativity(&bell), horodecki_m(&bell), negativity(&ground), horodecki_m(&ground));
    rep.record(
        "criterion 6a (Bell and product states)",
        (nb - 0.5).abs() <= UNIT_TOL && (mb - 2.0).abs() <= UNIT_TOL && ng.abs() <= UNIT_TOL && (mg - 1.0).abs() <= UNIT_TOL,
        format!("Bell N = {nb}, M = {mb}; ground N = {ng}, M = {mg}"),
    );

    let m_minus_1 = |p: f64| horodecki_m(&TwoQubitState::werner(p).unwrap()) - 1.0;
    let (mut lo, mut hi) = (0.5, 0.9);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if m_minus_1(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let crossing = 0.5 * (lo + hi);
    let off = (crossing - std::f64::consts::FRAC_1_SQRT_2).abs();
    rep.record(
        "criterion 6b (Werner M = 1 crossing)",
        off <= WERNER_CROSSING_TOL,
        format!("crossing at p = {crossing:.12}, |p - 1/sqrt 2| = {off:.1e}"),
    );

    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for (name, s) in [("Bell", bell), ("Werner 0.8", TwoQubitState::werner(0.8).unwrap()), ("ground", ground)] {
        let brute = brute_chsh(&s, BRUTE_GRID).unwrap();
        let exact = 2.0 * horodecki_m(&s).sqrt();
        worst = worst.max((brute - exact).abs());
        detail.push(format!("{name} {brute:.6} vs {exact:.6}"));
    }
    rep.record("criterion 6c (brute-force CHSH at grid 60)", worst <= BRUTE_TOL, detail.join(", "));
}

fn criterion_7(rep: &mut Report) {
    let gap_of = |eps: f64| {
        let d = Design { gap_scale: STRONG_GAP_SCALE, eps0_a: eps, eps0_b: eps, ..paper() };
        let row = evaluate_point(&d, &quad(), None);
        (row.report.negativity, row.report.negativity_approx, (row.report.negativity - row.report.negativity_approx).abs())
    };
    let (n1, a1, d1) = gap_of(1e-3);
    let (n2, a2, d2) = gap_of(5e-4);
    let ratio = d1 / d2;
    rep.record(
        "criterion 7 (exact vs leading-order negativity, eps0 halved)",
        n1 > 0.0 && ratio >= ORDER_WINDOW.0 && ratio <= ORDER_WINDOW.1,
        format!(
            "gap scale {STRONG_GAP_SCALE}: eps0 1e-3: N = {n1:e}, approx {a1:e}; eps0 5e-4: N = {n2:e}, approx {a2:e}; shrink factor {ratio:.4}"
        ),
    );
}

fn criterion_8(rep: &mut Report) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    std::fs::write(&cfg, "preset = paper-preset\nsweep_values = 1.5, 2, 2.5, 3\n").unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let code = experiments::cli::run([
            "vacuum-bell",
            "sweep-l",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        (code, std::fs::read(&out).unwrap_or_default())
    };
    let (c1, a) = run("first.csv");
    let (c2, b) = run("second.csv");
    rep.record(
        "criterion 8 (sweep-l byte determinism)",
        c1 == 0 && c2 == 0 && !a.is_empty() && a == b,
        format!("exit codes {c1}, {c2}; {} and {} bytes", a.len(), b.len()),
    );
}

fn sign_changes(spec: &WindowSpec<f64>, band: (f64, f64), samples: usize) -> usize {
    let mut prev = spec.eval(band.0).signum();
    let mut count = 0;
    for i in 1..samples {
        let w = band.0 + (band.1 - band.0) * i as f64 / (samples - 1) as f64;
        let s = spec.eval(w).signum();
        if s != 0.0 && s != prev {
            if prev != 0.0 {
                count += 1;
            }
            prev = s;
        }
    }
    count
}

fn invariants(rep: &mut Report) {
    let mut detail = Vec::new();
    let mut ok = true;
    for n in [4.0f64, 9.0, 16.0] {
        let spec = WindowSpec::superoscillating(1.0, n, 2.0, 2).unwrap();
        let band = superosc_band(n, 2.0, 1.0).unwrap();
        let changes = sign_changes(&spec, band, 4001);
        let need = n.sqrt().floor() as usize - 1;
        ok &= changes >= need;
        detail.push(format!("N = {n}: {changes} (need {need})"));
    }
    rep.record("invariant windows (sign changes inside the superoscillation band)", ok, detail.join(", "));

    let pair = build_pair::<f64>(&paper(), &quad()).unwrap();
    let m0 = compute_amplitudes(&pair, &quad()).unwrap();
    let m1 = compute_amplitudes(&PairConfig { field_mass: 1e-6, ..pair }, &quad()).unwrap();
    let tol = 10.0 * m0.error_budget;
    let diffs = [
        ("X0", (m0.x0 - m1.x0).norm()),
        ("nEA2", (m0.n_ea2 - m1.n_ea2).abs()),
        ("nEB2", (m0.n_eb2 - m1.n_eb2).abs()),
        ("EAB", (m0.eab - m1.eab).norm()),
    ];
    rep.record(
        "invariant amplitudes (m = 0 vs m = 1e-6/T within 10 error budgets)",
        diffs.iter().all(|d| d.1 <= tol),
        format!(
            "10 budget = {tol:.2e}; {}",
            diffs.iter().map(|d| format!("{} {:.2e}", d.0, d.1)).collect::<Vec<_>>().join(", ")
        ),
    );

    let sep = RunConfig { sweep_values: Some(vec![1.5, 2.0, 2.5, 3.0]), ..RunConfig::default() };
    let negs: Vec<f64> = sweep_separation(&sep).map(|(rows, _)| rows.iter().map(|r| r.report.negativity).collect()).unwrap_or_default();
    rep.record(
        "invariant experiments (negativity strictly decreasing over L/T = 1.5, 2, 2.5, 3)",
        negs.len() == 4 && negs.windows(2).all(|w| w[1] < w[0]),
        format!("{negs:?}"),
    );

    let mut detail = Vec::new();
    let mut ok = true;
    for n in [64.0, 128.0] {
        let d = Design { n_policy: NPolicy::Fixed, n_fixed: n, ..paper() };
        let r = evaluate_point(&d, &quad(), None);
        ok &= !r.report.eq11_holds || r.report.m_filtered > 1.0 + M_TOL;
        detail.push(format!(
            "N = {n}: condition {} (lhs {:.3e}, rhs {:.3e}), M_filtered - 1 = {:.2e}, nEB2/|X0| = {:.2e}",
            r.report.eq11_holds,
            r.report.eq11_lhs,
            r.report.eq11_rhs,
            r.report.m_filtered - 1.0,
            r.amplitudes.n_eb2 / r.amplitudes.x0.norm()
        ));
    }
    rep.record("invariant state (large N at L/T = 2: condition implies filtered violation)", ok, detail.join("; "));

    // lattice-free check that the row's X0 column equals the real exchange amplitude
    let row = evaluate_point(&paper(), &quad(), None);
    rep.record(
        "invariant experiments (complex amplitudes are real in the CSV convention)",
        row.amplitudes.x0.im == 0.0 && row.amplitudes.eab.im == 0.0 && row.amplitudes.x0 != Complex::new(0.0, 0.0),
        format!("X0 = {}, EAB = {}", row.amplitudes.x0, row.amplitudes.eab),
    );
}

#[test]
fn acceptance() {
    let mut rep = Report::new();
    criterion_1(&mut rep);
    criterion_2(&mut rep);
    criterion_3(&mut rep);
    criterion_4(&mut rep);
    criterion_5(&mut rep);
    criterion_6(&mut rep);
    criterion_7(&mut rep);
    criterion_8(&mut rep);
    invariants(&mut rep);
    rep.finish();
}
