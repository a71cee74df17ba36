//! Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
//!
//! Runs without the libtest harness so the lines always reach stdout. The
//! process fails on any red line except those listed in [`KNOWN_RED`], which
//! are printed as FAIL together with the reason they cannot be met.

use std::fs;
use std::num::NonZeroUsize;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use diracbox::evolution::{evolve, EvolveOptions, SpinorState, StepOrder, Stepper};
use diracbox::kick::{
    build_kick_matrix_bessel, build_kick_matrix_quadrature, recommended_panels, KickParams,
};
use diracbox::observables::{kinetic_energy, kinetic_matrix, mass_matrix, SeriesRecorder};
use diracbox::oracle::{run_oracle_check, GridState, LeakagePolicy, OracleConfig};
use diracbox::scenario::classify::{classify_values, linear_fit, ClassifierConfig, RegimeTag};
use diracbox::scenario::{list_presets, preset, run_scenario, simulate, RunOptions};
use diracbox::wavepacket::{local_maxima, mirror_asymmetry};
use diracbox::BoxBasis;

// criterion 1
const DISPERSION_ABS: f64 = 1e-14;
const DISPERSION_REL: f64 = 1e-14;
const DISPERSION_NMAX: usize = 512;
const ORTHONORMAL_MODES: usize = 32;
const ORTHONORMAL_TOL: f64 = 1e-10;
const BASIS_BUDGET: Duration = Duration::from_secs(1);
// criterion 2
const CROSS_METHOD_TOL: f64 = 1e-10;
const CROSS_METHOD_NMAX: usize = 64;
const CROSS_METHOD_BUDGET: Duration = Duration::from_secs(30);
// criterion 3
const KINETIC_MODES: usize = 32;
const KINETIC_TOL: f64 = 1e-10;
// criterion 4
const STATIONARY_KICKS: usize = 10_000;
const STATIONARY_TOL: f64 = 1e-12;
// criterion 5
const ORACLE_NMAX: usize = 256;
const ORACLE_GRID: usize = 4096;
const ORACLE_KICKS: usize = 50;
const ORACLE_SUBSTEPS: [usize; 3] = [32, 64, 128];
/// Observed refinement order must be second order within this band.
const ORACLE_ORDER_BAND: (f64, f64) = (1.7, 2.3);
/// Spectral-vs-grid discrepancy may exceed the Richardson estimate of the
/// grid's own time error by at most this factor.
const ORACLE_RICHARDSON_SLACK: f64 = 1.25;
const ORACLE_BUDGET: Duration = Duration::from_secs(120);
// criterion 6
const REGIME_KICKS: usize = 2000;
const REGIME_BUDGET: Duration = Duration::from_secs(300);
// criterion 7
const VELOCITY_STRIDE: usize = 5;
// criterion 8
const SPLIT_SYMMETRY_TOL: f64 = 1e-6;
const PEAK_FLOOR: f64 = 0.05;
const PEAK_SEPARATION_WIDTHS: f64 = 10.0;
// criterion 10
const PERF_NMAX: usize = 512;
const PERF_KICKS: usize = 10_000;
const PERF_LAMBDA: f64 = 0.7317;
const PERF_BUDGET: Duration = Duration::from_secs(60);

/// Criteria that cannot hold in IEEE double precision; see the line's detail.
const KNOWN_RED: &[&str] = &["1a"];

struct Line {
    id: &'static str,
    pass: bool,
    detail: String,
}

#[derive(Default)]
struct Report {
    lines: Vec<Line>,
}

impl Report {
    fn check(&mut self, id: &'static str, pass: bool, detail: String) {
        println!("[{}] {id:<3} {detail}", if pass { "PASS" } else { "FAIL" });
        self.lines.push(Line { id, pass, detail });
    }
}

fn gl_integrate(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let rule = GaussLegendre::new(NonZeroUsize::new(20).unwrap());
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| rule.integrate(a + p as f64 * h, a + (p + 1) as f64 * h, &f))
        .sum()
}

/// `x² - y² - 1` evaluated without rounding the squares.
fn exact_residual(e: f64, k: f64) -> f64 {
    let (pe, pk) = (e * e, k * k);
    let (ee, ek) = (e.mul_add(e, -pe), k.mul_add(k, -pk));
    ((pe - pk) - 1.0) + (ee - ek)
}

fn criterion_1(r: &mut Report) {
    let t = Instant::now();
    let basis = BoxBasis::new(1.0, DISPERSION_NMAX).unwrap();
    let (k, e) = (basis.wavenumbers(), basis.energies());
    let mut worst_abs: f64 = 0.0;
    let mut worst_rel: f64 = 0.0;
    let mut first_abs_violation = None;
    for n in 0..DISPERSION_NMAX {
        let res = exact_residual(e[n], k[n]).abs();
        if res >= DISPERSION_ABS && first_abs_violation.is_none() {
            first_abs_violation = Some(n + 1);
        }
        worst_abs = worst_abs.max(res);
        worst_rel = worst_rel.max(res / e[n].powi(2).max(1.0));
    }
    r.check(
        "1a",
        worst_abs < DISPERSION_ABS,
        format!(
            "dispersion |E²-k²-1| < {DISPERSION_ABS:e} absolute, n <= {DISPERSION_NMAX}: max {worst_abs:.3e}, first violation n = {} \
             (unattainable: one rounding of E alone leaves a residual ~ E²·2⁻⁵³)",
            first_abs_violation.map_or("none".into(), |n| n.to_string())
        ),
    );
    r.check(
        "1b",
        worst_rel < DISPERSION_REL,
        format!("dispersion relative to max(1, E²) < {DISPERSION_REL:e}: max {worst_rel:.3e}"),
    );

    let mut worst: f64 = 0.0;
    let small = BoxBasis::new(1.0, ORTHONORMAL_MODES).unwrap();
    let samples: Vec<Vec<(f64, Complex64, Complex64)>> = {
        // 40 panels × 20 nodes resolve products up to mode 32 comfortably
        let rule = GaussLegendre::new(NonZeroUsize::new(20).unwrap());
        let panels = 40;
        let h = 1.0 / panels as f64;
        let mut nodes = Vec::new();
        for p in 0..panels {
            for (x, w) in rule.nodes().zip(rule.weights()) {
                nodes.push((p as f64 * h + 0.5 * h * (x + 1.0), 0.5 * h * w));
            }
        }
        (1..=ORTHONORMAL_MODES)
            .map(|n| {
                nodes
                    .iter()
                    .map(|&(x, w)| {
                        let s = small.eval_eigenspinor(n, x).unwrap();
                        (w, s.phi1, s.chi2)
                    })
                    .collect()
            })
            .collect()
    };
    for a in 0..ORTHONORMAL_MODES {
        for b in 0..ORTHONORMAL_MODES {
            let v: Complex64 = samples[a]
                .iter()
                .zip(&samples[b])
                .map(|(&(w, p1, c1), &(_, p2, c2))| w * (p1.conj() * p2 + c1.conj() * c2))
                .sum();
            let expect = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((v - expect).norm());
        }
    }
    r.check(
        "1c",
        worst < ORTHONORMAL_TOL,
        format!("orthonormality modes 1..{ORTHONORMAL_MODES} by quadrature: max deviation {worst:.3e} < {ORTHONORMAL_TOL:e}"),
    );
    let el = t.elapsed();
    r.check(
        "1d",
        el < BASIS_BUDGET,
        format!("basis checks runtime {el:.2?} < {BASIS_BUDGET:?}"),
    );
}

fn criterion_2(r: &mut Report) {
    let t = Instant::now();
    let basis = BoxBasis::new(1.0, CROSS_METHOD_NMAX).unwrap();
    let mut worst: f64 = 0.0;
    for eps in [0.1, 0.5, 1.0] {
        for lambda in [1.0, 0.5] {
            let params = KickParams::new(eps, lambda, 0.47).unwrap();
            let a = build_kick_matrix_bessel(&basis, params, 1e-14).unwrap();
            let b =
                build_kick_matrix_quadrature(&basis, params, recommended_panels(&basis, &params))
                    .unwrap();
            for (x, y) in a.matrix().iter().zip(b.matrix()) {
                worst = worst.max((x - y).norm());
            }
        }
    }
    let el = t.elapsed();
    r.check(
        "2",
        worst < CROSS_METHOD_TOL && el < CROSS_METHOD_BUDGET,
        format!(
            "Bessel vs quadrature kick matrix, eps in {{0.1,0.5,1}}, lambda in {{L,L/2}}, n_max {CROSS_METHOD_NMAX}: \
             max |diff| {worst:.3e} < {CROSS_METHOD_TOL:e}, runtime {el:.2?} < {CROSS_METHOD_BUDGET:?}"
        ),
    );
}

fn criterion_3(r: &mut Report) {
    // Spinor written out independently: (i N sin kx, 0, 0, N κ cos kx).
    let basis = BoxBasis::new(1.0, KINETIC_MODES).unwrap();
    let kin = kinetic_matrix(&basis);
    let mass = mass_matrix(&basis);
    let mut worst_kin: f64 = 0.0;
    let mut worst_sum: f64 = 0.0;
    for n in 1..=KINETIC_MODES {
        let k = n as f64 * std::f64::consts::PI;
        let e = (k * k + 1.0).sqrt();
        let norm = ((e + 1.0) / e).sqrt();
        let kappa = k / (e + 1.0);
        // -i α_x ∂x: -i [conj(ψ₁) ∂ψ₄ + conj(ψ₄) ∂ψ₁]
        let t_nn = gl_integrate(0.0, 1.0, 64, |x| {
            let psi1 = Complex64::new(0.0, norm * (k * x).sin());
            let psi4 = Complex64::new(norm * kappa * (k * x).cos(), 0.0);
            let dpsi1 = Complex64::new(0.0, norm * k * (k * x).cos());
            let dpsi4 = Complex64::new(-norm * kappa * k * (k * x).sin(), 0.0);
            (Complex64::new(0.0, -1.0) * (psi1.conj() * dpsi4 + psi4.conj() * dpsi1)).re
        });
        let beta_nn = gl_integrate(0.0, 1.0, 64, |x| {
            let p = norm * (k * x).sin();
            let c = norm * kappa * (k * x).cos();
            p * p - c * c
        });
        worst_kin = worst_kin
            .max((t_nn - kin[n - 1]).abs())
            .max((t_nn - (e - 1.0 / e)).abs());
        worst_sum = worst_sum
            .max((t_nn + beta_nn - e).abs())
            .max((kin[n - 1] + mass[n - 1] - basis.energies()[n - 1]).abs());
    }
    r.check(
        "3",
        worst_kin < KINETIC_TOL && worst_sum < KINETIC_TOL,
        format!(
            "kinetic identity n <= {KINETIC_MODES}: |T_nn - (E-1/E)| {worst_kin:.3e}, |T_nn + beta_nn - E| {worst_sum:.3e} < {KINETIC_TOL:e}"
        ),
    );
}

fn criterion_4(r: &mut Report) {
    let basis = BoxBasis::new(1.0, 512).unwrap();
    let op =
        build_kick_matrix_bessel(&basis, KickParams::new(0.0, 1.0, 0.47).unwrap(), 1e-14).unwrap();
    let mut s = SpinorState::eigenmode(&basis, 1, false).unwrap();
    let e0 = kinetic_energy(&basis, s.coefficients()).unwrap();
    let (mut de, mut dn): (f64, f64) = (0.0, 0.0);
    let mut stepper = Stepper::new(&op, StepOrder::PhaseKick);
    for _ in 0..STATIONARY_KICKS {
        stepper.step(&mut s).unwrap();
        de = de.max((kinetic_energy(&basis, s.coefficients()).unwrap() - e0).abs());
        dn = dn.max((s.norm() - 1.0).abs());
    }
    r.check(
        "4",
        de < STATIONARY_TOL && dn < STATIONARY_TOL,
        format!("stationarity eps=0, mode 1, {STATIONARY_KICKS} kicks: max |dE| {de:.3e}, max |dnorm| {dn:.3e} < {STATIONARY_TOL:e}"),
    );
}

fn criterion_5(r: &mut Report) {
    let t = Instant::now();
    let basis = BoxBasis::new(1.0, ORACLE_NMAX).unwrap();
    let op =
        build_kick_matrix_bessel(&basis, KickParams::new(0.1, 1.0, 0.47).unwrap(), 1e-14).unwrap();
    let mut a = vec![Complex64::new(0.0, 0.0); ORACLE_NMAX];
    a[0] = Complex64::new(1.0, 0.0);

    let mut finals = Vec::new();
    let mut reports = Vec::new();
    for substeps in ORACLE_SUBSTEPS {
        let cfg = OracleConfig {
            n_grid: ORACLE_GRID,
            n_substeps: substeps,
            policy: LeakagePolicy::Discard,
        };
        let (report, grid) =
            run_oracle_check(&basis, &op, StepOrder::PhaseKick, &a, ORACLE_KICKS, &cfg).unwrap();
        finals.push(grid);
        reports.push(report);
    }
    let mut spectral = SpinorState::from_coefficients(a.clone(), false).unwrap();
    let mut stepper = Stepper::new(&op, StepOrder::PhaseKick);
    for _ in 0..ORACLE_KICKS {
        stepper.step(&mut spectral).unwrap();
    }
    let reference = GridState::from_spectral(&basis, spectral.coefficients(), ORACLE_GRID).unwrap();

    let d_coarse = finals[0].l2_distance(&finals[1]).unwrap();
    let d_fine = finals[1].l2_distance(&finals[2]).unwrap();
    let order = (d_coarse / d_fine).log2();
    let factor = 2f64.powf(order) - 1.0;
    // time-discretization error of the 64-substep grid run
    let grid_error = d_coarse / factor;
    let discrepancy = reports[1].final_distance();
    let mut extrapolated = finals[2].clone();
    for (e, (f, m)) in extrapolated
        .phi1
        .iter_mut()
        .zip(finals[2].phi1.iter().zip(&finals[1].phi1))
    {
        *e = f + (f - m) / factor;
    }
    for (e, (f, m)) in extrapolated
        .chi2
        .iter_mut()
        .zip(finals[2].chi2.iter().zip(&finals[1].chi2))
    {
        *e = f + (f - m) / factor;
    }
    let to_extrapolated = extrapolated.l2_distance(&reference).unwrap();
    let leak_gap = (reports[1].grid_leakage - reports[1].spectral_leakage).abs();
    let el = t.elapsed();
    r.check(
        "5a",
        (ORACLE_ORDER_BAND.0..=ORACLE_ORDER_BAND.1).contains(&order),
        format!(
            "oracle refinement order {order:.3} in [{}, {}] (grid changes {d_coarse:.3e}, {d_fine:.3e})",
            ORACLE_ORDER_BAND.0, ORACLE_ORDER_BAND.1
        ),
    );
    r.check(
        "5b",
        discrepancy <= ORACLE_RICHARDSON_SLACK * grid_error && to_extrapolated < reports[2].final_distance(),
        format!(
            "spectral vs grid L2 at {} substeps {discrepancy:.3e} <= {ORACLE_RICHARDSON_SLACK} x extrapolated time error {grid_error:.3e}; \
             distance to Richardson limit {to_extrapolated:.3e} < finest raw {:.3e}",
            ORACLE_SUBSTEPS[1],
            reports[2].final_distance()
        ),
    );
    r.check(
        "5c",
        leak_gap <= grid_error,
        format!(
            "leakage grid {:.6e} vs spectral {:.6e}: gap {leak_gap:.3e} <= scheme error {grid_error:.3e}",
            reports[1].grid_leakage, reports[1].spectral_leakage
        ),
    );
    r.check(
        "5d",
        el < ORACLE_BUDGET,
        format!("oracle runtime {el:.2?} < {ORACLE_BUDGET:?}"),
    );
}

fn criterion_6(r: &mut Report) {
    let t = Instant::now();
    let cases = [
        ("fig1_eps0.1", RegimeTag::Periodic, 512),
        ("fig4_T0.01", RegimeTag::Nonperiodic, 512),
        ("fig3_eps0.5", RegimeTag::Growing, 4096),
    ];
    for (name, want, n_max) in cases {
        let base = preset(name).unwrap().config;
        assert_eq!(base.n_kicks, REGIME_KICKS);
        let mut got = Vec::new();
        for n in [n_max, 2 * n_max] {
            let mut c = base.clone();
            c.n_max = n;
            c.nmax_limit = c.nmax_limit.max(n);
            c.auto_nmax = false;
            let s = simulate(&c, &RunOptions::default()).unwrap();
            let rep = s.regime.unwrap();
            got.push(format!(
                "n_max {n}: {} (rr {:.3}, peak {:.3})",
                rep.tag,
                rep.fit.residual_ratio,
                rep.peak.map_or(0.0, |p| p.0)
            ));
            r.lines.push(Line {
                id: "6-run",
                pass: rep.tag == want,
                detail: String::new(),
            });
        }
        let pass = r.lines.iter().rev().take(2).all(|l| l.pass);
        r.lines.truncate(r.lines.len() - 2);
        r.check(
            "6",
            pass,
            format!(
                "regime {name} (eps {}, T {}) over {REGIME_KICKS} kicks expected {want}: {}",
                base.epsilon,
                base.period,
                got.join("; ")
            ),
        );
    }
    let el = t.elapsed();
    r.check(
        "6t",
        el < REGIME_BUDGET,
        format!("regime runs runtime {el:.2?} < {REGIME_BUDGET:?}"),
    );
}

fn criterion_7(r: &mut Report) {
    let cfg = ClassifierConfig::default();
    let p = preset("fig3_eps0.5").unwrap().config;
    let s = simulate(&p, &RunOptions::default()).unwrap();
    let speed: Vec<f64> = s.series.velocity.iter().map(|v| v.abs()).collect();
    let vmax = speed.iter().copied().fold(0.0, f64::max);
    let v_tag = classify_values(&s.series.times, &speed, &cfg).unwrap().tag;
    let e_tag = s.regime.unwrap().tag;
    r.check(
        "7a",
        e_tag == RegimeTag::Growing && vmax <= 1.0 && v_tag != RegimeTag::Growing,
        format!("{}: E(t) {e_tag}, max |<v>| {vmax:.3e} (zero by mirror symmetry of the populated modes), |<v>| {v_tag}", "fig3_eps0.5"),
    );

    // Same kick, parity-broken start so the velocity is not trivially zero.
    let basis = BoxBasis::new(1.0, p.n_max).unwrap();
    let op = build_kick_matrix_bessel(
        &basis,
        KickParams::new(p.epsilon, p.lambda, p.period).unwrap(),
        p.bessel_tol,
    )
    .unwrap();
    let mut a = vec![Complex64::new(0.0, 0.0); p.n_max];
    a[0] = Complex64::new(1.0, 0.0);
    a[1] = Complex64::new(0.0, 1.0);
    let mut state = SpinorState::normalized(a, true).unwrap();
    let mut rec = SeriesRecorder::new(&basis, p.period);
    evolve(
        &mut state,
        &op,
        &EvolveOptions::new(p.n_kicks).stride(VELOCITY_STRIDE),
        &mut [&mut rec],
    )
    .unwrap();
    let series = rec.finish();
    let e = classify_values(&series.times, &series.energy, &cfg).unwrap();
    let speed: Vec<f64> = series.velocity.iter().map(|v| v.abs()).collect();
    let vmax = speed.iter().copied().fold(0.0, f64::max);
    let v = classify_values(&series.times, &speed, &cfg).unwrap();
    let fit = linear_fit(&series.times, &speed);
    r.check(
        "7b",
        e.tag == RegimeTag::Growing && v.tag != RegimeTag::Growing && vmax <= 1.0,
        format!(
            "(mode1 + i mode2)/sqrt2 under the same kick: E {} x{:.0}; |<v>| {} (slope {:.3e}, max {vmax:.4}, start {:.4}, end {:.4}, bounded by 1)",
            e.tag,
            e.growth_ratio,
            v.tag,
            fit.slope,
            speed[0],
            speed[speed.len() - 1]
        ),
    );
}

fn criterion_8(r: &mut Report) {
    let p = preset("fig9_packet").unwrap().config;
    let d = match p.initial {
        diracbox::scenario::InitialState::Packet(spec) => spec.d,
        _ => unreachable!(),
    };
    let s = simulate(&p, &RunOptions::default()).unwrap();
    let frame = |k: usize| {
        s.series
            .density_frames
            .iter()
            .find(|f| f.kick == k)
            .unwrap()
    };
    let f0 = frame(0);
    let f20 = frame(20);
    let asym = mirror_asymmetry(&f20.rho);
    let peaks20 = local_maxima(&f20.rho, PEAK_FLOOR);
    let peaks0 = local_maxima(&f0.rho, PEAK_FLOOR);
    let separation = match (peaks20.first(), peaks20.last()) {
        (Some(a), Some(b)) => f20.x[b.0] - f20.x[a.0],
        _ => 0.0,
    };
    let pos: Vec<String> = peaks20
        .iter()
        .map(|(i, _)| format!("{:.3}", f20.x[*i]))
        .collect();
    r.check(
        "8",
        asym < SPLIT_SYMMETRY_TOL
            && peaks20.len() >= 2
            && separation > PEAK_SEPARATION_WIDTHS * d
            && peaks0.len() == 1,
        format!(
            "fig9 packet at 20T: max |rho(x) - rho(L-x)| {asym:.3e} < {SPLIT_SYMMETRY_TOL:e}, maxima at [{}] separated {separation:.3} > {:.2}; \
             t = 0 maxima {}",
            pos.join(", "),
            PEAK_SEPARATION_WIDTHS * d,
            peaks0.len()
        ),
    );
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn criterion_9(r: &mut Report) {
    let root = tempfile::tempdir().unwrap();
    let mut mismatched = Vec::new();
    let mut n_files = 0;
    let presets = list_presets();
    for p in &presets {
        let a = root.path().join("a").join(p.name);
        let b = root.path().join("b").join(p.name);
        run_scenario(&p.config, &a, &RunOptions::default()).unwrap();
        run_scenario(&p.config, &b, &RunOptions::default()).unwrap();
        let (fa, fb) = (read_dir_sorted(&a), read_dir_sorted(&b));
        n_files += fa.len();
        if fa != fb {
            mismatched.push(p.name);
        }
    }
    r.check(
        "9",
        mismatched.is_empty(),
        format!(
            "determinism: all {} presets run twice, {n_files} output files byte-identical; mismatches {:?}",
            presets.len(),
            mismatched
        ),
    );
}

fn criterion_10(r: &mut Report) {
    let basis = BoxBasis::new(1.0, PERF_NMAX).unwrap();
    let t = Instant::now();
    let op = build_kick_matrix_bessel(
        &basis,
        KickParams::new(0.1, PERF_LAMBDA, 0.47).unwrap(),
        1e-14,
    )
    .unwrap();
    let mut s = SpinorState::eigenmode(&basis, 1, true).unwrap();
    let mut stepper = Stepper::new(&op, StepOrder::PhaseKick);
    for _ in 0..PERF_KICKS {
        stepper.step(&mut s).unwrap();
    }
    let el = t.elapsed();
    r.check(
        "10",
        el < PERF_BUDGET && op.fill_fraction() == 1.0 && (s.norm() - 1.0).abs() < 1e-12,
        format!(
            "n_max {PERF_NMAX}, {PERF_KICKS} dense kicks (lambda {PERF_LAMBDA}, fill {:.3}) incl. assembly: {el:.2?} < {PERF_BUDGET:?}",
            op.fill_fraction()
        ),
    );
}

fn main() -> ExitCode {
    let mut r = Report::default();
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r);
    criterion_6(&mut r);
    criterion_7(&mut r);
    criterion_8(&mut r);
    criterion_9(&mut r);
    criterion_10(&mut r);

    let red: Vec<&Line> = r.lines.iter().filter(|l| !l.pass).collect();
    let unexpected: Vec<&&Line> = red.iter().filter(|l| !KNOWN_RED.contains(&l.id)).collect();
    let passed = r.lines.len() - red.len();
    println!("acceptance: {passed}/{} lines pass", r.lines.len());
    for l in &red {
        if KNOWN_RED.contains(&l.id) {
            println!("known red {}: {}", l.id, l.detail);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        for l in unexpected {
            println!("unexpected failure {}", l.id);
        }
        ExitCode::FAILURE
    }
}
