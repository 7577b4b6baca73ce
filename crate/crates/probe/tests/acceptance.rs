//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the criteria execute in order and their timings are not
//! distorted by concurrently running tests.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fockshift_core::coeffs::{self, Reading};
use fockshift_core::displace::{self, Projector, Residual, Verifier};
use fockshift_core::{model, Model, ModelConfig};
use fockshift_probe::demo::{self, DemoResult};
use fockshift_probe::output::{COEFFICIENTS_FILE, REPORT_FILE, SWEEP_FILE, SWEEP_FIT_FILE};
use fockshift_probe::verify;

const LITERAL_CUTOFF: usize = 24;
const LITERAL_PROJECTOR: usize = 12;
const LADDER_TOL: f64 = 1e-8;
const FREE_TOL: f64 = 1e-8;
const FIELD_TOL: f64 = 1e-7;
const CENTRAL_TOL: f64 = 1e-6;
const ZERO_TOL: f64 = 1e-10;
const CLOSED_TOL: f64 = 1e-12;
const FIT_REL_TOL: f64 = 1e-6;
const QUADRATURE_TOL: f64 = 1e-9;
const LITERAL_RUNTIME: Duration = Duration::from_secs(30);
const DEMO_RUNTIME: Duration = Duration::from_secs(60);
const GRID: [f64; 7] = [0.0, 0.25, -0.25, 0.5, -0.5, 1.0, -1.0];

struct Tally {
    failed: Vec<u32>,
}

impl Tally {
    fn line(&mut self, id: u32, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failed.push(id);
        }
        let verdict = if pass { "PASS" } else { "FAIL" };
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{verdict} criterion {id}: {name}: {detail}");
    }

    fn info(&self, id: u32, detail: String) {
        let _ = writeln!(std::io::stdout().lock(), "INFO criterion {id}: {detail}");
    }
}

struct Worst {
    count: usize,
    failures: usize,
    worst: f64,
    worst_name: String,
}

fn worst<'a>(rows: impl IntoIterator<Item = &'a Residual>, tol: f64) -> Worst {
    let mut w = Worst {
        count: 0,
        failures: 0,
        worst: 0.0,
        worst_name: String::new(),
    };
    for r in rows {
        w.count += 1;
        let ok = r.residual <= tol && r.residual <= r.tolerance;
        if !ok {
            w.failures += 1;
        }
        if r.residual > w.worst || r.residual.is_nan() {
            w.worst = r.residual;
            w.worst_name = format!("{} at ({}, {})", r.identity, r.f1, r.f2);
        }
    }
    w
}

impl Worst {
    fn passed(&self) -> bool {
        self.count > 0 && self.failures == 0
    }

    fn describe(&self, tol: f64) -> String {
        format!(
            "{} residuals, {} above {tol:e}; worst {:.3e} ({})",
            self.count, self.failures, self.worst, self.worst_name
        )
    }
}

fn has_prefix<'a>(rows: &'a [Residual], prefixes: &'a [&str]) -> impl Iterator<Item = &'a Residual> {
    rows.iter()
        .filter(move |r| prefixes.iter().any(|p| r.identity.starts_with(p)))
}

/// The literal configuration of criteria 1–3: default model at cutoff 24,
/// projector at occupation 12, all 49 grid points, 8 sample points.
fn literal_grid() -> (Vec<Residual>, Duration) {
    let start = Instant::now();
    let m = Model::build(ModelConfig::default().with_cutoff(LITERAL_CUTOFF)).unwrap();
    let v = Verifier::new(
        &m,
        Projector::Fixed(LITERAL_PROJECTOR),
        &displace::default_samples(m.config().box_length),
    )
    .unwrap();
    let mut grid = Vec::new();
    for f1 in GRID {
        for f2 in GRID {
            grid.push(displace::DisplacementParams::new(m.config(), f1, f2));
        }
    }
    let rows = verify::displacement_checks(&v, &grid).unwrap();
    (rows, start.elapsed())
}

fn read_outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    [REPORT_FILE, COEFFICIENTS_FILE, SWEEP_FILE, SWEEP_FIT_FILE]
        .into_iter()
        .map(|f| (f.to_string(), fs::read(dir.join(f)).unwrap_or_default()))
        .collect()
}

fn criteria_1_to_3(t: &mut Tally, demo: &DemoResult) {
    let (rows, elapsed) = literal_grid();

    let ladder = worst(has_prefix(&rows, &["ladder_shift"]), LADDER_TOL);
    t.line(
        1,
        "ladder-shift identities, cutoff 24, projector 12",
        ladder.passed() && elapsed < LITERAL_RUNTIME,
        format!(
            "{}; grid runtime {:.1} s (target < 30 s)",
            ladder.describe(LADDER_TOL),
            elapsed.as_secs_f64()
        ),
    );

    let free = worst(has_prefix(&rows, &["free_shift", "vacuum_energy"]), FREE_TOL);
    t.line(
        2,
        "free-Hamiltonian shifts and vacuum energies",
        free.passed(),
        free.describe(FREE_TOL),
    );

    let field = worst(has_prefix(&rows, &["field_shift", "interchange"]), FIELD_TOL);
    t.line(
        3,
        "field shifts and normal-order interchange",
        field.passed(),
        field.describe(FIELD_TOL),
    );

    let checks: Vec<Residual> = demo.verify.checks().cloned().collect();
    for (id, prefixes, tol) in [
        (1, &["ladder_shift"][..], LADDER_TOL),
        (2, &["free_shift", "vacuum_energy"][..], FREE_TOL),
        (3, &["field_shift", "interchange"][..], FIELD_TOL),
    ] {
        let w = worst(has_prefix(&checks, prefixes), tol);
        t.info(
            id,
            format!(
                "same grid at cutoff {} with leakage-admissible caps {:?}: {}",
                ModelConfig::default().cutoff_default,
                demo.verify.caps,
                w.describe(tol)
            ),
        );
    }
}

fn criterion_4(t: &mut Tally, demo: &DemoResult) {
    let checks: Vec<Residual> = demo.verify.checks().cloned().collect();
    let central: Vec<&Residual> = has_prefix(&checks, &["central_identity"]).collect();
    let states: std::collections::BTreeSet<&str> = central.iter().map(|r| r.identity.as_str()).collect();
    let rel_ok = coeffs::CENTRAL_TOLERANCE == CENTRAL_TOL && central.iter().all(|r| r.residual <= r.tolerance);
    let w = worst(central.iter().copied(), f64::INFINITY);
    let readings = demo.verify.matching_readings();
    let unit = readings.contains(&Reading::Expansion);
    let literal_b4 = readings.contains(&Reading::LiteralQuartic);
    t.line(
        4,
        "central identity, 4 states x 25 points",
        central.len() == 100 && states.len() == 4 && rel_ok && unit,
        format!(
            "{} points over {} states, all within 1e-6(1+|E|): {rel_ok}; worst {:.3e}; quartic: unit coefficient {} the oracle, literal 4*lambda2*int(n2^4) {} the oracle",
            central.len(),
            states.len(),
            w.worst,
            if unit { "matches" } else { "does not match" },
            if literal_b4 { "matches" } else { "does not match" },
        ),
    );
}

fn criterion_5(t: &mut Tally, demo: &DemoResult) {
    let c = ModelConfig::default();
    let s = &demo.coefficients.set;
    let e_q = c.energy_q();
    let a5 = c.lambda1 / (e_q * (2.0 * c.omega_k() * c.box_length).sqrt());
    let zeros = [s.a1, s.a2, s.a3, s.b2, s.b3];
    let worst_zero = zeros.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let a4_err = (s.a4 - 2.0 * e_q).abs();
    let a5_err = (s.a5 - a5).abs();
    t.line(
        5,
        "vacuum coefficient closed forms (k = 2q)",
        worst_zero <= ZERO_TOL && a4_err <= CLOSED_TOL && a5_err <= CLOSED_TOL && s.a5 > 0.0,
        format!(
            "max |A1,A2,A3,B2,B3| = {worst_zero:.3e}; |A4 - 2E_q| = {a4_err:.3e}; |A5 - lambda1/(E_q sqrt(2 omega_k L))| = {a5_err:.3e}; A5 = {:.16e}",
            s.a5
        ),
    );
}

fn criterion_6(t: &mut Tally, demo: &DemoResult, elapsed: Duration) {
    let s = &demo.coefficients.set;
    let f2 = demo.f2;
    let expected = s.a4 - f2.abs() * s.a5;
    let c2 = demo.descent_coefficient();
    let rel = (c2 - expected).abs() / expected.abs();
    let f2_ok = (f2 + 2.0 * s.a4 / s.a5).abs() <= 1e-12 * f2.abs();
    let (e0, e10) = (demo.energy_at_start(), demo.energy_at_end());
    t.line(
        6,
        "unboundedness verdict",
        rel <= FIT_REL_TOL && c2 < 0.0 && f2_ok && e10 < e0 && demo.descent.descent_certified() && elapsed < DEMO_RUNTIME,
        format!(
            "f2 = {f2:.12}; fitted c2 = {c2:.12e} against A4 - |f2| A5 = {expected:.12e} (rel {rel:.1e}); E(10) = {e10:.10e} < E(0) = {e0:.10e}: {}; demo runtime {:.1} s (target < 60 s)",
            e10 < e0,
            elapsed.as_secs_f64()
        ),
    );
}

fn criterion_7(t: &mut Tally) {
    let two_mode = ModelConfig {
        neutral_modes: vec![2, 3],
        charged_modes: vec![1, 2],
        cutoff_default: 2,
        ..ModelConfig::default()
    };
    let mut details = Vec::new();
    let mut pass = true;
    for (name, c) in [("default", ModelConfig::default()), ("two-mode", two_mode)] {
        let layout = c.layout().unwrap();
        let band = coeffs::required_band(&c).unwrap() as usize;
        let points = 2 * band + 2;
        let quad = model::interaction_by_quadrature(&c, &layout, points).unwrap();
        let symbolic = model::interaction_polynomial(&c).unwrap().realize(&layout).unwrap();
        let diff = quad.try_sub(&symbolic).unwrap().max_norm();
        pass &= diff <= QUADRATURE_TOL;
        details.push(format!("{name} ({points} points, dim {}): {diff:.3e}", layout.dim()));
    }
    t.line(7, "symbolic interaction vs x-grid quadrature", pass, details.join("; "));
}

fn criterion_8(t: &mut Tally, first: &Path) {
    let second = tempfile::tempdir().unwrap();
    demo::cmd_demo(ModelConfig::default(), second.path()).unwrap();
    let a = read_outputs(first);
    let b = read_outputs(second.path());
    let identical = a.iter().all(|(_, bytes)| !bytes.is_empty()) && a == b;
    let sizes: Vec<String> = a
        .iter()
        .map(|(f, bytes)| format!("{f} {} bytes", bytes.len()))
        .collect();
    t.line(
        8,
        "demo CSV outputs byte-identical across runs",
        identical,
        sizes.join(", "),
    );
}

fn main() -> ExitCode {
    let mut t = Tally { failed: Vec::new() };
    let first = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let (demo, _) = demo::cmd_demo(ModelConfig::default(), first.path()).unwrap();
    let demo_elapsed = start.elapsed();

    criteria_1_to_3(&mut t, &demo);
    criterion_4(&mut t, &demo);
    criterion_5(&mut t, &demo);
    criterion_6(&mut t, &demo, demo_elapsed);
    criterion_7(&mut t);
    criterion_8(&mut t, first.path());

    let mut out = std::io::stdout().lock();
    if t.failed.is_empty() {
        let _ = writeln!(out, "acceptance: all 8 criteria pass");
        ExitCode::SUCCESS
    } else {
        let _ = writeln!(out, "acceptance: criteria {:?} FAIL", t.failed);
        ExitCode::FAILURE
    }
}
