use fockshift_core::displace::{self, DisplacementParams, Projector, Verifier};
use fockshift_core::fockspace::{self, leakage, StateVector};
use fockshift_core::model::{self, Model, ModelConfig};
use fockshift_core::{Error, LadderId};

fn verifier(cutoff: usize) -> Verifier {
    let m = Model::build(ModelConfig::default().with_cutoff(cutoff)).unwrap();
    Verifier::new(
        &m,
        Projector::HalfCutoff,
        &displace::default_samples(m.config().box_length),
    )
    .unwrap()
}

fn run(v: &Verifier, f1: f64, f2: f64) -> displace::ResidualReport {
    v.check_point(&DisplacementParams::new(v.model().config(), f1, f2))
        .unwrap()
}

#[test]
fn ladder_shifts_at_half_amplitude_cutoff_24() {
    let v = verifier(24);
    let p = DisplacementParams::new(v.model().config(), 0.5, 0.0);
    let u = displace::build_u(&p, v.model().layout()).unwrap();
    let r = v.check_ladder_shifts(&p, &u).unwrap();
    assert_eq!(r.rows.len(), 6);
    for row in &r.rows {
        assert!(row.residual <= 1e-8, "{} {:e}", row.identity, row.residual);
    }
}

#[test]
fn zero_f1_leaves_charged_ladders_exact() {
    let v = verifier(12);
    let r = run(&v, 0.0, 0.5);
    for row in r
        .rows
        .iter()
        .filter(|r| r.identity.contains("b[") || r.identity.contains("d["))
    {
        assert_eq!(row.residual, 0.0, "{}", row.identity);
    }
}

#[test]
fn unshifted_neutral_mode() {
    let c = ModelConfig {
        neutral_modes: vec![1, 2],
        cutoff_default: 20,
        ..ModelConfig::default()
    };
    let m = Model::build(c).unwrap();
    let v = Verifier::new(
        &m,
        Projector::Admissible {
            f1_max: 0.25,
            f2_max: 0.5,
        },
        &[0.0],
    )
    .unwrap();
    let r = run(&v, 0.25, 0.5);
    let rows: Vec<_> = r
        .rows
        .iter()
        .filter(|r| r.identity.starts_with("ladder_shift:a[1]"))
        .collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert!(row.residual <= 1e-9);
        assert_eq!(row.tolerance, 1e-9);
    }
    assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
}

#[test]
fn free_hamiltonian_vacuum_energies() {
    let v = verifier(24);
    let c = v.model().config().clone();
    for (f1, f2) in [(0.5, -0.25), (-0.25, 0.5)] {
        let p = DisplacementParams::new(&c, f1, f2);
        let u = displace::build_u(&p, v.model().layout()).unwrap();
        let displaced = u.apply_state(&StateVector::vacuum(v.model().layout())).unwrap();
        let es = fockspace::expectation(v.model().h0_neutral(), &displaced).unwrap().re;
        let ecs = fockspace::expectation(v.model().h0_charged(), &displaced).unwrap().re;
        assert!((es - c.omega_k() * f2 * f2).abs() <= 1e-8);
        assert!((ecs - 2.0 * c.energy_q() * f1 * f1).abs() <= 1e-8);
        let r = v.check_free_hamiltonian_shift(&p, &u).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }
    let zero = run(&v, 0.0, 0.0);
    for row in zero.rows.iter().filter(|r| r.identity.starts_with("free_shift")) {
        assert_eq!(row.residual, 0.0);
    }
}

#[test]
fn field_shift_is_even_in_x() {
    let c = ModelConfig::default().with_cutoff(24);
    let m = Model::build(c.clone()).unwrap();
    let xs = [0.7, -0.7];
    let v = Verifier::new(
        &m,
        Projector::Admissible {
            f1_max: 0.5,
            f2_max: 0.5,
        },
        &xs,
    )
    .unwrap();
    let r = run(&v, 0.5, 0.5);
    assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    let p = model::shift_profiles(&c).unwrap();
    assert_eq!(p.n1.eval(0.7), p.n1.eval(-0.7));
    assert_eq!(p.n2.eval(0.7), p.n2.eval(-0.7));
}

#[test]
fn interchange_is_exact_without_shift() {
    let v = verifier(12);
    let r = run(&v, 0.0, 0.0);
    for row in r.rows.iter().filter(|r| r.identity.starts_with("interchange")) {
        assert!(row.residual <= 1e-15, "{} {:e}", row.identity, row.residual);
    }
}

#[test]
fn interchange_at_half_amplitude() {
    let v = verifier(24);
    let r = run(&v, 0.5, 0.5);
    let rows: Vec<_> = r
        .rows
        .iter()
        .filter(|r| r.identity.starts_with("interchange"))
        .collect();
    assert_eq!(rows.len(), 16);
    for row in rows {
        assert!(row.residual <= 1e-7, "{} {:e}", row.identity, row.residual);
    }
}

#[test]
fn interaction_checks_skipped_for_free_fields() {
    let c = ModelConfig {
        lambda1: 0.0,
        lambda2: 0.0,
        cutoff_default: 20,
        ..ModelConfig::default()
    };
    let m = Model::build(c).unwrap();
    let v = Verifier::new(
        &m,
        Projector::Admissible {
            f1_max: 0.25,
            f2_max: 0.25,
        },
        &[0.0],
    )
    .unwrap();
    let r = run(&v, 0.25, 0.25);
    assert!(r.rows.iter().all(|r| !r.identity.starts_with("interchange")));
    assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
}

#[test]
fn unitary_structure() {
    let v = verifier(24);
    let r = run(&v, 1.0, -1.0);
    for name in ["unitarity", "factors_commute", "inverse_composition"] {
        let row = r.rows.iter().find(|r| r.identity == name).unwrap();
        assert!(row.residual <= 1e-9, "{name} {:e}", row.residual);
    }
}

#[test]
fn product_order_is_irrelevant() {
    let m = Model::build(ModelConfig::default().with_cutoff(10)).unwrap();
    let p = DisplacementParams::new(m.config(), 0.5, -0.5);
    let d = displace::build_displacement(&p, m.layout()).unwrap();
    let swapped = d.neutral.try_mul(&d.charged).unwrap();
    assert!(swapped.try_sub(&d.total).unwrap().max_norm() <= 1e-9);
}

#[test]
fn leakage_policy_rejects_small_cutoff() {
    let m = Model::build(ModelConfig::default().with_cutoff(4)).unwrap();
    let p = DisplacementParams::new(m.config(), 0.0, 1.0);
    match displace::build_u(&p, m.layout()).unwrap_err() {
        Error::Leakage {
            ladder, cutoff, tail, ..
        } => {
            assert_eq!(ladder, LadderId::a(2));
            assert_eq!(cutoff, 4);
            assert!(tail >= leakage::LEAKAGE_BOUND);
        }
        other => panic!("{other}"),
    }
}

#[test]
fn literal_projector_leaks_at_unit_amplitude() {
    // with cutoff 24 the displaced |12⟩ reaches the top level; this is why the
    // default verification projector is chosen from the leakage tail
    let tail = leakage::projected_tail(1.0, 24, 12);
    assert!(tail > leakage::LEAKAGE_BOUND, "{tail:e}");
    let v = verifier(24);
    let r = run(&v, 1.0, 0.0);
    assert!(!r.passed());
    let c = ModelConfig::default().with_cutoff(32);
    let m = Model::build(c).unwrap();
    let auto = Verifier::new(
        &m,
        Projector::Admissible {
            f1_max: 1.0,
            f2_max: 1.0,
        },
        &[0.0],
    )
    .unwrap();
    assert!(run(&auto, 1.0, 0.0).passed());
}
