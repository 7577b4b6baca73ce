use fockshift_core::fockspace::{self, StateVector};
use fockshift_core::model::{self, Model, ModelConfig};
use fockshift_core::LadderId;

fn config(cutoff: usize) -> ModelConfig {
    ModelConfig::default().with_cutoff(cutoff)
}

#[test]
fn free_hamiltonian_eigenvalues() {
    let c = config(4);
    let layout = c.layout().unwrap();
    let h0 = model::build_h0(&c).unwrap();
    let vac = StateVector::vacuum(&layout);
    assert_eq!(fockspace::expectation(&h0, &vac).unwrap().re, 0.0);

    let one_b = StateVector::basis(&layout, &[(LadderId::b(1), 1)]).unwrap();
    let image = h0.apply_state(&one_b).unwrap();
    for (x, y) in image.amplitudes().iter().zip(one_b.amplitudes()) {
        assert!((x - y * c.energy_q()).norm() < 1e-14);
    }

    let mixed = StateVector::basis(&layout, &[(LadderId::a(2), 1), (LadderId::d(1), 1)]).unwrap();
    let e = fockspace::expectation(&h0, &mixed).unwrap().re;
    assert!((e - (c.omega_k() + c.energy_q())).abs() < 1e-14);
}

#[test]
fn zero_couplings_reduce_to_free_part() {
    let c = ModelConfig {
        lambda1: 0.0,
        lambda2: 0.0,
        ..config(4)
    };
    let h = model::build_h(&c).unwrap();
    let h0 = model::build_h0(&c).unwrap();
    assert_eq!(h.try_sub(&h0).unwrap().max_norm(), 0.0);
}

#[test]
fn vacuum_energy_vanishes() {
    let m = Model::build(config(6)).unwrap();
    let e = m.energy(&StateVector::vacuum(m.layout())).unwrap();
    assert_eq!(e.norm(), 0.0);
}

#[test]
fn cubic_matrix_element() {
    let c = config(3);
    let m = Model::build(c.clone()).unwrap();
    let layout = m.layout();
    let bra = layout.index_of(&[0, 1, 1]).unwrap();
    let ket = layout.index_of(&[1, 0, 0]).unwrap();
    let l = c.box_length;
    let expect = c.lambda1 * l / (2.0 * c.energy_q() * l * (2.0 * c.omega_k() * l).sqrt());
    let got = m.hamiltonian().entry(bra, ket);
    assert!((got.re - expect).abs() < 1e-15, "{got} vs {expect}");
    assert_eq!(got.im, 0.0);
    assert!((m.hamiltonian().entry(ket, bra) - got.conj()).norm() < 1e-15);
}

#[test]
fn hamiltonian_is_hermitian_and_conserves_charge() {
    let configs = [
        config(5),
        ModelConfig {
            neutral_modes: vec![1, 2],
            charged_modes: vec![-1, 1],
            lambda1: 0.7,
            lambda2: 1.3,
            mass_neutral: 0.5,
            cutoff_default: 2,
            ..ModelConfig::default()
        },
    ];
    for c in configs {
        let m = Model::build(c.clone()).unwrap();
        let h = m.hamiltonian();
        assert!(h.try_sub(&h.adjoint()).unwrap().max_norm() <= 1e-12);
        let q = model::charge_operator(&c, m.layout()).unwrap();
        assert!(h.commutator(&q).unwrap().max_norm() <= 1e-10);
    }
}

#[test]
fn interaction_changes_charge_neutrally() {
    // b† d† a creates one particle and one antiparticle
    let c = config(3);
    let m = Model::build(c.clone()).unwrap();
    let q = model::charge_operator(&c, m.layout()).unwrap();
    let one_a = StateVector::basis(m.layout(), &[(LadderId::a(2), 1)]).unwrap();
    let image = m.interaction().unwrap().apply_state(&one_a).unwrap();
    let charged = q.apply_state(&image).unwrap();
    assert!(charged.amplitudes().iter().all(|z| z.norm() < 1e-15));
}

#[test]
fn default_layout_dimension() {
    let m = Model::build(ModelConfig::default()).unwrap();
    assert_eq!(m.layout().dim(), 33 * 33 * 33);
    assert_eq!(m.layout().describe(), "a[2]:32 b[1]:32 d[1]:32");
}
