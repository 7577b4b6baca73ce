//! Truncated multi-ladder Fock space.
//!
//! Each ladder keeps occupations `0..=cutoff`; raising the top level gives
//! zero. Operators are Kronecker-structured (see [`OperatorMatrix`]).

mod layout;
pub mod leakage;
mod operator;
mod state;

use alloc::sync::Arc;
use alloc::vec;

use num_complex::Complex64;

pub use layout::{Family, FockLayout, LadderId};
pub use operator::OperatorMatrix;
pub use state::{StateVector, NORM_TOLERANCE};

use crate::dense::LocalMatrix;
use crate::error::{Error, Result};

/// Relative anti-Hermiticity tolerance accepted by [`exp_antihermitian`].
pub const ANTIHERMITIAN_TOLERANCE: f64 = 1e-10;
/// Max-norm unitarity tolerance guaranteed by [`exp_antihermitian`].
pub const UNITARITY_TOLERANCE: f64 = 1e-9;

pub fn annihilator(layout: &Arc<FockLayout>, id: LadderId) -> Result<OperatorMatrix> {
    let pos = layout.position(id)?;
    OperatorMatrix::local(layout, pos, LocalMatrix::lowering(layout.cutoff_at(pos)))
}

pub fn creator(layout: &Arc<FockLayout>, id: LadderId) -> Result<OperatorMatrix> {
    let pos = layout.position(id)?;
    OperatorMatrix::local(layout, pos, LocalMatrix::raising(layout.cutoff_at(pos)))
}

/// `x† x` for the ladder `x`.
pub fn number(layout: &Arc<FockLayout>, id: LadderId) -> Result<OperatorMatrix> {
    let pos = layout.position(id)?;
    let n = layout.cutoff_at(pos);
    let mut diag = LocalMatrix::zeros(n + 1);
    for k in 0..=n {
        diag.set(k, k, Complex64::new(k as f64, 0.0));
    }
    OperatorMatrix::local(layout, pos, diag)
}

/// `exp(G)` for an anti-Hermitian, ladder-separable generator.
///
/// The generator is split into per-ladder pieces (which commute), each piece is
/// densified and exponentiated by scaling and squaring, and the result is the
/// Kronecker product of the local exponentials. Generators with terms acting
/// on several ladders at once are rejected.
pub fn exp_antihermitian(generator: &OperatorMatrix) -> Result<OperatorMatrix> {
    let layout = generator.layout();
    let norm = generator.max_norm();
    let defect = generator.try_add(&generator.adjoint())?.max_norm();
    if defect > ANTIHERMITIAN_TOLERANCE * norm {
        return Err(Error::NotAntiHermitian { defect, norm });
    }

    let (scalar, parts) = generator.separable_parts().ok_or(Error::CoupledGenerator)?;
    let phase = scalar.exp();
    let mut worst = (phase.norm() - 1.0).abs();
    let mut factors = vec![None; layout.len()];
    for (pos, part) in parts.into_iter().enumerate() {
        if let Some(g) = part {
            let u = g.expm();
            let gram = &u.adjoint().matmul(&u) - &LocalMatrix::identity(u.dim());
            worst = worst.max(gram.max_abs());
            factors[pos] = Some(u);
        }
    }
    if worst > UNITARITY_TOLERANCE {
        return Err(Error::NotUnitary(worst));
    }
    OperatorMatrix::kron(layout, phase, factors)
}

/// `⟨ψ|op|ψ⟩` for a normalized state.
pub fn expectation(op: &OperatorMatrix, state: &StateVector) -> Result<Complex64> {
    op.same_layout_state(state)?;
    if !state.is_normalized() {
        return Err(Error::NotNormalized(state.norm()));
    }
    let image = op.apply(state.amplitudes())?;
    Ok(state.amplitudes().iter().zip(&image).map(|(a, b)| a.conj() * b).sum())
}

pub fn vacuum(layout: &Arc<FockLayout>) -> StateVector {
    StateVector::vacuum(layout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn single(cutoff: usize) -> Arc<FockLayout> {
        Arc::new(FockLayout::new([(LadderId::a(1), cutoff)]).unwrap())
    }

    fn three() -> Arc<FockLayout> {
        Arc::new(FockLayout::new([(LadderId::a(2), 4), (LadderId::b(1), 3), (LadderId::d(1), 3)]).unwrap())
    }

    #[test]
    fn annihilator_lowers_one_to_zero() {
        let l = single(3);
        let a = annihilator(&l, LadderId::a(1)).unwrap();
        let one = StateVector::basis(&l, &[(LadderId::a(1), 1)]).unwrap();
        let out = a.apply_state(&one).unwrap();
        assert_eq!(out, vacuum(&l));
    }

    #[test]
    fn creator_on_vacuum_and_top_level() {
        let l = single(3);
        let ad = creator(&l, LadderId::a(1)).unwrap();
        let one = StateVector::basis(&l, &[(LadderId::a(1), 1)]).unwrap();
        assert_eq!(ad.apply_state(&vacuum(&l)).unwrap(), one);
        let top = StateVector::basis(&l, &[(LadderId::a(1), 3)]).unwrap();
        assert!(ad
            .apply_state(&top)
            .unwrap()
            .amplitudes()
            .iter()
            .all(|z| z.norm() == 0.0));
    }

    #[test]
    fn number_expectations() {
        let l = single(3);
        let a = annihilator(&l, LadderId::a(1)).unwrap();
        let n = creator(&l, LadderId::a(1)).unwrap().try_mul(&a).unwrap();
        assert_eq!(expectation(&n, &vacuum(&l)).unwrap(), Complex64::new(0.0, 0.0));
        let one = StateVector::basis(&l, &[(LadderId::a(1), 1)]).unwrap();
        assert_eq!(expectation(&n, &one).unwrap(), Complex64::new(1.0, 0.0));
        let diag: [f64; 4] = [0.0, 1.0, 2.0, 3.0];
        for (i, d) in diag.iter().enumerate() {
            assert!((n.entry(i, i).re - *d).abs() < 1e-14);
        }
    }

    #[test]
    fn unknown_ladder_is_reported() {
        let l = single(3);
        assert_eq!(
            annihilator(&l, LadderId::b(1)).unwrap_err(),
            Error::UnknownLadder(LadderId::b(1))
        );
        assert!(creator(&l, LadderId::d(1)).is_err());
    }

    #[test]
    fn commutator_is_identity_below_the_top() {
        let l = three();
        for (pos, &id) in l.ladders().iter().enumerate() {
            let a = annihilator(&l, id).unwrap();
            let ad = creator(&l, id).unwrap();
            let defect = a
                .commutator(&ad)
                .unwrap()
                .try_sub(&OperatorMatrix::identity(&l))
                .unwrap();
            let mut caps = l.cutoffs().to_vec();
            caps[pos] -= 1;
            assert!(defect.projected_max_norm(&caps).unwrap() < 1e-14);
            // the top level is where truncation shows
            assert!(defect.max_norm() > 1.0);
        }
    }

    #[test]
    fn cross_commutators_vanish() {
        let l = three();
        let ids = l.ladders().to_vec();
        for &x in &ids {
            for &y in &ids {
                if x == y {
                    continue;
                }
                let ops_x = [annihilator(&l, x).unwrap(), creator(&l, x).unwrap()];
                let ops_y = [annihilator(&l, y).unwrap(), creator(&l, y).unwrap()];
                for p in &ops_x {
                    for q in &ops_y {
                        assert_eq!(p.commutator(q).unwrap().max_norm(), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn creator_is_exact_adjoint() {
        let l = three();
        for &id in l.ladders() {
            let a = annihilator(&l, id).unwrap();
            let ad = creator(&l, id).unwrap();
            assert_eq!(ad.try_sub(&a.adjoint()).unwrap().max_norm(), 0.0);
        }
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let l = three();
        let u = exp_antihermitian(&OperatorMatrix::zero(&l)).unwrap();
        assert_eq!(u.try_sub(&OperatorMatrix::identity(&l)).unwrap().max_norm(), 0.0);
    }

    #[test]
    fn displacement_is_unitary() {
        let l = single(24);
        let a = annihilator(&l, LadderId::a(1)).unwrap();
        let g = a.adjoint().try_sub(&a).unwrap().scale_re(0.5);
        let u = exp_antihermitian(&g).unwrap();
        let gram = u
            .adjoint()
            .try_mul(&u)
            .unwrap()
            .try_sub(&OperatorMatrix::identity(&l))
            .unwrap();
        assert!(gram.max_norm() <= 1e-9);
    }

    #[test]
    fn displaced_vacuum_shifts_the_annihilator() {
        let f = 0.5;
        let l = single(40);
        let a = annihilator(&l, LadderId::a(1)).unwrap();
        let u = exp_antihermitian(&a.adjoint().try_sub(&a).unwrap().scale_re(f)).unwrap();
        let shifted = a.conjugate_by(&u).unwrap();
        let v = vacuum(&l);
        assert_abs_diff_eq!(expectation(&shifted, &v).unwrap().re, f, epsilon = 1e-12);
        let n = number(&l, LadderId::a(1)).unwrap();
        let displaced = u.apply_state(&v).unwrap();
        assert_abs_diff_eq!(expectation(&n, &displaced).unwrap().re, f * f, epsilon = 1e-12);
    }

    #[test]
    fn rejects_hermitian_and_coupled_generators() {
        let l = three();
        let a = annihilator(&l, LadderId::a(2)).unwrap();
        let herm = a.try_add(&a.adjoint()).unwrap();
        assert!(matches!(exp_antihermitian(&herm), Err(Error::NotAntiHermitian { .. })));
        let b = annihilator(&l, LadderId::b(1)).unwrap();
        let ab = a.try_mul(&b).unwrap();
        let coupled = ab.try_sub(&ab.adjoint()).unwrap();
        assert_eq!(exp_antihermitian(&coupled).unwrap_err(), Error::CoupledGenerator);
    }

    #[test]
    fn expectation_requires_normalized_state() {
        let l = single(3);
        let s = StateVector::from_raw(
            &l,
            vec![
                Complex64::new(2.0, 0.0),
                Complex64::default(),
                Complex64::default(),
                Complex64::default(),
            ],
        )
        .unwrap();
        assert!(matches!(
            expectation(&OperatorMatrix::identity(&l), &s),
            Err(Error::NotNormalized(_))
        ));
        let v = vacuum(&l);
        assert_eq!(
            expectation(&OperatorMatrix::identity(&l), &v).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(v.inner(&v).unwrap(), Complex64::new(1.0, 0.0));
    }
}
