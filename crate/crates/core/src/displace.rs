//! Coherent displacements `Û_cs = exp(f₁((b_q† + d_q†) − (b_q + d_q)))`,
//! `Û_s = exp(f₂(a_k† − a_k))`, `Û = Û_cs Û_s`, and numerical checks of the
//! operator identities they imply.
//!
//! Every check compares two operators on the block `P` of occupations up to
//! a per-ladder cap and reports the largest entry of the difference.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fockspace::{self, leakage, FockLayout, LadderId, OperatorMatrix, StateVector};
use crate::ladderalg::{field_polynomial, Field, LadderPolynomial};
use crate::model::{self, Model, ModelConfig, ShiftProfile};

/// Shift values checked by the verification suite, for both amplitudes.
pub const VERIFY_GRID: [f64; 7] = [-1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0];
pub const LADDER_SHIFT_TOLERANCE: f64 = 1e-8;
pub const UNSHIFTED_LADDER_TOLERANCE: f64 = 1e-9;
pub const FREE_SHIFT_TOLERANCE: f64 = 1e-8;
pub const VACUUM_ENERGY_TOLERANCE: f64 = 1e-8;
pub const FIELD_SHIFT_TOLERANCE: f64 = 1e-7;
pub const INTERCHANGE_TOLERANCE: f64 = 1e-7;
pub const UNITARY_TOLERANCE: f64 = 1e-9;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct DisplacementParams {
    pub f1: f64,
    pub f2: f64,
    pub q_index: i32,
    pub k_index: i32,
}

impl DisplacementParams {
    pub fn new(config: &ModelConfig, f1: f64, f2: f64) -> Self {
        Self {
            f1,
            f2,
            q_index: config.q_index,
            k_index: config.k_index,
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            f1: -self.f1,
            f2: -self.f2,
            ..*self
        }
    }

    /// Shift applied to the annihilator of `id`.
    pub fn shift_of(&self, id: LadderId) -> f64 {
        match id.family {
            fockspace::Family::A if id.mode_index == self.k_index => self.f2,
            fockspace::Family::B | fockspace::Family::D if id.mode_index == self.q_index => self.f1,
            _ => 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.f1.is_finite() && self.f2.is_finite() {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "displacement amplitudes must be finite, got ({}, {})",
                self.f1, self.f2
            )))
        }
    }
}

/// The two commuting factors and their product.
#[derive(Clone, Debug)]
pub struct Displacement {
    pub charged: OperatorMatrix,
    pub neutral: OperatorMatrix,
    pub total: OperatorMatrix,
}

fn shift_generator(layout: &Arc<FockLayout>, ids: &[LadderId], f: f64) -> Result<OperatorMatrix> {
    let mut g = OperatorMatrix::zero(layout);
    for &id in ids {
        let a = fockspace::annihilator(layout, id)?;
        g = g.try_add(&fockspace::creator(layout, id)?.try_sub(&a)?)?;
    }
    Ok(g.scale_re(f))
}

/// Builds `Û_cs`, `Û_s` and `Û`, rejecting amplitudes that violate the
/// leakage bound on the displaced ladders.
pub fn build_displacement(params: &DisplacementParams, layout: &Arc<FockLayout>) -> Result<Displacement> {
    params.validate()?;
    let charged_ids = [LadderId::b(params.q_index), LadderId::d(params.q_index)];
    let neutral_ids = [LadderId::a(params.k_index)];
    for id in charged_ids.iter().chain(&neutral_ids) {
        leakage::check_leakage(*id, params.shift_of(*id), layout.cutoff(*id)?)?;
    }
    let charged = fockspace::exp_antihermitian(&shift_generator(layout, &charged_ids, params.f1)?)?;
    let neutral = fockspace::exp_antihermitian(&shift_generator(layout, &neutral_ids, params.f2)?)?;
    let total = charged.try_mul(&neutral)?;
    Ok(Displacement {
        charged,
        neutral,
        total,
    })
}

/// `Û = Û_cs Û_s`.
pub fn build_u(params: &DisplacementParams, layout: &Arc<FockLayout>) -> Result<OperatorMatrix> {
    Ok(build_displacement(params, layout)?.total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub identity: String,
    pub f1: f64,
    pub f2: f64,
    pub residual: f64,
    pub tolerance: f64,
}

impl Residual {
    /// NaN residuals fail.
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResidualReport {
    pub rows: Vec<Residual>,
}

impl ResidualReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(Residual::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Residual> {
        self.rows.iter().filter(|r| !r.passed())
    }

    /// Largest `residual / tolerance` among rows whose name starts with `prefix`.
    pub fn worst_ratio(&self, prefix: &str) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.identity.starts_with(prefix))
            .map(|r| {
                if r.residual.is_nan() {
                    f64::INFINITY
                } else {
                    r.residual / r.tolerance
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn extend(&mut self, other: ResidualReport) {
        self.rows.extend(other.rows);
    }
}

/// Occupation caps of the comparison block.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Projector {
    /// `cutoff / 2` on every ladder.
    HalfCutoff,
    /// The same cap on every ladder (clipped to the cutoff).
    Fixed(usize),
    /// Per ladder, the largest cap up to `cutoff / 2` whose projected leakage
    /// tail stays below the bound for the largest amplitude used on it.
    Admissible { f1_max: f64, f2_max: f64 },
}

impl Projector {
    pub fn caps(&self, config: &ModelConfig, layout: &FockLayout) -> Result<Vec<usize>> {
        layout
            .ladders()
            .iter()
            .zip(layout.cutoffs())
            .map(|(&id, &n)| match *self {
                Projector::HalfCutoff => Ok(n / 2),
                Projector::Fixed(p) => Ok(p.min(n)),
                Projector::Admissible { f1_max, f2_max } => {
                    let f = DisplacementParams::new(config, f1_max, f2_max).shift_of(id).abs();
                    leakage::admissible_projector(f, n).ok_or(Error::Leakage {
                        ladder: id,
                        amplitude: f,
                        cutoff: n,
                        tail: leakage::vacuum_tail(f, n),
                    })
                }
            })
            .collect()
    }
}

/// `−L/2 + jL/8` for `j = 0..8`.
pub fn default_samples(box_length: f64) -> Vec<f64> {
    (0..8)
        .map(|j| -box_length / 2.0 + j as f64 * box_length / 8.0)
        .collect()
}

struct SamplePoint {
    x: f64,
    phi_hat: OperatorMatrix,
    phi: OperatorMatrix,
    phi_dag: OperatorMatrix,
    /// `:φ̂^m:` for `m = 0..=4`.
    quartic_powers: Vec<OperatorMatrix>,
    /// `:φ†φ:φ̂`, `(φ† + φ)φ̂`, `:φ†φ:`, `φ† + φ`.
    cubic_parts: [OperatorMatrix; 4],
}

/// Precomputed operators for running every check at many `(f₁, f₂)` points.
pub struct Verifier {
    model: Model,
    profile: ShiftProfile,
    caps: Vec<usize>,
    points: Vec<SamplePoint>,
    vacuum: StateVector,
}

impl Verifier {
    pub fn new(model: &Model, projector: Projector, samples: &[f64]) -> Result<Self> {
        let config = model.config();
        let layout = model.layout();
        let caps = projector.caps(config, layout)?;
        let profile = model::shift_profiles(config)?;
        let l = config.box_length;
        let neutral = field_polynomial(Field::Neutral, config)?;
        let charged = field_polynomial(Field::Charged, config)?;
        let charged_dag = field_polynomial(Field::ChargedDagger, config)?;
        let density = charged_dag.multiply(&charged).normal_order();
        let charged_sum = charged_dag.add(&charged);
        let points = samples
            .iter()
            .map(|&x| {
                let at = |p: &LadderPolynomial| p.at_point(x, l).realize(layout);
                let quartic_powers = (0..=4u32)
                    .map(|m| at(&neutral.pow(m).normal_order()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(SamplePoint {
                    x,
                    phi_hat: at(&neutral)?,
                    phi: at(&charged)?,
                    phi_dag: at(&charged_dag)?,
                    quartic_powers,
                    cubic_parts: [
                        at(&density.multiply(&neutral))?,
                        at(&charged_sum.multiply(&neutral))?,
                        at(&density)?,
                        at(&charged_sum)?,
                    ],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            model: model.clone(),
            profile,
            caps,
            points,
            vacuum: StateVector::vacuum(layout),
        })
    }

    pub fn caps(&self) -> &[usize] {
        &self.caps
    }

    pub fn samples(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    fn layout(&self) -> &Arc<FockLayout> {
        self.model.layout()
    }

    fn norm(&self, op: &OperatorMatrix) -> Result<f64> {
        op.projected_max_norm(&self.caps)
    }

    fn row(&self, identity: String, p: &DisplacementParams, residual: f64, tolerance: f64) -> Residual {
        Residual {
            identity,
            f1: p.f1,
            f2: p.f2,
            residual,
            tolerance,
        }
    }

    pub fn displacement(&self, params: &DisplacementParams) -> Result<Displacement> {
        build_displacement(params, self.layout())
    }

    /// Every check at one `(f₁, f₂)` point.
    pub fn check_point(&self, params: &DisplacementParams) -> Result<ResidualReport> {
        let d = self.displacement(params)?;
        let mut report = ResidualReport::default();
        report.extend(self.check_unitary_structure(params, &d)?);
        report.extend(self.check_ladder_shifts(params, &d.total)?);
        report.extend(self.check_free_hamiltonian_shift(params, &d.total)?);
        report.extend(self.check_field_shift(params, &d.total)?);
        report.extend(self.check_normal_order_interchange(params, &d.total)?);
        Ok(report)
    }

    /// `Û†Û = I`, `[Û_cs, Û_s] = 0` and `Û(f)Û(−f) = I` on the full truncated space.
    pub fn check_unitary_structure(&self, params: &DisplacementParams, d: &Displacement) -> Result<ResidualReport> {
        let gram = d.total.adjoint().try_mul(&d.total)?;
        let commutator = d.charged.commutator(&d.neutral)?;
        let inverse = self.displacement(&params.negated())?;
        let round_trip = d.total.try_mul(&inverse.total)?;
        Ok(ResidualReport {
            rows: alloc::vec![
                self.row("unitarity".into(), params, gram.identity_defect(), UNITARY_TOLERANCE),
                self.row(
                    "factors_commute".into(),
                    params,
                    commutator.max_norm(),
                    UNITARY_TOLERANCE
                ),
                self.row(
                    "inverse_composition".into(),
                    params,
                    round_trip.identity_defect(),
                    UNITARY_TOLERANCE
                ),
            ],
        })
    }

    /// `Û†xÛ − x − f` for every ladder operator and its adjoint.
    pub fn check_ladder_shifts(&self, params: &DisplacementParams, u: &OperatorMatrix) -> Result<ResidualReport> {
        let layout = self.layout();
        let id_op = OperatorMatrix::identity(layout);
        let mut rows = Vec::new();
        for &id in layout.ladders() {
            let shift = params.shift_of(id);
            let tolerance = if shift == 0.0 && !self.is_displaced(id) {
                UNSHIFTED_LADDER_TOLERANCE
            } else {
                LADDER_SHIFT_TOLERANCE
            };
            for (dagger, op) in [
                (false, fockspace::annihilator(layout, id)?),
                (true, fockspace::creator(layout, id)?),
            ] {
                let lhs = op.conjugate_by_product(u)?;
                let rhs = op.try_add(&id_op.scale_re(shift))?;
                let name = if dagger {
                    format!("ladder_shift:{id}^dag")
                } else {
                    format!("ladder_shift:{id}")
                };
                rows.push(self.row(name, params, self.norm(&lhs.try_sub(&rhs)?)?, tolerance));
            }
        }
        Ok(ResidualReport { rows })
    }

    fn is_displaced(&self, id: LadderId) -> bool {
        let c = self.model.config();
        match id.family {
            fockspace::Family::A => id.mode_index == c.k_index,
            _ => id.mode_index == c.q_index,
        }
    }

    /// Shifted free Hamiltonians and their displaced-vacuum energies.
    pub fn check_free_hamiltonian_shift(
        &self,
        params: &DisplacementParams,
        u: &OperatorMatrix,
    ) -> Result<ResidualReport> {
        let layout = self.layout();
        let config = self.model.config();
        let id_op = OperatorMatrix::identity(layout);
        let (f1, f2) = (params.f1, params.f2);
        let omega_k = config.omega(params.k_index);
        let e_q = config.charged_energy(params.q_index);

        let quad = |id: LadderId| -> Result<OperatorMatrix> {
            fockspace::creator(layout, id)?.try_add(&fockspace::annihilator(layout, id)?)
        };
        let h0s = self.model.h0_neutral();
        let h0cs = self.model.h0_charged();
        let rhs_s = h0s
            .try_add(&quad(LadderId::a(params.k_index))?.scale_re(omega_k * f2))?
            .try_add(&id_op.scale_re(omega_k * f2 * f2))?;
        let rhs_cs = h0cs
            .try_add(
                &quad(LadderId::b(params.q_index))?
                    .try_add(&quad(LadderId::d(params.q_index))?)?
                    .scale_re(e_q * f1),
            )?
            .try_add(&id_op.scale_re(2.0 * e_q * f1 * f1))?;
        let res_s = self.norm(&h0s.conjugate_by_product(u)?.try_sub(&rhs_s)?)?;
        let res_cs = self.norm(&h0cs.conjugate_by_product(u)?.try_sub(&rhs_cs)?)?;

        let displaced = u.apply_state(&self.vacuum)?;
        let e_s = fockspace::expectation(h0s, &displaced)?;
        let e_cs = fockspace::expectation(h0cs, &displaced)?;
        let vac_s = (e_s - Complex64::new(omega_k * f2 * f2, 0.0)).norm();
        let vac_cs = (e_cs - Complex64::new(2.0 * e_q * f1 * f1, 0.0)).norm();
        Ok(ResidualReport {
            rows: alloc::vec![
                self.row("free_shift:neutral".into(), params, res_s, FREE_SHIFT_TOLERANCE),
                self.row("free_shift:charged".into(), params, res_cs, FREE_SHIFT_TOLERANCE),
                self.row("vacuum_energy:neutral".into(), params, vac_s, VACUUM_ENERGY_TOLERANCE),
                self.row("vacuum_energy:charged".into(), params, vac_cs, VACUUM_ENERGY_TOLERANCE),
            ],
        })
    }

    /// `Û†φ̂(x)Û = φ̂(x) + f₂n₂(x)` and `Û†φ(x)Û = φ(x) + f₁n₁(x)` (and for `φ†`).
    pub fn check_field_shift(&self, params: &DisplacementParams, u: &OperatorMatrix) -> Result<ResidualReport> {
        let id_op = OperatorMatrix::identity(self.layout());
        let mut rows = Vec::new();
        for (j, p) in self.points.iter().enumerate() {
            let s1 = params.f1 * self.profile.n1.eval(p.x);
            let s2 = params.f2 * self.profile.n2.eval(p.x);
            for (name, op, s) in [
                ("phi_hat", &p.phi_hat, s2),
                ("phi", &p.phi, s1),
                ("phi_dag", &p.phi_dag, s1),
            ] {
                let diff = op.conjugate_by_product(u)?.try_sub(&op.try_add(&id_op.scale_re(s))?)?;
                rows.push(self.row(
                    format!("field_shift:{name}:x{j}"),
                    params,
                    self.norm(&diff)?,
                    FIELD_SHIFT_TOLERANCE,
                ));
            }
        }
        Ok(ResidualReport { rows })
    }

    /// Displacing a normal-ordered interaction density equals normal ordering
    /// the shifted fields. Skipped for a term whose coupling is zero.
    pub fn check_normal_order_interchange(
        &self,
        params: &DisplacementParams,
        u: &OperatorMatrix,
    ) -> Result<ResidualReport> {
        let config = self.model.config();
        let id_op = OperatorMatrix::identity(self.layout());
        let mut rows = Vec::new();
        for (j, p) in self.points.iter().enumerate() {
            let s1 = params.f1 * self.profile.n1.eval(p.x);
            let s2 = params.f2 * self.profile.n2.eval(p.x);
            if config.lambda2 != 0.0 {
                let lhs = p.quartic_powers[4].conjugate_by_product(u)?;
                let mut rhs = OperatorMatrix::zero(self.layout());
                let mut power = 1.0;
                for (j4, binom) in [1.0, 4.0, 6.0, 4.0, 1.0].into_iter().enumerate() {
                    rhs = rhs.try_add(&p.quartic_powers[4 - j4].scale_re(binom * power))?;
                    power *= s2;
                }
                let r = self.norm(&lhs.try_sub(&rhs)?)?;
                rows.push(self.row(format!("interchange:quartic:x{j}"), params, r, INTERCHANGE_TOLERANCE));
            }
            if config.lambda1 != 0.0 {
                let [k1, k2, k3, k4] = &p.cubic_parts;
                let lhs = k1.conjugate_by_product(u)?;
                let rhs = k1
                    .try_add(&k2.scale_re(s1))?
                    .try_add(&p.phi_hat.scale_re(s1 * s1))?
                    .try_add(&k3.scale_re(s2))?
                    .try_add(&k4.scale_re(s1 * s2))?
                    .try_add(&id_op.scale_re(s1 * s1 * s2))?;
                let r = self.norm(&lhs.try_sub(&rhs)?)?;
                rows.push(self.row(format!("interchange:cubic:x{j}"), params, r, INTERCHANGE_TOLERANCE));
            }
        }
        Ok(ResidualReport { rows })
    }
}

/// Every `(f₁, f₂)` pair of [`VERIFY_GRID`], `f₁` outer.
pub fn verify_grid(config: &ModelConfig) -> Vec<DisplacementParams> {
    VERIFY_GRID
        .iter()
        .flat_map(|&f1| VERIFY_GRID.iter().map(move |&f2| (f1, f2)))
        .map(|(f1, f2)| DisplacementParams::new(config, f1, f2))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small_model(cutoff: usize) -> Model {
        Model::build(ModelConfig::default().with_cutoff(cutoff)).unwrap()
    }

    #[test]
    fn zero_amplitudes_give_identity() {
        let m = small_model(6);
        let u = build_u(&DisplacementParams::new(m.config(), 0.0, 0.0), m.layout()).unwrap();
        assert_eq!(u.identity_defect(), 0.0);
    }

    #[test]
    fn leakage_violation_is_rejected() {
        let m = small_model(4);
        let err = build_u(&DisplacementParams::new(m.config(), 1.0, 0.0), m.layout()).unwrap_err();
        assert!(matches!(err, Error::Leakage { .. }));
        assert!(build_u(&DisplacementParams::new(m.config(), f64::NAN, 0.0), m.layout()).is_err());
    }

    #[test]
    fn shifts_of_each_ladder() {
        let c = ModelConfig::default();
        let p = DisplacementParams::new(&c, 0.3, -0.7);
        assert_eq!(p.shift_of(LadderId::b(1)), 0.3);
        assert_eq!(p.shift_of(LadderId::d(1)), 0.3);
        assert_eq!(p.shift_of(LadderId::a(2)), -0.7);
        assert_eq!(p.shift_of(LadderId::a(1)), 0.0);
    }

    #[test]
    fn all_checks_pass_at_half_amplitude() {
        let m = small_model(24);
        let v = Verifier::new(&m, Projector::HalfCutoff, &default_samples(m.config().box_length)).unwrap();
        let report = v.check_point(&DisplacementParams::new(m.config(), 0.5, -0.5)).unwrap();
        for r in &report.rows {
            assert!(r.passed(), "{} residual {:e}", r.identity, r.residual);
        }
        assert_eq!(report.rows.len(), 3 + 6 + 4 + 24 + 16);
    }

    #[test]
    fn field_shift_at_origin_is_profile_peak() {
        let c = ModelConfig::default().with_cutoff(24);
        let m = Model::build(c.clone()).unwrap();
        let u = build_u(&DisplacementParams::new(&c, 0.0, 0.5), m.layout()).unwrap();
        let phi = field_polynomial(Field::Neutral, &c)
            .unwrap()
            .at_point(0.0, c.box_length)
            .realize(m.layout())
            .unwrap();
        let shifted = phi.conjugate_by_product(&u).unwrap().try_sub(&phi).unwrap();
        let expect = 0.5 * 2.0 * c.neutral_normalization(2);
        let vac = StateVector::vacuum(m.layout());
        assert_abs_diff_eq!(
            fockspace::expectation(&shifted, &vac).unwrap().re,
            expect,
            epsilon = 1e-12
        );
    }

    #[test]
    fn auto_projector_shrinks_with_amplitude() {
        let c = ModelConfig::default().with_cutoff(24);
        let l = c.layout().unwrap();
        assert_eq!(Projector::HalfCutoff.caps(&c, &l).unwrap(), [12, 12, 12]);
        assert_eq!(Projector::Fixed(30).caps(&c, &l).unwrap(), [24, 24, 24]);
        let caps = Projector::Admissible {
            f1_max: 1.0,
            f2_max: 0.0,
        }
        .caps(&c, &l)
        .unwrap();
        assert_eq!(caps[0], 12);
        assert!(caps[1] < 12 && caps[1] == caps[2]);
    }

    #[test]
    fn residual_nan_fails() {
        let r = Residual {
            identity: "x".into(),
            f1: 0.0,
            f2: 0.0,
            residual: f64::NAN,
            tolerance: 1.0,
        };
        assert!(!r.passed());
    }
}
