//! Energy of a displaced reference state as a polynomial in `(f₁, f₂)`:
//!
//! ```text
//! ⟨Ω|Û†ĤÛ|Ω⟩ = ⟨Ω|Ĥ|Ω⟩ + f₁A₁ + f₂(A₂ + B₂) + f₁f₂A₃ + f₂²(ω_k + B₁)
//!             + f₂³B₃ + f₂⁴B₄ + f₁²(A₄ + f₂A₅)
//! ```
//!
//! The coefficients are spatial integrals of reference-state expectations
//! against the shift profiles. Every integrand is a trigonometric polynomial,
//! so an equal-weight sum over enough equally spaced points is exact.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::displace::{self, DisplacementParams, Residual};
use crate::error::{Error, Result};
use crate::fockspace::{self, LadderId, StateVector};
use crate::ladderalg::{field_polynomial, Field, LadderMonomial, LadderPolynomial, LadderSymbol};
use crate::math;
use crate::model::{self, Model, ModelConfig};

/// Largest imaginary part tolerated in the expectations behind a coefficient.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;
/// `A5` at or below this is treated as quadrature round-off of zero.
pub const GEOMETRY_FLOOR: f64 = 1e-12;
/// Relative tolerance of polynomial against direct energies.
pub const CENTRAL_TOLERANCE: f64 = 1e-6;
/// Amplitudes of the polynomial-versus-direct comparison grid.
pub const CENTRAL_GRID: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];
/// Seed of the generic reference state.
pub const DEFAULT_SEED: u64 = 7;
/// Occupation cap of seeded reference states.
pub const SEEDED_MAX_OCCUPATION: usize = 2;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ReferenceState {
    Vacuum,
    /// One quantum in `a_k`.
    OneA,
    /// One quantum in `b_q`.
    OneB,
    Seeded(u64),
}

impl ReferenceState {
    /// Vacuum, the two single-quantum states and the default seeded state.
    pub const TEST_SET: [ReferenceState; 4] = [
        ReferenceState::Vacuum,
        ReferenceState::OneA,
        ReferenceState::OneB,
        ReferenceState::Seeded(DEFAULT_SEED),
    ];

    pub fn build(&self, model: &Model) -> Result<StateVector> {
        let layout = model.layout();
        let c = model.config();
        match *self {
            ReferenceState::Vacuum => Ok(StateVector::vacuum(layout)),
            ReferenceState::OneA => StateVector::basis(layout, &[(LadderId::a(c.k_index), 1)]),
            ReferenceState::OneB => StateVector::basis(layout, &[(LadderId::b(c.q_index), 1)]),
            ReferenceState::Seeded(seed) => StateVector::seeded_low_occupation(layout, seed, SEEDED_MAX_OCCUPATION),
        }
    }

    /// Largest occupation the state puts on any ladder.
    pub fn max_occupation(&self) -> usize {
        match self {
            ReferenceState::Vacuum => 0,
            ReferenceState::OneA | ReferenceState::OneB => 1,
            ReferenceState::Seeded(_) => SEEDED_MAX_OCCUPATION,
        }
    }
}

impl fmt::Display for ReferenceState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReferenceState::Vacuum => write!(f, "vacuum"),
            ReferenceState::OneA => write!(f, "one_a"),
            ReferenceState::OneB => write!(f, "one_b"),
            ReferenceState::Seeded(s) => write!(f, "seeded:{s}"),
        }
    }
}

impl FromStr for ReferenceState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "vacuum" => Ok(ReferenceState::Vacuum),
            "one_a" => Ok(ReferenceState::OneA),
            "one_b" => Ok(ReferenceState::OneB),
            other => other
                .strip_prefix("seeded:")
                .and_then(|n| n.parse().ok())
                .map(ReferenceState::Seeded)
                .ok_or_else(|| Error::Config(format!("unknown reference state {other:?}"))),
        }
    }
}

/// `points` equally spaced positions `−L/2 + jL/points` on the box.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct QuadratureGrid {
    pub points: usize,
    pub box_length: f64,
}

impl QuadratureGrid {
    /// Smallest grid that is exact for every coefficient integrand.
    pub fn for_config(config: &ModelConfig) -> Result<Self> {
        let band = required_band(config)?;
        Ok(Self {
            points: 2 * band as usize + 2,
            box_length: config.box_length,
        })
    }

    pub fn with_points(points: usize, box_length: f64) -> Self {
        Self { points, box_length }
    }

    pub fn xs(&self) -> Vec<f64> {
        let h = self.box_length / self.points as f64;
        (0..self.points)
            .map(|j| -self.box_length / 2.0 + j as f64 * h)
            .collect()
    }

    /// `(L/N) Σ_j values[j]`, summed in index order.
    pub fn integrate(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        acc * self.box_length / self.points as f64
    }
}

/// Expectation-valued densities sampled on a [`QuadratureGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct StateExpectations {
    pub grid: QuadratureGrid,
    pub xs: Vec<f64>,
    /// `⟨φ̂(x)⟩`
    pub phi_hat: Vec<f64>,
    /// `⟨φ̂²(x)⟩`, not normal ordered
    pub phi_hat_sq: Vec<f64>,
    /// `⟨φ̂³(x)⟩`, not normal ordered
    pub phi_hat_cube: Vec<f64>,
    /// `⟨:φ̂²:(x)⟩`
    pub phi_hat_sq_normal: Vec<f64>,
    /// `⟨:φ̂³:(x)⟩`
    pub phi_hat_cube_normal: Vec<f64>,
    /// `⟨:φ†φ:(x)⟩`
    pub charged_density: Vec<f64>,
    /// `⟨(φ† + φ)(x)⟩`
    pub charged_sum: Vec<f64>,
    /// `⟨(φ† + φ)φ̂(x)⟩`
    pub charged_sum_phi_hat: Vec<f64>,
    /// `⟨a_k† + a_k⟩`
    pub neutral_quadrature: f64,
    /// `⟨b_q† + b_q + d_q† + d_q⟩`
    pub charged_quadrature: f64,
    /// `⟨Ĥ⟩`
    pub e_ref: f64,
    /// Largest imaginary part met while evaluating the above.
    pub max_imaginary: f64,
}

struct Densities {
    phi_hat: LadderPolynomial,
    phi_hat_sq: LadderPolynomial,
    phi_hat_cube: LadderPolynomial,
    phi_hat_sq_normal: LadderPolynomial,
    phi_hat_cube_normal: LadderPolynomial,
    charged_density: LadderPolynomial,
    charged_sum: LadderPolynomial,
    charged_sum_phi_hat: LadderPolynomial,
}

impl Densities {
    fn new(config: &ModelConfig) -> Result<Self> {
        let phi_hat = field_polynomial(Field::Neutral, config)?;
        let phi = field_polynomial(Field::Charged, config)?;
        let phi_dag = field_polynomial(Field::ChargedDagger, config)?;
        let charged_sum = phi_dag.add(&phi);
        Ok(Self {
            phi_hat_sq: phi_hat.pow(2),
            phi_hat_cube: phi_hat.pow(3),
            phi_hat_sq_normal: phi_hat.pow(2).normal_order(),
            phi_hat_cube_normal: phi_hat.pow(3).normal_order(),
            charged_density: phi_dag.multiply(&phi).normal_order(),
            charged_sum_phi_hat: charged_sum.multiply(&phi_hat),
            charged_sum,
            phi_hat,
        })
    }
}

/// Largest wavenumber index of any coefficient integrand.
pub fn required_band(config: &ModelConfig) -> Result<u64> {
    let d = Densities::new(config)?;
    let q = config.q_index.unsigned_abs() as u64;
    let k = config.k_index.unsigned_abs() as u64;
    Ok([
        d.charged_sum_phi_hat.band_limit() + q,
        d.charged_density.band_limit() + k,
        d.charged_sum.band_limit() + q + k,
        d.phi_hat.band_limit() + 2 * q,
        2 * q + k,
        d.phi_hat_sq.band_limit() + 2 * k,
        d.phi_hat_cube.band_limit() + k,
        d.phi_hat.band_limit() + 3 * k,
        4 * k,
    ]
    .into_iter()
    .max()
    .unwrap_or(0))
}

/// Caches `⟨m⟩` per phase-free monomial.
struct MonomialCache<'a> {
    model: &'a Model,
    state: &'a StateVector,
    values: BTreeMap<Vec<LadderSymbol>, Complex64>,
    max_imaginary: f64,
}

impl MonomialCache<'_> {
    fn expectation(&mut self, symbols: &[LadderSymbol]) -> Result<Complex64> {
        let key: Vec<LadderSymbol> = symbols
            .iter()
            .map(|s| LadderSymbol::new(s.ladder, s.dagger, 0))
            .collect();
        if let Some(v) = self.values.get(&key) {
            return Ok(*v);
        }
        let op = LadderPolynomial::from_monomials([LadderMonomial::new(Complex64::new(1.0, 0.0), key.clone())])
            .realize(self.model.layout())?;
        let v = fockspace::expectation(&op, self.state)?;
        self.values.insert(key, v);
        Ok(v)
    }

    /// `⟨P(x)⟩` at each `x`, from the plane-wave components of `P`.
    fn sampled(&mut self, poly: &LadderPolynomial, xs: &[f64], box_length: f64) -> Result<Vec<f64>> {
        let mut components: Vec<(i64, Complex64)> = Vec::new();
        for (w, group) in poly.by_wavenumber() {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in group.monomials() {
                acc += m.coefficient() * self.expectation(m.symbols())?;
            }
            components.push((w, acc));
        }
        Ok(xs
            .iter()
            .map(|&x| {
                let mut v = Complex64::new(0.0, 0.0);
                for &(w, c) in &components {
                    let theta = 2.0 * math::PI * w as f64 * x / box_length;
                    v += c * Complex64::new(math::cos(theta), math::sin(theta));
                }
                self.max_imaginary = self.max_imaginary.max(v.im.abs());
                v.re
            })
            .collect())
    }

    fn scalar(&mut self, v: Complex64) -> f64 {
        self.max_imaginary = self.max_imaginary.max(v.im.abs());
        v.re
    }
}

/// Samples every expectation factor of the coefficients for `state`.
pub fn state_expectations(state: &StateVector, model: &Model, grid: &QuadratureGrid) -> Result<StateExpectations> {
    let config = model.config();
    let band = required_band(config)?;
    if grid.points as u64 <= 2 * band + 1 {
        return Err(Error::GridTooCoarse {
            points: grid.points,
            band: band as usize,
        });
    }
    if !state.is_normalized() {
        return Err(Error::NotNormalized(state.norm()));
    }
    let layout = model.layout();
    let d = Densities::new(config)?;
    let xs = grid.xs();
    let l = config.box_length;
    let mut cache = MonomialCache {
        model,
        state,
        values: BTreeMap::new(),
        max_imaginary: 0.0,
    };

    let quad = |id: LadderId| -> Result<Complex64> {
        let op = fockspace::creator(layout, id)?.try_add(&fockspace::annihilator(layout, id)?)?;
        fockspace::expectation(&op, state)
    };
    let neutral_quadrature = quad(LadderId::a(config.k_index))?;
    let charged_quadrature = quad(LadderId::b(config.q_index))? + quad(LadderId::d(config.q_index))?;
    let e_ref = model.energy(state)?;

    Ok(StateExpectations {
        phi_hat: cache.sampled(&d.phi_hat, &xs, l)?,
        phi_hat_sq: cache.sampled(&d.phi_hat_sq, &xs, l)?,
        phi_hat_cube: cache.sampled(&d.phi_hat_cube, &xs, l)?,
        phi_hat_sq_normal: cache.sampled(&d.phi_hat_sq_normal, &xs, l)?,
        phi_hat_cube_normal: cache.sampled(&d.phi_hat_cube_normal, &xs, l)?,
        charged_density: cache.sampled(&d.charged_density, &xs, l)?,
        charged_sum: cache.sampled(&d.charged_sum, &xs, l)?,
        charged_sum_phi_hat: cache.sampled(&d.charged_sum_phi_hat, &xs, l)?,
        neutral_quadrature: cache.scalar(neutral_quadrature),
        charged_quadrature: cache.scalar(charged_quadrature),
        e_ref: cache.scalar(e_ref),
        max_imaginary: cache.max_imaginary,
        grid: *grid,
        xs,
    })
}

/// Which `f₂²`, `f₂` and `f₂⁴` coefficients the energy polynomial uses.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Reading {
    /// Normal-ordered `B₁`, `B₂` and the unit quartic coefficient `λ₂∫n₂⁴`,
    /// as produced by expanding `:(φ̂ + f₂n₂)⁴:`.
    Expansion,
    /// As [`Reading::Expansion`] but with `B₄ = 4λ₂∫n₂⁴`.
    LiteralQuartic,
    /// Bare `⟨φ̂²⟩`, `⟨φ̂³⟩` in `B₁`, `B₂` and `B₄ = 4λ₂∫n₂⁴`.
    Literal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSet {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    /// `6λ₂∫n₂²⟨φ̂²⟩`
    pub b1: f64,
    /// `4λ₂∫n₂⟨φ̂³⟩`
    pub b2: f64,
    pub b3: f64,
    /// `4λ₂∫n₂⁴`
    pub b4: f64,
    /// `6λ₂∫n₂²⟨:φ̂²:⟩`
    pub b1_normal_ordered: f64,
    /// `4λ₂∫n₂⟨:φ̂³:⟩`
    pub b2_normal_ordered: f64,
    /// `λ₂∫n₂⁴`
    pub quartic_self_coefficient: f64,
    pub e_ref: f64,
    pub omega_k: f64,
    pub max_imaginary: f64,
}

/// All coefficients by equal-weight quadrature on the expectation grid.
pub fn coefficients(exps: &StateExpectations, config: &ModelConfig) -> Result<CoefficientSet> {
    let band = required_band(config)?;
    if exps.grid.points as u64 <= 2 * band + 1 {
        return Err(Error::GridTooCoarse {
            points: exps.grid.points,
            band: band as usize,
        });
    }
    let profile = model::shift_profiles(config)?;
    let g = &exps.grid;
    let n1: Vec<f64> = exps.xs.iter().map(|&x| profile.n1.eval(x)).collect();
    let n2: Vec<f64> = exps.xs.iter().map(|&x| profile.n2.eval(x)).collect();
    let int = |f: &dyn Fn(usize) -> f64| g.integrate((0..g.points).map(f));
    let (l1, l2) = (config.lambda1, config.lambda2);
    let e_q = config.energy_q();
    let omega_k = config.omega_k();

    let n2_4 = int(&|j| n2[j] * n2[j] * n2[j] * n2[j]);
    Ok(CoefficientSet {
        a1: e_q * exps.charged_quadrature + l1 * int(&|j| exps.charged_sum_phi_hat[j] * n1[j]),
        a2: omega_k * exps.neutral_quadrature + l1 * int(&|j| exps.charged_density[j] * n2[j]),
        a3: l1 * int(&|j| exps.charged_sum[j] * n1[j] * n2[j]),
        a4: 2.0 * e_q + l1 * int(&|j| exps.phi_hat[j] * n1[j] * n1[j]),
        a5: l1 * int(&|j| n1[j] * n1[j] * n2[j]),
        b1: 6.0 * l2 * int(&|j| n2[j] * n2[j] * exps.phi_hat_sq[j]),
        b2: 4.0 * l2 * int(&|j| n2[j] * exps.phi_hat_cube[j]),
        b3: 4.0 * l2 * int(&|j| n2[j] * n2[j] * n2[j] * exps.phi_hat[j]),
        b4: 4.0 * l2 * n2_4,
        b1_normal_ordered: 6.0 * l2 * int(&|j| n2[j] * n2[j] * exps.phi_hat_sq_normal[j]),
        b2_normal_ordered: 4.0 * l2 * int(&|j| n2[j] * exps.phi_hat_cube_normal[j]),
        quartic_self_coefficient: l2 * n2_4,
        e_ref: exps.e_ref,
        omega_k,
        max_imaginary: exps.max_imaginary,
    })
}

/// Coefficients of `state` on the smallest exact grid.
pub fn coefficients_for_state(state: &StateVector, model: &Model) -> Result<CoefficientSet> {
    let grid = QuadratureGrid::for_config(model.config())?;
    coefficients(&state_expectations(state, model, &grid)?, model.config())
}

impl CoefficientSet {
    /// The energy polynomial with the expansion reading.
    pub fn energy_polynomial(&self, f1: f64, f2: f64) -> f64 {
        self.energy_polynomial_with(Reading::Expansion, f1, f2)
    }

    pub fn energy_polynomial_with(&self, reading: Reading, f1: f64, f2: f64) -> f64 {
        let (b1, b2, quartic) = match reading {
            Reading::Expansion => (
                self.b1_normal_ordered,
                self.b2_normal_ordered,
                self.quartic_self_coefficient,
            ),
            Reading::LiteralQuartic => (self.b1_normal_ordered, self.b2_normal_ordered, self.b4),
            Reading::Literal => (self.b1, self.b2, self.b4),
        };
        let f2_2 = f2 * f2;
        self.e_ref
            + f1 * self.a1
            + f2 * (self.a2 + b2)
            + f1 * f2 * self.a3
            + f2_2 * (self.omega_k + b1)
            + f2_2 * f2 * self.b3
            + f2_2 * f2_2 * quartic
            + f1 * f1 * self.f1_squared_coefficient(f2)
    }

    /// `A₄ + f₂A₅`.
    pub fn f1_squared_coefficient(&self, f2: f64) -> f64 {
        self.a4 + f2 * self.a5
    }

    /// `A₄/A₅`: for `f₂ < −A₄/A₅` the `f₁²` coefficient is negative.
    pub fn descent_threshold(&self) -> Result<f64> {
        if self.a5 > GEOMETRY_FLOOR {
            Ok(self.a4 / self.a5)
        } else {
            Err(Error::Geometry(self.a5))
        }
    }

    pub fn imaginary_parts_ok(&self) -> bool {
        self.max_imaginary <= IMAGINARY_TOLERANCE
    }

    /// `(name, value)` in report order.
    pub fn named(&self) -> [(&'static str, f64); 14] {
        [
            ("A1", self.a1),
            ("A2", self.a2),
            ("A3", self.a3),
            ("A4", self.a4),
            ("A5", self.a5),
            ("B1", self.b1),
            ("B2", self.b2),
            ("B3", self.b3),
            ("B4", self.b4),
            ("B1_normal_ordered", self.b1_normal_ordered),
            ("B2_normal_ordered", self.b2_normal_ordered),
            ("quartic_self_coefficient", self.quartic_self_coefficient),
            ("E_ref", self.e_ref),
            ("omega_k", self.omega_k),
        ]
    }
}

/// `∫_{−L/2}^{L/2} Π_i cos(2πn_i x/L) dx`, exactly: `L/2^m` times the number
/// of sign choices with `Σ ±n_i = 0`.
pub fn cosine_product_integral(indices: &[i32], box_length: f64) -> f64 {
    let m = indices.len();
    let hits = (0u32..1 << m)
        .filter(|mask| {
            indices
                .iter()
                .enumerate()
                .map(|(i, &n)| if mask & (1 << i) != 0 { -(n as i64) } else { n as i64 })
                .sum::<i64>()
                == 0
        })
        .count();
    box_length * hits as f64 / (1u64 << m) as f64
}

/// Closed forms of every coefficient for the vacuum reference state.
pub fn vacuum_closed_forms(config: &ModelConfig) -> Result<CoefficientSet> {
    config.validate()?;
    let (q, k, l) = (config.q_index, config.k_index, config.box_length);
    let cq = config.charged_normalization(q);
    let ck = config.neutral_normalization(k);
    let zero_point: f64 = config
        .neutral_modes
        .iter()
        .map(|&n| {
            let c = config.neutral_normalization(n);
            c * c
        })
        .sum();
    let n2_sq = 4.0 * ck * ck * cosine_product_integral(&[k, k], l);
    let n2_4 = 16.0 * ck * ck * ck * ck * cosine_product_integral(&[k, k, k, k], l);
    Ok(CoefficientSet {
        a1: 0.0,
        a2: 0.0,
        a3: 0.0,
        a4: 2.0 * config.energy_q(),
        a5: config.lambda1 * 8.0 * cq * cq * ck * cosine_product_integral(&[q, q, k], l),
        b1: 6.0 * config.lambda2 * zero_point * n2_sq,
        b2: 0.0,
        b3: 0.0,
        b4: 4.0 * config.lambda2 * n2_4,
        b1_normal_ordered: 0.0,
        b2_normal_ordered: 0.0,
        quartic_self_coefficient: config.lambda2 * n2_4,
        e_ref: 0.0,
        omega_k: config.omega_k(),
        max_imaginary: 0.0,
    })
}

/// `2E_q²√(2ω_kL)/λ₁`, the vacuum descent threshold when `k = 2q`.
pub fn demo_threshold_closed_form(config: &ModelConfig) -> f64 {
    let e_q = config.energy_q();
    2.0 * e_q * e_q * math::sqrt(2.0 * config.omega_k() * config.box_length) / config.lambda1
}

/// `⟨Ω|Û†ĤÛ|Ω⟩` by applying the displacement and the Hamiltonian.
pub fn direct_energy(model: &Model, state: &StateVector, params: &DisplacementParams) -> Result<f64> {
    let u = displace::build_u(params, model.layout())?;
    let displaced = u.apply_state(state)?;
    Ok(model.energy(&displaced)?.re)
}

/// Polynomial against direct energy at one grid point.
pub fn central_identity(
    model: &Model,
    reference: ReferenceState,
    state: &StateVector,
    coeffs: &CoefficientSet,
    params: &DisplacementParams,
) -> Result<Residual> {
    let direct = direct_energy(model, state, params)?;
    let poly = coeffs.energy_polynomial(params.f1, params.f2);
    Ok(Residual {
        identity: format!("central_identity:{reference}"),
        f1: params.f1,
        f2: params.f2,
        residual: (poly - direct).abs(),
        tolerance: CENTRAL_TOLERANCE * (1.0 + direct.abs()),
    })
}

/// Direct energy compared with each [`Reading`] at a single point.
#[derive(Clone, Debug, PartialEq)]
pub struct ReadingComparison {
    pub f1: f64,
    pub f2: f64,
    pub direct: f64,
    pub expansion: f64,
    pub literal_quartic: f64,
    pub literal: f64,
}

impl ReadingComparison {
    pub fn tolerance(&self) -> f64 {
        CENTRAL_TOLERANCE * (1.0 + self.direct.abs())
    }

    pub fn matches(&self, reading: Reading) -> bool {
        let v = match reading {
            Reading::Expansion => self.expansion,
            Reading::LiteralQuartic => self.literal_quartic,
            Reading::Literal => self.literal,
        };
        (v - self.direct).abs() <= self.tolerance()
    }
}

pub fn compare_readings(
    model: &Model,
    state: &StateVector,
    coeffs: &CoefficientSet,
    params: &DisplacementParams,
) -> Result<ReadingComparison> {
    let (f1, f2) = (params.f1, params.f2);
    Ok(ReadingComparison {
        f1,
        f2,
        direct: direct_energy(model, state, params)?,
        expansion: coeffs.energy_polynomial_with(Reading::Expansion, f1, f2),
        literal_quartic: coeffs.energy_polynomial_with(Reading::LiteralQuartic, f1, f2),
        literal: coeffs.energy_polynomial_with(Reading::Literal, f1, f2),
    })
}

/// Label for a reading in reports.
pub fn reading_name(reading: Reading) -> String {
    String::from(match reading {
        Reading::Expansion => "expansion",
        Reading::LiteralQuartic => "literal_quartic",
        Reading::Literal => "literal",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn model(cutoff: usize) -> Model {
        Model::build(ModelConfig::default().with_cutoff(cutoff)).unwrap()
    }

    #[test]
    fn reference_state_parsing() {
        for s in ["vacuum", "one_a", "one_b", "seeded:42"] {
            assert_eq!(s.parse::<ReferenceState>().unwrap().to_string(), s);
        }
        assert!("seeded:x".parse::<ReferenceState>().is_err());
        assert!("two_a".parse::<ReferenceState>().is_err());
    }

    #[test]
    fn cosine_integrals() {
        let l = 2.0 * math::PI;
        assert_abs_diff_eq!(cosine_product_integral(&[1, 1, 2], l), l / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            cosine_product_integral(&[2, 2, 2, 2], l),
            3.0 * l / 8.0,
            epsilon = 1e-15
        );
        assert_eq!(cosine_product_integral(&[1, 2], l), 0.0);
        assert_abs_diff_eq!(cosine_product_integral(&[], l), l, epsilon = 0.0);
    }

    #[test]
    fn vacuum_coefficients_match_closed_forms() {
        let m = model(8);
        let c = coefficients_for_state(&StateVector::vacuum(m.layout()), &m).unwrap();
        let closed = vacuum_closed_forms(m.config()).unwrap();
        for ((name, v), (_, w)) in c.named().iter().zip(closed.named()) {
            assert!((v - w).abs() <= 1e-12, "{name}: {v} vs {w}");
        }
        let cfg = m.config();
        assert_abs_diff_eq!(
            c.a5,
            cfg.lambda1 / (cfg.energy_q() * (2.0 * cfg.omega_k() * cfg.box_length).sqrt()),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            c.descent_threshold().unwrap(),
            demo_threshold_closed_form(cfg),
            epsilon = 1e-12
        );
    }

    #[test]
    fn a5_matches_fine_quadrature() {
        let cfg = ModelConfig::default();
        let p = model::shift_profiles(&cfg).unwrap();
        let n = 20_000;
        let h = cfg.box_length / n as f64;
        let fine: f64 = (0..n)
            .map(|j| {
                let x = -cfg.box_length / 2.0 + (j as f64 + 0.5) * h;
                p.n1.eval(x).powi(2) * p.n2.eval(x)
            })
            .sum::<f64>()
            * h;
        let c = vacuum_closed_forms(&cfg).unwrap();
        assert_abs_diff_eq!(c.a5, cfg.lambda1 * fine, epsilon = 1e-12);
    }

    #[test]
    fn descent_threshold_guard() {
        let mut c = vacuum_closed_forms(&ModelConfig::default()).unwrap();
        c.a5 = 0.0;
        assert_eq!(c.descent_threshold().unwrap_err(), Error::Geometry(0.0));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let m = model(4);
        let g = QuadratureGrid::with_points(5, m.config().box_length);
        assert!(matches!(
            state_expectations(&StateVector::vacuum(m.layout()), &m, &g),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn doubling_the_grid_changes_nothing() {
        let m = model(6);
        let s = StateVector::seeded_low_occupation(m.layout(), DEFAULT_SEED, 2).unwrap();
        let g = QuadratureGrid::for_config(m.config()).unwrap();
        let g2 = QuadratureGrid::with_points(2 * g.points, g.box_length);
        let c1 = coefficients(&state_expectations(&s, &m, &g).unwrap(), m.config()).unwrap();
        let c2 = coefficients(&state_expectations(&s, &m, &g2).unwrap(), m.config()).unwrap();
        for ((name, a), (_, b)) in c1.named().iter().zip(c2.named()) {
            assert!((a - b).abs() <= 1e-12, "{name}: {a} vs {b}");
        }
    }

    #[test]
    fn polynomial_matches_direct_energy_for_generic_state() {
        let m = model(20);
        for reference in ReferenceState::TEST_SET {
            let s = reference.build(&m).unwrap();
            let c = coefficients_for_state(&s, &m).unwrap();
            assert!(c.imaginary_parts_ok());
            for (f1, f2) in [(0.5, -0.5), (-1.0, 0.25), (0.0, 1.0)] {
                let r = central_identity(&m, reference, &s, &c, &DisplacementParams::new(m.config(), f1, f2)).unwrap();
                assert!(r.passed(), "{reference} ({f1}, {f2}): {:e}", r.residual);
            }
        }
    }

    #[test]
    fn only_the_unit_quartic_reading_matches() {
        let m = model(24);
        let s = StateVector::vacuum(m.layout());
        let c = coefficients_for_state(&s, &m).unwrap();
        let cmp = compare_readings(&m, &s, &c, &DisplacementParams::new(m.config(), 0.0, 1.0)).unwrap();
        assert!(cmp.matches(Reading::Expansion));
        assert!(!cmp.matches(Reading::LiteralQuartic));
        assert!(!cmp.matches(Reading::Literal));
    }
}
