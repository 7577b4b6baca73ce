//! Physical configuration and the Hamiltonian
//! `H = H0_s + H0_cs + λ₁∫:φ†φ:φ̂ dx + λ₂∫:φ̂⁴: dx` on the truncated layout.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fockspace::{self, FockLayout, LadderId, OperatorMatrix};
use crate::ladderalg::{field_polynomial, Field, LadderPolynomial};
use crate::math;

/// `√(p² + mass²)`, the dispersion of either field.
pub fn dispersion(momentum: f64, mass: f64) -> f64 {
    math::sqrt(momentum * momentum + mass * mass)
}

/// `ω_p` of the neutral field.
pub fn omega(momentum: f64, mass_neutral: f64) -> f64 {
    dispersion(momentum, mass_neutral)
}

/// `E_p` of the charged field.
pub fn charged_energy(momentum: f64, mass_charged: f64) -> f64 {
    dispersion(momentum, mass_charged)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub box_length: f64,
    pub mass_neutral: f64,
    pub mass_charged: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub neutral_modes: Vec<i32>,
    pub charged_modes: Vec<i32>,
    /// Charged mode displaced by `U_cs`.
    pub q_index: i32,
    /// Neutral mode displaced by `U_s`.
    pub k_index: i32,
    pub cutoff_default: usize,
    pub cutoff_overrides: BTreeMap<LadderId, usize>,
}

impl Default for ModelConfig {
    /// `L = 2π`, unit masses and couplings, one charged mode `q = 1` and one
    /// neutral mode `k = 2q`, cutoff 32 on every ladder.
    fn default() -> Self {
        Self {
            box_length: 2.0 * math::PI,
            mass_neutral: 1.0,
            mass_charged: 1.0,
            lambda1: 1.0,
            lambda2: 1.0,
            neutral_modes: alloc::vec![2],
            charged_modes: alloc::vec![1],
            q_index: 1,
            k_index: 2,
            cutoff_default: 32,
            cutoff_overrides: BTreeMap::new(),
        }
    }
}

impl ModelConfig {
    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.cutoff_default = cutoff;
        self.cutoff_overrides.clear();
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::Config(msg));
        if !(self.box_length.is_finite() && self.box_length > 0.0) {
            return bad(format!("box_length must be positive, got {}", self.box_length));
        }
        for (name, v) in [
            ("mass_neutral", self.mass_neutral),
            ("mass_charged", self.mass_charged),
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        for (name, modes, mass) in [
            ("neutral_modes", &self.neutral_modes, self.mass_neutral),
            ("charged_modes", &self.charged_modes, self.mass_charged),
        ] {
            if modes.is_empty() {
                return bad(format!("{name} must not be empty"));
            }
            for (i, n) in modes.iter().enumerate() {
                if modes[..i].contains(n) {
                    return bad(format!("{name} lists mode {n} twice"));
                }
            }
            if modes.contains(&0) && mass <= 0.0 {
                return bad(format!("{name} contains the zero mode but the mass is zero"));
            }
        }
        if !self.charged_modes.contains(&self.q_index) {
            return bad(format!("q_index {} is not among charged_modes", self.q_index));
        }
        if !self.neutral_modes.contains(&self.k_index) {
            return bad(format!("k_index {} is not among neutral_modes", self.k_index));
        }
        if self.cutoff_default < 1 {
            return bad("cutoff_default must be at least 1".into());
        }
        let ladders = self.ladder_ids();
        for (id, &c) in &self.cutoff_overrides {
            if !ladders.contains(id) {
                return bad(format!("cutoff override for {id}, which is not a ladder of this model"));
            }
            if c < 1 {
                return bad(format!("cutoff override for {id} must be at least 1"));
            }
        }
        Ok(())
    }

    /// Extra requirements of the unboundedness demonstration: positive
    /// couplings and the `k = 2q` geometry.
    pub fn validate_demo(&self) -> Result<()> {
        self.validate()?;
        if !(self.lambda1 > 0.0 && self.lambda2 > 0.0) {
            return Err(Error::Config(format!(
                "the descent demonstration needs lambda1 > 0 and lambda2 > 0 (got {}, {})",
                self.lambda1, self.lambda2
            )));
        }
        if self.k_index != 2 * self.q_index {
            return Err(Error::Config(format!(
                "the descent demonstration needs k_index = 2 q_index (got k = {}, q = {})",
                self.k_index, self.q_index
            )));
        }
        Ok(())
    }

    /// All ladders in canonical order: neutral `a`, then `b`, then `d`.
    pub fn ladder_ids(&self) -> Vec<LadderId> {
        let mut ids: Vec<LadderId> = self
            .neutral_modes
            .iter()
            .map(|&n| LadderId::a(n))
            .chain(self.charged_modes.iter().map(|&n| LadderId::b(n)))
            .chain(self.charged_modes.iter().map(|&n| LadderId::d(n)))
            .collect();
        ids.sort();
        ids
    }

    pub fn cutoff(&self, id: LadderId) -> usize {
        self.cutoff_overrides.get(&id).copied().unwrap_or(self.cutoff_default)
    }

    pub fn layout(&self) -> Result<Arc<FockLayout>> {
        self.validate()?;
        let entries: Vec<(LadderId, usize)> = self.ladder_ids().into_iter().map(|id| (id, self.cutoff(id))).collect();
        Ok(Arc::new(FockLayout::new(entries)?))
    }

    /// `p = 2πn/L`.
    pub fn momentum(&self, mode_index: i32) -> f64 {
        2.0 * math::PI * mode_index as f64 / self.box_length
    }

    pub fn omega(&self, mode_index: i32) -> f64 {
        omega(self.momentum(mode_index), self.mass_neutral)
    }

    pub fn charged_energy(&self, mode_index: i32) -> f64 {
        charged_energy(self.momentum(mode_index), self.mass_charged)
    }

    /// `1/√(2ω_p L)`.
    pub fn neutral_normalization(&self, mode_index: i32) -> f64 {
        1.0 / math::sqrt(2.0 * self.omega(mode_index) * self.box_length)
    }

    /// `1/√(2E_p L)`.
    pub fn charged_normalization(&self, mode_index: i32) -> f64 {
        1.0 / math::sqrt(2.0 * self.charged_energy(mode_index) * self.box_length)
    }

    pub fn omega_k(&self) -> f64 {
        self.omega(self.k_index)
    }

    pub fn energy_q(&self) -> f64 {
        self.charged_energy(self.q_index)
    }
}

/// `amplitude · cos(2π · wavenumber_index · x / L)`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct CosineProfile {
    pub amplitude: f64,
    pub wavenumber_index: i32,
    pub box_length: f64,
}

impl CosineProfile {
    pub fn eval(&self, x: f64) -> f64 {
        self.amplitude * math::cos(2.0 * math::PI * self.wavenumber_index as f64 * x / self.box_length)
    }
}

/// Classical shifts added to the fields by the displacement:
/// `n₁(x) = 2cos(qx)/√(2E_q L)` and `n₂(x) = 2cos(kx)/√(2ω_k L)`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ShiftProfile {
    pub n1: CosineProfile,
    pub n2: CosineProfile,
}

pub fn shift_profiles(config: &ModelConfig) -> Result<ShiftProfile> {
    config.validate()?;
    Ok(ShiftProfile {
        n1: CosineProfile {
            amplitude: 2.0 * config.charged_normalization(config.q_index),
            wavenumber_index: config.q_index,
            box_length: config.box_length,
        },
        n2: CosineProfile {
            amplitude: 2.0 * config.neutral_normalization(config.k_index),
            wavenumber_index: config.k_index,
            box_length: config.box_length,
        },
    })
}

/// `:φ†φ: φ̂` as an x-dependent polynomial.
pub fn cubic_density(config: &ModelConfig) -> Result<LadderPolynomial> {
    let phi = field_polynomial(Field::Neutral, config)?;
    let charged = field_polynomial(Field::Charged, config)?;
    let charged_dag = field_polynomial(Field::ChargedDagger, config)?;
    Ok(charged_dag.multiply(&charged).normal_order().multiply(&phi))
}

/// `:φ̂⁴:` as an x-dependent polynomial.
pub fn quartic_density(config: &ModelConfig) -> Result<LadderPolynomial> {
    Ok(field_polynomial(Field::Neutral, config)?.pow(4).normal_order())
}

/// `λ₁∫:φ†φ:φ̂ dx + λ₂∫:φ̂⁴: dx` in mode space.
pub fn interaction_polynomial(config: &ModelConfig) -> Result<LadderPolynomial> {
    let cubic = cubic_density(config)?.integrate_box(config.box_length);
    let quartic = quartic_density(config)?.integrate_box(config.box_length);
    Ok(cubic.scale_re(config.lambda1).add(&quartic.scale_re(config.lambda2)))
}

/// `λ₁:φ†φ:φ̂ + λ₂:φ̂⁴:` as an x-dependent polynomial.
pub fn interaction_density(config: &ModelConfig) -> Result<LadderPolynomial> {
    Ok(cubic_density(config)?
        .scale_re(config.lambda1)
        .add(&quartic_density(config)?.scale_re(config.lambda2)))
}

/// The interaction assembled by equal-weight quadrature,
/// `(L/N) Σ_j density(x_j)` with `x_j = −L/2 + jL/N`.
pub fn interaction_by_quadrature(
    config: &ModelConfig,
    layout: &Arc<FockLayout>,
    points: usize,
) -> Result<OperatorMatrix> {
    let density = interaction_density(config)?;
    let l = config.box_length;
    let mut sum = OperatorMatrix::zero(layout);
    for j in 0..points {
        let x = -l / 2.0 + j as f64 * l / points as f64;
        sum = sum.try_add(&density.at_point(x, l).realize(layout)?)?;
    }
    Ok(sum.scale_re(l / points as f64))
}

fn weighted_numbers(
    layout: &Arc<FockLayout>,
    entries: impl IntoIterator<Item = (LadderId, f64)>,
) -> Result<OperatorMatrix> {
    let mut h = OperatorMatrix::zero(layout);
    for (id, w) in entries {
        h = h.try_add(&fockspace::number(layout, id)?.scale_re(w))?;
    }
    Ok(h)
}

/// `Σ_p ω_p a_p† a_p`.
pub fn build_h0_neutral(config: &ModelConfig, layout: &Arc<FockLayout>) -> Result<OperatorMatrix> {
    weighted_numbers(
        layout,
        config.neutral_modes.iter().map(|&n| (LadderId::a(n), config.omega(n))),
    )
}

/// `Σ_p E_p (b_p† b_p + d_p† d_p)`.
pub fn build_h0_charged(config: &ModelConfig, layout: &Arc<FockLayout>) -> Result<OperatorMatrix> {
    weighted_numbers(
        layout,
        config.charged_modes.iter().flat_map(|&n| {
            let e = config.charged_energy(n);
            [(LadderId::b(n), e), (LadderId::d(n), e)]
        }),
    )
}

pub fn build_h0(config: &ModelConfig) -> Result<OperatorMatrix> {
    let layout = config.layout()?;
    build_h0_neutral(config, &layout)?.try_add(&build_h0_charged(config, &layout)?)
}

pub fn build_h(config: &ModelConfig) -> Result<OperatorMatrix> {
    Ok(Model::build(config.clone())?.hamiltonian().clone())
}

/// `Σ_p (b_p† b_p − d_p† d_p)`.
pub fn charge_operator(config: &ModelConfig, layout: &Arc<FockLayout>) -> Result<OperatorMatrix> {
    let mut q = OperatorMatrix::zero(layout);
    for &n in &config.charged_modes {
        q = q
            .try_add(&fockspace::number(layout, LadderId::b(n))?)?
            .try_sub(&fockspace::number(layout, LadderId::d(n))?)?;
    }
    Ok(q)
}

/// A validated configuration with its layout and realized Hamiltonian pieces.
#[derive(Clone, Debug)]
pub struct Model {
    config: ModelConfig,
    layout: Arc<FockLayout>,
    h0_neutral: OperatorMatrix,
    h0_charged: OperatorMatrix,
    /// `∫:φ†φ:φ̂ dx` without the coupling.
    cubic: OperatorMatrix,
    /// `∫:φ̂⁴: dx` without the coupling.
    quartic: OperatorMatrix,
    hamiltonian: OperatorMatrix,
}

impl Model {
    pub fn build(config: ModelConfig) -> Result<Self> {
        let layout = config.layout()?;
        let h0_neutral = build_h0_neutral(&config, &layout)?;
        let h0_charged = build_h0_charged(&config, &layout)?;
        let cubic = cubic_density(&config)?
            .integrate_box(config.box_length)
            .realize(&layout)?;
        let quartic = quartic_density(&config)?
            .integrate_box(config.box_length)
            .realize(&layout)?;
        let hamiltonian = h0_neutral
            .try_add(&h0_charged)?
            .try_add(&cubic.scale_re(config.lambda1))?
            .try_add(&quartic.scale_re(config.lambda2))?;
        Ok(Self {
            config,
            layout,
            h0_neutral,
            h0_charged,
            cubic,
            quartic,
            hamiltonian,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn layout(&self) -> &Arc<FockLayout> {
        &self.layout
    }

    pub fn h0_neutral(&self) -> &OperatorMatrix {
        &self.h0_neutral
    }

    pub fn h0_charged(&self) -> &OperatorMatrix {
        &self.h0_charged
    }

    /// `λ₁∫:φ†φ:φ̂ dx + λ₂∫:φ̂⁴: dx`.
    pub fn interaction(&self) -> Result<OperatorMatrix> {
        self.cubic
            .scale_re(self.config.lambda1)
            .try_add(&self.quartic.scale_re(self.config.lambda2))
    }

    pub fn hamiltonian(&self) -> &OperatorMatrix {
        &self.hamiltonian
    }

    pub fn energy(&self, state: &fockspace::StateVector) -> Result<Complex64> {
        fockspace::expectation(&self.hamiltonian, state)
    }
}
