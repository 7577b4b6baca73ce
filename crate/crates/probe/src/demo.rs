//! End-to-end run: verification, vacuum coefficients, threshold and the two
//! sweeps that exhibit the unbounded descent.

use std::path::Path;

use fockshift_core::coeffs::{self, ReferenceState};
use fockshift_core::{Model, ModelConfig};

use crate::coefficients::{self, CoefficientReport};
use crate::sweep::{self, Range, SweepResult, SweepSpec};
use crate::verify::{self, VerifyReport};
use crate::{Outcome, Result};

pub const SWEEP_F1: Range = Range {
    start: 0.0,
    stop: 10.0,
    step: 0.5,
};

/// `f2 = −THRESHOLD_FACTOR · A4/A5` for the descent sweep.
pub const THRESHOLD_FACTOR: f64 = 2.0;

#[derive(Clone, Debug, PartialEq)]
pub struct DemoResult {
    pub verify: VerifyReport,
    pub coefficients: CoefficientReport,
    pub threshold: f64,
    pub threshold_closed_form: f64,
    pub f2: f64,
    pub baseline: SweepResult,
    pub descent: SweepResult,
}

impl DemoResult {
    /// Fitted `f1²` coefficient of the descent sweep.
    pub fn descent_coefficient(&self) -> f64 {
        self.descent.fits[0].c2
    }

    pub fn energy_at_start(&self) -> f64 {
        self.descent.energy_at(SWEEP_F1.start, self.f2).unwrap_or(f64::NAN)
    }

    pub fn energy_at_end(&self) -> f64 {
        let end = *SWEEP_F1.values().last().unwrap();
        self.descent.energy_at(end, self.f2).unwrap_or(f64::NAN)
    }

    pub fn outcome(&self) -> Outcome {
        Outcome::from_pass(
            self.verify.passed()
                && self.coefficients.set.imaginary_parts_ok()
                && self.baseline.consistent()
                && self.descent.descent_certified()
                && self.energy_at_end() < self.energy_at_start(),
        )
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        s.push_str(&self.verify.summary());
        s.push_str(&format!(
            "descent threshold A4/A5 = {:.16e} (closed form 2 E_q^2 sqrt(2 omega_k L)/lambda1 = {:.16e})\n",
            self.threshold, self.threshold_closed_form
        ));
        s.push_str(&self.baseline.summary());
        s.push_str(&self.descent.summary());
        s.push_str(&format!(
            "f2 = {:.6}: certified f1^2 coefficient {:.16e}; E(f1 = {}) = {:.16e} against E(f1 = {}) = {:.16e}\n",
            self.f2,
            self.descent_coefficient(),
            SWEEP_F1.stop,
            self.energy_at_end(),
            SWEEP_F1.start,
            self.energy_at_start(),
        ));
        s.push_str(&format!(
            "verdict: descent_certified = {}\n",
            self.outcome() == Outcome::Pass
        ));
        s
    }
}

pub fn run(config: ModelConfig) -> Result<DemoResult> {
    config.validate_demo()?;
    let model = Model::build(config)?;
    let verify = verify::run(&model, verify::default_projector(model.config()))?;
    let coefficients = coefficients::build(&model, ReferenceState::Vacuum)?;
    let threshold = coefficients.set.descent_threshold()?;
    let f2 = -THRESHOLD_FACTOR * threshold;
    let spec = |f2: f64| SweepSpec {
        f1: SWEEP_F1,
        f2: Range::single(f2).expect("finite"),
        reference: ReferenceState::Vacuum,
        direct_check_limit: None,
    };
    let baseline = sweep::run_with(&model, &spec(0.0), &coefficients.set)?;
    let descent = sweep::run_with(&model, &spec(f2), &coefficients.set)?;
    Ok(DemoResult {
        threshold_closed_form: coeffs::demo_threshold_closed_form(model.config()),
        verify,
        coefficients,
        threshold,
        f2,
        baseline,
        descent,
    })
}

pub fn cmd_demo(config: ModelConfig, out: &Path) -> Result<(DemoResult, Outcome)> {
    let result = run(config)?;
    result.verify.write(out)?;
    result.coefficients.write(out)?;
    let mut sweeps = result.baseline.clone();
    sweeps.extend(result.descent.clone());
    sweeps.write(out)?;
    let outcome = result.outcome();
    Ok((result, outcome))
}
