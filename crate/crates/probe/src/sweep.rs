//! `(f1, f2)` energy sweeps, the quadratic fit in `f1` and the descent verdict.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use fockshift_core::coeffs::{self, CoefficientSet, ReferenceState};
use fockshift_core::displace::DisplacementParams;
use fockshift_core::{Model, ModelConfig};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::output::{fmt_float, fmt_opt, Table, SWEEP_FILE, SWEEP_FIT_FILE};
use crate::verify::DirectLimit;
use crate::{Outcome, ProbeError, Result};

pub const FIT_TOLERANCE: f64 = 1e-9;
pub const COEFFICIENT_TOLERANCE: f64 = 1e-6;

/// Inclusive `start:stop:step` range.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if ![start, stop, step].iter().all(|v| v.is_finite()) {
            return Err(ProbeError::Usage(format!("range {start}:{stop}:{step} is not finite")));
        }
        if step <= 0.0 {
            return Err(ProbeError::Usage(format!("range step must be positive, got {step}")));
        }
        if stop < start {
            return Err(ProbeError::Usage(format!("range {start}:{stop}:{step} is empty")));
        }
        Ok(Self { start, stop, step })
    }

    pub fn single(value: f64) -> Result<Self> {
        Self::new(value, value, 1.0)
    }

    /// `start + i·step` for every `i` that stays within `stop` (up to a
    /// relative slack of 10⁻⁹ steps).
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl FromStr for Range {
    type Err = ProbeError;

    /// `start:stop:step` or a single value.
    fn from_str(s: &str) -> Result<Self> {
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| ProbeError::Usage(format!("cannot parse '{v}' in range '{s}'")))
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [v] => Self::single(num(v)?),
            [a, b, c] => Self::new(num(a)?, num(b)?, num(c)?),
            _ => Err(ProbeError::Usage(format!(
                "expected START:STOP:STEP or a value, got '{s}'"
            ))),
        }
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub f1: Range,
    pub f2: Range,
    pub reference: ReferenceState,
    /// Direct evaluation is attempted only inside this limit; `None` derives
    /// it from the leakage policy.
    pub direct_check_limit: Option<DirectLimit>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub f1: f64,
    pub f2: f64,
    pub e_polynomial: f64,
    pub e_direct: Option<f64>,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
}

impl SweepRow {
    pub fn passed(&self) -> bool {
        match (self.residual, self.tolerance) {
            (Some(r), Some(t)) => r <= t,
            _ => true,
        }
    }
}

/// Least-squares `c0 + c1 f1 + c2 f1²` at one `f2`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticFit {
    pub f2: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Largest fit residual relative to the largest `|E|`.
    pub fit_residual: f64,
    /// `A4 + f2·A5`.
    pub expected_c2: f64,
    pub residuals_ok: bool,
}

impl QuadraticFit {
    pub fn fit_ok(&self) -> bool {
        self.fit_residual <= FIT_TOLERANCE
    }

    pub fn coefficient_ok(&self) -> bool {
        (self.c2 - self.expected_c2).abs() <= COEFFICIENT_TOLERANCE * (1.0 + self.c2.abs())
    }

    /// Every identity behind the fit held.
    pub fn consistent(&self) -> bool {
        self.fit_ok() && self.coefficient_ok() && self.residuals_ok
    }

    pub fn descent_certified(&self) -> bool {
        self.c2 < 0.0 && self.consistent()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub reference: ReferenceState,
    pub rows: Vec<SweepRow>,
    pub fits: Vec<QuadraticFit>,
    pub direct_check_limit: DirectLimit,
}

impl SweepResult {
    pub fn descent_certified(&self) -> bool {
        !self.fits.is_empty() && self.fits.iter().all(QuadraticFit::descent_certified)
    }

    /// No identity failed; says nothing about the sign of `c2`.
    pub fn consistent(&self) -> bool {
        self.rows.iter().all(SweepRow::passed) && self.fits.iter().all(QuadraticFit::consistent)
    }

    pub fn energy_at(&self, f1: f64, f2: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.f1 == f1 && r.f2 == f2)
            .map(|r| r.e_polynomial)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(vec!["f1", "f2", "E_polynomial", "E_direct", "residual", "tolerance"]);
        for r in &self.rows {
            t.push(vec![
                fmt_float(r.f1),
                fmt_float(r.f2),
                fmt_float(r.e_polynomial),
                fmt_opt(r.e_direct),
                fmt_opt(r.residual),
                fmt_opt(r.tolerance),
            ]);
        }
        t
    }

    pub fn fit_table(&self) -> Table {
        let mut t = Table::new(vec![
            "f2",
            "c0",
            "c1",
            "c2",
            "expected_c2",
            "fit_residual",
            "descent_certified",
        ]);
        for f in &self.fits {
            t.push(vec![
                fmt_float(f.f2),
                fmt_float(f.c0),
                fmt_float(f.c1),
                fmt_float(f.c2),
                fmt_float(f.expected_c2),
                fmt_float(f.fit_residual),
                f.descent_certified().to_string(),
            ]);
        }
        t
    }

    /// Appends another sweep's rows and fits.
    pub fn extend(&mut self, other: SweepResult) {
        self.rows.extend(other.rows);
        self.fits.extend(other.fits);
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        self.table().write(&dir.join(SWEEP_FILE))?;
        self.fit_table().write(&dir.join(SWEEP_FIT_FILE))
    }

    pub fn summary(&self) -> String {
        let direct = self.rows.iter().filter(|r| r.e_direct.is_some()).count();
        let mut s = format!(
            "sweep ({}): {} rows, {direct} checked directly (limit |f1| <= {}, |f2| <= {})\n",
            self.reference,
            self.rows.len(),
            self.direct_check_limit.f1,
            self.direct_check_limit.f2
        );
        for r in self.rows.iter().filter(|r| !r.passed()) {
            s.push_str(&format!(
                "  FAIL central identity at ({}, {}): {:e}\n",
                r.f1,
                r.f2,
                r.residual.unwrap_or(f64::NAN)
            ));
        }
        for f in &self.fits {
            s.push_str(&format!(
                "  f2 = {:.6}: c2 = {:.12e} (A4 + f2 A5 = {:.12e}), fit residual {:.1e}, descent certified: {}\n",
                f.f2,
                f.c2,
                f.expected_c2,
                f.fit_residual,
                f.descent_certified()
            ));
        }
        s
    }
}

/// Least-squares quadratic through `(x, y)` by SVD.
pub fn fit_quadratic(xs: &[f64], ys: &[f64]) -> Result<([f64; 3], f64)> {
    let mut distinct = xs.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(ProbeError::Usage(format!(
            "a quadratic fit needs at least 3 distinct f1 values, got {}",
            distinct.len()
        )));
    }
    let a = DMatrix::from_fn(xs.len(), 3, |i, j| xs[i].powi(j as i32));
    let b = DVector::from_column_slice(ys);
    let c = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| ProbeError::Usage(format!("quadratic fit failed: {e}")))?;
    let scale = ys.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let worst = (&a * &c - &b).amax();
    let relative = if scale > 0.0 { worst / scale } else { worst };
    Ok(([c[0], c[1], c[2]], relative))
}

/// Energies along `spec` for a precomputed coefficient set.
pub fn run_with(model: &Model, spec: &SweepSpec, set: &CoefficientSet) -> Result<SweepResult> {
    let config = model.config();
    let limit = spec
        .direct_check_limit
        .unwrap_or_else(|| DirectLimit::for_occupation(config, spec.reference.max_occupation()));
    let state = spec.reference.build(model)?;
    let f1s = spec.f1.values();
    let points: Vec<(f64, f64)> = spec
        .f2
        .values()
        .into_iter()
        .flat_map(|f2| f1s.iter().map(move |&f1| (f1, f2)))
        .collect();
    let rows: Vec<SweepRow> = points
        .par_iter()
        .map(|&(f1, f2)| {
            let e_polynomial = set.energy_polynomial(f1, f2);
            if !limit.contains(f1, f2) {
                return Ok(SweepRow {
                    f1,
                    f2,
                    e_polynomial,
                    e_direct: None,
                    residual: None,
                    tolerance: None,
                });
            }
            let p = DisplacementParams::new(config, f1, f2);
            let direct = coeffs::direct_energy(model, &state, &p)?;
            Ok(SweepRow {
                f1,
                f2,
                e_polynomial,
                e_direct: Some(direct),
                residual: Some((e_polynomial - direct).abs()),
                tolerance: Some(coeffs::CENTRAL_TOLERANCE * (1.0 + direct.abs())),
            })
        })
        .collect::<Result<_>>()?;

    let mut fits = Vec::new();
    for f2 in spec.f2.values() {
        let block: Vec<&SweepRow> = rows.iter().filter(|r| r.f2 == f2).collect();
        let xs: Vec<f64> = block.iter().map(|r| r.f1).collect();
        let ys: Vec<f64> = block.iter().map(|r| r.e_polynomial).collect();
        let ([c0, c1, c2], fit_residual) = fit_quadratic(&xs, &ys)?;
        fits.push(QuadraticFit {
            f2,
            c0,
            c1,
            c2,
            fit_residual,
            expected_c2: set.f1_squared_coefficient(f2),
            residuals_ok: block.iter().all(|r| r.passed()),
        });
    }
    Ok(SweepResult {
        reference: spec.reference,
        rows,
        fits,
        direct_check_limit: limit,
    })
}

pub fn run(model: &Model, spec: &SweepSpec) -> Result<SweepResult> {
    let state = spec.reference.build(model)?;
    let set = coeffs::coefficients_for_state(&state, model)?;
    run_with(model, spec, &set)
}

pub fn cmd_sweep(config: ModelConfig, spec: &SweepSpec, out: &Path) -> Result<(SweepResult, Outcome)> {
    let model = Model::build(config)?;
    let result = run(&model, spec)?;
    result.write(out)?;
    let outcome = Outcome::from_pass(result.consistent());
    Ok((result, outcome))
}
