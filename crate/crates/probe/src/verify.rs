//! The verification suite behind `fockshift verify`.

use std::fmt;
use std::path::Path;

use fockshift_core::coeffs::{self, Reading, ReferenceState};
use fockshift_core::displace::{self, DisplacementParams, Projector, Residual, Verifier};
use fockshift_core::fockspace::leakage;
use fockshift_core::{Error, LadderId, Model, ModelConfig};
use rayon::prelude::*;

use crate::output::{fmt_float, Table, REPORT_FILE};
use crate::{Outcome, Result};

/// Points at which the quartic readings are compared with the matrix oracle.
pub const ADJUDICATION_POINTS: [(f64, f64); 2] = [(0.0, 0.5), (0.5, 1.0)];

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Role {
    /// Counts towards the exit code.
    Check,
    /// Reported only: which reading of the quartic and `B1`/`B2` terms the
    /// direct matrix evaluation agrees with.
    Adjudication,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Check => "check",
            Role::Adjudication => "adjudication",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub residual: Residual,
    pub role: Role,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub rows: Vec<ReportRow>,
    pub caps: Vec<usize>,
}

impl VerifyReport {
    pub fn checks(&self) -> impl Iterator<Item = &Residual> {
        self.rows.iter().filter(|r| r.role == Role::Check).map(|r| &r.residual)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Residual> {
        self.checks().filter(|r| !r.passed())
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn outcome(&self) -> Outcome {
        Outcome::from_pass(self.passed())
    }

    /// Readings that matched the oracle at every adjudication point.
    pub fn matching_readings(&self) -> Vec<Reading> {
        [Reading::Expansion, Reading::LiteralQuartic, Reading::Literal]
            .into_iter()
            .filter(|&reading| {
                let prefix = format!("quartic_reading:{}:", coeffs::reading_name(reading));
                let mut rows = self
                    .rows
                    .iter()
                    .filter(|r| r.role == Role::Adjudication && r.residual.identity.starts_with(&prefix))
                    .peekable();
                rows.peek().is_some() && rows.all(|r| r.residual.passed())
            })
            .collect()
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(vec![
            "identity_name",
            "f1",
            "f2",
            "residual",
            "tolerance",
            "pass",
            "role",
        ]);
        for row in &self.rows {
            let r = &row.residual;
            t.push(vec![
                r.identity.clone(),
                fmt_float(r.f1),
                fmt_float(r.f2),
                fmt_float(r.residual),
                fmt_float(r.tolerance),
                r.passed().to_string(),
                row.role.to_string(),
            ]);
        }
        t
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        self.table().write(&dir.join(REPORT_FILE))
    }

    pub fn summary(&self) -> String {
        let checks = self.checks().count();
        let failed = self.failures().count();
        let mut s = format!(
            "verify: {} of {checks} checks passed (projector caps {:?})\n",
            checks - failed,
            self.caps
        );
        for r in self.failures().take(10) {
            s.push_str(&format!(
                "  FAIL {} at ({}, {}): {:e} > {:e}\n",
                r.identity, r.f1, r.f2, r.residual, r.tolerance
            ));
        }
        let readings: Vec<String> = self.matching_readings().into_iter().map(coeffs::reading_name).collect();
        if !readings.is_empty() || self.rows.iter().any(|r| r.role == Role::Adjudication) {
            s.push_str(&format!(
                "quartic adjudication: readings matching the matrix oracle: [{}]\n",
                readings.join(", ")
            ));
        }
        s
    }
}

/// Amplitudes up to which a state of the given maximal occupation can be
/// displaced without the leakage tail reaching the bound.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct DirectLimit {
    pub f1: f64,
    pub f2: f64,
}

impl DirectLimit {
    pub fn for_occupation(config: &ModelConfig, max_occupation: usize) -> Self {
        let f1 = [LadderId::b(config.q_index), LadderId::d(config.q_index)]
            .into_iter()
            .map(|id| leakage::max_admissible_amplitude(config.cutoff(id), max_occupation))
            .fold(f64::INFINITY, f64::min);
        let f2 = leakage::max_admissible_amplitude(config.cutoff(LadderId::a(config.k_index)), max_occupation);
        Self { f1, f2 }
    }

    pub fn contains(&self, f1: f64, f2: f64) -> bool {
        f1.abs() <= self.f1 && f2.abs() <= self.f2
    }

    pub fn require(&self, config: &ModelConfig, f1: f64, f2: f64) -> fockshift_core::Result<()> {
        if self.contains(f1, f2) {
            return Ok(());
        }
        let (ladder, amplitude) = if f1.abs() > self.f1 {
            (LadderId::b(config.q_index), f1.abs())
        } else {
            (LadderId::a(config.k_index), f2.abs())
        };
        let cutoff = config.cutoff(ladder);
        Err(Error::Leakage {
            ladder,
            amplitude,
            cutoff,
            tail: leakage::vacuum_tail(amplitude, cutoff),
        })
    }
}

/// Largest `|f1|` and `|f2|` on the displacement-identity grid.
fn grid_extent(grid: &[DisplacementParams]) -> (f64, f64) {
    grid.iter().fold((0.0, 0.0), |(a, b), p| {
        (f64::max(a, p.f1.abs()), f64::max(b, p.f2.abs()))
    })
}

/// Displacement identities on the given grid.
pub fn displacement_checks(verifier: &Verifier, grid: &[DisplacementParams]) -> Result<Vec<Residual>> {
    let reports: Vec<_> = grid
        .par_iter()
        .map(|p| verifier.check_point(p))
        .collect::<fockshift_core::Result<_>>()?;
    Ok(reports.into_iter().flat_map(|r| r.rows).collect())
}

/// Central identity for every reference state on the central grid, plus an
/// imaginary-part check per state.
pub fn central_checks(model: &Model, states: &[ReferenceState]) -> Result<Vec<Residual>> {
    let config = model.config();
    let extent = coeffs::CENTRAL_GRID.iter().fold(0.0f64, |a, f| a.max(f.abs()));
    let mut rows = Vec::new();
    for &reference in states {
        DirectLimit::for_occupation(config, reference.max_occupation()).require(config, extent, extent)?;
        let state = reference.build(model)?;
        let set = coeffs::coefficients_for_state(&state, model)?;
        rows.push(Residual {
            identity: format!("imaginary_parts:{reference}"),
            f1: 0.0,
            f2: 0.0,
            residual: set.max_imaginary,
            tolerance: coeffs::IMAGINARY_TOLERANCE,
        });
        let points: Vec<(f64, f64)> = coeffs::CENTRAL_GRID
            .iter()
            .flat_map(|&f1| coeffs::CENTRAL_GRID.iter().map(move |&f2| (f1, f2)))
            .collect();
        let residuals: Vec<Residual> = points
            .par_iter()
            .map(|&(f1, f2)| {
                let p = DisplacementParams::new(config, f1, f2);
                coeffs::central_identity(model, reference, &state, &set, &p)
            })
            .collect::<fockshift_core::Result<_>>()?;
        rows.extend(residuals);
    }
    Ok(rows)
}

/// Each reading of the energy polynomial against the direct evaluation.
pub fn adjudication_rows(model: &Model, states: &[ReferenceState]) -> Result<Vec<Residual>> {
    let config = model.config();
    let mut rows = Vec::new();
    for &reference in states {
        let limit = DirectLimit::for_occupation(config, reference.max_occupation());
        let state = reference.build(model)?;
        let set = coeffs::coefficients_for_state(&state, model)?;
        for (f1, f2) in ADJUDICATION_POINTS {
            if !limit.contains(f1, f2) {
                continue;
            }
            let p = DisplacementParams::new(config, f1, f2);
            let cmp = coeffs::compare_readings(model, &state, &set, &p)?;
            for (reading, value) in [
                (Reading::Expansion, cmp.expansion),
                (Reading::LiteralQuartic, cmp.literal_quartic),
                (Reading::Literal, cmp.literal),
            ] {
                rows.push(Residual {
                    identity: format!("quartic_reading:{}:{reference}", coeffs::reading_name(reading)),
                    f1,
                    f2,
                    residual: (value - cmp.direct).abs(),
                    tolerance: cmp.tolerance(),
                });
            }
        }
    }
    Ok(rows)
}

/// Runs the displacement identities on the standard grid, the central
/// identity for the reference test set and the quartic adjudication.
pub fn run(model: &Model, projector: Projector) -> Result<VerifyReport> {
    let grid = displace::verify_grid(model.config());
    let verifier = Verifier::new(model, projector, &displace::default_samples(model.config().box_length))?;
    let mut rows: Vec<ReportRow> = displacement_checks(&verifier, &grid)?
        .into_iter()
        .map(|residual| ReportRow {
            residual,
            role: Role::Check,
        })
        .collect();
    rows.extend(
        central_checks(model, &ReferenceState::TEST_SET)?
            .into_iter()
            .map(|residual| ReportRow {
                residual,
                role: Role::Check,
            }),
    );
    rows.extend(
        adjudication_rows(model, &ReferenceState::TEST_SET)?
            .into_iter()
            .map(|residual| ReportRow {
                residual,
                role: Role::Adjudication,
            }),
    );
    Ok(VerifyReport {
        rows,
        caps: verifier.caps().to_vec(),
    })
}

/// Projector used by `verify`: per-ladder caps admissible for the largest
/// amplitudes of the standard grid.
pub fn default_projector(config: &ModelConfig) -> Projector {
    let (f1_max, f2_max) = grid_extent(&displace::verify_grid(config));
    Projector::Admissible { f1_max, f2_max }
}

pub fn cmd_verify(config: ModelConfig, out: &Path) -> Result<(VerifyReport, Outcome)> {
    let model = Model::build(config)?;
    let report = run(&model, default_projector(model.config()))?;
    report.write(out)?;
    let outcome = report.outcome();
    Ok((report, outcome))
}
