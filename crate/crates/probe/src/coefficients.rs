//! The coefficient table behind `fockshift coeffs`.

use std::path::Path;

use fockshift_core::coeffs::{self, CoefficientSet, Reading, ReferenceState};
use fockshift_core::displace::DisplacementParams;
use fockshift_core::{Model, ModelConfig, StateVector};

use crate::output::{fmt_float, fmt_opt, Table, COEFFICIENTS_FILE};
use crate::verify::DirectLimit;
use crate::{Outcome, Result};

/// Amplitudes at which the literal and expansion readings are told apart.
const ADJUDICATION_POINT: (f64, f64) = (0.5, 0.5);

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientRow {
    pub name: String,
    pub value: f64,
    pub closed_form: Option<f64>,
    pub flag: String,
}

impl CoefficientRow {
    pub fn abs_difference(&self) -> Option<f64> {
        self.closed_form.map(|c| (self.value - c).abs())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientReport {
    pub reference: ReferenceState,
    pub set: CoefficientSet,
    pub rows: Vec<CoefficientRow>,
    pub threshold: Option<f64>,
}

impl CoefficientReport {
    pub fn row(&self, name: &str) -> Option<&CoefficientRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(vec!["name", "value", "closed_form_value", "abs_difference", "flag"]);
        for r in &self.rows {
            t.push(vec![
                r.name.clone(),
                fmt_float(r.value),
                fmt_opt(r.closed_form),
                fmt_opt(r.abs_difference()),
                r.flag.clone(),
            ]);
        }
        t
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        self.table().write(&dir.join(COEFFICIENTS_FILE))
    }

    pub fn summary(&self) -> String {
        let mut s = format!("coefficients for reference state {}\n", self.reference);
        for r in &self.rows {
            s.push_str(&format!("  {:<26} {:>24.16e}", r.name, r.value));
            if let Some(c) = r.closed_form {
                s.push_str(&format!("  closed form {c:.16e}"));
            }
            if !r.flag.is_empty() {
                s.push_str(&format!("  [{}]", r.flag));
            }
            s.push('\n');
        }
        s
    }
}

fn flag(reading: Reading, verdict: Option<bool>) -> String {
    let name = coeffs::reading_name(reading);
    match verdict {
        Some(true) => format!("{name} reading matches matrix oracle"),
        Some(false) => format!("{name} reading differs from matrix oracle"),
        None => format!("{name} reading (oracle not evaluated)"),
    }
}

/// Oracle verdict for each reading at one point, when that point is inside
/// the direct-evaluation limit.
fn adjudicate(
    model: &Model,
    reference: ReferenceState,
    state: &StateVector,
    set: &CoefficientSet,
) -> Result<Option<[bool; 3]>> {
    let (f1, f2) = ADJUDICATION_POINT;
    let limit = DirectLimit::for_occupation(model.config(), reference.max_occupation());
    if !limit.contains(f1, f2) {
        return Ok(None);
    }
    let p = DisplacementParams::new(model.config(), f1, f2);
    let cmp = coeffs::compare_readings(model, state, set, &p)?;
    Ok(Some([
        cmp.matches(Reading::Expansion),
        cmp.matches(Reading::LiteralQuartic),
        cmp.matches(Reading::Literal),
    ]))
}

pub fn build(model: &Model, reference: ReferenceState) -> Result<CoefficientReport> {
    let config = model.config();
    let state = reference.build(model)?;
    let set = coeffs::coefficients_for_state(&state, model)?;
    let closed = match reference {
        ReferenceState::Vacuum => Some(coeffs::vacuum_closed_forms(config)?),
        _ => None,
    };
    let differ = |a: f64, b: f64| (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs()));
    let quartic_differs = differ(set.b4, set.quartic_self_coefficient);
    let b1_differs = differ(set.b1, set.b1_normal_ordered);
    let b2_differs = differ(set.b2, set.b2_normal_ordered);
    let verdicts = if quartic_differs || b1_differs || b2_differs {
        adjudicate(model, reference, &state, &set)?
    } else {
        None
    };
    let verdict = |i: usize| verdicts.map(|v| v[i]);

    let closed_named = closed.as_ref().map(|c| c.named());
    let mut rows: Vec<CoefficientRow> = set
        .named()
        .iter()
        .enumerate()
        .map(|(i, &(name, value))| {
            let flag = match name {
                "B4" if quartic_differs => flag(Reading::LiteralQuartic, verdict(1)),
                "quartic_self_coefficient" if quartic_differs => flag(Reading::Expansion, verdict(0)),
                "B1" if b1_differs => flag(Reading::Literal, verdict(2)),
                "B2" if b2_differs => flag(Reading::Literal, verdict(2)),
                "B1_normal_ordered" if b1_differs => flag(Reading::Expansion, verdict(0)),
                "B2_normal_ordered" if b2_differs => flag(Reading::Expansion, verdict(0)),
                _ => String::new(),
            };
            CoefficientRow {
                name: name.into(),
                value,
                closed_form: closed_named.map(|c| c[i].1),
                flag,
            }
        })
        .collect();

    let threshold = set.descent_threshold().ok();
    if let Some(t) = threshold {
        let closed_form = (reference == ReferenceState::Vacuum && config.k_index == 2 * config.q_index)
            .then(|| coeffs::demo_threshold_closed_form(config));
        rows.push(CoefficientRow {
            name: "descent_threshold".into(),
            value: t,
            closed_form,
            flag: String::new(),
        });
    }
    Ok(CoefficientReport {
        reference,
        set,
        rows,
        threshold,
    })
}

pub fn cmd_coeffs(config: ModelConfig, reference: ReferenceState, out: &Path) -> Result<(CoefficientReport, Outcome)> {
    let model = Model::build(config)?;
    let report = build(&model, reference)?;
    report.write(out)?;
    let outcome = Outcome::from_pass(report.set.imaginary_parts_ok());
    Ok((report, outcome))
}
