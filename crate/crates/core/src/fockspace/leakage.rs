//! Truncation-leakage bounds for coherent displacements.
//!
//! A displacement `exp(f(a† − a))` on a ladder truncated at occupation `N` is
//! only faithful while the displaced states keep negligible weight at the top
//! level. The basic bound is the Poisson tail of the displaced vacuum,
//! `e^{−f²} f^{2N} / N!`. Checks that compare operators on occupations up to
//! `P` use the projected form `max_{n≤P} |⟨N|D(f)|n⟩|²`, which reduces to the
//! basic bound at `P = 0`.

use crate::error::{Error, Result};
use crate::fockspace::LadderId;
use crate::math;

/// Tails at or above this value are rejected.
pub const LEAKAGE_BOUND: f64 = 1e-12;

/// `e^{−f²} f^{2N} / N!`.
pub fn vacuum_tail(amplitude: f64, cutoff: usize) -> f64 {
    if amplitude == 0.0 {
        return 0.0;
    }
    let n = cutoff as f64;
    math::exp(-amplitude * amplitude + 2.0 * n * math::ln(amplitude.abs()) - math::lgamma(n + 1.0))
}

/// Exact matrix element `⟨m|exp(f(a† − a))|n⟩` of the untruncated displacement,
/// for real `f`.
pub fn displacement_element(amplitude: f64, m: usize, n: usize) -> f64 {
    if m < n {
        let sign = if (n - m).is_multiple_of(2) { 1.0 } else { -1.0 };
        return sign * displacement_element(amplitude, n, m);
    }
    let shift = m - n;
    if amplitude == 0.0 {
        return if shift == 0 { 1.0 } else { 0.0 };
    }
    let x = amplitude * amplitude;
    let alpha = shift as f64;
    // generalized Laguerre L_n^{(alpha)}(x) by upward recurrence
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    if n == 0 {
        cur = 1.0;
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    let log_pref = 0.5 * (math::lgamma(n as f64 + 1.0) - math::lgamma(m as f64 + 1.0))
        + alpha * math::ln(amplitude.abs())
        - 0.5 * x;
    let sign = if amplitude < 0.0 && shift % 2 == 1 { -1.0 } else { 1.0 };
    sign * math::exp(log_pref) * cur
}

/// `max_{n ≤ P} |⟨N|D(f)|n⟩|²`.
pub fn projected_tail(amplitude: f64, cutoff: usize, projector: usize) -> f64 {
    (0..=projector.min(cutoff.saturating_sub(1)))
        .map(|n| {
            let e = displacement_element(amplitude, cutoff, n);
            e * e
        })
        .fold(0.0, f64::max)
}

/// Enforces the displaced-vacuum bound.
pub fn check_leakage(ladder: LadderId, amplitude: f64, cutoff: usize) -> Result<()> {
    let tail = vacuum_tail(amplitude, cutoff);
    if tail < LEAKAGE_BOUND && amplitude.is_finite() {
        Ok(())
    } else {
        Err(Error::Leakage {
            ladder,
            amplitude,
            cutoff,
            tail,
        })
    }
}

/// Largest projector occupation `P <= cutoff / 2` whose projected tail stays
/// below [`LEAKAGE_BOUND`] for the given amplitude; `None` when even the
/// vacuum leaks.
pub fn admissible_projector(amplitude: f64, cutoff: usize) -> Option<usize> {
    let mut best = None;
    for p in 0..=cutoff / 2 {
        if projected_tail(amplitude, cutoff, p) < LEAKAGE_BOUND {
            best = Some(p);
        } else {
            break;
        }
    }
    best
}

/// Largest `|f|` (on a 10⁻³ grid) for which every amplitude up to it keeps
/// the projected tail below the bound.
pub fn max_admissible_amplitude(cutoff: usize, projector: usize) -> f64 {
    let mut steps = 0u32;
    while projected_tail((steps + 1) as f64 * 1e-3, cutoff, projector) < LEAKAGE_BOUND {
        steps += 1;
    }
    steps as f64 * 1e-3
}
