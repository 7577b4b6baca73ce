//! Symbolic polynomials in ladder operators carrying plane-wave phases.
//!
//! A field expansion such as `φ̂(x) = Σ_p c_p (a_p e^{ipx} + a_p† e^{−ipx})` is
//! stored as monomials whose symbols remember the sign of their phase, so the
//! spatial integral over the periodic box reduces to a momentum selection rule:
//! `∫ e^{iKx} dx = L δ_{K,0}`.
//!
//! Normal ordering here is the definitional reordering used for the colon
//! operation: creators move left, annihilators right, and no commutator terms
//! are generated.
//!
//! Printed form, one monomial per line:
//!
//! ```text
//! (+0.0667) b†[1] d†[1] a[2]
//! ```
//!
//! The coefficient is shown with four decimals (an imaginary part is appended
//! as `+0.0000i` when present), followed by the symbols left to right as
//! `<family letter>[†][<mode index>]`. The empty product prints as `1`.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::dense::LocalMatrix;
use crate::error::Result;
use crate::fockspace::{FockLayout, LadderId, OperatorMatrix};
use crate::math;
use crate::model::ModelConfig;

/// Monomials with `|coefficient|` at or below this are dropped.
pub const PRUNE_TOLERANCE: f64 = 1e-14;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LadderSymbol {
    pub ladder: LadderId,
    pub dagger: bool,
    /// `+1` for `e^{+ipx}`, `-1` for `e^{−ipx}`, `0` for no phase.
    pub phase_sign: i8,
}

impl LadderSymbol {
    pub const fn new(ladder: LadderId, dagger: bool, phase_sign: i8) -> Self {
        Self {
            ladder,
            dagger,
            phase_sign,
        }
    }

    /// Signed wavenumber index contributed to the product.
    pub fn wavenumber(&self) -> i64 {
        self.phase_sign as i64 * self.ladder.mode_index as i64
    }

    fn normal_order_key(&self) -> (bool, LadderId, i8) {
        (!self.dagger, self.ladder, self.phase_sign)
    }
}

impl fmt::Display for LadderSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}[{}]",
            self.ladder.family.letter(),
            if self.dagger { "†" } else { "" },
            self.ladder.mode_index
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LadderMonomial {
    coefficient: Complex64,
    symbols: Vec<LadderSymbol>,
    net_wavenumber: i64,
}

impl LadderMonomial {
    pub fn new(coefficient: Complex64, symbols: Vec<LadderSymbol>) -> Self {
        let net_wavenumber = symbols.iter().map(LadderSymbol::wavenumber).sum();
        Self {
            coefficient,
            symbols,
            net_wavenumber,
        }
    }

    pub fn coefficient(&self) -> Complex64 {
        self.coefficient
    }

    pub fn symbols(&self) -> &[LadderSymbol] {
        &self.symbols
    }

    /// Sum of signed mode indices, in units of `2π/L`.
    pub fn net_wavenumber(&self) -> i64 {
        self.net_wavenumber
    }

    pub fn is_normal_ordered(&self) -> bool {
        self.symbols.windows(2).all(|w| w[0].dagger || !w[1].dagger)
    }
}

impl fmt::Display for LadderMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coefficient;
        if c.im.abs() > PRUNE_TOLERANCE {
            write!(f, "({:+.4}{:+.4}i)", c.re, c.im)?;
        } else {
            write!(f, "({:+.4})", c.re)?;
        }
        if self.symbols.is_empty() {
            return write!(f, " 1");
        }
        for s in &self.symbols {
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

/// Canonically sorted sum of monomials with like terms combined.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LadderPolynomial {
    monomials: Vec<LadderMonomial>,
}

impl LadderPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The empty product with coefficient one.
    pub fn unit() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_monomials([LadderMonomial::new(c, Vec::new())])
    }

    pub fn from_monomials(monomials: impl IntoIterator<Item = LadderMonomial>) -> Self {
        let mut combined: BTreeMap<Vec<LadderSymbol>, Complex64> = BTreeMap::new();
        for m in monomials {
            *combined.entry(m.symbols).or_default() += m.coefficient;
        }
        Self {
            monomials: combined
                .into_iter()
                .filter(|(_, c)| c.norm() > PRUNE_TOLERANCE)
                .map(|(s, c)| LadderMonomial::new(c, s))
                .collect(),
        }
    }

    pub fn monomials(&self) -> &[LadderMonomial] {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_monomials(self.monomials.iter().chain(&other.monomials).cloned())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_monomials(
            self.monomials
                .iter()
                .map(|m| LadderMonomial::new(m.coefficient * c, m.symbols.clone())),
        )
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Distributive product; symbol lists concatenate left to right.
    pub fn multiply(&self, other: &Self) -> Self {
        Self::from_monomials(self.monomials.iter().flat_map(|l| {
            other.monomials.iter().map(move |r| {
                let mut symbols = l.symbols.clone();
                symbols.extend_from_slice(&r.symbols);
                LadderMonomial::new(l.coefficient * r.coefficient, symbols)
            })
        }))
    }

    pub fn pow(&self, exponent: u32) -> Self {
        (0..exponent).fold(Self::unit(), |acc, _| acc.multiply(self))
    }

    /// Definitional normal ordering: creators to the left, annihilators to the
    /// right, each block sorted by ladder. Coefficients are untouched.
    pub fn normal_order(&self) -> Self {
        Self::from_monomials(self.monomials.iter().map(|m| {
            let mut symbols = m.symbols.clone();
            symbols.sort_by_key(LadderSymbol::normal_order_key);
            LadderMonomial::new(m.coefficient, symbols)
        }))
    }

    /// `∫_{−L/2}^{L/2} dx`: keeps monomials with zero net wavenumber, times `L`.
    pub fn integrate_box(&self, box_length: f64) -> Self {
        Self::from_monomials(
            self.monomials
                .iter()
                .filter(|m| m.net_wavenumber == 0)
                .map(|m| LadderMonomial::new(m.coefficient * box_length, m.symbols.clone())),
        )
    }

    /// Evaluates the plane-wave phases at position `x`, folding them into the
    /// coefficients. The result carries no phases.
    pub fn at_point(&self, x: f64, box_length: f64) -> Self {
        Self::from_monomials(self.monomials.iter().map(|m| {
            let theta = 2.0 * math::PI * m.net_wavenumber as f64 * x / box_length;
            let phase = Complex64::new(math::cos(theta), math::sin(theta));
            let symbols = m
                .symbols
                .iter()
                .map(|s| LadderSymbol::new(s.ladder, s.dagger, 0))
                .collect();
            LadderMonomial::new(m.coefficient * phase, symbols)
        }))
    }

    /// Sum of monomials grouped by net wavenumber.
    pub fn by_wavenumber(&self) -> BTreeMap<i64, Self> {
        let mut groups: BTreeMap<i64, Vec<LadderMonomial>> = BTreeMap::new();
        for m in &self.monomials {
            groups.entry(m.net_wavenumber).or_default().push(m.clone());
        }
        groups
            .into_iter()
            .map(|(k, ms)| (k, Self::from_monomials(ms)))
            .collect()
    }

    /// Largest `|net wavenumber|` over the monomials.
    pub fn band_limit(&self) -> u64 {
        self.monomials
            .iter()
            .map(|m| m.net_wavenumber.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Matrix realization: each monomial becomes the ordered product of its
    /// symbol matrices (leftmost symbol is the leftmost factor).
    pub fn realize(&self, layout: &Arc<FockLayout>) -> Result<OperatorMatrix> {
        let mut lowering: BTreeMap<usize, Arc<LocalMatrix>> = BTreeMap::new();
        let mut raising: BTreeMap<usize, Arc<LocalMatrix>> = BTreeMap::new();
        let mut total = OperatorMatrix::zero(layout);
        for m in &self.monomials {
            let mut factors: Vec<Option<LocalMatrix>> = alloc::vec![None; layout.len()];
            for s in &m.symbols {
                let pos = layout.position(s.ladder)?;
                let cutoff = layout.cutoff_at(pos);
                let mat = if s.dagger {
                    raising
                        .entry(pos)
                        .or_insert_with(|| Arc::new(LocalMatrix::raising(cutoff)))
                } else {
                    lowering
                        .entry(pos)
                        .or_insert_with(|| Arc::new(LocalMatrix::lowering(cutoff)))
                };
                factors[pos] = Some(match factors[pos].take() {
                    Some(acc) => acc.matmul(mat),
                    None => (**mat).clone(),
                });
            }
            let term = OperatorMatrix::kron(layout, m.coefficient, factors)?;
            total = total.try_add(&term)?;
        }
        Ok(total)
    }
}

impl fmt::Display for LadderPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.monomials.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Field {
    /// `φ̂(x) = Σ_p (a_p e^{ipx} + a_p† e^{−ipx}) / √(2ω_p L)`
    Neutral,
    /// `φ(x) = Σ_p (b_p e^{ipx} + d_p† e^{−ipx}) / √(2E_p L)`
    Charged,
    /// `φ†(x) = Σ_p (b_p† e^{−ipx} + d_p e^{ipx}) / √(2E_p L)`
    ChargedDagger,
}

/// Mode expansion of one of the three field operators.
pub fn field_polynomial(field: Field, config: &ModelConfig) -> Result<LadderPolynomial> {
    config.validate()?;
    let c = |v: f64| Complex64::new(v, 0.0);
    let monomials: Vec<LadderMonomial> = match field {
        Field::Neutral => config
            .neutral_modes
            .iter()
            .flat_map(|&n| {
                let w = c(config.neutral_normalization(n));
                [
                    LadderMonomial::new(w, alloc::vec![LadderSymbol::new(LadderId::a(n), false, 1)]),
                    LadderMonomial::new(w, alloc::vec![LadderSymbol::new(LadderId::a(n), true, -1)]),
                ]
            })
            .collect(),
        Field::Charged => config
            .charged_modes
            .iter()
            .flat_map(|&n| {
                let w = c(config.charged_normalization(n));
                [
                    LadderMonomial::new(w, alloc::vec![LadderSymbol::new(LadderId::b(n), false, 1)]),
                    LadderMonomial::new(w, alloc::vec![LadderSymbol::new(LadderId::d(n), true, -1)]),
                ]
            })
            .collect(),
        Field::ChargedDagger => config
            .charged_modes
            .iter()
            .flat_map(|&n| {
                let w = c(config.charged_normalization(n));
                [
                    LadderMonomial::new(w, alloc::vec![LadderSymbol::new(LadderId::b(n), true, -1)]),
                    LadderMonomial::new(w, alloc::vec![LadderSymbol::new(LadderId::d(n), false, 1)]),
                ]
            })
            .collect(),
    };
    Ok(LadderPolynomial::from_monomials(monomials))
}
