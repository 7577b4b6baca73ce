use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Which ladder family a mode belongs to.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// Neutral field quanta.
    A,
    /// Charged particles.
    B,
    /// Charged antiparticles.
    D,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'a',
            Family::B => 'b',
            Family::D => 'd',
        }
    }
}

/// One bosonic ladder: a family plus the integer mode index `n` of momentum `2πn/L`.
///
/// The derived ordering (family first, then mode index) is the canonical
/// ordering used everywhere: layout order, normal-ordering blocks, printing.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LadderId {
    pub family: Family,
    pub mode_index: i32,
}

impl LadderId {
    pub const fn new(family: Family, mode_index: i32) -> Self {
        Self { family, mode_index }
    }

    pub const fn a(mode_index: i32) -> Self {
        Self::new(Family::A, mode_index)
    }

    pub const fn b(mode_index: i32) -> Self {
        Self::new(Family::B, mode_index)
    }

    pub const fn d(mode_index: i32) -> Self {
        Self::new(Family::D, mode_index)
    }
}

impl fmt::Display for LadderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.family.letter(), self.mode_index)
    }
}

/// Parses `a2`, `b-1` or the display form `d[3]`.
impl FromStr for LadderId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Config(format!("cannot parse ladder id '{s}'"));
        let mut chars = s.chars();
        let family = match chars.next().ok_or_else(bad)? {
            'a' | 'A' => Family::A,
            'b' | 'B' => Family::B,
            'd' | 'D' => Family::D,
            _ => return Err(bad()),
        };
        let rest = chars.as_str();
        let digits = rest.strip_prefix('[').and_then(|r| r.strip_suffix(']')).unwrap_or(rest);
        let mode_index = digits.trim().parse::<i32>().map_err(|_| bad())?;
        Ok(Self { family, mode_index })
    }
}

/// Tensor-product layout of truncated ladders.
///
/// Basis states are ordered row-major over the ladder list: the occupation of
/// the last ladder varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct FockLayout {
    ladders: Vec<LadderId>,
    cutoffs: Vec<usize>,
    strides: Vec<usize>,
    dim: usize,
}

impl FockLayout {
    pub const DEFAULT_DIMENSION_CAP: usize = 2_000_000;

    pub fn new(entries: impl IntoIterator<Item = (LadderId, usize)>) -> Result<Self> {
        Self::with_cap(entries, Self::DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(entries: impl IntoIterator<Item = (LadderId, usize)>, cap: usize) -> Result<Self> {
        let (ladders, cutoffs): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        if ladders.is_empty() {
            return Err(Error::Layout("a layout needs at least one ladder".to_string()));
        }
        for (i, id) in ladders.iter().enumerate() {
            if ladders[..i].contains(id) {
                return Err(Error::Layout(format!("ladder {id} listed twice")));
            }
        }
        if let Some(pos) = cutoffs.iter().position(|&c| c < 1) {
            return Err(Error::Layout(format!("cutoff of {} must be at least 1", ladders[pos])));
        }

        let mut dim: usize = 1;
        for &c in &cutoffs {
            dim = match dim.checked_mul(c + 1) {
                Some(d) if d <= cap => d,
                _ => {
                    let approx = cutoffs.iter().fold(1f64, |acc, &c| acc * (c + 1) as f64);
                    return Err(Error::DimensionCap {
                        dim: if approx >= usize::MAX as f64 {
                            usize::MAX
                        } else {
                            approx as usize
                        },
                        cap,
                    });
                }
            };
        }

        let mut strides = vec![1usize; ladders.len()];
        for i in (0..ladders.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * (cutoffs[i + 1] + 1);
        }

        Ok(Self {
            ladders,
            cutoffs,
            strides,
            dim,
        })
    }

    pub fn ladders(&self) -> &[LadderId] {
        &self.ladders
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn len(&self) -> usize {
        self.ladders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ladders.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, id: LadderId) -> bool {
        self.ladders.contains(&id)
    }

    pub fn position(&self, id: LadderId) -> Result<usize> {
        self.ladders
            .iter()
            .position(|&l| l == id)
            .ok_or(Error::UnknownLadder(id))
    }

    pub fn cutoff(&self, id: LadderId) -> Result<usize> {
        Ok(self.cutoffs[self.position(id)?])
    }

    pub fn cutoff_at(&self, pos: usize) -> usize {
        self.cutoffs[pos]
    }

    pub fn local_dim(&self, pos: usize) -> usize {
        self.cutoffs[pos] + 1
    }

    pub fn stride(&self, pos: usize) -> usize {
        self.strides[pos]
    }

    /// Flat basis index of an occupation tuple (one entry per ladder, in layout order).
    pub fn index_of(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.ladders.len() {
            return Err(Error::Layout(format!(
                "expected {} occupations, got {}",
                self.ladders.len(),
                occupations.len()
            )));
        }
        let mut idx = 0;
        for (pos, &n) in occupations.iter().enumerate() {
            if n > self.cutoffs[pos] {
                return Err(Error::Layout(format!(
                    "occupation {n} exceeds cutoff {} of {}",
                    self.cutoffs[pos], self.ladders[pos]
                )));
            }
            idx += n * self.strides[pos];
        }
        Ok(idx)
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        self.strides
            .iter()
            .zip(&self.cutoffs)
            .map(|(&s, &c)| (index / s) % (c + 1))
            .collect()
    }

    /// Human-readable ladder list, e.g. `a[2]:32 b[1]:32 d[1]:32`.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .ladders
            .iter()
            .zip(&self.cutoffs)
            .map(|(l, c)| format!("{l}:{c}"))
            .collect();
        parts.join(" ")
    }
}
