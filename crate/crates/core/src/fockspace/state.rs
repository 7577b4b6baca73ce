use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::layout::{FockLayout, LadderId};
use crate::error::{Error, Result};
use crate::math;

/// Tolerance on `|‖ψ‖ − 1|` for states handed to expectation values.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    layout: Arc<FockLayout>,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// All ladders in occupation zero.
    pub fn vacuum(layout: &Arc<FockLayout>) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); layout.dim()];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self {
            layout: Arc::clone(layout),
            amplitudes,
        }
    }

    /// Occupation basis state; ladders not listed stay empty.
    pub fn basis(layout: &Arc<FockLayout>, occupied: &[(LadderId, usize)]) -> Result<Self> {
        let mut occ = vec![0usize; layout.len()];
        for &(id, n) in occupied {
            occ[layout.position(id)?] = n;
        }
        let idx = layout.index_of(&occ)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); layout.dim()];
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(Self {
            layout: Arc::clone(layout),
            amplitudes,
        })
    }

    /// Wraps amplitudes without normalizing them.
    pub fn from_raw(layout: &Arc<FockLayout>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::LayoutMismatch);
        }
        Ok(Self {
            layout: Arc::clone(layout),
            amplitudes,
        })
    }

    /// Wraps and rescales to unit norm.
    pub fn normalized(layout: &Arc<FockLayout>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let mut s = Self::from_raw(layout, amplitudes)?;
        let norm = s.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        for a in &mut s.amplitudes {
            *a /= norm;
        }
        Ok(s)
    }

    /// Pseudorandom normalized state supported on occupations `<= max_occupation`
    /// of every ladder. Same seed, same layout: same amplitudes.
    pub fn seeded_low_occupation(layout: &Arc<FockLayout>, seed: u64, max_occupation: usize) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amplitudes = (0..layout.dim())
            .map(|idx| {
                if layout.occupations(idx).iter().all(|&n| n <= max_occupation) {
                    let re: f64 = rng.gen::<f64>() - 0.5;
                    let im: f64 = rng.gen::<f64>() - 0.5;
                    Complex64::new(re, im)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Self::normalized(layout, amplitudes)
    }

    pub fn layout(&self) -> &Arc<FockLayout> {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.amplitudes.iter().map(|a| a.norm_sqr()).sum())
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if *self.layout != *other.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Largest occupation of any ladder among basis states with nonzero amplitude.
    pub fn max_occupation(&self) -> usize {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .flat_map(|(i, _)| self.layout.occupations(i))
            .max()
            .unwrap_or(0)
    }
}
