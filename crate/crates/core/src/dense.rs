//! Small dense complex matrices acting on a single ladder.
//!
//! Every factor of an [`OperatorMatrix`](crate::fockspace::OperatorMatrix) is one
//! of these. They are at most a few dozen rows, so plain row-major storage and
//! cubic algorithms are the right tool.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::math;

#[derive(Clone, Debug, PartialEq)]
pub struct LocalMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl LocalMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Truncated lowering matrix: `√n` on the `(n−1, n)` positions, occupations `0..=cutoff`.
    pub fn lowering(cutoff: usize) -> Self {
        let mut m = Self::zeros(cutoff + 1);
        for n in 1..=cutoff {
            m.set(n - 1, n, Complex64::new(math::sqrt(n as f64), 0.0));
        }
        m
    }

    /// Adjoint of [`LocalMatrix::lowering`]; raising the top level gives zero.
    pub fn raising(cutoff: usize) -> Self {
        Self::lowering(cutoff).adjoint()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.data[j * self.dim + i] = self.data[i * self.dim + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute row sum (the induced ∞-norm).
    pub fn inf_norm(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Max-norm restricted to the leading `(keep+1) × (keep+1)` block.
    pub fn leading_block_max_abs(&self, keep: usize) -> f64 {
        let k = (keep + 1).min(self.dim);
        let mut best = 0.0f64;
        for i in 0..k {
            for z in &self.row(i)[..k] {
                best = best.max(z.norm());
            }
        }
        best
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "local matrix dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rrow = &rhs.data[k * n..(k + 1) * n];
                let orow = &mut out.data[i * n..(i + 1) * n];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Nonzero entries of `row` with column index `<= keep`.
    pub(crate) fn row_nonzeros(&self, row: usize, keep: usize) -> Vec<(usize, Complex64)> {
        self.row(row)
            .iter()
            .enumerate()
            .take(keep + 1)
            .filter(|(_, z)| z.re != 0.0 || z.im != 0.0)
            .map(|(j, &z)| (j, z))
            .collect()
    }

    /// Matrix exponential by scaling and squaring with a Taylor core.
    ///
    /// The argument is scaled until its ∞-norm is at most 1/4, where the
    /// series converges to machine precision in well under 30 terms.
    pub fn expm(&self) -> Self {
        let n = self.dim;
        let norm = self.inf_norm();
        let mut squarings = 0u32;
        let mut scale = 1.0;
        while norm * scale > 0.25 {
            scale *= 0.5;
            squarings += 1;
        }
        let a = self.scale(Complex64::new(scale, 0.0));

        let mut result = Self::identity(n);
        let mut term = Self::identity(n);
        for k in 1..=40 {
            term = term.matmul(&a).scale(Complex64::new(1.0 / k as f64, 0.0));
            let size = term.max_abs();
            result = &result + &term;
            if size <= 1e-18 * result.max_abs().max(1.0) {
                break;
            }
        }
        for _ in 0..squarings {
            result = result.matmul(&result);
        }
        result
    }
}

impl Add for &LocalMatrix {
    type Output = LocalMatrix;

    fn add(self, rhs: &LocalMatrix) -> LocalMatrix {
        assert_eq!(self.dim, rhs.dim, "local matrix dimension mismatch");
        LocalMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &LocalMatrix {
    type Output = LocalMatrix;

    fn sub(self, rhs: &LocalMatrix) -> LocalMatrix {
        assert_eq!(self.dim, rhs.dim, "local matrix dimension mismatch");
        LocalMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &LocalMatrix {
    type Output = LocalMatrix;

    fn mul(self, rhs: &LocalMatrix) -> LocalMatrix {
        self.matmul(rhs)
    }
}
