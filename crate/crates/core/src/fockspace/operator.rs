use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::layout::FockLayout;
use super::state::StateVector;
use crate::dense::LocalMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

type RowEntries = Vec<(usize, Complex64)>;

/// One Kronecker product `coeff · F₁ ⊗ F₂ ⊗ …`; `None` marks an identity factor.
#[derive(Clone, Debug)]
struct KronTerm {
    coeff: Complex64,
    factors: Vec<Option<Arc<LocalMatrix>>>,
}

impl KronTerm {
    fn support_differs(&self, other: &KronTerm) -> Option<Option<usize>> {
        let mut differing = None;
        for (pos, (x, y)) in self.factors.iter().zip(&other.factors).enumerate() {
            if !factor_eq(x, y) {
                if differing.is_some() {
                    return None;
                }
                differing = Some(pos);
            }
        }
        Some(differing)
    }
}

fn factor_eq(x: &Option<Arc<LocalMatrix>>, y: &Option<Arc<LocalMatrix>>) -> bool {
    match (x, y) {
        (None, None) => true,
        (Some(p), Some(q)) => Arc::ptr_eq(p, q) || **p == **q,
        _ => false,
    }
}

fn materialize(factor: &Option<Arc<LocalMatrix>>, dim: usize) -> LocalMatrix {
    match factor {
        Some(m) => (**m).clone(),
        None => LocalMatrix::identity(dim),
    }
}

/// Sparse complex operator on a truncated Fock layout.
///
/// Stored as a sum of Kronecker products of per-ladder factors, which is how
/// every operator in this crate arises (ladder monomials, their sums, and
/// conjugation by product unitaries). The full matrix is never formed; entries,
/// matrix-vector products and max-norms are computed from the factors.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    layout: Arc<FockLayout>,
    terms: Vec<KronTerm>,
}

impl OperatorMatrix {
    pub fn zero(layout: &Arc<FockLayout>) -> Self {
        Self {
            layout: Arc::clone(layout),
            terms: Vec::new(),
        }
    }

    pub fn identity(layout: &Arc<FockLayout>) -> Self {
        Self::scalar(layout, ONE)
    }

    pub fn scalar(layout: &Arc<FockLayout>, value: Complex64) -> Self {
        let mut op = Self::zero(layout);
        if value != ZERO {
            op.terms.push(KronTerm {
                coeff: value,
                factors: vec![None; layout.len()],
            });
        }
        op
    }

    /// Embeds a single-ladder matrix at layout position `pos` (identity elsewhere).
    pub fn local(layout: &Arc<FockLayout>, pos: usize, matrix: LocalMatrix) -> Result<Self> {
        if pos >= layout.len() || matrix.dim() != layout.local_dim(pos) {
            return Err(Error::LayoutMismatch);
        }
        let mut factors = vec![None; layout.len()];
        factors[pos] = Some(Arc::new(matrix));
        Ok(Self {
            layout: Arc::clone(layout),
            terms: vec![KronTerm { coeff: ONE, factors }],
        })
    }

    /// Product of per-ladder factors (missing positions are identities).
    pub fn kron(layout: &Arc<FockLayout>, coeff: Complex64, factors: Vec<Option<LocalMatrix>>) -> Result<Self> {
        if factors.len() != layout.len() {
            return Err(Error::LayoutMismatch);
        }
        for (pos, f) in factors.iter().enumerate() {
            if let Some(m) = f {
                if m.dim() != layout.local_dim(pos) {
                    return Err(Error::LayoutMismatch);
                }
            }
        }
        let mut op = Self::zero(layout);
        if coeff != ZERO {
            op.terms.push(KronTerm {
                coeff,
                factors: factors.into_iter().map(|f| f.map(Arc::new)).collect(),
            });
        }
        Ok(op)
    }

    pub fn layout(&self) -> &Arc<FockLayout> {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn same_layout(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.layout, &other.layout) || *self.layout == *other.layout {
            Ok(())
        } else {
            Err(Error::LayoutMismatch)
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        if c == ZERO {
            return Self::zero(&self.layout);
        }
        Self {
            layout: Arc::clone(&self.layout),
            terms: self
                .terms
                .iter()
                .map(|t| KronTerm {
                    coeff: t.coeff * c,
                    factors: t.factors.clone(),
                })
                .collect(),
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_layout(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self {
            layout: Arc::clone(&self.layout),
            terms,
        }
        .compressed())
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale_re(-1.0))
    }

    /// Matrix product `self · other`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_layout(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for s in &self.terms {
            for o in &other.terms {
                let factors = s
                    .factors
                    .iter()
                    .zip(&o.factors)
                    .map(|(x, y)| match (x, y) {
                        (None, None) => None,
                        (Some(m), None) | (None, Some(m)) => Some(Arc::clone(m)),
                        (Some(m), Some(n)) => Some(Arc::new(m.matmul(n))),
                    })
                    .collect();
                terms.push(KronTerm {
                    coeff: s.coeff * o.coeff,
                    factors,
                });
            }
        }
        Ok(Self {
            layout: Arc::clone(&self.layout),
            terms,
        }
        .compressed())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            layout: Arc::clone(&self.layout),
            terms: self
                .terms
                .iter()
                .map(|t| KronTerm {
                    coeff: t.coeff.conj(),
                    factors: t
                        .factors
                        .iter()
                        .map(|f| f.as_ref().map(|m| Arc::new(m.adjoint())))
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    /// `u† · self · u`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.adjoint().try_mul(self)?.try_mul(u)
    }

    /// `u† · self · u` where `u` is a single Kronecker product of unitaries.
    ///
    /// On ladders where a term of `self` is the identity the factor `u_i† u_i`
    /// is replaced by the identity, which keeps those factors sparse. Falls back
    /// to [`conjugate_by`](Self::conjugate_by) when `u` has several terms.
    pub fn conjugate_by_product(&self, u: &Self) -> Result<Self> {
        self.same_layout(u)?;
        let [ut] = u.terms.as_slice() else {
            return self.conjugate_by(u);
        };
        let weight = ut.coeff.norm_sqr();
        let mut cache: Vec<Vec<(*const LocalMatrix, Arc<LocalMatrix>)>> = vec![Vec::new(); self.layout.len()];
        let terms = self
            .terms
            .iter()
            .map(|t| KronTerm {
                coeff: t.coeff * weight,
                factors: t
                    .factors
                    .iter()
                    .zip(&ut.factors)
                    .enumerate()
                    .map(|(pos, (f, uf))| match (f, uf) {
                        (Some(m), Some(um)) => {
                            let key = Arc::as_ptr(m);
                            if let Some((_, hit)) = cache[pos].iter().find(|(k, _)| *k == key) {
                                return Some(Arc::clone(hit));
                            }
                            let c = Arc::new(um.adjoint().matmul(m).matmul(um));
                            cache[pos].push((key, Arc::clone(&c)));
                            Some(c)
                        }
                        (f, _) => f.clone(),
                    })
                    .collect(),
            })
            .collect();
        Ok(Self {
            layout: Arc::clone(&self.layout),
            terms,
        }
        .compressed())
    }

    /// `‖self − I‖_max`. Single Kronecker products are handled factor by factor
    /// without visiting the full matrix.
    pub fn identity_defect(&self) -> f64 {
        let [t] = self.terms.as_slice() else {
            return self
                .try_sub(&Self::identity(&self.layout))
                .map_or(f64::NAN, |d| d.max_norm());
        };
        let n = self.layout.len();
        let stats: Vec<(f64, f64, f64)> = t
            .factors
            .iter()
            .map(|f| match f {
                None => (1.0, 0.0, 1.0),
                Some(m) => {
                    let d = m.dim();
                    let mut diag = 0.0f64;
                    let mut off = 0.0f64;
                    for r in 0..d {
                        for c in 0..d {
                            let v = m.get(r, c).norm();
                            if r == c {
                                diag = diag.max(v);
                            } else {
                                off = off.max(v);
                            }
                        }
                    }
                    (diag, off, diag.max(off))
                }
            })
            .collect();
        let scale = t.coeff.norm();
        let mut best = 0.0f64;
        for i in 0..n {
            let before: f64 = stats[..i].iter().map(|s| s.0).product();
            let after: f64 = stats[i + 1..].iter().map(|s| s.2).product();
            best = best.max(scale * before * stats[i].1 * after);
        }
        let mut occ = vec![0usize; n];
        for _ in 0..self.layout.dim() {
            let v = t.factors.iter().enumerate().fold(t.coeff, |acc, (pos, f)| match f {
                Some(m) => acc * m.get(occ[pos], occ[pos]),
                None => acc,
            });
            best = best.max((v - ONE).norm());
            for pos in (0..n).rev() {
                occ[pos] += 1;
                if occ[pos] <= self.layout.cutoff_at(pos) {
                    break;
                }
                occ[pos] = 0;
            }
        }
        best
    }

    /// Single-ladder decomposition: `(scalar, per-position local sums)` when every
    /// term acts on at most one ladder, `None` otherwise.
    pub(crate) fn separable_parts(&self) -> Option<(Complex64, Vec<Option<LocalMatrix>>)> {
        let mut scalar = ZERO;
        let mut parts: Vec<Option<LocalMatrix>> = vec![None; self.layout.len()];
        for t in &self.terms {
            let mut support = t.factors.iter().enumerate().filter(|(_, f)| f.is_some());
            match (support.next(), support.next()) {
                (None, _) => scalar += t.coeff,
                (Some((pos, Some(m))), None) => {
                    let contrib = m.scale(t.coeff);
                    parts[pos] = Some(match parts[pos].take() {
                        Some(acc) => &acc + &contrib,
                        None => contrib,
                    });
                }
                _ => return None,
            }
        }
        Some((scalar, parts))
    }

    /// Merges terms that agree on all but at most one factor.
    fn compressed(mut self) -> Self {
        let mut i = 0;
        while i < self.terms.len() {
            let mut j = i + 1;
            while j < self.terms.len() {
                match self.terms[i].support_differs(&self.terms[j]) {
                    Some(None) => {
                        let extra = self.terms.remove(j).coeff;
                        self.terms[i].coeff += extra;
                    }
                    Some(Some(pos)) => {
                        let other = self.terms.remove(j);
                        let dim = self.layout.local_dim(pos);
                        let a = materialize(&self.terms[i].factors[pos], dim).scale(self.terms[i].coeff);
                        let b = materialize(&other.factors[pos], dim).scale(other.coeff);
                        let sum = &a + &b;
                        self.terms[i].coeff = ONE;
                        self.terms[i].factors[pos] = Some(Arc::new(sum));
                    }
                    None => j += 1,
                }
            }
            let dead = {
                let t = &self.terms[i];
                t.coeff == ZERO || t.factors.iter().any(|f| f.as_ref().is_some_and(|m| m.is_zero()))
            };
            if dead {
                self.terms.remove(i);
            } else {
                i += 1;
            }
        }
        self
    }

    /// `self · v` for a raw amplitude vector in layout basis order.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = self.layout.dim();
        if v.len() != dim {
            return Err(Error::LayoutMismatch);
        }
        let mut out = vec![ZERO; dim];
        let mut scratch = vec![ZERO; dim];
        for t in &self.terms {
            let mut cur: Vec<Complex64> = v.to_vec();
            for (pos, f) in t.factors.iter().enumerate() {
                if let Some(m) = f {
                    apply_axis(
                        m,
                        self.layout.local_dim(pos),
                        self.layout.stride(pos),
                        &cur,
                        &mut scratch,
                    );
                    core::mem::swap(&mut cur, &mut scratch);
                }
            }
            for (o, c) in out.iter_mut().zip(&cur) {
                *o += t.coeff * c;
            }
        }
        Ok(out)
    }

    pub fn apply_state(&self, state: &StateVector) -> Result<StateVector> {
        self.same_layout_state(state)?;
        let amps = self.apply(state.amplitudes())?;
        StateVector::from_raw(&self.layout, amps)
    }

    pub(crate) fn same_layout_state(&self, state: &StateVector) -> Result<()> {
        if Arc::ptr_eq(&self.layout, state.layout()) || *self.layout == **state.layout() {
            Ok(())
        } else {
            Err(Error::LayoutMismatch)
        }
    }

    /// Single matrix element `⟨row|self|col⟩`.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        let ro = self.layout.occupations(row);
        let co = self.layout.occupations(col);
        self.terms
            .iter()
            .map(|t| {
                t.factors.iter().enumerate().fold(t.coeff, |acc, (pos, f)| match f {
                    Some(m) => acc * m.get(ro[pos], co[pos]),
                    None if ro[pos] == co[pos] => acc,
                    None => ZERO,
                })
            })
            .sum()
    }

    /// Largest entry modulus over the whole truncated space.
    pub fn max_norm(&self) -> f64 {
        let caps: Vec<usize> = self.layout.cutoffs().to_vec();
        self.block_max_norm(&caps)
    }

    /// Largest entry modulus of `P · self · P`, where `P` keeps occupations
    /// `<= caps[i]` on ladder `i` (caps above the cutoff are clipped).
    pub fn projected_max_norm(&self, caps: &[usize]) -> Result<f64> {
        if caps.len() != self.layout.len() {
            return Err(Error::LayoutMismatch);
        }
        let caps: Vec<usize> = caps
            .iter()
            .zip(self.layout.cutoffs())
            .map(|(&c, &n)| c.min(n))
            .collect();
        Ok(self.block_max_norm(&caps))
    }

    fn block_max_norm(&self, caps: &[usize]) -> f64 {
        let n = caps.len();
        if self.terms.is_empty() {
            return 0.0;
        }
        let mut pstrides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            pstrides[i] = pstrides[i + 1] * (caps[i + 1] + 1);
        }
        let pdim = pstrides[0] * (caps[0] + 1);

        // Per term, per ladder, per row: nonzero (column, value) pairs inside the block.
        let tables: Vec<Vec<Vec<RowEntries>>> = self
            .terms
            .iter()
            .map(|t| {
                t.factors
                    .iter()
                    .enumerate()
                    .map(|(pos, f)| {
                        (0..=caps[pos])
                            .map(|r| match f {
                                Some(m) => m.row_nonzeros(r, caps[pos]),
                                None => vec![(r, ONE)],
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();

        let mut buf = vec![ZERO; pdim];
        let mut touched_flag = vec![false; pdim];
        let mut touched = Vec::new();
        let mut occ = vec![0usize; n];
        let mut best = 0.0f64;
        let mut lists: Vec<&[(usize, Complex64)]> = vec![&[]; n];
        for _row in 0..pdim {
            for (t, table) in self.terms.iter().zip(&tables) {
                for pos in 0..n {
                    lists[pos] = &table[pos][occ[pos]];
                }
                if lists.iter().any(|l| l.is_empty()) {
                    continue;
                }
                accumulate(
                    &lists,
                    &pstrides,
                    0,
                    0,
                    t.coeff,
                    &mut buf,
                    &mut touched_flag,
                    &mut touched,
                );
            }
            for &c in &touched {
                best = best.max(buf[c].norm());
                buf[c] = ZERO;
                touched_flag[c] = false;
            }
            touched.clear();
            // advance the row odometer, last ladder fastest
            for pos in (0..n).rev() {
                occ[pos] += 1;
                if occ[pos] <= caps[pos] {
                    break;
                }
                occ[pos] = 0;
            }
        }
        best
    }

    /// Dense copy of the full matrix; intended for small layouts in tests.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let dim = self.layout.dim();
        let mut out = vec![vec![ZERO; dim]; dim];
        for (col, column) in (0..dim).map(|c| {
            let mut e = vec![ZERO; dim];
            e[c] = ONE;
            (c, self.apply(&e).expect("layout-sized basis vector"))
        }) {
            for (row, v) in column.into_iter().enumerate() {
                out[row][col] = v;
            }
        }
        out
    }
}

#[allow(clippy::too_many_arguments)]
fn accumulate(
    lists: &[&[(usize, Complex64)]],
    pstrides: &[usize],
    level: usize,
    base: usize,
    weight: Complex64,
    buf: &mut [Complex64],
    flag: &mut [bool],
    touched: &mut Vec<usize>,
) {
    if level + 1 == lists.len() {
        for &(j, v) in lists[level] {
            let c = base + j * pstrides[level];
            if !flag[c] {
                flag[c] = true;
                touched.push(c);
            }
            buf[c] += weight * v;
        }
        return;
    }
    for &(j, v) in lists[level] {
        accumulate(
            lists,
            pstrides,
            level + 1,
            base + j * pstrides[level],
            weight * v,
            buf,
            flag,
            touched,
        );
    }
}

/// `out = (I ⊗ m ⊗ I) · v` where `m` acts on the axis with the given local
/// dimension and stride.
fn apply_axis(m: &LocalMatrix, local: usize, stride: usize, v: &[Complex64], out: &mut [Complex64]) {
    let block = local * stride;
    let rows: Vec<Vec<(usize, Complex64)>> = (0..local).map(|r| m.row_nonzeros(r, local - 1)).collect();
    for (vb, ob) in v.chunks_exact(block).zip(out.chunks_exact_mut(block)) {
        for (i, row) in rows.iter().enumerate() {
            let dst = &mut ob[i * stride..(i + 1) * stride];
            dst.fill(ZERO);
            for &(j, a) in row {
                let src = &vb[j * stride..(j + 1) * stride];
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
    }
}
