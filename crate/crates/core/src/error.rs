use alloc::string::String;

use thiserror::Error;

use crate::fockspace::LadderId;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ladder {0} is not part of the layout")]
    UnknownLadder(LadderId),

    #[error("invalid layout: {0}")]
    Layout(String),

    #[error("layout dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("operands live on different Fock layouts")]
    LayoutMismatch,

    #[error("generator is not anti-Hermitian: |G + G^dag| = {defect:e} against |G| = {norm:e}")]
    NotAntiHermitian { defect: f64, norm: f64 },

    #[error("generator term couples several ladders; only ladder-separable generators are exponentiated")]
    CoupledGenerator,

    #[error("exponential is not unitary within tolerance: |U^dag U - I| = {0:e}")]
    NotUnitary(f64),

    #[error("state is not normalized: norm = {0}")]
    NotNormalized(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(
        "displacement {amplitude} on {ladder} violates the leakage bound with cutoff {cutoff} (tail {tail:e} >= 1e-12)"
    )]
    Leakage {
        ladder: LadderId,
        amplitude: f64,
        cutoff: usize,
        tail: f64,
    },

    #[error("quadrature grid of {points} points cannot resolve integrands up to wavenumber index {band}")]
    GridTooCoarse { points: usize, band: usize },

    #[error("A5 = {0} is not positive; the descent threshold is undefined for this geometry")]
    Geometry(f64),
}
