use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: operands live on different grids")]
    GridMismatch,
    #[error("boundary leak: {0}")]
    BoundaryLeak(String),
    #[error("kind mismatch: expected {expected}, found {found}")]
    KindMismatch { expected: &'static str, found: &'static str },
    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),
    #[error("shift x0 = {0} is not a multiple of the grid spacing")]
    OffGridShift(f64),
    #[error("reflection centre x0 = {0} is not a multiple of half the grid spacing")]
    OffGridReflection(f64),
    #[error("position {0} is not a grid point")]
    OffGrid(f64),
    #[error("monomial degree {0} exceeds the maximum of 8")]
    DegreeTooHigh(u32),
    #[error("symbol not resolved on the grid: {0}")]
    AliasedSymbol(String),
    #[error("states are orthogonal: |<phi|psi>| = {overlap:e} below threshold {threshold:e}")]
    OrthogonalStates { overlap: f64, threshold: f64 },
    #[error("superposition psi + phi vanishes")]
    ZeroSum,
    #[error("momentum amplitude |psi^(p0)| = {0:e} too small to divide by")]
    SmallMomentumAmplitude(f64),
    #[error("x index {x} and reference index {x_ref} have different parity; midpoint is off-grid")]
    NodeParity { x: usize, x_ref: usize },
    #[error("reference amplitude |phi(x_ref)| = {0:e} too small to divide by")]
    SmallReferenceAmplitude(f64),
    #[error("auxiliary state is orthogonal to the post-selected state: |<phi|lambda>| = {0:e}")]
    OrthogonalAuxiliary(f64),
    #[error("hermite index {0} exceeds 10")]
    IndexTooHigh(usize),
    #[error("state centre {0} lies outside the decay margin of the grid")]
    CenterTooFarOut(f64),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numeric precondition (as opposed to bad input
    /// syntax or I/O).
    pub fn is_numeric_precondition(&self) -> bool {
        !matches!(self, Error::Parse(_) | Error::Io(_) | Error::OrthogonalStates { .. })
    }
}
