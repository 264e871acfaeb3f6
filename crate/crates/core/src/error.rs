use thiserror::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the numerical engine.
///
/// The variants split into configuration problems (`InvalidInput`,
/// `GridMismatch`) and numerical-precondition violations that signal the
/// requested computation would silently lose accuracy (everything else).
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor argument violates a structural invariant.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two states/maps that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The grid does not cover the requested state's support; truncation
    /// would corrupt moments.
    #[error("grid too narrow: {0}")]
    GridTooNarrow(String),

    /// Significant amplitude at the grid edges; Fourier differentiation or
    /// shifting would wrap around.
    #[error("edge leakage: boundary magnitude {magnitude:.3e} exceeds {threshold:.3e}")]
    EdgeLeakage { magnitude: f64, threshold: f64 },

    /// A frequency shift pushed significant amplitude off-grid.
    #[error("support overflow: post-shift boundary magnitude {magnitude:.3e} exceeds {threshold:.3e}")]
    SupportOverflow { magnitude: f64, threshold: f64 },

    /// The state is not representable in the requested Hermite basis at the
    /// configured tail tolerance.
    #[error("basis truncation: tail norm {tail:.3e} exceeds tolerance {tolerance:.3e} (modes: {modes})")]
    BasisTruncation { tail: f64, tolerance: f64, modes: usize },

    /// A swap overlap came out with a non-negligible imaginary part, which
    /// indicates a grid or symmetry bug upstream.
    #[error("non-hermitian overlap: imaginary part {imag:.3e} exceeds 1e-8")]
    NonHermitianOverlap { imag: f64 },

    /// The state is neither symmetric nor antisymmetric under photon
    /// exchange, so the closed-form Fisher information does not apply.
    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),

    /// The curvature fit residual is too large to trust the extracted value.
    #[error("poor fit: residual {residual:.3e} exceeds allowance {allowance:.3e}")]
    PoorFit { residual: f64, allowance: f64 },

    /// The coincidence curve is flat at the requested operating point; no
    /// estimator can be built there.
    #[error("non-invertible: {0}")]
    NonInvertible(String),

    /// Evolution would break separability; convert to a full joint amplitude
    /// first.
    #[error("non-separable evolution: {0}")]
    NonSeparableEvolution(String),
}

impl Error {
    /// True for errors that indicate a numerical precondition was violated
    /// (as opposed to malformed configuration).
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidInput(_) | Error::GridMismatch(_))
    }
}
