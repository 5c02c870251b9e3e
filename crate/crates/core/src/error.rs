//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building lattices, windows, transforms
/// or bounds.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix or point had a dimension incompatible with the operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A generator or other matrix was singular (or numerically so).
    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    /// An input contained NaN or infinity.
    #[error("non-finite input: {0}")]
    NonFinite(String),

    /// A lattice enumeration or grid would exceed the configured point cap.
    #[error("point cap exceeded: {needed} points requested, cap is {cap}")]
    PointCapExceeded { needed: u64, cap: u64 },

    /// Invalid window samples (non-uniform grid, asymmetric grid, even count,
    /// all-zero data, bad CSV).
    #[error("invalid window samples: {0}")]
    InvalidSamples(String),

    /// A Hermite index exceeded the supported per-coordinate order cap.
    #[error("hermite order {order} exceeds cap {cap}")]
    HermiteOrderCap { order: usize, cap: usize },

    /// Quadrature failed to reach its target accuracy.
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    /// A lattice sum could not push its estimated tail below target.
    #[error("lattice sum tail {tail:.3e} above target {target:.3e} at radius {radius}")]
    TailNotReached { tail: f64, target: f64, radius: f64 },

    /// A gridded transform was asked for on an unsupported phase-space
    /// dimension.
    #[error("unsupported phase-space dimension 2d = {0} (supported: 2, 4)")]
    UnsupportedDimension(usize),

    /// Input samples do not decay at the grid boundary, so the transform's
    /// truncation to the grid cannot be trusted.
    #[error("insufficient boundary decay: boundary magnitude {boundary:.3e} exceeds {limit:.3e}")]
    InsufficientDecay { boundary: f64, limit: f64 },

    /// Input grid too coarse for the requested output extent.
    #[error("grid too coarse: spacing {spacing:.4} along axis {axis} resolves frequencies up to {nyquist:.4}, output needs {needed:.4}")]
    GridTooCoarse { axis: usize, spacing: f64, nyquist: f64, needed: f64 },

    /// A precondition on the window (parity, normalisation, decay) failed.
    #[error("window precondition violated: {0}")]
    WindowPrecondition(String),

    /// A precondition on the lattice (symplecticity, volume) failed.
    #[error("lattice precondition violated: {0}")]
    LatticePrecondition(String),

    /// Redundancy vol(Λ)^{-1/d} is not a positive integer within tolerance.
    #[error("redundancy {value:.6} is not a positive integer")]
    NonIntegerRedundancy { value: f64 },

    /// Redundancy is an odd integer: the series carries an alternating phase
    /// this implementation does not support.
    #[error("odd redundancy {0}: alternating-phase series unsupported, use the finite-section method")]
    AlternatingPhaseUnsupported(u64),

    /// A computed series violated a structural invariant (coefficient at the
    /// origin, Hermitian symmetry).
    #[error("series invariant violated: {0}")]
    SeriesInvariant(String),

    /// Finite section too small to be meaningful.
    #[error("finite section has {points} points, need at least {min}")]
    SectionTooSmall { points: usize, min: usize },

    /// Eigenvalue computation failed to converge.
    #[error("eigenvalue computation failed: {0}")]
    Eigen(String),

    /// Invalid run configuration (CLI or config file).
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// Bound computation hit its refinement cap before the extrema settled.
    #[error("bounds did not converge: extrema still moving {movement:.3e} at grid res {grid_res}")]
    BoundsNotConverged { movement: f64, grid_res: u32 },

    /// I/O failure reading or writing an artifact.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// CSV parse/write failure.
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// JSON serialisation failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
