use thiserror::Error;

/// Errors raised by grid construction and the spectral operators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("dimension {0} is not supported (expected 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("points per axis {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("points per axis {0} is below the minimum of 8")]
    GridTooSmall(usize),
    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("expected {expected} components, found {found}")]
    ComponentCount { expected: usize, found: usize },
    #[error("expected {expected} samples, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("L^p exponent {0} is below 1")]
    InvalidExponent(f64),
}

/// Errors raised by the Littlewood-Paley layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("block index {j} exceeds the top resolvable block {j_max}")]
    BlockOutOfRange { j: i32, j_max: i32 },
    #[error("grid with {0} points per axis cannot host the j = 0 block")]
    GridTooSmall(usize),
    #[error("invalid Besov index: {0}")]
    InvalidIndex(&'static str),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Errors raised while integrating in time.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("CFL number {number:.3} exceeds the limit at t = {t}")]
    Cfl { t: f64, number: f64 },
    #[error("blowup guard tripped at t = {t}: gradient norm {value:.6e} above threshold")]
    Blowup { t: f64, value: f64 },
    #[error("initial data is not divergence-free (relative divergence {0:.3e})")]
    NotSolenoidal(f64),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

impl SolveError {
    /// Time at which the run failed, when the failure happened mid-run.
    pub fn time(&self) -> Option<f64> {
        match self {
            SolveError::Cfl { t, .. } | SolveError::Blowup { t, .. } => Some(*t),
            _ => None,
        }
    }
}

/// Errors raised by random data generation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("wavenumber band [{0}, {1}] contains no lattice modes")]
    EmptyBand(f64, f64),
    #[error("band edge {k_max} exceeds the dealiasing cutoff {cutoff}")]
    BandAboveCutoff { k_max: f64, cutoff: usize },
    #[error("decay exponent must be positive, got {0}")]
    InvalidDecay(f64),
    #[error("amplitude must be finite and non-negative, got {0}")]
    InvalidAmplitude(f64),
}

/// Errors raised by the experiment harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("sweep member {index} failed: {source}")]
    Member { index: usize, source: SolveError },
    #[error("reference run failed: {0}")]
    Reference(SolveError),
    #[error("snapshot times do not line up (t = {0})")]
    TimeGridMismatch(f64),
    #[error("invalid sweep parameters: {0}")]
    InvalidParameters(&'static str),
    #[error("reference trajectory is identically zero")]
    DegenerateReference,
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
