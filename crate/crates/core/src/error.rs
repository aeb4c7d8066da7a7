use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error(
        "coupling matrix is not positive definite (eigenvalue {eigenvalue:e} <= {tolerance:e})"
    )]
    NonPositiveCoupling { eigenvalue: f64, tolerance: f64 },

    #[error("square root residual {residual:e} exceeds tolerance {tolerance:e}")]
    InaccurateSquareRoot { residual: f64, tolerance: f64 },

    #[error("partition is degenerate: every oscillator is on the same side")]
    DegeneratePartition,

    #[error("exterior block of the ground-state matrix is numerically singular")]
    SingularExteriorBlock,

    #[error(
        "reduced gamma block is not positive definite (eigenvalue {eigenvalue:e} <= {tolerance:e})"
    )]
    NonPositiveGamma { eigenvalue: f64, tolerance: f64 },

    #[error("mode eigenvalue {value} lies outside [0, 1)")]
    SpectrumOutOfRange { value: f64 },

    #[error("lattice has {sites} sites, limit is {max}")]
    LatticeTooLarge { sites: usize, max: usize },

    #[error("lattice dimensions must be positive, got {dims:?}")]
    EmptyLattice { dims: [usize; 3] },

    #[error("region does not fit inside the lattice: {0}")]
    RegionOutOfBounds(String),

    #[error("region file, line {line}: {message}")]
    RegionFormat { line: usize, message: String },

    #[error("invalid multipole l = {l}: {reason}")]
    InvalidMultipole { l: usize, reason: &'static str },

    #[error("invalid radial model: {0}")]
    InvalidModel(String),

    #[error("grid site {site} lies on a coordinate pole")]
    PoleSingularity { site: usize },

    #[error("boundary index {boundary} is invalid for {sites} radial sites")]
    InvalidBoundary { boundary: usize, sites: usize },

    #[error("partial-wave tail does not converge: fitted exponent {exponent:.4} <= {required}")]
    TailNotConvergent { exponent: f64, required: f64 },

    #[error("insufficient points for a fit: {found} < {required}")]
    InsufficientPoints { found: usize, required: usize },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

impl Error {
    /// Variant name, for machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "NotSquare",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NonFinite => "NonFinite",
            Error::NonPositiveCoupling { .. } => "NonPositiveCoupling",
            Error::InaccurateSquareRoot { .. } => "InaccurateSquareRoot",
            Error::DegeneratePartition => "DegeneratePartition",
            Error::SingularExteriorBlock => "SingularExteriorBlock",
            Error::NonPositiveGamma { .. } => "NonPositiveGamma",
            Error::SpectrumOutOfRange { .. } => "SpectrumOutOfRange",
            Error::LatticeTooLarge { .. } => "LatticeTooLarge",
            Error::EmptyLattice { .. } => "EmptyLattice",
            Error::RegionOutOfBounds { .. } => "RegionOutOfBounds",
            Error::RegionFormat { .. } => "RegionFormat",
            Error::InvalidMultipole { .. } => "InvalidMultipole",
            Error::InvalidModel { .. } => "InvalidModel",
            Error::PoleSingularity { .. } => "PoleSingularity",
            Error::InvalidBoundary { .. } => "InvalidBoundary",
            Error::TailNotConvergent { .. } => "TailNotConvergent",
            Error::InsufficientPoints { .. } => "InsufficientPoints",
            Error::InvalidSweep { .. } => "InvalidSweep",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
