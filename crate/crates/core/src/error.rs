use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix entries do not define an orientation-preserving isometry (det = {det})")]
    InvalidMatrix { det: f64 },

    #[error("point ({x}, {y}) is not in the upper half-plane")]
    InvalidPoint { x: f64, y: f64 },

    #[error("isometry is not hyperbolic")]
    NotHyperbolic,

    #[error("point ({x}, {y}) lies outside the ideal triangle 0, 1, inf")]
    OutsideTriangle { x: f64, y: f64 },

    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),

    #[error("invalid slope {p}/{q}: {reason}")]
    InvalidSlope {
        p: i64,
        q: i64,
        reason: &'static str,
    },

    #[error("invalid word {word:?}: {reason}")]
    InvalidWord { word: String, reason: &'static str },

    #[error("loop is not compatible with the triangulation")]
    IncompatibleLoop,

    #[error("shear vector has {got} entries, triangulation has {expected} edges")]
    EdgeCountMismatch { expected: usize, got: usize },

    #[error("shear on edge e{edge} is not finite")]
    NonFiniteShear { edge: usize },

    #[error("structure is not complete: puncture {puncture} has |trace| - 2 = {residual:e}")]
    Incomplete { puncture: usize, residual: f64 },

    #[error("holonomy is elliptic (|trace| = {trace}); structure is invalid")]
    EllipticHolonomy { trace: f64 },

    #[error("operation needs the standard once-punctured torus triangulation")]
    NotStandardTorus,

    #[error("structures live on different triangulations")]
    TriangulationMismatch,

    #[error("negative transverse weight {weight} on edge e{edge}")]
    NegativeWeight { edge: usize, weight: f64 },

    #[error("curve is peripheral (zero length)")]
    ZeroLength,

    #[error("length of {0} is below double-precision resolution")]
    LengthUnderflow(String),

    #[error("curve set is empty")]
    EmptyCurveSet,

    #[error("sweep schedule must be nonempty and strictly increasing")]
    BadSchedule,

    #[error("invalid step {0}; must be positive and finite")]
    BadStep(f64),

    #[error("invalid train track: {0}")]
    InvalidTrack(String),

    #[error("curve is not defined on this surface: {0}")]
    UnsupportedCurve(String),
}
