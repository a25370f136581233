use num_rational::BigRational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("cannot invert a series whose leading coefficient vanishes on its known window")]
    ZeroLeadingCoefficient,
    #[error("coefficient of q^{exponent} requested but the series is only known below q^{trunc}")]
    PrecisionExceeded { exponent: i64, trunc: i64 },
    #[error("solver needs coefficients up to q^{needed} but inputs are only known below q^{available}")]
    InsufficientPrecision { needed: i64, available: i64 },

    #[error("no plane relation of total degree <= {dmax}")]
    NoRelationFound { dmax: usize },
    #[error("relation of degree {degree} is not unique (nullity {nullity}); raise the order")]
    AmbiguousRelation { degree: usize, nullity: usize },
    #[error("no rational expression in the generators within the degree bounds")]
    NoExpressionFound,
    #[error("rational expression is not unique (nullity {nullity}); raise the order")]
    AmbiguousExpression { nullity: usize },
    #[error("{what} failed exact verification at q^{exponent}")]
    VerificationFailed { what: String, exponent: i64 },
    #[error("partial expansion disagrees with the reconstructed series at q^{exponent}")]
    InconsistentPartial { exponent: i64 },
    #[error("linear system of dimension {dimension} exceeds the matrix budget {budget}")]
    BudgetExceeded { dimension: usize, budget: usize },

    #[error("point does not lie on the model curve")]
    PointNotOnCurve,
    #[error("a map denominator vanishes at the point")]
    DenominatorVanishes,
    #[error("curve is singular (4A^3 + 27B^2 = 0)")]
    SingularCurve,
    #[error("points at infinity of the external model are not evaluated")]
    PointAtInfinity,
    #[error("curves have different j-invariants")]
    NotTwists,
    #[error("curves are twists but not quadratic twists")]
    NotQuadraticTwist,
    #[error("no catalog curve with j = {j}")]
    UnknownCurve { j: BigRational },

    #[error("level {0} is not supported by this route")]
    UnsupportedLevel(u64),
    #[error("|q| too close to 1: {needed} terms needed, cap is {cap}")]
    PrecisionUnreachable { needed: u64, cap: u64 },
    #[error("rational reconstruction failed (best error 2^{log2_error})")]
    ReconstructionFailed { log2_error: i64 },
    #[error("imaginary part 2^{log2_imag} exceeds the tolerance")]
    ImaginaryResidueTooLarge { log2_imag: i64 },

    #[error("unknown curve label {0:?}")]
    UnknownLabel(String),
    #[error("level {0} is not a sporadic level")]
    UnknownLevel(u64),
    #[error("network unavailable: {0}")]
    NetworkUnavailable(String),
    #[error("schema mismatch for label {label:?}: {reason}")]
    SchemaMismatch { label: String, reason: String },

    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code for the CLI: 2 usage, 3 domain, 4 network.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) => 2,
            Error::NetworkUnavailable(_) => 4,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
