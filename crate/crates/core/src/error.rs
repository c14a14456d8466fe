use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("invalid rational literal {0:?}")]
    InvalidRational(String),

    #[error("invalid basket entry ({r},{b}): {reason}")]
    InvalidEntry {
        r: i64,
        b: i64,
        reason: &'static str,
    },

    #[error("cannot parse basket {input:?}: {reason}")]
    BasketSyntax { input: String, reason: String },

    #[error("K^3 must be zero for this operation, got {0}")]
    NonZeroKCubed(String),

    #[error("sigma - 24 chi = {0} is not positive; lambda is undefined")]
    NonPositiveExcess(String),

    #[error("chi(O_F) must be 1 or 2, got {0}")]
    InvalidChiF(i64),

    #[error("chi(O_X) value {0} is outside the supported range")]
    InvalidChiX(i64),

    #[error("search threshold must be positive, got {0}")]
    NonPositiveThreshold(String),

    #[error("no chi(O_X) values given")]
    EmptyChiSet,

    #[error("{what} = {value} exceeds the limit {limit}")]
    CapExceeded {
        what: &'static str,
        value: i64,
        limit: i64,
    },

    #[error("{what} = {value} is below the minimum {min}")]
    CapTooSmall {
        what: &'static str,
        value: i64,
        min: i64,
    },

    #[error("parameter {what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("no fiber index values given")]
    EmptyFiberIndexSet,

    #[error("no positive value found in the search domain")]
    NoPositiveValue,

    #[error("bound not verified: {0}")]
    BoundNotVerified(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
