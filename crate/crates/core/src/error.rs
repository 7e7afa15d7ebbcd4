//! Error type shared by every module of the kernel.
//!
//! Variant names double as the stable error codes reported by the CLI.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("value is not integral at the extreme point of {p}")]
    NonIntegralAtExtremePoint { p: u64 },
    #[error("input must be nonzero")]
    ZeroInput,
    #[error("element does not belong to the ring of the compact: {0}")]
    NotInRingOfV(String),
    #[error("polynomial coefficients are not integral at {p}")]
    NonIntegralCoefficients { p: u64 },
    #[error("fiber is incompatible with its base point: {0}")]
    IncompatiblePoint(String),
    #[error("polynomial is not irreducible over the residue field")]
    NotIrreducible,
    #[error("irreducibility over Q could not be certified")]
    IrreducibilityNotCertified,
    #[error("flow exponent outside the admissible interval: {0}")]
    FlowOutOfDomain(String),
    #[error("radius raised to the flow exponent is irrational")]
    IrrationalRadius,
    #[error("series has negative powers but the inner radius is zero")]
    NegativePowersOnDisk,
    #[error("uniform norm is only bounded over archimedean bases")]
    ArchimedeanBase,
    #[error("radii violate s < u <= v < t")]
    OrderingViolated,
    #[error("element is not a certified unit: {0}")]
    NotAUnit(String),
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("working radius {w} is below the certified threshold {v}")]
    RadiusBelowThreshold { w: String, v: String },
    #[error("no radius makes the division operator a contraction")]
    NoContractionRadiusFound,
    #[error("Weierstrass degree is undefined: {0}")]
    ValuationUndefined(String),
    #[error("initial value is not a simple root: {0}")]
    NotSimpleRoot(String),
    #[error("Newton iteration did not converge within {0} steps")]
    NoConvergence(usize),
    #[error("factors are not pairwise coprime modulo p")]
    NotCoprime,
    #[error("product of factors does not match the polynomial modulo p")]
    ProductMismatch,
    #[error("polynomial is not separable")]
    NotSeparable,
    #[error("radius is smaller than the largest root")]
    RadiusTooSmall,
    #[error("supplied roots do not multiply to the polynomial")]
    RootsMismatch,
    #[error("requested accuracy not reachable within the search depth")]
    DeltaNotAchievable,
    #[error("operation is only implemented at finite places")]
    InfinitePlaceUnsupported,
    #[error("matrix norm condition fails: {0}")]
    NormTooLarge(String),
    #[error("Cartan admissibility fails: {0}")]
    EpsilonTooLarge(String),
    #[error("tolerance not reached after {0} iterations")]
    ToleranceNotReached(usize),
    #[error("matrix shapes are incompatible")]
    ShapeMismatch,
    #[error("no prime congruent to 1 modulo n below {0}")]
    NoneFound(u64),
    #[error("p is not congruent to 1 modulo n")]
    CongruenceFails,
    #[error("p divides n")]
    PDividesN,
    #[error("precision too small for the requested check")]
    PrecisionInsufficient,
    #[error("data is not Hensel-liftable: {0}")]
    NotLiftable(String),
    #[error("invalid group table: {0}")]
    InvalidGroupTable(String),
    #[error("unknown self-test suite {0:?}")]
    UnknownSuite(String),
}

impl Error {
    /// Stable machine-readable code (the variant name).
    pub fn code(&self) -> &'static str {
        match self {
            Error::Malformed(_) => "Malformed",
            Error::NotPrime(_) => "NotPrime",
            Error::NonIntegralAtExtremePoint { .. } => "NonIntegralAtExtremePoint",
            Error::ZeroInput => "ZeroInput",
            Error::NotInRingOfV(_) => "NotInRingOfV",
            Error::NonIntegralCoefficients { .. } => "NonIntegralCoefficients",
            Error::IncompatiblePoint(_) => "IncompatiblePoint",
            Error::NotIrreducible => "NotIrreducible",
            Error::IrreducibilityNotCertified => "IrreducibilityNotCertified",
            Error::FlowOutOfDomain(_) => "FlowOutOfDomain",
            Error::IrrationalRadius => "IrrationalRadius",
            Error::NegativePowersOnDisk => "NegativePowersOnDisk",
            Error::ArchimedeanBase => "ArchimedeanBase",
            Error::OrderingViolated => "OrderingViolated",
            Error::NotAUnit(_) => "NotAUnit",
            Error::NotMonic => "NotMonic",
            Error::RadiusBelowThreshold { .. } => "RadiusBelowThreshold",
            Error::NoContractionRadiusFound => "NoContractionRadiusFound",
            Error::ValuationUndefined(_) => "ValuationUndefined",
            Error::NotSimpleRoot(_) => "NotSimpleRoot",
            Error::NoConvergence(_) => "NoConvergence",
            Error::NotCoprime => "NotCoprime",
            Error::ProductMismatch => "ProductMismatch",
            Error::NotSeparable => "NotSeparable",
            Error::RadiusTooSmall => "RadiusTooSmall",
            Error::RootsMismatch => "RootsMismatch",
            Error::DeltaNotAchievable => "DeltaNotAchievable",
            Error::InfinitePlaceUnsupported => "InfinitePlaceUnsupported",
            Error::NormTooLarge(_) => "NormTooLarge",
            Error::EpsilonTooLarge(_) => "EpsilonTooLarge",
            Error::ToleranceNotReached(_) => "ToleranceNotReached",
            Error::ShapeMismatch => "ShapeMismatch",
            Error::NoneFound(_) => "NoneFound",
            Error::CongruenceFails => "CongruenceFails",
            Error::PDividesN => "PDividesN",
            Error::PrecisionInsufficient => "PrecisionInsufficient",
            Error::NotLiftable(_) => "NotLiftable",
            Error::InvalidGroupTable(_) => "InvalidGroupTable",
            Error::UnknownSuite(_) => "UnknownSuite",
        }
    }

    /// Input errors are usage problems (exit 1); the rest are domain errors.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Malformed(_) | Error::UnknownSuite(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
