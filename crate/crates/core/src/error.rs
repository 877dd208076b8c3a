use thiserror::Error;

/// Every failure the library can report.
///
/// Each variant maps to a stable, machine-readable clause string via
/// [`Error::clause`], which the command-line front end forwards verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero in the number field")]
    DivisionByZero,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported matrix dimension {0}; only 2 and 4 are allowed")]
    UnsupportedDimension(usize),
    #[error("matrix is singular")]
    Singular,
    #[error("determinant must be {expected}, got {got}")]
    BadDeterminant { expected: &'static str, got: String },
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("matrix is not traceless")]
    NotTraceless,
    #[error("matrix does not lie in sp(4,C) for the transported form")]
    NotInAlgebra,
    #[error("gamma must be nonzero to normalise by S")]
    SingularNormalization,
    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(i64),
    #[error("F2 vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid F2 bitstring {0:?}")]
    BadBitstring(String),
    #[error("h0 of {bundle} is not determined by degree alone; supply an explicit h0_override")]
    RequiresExplicitH0 { bundle: String },
    #[error("section slot for {bundle} has {got} coefficients but h0 = {expected}")]
    SlotLength { bundle: String, expected: usize, got: usize },
    #[error("datum lies outside the classified range: {0}")]
    OutOfClassifiedRange(String),
    #[error("datum is not maximal (Toledo invariant {toledo}, maximum {max})")]
    NotMaximal { toledo: i64, max: i64 },
    #[error("datum is not polystable ({0})")]
    NotPolystable(String),
    #[error("input is unstable: {0}")]
    UnstableInput(String),
    #[error("degree {deg} outside the allowed range [{lo}, {hi}]")]
    DegreeOutOfRange { deg: i64, lo: i64, hi: i64 },
    #[error("c = {c} outside the open range (0, {bound}) where the fibre is constant")]
    FiberRangeRefused { c: i64, bound: i64 },
    #[error("w must be a nonzero vector")]
    ZeroVector,
    #[error("rank parameter n must be at least 3, got {0}")]
    RankTooSmall(i64),
    #[error("enumeration for genus {0} exceeds the scan budget")]
    ScanBudgetExceeded(usize),
    #[error("count overflows for genus {0}")]
    CountOverflow(i64),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable identifier of the violated precondition.
    pub fn clause(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "numfield.inv.nonzero",
            Error::DimensionMismatch { .. } => "matalg.dimension.match",
            Error::UnsupportedDimension(_) => "matalg.dimension.2-or-4",
            Error::Singular => "matalg.invertible",
            Error::BadDeterminant { .. } => "liegroup.sl2.determinant",
            Error::NotNilpotent => "matalg.exp.nilpotent",
            Error::NotTraceless => "liegroup.sl2-algebra.traceless",
            Error::NotInAlgebra => "liegroup.cartan-split.in-sp4c",
            Error::SingularNormalization => "liegroup.s-conjugate.gamma-nonzero",
            Error::GenusTooSmall(_) => "curve.genus-at-least-2",
            Error::LengthMismatch { .. } => "f2.length.2g",
            Error::BadBitstring(_) => "f2.bitstring",
            Error::RequiresExplicitH0 { .. } => "higgs.h0.explicit-override",
            Error::SlotLength { .. } => "higgs.section-slot.length-h0",
            Error::OutOfClassifiedRange(_) => "higgs.shape.classified-range",
            Error::NotMaximal { .. } => "higgs.maximal",
            Error::NotPolystable(_) => "higgs.polystable",
            Error::UnstableInput(_) => "higgs.normal-form.beta2-nonzero",
            Error::DegreeOutOfRange { .. } => "higgs.degree-range",
            Error::FiberRangeRefused { .. } => "moduli.fiber.c-in-open-range",
            Error::ZeroVector => "moduli.quotient.w-nonzero",
            Error::RankTooSmall(_) => "moduli.sp2n.n-at-least-3",
            Error::ScanBudgetExceeded(_) => "moduli.f2-scan.budget",
            Error::CountOverflow(_) => "moduli.count.overflow",
            Error::Parse(_) => "input.parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
