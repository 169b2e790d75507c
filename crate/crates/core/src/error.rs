use thiserror::Error;

use crate::kernel::KernelResult;
use crate::semiring::Semiring;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mixed semirings: {0} and {1}")]
    MixedSemiring(Semiring, Semiring),

    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),

    #[error("semiring {0} has no additive inverses")]
    NegationUnavailable(Semiring),

    #[error("semiring {0} is not a field; division is unavailable")]
    DivisionUnavailable(Semiring),

    #[error("division by zero")]
    DivisionByZero,

    #[error("value has a nonzero irrational or imaginary component")]
    IrrationalResidue,

    #[error("value is negative")]
    Negative,

    #[error("no square root of {0} is representable in the semiring")]
    NotRepresentable(String),

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("carrier is infinite: {0}")]
    InfiniteCarrier(String),

    #[error("relation is not square (domain and codomain differ)")]
    NonSquare,

    #[error("relation is not unitary: {0}")]
    NotUnitary(String),

    #[error("semiring {0} is not a field")]
    NotAField(Semiring),

    #[error("input vectors are linearly dependent (residual {0} vanished)")]
    DependentInput(usize),

    #[error("orthonormalization failed: a residual norm has no exact square root")]
    NormalizationFailed(Box<KernelResult>),

    #[error("morphism does not factor through the kernel: {0}")]
    NotInKernel(String),

    #[error("entry out of range [0, 1]: {0}")]
    EntryOutOfRange(String),

    #[error("element {elem} does not belong to carrier {carrier}")]
    NotInCarrier { elem: String, carrier: String },

    #[error("duplicate element: {0}")]
    DuplicateElement(String),

    #[error("duplicate entry at ({0}, {1})")]
    DuplicateEntry(String, String),

    #[error("not a partial injection: {0}")]
    NotPartialInjection(String),

    #[error("lazy relation is not supported here: {0}")]
    LazyUnsupported(String),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("not a tame relation: {0}")]
    NotTame(String),

    #[error("parse error at {path}: {msg}")]
    Parse { path: String, msg: String },

    #[error("unknown builtin relation {0:?}")]
    UnknownBuiltin(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn parse(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
