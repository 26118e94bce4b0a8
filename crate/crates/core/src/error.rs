use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("prime {0} is too large for explicit group tables (max {1})")]
    PrimeTooLarge(u32, u32),
    #[error("prime mismatch: expected {expected}, got {got}")]
    PrimeMismatch { expected: u32, got: u32 },
    #[error("element set is not a subgroup")]
    NotASubgroup,
    #[error("element {0} lies outside the domain")]
    OutsideDomain(u32),
    #[error("generator assignment does not extend to a homomorphism")]
    NotAHomomorphism,
    #[error("morphism is not injective")]
    NotInjective,
    #[error("composition undefined: image is not contained in the next source")]
    NotComposable,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("invalid fusion data: {0}")]
    InvalidFusionData(String),
    #[error("no subgroup of GL2({p}) matches the fusion data {name}")]
    NoOuterGroup { name: String, p: u32 },
    #[error("unknown system `{0}`")]
    UnknownSystem(String),
    #[error("layer-2 system infeasible at ({xi}, {zeta}): {reason}")]
    Infeasible { xi: String, zeta: String, reason: String },
    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),
    #[error("layer {0} is not computed")]
    NotComputed(usize),
    #[error("{0}")]
    Parse(String),
    #[error("action is not free")]
    NotFree,
    #[error("biset is not a non-negative integer combination: {0}")]
    NotGenuine(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("class outside the fusion system: {0}")]
    ConditionA(String),
    #[error("stability violated at {0}")]
    StabilityViolation(String),
    #[error("theorem violated: {0}")]
    TheoremViolation(String),
    #[error("linear system has no unique solution")]
    NoUniqueSolution,
}

pub type Result<T> = std::result::Result<T, Error>;
