use thiserror::Error;

/// Errors from construction, verification and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("half-integer offset mismatch when adding polynomials")]
    OffsetMismatch,
    #[error("scale mismatch: cannot add a rational and an irrational multiple exactly")]
    ScaleMismatch,
    #[error("offset not representable in half-integers")]
    OffsetNotRepresentable,
    #[error("matrix is not a dilation: |det| = {0} <= 1")]
    Unimodular(i128),
    #[error("matrix is not expanding: an eigenvalue has modulus <= 1")]
    NotExpanding,
    #[error("bad digit set: {0}")]
    BadDigits(String),
    #[error("matrix does not admit the axial symmetry group (must be diagonal or antidiagonal)")]
    NotAxialAdmissible,
    #[error("matrix list is not a group: {0}")]
    NotAGroup(String),
    #[error("group is not compatible with the dilation matrix (M E M^-1 left the group)")]
    NotCompatibleWithM,
    #[error("digit {digit} is not stable under group element {element}")]
    DigitNotStable { element: usize, digit: usize },
    #[error("offset class not preserved by group element {0}")]
    OffsetNotPreserved(usize),
    #[error("flavor parity violation: {0}")]
    FlavorParityViolation(String),
    #[error("chosen support makes the moment matrix singular")]
    SingularSupport,
    #[error("polyphase decomposition requires an integer-degree polynomial")]
    NonIntegerOffset,
    #[error("coefficient table violates the parity constraints of the requested symmetry: {0}")]
    ParityViolation(String),
    #[error("generator offset does not match the slot requirement: expected {expected}, got {got}")]
    GeneratorOffsetMismatch { expected: String, got: String },
    #[error("perturbation term violates its parity constraint: {0}")]
    PerturbationParityViolation(String),
    #[error("perturbation term has order {got}, expected exactly {expected}")]
    OrderViolation { expected: usize, got: usize },
    #[error("mask is not normalized: value at zero frequency is not 1")]
    NotNormalized,
    #[error("trivial dual is invalid: the mask moments do not collapse to a delta")]
    TrivialDualInvalid,
    #[error("inputs come from different dilation contexts")]
    ContextMismatch,
    #[error("symmetry precondition failed: {0}")]
    SymmetryPreconditionFailed(String),
    #[error("filter bank fails the polyphase identity")]
    BankInvalid,
    #[error("matrix M - I is singular (1 is an eigenvalue of M)")]
    Singular,
    #[error("builder produced a mask failing its own contract: {0}")]
    BuilderPostcondition(String),
    #[error("non-finite sample encountered in numeric experiment")]
    NonFiniteSamples,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid bank file: {0}")]
    BadBankFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
