use thiserror::Error;

/// Errors raised by the analysis layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: u32, found: u32 },
    #[error("width {0} is out of range")]
    WidthOutOfRange(u32),
    #[error("value {value:#x} does not fit in {width} bits")]
    ValueOutOfRange { value: u32, width: u32 },
    #[error("full subspace enumeration of width {0} needs a dimension filter")]
    EnumerationTooLarge(u32),
    #[error("invalid brick layout s={s}, b={b}")]
    InvalidLayout { s: u32, b: u32 },
    #[error("member set {0:#b} is not a wall (must be a non-empty proper subset of the bricks)")]
    NotAWall(u32),
    #[error("table has {found} entries, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("table entry {value} at index {index} does not fit in {width} bits")]
    EntryOutOfRange {
        index: usize,
        value: u32,
        width: u32,
    },
    #[error("table is not a permutation: value {value} at index {index} repeats index {first}")]
    NotPermutation {
        index: usize,
        value: u32,
        first: usize,
    },
    #[error("linear map is singular")]
    Singular,
    #[error("malformed partition: {0}")]
    MalformedPartition(String),
    #[error("translation scan disagrees with the linear-partition predicate")]
    CriterionMismatch,
    #[error("invalid Goursat triple: {0}")]
    InvalidTriple(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("operation requires key-after-rho mode")]
    KeyBeforeMode,
    #[error("expected {expected} round keys, found {found}")]
    KeyCount { expected: usize, found: usize },
    #[error("generating function of round {0} is affine")]
    AffineGenerator(usize),
    #[error("round {0} is a raw table: S-box and diffusion hypotheses cannot be verified")]
    RawTableRound(usize),
    #[error("chain is degenerate: {0}")]
    DegenerateChain(String),
    #[error("chain link {0} does not propagate")]
    ChainNotVerified(usize),
    #[error("parameter out of bounds: {0}")]
    Parameter(String),
    #[error("search space too large: {0}")]
    SearchTooLarge(String),
    #[error("permutation group bound exceeded: {0}")]
    GroupBounds(String),
    #[error("generator set is not transitive")]
    Intransitive,
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
