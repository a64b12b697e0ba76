use thiserror::Error;

use crate::hv::Domain;
use crate::similarity::Metric;

pub type Result<T> = std::result::Result<T, HdcError>;

#[derive(Debug, Error)]
pub enum HdcError {
    #[error("cannot bundle an empty accumulator")]
    EmptyBundle,
    #[error("domain mismatch: expected {expected:?}, found {found:?}")]
    DomainMismatch { expected: Domain, found: Domain },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("bipolar binding operand contains a zero (tie) element")]
    ZeroElementBipolar,
    #[error("element outside the {0:?} domain")]
    InvalidElement(Domain),
    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("metric {metric:?} is not defined for {domain:?} hypervectors")]
    WrongDomainForMetric { metric: Metric, domain: Domain },
    #[error("cosine similarity of a zero-norm vector")]
    ZeroNorm,
    #[error("jaccard similarity of two all-zero vectors")]
    BothAllZero,
    #[error("no candidates to rank")]
    EmptyCandidates,
    #[error("k must be at least 1")]
    ZeroK,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown parent symbol `{0}`")]
    UnknownParent(String),
    #[error("symbol `{0}` already exists")]
    DuplicateSymbol(String),
    #[error("value {value} outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("empty sequence")]
    EmptySequence,
    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbol(String),
    #[error("sequence of length {len} is shorter than n = {n}")]
    SequenceShorterThanN { len: usize, n: usize },
    #[error("record has no key-value pairs")]
    EmptyRecord,
    #[error("set has no members")]
    EmptySet,
    #[error("non-finite input value")]
    NonFiniteInput,
    #[error("edge endpoint `{0}` is not a node")]
    UnknownEndpoint(String),
    #[error("self-loop on `{0}` is not supported for this domain")]
    SelfLoopUnsupported(String),
    #[error("graph has no edges")]
    EmptyEdgeList,

    #[error("training data contains a single class")]
    SingleClass,
    #[error("class `{0}` has no examples")]
    EmptyClass(String),
    #[error("label `{0}` is not a model class")]
    UnknownLabel(String),

    #[error("label `{0}` already stored")]
    DuplicateLabel(String),
    #[error("memory is empty")]
    EmptyMemory,

    #[error("not a hypervector container (bad magic)")]
    BadMagic,
    #[error("unsupported container version {found} (supported: {supported})")]
    VersionMismatch { found: u16, supported: u16 },
    #[error("container kind mismatch: expected {expected}, found {found}")]
    KindMismatch { expected: String, found: String },
    #[error("container checksum mismatch (stored {stored:#010x}, computed {computed:#010x})")]
    ChecksumMismatch { stored: u32, computed: u32 },
    #[error("corrupt container: {0}")]
    CorruptContainer(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
