use crate::graph::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("input contains no edge records")]
    EmptyInput,
    #[error("row {row}: edge weight must be strictly positive and finite")]
    NonPositiveWeight { row: usize },
    #[error("party `{0}` appears with two different party kinds")]
    ConflictingPartyKind(String),
    #[error("party `{0}` appears with two different company flags")]
    ConflictingCompanyFlag(String),
    #[error("row {row}: {message}")]
    InvalidRecord { row: usize, message: String },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("claim `{0}` has no filing time")]
    MissingFilingTime(String),
    #[error("unknown claim id `{0}`")]
    UnknownClaimId(String),
    #[error("neighborhood order {0} is not supported (expected 1..=4)")]
    UnsupportedOrder(usize),
    #[error("node {0} has zero degree")]
    ZeroDegree(NodeId),
    #[error("corrupt graph snapshot: {0}")]
    CorruptFile(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("graph has {nodes} nodes; the direct solver accepts at most {limit}")]
    TooLarge { nodes: usize, limit: usize },
    #[error("linear system is singular")]
    SingularSystem,
    #[error("class {class} has only {count} members")]
    DegenerateClass { class: u8, count: usize },
    #[error("need at least {required} minority rows, found {found}")]
    TooFewMinority { found: usize, required: usize },
    #[error("metric needs both classes present")]
    SingleClass,
    #[error("fold {fold} does not contain both classes")]
    DegenerateFold { fold: usize },
    #[error("train/test leakage: {} shared row id(s), first `{}`", .0.len(), .0[0])]
    Leakage(Vec<String>),
    #[error("model fit failed: {0}")]
    Fit(String),
    #[error("infeasible generator configuration: {0}")]
    InfeasibleConfig(String),
    #[error("no labeled claims in the target period")]
    NoLabeledClaims,
    #[error("cutoff {cutoff} is outside the data time range [{min}, {max})")]
    CutoffOutOfRange { cutoff: i64, min: i64, max: i64 },
    #[error("degenerate target: {0}")]
    DegenerateTarget(String),
    #[error("temporal leakage: {0}")]
    TemporalLeakage(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    /// Configuration problems, as opposed to problems with the data itself.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_) | Error::InfeasibleConfig(_) | Error::Toml(_) | Error::CutoffOutOfRange { .. }
        )
    }
}
