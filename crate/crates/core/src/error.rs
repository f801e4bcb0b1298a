use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("assignment is not total: element `{0}` unassigned")]
    PartialAssignment(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("input too large: {0}")]
    TooLarge(String),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("invalid tree decomposition: {0}")]
    InvalidTreeDecomposition(String),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("invalid flow: {0}")]
    InvalidFlow(String),
    #[error("linear program infeasible: {0}")]
    Infeasible(String),
    #[error("query structure is disconnected")]
    DisconnectedQuery,
    #[error("query structure has an empty universe")]
    EmptyQuery,
    #[error("circuit is not deterministic")]
    NotDeterministic,
    #[error("no domain given for variable `{0}`")]
    MissingDomain(String),
    #[error("variables outside the function domain: {0}")]
    BadScope(String),
    #[error("weight function violates f({{a}}) <= 2f(A)/3 at `{0}`")]
    WeightViolation(String),
    #[error("bad clique partition: {0}")]
    BadPartition(String),
    #[error("gave up after {0} attempts")]
    RetriesExhausted(usize),
    #[error("data structure is not coordinate respecting: {0}")]
    NotCoordinateRespecting(String),
    #[error("data structure is not order respecting: {0}")]
    NotOrderRespecting(String),
    #[error("data structure is not reduced: {0}")]
    NotReduced(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
