use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse number {0:?}")]
pub struct ParseNumberError(pub String);

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("distance matrix is not square or does not match the {labels} labels")]
    ShapeMismatch { labels: usize },
    #[error("space must contain at least one point")]
    EmptySpace,
    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),
    #[error("d({i},{j}) != d({j},{i})")]
    AsymmetricMatrix { i: String, j: String },
    #[error("negative distance d({i},{j})")]
    NegativeDistance { i: String, j: String },
    #[error("zero distance between distinct points {i} and {j}")]
    ZeroOffDiagonal { i: String, j: String },
    #[error("nonzero diagonal entry d({0},{0})")]
    NonzeroDiagonal(String),
    #[error("triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")]
    TriangleViolation { i: String, j: String, k: String },
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("the two points coincide ({0})")]
    SamePoint(String),
    #[error("coefficients sum to {0}, not zero")]
    NotAMolecule(String),
    #[error("edge set contains both an edge and its opposite")]
    OppositePairPresent,
    #[error("cycle enumeration cap of {cap} cycles exceeded")]
    CapExceeded { cap: usize },
    #[error("cycle list is incomplete (enumeration caps were hit)")]
    IncompleteCycleList,
    #[error("edge subset is not a proper subset of the edge set")]
    NotProperSubset,
    #[error("graph is not 2-connected")]
    GraphNot2Connected,
    #[error("graph is not 3-connected")]
    Not3Connected,
    #[error("edge bijection does not preserve simple cycles")]
    NotCyclePreserving,
    #[error("no consistent vertex map: {0}")]
    NoConsistentVertexMap(String),
    #[error("invalid edge bijection: {0}")]
    InvalidBijection(String),
    #[error("edge bijection does not satisfy the isometry conditions")]
    ConditionsNotVerified,
    #[error("molecule support leaves the extreme-molecule vertex set")]
    SupportOutsideVext,
    #[error("space is not weak Prague")]
    NotWeakPrague,
    #[error("search cap of {cap} nodes exceeded")]
    SearchCapExceeded { cap: u64 },
    #[error("graph is not connected")]
    NotConnected,
    #[error("graph has a single edge component")]
    SingleComponent,
    #[error("graph must be unweighted for this operation")]
    WeightedGraph,
    #[error("invalid exponent p = {0}; need p >= 1")]
    InvalidP(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Parse(#[from] ParseNumberError),
    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    /// Cap exhaustion is reported separately from validation failures.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            Error::CapExceeded { .. } | Error::SearchCapExceeded { .. } | Error::IncompleteCycleList
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
