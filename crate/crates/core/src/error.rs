use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("inv not involution at dart {0}")]
    NotInvolution(usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph is not tetravalent")]
    NotTetravalent,
    #[error("group is not edge-transitive on the graph")]
    NotEdgeTransitive,
    #[error("graph has semiedges")]
    Semiedges,
}

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("not a permutation: {0}")]
    NotPermutation(String),
    #[error("element is not in the group")]
    NotMember,
    #[error("group order {0} overflows")]
    Overflow(String),
    #[error("declared order {declared} but computed {computed}")]
    OrderMismatch { declared: u128, computed: u128 },
    #[error("derived series exceeded depth {0}")]
    DerivedDepth(usize),
}

#[derive(Debug, Error)]
pub enum CoverError {
    #[error("group does not act on the graph: {0}")]
    Incompatible(String),
    #[error("projection is not a covering")]
    NotCovering,
    #[error("projections do not compose: {0}")]
    Mismatch(String),
    #[error("voltages span dimension {span} of {dim}; cover is disconnected")]
    DeficientSpan { span: usize, dim: usize },
    #[error("voltage assignment invalid: {0}")]
    InvalidVoltage(String),
    #[error("kernel is not invariant under generator {0}")]
    NotInvariant(usize),
    #[error("kernel has codimension 0")]
    TrivialQuotient,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ParseError {
    pub(crate) fn at(line: usize, msg: impl Into<String>) -> Self {
        ParseError::Line {
            line,
            msg: msg.into(),
        }
    }
}
