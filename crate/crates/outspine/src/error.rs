use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("letter index {index} out of range for rank {rank}")]
    LetterOutOfRange { index: u32, rank: usize },
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("trivial word or class where a nontrivial one is required")]
    Trivial,
    #[error("graph is a circle and has no natural structure")]
    Circle,
    #[error("edge set contains a cycle")]
    CyclicForest,
    #[error("path is not valid in the graph: {0}")]
    BadPath(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("class is conjugate into the subgroup B")]
    ConjugateIntoB,
    #[error("ray endpoint lies in the boundary of the vertex group")]
    RayInVertexGroup,
    #[error("audit invariant violated: {0}")]
    Invariant(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::LetterOutOfRange { .. } => "letter-out-of-range",
            Error::RankMismatch { .. } => "rank-mismatch",
            Error::Trivial => "trivial",
            Error::Circle => "circle",
            Error::CyclicForest => "cyclic-forest",
            Error::BadPath(_) => "bad-path",
            Error::Precondition(_) => "precondition",
            Error::ConjugateIntoB => "conjugate-into-b",
            Error::RayInVertexGroup => "ray-in-vertex-group",
            Error::Invariant(_) => "invariant",
            Error::Parse(_) => "parse",
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
