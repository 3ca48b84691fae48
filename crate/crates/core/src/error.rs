use thiserror::Error;

use crate::{FunctionId, LinkId, ServerId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // network validation
    #[error("network has no servers")]
    EmptyNetwork,
    #[error("ids must be dense and 0-based: {0}")]
    NonDenseIds(String),
    #[error("server {server} is not reachable from server 0")]
    Disconnected { server: ServerId },
    #[error("non-positive or non-finite parameter: {0}")]
    NonPositiveParameter(String),
    #[error("link {link} is a self-loop on server {server}")]
    SelfLoop { link: LinkId, server: ServerId },
    #[error("link {link} duplicates an existing link between servers {u} and {v}")]
    DuplicateLink {
        link: LinkId,
        u: ServerId,
        v: ServerId,
    },
    #[error("link {link} references unknown server {server}")]
    UnknownServer { link: LinkId, server: ServerId },

    // dag validation
    #[error("dag has no functions")]
    EmptyDag,
    #[error("cycle detected: {cycle:?}")]
    CycleDetected { cycle: Vec<FunctionId> },
    #[error("edge {src}->{dst} violates the stored topological order")]
    OrderViolation { src: FunctionId, dst: FunctionId },
    #[error("edge {src}->{dst} must carry a positive, finite number of bits")]
    NonPositiveStream { src: FunctionId, dst: FunctionId },
    #[error("function {function} has negative or non-finite flops")]
    InvalidFlops { function: FunctionId },
    #[error("edge {src}->{dst} references an unknown function")]
    UnknownFunction { src: FunctionId, dst: FunctionId },
    #[error("edge {src}->{dst} is a self-loop")]
    SelfEdge { src: FunctionId, dst: FunctionId },
    #[error("duplicate edge {src}->{dst}")]
    DuplicateEdge { src: FunctionId, dst: FunctionId },
    #[error("destination function {function} has no output size")]
    MissingOutputSize { function: FunctionId },
    #[error("output size given for function {function}, which is not a destination")]
    UnexpectedOutputSize { function: FunctionId },
    #[error("dag already carries a dummy tail (function {function})")]
    AlreadyAugmented { function: FunctionId },
    #[error("entry function {function} is not in the leading block of the topological order")]
    EntriesNotLeading { function: FunctionId },
    #[error("ready-time vector has {got} entries, network has {expected} servers")]
    ReadyLength { expected: usize, got: usize },

    // path enumeration
    #[error("source and destination are the same server ({0}); co-located streams have no path")]
    SamePair(ServerId),
    #[error("server {0} is not in the network")]
    NoSuchServer(ServerId),
    #[error("path enumeration exceeded the cap of {cap} stored paths")]
    PathExplosion { cap: usize },

    // splitting
    #[error("invalid split problem: {0}")]
    InvalidSplitProblem(String),

    // embedding
    #[error("function {0} is not an entry function")]
    NotEntry(FunctionId),
    #[error("predecessor {0} has neither finish times nor a committed placement")]
    UnpopulatedPredecessor(FunctionId),
    #[error("no edge {src}->{dst} in the dag")]
    NoSuchEdge { src: FunctionId, dst: FunctionId },
    #[error("brute force would enumerate {placements} placements (limit {limit})")]
    TooLarge { placements: f64, limit: f64 },

    // workload / harness
    #[error("invalid workload spec: {0}")]
    InvalidSpec(String),
    #[error("no connected network after {attempts} attempts")]
    ConnectivityUnreachable { attempts: usize },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("record {index}: {source}")]
    Record {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("no algorithms selected")]
    NoAlgorithms,
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors raised by input validation (as opposed to resource
    /// limits or I/O).
    pub fn is_validation(&self) -> bool {
        match self {
            Error::PathExplosion { .. } | Error::Io(_) | Error::TooLarge { .. } => false,
            Error::Record { source, .. } => source.is_validation(),
            _ => true,
        }
    }

    pub fn is_path_explosion(&self) -> bool {
        match self {
            Error::PathExplosion { .. } => true,
            Error::Record { source, .. } => source.is_path_explosion(),
            _ => false,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}
