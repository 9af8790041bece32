use thiserror::Error;

/// Errors raised anywhere in the attribution pipeline.
///
/// The variants are grouped so the CLI can map them onto its exit codes:
/// graph/validation problems, oracle (game) failures, and estimator failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph contains a directed cycle through `{0}`")]
    Cyclic(String),

    #[error("target node `{0}` must not have outgoing edges")]
    TargetHasChildren(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("duplicate node name `{0}`")]
    DuplicateNode(String),

    #[error("too many players: {0} (at most 64 are supported)")]
    TooManyPlayers(usize),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("player index {index} out of range for {players} players")]
    PlayerOutOfRange { index: usize, players: usize },

    #[error("query node sets overlap")]
    OverlappingQuery,

    #[error("budget must be at least 1")]
    ZeroBudget,

    #[error("sampling multiplier must be at least 1")]
    ZeroMultiplier,

    #[error("brute force is limited to {limit} players, got {players}")]
    BruteForceTooLarge { players: usize, limit: usize },

    #[error("interaction order {order} must lie in 1..={players}")]
    InvalidOrder { order: usize, players: usize },

    #[error("table game has no value for coalition {0}")]
    MissingEntry(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid weighting scheme: {0}")]
    InvalidScheme(String),

    #[error("no classes to sample from")]
    EmptyClassList,

    #[error("under-determined batch: {0}")]
    UnderDetermined(String),

    #[error("unknown base estimator `{0}`")]
    UnknownBase(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures that originate in the value function rather than in
    /// the graph or configuration.
    pub fn is_oracle_error(&self) -> bool {
        matches!(self, Error::MissingEntry(_) | Error::InvalidGame(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
