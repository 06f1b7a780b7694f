use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    /// A scripted strategy could not match its next directive.
    #[error("strategy: {0}")]
    Strategy(String),
    /// A trace rewrite could not be completed.
    #[error("trace rewrite: {0}")]
    Rewrite(String),
}
