use std::time::Duration;

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("failed to spawn engine {path:?}: {source}")]
    SpawnFailed {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("handshake timed out waiting for {0:?}")]
    HandshakeTimeout(String),
    #[error("engine declares no option named {0:?}")]
    UnsupportedOption(String),
    #[error("engine process ended unexpectedly ({0})")]
    EngineCrashed(String),
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("engine played illegal move {notation:?} at {fen}")]
    IllegalBestMove { notation: String, fen: String },
    #[error("engine exceeded its budget plus grace period ({0:?})")]
    Timeout(Duration),
    #[error("i/o failure talking to engine: {0}")]
    Io(#[from] std::io::Error),
}
