use thiserror::Error;

/// Errors shared across the crate. Every fallible public operation returns
/// one of these rather than panicking.
#[derive(Debug, Error)]
pub enum Error {
    #[error("register holds {0} qubits, the dense simulator is capped at {max}", max = crate::MAX_QUBITS)]
    TooManyQubits(usize),

    #[error("register must hold at least one qubit")]
    EmptyRegister,

    #[error("duplicate qubit label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown qubit label `{0}`")]
    UnknownLabel(String),

    #[error("two-qubit operation addresses qubit `{0}` twice")]
    SameQubit(String),

    #[error("states live on different registers")]
    RegisterMismatch,

    #[error("expected {expected} amplitudes for this register, got {actual}")]
    WrongAmplitudeCount { expected: usize, actual: usize },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("operator acts on {operator} qubits but the state holds {state}")]
    LengthMismatch { operator: usize, state: usize },

    #[error("matrix is not unitary within tolerance")]
    NotUnitary,

    #[error("classical condition references `{0}` before any step binds it")]
    UnboundOutcomeBit(String),

    #[error("outcome bit `{0}` is bound more than once")]
    DuplicateOutcomeBit(String),

    #[error("qubit `{0}` is not in a definite computational basis state")]
    QubitNotDefinite(String),

    #[error("state does not factor across the requested partition")]
    NotProductState,

    #[error("cannot parse classical bit expression: {0}")]
    ExprParse(String),

    #[error("{what} = {value} is outside the supported range {min}..={max}")]
    SizeOutOfRange {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("graph vertex {vertex} is out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("graph edge ({0}, {1}) is invalid")]
    BadEdge(usize, usize),

    #[error("fusion requires ({0}, {1}) to be a non-edge of the graph")]
    EdgePresent(usize, usize),

    #[error("outcome relabeling is invalid: {0}")]
    BadRelabel(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid JSON input: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
