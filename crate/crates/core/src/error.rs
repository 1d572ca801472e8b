use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("degenerate spectrum: eigenvalues {i} and {j} differ by {gap:e}")]
    DegenerateSpectrum { i: usize, j: usize, gap: f64 },
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("expected a rank-one matrix, found rank {0}")]
    RankNotOne(usize),
    #[error("coincident {what} at indices {i} and {j}")]
    Coincident { what: &'static str, i: usize, j: usize },
    #[error("pole condition violated for pair ({i}, {j})")]
    PoleCondition { i: usize, j: usize },
    #[error("{0} must be nonzero")]
    ZeroValue(&'static str),
    #[error("evaluation point coincides with pole {0}")]
    AtPole(usize),
    #[error("non-generic gauge: {0}")]
    Gauge(String),
    #[error("wrong model kind: expected {expected}, got {got}")]
    WrongKind { expected: String, got: String },
    #[error("Hamiltonian expansion does not reconstruct the Lax matrix (mismatch {0:e})")]
    InconsistentExpansion(f64),
    #[error("trajectory hit a collision at t = {t}")]
    Collision { t: f64 },
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
