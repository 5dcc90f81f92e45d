use thiserror::Error;

/// Failures raised anywhere in the measurement pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("band gap closed at k = ({kx}, {ky}): E+ = {energy:e}")]
    GapClosed { kx: f64, ky: f64, energy: f64 },

    #[error("gate {0} cannot be lowered to the {{U3, CNOT}} basis")]
    UnsupportedGate(String),

    #[error("gate {0} must be transpiled before a noisy run")]
    UntranspiledCircuit(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("link overlap at mesh ({i}, {j}) direction {direction} has modulus {modulus:.4} below the floor")]
    DegenerateLink {
        i: usize,
        j: usize,
        direction: char,
        modulus: f64,
    },

    #[error("missing link overlap at mesh ({i}, {j}) direction {direction}")]
    MissingLink { i: usize, j: usize, direction: char },

    #[error("sum {value:.6} is not within tolerance of an integer{}", at.map(|(i, j)| format!(" at plaquette ({i}, {j})")).unwrap_or_default())]
    NotQuantized {
        value: f64,
        at: Option<(usize, usize)>,
    },

    #[error("winding increment {increment:.4} at row {row} is too close to the branch cut")]
    AmbiguousWinding { row: usize, increment: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("overlap CSV: {0}")]
    Csv(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
