use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("arithmetic overflow in fixed-width integer")]
    Overflow,

    #[error("no real solution: radicand {0} is negative")]
    NoRealSolution(String),

    #[error("irrational solution: radicand {0} is not a perfect square")]
    Irrational(String),

    #[error("entry sum {0} is odd; the Lorentz image would not be integral")]
    OddSum(String),

    #[error("gcd of the zero quadruple is undefined")]
    ZeroQuadruple,

    #[error("{quad} is not a Descartes quadruple (defect {defect})")]
    NotDescartes { quad: String, defect: String },

    #[error("quadruple {0} has nonpositive entry sum; negate it first")]
    NonPositiveSum(String),

    #[error("{0} is not a root quadruple")]
    NotRoot(String),

    #[error("generator index {0} is out of range 1..=4")]
    BadGenerator(u8),

    #[error("word is not reduced: letter {letter} repeats at position {position}")]
    NotReduced { letter: u8, position: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("multiplicity census needs a bounded packing; {0} has no negative entry")]
    InfiniteMultiplicity(String),

    #[error("geometry for the unbounded packing {0} is not supported")]
    UnsupportedGeometry(String),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("operation requires a {expected} census")]
    WrongMode { expected: &'static str },

    #[error("search cap {cap} exhausted before every residue mod {modulus} was witnessed")]
    CapTooSmall { modulus: u64, cap: u64 },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// True for requests that are well formed but outside what the library
    /// supports (as opposed to malformed input).
    pub fn is_unsupported(&self) -> bool {
        matches!(
            self,
            Error::InfiniteMultiplicity(_) | Error::UnsupportedGeometry(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
