use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The exact 64-bit table only exists for `n <= 24`.
    #[error("exact tables are limited to n <= {max} (got n = {n}); use residue mode instead")]
    ExactModeRange { n: u32, max: u32 },

    #[error("{what} is limited to n <= {max} (got n = {n})")]
    ResourceLimit { what: &'static str, n: u32, max: u32 },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{0} is not an odd prime power")]
    NotOddPrimePower(u64),

    #[error("{a} and {b} are not coprime")]
    NotCoprime { a: u64, b: u64 },

    #[error("mismatched moduli: {0} and {1}")]
    ModulusMismatch(u64, u64),

    #[error("quasi-symmetric product exceeded the cap of {cap} stored terms")]
    TermCap { cap: usize },

    #[error("witness search for n = {n} needs {candidates} candidate divisors (cap {cap})")]
    SearchTooLarge { n: u64, candidates: u128, cap: usize },

    #[error("not a cd-polynomial: {0}")]
    NotCdPolynomial(String),

    #[error("bad cache file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors that stem from a size ceiling rather than bad input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::ExactModeRange { .. }
                | Error::ResourceLimit { .. }
                | Error::TermCap { .. }
                | Error::SearchTooLarge { .. }
        )
    }
}
