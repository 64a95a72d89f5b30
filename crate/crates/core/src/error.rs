use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u32, right: u32 },
    #[error("modulus {0} is out of range (need 2 <= n <= {max})", max = crate::mat2::MAX_MODULUS)]
    InvalidModulus(u64),
    #[error("matrix {0} is not invertible")]
    NotInvertible(String),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("invalid subgroup kind: {0}")]
    InvalidKind(String),
    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
    #[error("subgroup contains non-diagonal element {0}")]
    NotDiagonal(String),
    #[error("subgroup contains non-upper-triangular element {0}")]
    NotUpperTriangular(String),
    #[error("element set is not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("{what}: size {size} exceeds budget {limit}")]
    BudgetExceeded { what: String, size: u64, limit: u64 },
    #[error("C is not an index-two subgroup of N (|N| = {n_order}, |C| = {c_order})")]
    NotIndexTwo { n_order: usize, c_order: usize },
    #[error("corrupt cache entry {path}: {reason}")]
    CacheCorrupt { path: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
