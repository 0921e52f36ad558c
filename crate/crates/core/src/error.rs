use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid cyclic factor {0}: factors must be prime powers >= 2")]
    InvalidFactor(u64),

    #[error("{what} too large: {size} exceeds the configured bound {bound}")]
    TooLarge {
        what: &'static str,
        size: u128,
        bound: u128,
    },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("group is not soluble: derived series stabilizes at order {0}")]
    Insoluble(u64),

    #[error("element is not a member of the ambient group")]
    NotMember,

    #[error("orbit size exceeded the cap of {0} (set HOLOBRACE_MAX_ORBIT to raise it)")]
    OrbitOverflow(usize),

    #[error("invalid normal series: {0}")]
    InvalidSeries(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("series fingerprint mismatch: shard has {found}, context has {expected}")]
    FingerprintMismatch { expected: String, found: String },

    #[error("shard header mismatch: {0}")]
    HeaderMismatch(String),

    #[error("brace axiom violated at x={x}, y={y}, z={z}")]
    BraceAxiom { x: usize, y: usize, z: usize },

    #[error("subgroup is not regular")]
    NotRegular,

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
