use thiserror::Error;

/// Errors surfaced by the library. Witness data is kept concrete so that a
/// failure can be reproduced without rerunning the computation that found it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not a group: {reason} (witness {witness:?})")]
    NotAGroup {
        reason: String,
        witness: Option<(u32, u32, u32)>,
    },

    #[error("subgroup is not normal: conjugating {element} by {conjugator} leaves the subgroup")]
    NotNormal { conjugator: u32, element: u32 },

    #[error("map is not a homomorphism: fails on the pair ({0}, {1})")]
    NotAHomomorphism(u32, u32),

    #[error("group of order {order} is not a p-group")]
    NotAPGroup { order: u64 },

    #[error("coset enumeration exceeded the limit of {max_cosets} cosets")]
    Overflow { max_cosets: usize },

    #[error("permutation image exceeds the element cap of {cap}")]
    ElementCapExceeded { cap: usize },

    #[error("embedding of {copy} into the enumerated image is not injective")]
    EmbeddingNotInjective { copy: &'static str },

    #[error("transversal is invalid: {0}")]
    BadTransversal(String),

    #[error("enumerated order {got} does not match the expected order {expected}: {context}")]
    OrderMismatch {
        expected: u64,
        got: u64,
        context: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal assertion failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Overflow { .. } | Error::ElementCapExceeded { .. } => 2,
            Error::InvalidInput(_)
            | Error::NotAGroup { .. }
            | Error::BadTransversal(_)
            | Error::NotAPGroup { .. } => 3,
            _ => 4,
        }
    }
}
