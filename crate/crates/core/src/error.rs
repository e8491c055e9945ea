use thiserror::Error;

use crate::expr::ExprError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("field is not spacelike (max |Du| = {max_grad})")]
    NonSpacelike { max_grad: f64 },

    #[error("gradient vanishes; level-curve curvature is undefined")]
    VanishingGradient,

    #[error("parse error at line {line}, offset {offset}: {msg}")]
    Parse {
        line: usize,
        offset: usize,
        msg: String,
    },

    #[error(transparent)]
    Expr(#[from] ExprError),

    #[error("expression fault at node ({i}, {j}): {source}")]
    Sample {
        i: usize,
        j: usize,
        #[source]
        source: ExprError,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
