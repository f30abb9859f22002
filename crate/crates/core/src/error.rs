use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty point cloud")]
    EmptyCloud,
    #[error("non-finite coordinate at point {0}")]
    NonFinite(usize),
    #[error("degenerate cloud: zero extent")]
    ZeroExtent,
    #[error("invalid rotation: {0}")]
    InvalidRotation(String),
    #[error("k must be < n (k = {k}, n = {n})")]
    KTooLarge { k: usize, n: usize },
    #[error("invalid count: {0}")]
    InvalidCount(String),
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error("shape mismatch at {node}: {detail}")]
    Shape { node: String, detail: String },
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("unsupported order {0}")]
    UnsupportedOrder(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("bad magic")]
    BadMagic,
    #[error("format error: {0}")]
    Format(String),
    #[error("invalid config field `{field}`: {msg}")]
    Config { field: String, msg: String },
    #[error("unknown shape kind `{0}`")]
    UnknownShape(String),
    #[error("zero total surface area")]
    ZeroArea,
    #[error("empty split: {0}")]
    EmptySplit(String),
    #[error("missing parameter `{0}`")]
    MissingParam(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config { field: field.into(), msg: msg.into() }
    }

    pub(crate) fn shape(node: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Shape { node: node.into(), detail: detail.into() }
    }
}
