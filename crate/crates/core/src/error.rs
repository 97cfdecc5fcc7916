use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("series must contain at least one time step and one dimension")]
    EmptySeries,

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("series of lengths {len_x} and {len_y} are too long for exhaustive enumeration (max {max})")]
    TooLongForEnumeration { len_x: usize, len_y: usize, max: usize },

    #[error("invalid alignment path: {0}")]
    InvalidPath(String),

    #[error("invalid pose sequence: {0}")]
    InvalidPose(String),

    #[error("invalid limb group map: {0}")]
    InvalidGroupMap(String),

    #[error("unknown limb group `{0}`")]
    UnknownGroup(String),

    #[error("expected a flattened x/y series with {expected} columns, got {actual}")]
    AxisUnavailable { expected: usize, actual: usize },

    #[error("control cohort is empty")]
    EmptyCohort,

    #[error("baseline has no entry for ({group}, {axis})")]
    MissingBaseline { group: String, axis: String },

    #[error("invalid squat parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{}: parse error: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    #[error("{}: schema violation{}: {message}", path.display(), frame.map(|f| format!(" in frame {f}")).unwrap_or_default())]
    Schema {
        path: PathBuf,
        frame: Option<usize>,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
