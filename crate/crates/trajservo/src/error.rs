use thiserror::Error;

#[derive(Debug, Error)]
pub enum TsError {
    #[error("point has non-positive depth: {0}")]
    NonPositiveDepth(f64),
    #[error("non-positive stereo disparity: {0}")]
    NonPositiveDisparity(f64),
    #[error("empty feature set")]
    EmptyFeatureSet,
    #[error("invalid scene config: {0}")]
    InvalidSceneConfig(String),
    #[error("unknown template: {0}")]
    UnknownTemplate(String),
    #[error("invalid template params: {0}")]
    InvalidParams(String),
    #[error("time {t} outside segment window [{start}, {end}]")]
    OutOfSegmentWindow { t: f64, start: f64, end: f64 },
    #[error("feature starvation: {have} correspondences, need {need}")]
    FeatureStarvation { have: usize, need: usize },
    #[error("degenerate image jacobian: |L2|^2 = {0}")]
    DegenerateJacobian(f64),
    #[error("empty run log")]
    EmptyLog,
    #[error("insufficient samples: {0}")]
    InsufficientSamples(usize),
    #[error("config error: {0}")]
    ConfigError(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, TsError>;
