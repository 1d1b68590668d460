use texharm_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("kernel of size {kernel} does not fit the padded {padded_w}x{padded_h} input")]
    KernelTooLarge {
        kernel: usize,
        padded_w: usize,
        padded_h: usize,
    },

    #[error("kernel has {len} weights, which is not {size}x{size}")]
    KernelShape { len: usize, size: usize },

    #[error("invalid filter configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Core(#[from] CoreError),
}
