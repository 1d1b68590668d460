use texharm_core::CoreError;

#[derive(Debug, thiserror::Error)]
pub enum RadiomicsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl RadiomicsError {
    /// True for ROI problems (empty, single pixel, constant, no neighbor pairs).
    pub fn is_degenerate(&self) -> bool {
        matches!(self, RadiomicsError::Core(CoreError::DegenerateRoi(_)))
    }
}

pub(crate) fn degenerate(reason: impl Into<String>) -> RadiomicsError {
    RadiomicsError::Core(CoreError::DegenerateRoi(reason.into()))
}
