use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("not found: {0}")]
    NotFound(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::Error::InvalidInput(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;
