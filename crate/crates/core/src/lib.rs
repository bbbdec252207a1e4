pub mod capacity;
pub mod channel;
pub mod error;
pub mod gram;
pub mod iapr;
pub mod numerics;
pub mod pulse;

pub use error::{FtnError, Result};
