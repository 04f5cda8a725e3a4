pub mod comma;
pub mod corpus;
pub mod error;
pub mod fincat;
pub mod kan;
pub mod oracles;
pub mod par;
pub mod setval;
pub mod theory;

pub use error::{Error, Result};
