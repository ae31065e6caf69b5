pub mod cli;
pub mod error;
pub mod inequalities;
pub mod profiles;
pub mod quad;
pub mod rearrange;
pub mod report;
pub mod spaces;
pub mod suites;
pub mod weights;

pub use error::{Error, Result};
