pub mod atoms;
pub mod beams;
pub mod cli;
pub mod error;
pub mod ode;
pub mod oracles;
pub mod profiles;
pub mod specfun;
pub mod twolevel;
pub mod units;

pub use error::{Error, Result};
