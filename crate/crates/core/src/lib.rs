//! Cohomology of line bundles on flag ind-varieties of diagonal ind-groups.

pub mod bbw;
pub mod borel;
pub mod cli;
pub mod diagsys;
pub mod error;
pub mod oracle;
pub mod report;
pub mod rootdata;
pub mod scenario;
pub mod weights;
pub mod weyl_limit;

pub use error::{Error, Result};
