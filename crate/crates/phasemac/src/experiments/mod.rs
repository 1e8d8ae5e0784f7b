//! The experiment suites behind each CLI subcommand.

pub mod anomaly;
pub mod energy;
pub mod mnist;
pub mod oracle;
pub mod report;
