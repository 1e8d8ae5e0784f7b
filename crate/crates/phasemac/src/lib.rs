//! IO, file formats and experiment drivers on top of `phasemac-core`.

pub mod config;
pub mod experiments;
pub mod idx;
pub mod metrics;
pub mod model_io;
pub mod outputs;
pub mod synth;
