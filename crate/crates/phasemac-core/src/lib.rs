//! Behavioral model of a phase-domain MAC built from gated ring oscillators,
//! plus the energy accounting and the quantized fully-connected runtime that
//! sit on top of it.
//!
//! The crate is `no_std`-compatible (`alloc` required): everything in here is
//! deterministic integer/float arithmetic with no IO. File formats, dataset
//! generation and the CLI live in the companion `phasemac` crate.
//!
//! Layering, bottom up:
//!
//! - [`gro`] — a single gated ring oscillator: phase accumulation, wrap
//!   counting, phase-code encode/decode.
//! - [`pmac`] — one signed 8-bit MAC unit made of four GROs (positive/negative
//!   pairs, each split into a 3b-MSB and a 4b-LSB oscillator).
//! - [`array`] — matrix-vector and batched matrix-matrix products over MAC
//!   units, with weight-broadcast accounting into an [`array::EnergyLedger`].
//! - [`energy`] — converts ledger counts into energy and reproduces the
//!   batch-size memory/compute tradeoff and the DMAC comparison.
//! - [`nn`] — symmetric int8 quantization, FC forward pass with pluggable MAC
//!   backend, a small SGD trainer, and autoencoder anomaly scoring.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod array;
pub mod energy;
pub mod gro;
pub mod math;
pub mod nn;
pub mod pmac;
pub mod rng;

pub use array::{EnergyLedger, Int8Matrix, PmacArray, WideMatrix};
pub use energy::EnergyParams;
pub use gro::{GroState, PhaseCode};
pub use pmac::{PmacConfig, PmacUnit, SignMag};
pub use rng::SplitMix64;
