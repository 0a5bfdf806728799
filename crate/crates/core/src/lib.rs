// SPDX-License-Identifier: Apache-2.0

//! Ultralightweight RFID mutual authentication: SASI, Gossamer and Modified
//! Gossamer, a deterministic session simulator with fault injection, a
//! reader-side record store, and passive attacks that work from
//! eavesdropped transcripts.

pub mod attacks;
pub mod cost;
pub mod gossamer;
pub mod protocol;
pub mod sasi;
pub mod simulator;
pub mod state;
pub mod store;
pub mod word96;

pub use protocol::Protocol;
pub use word96::{Word96, PI};
