//! Cooperative diversity for relay networks: perfect space-time codes, relay
//! strategies, exhaustive ML decoding and diversity-multiplexing analysis.
//!
//! The crate is split the way a link-level experiment flows:
//!
//! - [`codes`] builds constellations, perfect-code generators and codebooks.
//! - [`channel`] draws fading and noise and exposes the equivalent channels.
//! - [`strategies`] runs one frame of a relay protocol and hands back a
//!   transcript holding the destination's equivalent model.
//! - [`decoding`] is the ML decoder over that model.
//! - [`analysis`] has exact D-MG curves and the Monte Carlo harness.

pub mod analysis;
pub mod channel;
pub mod codes;
pub mod decoding;
mod error;
pub mod linalg;
pub mod strategies;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
