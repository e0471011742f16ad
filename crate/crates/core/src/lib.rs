//! End-to-end error correction for networks carrying worst-case bit-flip
//! noise: the channel model Y = T X + T-hat Z over GF(2), the transform
//! (coset-leader) metric it induces, rate bounds, Gilbert-Varshamov-style
//! codebook constructions with minimum-distance decoding, and concatenated
//! Reed-Solomon/GV codes with generalized minimum distance decoding.

pub mod algebra;
pub mod bounds;
pub mod concat;
pub mod error;
pub mod gvcodes;
pub mod metric;
pub mod network;

pub use error::{Error, Result};
