//! Multiplicative domains of completely positive maps, finite-dimensional
//! C*-algebra structure recovery and subsystem-code correction checks.

pub mod algebra;
pub mod channel;
pub mod error;
pub mod io;
pub mod multdom;
pub mod numerics;
pub mod qec;
pub mod random;
pub mod representation;

pub use error::{Error, Result};
