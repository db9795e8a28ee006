//! Monitored Clifford brickwork circuits, ZX-calculus simplification, and
//! the percolation analysis of the simplified networks.
pub mod circuit;
pub mod error;
pub mod gf2;
pub mod harness;
pub mod oracle;
pub mod percolation;
pub mod scaling;
pub mod seeds;
pub mod tableau;
pub mod zx;
pub use error::{Error, Result};
