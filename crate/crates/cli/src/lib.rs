//! Command-line front end of `slopekit`: spec loading, report rendering and
//! the seeded verification suite.

pub mod analyze;
pub mod catalog;
pub mod error;
pub mod render;
pub mod spec;
pub mod verify;
