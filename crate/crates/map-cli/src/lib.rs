//! IO, persistence, and command plumbing behind the `map` binary,
//! exposed as a library so integration tests can drive the same paths.

pub mod error;
pub mod io;
pub mod model;
pub mod pipeline;
pub mod report;
