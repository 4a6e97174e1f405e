//! Library surface of the verifier binary: cache format, check runner and
//! report types, shared by the CLI entry point and the integration tests.

pub mod cache;
pub mod checks;
pub mod report;
pub mod session;
