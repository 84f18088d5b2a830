//! Library half of the `actnet` binary: the JSON document format and the
//! key=value defaults file. Split out so tests can exercise both without
//! spawning the binary.

pub mod config;
pub mod document;
