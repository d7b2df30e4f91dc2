//! Builders and the verification harness behind the `semicross` binary.

pub mod catalog;
pub mod commands;
pub mod report;
pub mod suites;
