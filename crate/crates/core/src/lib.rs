//! Test-driven scenario specification toolkit.
//!
//! * [`engine`] executes scenario programs.
//! * [`dsl`] parses `.scn` scenario files into programs.
//! * [`harness`] runs test scenarios against specifications.
//! * [`ceg`] derives test cases from conditional requirement sentences.
//! * [`model`] stores the traceability model and derives views from it.
//! * [`diagram`] renders execution traces as sequence diagrams.
//! * [`walkthrough`] bundles a small timer-charging example project.

pub mod ceg;
pub mod diagram;
pub mod dsl;
pub mod engine;
pub mod harness;
pub mod model;
pub mod value;
pub mod walkthrough;

pub use value::{Timestamp, Value, ValueKind};
