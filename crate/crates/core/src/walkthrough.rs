//! The bundled timer-charging project: requirements, a scenario
//! specification, acceptance tests and a fully linked model.

use crate::Timestamp;

pub const REQUIREMENTS: &str = include_str!("../fixtures/walkthrough/requirements.tsv");
pub const SPEC: &str = include_str!("../fixtures/walkthrough/spec.scn");
pub const TESTS: &str = include_str!("../fixtures/walkthrough/tests.scn");
pub const MODEL: &str = include_str!("../fixtures/walkthrough/model.json");

/// The fixed clock the bundled results were recorded with, 2026-01-01T00:00Z.
pub const NOW: Timestamp = Timestamp(1_767_225_600_000);

/// Project-relative file names the CLI uses for the files above.
pub const FILES: [(&str, &str); 4] = [
    ("requirements.tsv", REQUIREMENTS),
    ("spec.scn", SPEC),
    ("tests.scn", TESTS),
    ("model.json", MODEL),
];
