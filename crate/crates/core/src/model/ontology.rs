//! Element kinds, relations and the table of admissible links.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

macro_rules! named_enum {
    ($(#[$meta:meta])* $name:ident, $err:literal { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(format!(concat!("unknown ", $err, " `{}`"), other)),
                }
            }
        }
    };
}

named_enum!(ElementKind, "element kind" {
    Stakeholder => "Stakeholder",
    StakeholderConcern => "StakeholderConcern",
    StakeholderRequirement => "StakeholderRequirement",
    InteractingSystem => "InteractingSystem",
    UseCase => "UseCase",
    ApplicationScenario => "ApplicationScenario",
    ValidationConcern => "ValidationConcern",
    ValidationGoal => "ValidationGoal",
    TestScenario => "TestScenario",
    Test => "Test",
    TestCase => "TestCase",
    TestEnvironment => "TestEnvironment",
    TestEnvironmentObject => "TestEnvironmentObject",
    TestResult => "TestResult",
    SystemRequirement => "SystemRequirement",
    Function => "Function",
    LogicalElement => "LogicalElement",
});

named_enum!(Relation, "relation" {
    DerivesFrom => "derives-from",
    Addresses => "addresses",
    Refines => "refines",
    ComposedOf => "composed-of",
    LinkedTo => "linked-to",
    Validates => "validates",
    ExecutedOn => "executed-on",
    ResultsIn => "results-in",
    DependsOn => "depends-on",
});

use ElementKind::*;
use Relation::*;

/// Every admissible `(source kind, relation, target kind)` triple. Anything
/// not listed is rejected.
pub const ADJACENCY: &[(ElementKind, Relation, ElementKind)] = &[
    // problem space
    (StakeholderConcern, DerivesFrom, Stakeholder),
    (StakeholderRequirement, DerivesFrom, StakeholderConcern),
    (StakeholderRequirement, DerivesFrom, Stakeholder),
    (UseCase, DerivesFrom, Stakeholder),
    (UseCase, DerivesFrom, InteractingSystem),
    (UseCase, DerivesFrom, StakeholderConcern),
    (ApplicationScenario, Refines, UseCase),
    (StakeholderRequirement, LinkedTo, ApplicationScenario),
    (StakeholderRequirement, LinkedTo, UseCase),
    // validation system
    (ValidationConcern, Addresses, ApplicationScenario),
    (ValidationConcern, Addresses, StakeholderRequirement),
    (ValidationConcern, Addresses, SystemRequirement),
    (ValidationConcern, Addresses, Function),
    (ValidationConcern, Addresses, UseCase),
    (ValidationGoal, DerivesFrom, ValidationConcern),
    (ValidationGoal, DependsOn, ValidationGoal),
    (TestScenario, Validates, ValidationGoal),
    (TestScenario, ComposedOf, TestCase),
    (Test, ComposedOf, TestEnvironment),
    (Test, ComposedOf, TestCase),
    (Test, Validates, StakeholderRequirement),
    (TestCase, DerivesFrom, StakeholderRequirement),
    (TestCase, ResultsIn, TestResult),
    (TestResult, ExecutedOn, TestEnvironment),
    (TestEnvironment, ComposedOf, TestEnvironmentObject),
    (TestEnvironmentObject, DerivesFrom, LogicalElement),
    (TestEnvironmentObject, DerivesFrom, InteractingSystem),
    // product
    (SystemRequirement, DerivesFrom, StakeholderRequirement),
    (SystemRequirement, LinkedTo, TestCase),
    (Function, Refines, SystemRequirement),
    (LogicalElement, Refines, Function),
    (LogicalElement, ComposedOf, LogicalElement),
];

pub fn admissible(source: ElementKind, relation: Relation, target: ElementKind) -> bool {
    ADJACENCY.contains(&(source, relation, target))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for kind in ElementKind::ALL {
            assert_eq!(kind.as_str().parse::<ElementKind>().unwrap(), *kind);
        }
        for rel in Relation::ALL {
            assert_eq!(rel.as_str().parse::<Relation>().unwrap(), *rel);
        }
        assert_eq!(ElementKind::ALL.len(), 17);
        assert_eq!(Relation::ALL.len(), 9);
    }

    #[test]
    fn table_has_no_duplicates_and_uses_every_relation() {
        let mut seen = std::collections::HashSet::new();
        assert!(ADJACENCY.iter().all(|t| seen.insert(*t)));
        for rel in Relation::ALL {
            assert!(ADJACENCY.iter().any(|(_, r, _)| r == rel), "{rel} unused");
        }
    }

    #[test]
    fn sample_pairs() {
        assert!(admissible(ValidationGoal, DerivesFrom, ValidationConcern));
        assert!(!admissible(TestResult, DerivesFrom, UseCase));
        assert!(admissible(StakeholderRequirement, LinkedTo, ApplicationScenario));
    }
}
