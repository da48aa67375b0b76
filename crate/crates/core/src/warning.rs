//! Structured warnings surfaced into run manifests.
//!
//! Anomalies that the pipeline repairs deterministically (fabricated traits,
//! over-long descriptions, empty profiles) are reported here instead of
//! failing the run.

use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};

/// Pipeline phase a warning originated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Describe,
    Extract,
    Group,
    Synthesize,
    Validate,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Phase::Describe => "describe",
            Phase::Extract => "extract",
            Phase::Group => "group",
            Phase::Synthesize => "synthesize",
            Phase::Validate => "validate",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarningCode {
    /// A generated description exceeded the requested sentence budget.
    DescriptionLength,
    /// The grouper returned a trait string that matches no input record.
    FabricatedTrait,
    /// The grouper assigned one trait record to more than one group.
    DuplicateAssignment,
    /// An input record was missing from the grouper output and became a
    /// singleton group.
    SingletonGroup,
    /// No group met the consistency threshold.
    EmptyProfile,
    /// A group fell below the threshold and was excluded from the profile.
    InconsistentGroup,
    /// A character was skipped during identification (empty profile).
    SkippedIdentification,
}

/// One manifest warning entry.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Warning {
    pub phase: Phase,
    pub character: Option<String>,
    pub code: WarningCode,
    pub message: String,
}

impl Warning {
    pub fn new(
        phase: Phase,
        character: impl Into<Option<String>>,
        code: WarningCode,
        message: impl Into<String>,
    ) -> Self {
        Self {
            phase,
            character: character.into(),
            code,
            message: message.into(),
        }
    }
}
