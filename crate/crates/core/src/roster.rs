//! The character roster: who the pipeline profiles and which candidate
//! names are offered during reverse identification.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// One character under analysis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterSpec {
    pub name: String,
    /// Alternate spellings accepted during identification parsing.
    #[serde(default)]
    pub aliases: BTreeSet<String>,
}

impl CharacterSpec {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            aliases: BTreeSet::new(),
        }
    }

    pub fn with_aliases<I, S>(name: impl Into<String>, aliases: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            name: name.into(),
            aliases: aliases.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RosterError {
    #[error("roster is empty")]
    Empty,
    #[error("roster contains an empty character name")]
    EmptyName,
    #[error("duplicate character name '{0}'")]
    DuplicateName(String),
}

/// Check roster invariants: non-empty, unique non-empty names.
pub fn validate_roster(roster: &[CharacterSpec]) -> Result<(), RosterError> {
    if roster.is_empty() {
        return Err(RosterError::Empty);
    }
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    for character in roster {
        if character.name.is_empty() {
            return Err(RosterError::EmptyName);
        }
        if !seen.insert(character.name.as_str()) {
            return Err(RosterError::DuplicateName(character.name.clone()));
        }
    }
    Ok(())
}

/// Roster names in roster order.
pub fn roster_names(roster: &[CharacterSpec]) -> Vec<String> {
    roster.iter().map(|c| c.name.clone()).collect()
}
