//! Phase 4: consensus analysis and profile synthesis.
//!
//! Each group's consensus score is the exact fraction of describer models
//! that contributed at least one member trait. Groups at or above the
//! consistency threshold enter the profile; the comparison is inclusive, so
//! with fifteen models and a 20% threshold a group supported by exactly
//! three models is retained.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::group::TraitGroup;
use crate::ratio::Ratio;
use crate::warning::{Phase, Warning, WarningCode};

/// The synthesized profile of one character: the threshold-passing trait
/// groups, ordered by descending consensus score (ties broken by label).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterProfile {
    pub character: String,
    pub groups: Vec<TraitGroup>,
    pub threshold: Ratio,
    pub total_models: u64,
}

impl CharacterProfile {
    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Group labels in profile order, the form shown to identifier models.
    pub fn trait_labels(&self) -> Vec<String> {
        self.groups.iter().map(|g| g.label.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProfileError {
    #[error("total_models must be positive")]
    ZeroModels,
    #[error("group has {supporters} supporters but only {total} models exist")]
    TooManySupporters { supporters: u64, total: u64 },
    #[error("threshold {0} is outside (0, 1]")]
    InvalidThreshold(Ratio),
}

/// The consensus score: `supporters / total_models`, exact.
pub fn consensus_score(supporters: u64, total_models: u64) -> Result<Ratio, ProfileError> {
    if total_models == 0 {
        return Err(ProfileError::ZeroModels);
    }
    if supporters > total_models {
        return Err(ProfileError::TooManySupporters {
            supporters,
            total: total_models,
        });
    }
    Ok(Ratio::new(supporters, total_models).expect("total_models checked nonzero"))
}

/// Filter groups by the consistency threshold (inclusive) and order the
/// survivors. Returns the profile, the excluded groups, and warnings.
pub fn synthesize_profile(
    character: &str,
    groups: &[TraitGroup],
    threshold: Ratio,
    total_models: u64,
) -> Result<(CharacterProfile, Vec<TraitGroup>, Vec<Warning>), ProfileError> {
    if total_models == 0 {
        return Err(ProfileError::ZeroModels);
    }
    if !threshold.in_unit_interval_exclusive_zero() {
        return Err(ProfileError::InvalidThreshold(threshold));
    }

    let mut retained = Vec::new();
    let mut excluded = Vec::new();
    let mut warnings = Vec::new();
    for group in groups {
        if group.consensus_score >= threshold {
            retained.push(group.clone());
        } else {
            warnings.push(Warning::new(
                Phase::Synthesize,
                Some(String::from(character)),
                WarningCode::InconsistentGroup,
                format!(
                    "group '{}' excluded: score {} below threshold {}",
                    group.label, group.consensus_score, threshold
                ),
            ));
            excluded.push(group.clone());
        }
    }
    retained.sort_by(|a, b| {
        b.consensus_score
            .cmp(&a.consensus_score)
            .then_with(|| a.label.cmp(&b.label))
    });

    if retained.is_empty() {
        warnings.push(Warning::new(
            Phase::Synthesize,
            Some(String::from(character)),
            WarningCode::EmptyProfile,
            format!("no group met the consistency threshold {threshold}; profile is empty"),
        ));
    }

    Ok((
        CharacterProfile {
            character: String::from(character),
            groups: retained,
            threshold,
            total_models,
        },
        excluded,
        warnings,
    ))
}
