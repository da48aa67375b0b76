//! Phase 3: semantic grouping with provenance reconciliation.
//!
//! The grouper model answers with a JSON array of `{label, traits}` objects.
//! Its output is then reconciled against the input records: every returned
//! string must match a record by normalized text. Grouper mistakes are
//! repaired deterministically — fabricated strings are dropped, records
//! claimed twice stay with the first group, and records the grouper forgot
//! become singleton groups — and each repair is reported as a warning.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::chat::{sanitize, ChatClient, ChatError, ChatRequest};
use crate::extract::{normalize, TraitRecord};
use crate::model::{ModelSpec, Role};
use crate::profile::consensus_score;
use crate::prompt::{render_grouping_prompt, PromptError};
use crate::ratio::Ratio;
use crate::warning::{Phase, Warning, WarningCode};

/// One group exactly as the grouper returned it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTraitGroup {
    pub label: String,
    pub traits: Vec<String>,
}

/// A reconciled group: members carry their provenance, and the consensus
/// score is the fraction of describer models that contributed at least one
/// member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraitGroup {
    pub label: String,
    pub members: Vec<TraitRecord>,
    pub supporting_models: BTreeSet<String>,
    pub consensus_score: Ratio,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GroupError {
    #[error("prompt error for '{character}': {source}")]
    Prompt {
        character: String,
        source: PromptError,
    },
    #[error("completion failed for '{character}': {source}")]
    Completion {
        character: String,
        source: ChatError,
    },
    #[error("grouper model '{model_id}' does not carry the grouper role")]
    NotAGrouper { model_id: String },
    #[error("grouper output is not valid JSON ({message}); raw text: {raw}")]
    Json { message: String, raw: String },
    #[error("no trait records to group")]
    NoRecords,
    #[error("partition violated: record '{0}' appears in {1} groups")]
    PartitionViolated(String, usize),
    #[error("provenance not conserved: {0}")]
    ProvenanceViolated(String),
}

/// Parse the grouper's JSON array, tolerating a code-fence wrapper: the raw
/// text is tried as-is, then once more after fence stripping.
pub fn parse_grouping_response(text: &str) -> Result<Vec<RawTraitGroup>, GroupError> {
    match serde_json::from_str::<Vec<RawTraitGroup>>(text) {
        Ok(groups) => Ok(groups),
        Err(first_error) => {
            let stripped = sanitize(text);
            serde_json::from_str::<Vec<RawTraitGroup>>(&stripped).map_err(|_| GroupError::Json {
                message: first_error.to_string(),
                raw: text.to_string(),
            })
        }
    }
}

/// Match grouper output back to the input records (by normalized text) and
/// repair anomalies. Total: always yields a partition of `records`.
pub fn reconcile_groups(
    raw_groups: &[RawTraitGroup],
    records: &[TraitRecord],
    character: &str,
    total_models: u64,
) -> (Vec<TraitGroup>, Vec<Warning>) {
    let index: BTreeMap<&str, usize> = records
        .iter()
        .enumerate()
        .map(|(i, record)| (record.normalized_text.as_str(), i))
        .collect();

    let mut warnings = Vec::new();
    let mut assigned: BTreeSet<usize> = BTreeSet::new();
    let mut grouped: Vec<(String, Vec<usize>)> = Vec::new();

    for raw in raw_groups {
        let mut member_indices = Vec::new();
        for text in &raw.traits {
            let normalized = normalize(text);
            match index.get(normalized.as_str()) {
                None => warnings.push(Warning::new(
                    Phase::Group,
                    Some(character.to_string()),
                    WarningCode::FabricatedTrait,
                    format!("grouper invented '{text}'; dropped"),
                )),
                Some(&record_idx) => {
                    if assigned.insert(record_idx) {
                        member_indices.push(record_idx);
                    } else {
                        warnings.push(Warning::new(
                            Phase::Group,
                            Some(character.to_string()),
                            WarningCode::DuplicateAssignment,
                            format!("'{text}' claimed by more than one group; kept in the first"),
                        ));
                    }
                }
            }
        }
        if !member_indices.is_empty() {
            grouped.push((raw.label.clone(), member_indices));
        }
    }

    for (record_idx, record) in records.iter().enumerate() {
        if !assigned.contains(&record_idx) {
            warnings.push(Warning::new(
                Phase::Group,
                Some(character.to_string()),
                WarningCode::SingletonGroup,
                format!("'{}' missing from grouper output; kept as its own group", record.text),
            ));
            grouped.push((record.text.clone(), alloc::vec![record_idx]));
        }
    }

    let groups = grouped
        .into_iter()
        .map(|(label, member_indices)| {
            let members: Vec<TraitRecord> = member_indices
                .iter()
                .map(|&i| records[i].clone())
                .collect();
            let supporting_models: BTreeSet<String> = members
                .iter()
                .flat_map(|m| m.source_models.iter().cloned())
                .collect();
            let consensus_score = consensus_score(supporting_models.len() as u64, total_models)
                .unwrap_or(Ratio::zero());
            TraitGroup {
                label,
                members,
                supporting_models,
                consensus_score,
            }
        })
        .collect();

    (groups, warnings)
}

/// Run the grouping prompt over one character's records and reconcile the
/// answer. The partition and provenance invariants are checked before
/// returning.
pub fn group_traits<C: ChatClient>(
    records: &[TraitRecord],
    grouper: &ModelSpec,
    character: &str,
    total_models: u64,
    client: &C,
) -> Result<(Vec<TraitGroup>, Vec<Warning>), GroupError> {
    if records.is_empty() {
        return Err(GroupError::NoRecords);
    }
    if !grouper.has_role(Role::Grouper) {
        return Err(GroupError::NotAGrouper {
            model_id: grouper.model_id.clone(),
        });
    }
    let texts: Vec<String> = records.iter().map(|r| r.text.clone()).collect();
    let prompt = render_grouping_prompt(&texts).map_err(|source| GroupError::Prompt {
        character: character.to_string(),
        source,
    })?;
    let request = ChatRequest::new(
        grouper.model_id.clone(),
        prompt,
        format!("group/{character}/{}", grouper.model_id),
    );
    let result = client
        .complete(grouper, &request)
        .map_err(|source| GroupError::Completion {
            character: character.to_string(),
            source,
        })?;
    let raw_groups = parse_grouping_response(&result.clean_text)?;
    let (groups, warnings) = reconcile_groups(&raw_groups, records, character, total_models);
    verify_partition(&groups, records)?;
    verify_provenance(&groups, records)?;
    Ok((groups, warnings))
}

/// Every input record must appear in exactly one group.
pub fn verify_partition(groups: &[TraitGroup], records: &[TraitRecord]) -> Result<(), GroupError> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for group in groups {
        for member in &group.members {
            *counts.entry(member.normalized_text.as_str()).or_insert(0) += 1;
        }
    }
    for record in records {
        match counts.get(record.normalized_text.as_str()) {
            Some(1) => {}
            other => {
                return Err(GroupError::PartitionViolated(
                    record.text.clone(),
                    other.copied().unwrap_or(0),
                ))
            }
        }
    }
    let grouped_total: usize = groups.iter().map(|g| g.members.len()).sum();
    if grouped_total != records.len() {
        return Err(GroupError::PartitionViolated(
            "<extra members>".to_string(),
            grouped_total,
        ));
    }
    Ok(())
}

/// The union of source models over all groups must equal the union over the
/// input records: grouping may not invent or lose provenance.
pub fn verify_provenance(groups: &[TraitGroup], records: &[TraitRecord]) -> Result<(), GroupError> {
    let grouped: BTreeSet<&str> = groups
        .iter()
        .flat_map(|g| g.supporting_models.iter().map(String::as_str))
        .collect();
    let original: BTreeSet<&str> = records
        .iter()
        .flat_map(|r| r.source_models.iter().map(String::as_str))
        .collect();
    if grouped != original {
        return Err(GroupError::ProvenanceViolated(format!(
            "grouped models {grouped:?} != original models {original:?}"
        )));
    }
    for group in groups {
        let member_union: BTreeSet<&str> = group
            .members
            .iter()
            .flat_map(|m| m.source_models.iter().map(String::as_str))
            .collect();
        let supporting: BTreeSet<&str> =
            group.supporting_models.iter().map(String::as_str).collect();
        if member_union != supporting {
            return Err(GroupError::ProvenanceViolated(format!(
                "group '{}' supporting_models out of sync with members",
                group.label
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn record(text: &str, models: &[&str]) -> TraitRecord {
        TraitRecord {
            text: text.to_string(),
            normalized_text: normalize(text),
            source_models: models.iter().map(|m| m.to_string()).collect(),
        }
    }

    fn grouper() -> ModelSpec {
        ModelSpec {
            model_id: "g".to_string(),
            provider: crate::model::Provider::Mock,
            endpoint_url: "mock:echo".to_string(),
            version_tag: "g".to_string(),
            roles: [Role::Grouper].into_iter().collect(),
            credentials_env: String::new(),
        }
    }

    #[test]
    fn parses_plain_and_fenced_json() {
        let plain = r#"[{"label": "Observation", "traits": ["a", "b"]}]"#;
        assert_eq!(parse_grouping_response(plain).unwrap().len(), 1);

        let fenced = "```json\n[{\"label\": \"Observation\", \"traits\": [\"a\"]}]\n```";
        let groups = parse_grouping_response(fenced).unwrap();
        assert_eq!(groups[0].label, "Observation");

        let err = parse_grouping_response("not json").unwrap_err();
        assert!(matches!(err, GroupError::Json { ref raw, .. } if raw == "not json"));
    }

    #[test]
    fn exact_cover_passes_through() {
        let records = vec![record("Keen observation", &["m1", "m2"]), record("Deduction", &["m2"])];
        let raw = vec![RawTraitGroup {
            label: "Everything".to_string(),
            traits: vec!["Keen observation".to_string(), "Deduction".to_string()],
        }];
        let (groups, warnings) = reconcile_groups(&raw, &records, "X", 4);
        assert_eq!(groups.len(), 1);
        assert!(warnings.is_empty());
        assert_eq!(groups[0].members.len(), 2);
        let supporters: Vec<&str> = groups[0]
            .supporting_models
            .iter()
            .map(String::as_str)
            .collect();
        assert_eq!(supporters, vec!["m1", "m2"]);
        assert_eq!(groups[0].consensus_score, Ratio::new(2, 4).unwrap());
        verify_partition(&groups, &records).unwrap();
        verify_provenance(&groups, &records).unwrap();
    }

    #[test]
    fn fabricated_traits_dropped_with_warning() {
        let records = vec![record("Keen observation", &["m1"])];
        let raw = vec![RawTraitGroup {
            label: "Mixed".to_string(),
            traits: vec!["Keen observation".to_string(), "telepathy".to_string()],
        }];
        let (groups, warnings) = reconcile_groups(&raw, &records, "X", 2);
        assert_eq!(groups.len(), 1);
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].code, WarningCode::FabricatedTrait);
        verify_partition(&groups, &records).unwrap();
    }

    #[test]
    fn missing_records_become_singletons() {
        let records = vec![
            record("Keen observation", &["m1"]),
            record("Forgotten trait", &["m2"]),
        ];
        let raw = vec![RawTraitGroup {
            label: "Only one".to_string(),
            traits: vec!["Keen observation".to_string()],
        }];
        let (groups, warnings) = reconcile_groups(&raw, &records, "X", 2);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[1].label, "Forgotten trait");
        assert_eq!(groups[1].members.len(), 1);
        assert!(warnings.iter().any(|w| w.code == WarningCode::SingletonGroup));
        verify_partition(&groups, &records).unwrap();
        verify_provenance(&groups, &records).unwrap();
    }

    #[test]
    fn duplicate_claims_stay_in_first_group() {
        let records = vec![record("Keen observation", &["m1"])];
        let raw = vec![
            RawTraitGroup {
                label: "First".to_string(),
                traits: vec!["Keen observation".to_string()],
            },
            RawTraitGroup {
                label: "Second".to_string(),
                traits: vec!["keen observation.".to_string()],
            },
        ];
        let (groups, warnings) = reconcile_groups(&raw, &records, "X", 2);
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].label, "First");
        assert!(warnings
            .iter()
            .any(|w| w.code == WarningCode::DuplicateAssignment));
        verify_partition(&groups, &records).unwrap();
    }

    #[test]
    fn grouping_round_trip_with_mock_client() {
        let records = vec![
            record("Keen observation", &["m1", "m2"]),
            record("Logical deduction", &["m2", "m3"]),
        ];
        let client = |_: &ModelSpec, _: &ChatRequest| -> Result<String, ChatError> {
            Ok("```json\n[{\"label\": \"All of it\", \"traits\": [\"Keen observation\", \"Logical deduction\"]}]\n```".to_string())
        };
        let (groups, warnings) =
            group_traits(&records, &grouper(), "X", 4, &client).unwrap();
        assert_eq!(groups.len(), 1);
        assert!(warnings.is_empty());
        assert_eq!(groups[0].consensus_score, Ratio::new(3, 4).unwrap());

        let bad = |_: &ModelSpec, _: &ChatRequest| -> Result<String, ChatError> {
            Ok("not json".to_string())
        };
        assert!(matches!(
            group_traits(&records, &grouper(), "X", 4, &bad),
            Err(GroupError::Json { .. })
        ));

        assert!(matches!(
            group_traits(&[], &grouper(), "X", 4, &client),
            Err(GroupError::NoRecords)
        ));
    }
}
