//! Phase 5a: reverse identification.
//!
//! Identifier models see only the synthesized trait labels and the candidate
//! roster. Their free-text answer is resolved to a roster member, or to
//! UNPARSED when it cannot be resolved unambiguously.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::chat::{sanitize, ChatClient, ChatError, ChatRequest};
use crate::describe::PhaseAbort;
use crate::model::{ModelSpec, Role};
use crate::profile::CharacterProfile;
use crate::prompt::{render_identification_prompt, PromptError};
use crate::roster::CharacterSpec;

/// Display name used for unresolvable answers in reports.
pub const UNPARSED_LABEL: &str = "UNPARSED";

/// One identifier model's answer for one profile. `predicted` is `None`
/// (rendered as UNPARSED) when the response matched no roster member or
/// matched more than one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Prediction {
    pub true_character: String,
    pub model_id: String,
    pub predicted: Option<String>,
    pub raw_response: String,
}

impl Prediction {
    pub fn is_correct(&self) -> bool {
        self.predicted.as_deref() == Some(self.true_character.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IdentifyError {
    #[error("prompt error for '{character}': {source}")]
    Prompt {
        character: String,
        source: PromptError,
    },
    #[error("completion failed for ({character}, {model_id}): {source}")]
    Completion {
        character: String,
        model_id: String,
        source: ChatError,
    },
    #[error("identifier model '{model_id}' does not carry the identifier role")]
    NotAnIdentifier { model_id: String },
    #[error("profile for '{character}' is empty; nothing to identify")]
    EmptyProfile { character: String },
    #[error("roster does not contain profile character '{character}'")]
    CharacterNotInRoster { character: String },
}

/// Resolve a raw model answer against the roster.
///
/// Matching order: sanitize and trim, then case-insensitive exact match
/// against names and aliases; failing that, a candidate set is built from
/// names with any whole-word token present in the response, accepted only
/// when exactly one candidate remains.
pub fn parse_identification(raw: &str, roster: &[CharacterSpec]) -> Option<String> {
    let cleaned = sanitize(raw);
    let answer = cleaned.trim();
    if answer.is_empty() {
        return None;
    }
    let answer_lower = lowercase(answer);

    for character in roster {
        if lowercase(&character.name) == answer_lower {
            return Some(character.name.clone());
        }
        if character
            .aliases
            .iter()
            .any(|alias| lowercase(alias) == answer_lower)
        {
            return Some(character.name.clone());
        }
    }

    let answer_words: BTreeSet<String> = words(&answer_lower);
    let mut candidates: Vec<&CharacterSpec> = Vec::new();
    for character in roster {
        let name_tokens = words(&lowercase(&character.name));
        if name_tokens.iter().any(|token| answer_words.contains(token)) {
            candidates.push(character);
        }
    }
    match candidates.as_slice() {
        [only] => Some(only.name.clone()),
        _ => None,
    }
}

fn lowercase(text: &str) -> String {
    text.chars().flat_map(char::to_lowercase).collect()
}

fn words(text: &str) -> BTreeSet<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(ToString::to_string)
        .collect()
}

/// Ask one identifier model to name the character behind a profile.
pub fn identify<C: ChatClient>(
    profile: &CharacterProfile,
    roster: &[CharacterSpec],
    identifier: &ModelSpec,
    client: &C,
) -> Result<Prediction, IdentifyError> {
    if !identifier.has_role(Role::Identifier) {
        return Err(IdentifyError::NotAnIdentifier {
            model_id: identifier.model_id.clone(),
        });
    }
    if profile.is_empty() {
        return Err(IdentifyError::EmptyProfile {
            character: profile.character.clone(),
        });
    }
    if !roster.iter().any(|c| c.name == profile.character) {
        return Err(IdentifyError::CharacterNotInRoster {
            character: profile.character.clone(),
        });
    }
    let names: Vec<String> = roster.iter().map(|c| c.name.clone()).collect();
    let prompt = render_identification_prompt(&profile.trait_labels(), &names).map_err(
        |source| IdentifyError::Prompt {
            character: profile.character.clone(),
            source,
        },
    )?;
    let request = ChatRequest::new(
        identifier.model_id.clone(),
        prompt,
        format!("identify/{}/{}", profile.character, identifier.model_id),
    );
    let result = client.complete(identifier, &request).map_err(|source| {
        IdentifyError::Completion {
            character: profile.character.clone(),
            model_id: identifier.model_id.clone(),
            source,
        }
    })?;
    Ok(Prediction {
        true_character: profile.character.clone(),
        model_id: identifier.model_id.clone(),
        predicted: parse_identification(&result.raw_text, roster),
        raw_response: result.raw_text,
    })
}

/// Phase 5a over every (profile, identifier) pair, skipping nothing: callers
/// filter out empty profiles beforehand.
pub fn identify_all<C: ChatClient>(
    profiles: &[CharacterProfile],
    roster: &[CharacterSpec],
    identifiers: &[&ModelSpec],
    client: &C,
) -> Result<Vec<Prediction>, PhaseAbort<IdentifyError>> {
    let total = profiles.len() * identifiers.len();
    let mut predictions = Vec::with_capacity(total);
    let mut completed = Vec::new();
    for profile in profiles {
        for identifier in identifiers {
            match identify(profile, roster, identifier, client) {
                Ok(prediction) => {
                    completed.push((profile.character.clone(), identifier.model_id.clone()));
                    predictions.push(prediction);
                }
                Err(error) => {
                    return Err(PhaseAbort {
                        error,
                        completed,
                        total,
                    })
                }
            }
        }
    }
    predictions.sort_by(|a, b| {
        (a.true_character.as_str(), a.model_id.as_str())
            .cmp(&(b.true_character.as_str(), b.model_id.as_str()))
    });
    Ok(predictions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::TraitGroup;
    use crate::ratio::Ratio;
    use alloc::vec;

    fn paper_roster() -> Vec<CharacterSpec> {
        [
            "Hercule Poirot",
            "Sherlock Holmes",
            "William Murdoch",
            "Columbo",
            "Father Brown",
            "Miss Marple",
            "Auguste Dupin",
        ]
        .iter()
        .map(|name| CharacterSpec::new(*name))
        .collect()
    }

    #[test]
    fn exact_match_is_case_insensitive() {
        let roster = paper_roster();
        assert_eq!(
            parse_identification("columbo", &roster),
            Some("Columbo".to_string())
        );
        assert_eq!(
            parse_identification("  Sherlock Holmes  ", &roster),
            Some("Sherlock Holmes".to_string())
        );
    }

    #[test]
    fn sanitation_runs_before_matching() {
        let roster = paper_roster();
        assert_eq!(
            parse_identification("**Sherlock Holmes**", &roster),
            Some("Sherlock Holmes".to_string())
        );
        assert_eq!(
            parse_identification("<think>hmm</think>Columbo", &roster),
            Some("Columbo".to_string())
        );
    }

    #[test]
    fn unique_substring_fallback() {
        let roster = paper_roster();
        assert_eq!(
            parse_identification("The detective is Miss Marple", &roster),
            Some("Miss Marple".to_string())
        );
        assert_eq!(
            parse_identification("Holmes", &roster),
            Some("Sherlock Holmes".to_string())
        );
    }

    #[test]
    fn ambiguous_and_off_roster_answers_are_unparsed() {
        let roster = paper_roster();
        assert_eq!(parse_identification("Holmes or Dupin", &roster), None);
        assert_eq!(parse_identification("Batman", &roster), None);
        assert_eq!(parse_identification("", &roster), None);
    }

    #[test]
    fn aliases_match_exactly() {
        let roster = vec![CharacterSpec::with_aliases("Hercule Poirot", ["Poirot"])];
        assert_eq!(
            parse_identification("poirot", &roster),
            Some("Hercule Poirot".to_string())
        );
    }

    fn profile_for(character: &str) -> CharacterProfile {
        CharacterProfile {
            character: character.to_string(),
            groups: vec![TraitGroup {
                label: "Keen observation".to_string(),
                members: vec![],
                supporting_models: BTreeSet::new(),
                consensus_score: Ratio::new(3, 15).unwrap(),
            }],
            threshold: Ratio::new(1, 5).unwrap(),
            total_models: 15,
        }
    }

    fn identifier() -> ModelSpec {
        ModelSpec {
            model_id: "id1".to_string(),
            provider: crate::model::Provider::Mock,
            endpoint_url: "mock:echo".to_string(),
            version_tag: "id1".to_string(),
            roles: [Role::Identifier].into_iter().collect(),
            credentials_env: String::new(),
        }
    }

    #[test]
    fn identification_round_trip() {
        let roster = paper_roster();
        let profile = profile_for("Hercule Poirot");
        let client = |_: &ModelSpec, _: &ChatRequest| -> Result<String, ChatError> {
            Ok("Hercule Poirot".to_string())
        };
        let prediction = identify(&profile, &roster, &identifier(), &client).unwrap();
        assert!(prediction.is_correct());
        assert_eq!(prediction.raw_response, "Hercule Poirot");

        let bold = |_: &ModelSpec, _: &ChatRequest| -> Result<String, ChatError> {
            Ok("**Sherlock Holmes**".to_string())
        };
        let prediction = identify(&profile, &roster, &identifier(), &bold).unwrap();
        assert_eq!(prediction.predicted.as_deref(), Some("Sherlock Holmes"));
        assert!(!prediction.is_correct());

        let off = |_: &ModelSpec, _: &ChatRequest| -> Result<String, ChatError> {
            Ok("Batman".to_string())
        };
        let prediction = identify(&profile, &roster, &identifier(), &off).unwrap();
        assert_eq!(prediction.predicted, None);
        assert_eq!(prediction.raw_response, "Batman");
    }

    #[test]
    fn empty_profile_rejected() {
        let roster = paper_roster();
        let mut profile = profile_for("Columbo");
        profile.groups.clear();
        let client = |_: &ModelSpec, _: &ChatRequest| -> Result<String, ChatError> {
            Ok("Columbo".to_string())
        };
        assert!(matches!(
            identify(&profile, &roster, &identifier(), &client),
            Err(IdentifyError::EmptyProfile { .. })
        ));
    }
}
