//! Phase 2: trait extraction and cross-model deduplication.
//!
//! The extractor model answers with a bullet list; a rule-based parser pulls
//! the items out. Traits from all models for one character are then merged
//! into [`TraitRecord`]s keyed by normalized text, keeping track of which
//! models produced each phrasing.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::chat::{ChatClient, ChatError, ChatRequest};
use crate::describe::{Description, PhaseAbort};
use crate::model::{ModelSpec, Role};
use crate::prompt::{render_extraction_prompt, PromptError};

/// The trait list extracted from one description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraitList {
    pub character: String,
    pub model_id: String,
    pub traits: Vec<String>,
}

/// One deduplicated trait with provenance: every model whose list contained
/// a phrasing that normalizes to the same text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraitRecord {
    /// First-seen phrasing, kept verbatim.
    pub text: String,
    pub normalized_text: String,
    pub source_models: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExtractError {
    #[error("prompt error for ({character}, {model_id}): {source}")]
    Prompt {
        character: String,
        model_id: String,
        source: PromptError,
    },
    #[error("completion failed for ({character}, {model_id}): {source}")]
    Completion {
        character: String,
        model_id: String,
        source: ChatError,
    },
    #[error("no traits could be parsed from the response for ({character}, {model_id})")]
    EmptyParse {
        character: String,
        model_id: String,
    },
    #[error("extractor model '{model_id}' does not carry the extractor role")]
    NotAnExtractor { model_id: String },
    #[error("trait lists mix characters: '{first}' and '{second}'")]
    MixedCharacters { first: String, second: String },
}

/// Parse a bullet list out of model output. Lines starting (after
/// whitespace) with `-`, `*`, `•`, or `<digits>.` are items; the marker is
/// stripped and the item trimmed. Everything else is ignored.
pub fn parse_bullet_list(text: &str) -> Vec<String> {
    let mut items = Vec::new();
    for line in text.lines() {
        let trimmed = line.trim_start();
        let item = if let Some(rest) = trimmed.strip_prefix('-') {
            Some(rest)
        } else if let Some(rest) = trimmed.strip_prefix('*') {
            Some(rest)
        } else if let Some(rest) = trimmed.strip_prefix('•') {
            Some(rest)
        } else {
            let digits = trimmed.chars().take_while(char::is_ascii_digit).count();
            if digits > 0 && trimmed[digits..].starts_with('.') {
                Some(&trimmed[digits + 1..])
            } else {
                None
            }
        };
        if let Some(item) = item {
            let item = item.trim();
            if !item.is_empty() {
                items.push(item.to_string());
            }
        }
    }
    items
}

/// Canonical comparison form: Unicode NFC, lowercased, inner whitespace
/// collapsed to single spaces, trailing punctuation dropped. Interior
/// punctuation is preserved.
pub fn normalize(text: &str) -> String {
    let composed: String = text.nfc().collect();
    let lowered: String = composed.chars().flat_map(char::to_lowercase).collect();
    let mut collapsed = lowered.split_whitespace().collect::<Vec<_>>().join(" ");
    while collapsed
        .chars()
        .next_back()
        .is_some_and(|c| matches!(c, '.' | ',' | ';' | ':' | '!' | '?') || c.is_whitespace())
    {
        collapsed.pop();
    }
    collapsed
}

/// Run the extraction prompt for one description and parse the answer.
/// Exact duplicate items within the list are collapsed (first wins).
pub fn extract_traits<C: ChatClient>(
    description: &Description,
    extractor: &ModelSpec,
    client: &C,
) -> Result<TraitList, ExtractError> {
    if !extractor.has_role(Role::Extractor) {
        return Err(ExtractError::NotAnExtractor {
            model_id: extractor.model_id.clone(),
        });
    }
    let prompt = render_extraction_prompt(&description.text).map_err(|source| {
        ExtractError::Prompt {
            character: description.character.clone(),
            model_id: description.model_id.clone(),
            source,
        }
    })?;
    let request = ChatRequest::new(
        extractor.model_id.clone(),
        prompt,
        format!(
            "extract/{}/{}",
            description.character, description.model_id
        ),
    );
    let result =
        client
            .complete(extractor, &request)
            .map_err(|source| ExtractError::Completion {
                character: description.character.clone(),
                model_id: description.model_id.clone(),
                source,
            })?;
    let mut seen = BTreeSet::new();
    let traits: Vec<String> = parse_bullet_list(&result.clean_text)
        .into_iter()
        .filter(|item| seen.insert(item.clone()))
        .collect();
    if traits.is_empty() {
        return Err(ExtractError::EmptyParse {
            character: description.character.clone(),
            model_id: description.model_id.clone(),
        });
    }
    Ok(TraitList {
        character: description.character.clone(),
        model_id: description.model_id.clone(),
        traits,
    })
}

/// Phase 2 over every description, aborting on the first failure with the
/// completed pairs recorded.
pub fn extract_all<C: ChatClient>(
    descriptions: &[Description],
    extractor: &ModelSpec,
    client: &C,
) -> Result<Vec<TraitList>, PhaseAbort<ExtractError>> {
    let mut lists = Vec::with_capacity(descriptions.len());
    let mut completed = Vec::new();
    for description in descriptions {
        match extract_traits(description, extractor, client) {
            Ok(list) => {
                completed.push((description.character.clone(), description.model_id.clone()));
                lists.push(list);
            }
            Err(error) => {
                return Err(PhaseAbort {
                    error,
                    completed,
                    total: descriptions.len(),
                })
            }
        }
    }
    lists.sort_by(|a, b| {
        (a.character.as_str(), a.model_id.as_str())
            .cmp(&(b.character.as_str(), b.model_id.as_str()))
    });
    Ok(lists)
}

/// Merge the trait lists of one character into deduplicated records.
///
/// Records are keyed by normalized text; `source_models` is the union of
/// contributing models; the canonical phrasing is the first occurrence when
/// iterating lists sorted by model id, in list order.
pub fn dedupe_traits(lists: &[TraitList]) -> Result<Vec<TraitRecord>, ExtractError> {
    for window in lists.windows(2) {
        if window[0].character != window[1].character {
            return Err(ExtractError::MixedCharacters {
                first: window[0].character.clone(),
                second: window[1].character.clone(),
            });
        }
    }
    let mut ordered: Vec<&TraitList> = lists.iter().collect();
    ordered.sort_by(|a, b| a.model_id.cmp(&b.model_id));

    let mut records: Vec<TraitRecord> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    for list in ordered {
        for text in &list.traits {
            let normalized = normalize(text);
            if normalized.is_empty() {
                continue;
            }
            match index.get(&normalized) {
                Some(&i) => {
                    records[i].source_models.insert(list.model_id.clone());
                }
                None => {
                    index.insert(normalized.clone(), records.len());
                    records.push(TraitRecord {
                        text: text.clone(),
                        normalized_text: normalized,
                        source_models: [list.model_id.clone()].into_iter().collect(),
                    });
                }
            }
        }
    }
    Ok(records)
}
