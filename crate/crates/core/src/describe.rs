//! Phase 1: description generation.
//!
//! Every describer model answers the description prompt for every character.
//! Descriptions longer than the requested five sentences are kept but
//! flagged; the sentence split is a simple terminal-punctuation rule, which
//! is fine for an advisory check.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::chat::{ChatClient, ChatError, ChatRequest};
use crate::model::ModelSpec;
use crate::prompt::{render_description_prompt, PromptError};
use crate::roster::CharacterSpec;
use crate::warning::{Phase, Warning, WarningCode};

/// Sentence budget requested by the description prompt.
pub const MAX_DESCRIPTION_SENTENCES: u32 = 5;

/// One model's description of one character's investigative method.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Description {
    pub character: String,
    pub model_id: String,
    pub text: String,
    pub sentence_count: u32,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DescribeError {
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
    #[error("model '{model_id}' returned an empty description for '{character}'")]
    EmptyDescription {
        character: String,
        model_id: String,
    },
}

/// A phase abort: the failing pair plus every pair that had already
/// completed, so the caller can persist a resumable partial manifest.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{error} (completed {} of {} pairs)", completed.len(), total)]
pub struct PhaseAbort<E: core::fmt::Display + core::fmt::Debug> {
    pub error: E,
    /// `(character, model_id)` pairs finished before the failure.
    pub completed: Vec<(String, String)>,
    pub total: usize,
}

/// Count sentences by terminal punctuation (`.`, `!`, `?`) followed by
/// whitespace or end of text; a trailing unterminated fragment counts as one.
pub fn sentence_count(text: &str) -> u32 {
    let mut count = 0u32;
    let mut tail_has_content = false;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            let at_boundary = match chars.peek() {
                None => true,
                Some(next) => next.is_whitespace(),
            };
            if at_boundary && tail_has_content {
                count += 1;
                tail_has_content = false;
            }
        } else if !c.is_whitespace() {
            tail_has_content = true;
        }
    }
    if tail_has_content {
        count += 1;
    }
    count.max(u32::from(!text.trim().is_empty()))
}

/// Run the description prompt for one (character, model) pair.
pub fn describe_character<C: ChatClient>(
    character: &CharacterSpec,
    model: &ModelSpec,
    client: &C,
) -> Result<(Description, Option<Warning>), DescribeError> {
    let prompt = render_description_prompt(&character.name).map_err(|source| {
        DescribeError::Prompt {
            character: character.name.clone(),
            source,
        }
    })?;
    let request = ChatRequest::new(
        model.model_id.clone(),
        prompt,
        format!("describe/{}/{}", character.name, model.model_id),
    );
    let result = client
        .complete(model, &request)
        .map_err(|source| DescribeError::Completion {
            character: character.name.clone(),
            model_id: model.model_id.clone(),
            source,
        })?;
    if result.clean_text.trim().is_empty() {
        return Err(DescribeError::EmptyDescription {
            character: character.name.clone(),
            model_id: model.model_id.clone(),
        });
    }
    let sentences = sentence_count(&result.clean_text);
    let warning = (sentences > MAX_DESCRIPTION_SENTENCES).then(|| {
        Warning::new(
            Phase::Describe,
            Some(character.name.clone()),
            WarningCode::DescriptionLength,
            format!(
                "model '{}' produced {} sentences (requested at most {})",
                model.model_id, sentences, MAX_DESCRIPTION_SENTENCES
            ),
        )
    });
    let description = Description {
        character: character.name.clone(),
        model_id: model.model_id.clone(),
        text: result.clean_text,
        sentence_count: sentences,
    };
    Ok((description, warning))
}

/// Phase 1 over the full roster × describer grid, in deterministic order.
///
/// On the first unrecoverable failure the phase aborts, reporting the pairs
/// that had already completed.
pub fn generate_descriptions<C: ChatClient>(
    roster: &[CharacterSpec],
    describers: &[&ModelSpec],
    client: &C,
) -> Result<(Vec<Description>, Vec<Warning>), PhaseAbort<DescribeError>> {
    let total = roster.len() * describers.len();
    let mut descriptions = Vec::with_capacity(total);
    let mut warnings = Vec::new();
    let mut completed = Vec::new();
    for character in roster {
        for model in describers {
            match describe_character(character, model, client) {
                Ok((description, warning)) => {
                    completed.push((character.name.clone(), model.model_id.clone()));
                    descriptions.push(description);
                    warnings.extend(warning);
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
    sort_descriptions(&mut descriptions);
    Ok((descriptions, warnings))
}

/// Canonical artifact order: by character name, then model id.
pub fn sort_descriptions(descriptions: &mut [Description]) {
    descriptions.sort_by(|a, b| {
        (a.character.as_str(), a.model_id.as_str())
            .cmp(&(b.character.as_str(), b.model_id.as_str()))
    });
}
