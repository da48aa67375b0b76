//! The four pipeline prompts, with placeholder substitution.
//!
//! Template bodies are fixed; values are inserted verbatim with no escaping.
//! Rendering fails when a placeholder is left unbound, a binding goes
//! unused, or a value itself contains placeholder syntax.

use alloc::string::{String, ToString};

use serde::{Deserialize, Serialize};

use crate::chat::bullet_block;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateId {
    Description,
    Extraction,
    Grouping,
    Identification,
}

/// Phase 1: ask one describer model for a short formal description of a
/// character's investigative method.
pub const DESCRIPTION_TEMPLATE: &str = "Task: Generate a concise and formal description of the distinguishing characteristics of the investigative method used by the fictional detective {{D_name}}.

Requirements:
- Base your description of the investigative method used on stories where {{D_name}} is the protagonist or a principal investigator.
- Focus solely on the investigative approach, strategies, and distinguishing features that define this detective's method of solving cases.
- Consider only the distinguishing characteristics that set the investigative method of {{D_name}} apart from those of other fictional detectives.
- Do not include biographical details, story summaries, or references to specific cases.
- Structure the response as a single paragraph, without bullet points or numbered lists.
- Do not include any introductory or concluding sentences outside of the description itself.
- Limit the response to a maximum of 5 sentences.";

/// Phase 2: ask the extractor model to turn one description into a bullet
/// list of traits.
pub const EXTRACTION_TEMPLATE: &str = "Extract the key traits that describe the investigative method in the following text. List each trait as a separate bullet point. Use a formal and concise style. Do not repeat traits, and do not add information that is not present in the text.

Text: {{D_description}}";

/// Phase 3: ask the grouper model to merge trait phrasings that express the
/// same idea, answering as a JSON array.
pub const GROUPING_TEMPLATE: &str = "List of Traits:
{{D_traits}}

Task: Given the list of traits above describing the investigative methods of a fictional detective, group together all traits that express the same or highly similar idea, regardless of phrasing or wording.

For each group, provide:
- A description of the core idea of the investigative method, taking into account the grouped traits. Use all relevant distinguishing terms when writing the description.
- The list of original traits belonging to the group.

Present the output as a JSON array in the following format:
[
  {
    \"label\": \"Description of the core idea of the investigative method using relevant distinguishing terms\",
    \"traits\": [
        \"Original phrasing 1\",
        \"Original phrasing 2\"
    ]
  }
]";

/// Phase 5: ask an identifier model to name the character from the
/// synthesized traits alone.
pub const IDENTIFICATION_TEMPLATE: &str = "List of Traits:
{{D_profile}}

You are given a list of traits describing the investigative method of a fictional detective. Your task is to identify which detective this description most likely refers to.

Choose only from the following list:
{{roster}}

Respond only with the name of the detective, without explanations or additional text.";

/// A template body plus the placeholder names it is allowed to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PromptTemplate {
    pub id: TemplateId,
    pub body: &'static str,
    pub placeholders: &'static [&'static str],
}

impl PromptTemplate {
    pub fn get(id: TemplateId) -> Self {
        match id {
            TemplateId::Description => Self {
                id,
                body: DESCRIPTION_TEMPLATE,
                placeholders: &["D_name"],
            },
            TemplateId::Extraction => Self {
                id,
                body: EXTRACTION_TEMPLATE,
                placeholders: &["D_description"],
            },
            TemplateId::Grouping => Self {
                id,
                body: GROUPING_TEMPLATE,
                placeholders: &["D_traits"],
            },
            TemplateId::Identification => Self {
                id,
                body: IDENTIFICATION_TEMPLATE,
                placeholders: &["D_profile", "roster"],
            },
        }
    }

    /// Substitute every `{{name}}` token. Each binding must be used by the
    /// template and every template placeholder must be bound.
    pub fn render(&self, bindings: &[(&str, &str)]) -> Result<String, PromptError> {
        for (name, value) in bindings {
            if value.is_empty() {
                return Err(PromptError::EmptyValue {
                    placeholder: (*name).to_string(),
                });
            }
            if value.contains("{{") || value.contains("}}") {
                return Err(PromptError::PlaceholderSyntaxInValue {
                    placeholder: (*name).to_string(),
                });
            }
        }
        let mut rendered = self.body.to_string();
        for (name, value) in bindings {
            let token = alloc::format!("{{{{{name}}}}}");
            if !rendered.contains(token.as_str()) {
                return Err(PromptError::UnusedBinding {
                    placeholder: (*name).to_string(),
                });
            }
            rendered = rendered.replace(token.as_str(), value);
        }
        if let Some(open) = rendered.find("{{") {
            let tail = &rendered[open + 2..];
            let name = tail
                .find("}}")
                .map(|end| tail[..end].to_string())
                .unwrap_or_default();
            return Err(PromptError::UnboundPlaceholder { placeholder: name });
        }
        Ok(rendered)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("placeholder '{placeholder}' is bound to an empty value")]
    EmptyValue { placeholder: String },
    #[error("placeholder '{placeholder}' is not bound")]
    UnboundPlaceholder { placeholder: String },
    #[error("binding '{placeholder}' is not used by the template")]
    UnusedBinding { placeholder: String },
    #[error("value for '{placeholder}' contains placeholder syntax and cannot be inserted verbatim")]
    PlaceholderSyntaxInValue { placeholder: String },
    #[error("list for '{placeholder}' is empty or contains an empty item")]
    InvalidList { placeholder: String },
}

fn validated_bullets(items: &[String], placeholder: &str) -> Result<String, PromptError> {
    if items.is_empty() || items.iter().any(|item| item.is_empty()) {
        return Err(PromptError::InvalidList {
            placeholder: placeholder.to_string(),
        });
    }
    Ok(bullet_block(items))
}

pub fn render_description_prompt(character_name: &str) -> Result<String, PromptError> {
    PromptTemplate::get(TemplateId::Description).render(&[("D_name", character_name)])
}

pub fn render_extraction_prompt(description: &str) -> Result<String, PromptError> {
    PromptTemplate::get(TemplateId::Extraction).render(&[("D_description", description)])
}

pub fn render_grouping_prompt(traits: &[String]) -> Result<String, PromptError> {
    let block = validated_bullets(traits, "D_traits")?;
    PromptTemplate::get(TemplateId::Grouping).render(&[("D_traits", &block)])
}

pub fn render_identification_prompt(
    profile_traits: &[String],
    roster: &[String],
) -> Result<String, PromptError> {
    let profile_block = validated_bullets(profile_traits, "D_profile")?;
    let roster_block = validated_bullets(roster, "roster")?;
    PromptTemplate::get(TemplateId::Identification)
        .render(&[("D_profile", &profile_block), ("roster", &roster_block)])
}
