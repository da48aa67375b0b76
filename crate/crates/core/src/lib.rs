//! Core logic for the gumshoe pipeline: profiling the investigative methods
//! of fictional detectives with an ensemble of language models.
//!
//! The pipeline runs five phases per character:
//!
//! 1. **Describe** — every describer model writes a short description of the
//!    character's investigative method ([`describe`]).
//! 2. **Extract** — one extractor model turns each description into a bullet
//!    list of traits ([`extract`]).
//! 3. **Group** — one grouper model clusters trait phrasings that express the
//!    same idea; provenance back to the originating models is preserved
//!    ([`group`]).
//! 4. **Synthesize** — groups are scored by the fraction of describer models
//!    that contributed to them, and filtered by a consistency threshold
//!    ([`profile`]).
//! 5. **Validate** — identifier models are asked to name the character from
//!    the synthesized traits alone; answers are scored into per-class
//!    accuracy and a confusion matrix ([`identify`], [`eval`]).
//!
//! This crate is `no_std` (with `alloc`) and contains no IO: model access is
//! abstracted behind [`chat::ChatClient`], and everything else is pure. The
//! companion `gumshoe` crate supplies the HTTP gateway, record/replay cache,
//! artifact store, and CLI.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod chat;
pub mod describe;
pub mod eval;
pub mod extract;
pub mod group;
pub mod identify;
pub mod model;
pub mod profile;
pub mod prompt;
pub mod ratio;
pub mod report;
pub mod roster;
pub mod warning;

pub use chat::{cache_key, sanitize, ChatClient, ChatError, ChatRequest, CompletionResult};
pub use describe::{generate_descriptions, sentence_count, Description};
pub use eval::{evaluate, ConfusionMatrix, EvalError, EvalReport};
pub use extract::{dedupe_traits, normalize, parse_bullet_list, TraitList, TraitRecord};
pub use group::{group_traits, parse_grouping_response, reconcile_groups, TraitGroup};
pub use identify::{identify, parse_identification, Prediction};
pub use model::{ModelRegistry, ModelSpec, Provider, Role};
pub use profile::{consensus_score, synthesize_profile, CharacterProfile};
pub use prompt::{
    render_description_prompt, render_extraction_prompt, render_grouping_prompt,
    render_identification_prompt, PromptError, PromptTemplate, TemplateId,
};
pub use ratio::Ratio;
pub use report::{render_eval_report, render_trait_table, ReportFormat};
pub use roster::CharacterSpec;
pub use warning::{Phase, Warning, WarningCode};
