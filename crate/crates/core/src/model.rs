//! Model registry: which language models participate in a run and in what
//! roles.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// How a model is reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provider {
    /// Hosted chat-completions HTTP API; requires a credential.
    RemoteApi,
    /// Self-hosted inference server speaking the common generate scheme.
    LocalEndpoint,
    /// Built-in deterministic simulator; no network.
    Mock,
    /// Served exclusively from recorded fixtures; no network.
    Replay,
}

/// Pipeline role a model can be assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Describer,
    Extractor,
    Grouper,
    Identifier,
}

/// One registered model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    /// Unique short identifier used in artifacts and cache keys.
    pub model_id: String,
    pub provider: Provider,
    pub endpoint_url: String,
    /// Exact upstream version string (e.g. `gpt-4o-2024-08-06`).
    pub version_tag: String,
    pub roles: BTreeSet<Role>,
    /// Name of the environment variable holding the API key. Empty for
    /// local, mock, and replay providers.
    #[serde(default)]
    pub credentials_env: String,
}

impl ModelSpec {
    pub fn has_role(&self, role: Role) -> bool {
        self.roles.contains(&role)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("duplicate model_id '{0}' in registry")]
    DuplicateModelId(String),
    #[error("model '{0}' uses a remote API but names no credentials_env")]
    MissingCredentialsEnv(String),
    #[error("registry has no model with role {0:?}")]
    MissingRole(Role),
    #[error("unknown model_id '{0}'")]
    UnknownModel(String),
    #[error("model '{model_id}' does not carry role {role:?}")]
    RoleMismatch { model_id: String, role: Role },
}

/// A validated collection of [`ModelSpec`]s.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ModelRegistry {
    models: Vec<ModelSpec>,
}

impl ModelRegistry {
    /// Build a registry, checking the structural invariants: unique ids,
    /// credentials named for every remote model, and at least one extractor
    /// and one grouper.
    pub fn new(models: Vec<ModelSpec>) -> Result<Self, RegistryError> {
        let mut seen: BTreeMap<&str, ()> = BTreeMap::new();
        for spec in &models {
            if seen.insert(spec.model_id.as_str(), ()).is_some() {
                return Err(RegistryError::DuplicateModelId(spec.model_id.clone()));
            }
            if spec.provider == Provider::RemoteApi && spec.credentials_env.is_empty() {
                return Err(RegistryError::MissingCredentialsEnv(spec.model_id.clone()));
            }
        }
        for role in [Role::Extractor, Role::Grouper] {
            if !models.iter().any(|m| m.has_role(role)) {
                return Err(RegistryError::MissingRole(role));
            }
        }
        Ok(Self { models })
    }

    pub fn models(&self) -> &[ModelSpec] {
        &self.models
    }

    pub fn get(&self, model_id: &str) -> Option<&ModelSpec> {
        self.models.iter().find(|m| m.model_id == model_id)
    }

    /// Look up a model and check that it carries the given role.
    pub fn require_role(&self, model_id: &str, role: Role) -> Result<&ModelSpec, RegistryError> {
        let spec = self
            .get(model_id)
            .ok_or_else(|| RegistryError::UnknownModel(String::from(model_id)))?;
        if !spec.has_role(role) {
            return Err(RegistryError::RoleMismatch {
                model_id: String::from(model_id),
                role,
            });
        }
        Ok(spec)
    }

    /// Models carrying a role, in registry order.
    pub fn with_role(&self, role: Role) -> Vec<&ModelSpec> {
        self.models.iter().filter(|m| m.has_role(role)).collect()
    }
}

impl<'de> Deserialize<'de> for ModelRegistry {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let models = Vec::<ModelSpec>::deserialize(deserializer)?;
        ModelRegistry::new(models).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn spec(id: &str, provider: Provider, roles: &[Role], cred: &str) -> ModelSpec {
        ModelSpec {
            model_id: String::from(id),
            provider,
            endpoint_url: String::from("mock:echo"),
            version_tag: String::from(id),
            roles: roles.iter().copied().collect(),
            credentials_env: String::from(cred),
        }
    }

    #[test]
    fn valid_registry_round_trips() {
        let registry = ModelRegistry::new(vec![
            spec("a", Provider::Mock, &[Role::Describer, Role::Identifier], ""),
            spec("b", Provider::Mock, &[Role::Extractor, Role::Grouper], ""),
        ])
        .unwrap();
        assert_eq!(registry.with_role(Role::Describer).len(), 1);
        assert!(registry.require_role("b", Role::Grouper).is_ok());
        let json = serde_json::to_string(&registry).unwrap();
        let back: ModelRegistry = serde_json::from_str(&json).unwrap();
        assert_eq!(back, registry);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = ModelRegistry::new(vec![
            spec("a", Provider::Mock, &[Role::Extractor, Role::Grouper], ""),
            spec("a", Provider::Mock, &[Role::Describer], ""),
        ])
        .unwrap_err();
        assert_eq!(err, RegistryError::DuplicateModelId(String::from("a")));
    }

    #[test]
    fn remote_models_need_credentials_env() {
        let err = ModelRegistry::new(vec![spec(
            "r",
            Provider::RemoteApi,
            &[Role::Extractor, Role::Grouper],
            "",
        )])
        .unwrap_err();
        assert!(matches!(err, RegistryError::MissingCredentialsEnv(_)));
    }

    #[test]
    fn extractor_and_grouper_roles_required() {
        let err = ModelRegistry::new(vec![spec("a", Provider::Mock, &[Role::Describer], "")])
            .unwrap_err();
        assert_eq!(err, RegistryError::MissingRole(Role::Extractor));
        let err = ModelRegistry::new(vec![spec("a", Provider::Mock, &[Role::Extractor], "")])
            .unwrap_err();
        assert_eq!(err, RegistryError::MissingRole(Role::Grouper));
    }

    #[test]
    fn role_mismatch_detected() {
        let registry = ModelRegistry::new(vec![
            spec("a", Provider::Mock, &[Role::Extractor, Role::Grouper], ""),
            spec("d", Provider::Mock, &[Role::Describer], ""),
        ])
        .unwrap();
        assert!(matches!(
            registry.require_role("d", Role::Grouper),
            Err(RegistryError::RoleMismatch { .. })
        ));
        assert!(matches!(
            registry.require_role("nope", Role::Grouper),
            Err(RegistryError::UnknownModel(_))
        ));
    }
}
