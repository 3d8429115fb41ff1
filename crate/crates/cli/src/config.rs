//! Optional TOML pipeline configuration. Command line flags take
//! precedence over values read here, which take precedence over built-in
//! defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub registry: Option<PathBuf>,
    pub gazetteer_dir: Option<PathBuf>,
    pub languages: Vec<String>,
    pub endpoint: Option<String>,
    pub filter_rules: Option<PathBuf>,
    pub inflection_rules: Option<PathBuf>,
    pub familiar_forms: Option<PathBuf>,
    pub matcher: MatcherConfig,
    pub augment: AugmentSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatcherConfig {
    pub partial: Option<bool>,
    pub mode: Option<String>,
    pub case: Option<String>,
    pub sources: Option<Vec<String>>,
    /// Types that accept single-token partial matches.
    pub single_token_partial: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentSection {
    pub seed: Option<u64>,
    pub consistent: Option<bool>,
    pub probability: Option<f64>,
    pub types: Option<Vec<String>>,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        let config: Self =
            toml::from_str(&text).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    /// Every path named in the file must exist.
    pub fn validate(&self) -> Result<(), CliError> {
        let paths = [
            &self.registry,
            &self.gazetteer_dir,
            &self.filter_rules,
            &self.inflection_rules,
            &self.familiar_forms,
        ];
        for p in paths.into_iter().flatten() {
            if !p.exists() {
                return Err(CliError::data(format!("{}: configured path does not exist", p.display())));
            }
        }
        Ok(())
    }
}
