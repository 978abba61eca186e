use serde::{Deserialize, Serialize};

use crate::error::LoadError;

/// Optional file overrides; `None` uses the bundled copy.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResourcePaths {
    pub grammar: Option<String>,
    pub lexicon: Option<String>,
    pub rules: Option<String>,
    pub dictionary: Option<String>,
    pub morphology: Option<String>,
    pub caseframes: Option<String>,
}

/// Unscaled split sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Counts {
    pub train: usize,
    pub dev: usize,
    pub test: usize,
    /// Generalization sentences per pattern, and the reduced count for CP recursion and wh patterns.
    pub gen: usize,
    pub gen_reduced: usize,
    pub exposures: usize,
    pub concatenated: usize,
}

impl Default for Counts {
    fn default() -> Counts {
        Counts { train: 43_800, dev: 5_000, test: 5_000, gen: 2_000, gen_reduced: 1_000, exposures: 100, concatenated: 1_000 }
    }
}

/// Everything that determines a corpus. Thread count is deliberately absent:
/// it never changes the output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub paths: ResourcePaths,
    pub seed: u64,
    pub scale: f64,
    pub counts: Counts,
    pub zipf_exponent: f64,
    pub topicalize_fraction: f64,
    pub cp_embedding_fraction: f64,
    pub concatenate: bool,
    pub strict_selectional: bool,
    /// Build fails when more than this fraction of drawn sentences is unrepairable.
    pub max_unrepairable_fraction: f64,
    pub out_dir: String,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            paths: ResourcePaths::default(),
            seed: 42,
            scale: 1.0,
            counts: Counts::default(),
            zipf_exponent: 1.0,
            topicalize_fraction: 0.10,
            cp_embedding_fraction: 0.5,
            concatenate: true,
            strict_selectional: false,
            max_unrepairable_fraction: 0.5,
            out_dir: "corpus".into(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig, LoadError> {
        let c: RunConfig = serde_json::from_str(text).map_err(|e| LoadError::Invalid(format!("config: {e}")))?;
        c.check()?;
        Ok(c)
    }

    pub fn check(&self) -> Result<(), LoadError> {
        let bad = |m: &str| Err(LoadError::Invalid(format!("config: {m}")));
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return bad("scale must be positive");
        }
        if self.zipf_exponent.is_nan() || self.zipf_exponent <= 0.0 {
            return bad("zipf_exponent must be positive");
        }
        for (name, f) in [
            ("topicalize_fraction", self.topicalize_fraction),
            ("cp_embedding_fraction", self.cp_embedding_fraction),
            ("max_unrepairable_fraction", self.max_unrepairable_fraction),
        ] {
            if !(0.0..=1.0).contains(&f) {
                return bad(&format!("{name} must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    /// `n` scaled and rounded half away from zero.
    pub fn scaled(&self, n: usize) -> usize {
        (n as f64 * self.scale).round() as usize
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_and_partial_files() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
        let p = RunConfig::from_json(r#"{"seed": 7, "scale": 0.01}"#).unwrap();
        assert_eq!((p.seed, p.scaled(43_800), p.counts.dev), (7, 438, 5_000));
        assert!(RunConfig::from_json(r#"{"scale": 0}"#).is_err());
        assert!(RunConfig::from_json(r#"{"sed": 1}"#).is_err());
    }
}
