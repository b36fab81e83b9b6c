//! TOML experiment configuration. Unknown keys are rejected so a typo in a
//! config archive fails loudly instead of silently running defaults.

use crate::baselines::{AdaGradHyper, AdamHyper, RmsPropHyper, SgdHyper};
use crate::eval::Objective;
use crate::integrator::{Method, OptConfig};
use crate::objectives::{gen_dataset, MlpSine, Quadratic, TwoWell, DEFAULT_DATA_SEED, DEFAULT_SAMPLES};
use crate::rate::LrRule;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config io failed for {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("objective {0:?} is not one of mlp-sine, two-well, quadratic")]
    UnknownObjective(String),
    #[error("method kind {0:?} is not one of fixed, ta, fta, pta, pfta, sgd, adam, rmsprop, adagrad")]
    UnknownMethod(String),
    #[error("method {kind:?} requires field {field}")]
    MissingField { kind: String, field: &'static str },
    #[error("method {kind:?} does not accept field {field}")]
    UnexpectedField { kind: String, field: &'static str },
    #[error("invalid {field}: {message}")]
    BadValue {
        field: &'static str,
        message: String,
    },
}

fn default_n_seeds() -> u32 {
    20
}

fn default_max_iters() -> u32 {
    800
}

fn default_stop_energy() -> f64 {
    1e-4
}

fn default_eta() -> f64 {
    1.0
}

/// One benchmark campaign: an objective, a set of methods, and the shared
/// run settings. Parses from TOML with `[[method]]` tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// "mlp-sine", "two-well", or "quadratic".
    pub objective: String,
    #[serde(default = "default_n_seeds")]
    pub n_seeds: u32,
    #[serde(default = "default_max_iters")]
    pub max_iters: u32,
    #[serde(default = "default_stop_energy")]
    pub stop_energy: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// Output directory for CSV/JSON artifacts; overridable by CLI flag or
    /// the TAGRAD_OUT_DIR environment variable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    /// Dataset size for mlp-sine (default 100).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Dataset seed for mlp-sine (default 42); run seeds are always 0..n.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_seed: Option<u64>,
    #[serde(default, rename = "method")]
    pub methods: Vec<MethodSpec>,
}

/// One `[[method]]` table. `kind` picks the optimizer; the other fields are
/// its hyperparameters, checked strictly (missing required fields and fields
/// foreign to the kind are both errors).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_grad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
}

impl MethodSpec {
    fn require(&self, field: &'static str, value: Option<f64>) -> Result<f64, ConfigError> {
        value.ok_or(ConfigError::MissingField {
            kind: self.kind.clone(),
            field,
        })
    }

    fn reject_foreign(&self, allowed: &[&'static str]) -> Result<(), ConfigError> {
        let present: [(&'static str, bool); 12] = [
            ("gamma", self.gamma.is_some()),
            ("alpha", self.alpha.is_some()),
            ("beta", self.beta.is_some()),
            ("p", self.p.is_some()),
            ("q", self.q.is_some()),
            ("gamma_max", self.gamma_max.is_some()),
            ("eps_grad", self.eps_grad.is_some()),
            ("lr", self.lr.is_some()),
            ("beta1", self.beta1.is_some()),
            ("beta2", self.beta2.is_some()),
            ("eps", self.eps.is_some()),
            ("decay", self.decay.is_some()),
        ];
        for (field, set) in present {
            if set && !allowed.contains(&field) {
                return Err(ConfigError::UnexpectedField {
                    kind: self.kind.clone(),
                    field,
                });
            }
        }
        Ok(())
    }

    fn finish_rule(&self, rule: LrRule) -> Result<Method, ConfigError> {
        let mut rule = rule;
        if let Some(gm) = self.gamma_max {
            rule = rule.with_gamma_max(gm);
        }
        if let Some(eg) = self.eps_grad {
            rule = rule.with_eps_grad(eg);
        }
        rule.validate().map_err(|e| ConfigError::BadValue {
            field: "method",
            message: e.to_string(),
        })?;
        Ok(Method::Rule(rule))
    }

    /// Builds the runnable method, validating hyperparameters.
    pub fn build(&self) -> Result<Method, ConfigError> {
        match self.kind.as_str() {
            "fixed" => {
                self.reject_foreign(&["gamma", "gamma_max", "eps_grad"])?;
                let gamma = self.require("gamma", self.gamma)?;
                self.finish_rule(LrRule::fixed(gamma))
            }
            "ta" | "pta" => {
                self.reject_foreign(&["beta", "p", "q", "gamma_max", "eps_grad"])?;
                let beta = self.require("beta", self.beta)?;
                let p = self.require("p", self.p)?;
                let q = self.require("q", self.q)?;
                let rule = if self.kind == "ta" {
                    LrRule::ta(beta, p, q)
                } else {
                    LrRule::pta(beta, p, q)
                };
                self.finish_rule(rule)
            }
            "fta" | "pfta" => {
                self.reject_foreign(&["alpha", "beta", "p", "q", "gamma_max", "eps_grad"])?;
                let alpha = self.require("alpha", self.alpha)?;
                let beta = self.require("beta", self.beta)?;
                let p = self.require("p", self.p)?;
                let q = self.require("q", self.q)?;
                let rule = if self.kind == "fta" {
                    LrRule::fta(alpha, beta, p, q)
                } else {
                    LrRule::pfta(alpha, beta, p, q)
                };
                self.finish_rule(rule)
            }
            "sgd" => {
                self.reject_foreign(&["lr"])?;
                let mut hyper = SgdHyper::default();
                if let Some(lr) = self.lr {
                    hyper.lr = lr;
                }
                Ok(Method::Sgd(hyper))
            }
            "adam" => {
                self.reject_foreign(&["lr", "beta1", "beta2", "eps"])?;
                let mut hyper = AdamHyper::default();
                if let Some(lr) = self.lr {
                    hyper.lr = lr;
                }
                if let Some(b1) = self.beta1 {
                    hyper.beta1 = b1;
                }
                if let Some(b2) = self.beta2 {
                    hyper.beta2 = b2;
                }
                if let Some(eps) = self.eps {
                    hyper.eps = eps;
                }
                Ok(Method::Adam(hyper))
            }
            "rmsprop" => {
                self.reject_foreign(&["lr", "decay", "eps"])?;
                let mut hyper = RmsPropHyper::default();
                if let Some(lr) = self.lr {
                    hyper.lr = lr;
                }
                if let Some(decay) = self.decay {
                    hyper.decay = decay;
                }
                if let Some(eps) = self.eps {
                    hyper.eps = eps;
                }
                Ok(Method::RmsProp(hyper))
            }
            "adagrad" => {
                self.reject_foreign(&["lr", "eps"])?;
                let mut hyper = AdaGradHyper::default();
                if let Some(lr) = self.lr {
                    hyper.lr = lr;
                }
                if let Some(eps) = self.eps {
                    hyper.eps = eps;
                }
                Ok(Method::AdaGrad(hyper))
            }
            other => Err(ConfigError::UnknownMethod(other.to_string())),
        }
    }

    /// The explicit label if set, else the method's own descriptor.
    pub fn display_label(&self) -> Result<String, ConfigError> {
        Ok(match &self.label {
            Some(label) => label.clone(),
            None => self.build()?.label(),
        })
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks run settings and builds every method, returning (label,
    /// method) pairs in config order.
    pub fn validate(&self) -> Result<Vec<(String, Method)>, ConfigError> {
        let bad = |field, message: String| Err(ConfigError::BadValue { field, message });
        if self.n_seeds < 1 {
            return bad("n_seeds", "must be at least 1".into());
        }
        if self.max_iters < 1 {
            return bad("max_iters", "must be at least 1".into());
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad("eta", format!("must be positive, got {}", self.eta));
        }
        if !(self.stop_energy >= 0.0) {
            return bad(
                "stop_energy",
                format!("must be nonnegative, got {}", self.stop_energy),
            );
        }
        match self.objective.as_str() {
            "mlp-sine" | "two-well" | "quadratic" => {}
            other => return Err(ConfigError::UnknownObjective(other.to_string())),
        }
        if self.methods.is_empty() {
            return bad("method", "at least one [[method]] table required".into());
        }
        let mut labeled = Vec::with_capacity(self.methods.len());
        for spec in &self.methods {
            let method = spec.build()?;
            let label = spec.display_label()?;
            if labeled.iter().any(|(l, _)| l == &label) {
                return bad("label", format!("duplicate method label {label:?}"));
            }
            labeled.push((label, method));
        }
        Ok(labeled)
    }

    /// Instantiates the objective named in the config.
    pub fn build_objective(&self) -> Result<Box<dyn Objective + Send + Sync>, ConfigError> {
        match self.objective.as_str() {
            "mlp-sine" => {
                let n = self.samples.unwrap_or(DEFAULT_SAMPLES);
                if n < 1 {
                    return Err(ConfigError::BadValue {
                        field: "samples",
                        message: "must be at least 1".into(),
                    });
                }
                let seed = self.data_seed.unwrap_or(DEFAULT_DATA_SEED);
                Ok(Box::new(MlpSine::new(gen_dataset(n, seed))))
            }
            "two-well" => Ok(Box::new(TwoWell::new())),
            "quadratic" => Ok(Box::new(Quadratic::one_d(1.0, 1.0))),
            other => Err(ConfigError::UnknownObjective(other.to_string())),
        }
    }

    pub fn opt_config(&self) -> OptConfig {
        OptConfig::new(self.eta, self.max_iters, self.stop_energy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
objective = "mlp-sine"
n_seeds = 4
max_iters = 100
stop_energy = 1e-4

[[method]]
kind = "pfta"
alpha = 0.03
beta = 0.1
p = 100
q = 65

[[method]]
kind = "sgd"
lr = 0.04
"#;

    #[test]
    fn parses_and_validates_sample() {
        let config = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(config.n_seeds, 4);
        assert_eq!(config.eta, 1.0);
        let methods = config.validate().unwrap();
        assert_eq!(methods.len(), 2);
        assert!(matches!(methods[0].1, Method::Rule(_)));
        assert!(matches!(methods[1].1, Method::Sgd(_)));
        config.build_objective().unwrap();
    }

    #[test]
    fn toml_round_trip_preserves_config() {
        let config = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        let back = ExperimentConfig::from_toml_str(&config.to_toml_string()).unwrap();
        assert_eq!(back, config);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_toml_str("objective = \"quadratic\"\nbogus = 3\n");
        assert!(matches!(err, Err(ConfigError::Parse(_))));
        let err = ExperimentConfig::from_toml_str(
            "objective = \"quadratic\"\n[[method]]\nkind = \"sgd\"\nwhatever = 1\n",
        );
        assert!(matches!(err, Err(ConfigError::Parse(_))));
    }

    #[test]
    fn missing_and_foreign_fields_are_rejected() {
        let spec = MethodSpec {
            kind: "ta".into(),
            beta: Some(1.0),
            ..Default::default()
        };
        assert!(matches!(
            spec.build(),
            Err(ConfigError::MissingField { field: "p", .. })
        ));

        let spec = MethodSpec {
            kind: "sgd".into(),
            beta: Some(1.0),
            ..Default::default()
        };
        assert!(matches!(
            spec.build(),
            Err(ConfigError::UnexpectedField { field: "beta", .. })
        ));
    }

    #[test]
    fn bad_settings_are_rejected() {
        let mut config = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        config.n_seeds = 0;
        assert!(matches!(
            config.validate(),
            Err(ConfigError::BadValue {
                field: "n_seeds",
                ..
            })
        ));

        let mut config = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        config.objective = "rosenbrock".into();
        assert!(matches!(
            config.validate(),
            Err(ConfigError::UnknownObjective(_))
        ));

        let mut config = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        config.methods[0].beta = Some(-1.0);
        assert!(matches!(
            config.validate(),
            Err(ConfigError::BadValue { .. })
        ));
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        let mut config = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        config.methods[0].label = Some("x".into());
        config.methods[1].label = Some("x".into());
        assert!(matches!(
            config.validate(),
            Err(ConfigError::BadValue { field: "label", .. })
        ));
    }
}
