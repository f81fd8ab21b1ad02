//! The classifier roster: eight from-scratch learners, each with default
//! hyper-parameters and a declared randomized-search space.
//!
//! Missing-value policies are fixed per learner family: naive Bayes skips
//! missing cells in its likelihood products; distance-based learners (k-NN,
//! locally weighted) charge a distance contribution of 1.0 for a missing
//! cell; trees send missing values down the majority branch; the rule
//! learner treats a condition on a missing cell as unsatisfied; the vector
//! learners (MLP, logistic) encode a missing numeric cell as the range
//! midpoint and a missing nominal cell as an all-zero one-hot block.
//!
//! Nominal features use overlap distance (0 if equal, 1 otherwise) and
//! numeric features are range-normalized per training set, for the
//! distance-based learners only.

mod distance;
mod knn;
mod lwl;
mod naive_bayes;
mod neural;
mod rules;
pub mod stubs;
mod tree;

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Instance};
use crate::error::{Error, Result};

/// Closed enumeration of the available learning algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmId {
    Knn,
    NaiveBayes,
    DecisionTree,
    RandomForest,
    RuleLearner,
    Mlp,
    Logistic,
    LocallyWeighted,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 8] = [
        AlgorithmId::Knn,
        AlgorithmId::NaiveBayes,
        AlgorithmId::DecisionTree,
        AlgorithmId::RandomForest,
        AlgorithmId::RuleLearner,
        AlgorithmId::Mlp,
        AlgorithmId::Logistic,
        AlgorithmId::LocallyWeighted,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmId::Knn => "knn",
            AlgorithmId::NaiveBayes => "naive_bayes",
            AlgorithmId::DecisionTree => "decision_tree",
            AlgorithmId::RandomForest => "random_forest",
            AlgorithmId::RuleLearner => "rule_learner",
            AlgorithmId::Mlp => "mlp",
            AlgorithmId::Logistic => "logistic",
            AlgorithmId::LocallyWeighted => "locally_weighted",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        AlgorithmId::ALL
            .iter()
            .copied()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm '{s}'")))
    }
}

impl std::fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A hyper-parameter value: integer, real, or categorical choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Choice(String),
}

impl std::fmt::Display for ParamValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Real(v) => write!(f, "{v}"),
            ParamValue::Choice(v) => f.write_str(v),
        }
    }
}

/// A (possibly partial) hyper-parameter assignment; serializes as a flat
/// JSON object keyed by parameter name.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Hyperparameters(pub BTreeMap<String, ParamValue>);

impl Hyperparameters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, name: &str, value: ParamValue) -> Self {
        self.0.insert(name.to_string(), value);
        self
    }

    pub fn int(self, name: &str, value: i64) -> Self {
        self.set(name, ParamValue::Int(value))
    }

    pub fn real(self, name: &str, value: f64) -> Self {
        self.set(name, ParamValue::Real(value))
    }

    pub fn choice(self, name: &str, value: &str) -> Self {
        self.set(name, ParamValue::Choice(value.to_string()))
    }

    pub fn get(&self, name: &str) -> Option<&ParamValue> {
        self.0.get(name)
    }

    fn get_int(&self, name: &str) -> i64 {
        match self.0.get(name) {
            Some(ParamValue::Int(v)) => *v,
            other => panic!("resolved parameters must hold int '{name}', got {other:?}"),
        }
    }

    fn get_real(&self, name: &str) -> f64 {
        match self.0.get(name) {
            Some(ParamValue::Real(v)) => *v,
            Some(ParamValue::Int(v)) => *v as f64,
            other => panic!("resolved parameters must hold real '{name}', got {other:?}"),
        }
    }

    fn get_choice(&self, name: &str) -> &str {
        match self.0.get(name) {
            Some(ParamValue::Choice(v)) => v,
            other => panic!("resolved parameters must hold choice '{name}', got {other:?}"),
        }
    }
}

/// Domain of one hyper-parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamDomain {
    /// Inclusive integer range.
    Int { lo: i64, hi: i64 },
    /// Inclusive real range, sampled uniformly.
    Real { lo: f64, hi: f64 },
    /// Strictly positive real range, sampled uniformly in log space.
    LogReal { lo: f64, hi: f64 },
    /// Categorical choice, sampled uniformly.
    Choice { options: Vec<&'static str> },
}

/// One declared hyper-parameter with its default.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub domain: ParamDomain,
    pub default: ParamValue,
}

/// The closed hyper-parameter space of one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperparameterSpace {
    pub algorithm: AlgorithmId,
    pub params: Vec<ParamSpec>,
}

impl HyperparameterSpace {
    pub fn defaults(&self) -> Hyperparameters {
        Hyperparameters(
            self.params
                .iter()
                .map(|p| (p.name.to_string(), p.default.clone()))
                .collect(),
        )
    }

    /// Check every provided name/value against the space.
    pub fn validate(&self, hp: &Hyperparameters) -> Result<()> {
        for (name, value) in &hp.0 {
            let spec = self.params.iter().find(|p| p.name == name).ok_or_else(|| {
                Error::InvalidParams {
                    algorithm: self.algorithm.name().to_string(),
                    msg: format!("unknown parameter '{name}'"),
                }
            })?;
            let ok = match (&spec.domain, value) {
                (ParamDomain::Int { lo, hi }, ParamValue::Int(v)) => v >= lo && v <= hi,
                (ParamDomain::Real { lo, hi }, ParamValue::Real(v)) => v >= lo && v <= hi,
                (ParamDomain::Real { lo, hi }, ParamValue::Int(v)) => {
                    (*v as f64) >= *lo && (*v as f64) <= *hi
                }
                (ParamDomain::LogReal { lo, hi }, ParamValue::Real(v)) => v >= lo && v <= hi,
                (ParamDomain::LogReal { lo, hi }, ParamValue::Int(v)) => {
                    (*v as f64) >= *lo && (*v as f64) <= *hi
                }
                (ParamDomain::Choice { options }, ParamValue::Choice(v)) => {
                    options.iter().any(|o| o == v)
                }
                _ => false,
            };
            if !ok {
                return Err(Error::InvalidParams {
                    algorithm: self.algorithm.name().to_string(),
                    msg: format!("value {value} out of domain for '{name}'"),
                });
            }
        }
        Ok(())
    }

    /// Validate, then fill any absent parameters with their defaults.
    pub fn resolve(&self, hp: &Hyperparameters) -> Result<Hyperparameters> {
        self.validate(hp)?;
        let mut resolved = self.defaults();
        for (name, value) in &hp.0 {
            let value = match (value, self.domain_of(name)) {
                // Keep resolved reals typed as reals even when given as ints.
                (ParamValue::Int(v), Some(ParamDomain::Real { .. }))
                | (ParamValue::Int(v), Some(ParamDomain::LogReal { .. })) => {
                    ParamValue::Real(*v as f64)
                }
                _ => value.clone(),
            };
            resolved.0.insert(name.clone(), value);
        }
        Ok(resolved)
    }

    fn domain_of(&self, name: &str) -> Option<&ParamDomain> {
        self.params.iter().find(|p| p.name == name).map(|p| &p.domain)
    }

    /// Draw one full assignment uniformly from the space.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Hyperparameters {
        let mut hp = BTreeMap::new();
        for p in &self.params {
            let value = match &p.domain {
                ParamDomain::Int { lo, hi } => ParamValue::Int(rng.gen_range(*lo..=*hi)),
                ParamDomain::Real { lo, hi } => ParamValue::Real(rng.gen_range(*lo..=*hi)),
                ParamDomain::LogReal { lo, hi } => {
                    ParamValue::Real(rng.gen_range(lo.ln()..=hi.ln()).exp())
                }
                ParamDomain::Choice { options } => {
                    ParamValue::Choice(options[rng.gen_range(0..options.len())].to_string())
                }
            };
            hp.insert(p.name.to_string(), value);
        }
        Hyperparameters(hp)
    }
}

/// The declared search space of an algorithm.
pub fn hyperparameter_space(algorithm: AlgorithmId) -> HyperparameterSpace {
    use AlgorithmId::*;
    use ParamDomain::*;
    let params = match algorithm {
        Knn => vec![
            ParamSpec {
                name: "k",
                domain: Int { lo: 1, hi: 25 },
                default: ParamValue::Int(5),
            },
            ParamSpec {
                name: "weighting",
                domain: Choice {
                    options: vec!["uniform", "inverse-distance"],
                },
                default: ParamValue::Choice("uniform".into()),
            },
        ],
        NaiveBayes => vec![
            ParamSpec {
                name: "numeric_model",
                domain: Choice {
                    options: vec!["gaussian", "histogram-10bin"],
                },
                default: ParamValue::Choice("gaussian".into()),
            },
            ParamSpec {
                name: "laplace",
                domain: Real { lo: 0.1, hi: 5.0 },
                default: ParamValue::Real(1.0),
            },
        ],
        DecisionTree => vec![
            ParamSpec {
                name: "min_leaf",
                domain: Int { lo: 1, hi: 20 },
                default: ParamValue::Int(2),
            },
            ParamSpec {
                name: "confidence",
                domain: Real { lo: 0.05, hi: 0.5 },
                default: ParamValue::Real(0.25),
            },
            ParamSpec {
                name: "pruning",
                domain: Choice {
                    options: vec!["on", "off"],
                },
                default: ParamValue::Choice("on".into()),
            },
        ],
        RandomForest => vec![
            ParamSpec {
                name: "trees",
                domain: Int { lo: 10, hi: 200 },
                default: ParamValue::Int(50),
            },
            ParamSpec {
                name: "features_per_split",
                domain: Choice {
                    options: vec!["sqrt", "log2", "all"],
                },
                default: ParamValue::Choice("sqrt".into()),
            },
            ParamSpec {
                name: "max_depth",
                domain: Int { lo: 1, hi: 30 },
                default: ParamValue::Int(30),
            },
            // The "unlimited" flag of the declared max_depth domain.
            ParamSpec {
                name: "unlimited_depth",
                domain: Choice {
                    options: vec!["on", "off"],
                },
                default: ParamValue::Choice("on".into()),
            },
        ],
        RuleLearner => vec![
            ParamSpec {
                name: "min_coverage",
                domain: Int { lo: 1, hi: 10 },
                default: ParamValue::Int(2),
            },
            ParamSpec {
                name: "pruning",
                domain: Choice {
                    options: vec!["on", "off"],
                },
                default: ParamValue::Choice("on".into()),
            },
            ParamSpec {
                name: "optimization_passes",
                domain: Int { lo: 0, hi: 3 },
                default: ParamValue::Int(1),
            },
        ],
        Mlp => vec![
            ParamSpec {
                name: "hidden_units",
                domain: Int { lo: 2, hi: 64 },
                default: ParamValue::Int(16),
            },
            ParamSpec {
                name: "learning_rate",
                domain: LogReal { lo: 1e-4, hi: 1e-1 },
                default: ParamValue::Real(0.1),
            },
            ParamSpec {
                name: "epochs",
                domain: Int { lo: 10, hi: 500 },
                default: ParamValue::Int(200),
            },
            ParamSpec {
                name: "momentum",
                domain: Real { lo: 0.0, hi: 0.9 },
                default: ParamValue::Real(0.8),
            },
        ],
        Logistic => vec![
            ParamSpec {
                name: "l2",
                domain: LogReal { lo: 1e-6, hi: 1e1 },
                default: ParamValue::Real(1e-3),
            },
            ParamSpec {
                name: "epochs",
                domain: Int { lo: 50, hi: 1000 },
                default: ParamValue::Int(500),
            },
            ParamSpec {
                name: "learning_rate",
                domain: LogReal { lo: 1e-4, hi: 1e0 },
                default: ParamValue::Real(0.1),
            },
        ],
        LocallyWeighted => vec![
            ParamSpec {
                name: "neighborhood",
                domain: Int { lo: 5, hi: 50 },
                default: ParamValue::Int(20),
            },
            ParamSpec {
                name: "kernel",
                domain: Choice {
                    options: vec!["linear", "inverse"],
                },
                default: ParamValue::Choice("linear".into()),
            },
        ],
    };
    HyperparameterSpace { algorithm, params }
}

/// The declared defaults of an algorithm.
pub fn default_hyperparameters(algorithm: AlgorithmId) -> Hyperparameters {
    hyperparameter_space(algorithm).defaults()
}

/// Serializable description of a learner, used for report provenance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LearnerDescriptor {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub params: Option<serde_json::Value>,
}

impl LearnerDescriptor {
    /// Canonical string form, usable as a cache key.
    pub fn key(&self) -> String {
        match &self.params {
            Some(p) => format!("{}{}", self.name, serde_json::to_string(p).expect("json")),
            None => self.name.clone(),
        }
    }
}

/// A trained classifier: a total function from conforming instances to one
/// of the classes seen at training time.
pub trait Model: Send + Sync {
    fn predict(&self, instance: &Instance) -> Result<usize>;
}

/// Anything that can be trained on a dataset. [`LearnerSpec`] is the
/// production implementation; the [`stubs`] module provides trivial
/// learners used as test oracles.
pub trait Learner: Send + Sync {
    fn descriptor(&self) -> LearnerDescriptor;
    fn train(&self, data: &Dataset, seed: u64) -> Result<Box<dyn Model>>;
}

/// An algorithm plus a (possibly partial) hyper-parameter assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub algorithm: AlgorithmId,
    #[serde(default, skip_serializing_if = "is_empty_params")]
    pub params: Hyperparameters,
}

fn is_empty_params(p: &Hyperparameters) -> bool {
    p.0.is_empty()
}

impl LearnerSpec {
    pub fn with_defaults(algorithm: AlgorithmId) -> Self {
        LearnerSpec {
            algorithm,
            params: Hyperparameters::default(),
        }
    }

    pub fn new(algorithm: AlgorithmId, params: Hyperparameters) -> Self {
        LearnerSpec { algorithm, params }
    }
}

impl Learner for LearnerSpec {
    fn descriptor(&self) -> LearnerDescriptor {
        let params = if self.params.0.is_empty() {
            None
        } else {
            Some(serde_json::to_value(&self.params).expect("params serialize"))
        };
        LearnerDescriptor {
            name: self.algorithm.name().to_string(),
            params,
        }
    }

    fn train(&self, data: &Dataset, seed: u64) -> Result<Box<dyn Model>> {
        Ok(Box::new(train(self.algorithm, &self.params, data, seed)?))
    }
}

/// One spec per algorithm, all at defaults — the full candidate roster.
pub fn default_roster() -> Vec<LearnerSpec> {
    AlgorithmId::ALL
        .iter()
        .map(|a| LearnerSpec::with_defaults(*a))
        .collect()
}

/// The per-algorithm learned state.
#[derive(Debug)]
enum ModelKind {
    Knn(knn::KnnModel),
    NaiveBayes(naive_bayes::NaiveBayesModel),
    DecisionTree(tree::TreeModel),
    RandomForest(tree::ForestModel),
    RuleLearner(rules::RuleListModel),
    Mlp(neural::MlpModel),
    Logistic(neural::LogisticModel),
    LocallyWeighted(lwl::LwlModel),
}

/// An immutable trained model together with its provenance.
#[derive(Debug)]
pub struct TrainedModel {
    pub algorithm: AlgorithmId,
    /// The fully resolved assignment the model was trained with.
    pub params: Hyperparameters,
    /// Class list the model was trained against.
    pub classes: Vec<String>,
    schema: Vec<crate::data::FeatureSpec>,
    kind: ModelKind,
}

impl TrainedModel {
    /// Predicted class index for a probe conforming to the training schema.
    pub fn predict(&self, instance: &Instance) -> Result<usize> {
        self.check_schema(instance)?;
        let class = match &self.kind {
            ModelKind::Knn(m) => m.predict(instance),
            ModelKind::NaiveBayes(m) => m.predict(instance),
            ModelKind::DecisionTree(m) => m.predict(instance),
            ModelKind::RandomForest(m) => m.predict(instance),
            ModelKind::RuleLearner(m) => m.predict(instance),
            ModelKind::Mlp(m) => m.predict(instance),
            ModelKind::Logistic(m) => m.predict(instance),
            ModelKind::LocallyWeighted(m) => m.predict(instance),
        };
        debug_assert!(class < self.classes.len());
        Ok(class)
    }

    fn check_schema(&self, instance: &Instance) -> Result<()> {
        if instance.values.len() != self.schema.len() {
            return Err(Error::SchemaMismatch(format!(
                "probe has {} values, model was trained on {} features",
                instance.values.len(),
                self.schema.len()
            )));
        }
        for (cell, feature) in instance.values.iter().zip(&self.schema) {
            match (cell, &feature.kind) {
                (crate::data::Cell::Category(c), crate::data::FeatureKind::Nominal(cats)) => {
                    if *c >= cats.len() {
                        return Err(Error::SchemaMismatch(format!(
                            "category index {c} out of range for feature '{}'",
                            feature.name
                        )));
                    }
                }
                (crate::data::Cell::Category(_), crate::data::FeatureKind::Numeric) => {
                    return Err(Error::SchemaMismatch(format!(
                        "categorical value in numeric feature '{}'",
                        feature.name
                    )));
                }
                (crate::data::Cell::Numeric(_), crate::data::FeatureKind::Nominal(_)) => {
                    return Err(Error::SchemaMismatch(format!(
                        "numeric value in nominal feature '{}'",
                        feature.name
                    )));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

impl Model for TrainedModel {
    fn predict(&self, instance: &Instance) -> Result<usize> {
        TrainedModel::predict(self, instance)
    }
}

/// Train `algorithm` with `params` on `data`.
///
/// Deterministic given `(algorithm, params, data, seed)`: stochastic
/// learners draw only from streams derived from `seed`. Single-class
/// training data is legal and yields a constant classifier, because greedy
/// filtering may strip classes from a training split.
pub fn train(
    algorithm: AlgorithmId,
    params: &Hyperparameters,
    data: &Dataset,
    seed: u64,
) -> Result<TrainedModel> {
    if data.is_empty() {
        return Err(Error::Train(format!(
            "cannot train {algorithm} on an empty dataset"
        )));
    }
    let space = hyperparameter_space(algorithm);
    let resolved = space.resolve(params)?;

    let kind = match algorithm {
        AlgorithmId::Knn => ModelKind::Knn(knn::fit(&resolved, data)),
        AlgorithmId::NaiveBayes => ModelKind::NaiveBayes(naive_bayes::fit(&resolved, data)),
        AlgorithmId::DecisionTree => ModelKind::DecisionTree(tree::fit_tree(&resolved, data)),
        AlgorithmId::RandomForest => {
            ModelKind::RandomForest(tree::fit_forest(&resolved, data, seed, true))
        }
        AlgorithmId::RuleLearner => ModelKind::RuleLearner(rules::fit(&resolved, data)),
        AlgorithmId::Mlp => ModelKind::Mlp(neural::fit_mlp(&resolved, data, seed)),
        AlgorithmId::Logistic => ModelKind::Logistic(neural::fit_logistic(&resolved, data)),
        AlgorithmId::LocallyWeighted => ModelKind::LocallyWeighted(lwl::fit(&resolved, data)),
    };

    Ok(TrainedModel {
        algorithm,
        params: resolved,
        classes: data.classes.clone(),
        schema: data.features.clone(),
        kind,
    })
}

#[cfg(test)]
mod tests;
