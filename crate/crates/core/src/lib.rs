//! Estimating per-instance misclassification probability over a diverse
//! classifier ensemble, filtering detrimental training instances, and
//! comparing the effect of filtering against random hyper-parameter search.
//!
//! The crate is organised around the workflow it supports:
//!
//! * [`data`] — dataset representation, CSV/ARFF ingestion, stratified
//!   repeated cross-validation partitions, and a synthetic two-cluster
//!   generator with planted label noise.
//! * [`learners`] — a self-contained classifier roster (k-NN, naive Bayes,
//!   decision tree, random forest, rule learner, MLP, logistic regression,
//!   locally weighted voting), each with a declared hyper-parameter space.
//! * [`hardness`] — per-instance probability of correct classification,
//!   averaged over an ensemble under repeated stratified cross-validation.
//! * [`filtering`] — fixed-threshold ensemble filtering, greedy adaptive
//!   filter construction, and a tiny-N exhaustive-subset oracle.
//! * [`hpo`] — random search over a learner's hyper-parameter space.
//! * [`diversity`] — classifier output difference (COD), agglomerative
//!   clustering of learners, and representative selection.
//! * [`eval`] — cross-validation accuracy, relative reduction metrics, and
//!   the Wilcoxon signed-ranks test.
//! * [`harness`] — experiment orchestration over a dataset corpus and
//!   report emission (JSON / CSV / markdown).

pub mod data;
pub mod diversity;
pub mod error;
pub mod eval;
pub mod filtering;
pub mod hardness;
pub mod harness;
pub mod hpo;
pub mod learners;
pub mod seeds;

pub use error::{Error, Result};
