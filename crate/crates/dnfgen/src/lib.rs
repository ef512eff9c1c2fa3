//! Interpretable OR-of-ANDs (DNF) Boolean decision rules for multiclass
//! short-text classification.
//!
//! One binary rule is learned per label (one-vs-rest). Each rule is a small
//! set of clauses, where a clause is a conjunction of word features and
//! satisfies a message when every word occurs in it. Training solves a
//! set-covering integer program per label: the LP relaxation is solved by
//! column generation (clauses are priced in on demand), and the final rule
//! is extracted by solving the restricted master with integrality.
//!
//! Prediction evaluates a message against every rule, ranks the labels
//! whose rules fire by a per-clause weight `(Wp - Wn) * n_k`, and reports
//! the satisfied clauses as the explanation.
//!
//! The crate is organised along the training pipeline:
//!
//! * [`corpus`] — loading, cleaning, label filtering, splitting
//! * [`binarizer`] — vocabulary construction and bag-of-words bit vectors
//! * [`lp`] — dense two-phase simplex with primal and dual solutions
//! * [`master`] — the restricted master problem for one label
//! * [`pricing`] — heuristic and exact search for negative reduced cost clauses
//! * [`trainer`] — per-label column generation loop and multiclass orchestration
//! * [`predictor`] — candidate lists, ranking, explanations
//! * [`eval`] — accuracy and list-length metrics
//! * [`synth`] — planted-rule corpus generation for testing
//! * [`model`] — JSON persistence of trained bundles
//!
//! With the default `parallel` feature, labels train and datasets evaluate
//! on a rayon pool; disabling it leaves a purely sequential build with the
//! same results.

pub mod binarizer;
pub mod bitset;
pub mod corpus;
mod error;
pub mod eval;
pub mod lp;
pub mod master;
pub mod model;
mod par;
pub mod predictor;
pub mod pricing;
pub mod synth;
pub mod trainer;

pub use binarizer::{BinaryExample, Vocabulary};
pub use bitset::Bits;
pub use corpus::{LabeledCorpus, RawRecord};
pub use error::{Error, Result};
pub use master::{Clause, MasterSolution, RmpState};
pub use pricing::{DualSnapshot, PricingConfig, ScaleMode};
pub use trainer::{DnfRule, Hyperparameters, ModelBundle, WeightedClause};
