//! Prediction: evaluate a message against every rule, rank the labels whose
//! rules fire, and report the satisfied clauses as the explanation.

use crate::binarizer::binarize;
use crate::bitset::Bits;
use crate::corpus::clean_message;
use crate::master::Clause;
use crate::trainer::{ModelBundle, WeightedClause};
use crate::{Error, Result};

/// One label whose rule evaluated TRUE on a message.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub label: String,
    /// Sum of the satisfied clauses' weights.
    pub score: f64,
    /// The satisfied clauses, in rule order: the explanation.
    pub satisfied_clauses: Vec<WeightedClause>,
}

/// True when every clause feature is set in the message bits.
pub fn satisfies(message_bits: &Bits, clause: &Clause) -> bool {
    clause.satisfied_by(message_bits)
}

/// All labels whose rule fires on the message, sorted by score descending,
/// ties by label ascending. An empty list is a legitimate abstention.
pub fn candidate_list(message: &str, model: &ModelBundle) -> Vec<Candidate> {
    candidate_list_opts(message, model, false)
}

/// Like [`candidate_list`]; with `clip_negative_weights` the score counts
/// negative-weight clauses as zero (the explanation still lists them).
pub fn candidate_list_opts(
    message: &str,
    model: &ModelBundle,
    clip_negative_weights: bool,
) -> Vec<Candidate> {
    let bits = binarize(&clean_message(message), &model.vocabulary);
    let mut candidates: Vec<Candidate> = model
        .rules
        .values()
        .filter_map(|rule| {
            let satisfied: Vec<WeightedClause> = rule
                .clauses
                .iter()
                .filter(|w| satisfies(&bits, &w.clause))
                .cloned()
                .collect();
            if satisfied.is_empty() {
                return None;
            }
            let score = satisfied
                .iter()
                .map(|w| {
                    if clip_negative_weights {
                        w.weight.max(0.0)
                    } else {
                        w.weight
                    }
                })
                .sum();
            Some(Candidate {
                label: rule.label.clone(),
                score,
                satisfied_clauses: satisfied,
            })
        })
        .collect();
    candidates.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.label.cmp(&b.label)));
    candidates
}

/// The first `min(k, len)` candidates of an already-ranked list.
pub fn top_k(candidates: &[Candidate], k: usize) -> Vec<Candidate> {
    candidates[..k.min(candidates.len())].to_vec()
}

/// The clauses of `label`'s rule satisfied by the message. An empty list is
/// a valid answer (the "why not" case). Unknown labels are an error.
pub fn explain(message: &str, label: &str, model: &ModelBundle) -> Result<Vec<WeightedClause>> {
    let Some(rule) = model.rules.get(label) else {
        return Err(Error::UnknownLabel {
            label: label.to_string(),
            available: model.rules.keys().cloned().collect(),
        });
    };
    let bits = binarize(&clean_message(message), &model.vocabulary);
    Ok(rule
        .clauses
        .iter()
        .filter(|w| satisfies(&bits, &w.clause))
        .cloned()
        .collect())
}
