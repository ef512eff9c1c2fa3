//! JSON persistence of trained model bundles.
//!
//! The file stores clauses as word lists so it stays readable and robust to
//! vocabulary reordering. Serialization is fully deterministic (sorted
//! label map, no timestamps), so identical training runs produce identical
//! bytes, and `load(save(m))` round-trips exactly.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::binarizer::Vocabulary;
use crate::master::Clause;
use crate::trainer::{DnfRule, Hyperparameters, ModelBundle, Provenance, WeightedClause};
use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ClauseFile {
    words: Vec<String>,
    pos_acc: f64,
    neg_acc: f64,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
struct RuleFile {
    clauses: Vec<ClauseFile>,
    n_k: usize,
    train_positives: usize,
    train_objective: f64,
    cg_terminated_by_proof: bool,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    vocabulary: Vec<String>,
    hyperparameters: Hyperparameters,
    rules: BTreeMap<String, RuleFile>,
    provenance: Provenance,
}

/// Serializes a bundle to its canonical JSON bytes.
pub fn to_json_bytes(bundle: &ModelBundle) -> Vec<u8> {
    let rules = bundle
        .rules
        .iter()
        .map(|(label, rule)| {
            let clauses = rule
                .clauses
                .iter()
                .map(|w| ClauseFile {
                    words: w
                        .clause
                        .features()
                        .iter()
                        .map(|&j| bundle.vocabulary.word(j).to_string())
                        .collect(),
                    pos_acc: w.pos_acc,
                    neg_acc: w.neg_acc,
                    weight: w.weight,
                })
                .collect();
            (
                label.clone(),
                RuleFile {
                    clauses,
                    n_k: rule.n_k,
                    train_positives: rule.train_positives,
                    train_objective: rule.train_objective,
                    cg_terminated_by_proof: rule.cg_terminated_by_proof,
                },
            )
        })
        .collect();
    let file = ModelFile {
        format_version: FORMAT_VERSION,
        vocabulary: bundle.vocabulary.words().to_vec(),
        hyperparameters: bundle.hyper.clone(),
        rules,
        provenance: bundle.provenance.clone(),
    };
    let mut bytes = serde_json::to_vec_pretty(&file).expect("model serialization cannot fail");
    bytes.push(b'\n');
    bytes
}

pub fn save_model(bundle: &ModelBundle, path: &Path) -> Result<()> {
    std::fs::write(path, to_json_bytes(bundle)).map_err(|e| Error::io(path, e))
}

/// Parses model bytes, validating the format version and that every clause
/// word is present in the stored vocabulary.
pub fn from_json_bytes(bytes: &[u8]) -> Result<ModelBundle> {
    let value: serde_json::Value = serde_json::from_slice(bytes)
        .map_err(|e| Error::Model(format!("not valid JSON: {e}")))?;
    let version = value
        .get("format_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::Model("missing format_version".into()))?;
    if version != FORMAT_VERSION as u64 {
        return Err(Error::Model(format!(
            "unsupported format_version {version} (this build reads {FORMAT_VERSION})"
        )));
    }
    let file: ModelFile = serde_json::from_value(value)
        .map_err(|e| Error::Model(format!("malformed model file: {e}")))?;

    let budget = file.hyperparameters.vocab_budget;
    let vocabulary = Vocabulary::from_words(file.vocabulary, budget)?;
    let mut rules = BTreeMap::new();
    for (label, rule) in file.rules {
        let mut clauses = Vec::with_capacity(rule.clauses.len());
        for cf in rule.clauses {
            let mut features = Vec::with_capacity(cf.words.len());
            for word in &cf.words {
                let j = vocabulary.index_of(word).ok_or_else(|| {
                    Error::Model(format!(
                        "clause word '{word}' of label '{label}' is not in the vocabulary"
                    ))
                })?;
                features.push(j);
            }
            clauses.push(WeightedClause {
                clause: Clause::new(features),
                pos_acc: cf.pos_acc,
                neg_acc: cf.neg_acc,
                weight: cf.weight,
            });
        }
        rules.insert(
            label.clone(),
            DnfRule {
                label,
                clauses,
                n_k: rule.n_k,
                train_positives: rule.train_positives,
                train_objective: rule.train_objective,
                cg_terminated_by_proof: rule.cg_terminated_by_proof,
            },
        );
    }
    Ok(ModelBundle {
        vocabulary,
        hyper: file.hyperparameters,
        rules,
        provenance: file.provenance,
    })
}

pub fn load_model(path: &Path) -> Result<ModelBundle> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    from_json_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binarizer::{binarize_corpus, build_vocabulary};
    use crate::synth::PlantedSpec;
    use crate::trainer::{train_all, Hyperparameters};

    fn trained_bundle() -> ModelBundle {
        let corpus = crate::synth::generate(&PlantedSpec::symmetric(2, 30, 8, 0.0, 3)).unwrap();
        let hyper = Hyperparameters {
            neg_ratio: 3.0,
            vocab_budget: 50,
            ..Hyperparameters::default()
        };
        let vocab = build_vocabulary(&corpus, hyper.vocab_budget, hyper.vocab_frequency).unwrap();
        let examples = binarize_corpus(&corpus, &vocab);
        train_all(&vocab, &examples, &hyper).unwrap().bundle
    }

    #[test]
    fn save_load_save_is_byte_identical() {
        let bundle = trained_bundle();
        let first = to_json_bytes(&bundle);
        let reloaded = from_json_bytes(&first).unwrap();
        let second = to_json_bytes(&reloaded);
        assert_eq!(first, second);
        assert_eq!(bundle.rules, reloaded.rules);
        assert_eq!(bundle.vocabulary.words(), reloaded.vocabulary.words());
    }

    #[test]
    fn unknown_version_is_hard_error() {
        let bundle = trained_bundle();
        let text = String::from_utf8(to_json_bytes(&bundle)).unwrap();
        let bumped = text.replace("\"format_version\": 1", "\"format_version\": 99");
        let err = from_json_bytes(bumped.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Model(_)), "{err}");
        assert!(err.to_string().contains("format_version 99"));
    }

    #[test]
    fn unknown_clause_word_is_error() {
        let bundle = trained_bundle();
        let mut value: serde_json::Value =
            serde_json::from_slice(&to_json_bytes(&bundle)).unwrap();
        let rules = value["rules"].as_object_mut().unwrap();
        let (_, rule) = rules.iter_mut().next().unwrap();
        rule["clauses"][0]["words"][0] = serde_json::json!("NOT-A-WORD");
        let err = from_json_bytes(value.to_string().as_bytes()).unwrap_err();
        assert!(err.to_string().contains("NOT-A-WORD"));
    }

    #[test]
    fn files_round_trip_on_disk() {
        let bundle = trained_bundle();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_model(&bundle, &path).unwrap();
        let reloaded = load_model(&path).unwrap();
        assert_eq!(bundle.rules, reloaded.rules);
    }
}
