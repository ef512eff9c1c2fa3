//! Bag-of-words vocabulary and binary feature vectors.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bitset::Bits;
use crate::corpus::{clean_message, LabeledCorpus};
use crate::{Error, Result};

/// How token frequency is counted when ranking vocabulary candidates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyMode {
    /// Every occurrence counts, repeats included.
    Occurrences,
    /// Each message counts a token at most once.
    Documents,
}

impl Default for FrequencyMode {
    fn default() -> Self {
        FrequencyMode::Occurrences
    }
}

/// An ordered word list with its inverse index. Feature id `j` is the
/// position of a word in the list.
#[derive(Clone, Debug)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, u32>,
    budget: usize,
}

impl Vocabulary {
    pub fn from_words(words: Vec<String>, budget: usize) -> Result<Vocabulary> {
        if words.len() > budget {
            return Err(Error::Model(format!(
                "vocabulary has {} words, budget is {budget}",
                words.len()
            )));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i as u32).is_some() {
                return Err(Error::Model(format!("duplicate vocabulary word '{w}'")));
            }
        }
        Ok(Vocabulary {
            words,
            index,
            budget,
        })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn index_of(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, feature: u32) -> &str {
        &self.words[feature as usize]
    }
}

/// One sample as a fixed-width bit vector over the vocabulary plus a label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryExample {
    pub id: u32,
    pub bits: Bits,
    pub label: String,
}

/// Builds the vocabulary from the training corpus: the `budget` most
/// frequent tokens of the cleaned messages, ties broken lexicographically.
pub fn build_vocabulary(
    train: &LabeledCorpus,
    budget: usize,
    mode: FrequencyMode,
) -> Result<Vocabulary> {
    if budget == 0 {
        return Err(Error::InvalidHyper("vocabulary budget must be >= 1".into()));
    }
    let mut counts: HashMap<String, usize> = HashMap::new();
    for record in train.records() {
        let cleaned = clean_message(&record.message);
        match mode {
            FrequencyMode::Occurrences => {
                for token in cleaned.split_whitespace() {
                    *counts.entry(token.to_string()).or_insert(0) += 1;
                }
            }
            FrequencyMode::Documents => {
                let mut seen: Vec<&str> = Vec::new();
                for token in cleaned.split_whitespace() {
                    if !seen.contains(&token) {
                        seen.push(token);
                    }
                }
                for token in seen {
                    *counts.entry(token.to_string()).or_insert(0) += 1;
                }
            }
        }
    }
    if counts.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(budget);
    let words = ranked.into_iter().map(|(w, _)| w).collect();
    Vocabulary::from_words(words, budget)
}

/// Converts an already-cleaned message into its feature bit vector. Word
/// order and multiplicity are discarded; out-of-vocabulary tokens are
/// ignored.
pub fn binarize(message: &str, vocab: &Vocabulary) -> Bits {
    let mut bits = Bits::zeros(vocab.len());
    for token in message.split_whitespace() {
        if let Some(j) = vocab.index_of(token) {
            bits.set(j as usize);
        }
    }
    bits
}

/// Binarizes every record of a corpus, cleaning messages first (cleaning is
/// idempotent, so pre-cleaned corpora are fine). Ids are assigned in corpus
/// order.
pub fn binarize_corpus(corpus: &LabeledCorpus, vocab: &Vocabulary) -> Vec<BinaryExample> {
    corpus
        .records()
        .iter()
        .enumerate()
        .map(|(i, r)| BinaryExample {
            id: i as u32,
            bits: binarize(&clean_message(&r.message), vocab),
            label: r.label.clone(),
        })
        .collect()
}

/// The feature ids whose bit is zero in the example (the complement of the
/// set bits).
pub fn zero_set(example: &BinaryExample) -> Vec<u32> {
    (0..example.bits.len() as u32)
        .filter(|&j| !example.bits.get(j as usize))
        .collect()
}
