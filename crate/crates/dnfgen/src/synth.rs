//! Planted-rule corpus generation with controllable label noise.
//!
//! Each label owns a small DNF over trigger words that no other label uses;
//! every generated message contains all words of one planted clause plus
//! background words drawn from a pool disjoint from every trigger. Before
//! noise, a message therefore satisfies exactly its own label's rule, and a
//! noiseless corpus is perfectly separable by the planted clauses.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{LabeledCorpus, RawRecord};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct PlantedLabel {
    pub name: String,
    /// The planted DNF: each inner list is one clause's words.
    pub clauses: Vec<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct PlantedSpec {
    pub labels: Vec<PlantedLabel>,
    pub samples_per_label: usize,
    /// Size of the shared background word pool (`BG00`, `BG01`, ...).
    pub background_vocab: usize,
    /// Inclusive range of background words added per message.
    pub background_words_per_message: (usize, usize),
    /// Fraction of messages whose label is flipped to another label.
    pub noise_rate: f64,
    pub seed: u64,
}

impl PlantedSpec {
    /// A symmetric spec: each label gets one size-1 and one size-2 clause
    /// over its own trigger words.
    pub fn symmetric(
        n_labels: usize,
        samples_per_label: usize,
        background_vocab: usize,
        noise_rate: f64,
        seed: u64,
    ) -> PlantedSpec {
        let labels = (0..n_labels)
            .map(|i| PlantedLabel {
                name: format!("L{i:02}"),
                clauses: vec![
                    vec![format!("T{i}A")],
                    vec![format!("T{i}B"), format!("T{i}C")],
                ],
            })
            .collect();
        PlantedSpec {
            labels,
            samples_per_label,
            background_vocab,
            background_words_per_message: (3, 6),
            noise_rate,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidHyper(msg));
        if self.labels.is_empty() || self.samples_per_label == 0 {
            return fail("planted spec needs labels and samples".into());
        }
        if !(0.0..0.5).contains(&self.noise_rate) {
            return fail(format!("noise_rate must be in [0, 0.5), got {}", self.noise_rate));
        }
        if self.background_words_per_message.0 > self.background_words_per_message.1 {
            return fail("empty background word range".into());
        }
        let mut seen_triggers: Vec<&str> = Vec::new();
        for label in &self.labels {
            if label.clauses.is_empty() || label.clauses.iter().any(|c| c.is_empty()) {
                return fail(format!("label {} has an empty clause", label.name));
            }
            for clause in &label.clauses {
                for word in clause {
                    if word.starts_with("BG") {
                        return fail(format!("trigger word '{word}' collides with the background pool"));
                    }
                }
            }
        }
        for (i, label) in self.labels.iter().enumerate() {
            for clause in &label.clauses {
                for word in clause {
                    let owned_elsewhere = self.labels.iter().enumerate().any(|(j, other)| {
                        j != i && other.clauses.iter().any(|c| c.contains(word))
                    });
                    if owned_elsewhere {
                        return fail(format!(
                            "trigger word '{word}' is shared between labels; rules must be disjoint"
                        ));
                    }
                    seen_triggers.push(word);
                }
            }
        }
        Ok(())
    }
}

/// Generates the corpus: `samples_per_label` messages per label, shuffled,
/// then label-flip noise. Deterministic per seed.
pub fn generate(spec: &PlantedSpec) -> Result<LabeledCorpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let background: Vec<String> = (0..spec.background_vocab)
        .map(|i| format!("BG{i:02}"))
        .collect();

    let mut records = Vec::with_capacity(spec.labels.len() * spec.samples_per_label);
    for label in &spec.labels {
        for _ in 0..spec.samples_per_label {
            let clause = &label.clauses[rng.gen_range(0..label.clauses.len())];
            let mut words: Vec<String> = clause.clone();
            if !background.is_empty() {
                let (lo, hi) = spec.background_words_per_message;
                let n_bg = rng.gen_range(lo..=hi);
                for _ in 0..n_bg {
                    words.push(background[rng.gen_range(0..background.len())].clone());
                }
            }
            // Shuffle word order; bag-of-words features ignore it anyway.
            for i in (1..words.len()).rev() {
                let j = rng.gen_range(0..=i);
                words.swap(i, j);
            }
            records.push(RawRecord {
                message: words.join(" "),
                label: label.name.clone(),
            });
        }
    }
    for i in (1..records.len()).rev() {
        let j = rng.gen_range(0..=i);
        records.swap(i, j);
    }
    if spec.noise_rate > 0.0 && spec.labels.len() > 1 {
        let names: Vec<&str> = spec.labels.iter().map(|l| l.name.as_str()).collect();
        for record in records.iter_mut() {
            if rng.gen_bool(spec.noise_rate) {
                loop {
                    let pick = names[rng.gen_range(0..names.len())];
                    if pick != record.label {
                        record.label = pick.to_string();
                        break;
                    }
                }
            }
        }
    }
    Ok(LabeledCorpus::from_records(records))
}
