//! Labeled text corpora: loading, message cleaning, rare-label filtering,
//! and train/validation/test splitting.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One labeled sample: a free-text message and its label string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRecord {
    pub message: String,
    pub label: String,
}

/// An ordered list of records plus per-label counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledCorpus {
    records: Vec<RawRecord>,
    label_counts: BTreeMap<String, usize>,
}

impl LabeledCorpus {
    pub fn from_records(records: Vec<RawRecord>) -> Self {
        let mut label_counts = BTreeMap::new();
        for r in &records {
            *label_counts.entry(r.label.clone()).or_insert(0) += 1;
        }
        LabeledCorpus {
            records,
            label_counts,
        }
    }

    pub fn records(&self) -> &[RawRecord] {
        &self.records
    }

    pub fn label_counts(&self) -> &BTreeMap<String, usize> {
        &self.label_counts
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Returns a copy with every message cleaned (see [`clean_message`]).
    pub fn cleaned(&self) -> LabeledCorpus {
        let records = self
            .records
            .iter()
            .map(|r| RawRecord {
                message: clean_message(&r.message),
                label: r.label.clone(),
            })
            .collect();
        LabeledCorpus::from_records(records)
    }
}

/// On-disk corpus format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Csv,
    Jsonl,
}

impl CorpusFormat {
    /// Guesses the format from a file extension (`.csv` vs `.jsonl`/`.json`).
    pub fn from_path(path: &Path) -> Option<CorpusFormat> {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Some(CorpusFormat::Csv),
            Some(e) if e.eq_ignore_ascii_case("jsonl") || e.eq_ignore_ascii_case("json") => {
                Some(CorpusFormat::Jsonl)
            }
            _ => None,
        }
    }
}

/// Loads a corpus from a CSV file (header `message,label`) or a JSONL file
/// (one `{"message": ..., "label": ...}` object per line).
///
/// An empty file yields an empty corpus; a malformed record is an error
/// naming the offending line.
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<LabeledCorpus> {
    let display = path.display().to_string();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    match format {
        CorpusFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(true)
                .from_reader(BufReader::new(file));
            for row in reader.deserialize::<RawRecord>() {
                match row {
                    Ok(rec) => records.push(rec),
                    Err(e) => {
                        let line = e
                            .position()
                            .map(|p| p.line() as usize)
                            .unwrap_or(records.len() + 2);
                        return Err(Error::Parse {
                            path: display,
                            line,
                            message: e.to_string(),
                        });
                    }
                }
            }
        }
        CorpusFormat::Jsonl => {
            for (idx, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|e| Error::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: RawRecord =
                    serde_json::from_str(&line).map_err(|e| Error::Parse {
                        path: display.clone(),
                        line: idx + 1,
                        message: e.to_string(),
                    })?;
                records.push(rec);
            }
        }
    }
    Ok(LabeledCorpus::from_records(records))
}

/// Writes a corpus in the same formats [`load_corpus`] reads.
pub fn save_corpus(corpus: &LabeledCorpus, path: &Path, format: CorpusFormat) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    match format {
        CorpusFormat::Csv => {
            let mut writer = csv::Writer::from_writer(file);
            for rec in corpus.records() {
                writer.serialize(rec).map_err(|e| Error::Parse {
                    path: path.display().to_string(),
                    line: 0,
                    message: e.to_string(),
                })?;
            }
            writer.flush().map_err(|e| Error::io(path, e))?;
        }
        CorpusFormat::Jsonl => {
            let mut out = std::io::BufWriter::new(file);
            for rec in corpus.records() {
                let line = serde_json::to_string(rec)
                    .expect("record serialization cannot fail");
                writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
            }
            out.flush().map_err(|e| Error::io(path, e))?;
        }
    }
    Ok(())
}

/// Replaces every punctuation character by a single space, keeping `/`.
///
/// Punctuation means any character that is not alphanumeric, not `/`, and
/// not whitespace. Case is left untouched and the result is idempotent;
/// tokenization is whitespace splitting downstream.
pub fn clean_message(raw: &str) -> String {
    raw.chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '/' || c.is_whitespace() {
                c
            } else {
                ' '
            }
        })
        .collect()
}

/// Drops every record whose label occurs fewer than `min_count` times.
pub fn filter_rare_labels(corpus: &LabeledCorpus, min_count: usize) -> LabeledCorpus {
    let records = corpus
        .records()
        .iter()
        .filter(|r| corpus.label_counts()[&r.label] >= min_count)
        .cloned()
        .collect();
    LabeledCorpus::from_records(records)
}

/// Splits a corpus into train/validation/test by a seeded uniform shuffle
/// followed by contiguous slicing.
///
/// Validation and test sizes are floor allocations; the remainder goes to
/// the training split. The split is not stratified by label.
pub fn split(
    corpus: &LabeledCorpus,
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<(LabeledCorpus, LabeledCorpus, LabeledCorpus)> {
    let (rt, rv, rs) = ratios;
    if rt <= 0.0 || rv <= 0.0 || rs <= 0.0 || (rt + rv + rs - 1.0).abs() > 1e-9 {
        return Err(Error::BadSplitRatios(ratios));
    }
    let n = corpus.len();
    if n < 3 {
        return Err(Error::CorpusTooSmall { len: n });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Fisher-Yates, driven by our own RNG so the partition is reproducible.
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }

    let n_valid = (rv * n as f64).floor() as usize;
    let n_test = (rs * n as f64).floor() as usize;
    let n_train = n - n_valid - n_test;

    let take = |slice: &[usize]| {
        LabeledCorpus::from_records(
            slice
                .iter()
                .map(|&i| corpus.records()[i].clone())
                .collect(),
        )
    };
    Ok((
        take(&order[..n_train]),
        take(&order[n_train..n_train + n_valid]),
        take(&order[n_train + n_valid..]),
    ))
}
