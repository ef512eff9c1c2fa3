//! Evaluation: candidate-list accuracy, list-length statistics, and the
//! K-sweep.
//!
//! A prediction counts as successful when the (possibly truncated)
//! candidate list contains the true label. Rows evaluate independently and
//! run on the worker pool with deterministic aggregation.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::{LabeledCorpus, RawRecord};
use crate::predictor::candidate_list;
use crate::trainer::ModelBundle;
use crate::{par, Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct EvalReport {
    /// Fraction of messages whose list contains the true label.
    pub accuracy: f64,
    /// Truncation applied to the headline accuracy and list statistics.
    pub k_used: Option<usize>,
    pub max_list_len: usize,
    pub avg_list_len: f64,
    /// Accuracy at each truncation length `1..=k_max`.
    pub per_k_accuracy: BTreeMap<usize, f64>,
    pub n_evaluated: usize,
    /// Messages with more than one candidate (after truncation).
    pub multi_candidate_count: usize,
}

/// Untruncated list length and the rank of the true label, per message.
fn ranks(dataset: &LabeledCorpus, model: &ModelBundle) -> Vec<(usize, Option<usize>)> {
    let records: Vec<RawRecord> = dataset.records().to_vec();
    par::map(records, model.hyper.workers, |record| {
        let list = candidate_list(&record.message, model);
        let rank = list.iter().position(|c| c.label == record.label);
        (list.len(), rank)
    })
}

/// Evaluates the model on a dataset. With `k` the candidate lists are
/// truncated to the top `k` for both accuracy and the length statistics;
/// without it lists are used untruncated. `per_k_accuracy` always covers
/// `1..=max(10, k)`.
pub fn evaluate(dataset: &LabeledCorpus, model: &ModelBundle, k: Option<usize>) -> Result<EvalReport> {
    if dataset.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let rows = ranks(dataset, model);
    let n = rows.len();

    let hit = |rank: Option<usize>, cap: Option<usize>| -> bool {
        rank.is_some_and(|r| cap.is_none_or(|c| r < c))
    };
    let hits = rows.iter().filter(|(_, rank)| hit(*rank, k)).count();

    let eff_len = |len: usize| k.map_or(len, |c| len.min(c));
    let max_list_len = rows.iter().map(|&(len, _)| eff_len(len)).max().unwrap_or(0);
    let total_len: usize = rows.iter().map(|&(len, _)| eff_len(len)).sum();
    let multi_candidate_count = rows.iter().filter(|&&(len, _)| eff_len(len) > 1).count();

    let k_max = k.unwrap_or(0).max(10);
    let mut per_k_accuracy = BTreeMap::new();
    for cap in 1..=k_max {
        let h = rows.iter().filter(|(_, rank)| hit(*rank, Some(cap))).count();
        per_k_accuracy.insert(cap, h as f64 / n as f64);
    }

    Ok(EvalReport {
        accuracy: hits as f64 / n as f64,
        k_used: k,
        max_list_len,
        avg_list_len: total_len as f64 / n as f64,
        per_k_accuracy,
        n_evaluated: n,
        multi_candidate_count,
    })
}

/// Accuracy for every truncation length `1..=k_max`; nondecreasing in `k`.
pub fn k_sweep(
    dataset: &LabeledCorpus,
    model: &ModelBundle,
    k_max: usize,
) -> Result<BTreeMap<usize, f64>> {
    if dataset.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if k_max < 1 {
        return Err(Error::InvalidHyper("k_max must be at least 1".into()));
    }
    let rows = ranks(dataset, model);
    let n = rows.len();
    let mut out = BTreeMap::new();
    for cap in 1..=k_max {
        let hits = rows
            .iter()
            .filter(|(_, rank)| rank.is_some_and(|r| r < cap))
            .count();
        out.insert(cap, hits as f64 / n as f64);
    }
    Ok(out)
}

/// Keeps only the messages whose true label was trained on at least
/// `min_train_count` positives. Labels absent from the model count as zero.
pub fn restrict_to_frequent_labels(
    dataset: &LabeledCorpus,
    model: &ModelBundle,
    min_train_count: usize,
) -> LabeledCorpus {
    let records = dataset
        .records()
        .iter()
        .filter(|r| {
            model
                .rules
                .get(&r.label)
                .is_some_and(|rule| rule.train_positives >= min_train_count)
        })
        .cloned()
        .collect();
    LabeledCorpus::from_records(records)
}

/// Plain-text rendering of a report.
pub fn render_text(report: &EvalReport) -> String {
    let mut out = String::new();
    let k_line = match report.k_used {
        Some(k) => format!("accuracy (top-{k}): {:.4}\n", report.accuracy),
        None => format!("accuracy (untruncated): {:.4}\n", report.accuracy),
    };
    out.push_str(&format!("examples evaluated: {}\n", report.n_evaluated));
    out.push_str(&k_line);
    out.push_str(&format!(
        "list length: max {}  avg {:.2}\n",
        report.max_list_len, report.avg_list_len
    ));
    out.push_str(&format!(
        "messages with more than one candidate: {}\n",
        report.multi_candidate_count
    ));
    out.push_str("K sweep:\n   K  accuracy\n");
    for (k, acc) in &report.per_k_accuracy {
        out.push_str(&format!("  {k:>2}  {acc:.4}\n"));
    }
    out
}
