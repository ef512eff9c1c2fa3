//! Training configuration file: TOML with `[data]`, `[vocabulary]`,
//! `[train]`, and `[pricing]` sections. Every hyperparameter is exposed so
//! tuning sweeps are scriptable; omitted keys take the library defaults.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;

use dnfgen::binarizer::FrequencyMode;
use dnfgen::corpus::CorpusFormat;
use dnfgen::{Hyperparameters, PricingConfig, ScaleMode};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub data: DataSection,
    #[serde(default)]
    pub vocabulary: VocabSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub pricing: PricingSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub path: PathBuf,
    pub format: Option<CorpusFormat>,
    pub min_label_count: Option<usize>,
    /// Optional train/validation/test fractions; when present, training
    /// uses only the first slice and the other two are written next to the
    /// model.
    pub split: Option<[f64; 3]>,
    pub split_seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VocabSection {
    pub budget: Option<usize>,
    pub frequency: Option<FrequencyMode>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub fn_penalty: Option<f64>,
    pub complexity_budget: Option<u32>,
    pub max_cg_iters: Option<u32>,
    pub neg_ratio: Option<f64>,
    pub top_k: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PricingSection {
    pub max_clause_size: Option<u32>,
    pub pool_size: Option<usize>,
    pub min_doc_frac: Option<f64>,
    pub doc_frac_positives_only: Option<bool>,
    pub rc_threshold: Option<f64>,
    pub scale_mode: Option<ScaleMode>,
    pub scale_factor: Option<u32>,
    pub fix_zero_features: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> anyhow::Result<ConfigFile> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    /// Data path, resolved relative to the config file's directory.
    pub fn data_path(&self, config_path: &Path) -> PathBuf {
        if self.data.path.is_absolute() {
            self.data.path.clone()
        } else {
            config_path
                .parent()
                .unwrap_or_else(|| Path::new("."))
                .join(&self.data.path)
        }
    }

    pub fn data_format(&self, data_path: &Path) -> anyhow::Result<CorpusFormat> {
        self.data
            .format
            .or_else(|| CorpusFormat::from_path(data_path))
            .ok_or_else(|| {
                anyhow::anyhow!(
                    "cannot infer corpus format of {}; set data.format to \"csv\" or \"jsonl\"",
                    data_path.display()
                )
            })
    }

    /// Library defaults overlaid with whatever the file sets.
    pub fn hyperparameters(&self) -> Hyperparameters {
        let defaults = Hyperparameters::default();
        let pdefaults = PricingConfig::default();
        let pricing = PricingConfig {
            max_clause_size: self.pricing.max_clause_size.unwrap_or(pdefaults.max_clause_size),
            pool_size: self.pricing.pool_size.unwrap_or(pdefaults.pool_size),
            min_doc_frac: self.pricing.min_doc_frac.unwrap_or(pdefaults.min_doc_frac),
            doc_frac_positives_only: self
                .pricing
                .doc_frac_positives_only
                .unwrap_or(pdefaults.doc_frac_positives_only),
            rc_threshold: self.pricing.rc_threshold.unwrap_or(pdefaults.rc_threshold),
            scale_mode: self.pricing.scale_mode.unwrap_or(pdefaults.scale_mode),
            scale_factor: self.pricing.scale_factor.unwrap_or(pdefaults.scale_factor),
            fix_zero_features: self
                .pricing
                .fix_zero_features
                .unwrap_or(pdefaults.fix_zero_features),
        };
        Hyperparameters {
            fn_penalty: self.train.fn_penalty.unwrap_or(defaults.fn_penalty),
            complexity_budget: self
                .train
                .complexity_budget
                .unwrap_or(defaults.complexity_budget),
            max_cg_iters: self.train.max_cg_iters.unwrap_or(defaults.max_cg_iters),
            neg_ratio: self.train.neg_ratio.unwrap_or(defaults.neg_ratio),
            pricing,
            top_k: self.train.top_k.unwrap_or(defaults.top_k),
            vocab_budget: self.vocabulary.budget.unwrap_or(defaults.vocab_budget),
            vocab_frequency: self.vocabulary.frequency.unwrap_or(defaults.vocab_frequency),
            min_label_count: self
                .data
                .min_label_count
                .unwrap_or(defaults.min_label_count),
            seed: self.train.seed.unwrap_or(defaults.seed),
            workers: self.train.workers.unwrap_or(defaults.workers),
        }
    }
}

/// `DNFGEN_WORKERS` overrides any configured worker count.
pub fn workers_from_env() -> Option<usize> {
    std::env::var("DNFGEN_WORKERS").ok()?.parse().ok()
}
