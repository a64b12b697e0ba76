//! Prototype classification.
//!
//! Each class keeps a real-valued count vector: the sum of its members in
//! signed form (binary bits mapped to `±1`). Prediction picks the class whose
//! counts have the highest cosine with the query. Retraining cycles through
//! the training set and, for every misclassified example `v` of class `B`
//! predicted as `A`, applies `C_A -= alpha * v` and `C_B += alpha * v`
//! immediately.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::encoders::EncoderConfig;
use crate::error::{HdcError, Result};
use crate::hv::{Domain, Hypervector};
use crate::item_memory::{shuffled_indices, ItemMemory};
use crate::seed;
use crate::similarity::{cosine_parts, hamming, rank_order, Metric, SimilarityReport};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlphaSchedule {
    #[default]
    Constant,
    /// `alpha / epoch` for 1-based epochs.
    InverseEpoch,
}

impl AlphaSchedule {
    pub fn rate(self, alpha: f64, epoch: usize) -> f64 {
        match self {
            AlphaSchedule::Constant => alpha,
            AlphaSchedule::InverseEpoch => alpha / epoch as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub alpha: f64,
    pub alpha_schedule: AlphaSchedule,
    pub shuffle_seed: u64,
    /// Stop after this many epochs without accuracy improvement; 0 disables.
    pub early_stop_patience: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 10,
            alpha: 1.0,
            alpha_schedule: AlphaSchedule::Constant,
            shuffle_seed: 0,
            early_stop_patience: 0,
        }
    }
}

/// How queries are compared with prototypes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum PredictMetric {
    /// Cosine against the real-valued counts.
    #[default]
    Cosine,
    /// Hamming against sign-thresholded prototypes.
    Hamming,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prototype {
    counts: Vec<f64>,
    normalized: Hypervector,
}

impl Prototype {
    pub fn from_counts(counts: Vec<f64>) -> Result<Self> {
        let norm = counts.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = if norm > 0.0 { (counts.len() as f64).sqrt() / norm } else { 0.0 };
        let normalized = Hypervector::from_real(counts.iter().map(|x| x * scale).collect())?;
        Ok(Prototype { counts, normalized })
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    /// Counts rescaled to the atomic norm `sqrt(dim)` (all zeros if the counts are).
    pub fn hv(&self) -> &Hypervector {
        &self.normalized
    }

    /// Sign-thresholded binary view (`count > 0`).
    pub fn thresholded(&self) -> Hypervector {
        Hypervector::from_bits(self.counts.iter().map(|&c| c > 0.0)).expect("nonempty counts")
    }

    fn refresh(&mut self) -> Result<()> {
        *self = Prototype::from_counts(std::mem::take(&mut self.counts))?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub epochs_run: usize,
    pub alpha: f64,
    pub alpha_schedule: AlphaSchedule,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub alpha: f64,
    /// Misclassifications (and therefore corrections) during the pass.
    pub updates: usize,
    /// Training-set accuracy after the pass.
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub label: String,
    /// Every class, best first.
    pub ranking: Vec<(String, SimilarityReport)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    classes: BTreeMap<String, Prototype>,
    encoder_config: EncoderConfig,
    item_memory: ItemMemory,
    training_meta: TrainingMeta,
}

/// Signed view rescaled to the atomic norm; this is the form of an example
/// used both for prototype sums and for retraining corrections.
fn normalized_signed(hv: &Hypervector) -> Vec<f64> {
    let mut v = hv.to_signed();
    if hv.domain() == Domain::Real {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            let f = (v.len() as f64).sqrt() / norm;
            v.iter_mut().for_each(|x| *x *= f);
        }
    }
    v
}

fn cos_or_zero(a: &[f64], b: &[f64]) -> f64 {
    let (d, x, y) = cosine_parts(a, b);
    if x == 0.0 || y == 0.0 {
        0.0
    } else {
        (d / (x.sqrt() * y.sqrt())).clamp(-1.0, 1.0)
    }
}

impl Model {
    /// Bundle the members of each class into its prototype. Classes are the
    /// distinct labels present; at least two are required.
    pub fn train_oneshot(
        labeled: &[(Hypervector, String)],
        encoder_config: EncoderConfig,
        item_memory: ItemMemory,
    ) -> Result<Model> {
        let mut classes: Vec<String> = labeled.iter().map(|(_, l)| l.clone()).collect();
        classes.sort();
        classes.dedup();
        Self::train_oneshot_declared(&classes, labeled, encoder_config, item_memory)
    }

    /// As [`Model::train_oneshot`] with an explicit class list; every declared
    /// class must have at least one example.
    pub fn train_oneshot_declared(
        classes: &[String],
        labeled: &[(Hypervector, String)],
        encoder_config: EncoderConfig,
        item_memory: ItemMemory,
    ) -> Result<Model> {
        let dim = encoder_config.dim;
        let mut sums: BTreeMap<String, (Vec<f64>, usize)> =
            classes.iter().map(|c| (c.clone(), (vec![0.0; dim], 0))).collect();
        if sums.len() < 2 {
            return Err(HdcError::SingleClass);
        }
        for (hv, label) in labeled {
            check_input(hv, &encoder_config)?;
            let (sum, n) = sums
                .get_mut(label)
                .ok_or_else(|| HdcError::UnknownLabel(label.clone()))?;
            sum.iter_mut().zip(normalized_signed(hv)).for_each(|(s, x)| *s += x);
            *n += 1;
        }
        let mut protos = BTreeMap::new();
        for (label, (sum, n)) in sums {
            if n == 0 {
                return Err(HdcError::EmptyClass(label));
            }
            protos.insert(label, Prototype::from_counts(sum)?);
        }
        let seed = encoder_config.seed;
        Ok(Model {
            classes: protos,
            encoder_config,
            item_memory,
            training_meta: TrainingMeta {
                epochs_run: 0,
                alpha: 0.0,
                alpha_schedule: AlphaSchedule::Constant,
                seed,
            },
        })
    }

    pub fn from_parts(
        classes: BTreeMap<String, Prototype>,
        encoder_config: EncoderConfig,
        item_memory: ItemMemory,
        training_meta: TrainingMeta,
    ) -> Result<Model> {
        if classes.len() < 2 {
            return Err(HdcError::SingleClass);
        }
        for p in classes.values() {
            if p.counts.len() != encoder_config.dim {
                return Err(HdcError::DimensionMismatch {
                    expected: encoder_config.dim,
                    found: p.counts.len(),
                });
            }
        }
        Ok(Model {
            classes,
            encoder_config,
            item_memory,
            training_meta,
        })
    }

    pub fn classes(&self) -> impl Iterator<Item = (&str, &Prototype)> {
        self.classes.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn labels(&self) -> Vec<&str> {
        self.classes.keys().map(String::as_str).collect()
    }

    pub fn prototype(&self, label: &str) -> Option<&Prototype> {
        self.classes.get(label)
    }

    pub fn encoder_config(&self) -> &EncoderConfig {
        &self.encoder_config
    }

    pub fn item_memory(&self) -> &ItemMemory {
        &self.item_memory
    }

    pub fn training_meta(&self) -> &TrainingMeta {
        &self.training_meta
    }

    pub fn dim(&self) -> usize {
        self.encoder_config.dim
    }

    /// Every cached normalized prototype matches a fresh recomputation from
    /// its counts.
    pub fn verify(&self) -> bool {
        self.classes
            .values()
            .all(|p| Prototype::from_counts(p.counts.clone()).is_ok_and(|q| q == *p))
    }

    fn scores(&self, x: &[f64]) -> Vec<(String, f64)> {
        self.classes
            .iter()
            .map(|(label, p)| (label.clone(), cos_or_zero(x, &p.counts)))
            .collect()
    }

    fn argmax(&self, x: &[f64]) -> &str {
        let mut best: Option<(&str, f64)> = None;
        for (label, p) in &self.classes {
            let s = cos_or_zero(x, &p.counts);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((label, s));
            }
        }
        best.expect("model has classes").0
    }

    pub fn predict(&self, v: &Hypervector) -> Result<Prediction> {
        self.predict_with(v, PredictMetric::Cosine)
    }

    pub fn predict_with(&self, v: &Hypervector, metric: PredictMetric) -> Result<Prediction> {
        if v.dim() != self.dim() {
            return Err(HdcError::DimensionMismatch {
                expected: self.dim(),
                found: v.dim(),
            });
        }
        if v.domain() != self.encoder_config.domain && v.domain() != Domain::Real {
            return Err(HdcError::DomainMismatch {
                expected: self.encoder_config.domain,
                found: v.domain(),
            });
        }
        let mut ranking: Vec<(String, SimilarityReport)> = match metric {
            PredictMetric::Cosine => self
                .scores(&v.to_signed())
                .into_iter()
                .map(|(l, s)| (l, SimilarityReport::new(s, Metric::Cosine, self.dim())))
                .collect(),
            PredictMetric::Hamming => {
                let q = Hypervector::from_bits(v.to_signed().iter().map(|&x| x > 0.0))?;
                self.classes
                    .iter()
                    .map(|(l, p)| {
                        let s = hamming(&q, &p.thresholded())?;
                        Ok((l.clone(), SimilarityReport::new(s, Metric::Hamming, self.dim())))
                    })
                    .collect::<Result<_>>()?
            }
        };
        ranking.sort_by(rank_order);
        Ok(Prediction {
            label: ranking[0].0.clone(),
            ranking,
        })
    }

    /// Fraction of `labeled` classified correctly.
    pub fn accuracy(&self, labeled: &[(Hypervector, String)]) -> Result<f64> {
        if labeled.is_empty() {
            return Ok(0.0);
        }
        let mut correct = 0usize;
        for (hv, label) in labeled {
            if self.predict(hv)?.label == *label {
                correct += 1;
            }
        }
        Ok(correct as f64 / labeled.len() as f64)
    }

    /// Online perceptron-style retraining. Returns the updated model and one
    /// [`EpochStats`] per pass. Stops early after a pass without errors or
    /// when accuracy has not improved for `early_stop_patience` passes.
    pub fn retrain(&self, labeled: &[(Hypervector, String)], cfg: &TrainConfig) -> Result<(Model, Vec<EpochStats>)> {
        if cfg.epochs == 0 {
            return Err(HdcError::InvalidConfig("epochs must be at least 1".into()));
        }
        if !(cfg.alpha >= 0.0 && cfg.alpha.is_finite()) {
            return Err(HdcError::InvalidConfig(format!("alpha must be finite and >= 0, got {}", cfg.alpha)));
        }
        let mut examples = Vec::with_capacity(labeled.len());
        for (hv, label) in labeled {
            check_input(hv, &self.encoder_config)?;
            if !self.classes.contains_key(label) {
                return Err(HdcError::UnknownLabel(label.clone()));
            }
            examples.push((normalized_signed(hv), label.as_str()));
        }

        let mut model = self.clone();
        let mut trace = Vec::new();
        let mut best = f64::NEG_INFINITY;
        let mut stale = 0usize;
        for epoch in 1..=cfg.epochs {
            let alpha = cfg.alpha_schedule.rate(cfg.alpha, epoch);
            let mut rng = seed::rng(seed::derive_index(cfg.shuffle_seed, epoch as u64));
            let order = shuffled_indices(examples.len(), &mut rng);
            let mut updates = 0;
            for i in order {
                let (x, truth) = &examples[i];
                let predicted = model.argmax(x).to_owned();
                if predicted == *truth {
                    continue;
                }
                updates += 1;
                if alpha == 0.0 {
                    continue;
                }
                let wrong = model.classes.get_mut(&predicted).expect("predicted class exists");
                wrong.counts.iter_mut().zip(x).for_each(|(c, v)| *c -= alpha * v);
                let right = model.classes.get_mut(*truth).expect("labels checked");
                right.counts.iter_mut().zip(x).for_each(|(c, v)| *c += alpha * v);
            }
            for p in model.classes.values_mut() {
                p.refresh()?;
            }
            let correct = examples.iter().filter(|(x, t)| model.argmax(x) == *t).count();
            let accuracy = if examples.is_empty() { 0.0 } else { correct as f64 / examples.len() as f64 };
            trace.push(EpochStats {
                epoch,
                alpha,
                updates,
                accuracy,
            });
            model.training_meta = TrainingMeta {
                epochs_run: self.training_meta.epochs_run + epoch,
                alpha: cfg.alpha,
                alpha_schedule: cfg.alpha_schedule,
                seed: cfg.shuffle_seed,
            };
            if updates == 0 {
                break;
            }
            if accuracy > best {
                best = accuracy;
                stale = 0;
            } else {
                stale += 1;
                if cfg.early_stop_patience > 0 && stale >= cfg.early_stop_patience {
                    break;
                }
            }
        }
        Ok((model, trace))
    }
}

fn check_input(hv: &Hypervector, cfg: &EncoderConfig) -> Result<()> {
    if hv.dim() != cfg.dim {
        return Err(HdcError::DimensionMismatch {
            expected: cfg.dim,
            found: hv.dim(),
        });
    }
    if hv.domain() != cfg.domain {
        return Err(HdcError::DomainMismatch {
            expected: cfg.domain,
            found: hv.domain(),
        });
    }
    Ok(())
}
