//! Training loops: per-graph autoencoder, cross-graph ranker pre-training,
//! and fine-tuning on representative nodes.

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use super::adam::{Adam, AdamConfig};
use super::listmle::target_order;
use super::matrix::Matrix;
use super::model::{ae_loss_and_grad, minmax, rank_forward, rank_loss_and_grad, AeShape, RankerShape};
use super::propagator::Propagator;
use crate::error::{Error, Result};
use crate::eval::kendall_tau;
use crate::hypergraph::Hypergraph;
use crate::rng::derived;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub ae_epochs: usize,
    pub epochs: usize,
    /// Epochs without validation improvement before pre-training stops.
    pub patience: usize,
    pub fine_tune_lr: f64,
    pub fine_tune_epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            ae_epochs: 100,
            epochs: 300,
            patience: 30,
            fine_tune_lr: 0.001,
            fine_tune_epochs: 50,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn adam(&self, lr: f64) -> AdamConfig {
        AdamConfig {
            lr,
            beta1: self.beta1,
            beta2: self.beta2,
            eps: self.eps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !(self.fine_tune_lr > 0.0) {
            return Err(Error::InvalidParameter("learning rates must be positive".into()));
        }
        if self.ae_epochs == 0 {
            return Err(Error::InvalidParameter("autoencoder epochs must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct AeOutcome {
    pub shape: AeShape,
    pub tensors: Vec<Matrix>,
    /// Encoder output after training.
    pub embeddings: Matrix,
    /// Loss before each update; the last entry is the final loss.
    pub losses: Vec<f64>,
}

/// Full-batch Adam on the degree-reconstruction loss.
pub fn train_autoencoder(h: &Hypergraph, p: &Propagator, d: usize, depth: usize, decoder_relu: bool, cfg: &TrainConfig) -> Result<AeOutcome> {
    cfg.validate()?;
    let shape = AeShape {
        n_nodes: h.n_nodes(),
        d,
        depth,
        decoder_relu,
    };
    let mut tensors = shape.init(&mut derived(cfg.seed, &[0xAE]))?;
    let degrees: Vec<f64> = h.degrees().node_degree.iter().map(|&k| k as f64).collect();
    let target = minmax(&degrees);
    let mut adam = Adam::new(cfg.adam(cfg.learning_rate), &tensors);
    let mut losses = Vec::with_capacity(cfg.ae_epochs + 1);
    let mut last_finite = None;
    for epoch in 0..=cfg.ae_epochs {
        let (loss, grads, emb) = ae_loss_and_grad(&shape, &tensors, p, &target)?;
        if !loss.is_finite() || grads.iter().any(|g| !g.is_finite()) {
            return Err(Error::Diverged { epoch, last_finite });
        }
        last_finite = Some(epoch);
        losses.push(loss);
        if epoch == cfg.ae_epochs {
            return Ok(AeOutcome {
                shape,
                tensors,
                embeddings: emb,
                losses,
            });
        }
        adam.step(&mut tensors, &grads)?;
    }
    unreachable!()
}

/// One graph prepared for ranking: propagator, node features and labels.
#[derive(Debug, Clone)]
pub struct RankSample {
    pub name: String,
    pub p: Propagator,
    pub features: Matrix,
    pub labels: Vec<f64>,
}

impl RankSample {
    pub fn order(&self) -> Vec<usize> {
        target_order(&self.labels)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranker {
    pub shape: RankerShape,
    pub tensors: Vec<Matrix>,
}

impl Ranker {
    pub fn init(shape: RankerShape, seed: u64) -> Result<Self> {
        Ok(Self {
            shape,
            tensors: shape.init(&mut derived(seed, &[0x4A]))?,
        })
    }

    pub fn predict(&self, p: &Propagator, features: &Matrix) -> Result<Vec<f64>> {
        rank_forward(&self.shape, &self.tensors, p, features)
    }

    /// Kendall tau-a of predictions against the sample's labels.
    pub fn tau(&self, sample: &RankSample) -> Result<f64> {
        kendall_tau(&sample.labels, &self.predict(&sample.p, &sample.features)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    /// Mean validation tau; NaN when there is no validation set.
    pub val_tau: f64,
}

#[derive(Debug, Clone)]
pub struct PretrainOutcome {
    pub ranker: Ranker,
    pub history: Vec<EpochRecord>,
    /// Epoch whose parameters were kept (0 = initialization).
    pub best_epoch: usize,
}

fn mean_tau(ranker: &Ranker, val: &[RankSample]) -> Result<f64> {
    let mut sum = 0.0;
    for s in val {
        sum += ranker.tau(s)?;
    }
    Ok(sum / val.len() as f64)
}

/// ListMLE pre-training over whole node lists, one Adam step per graph,
/// graphs in the given order. With a validation set, the parameters with
/// the best mean validation tau are kept and training stops after
/// `patience` epochs without improvement.
pub fn pretrain_ranker(train: &[RankSample], val: &[RankSample], shape: RankerShape, cfg: &TrainConfig) -> Result<PretrainOutcome> {
    cfg.validate()?;
    for s in train.iter().chain(val) {
        if s.features.cols() != shape.width {
            return Err(Error::Shape(format!(
                "graph {} has feature width {}, ranker expects {}",
                s.name,
                s.features.cols(),
                shape.width
            )));
        }
        if s.labels.len() != s.features.rows() {
            return Err(Error::LengthMismatch(s.features.rows(), s.labels.len()));
        }
    }
    let orders: Vec<Vec<usize>> = train.iter().map(RankSample::order).collect();
    let mut ranker = Ranker::init(shape, cfg.seed)?;
    let mut adam = Adam::new(cfg.adam(cfg.learning_rate), &ranker.tensors);
    let mut history = Vec::new();
    let mut best = ranker.clone();
    let mut best_tau = if val.is_empty() { f64::NAN } else { mean_tau(&ranker, val)? };
    let mut best_epoch = 0;
    for epoch in 1..=cfg.epochs {
        let mut total = 0.0;
        for (s, order) in train.iter().zip(&orders) {
            let (loss, grads) = rank_loss_and_grad(&ranker.shape, &ranker.tensors, &s.p, &s.features, order)?;
            if !loss.is_finite() || grads.iter().any(|g| !g.is_finite()) {
                return Err(Error::Diverged {
                    epoch,
                    last_finite: epoch.checked_sub(1),
                });
            }
            total += loss / order.len() as f64;
            adam.step(&mut ranker.tensors, &grads)?;
        }
        let loss = total / train.len().max(1) as f64;
        let val_tau = if val.is_empty() { f64::NAN } else { mean_tau(&ranker, val)? };
        debug!("pretrain epoch {epoch}: loss {loss:.6} val_tau {val_tau:.4}");
        history.push(EpochRecord { epoch, loss, val_tau });
        if val.is_empty() {
            best = ranker.clone();
            best_epoch = epoch;
        } else if val_tau > best_tau {
            best_tau = val_tau;
            best = ranker.clone();
            best_epoch = epoch;
        } else if epoch - best_epoch >= cfg.patience {
            break;
        }
    }
    Ok(PretrainOutcome {
        ranker: best,
        history,
        best_epoch,
    })
}

/// ListMLE on the representative sublist only; all parameters train.
/// Fewer than two representatives leaves the ranker unchanged.
pub fn finetune(ranker: &Ranker, sample: &RankSample, reps: &[usize], rep_labels: &[f64], cfg: &TrainConfig) -> Result<(Ranker, Vec<f64>)> {
    cfg.validate()?;
    if reps.len() != rep_labels.len() {
        return Err(Error::LengthMismatch(reps.len(), rep_labels.len()));
    }
    if reps.len() < 2 {
        warn!("fine-tuning skipped: {} representative(s)", reps.len());
        return Ok((ranker.clone(), Vec::new()));
    }
    let order: Vec<usize> = target_order(rep_labels).into_iter().map(|k| reps[k]).collect();
    let mut out = ranker.clone();
    let mut adam = Adam::new(cfg.adam(cfg.fine_tune_lr), &out.tensors);
    let mut losses = Vec::with_capacity(cfg.fine_tune_epochs);
    for epoch in 0..cfg.fine_tune_epochs {
        let (loss, grads) = rank_loss_and_grad(&out.shape, &out.tensors, &sample.p, &sample.features, &order)?;
        if !loss.is_finite() {
            return Err(Error::Diverged {
                epoch,
                last_finite: epoch.checked_sub(1),
            });
        }
        losses.push(loss);
        adam.step(&mut out.tensors, &grads)?;
    }
    Ok((out, losses))
}

/// Versioned on-disk form of a trained ranker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub crate_version: String,
    pub ranker: Ranker,
    pub train: TrainConfig,
    /// Free-form run settings (dims, seeds, corpus description).
    pub meta: serde_json::Value,
}

impl ModelFile {
    pub const FORMAT_VERSION: u32 = 1;

    pub fn new(ranker: Ranker, train: TrainConfig, meta: serde_json::Value) -> Self {
        Self {
            format_version: Self::FORMAT_VERSION,
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            ranker,
            train,
            meta,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text)?;
        if m.format_version != Self::FORMAT_VERSION {
            return Err(Error::InvalidParameter(format!("unsupported model format {}", m.format_version)));
        }
        Ok(m)
    }
}

/// CSV `epoch,loss,val_tau` of a pre-training history.
pub fn history_csv(history: &[EpochRecord]) -> String {
    let mut out = String::from("epoch,loss,val_tau\n");
    for r in history {
        out.push_str(&format!("{},{:.12e},{}\n", r.epoch, r.loss, fmt_opt(r.val_tau)));
    }
    out
}

/// CSV `epoch,loss` of a plain loss curve.
pub fn loss_csv(losses: &[f64]) -> String {
    let mut out = String::from("epoch,loss\n");
    for (e, l) in losses.iter().enumerate() {
        out.push_str(&format!("{e},{l:.12e}\n"));
    }
    out
}

fn fmt_opt(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.12e}")
    }
}
