//! End-to-end orchestration: synthetic corpus, SIR labels, per-graph
//! autoencoders, ranker pre-training, representative selection,
//! fine-tuning, baselines and evaluation.
//!
//! Artifacts are handed to an [`ArtifactSink`] as soon as they exist, so a
//! failing stage leaves everything produced before it behind.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use log::info;
use serde::Serialize;

use crate::centrality::{self, Baseline, CentralityParams, HdfParams};
use crate::diffusion::{influence_labels, InfluenceLabels, SirParams};
use crate::error::{Error, Result};
use crate::eval::{self, EvalOptions, EvalReport};
use crate::fractal::{representatives, Representatives, SelectConfig, Threshold};
use crate::generators::{Family, GenSpec};
use crate::hypergraph::Hypergraph;
use crate::neural::{
    finetune, pretrain_ranker, train_autoencoder, Matrix, ModelFile, PretrainOutcome, Propagator, RankSample, Ranker,
    RankerShape, TrainConfig,
};
use crate::rng::{derive_seed, derived};
use crate::score::ScoreVector;

/// Seed-derivation tags, one per pipeline stage.
pub mod tag {
    pub const TRAIN_GRAPH: u64 = 1;
    pub const VAL_GRAPH: u64 = 2;
    pub const TEST_GRAPH: u64 = 3;
    pub const LABELS: u64 = 4;
    pub const PROPAGATOR: u64 = 5;
    pub const AUTOENCODER: u64 = 6;
    pub const RANKER: u64 = 7;
    pub const PROJECTION: u64 = 8;
}

/// Every knob of a pipeline run. Serialized as flat `key = value` text.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    /// Test hypergraph file; when absent the test graph is generated from `test`.
    pub dataset: Option<String>,
    pub test: GenSpec,
    pub train_families: Vec<Family>,
    pub train: GenSpec,
    /// Training graphs per family.
    pub train_graphs: usize,
    /// Validation graphs per family.
    pub val_graphs: usize,
    pub beta0: f64,
    /// Infection probability on the test graph; defaults to `beta0`.
    pub test_beta0: Option<f64>,
    pub gamma: f64,
    pub replicas: usize,
    pub max_steps: usize,
    pub s: usize,
    pub d: usize,
    pub layers: usize,
    pub enc_depth: usize,
    pub decoder_relu: bool,
    pub theta_quantile: f64,
    /// Absolute threshold; overrides `theta_quantile` when set.
    pub theta: Option<f64>,
    pub n_rep: usize,
    pub r_l: Option<u32>,
    pub training: TrainConfig,
    pub hcc_s: usize,
    pub hdf: HdfParams,
    pub s_max: usize,
    pub overlap: Vec<u32>,
    pub fractions: Vec<f64>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            test: GenSpec::new(Family::Sfh, 200, 200, 3, 0),
            train_families: vec![Family::Wsh, Family::Erh, Family::Sfh],
            train: GenSpec::new(Family::Wsh, 200, 200, 3, 0),
            train_graphs: 1,
            val_graphs: 1,
            beta0: 0.02,
            test_beta0: None,
            gamma: 1.0,
            replicas: 1000,
            max_steps: 0,
            s: 2,
            d: 256,
            layers: 2,
            enc_depth: 2,
            decoder_relu: false,
            theta_quantile: 0.9,
            theta: None,
            n_rep: 10,
            r_l: None,
            training: TrainConfig::default(),
            hcc_s: 1,
            hdf: HdfParams::default(),
            s_max: eval::DEFAULT_S_MAX,
            overlap: eval::DEFAULT_OVERLAP_PERCENTS.to_vec(),
            fractions: eval::default_fractions(),
            seed: 1,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad value {value:?} for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::InvalidParameter(format!("bad value {value:?} for {key}"))),
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse(key, t))
        .collect()
}

fn parse_opt<T: std::str::FromStr>(key: &str, value: &str) -> Result<Option<T>> {
    if value.is_empty() || value == "none" {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "none".to_string(), ToString::to_string)
}

impl RunConfig {
    /// Keys accepted by [`RunConfig::set`], in canonical order.
    pub const KEYS: &'static [&'static str] = &[
        "dataset", "test_family", "test_n", "test_m", "test_k", "test_p", "test_sf_gamma", "train_families", "train_n",
        "train_m", "train_k", "train_p", "train_sf_gamma", "train_graphs", "val_graphs", "beta0", "test_beta0", "gamma",
        "replicas", "max_steps", "s", "d", "layers", "enc_depth", "decoder_relu", "theta_quantile", "theta", "n_rep",
        "r_l", "lr", "ae_epochs", "epochs", "patience", "ft_lr", "ft_epochs", "hcc_s", "hdf_r", "hdf_sm", "hdf_squared",
        "s_max", "overlap", "fractions", "seed",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "dataset" => self.dataset = (!v.is_empty() && v != "none").then(|| v.to_string()),
            "test_family" => self.test.family = v.parse()?,
            "test_n" => self.test.n_nodes = parse(key, v)?,
            "test_m" => self.test.n_hyperedges = parse(key, v)?,
            "test_k" => self.test.hyperedge_size = parse(key, v)?,
            "test_p" => self.test.rewire_p = parse(key, v)?,
            "test_sf_gamma" => self.test.gamma = parse(key, v)?,
            "train_families" => {
                self.train_families = v
                    .split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?
            }
            "train_n" => self.train.n_nodes = parse(key, v)?,
            "train_m" => self.train.n_hyperedges = parse(key, v)?,
            "train_k" => self.train.hyperedge_size = parse(key, v)?,
            "train_p" => self.train.rewire_p = parse(key, v)?,
            "train_sf_gamma" => self.train.gamma = parse(key, v)?,
            "train_graphs" => self.train_graphs = parse(key, v)?,
            "val_graphs" => self.val_graphs = parse(key, v)?,
            "beta0" => self.beta0 = parse(key, v)?,
            "test_beta0" => self.test_beta0 = parse_opt(key, v)?,
            "gamma" => self.gamma = parse(key, v)?,
            "replicas" => self.replicas = parse(key, v)?,
            "max_steps" => self.max_steps = parse(key, v)?,
            "s" => self.s = parse(key, v)?,
            "d" => self.d = parse(key, v)?,
            "layers" => self.layers = parse(key, v)?,
            "enc_depth" => self.enc_depth = parse(key, v)?,
            "decoder_relu" => self.decoder_relu = parse_bool(key, v)?,
            "theta_quantile" => self.theta_quantile = parse(key, v)?,
            "theta" => self.theta = parse_opt(key, v)?,
            "n_rep" => self.n_rep = parse(key, v)?,
            "r_l" => self.r_l = parse_opt(key, v)?,
            "lr" => self.training.learning_rate = parse(key, v)?,
            "ae_epochs" => self.training.ae_epochs = parse(key, v)?,
            "epochs" => self.training.epochs = parse(key, v)?,
            "patience" => self.training.patience = parse(key, v)?,
            "ft_lr" => self.training.fine_tune_lr = parse(key, v)?,
            "ft_epochs" => self.training.fine_tune_epochs = parse(key, v)?,
            "hcc_s" => self.hcc_s = parse(key, v)?,
            "hdf_r" => self.hdf.r = parse(key, v)?,
            "hdf_sm" => self.hdf.s_max = parse(key, v)?,
            "hdf_squared" => self.hdf.squared_membership = parse_bool(key, v)?,
            "s_max" => self.s_max = parse(key, v)?,
            "overlap" => self.overlap = parse_list(key, v)?,
            "fractions" => self.fractions = parse_list(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            other => return Err(Error::InvalidParameter(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "dataset" => opt(&self.dataset),
            "test_family" => self.test.family.to_string(),
            "test_n" => self.test.n_nodes.to_string(),
            "test_m" => self.test.n_hyperedges.to_string(),
            "test_k" => self.test.hyperedge_size.to_string(),
            "test_p" => self.test.rewire_p.to_string(),
            "test_sf_gamma" => self.test.gamma.to_string(),
            "train_families" => join(&self.train_families),
            "train_n" => self.train.n_nodes.to_string(),
            "train_m" => self.train.n_hyperedges.to_string(),
            "train_k" => self.train.hyperedge_size.to_string(),
            "train_p" => self.train.rewire_p.to_string(),
            "train_sf_gamma" => self.train.gamma.to_string(),
            "train_graphs" => self.train_graphs.to_string(),
            "val_graphs" => self.val_graphs.to_string(),
            "beta0" => self.beta0.to_string(),
            "test_beta0" => opt(&self.test_beta0),
            "gamma" => self.gamma.to_string(),
            "replicas" => self.replicas.to_string(),
            "max_steps" => self.max_steps.to_string(),
            "s" => self.s.to_string(),
            "d" => self.d.to_string(),
            "layers" => self.layers.to_string(),
            "enc_depth" => self.enc_depth.to_string(),
            "decoder_relu" => self.decoder_relu.to_string(),
            "theta_quantile" => self.theta_quantile.to_string(),
            "theta" => opt(&self.theta),
            "n_rep" => self.n_rep.to_string(),
            "r_l" => opt(&self.r_l),
            "lr" => self.training.learning_rate.to_string(),
            "ae_epochs" => self.training.ae_epochs.to_string(),
            "epochs" => self.training.epochs.to_string(),
            "patience" => self.training.patience.to_string(),
            "ft_lr" => self.training.fine_tune_lr.to_string(),
            "ft_epochs" => self.training.fine_tune_epochs.to_string(),
            "hcc_s" => self.hcc_s.to_string(),
            "hdf_r" => self.hdf.r.to_string(),
            "hdf_sm" => self.hdf.s_max.to_string(),
            "hdf_squared" => self.hdf.squared_membership.to_string(),
            "s_max" => self.s_max.to_string(),
            "overlap" => join(&self.overlap),
            "fractions" => join(&self.fractions),
            "seed" => self.seed.to_string(),
            _ => return None,
        })
    }

    /// Applies `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: "expected key = value".into(),
            })?;
            self.set(k.trim(), v).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Canonical text form: every key, fixed order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for k in Self::KEYS {
            let _ = writeln!(out, "{k} = {}", self.get(k).unwrap_or_default());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta0 > 0.0 && self.beta0 <= 1.0) {
            return Err(Error::InvalidParameter(format!("beta0 {} not in (0, 1]", self.beta0)));
        }
        if let Some(b) = self.test_beta0 {
            if !(b > 0.0 && b <= 1.0) {
                return Err(Error::InvalidParameter(format!("test_beta0 {b} not in (0, 1]")));
            }
        }
        if self.d < 4 || self.d % 4 != 0 {
            return Err(Error::InvalidParameter(format!("d = {} must be a positive multiple of 4", self.d)));
        }
        if self.n_rep == 0 {
            return Err(Error::InvalidParameter("n_rep must be >= 1".into()));
        }
        if self.train_families.is_empty() || self.train_graphs == 0 {
            return Err(Error::InvalidParameter("need at least one training graph".into()));
        }
        if self.s == 0 || self.s_max == 0 {
            return Err(Error::InvalidParameter("orders s and s_max must be >= 1".into()));
        }
        self.sir(false).validate()?;
        self.training.validate()
    }

    pub fn sir(&self, test: bool) -> SirParams {
        SirParams {
            beta: if test { self.test_beta0.unwrap_or(self.beta0) } else { self.beta0 },
            gamma: self.gamma,
            max_steps: self.max_steps,
        }
    }

    pub fn select_config(&self) -> SelectConfig {
        SelectConfig {
            s: self.s,
            threshold: match self.theta {
                Some(t) => Threshold::Absolute(t),
                None => Threshold::Quantile(self.theta_quantile),
            },
            n_rep: self.n_rep,
            r_l: self.r_l,
        }
    }

    pub fn centrality_params(&self) -> CentralityParams {
        CentralityParams {
            hcc_s: self.hcc_s,
            hdf: self.hdf,
        }
    }

    pub fn ranker_shape(&self) -> RankerShape {
        RankerShape {
            width: self.d / 4,
            layers: self.layers,
        }
    }

    /// Ranker pre-training configuration for one feature mode.
    pub fn pretrain_config(&self, mode: Features) -> TrainConfig {
        let m = match mode {
            Features::Autoencoder => 0,
            Features::Projection => 1,
        };
        self.training_for(&[tag::RANKER, m])
    }

    pub fn finetune_config(&self) -> TrainConfig {
        self.training_for(&[tag::RANKER, 2])
    }

    /// Training configuration with the seed of one stage.
    fn training_for(&self, coords: &[u64]) -> TrainConfig {
        TrainConfig {
            seed: derive_seed(self.seed, coords),
            ..self.training
        }
    }
}

/// Receives pipeline outputs as they are produced.
pub trait ArtifactSink {
    fn put(&mut self, name: &str, content: &str) -> Result<()>;
}

/// Keeps artifacts in memory.
#[derive(Debug, Default, Clone)]
pub struct MemorySink {
    pub files: BTreeMap<String, String>,
}

impl ArtifactSink for MemorySink {
    fn put(&mut self, name: &str, content: &str) -> Result<()> {
        self.files.insert(name.to_string(), content.to_string());
        Ok(())
    }
}

/// Discards artifacts.
pub struct NullSink;

impl ArtifactSink for NullSink {
    fn put(&mut self, _: &str, _: &str) -> Result<()> {
        Ok(())
    }
}

fn stage<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage {
        stage: name.to_string(),
        source: Box::new(e),
    })
}

/// How ranker input features are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Features {
    /// Per-graph autoencoder embeddings.
    Autoencoder,
    /// Seeded random projection of the one-hot input (no learning).
    Projection,
}

/// Features for one graph plus the autoencoder loss curve when trained.
/// `coords` identify the graph; only the projection mode uses them.
pub fn node_features(
    h: &Hypergraph,
    p: &Propagator,
    cfg: &RunConfig,
    mode: Features,
    coords: &[u64],
) -> Result<(Matrix, Vec<f64>)> {
    match mode {
        Features::Autoencoder => {
            // Same initialization seed on every graph: the ranker transfers
            // only if embedding coordinates mean similar things across graphs.
            let out = train_autoencoder(h, p, cfg.d, cfg.enc_depth, cfg.decoder_relu, &cfg.training_for(&[tag::AUTOENCODER]))?;
            Ok((standardize(&out.embeddings), out.losses))
        }
        Features::Projection => {
            let mut c = vec![tag::PROJECTION];
            c.extend_from_slice(coords);
            let m = Matrix::glorot(h.n_nodes(), cfg.d / 4, &mut derived(cfg.seed, &c));
            Ok((m, Vec::new()))
        }
    }
}

/// Per-column z-scores; constant columns become 0. Embedding scales differ
/// from graph to graph, rankings only need relative position.
pub fn standardize(x: &Matrix) -> Matrix {
    let (n, c) = x.shape();
    let mut out = x.clone();
    for j in 0..c {
        let mean = (0..n).map(|i| x.get(i, j)).sum::<f64>() / n as f64;
        let var = (0..n).map(|i| (x.get(i, j) - mean).powi(2)).sum::<f64>() / n as f64;
        let sd = var.sqrt();
        for i in 0..n {
            out.set(i, j, if sd > 1e-12 { (x.get(i, j) - mean) / sd } else { 0.0 });
        }
    }
    out
}

pub fn build_propagator(h: &Hypergraph, cfg: &RunConfig, coords: &[u64]) -> Propagator {
    let mut c = vec![tag::PROPAGATOR];
    c.extend_from_slice(coords);
    Propagator::build(h, &mut derived(cfg.seed, &c))
}

pub fn label(h: &Hypergraph, cfg: &RunConfig, test: bool, coords: &[u64]) -> Result<InfluenceLabels> {
    let mut c = vec![tag::LABELS];
    c.extend_from_slice(coords);
    influence_labels(h, &cfg.sir(test), cfg.replicas, derive_seed(cfg.seed, &c))
}

/// One synthetic graph of the training or validation corpus.
#[derive(Debug, Clone)]
pub struct CorpusGraph {
    pub name: String,
    pub spec: GenSpec,
    pub graph: Hypergraph,
    pub coords: Vec<u64>,
}

/// Training and validation graphs, families interleaved
/// (`wsh, erh, sfh, wsh, ...`).
pub fn build_corpus(cfg: &RunConfig) -> Result<(Vec<CorpusGraph>, Vec<CorpusGraph>)> {
    let make = |role: u64, count: usize, label: &str| -> Result<Vec<CorpusGraph>> {
        let mut out = Vec::new();
        for i in 0..count {
            for (f, &family) in cfg.train_families.iter().enumerate() {
                let coords = vec![role, i as u64, f as u64];
                let spec = GenSpec {
                    family,
                    seed: derive_seed(cfg.seed, &coords),
                    ..cfg.train
                };
                out.push(CorpusGraph {
                    name: format!("{label}_{i}_{family}"),
                    graph: spec.generate()?,
                    spec,
                    coords,
                });
            }
        }
        Ok(out)
    };
    Ok((make(tag::TRAIN_GRAPH, cfg.train_graphs, "train")?, make(tag::VAL_GRAPH, cfg.val_graphs, "val")?))
}

/// Propagator and features for one labelled graph.
pub fn rank_sample(
    name: &str,
    h: &Hypergraph,
    labels: &[f64],
    cfg: &RunConfig,
    mode: Features,
    coords: &[u64],
) -> Result<RankSample> {
    if labels.len() != h.n_nodes() {
        return Err(Error::LengthMismatch(h.n_nodes(), labels.len()));
    }
    let p = build_propagator(h, cfg, coords);
    let (features, _) = node_features(h, &p, cfg, mode, coords)?;
    Ok(RankSample {
        name: name.to_string(),
        p,
        features,
        labels: labels.to_vec(),
    })
}

/// Labelled corpus with features in both modes.
pub struct PreparedCorpus {
    pub train: Vec<CorpusGraph>,
    pub val: Vec<CorpusGraph>,
    pub train_labels: Vec<InfluenceLabels>,
    pub val_labels: Vec<InfluenceLabels>,
}

pub fn label_corpus(cfg: &RunConfig, sink: &mut dyn ArtifactSink) -> Result<PreparedCorpus> {
    let (train, val) = stage("corpus", build_corpus(cfg))?;
    let mut train_labels = Vec::new();
    let mut val_labels = Vec::new();
    for (graphs, labels) in [(&train, &mut train_labels), (&val, &mut val_labels)] {
        for g in graphs.iter() {
            sink.put(&format!("corpus/{}.txt", g.name), &format!("{}\n{}", g.spec.header(), g.graph.to_edge_list(None)))?;
            let l = stage("labels", label(&g.graph, cfg, false, &g.coords))?;
            sink.put(&format!("corpus/{}_labels.csv", g.name), &l.to_csv())?;
            labels.push(l);
        }
    }
    Ok(PreparedCorpus {
        train,
        val,
        train_labels,
        val_labels,
    })
}

/// Pre-trains a ranker on the corpus with the given feature mode.
pub fn pretrain_on(corpus: &PreparedCorpus, cfg: &RunConfig, mode: Features) -> Result<PretrainOutcome> {
    let build = |gs: &[CorpusGraph], ls: &[InfluenceLabels]| -> Result<Vec<RankSample>> {
        gs.iter()
            .zip(ls)
            .map(|(g, l)| rank_sample(&g.name, &g.graph, &l.values, cfg, mode, &g.coords))
            .collect()
    };
    let train = stage("features", build(&corpus.train, &corpus.train_labels))?;
    let val = stage("features", build(&corpus.val, &corpus.val_labels))?;
    stage("pretrain", pretrain_ranker(&train, &val, cfg.ranker_shape(), &cfg.pretrain_config(mode)))
}

/// The test graph: loaded from `dataset` or generated from `test`.
pub fn test_graph(cfg: &RunConfig) -> Result<(Hypergraph, Option<GenSpec>)> {
    match &cfg.dataset {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            Ok((Hypergraph::parse_auto(&text)?.0, None))
        }
        None => {
            let spec = GenSpec {
                seed: derive_seed(cfg.seed, &[tag::TEST_GRAPH]),
                ..cfg.test
            };
            Ok((spec.generate()?, Some(spec)))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineSummary {
    pub dataset: String,
    pub basic_tau: f64,
    pub finetuned_tau: f64,
    pub hg_tau: f64,
    pub representatives: Representatives,
    pub reports: Vec<EvalReport>,
    pub pretrain_best_epoch: usize,
}

impl PipelineSummary {
    pub fn report(&self, method: &str) -> Option<&EvalReport> {
        self.reports.iter().find(|r| r.method == method)
    }
}

fn scores_csv(s: &ScoreVector) -> String {
    s.to_csv()
}

/// Runs every stage and returns the headline numbers.
pub fn run_pipeline(cfg: &RunConfig, sink: &mut dyn ArtifactSink) -> Result<PipelineSummary> {
    stage("config", cfg.validate())?;
    sink.put("config.txt", &cfg.to_text())?;

    let corpus = label_corpus(cfg, sink)?;
    info!("corpus labelled: {} train, {} val graphs", corpus.train.len(), corpus.val.len());

    let ahg = pretrain_on(&corpus, cfg, Features::Autoencoder)?;
    sink.put("model/ahg.json", &ModelFile::new(ahg.ranker.clone(), cfg.training, model_meta(cfg, "ahg")).to_json()?)?;
    sink.put("curves/pretrain_ahg.csv", &crate::neural::train::history_csv(&ahg.history))?;
    let hg = pretrain_on(&corpus, cfg, Features::Projection)?;
    sink.put("model/hg.json", &ModelFile::new(hg.ranker.clone(), cfg.training, model_meta(cfg, "hg")).to_json()?)?;
    sink.put("curves/pretrain_hg.csv", &crate::neural::train::history_csv(&hg.history))?;
    info!("pre-training done (best epochs {} / {})", ahg.best_epoch, hg.best_epoch);

    let (h, spec) = stage("test-graph", test_graph(cfg))?;
    let dataset = match (&cfg.dataset, &spec) {
        (Some(p), _) => p.clone(),
        (None, Some(s)) => format!("{}_n{}_m{}_k{}", s.family, s.n_nodes, s.n_hyperedges, s.hyperedge_size),
        (None, None) => unreachable!(),
    };
    if let Some(s) = &spec {
        sink.put("test/graph.txt", &format!("{}\n{}", s.header(), h.to_edge_list(None)))?;
    }
    let test_coords = [tag::TEST_GRAPH];
    let labels = stage("labels", label(&h, cfg, true, &test_coords))?;
    sink.put("test/labels.csv", &labels.to_csv())?;
    let truth = ScoreVector::new("SIR", labels.values.clone())?;

    let p = build_propagator(&h, cfg, &test_coords);
    let (features, ae_losses) = stage("autoencoder", node_features(&h, &p, cfg, Features::Autoencoder, &test_coords))?;
    sink.put("curves/autoencoder_test.csv", &crate::neural::train::loss_csv(&ae_losses))?;
    let (proj, _) = node_features(&h, &p, cfg, Features::Projection, &test_coords)?;
    let sample = RankSample {
        name: dataset.clone(),
        p: p.clone(),
        features,
        labels: labels.values.clone(),
    };

    let reps = stage("select-reps", representatives(&h, &cfg.select_config()))?;
    sink.put("representatives.json", &serde_json::to_string_pretty(&reps)?)?;
    let rep_labels: Vec<f64> = reps.node_ids.iter().map(|&v| labels.values[v]).collect();
    let (ahga, ft_losses) = stage(
        "finetune",
        finetune(&ahg.ranker, &sample, &reps.node_ids, &rep_labels, &cfg.finetune_config()),
    )?;
    sink.put("model/ahga.json", &ModelFile::new(ahga.clone(), cfg.training, model_meta(cfg, "ahga")).to_json()?)?;
    sink.put("curves/finetune.csv", &crate::neural::train::loss_csv(&ft_losses))?;

    let mut methods: Vec<ScoreVector> = Vec::new();
    for b in Baseline::ALL {
        methods.push(stage("baselines", centrality::compute(&h, b, &cfg.centrality_params()))?);
    }
    let predict = |r: &Ranker, f: &Matrix, name: &str| -> Result<ScoreVector> { ScoreVector::new(name, r.predict(&p, f)?) };
    methods.push(predict(&ahga, &sample.features, "AHGA")?);
    methods.push(predict(&ahg.ranker, &sample.features, "AHG")?);
    methods.push(predict(&hg.ranker, &proj, "HG")?);
    for m in &methods {
        sink.put(&format!("scores/{}.csv", m.method), &scores_csv(m))?;
    }

    let opts = EvalOptions {
        overlap_percents: &cfg.overlap,
        fractions: &cfg.fractions,
        s_max: cfg.s_max,
        ..EvalOptions::default()
    };
    let reports: Vec<EvalReport> = methods
        .iter()
        .map(|m| eval::evaluate(&h, &truth, m, &opts))
        .collect::<Result<_>>()
        .map_err(|e| Error::Stage {
            stage: "evaluate".into(),
            source: Box::new(e),
        })?;
    let tau_of = |name: &str| reports.iter().find(|r| r.method == name).map_or(f64::NAN, |r| r.tau);
    let summary = PipelineSummary {
        dataset: dataset.clone(),
        basic_tau: tau_of("AHG"),
        finetuned_tau: tau_of("AHGA"),
        hg_tau: tau_of("HG"),
        representatives: reps,
        reports,
        pretrain_best_epoch: ahg.best_epoch,
    };
    write_tables(&summary, sink)?;
    Ok(summary)
}

pub fn model_meta(cfg: &RunConfig, variant: &str) -> serde_json::Value {
    serde_json::json!({
        "variant": variant,
        "d": cfg.d,
        "layers": cfg.layers,
        "enc_depth": cfg.enc_depth,
        "seed": cfg.seed,
        "train_families": join(&cfg.train_families),
    })
}

/// `tau.csv`, `overlap.csv` and `dismantling.csv` in long format, one row
/// per (method, x) point.
pub fn write_report_tables(reports: &[EvalReport], sink: &mut dyn ArtifactSink) -> Result<()> {
    let mut tau = String::from("method,tau\n");
    let mut overlap = String::from("method,f,overlap\n");
    let mut dismantle = String::from("method,p,delta_e\n");
    for r in reports {
        let _ = writeln!(tau, "{},{:.6}", r.method, r.tau);
        for (f, o) in &r.overlap {
            let _ = writeln!(overlap, "{},{f},{o:.6}", r.method);
        }
        for (p, d) in &r.delta_eff {
            let _ = writeln!(dismantle, "{},{p},{d:.12}", r.method);
        }
    }
    sink.put("tau.csv", &tau)?;
    sink.put("overlap.csv", &overlap)?;
    sink.put("dismantling.csv", &dismantle)?;
    sink.put("report.json", &serde_json::to_string_pretty(reports)?)
}

fn write_tables(s: &PipelineSummary, sink: &mut dyn ArtifactSink) -> Result<()> {
    sink.put(
        "finetune_tau.csv",
        &format!("dataset,basic_tau,finetuned_tau\n{},{:.6},{:.6}\n", s.dataset, s.basic_tau, s.finetuned_tau),
    )?;
    write_report_tables(&s.reports, sink)?;
    sink.put(
        "ablation.csv",
        &format!("variant,tau\nAHGA,{:.6}\nAHG,{:.6}\nHG,{:.6}\n", s.finetuned_tau, s.basic_tau, s.hg_tau),
    )?;
    sink.put("summary.json", &serde_json::to_string_pretty(s)?)
}

/// Ablation taus of one seed set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AblationRow {
    pub seed: u64,
    pub ahga: f64,
    pub ahg: f64,
    pub hg: f64,
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Runs the pipeline once per seed in `seeds` (evaluation limited to tau)
/// and tabulates the three variants.
pub fn run_ablation(base: &RunConfig, seeds: &[u64], sink: &mut dyn ArtifactSink) -> Result<Vec<AblationRow>> {
    let mut rows = Vec::new();
    for &seed in seeds {
        let cfg = RunConfig {
            seed,
            fractions: Vec::new(),
            ..base.clone()
        };
        let s = run_pipeline(&cfg, &mut NullSink)?;
        info!("seed {seed}: AHGA {:.4} AHG {:.4} HG {:.4}", s.finetuned_tau, s.basic_tau, s.hg_tau);
        rows.push(AblationRow {
            seed,
            ahga: s.finetuned_tau,
            ahg: s.basic_tau,
            hg: s.hg_tau,
        });
    }
    let mut csv = String::from("seed,AHGA,AHG,HG\n");
    for r in &rows {
        let _ = writeln!(csv, "{},{:.6},{:.6},{:.6}", r.seed, r.ahga, r.ahg, r.hg);
    }
    let col = |f: fn(&AblationRow) -> f64| median(&mut rows.iter().map(f).collect::<Vec<_>>());
    let _ = writeln!(csv, "median,{:.6},{:.6},{:.6}", col(|r| r.ahga), col(|r| r.ahg), col(|r| r.hg));
    sink.put("ablation_seeds.csv", &csv)?;
    Ok(rows)
}
