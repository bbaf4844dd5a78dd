//! `hyperrank`: command-line front end for the key-node identification
//! pipeline. Every subcommand that writes a file also writes a
//! `<file>.prov.json` sidecar recording the configuration hash, seeds and
//! tool version.

mod config_args;
mod output;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use serde_json::json;

use hyperrank_core::centrality::{self, Baseline};
use hyperrank_core::diffusion::{influence_labels, InfluenceLabels, SirParams};
use hyperrank_core::eval::{self, EvalOptions, TauVariant};
use hyperrank_core::fractal::representatives;
use hyperrank_core::generators::{Family, GenSpec};
use hyperrank_core::neural::{finetune, pretrain_ranker, train, ModelFile, RankSample};
use hyperrank_core::pipeline::{self, tag, Features, RunConfig};
use hyperrank_core::{Hypergraph, ScoreVector};

use config_args::ConfigArgs;
use output::{read_input, DirSink, Provenance};

#[derive(Parser)]
#[command(name = "hyperrank", version, about = "Key-node identification on hypergraphs")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "HYPERRANK_THREADS")]
    threads: Option<usize>,

    /// Log more (repeat for debug output).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic uniform hypergraph.
    Generate {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Rewiring probability (WSH).
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Degree exponent (SFH).
        #[arg(long, default_value_t = 2.0)]
        sf_gamma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (stdout if omitted).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Print N, M, average degrees and CV of the degree distribution.
    Stats {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Ground-truth influence labels by SIR simulation.
    Label {
        #[arg(short, long)]
        input: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Score nodes with a baseline or a trained model.
    Rank {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        method: Method,
        /// Trained model (ahga / ahg / hg).
        #[arg(long)]
        model: Option<PathBuf>,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Train the per-graph autoencoder and write node embeddings.
    TrainAe {
        #[arg(short, long)]
        input: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Output directory.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Pre-train the ranker on labelled graphs (`GRAPH:LABELS` pairs).
    Pretrain {
        #[arg(long = "train", value_name = "GRAPH:LABELS", required = true)]
        train: Vec<String>,
        #[arg(long = "val", value_name = "GRAPH:LABELS")]
        val: Vec<String>,
        #[arg(long, value_enum, default_value_t = FeatureArg::Ae)]
        features: FeatureArg,
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Model file to write; the training history goes next to it.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Choose representative nodes for fine-tuning.
    SelectReps {
        #[arg(short, long)]
        input: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Fine-tune a pre-trained ranker on the labels of the representatives.
    Finetune {
        #[arg(short, long)]
        input: PathBuf,
        /// Labels CSV; only the representatives' entries are read.
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Representatives JSON from `select-reps`.
        #[arg(long)]
        reps: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Compare score files against ground-truth labels.
    Evaluate {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        /// Score CSVs; the method name is the file stem.
        #[arg(long = "scores", required = true)]
        scores: Vec<PathBuf>,
        /// Use tau-b instead of tau-a.
        #[arg(long)]
        tau_b: bool,
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Output directory.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Run every stage end to end.
    Pipeline {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Output directory.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Run the pipeline over several seeds and tabulate AHGA / AHG / HG.
    Ablate {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Seeds: `a..b` (inclusive) or a comma list.
        #[arg(long, default_value = "1..10")]
        seeds: String,
        /// Output directory.
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Dc,
    Hedc,
    Vc,
    Hcc,
    Hdf,
    Ahga,
    Ahg,
    Hg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FeatureArg {
    /// Autoencoder embeddings.
    Ae,
    /// Random projection of the one-hot input.
    Projection,
}

impl From<FeatureArg> for Features {
    fn from(f: FeatureArg) -> Self {
        match f {
            FeatureArg::Ae => Features::Autoencoder,
            FeatureArg::Projection => Features::Projection,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            std::process::exit(2);
        }
    }
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn load_graph(path: &Path) -> Result<Hypergraph> {
    let text = read_input(path)?;
    let (h, _) = Hypergraph::parse_auto(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(h)
}

fn load_labels(path: &Path, n: usize) -> Result<Vec<f64>> {
    let values = InfluenceLabels::values_from_csv(&read_input(path)?).with_context(|| format!("parsing {}", path.display()))?;
    if values.len() != n {
        bail!("{} has {} labels, graph has {n} nodes", path.display(), values.len());
    }
    Ok(values)
}

fn split_pair(arg: &str) -> Result<(PathBuf, PathBuf)> {
    let (g, l) = arg
        .rsplit_once(':')
        .with_context(|| format!("expected GRAPH:LABELS, got {arg:?}"))?;
    Ok((PathBuf::from(g), PathBuf::from(l)))
}

/// Reads a labelled graph and builds its ranker input.
fn load_sample(arg: &str, cfg: &RunConfig, mode: Features, coords: &[u64]) -> Result<(RankSample, Vec<PathBuf>)> {
    let (g, l) = split_pair(arg)?;
    let h = load_graph(&g)?;
    let labels = load_labels(&l, h.n_nodes())?;
    let name = g.file_stem().map_or_else(|| arg.to_string(), |s| s.to_string_lossy().into_owned());
    let sample = pipeline::rank_sample(&name, &h, &labels, cfg, mode, coords)?;
    Ok((sample, vec![g, l]))
}

fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = spec.split_once("..") {
        let a: u64 = a.trim().parse().context("bad seed range start")?;
        let b: u64 = b.trim().trim_start_matches('=').parse().context("bad seed range end")?;
        if b < a {
            bail!("empty seed range {spec}");
        }
        return Ok((a..=b).collect());
    }
    spec.split(',')
        .map(|t| t.trim().parse().with_context(|| format!("bad seed {t:?}")))
        .collect()
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Generate {
            family,
            n,
            m,
            k,
            p,
            sf_gamma,
            seed,
            out,
        } => {
            let spec = GenSpec {
                rewire_p: p,
                gamma: sf_gamma,
                ..GenSpec::new(family, n, m, k, seed)
            };
            let h = spec.generate()?;
            let text = format!("{}\n{}", spec.header(), h.to_edge_list(None));
            let prov = Provenance::new("generate", &spec.header(), json!({ "seed": seed }));
            output::emit(out.as_deref(), &text, &prov)
        }
        Command::Stats { input, out } => {
            let h = load_graph(&input)?;
            let stats = h.stats()?;
            let text = format!("{}\n{}\n", hyperrank_core::GraphStats::CSV_HEADER, stats.csv_row());
            let prov = Provenance::new("stats", "", json!({})).with_inputs(&[&input])?;
            output::emit(out.as_deref(), &text, &prov)
        }
        Command::Label { input, cfg, out } => {
            let cfg = cfg.resolve()?;
            let h = load_graph(&input)?;
            let params = SirParams {
                beta: cfg.test_beta0.unwrap_or(cfg.beta0),
                gamma: cfg.gamma,
                max_steps: cfg.max_steps,
            };
            let seed = hyperrank_core::rng::derive_seed(cfg.seed, &[tag::LABELS, tag::TEST_GRAPH]);
            let labels = influence_labels(&h, &params, cfg.replicas, seed)?;
            let prov = Provenance::from_config("label", &cfg, labels.sidecar()).with_inputs(&[&input])?;
            output::emit(out.as_deref(), &labels.to_csv(), &prov)
        }
        Command::Rank {
            input,
            method,
            model,
            cfg,
            out,
        } => {
            let mut cfg = cfg.resolve()?;
            let h = load_graph(&input)?;
            let mut inputs = vec![input.clone()];
            let scores = match method {
                Method::Dc | Method::Hedc | Method::Vc | Method::Hcc | Method::Hdf => {
                    let b = match method {
                        Method::Dc => Baseline::Dc,
                        Method::Hedc => Baseline::Hedc,
                        Method::Vc => Baseline::Vc,
                        Method::Hcc => Baseline::Hcc,
                        _ => Baseline::Hdf,
                    };
                    centrality::compute(&h, b, &cfg.centrality_params())?
                }
                Method::Ahga | Method::Ahg | Method::Hg => {
                    let path = model.context("--model is required for neural methods")?;
                    let file = ModelFile::from_json(&read_input(&path)?)?;
                    inputs.push(path);
                    cfg.d = file.ranker.shape.width * 4;
                    if let Some(depth) = file.meta.get("enc_depth").and_then(|v| v.as_u64()) {
                        cfg.enc_depth = depth as usize;
                    }
                    let mode = if matches!(method, Method::Hg) { Features::Projection } else { Features::Autoencoder };
                    let coords = [tag::TEST_GRAPH];
                    let p = pipeline::build_propagator(&h, &cfg, &coords);
                    let (features, _) = pipeline::node_features(&h, &p, &cfg, mode, &coords)?;
                    let name = match method {
                        Method::Ahga => "AHGA",
                        Method::Ahg => "AHG",
                        _ => "HG",
                    };
                    ScoreVector::new(name, file.ranker.predict(&p, &features)?)?
                }
            };
            let params = json!({
                "method": scores.method,
                "hcc_s": cfg.hcc_s,
                "hdf_r": cfg.hdf.r,
                "hdf_sm": cfg.hdf.s_max,
                "hdf_squared": cfg.hdf.squared_membership,
            });
            let prov = Provenance::from_config("rank", &cfg, params).with_inputs(&inputs)?;
            output::emit(out.as_deref(), &scores.to_csv(), &prov)
        }
        Command::TrainAe { input, cfg, out } => {
            let cfg = cfg.resolve()?;
            let h = load_graph(&input)?;
            let coords = [tag::TEST_GRAPH];
            let p = pipeline::build_propagator(&h, &cfg, &coords);
            let tc = cfg.pretrain_config(Features::Autoencoder);
            let ae = train::train_autoencoder(&h, &p, cfg.d, cfg.enc_depth, cfg.decoder_relu, &tc)?;
            let mut sink = DirSink::new(&out, Provenance::from_config("train-ae", &cfg, json!({})).with_inputs(&[&input])?)?;
            let mut csv = String::new();
            for i in 0..ae.embeddings.rows() {
                let row: Vec<String> = ae.embeddings.row(i).iter().map(|x| format!("{x:e}")).collect();
                csv.push_str(&format!("{i},{}\n", row.join(",")));
            }
            use hyperrank_core::pipeline::ArtifactSink;
            sink.put("embeddings.csv", &csv)?;
            sink.put("loss.csv", &train::loss_csv(&ae.losses))?;
            info!("autoencoder loss {:?} -> {:?}", ae.losses.first(), ae.losses.last());
            Ok(())
        }
        Command::Pretrain {
            train: train_args,
            val,
            features,
            cfg,
            out,
        } => {
            let cfg = cfg.resolve()?;
            let mode: Features = features.into();
            let mut inputs = Vec::new();
            let mut train_set = Vec::new();
            for (i, a) in train_args.iter().enumerate() {
                let (s, paths) = load_sample(a, &cfg, mode, &[tag::TRAIN_GRAPH, i as u64])?;
                train_set.push(s);
                inputs.extend(paths);
            }
            let mut val_set = Vec::new();
            for (i, a) in val.iter().enumerate() {
                let (s, paths) = load_sample(a, &cfg, mode, &[tag::VAL_GRAPH, i as u64])?;
                val_set.push(s);
                inputs.extend(paths);
            }
            let outcome = pretrain_ranker(&train_set, &val_set, cfg.ranker_shape(), &cfg.pretrain_config(mode))?;
            let variant = match mode {
                Features::Autoencoder => "ahg",
                Features::Projection => "hg",
            };
            let model = ModelFile::new(outcome.ranker, cfg.training, pipeline::model_meta(&cfg, variant));
            let prov = Provenance::from_config("pretrain", &cfg, json!({ "best_epoch": outcome.best_epoch })).with_inputs(&inputs)?;
            output::emit(Some(&out), &model.to_json()?, &prov)?;
            let hist = output::sibling(&out, "history.csv");
            output::emit(Some(&hist), &train::history_csv(&outcome.history), &prov)
        }
        Command::SelectReps { input, cfg, out } => {
            let cfg = cfg.resolve()?;
            let h = load_graph(&input)?;
            let reps = representatives(&h, &cfg.select_config())?;
            if reps.dc_filled > 0 {
                log::warn!("{} representative(s) filled by degree", reps.dc_filled);
            }
            let prov = Provenance::from_config("select-reps", &cfg, json!({})).with_inputs(&[&input])?;
            output::emit(out.as_deref(), &(serde_json::to_string_pretty(&reps)? + "\n"), &prov)
        }
        Command::Finetune {
            input,
            labels,
            model,
            reps,
            cfg,
            out,
        } => {
            let mut cfg = cfg.resolve()?;
            let file = ModelFile::from_json(&read_input(&model)?)?;
            cfg.d = file.ranker.shape.width * 4;
            let h = load_graph(&input)?;
            let values = load_labels(&labels, h.n_nodes())?;
            let reps_json: serde_json::Value = serde_json::from_str(&read_input(&reps)?)?;
            let ids: Vec<usize> = reps_json
                .get("node_ids")
                .and_then(|v| v.as_array())
                .context("representatives file has no node_ids")?
                .iter()
                .map(|v| v.as_u64().map(|x| x as usize).context("bad node id"))
                .collect::<Result<_>>()?;
            if let Some(&bad) = ids.iter().find(|&&v| v >= h.n_nodes()) {
                bail!("representative {bad} is not a node of the graph");
            }
            let sample = pipeline::rank_sample("finetune", &h, &values, &cfg, Features::Autoencoder, &[tag::TEST_GRAPH])?;
            let rep_labels: Vec<f64> = ids.iter().map(|&v| values[v]).collect();
            let (ranker, losses) = finetune(&file.ranker, &sample, &ids, &rep_labels, &cfg.finetune_config())?;
            let out_model = ModelFile::new(ranker, cfg.training, pipeline::model_meta(&cfg, "ahga"));
            let prov = Provenance::from_config("finetune", &cfg, json!({ "representatives": ids }))
                .with_inputs(&[&input, &labels, &model, &reps])?;
            output::emit(Some(&out), &out_model.to_json()?, &prov)?;
            output::emit(Some(&output::sibling(&out, "loss.csv")), &train::loss_csv(&losses), &prov)
        }
        Command::Evaluate {
            input,
            labels,
            scores,
            tau_b,
            cfg,
            out,
        } => {
            let cfg = cfg.resolve()?;
            let h = load_graph(&input)?;
            let truth = ScoreVector::new("SIR", load_labels(&labels, h.n_nodes())?)?;
            let opts = EvalOptions {
                overlap_percents: &cfg.overlap,
                fractions: &cfg.fractions,
                s_max: cfg.s_max,
                tau: if tau_b { TauVariant::B } else { TauVariant::A },
            };
            let mut reports = Vec::new();
            let mut inputs = vec![input.clone(), labels.clone()];
            for path in &scores {
                let name = path
                    .file_stem()
                    .map_or_else(|| "scores".to_string(), |s| s.to_string_lossy().into_owned());
                let pred = ScoreVector::from_csv(name, &read_input(path)?)?;
                reports.push(eval::evaluate(&h, &truth, &pred, &opts)?);
                inputs.push(path.clone());
            }
            let prov = Provenance::from_config("evaluate", &cfg, json!({ "tau_b": tau_b })).with_inputs(&inputs)?;
            let mut sink = DirSink::new(&out, prov)?;
            output::write_reports(&mut sink, &reports)
        }
        Command::Pipeline { cfg, out } => {
            let cfg = cfg.resolve()?;
            let mut prov = Provenance::from_config("pipeline", &cfg, json!({}));
            if let Some(d) = &cfg.dataset {
                prov = prov.with_inputs(&[Path::new(d)])?;
            }
            let mut sink = DirSink::new(&out, prov)?;
            let summary = pipeline::run_pipeline(&cfg, &mut sink)?;
            println!("dataset,basic_tau,finetuned_tau");
            println!("{},{:.6},{:.6}", summary.dataset, summary.basic_tau, summary.finetuned_tau);
            Ok(())
        }
        Command::Ablate { cfg, seeds, out } => {
            let cfg = cfg.resolve()?;
            let seeds = parse_seeds(&seeds)?;
            let prov = Provenance::from_config("ablate", &cfg, json!({ "seeds": seeds }));
            let mut sink = DirSink::new(&out, prov)?;
            let rows = pipeline::run_ablation(&cfg, &seeds, &mut sink)?;
            println!("seed,AHGA,AHG,HG");
            for r in rows {
                println!("{},{:.6},{:.6},{:.6}", r.seed, r.ahga, r.ahg, r.hg);
            }
            Ok(())
        }
    }
}
