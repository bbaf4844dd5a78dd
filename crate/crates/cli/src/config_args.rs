//! `--config FILE` plus one `--<key>` flag per run-configuration key.
//!
//! Keys come from [`RunConfig::KEYS`], so a key added to the library is a
//! flag without touching the CLI. Flags override the file, which overrides
//! the defaults.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Arg, ArgMatches, Args, Command, FromArgMatches};

use hyperrank_core::pipeline::RunConfig;

#[derive(Debug, Clone, Default)]
pub struct ConfigArgs {
    pub file: Option<PathBuf>,
    /// (key, value) in canonical key order.
    pub overrides: Vec<(String, String)>,
}

const HEADING: &str = "Run configuration";

fn flag(key: &str) -> String {
    key.replace('_', "-")
}

/// Short spellings kept for the `rank` subcommand.
fn aliases(key: &str) -> &'static [&'static str] {
    match key {
        "hdf_r" => &["r"],
        "hdf_sm" => &["sm"],
        _ => &[],
    }
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.file {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            cfg.apply_text(&text).with_context(|| format!("in config {}", path.display()))?;
        }
        for (k, v) in &self.overrides {
            cfg.set(k, v).with_context(|| format!("--{}", flag(k)))?;
        }
        Ok(cfg)
    }
}

impl FromArgMatches for ConfigArgs {
    fn from_arg_matches(m: &ArgMatches) -> Result<Self, clap::Error> {
        let mut out = Self::default();
        out.update_from_arg_matches(m)?;
        Ok(out)
    }

    fn update_from_arg_matches(&mut self, m: &ArgMatches) -> Result<(), clap::Error> {
        if let Some(p) = m.get_one::<PathBuf>("config") {
            self.file = Some(p.clone());
        }
        for key in RunConfig::KEYS {
            if let Some(v) = m.get_one::<String>(key) {
                self.overrides.retain(|(k, _)| k != key);
                self.overrides.push((key.to_string(), v.clone()));
            }
        }
        Ok(())
    }
}

impl Args for ConfigArgs {
    fn augment_args(cmd: Command) -> Command {
        let mut cmd = cmd.arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .help("Flat `key = value` configuration file")
                .value_parser(clap::value_parser!(PathBuf))
                .help_heading(HEADING),
        );
        for key in RunConfig::KEYS {
            let mut arg = Arg::new(*key)
                .long(flag(key))
                .value_name("VALUE")
                .help_heading(HEADING);
            for a in aliases(key) {
                arg = arg.alias(*a);
            }
            cmd = cmd.arg(arg);
        }
        cmd
    }

    fn augment_args_for_update(cmd: Command) -> Command {
        Self::augment_args(cmd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    #[derive(Parser)]
    struct T {
        #[command(flatten)]
        cfg: ConfigArgs,
    }

    #[test]
    fn flags_override_defaults() {
        let t = T::try_parse_from(["t", "--beta0", "0.3", "--theta-quantile", "0.8", "--r", "1.5"]).unwrap();
        let cfg = t.cfg.resolve().unwrap();
        assert_eq!(cfg.beta0, 0.3);
        assert_eq!(cfg.theta_quantile, 0.8);
        assert_eq!(cfg.hdf.r, 1.5);
    }

    #[test]
    fn file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "seed = 9\nd = 32\n").unwrap();
        let t = T::try_parse_from(["t", "--config", path.to_str().unwrap(), "--d", "64"]).unwrap();
        let cfg = t.cfg.resolve().unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.d, 64);
    }

    #[test]
    fn bad_value_names_the_flag() {
        let t = T::try_parse_from(["t", "--n-rep", "many"]).unwrap();
        let err = format!("{:#}", t.cfg.resolve().unwrap_err());
        assert!(err.contains("--n-rep"), "{err}");
    }
}
