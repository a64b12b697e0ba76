//! Command-line surface. Every flag is checked by [`Cli::validate`] before a
//! single file is touched.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hdc_core::encoders::{EncoderConfig, SequenceMode};
use hdc_core::learn::PredictMetric;
use hdc_core::{Domain, Metric, DEFAULT_DIM};

use crate::error::{CliError, Result};
use crate::residues::{Alphabet, AmbiguityPolicy, ResidueConfig};

pub const DEFAULT_N: usize = 5;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug, Clone)]
#[command(name = "hdc", version, about = "Hyperdimensional encoding, classification and search for biological sequences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: one per core). Never changes any output.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Encode every FASTA record into a hypervector container.
    Encode(EncodeArgs),
    /// Train a prototype classifier from a FASTA file and an id/label TSV.
    Train(TrainArgs),
    /// Classify FASTA records with a trained model (TSV output).
    Predict(PredictArgs),
    /// Rank the entries of a container against query sequences (TSV output).
    Search(SearchArgs),
    /// Measure encoding throughput on synthetic sequences.
    Bench(BenchArgs),
}

/// Encoding parameters. Unset flags take their defaults when building new
/// vectors, and the stored values when reading a model or container (where
/// any flag that is given must agree with the file).
#[derive(Args, Debug, Clone, Default, PartialEq)]
pub struct EncodingFlags {
    /// Hypervector dimension [default: 10000]
    #[arg(long)]
    pub dim: Option<usize>,
    /// binary | bipolar | real [default: binary]
    #[arg(long)]
    pub domain: Option<Domain>,
    /// ngram | bundled | bound [default: ngram]
    #[arg(long)]
    pub mode: Option<SequenceMode>,
    /// n-gram (k-mer) length [default: 5]
    #[arg(long)]
    pub n: Option<usize>,
    /// Global seed for every codebook and random choice [default: 42]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Residue alphabet [default: dna]
    #[arg(long, value_enum)]
    pub alphabet: Option<Alphabet>,
    /// Handling of IUPAC ambiguity codes [default: skip]
    #[arg(long, value_enum)]
    pub ambiguity: Option<AmbiguityPolicy>,
}

#[derive(Args, Debug, Clone)]
pub struct EncodeArgs {
    /// FASTA or gzip-compressed FASTA
    pub input: PathBuf,
    #[command(flatten)]
    pub encoding: EncodingFlags,
    /// Container file to write
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct TrainArgs {
    /// FASTA or gzip-compressed FASTA
    pub input: PathBuf,
    /// Two-column TSV: record id, class label
    #[arg(long)]
    pub labels: PathBuf,
    #[command(flatten)]
    pub encoding: EncodingFlags,
    /// Retraining passes after one-shot training (0 = one-shot only)
    #[arg(long, default_value_t = 0)]
    pub epochs: usize,
    /// Retraining learning rate
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Model file to write
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PredictMetricArg {
    Cosine,
    Hamming,
}

impl From<PredictMetricArg> for PredictMetric {
    fn from(m: PredictMetricArg) -> Self {
        match m {
            PredictMetricArg::Cosine => PredictMetric::Cosine,
            PredictMetricArg::Hamming => PredictMetric::Hamming,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct PredictArgs {
    /// Model file written by `train`
    #[arg(long)]
    pub model: PathBuf,
    /// FASTA or gzip-compressed FASTA
    pub input: PathBuf,
    #[command(flatten)]
    pub encoding: EncodingFlags,
    /// Similarity against prototypes
    #[arg(long, value_enum, default_value_t = PredictMetricArg::Cosine)]
    pub metric: PredictMetricArg,
    /// TSV to write (default: stdout)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    /// Container written by `encode`
    pub container: PathBuf,
    /// Query FASTA or gzip-compressed FASTA
    pub query: PathBuf,
    /// Hits reported per query
    #[arg(short, long, default_value_t = 10)]
    pub k: usize,
    #[command(flatten)]
    pub encoding: EncodingFlags,
    /// hamming | jaccard | cosine [default: hamming for binary, else cosine]
    #[arg(long)]
    pub metric: Option<Metric>,
    /// TSV to write (default: stdout)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    #[command(flatten)]
    pub encoding: EncodingFlags,
    /// Number of synthetic sequences
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    /// Length of each synthetic sequence
    #[arg(long, default_value_t = 1000)]
    pub length: usize,
    /// Report to write (default: stdout)
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl EncodingFlags {
    fn check(&self) -> Result<()> {
        if self.dim == Some(0) {
            return Err(config_err("--dim must be positive"));
        }
        if self.n == Some(0) {
            return Err(config_err("--n must be at least 1"));
        }
        Ok(())
    }

    /// Fill unset flags with defaults.
    pub fn resolve(&self) -> Result<(EncoderConfig, ResidueConfig)> {
        self.check()?;
        let residues = ResidueConfig {
            alphabet: self.alphabet.unwrap_or(Alphabet::Dna),
            ambiguity: self.ambiguity.unwrap_or_default(),
        };
        let cfg = EncoderConfig::new(
            self.dim.unwrap_or(DEFAULT_DIM),
            self.domain.unwrap_or(Domain::Binary),
            self.mode.unwrap_or(SequenceMode::NGram),
            self.n.unwrap_or(DEFAULT_N),
            residues.symbols(),
            self.seed.unwrap_or(DEFAULT_SEED),
        );
        cfg.validate().map_err(|e| config_err(e.to_string()))?;
        Ok((cfg, residues))
    }

    /// Every explicitly given flag must match the stored configuration.
    pub fn check_against(&self, cfg: &EncoderConfig, residues: &ResidueConfig, what: &str) -> Result<()> {
        fn same<T: PartialEq + std::fmt::Debug>(flag: &str, given: Option<T>, stored: T, what: &str) -> Result<()> {
            match given {
                Some(g) if g != stored => Err(config_err(format!("--{flag} {g:?} does not match the {what} ({stored:?})"))),
                _ => Ok(()),
            }
        }
        same("dim", self.dim, cfg.dim, what)?;
        same("domain", self.domain, cfg.domain, what)?;
        same("mode", self.mode, cfg.mode, what)?;
        if cfg.mode == SequenceMode::NGram {
            same("n", self.n, cfg.n, what)?;
        }
        same("seed", self.seed, cfg.seed, what)?;
        same("alphabet", self.alphabet, residues.alphabet, what)?;
        same("ambiguity", self.ambiguity, residues.ambiguity, what)
    }
}

impl Cli {
    /// Flag-only checks; performs no I/O.
    pub fn validate(&self) -> Result<()> {
        if self.threads == Some(0) {
            return Err(config_err("--threads must be at least 1"));
        }
        match &self.command {
            Command::Encode(a) => a.encoding.resolve().map(drop),
            Command::Bench(a) => {
                if a.count == 0 || a.length == 0 {
                    return Err(config_err("--count and --length must be positive"));
                }
                a.encoding.resolve().map(drop)
            }
            Command::Train(a) => {
                if !(a.alpha.is_finite() && a.alpha >= 0.0) {
                    return Err(config_err(format!("--alpha must be finite and >= 0, got {}", a.alpha)));
                }
                a.encoding.resolve().map(drop)
            }
            Command::Predict(a) => a.encoding.check(),
            Command::Search(a) => {
                if a.k == 0 {
                    return Err(config_err("-k must be at least 1"));
                }
                if let (Some(m), Some(d)) = (a.metric, a.encoding.domain) {
                    if (m == Metric::Cosine) == (d == Domain::Binary) {
                        return Err(config_err(format!("metric {m:?} is not defined for {d:?} hypervectors")));
                    }
                }
                a.encoding.check()
            }
        }
    }
}
