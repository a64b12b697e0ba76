//! The subcommands. Each reads its inputs, computes its full output in
//! memory, and writes it only once everything has succeeded.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use hdc_core::container::{peek_kind, Kind};
use hdc_core::encoders::{EncoderConfig, SequenceEncoder};
use hdc_core::learn::{EpochStats, PredictMetric, TrainConfig};
use hdc_core::{seed, synth, AssocMemory, HdcError, HvCollection, Hypervector, Metric, Model};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::{BenchArgs, Cli, Command, EncodeArgs, PredictArgs, SearchArgs, TrainArgs};
use crate::error::{CliError, Result};
use crate::fasta::{self, Record};
use crate::residues::ResidueConfig;

/// Reproducibility header: the fully resolved configuration of a run. The
/// thread count and output path are deliberately absent because they never
/// change the result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub inputs: Vec<String>,
    pub encoder: EncoderConfig,
    pub residues: ResidueConfig,
    #[serde(default)]
    pub options: Value,
}

impl Provenance {
    pub fn new(command: &str, inputs: &[&Path], encoder: &EncoderConfig, residues: ResidueConfig, options: Value) -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            encoder: encoder.clone(),
            residues,
            options,
        }
    }

    /// `#`-prefixed first line of every TSV output.
    pub fn tsv_line(&self) -> String {
        format!("#hdc\t{}\n", serde_json::to_string(self).expect("provenance serializes"))
    }

    /// Provenance stored in a container or model written by this tool.
    pub fn from_meta(meta: &Value, path: &Path) -> Result<Self> {
        serde_json::from_value(meta.get("provenance").cloned().unwrap_or(Value::Null)).map_err(|e| CliError::File {
            path: path.into(),
            source: HdcError::CorruptContainer(format!("missing or invalid provenance: {e}")),
        })
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    cli.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Encode(a) => encode(a),
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Search(a) => search(a),
        Command::Bench(a) => bench(a),
    })
}

pub fn read_fasta(path: &Path) -> Result<Vec<Record>> {
    fasta::read_path(path).map_err(|source| CliError::Fasta { path: path.into(), source })
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    let res = match path {
        Some(p) => std::fs::write(p, bytes),
        None => std::io::stdout().lock().write_all(bytes),
    };
    res.map_err(|e| CliError::Input(format!("{}: {e}", path.map_or("<stdout>".into(), |p| p.display().to_string()))))
}

fn load_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::File { path: path.into(), source: e.into() })
}

/// Encoder for `cfg` with the residue policy applied.
pub fn build_encoder(cfg: &EncoderConfig, residues: &ResidueConfig) -> Result<SequenceEncoder> {
    let (enc, _) = SequenceEncoder::from_config(cfg)?;
    Ok(enc.with_policy(residues.unknown_policy()))
}

/// Encode records in parallel; results (and the first error) follow input order.
pub fn encode_records(
    records: &[Record],
    enc: &SequenceEncoder,
    residues: &ResidueConfig,
    seed: u64,
) -> Result<Vec<Hypervector>> {
    let results: Vec<Result<Hypervector>> = records
        .par_iter()
        .map(|r| {
            let seq = residues.prepare(&r.id, &r.seq, seed)?;
            enc.encode_bytes(&seq).map_err(|source| CliError::Record { id: r.id.clone(), source })
        })
        .collect();
    results.into_iter().collect()
}

fn encode(a: &EncodeArgs) -> Result<()> {
    let (cfg, residues) = a.encoding.resolve()?;
    let enc = build_encoder(&cfg, &residues)?;
    let records = read_fasta(&a.input)?;
    let hvs = encode_records(&records, &enc, &residues, cfg.seed)?;
    let prov = Provenance::new("encode", &[&a.input], &cfg, residues, json!({}));
    let collection = HvCollection {
        dim: cfg.dim,
        domain: cfg.domain,
        encoder: Some(cfg),
        meta: json!({ "provenance": prov }),
        entries: records.into_iter().map(|r| r.id).zip(hvs).collect(),
    };
    write_output(Some(&a.output), &collection.to_bytes()?)
}

/// Parse an `id<TAB>label` table. Blank and `#` lines are skipped, as is a
/// leading `id<TAB>label` header row.
pub fn read_labels(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let bad = |line: usize, msg: String| CliError::Input(format!("{}: line {line}: {msg}", path.display()));
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') || (i == 0 && line == "id\tlabel") {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let [id, label] = cols[..] else {
            return Err(bad(i + 1, format!("expected 2 tab-separated columns, found {}", cols.len())));
        };
        let (id, label) = (id.trim(), label.trim());
        if id.is_empty() || label.is_empty() {
            return Err(bad(i + 1, "empty id or label".into()));
        }
        if !seen.insert(id.to_owned()) {
            return Err(bad(i + 1, format!("duplicate id `{id}`")));
        }
        out.push((id.to_owned(), label.to_owned()));
    }
    if out.is_empty() {
        return Err(CliError::Input(format!("{}: no labels", path.display())));
    }
    Ok(out)
}

/// Label of every record; the two id sets must coincide.
fn match_labels(records: &[Record], labels: Vec<(String, String)>) -> Result<Vec<String>> {
    let mut map: HashMap<String, String> = labels.into_iter().collect();
    let out = records
        .iter()
        .map(|r| map.remove(&r.id).ok_or_else(|| CliError::Input(format!("record `{}` has no label", r.id))))
        .collect::<Result<Vec<_>>>()?;
    if let Some(extra) = map.keys().min() {
        return Err(CliError::Input(format!(
            "{} labeled id(s) are not in the FASTA input (first: `{extra}`)",
            map.len()
        )));
    }
    Ok(out)
}

fn train(a: &TrainArgs) -> Result<()> {
    let (cfg, residues) = a.encoding.resolve()?;
    let (enc, mem) = SequenceEncoder::from_config(&cfg)?;
    let enc = enc.with_policy(residues.unknown_policy());
    let records = read_fasta(&a.input)?;
    let labels = match_labels(&records, read_labels(&a.labels)?)?;
    let hvs = encode_records(&records, &enc, &residues, cfg.seed)?;
    let labeled: Vec<(Hypervector, String)> = hvs.into_iter().zip(labels).collect();
    let (model, oneshot, trace) = fit(&labeled, cfg.clone(), mem, a.epochs, a.alpha)?;
    let prov = Provenance::new(
        "train",
        &[&a.input, &a.labels],
        &cfg,
        residues,
        json!({ "epochs": a.epochs, "alpha": a.alpha }),
    );
    let meta = json!({
        "provenance": prov,
        "training": { "records": labeled.len(), "oneshot_accuracy": oneshot, "epochs": trace },
    });
    let bytes = model.to_bytes(&meta)?;
    let last = trace.last().map_or(oneshot, |e| e.accuracy);
    eprintln!(
        "trained {} classes on {} records: one-shot training accuracy {oneshot:.4}, final {last:.4} after {} retraining epoch(s)",
        model.labels().len(),
        labeled.len(),
        trace.len()
    );
    write_output(Some(&a.output), &bytes)
}

/// One-shot training followed by `epochs` retraining passes (seeded by the
/// encoder seed). Returns the model, the one-shot training accuracy and the
/// per-epoch trace.
pub fn fit(
    labeled: &[(Hypervector, String)],
    cfg: EncoderConfig,
    mem: hdc_core::ItemMemory,
    epochs: usize,
    alpha: f64,
) -> Result<(Model, f64, Vec<EpochStats>)> {
    let seed = cfg.seed;
    let model = Model::train_oneshot(labeled, cfg, mem)?;
    let oneshot = model.accuracy(labeled)?;
    if epochs == 0 {
        return Ok((model, oneshot, Vec::new()));
    }
    let tc = TrainConfig {
        epochs,
        alpha,
        shuffle_seed: seed,
        ..Default::default()
    };
    let (model, trace) = model.retrain(labeled, &tc)?;
    Ok((model, oneshot, trace))
}

fn load_model(path: &Path) -> Result<(Model, Provenance)> {
    let bytes = load_bytes(path)?;
    let file_err = |source| CliError::File { path: path.into(), source };
    if peek_kind(&bytes).map_err(file_err)? != Kind::Model {
        return Err(CliError::Config(format!("{}: not a model file", path.display())));
    }
    let (model, meta) = Model::from_bytes(&bytes).map_err(file_err)?;
    Ok((model, Provenance::from_meta(&meta, path)?))
}

fn fmt_score(v: f64) -> String {
    format!("{v:.6}")
}

fn fmt_z(z: f64) -> String {
    format!("{z:.3}")
}

fn predict(a: &PredictArgs) -> Result<()> {
    let (model, stored) = load_model(&a.model)?;
    let cfg = model.encoder_config().clone();
    a.encoding.check_against(&cfg, &stored.residues, "model")?;
    let residues = stored.residues;
    let enc = SequenceEncoder::new(cfg.mode, cfg.n, &cfg.alphabet, cfg.tie, &mut model.item_memory().clone())?
        .with_policy(residues.unknown_policy());
    let records = read_fasta(&a.input)?;
    let hvs = encode_records(&records, &enc, &residues, cfg.seed)?;
    let metric: PredictMetric = a.metric.into();
    let rows: Vec<Result<String>> = records
        .par_iter()
        .zip(&hvs)
        .map(|(r, hv)| {
            let p = model.predict_with(hv, metric)?;
            let best = &p.ranking[0].1;
            let ranking: Vec<String> = p
                .ranking
                .iter()
                .map(|(l, s)| format!("{l}:{}:{}", fmt_score(s.value), fmt_z(s.z_score)))
                .collect();
            Ok(format!(
                "{}\t{}\t{}\t{}\t{}\n",
                r.id,
                p.label,
                fmt_score(best.value),
                fmt_z(best.z_score),
                ranking.join(",")
            ))
        })
        .collect();
    let prov = Provenance::new(
        "predict",
        &[&a.model, &a.input],
        &cfg,
        residues,
        json!({ "metric": format!("{:?}", a.metric).to_lowercase() }),
    );
    let mut out = prov.tsv_line();
    out.push_str("id\tpredicted\tsimilarity\tz_score\tranking\n");
    for row in rows {
        out.push_str(&row?);
    }
    write_output(a.output.as_deref(), out.as_bytes())
}

fn search(a: &SearchArgs) -> Result<()> {
    let bytes = load_bytes(&a.container)?;
    let file_err = |source| CliError::File { path: a.container.clone(), source };
    if peek_kind(&bytes).map_err(file_err)? != Kind::Collection {
        return Err(CliError::Config(format!("{}: not a hypervector container", a.container.display())));
    }
    let collection = HvCollection::from_bytes(&bytes).map_err(file_err)?;
    let stored = Provenance::from_meta(&collection.meta, &a.container)?;
    let cfg = collection.encoder.clone().ok_or_else(|| {
        file_err(HdcError::CorruptContainer("container has no encoder configuration".into()))
    })?;
    a.encoding.check_against(&cfg, &stored.residues, "container")?;
    let metric = a.metric.unwrap_or(Metric::default_for(cfg.domain));
    if (metric == Metric::Cosine) == (cfg.domain == hdc_core::Domain::Binary) {
        return Err(CliError::Config(format!("metric {metric:?} is not defined for {:?} hypervectors", cfg.domain)));
    }
    let residues = stored.residues;
    let enc = build_encoder(&cfg, &residues)?;
    let memory = AssocMemory::from_collection(&collection)?.with_index(true);
    let queries = read_fasta(&a.query)?;
    let hvs = encode_records(&queries, &enc, &residues, cfg.seed)?;
    let mut out = Provenance::new(
        "search",
        &[&a.container, &a.query],
        &cfg,
        residues,
        json!({ "k": a.k, "metric": format!("{metric:?}").to_lowercase() }),
    )
    .tsv_line();
    out.push_str("query\trank\ttarget\tsimilarity\tz_score\n");
    for (q, hv) in queries.iter().zip(&hvs) {
        for (rank, (label, rep)) in memory.query_with(hv, a.k, metric)?.into_iter().enumerate() {
            writeln!(out, "{}\t{}\t{label}\t{}\t{}", q.id, rank + 1, fmt_score(rep.value), fmt_z(rep.z_score))
                .expect("write to String");
        }
    }
    write_output(a.output.as_deref(), out.as_bytes())
}

/// Peak resident set size in KiB, where the platform reports it.
pub fn peak_memory_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn bench(a: &BenchArgs) -> Result<()> {
    let (cfg, residues) = a.encoding.resolve()?;
    let enc = build_encoder(&cfg, &residues)?;
    let mut rng = seed::rng_for(cfg.seed, "bench", "sequences");
    let records: Vec<Record> = (0..a.count)
        .map(|i| Record {
            id: format!("s{i}"),
            description: String::new(),
            seq: synth::random_sequence(a.length, residues.alphabet.residues(), &mut rng),
            line: 0,
        })
        .collect();
    let start = Instant::now();
    let hvs = encode_records(&records, &enc, &residues, cfg.seed)?;
    let secs = start.elapsed().as_secs_f64().max(1e-9);
    drop(hvs);
    let bp = (a.count * a.length) as f64;
    let prov = Provenance::new(
        "bench",
        &[],
        &cfg,
        residues,
        json!({ "count": a.count, "length": a.length }),
    );
    let mut out = prov.tsv_line();
    out.push_str("metric\tvalue\n");
    let peak = peak_memory_kib().map_or("NA".to_string(), |k| k.to_string());
    for (k, v) in [
        ("threads", rayon::current_num_threads().to_string()),
        ("sequences", a.count.to_string()),
        ("residues", (a.count * a.length).to_string()),
        ("seconds", format!("{secs:.4}")),
        ("sequences_per_s", format!("{:.1}", a.count as f64 / secs)),
        ("mbp_per_s", format!("{:.3}", bp / secs / 1e6)),
        ("peak_rss_kib", peak),
    ] {
        writeln!(out, "{k}\t{v}").expect("write to String");
    }
    write_output(a.output.as_deref(), out.as_bytes())
}
