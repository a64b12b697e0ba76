//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Optional arguments select criteria by
//! number, e.g. `cargo test --test acceptance -- 4 9`.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use hdc_core::encoders::{
    encode_record, query_record, PostProcess, ProjectionConfig, ProjectionDistribution, RandomProjection,
};
use hdc_core::learn::TrainConfig;
use hdc_core::similarity::{cosine, cosine_slices, hamming, jaccard};
use hdc_core::synth::{self, two_class_reads, ReadSet, TwoClassSpec};
use hdc_core::*;
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

const DIM: usize = 10_000;
const DOMAINS: [Domain; 3] = [Domain::Binary, Domain::Bipolar, Domain::Real];

fn algebraic_laws() -> Outcome {
    let start = Instant::now();
    let cases = 10_000;
    let mut rng = seed::rng(101);
    let mut failures = [0usize; 4];
    for case in 0..cases {
        let dim = rng.random_range(1..=2048);
        let domain = DOMAINS[case % 3];
        let a = Hypervector::random(dim, domain, &mut rng).unwrap();
        let b = Hypervector::random(dim, domain, &mut rng).unwrap();
        let k = rng.random_range(-3 * dim as i64..=3 * dim as i64);

        // Unbinding is exact for the self-inverse domains.
        let unbind_ok = match domain {
            Domain::Real => {
                let key = Hypervector::from_real(b.to_signed().iter().map(|x| x.signum()).collect()).unwrap();
                key.unbind(&a.bind(&key).unwrap()).unwrap() == a
            }
            _ => b.unbind(&a.bind(&b).unwrap()).unwrap() == a,
        };
        failures[0] += !unbind_ok as usize;
        failures[1] += (a.permute(k).permute(-k) != a) as usize;
        failures[2] += (a.bind(&b).unwrap().permute(k) != a.permute(k).bind(&b.permute(k)).unwrap()) as usize;

        let m = rng.random_range(1..=9);
        let mut items: Vec<Hypervector> = (0..m).map(|_| Hypervector::random(dim, domain, &mut rng).unwrap()).collect();
        let tie = TieRule::SeededRandom(case as u64);
        let before = bundle(&items.iter().collect::<Vec<_>>(), tie).ok();
        items.shuffle(&mut rng);
        let after = bundle(&items.iter().collect::<Vec<_>>(), tie).ok();
        failures[3] += (before != after) as usize;
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures.iter().all(|&f| f == 0) && secs < 60.0,
        format!(
            "{cases} cases per law; failures unbind∘bind={} permute-inverse={} distributivity={} bundle-order={}; {secs:.1}s (limit 60s)",
            failures[0], failures[1], failures[2], failures[3]
        ),
    )
}

fn baseline_statistics() -> Outcome {
    let mut rng = seed::rng(102);
    let (mut ham, mut jac, mut cos_bip, mut cos_real) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let pair = |d: Domain, rng: &mut _| (Hypervector::random(DIM, d, rng).unwrap(), Hypervector::random(DIM, d, rng).unwrap());
        let (u, v) = pair(Domain::Binary, &mut rng);
        ham = ham.max((hamming(&u, &v).unwrap() - 0.5).abs());
        jac = jac.max((jaccard(&u, &v).unwrap() - 1.0 / 3.0).abs());
        let (u, v) = pair(Domain::Bipolar, &mut rng);
        cos_bip = cos_bip.max(cosine(&u, &v).unwrap().abs());
        let (u, v) = pair(Domain::Real, &mut rng);
        cos_real = cos_real.max(cosine(&u, &v).unwrap().abs());
    }
    outcome(
        ham <= 0.025 && jac <= 0.02 && cos_bip <= 0.05 && cos_real <= 0.05,
        format!(
            "1000 pairs at dim {DIM}; max deviation hamming {ham:.4} (≤0.025), jaccard {jac:.4} (≤0.02), cosine bipolar {cos_bip:.4} / real {cos_real:.4} (≤0.05)"
        ),
    )
}

fn bundle_membership() -> Outcome {
    let mut rng = seed::rng(103);
    let mut worst = 0.0f64;
    let mut mean = 0.0;
    for t in 0..100u64 {
        let items: Vec<Hypervector> = (0..3).map(|_| Hypervector::random(DIM, Domain::Binary, &mut rng).unwrap()).collect();
        let b = bundle(&items.iter().collect::<Vec<_>>(), TieRule::SeededRandom(t)).unwrap();
        for m in &items {
            let s = hamming(&b, m).unwrap();
            worst = worst.max((s - 0.75).abs());
            mean += s / 300.0;
        }
    }
    outcome(
        worst <= 0.02,
        format!("100 trials; mean hamming(bundle, member) {mean:.4}, max |τ − 0.75| = {worst:.4} (≤0.02)"),
    )
}

fn record_capacity() -> Outcome {
    let mut rng = seed::rng(104);
    let codebook: Vec<(String, Hypervector)> = (b'a'..=b'z')
        .map(|c| ((c as char).to_string(), Hypervector::random(DIM, Domain::Binary, &mut rng).unwrap()))
        .collect();
    let (mut hits, mut total) = (0usize, 0usize);
    for t in 0..1000u64 {
        let pairs: Vec<(Hypervector, usize)> = (0..20)
            .map(|_| (Hypervector::random(DIM, Domain::Binary, &mut rng).unwrap(), rng.random_range(0..26)))
            .collect();
        let bound: Vec<(Hypervector, Hypervector)> = pairs.iter().map(|(k, v)| (k.clone(), codebook[*v].1.clone())).collect();
        let record = encode_record(&bound, TieRule::SeededRandom(t)).unwrap();
        for (key, v) in &pairs {
            hits += (query_record(&record, key, &codebook).unwrap().0 == codebook[*v].0) as usize;
            total += 1;
        }
    }
    let acc = hits as f64 / total as f64;
    outcome(
        acc >= 0.99,
        format!("1000 records × 20 pairs, 26-value codebook: query accuracy {acc:.4} ({hits}/{total}, need ≥0.99)"),
    )
}

fn noise_robustness() -> Outcome {
    let mut rng = seed::rng(105);
    // One target plus 1000 distractors.
    let mut mem = AssocMemory::new(DIM, Domain::Binary);
    for i in 0..1001 {
        mem.store(&format!("e{i:04}"), Hypervector::random(DIM, Domain::Binary, &mut rng).unwrap()).unwrap();
    }
    let mem = mem.with_index(true);
    let grid = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
    let rates: Vec<f64> = grid
        .iter()
        .map(|&p| {
            let flips = (p * DIM as f64).round() as usize;
            let mut hits = 0;
            for _ in 0..1000 {
                let (label, hv) = &mem.entries()[rng.random_range(0..mem.len())];
                let noisy = hv.flipped(&sample(&mut rng, DIM, flips).into_vec());
                hits += (mem.cleanup(&noisy).unwrap().0 == *label) as usize;
            }
            hits as f64 / 1000.0
        })
        .collect();
    let monotone = rates.windows(2).all(|w| w[0] >= w[1]);
    outcome(
        rates[2] >= 0.99 && monotone,
        format!(
            "1000 trials per rate; accuracy at p=0,0.1,…,0.5: {:?}; at 20% {:.3} (≥0.99); non-increasing: {monotone}",
            rates, rates[2]
        ),
    )
}

fn projection_check() -> Outcome {
    let mut rng = seed::rng(106);
    let proj = RandomProjection::new(ProjectionConfig {
        in_dim: 64,
        dim: DIM,
        distribution: ProjectionDistribution::Gaussian,
        seed: 106,
        post: PostProcess::None,
    })
    .unwrap();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
        let exact = cosine_slices(&x, &y).unwrap();
        let got = cosine(&proj.project(&x).unwrap(), &proj.project(&y).unwrap()).unwrap();
        worst = worst.max((got - exact).abs());
    }
    outcome(worst < 0.05, format!("100 pairs, 64 → {DIM}: max |τ_cos(Sx,Sy) − cos(x,y)| = {worst:.4} (<0.05)"))
}

/// Element `i` of a hypervector as `±1` in multiplicative form: binary bit
/// `b` becomes `(-1)^b`, turning XOR into a product.
fn signs(hv: &Hypervector) -> Vec<i64> {
    (0..hv.dim())
        .map(|i| match hv.domain() {
            Domain::Binary => 1 - 2 * hv.value(i) as i64,
            _ => hv.value(i) as i64,
        })
        .collect()
}

/// Direct evaluation of positional bundling, positional binding and n-gram
/// encoding from the raw symbol vectors.
fn formula(mode: SequenceMode, n: usize, seq: &[usize], syms: &[Vec<i64>], domain: Domain, tie_seed: u64) -> Vec<i64> {
    let d = syms[0].len();
    // rho^k(v)[i] = v[(i - k) mod d]
    let rho = |s: usize, k: usize, i: usize| syms[s][(i + d - k % d) % d];
    let sums: Vec<i64> = match mode {
        SequenceMode::Bound => return (0..d).map(|i| seq.iter().enumerate().map(|(p, &s)| rho(s, p, i)).product()).collect(),
        SequenceMode::Bundled => (0..d).map(|i| seq.iter().enumerate().map(|(p, &s)| rho(s, p, i)).sum()).collect(),
        SequenceMode::NGram => (0..d)
            .map(|i| (0..=seq.len() - n).map(|j| (0..n).map(|k| rho(seq[j + k], k, i)).product::<i64>()).sum())
            .collect(),
    };
    // Majority vote; ties follow the seeded coin (heads selects bit 1 for
    // binary, i.e. -1 in multiplicative form, and +1 for bipolar).
    let heads = if domain == Domain::Binary { -1 } else { 1 };
    sums.iter()
        .enumerate()
        .map(|(i, &s)| match s.signum() {
            0 if seed::coin(tie_seed, i as u64) => heads,
            0 => -heads,
            x => x,
        })
        .collect()
}

fn compositional_oracle() -> Outcome {
    let mut rng = seed::rng(107);
    let (mut checked, mut mismatches) = (0usize, Vec::new());
    for trial in 0..500u64 {
        let dim = rng.random_range(64..=1024);
        let len = rng.random_range(1..=50);
        let seq: Vec<usize> = (0..len).map(|_| rng.random_range(0..4)).collect();
        let text: Vec<u8> = seq.iter().map(|&s| b"ACGT"[s]).collect();
        for domain in [Domain::Binary, Domain::Bipolar] {
            for (mode, n) in [
                (SequenceMode::Bundled, 1),
                (SequenceMode::Bound, 1),
                (SequenceMode::NGram, rng.random_range(1..=len.min(6))),
            ] {
                let cfg = EncoderConfig::new(dim, domain, mode, n, EncoderConfig::alphabet_from_chars("ACGT"), trial);
                let (enc, mem) = SequenceEncoder::from_config(&cfg).unwrap();
                let syms: Vec<Vec<i64>> = ["A", "C", "G", "T"].iter().map(|s| signs(mem.get(s).unwrap())).collect();
                checked += 1;
                if signs(&enc.encode_bytes(&text).unwrap()) != formula(mode, n, &seq, &syms, domain, trial) {
                    mismatches.push(format!("{domain:?}/{mode:?}/n={n}/len={len}"));
                }
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        format!(
            "500 sequences (length 1–50) × {{binary, bipolar}} × {{bundled, bound, n-gram}}: {checked} encodings, {} differ from the formula{}",
            mismatches.len(),
            mismatches.first().map_or(String::new(), |m| format!(" (first: {m})"))
        ),
    )
}

fn encode_reads(enc: &SequenceEncoder, reads: &[(String, String, Vec<u8>)]) -> Vec<(Hypervector, String)> {
    reads.iter().map(|(_, l, r)| (enc.encode_bytes(r).unwrap(), l.clone())).collect()
}

/// Fresh reads from the benchmark references, never seen in training.
fn held_out(set: &ReadSet, per_class: usize, s: u64) -> Vec<(String, String, Vec<u8>)> {
    let mut rng = seed::rng_for(s, "held-out", "reads");
    let mut out = Vec::new();
    for (label, reference) in &set.references {
        for (i, r) in synth::sample_reads(reference, per_class, 150, 0.05, synth::DNA, &mut rng).into_iter().enumerate() {
            out.push((format!("test_{label}_{i}"), label.clone(), r));
        }
    }
    out
}

const CLASSIFY_DOMAIN: Domain = Domain::Binary;

fn retrained(model: &Model, train: &[(Hypervector, String)], s: u64) -> Model {
    let tc = TrainConfig {
        epochs: 10,
        alpha: 1.0,
        shuffle_seed: s,
        ..Default::default()
    };
    model.retrain(train, &tc).unwrap().0
}

fn classification() -> Outcome {
    let start = Instant::now();
    let alphabet = EncoderConfig::alphabet_from_chars("ACGT");

    // Separated references: held-out accuracy of the retrained model.
    let s = 42;
    let set = two_class_reads(&TwoClassSpec::default(), s);
    let cfg = EncoderConfig::new(DIM, CLASSIFY_DOMAIN, SequenceMode::NGram, 5, alphabet.clone(), s);
    let (enc, mem) = SequenceEncoder::from_config(&cfg).unwrap();
    let train = encode_reads(&enc, &set.reads);
    let test = encode_reads(&enc, &held_out(&set, 500, s));
    let oneshot = Model::train_oneshot(&train, cfg, mem).unwrap();
    let held_oneshot = oneshot.accuracy(&test).unwrap();
    let held = retrained(&oneshot, &train, s).accuracy(&test).unwrap();

    // Overlapping references: retraining vs one-shot over 10 seeds.
    let spec = TwoClassSpec {
        shared_fraction: 0.5,
        ..Default::default()
    };
    let (mut wins, mut held_wins) = (0, 0);
    for s in 0..10u64 {
        let set = two_class_reads(&spec, s);
        let cfg = EncoderConfig::new(DIM, CLASSIFY_DOMAIN, SequenceMode::NGram, 5, alphabet.clone(), s);
        let (enc, mem) = SequenceEncoder::from_config(&cfg).unwrap();
        let train = encode_reads(&enc, &set.reads);
        let test = encode_reads(&enc, &held_out(&set, 500, s));
        let base = Model::train_oneshot(&train, cfg, mem).unwrap();
        let better = retrained(&base, &train, s);
        wins += (better.accuracy(&train).unwrap() > base.accuracy(&train).unwrap()) as usize;
        held_wins += (better.accuracy(&test).unwrap() > base.accuracy(&test).unwrap()) as usize;
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        held >= 0.95 && wins >= 9 && secs < 120.0,
        format!(
            "held-out accuracy {held:.4} after retraining (one-shot {held_oneshot:.4}; need ≥0.95); \
             overlap benchmark: retrained > one-shot training accuracy in {wins}/10 seeds (need ≥9; held-out: {held_wins}/10); {secs:.1}s (limit 120s)"
        ),
    )
}

fn hdc(dir: &Path, args: &[&str]) -> std::result::Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_hdc")).current_dir(dir).args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr).trim()))
    }
}

fn write_reads(dir: &Path, name: &str, reads: &[(String, String, Vec<u8>)]) {
    let fasta: String = reads.iter().map(|(id, _, s)| format!(">{id}\n{}\n", String::from_utf8_lossy(s))).collect();
    fs::write(dir.join(format!("{name}.fa")), fasta).unwrap();
    let tsv: String = reads.iter().map(|(id, l, _)| format!("{id}\t{l}\n")).collect();
    fs::write(dir.join(format!("{name}.tsv")), tsv).unwrap();
}

/// Runs encode, train, predict and search; returns every output file.
fn pipeline(dir: &Path, threads: &str, domain: &str) -> std::result::Result<Vec<Vec<u8>>, String> {
    let t = ["--threads", threads, "--domain", domain];
    let run = |args: &[&str]| hdc(dir, &[args, &t[..]].concat());
    run(&["encode", "train.fa", "-o", "db.hdcv"])?;
    run(&["train", "train.fa", "--labels", "train.tsv", "--epochs", "3", "-o", "model.hdcm"])?;
    run(&["predict", "--model", "model.hdcm", "test.fa", "-o", "pred.tsv"])?;
    run(&["search", "db.hdcv", "test.fa", "-k", "5", "-o", "hits.tsv"])?;
    ["db.hdcv", "model.hdcm", "pred.tsv", "hits.tsv"]
        .iter()
        .map(|f| fs::read(dir.join(f)).map_err(|e| e.to_string()))
        .collect()
}

fn determinism() -> Outcome {
    let tmp = tempfile::TempDir::new().unwrap();
    let d = tmp.path();
    let set = two_class_reads(
        &TwoClassSpec {
            reads_per_class: 100,
            ..Default::default()
        },
        109,
    );
    write_reads(d, "train", &set.reads);
    write_reads(d, "test", &held_out(&set, 25, 109));
    let mut summary = Vec::new();
    let mut pass = true;
    for domain in ["binary", "real"] {
        let runs: std::result::Result<Vec<_>, String> = ["1", "8", "1", "8"].iter().map(|t| pipeline(d, t, domain)).collect();
        match runs {
            Ok(runs) => {
                let same = runs.windows(2).all(|w| w[0] == w[1]);
                pass &= same;
                let bytes: usize = runs[0].iter().map(Vec::len).sum();
                summary.push(format!("{domain}: {} ({bytes} bytes per run)", if same { "identical" } else { "DIFFERENT" }));
            }
            Err(e) => {
                pass = false;
                summary.push(format!("{domain}: pipeline failed: {e}"));
            }
        }
    }
    outcome(
        pass,
        format!("encode/train/predict/search twice each at --threads 1 and 8: {}", summary.join("; ")),
    )
}

fn jaccard_set_oracle() -> Outcome {
    let set_ratio = |u: &Hypervector, v: &Hypervector| -> Option<f64> {
        let ones = |h: &Hypervector| (0..h.dim()).filter(|&i| h.value(i) == 1.0).collect::<BTreeSet<_>>();
        let (a, b) = (ones(u), ones(v));
        let union = a.union(&b).count();
        (union > 0).then(|| a.intersection(&b).count() as f64 / union as f64)
    };
    let check = |u: &Hypervector, v: &Hypervector| match (jaccard(u, v), set_ratio(u, v)) {
        (Ok(x), Some(y)) => x == y,
        (Err(HdcError::BothAllZero), None) => true,
        _ => false,
    };
    let (mut pairs, mut bad) = (0usize, 0usize);
    // Every pair of vectors at dims 1..=6.
    for dim in 1..=6usize {
        let all: Vec<Hypervector> = (0..1u64 << dim)
            .map(|m| Hypervector::from_bits((0..dim).map(|i| m >> i & 1 == 1)).unwrap())
            .collect();
        for u in &all {
            for v in &all {
                pairs += 1;
                bad += !check(u, v) as usize;
            }
        }
    }
    let exhaustive = pairs;
    // Random pairs at dims 1..=200 with varied densities.
    let mut rng = seed::rng(110);
    for _ in 0..10_000 {
        let dim = rng.random_range(1..=200);
        let (p, q) = (rng.random::<f64>(), rng.random::<f64>());
        let u = Hypervector::from_bits((0..dim).map(|_| rng.random_bool(p))).unwrap();
        let v = Hypervector::from_bits((0..dim).map(|_| rng.random_bool(q))).unwrap();
        pairs += 1;
        bad += !check(&u, &v) as usize;
    }
    outcome(
        bad == 0,
        format!("{pairs} pairs ({exhaustive} exhaustive at dims 1–6, 10000 random at dims 1–200): {bad} differ from |∩|/|∪|"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("algebraic laws", algebraic_laws),
        ("baseline statistics", baseline_statistics),
        ("bundle-of-3 membership", bundle_membership),
        ("record capacity", record_capacity),
        ("noise robustness", noise_robustness),
        ("random projection", projection_check),
        ("compositional oracle", compositional_oracle),
        ("classification", classification),
        ("CLI determinism", determinism),
        ("Jaccard set oracle", jaccard_set_oracle),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let number = i + 1;
        if !selected.is_empty() && !selected.contains(&number) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        println!(
            "{} {number:>2}. {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed.push(number);
        }
    }
    if !failed.is_empty() {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
    println!("acceptance: all selected criteria passed");
}
