//! Synthetic sequence data with known labels, for benchmarks and tests.

use rand::Rng;

use crate::seed;

pub const DNA: &[u8] = b"ACGT";

/// Uniform random sequence over `alphabet`.
pub fn random_sequence<R: Rng + ?Sized>(len: usize, alphabet: &[u8], rng: &mut R) -> Vec<u8> {
    (0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect()
}

/// Substitute each position independently with probability `rate`; a
/// substituted residue is always different from the original.
pub fn mutate<R: Rng + ?Sized>(seq: &[u8], rate: f64, alphabet: &[u8], rng: &mut R) -> Vec<u8> {
    seq.iter()
        .map(|&b| {
            if alphabet.len() > 1 && rng.random_bool(rate) {
                loop {
                    let c = alphabet[rng.random_range(0..alphabet.len())];
                    if c != b {
                        break c;
                    }
                }
            } else {
                b
            }
        })
        .collect()
}

/// Exactly `count` point substitutions at distinct positions.
pub fn mutate_exact<R: Rng + ?Sized>(seq: &[u8], count: usize, alphabet: &[u8], rng: &mut R) -> Vec<u8> {
    let mut out = seq.to_vec();
    let positions = rand::seq::index::sample(rng, seq.len(), count.min(seq.len()));
    for p in positions {
        loop {
            let c = alphabet[rng.random_range(0..alphabet.len())];
            if c != out[p] {
                out[p] = c;
                break;
            }
        }
    }
    out
}

/// `count` reads of length `read_len` taken at uniform offsets of
/// `reference`, each with point mutations at `rate`.
pub fn sample_reads<R: Rng + ?Sized>(
    reference: &[u8],
    count: usize,
    read_len: usize,
    rate: f64,
    alphabet: &[u8],
    rng: &mut R,
) -> Vec<Vec<u8>> {
    assert!(read_len <= reference.len(), "read longer than reference");
    (0..count)
        .map(|_| {
            let start = rng.random_range(0..=reference.len() - read_len);
            mutate(&reference[start..start + read_len], rate, alphabet, rng)
        })
        .collect()
}

/// Labeled reads from a set of references.
#[derive(Clone, Debug)]
pub struct ReadSet {
    pub references: Vec<(String, Vec<u8>)>,
    /// `(id, label, sequence)` in generation order.
    pub reads: Vec<(String, String, Vec<u8>)>,
}

/// Parameters of a two-class read benchmark.
#[derive(Clone, Copy, Debug)]
pub struct TwoClassSpec {
    pub reference_len: usize,
    /// Fraction of each reference copied from a common shared segment.
    pub shared_fraction: f64,
    pub reads_per_class: usize,
    pub read_len: usize,
    pub mutation_rate: f64,
}

impl Default for TwoClassSpec {
    fn default() -> Self {
        TwoClassSpec {
            reference_len: 10_000,
            shared_fraction: 0.0,
            reads_per_class: 500,
            read_len: 150,
            mutation_rate: 0.05,
        }
    }
}

/// Two DNA references `A` and `B` and reads drawn from each. With a nonzero
/// `shared_fraction` both references start with the same random segment, so
/// reads from that region carry no class signal.
pub fn two_class_reads(spec: &TwoClassSpec, seed: u64) -> ReadSet {
    let mut rng = seed::rng(seed::derive(seed, "synth", "references"));
    let shared_len = (spec.reference_len as f64 * spec.shared_fraction).round() as usize;
    let shared = random_sequence(shared_len, DNA, &mut rng);
    let references: Vec<(String, Vec<u8>)> = ["A", "B"]
        .iter()
        .map(|label| {
            let mut r = shared.clone();
            r.extend(random_sequence(spec.reference_len - shared_len, DNA, &mut rng));
            (label.to_string(), r)
        })
        .collect();
    let mut reads = Vec::with_capacity(2 * spec.reads_per_class);
    for (label, reference) in &references {
        let mut rng = seed::rng(seed::derive(seed, "synth-reads", label));
        for (i, r) in sample_reads(reference, spec.reads_per_class, spec.read_len, spec.mutation_rate, DNA, &mut rng)
            .into_iter()
            .enumerate()
        {
            reads.push((format!("{label}_{i}"), label.clone(), r));
        }
    }
    ReadSet { references, reads }
}
