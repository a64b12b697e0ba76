//! Key-value records and sets.
//!
//! A record is the bundle of its bound pairs `u_i * v_i`; unbinding a key
//! yields the matching value plus crosstalk noise, which a cleanup ranking
//! over candidate values removes. A set is the bundle of its members and
//! behaves like a Bloom filter: members are detected with high probability,
//! while the false-positive rate grows with the set size.

use crate::error::{HdcError, Result};
use crate::hv::{Accumulator, Hypervector, TieRule};
use crate::similarity::{similarity, top_k, Metric, SimilarityReport, DEFAULT_Z_THRESHOLD};

pub fn encode_record(pairs: &[(Hypervector, Hypervector)], tie: TieRule) -> Result<Hypervector> {
    let (k0, _) = pairs.first().ok_or(HdcError::EmptyRecord)?;
    let mut acc = Accumulator::new(k0.dim(), k0.domain())?;
    for (key, value) in pairs {
        acc.add(&key.bind(value)?)?;
    }
    acc.bundle(tie)
}

/// Index pairs of keys that are more similar than chance (`|z| >= 4`).
/// Correlated keys leak each other's values on query.
pub fn correlated_keys(keys: &[&Hypervector]) -> Result<Vec<(usize, usize, SimilarityReport)>> {
    let mut out = Vec::new();
    for i in 0..keys.len() {
        for j in i + 1..keys.len() {
            let metric = Metric::default_for(keys[i].domain());
            let r = similarity(keys[i], keys[j], metric)?;
            if r.z_score.abs() >= DEFAULT_Z_THRESHOLD {
                out.push((i, j, r));
            }
        }
    }
    Ok(out)
}

/// Unbind `key` from `record` and clean the result up against `cleanup`.
pub fn query_record<S: AsRef<str>>(
    record: &Hypervector,
    key: &Hypervector,
    cleanup: &[(S, Hypervector)],
) -> Result<(String, SimilarityReport)> {
    let noisy = key.unbind(record)?;
    let metric = Metric::default_for(record.domain());
    let mut ranked = top_k(&noisy, cleanup, 1, metric)?;
    Ok(ranked.remove(0))
}

pub fn encode_set(items: &[&Hypervector], tie: TieRule) -> Result<Hypervector> {
    let first = items.first().ok_or(HdcError::EmptySet)?;
    let mut acc = Accumulator::new(first.dim(), first.domain())?;
    for hv in items {
        acc.add(hv)?;
    }
    acc.bundle(tie)
}

pub fn set_similarity(set: &Hypervector, item: &Hypervector) -> Result<SimilarityReport> {
    similarity(set, item, Metric::default_for(set.domain()))
}

/// Membership test: the item is reported present when its similarity to the
/// set exceeds the random baseline by more than `threshold_z` sd.
pub fn set_contains(set: &Hypervector, item: &Hypervector, threshold_z: f64) -> Result<bool> {
    Ok(set_similarity(set, item)?.is_significant(threshold_z))
}
