//! Hamming, Jaccard and cosine similarity with random-pair baselines.
//!
//! Every comparison is reported together with the mean and standard deviation
//! the metric would have for two independent fair-coin hypervectors of the same
//! dimension, and the resulting z-score. "Related" is operationalized as
//! `z > 4` by default ([`DEFAULT_Z_THRESHOLD`]); this is a convention, not a
//! derived constant.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HdcError, Result};
use crate::hv::{Domain, Elements, Hypervector};
use crate::popcount;

pub const DEFAULT_Z_THRESHOLD: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Hamming,
    Jaccard,
    Cosine,
}

impl Metric {
    /// Natural metric for a domain: Hamming for bit vectors, cosine otherwise.
    pub fn default_for(domain: Domain) -> Metric {
        match domain {
            Domain::Binary => Metric::Hamming,
            _ => Metric::Cosine,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Hamming => "hamming",
            Metric::Jaccard => "jaccard",
            Metric::Cosine => "cosine",
        }
    }

    /// `(mean, sd)` of the metric between two independent random vectors.
    ///
    /// Hamming: each position agrees with probability 1/2, so the mean is 0.5
    /// with sd `sqrt(0.25 / dim)`. Cosine over bipolar vectors: mean 0, sd
    /// `1 / sqrt(dim)`. Jaccard: mean `0.25 / 0.75 = 1/3`; the sd comes from
    /// the delta method on `I / U` with per-position intersection and union
    /// indicators (means 1/4 and 3/4, variances 3/16, covariance 1/16), which
    /// gives `Var ~ 8 / (27 dim)`.
    pub fn baseline(self, dim: usize) -> (f64, f64) {
        let n = dim as f64;
        match self {
            Metric::Hamming => (0.5, (0.25 / n).sqrt()),
            Metric::Jaccard => (1.0 / 3.0, (8.0 / (27.0 * n)).sqrt()),
            Metric::Cosine => (0.0, n.sqrt().recip()),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = HdcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hamming" => Ok(Metric::Hamming),
            "jaccard" | "tanimoto" => Ok(Metric::Jaccard),
            "cosine" => Ok(Metric::Cosine),
            other => Err(HdcError::InvalidConfig(format!("unknown metric `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub value: f64,
    pub metric: Metric,
    pub baseline_mean: f64,
    pub baseline_sd: f64,
    pub z_score: f64,
}

impl SimilarityReport {
    pub fn new(value: f64, metric: Metric, dim: usize) -> Self {
        let (baseline_mean, baseline_sd) = metric.baseline(dim);
        SimilarityReport {
            value,
            metric,
            baseline_mean,
            baseline_sd,
            z_score: (value - baseline_mean) / baseline_sd,
        }
    }

    /// More similar than chance at the given z threshold.
    pub fn is_significant(&self, threshold_z: f64) -> bool {
        self.z_score > threshold_z
    }
}

fn check_dims(u: &Hypervector, v: &Hypervector) -> Result<()> {
    if u.dim() != v.dim() {
        return Err(HdcError::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    Ok(())
}

fn binary_words<'a>(
    u: &'a Hypervector,
    v: &'a Hypervector,
    metric: Metric,
) -> Result<(&'a [u64], &'a [u64])> {
    check_dims(u, v)?;
    match (u.elements(), v.elements()) {
        (Elements::Binary(a), Elements::Binary(b)) => Ok((a, b)),
        (Elements::Binary(_), _) => Err(HdcError::WrongDomainForMetric {
            metric,
            domain: v.domain(),
        }),
        _ => Err(HdcError::WrongDomainForMetric {
            metric,
            domain: u.domain(),
        }),
    }
}

/// Fraction of positions where the two bit vectors agree.
pub fn hamming(u: &Hypervector, v: &Hypervector) -> Result<f64> {
    let (a, b) = binary_words(u, v, Metric::Hamming)?;
    let differ = popcount::xor_count(a, b);
    Ok(1.0 - differ as f64 / u.dim() as f64)
}

/// `u.v / (u.u + v.v - u.v)` over 0/1 vectors.
pub fn jaccard(u: &Hypervector, v: &Hypervector) -> Result<f64> {
    let (a, b) = binary_words(u, v, Metric::Jaccard)?;
    let (uv, uu, vv) = (popcount::and_count(a, b), popcount::ones(a), popcount::ones(b));
    let denom = uu + vv - uv;
    if denom == 0 {
        return Err(HdcError::BothAllZero);
    }
    Ok(uv as f64 / denom as f64)
}

pub fn cosine(u: &Hypervector, v: &Hypervector) -> Result<f64> {
    check_dims(u, v)?;
    let (dot, nu, nv) = match (u.elements(), v.elements()) {
        (Elements::Bipolar(a), Elements::Bipolar(b)) => {
            let (mut d, mut x, mut y) = (0i64, 0i64, 0i64);
            for (&p, &q) in a.iter().zip(b) {
                d += (p * q) as i64;
                x += (p * p) as i64;
                y += (q * q) as i64;
            }
            (d as f64, x as f64, y as f64)
        }
        (Elements::Real(a), Elements::Real(b)) => cosine_parts(a, b),
        (Elements::Binary(_), _) => {
            return Err(HdcError::WrongDomainForMetric {
                metric: Metric::Cosine,
                domain: Domain::Binary,
            })
        }
        _ => {
            return Err(HdcError::DomainMismatch {
                expected: u.domain(),
                found: v.domain(),
            })
        }
    };
    if nu == 0.0 || nv == 0.0 {
        return Err(HdcError::ZeroNorm);
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

/// `(a.b, a.a, b.b)` for real slices.
pub(crate) fn cosine_parts(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let (mut d, mut x, mut y) = (0.0, 0.0, 0.0);
    for (&p, &q) in a.iter().zip(b) {
        d += p * q;
        x += p * p;
        y += q * q;
    }
    (d, x, y)
}

/// Cosine between two raw real slices of equal length.
pub fn cosine_slices(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(HdcError::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let (d, x, y) = cosine_parts(a, b);
    if x == 0.0 || y == 0.0 {
        return Err(HdcError::ZeroNorm);
    }
    Ok((d / (x.sqrt() * y.sqrt())).clamp(-1.0, 1.0))
}

pub fn similarity(u: &Hypervector, v: &Hypervector, metric: Metric) -> Result<SimilarityReport> {
    let value = match metric {
        Metric::Hamming => hamming(u, v)?,
        Metric::Jaccard => jaccard(u, v)?,
        Metric::Cosine => cosine(u, v)?,
    };
    Ok(SimilarityReport::new(value, metric, u.dim()))
}

/// Descending by value, then ascending by label.
pub(crate) fn rank_order(a: &(String, SimilarityReport), b: &(String, SimilarityReport)) -> Ordering {
    b.1.value.total_cmp(&a.1.value).then_with(|| a.0.cmp(&b.0))
}

/// The `k` candidates most similar to `query`, best first. Equal values are
/// ordered lexicographically by label.
pub fn top_k<S: AsRef<str>>(
    query: &Hypervector,
    candidates: &[(S, Hypervector)],
    k: usize,
    metric: Metric,
) -> Result<Vec<(String, SimilarityReport)>> {
    if k == 0 {
        return Err(HdcError::ZeroK);
    }
    if candidates.is_empty() {
        return Err(HdcError::EmptyCandidates);
    }
    let mut scored = candidates
        .iter()
        .map(|(label, hv)| Ok((label.as_ref().to_owned(), similarity(query, hv, metric)?)))
        .collect::<Result<Vec<_>>>()?;
    select_top(&mut scored, k);
    Ok(scored)
}

/// Parallel [`top_k`]; candidates are scored across the rayon pool and the
/// merged ranking is identical to the sequential one.
pub fn top_k_par<S: AsRef<str> + Sync>(
    query: &Hypervector,
    candidates: &[(S, Hypervector)],
    k: usize,
    metric: Metric,
) -> Result<Vec<(String, SimilarityReport)>> {
    if k == 0 {
        return Err(HdcError::ZeroK);
    }
    if candidates.is_empty() {
        return Err(HdcError::EmptyCandidates);
    }
    let mut scored = candidates
        .par_iter()
        .map(|(label, hv)| Ok((label.as_ref().to_owned(), similarity(query, hv, metric)?)))
        .collect::<Result<Vec<_>>>()?;
    select_top(&mut scored, k);
    Ok(scored)
}

pub(crate) fn select_top(scored: &mut Vec<(String, SimilarityReport)>, k: usize) {
    if k < scored.len() {
        scored.select_nth_unstable_by(k - 1, rank_order);
        scored.truncate(k);
    }
    scored.sort_by(rank_order);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hv::Domain;
    use crate::seed;

    fn bits(v: &[u8]) -> Hypervector {
        Hypervector::from_bits(v.iter().map(|&b| b == 1)).unwrap()
    }

    #[test]
    fn identical_vectors_score_one() {
        let mut rng = seed::rng(11);
        let b = Hypervector::random(1000, Domain::Binary, &mut rng).unwrap();
        let p = Hypervector::random(1000, Domain::Bipolar, &mut rng).unwrap();
        let r = Hypervector::random(1000, Domain::Real, &mut rng).unwrap();
        assert_eq!(hamming(&b, &b).unwrap(), 1.0);
        assert_eq!(jaccard(&b, &b).unwrap(), 1.0);
        assert_eq!(cosine(&p, &p).unwrap(), 1.0);
        assert!((cosine(&r, &r).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_hamming_example() {
        assert_eq!(hamming(&bits(&[0, 1, 1, 0]), &bits(&[0, 1, 0, 1])).unwrap(), 0.5);
    }

    #[test]
    fn error_paths() {
        let a = bits(&[0, 0, 0]);
        let b = bits(&[0, 0, 0, 0]);
        assert!(matches!(hamming(&a, &b), Err(HdcError::DimensionMismatch { .. })));
        assert!(matches!(jaccard(&a, &a), Err(HdcError::BothAllZero)));
        assert!(matches!(cosine(&a, &a), Err(HdcError::WrongDomainForMetric { .. })));
        let z = Hypervector::from_bipolar(vec![0, 0, 0]).unwrap();
        let o = Hypervector::from_bipolar(vec![1, 1, 1]).unwrap();
        assert!(matches!(cosine(&z, &o), Err(HdcError::ZeroNorm)));
        assert!(matches!(
            hamming(&o, &o),
            Err(HdcError::WrongDomainForMetric { metric: Metric::Hamming, .. })
        ));
    }

    #[test]
    fn report_fields() {
        let r = SimilarityReport::new(0.55, Metric::Hamming, 10_000);
        assert_eq!(r.baseline_mean, 0.5);
        assert!((r.baseline_sd - 0.005).abs() < 1e-15);
        assert!((r.z_score - 10.0).abs() < 1e-9);
        assert!(r.is_significant(DEFAULT_Z_THRESHOLD));
    }

    #[test]
    fn top_k_ties_break_by_label() {
        let v = bits(&[1, 0, 1, 1]);
        let cands = vec![
            ("zeta".to_string(), v.clone()),
            ("alpha".to_string(), v.clone()),
            ("mid".to_string(), bits(&[0, 1, 0, 0])),
        ];
        let ranked = top_k(&v, &cands, 3, Metric::Hamming).unwrap();
        let labels: Vec<_> = ranked.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels, ["alpha", "zeta", "mid"]);
        assert_eq!(ranked[0].1.value, 1.0);
        assert!(matches!(
            top_k::<String>(&v, &[], 1, Metric::Hamming),
            Err(HdcError::EmptyCandidates)
        ));
        assert!(matches!(top_k(&v, &cands, 0, Metric::Hamming), Err(HdcError::ZeroK)));
        assert_eq!(top_k(&v, &cands, 10, Metric::Hamming).unwrap().len(), 3);
    }

    #[test]
    fn jaccard_baseline_sd_matches_monte_carlo() {
        let dim = 2_000;
        let mut rng = seed::rng(12);
        let vals: Vec<f64> = (0..2000)
            .map(|_| {
                let a = Hypervector::random(dim, Domain::Binary, &mut rng).unwrap();
                let b = Hypervector::random(dim, Domain::Binary, &mut rng).unwrap();
                jaccard(&a, &b).unwrap()
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let sd = (vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64).sqrt();
        let (m, s) = Metric::Jaccard.baseline(dim);
        assert!((mean - m).abs() < 0.002, "mean {mean}");
        assert!((sd / s - 1.0).abs() < 0.1, "sd {sd} vs delta-method {s}");
    }
}
