//! Cleanup (associative) memory: a labeled store of hypervectors queried by
//! exhaustive nearest-neighbor scan.
//!
//! The optional index caches per-entry popcounts and norms. It only removes
//! repeated work; every query returns exactly what the plain scan returns.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{HdcError, Result};
use crate::popcount;
use crate::hv::{Domain, Elements, Hypervector};
use crate::similarity::{similarity, Metric, SimilarityReport};

/// Entries scored per parallel task.
const QUERY_CHUNK: usize = 2048;

#[derive(Clone, Debug, PartialEq)]
struct IndexMeta {
    /// Popcount (binary) or squared norm (bipolar/real) of each entry.
    weight: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct AssocMemory {
    dim: usize,
    domain: Domain,
    entries: Vec<(String, Hypervector)>,
    labels: HashMap<String, usize>,
    index: Option<IndexMeta>,
}

fn weight(hv: &Hypervector) -> f64 {
    match hv.elements() {
        Elements::Binary(w) => popcount::ones(w) as f64,
        Elements::Bipolar(v) => v.iter().map(|&x| (x as i64 * x as i64) as f64).sum(),
        Elements::Real(v) => v.iter().map(|x| x * x).sum(),
    }
}

impl AssocMemory {
    pub fn new(dim: usize, domain: Domain) -> Self {
        AssocMemory {
            dim,
            domain,
            entries: Vec::new(),
            labels: HashMap::new(),
            index: None,
        }
    }

    /// Enable or drop the cached per-entry statistics.
    pub fn with_index(mut self, enabled: bool) -> Self {
        self.index = enabled.then(|| IndexMeta {
            weight: self.entries.iter().map(|(_, hv)| weight(hv)).collect(),
        });
        self
    }

    pub fn is_indexed(&self) -> bool {
        self.index.is_some()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(String, Hypervector)] {
        &self.entries
    }

    pub fn get(&self, label: &str) -> Option<&Hypervector> {
        self.labels.get(label).map(|&i| &self.entries[i].1)
    }

    pub fn store(&mut self, label: &str, hv: Hypervector) -> Result<()> {
        if hv.dim() != self.dim {
            return Err(HdcError::DimensionMismatch {
                expected: self.dim,
                found: hv.dim(),
            });
        }
        if hv.domain() != self.domain {
            return Err(HdcError::DomainMismatch {
                expected: self.domain,
                found: hv.domain(),
            });
        }
        if self.labels.contains_key(label) {
            return Err(HdcError::DuplicateLabel(label.to_owned()));
        }
        if let Some(index) = &mut self.index {
            index.weight.push(weight(&hv));
        }
        self.labels.insert(label.to_owned(), self.entries.len());
        self.entries.push((label.to_owned(), hv));
        Ok(())
    }

    fn score(&self, query: &Hypervector, query_weight: f64, i: usize, metric: Metric) -> Result<SimilarityReport> {
        let Some(index) = &self.index else {
            return similarity(query, &self.entries[i].1, metric);
        };
        let qw = query_weight;
        let entry = &self.entries[i].1;
        let ew = index.weight[i];
        let value = match (metric, query.elements(), entry.elements()) {
            (Metric::Jaccard, Elements::Binary(a), Elements::Binary(b)) => {
                let inter = popcount::and_count(a, b);
                let denom = qw + ew - inter as f64;
                if denom == 0.0 {
                    return Err(HdcError::BothAllZero);
                }
                inter as f64 / denom
            }
            (Metric::Cosine, Elements::Real(a), Elements::Real(b)) => {
                if qw == 0.0 || ew == 0.0 {
                    return Err(HdcError::ZeroNorm);
                }
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                (dot / (qw.sqrt() * ew.sqrt())).clamp(-1.0, 1.0)
            }
            _ => return similarity(query, entry, metric),
        };
        Ok(SimilarityReport::new(value, metric, self.dim))
    }

    /// The `k` nearest entries (all of them when `k` exceeds the size), best
    /// first with lexicographic label tie-break.
    pub fn query(&self, hv: &Hypervector, k: usize) -> Result<Vec<(String, SimilarityReport)>> {
        self.query_with(hv, k, Metric::default_for(self.domain))
    }

    pub fn query_with(&self, hv: &Hypervector, k: usize, metric: Metric) -> Result<Vec<(String, SimilarityReport)>> {
        if self.entries.is_empty() {
            return Err(HdcError::EmptyMemory);
        }
        if k == 0 {
            return Err(HdcError::ZeroK);
        }
        let qw = weight(hv);
        // Ranked by index; labels are materialized only for the survivors.
        let order = |a: &(usize, SimilarityReport), b: &(usize, SimilarityReport)| {
            b.1.value
                .total_cmp(&a.1.value)
                .then_with(|| self.entries[a.0].0.cmp(&self.entries[b.0].0))
        };
        let keep_top = |scored: &mut Vec<(usize, SimilarityReport)>| {
            if k < scored.len() {
                scored.select_nth_unstable_by(k - 1, order);
                scored.truncate(k);
            }
        };
        // Each chunk keeps its own top k; the union of those contains the
        // global top k, so the result equals a full sort.
        let chunks = (0..self.entries.len().div_ceil(QUERY_CHUNK))
            .into_par_iter()
            .map(|c| {
                let range = c * QUERY_CHUNK..((c + 1) * QUERY_CHUNK).min(self.entries.len());
                let mut scored = range
                    .map(|i| Ok((i, self.score(hv, qw, i, metric)?)))
                    .collect::<Result<Vec<_>>>()?;
                keep_top(&mut scored);
                Ok(scored)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut scored: Vec<_> = chunks.into_iter().flatten().collect();
        keep_top(&mut scored);
        scored.sort_by(order);
        Ok(scored.into_iter().map(|(i, r)| (self.entries[i].0.clone(), r)).collect())
    }

    /// Label and report of the nearest entry.
    pub fn cleanup(&self, hv: &Hypervector) -> Result<(String, SimilarityReport)> {
        Ok(self.query(hv, 1)?.remove(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    #[test]
    fn store_and_query() {
        let mut rng = seed::rng(1);
        let mut m = AssocMemory::new(1000, Domain::Binary);
        assert!(matches!(m.query(&Hypervector::binary_zeros(1000).unwrap(), 1), Err(HdcError::EmptyMemory)));
        let hvs: Vec<_> = (0..20).map(|_| Hypervector::random(1000, Domain::Binary, &mut rng).unwrap()).collect();
        for (i, hv) in hvs.iter().enumerate() {
            m.store(&format!("e{i}"), hv.clone()).unwrap();
        }
        let (label, rep) = m.cleanup(&hvs[7]).unwrap();
        assert_eq!(label, "e7");
        assert_eq!(rep.value, 1.0);
        assert_eq!(m.query(&hvs[0], 100).unwrap().len(), 20);
        assert!(matches!(m.store("e3", hvs[0].clone()), Err(HdcError::DuplicateLabel(_))));
        let short = Hypervector::random(999, Domain::Binary, &mut rng).unwrap();
        assert!(matches!(m.store("x", short), Err(HdcError::DimensionMismatch { .. })));
    }

    #[test]
    fn index_is_transparent() {
        let mut rng = seed::rng(2);
        for (domain, metrics) in [
            (Domain::Binary, vec![Metric::Hamming, Metric::Jaccard]),
            (Domain::Real, vec![Metric::Cosine]),
            (Domain::Bipolar, vec![Metric::Cosine]),
        ] {
            let mut plain = AssocMemory::new(512, domain);
            for i in 0..50 {
                plain.store(&format!("e{i}"), Hypervector::random(512, domain, &mut rng).unwrap()).unwrap();
            }
            let mut indexed = plain.clone().with_index(true);
            indexed.store("late", Hypervector::random(512, domain, &mut rng).unwrap()).unwrap();
            plain.store("late", indexed.get("late").unwrap().clone()).unwrap();
            for _ in 0..20 {
                let q = Hypervector::random(512, domain, &mut rng).unwrap();
                for &metric in &metrics {
                    assert_eq!(plain.query_with(&q, 5, metric).unwrap(), indexed.query_with(&q, 5, metric).unwrap());
                }
            }
        }
    }
}
