//! Seeded codebooks of atomic hypervectors.
//!
//! A symbol's hypervector is a pure function of `(global_seed, dim, domain,
//! symbol)`: it is generated from a stream keyed by a hash of the seed and the
//! symbol text, so memories populated in different orders agree entry by entry.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HdcError, Result};
use crate::hv::{rescale_to_atomic_norm, Domain, Elements, Hypervector};
use crate::seed;

/// How an entry was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Derivation {
    Random,
    Correlated { parent: String, fraction: f64 },
    Level { encoder: String, bin: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ItemMemory {
    dim: usize,
    domain: Domain,
    global_seed: u64,
    entries: BTreeMap<String, Hypervector>,
    provenance: BTreeMap<String, Derivation>,
}

/// Fisher-Yates permutation of `0..n`.
pub(crate) fn shuffled_indices<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        idx.swap(i, j);
    }
    idx
}

/// `base` with the elements at `positions` replaced by those of `donor`.
fn splice(base: &Hypervector, donor: &Hypervector, positions: &[usize]) -> Hypervector {
    match (base.elements(), donor.elements()) {
        (Elements::Binary(b), Elements::Binary(d)) => {
            let mut w = b.clone();
            for &p in positions {
                let mask = 1u64 << (p % 64);
                w[p / 64] = (w[p / 64] & !mask) | (d[p / 64] & mask);
            }
            Hypervector::from_words(base.dim(), w).expect("same layout as base")
        }
        (Elements::Bipolar(b), Elements::Bipolar(d)) => {
            let mut v = b.clone();
            positions.iter().for_each(|&p| v[p] = d[p]);
            Hypervector::from_bipolar(v).expect("values copied from valid vectors")
        }
        (Elements::Real(b), Elements::Real(d)) => {
            let mut v = b.clone();
            positions.iter().for_each(|&p| v[p] = d[p]);
            Hypervector::from_real(v).expect("values copied from valid vectors")
        }
        _ => unreachable!("splice operands share a domain"),
    }
}

fn normalized(hv: &Hypervector) -> Result<Hypervector> {
    match hv.elements() {
        Elements::Real(v) => {
            let mut v = v.clone();
            rescale_to_atomic_norm(&mut v)?;
            Hypervector::from_real(v)
        }
        _ => Ok(hv.clone()),
    }
}

impl ItemMemory {
    pub fn new(dim: usize, domain: Domain, global_seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(HdcError::ZeroDimension);
        }
        Ok(ItemMemory {
            dim,
            domain,
            global_seed,
            entries: BTreeMap::new(),
            provenance: BTreeMap::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn global_seed(&self) -> u64 {
        self.global_seed
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, symbol: &str) -> Option<&Hypervector> {
        self.entries.get(symbol)
    }

    pub fn provenance(&self, symbol: &str) -> Option<&Derivation> {
        self.provenance.get(symbol)
    }

    /// Entries in symbol order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &Hypervector, &Derivation)> {
        self.entries
            .iter()
            .map(|(k, v)| (k.as_str(), v, &self.provenance[k]))
    }

    fn fresh(&self, tag: &str, key: &str) -> Hypervector {
        let mut rng = seed::rng_for(self.global_seed, tag, key);
        Hypervector::random(self.dim, self.domain, &mut rng).expect("dim checked at construction")
    }

    /// The random atomic hypervector for `symbol`, without caching it.
    pub fn generate_symbol(&self, symbol: &str) -> Hypervector {
        self.fresh("symbol", symbol)
    }

    /// Cached lookup; unseen symbols are generated deterministically and stored.
    pub fn get_symbol(&mut self, symbol: &str) -> &Hypervector {
        if !self.entries.contains_key(symbol) {
            let hv = self.generate_symbol(symbol);
            self.provenance.insert(symbol.to_owned(), Derivation::Random);
            self.entries.insert(symbol.to_owned(), hv);
        }
        &self.entries[symbol]
    }

    /// Create `child` as a copy of `parent` on `ceil(fraction * dim)`
    /// pseudo-random positions and fresh random values elsewhere. For binary
    /// vectors the expected Hamming similarity to the parent is
    /// `fraction + (1 - fraction) / 2`.
    pub fn make_correlated(&mut self, parent: &str, child: &str, fraction: f64) -> Result<&Hypervector> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(HdcError::InvalidConfig(format!(
                "correlation fraction must be in (0, 1), got {fraction}"
            )));
        }
        let parent_hv = self
            .entries
            .get(parent)
            .ok_or_else(|| HdcError::UnknownParent(parent.to_owned()))?;
        if self.entries.contains_key(child) {
            return Err(HdcError::DuplicateSymbol(child.to_owned()));
        }
        let copies = ((fraction * self.dim as f64).ceil() as usize).min(self.dim);
        let mut rng = seed::rng_for(self.global_seed, "correlated-positions", child);
        let order = shuffled_indices(self.dim, &mut rng);
        let fresh = self.fresh("correlated", child);
        let hv = normalized(&splice(&fresh, parent_hv, &order[..copies]))?;
        self.provenance.insert(
            child.to_owned(),
            Derivation::Correlated {
                parent: parent.to_owned(),
                fraction,
            },
        );
        self.entries.insert(child.to_owned(), hv);
        Ok(&self.entries[child])
    }

    /// Insert an entry verbatim (used when restoring a serialized memory).
    pub fn insert_raw(&mut self, symbol: &str, hv: Hypervector, derivation: Derivation) -> Result<()> {
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
        self.provenance.insert(symbol.to_owned(), derivation);
        self.entries.insert(symbol.to_owned(), hv);
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelEncoderConfig {
    /// Namespace for the bin chain, so several scalar encoders can share one memory.
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub num_bins: usize,
    pub flip_fraction: f64,
    pub clamp_out_of_range: bool,
}

impl LevelEncoderConfig {
    pub fn new(name: &str, lo: f64, hi: f64, num_bins: usize) -> Self {
        LevelEncoderConfig {
            name: name.to_owned(),
            lo,
            hi,
            num_bins,
            flip_fraction: 1.0,
            clamp_out_of_range: false,
        }
    }

    /// Positions resampled between consecutive bins.
    pub fn step(&self, dim: usize) -> usize {
        (self.flip_fraction * dim as f64 / (self.num_bins - 1) as f64).floor() as usize
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(HdcError::InvalidConfig(format!(
                "level range requires lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.num_bins < 2 {
            return Err(HdcError::InvalidConfig("level encoding needs at least 2 bins".into()));
        }
        if !(self.flip_fraction > 0.0 && self.flip_fraction <= 1.0) {
            return Err(HdcError::InvalidConfig(format!(
                "flip fraction must be in (0, 1], got {}",
                self.flip_fraction
            )));
        }
        if self.step(dim) < 1 {
            return Err(HdcError::InvalidConfig(format!(
                "flip_fraction * dim / (num_bins - 1) < 1 for dim {dim} and {} bins",
                self.num_bins
            )));
        }
        Ok(())
    }

    /// Bin index of `x`.
    pub fn bin(&self, x: f64) -> Result<usize> {
        if !x.is_finite() {
            return Err(HdcError::NonFiniteInput);
        }
        let x = if x < self.lo || x > self.hi {
            if !self.clamp_out_of_range {
                return Err(HdcError::OutOfRange {
                    value: x,
                    lo: self.lo,
                    hi: self.hi,
                });
            }
            x.clamp(self.lo, self.hi)
        } else {
            x
        };
        let b = ((x - self.lo) / (self.hi - self.lo) * self.num_bins as f64).floor() as usize;
        Ok(b.min(self.num_bins - 1))
    }
}

/// Level (bin) encoder for scalars.
///
/// Bin 0 is random. Bin `b + 1` is bin `b` with a further `step` positions
/// resampled, taking the positions from one fixed random ordering so that no
/// position is resampled twice along the chain. Agreement with bin `a` is
/// therefore exactly non-increasing as the bin distance grows (for binary and
/// bipolar vectors; for real vectors it holds in expectation).
#[derive(Clone, Debug)]
pub struct LevelEncoder {
    config: LevelEncoderConfig,
    bins: Vec<Hypervector>,
}

impl LevelEncoder {
    pub fn new(config: LevelEncoderConfig, mem: &mut ItemMemory) -> Result<Self> {
        let dim = mem.dim();
        config.validate(dim)?;
        let step = config.step(dim);
        let base = mem.fresh("level", &config.name);
        let donor = mem.fresh("level-fresh", &config.name);
        let order = shuffled_indices(dim, &mut seed::rng_for(mem.global_seed, "level-order", &config.name));

        let mut raw = base;
        let mut bins = Vec::with_capacity(config.num_bins);
        for b in 0..config.num_bins {
            if b > 0 {
                raw = splice(&raw, &donor, &order[(b - 1) * step..b * step]);
            }
            let hv = normalized(&raw)?;
            mem.insert_raw(
                &format!("{}#{}", config.name, b),
                hv.clone(),
                Derivation::Level {
                    encoder: config.name.clone(),
                    bin: b,
                },
            )?;
            bins.push(hv);
        }
        Ok(LevelEncoder { config, bins })
    }

    pub fn config(&self) -> &LevelEncoderConfig {
        &self.config
    }

    pub fn bin_hv(&self, bin: usize) -> Option<&Hypervector> {
        self.bins.get(bin)
    }

    pub fn encode(&self, x: f64) -> Result<&Hypervector> {
        Ok(&self.bins[self.config.bin(x)?])
    }
}

/// One-shot scalar encoding; builds the bin chain in `mem` and returns the
/// hypervector of the bin containing `x`.
pub fn encode_scalar(cfg: &LevelEncoderConfig, mem: &mut ItemMemory, x: f64) -> Result<Hypervector> {
    let enc = LevelEncoder::new(cfg.clone(), mem)?;
    enc.encode(x).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::{cosine, hamming};

    #[test]
    fn symbols_are_deterministic_and_order_independent() {
        let mut a = ItemMemory::new(2048, Domain::Binary, 42).unwrap();
        let mut b = ItemMemory::new(2048, Domain::Binary, 42).unwrap();
        for s in ["A", "C", "G", "T"] {
            a.get_symbol(s);
        }
        for s in ["T", "G", "C", "A"] {
            b.get_symbol(s);
        }
        assert_eq!(a, b);
        assert_eq!(a.get_symbol("A").clone(), a.generate_symbol("A"));
    }

    #[test]
    fn correlated_errors() {
        let mut m = ItemMemory::new(1000, Domain::Binary, 1).unwrap();
        assert!(matches!(m.make_correlated("p", "c", 0.5), Err(HdcError::UnknownParent(_))));
        m.get_symbol("p");
        m.get_symbol("c");
        assert!(matches!(m.make_correlated("p", "c", 0.5), Err(HdcError::DuplicateSymbol(_))));
        assert!(matches!(m.make_correlated("p", "d", 1.0), Err(HdcError::InvalidConfig(_))));
        m.make_correlated("p", "d", 0.3).unwrap();
        assert_eq!(
            m.provenance("d"),
            Some(&Derivation::Correlated {
                parent: "p".into(),
                fraction: 0.3
            })
        );
    }

    #[test]
    fn correlated_copies_exact_position_count() {
        let mut m = ItemMemory::new(1000, Domain::Bipolar, 5).unwrap();
        m.get_symbol("p");
        let child = m.make_correlated("p", "c", 0.25).unwrap().clone();
        let parent = m.get("p").unwrap();
        let fresh = m.fresh("correlated", "c");
        // Every position equals either the parent (copied) or the fresh draw.
        let mut from_parent_only = 0;
        for i in 0..1000 {
            let (c, p, f) = (child.value(i), parent.value(i), fresh.value(i));
            assert!(c == p || c == f);
            if c == p && c != f {
                from_parent_only += 1;
            }
        }
        assert!(from_parent_only <= 250);
    }

    #[test]
    fn real_correlated_keeps_atomic_norm() {
        let mut m = ItemMemory::new(4096, Domain::Real, 5).unwrap();
        m.get_symbol("p");
        let c = m.make_correlated("p", "c", 0.5).unwrap().clone();
        assert!((c.norm() - 64.0).abs() / 64.0 < 1e-6);
        let cos = cosine(&c, m.get("p").unwrap()).unwrap();
        assert!((cos - 0.5).abs() < 0.1);
    }

    #[test]
    fn level_config_validation() {
        let mut cfg = LevelEncoderConfig::new("x", 0.0, 1.0, 11);
        assert!(cfg.validate(10_000).is_ok());
        cfg.num_bins = 1;
        assert!(cfg.validate(10_000).is_err());
        let mut cfg = LevelEncoderConfig::new("x", 1.0, 1.0, 4);
        assert!(cfg.validate(10_000).is_err());
        cfg.hi = 2.0;
        cfg.flip_fraction = 0.001;
        assert!(cfg.validate(100).is_err());
    }

    #[test]
    fn level_bins_and_range() {
        let cfg = LevelEncoderConfig::new("x", 0.0, 10.0, 10);
        assert_eq!(cfg.bin(0.0).unwrap(), 0);
        assert_eq!(cfg.bin(0.999).unwrap(), 0);
        assert_eq!(cfg.bin(1.0).unwrap(), 1);
        assert_eq!(cfg.bin(10.0).unwrap(), 9);
        assert!(matches!(cfg.bin(10.5), Err(HdcError::OutOfRange { .. })));
        assert!(matches!(cfg.bin(f64::NAN), Err(HdcError::NonFiniteInput)));
        let clamped = LevelEncoderConfig {
            clamp_out_of_range: true,
            ..cfg
        };
        assert_eq!(clamped.bin(-3.0).unwrap(), 0);
        assert_eq!(clamped.bin(99.0).unwrap(), 9);
    }

    #[test]
    fn level_same_bin_identical_and_monotone() {
        let mut mem = ItemMemory::new(10_000, Domain::Binary, 3).unwrap();
        let cfg = LevelEncoderConfig::new("expr", 0.0, 1.0, 11);
        let enc = LevelEncoder::new(cfg, &mut mem).unwrap();
        assert_eq!(enc.encode(0.0).unwrap(), enc.encode(1.0 / 11.0 - 1e-9).unwrap());
        for a in 0..11 {
            let mut prev = 1.0;
            for b in a..11 {
                let s = hamming(enc.bin_hv(a).unwrap(), enc.bin_hv(b).unwrap()).unwrap();
                assert!(s <= prev);
                prev = s;
            }
        }
        assert_eq!(mem.provenance("expr#3"), Some(&Derivation::Level { encoder: "expr".into(), bin: 3 }));
    }
}
