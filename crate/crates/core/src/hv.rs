//! Hypervectors and the elementary operations: generation, bundling,
//! binding/unbinding and permutation.
//!
//! Binary hypervectors are bit-packed into `u64` words (bits beyond `dim` in
//! the last word are always zero). Bipolar hypervectors hold `i8` values in
//! `{-1, +1}`, with `0` allowed only as the tie marker produced by bundling.
//! Real hypervectors hold finite `f64` values.
//!
//! Bundling is two-phase: inputs are summed into an [`Accumulator`] with exact
//! integer arithmetic and normalized once, so the result does not depend on the
//! order in which inputs were added.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{HdcError, Result};
use crate::seed;

/// Default dimensionality. Below [`LOW_DIM_WARNING`] the random baselines
/// become noisy enough that the statistical guarantees in this crate degrade.
pub const DEFAULT_DIM: usize = 10_000;
pub const LOW_DIM_WARNING: usize = 1_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Binary,
    Bipolar,
    Real,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Binary => "binary",
            Domain::Bipolar => "bipolar",
            Domain::Real => "real",
        }
    }
}

impl std::str::FromStr for Domain {
    type Err = HdcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "binary" => Ok(Domain::Binary),
            "bipolar" => Ok(Domain::Bipolar),
            "real" => Ok(Domain::Real),
            other => Err(HdcError::InvalidConfig(format!("unknown domain `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Elements {
    Binary(Vec<u64>),
    Bipolar(Vec<i8>),
    Real(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hypervector {
    dim: usize,
    elements: Elements,
}

#[inline]
pub(crate) fn words_for(dim: usize) -> usize {
    dim.div_ceil(64)
}

#[inline]
fn tail_mask(dim: usize) -> u64 {
    match dim % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Read `len <= 64` bits starting at bit `start`; `start + len` must not exceed
/// the packed length.
#[inline]
fn read_bits(words: &[u64], start: usize, len: usize) -> u64 {
    if len == 0 {
        return 0;
    }
    let w = start / 64;
    let o = start % 64;
    let mut v = words[w] >> o;
    if o + len > 64 {
        v |= words[w + 1] << (64 - o);
    }
    if len < 64 {
        v &= (1u64 << len) - 1;
    }
    v
}

impl Hypervector {
    /// Bit-packed binary hypervector from raw words.
    pub fn from_words(dim: usize, words: Vec<u64>) -> Result<Self> {
        if dim == 0 {
            return Err(HdcError::ZeroDimension);
        }
        if words.len() != words_for(dim) {
            return Err(HdcError::DimensionMismatch {
                expected: words_for(dim),
                found: words.len(),
            });
        }
        if words[words.len() - 1] & !tail_mask(dim) != 0 {
            return Err(HdcError::InvalidElement(Domain::Binary));
        }
        Ok(Hypervector {
            dim,
            elements: Elements::Binary(words),
        })
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Result<Self> {
        let mut words = Vec::new();
        let mut dim = 0usize;
        for b in bits {
            if dim.is_multiple_of(64) {
                words.push(0);
            }
            if b {
                words[dim / 64] |= 1 << (dim % 64);
            }
            dim += 1;
        }
        Self::from_words(dim, words)
    }

    /// Bipolar hypervector; values must be in `{-1, 0, +1}`.
    pub fn from_bipolar(values: Vec<i8>) -> Result<Self> {
        if values.is_empty() {
            return Err(HdcError::ZeroDimension);
        }
        if values.iter().any(|v| !(-1..=1).contains(v)) {
            return Err(HdcError::InvalidElement(Domain::Bipolar));
        }
        Ok(Hypervector {
            dim: values.len(),
            elements: Elements::Bipolar(values),
        })
    }

    pub fn from_real(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(HdcError::ZeroDimension);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(HdcError::NonFiniteInput);
        }
        Ok(Hypervector {
            dim: values.len(),
            elements: Elements::Real(values),
        })
    }

    /// All-zero binary vector (the identity element of XOR binding).
    pub fn binary_zeros(dim: usize) -> Result<Self> {
        Self::from_words(dim, vec![0; words_for(dim)])
    }

    /// Fresh i.i.d. atomic hypervector: Bernoulli(1/2) bits, Rademacher signs,
    /// or standard normal values rescaled to norm `sqrt(dim)`.
    pub fn random<R: Rng + ?Sized>(dim: usize, domain: Domain, rng: &mut R) -> Result<Self> {
        if dim == 0 {
            return Err(HdcError::ZeroDimension);
        }
        let elements = match domain {
            Domain::Binary => {
                let mut words: Vec<u64> = (0..words_for(dim)).map(|_| rng.random()).collect();
                let last = words.len() - 1;
                words[last] &= tail_mask(dim);
                Elements::Binary(words)
            }
            Domain::Bipolar => {
                let mut values = Vec::with_capacity(dim);
                while values.len() < dim {
                    let w: u64 = rng.random();
                    let take = (dim - values.len()).min(64);
                    values.extend((0..take).map(|b| if (w >> b) & 1 == 1 { 1i8 } else { -1 }));
                }
                Elements::Bipolar(values)
            }
            Domain::Real => {
                let mut values: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
                rescale_to_atomic_norm(&mut values)?;
                Elements::Real(values)
            }
        };
        Ok(Hypervector { dim, elements })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> Domain {
        match self.elements {
            Elements::Binary(_) => Domain::Binary,
            Elements::Bipolar(_) => Domain::Bipolar,
            Elements::Real(_) => Domain::Real,
        }
    }

    pub fn elements(&self) -> &Elements {
        &self.elements
    }

    pub fn words(&self) -> Option<&[u64]> {
        match &self.elements {
            Elements::Binary(w) => Some(w),
            _ => None,
        }
    }

    /// Element `i` as a real number (binary bits read as 0/1).
    pub fn value(&self, i: usize) -> f64 {
        match &self.elements {
            Elements::Binary(w) => ((w[i / 64] >> (i % 64)) & 1) as f64,
            Elements::Bipolar(v) => v[i] as f64,
            Elements::Real(v) => v[i],
        }
    }

    /// Signed real view: binary bits are mapped `0 -> -1`, `1 -> +1`, other
    /// domains are returned as-is. This is the view used for prototype
    /// arithmetic and cosine similarity.
    pub fn to_signed(&self) -> Vec<f64> {
        match &self.elements {
            Elements::Binary(w) => (0..self.dim)
                .map(|i| if (w[i / 64] >> (i % 64)) & 1 == 1 { 1.0 } else { -1.0 })
                .collect(),
            Elements::Bipolar(v) => v.iter().map(|&x| x as f64).collect(),
            Elements::Real(v) => v.clone(),
        }
    }

    /// Number of nonzero elements.
    pub fn count_nonzero(&self) -> usize {
        match &self.elements {
            Elements::Binary(w) => crate::popcount::ones(w) as usize,
            Elements::Bipolar(v) => v.iter().filter(|&&x| x != 0).count(),
            Elements::Real(v) => v.iter().filter(|&&x| x != 0.0).count(),
        }
    }

    pub fn norm(&self) -> f64 {
        match &self.elements {
            Elements::Binary(_) | Elements::Bipolar(_) => (self.count_nonzero() as f64).sqrt(),
            Elements::Real(v) => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }

    pub fn check_compatible(&self, other: &Hypervector) -> Result<()> {
        if self.dim != other.dim {
            return Err(HdcError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if self.domain() != other.domain() {
            return Err(HdcError::DomainMismatch {
                expected: self.domain(),
                found: other.domain(),
            });
        }
        Ok(())
    }

    /// Binding: XOR for binary, element-wise product otherwise. The result is
    /// quasi-orthogonal to both operands. Bipolar operands must not contain
    /// tie zeros.
    pub fn bind(&self, other: &Hypervector) -> Result<Hypervector> {
        self.check_compatible(other)?;
        let elements = match (&self.elements, &other.elements) {
            (Elements::Binary(a), Elements::Binary(b)) => {
                Elements::Binary(a.iter().zip(b).map(|(x, y)| x ^ y).collect())
            }
            (Elements::Bipolar(a), Elements::Bipolar(b)) => {
                if a.contains(&0) || b.contains(&0) {
                    return Err(HdcError::ZeroElementBipolar);
                }
                Elements::Bipolar(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
            (Elements::Real(a), Elements::Real(b)) => {
                Elements::Real(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
            _ => unreachable!("domains checked above"),
        };
        Ok(Hypervector {
            dim: self.dim,
            elements,
        })
    }

    /// Unbind `self` (the key) from `bound`. For binary and bipolar this is
    /// the same operation as binding and recovers the partner exactly. For real
    /// vectors it is element-wise multiplication, exact for `±1`-valued keys
    /// and approximate otherwise.
    pub fn unbind(&self, bound: &Hypervector) -> Result<Hypervector> {
        self.bind(bound)
    }

    /// Circular shift by `shift` positions: element `j` moves to
    /// `(j + shift) mod dim`. Negative shifts invert positive ones.
    pub fn permute(&self, shift: i64) -> Hypervector {
        let k = shift.rem_euclid(self.dim as i64) as usize;
        if k == 0 {
            return self.clone();
        }
        let dim = self.dim;
        let elements = match &self.elements {
            Elements::Binary(words) => {
                let mut out = vec![0u64; words.len()];
                for (wi, o) in out.iter_mut().enumerate() {
                    let start = wi * 64;
                    let len = (dim - start).min(64);
                    let src = (start + dim - k) % dim;
                    *o = if src + len <= dim {
                        read_bits(words, src, len)
                    } else {
                        let first = dim - src;
                        read_bits(words, src, first) | (read_bits(words, 0, len - first) << first)
                    };
                }
                Elements::Binary(out)
            }
            Elements::Bipolar(v) => {
                let mut v = v.clone();
                v.rotate_right(k);
                Elements::Bipolar(v)
            }
            Elements::Real(v) => {
                let mut v = v.clone();
                v.rotate_right(k);
                Elements::Real(v)
            }
        };
        Hypervector { dim, elements }
    }

    /// Copy with the given positions flipped (bit toggled, sign negated).
    pub fn flipped(&self, positions: &[usize]) -> Hypervector {
        let mut out = self.clone();
        match &mut out.elements {
            Elements::Binary(w) => {
                for &p in positions {
                    w[p / 64] ^= 1 << (p % 64);
                }
            }
            Elements::Bipolar(v) => positions.iter().for_each(|&p| v[p] = -v[p]),
            Elements::Real(v) => positions.iter().for_each(|&p| v[p] = -v[p]),
        }
        out
    }

    /// Scale a real hypervector by a constant.
    pub fn scaled(&self, factor: f64) -> Result<Hypervector> {
        match &self.elements {
            Elements::Real(v) => Hypervector::from_real(v.iter().map(|x| x * factor).collect()),
            _ => Err(HdcError::DomainMismatch {
                expected: Domain::Real,
                found: self.domain(),
            }),
        }
    }
}

pub(crate) fn rescale_to_atomic_norm(values: &mut [f64]) -> Result<()> {
    let norm = values.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(HdcError::ZeroNorm);
    }
    let factor = (values.len() as f64).sqrt() / norm;
    values.iter_mut().for_each(|x| *x *= factor);
    Ok(())
}

/// How bundling resolves elements whose vote is exactly split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TieRule {
    /// Bipolar ties become `0` (ternary output). Binary has no neutral
    /// element, so ties resolve to the default value `0`.
    ZeroTernary,
    /// Ties are decided by a fair coin keyed by `(seed, element index)`.
    SeededRandom(u64),
}

impl Default for TieRule {
    fn default() -> Self {
        TieRule::SeededRandom(0)
    }
}

/// Normalization applied when bundling real hypervectors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RealScaling {
    /// Rescale the sum to the atomic norm `sqrt(dim)`.
    #[default]
    MatchAtomicNorm,
    /// Multiply the sum by `n^{-1/2}`.
    InvSqrtN,
}

#[derive(Clone, Debug, PartialEq)]
enum Sums {
    Int(Vec<i64>),
    /// Real values in fixed point with [`REAL_FRAC_BITS`] fractional bits.
    Real(Vec<i128>),
}

/// Fractional bits of the fixed-point real accumulator. Integer addition is
/// associative, so real bundles are as order-independent as binary ones; the
/// price is quantization to `2^-64` and a magnitude limit of [`REAL_LIMIT`].
const REAL_FRAC_BITS: i32 = 64;
/// Largest accepted magnitude of a real element added to an accumulator.
pub const REAL_LIMIT: f64 = (1u64 << 52) as f64;

fn to_fixed(x: f64) -> Result<i128> {
    if x.abs() >= REAL_LIMIT {
        return Err(HdcError::OutOfRange {
            value: x,
            lo: -REAL_LIMIT,
            hi: REAL_LIMIT,
        });
    }
    Ok((x * 2f64.powi(REAL_FRAC_BITS)).round() as i128)
}

fn from_fixed(x: i128) -> f64 {
    x as f64 * 2f64.powi(-REAL_FRAC_BITS)
}

/// Running element-wise sum of hypervectors.
///
/// Binary inputs add their bits (counts in `[0, n]`), bipolar inputs their
/// signs (counts in `[-n, n]`), real inputs their values in 64-bit fixed
/// point. All sums are integer sums, so any two accumulators holding the same
/// multiset are equal and per-thread accumulators can be merged freely.
#[derive(Clone, Debug, PartialEq)]
pub struct Accumulator {
    dim: usize,
    domain: Domain,
    sums: Sums,
    items_added: u64,
}

impl Accumulator {
    pub fn new(dim: usize, domain: Domain) -> Result<Self> {
        if dim == 0 {
            return Err(HdcError::ZeroDimension);
        }
        let sums = match domain {
            Domain::Real => Sums::Real(vec![0; dim]),
            _ => Sums::Int(vec![0; dim]),
        };
        Ok(Accumulator {
            dim,
            domain,
            sums,
            items_added: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn items_added(&self) -> u64 {
        self.items_added
    }

    pub fn is_empty(&self) -> bool {
        self.items_added == 0
    }

    /// Integer counts (binary and bipolar accumulators).
    pub fn counts(&self) -> Option<&[i64]> {
        match &self.sums {
            Sums::Int(c) => Some(c),
            Sums::Real(_) => None,
        }
    }

    /// Real sums (real accumulators).
    pub fn real_sums(&self) -> Option<Vec<f64>> {
        match &self.sums {
            Sums::Real(s) => Some(s.iter().map(|&x| from_fixed(x)).collect()),
            Sums::Int(_) => None,
        }
    }

    fn check(&self, hv: &Hypervector) -> Result<()> {
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
        Ok(())
    }

    pub fn add(&mut self, hv: &Hypervector) -> Result<()> {
        self.check(hv)?;
        match (&mut self.sums, hv.elements()) {
            (Sums::Int(c), Elements::Binary(words)) => {
                for (chunk, &w) in c.chunks_mut(64).zip(words) {
                    for (b, slot) in chunk.iter_mut().enumerate() {
                        *slot += ((w >> b) & 1) as i64;
                    }
                }
            }
            (Sums::Int(c), Elements::Bipolar(v)) => {
                c.iter_mut().zip(v).for_each(|(s, &x)| *s += x as i64);
            }
            (Sums::Real(s), Elements::Real(v)) => {
                let fixed = v.iter().map(|&x| to_fixed(x)).collect::<Result<Vec<_>>>()?;
                s.iter_mut().zip(fixed).for_each(|(s, x)| *s += x);
            }
            _ => unreachable!("domain checked above"),
        }
        self.items_added += 1;
        Ok(())
    }

    /// Remove a previously added hypervector.
    pub fn subtract(&mut self, hv: &Hypervector) -> Result<()> {
        self.check(hv)?;
        if self.items_added == 0 {
            return Err(HdcError::EmptyBundle);
        }
        match (&mut self.sums, hv.elements()) {
            (Sums::Int(c), Elements::Binary(words)) => {
                for (chunk, &w) in c.chunks_mut(64).zip(words) {
                    for (b, slot) in chunk.iter_mut().enumerate() {
                        *slot -= ((w >> b) & 1) as i64;
                    }
                }
            }
            (Sums::Int(c), Elements::Bipolar(v)) => {
                c.iter_mut().zip(v).for_each(|(s, &x)| *s -= x as i64);
            }
            (Sums::Real(s), Elements::Real(v)) => {
                let fixed = v.iter().map(|&x| to_fixed(x)).collect::<Result<Vec<_>>>()?;
                s.iter_mut().zip(fixed).for_each(|(s, x)| *s -= x);
            }
            _ => unreachable!("domain checked above"),
        }
        self.items_added -= 1;
        Ok(())
    }

    /// Add the contents of another accumulator.
    pub fn merge(&mut self, other: &Accumulator) -> Result<()> {
        if other.dim != self.dim {
            return Err(HdcError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if other.domain != self.domain {
            return Err(HdcError::DomainMismatch {
                expected: self.domain,
                found: other.domain,
            });
        }
        match (&mut self.sums, &other.sums) {
            (Sums::Int(a), Sums::Int(b)) => a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
            (Sums::Real(a), Sums::Real(b)) => a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
            _ => unreachable!("domain checked above"),
        }
        self.items_added += other.items_added;
        Ok(())
    }

    /// Normalize the accumulated sum into a hypervector of the input domain.
    pub fn bundle(&self, tie: TieRule) -> Result<Hypervector> {
        self.bundle_with(tie, RealScaling::default())
    }

    pub fn bundle_with(&self, tie: TieRule, scaling: RealScaling) -> Result<Hypervector> {
        if self.items_added == 0 {
            return Err(HdcError::EmptyBundle);
        }
        let n = self.items_added as i64;
        let dim = self.dim;
        let elements = match (&self.sums, self.domain) {
            (Sums::Int(c), Domain::Binary) => {
                let mut words = vec![0u64; words_for(dim)];
                for (i, &count) in c.iter().enumerate() {
                    let twice = 2 * count;
                    let one = if twice > n {
                        true
                    } else if twice < n {
                        false
                    } else {
                        match tie {
                            TieRule::ZeroTernary => false,
                            TieRule::SeededRandom(s) => seed::coin(s, i as u64),
                        }
                    };
                    if one {
                        words[i / 64] |= 1 << (i % 64);
                    }
                }
                Elements::Binary(words)
            }
            (Sums::Int(c), Domain::Bipolar) => Elements::Bipolar(
                c.iter()
                    .enumerate()
                    .map(|(i, &s)| match s.signum() {
                        0 => match tie {
                            TieRule::ZeroTernary => 0,
                            TieRule::SeededRandom(seed) => {
                                if seed::coin(seed, i as u64) {
                                    1
                                } else {
                                    -1
                                }
                            }
                        },
                        sign => sign as i8,
                    })
                    .collect(),
            ),
            (Sums::Real(s), Domain::Real) => {
                let mut values: Vec<f64> = s.iter().map(|&x| from_fixed(x)).collect();
                match scaling {
                    RealScaling::MatchAtomicNorm => rescale_to_atomic_norm(&mut values)?,
                    RealScaling::InvSqrtN => {
                        let f = (self.items_added as f64).sqrt().recip();
                        values.iter_mut().for_each(|x| *x *= f);
                    }
                }
                Elements::Real(values)
            }
            _ => unreachable!("sums layout follows domain"),
        };
        Ok(Hypervector { dim, elements })
    }
}

/// Per-position counter for many binary inputs, kept bit-sliced: plane `p`
/// holds bit `p` of every position's count, so adding a vector is a ripple
/// of word-wide half adders instead of one increment per bit. Planes are
/// flushed into an [`Accumulator`] before they can overflow.
pub(crate) struct BitCounter {
    dim: usize,
    planes: Vec<Vec<u64>>,
    carry: Vec<u64>,
    pending: u64,
    acc: Accumulator,
}

const COUNTER_PLANES: usize = 8;

impl BitCounter {
    pub(crate) fn new(dim: usize) -> Result<Self> {
        let words = words_for(dim);
        Ok(BitCounter {
            dim,
            planes: vec![vec![0; words]; COUNTER_PLANES],
            carry: vec![0; words],
            pending: 0,
            acc: Accumulator::new(dim, Domain::Binary)?,
        })
    }

    /// Add packed bits (same layout as a binary hypervector of `dim`).
    pub(crate) fn add_words(&mut self, words: &[u64]) {
        debug_assert_eq!(words.len(), self.carry.len());
        self.carry.copy_from_slice(words);
        for plane in &mut self.planes {
            let mut any = 0u64;
            for (p, c) in plane.iter_mut().zip(self.carry.iter_mut()) {
                let t = *p & *c;
                *p ^= *c;
                *c = t;
                any |= t;
            }
            if any == 0 {
                break;
            }
        }
        self.pending += 1;
        if self.pending == (1 << COUNTER_PLANES) - 1 {
            self.flush();
        }
    }

    fn flush(&mut self) {
        let Sums::Int(counts) = &mut self.acc.sums else {
            unreachable!("binary accumulator")
        };
        for (p, plane) in self.planes.iter_mut().enumerate() {
            for (w, word) in plane.iter_mut().enumerate() {
                let mut bits = *word;
                while bits != 0 {
                    counts[w * 64 + bits.trailing_zeros() as usize] += 1 << p;
                    bits &= bits - 1;
                }
                *word = 0;
            }
        }
        self.acc.items_added += self.pending;
        self.pending = 0;
    }

    pub(crate) fn into_accumulator(mut self) -> Accumulator {
        self.flush();
        debug_assert_eq!(self.acc.dim, self.dim);
        self.acc
    }
}

/// Bundle a slice of hypervectors in one call.
pub fn bundle(items: &[&Hypervector], tie: TieRule) -> Result<Hypervector> {
    let first = items.first().ok_or(HdcError::EmptyBundle)?;
    let mut acc = Accumulator::new(first.dim(), first.domain())?;
    for hv in items {
        acc.add(hv)?;
    }
    acc.bundle(tie)
}
