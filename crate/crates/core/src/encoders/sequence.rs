//! Sequence encoders.
//!
//! * `BundledPositional`: `[rho^0(v_1) + rho^1(v_2) + ... ]`, one normalization.
//! * `BoundPositional`: `rho^0(v_1) * rho^1(v_2) * ...` (binding).
//! * `NGram`: every length-n window `j` becomes
//!   `rho^0(v_j) * rho^1(v_{j+1}) * ... * rho^{n-1}(v_{j+n-1})`, with shifts
//!   relative to the window start; all windows are bundled.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EncoderConfig;
use crate::error::{HdcError, Result};
use crate::hv::{Accumulator, BitCounter, Domain, Hypervector, TieRule};
use crate::item_memory::ItemMemory;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceMode {
    #[serde(alias = "bundledpositional")]
    Bundled,
    #[serde(alias = "boundpositional")]
    Bound,
    NGram,
}

impl std::str::FromStr for SequenceMode {
    type Err = HdcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bundled" | "bundled-positional" => Ok(SequenceMode::Bundled),
            "bound" | "bound-positional" => Ok(SequenceMode::Bound),
            "ngram" | "n-gram" | "kmer" => Ok(SequenceMode::NGram),
            other => Err(HdcError::InvalidConfig(format!("unknown sequence mode `{other}`"))),
        }
    }
}

/// What to do with symbols outside the alphabet.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnknownSymbolPolicy {
    #[default]
    Error,
    /// Drop every n-gram window (or position, in the positional modes) that
    /// touches an unknown symbol.
    Skip,
}

#[derive(Clone, Debug)]
pub struct SequenceEncoder {
    mode: SequenceMode,
    n: usize,
    dim: usize,
    domain: Domain,
    tie: TieRule,
    policy: UnknownSymbolPolicy,
    index: HashMap<String, usize>,
    byte_index: Box<[Option<usize>; 256]>,
    /// `shifted[k][s] = rho^k(symbol s)` for `k < n`.
    shifted: Vec<Vec<Hypervector>>,
}

impl SequenceEncoder {
    /// Build an encoder whose symbol vectors come from `mem`.
    pub fn new(mode: SequenceMode, n: usize, alphabet: &[String], tie: TieRule, mem: &mut ItemMemory) -> Result<Self> {
        if n == 0 {
            return Err(HdcError::InvalidConfig("n must be at least 1".into()));
        }
        if alphabet.is_empty() {
            return Err(HdcError::InvalidConfig("alphabet is empty".into()));
        }
        let mut index = HashMap::new();
        let mut byte_index = Box::new([None; 256]);
        let mut base = Vec::with_capacity(alphabet.len());
        for (i, sym) in alphabet.iter().enumerate() {
            if index.insert(sym.clone(), i).is_some() {
                return Err(HdcError::InvalidConfig(format!("duplicate alphabet symbol `{sym}`")));
            }
            if let [b] = sym.as_bytes() {
                byte_index[*b as usize] = Some(i);
            }
            base.push(mem.get_symbol(sym).clone());
        }
        let shifts = match mode {
            SequenceMode::NGram => n,
            _ => 1,
        };
        let shifted = (0..shifts)
            .map(|k| base.iter().map(|hv| hv.permute(k as i64)).collect())
            .collect();
        Ok(SequenceEncoder {
            mode,
            n,
            dim: mem.dim(),
            domain: mem.domain(),
            tie,
            policy: UnknownSymbolPolicy::Error,
            index,
            byte_index,
            shifted,
        })
    }

    /// Build an encoder and its item memory from a full configuration.
    pub fn from_config(cfg: &EncoderConfig) -> Result<(Self, ItemMemory)> {
        cfg.validate()?;
        let mut mem = ItemMemory::new(cfg.dim, cfg.domain, cfg.seed)?;
        let enc = SequenceEncoder::new(cfg.mode, cfg.n, &cfg.alphabet, cfg.tie, &mut mem)?;
        Ok((enc, mem))
    }

    pub fn with_policy(mut self, policy: UnknownSymbolPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn mode(&self) -> SequenceMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn symbol_hv(&self, symbol: &str) -> Option<&Hypervector> {
        self.index.get(symbol).map(|&i| &self.shifted[0][i])
    }

    /// Map symbols to alphabet indices; `None` marks a skipped unknown symbol.
    pub fn tokenize<S: AsRef<str>>(&self, seq: &[S]) -> Result<Vec<Option<usize>>> {
        seq.iter()
            .map(|s| match self.index.get(s.as_ref()) {
                Some(&i) => Ok(Some(i)),
                None if self.policy == UnknownSymbolPolicy::Skip => Ok(None),
                None => Err(HdcError::UnknownSymbol(s.as_ref().to_owned())),
            })
            .collect()
    }

    /// Tokenize a byte string whose symbols are single ASCII characters.
    pub fn tokenize_bytes(&self, seq: &[u8]) -> Result<Vec<Option<usize>>> {
        seq.iter()
            .map(|&b| match self.byte_index[b as usize] {
                Some(i) => Ok(Some(i)),
                None if self.policy == UnknownSymbolPolicy::Skip => Ok(None),
                None => Err(HdcError::UnknownSymbol((b as char).to_string())),
            })
            .collect()
    }

    pub fn encode<S: AsRef<str>>(&self, seq: &[S]) -> Result<Hypervector> {
        self.encode_tokens(&self.tokenize(seq)?)
    }

    pub fn encode_bytes(&self, seq: &[u8]) -> Result<Hypervector> {
        self.encode_tokens(&self.tokenize_bytes(seq)?)
    }

    fn check_length(&self, tokens: &[Option<usize>]) -> Result<()> {
        if tokens.is_empty() {
            return Err(HdcError::EmptySequence);
        }
        if self.mode == SequenceMode::NGram && tokens.len() < self.n {
            return Err(HdcError::SequenceShorterThanN {
                len: tokens.len(),
                n: self.n,
            });
        }
        Ok(())
    }

    pub fn encode_tokens(&self, tokens: &[Option<usize>]) -> Result<Hypervector> {
        self.check_length(tokens)?;
        match self.mode {
            SequenceMode::Bound => {
                let mut out: Option<Hypervector> = None;
                for (i, tok) in tokens.iter().enumerate() {
                    let Some(s) = tok else { continue };
                    let term = self.shifted[0][*s].permute(i as i64);
                    out = Some(match out {
                        None => term,
                        Some(acc) => acc.bind(&term)?,
                    });
                }
                out.ok_or(HdcError::EmptySequence)
            }
            _ => self.accumulate_tokens(tokens)?.bundle(self.tie),
        }
    }

    /// The n-gram hypervector of the window starting at `start`, or `None`
    /// if the window contains a skipped symbol.
    pub fn window_hv(&self, tokens: &[Option<usize>], start: usize) -> Result<Option<Hypervector>> {
        let mut out: Option<Hypervector> = None;
        for k in 0..self.n {
            let Some(s) = tokens[start + k] else { return Ok(None) };
            let term = &self.shifted[k][s];
            out = Some(match out {
                None => term.clone(),
                Some(acc) => acc.bind(term)?,
            });
        }
        Ok(out)
    }

    fn accumulate_range(&self, tokens: &[Option<usize>], range: std::ops::Range<usize>) -> Result<Accumulator> {
        if self.domain == Domain::Binary && self.mode == SequenceMode::NGram {
            return self.accumulate_binary_ngrams(tokens, range);
        }
        let mut acc = Accumulator::new(self.dim, self.domain)?;
        for j in range {
            match self.mode {
                SequenceMode::NGram => {
                    if let Some(g) = self.window_hv(tokens, j)? {
                        acc.add(&g)?;
                    }
                }
                _ => {
                    if let Some(s) = tokens[j] {
                        acc.add(&self.shifted[0][s].permute(j as i64))?;
                    }
                }
            }
        }
        Ok(acc)
    }

    /// Binary n-gram fast path: windows are XOR-ed into one reusable buffer
    /// and counted bit-sliced. Produces exactly the accumulator of the
    /// generic path.
    fn accumulate_binary_ngrams(&self, tokens: &[Option<usize>], range: std::ops::Range<usize>) -> Result<Accumulator> {
        let mut counter = BitCounter::new(self.dim)?;
        let mut window = vec![0u64; self.shifted[0][0].words().map_or(0, <[u64]>::len)];
        'windows: for j in range {
            for k in 0..self.n {
                let Some(s) = tokens[j + k] else { continue 'windows };
                let w = self.shifted[k][s].words().expect("binary symbol");
                if k == 0 {
                    window.copy_from_slice(w);
                } else {
                    window.iter_mut().zip(w).for_each(|(a, b)| *a ^= b);
                }
            }
            counter.add_words(&window);
        }
        Ok(counter.into_accumulator())
    }

    fn terms(&self, len: usize) -> usize {
        match self.mode {
            SequenceMode::NGram => len + 1 - self.n,
            _ => len,
        }
    }

    /// The un-normalized sum behind the bundled modes.
    pub fn accumulate_tokens(&self, tokens: &[Option<usize>]) -> Result<Accumulator> {
        if self.mode == SequenceMode::Bound {
            return Err(HdcError::InvalidConfig("bound mode does not bundle".into()));
        }
        self.check_length(tokens)?;
        let acc = self.accumulate_range(tokens, 0..self.terms(tokens.len()))?;
        if acc.is_empty() {
            return Err(HdcError::EmptySequence);
        }
        Ok(acc)
    }

    /// [`Self::accumulate_tokens`] split into fixed chunks of `chunk` terms
    /// that are summed on the rayon pool and merged in order. Binary and
    /// bipolar results equal the sequential accumulator exactly.
    pub fn accumulate_tokens_par(&self, tokens: &[Option<usize>], chunk: usize) -> Result<Accumulator> {
        if self.mode == SequenceMode::Bound {
            return Err(HdcError::InvalidConfig("bound mode does not bundle".into()));
        }
        self.check_length(tokens)?;
        let terms = self.terms(tokens.len());
        let chunk = chunk.max(1);
        let parts = (0..terms.div_ceil(chunk))
            .into_par_iter()
            .map(|c| self.accumulate_range(tokens, c * chunk..((c + 1) * chunk).min(terms)))
            .collect::<Result<Vec<_>>>()?;
        let mut acc = Accumulator::new(self.dim, self.domain)?;
        for p in &parts {
            acc.merge(p)?;
        }
        if acc.is_empty() {
            return Err(HdcError::EmptySequence);
        }
        Ok(acc)
    }
}
