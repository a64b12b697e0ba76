//! Encoders for composite objects: sequences, key-value records, sets,
//! numeric vectors (random projection) and graphs.

mod graph;
mod projection;
mod record;
mod sequence;

use serde::{Deserialize, Serialize};

pub use graph::{edge_hv, encode_graph, GraphEncoderConfig};
pub use projection::{project_vector, PostProcess, ProjectionConfig, ProjectionDistribution, RandomProjection};
pub use record::{
    correlated_keys, encode_record, encode_set, query_record, set_contains, set_similarity,
};
pub use sequence::{SequenceEncoder, SequenceMode, UnknownSymbolPolicy};

use crate::error::{HdcError, Result};
use crate::hv::{Domain, TieRule};
use crate::item_memory::LevelEncoderConfig;

/// Everything needed to reproduce an encoding: the provenance record stored
/// with models and hypervector containers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub dim: usize,
    pub domain: Domain,
    pub mode: SequenceMode,
    /// n-gram (k-mer) length; ignored by the positional modes.
    pub n: usize,
    pub alphabet: Vec<String>,
    pub seed: u64,
    pub tie: TieRule,
    #[serde(default)]
    pub levels: Option<LevelEncoderConfig>,
}

impl EncoderConfig {
    pub fn new(dim: usize, domain: Domain, mode: SequenceMode, n: usize, alphabet: Vec<String>, seed: u64) -> Self {
        EncoderConfig {
            dim,
            domain,
            mode,
            n,
            alphabet,
            seed,
            tie: TieRule::SeededRandom(seed),
            levels: None,
        }
    }

    /// Alphabet of single-character symbols.
    pub fn alphabet_from_chars(chars: &str) -> Vec<String> {
        chars.chars().map(String::from).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(HdcError::ZeroDimension);
        }
        if self.n == 0 {
            return Err(HdcError::InvalidConfig("n must be at least 1".into()));
        }
        if self.alphabet.is_empty() {
            return Err(HdcError::InvalidConfig("alphabet is empty".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for s in &self.alphabet {
            if !seen.insert(s) {
                return Err(HdcError::InvalidConfig(format!("duplicate alphabet symbol `{s}`")));
            }
        }
        if let Some(levels) = &self.levels {
            levels.validate(self.dim)?;
        }
        Ok(())
    }
}
