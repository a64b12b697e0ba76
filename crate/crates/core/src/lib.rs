//! Hyperdimensional computing over binary, bipolar and real hypervectors.
//!
//! * [`hv`]: hypervectors, accumulators, bundling, binding and permutation
//! * [`similarity`]: Hamming, Jaccard and cosine with random baselines
//! * [`item_memory`]: seeded symbol codebooks and level encoding of scalars
//! * [`encoders`]: sequences, records, sets, random projections and graphs
//! * [`learn`]: prototype classification with retraining
//! * [`assoc_memory`]: cleanup memory for nearest-neighbor recovery
//! * [`container`]: versioned binary files for collections and models

pub mod assoc_memory;
pub mod container;
pub mod encoders;
pub mod error;
pub mod hv;
pub mod item_memory;
pub mod learn;
mod popcount;
pub mod seed;
pub mod similarity;
pub mod synth;

pub use assoc_memory::AssocMemory;
pub use container::HvCollection;
pub use encoders::{EncoderConfig, SequenceEncoder, SequenceMode};
pub use error::{HdcError, Result};
pub use hv::{bundle, Accumulator, Domain, Hypervector, RealScaling, TieRule, DEFAULT_DIM};
pub use item_memory::{ItemMemory, LevelEncoder, LevelEncoderConfig};
pub use learn::{Model, Prediction, TrainConfig};
pub use similarity::{similarity, top_k, Metric, SimilarityReport};
