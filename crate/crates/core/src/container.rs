//! Versioned binary container for hypervector collections and models.
//!
//! Layout (all integers little-endian):
//!
//! | bytes | field |
//! |-------|-------|
//! | 4     | magic `HDCV` |
//! | 2     | format version (currently 1) |
//! | 1     | kind: 1 = collection, 2 = model |
//! | 1     | reserved, 0 |
//! | 4     | header length `h` |
//! | h     | JSON header |
//! | 8     | payload length `p` |
//! | p     | raw payload |
//! | 4     | CRC-32 (IEEE) of every preceding byte |
//!
//! The header is self-describing (dimension, domain, encoder config, seeds,
//! labels). Payload elements are packed per domain: binary as `u64` words,
//! bipolar as `i8`, real and prototype counts as `f64`.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::assoc_memory::AssocMemory;
use crate::encoders::EncoderConfig;
use crate::error::{HdcError, Result};
use crate::hv::{words_for, Domain, Elements, Hypervector};
use crate::item_memory::{Derivation, ItemMemory};
use crate::learn::{Model, Prototype, TrainingMeta};

pub const MAGIC: &[u8; 4] = b"HDCV";
pub const FORMAT_VERSION: u16 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Kind {
    Collection = 1,
    Model = 2,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Collection => "collection",
            Kind::Model => "model",
        }
    }
}

/// Labeled hypervectors plus the configuration that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct HvCollection {
    pub dim: usize,
    pub domain: Domain,
    pub encoder: Option<EncoderConfig>,
    /// Free-form run metadata (for example the resolved command line).
    pub meta: Value,
    pub entries: Vec<(String, Hypervector)>,
}

#[derive(Serialize, Deserialize)]
struct CollectionHeader {
    format_version: u16,
    kind: String,
    dim: usize,
    domain: Domain,
    count: usize,
    labels: Vec<String>,
    encoder: Option<EncoderConfig>,
    meta: Value,
}

#[derive(Serialize, Deserialize)]
struct MemoryEntry {
    symbol: String,
    derivation: Derivation,
}

#[derive(Serialize, Deserialize)]
struct ModelHeader {
    format_version: u16,
    kind: String,
    dim: usize,
    domain: Domain,
    encoder: EncoderConfig,
    training_meta: TrainingMeta,
    classes: Vec<String>,
    item_memory_seed: u64,
    item_memory: Vec<MemoryEntry>,
    meta: Value,
}

fn hv_bytes(dim: usize, domain: Domain) -> usize {
    match domain {
        Domain::Binary => words_for(dim) * 8,
        Domain::Bipolar => dim,
        Domain::Real => dim * 8,
    }
}

fn put_hv(out: &mut Vec<u8>, hv: &Hypervector) {
    match hv.elements() {
        Elements::Binary(w) => w.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        Elements::Bipolar(v) => out.extend(v.iter().map(|&x| x as u8)),
        Elements::Real(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
    }
}

fn get_hv(bytes: &[u8], dim: usize, domain: Domain) -> Result<Hypervector> {
    match domain {
        Domain::Binary => Hypervector::from_words(
            dim,
            bytes
                .chunks_exact(8)
                .map(|c| u64::from_le_bytes(c.try_into().expect("8-byte chunk")))
                .collect(),
        ),
        Domain::Bipolar => Hypervector::from_bipolar(bytes.iter().map(|&b| b as i8).collect()),
        Domain::Real => Hypervector::from_real(f64s(bytes)),
    }
    .map_err(|e| HdcError::CorruptContainer(format!("bad hypervector payload: {e}")))
}

fn f64s(bytes: &[u8]) -> Vec<f64> {
    bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect()
}

fn frame(kind: Kind, header: &[u8], payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + header.len() + payload.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(kind as u8);
    out.push(0);
    out.extend_from_slice(&(header.len() as u32).to_le_bytes());
    out.extend_from_slice(header);
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(payload);
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

/// Validate framing and checksum; returns `(header, payload)`.
fn unframe(bytes: &[u8], expected: Kind) -> Result<(&[u8], &[u8])> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(HdcError::BadMagic);
    }
    if bytes.len() < 24 {
        return Err(HdcError::CorruptContainer("truncated".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(HdcError::VersionMismatch {
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().expect("4 bytes"));
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(HdcError::ChecksumMismatch { stored, computed });
    }
    let kind = bytes[6];
    if kind != expected as u8 {
        let found = match kind {
            1 => "collection".to_owned(),
            2 => "model".to_owned(),
            k => format!("unknown ({k})"),
        };
        return Err(HdcError::KindMismatch {
            expected: expected.name().into(),
            found,
        });
    }
    let hlen = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let hend = 12usize
        .checked_add(hlen)
        .filter(|&e| e + 8 <= body.len())
        .ok_or_else(|| HdcError::CorruptContainer("header length out of bounds".into()))?;
    let plen = u64::from_le_bytes(body[hend..hend + 8].try_into().expect("8 bytes")) as usize;
    if hend + 8 + plen != body.len() {
        return Err(HdcError::CorruptContainer("payload length mismatch".into()));
    }
    Ok((&body[12..hend], &body[hend + 8..]))
}

/// Read just the container kind, after validating magic and version.
pub fn peek_kind(bytes: &[u8]) -> Result<Kind> {
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return Err(HdcError::BadMagic);
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(HdcError::VersionMismatch {
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    match bytes[6] {
        1 => Ok(Kind::Collection),
        2 => Ok(Kind::Model),
        k => Err(HdcError::CorruptContainer(format!("unknown kind {k}"))),
    }
}

impl HvCollection {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let header = CollectionHeader {
            format_version: FORMAT_VERSION,
            kind: Kind::Collection.name().into(),
            dim: self.dim,
            domain: self.domain,
            count: self.entries.len(),
            labels: self.entries.iter().map(|(l, _)| l.clone()).collect(),
            encoder: self.encoder.clone(),
            meta: self.meta.clone(),
        };
        let mut payload = Vec::with_capacity(self.entries.len() * hv_bytes(self.dim, self.domain));
        for (_, hv) in &self.entries {
            if hv.dim() != self.dim || hv.domain() != self.domain {
                return Err(HdcError::DimensionMismatch {
                    expected: self.dim,
                    found: hv.dim(),
                });
            }
            put_hv(&mut payload, hv);
        }
        Ok(frame(Kind::Collection, &serde_json::to_vec(&header)?, &payload))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (header, payload) = unframe(bytes, Kind::Collection)?;
        let h: CollectionHeader = serde_json::from_slice(header)?;
        if h.format_version != FORMAT_VERSION {
            return Err(HdcError::VersionMismatch {
                found: h.format_version,
                supported: FORMAT_VERSION,
            });
        }
        let size = hv_bytes(h.dim, h.domain);
        if h.labels.len() != h.count || payload.len() != h.count * size {
            return Err(HdcError::CorruptContainer("entry count does not match payload".into()));
        }
        let entries = h
            .labels
            .into_iter()
            .zip(payload.chunks_exact(size.max(1)))
            .map(|(label, chunk)| Ok((label, get_hv(chunk, h.dim, h.domain)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(HvCollection {
            dim: h.dim,
            domain: h.domain,
            encoder: h.encoder,
            meta: h.meta,
            entries,
        })
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&self.to_bytes()?)?;
        Ok(())
    }

    pub fn read<R: Read>(mut r: R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

impl AssocMemory {
    pub fn to_collection(&self, encoder: Option<EncoderConfig>, meta: Value) -> HvCollection {
        HvCollection {
            dim: self.dim(),
            domain: self.domain(),
            encoder,
            meta,
            entries: self.entries().to_vec(),
        }
    }

    pub fn from_collection(c: &HvCollection) -> Result<Self> {
        let mut mem = AssocMemory::new(c.dim, c.domain);
        for (label, hv) in &c.entries {
            mem.store(label, hv.clone())?;
        }
        Ok(mem)
    }
}

impl Model {
    pub fn to_bytes(&self, meta: &Value) -> Result<Vec<u8>> {
        let mem = self.item_memory();
        let header = ModelHeader {
            format_version: FORMAT_VERSION,
            kind: Kind::Model.name().into(),
            dim: self.dim(),
            domain: self.encoder_config().domain,
            encoder: self.encoder_config().clone(),
            training_meta: self.training_meta().clone(),
            classes: self.labels().into_iter().map(String::from).collect(),
            item_memory_seed: mem.global_seed(),
            item_memory: mem
                .entries()
                .map(|(s, _, d)| MemoryEntry {
                    symbol: s.to_owned(),
                    derivation: d.clone(),
                })
                .collect(),
            meta: meta.clone(),
        };
        let mut payload = Vec::new();
        for (_, p) in self.classes() {
            p.counts().iter().for_each(|x| payload.extend_from_slice(&x.to_le_bytes()));
        }
        for (_, hv, _) in mem.entries() {
            put_hv(&mut payload, hv);
        }
        Ok(frame(Kind::Model, &serde_json::to_vec(&header)?, &payload))
    }

    /// Decode a model; the cached normalized prototypes are recomputed from
    /// the stored counts.
    pub fn from_bytes(bytes: &[u8]) -> Result<(Model, Value)> {
        let (header, payload) = unframe(bytes, Kind::Model)?;
        let h: ModelHeader = serde_json::from_slice(header)?;
        if h.format_version != FORMAT_VERSION {
            return Err(HdcError::VersionMismatch {
                found: h.format_version,
                supported: FORMAT_VERSION,
            });
        }
        if h.dim != h.encoder.dim || h.domain != h.encoder.domain {
            return Err(HdcError::CorruptContainer("header disagrees with encoder config".into()));
        }
        let proto_bytes = h.dim * 8;
        let mem_bytes = hv_bytes(h.dim, h.domain);
        if payload.len() != h.classes.len() * proto_bytes + h.item_memory.len() * mem_bytes {
            return Err(HdcError::CorruptContainer("payload size does not match header".into()));
        }
        let (protos, rest) = payload.split_at(h.classes.len() * proto_bytes);
        let mut classes = BTreeMap::new();
        for (label, chunk) in h.classes.into_iter().zip(protos.chunks_exact(proto_bytes)) {
            classes.insert(label, Prototype::from_counts(f64s(chunk))?);
        }
        let mut mem = ItemMemory::new(h.dim, h.domain, h.item_memory_seed)?;
        for (entry, chunk) in h.item_memory.into_iter().zip(rest.chunks_exact(mem_bytes.max(1))) {
            mem.insert_raw(&entry.symbol, get_hv(chunk, h.dim, h.domain)?, entry.derivation)?;
        }
        Ok((Model::from_parts(classes, h.encoder, mem, h.training_meta)?, h.meta))
    }

    pub fn save(&self, path: &Path, meta: &Value) -> Result<()> {
        std::fs::write(path, self.to_bytes(meta)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<(Model, Value)> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}
