//! Residue alphabets and the handling of IUPAC ambiguity codes.

use clap::ValueEnum;
use hdc_core::encoders::UnknownSymbolPolicy;
use hdc_core::seed;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Alphabet {
    Dna,
    Rna,
    Protein,
}

/// How ambiguity codes (`N`, `R`, `X`, ...) are encoded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AmbiguityPolicy {
    /// Drop every n-gram (or position) that touches an ambiguous residue.
    #[default]
    Skip,
    /// Replace each ambiguous residue by a seeded random compatible residue.
    Random,
    /// Encode every ambiguous residue as one extra wildcard symbol.
    Symbol,
}

const DNA: &[u8] = b"ACGT";
const RNA: &[u8] = b"ACGU";
const PROTEIN: &[u8] = b"ACDEFGHIKLMNPQRSTVWY";

#[derive(Debug, Error, PartialEq, Eq)]
#[error("record `{id}`: residue {residue:?} at position {position} is not valid {alphabet:?}")]
pub struct ResidueError {
    pub id: String,
    pub residue: char,
    pub position: usize,
    pub alphabet: Alphabet,
}

impl Alphabet {
    /// The unambiguous residues, in codebook order.
    pub fn residues(self) -> &'static [u8] {
        match self {
            Alphabet::Dna => DNA,
            Alphabet::Rna => RNA,
            Alphabet::Protein => PROTEIN,
        }
    }

    /// Symbol standing for any ambiguous residue under [`AmbiguityPolicy::Symbol`].
    pub fn wildcard(self) -> u8 {
        match self {
            Alphabet::Protein => b'X',
            _ => b'N',
        }
    }

    /// Residues an (uppercase) ambiguity code may stand for; `None` for
    /// unambiguous or invalid residues.
    pub fn expand(self, code: u8) -> Option<&'static [u8]> {
        let nucleotide = |t: &'static [u8], u: &'static [u8]| if self == Alphabet::Rna { u } else { t };
        match (self, code) {
            (Alphabet::Protein, b'B') => Some(b"DN"),
            (Alphabet::Protein, b'Z') => Some(b"EQ"),
            (Alphabet::Protein, b'J') => Some(b"IL"),
            (Alphabet::Protein, b'U') => Some(b"C"),
            (Alphabet::Protein, b'O') => Some(b"K"),
            (Alphabet::Protein, b'X') => Some(PROTEIN),
            (Alphabet::Protein, _) => None,
            (_, b'R') => Some(b"AG"),
            (_, b'Y') => Some(nucleotide(b"CT", b"CU")),
            (_, b'S') => Some(b"CG"),
            (_, b'W') => Some(nucleotide(b"AT", b"AU")),
            (_, b'K') => Some(nucleotide(b"GT", b"GU")),
            (_, b'M') => Some(b"AC"),
            (_, b'B') => Some(nucleotide(b"CGT", b"CGU")),
            (_, b'D') => Some(nucleotide(b"AGT", b"AGU")),
            (_, b'H') => Some(nucleotide(b"ACT", b"ACU")),
            (_, b'V') => Some(b"ACG"),
            (_, b'N') => Some(self.residues()),
            _ => None,
        }
    }
}

/// Turns raw FASTA residues into encoder symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueConfig {
    pub alphabet: Alphabet,
    pub ambiguity: AmbiguityPolicy,
}

impl ResidueConfig {
    /// Encoder alphabet: the residues plus the wildcard under the symbol policy.
    pub fn symbols(&self) -> Vec<String> {
        let mut out: Vec<String> = self.alphabet.residues().iter().map(|&b| (b as char).to_string()).collect();
        if self.ambiguity == AmbiguityPolicy::Symbol {
            out.push((self.alphabet.wildcard() as char).to_string());
        }
        out
    }

    pub fn unknown_policy(&self) -> UnknownSymbolPolicy {
        match self.ambiguity {
            AmbiguityPolicy::Skip => UnknownSymbolPolicy::Skip,
            _ => UnknownSymbolPolicy::Error,
        }
    }

    /// Uppercase, drop one trailing stop `*` (protein), validate, and resolve
    /// ambiguity codes. Under the skip policy ambiguous residues are kept and
    /// later skipped by the encoder; under the random policy the choice is
    /// seeded by `(seed, id)` and therefore independent of scheduling.
    pub fn prepare(&self, id: &str, raw: &[u8], seed: u64) -> Result<Vec<u8>, ResidueError> {
        let mut seq = raw.to_ascii_uppercase();
        if self.alphabet == Alphabet::Protein && seq.last() == Some(&b'*') {
            seq.pop();
        }
        let mut rng = None;
        for (position, b) in seq.iter_mut().enumerate() {
            if self.alphabet.residues().contains(b) {
                continue;
            }
            let Some(choices) = self.alphabet.expand(*b) else {
                return Err(ResidueError {
                    id: id.to_owned(),
                    residue: *b as char,
                    position: position + 1,
                    alphabet: self.alphabet,
                });
            };
            match self.ambiguity {
                AmbiguityPolicy::Skip => {}
                AmbiguityPolicy::Symbol => *b = self.alphabet.wildcard(),
                AmbiguityPolicy::Random => {
                    let rng = rng.get_or_insert_with(|| seed::rng_for(seed, "ambiguity", id));
                    *b = choices[rng.random_range(0..choices.len())];
                }
            }
        }
        Ok(seq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(alphabet: Alphabet, ambiguity: AmbiguityPolicy) -> ResidueConfig {
        ResidueConfig { alphabet, ambiguity }
    }

    #[test]
    fn policies() {
        let skip = cfg(Alphabet::Dna, AmbiguityPolicy::Skip);
        assert_eq!(skip.prepare("r", b"acgN", 1).unwrap(), b"ACGN");
        let sym = cfg(Alphabet::Dna, AmbiguityPolicy::Symbol);
        assert_eq!(sym.prepare("r", b"ACRY", 1).unwrap(), b"ACNN");
        assert_eq!(sym.symbols(), ["A", "C", "G", "T", "N"]);
        let rnd = cfg(Alphabet::Dna, AmbiguityPolicy::Random);
        let a = rnd.prepare("r", b"RRRRRRRRRRRRRRRRNNNN", 1).unwrap();
        assert_eq!(a, rnd.prepare("r", b"RRRRRRRRRRRRRRRRNNNN", 1).unwrap());
        assert!(a[..16].iter().all(|b| b"AG".contains(b)));
        assert!(a[..16].contains(&b'A') && a[..16].contains(&b'G'));
    }

    #[test]
    fn invalid_residues_are_reported() {
        let e = cfg(Alphabet::Dna, AmbiguityPolicy::Skip).prepare("r7", b"ACGU", 0).unwrap_err();
        assert_eq!((e.residue, e.position), ('U', 4));
        let rna = cfg(Alphabet::Rna, AmbiguityPolicy::Random).prepare("r", b"ACGUY", 0).unwrap();
        assert!(b"CU".contains(&rna[4]));
        let p = cfg(Alphabet::Protein, AmbiguityPolicy::Skip);
        assert_eq!(p.prepare("p", b"MKV*", 0).unwrap(), b"MKV");
        assert!(p.prepare("p", b"MK*V", 0).is_err());
    }
}
