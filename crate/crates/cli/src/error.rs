use std::path::PathBuf;

use hdc_core::HdcError;
use thiserror::Error;

use crate::fasta::FastaError;
use crate::residues::ResidueError;

pub type Result<T> = std::result::Result<T, CliError>;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const INTERNAL: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Fasta { path: PathBuf, source: FastaError },
    #[error(transparent)]
    Residue(#[from] ResidueError),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: HdcError },
    #[error("record `{id}`: {source}")]
    Record { id: String, source: HdcError },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] HdcError),
    #[error("{0}")]
    Internal(String),
}

/// Input problems (bad files, bad records) vs configuration problems (bad
/// flags, incompatible versions) vs broken invariants.
fn core_code(e: &HdcError) -> i32 {
    use HdcError::*;
    match e {
        VersionMismatch { .. } | KindMismatch { .. } | InvalidConfig(_) | ZeroDimension | ZeroK
        | WrongDomainForMetric { .. } => exit::CONFIG,
        BadMagic | ChecksumMismatch { .. } | CorruptContainer(_) | Io(_) | Json(_) | UnknownSymbol(_)
        | EmptySequence | SequenceShorterThanN { .. } | EmptyBundle | SingleClass | EmptyClass(_)
        | UnknownLabel(_) | DuplicateLabel(_) | EmptyMemory | ZeroNorm | BothAllZero => exit::INPUT,
        _ => exit::INTERNAL,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Fasta { .. } | CliError::Residue(_) | CliError::Input(_) | CliError::Record { .. } => exit::INPUT,
            CliError::Config(_) => exit::CONFIG,
            CliError::File { source, .. } | CliError::Core(source) => core_code(source),
            CliError::Internal(_) => exit::INTERNAL,
        }
    }
}
