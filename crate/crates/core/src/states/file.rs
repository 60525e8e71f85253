//! Density-matrix file format.
//!
//! A JSON document with two fields:
//!
//! ```json
//! { "n": 2,
//!   "entries": [[0.25, 0.0], [0.0, 0.0], ...] }
//! ```
//!
//! `n` is the qubit count and `entries` lists the `4^n` matrix entries in
//! row-major order, each as a `[real, imaginary]` pair. Basis indices follow
//! the crate-wide ordering (qubit 1 is the most significant bit). Unknown
//! fields are rejected.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DensityMatrix, QubitCount};
use crate::{Error, Result, C64};

/// Validation tolerance applied to matrices read from files.
pub const FILE_TOLERANCE: f64 = 1e-8;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDocument {
    n: usize,
    entries: Vec<[f64; 2]>,
}

pub fn read_density_matrix<R: Read>(reader: R) -> Result<DensityMatrix> {
    let doc: MatrixDocument =
        serde_json::from_reader(reader).map_err(|e| Error::Parse(e.to_string()))?;
    let n = QubitCount::new(doc.n).map_err(|e| Error::Parse(e.to_string()))?;
    let d = n.dim();
    if doc.entries.len() != d * d {
        return Err(Error::Parse(format!(
            "n = {} needs {} entries, found {}",
            doc.n,
            d * d,
            doc.entries.len()
        )));
    }
    let entries = doc.entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
    DensityMatrix::with_tolerance(n, entries, FILE_TOLERANCE)
}

pub fn load_density_matrix(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    read_density_matrix(BufReader::new(File::open(path)?))
}

pub fn write_density_matrix<W: Write>(rho: &DensityMatrix, writer: W) -> Result<()> {
    let doc = MatrixDocument {
        n: rho.qubits().get(),
        entries: rho.entries().iter().map(|z| [z.re, z.im]).collect(),
    };
    serde_json::to_writer(writer, &doc).map_err(|e| Error::Parse(e.to_string()))
}
