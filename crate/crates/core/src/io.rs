//! Model files (JSON) and FRF export (CSV).
//!
//! Model files are UTF-8 JSON with a `format` tag distinguishing
//! state-space models from lumped systems. Numbers are serialized as
//! shortest round-trip decimals, so fixtures reload bit-exactly.
//!
//! FRF files are CSV with the header `freq_hz,output,input,real,imag`,
//! ordered frequency-major, then output, then input. DOF columns carry the
//! qualified `structure/name` form.

use std::path::Path;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::dof::DofLabel;
use crate::error::Error;
use crate::frf::{FrfMatrix, FrfQuantity};
use crate::lumped::{LumpedEdge, LumpedNode, LumpedSystem};
use crate::model::{OutputKind, StateSpaceModel};

/// Tagged on-disk representation.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "format")]
pub enum ModelFile {
    #[serde(rename = "state_space_model")]
    StateSpace(StateSpaceFile),
    #[serde(rename = "lumped_system")]
    Lumped(LumpedFile),
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StateSpaceFile {
    pub name: String,
    pub output_kind: OutputKind,
    pub quantity: FrfQuantity,
    #[serde(default)]
    pub coupling_form: bool,
    pub outputs: Vec<DofLabel>,
    pub inputs: Vec<DofLabel>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    pub d: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LumpedFile {
    pub name: String,
    pub nodes: Vec<LumpedNode<f64>>,
    #[serde(default)]
    pub edges: Vec<LumpedEdge<f64>>,
    #[serde(default)]
    pub interface_nodes: Vec<String>,
}

/// A loaded model file: either representation.
#[derive(Debug)]
pub enum LoadedModel {
    StateSpace(StateSpaceModel<f64>),
    Lumped(LumpedSystem<f64>),
}

fn rows_to_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>, Error> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    for (i, r) in rows.iter().enumerate() {
        if r.len() != ncols {
            return Err(Error::dims(
                format!("matrix {what} row {i}"),
                format!("{ncols} columns"),
                format!("{}", r.len()),
            ));
        }
    }
    Ok(DMatrix::from_row_iterator(
        nrows,
        ncols,
        rows.iter().flat_map(|r| r.iter().copied()),
    ))
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

impl StateSpaceFile {
    pub fn from_model(m: &StateSpaceModel<f64>) -> Self {
        StateSpaceFile {
            name: m.name().to_string(),
            output_kind: m.output_kind(),
            quantity: m.quantity(),
            coupling_form: m.is_coupling_form(),
            outputs: m.outputs().to_vec(),
            inputs: m.inputs().to_vec(),
            a: matrix_to_rows(m.a()),
            b: matrix_to_rows(m.b()),
            c: matrix_to_rows(m.c()),
            d: matrix_to_rows(m.d()),
        }
    }

    pub fn into_model(self) -> Result<StateSpaceModel<f64>, Error> {
        StateSpaceModel::new(
            self.name,
            rows_to_matrix(&self.a, "A")?,
            rows_to_matrix(&self.b, "B")?,
            rows_to_matrix(&self.c, "C")?,
            rows_to_matrix(&self.d, "D")?,
            self.output_kind,
            self.quantity,
            self.outputs,
            self.inputs,
            self.coupling_form,
        )
    }
}

impl LumpedFile {
    pub fn from_system(s: &LumpedSystem<f64>) -> Self {
        LumpedFile {
            name: s.name().to_string(),
            nodes: s.nodes().to_vec(),
            edges: s.edges().to_vec(),
            interface_nodes: s.interface_nodes().to_vec(),
        }
    }

    pub fn into_system(self) -> Result<LumpedSystem<f64>, Error> {
        LumpedSystem::new(self.name, self.nodes, self.edges, self.interface_nodes)
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_creating_dirs(path: &Path, text: &str) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| io_err(path, e))?;
        }
    }
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Loads a model file, validating all type invariants.
pub fn load_model(path: impl AsRef<Path>) -> Result<LoadedModel, Error> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let file: ModelFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        detail: format!("line {}, column {}: {}", e.line(), e.column(), e),
    })?;
    match file {
        ModelFile::StateSpace(f) => Ok(LoadedModel::StateSpace(f.into_model()?)),
        ModelFile::Lumped(f) => Ok(LoadedModel::Lumped(f.into_system()?)),
    }
}

/// Saves a state-space model as pretty-printed JSON.
pub fn save_state_space(path: impl AsRef<Path>, m: &StateSpaceModel<f64>) -> Result<(), Error> {
    let path = path.as_ref();
    let file = ModelFile::StateSpace(StateSpaceFile::from_model(m));
    let text = serde_json::to_string_pretty(&file).expect("serialization is infallible");
    write_creating_dirs(path, &text)
}

/// Saves a lumped system as pretty-printed JSON.
pub fn save_lumped(path: impl AsRef<Path>, s: &LumpedSystem<f64>) -> Result<(), Error> {
    let path = path.as_ref();
    let file = ModelFile::Lumped(LumpedFile::from_system(s));
    let text = serde_json::to_string_pretty(&file).expect("serialization is infallible");
    write_creating_dirs(path, &text)
}

/// Writes an FRF matrix as plot-ready CSV.
pub fn write_frf(path: impl AsRef<Path>, h: &FrfMatrix<f64>) -> Result<(), Error> {
    let path = path.as_ref();
    let mut out = String::from("freq_hz,output,input,real,imag\n");
    for (k, &w) in h.frequencies().iter().enumerate() {
        let f_hz = w / std::f64::consts::TAU;
        let m = h.at(k);
        for (i, ol) in h.outputs().iter().enumerate() {
            for (j, il) in h.inputs().iter().enumerate() {
                let z = m[(i, j)];
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    f_hz,
                    ol.qualified(),
                    il.qualified(),
                    z.re,
                    z.im
                ));
            }
        }
    }
    write_creating_dirs(path, &out)
}

/// Reads an FRF matrix written by [`write_frf`].
///
/// The CSV does not carry the quantity, so the caller states it.
pub fn read_frf(path: impl AsRef<Path>, quantity: FrfQuantity) -> Result<FrfMatrix<f64>, Error> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let parse = |detail: String| Error::Parse {
        path: path.display().to_string(),
        detail,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "freq_hz,output,input,real,imag" => {}
        other => {
            return Err(parse(format!(
                "expected header 'freq_hz,output,input,real,imag', got {:?}",
                other.map(|(_, h)| h)
            )))
        }
    }
    let dof_of = |q: &str| -> DofLabel {
        match q.split_once('/') {
            Some((s, n)) => DofLabel::internal(n, s),
            None => DofLabel::internal(q, ""),
        }
    };
    let mut freqs: Vec<f64> = Vec::new();
    let mut outputs: Vec<DofLabel> = Vec::new();
    let mut inputs: Vec<DofLabel> = Vec::new();
    let mut entries: Vec<(usize, DofLabel, DofLabel, Complex<f64>)> = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(parse(format!("line {}: expected 5 fields", lineno + 1)));
        }
        let f_hz: f64 = cols[0]
            .parse()
            .map_err(|e| parse(format!("line {}: bad frequency: {e}", lineno + 1)))?;
        let re: f64 = cols[3]
            .parse()
            .map_err(|e| parse(format!("line {}: bad real part: {e}", lineno + 1)))?;
        let im: f64 = cols[4]
            .parse()
            .map_err(|e| parse(format!("line {}: bad imaginary part: {e}", lineno + 1)))?;
        let w = f_hz * std::f64::consts::TAU;
        let fi = match freqs.iter().position(|&x| x == w) {
            Some(i) => i,
            None => {
                freqs.push(w);
                freqs.len() - 1
            }
        };
        let ol = dof_of(cols[1]);
        let il = dof_of(cols[2]);
        if !outputs.iter().any(|l| l.same_dof(&ol)) {
            outputs.push(ol.clone());
        }
        if !inputs.iter().any(|l| l.same_dof(&il)) {
            inputs.push(il.clone());
        }
        entries.push((fi, ol, il, Complex::new(re, im)));
    }
    if freqs.is_empty() {
        return Err(parse("no data rows".to_string()));
    }
    let mut data = vec![DMatrix::zeros(outputs.len(), inputs.len()); freqs.len()];
    let mut seen = vec![false; freqs.len() * outputs.len() * inputs.len()];
    for (fi, ol, il, z) in entries {
        let i = outputs.iter().position(|l| l.same_dof(&ol)).unwrap();
        let j = inputs.iter().position(|l| l.same_dof(&il)).unwrap();
        let flat = (fi * outputs.len() + i) * inputs.len() + j;
        if seen[flat] {
            return Err(parse(format!(
                "duplicate entry for ({}, {}, {})",
                freqs[fi] / std::f64::consts::TAU,
                ol.qualified(),
                il.qualified()
            )));
        }
        seen[flat] = true;
        data[fi][(i, j)] = z;
    }
    if seen.iter().any(|&s| !s) {
        return Err(parse("missing entries: file is not a full grid".to_string()));
    }
    FrfMatrix::new(freqs, data, quantity, outputs, inputs)
}
