//! Operator files and run reports for the CLI.
//!
//! An operator file is a single self-describing JSON document per object:
//! explicit dims, complex entries as `[re, im]` pairs, a `kind` tag, and a
//! free-form metadata map. POVMs carry a list of matrices instead of one.
//! Reports record input hashes and the full configuration so that reruns can
//! be verified bit-for-bit.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::linalg::{CMat, OperatorMatrix, C64};
use crate::objects::{BinaryObservable, Effect, Povm, QuantumState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    State,
    Effect,
    Observable,
    Povm,
}

/// Complex matrix encoded as rows of `[re, im]` pairs.
pub type MatrixEntries = Vec<Vec<[f64; 2]>>;

/// On-disk representation of a validated quantum object.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorFile {
    pub kind: OperatorKind,
    pub dims: (usize, usize),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixEntries>,
    /// POVM elements, in outcome order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<MatrixEntries>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

fn entries_to_matrix(entries: &MatrixEntries, dim: usize) -> Result<CMat> {
    if entries.len() != dim || entries.iter().any(|row| row.len() != dim) {
        return Err(Error::Format(format!(
            "matrix is not {dim}x{dim} as declared by dims"
        )));
    }
    Ok(CMat::from_fn(dim, dim, |i, j| {
        C64::new(entries[i][j][0], entries[i][j][1])
    }))
}

fn matrix_to_entries(mat: &CMat) -> MatrixEntries {
    (0..mat.nrows())
        .map(|i| {
            (0..mat.ncols())
                .map(|j| [mat[(i, j)].re, mat[(i, j)].im])
                .collect()
        })
        .collect()
}

impl OperatorFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn total_dim(&self) -> usize {
        self.dims.0 * self.dims.1
    }

    fn single_matrix(&self) -> Result<OperatorMatrix> {
        let entries = self
            .matrix
            .as_ref()
            .ok_or_else(|| Error::Format("missing 'matrix' field".into()))?;
        let mat = entries_to_matrix(entries, self.total_dim())?;
        OperatorMatrix::with_split(mat, self.dims.0, self.dims.1)
    }

    pub fn into_state(&self) -> Result<QuantumState> {
        if self.kind != OperatorKind::State {
            return Err(Error::Format(format!(
                "kind {:?} is not a state",
                self.kind
            )));
        }
        QuantumState::new(self.single_matrix()?)
    }

    pub fn into_effect(&self) -> Result<Effect> {
        if !matches!(self.kind, OperatorKind::Effect | OperatorKind::Observable) {
            return Err(Error::Format(format!(
                "kind {:?} is not an effect",
                self.kind
            )));
        }
        Effect::new(self.single_matrix()?)
    }

    /// Observable files store the +1 effect; the -1 element is its
    /// complement.
    pub fn into_observable(&self) -> Result<BinaryObservable> {
        Ok(BinaryObservable::from_effect(self.into_effect()?))
    }

    pub fn into_povm(&self) -> Result<Povm> {
        if self.kind != OperatorKind::Povm {
            return Err(Error::Format(format!("kind {:?} is not a povm", self.kind)));
        }
        let mats = self
            .matrices
            .as_ref()
            .ok_or_else(|| Error::Format("missing 'matrices' field".into()))?;
        let dim = self.total_dim();
        let effects = mats
            .iter()
            .map(|m| {
                let mat = entries_to_matrix(m, dim)?;
                Effect::new(OperatorMatrix::with_split(mat, self.dims.0, self.dims.1)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Povm::new(effects)
    }

    pub fn from_state(state: &QuantumState, dims: (usize, usize)) -> Self {
        Self {
            kind: OperatorKind::State,
            dims,
            matrix: Some(matrix_to_entries(state.op().mat())),
            matrices: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn from_effect(effect: &Effect, dims: (usize, usize), kind: OperatorKind) -> Self {
        Self {
            kind,
            dims,
            matrix: Some(matrix_to_entries(effect.op().mat())),
            matrices: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn from_povm(povm: &Povm, dims: (usize, usize)) -> Self {
        Self {
            kind: OperatorKind::Povm,
            dims,
            matrix: None,
            matrices: Some(
                povm.effects()
                    .iter()
                    .map(|e| matrix_to_entries(e.op().mat()))
                    .collect(),
            ),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_metadata(mut self, key: &str, value: &str) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }
}

/// SHA-256 of a file's bytes, hex encoded.
pub fn file_sha256(path: impl AsRef<Path>) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

/// Machine-readable record of one CLI invocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<InputRecord>,
    pub config: serde_json::Value,
    pub results: serde_json::Value,
    pub version: String,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs: Vec::new(),
            config: serde_json::Value::Null,
            results: serde_json::Value::Null,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn add_input(&mut self, path: impl AsRef<Path>) -> Result<()> {
        self.inputs.push(InputRecord {
            path: path.as_ref().display().to_string(),
            sha256: file_sha256(&path)?,
        });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objects::bell_projectors;
    use crate::teleport::bell_povm;

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("phi_minus.json");
        let eff = bell_projectors()[1].clone();
        OperatorFile::from_effect(&eff, (2, 2), OperatorKind::Effect)
            .save(&path)
            .unwrap();
        let loaded = OperatorFile::load(&path).unwrap().into_effect().unwrap();
        let dev = loaded.op().sub(eff.op()).unwrap().max_entry_norm();
        assert!(dev <= 1e-15);

        let path = dir.path().join("bell_povm.json");
        OperatorFile::from_povm(&bell_povm(), (2, 2))
            .save(&path)
            .unwrap();
        let loaded = OperatorFile::load(&path).unwrap().into_povm().unwrap();
        for (a, b) in loaded.effects().iter().zip(bell_povm().effects()) {
            assert!(a.op().sub(b.op()).unwrap().max_entry_norm() <= 1e-15);
        }
    }

    #[test]
    fn malformed_dims_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(
            &path,
            r#"{"kind":"effect","dims":[2,2],"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#,
        )
        .unwrap();
        let file = OperatorFile::load(&path).unwrap();
        assert!(matches!(file.into_effect(), Err(Error::Format(_))));
    }

    #[test]
    fn kind_mismatch_rejected() {
        let f = OperatorFile::from_effect(&bell_projectors()[0], (2, 2), OperatorKind::Effect);
        assert!(f.into_state().is_err());
        assert!(f.into_povm().is_err());
        assert!(f.into_effect().is_ok());
    }
}
