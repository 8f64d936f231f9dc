//! JSON matrix file format:
//! `{"rows": r, "cols": c, "data": [[[re, im], ...], ...]}`, row-major.

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{c64, CMatrix};
use crate::error::{Error, Result};

/// On-disk representation of a [`CMatrix`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let data = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect())
            .collect();
        MatrixFile { rows: m.rows(), cols: m.cols(), data }
    }

    pub fn into_matrix(self) -> Result<CMatrix> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Parse(format!("matrix dimensions must be positive, got {}x{}", self.rows, self.cols)));
        }
        if self.data.len() != self.rows {
            return Err(Error::Parse(format!("declared {} rows but data has {}", self.rows, self.data.len())));
        }
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for (i, row) in self.data.iter().enumerate() {
            if row.len() != self.cols {
                return Err(Error::Parse(format!("row {i} has {} entries, expected {}", row.len(), self.cols)));
            }
            for (j, &[re, im]) in row.iter().enumerate() {
                if !(re.is_finite() && im.is_finite()) {
                    return Err(Error::Parse(format!("non-finite entry at ({i}, {j})")));
                }
                entries.push(c64(re, im));
            }
        }
        CMatrix::from_row_major(self.rows, self.cols, entries)
    }
}

impl CMatrix {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&MatrixFile::from_matrix(self)).expect("matrix serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MatrixFile = serde_json::from_str(text)?;
        file.into_matrix()
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixFile::from_matrix(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let file = MatrixFile::deserialize(deserializer)?;
        file.into_matrix().map_err(serde::de::Error::custom)
    }
}
