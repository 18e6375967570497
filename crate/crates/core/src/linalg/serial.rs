use serde::{Deserialize, Serialize};

use super::{c64, CMatrix};
use crate::error::{Error, Result};

/// JSON form of a complex matrix: row-major rows of `[re, im]` pairs plus the
/// subsystem dimension list.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    pub data: Vec<Vec<[f64; 2]>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix, dims: Option<Vec<usize>>) -> Self {
        let data = (0..m.nrows())
            .map(|i| {
                (0..m.ncols())
                    .map(|j| [m[(i, j)].re, m[(i, j)].im])
                    .collect()
            })
            .collect();
        Self { dims, data }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let rows = self.data.len();
        let cols = self.data.first().map_or(0, |r| r.len());
        if self.data.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        if let Some(dims) = &self.dims {
            let total: usize = dims.iter().product();
            if total != rows {
                return Err(Error::DimensionMismatch(format!(
                    "dims {dims:?} imply {total} rows, found {rows}"
                )));
            }
        }
        Ok(CMatrix::from_fn(rows, cols, |i, j| {
            let [re, im] = self.data[i][j];
            c64(re, im)
        }))
    }
}
