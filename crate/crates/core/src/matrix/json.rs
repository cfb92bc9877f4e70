//! Matrix JSON format: `{"rows": r, "cols": c, "data": [[re, im], ...]}`
//! with entries in row-major order.

use serde::{Deserialize, Serialize};

use super::{ComplexMatrix, Hermitian, PositiveDefinite};
use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("matrix JSON serializes")
    }

    pub fn to_complex<T: Real>(&self) -> Result<ComplexMatrix<T>> {
        let entries = self
            .data
            .iter()
            .map(|&[re, im]| {
                if !(re.is_finite() && im.is_finite()) {
                    return Err(Error::NonFiniteEntry);
                }
                Ok(Complex::new(T::lit(re), T::lit(im)))
            })
            .collect::<Result<Vec<_>>>()?;
        ComplexMatrix::from_row_major(self.rows, self.cols, entries)
    }

    pub fn to_hermitian<T: Real>(&self) -> Result<Hermitian<T>> {
        Hermitian::new(self.to_complex()?)
    }

    pub fn to_pd<T: Real>(&self) -> Result<PositiveDefinite<T>> {
        PositiveDefinite::new(self.to_hermitian()?)
    }
}

impl<T: Real> From<&ComplexMatrix<T>> for MatrixJson {
    fn from(m: &ComplexMatrix<T>) -> Self {
        let a = m.as_matrix();
        let data = (0..a.nrows())
            .flat_map(|i| (0..a.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| [a[(i, j)].re.as_f64(), a[(i, j)].im.as_f64()])
            .collect();
        MatrixJson {
            rows: a.nrows(),
            cols: a.ncols(),
            data,
        }
    }
}

impl<T: Real> From<&Hermitian<T>> for MatrixJson {
    fn from(m: &Hermitian<T>) -> Self {
        MatrixJson::from(&m.to_complex())
    }
}

impl<T: Real> From<&PositiveDefinite<T>> for MatrixJson {
    fn from(m: &PositiveDefinite<T>) -> Self {
        MatrixJson::from(m.as_hermitian())
    }
}

/// Either a single matrix or a list of matrices, as found in instance files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixList {
    One(MatrixJson),
    Many(Vec<MatrixJson>),
}

impl MatrixList {
    pub fn as_slice(&self) -> &[MatrixJson] {
        match self {
            MatrixList::One(m) => std::slice::from_ref(m),
            MatrixList::Many(v) => v,
        }
    }

    /// The single matrix, or a one-element list.
    pub fn single(&self) -> Result<&MatrixJson> {
        match self.as_slice() {
            [m] => Ok(m),
            other => Err(Error::Dimension(format!("expected one matrix, found {}", other.len()))),
        }
    }
}
