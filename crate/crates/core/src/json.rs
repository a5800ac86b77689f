//! JSON wire formats shared by the library types and the CLI.
//!
//! Complex numbers are `[re, im]` pairs; matrices are
//! `{"rows": r, "cols": c, "data": [[re, im], ...]}` in row-major order.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::{is_finite, CMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        MatrixJson {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }
}

impl TryFrom<MatrixJson> for CMatrix {
    type Error = String;

    fn try_from(json: MatrixJson) -> Result<Self, Self::Error> {
        if json.rows == 0 || json.cols == 0 {
            return Err("matrix dimensions must be positive".into());
        }
        if json.data.len() != json.rows * json.cols {
            return Err(format!(
                "matrix data has {} entries, expected {}x{}",
                json.data.len(),
                json.rows,
                json.cols
            ));
        }
        let m = CMatrix::from_row_iterator(
            json.rows,
            json.cols,
            json.data.iter().map(|[re, im]| Complex64::new(*re, *im)),
        );
        if !is_finite(&m) {
            return Err("matrix has non-finite entries".into());
        }
        Ok(m)
    }
}

/// `#[serde(with = "crate::json::matrix")]` for [`CMatrix`] fields.
pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson::from(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let json = MatrixJson::deserialize(d)?;
        CMatrix::try_from(json).map_err(serde::de::Error::custom)
    }
}

/// `#[serde(with = "crate::json::complex")]` for `[re, im]` pairs.
pub mod complex {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Same as [`complex`] for a list of complex numbers.
pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_is_row_major() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(2.0, 0.5),
                Complex64::new(3.0, 0.0),
                Complex64::new(4.0, -1.0),
            ],
        );
        let json = serde_json::to_value(MatrixJson::from(&m)).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"rows": 2, "cols": 2, "data": [[1.0, 0.0], [2.0, 0.5], [3.0, 0.0], [4.0, -1.0]]})
        );
        let back = CMatrix::try_from(serde_json::from_value::<MatrixJson>(json).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn malformed_matrices_rejected() {
        let short = MatrixJson {
            rows: 2,
            cols: 2,
            data: vec![[0.0, 0.0]; 3],
        };
        assert!(CMatrix::try_from(short).is_err());
        let empty = MatrixJson {
            rows: 0,
            cols: 0,
            data: vec![],
        };
        assert!(CMatrix::try_from(empty).is_err());
    }
}
