//! Dense complex operators tagged with the basis they act on, plus the JSON
//! wire format `{basis: [labels], matrix: [[[re,im], ...], ...]}` (row-major)
//! shared by every module.

use crate::{C64, CMat, KzError, Result};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    /// Identifier of the basis-bearing space this operator acts on.
    pub basis_id: String,
    pub matrix: CMat,
}

impl LinearOperator {
    pub fn new(basis_id: impl Into<String>, matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(KzError::DimensionMismatch(format!(
                "operator matrix {}x{} is not square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            basis_id: basis_id.into(),
            matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn to_json(&self, basis_labels: &[String]) -> OperatorJson {
        OperatorJson {
            basis: basis_labels.to_vec(),
            matrix: self
                .matrix
                .rows()
                .into_iter()
                .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

/// Serialized operator document.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct OperatorJson {
    pub basis: Vec<String>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl OperatorJson {
    pub fn to_operator(&self, basis_id: impl Into<String>) -> Result<LinearOperator> {
        let n = self.matrix.len();
        for row in &self.matrix {
            if row.len() != n {
                return Err(KzError::DimensionMismatch(
                    "ragged operator matrix in JSON".into(),
                ));
            }
        }
        let matrix = Array2::from_shape_fn((n, n), |(i, j)| {
            C64::new(self.matrix[i][j][0], self.matrix[i][j][1])
        });
        LinearOperator::new(basis_id, matrix)
    }
}
