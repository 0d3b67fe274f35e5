//! Nearest-neighbor contingency tables.

use crate::error::{Error, Result};
use crate::spatial::{NnStructure, PointSet};

/// `m x m` table of base-class versus NN-class counts.
///
/// Rows are base classes, columns NN classes; rows sum to the class sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nnct {
    m: usize,
    counts: Vec<usize>,
    row_sums: Vec<usize>,
    col_sums: Vec<usize>,
}

impl Nnct {
    /// Table directly from row-major counts.
    pub fn from_counts(m: usize, counts: Vec<usize>) -> Result<Self> {
        if m == 0 || counts.len() != m * m {
            return Err(Error::Inconsistent(format!(
                "{} counts do not form a {m}x{m} table",
                counts.len()
            )));
        }
        let row_sums = (0..m).map(|i| counts[i * m..(i + 1) * m].iter().sum()).collect();
        let col_sums = (0..m).map(|j| (0..m).map(|i| counts[i * m + j]).sum()).collect();
        Ok(Nnct {
            m,
            counts,
            row_sums,
            col_sums,
        })
    }

    pub(crate) fn from_labels(labels: &[usize], m: usize, structure: &NnStructure) -> Nnct {
        let mut counts = vec![0usize; m * m];
        for (s, &ls) in labels.iter().enumerate() {
            counts[ls * m + labels[structure.nn(s)]] += 1;
        }
        Nnct::from_counts(m, counts).expect("shape is m*m")
    }

    pub fn n_classes(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.row_sums.iter().sum()
    }

    pub fn count(&self, i: usize, j: usize) -> usize {
        self.counts[i * self.m + j]
    }

    /// Row-major cell counts.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn counts_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }

    /// Class sizes `n_i`.
    pub fn row_sums(&self) -> &[usize] {
        &self.row_sums
    }

    /// `C_j`: how often class `j` serves as a NN.
    pub fn col_sums(&self) -> &[usize] {
        &self.col_sums
    }
}

/// `N_ij = #{s : label(s) = i, label(nn(s)) = j}`.
pub fn build_nnct(points: &PointSet, structure: &NnStructure) -> Result<Nnct> {
    if points.len() != structure.n() {
        return Err(Error::Inconsistent(format!(
            "point set has {} points, structure has {}",
            points.len(),
            structure.n()
        )));
    }
    Ok(Nnct::from_labels(points.labels(), points.n_classes(), structure))
}
