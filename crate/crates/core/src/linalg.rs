//! Spectral generalized inverses for the quadratic-form tests.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenvalues below this fraction of the largest are treated as zero.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Negative eigenvalues beyond this fraction of the largest reject the matrix.
pub const PSD_TOLERANCE: f64 = 1e-9;

/// Eigen-decomposition of a symmetric PSD matrix with a scale-aware rank.
#[derive(Debug, Clone)]
pub struct Spectral {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    cutoff: f64,
}

impl Spectral {
    pub fn new(matrix: &DMatrix<f64>) -> Result<Self> {
        let sym = (matrix + matrix.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let largest = eig.eigenvalues.iter().fold(0.0f64, |a, &v| a.max(v));
        let smallest = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &v| a.min(v));
        if smallest < -PSD_TOLERANCE * largest.max(1.0) {
            return Err(Error::NotPsd {
                min_eigenvalue: smallest,
            });
        }
        Ok(Spectral {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            cutoff: RANK_CUTOFF * largest,
        })
    }

    pub fn rank(&self) -> usize {
        self.kept().count()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    fn kept(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.eigenvalues.len()).filter(move |&i| self.eigenvalues[i] > self.cutoff && self.eigenvalues[i] > 0.0)
    }

    fn mapped(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let d = self.eigenvalues.len();
        let mut out = DMatrix::<f64>::zeros(d, d);
        for i in self.kept() {
            let v = self.eigenvectors.column(i);
            out += v * v.transpose() * f(self.eigenvalues[i]);
        }
        out
    }

    /// Moore-Penrose pseudoinverse.
    pub fn pinv(&self) -> DMatrix<f64> {
        self.mapped(|l| 1.0 / l)
    }

    /// Pseudoinverse restricted to the `rank` largest retained eigenvalues.
    pub fn truncated_pinv(&self, rank: usize) -> DMatrix<f64> {
        let mut kept: Vec<usize> = self.kept().collect();
        kept.sort_by(|&a, &b| self.eigenvalues[b].total_cmp(&self.eigenvalues[a]));
        let d = self.eigenvalues.len();
        let mut out = DMatrix::<f64>::zeros(d, d);
        for &i in kept.iter().take(rank) {
            let v = self.eigenvectors.column(i);
            out += v * v.transpose() / self.eigenvalues[i];
        }
        out
    }

    /// Pseudo-inverse of the symmetric square root.
    pub fn inv_sqrt(&self) -> DMatrix<f64> {
        self.mapped(|l| 1.0 / l.sqrt())
    }
}

/// `x' A x`.
pub fn quadratic_form(matrix: &DMatrix<f64>, x: &[f64]) -> f64 {
    let v = DVector::from_column_slice(x);
    (v.transpose() * matrix * &v)[(0, 0)]
}
