//! Overall quadratic-form tests of segregation over all cells.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::cell::{type3_covariance, type3_statistics};
use super::TestResult;
use crate::error::{Error, Result};
use crate::linalg::{quadratic_form, Spectral};
use crate::moments::RlMoments;
use crate::nnct::Nnct;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverallVariant {
    /// `C_D` on the cell deviations `N - E[N]`.
    Dixon,
    /// `C_III` on the type III statistics.
    Type3,
}

impl OverallVariant {
    /// Chi-square degrees of freedom for `m` classes.
    pub fn df(self, m: usize) -> usize {
        match self {
            OverallVariant::Dixon => m * (m - 1),
            OverallVariant::Type3 => (m - 1) * (m - 1),
        }
    }
}

/// Generalized inverse of the covariance behind `variant`, ready for reuse
/// across labelings with the same class sizes.
///
/// The row sums of `T^III` are `(C_i - n_i)/(n - 1)`, which vanish only
/// asymptotically, so `Sigma_III` has `m - 1` extra eigenvalues of relative
/// order `1/n^2`. Keeping them would make `C_III` identical to `C_D`; the
/// inverse is therefore restricted to the leading `(m-1)^2` directions.
pub(crate) fn overall_pinv(moments: &RlMoments, variant: OverallVariant) -> Result<DMatrix<f64>> {
    let m = moments.n_classes();
    let spectral = match variant {
        OverallVariant::Dixon => Spectral::new(moments.covariance())?,
        OverallVariant::Type3 => Spectral::new(&type3_covariance(moments))?,
    };
    if spectral.rank() == 0 {
        return Err(Error::Degenerate("overall covariance is zero".into()));
    }
    Ok(match variant {
        OverallVariant::Dixon => spectral.pinv(),
        OverallVariant::Type3 => spectral.truncated_pinv(variant.df(m)),
    })
}

/// Deviation vector entering the quadratic form of `variant`.
pub(crate) fn overall_deviation(nnct: &Nnct, moments: &RlMoments, variant: OverallVariant) -> Vec<f64> {
    match variant {
        OverallVariant::Dixon => nnct
            .counts_f64()
            .iter()
            .zip(moments.expected_vec())
            .map(|(n, e)| n - e)
            .collect(),
        OverallVariant::Type3 => type3_statistics(nnct),
    }
}

pub(crate) fn overall_from_pinv(deviation: &[f64], pinv: &DMatrix<f64>, df: usize) -> TestResult {
    TestResult::chisq(quadratic_form(pinv, deviation).max(0.0), df)
}

/// `C = d' Sigma^- d` with upper-tail chi-square p-value.
pub fn overall_test(nnct: &Nnct, moments: &RlMoments, variant: OverallVariant) -> Result<TestResult> {
    if nnct.row_sums() != moments.class_sizes() {
        return Err(Error::Inconsistent("moments computed for other class sizes".into()));
    }
    let pinv = overall_pinv(moments, variant)?;
    let d = overall_deviation(nnct, moments, variant);
    Ok(overall_from_pinv(&d, &pinv, variant.df(nnct.n_classes())))
}
