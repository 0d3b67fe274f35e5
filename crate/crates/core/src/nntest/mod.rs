//! NNCT-based tests of segregation and case clustering.
//!
//! * [`cell`]: Dixon's and the type III cell-specific z-tests.
//! * [`overall`]: the two quadratic-form chi-square tests.
//! * [`cuzick`]: Cuzick-Edwards' k-NN tests and their combination.

pub mod cell;
pub mod cuzick;
pub mod overall;

use serde::Serialize;

use crate::dist::{chisq_sf, z_pvalue, Alternative};

pub use cell::{dixon_cell_test, type3_cell_test, type3_covariance, type3_map, type3_statistics};
pub use cuzick::{cuzick_edwards_combined, cuzick_edwards_tk, cuzick_statistics, CuzickMoments};
pub use overall::{overall_test, OverallVariant};

/// Outcome of one test on one labeling.
///
/// `statistic` is the raw statistic (a cell count, `T^III_ij`, `T_k`, ...);
/// z-tests fill `std_err` and `z_value`, chi-square tests `chisq_value` and
/// `df`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub std_err: Option<f64>,
    pub z_value: Option<f64>,
    pub chisq_value: Option<f64>,
    pub df: Option<usize>,
    pub p_asymptotic: Option<f64>,
    pub p_randomization: Option<f64>,
    pub alternative: Alternative,
}

impl TestResult {
    pub(crate) fn normal(statistic: f64, mean: f64, std_err: f64, alternative: Alternative) -> Self {
        let z = (statistic - mean) / std_err;
        TestResult {
            statistic,
            std_err: Some(std_err),
            z_value: Some(z),
            chisq_value: None,
            df: None,
            p_asymptotic: Some(z_pvalue(z, alternative)),
            p_randomization: None,
            alternative,
        }
    }

    pub(crate) fn chisq(value: f64, df: usize) -> Self {
        TestResult {
            statistic: value,
            std_err: None,
            z_value: None,
            chisq_value: Some(value),
            df: Some(df),
            p_asymptotic: Some(chisq_sf(value, df)),
            p_randomization: None,
            alternative: Alternative::Right,
        }
    }
}

/// Variances below this (relative to the squared mean scale) count as zero.
pub(crate) fn is_degenerate_variance(var: f64, scale: f64) -> bool {
    var.is_nan() || var <= 1e-12 * scale.abs().max(1.0)
}
