//! Cell-specific tests.
//!
//! The type III statistic `T^III_ij = N_ij - c_ij C_j` (with
//! `c_ii = (n_i - 1)/(n - 1)`, `c_ij = n_i/(n - 1)` and column sum `C_j`) is
//! a linear map `A` of the row-major cell vector, so its covariance is
//! `A Sigma_D A'` and its RL mean is zero.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::Zero;

use super::{is_degenerate_variance, TestResult};
use crate::dist::Alternative;
use crate::error::{Error, Result};
use crate::exact::congruence;
use crate::moments::RlMoments;
use crate::nnct::Nnct;

fn check_cell(m: usize, i: usize, j: usize) -> Result<()> {
    if i >= m || j >= m {
        return Err(Error::Inconsistent(format!("cell ({i},{j}) outside {m}x{m} table")));
    }
    Ok(())
}

fn check_sizes(nnct: &Nnct, moments: &RlMoments) -> Result<()> {
    if nnct.row_sums() != moments.class_sizes() {
        return Err(Error::Inconsistent("moments computed for other class sizes".into()));
    }
    Ok(())
}

/// Dixon's `Z^D_ij = (N_ij - E[N_ij]) / sqrt(Var[N_ij])`.
pub fn dixon_cell_test(
    nnct: &Nnct,
    moments: &RlMoments,
    i: usize,
    j: usize,
    alternative: Alternative,
) -> Result<TestResult> {
    check_cell(nnct.n_classes(), i, j)?;
    check_sizes(nnct, moments)?;
    let mean = moments.expected(i, j);
    let var = moments.variance(i, j);
    if is_degenerate_variance(var, mean * mean) {
        return Err(Error::Degenerate(format!(
            "cell ({},{}) has zero variance",
            i + 1,
            j + 1
        )));
    }
    Ok(TestResult::normal(
        nnct.count(i, j) as f64,
        mean,
        var.sqrt(),
        alternative,
    ))
}

/// The `m^2 x m^2` matrix taking cell counts to `T^III` (both row-major).
pub fn type3_map(class_sizes: &[usize]) -> DMatrix<f64> {
    let m = class_sizes.len();
    let n: usize = class_sizes.iter().sum();
    let scale = 1.0 / (n as f64 - 1.0);
    let mut a = DMatrix::<f64>::identity(m * m, m * m);
    for i in 0..m {
        for j in 0..m {
            let ni = class_sizes[i] as f64;
            let c = if i == j { (ni - 1.0) * scale } else { ni * scale };
            for k in 0..m {
                a[(i * m + j, k * m + j)] -= c;
            }
        }
    }
    a
}

/// Row-major `T^III` for a table.
pub fn type3_statistics(nnct: &Nnct) -> Vec<f64> {
    let a = type3_map(nnct.row_sums());
    let t = a * DVector::from_vec(nnct.counts_f64());
    t.iter().copied().collect()
}

/// Covariance of `T^III` under RL.
pub fn type3_covariance(moments: &RlMoments) -> DMatrix<f64> {
    let sizes = moments.class_sizes();
    if let Some(exact) = moments.exact() {
        // (n - 1) times the map has integer entries
        let m = sizes.len();
        let n1 = moments.n() as i64 - 1;
        let mut a = DMatrix::<BigInt>::from_element(m * m, m * m, BigInt::zero());
        for i in 0..m {
            for j in 0..m {
                let c = sizes[i] as i64 - i64::from(i == j);
                a[(i * m + j, i * m + j)] += n1;
                for k in 0..m {
                    a[(i * m + j, k * m + j)] -= c;
                }
            }
        }
        return congruence(exact, &a, &BigInt::from(n1));
    }
    let a = type3_map(sizes);
    &a * moments.covariance() * a.transpose()
}

pub(crate) fn type3_cell(
    t: f64,
    var: f64,
    i: usize,
    j: usize,
    scale: f64,
    alternative: Alternative,
) -> Result<TestResult> {
    if is_degenerate_variance(var, scale) {
        return Err(Error::Degenerate(format!(
            "type III cell ({},{}) has zero variance",
            i + 1,
            j + 1
        )));
    }
    Ok(TestResult::normal(t, 0.0, var.sqrt(), alternative))
}

/// Type III `Z^III_ij = T^III_ij / sqrt(Var[T^III_ij])`.
pub fn type3_cell_test(
    nnct: &Nnct,
    moments: &RlMoments,
    i: usize,
    j: usize,
    alternative: Alternative,
) -> Result<TestResult> {
    let m = nnct.n_classes();
    check_cell(m, i, j)?;
    check_sizes(nnct, moments)?;
    let t = type3_statistics(nnct)[i * m + j];
    let cov = type3_covariance(moments);
    let a = i * m + j;
    let e = moments.expected(i, j);
    type3_cell(t, cov[(a, a)], i, j, e * e, alternative)
}
