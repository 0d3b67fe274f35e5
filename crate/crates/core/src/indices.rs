//! Pielou's coefficient of segregation and Dixon's segregation indices.
//!
//! Indices are reported with a delta-method (or exact, for Pielou under RL)
//! standard error and the corresponding z-score. Uncorrected Dixon indices
//! can be `+inf`/`-inf` at the table boundary; they are returned as values
//! with no z-score rather than as errors.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{known_proportion_covariance, RlMoments};
use crate::nnct::Nnct;
use crate::spatial::PairCounts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Framework {
    RowBinomial,
    OverallMultinomial,
    RandomLabeling,
    KnownProportions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexValue {
    pub value: f64,
    pub std_err: Option<f64>,
    pub z_score: Option<f64>,
    pub framework: Framework,
}

impl IndexValue {
    fn new(value: f64, std_err: Option<f64>, framework: Framework) -> Self {
        let z_score = match std_err {
            Some(se) if se > 0.0 && value.is_finite() => Some(value / se),
            _ => None,
        };
        IndexValue {
            value,
            std_err,
            z_score,
            framework,
        }
    }
}

/// Null model used to standardize Pielou's coefficient.
#[derive(Debug, Clone, Copy)]
pub enum PielouFramework<'a> {
    /// Independent binomial rows; proportions estimated by `n_i / n`.
    RowBinomial,
    /// One multinomial over all four cells, under `H_o` (`nu_1 = kappa_1`).
    OverallMultinomial,
    /// Exact random labeling of the mapped locations.
    RandomLabeling(&'a RlMoments),
    /// Random labeling with known population proportion `nu1` of class 1.
    KnownProportions { nu1: f64, pairs: PairCounts },
}

fn two_class_sizes(nnct: &Nnct) -> Result<(f64, f64, f64)> {
    if nnct.n_classes() != 2 {
        return Err(Error::TwoClassOnly("Pielou's coefficient"));
    }
    let sizes = nnct.row_sums();
    for (i, &s) in sizes.iter().enumerate() {
        if s == 0 {
            return Err(Error::ClassDegenerate(i));
        }
    }
    Ok((sizes[0] as f64, sizes[1] as f64, nnct.n() as f64))
}

/// `S_P = 1 - (N_12 + N_21) / (E[N_12] + E[N_21])`.
pub fn pielou_s(nnct: &Nnct, framework: PielouFramework<'_>) -> Result<IndexValue> {
    let (n1, n2, n) = two_class_sizes(nnct)?;
    let mixed = (nnct.count(0, 1) + nnct.count(1, 0)) as f64;

    let (expected, std_err, tag) = match framework {
        PielouFramework::RowBinomial => {
            let e = 2.0 * n1 * n2 / n;
            (e, (n / (4.0 * n1 * n2)).sqrt(), Framework::RowBinomial)
        }
        PielouFramework::OverallMultinomial => {
            let e = 2.0 * n1 * n2 / n;
            let var = (n2 / n1 + n1 / n2) / (2.0 * n);
            (e, var.sqrt(), Framework::OverallMultinomial)
        }
        PielouFramework::RandomLabeling(mo) => {
            if mo.class_sizes() != nnct.row_sums() {
                return Err(Error::Inconsistent("moments computed for other class sizes".into()));
            }
            let e = mo.expected(0, 1) + mo.expected(1, 0);
            let var = mo.variance(0, 1) + mo.variance(1, 0) + 2.0 * mo.cov((0, 1), (1, 0));
            (e, var.max(0.0).sqrt() / e, Framework::RandomLabeling)
        }
        PielouFramework::KnownProportions { nu1, pairs } => {
            if !(nu1 > 0.0 && nu1 < 1.0) {
                return Err(Error::InvalidSpec(format!("proportion {nu1} outside (0, 1)")));
            }
            let nu = [nu1, 1.0 - nu1];
            let (_, cov) = known_proportion_covariance(pairs, &nu);
            let e = 2.0 * n * nu[0] * nu[1];
            let var = cov[(1, 1)] + cov[(2, 2)] + 2.0 * cov[(1, 2)];
            (e, var.max(0.0).sqrt() / e, Framework::KnownProportions)
        }
    };
    if std_err.is_nan() || std_err <= 0.0 {
        return Err(Error::Degenerate("Pielou's coefficient has zero variance".into()));
    }
    Ok(IndexValue::new(1.0 - mixed / expected, Some(std_err), tag))
}

struct CellSizes {
    n: f64,
    ni: f64,
    nj: f64,
    count: f64,
}

fn cell_sizes(nnct: &Nnct, i: usize, j: usize) -> Result<CellSizes> {
    let m = nnct.n_classes();
    if i >= m || j >= m {
        return Err(Error::Inconsistent(format!("cell ({i},{j}) outside {m}x{m} table")));
    }
    let n = nnct.n();
    let ni = nnct.row_sums()[i];
    if ni == 0 || ni == n {
        return Err(Error::ClassDegenerate(i));
    }
    Ok(CellSizes {
        n: n as f64,
        ni: ni as f64,
        nj: nnct.row_sums()[j] as f64,
        count: nnct.count(i, j) as f64,
    })
}

fn delta_std_err(moments: Option<&RlMoments>, i: usize, j: usize, slope: f64) -> Option<f64> {
    let var = moments?.variance(i, j);
    (var > 0.0 && slope.is_finite()).then(|| var.sqrt() * slope)
}

fn check_defined(value: f64, what: &str, i: usize, j: usize) -> Result<f64> {
    if value.is_nan() {
        Err(Error::Degenerate(format!(
            "{what} undefined for cell ({},{})",
            i + 1,
            j + 1
        )))
    } else {
        Ok(value)
    }
}

/// Dixon's segregation index `S^D_ij`, a log odds ratio of the cell count
/// against its RL expectation.
///
/// `moments` supplies `Var[N_ij]` for the standard error; pass `None` when it
/// is unavailable (the value is still returned).
pub fn dixon_index(nnct: &Nnct, moments: Option<&RlMoments>, i: usize, j: usize) -> Result<IndexValue> {
    let c = cell_sizes(nnct, i, j)?;
    let (value, slope) = if i == j {
        let v = c.count.ln() - (c.ni - c.count).ln() - (c.ni - 1.0).ln() + (c.n - c.ni).ln();
        let g = (c.n - 1.0).powi(2) / (c.ni * (c.n - c.ni) * (c.ni - 1.0));
        (v, g)
    } else {
        let v = c.count.ln() - (c.ni - c.count).ln() - c.nj.ln() + (c.n - c.nj - 1.0).ln();
        let g = (c.n - 1.0).powi(2) / (c.ni * c.nj * (c.n - c.nj - 1.0));
        (v, g)
    };
    let value = check_defined(value, "Dixon's index", i, j)?;
    Ok(IndexValue::new(
        value,
        delta_std_err(moments, i, j, slope),
        Framework::RandomLabeling,
    ))
}

/// Corrected index `S^{D,c}_ij`: one pseudo-count in each odds term, with
/// the reference odds chosen so that the index is centred at the RL mean.
/// Always finite when `0 < n_i < n`.
pub fn dixon_index_corrected(nnct: &Nnct, moments: Option<&RlMoments>, i: usize, j: usize) -> Result<IndexValue> {
    let c = cell_sizes(nnct, i, j)?;
    let odds = ((c.count + 1.0) / (c.ni - c.count + 1.0)).ln();
    let (num, den) = if i == j {
        (c.ni * (c.ni - 1.0) + (c.n - 1.0), c.ni * (c.n - c.ni) + (c.n - 1.0))
    } else {
        (c.ni * c.nj + (c.n - 1.0), c.ni * (c.n - c.nj - 1.0) + (c.n - 1.0))
    };
    let value = check_defined(odds - (num / den).ln(), "corrected Dixon index", i, j)?;
    let slope = (c.ni + 2.0) * (c.n - 1.0).powi(2) / (num * den);
    Ok(IndexValue::new(
        value,
        delta_std_err(moments, i, j, slope),
        Framework::RandomLabeling,
    ))
}

/// Large-sample form of `S^D_ij` when the class proportions `nu` are known.
pub fn dixon_index_known_prop(nnct: &Nnct, pairs: PairCounts, i: usize, j: usize, nu: &[f64]) -> Result<IndexValue> {
    let m = nnct.n_classes();
    if nu.len() != m {
        return Err(Error::Inconsistent(format!("{} proportions for {m} classes", nu.len())));
    }
    if nu.iter().any(|&v| !(v > 0.0 && v < 1.0)) || (nu.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidSpec("proportions must lie in (0,1) and sum to 1".into()));
    }
    let c = cell_sizes(nnct, i, j)?;
    let head = c.n * nu[i] - c.count;
    if head < 0.0 {
        return Err(Error::DomainViolated(format!(
            "N_{}{} = {} exceeds n * nu_{} = {}",
            i + 1,
            j + 1,
            c.count,
            i + 1,
            c.n * nu[i]
        )));
    }
    let (value, slope) = if i == j {
        let v = c.count.ln() - head.ln() - (nu[i] / (1.0 - nu[i])).ln();
        (v, 1.0 / (c.n * nu[i] * nu[i] * (1.0 - nu[i])))
    } else {
        let v = c.count.ln() - head.ln() - (nu[j] / (1.0 - nu[j])).ln();
        (v, 1.0 / (c.n * nu[i] * nu[j] * (1.0 - nu[j])))
    };
    let value = check_defined(value, "Dixon's index", i, j)?;
    let (_, cov) = known_proportion_covariance(pairs, nu);
    let var = cov[(i * m + j, i * m + j)];
    let std_err = (var > 0.0).then(|| var.sqrt() * slope);
    Ok(IndexValue::new(value, std_err, Framework::KnownProportions))
}
