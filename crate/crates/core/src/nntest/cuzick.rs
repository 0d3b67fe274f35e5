//! Cuzick-Edwards k-NN tests for clustering of cases (class 0).
//!
//! `T_k = sum_{s != t} a_st d_s d_t` where `a_st = 1` if `t` is among the `k`
//! nearest neighbors of `s` and `d_s` flags cases. Moments of products of
//! case flags over distinct points are `P_r = (n_1)_r / (n)_r`, so
//! `Cov[T_k, T_l]` only needs counts of arc pairs sharing 2, 3 or 4 points.

use nalgebra::{DMatrix, DVector};

use super::{is_degenerate_variance, TestResult};
use crate::dist::Alternative;
use crate::error::{Error, Result};
use crate::exact::case_pattern_sum;
use crate::linalg::Spectral;
use crate::spatial::{NnStructure, PointSet};

fn falling_ratio(n1: usize, n: usize, r: usize) -> f64 {
    if n1 < r {
        return 0.0;
    }
    (0..r).map(|t| (n1 - t) as f64 / (n - t) as f64).product()
}

/// Exact RL mean vector and covariance of `(T_k)_{k in ks}`.
#[derive(Debug, Clone)]
pub struct CuzickMoments {
    ks: Vec<usize>,
    n_cases: usize,
    expected: Vec<f64>,
    covariance: DMatrix<f64>,
}

impl CuzickMoments {
    pub fn new(structure: &NnStructure, n_cases: usize, ks: &[usize]) -> Result<Self> {
        let n = structure.n();
        if n_cases == 0 || n_cases >= n {
            return Err(Error::DegenerateLabeling(format!("{n_cases} cases among {n} points")));
        }
        if ks.is_empty() {
            return Err(Error::InvalidSpec("no neighbor depth requested".into()));
        }
        for &k in ks {
            if k == 0 || k > structure.k_max() {
                return Err(Error::DepthExceeded {
                    k,
                    depth: structure.k_max(),
                });
            }
        }
        let p2 = falling_ratio(n_cases, n, 2);

        let indegree: Vec<Vec<i128>> = ks
            .iter()
            .map(|&k| {
                let mut c = vec![0i128; n];
                for s in 0..n {
                    for &t in structure.row(s, k) {
                        c[t] += 1;
                    }
                }
                c
            })
            .collect();

        let nf = n as f64;
        let ni = n as i128;
        let expected: Vec<f64> = ks.iter().map(|&k| nf * k as f64 * p2).collect();
        let d = ks.len();
        let mut covariance = DMatrix::<f64>::zeros(d, d);
        for a in 0..d {
            for b in a..d {
                let (k, l) = (ks[a] as i128, ks[b] as i128);
                // neighbor lists are nested, so shared arcs are the shallower list
                let same = ni * k.min(l);
                let mut reversed = 0i128;
                for s in 0..n {
                    for &t in structure.row(s, ks[a]) {
                        if structure.row(t, ks[b]).contains(&s) {
                            reversed += 1;
                        }
                    }
                }
                let shared_head: i128 = indegree[a].iter().zip(&indegree[b]).map(|(x, y)| x * y).sum();
                let three = (ni * k * l - same) + (shared_head - same) + 2 * (ni * k * l - reversed);
                let arcs = ni * k * ni * l;
                let four = arcs - same - reversed - three;
                let v = case_pattern_sum(n, n_cases, same + reversed, three, four, arcs);
                covariance[(a, b)] = v;
                covariance[(b, a)] = v;
            }
        }
        Ok(CuzickMoments {
            ks: ks.to_vec(),
            n_cases,
            expected,
            covariance,
        })
    }

    pub fn ks(&self) -> &[usize] {
        &self.ks
    }

    pub fn n_cases(&self) -> usize {
        self.n_cases
    }

    pub fn expected(&self) -> &[f64] {
        &self.expected
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }
}

/// `T_k` for each depth in `ks` given case flags.
pub fn cuzick_statistics(structure: &NnStructure, is_case: &[bool], ks: &[usize]) -> Vec<f64> {
    ks.iter()
        .map(|&k| {
            (0..structure.n())
                .filter(|&s| is_case[s])
                .map(|s| structure.row(s, k).iter().filter(|&&t| is_case[t]).count())
                .sum::<usize>() as f64
        })
        .collect()
}

/// Weights `Sigma^{-1/2} 1` of the combined statistic.
pub(crate) fn combination_weights(moments: &CuzickMoments) -> Result<Vec<f64>> {
    let spectral = Spectral::new(&moments.covariance)?;
    if spectral.rank() < moments.ks.len() {
        return Err(Error::SingularCombined);
    }
    let ones = DVector::<f64>::from_element(moments.ks.len(), 1.0);
    Ok((spectral.inv_sqrt() * ones).iter().copied().collect())
}

pub(crate) fn single_test(
    moments: &CuzickMoments,
    index: usize,
    t: f64,
    alternative: Alternative,
) -> Result<TestResult> {
    let mean = moments.expected[index];
    let var = moments.covariance[(index, index)];
    if is_degenerate_variance(var, mean * mean) {
        return Err(Error::Degenerate(format!("T_{} has zero variance", moments.ks[index])));
    }
    Ok(TestResult::normal(t, mean, var.sqrt(), alternative))
}

pub(crate) fn combined_test(
    moments: &CuzickMoments,
    weights: &[f64],
    t: &[f64],
    alternative: Alternative,
) -> TestResult {
    let dot = |x: &[f64]| weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
    let w = DVector::from_column_slice(weights);
    let var = (w.transpose() * &moments.covariance * &w)[(0, 0)];
    TestResult::normal(dot(t), dot(&moments.expected), var.max(0.0).sqrt(), alternative)
}

fn case_flags(points: &PointSet, structure: &NnStructure) -> Result<Vec<bool>> {
    if points.len() != structure.n() {
        return Err(Error::Inconsistent(format!(
            "{} points but structure over {}",
            points.len(),
            structure.n()
        )));
    }
    Ok(points.labels().iter().map(|&l| l == 0).collect())
}

/// Standardized `T_k` with class 0 as cases.
pub fn cuzick_edwards_tk(
    points: &PointSet,
    structure: &NnStructure,
    k: usize,
    alternative: Alternative,
) -> Result<TestResult> {
    let flags = case_flags(points, structure)?;
    let moments = CuzickMoments::new(structure, points.class_sizes()[0], &[k])?;
    let t = cuzick_statistics(structure, &flags, &[k]);
    single_test(&moments, 0, t[0], alternative)
}

/// Combined `T_S = 1' Sigma^{-1/2} T` over the depths in `ks`.
pub fn cuzick_edwards_combined(
    points: &PointSet,
    structure: &NnStructure,
    ks: &[usize],
    alternative: Alternative,
) -> Result<TestResult> {
    let flags = case_flags(points, structure)?;
    let moments = CuzickMoments::new(structure, points.class_sizes()[0], ks)?;
    let weights = combination_weights(&moments)?;
    let t = cuzick_statistics(structure, &flags, ks);
    Ok(combined_test(&moments, &weights, &t, alternative))
}
