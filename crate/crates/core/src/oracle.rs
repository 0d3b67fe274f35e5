//! Brute-force moments by enumerating every distinct labeling.
//!
//! Used to certify the closed forms in [`crate::moments`] and the
//! Cuzick-Edwards moment algebra; nothing here shares code with them.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::moments::RlMoments;
use crate::nnct::Nnct;
use crate::spatial::NnStructure;

/// Largest number of labelings the oracle will enumerate.
pub const ORACLE_BUDGET: u128 = 1_000_000;

/// Multinomial coefficient `n! / (n_1! ... n_m!)`.
pub fn labeling_count(class_sizes: &[usize]) -> u128 {
    let mut total: u128 = 1;
    let mut used: u128 = 0;
    for &size in class_sizes {
        for t in 1..=size as u128 {
            used += 1;
            // C(used, t) built incrementally stays integral
            total = total * used / t;
        }
    }
    total
}

/// Calls `visit` once for each distinct assignment of the label multiset,
/// in lexicographic order.
pub fn for_each_labeling(class_sizes: &[usize], mut visit: impl FnMut(&[usize])) {
    let mut labels: Vec<usize> = class_sizes
        .iter()
        .enumerate()
        .flat_map(|(c, &size)| std::iter::repeat_n(c, size))
        .collect();
    loop {
        visit(&labels);
        if !next_permutation(&mut labels) {
            break;
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

pub fn check_budget(class_sizes: &[usize]) -> Result<u128> {
    let count = labeling_count(class_sizes);
    if count > ORACLE_BUDGET {
        return Err(Error::OracleBudget {
            labelings: count,
            budget: ORACLE_BUDGET,
        });
    }
    Ok(count)
}

/// Exact mean vector and covariance matrix of `statistic` over all labelings.
pub fn enumerate_moments(
    class_sizes: &[usize],
    statistic: impl Fn(&[usize]) -> Vec<f64>,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let count = check_budget(class_sizes)? as f64;
    let mut mean: Vec<f64> = Vec::new();
    for_each_labeling(class_sizes, |labels| {
        let x = statistic(labels);
        if mean.is_empty() {
            mean = vec![0.0; x.len()];
        }
        for (m, v) in mean.iter_mut().zip(&x) {
            *m += v;
        }
    });
    for m in &mut mean {
        *m /= count;
    }
    let d = mean.len();
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for_each_labeling(class_sizes, |labels| {
        let x = statistic(labels);
        for a in 0..d {
            let da = x[a] - mean[a];
            for b in 0..d {
                cov[(a, b)] += da * (x[b] - mean[b]);
            }
        }
    });
    cov /= count;
    Ok((mean, cov))
}

/// Cell-count moments by exhaustive enumeration.
pub fn permutation_oracle_moments(structure: &NnStructure, class_sizes: &[usize]) -> Result<RlMoments> {
    let n: usize = class_sizes.iter().sum();
    if n != structure.n() {
        return Err(Error::Inconsistent(format!(
            "class sizes sum to {n}, structure has {} points",
            structure.n()
        )));
    }
    let m = class_sizes.len();
    let (mean, cov) = enumerate_moments(class_sizes, |labels| {
        Nnct::from_labels(labels, m, structure).counts_f64()
    })?;
    Ok(RlMoments::from_parts(
        class_sizes.to_vec(),
        structure.pair_counts(),
        mean,
        cov,
    ))
}
