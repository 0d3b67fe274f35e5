//! Exact moments of NNCT cell counts under random labeling (RL).
//!
//! Every cell count is a sum of indicators, `N_ij = sum_s I(L_s = i, L_nn(s) = j)`,
//! so `Cov[N_ij, N_kl]` is a double sum over base points `s`, `t`. Grouping
//! the ordered pairs `(s, t)` by how `{s, nn(s), t, nn(t)}` overlap leaves
//! five kinds of pairs whose counts depend only on `n`, `R` and `Q`:
//!
//! | pairs             | count              | distinct points |
//! |-------------------|--------------------|-----------------|
//! | `s = t`           | `n`                | 2               |
//! | mutual NNs        | `R`                | 2               |
//! | shared NN         | `Q`                | 3               |
//! | `t = nn(s)` only  | `n - R`            | 3               |
//! | `s = nn(t)` only  | `n - R`            | 3               |
//! | disjoint          | `n^2 - 3n - Q + R` | 4               |
//!
//! The probability that given distinct points carry given labels is a ratio
//! of falling factorials (labels are drawn without replacement).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exact::{exact_cell_moments, ExactCovariance};
use crate::spatial::{NnStructure, PairCounts};

/// Probability that `classes.len()` distinct points carry exactly `classes`
/// under a uniform assignment of the label multiset `sizes` (total `n`).
pub fn label_pattern_prob(sizes: &[usize], classes: &[usize]) -> f64 {
    let n: usize = sizes.iter().sum();
    let mut seen = vec![0usize; sizes.len()];
    let mut prob = 1.0;
    for (t, &c) in classes.iter().enumerate() {
        let avail = sizes[c] as f64 - seen[c] as f64;
        let total = n as f64 - t as f64;
        if avail <= 0.0 || total <= 0.0 {
            return 0.0;
        }
        prob *= avail / total;
        seen[c] += 1;
    }
    prob
}

/// Labels of distinct points as independent draws with known proportions.
#[derive(Debug, Clone, Copy)]
struct Proportions<'a>(&'a [f64]);

impl Proportions<'_> {
    fn prob(&self, classes: &[usize]) -> f64 {
        classes.iter().map(|&c| self.0[c]).product()
    }

    fn n_classes(&self) -> usize {
        self.0.len()
    }
}

/// Cell means (row-major) and the `m^2 x m^2` covariance under `model`.
fn cell_moments(model: Proportions<'_>, pairs: PairCounts) -> (Vec<f64>, DMatrix<f64>) {
    let m = model.n_classes();
    let n = pairs.n as f64;
    let r = pairs.r as f64;
    let q = pairs.q as f64;
    let disjoint = n * n - 3.0 * n - q + r;
    let cells = m * m;

    let p2: Vec<f64> = (0..cells).map(|a| model.prob(&[a / m, a % m])).collect();
    let expected: Vec<f64> = p2.iter().map(|p| n * p).collect();

    let mut cov = DMatrix::<f64>::zeros(cells, cells);
    for a in 0..cells {
        let (i, j) = (a / m, a % m);
        for b in a..cells {
            let (k, l) = (b / m, b % m);
            let mut v = 0.0;
            if i == k && j == l {
                v += n * p2[a];
            }
            if i == l && j == k {
                v += r * p2[a];
            }
            if j == l {
                v += q * model.prob(&[i, k, j]);
            }
            if j == k {
                v += (n - r) * model.prob(&[i, j, l]);
            }
            if i == l {
                v += (n - r) * model.prob(&[k, i, j]);
            }
            // n^2 (P4 - P2 P2) + (-3n - Q + R) P4, grouped to limit cancellation
            let p4 = model.prob(&[i, j, k, l]);
            v += n * n * (p4 - p2[a] * p2[b]) + (disjoint - n * n) * p4;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    (expected, cov)
}

/// Exact RL moments of every cell count.
#[derive(Debug, Clone)]
pub struct RlMoments {
    m: usize,
    class_sizes: Vec<usize>,
    pairs: PairCounts,
    expected: Vec<f64>,
    covariance: DMatrix<f64>,
    exact: Option<ExactCovariance>,
}

impl RlMoments {
    pub(crate) fn from_parts(
        class_sizes: Vec<usize>,
        pairs: PairCounts,
        expected: Vec<f64>,
        covariance: DMatrix<f64>,
    ) -> Self {
        RlMoments {
            m: class_sizes.len(),
            class_sizes,
            pairs,
            expected,
            covariance,
            exact: None,
        }
    }

    /// Integer covariance numerators, when the moments came from the closed
    /// forms.
    pub(crate) fn exact(&self) -> Option<&ExactCovariance> {
        self.exact.as_ref()
    }

    pub fn n_classes(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.pairs.n
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    pub fn pair_counts(&self) -> PairCounts {
        self.pairs
    }

    pub fn expected(&self, i: usize, j: usize) -> f64 {
        self.expected[i * self.m + j]
    }

    /// Row-major `E[N_ij]`.
    pub fn expected_vec(&self) -> &[f64] {
        &self.expected
    }

    /// `Sigma_D`, cells ordered row-major.
    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn variance(&self, i: usize, j: usize) -> f64 {
        let a = i * self.m + j;
        self.covariance[(a, a)]
    }

    pub fn cov(&self, (i, j): (usize, usize), (k, l): (usize, usize)) -> f64 {
        self.covariance[(i * self.m + j, k * self.m + l)]
    }

    fn p(&self, classes: &[usize]) -> f64 {
        label_pattern_prob(&self.class_sizes, classes)
    }

    /// `p_ij`: two distinct points labeled `i`, `j`. `p_ii` when `i == j`.
    pub fn p_ij(&self, i: usize, j: usize) -> f64 {
        self.p(&[i, j])
    }

    pub fn p_iij(&self, i: usize, j: usize) -> f64 {
        self.p(&[i, i, j])
    }

    pub fn p_ijj(&self, i: usize, j: usize) -> f64 {
        self.p(&[i, j, j])
    }

    pub fn p_iijj(&self, i: usize, j: usize) -> f64 {
        self.p(&[i, i, j, j])
    }
}

/// Exact mean and covariance of all cell counts under RL of `class_sizes`
/// to the locations behind `structure`.
pub fn rl_moments(structure: &NnStructure, class_sizes: &[usize]) -> Result<RlMoments> {
    rl_moments_from_counts(structure.pair_counts(), class_sizes)
}

pub fn rl_moments_from_counts(pairs: PairCounts, class_sizes: &[usize]) -> Result<RlMoments> {
    let total: usize = class_sizes.iter().sum();
    if total != pairs.n {
        return Err(Error::Inconsistent(format!(
            "class sizes sum to {total}, structure has {} points",
            pairs.n
        )));
    }
    if pairs.n < 4 {
        return Err(Error::MomentsUndefined(pairs.n));
    }
    let (expected, covariance, exact) = exact_cell_moments(class_sizes, pairs);
    let mut moments = RlMoments::from_parts(class_sizes.to_vec(), pairs, expected, covariance);
    moments.exact = Some(exact);
    Ok(moments)
}

/// Large-sample cell variances and covariances when class proportions `nu`
/// are known; pattern probabilities become products of proportions.
pub fn known_proportion_covariance(pairs: PairCounts, nu: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    cell_moments(Proportions(nu), pairs)
}
