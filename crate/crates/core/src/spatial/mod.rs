//! Planar point storage, exact k-nearest-neighbor queries and the pair
//! statistics of the 1-NN digraph.
//!
//! Distance ties are broken by the lower original point index, so every
//! query has a unique answer and the brute-force scan and the k-d tree
//! return identical lists.

mod kdtree;

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub use kdtree::KdTree;

/// Above this many points the k-d tree is used instead of the all-pairs scan.
pub const INDEX_THRESHOLD: usize = 1000;

/// Default neighbor depth; enough for `T_1`, `T_2` and `T_{1,2}`.
pub const DEFAULT_K_MAX: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        self.dist2(other).sqrt()
    }

    #[inline]
    pub(crate) fn coord(&self, dim: usize) -> f64 {
        if dim == 0 {
            self.x
        } else {
            self.y
        }
    }
}

/// Fixed locations together with a class labeling.
///
/// Labels are zero-based class indices `0..n_classes`; class 0 plays the role
/// of the cases in case-control analyses.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<Point>,
    labels: Vec<usize>,
    class_sizes: Vec<usize>,
}

impl PointSet {
    pub fn new(points: Vec<Point>, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InsufficientPoints {
                needed: 2,
                got: points.len(),
            });
        }
        if points.len() != labels.len() {
            return Err(Error::InvalidPoints(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        if let Some(p) = points.iter().find(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidPoints(format!(
                "non-finite coordinate ({}, {})",
                p.x, p.y
            )));
        }
        let class_sizes = class_sizes(&labels, n_classes)?;
        Ok(PointSet {
            points,
            labels,
            class_sizes,
        })
    }

    /// Two-class set; `true` marks a case (class 0).
    pub fn from_case_mask(points: Vec<Point>, is_case: &[bool]) -> Result<Self> {
        let labels = is_case.iter().map(|&c| if c { 0 } else { 1 }).collect();
        PointSet::new(points, labels, 2)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.class_sizes.len()
    }

    /// Same locations, new labels.
    pub fn relabel(&self, labels: Vec<usize>) -> Result<Self> {
        PointSet::new(self.points.clone(), labels, self.n_classes())
    }
}

pub(crate) fn class_sizes(labels: &[usize], n_classes: usize) -> Result<Vec<usize>> {
    let mut sizes = vec![0usize; n_classes];
    for &l in labels {
        if l >= n_classes {
            return Err(Error::InvalidPoints(format!(
                "label {l} out of range for {n_classes} classes"
            )));
        }
        sizes[l] += 1;
    }
    Ok(sizes)
}

/// `n`, `R` and `Q`: the only features of the NN digraph the random-labeling
/// moments of the NNCT depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub n: usize,
    /// Twice the number of reflexive (mutual) NN pairs.
    pub r: usize,
    /// Number of ordered pairs of distinct points sharing a NN.
    pub q: usize,
}

#[derive(Debug, Clone)]
pub struct NnStructure {
    n: usize,
    k_max: usize,
    /// Row-major `n * k_max`, each row in increasing (distance, index) order.
    knn: Vec<usize>,
    r_stat: usize,
    /// `q_counts[d]` = number of points serving as NN exactly `d` times.
    q_counts: Vec<usize>,
    q_stat: usize,
}

impl NnStructure {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn nn(&self, i: usize) -> usize {
        self.knn[i * self.k_max]
    }

    pub fn nn_index(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.nn(i)).collect()
    }

    /// The `k` nearest neighbors of `point`, closest first.
    pub fn knn_of(&self, point: usize, k: usize) -> Result<&[usize]> {
        if k > self.k_max {
            return Err(Error::DepthExceeded { k, depth: self.k_max });
        }
        if point >= self.n {
            return Err(Error::Inconsistent(format!(
                "point {point} out of range for {} points",
                self.n
            )));
        }
        let start = point * self.k_max;
        Ok(&self.knn[start..start + k])
    }

    pub(crate) fn row(&self, point: usize, k: usize) -> &[usize] {
        let start = point * self.k_max;
        &self.knn[start..start + k]
    }

    pub fn r_stat(&self) -> usize {
        self.r_stat
    }

    /// `Q_d` for `d = 0, 1, 2, ...`; index 0 counts points that are nobody's NN.
    pub fn q_counts(&self) -> &[usize] {
        &self.q_counts
    }

    pub fn q_stat(&self) -> usize {
        self.q_stat
    }

    pub fn pair_counts(&self) -> PairCounts {
        PairCounts {
            n: self.n,
            r: self.r_stat,
            q: self.q_stat,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Candidate {
    pub d2: f64,
    pub index: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d2.total_cmp(&other.d2).then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// k nearest neighbors of `query` by exhaustive scan.
pub fn brute_force_knn(points: &[Point], query: usize, k: usize) -> Vec<usize> {
    let q = points[query];
    let mut cands: Vec<Candidate> = points
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != query)
        .map(|(j, p)| Candidate {
            d2: q.dist2(p),
            index: j,
        })
        .collect();
    if k < cands.len() {
        cands.select_nth_unstable(k);
        cands.truncate(k);
    }
    cands.sort_unstable();
    cands.into_iter().map(|c| c.index).collect()
}

/// Builds the exact k-NN lists (depth `k_max`) and the NN pair statistics.
pub fn build_nn_structure(points: &[Point], k_max: usize) -> Result<NnStructure> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InsufficientPoints { needed: 2, got: n });
    }
    if k_max == 0 {
        return Err(Error::InvalidSpec("k_max must be positive".into()));
    }
    if n < k_max + 1 {
        return Err(Error::InsufficientPoints {
            needed: k_max + 1,
            got: n,
        });
    }
    if let Some(p) = points.iter().find(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err(Error::InvalidPoints(format!(
            "non-finite coordinate ({}, {})",
            p.x, p.y
        )));
    }

    let mut knn = vec![0usize; n * k_max];
    if n > INDEX_THRESHOLD {
        let tree = KdTree::new(points);
        knn.par_chunks_mut(k_max)
            .enumerate()
            .for_each(|(i, row)| tree.knn_into(i, row));
    } else {
        knn.par_chunks_mut(k_max).enumerate().for_each(|(i, row)| {
            row.copy_from_slice(&brute_force_knn(points, i, k_max));
        });
    }
    Ok(from_knn(n, k_max, knn))
}

fn from_knn(n: usize, k_max: usize, knn: Vec<usize>) -> NnStructure {
    let nn = |i: usize| knn[i * k_max];
    let r_stat = (0..n).filter(|&i| nn(nn(i)) == i).count();
    let mut in_degree = vec![0usize; n];
    for i in 0..n {
        in_degree[nn(i)] += 1;
    }
    let max_deg = in_degree.iter().copied().max().unwrap_or(0);
    let mut q_counts = vec![0usize; max_deg + 1];
    for &d in &in_degree {
        q_counts[d] += 1;
    }
    let q_stat = in_degree.iter().map(|&d| d * d.saturating_sub(1)).sum();
    NnStructure {
        n,
        k_max,
        knn,
        r_stat,
        q_counts,
        q_stat,
    }
}
