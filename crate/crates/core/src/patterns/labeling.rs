//! Case labelings: random labeling and four clustering mechanisms.
//!
//! Every mechanism stops the moment the case count reaches the target
//! `n_1`, so class sizes are fixed exactly as the tests condition on them.
//! Bernoulli probabilities outside `[0, 1]` are clamped and counted.

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spatial::{NnStructure, Point, PointSet};

/// Random-order passes over all points before a sweep labeler gives up.
const MAX_SWEEPS: usize = 1_000_000;

/// Chain steps per point before the chain labeler gives up.
const CHAIN_STEPS_PER_POINT: usize = 1_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LabelingSpec {
    /// Uniformly random `n_1`-subset of cases.
    RandomLabeling,
    /// Random anchors become cases; the `j`-th of their `k` NNs follows with
    /// probability `n_1/n + (rho/j)(1 - n_1/n)`.
    NnContagion { rho: f64, k: usize },
    /// `floor(pi_i n)` seed cases, then a chain walk: the `j`-th of the
    /// current point's `k` NNs becomes a case with probability `rho/j` and
    /// the walk moves to one of them at random.
    ChainContagion { pi_i: f64, pi_u: f64, rho: f64, k: usize },
    /// Sweeps around one random anchor case with probability
    /// `(rho/k_d)(1 - d/d_max)^k_p`.
    DistanceDecay { rho: f64, k_d: f64, k_p: f64 },
    /// Sweeps with probability proportional to a sum of circular Gaussian
    /// densities centred on `k0` random source points.
    GaussianSources { k0: usize, sigma: f64 },
}

impl LabelingSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidSpec(msg.to_string()));
        match *self {
            LabelingSpec::RandomLabeling => Ok(()),
            LabelingSpec::NnContagion { rho, k } => {
                if !rho.is_finite() {
                    return bad("rho must be finite");
                }
                if k == 0 {
                    return bad("k must be >= 1");
                }
                Ok(())
            }
            LabelingSpec::ChainContagion { pi_i, pi_u, rho, k } => {
                if !(0.0..=1.0).contains(&pi_i) || !(0.0..=1.0).contains(&pi_u) || pi_i >= pi_u {
                    return bad("need 0 <= pi_i < pi_u <= 1");
                }
                if !rho.is_finite() {
                    return bad("rho must be finite");
                }
                if k == 0 {
                    return bad("k must be >= 1");
                }
                Ok(())
            }
            LabelingSpec::DistanceDecay { rho, k_d, k_p } => {
                if !rho.is_finite() {
                    return bad("rho must be finite");
                }
                if !(k_d >= 1.0 && k_d.is_finite()) {
                    return bad("k_d must be >= 1");
                }
                if !(k_p > 0.0 && k_p.is_finite()) {
                    return bad("k_p must be > 0");
                }
                Ok(())
            }
            LabelingSpec::GaussianSources { k0, sigma } => {
                if k0 == 0 {
                    return bad("k0 must be >= 1");
                }
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return bad("sigma must be > 0");
                }
                Ok(())
            }
        }
    }

    /// Neighbor-list depth the mechanism reads.
    pub fn depth(&self) -> usize {
        match *self {
            LabelingSpec::NnContagion { k, .. } | LabelingSpec::ChainContagion { k, .. } => k,
            _ => 0,
        }
    }

    pub fn is_random_labeling(&self) -> bool {
        matches!(self, LabelingSpec::RandomLabeling)
    }
}

/// Case flags from one labeling run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelOutcome {
    pub is_case: Vec<bool>,
    /// Probabilities that fell outside `[0, 1]` and were clamped.
    pub clamped: usize,
}

impl LabelOutcome {
    /// Class labels with cases as class 0 and controls as class 1.
    pub fn labels(&self) -> Vec<usize> {
        self.is_case.iter().map(|&c| usize::from(!c)).collect()
    }
}

fn check_target(n: usize, n1: usize) -> Result<()> {
    if n1 == 0 || n1 >= n {
        return Err(Error::DegenerateLabeling(format!("{n1} cases among {n} points")));
    }
    Ok(())
}

fn random_mask<R: Rng + ?Sized>(n: usize, n1: usize, rng: &mut R) -> Vec<bool> {
    let mut mask = vec![false; n];
    for i in index::sample(rng, n, n1) {
        mask[i] = true;
    }
    mask
}

/// Uniformly random labeling with `n1` cases.
pub fn random_labeling<R: Rng + ?Sized>(points: &[Point], n1: usize, rng: &mut R) -> Result<PointSet> {
    check_target(points.len(), n1)?;
    let mask = random_mask(points.len(), n1, rng);
    PointSet::from_case_mask(points.to_vec(), &mask)
}

struct Marker {
    is_case: Vec<bool>,
    cases: Vec<usize>,
    target: usize,
    clamped: usize,
}

impl Marker {
    fn new(n: usize, target: usize) -> Self {
        Marker {
            is_case: vec![false; n],
            cases: Vec::with_capacity(target),
            target,
            clamped: 0,
        }
    }

    /// Makes `i` a case unless the target is met; returns whether it is.
    fn mark(&mut self, i: usize) -> bool {
        if !self.is_case[i] && !self.done() {
            self.is_case[i] = true;
            self.cases.push(i);
        }
        self.done()
    }

    fn done(&self) -> bool {
        self.cases.len() >= self.target
    }

    fn clamp(&mut self, p: f64) -> f64 {
        if !(0.0..=1.0).contains(&p) {
            self.clamped += 1;
        }
        p.clamp(0.0, 1.0)
    }

    fn finish(self) -> LabelOutcome {
        LabelOutcome {
            is_case: self.is_case,
            clamped: self.clamped,
        }
    }

    fn stalled(&self, sweeps: usize) -> Error {
        Error::LabelingStalled {
            sweeps,
            cases: self.cases.len(),
            target: self.target,
        }
    }
}

/// Repeated random-order Bernoulli passes over the non-cases.
fn sweep<R: Rng + ?Sized>(mut marker: Marker, probs: &[f64], rng: &mut R) -> Result<LabelOutcome> {
    // points that are controls with positive probability; others never change
    let mut active: Vec<usize> = (0..probs.len())
        .filter(|&i| !marker.is_case[i] && probs[i] > 0.0)
        .collect();
    for s in 0..MAX_SWEEPS {
        if marker.done() {
            return Ok(marker.finish());
        }
        if active.is_empty() {
            return Err(marker.stalled(s));
        }
        active.shuffle(rng);
        for &i in &active {
            if rng.random::<f64>() < probs[i] && marker.mark(i) {
                return Ok(marker.finish());
            }
        }
        active.retain(|&i| !marker.is_case[i]);
    }
    Err(marker.stalled(MAX_SWEEPS))
}

/// Clustered (non-RL) labeling with `n1` cases under `spec`.
pub fn label_non_rl<R: Rng + ?Sized>(
    points: &[Point],
    structure: &NnStructure,
    spec: &LabelingSpec,
    n1: usize,
    rng: &mut R,
) -> Result<LabelOutcome> {
    spec.validate()?;
    let n = points.len();
    if structure.n() != n {
        return Err(Error::Inconsistent(format!(
            "{n} points but structure over {}",
            structure.n()
        )));
    }
    check_target(n, n1)?;
    if spec.depth() > structure.k_max() {
        return Err(Error::DepthExceeded {
            k: spec.depth(),
            depth: structure.k_max(),
        });
    }
    let mut marker = Marker::new(n, n1);

    match *spec {
        LabelingSpec::RandomLabeling => Ok(LabelOutcome {
            is_case: random_mask(n, n1, rng),
            clamped: 0,
        }),
        LabelingSpec::NnContagion { rho, k } => {
            let base = n1 as f64 / n as f64;
            let rounds = CHAIN_STEPS_PER_POINT * n;
            for _ in 0..rounds {
                let anchor = rng.random_range(0..n);
                if marker.mark(anchor) {
                    return Ok(marker.finish());
                }
                for (j, &t) in structure.row(anchor, k).iter().enumerate() {
                    let p = marker.clamp(base + rho / (j + 1) as f64 * (1.0 - base));
                    if rng.random::<f64>() < p && marker.mark(t) {
                        return Ok(marker.finish());
                    }
                }
            }
            Err(marker.stalled(rounds))
        }
        LabelingSpec::ChainContagion { pi_i, rho, k, .. } => {
            let seeds = ((pi_i * n as f64).floor() as usize).clamp(1, n1);
            for i in index::sample(rng, n, seeds) {
                if marker.mark(i) {
                    return Ok(marker.finish());
                }
            }
            let probs: Vec<f64> = (1..=k).map(|j| marker.clamp(rho / j as f64)).collect();
            let steps = CHAIN_STEPS_PER_POINT * n;
            let mut current = marker.cases[rng.random_range(0..marker.cases.len())];
            for _ in 0..steps {
                let nbrs = structure.row(current, k);
                if nbrs.iter().all(|&t| marker.is_case[t]) {
                    current = escape(&marker, structure, k, rng);
                    continue;
                }
                for (&t, &p) in nbrs.iter().zip(&probs) {
                    if rng.random::<f64>() < p && marker.mark(t) {
                        return Ok(marker.finish());
                    }
                }
                current = nbrs[rng.random_range(0..k)];
            }
            Err(marker.stalled(steps))
        }
        LabelingSpec::DistanceDecay { rho, k_d, k_p } => {
            let anchor = rng.random_range(0..n);
            marker.mark(anchor);
            let a = points[anchor];
            let d_max = points.iter().map(|p| p.dist(&a)).fold(0.0, f64::max);
            let probs: Vec<f64> = points
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    if j == anchor {
                        return 0.0;
                    }
                    let ratio = if d_max > 0.0 { p.dist(&a) / d_max } else { 0.0 };
                    marker.clamp(rho / k_d * (1.0 - ratio).powf(k_p))
                })
                .collect();
            sweep(marker, &probs, rng)
        }
        LabelingSpec::GaussianSources { k0, sigma } => {
            if k0 > n {
                return Err(Error::InvalidSpec(format!("{k0} sources among {n} points")));
            }
            let sources: Vec<Point> = index::sample(rng, n, k0).iter().map(|i| points[i]).collect();
            let norm = 1.0 / (std::f64::consts::TAU * sigma * sigma);
            let score: Vec<f64> = points
                .iter()
                .map(|p| {
                    sources
                        .iter()
                        .map(|s| norm * (-p.dist2(s) / (2.0 * sigma * sigma)).exp())
                        .sum()
                })
                .collect();
            let p_max = score.iter().copied().fold(0.0, f64::max);
            let probs: Vec<f64> = score
                .iter()
                .map(|&g| marker.clamp(if p_max > 0.0 { g / p_max } else { 0.0 }))
                .collect();
            sweep(marker, &probs, rng)
        }
    }
}

/// Restart point for a chain whose current neighborhood is all cases: a random
/// case with a non-case neighbor, or a random control if the case set is
/// closed under the k-NN relation.
fn escape<R: Rng + ?Sized>(marker: &Marker, structure: &NnStructure, k: usize, rng: &mut R) -> usize {
    let frontier: Vec<usize> = marker
        .cases
        .iter()
        .copied()
        .filter(|&c| structure.row(c, k).iter().any(|&t| !marker.is_case[t]))
        .collect();
    if !frontier.is_empty() {
        return frontier[rng.random_range(0..frontier.len())];
    }
    let controls: Vec<usize> = (0..marker.is_case.len()).filter(|&i| !marker.is_case[i]).collect();
    controls[rng.random_range(0..controls.len())]
}
