//! Monte Carlo and exhaustive randomization inference.
//!
//! Labels are permuted over the fixed locations, keeping class sizes. The
//! p-value counts permuted labelings whose statistic is at least as extreme
//! as the observed one. Permutation `i` always uses substream `i` of the
//! plan's seed, and counts are integers, so results do not depend on the
//! degree of parallelism.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::battery::{randomization_score, Battery, Family, TestId};
use crate::dist::Alternative;
use crate::error::{Error, Result};
use crate::nntest::TestResult;
use crate::oracle::{check_budget, for_each_labeling};
use crate::rng::{substream, Domain};
use crate::spatial::{NnStructure, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanMode {
    Sampled,
    /// Every distinct labeling once; needs at most `ORACLE_BUDGET` of them.
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PValueConvention {
    /// `count / N` over fresh permutations only.
    #[default]
    ExcludeObserved,
    /// `(count + 1) / (N + 1)`, counting the observed labeling.
    AddOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomizationPlan {
    pub n_permutations: usize,
    pub seed: u64,
    pub mode: PlanMode,
    pub convention: PValueConvention,
}

impl RandomizationPlan {
    pub fn sampled(n_permutations: usize, seed: u64) -> Self {
        RandomizationPlan {
            n_permutations,
            seed,
            mode: PlanMode::Sampled,
            convention: PValueConvention::ExcludeObserved,
        }
    }

    pub fn exhaustive() -> Self {
        RandomizationPlan {
            n_permutations: 0,
            seed: 0,
            mode: PlanMode::Exhaustive,
            convention: PValueConvention::ExcludeObserved,
        }
    }
}

/// Per-test randomization p-values, `None` where the observed statistic is
/// unavailable.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomizationOutcome {
    pub pvalues: Vec<Option<f64>>,
    /// Labelings that produced a value, per test.
    pub n_valid: Vec<u64>,
    /// Labelings drawn or enumerated.
    pub n_labelings: u64,
}

#[derive(Debug, Clone, Copy)]
struct Target {
    score: f64,
    alternative: Alternative,
}

impl Target {
    fn at_least_as_extreme(&self, x: f64) -> bool {
        let (x, obs) = match self.alternative {
            Alternative::Right => (x, self.score),
            Alternative::Left => (-x, -self.score),
            Alternative::TwoSided => (x.abs(), self.score.abs()),
        };
        if obs.is_finite() {
            // tables with equal statistics can differ in the last bits
            x >= obs - 1e-12 * obs.abs().max(1.0)
        } else {
            x >= obs
        }
    }
}

fn targets(battery: &Battery<'_>, observed: &[Result<TestResult>]) -> Vec<Option<Target>> {
    battery
        .tests()
        .iter()
        .zip(observed)
        .map(|(id, r)| {
            let r = r.as_ref().ok()?;
            let score = randomization_score(id, r)?;
            if score.is_nan() {
                return None;
            }
            let alternative = if id.family() == Family::ChiSquare {
                Alternative::Right
            } else {
                battery.alternative()
            };
            Some(Target { score, alternative })
        })
        .collect()
}

#[derive(Debug, Clone)]
struct Tally {
    extreme: Vec<u64>,
    valid: Vec<u64>,
}

impl Tally {
    fn new(d: usize) -> Self {
        Tally {
            extreme: vec![0; d],
            valid: vec![0; d],
        }
    }

    fn add(&mut self, battery: &Battery<'_>, targets: &[Option<Target>], labels: &[usize]) {
        for (t, (id, r)) in battery
            .tests()
            .iter()
            .zip(battery.evaluate_unchecked(labels))
            .enumerate()
        {
            let (Some(target), Ok(r)) = (&targets[t], r) else {
                continue;
            };
            let Some(x) = randomization_score(id, &r).filter(|x| !x.is_nan()) else {
                continue;
            };
            self.valid[t] += 1;
            if target.at_least_as_extreme(x) {
                self.extreme[t] += 1;
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.extreme.iter_mut().zip(other.extreme) {
            *a += b;
        }
        for (a, b) in self.valid.iter_mut().zip(other.valid) {
            *a += b;
        }
        self
    }
}

/// Randomization p-values for every test of `battery` at `observed` labels.
pub fn battery_pvalues(
    battery: &Battery<'_>,
    observed: &[usize],
    plan: &RandomizationPlan,
) -> Result<RandomizationOutcome> {
    let first = battery.evaluate(observed)?;
    let targets = targets(battery, &first);
    let d = targets.len();

    let (tally, n_labelings) = match plan.mode {
        PlanMode::Sampled => {
            if plan.n_permutations == 0 {
                return Err(Error::InvalidSpec("at least one permutation is required".into()));
            }
            let tally = (0..plan.n_permutations as u64)
                .into_par_iter()
                .fold(
                    || (Tally::new(d), observed.to_vec()),
                    |(mut tally, mut labels), i| {
                        labels.copy_from_slice(observed);
                        labels.shuffle(&mut substream(plan.seed, Domain::Permutation, i));
                        tally.add(battery, &targets, &labels);
                        (tally, labels)
                    },
                )
                .map(|(t, _)| t)
                .reduce(|| Tally::new(d), Tally::merge);
            (tally, plan.n_permutations as u64)
        }
        PlanMode::Exhaustive => {
            let count = check_budget(battery.class_sizes())?;
            let mut tally = Tally::new(d);
            for_each_labeling(battery.class_sizes(), |labels| tally.add(battery, &targets, labels));
            (tally, count as u64)
        }
    };

    let pvalues = (0..d)
        .map(|t| {
            targets[t]?;
            let (k, n) = (tally.extreme[t] as f64, tally.valid[t] as f64);
            match plan.convention {
                PValueConvention::ExcludeObserved if n > 0.0 => Some(k / n),
                PValueConvention::ExcludeObserved => None,
                PValueConvention::AddOne => Some((k + 1.0) / (n + 1.0)),
            }
        })
        .collect();
    Ok(RandomizationOutcome {
        pvalues,
        n_valid: tally.valid,
        n_labelings,
    })
}

/// Randomization p-values of `tests` for the labeled `points`.
pub fn randomization_pvalues(
    points: &PointSet,
    structure: &NnStructure,
    tests: &[TestId],
    alternative: Alternative,
    plan: &RandomizationPlan,
) -> Result<Vec<(TestId, Option<f64>)>> {
    let battery = Battery::new(structure, points.class_sizes(), tests, alternative)?;
    let outcome = battery_pvalues(&battery, points.labels(), plan)?;
    Ok(tests.iter().cloned().zip(outcome.pvalues).collect())
}

/// Empirical `level` quantile with linear interpolation between order
/// statistics (`h = (N - 1) level`).
pub fn empirical_critical_value(null_sample: &[f64], level: f64) -> Result<f64> {
    if null_sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(0.0..=1.0).contains(&level) {
        return Err(Error::InvalidSpec(format!("quantile level {level} outside [0, 1]")));
    }
    if null_sample.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidSpec("null sample contains NaN".into()));
    }
    let mut x = null_sample.to_vec();
    x.sort_by(f64::total_cmp);
    let h = (x.len() - 1) as f64 * level;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(x.len() - 1);
    let frac = h - lo as f64;
    let (a, b) = (x[lo], x[hi]);
    Ok(if frac == 0.0 || a == b {
        a
    } else if b.is_infinite() {
        b
    } else if a.is_infinite() {
        a
    } else {
        a + frac * (b - a)
    })
}
