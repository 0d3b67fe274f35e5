//! Size and power campaigns.
//!
//! A campaign draws `n_backgrounds` location sets, labels each
//! `n_replications` times, evaluates every requested test on every labeling
//! and reports rejection proportions. Background `b` uses stream `b` and
//! replicate `r` of it uses stream `(b, r)`, so results are independent of
//! the number of worker threads.

pub mod config;
pub mod report;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::battery::{Battery, Family, TestId};
use crate::dist::{chisq_quantile, normal_quantile, Alternative};
use crate::error::{Error, Result};
use crate::nntest::TestResult;
use crate::patterns::{generate_background, label_non_rl, BackgroundSpec, LabelingSpec};
use crate::randomization::empirical_critical_value;
use crate::rng::{replicate_index, substream, Domain};
use crate::spatial::{build_nn_structure, Point, DEFAULT_K_MAX};

pub use config::{load_campaigns, parse_campaigns, Scenario};
pub use report::write_results_csv;

/// Number of cases per background.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CaseCount {
    /// `floor(n/2)` cases.
    #[default]
    Half,
    Count(usize),
}

impl CaseCount {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            CaseCount::Half => n / 2,
            CaseCount::Count(c) => c,
        }
    }
}

impl Serialize for CaseCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CaseCount::Half => s.serialize_str("half"),
            CaseCount::Count(c) => s.serialize_u64(*c as u64),
        }
    }
}

impl<'de> Deserialize<'de> for CaseCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(usize),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(c) => Ok(CaseCount::Count(c)),
            Raw::Word(w) if w == "half" => Ok(CaseCount::Half),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "cases must be a count or \"half\", found \"{w}\""
            ))),
        }
    }
}

/// Where rejection thresholds come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum CriticalValues {
    /// Normal and chi-square quantiles.
    #[default]
    Asymptotic,
    /// Empirical quantiles from a reference random-labeling campaign on
    /// fresh backgrounds of the same kind.
    MonteCarlo {
        n_backgrounds: usize,
        n_replications: usize,
    },
}

/// Asymptotic one-sided z threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZConvention {
    /// One-sided tests use the two-sided threshold (1.96 at 0.95).
    #[default]
    TwoSided,
    /// One-sided tests use the `level` quantile (1.645 at 0.95).
    Quantile,
}

/// Degrees of freedom for the overall chi-square thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChisqDf {
    /// `m(m-1)` for the Dixon test and `(m-1)^2` for type III.
    #[default]
    Standard,
    /// The two assignments exchanged.
    Swapped,
}

fn default_backgrounds() -> usize {
    20
}

fn default_replications() -> usize {
    500
}

fn default_level() -> f64 {
    0.95
}

fn default_alternatives() -> Vec<Alternative> {
    vec![Alternative::Right]
}

fn default_labeling() -> LabelingSpec {
    LabelingSpec::RandomLabeling
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Campaign {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_backgrounds")]
    pub n_backgrounds: usize,
    #[serde(default = "default_replications")]
    pub n_replications: usize,
    /// Quantile level of the critical values; the nominal size is
    /// `1 - level`.
    #[serde(default = "default_level")]
    pub level: f64,
    #[serde(default = "default_alternatives")]
    pub alternatives: Vec<Alternative>,
    #[serde(default)]
    pub critical_values: CriticalValues,
    #[serde(default)]
    pub z_convention: ZConvention,
    #[serde(default)]
    pub chisq_df: ChisqDf,
    pub tests: Vec<TestId>,
    #[serde(default)]
    pub cases: CaseCount,
    /// Minimum neighbor depth precomputed per background.
    #[serde(default)]
    pub k_max: Option<usize>,
    pub background: BackgroundSpec,
    #[serde(default = "default_labeling")]
    pub labeling: LabelingSpec,
}

impl Campaign {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.n_backgrounds == 0 || self.n_replications == 0 {
            return bad("n_backgrounds and n_replications must be >= 1".into());
        }
        if let CriticalValues::MonteCarlo {
            n_backgrounds,
            n_replications,
        } = self.critical_values
        {
            if n_backgrounds == 0 || n_replications == 0 {
                return bad("reference campaign counts must be >= 1".into());
            }
        }
        if self.n_backgrounds > u32::MAX as usize || self.n_replications >= u32::MAX as usize {
            return bad("campaign counts exceed the stream index range".into());
        }
        if !(self.level > 0.0 && self.level <= 1.0) {
            return bad(format!("level must lie in (0, 1], got {}", self.level));
        }
        if self.tests.is_empty() {
            return bad("no tests requested".into());
        }
        if self.alternatives.is_empty() {
            return bad("no alternatives requested".into());
        }
        if self.cases == CaseCount::Count(0) {
            return bad("cases must be >= 1".into());
        }
        self.background.validate()?;
        self.labeling.validate()
    }

    /// Nominal size `1 - level`.
    pub fn nominal_size(&self) -> f64 {
        1.0 - self.level
    }

    /// Whether labelings follow the random-labeling null, so that rejection
    /// rates are sizes and get a null-band verdict.
    pub fn is_null(&self) -> bool {
        match self.labeling {
            LabelingSpec::RandomLabeling => true,
            LabelingSpec::NnContagion { rho, .. } => rho == 0.0,
            _ => false,
        }
    }

    fn depth(&self) -> usize {
        let tests = self.tests.iter().map(TestId::depth).max().unwrap_or(1);
        [DEFAULT_K_MAX, tests, self.labeling.depth(), self.k_max.unwrap_or(0)]
            .into_iter()
            .max()
            .unwrap_or(DEFAULT_K_MAX)
    }

    /// `(test, alternative)` pairs reported; chi-square tests are upper-tailed
    /// only.
    pub fn outcomes(&self) -> Vec<(TestId, Alternative)> {
        let mut out = Vec::new();
        for t in &self.tests {
            if t.family() == Family::ChiSquare {
                out.push((t.clone(), Alternative::Right));
            } else {
                for &a in &self.alternatives {
                    out.push((t.clone(), a));
                }
            }
        }
        out
    }
}

/// Two-sided band of rejection proportions consistent with true size
/// `size` over `n_replicates` replicates: `size -/+ z_0.95 sqrt(size(1-size)/N)`.
pub fn null_band(size: f64, n_replicates: usize) -> (f64, f64) {
    let half = normal_quantile(0.95) * (size * (1.0 - size) / n_replicates.max(1) as f64).sqrt();
    ((size - half).max(0.0), (size + half).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Within,
    Liberal,
    Conservative,
    NotApplicable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Within => "within",
            Verdict::Liberal => "liberal",
            Verdict::Conservative => "conservative",
            Verdict::NotApplicable => "NA",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub test: TestId,
    pub alternative: Alternative,
    pub critical_value: f64,
    pub rejections: u64,
    pub n_effective: u64,
    pub excluded: u64,
    pub estimate: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub band: Option<(f64, f64)>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignResult {
    pub rows: Vec<ResultRow>,
    /// `n_backgrounds * n_replications`.
    pub n_replicates: u64,
    /// Replicates whose labeling could not be produced.
    pub labeling_failures: u64,
    /// Clamped Bernoulli probabilities over all labelings.
    pub clamped: u64,
}

/// Value compared against the critical value for `test`.
fn decision_score(test: &TestId, r: &TestResult) -> Option<f64> {
    let v = match test.family() {
        Family::ChiSquare => r.chisq_value,
        Family::Index | Family::Normal => r.z_value,
    }?;
    (!v.is_nan()).then_some(v)
}

/// Per-outcome threshold and rejection rule.
#[derive(Debug, Clone, Copy)]
enum Rule {
    Above(f64),
    Below(f64),
    AbsAbove(f64),
}

impl Rule {
    fn rejects(self, x: f64) -> bool {
        match self {
            Rule::Above(c) => x > c,
            Rule::Below(c) => x < c,
            Rule::AbsAbove(c) => x.abs() > c,
        }
    }

    fn threshold(self) -> f64 {
        match self {
            Rule::Above(c) | Rule::Below(c) | Rule::AbsAbove(c) => c,
        }
    }
}

fn asymptotic_rule(campaign: &Campaign, test: &TestId, alt: Alternative, m: usize) -> Rule {
    let level = campaign.level;
    let two_sided = if level >= 1.0 {
        f64::INFINITY
    } else {
        normal_quantile(1.0 - (1.0 - level) / 2.0)
    };
    let one_sided = match campaign.z_convention {
        ZConvention::Quantile => normal_quantile(level),
        ZConvention::TwoSided => two_sided,
    };
    if test.family() == Family::ChiSquare {
        use crate::nntest::OverallVariant::{Dixon, Type3};
        let variant = if *test == TestId::OverallDixon { Dixon } else { Type3 };
        let variant = match (campaign.chisq_df, variant) {
            (ChisqDf::Standard, v) => v,
            (ChisqDf::Swapped, Dixon) => Type3,
            (ChisqDf::Swapped, Type3) => Dixon,
        };
        return Rule::Above(chisq_quantile(level, variant.df(m)));
    }
    match alt {
        Alternative::Right => Rule::Above(one_sided),
        Alternative::Left => Rule::Below(-one_sided),
        Alternative::TwoSided => Rule::AbsAbove(two_sided),
    }
}

fn monte_carlo_rule(sample: &[f64], level: f64, alt: Alternative) -> Result<Rule> {
    Ok(match alt {
        Alternative::Right => Rule::Above(empirical_critical_value(sample, level)?),
        Alternative::Left => Rule::Below(empirical_critical_value(sample, 1.0 - level)?),
        Alternative::TwoSided => {
            let abs: Vec<f64> = sample.iter().map(|x| x.abs()).collect();
            Rule::AbsAbove(empirical_critical_value(&abs, level)?)
        }
    })
}

/// Scores of every test on one replicate, `None` where unavailable.
type ReplicateScores = Option<Vec<Option<f64>>>;

struct BackgroundRun {
    scores: Vec<ReplicateScores>,
    clamped: u64,
}

/// Draws background `bg` from `domain` and evaluates all its replicates.
fn run_background(
    campaign: &Campaign,
    labeling: &LabelingSpec,
    domain: Domain,
    bg: u32,
    n_replications: usize,
) -> Result<BackgroundRun> {
    let mut bg_rng = substream(campaign.seed, domain, replicate_index(bg, u32::MAX));
    let points: Vec<Point> = generate_background(&campaign.background, &mut bg_rng)?;
    let n = points.len();
    let n1 = campaign.cases.resolve(n);
    let structure = build_nn_structure(&points, campaign.depth().min(n - 1))?;
    let failed = || BackgroundRun {
        scores: vec![None; n_replications],
        clamped: 0,
    };
    if n1 == 0 || n1 >= n {
        return Ok(failed());
    }
    let battery = Battery::new(&structure, &[n1, n - n1], &campaign.tests, Alternative::Right)?;

    let results: Vec<(ReplicateScores, u64)> = (0..n_replications as u32)
        .into_par_iter()
        .map(|rep| {
            let mut rng = substream(campaign.seed, domain, replicate_index(bg, rep));
            let Ok(outcome) = label_non_rl(&points, &structure, labeling, n1, &mut rng) else {
                return (None, 0);
            };
            let eval = battery.evaluate_unchecked(&outcome.labels());
            let scores = campaign
                .tests
                .iter()
                .zip(eval)
                .map(|(t, r)| r.ok().and_then(|r| decision_score(t, &r)))
                .collect();
            (Some(scores), outcome.clamped as u64)
        })
        .collect();
    Ok(BackgroundRun {
        clamped: results.iter().map(|r| r.1).sum(),
        scores: results.into_iter().map(|r| r.0).collect(),
    })
}

/// Thresholds from a random-labeling reference campaign.
fn reference_rules(campaign: &Campaign, n_backgrounds: usize, n_replications: usize) -> Result<Vec<Rule>> {
    let mut samples: Vec<Vec<f64>> = vec![Vec::new(); campaign.tests.len()];
    for bg in 0..n_backgrounds as u32 {
        let run = run_background(
            campaign,
            &LabelingSpec::RandomLabeling,
            Domain::Reference,
            bg,
            n_replications,
        )?;
        for scores in run.scores.into_iter().flatten() {
            for (t, s) in scores.into_iter().enumerate() {
                if let Some(s) = s {
                    samples[t].push(s);
                }
            }
        }
    }
    campaign
        .outcomes()
        .iter()
        .map(|(test, alt)| {
            let t = campaign
                .tests
                .iter()
                .position(|x| x == test)
                .expect("outcome from tests");
            if samples[t].is_empty() {
                return Err(Error::Degenerate(format!(
                    "{test} undefined on every reference replicate"
                )));
            }
            monte_carlo_rule(&samples[t], campaign.level, *alt)
        })
        .collect()
}

/// Runs `campaign` and aggregates rejection proportions.
pub fn run_campaign(campaign: &Campaign) -> Result<CampaignResult> {
    campaign.validate()?;
    let outcomes = campaign.outcomes();
    let rules: Vec<Rule> = match campaign.critical_values {
        CriticalValues::Asymptotic => outcomes
            .iter()
            .map(|(t, a)| asymptotic_rule(campaign, t, *a, 2))
            .collect(),
        CriticalValues::MonteCarlo {
            n_backgrounds,
            n_replications,
        } => reference_rules(campaign, n_backgrounds, n_replications)?,
    };
    let test_index: Vec<usize> = outcomes
        .iter()
        .map(|(t, _)| campaign.tests.iter().position(|x| x == t).expect("outcome from tests"))
        .collect();

    let mut rejections = vec![0u64; outcomes.len()];
    let mut valid = vec![0u64; outcomes.len()];
    let mut labeling_failures = 0u64;
    let mut clamped = 0u64;
    for bg in 0..campaign.n_backgrounds as u32 {
        let run = run_background(
            campaign,
            &campaign.labeling,
            Domain::Replicate,
            bg,
            campaign.n_replications,
        )?;
        clamped += run.clamped;
        for scores in &run.scores {
            let Some(scores) = scores else {
                labeling_failures += 1;
                continue;
            };
            for (o, rule) in rules.iter().enumerate() {
                if let Some(x) = scores[test_index[o]] {
                    valid[o] += 1;
                    if rule.rejects(x) {
                        rejections[o] += 1;
                    }
                }
            }
        }
    }

    let n_replicates = (campaign.n_backgrounds * campaign.n_replications) as u64;
    let size = campaign.nominal_size();
    let rows = outcomes
        .into_iter()
        .enumerate()
        .map(|(o, (test, alternative))| {
            let n_eff = valid[o];
            let estimate = (n_eff > 0).then(|| rejections[o] as f64 / n_eff as f64);
            let mc_stderr = estimate.map(|p| (p * (1.0 - p) / n_eff as f64).sqrt());
            let band = (campaign.is_null() && n_eff > 0).then(|| null_band(size, n_eff as usize));
            let verdict = match (band, estimate) {
                (Some((_, hi)), Some(p)) if p > hi => Verdict::Liberal,
                (Some((lo, _)), Some(p)) if p < lo => Verdict::Conservative,
                (Some(_), Some(_)) => Verdict::Within,
                _ => Verdict::NotApplicable,
            };
            ResultRow {
                test,
                alternative,
                critical_value: rules[o].threshold(),
                rejections: rejections[o],
                n_effective: n_eff,
                excluded: n_replicates - n_eff,
                estimate,
                mc_stderr,
                band,
                verdict,
            }
        })
        .collect();
    Ok(CampaignResult {
        rows,
        n_replicates,
        labeling_failures,
        clamped,
    })
}
