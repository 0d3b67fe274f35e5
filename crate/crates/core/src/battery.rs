//! Many tests, many labelings, one location set.
//!
//! Under random labeling of fixed locations with fixed class sizes, every
//! null moment and generalized inverse is the same for all labelings, so a
//! [`Battery`] computes them once and then evaluates labelings with only an
//! NNCT count and a few dot products.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::dist::{z_pvalue, Alternative};
use crate::error::{Error, Result};
use crate::indices::{dixon_index, dixon_index_corrected, pielou_s, IndexValue, PielouFramework};
use crate::moments::{rl_moments, RlMoments};
use crate::nnct::Nnct;
use crate::nntest::cell::{type3_cell, type3_covariance, type3_statistics};
use crate::nntest::cuzick::{combination_weights, combined_test, cuzick_statistics, single_test};
use crate::nntest::overall::{overall_deviation, overall_from_pinv, overall_pinv};
use crate::nntest::{dixon_cell_test, CuzickMoments, OverallVariant, TestResult};
use crate::spatial::{class_sizes, NnStructure};

/// A test and its parameterization. Cells and classes are 0-based here and
/// 1-based in the textual form (`dixon-cell:12` is cell (1,2)).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TestId {
    Pielou,
    DixonIndex(usize, usize),
    DixonIndexCorrected(usize, usize),
    DixonCell(usize, usize),
    Type3Cell(usize, usize),
    OverallDixon,
    OverallType3,
    CuzickEdwards(usize),
    CuzickEdwardsCombined(Vec<usize>),
}

/// How a test's result is ordered when compared against a null sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Segregation index; its value is compared directly.
    Index,
    /// Compared through the z-score.
    Normal,
    /// Compared through the chi-square value; always upper-tailed.
    ChiSquare,
}

impl TestId {
    pub fn family(&self) -> Family {
        match self {
            TestId::Pielou | TestId::DixonIndex(..) | TestId::DixonIndexCorrected(..) => Family::Index,
            TestId::OverallDixon | TestId::OverallType3 => Family::ChiSquare,
            _ => Family::Normal,
        }
    }

    /// Every test for `m` classes with Cuzick-Edwards depths `1..=knn`.
    pub fn full_battery(m: usize, knn: usize) -> Vec<TestId> {
        let mut out = Vec::new();
        if m == 2 {
            out.push(TestId::Pielou);
        }
        let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
        out.extend(cells.iter().map(|&(i, j)| TestId::DixonIndex(i, j)));
        out.extend(cells.iter().map(|&(i, j)| TestId::DixonIndexCorrected(i, j)));
        out.extend(cells.iter().map(|&(i, j)| TestId::DixonCell(i, j)));
        out.extend(cells.iter().map(|&(i, j)| TestId::Type3Cell(i, j)));
        out.push(TestId::OverallDixon);
        out.push(TestId::OverallType3);
        out.extend((1..=knn).map(TestId::CuzickEdwards));
        if knn >= 2 {
            out.push(TestId::CuzickEdwardsCombined((1..=knn).collect()));
        }
        out
    }

    /// Deepest neighbor list the test reads.
    pub fn depth(&self) -> usize {
        match self {
            TestId::CuzickEdwards(k) => *k,
            TestId::CuzickEdwardsCombined(ks) => ks.iter().copied().max().unwrap_or(1),
            _ => 1,
        }
    }

    fn cell(&self) -> Option<(usize, usize)> {
        match *self {
            TestId::DixonIndex(i, j)
            | TestId::DixonIndexCorrected(i, j)
            | TestId::DixonCell(i, j)
            | TestId::Type3Cell(i, j) => Some((i, j)),
            _ => None,
        }
    }
}

fn fmt_cell(f: &mut fmt::Formatter<'_>, name: &str, i: usize, j: usize) -> fmt::Result {
    if i < 9 && j < 9 {
        write!(f, "{name}:{}{}", i + 1, j + 1)
    } else {
        write!(f, "{name}:{},{}", i + 1, j + 1)
    }
}

impl fmt::Display for TestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestId::Pielou => f.write_str("pielou"),
            TestId::DixonIndex(i, j) => fmt_cell(f, "dixon-index", *i, *j),
            TestId::DixonIndexCorrected(i, j) => fmt_cell(f, "dixon-index-corrected", *i, *j),
            TestId::DixonCell(i, j) => fmt_cell(f, "dixon-cell", *i, *j),
            TestId::Type3Cell(i, j) => fmt_cell(f, "type3-cell", *i, *j),
            TestId::OverallDixon => f.write_str("overall-dixon"),
            TestId::OverallType3 => f.write_str("overall-type3"),
            TestId::CuzickEdwards(k) => write!(f, "cuzick-edwards:{k}"),
            TestId::CuzickEdwardsCombined(ks) => {
                let parts: Vec<String> = ks.iter().map(|k| k.to_string()).collect();
                write!(f, "cuzick-edwards-combined:{}", parts.join(","))
            }
        }
    }
}

fn parse_positive(s: &str, whole: &str) -> Result<usize> {
    match s.trim().parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(Error::UnknownTest(whole.to_string())),
    }
}

fn parse_cell(arg: &str, whole: &str) -> Result<(usize, usize)> {
    let (a, b) = if let Some((a, b)) = arg.split_once(',') {
        (a, b)
    } else if arg.len() == 2 && arg.is_ascii() {
        arg.split_at(1)
    } else {
        return Err(Error::UnknownTest(whole.to_string()));
    };
    Ok((parse_positive(a, whole)? - 1, parse_positive(b, whole)? - 1))
}

impl FromStr for TestId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let need = || arg.ok_or_else(|| Error::UnknownTest(s.to_string()));
        Ok(match name {
            "pielou" if arg.is_none() => TestId::Pielou,
            "overall-dixon" if arg.is_none() => TestId::OverallDixon,
            "overall-type3" if arg.is_none() => TestId::OverallType3,
            "dixon-index" => {
                let (i, j) = parse_cell(need()?, s)?;
                TestId::DixonIndex(i, j)
            }
            "dixon-index-corrected" => {
                let (i, j) = parse_cell(need()?, s)?;
                TestId::DixonIndexCorrected(i, j)
            }
            "dixon-cell" => {
                let (i, j) = parse_cell(need()?, s)?;
                TestId::DixonCell(i, j)
            }
            "type3-cell" => {
                let (i, j) = parse_cell(need()?, s)?;
                TestId::Type3Cell(i, j)
            }
            "cuzick-edwards" => TestId::CuzickEdwards(parse_positive(need()?, s)?),
            "cuzick-edwards-combined" => {
                let ks = need()?
                    .split(',')
                    .map(|k| parse_positive(k, s))
                    .collect::<Result<Vec<_>>>()?;
                TestId::CuzickEdwardsCombined(ks)
            }
            _ => return Err(Error::UnknownTest(s.to_string())),
        })
    }
}

impl serde::Serialize for TestId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for TestId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone)]
enum Prepared {
    Pielou,
    DixonIndex {
        i: usize,
        j: usize,
        corrected: bool,
    },
    DixonCell {
        i: usize,
        j: usize,
    },
    Type3Cell {
        i: usize,
        j: usize,
        var: f64,
        scale: f64,
    },
    Overall {
        variant: OverallVariant,
        pinv: DMatrix<f64>,
        df: usize,
    },
    Cuzick {
        moments: CuzickMoments,
        weights: Option<Vec<f64>>,
    },
}

/// Null quantities for a fixed set of tests, locations and class sizes.
#[derive(Debug, Clone)]
pub struct Battery<'a> {
    structure: &'a NnStructure,
    class_sizes: Vec<usize>,
    tests: Vec<TestId>,
    alternative: Alternative,
    moments: Option<RlMoments>,
    prepared: Vec<std::result::Result<Prepared, Error>>,
}

impl<'a> Battery<'a> {
    /// Precomputes everything `tests` need. Failures that depend only on the
    /// locations and class sizes are kept per test and returned from every
    /// [`Battery::evaluate`].
    pub fn new(
        structure: &'a NnStructure,
        class_sizes: &[usize],
        tests: &[TestId],
        alternative: Alternative,
    ) -> Result<Self> {
        let n: usize = class_sizes.iter().sum();
        if n != structure.n() {
            return Err(Error::Inconsistent(format!(
                "class sizes sum to {n}, structure has {} points",
                structure.n()
            )));
        }
        let m = class_sizes.len();
        let needs_moments = tests
            .iter()
            .any(|t| !matches!(t, TestId::CuzickEdwards(_) | TestId::CuzickEdwardsCombined(_)));
        let moments = if needs_moments {
            Some(rl_moments(structure, class_sizes))
        } else {
            None
        };
        let type3_cov = match &moments {
            Some(Ok(mo)) if tests.iter().any(|t| matches!(t, TestId::Type3Cell(..))) => Some(type3_covariance(mo)),
            _ => None,
        };

        let prepared = tests
            .iter()
            .map(|test| {
                if let Some((i, j)) = test.cell() {
                    if i >= m || j >= m {
                        return Err(Error::InvalidSpec(format!(
                            "{test} needs at least {} classes",
                            i.max(j) + 1
                        )));
                    }
                }
                let mo = || match &moments {
                    Some(Ok(mo)) => Ok(mo),
                    Some(Err(e)) => Err(e.clone()),
                    None => unreachable!("moments requested for every non-Cuzick test"),
                };
                Ok(match test {
                    TestId::Pielou => {
                        mo()?;
                        Prepared::Pielou
                    }
                    // the index value needs no moments; only its standard error does
                    TestId::DixonIndex(i, j) => Prepared::DixonIndex {
                        i: *i,
                        j: *j,
                        corrected: false,
                    },
                    TestId::DixonIndexCorrected(i, j) => Prepared::DixonIndex {
                        i: *i,
                        j: *j,
                        corrected: true,
                    },
                    TestId::DixonCell(i, j) => {
                        mo()?;
                        Prepared::DixonCell { i: *i, j: *j }
                    }
                    TestId::Type3Cell(i, j) => {
                        let e = mo()?.expected(*i, *j);
                        let cov = type3_cov.as_ref().expect("type III covariance prepared");
                        let a = i * m + j;
                        Prepared::Type3Cell {
                            i: *i,
                            j: *j,
                            var: cov[(a, a)],
                            scale: e * e,
                        }
                    }
                    TestId::OverallDixon | TestId::OverallType3 => {
                        let variant = if *test == TestId::OverallDixon {
                            OverallVariant::Dixon
                        } else {
                            OverallVariant::Type3
                        };
                        Prepared::Overall {
                            variant,
                            pinv: overall_pinv(mo()?, variant)?,
                            df: variant.df(m),
                        }
                    }
                    TestId::CuzickEdwards(k) => Prepared::Cuzick {
                        moments: CuzickMoments::new(structure, class_sizes[0], &[*k])?,
                        weights: None,
                    },
                    TestId::CuzickEdwardsCombined(ks) => {
                        let moments = CuzickMoments::new(structure, class_sizes[0], ks)?;
                        let weights = combination_weights(&moments)?;
                        Prepared::Cuzick {
                            moments,
                            weights: Some(weights),
                        }
                    }
                })
            })
            .collect();

        Ok(Battery {
            structure,
            class_sizes: class_sizes.to_vec(),
            tests: tests.to_vec(),
            alternative,
            moments: moments.and_then(|m| m.ok()),
            prepared,
        })
    }

    pub fn tests(&self) -> &[TestId] {
        &self.tests
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    pub fn alternative(&self) -> Alternative {
        self.alternative
    }

    pub fn structure(&self) -> &NnStructure {
        self.structure
    }

    pub fn moments(&self) -> Option<&RlMoments> {
        self.moments.as_ref()
    }

    /// Per-test preparation failure, if any.
    pub fn preparation_error(&self, index: usize) -> Option<&Error> {
        self.prepared[index].as_ref().err()
    }

    /// Evaluates every test on `labels`, which must have the battery's class
    /// sizes.
    pub fn evaluate(&self, labels: &[usize]) -> Result<Vec<Result<TestResult>>> {
        if labels.len() != self.structure.n() {
            return Err(Error::Inconsistent(format!(
                "{} labels for {} points",
                labels.len(),
                self.structure.n()
            )));
        }
        if class_sizes(labels, self.class_sizes.len())? != self.class_sizes {
            return Err(Error::Inconsistent("labeling has other class sizes".into()));
        }
        Ok(self.evaluate_unchecked(labels))
    }

    pub(crate) fn evaluate_unchecked(&self, labels: &[usize]) -> Vec<Result<TestResult>> {
        let m = self.class_sizes.len();
        let nnct = Nnct::from_labels(labels, m, self.structure);
        let mut type3: Option<Vec<f64>> = None;
        let mut flags: Option<Vec<bool>> = None;
        self.prepared
            .iter()
            .map(|p| {
                let p = p.as_ref().map_err(Clone::clone)?;
                match p {
                    Prepared::Pielou => {
                        let v = pielou_s(&nnct, PielouFramework::RandomLabeling(self.rl()))?;
                        Ok(index_result(v, self.alternative))
                    }
                    Prepared::DixonIndex { i, j, corrected } => {
                        let v = if *corrected {
                            dixon_index_corrected(&nnct, self.moments.as_ref(), *i, *j)?
                        } else {
                            dixon_index(&nnct, self.moments.as_ref(), *i, *j)?
                        };
                        Ok(index_result(v, self.alternative))
                    }
                    Prepared::DixonCell { i, j } => dixon_cell_test(&nnct, self.rl(), *i, *j, self.alternative),
                    Prepared::Type3Cell { i, j, var, scale } => {
                        let t = type3.get_or_insert_with(|| type3_statistics(&nnct));
                        type3_cell(t[i * m + j], *var, *i, *j, *scale, self.alternative)
                    }
                    Prepared::Overall { variant, pinv, df } => {
                        let d = overall_deviation(&nnct, self.rl(), *variant);
                        Ok(overall_from_pinv(&d, pinv, *df))
                    }
                    Prepared::Cuzick { moments, weights } => {
                        let f = flags.get_or_insert_with(|| labels.iter().map(|&l| l == 0).collect());
                        let t = cuzick_statistics(self.structure, f, moments.ks());
                        match weights {
                            None => single_test(moments, 0, t[0], self.alternative),
                            Some(w) => Ok(combined_test(moments, w, &t, self.alternative)),
                        }
                    }
                }
            })
            .collect()
    }

    fn rl(&self) -> &RlMoments {
        self.moments.as_ref().expect("prepared tests imply moments")
    }
}

fn index_result(v: IndexValue, alternative: Alternative) -> TestResult {
    TestResult {
        statistic: v.value,
        std_err: v.std_err,
        z_value: v.z_score,
        chisq_value: None,
        df: None,
        p_asymptotic: v.z_score.map(|z| z_pvalue(z, alternative)),
        p_randomization: None,
        alternative,
    }
}

/// Value ordered against a null sample for randomization p-values.
pub fn randomization_score(id: &TestId, result: &TestResult) -> Option<f64> {
    match id.family() {
        Family::Index => Some(result.statistic),
        Family::Normal => result.z_value,
        Family::ChiSquare => result.chisq_value,
    }
}
