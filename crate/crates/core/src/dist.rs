//! Reference distributions for asymptotic p-values and critical values.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Direction of the alternative hypothesis.
///
/// `Right` is segregation (clustering of cases), `Left` association.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    Right,
    Left,
    #[serde(alias = "two_sided")]
    TwoSided,
}

impl Alternative {
    pub fn as_str(&self) -> &'static str {
        match self {
            Alternative::Right => "right",
            Alternative::Left => "left",
            Alternative::TwoSided => "two-sided",
        }
    }
}

impl std::str::FromStr for Alternative {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "right" | "greater" => Ok(Alternative::Right),
            "left" | "less" => Ok(Alternative::Left),
            "two-sided" | "two_sided" | "both" => Ok(Alternative::TwoSided),
            other => Err(format!("unknown alternative `{other}`")),
        }
    }
}

impl std::fmt::Display for Alternative {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("valid parameters")
}

pub fn normal_cdf(z: f64) -> f64 {
    std_normal().cdf(z)
}

pub fn normal_sf(z: f64) -> f64 {
    std_normal().sf(z)
}

pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        f64::NEG_INFINITY
    } else if p >= 1.0 {
        f64::INFINITY
    } else {
        std_normal().inverse_cdf(p)
    }
}

/// Asymptotic normal p-value for an observed z.
pub fn z_pvalue(z: f64, alternative: Alternative) -> f64 {
    match alternative {
        Alternative::Right => normal_sf(z),
        Alternative::Left => normal_cdf(z),
        Alternative::TwoSided => (2.0 * normal_sf(z.abs())).min(1.0),
    }
}

/// Upper-tail chi-square probability.
pub fn chisq_sf(x: f64, df: usize) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(df as f64).expect("df > 0").sf(x)
}

pub fn chisq_quantile(p: f64, df: usize) -> f64 {
    if p <= 0.0 {
        0.0
    } else if p >= 1.0 {
        f64::INFINITY
    } else {
        ChiSquared::new(df as f64).expect("df > 0").inverse_cdf(p)
    }
}
