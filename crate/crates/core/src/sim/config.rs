//! Campaign configuration files (TOML).
//!
//! A file describes one [`Campaign`]; an optional `[sweep]` table with a
//! dotted `parameter` path and a list of `values` expands it into one
//! scenario per value, all sharing the seed.

use std::path::Path;

use serde::Deserialize;
use toml::{Table, Value};

use super::Campaign;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sweep {
    parameter: String,
    values: Vec<Value>,
}

/// A campaign with the label it is reported under.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub campaign: Campaign,
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

fn set_path(table: &mut Table, path: &str, value: Value) -> Result<()> {
    let keys: Vec<&str> = path.split('.').collect();
    let (leaf, parents) = keys.split_last().expect("split yields one key");
    let mut current = table;
    for key in parents {
        current = match current.get_mut(*key) {
            Some(Value::Table(t)) => t,
            _ => return Err(config_err(format!("sweep parameter '{path}': '{key}' is not a table"))),
        };
    }
    if leaf.is_empty() {
        return Err(config_err(format!("sweep parameter '{path}' is empty")));
    }
    current.insert((*leaf).to_string(), value);
    Ok(())
}

fn value_label(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn campaign_from(table: Table) -> Result<Campaign> {
    let campaign: Campaign = table.try_into().map_err(config_err)?;
    campaign.validate().map_err(|e| match e {
        Error::InvalidSpec(msg) => Error::Config(msg),
        other => other,
    })?;
    Ok(campaign)
}

/// Parses configuration text into scenarios.
pub fn parse_campaigns(text: &str) -> Result<Vec<Scenario>> {
    let mut table: Table = text.parse().map_err(config_err)?;
    let Some(sweep) = table.remove("sweep") else {
        return Ok(vec![Scenario {
            label: "base".to_string(),
            campaign: campaign_from(table)?,
        }]);
    };
    let sweep: Sweep = sweep.try_into().map_err(|e| config_err(format!("sweep: {e}")))?;
    if sweep.values.is_empty() {
        return Err(config_err("sweep: values must not be empty"));
    }
    sweep
        .values
        .iter()
        .map(|v| {
            let mut t = table.clone();
            set_path(&mut t, &sweep.parameter, v.clone())?;
            Ok(Scenario {
                label: format!("{}={}", sweep.parameter, value_label(v)),
                campaign: campaign_from(t)?,
            })
        })
        .collect()
}

pub fn load_campaigns(path: &Path) -> Result<Vec<Scenario>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_campaigns(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::battery::TestId;
    use crate::patterns::{BackgroundSpec, LabelingSpec};
    use crate::sim::{CaseCount, CriticalValues, ZConvention};

    const BASE: &str = r#"
seed = 3
n_backgrounds = 2
n_replications = 10
tests = ["pielou", "type3-cell:11", "overall-type3"]
cases = 50

[background]
kind = "unit_square_uniform"
n = 100

[labeling]
kind = "nn_contagion"
rho = 0.0
k = 1
"#;

    #[test]
    fn single_campaign() {
        let s = parse_campaigns(BASE).unwrap();
        assert_eq!(s.len(), 1);
        let c = &s[0].campaign;
        assert_eq!(c.seed, 3);
        assert_eq!(c.level, 0.95);
        assert_eq!(c.cases, CaseCount::Count(50));
        assert_eq!(c.background, BackgroundSpec::UnitSquareUniform { n: 100 });
        assert_eq!(c.tests[1], TestId::Type3Cell(0, 0));
        assert_eq!(c.critical_values, CriticalValues::Asymptotic);
        assert_eq!(c.z_convention, ZConvention::TwoSided);
    }

    #[test]
    fn sweep_expands() {
        let text = format!("{BASE}\n[sweep]\nparameter = \"labeling.rho\"\nvalues = [0.2, 0.8]\n");
        let s = parse_campaigns(&text).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].label, "labeling.rho=0.2");
        assert_eq!(s[1].campaign.labeling, LabelingSpec::NnContagion { rho: 0.8, k: 1 });
        assert_eq!(s[0].campaign.seed, s[1].campaign.seed);
    }

    #[test]
    fn optional_sections() {
        let text = BASE.replace("cases = 50", "cases = \"half\"\nz_convention = \"quantile\"\n[critical_values]\nsource = \"monte_carlo\"\nn_backgrounds = 2\nn_replications = 100\n");
        let c = &parse_campaigns(&text).unwrap()[0].campaign;
        assert_eq!(c.cases, CaseCount::Half);
        assert_eq!(c.z_convention, ZConvention::Quantile);
        assert_eq!(
            c.critical_values,
            CriticalValues::MonteCarlo {
                n_backgrounds: 2,
                n_replications: 100
            }
        );
    }

    #[test]
    fn errors_name_the_key() {
        let e = parse_campaigns(&format!("bogus_key = 1\n{BASE}")).unwrap_err();
        assert!(matches!(&e, Error::Config(m) if m.contains("bogus_key")), "{e}");
        let e = parse_campaigns(&BASE.replace("rho = 0.0", "rho = 0.0\nzeta = 2")).unwrap_err();
        assert!(matches!(&e, Error::Config(m) if m.contains("zeta")), "{e}");
        let e = parse_campaigns(&BASE.replace("\"pielou\"", "\"pielu\"")).unwrap_err();
        assert!(matches!(&e, Error::Config(m) if m.contains("pielu")), "{e}");
        let e = parse_campaigns(&format!("{BASE}\n[sweep]\nparameter = \"nothing.rho\"\nvalues = [1]\n")).unwrap_err();
        assert!(matches!(&e, Error::Config(m) if m.contains("nothing")), "{e}");
        let e = parse_campaigns(&BASE.replace("n_replications = 10", "n_replications = 0")).unwrap_err();
        assert!(matches!(e, Error::Config(_)));
    }
}
