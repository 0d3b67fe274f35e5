//! Labeled point datasets in `x,y,label` CSV form.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spatial::{Point, PointSet};

/// A parsed dataset. Class `c` carries label token `class_names[c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: PointSet,
    pub class_names: Vec<String>,
    pub source: String,
}

impl Dataset {
    pub fn rows(&self) -> usize {
        self.points.len()
    }
}

fn input_err(line: usize, message: impl Into<String>) -> Error {
    Error::Input {
        line,
        message: message.into(),
    }
}

/// Reads a dataset from `reader`. Labels map to classes in order of first
/// appearance, except that `case_label`, when given, becomes class 0.
pub fn parse_dataset<R: Read>(reader: R, case_label: Option<&str>, source: &str) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| input_err(1, e.to_string()))?.clone();
    let names: Vec<String> = header.iter().map(|h| h.to_ascii_lowercase()).collect();
    if names != ["x", "y", "label"] {
        return Err(input_err(
            1,
            format!(
                "expected header x,y,label, found {}",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }

    let mut points = Vec::new();
    let mut tokens: Vec<String> = Vec::new();
    let mut class_names: Vec<String> = case_label.map(|c| vec![c.to_string()]).unwrap_or_default();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            input_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let coord = |i: usize, name: &str| -> Result<f64> {
            let v: f64 = record[i]
                .parse()
                .map_err(|_| input_err(line, format!("{name} = '{}' is not a number", &record[i])))?;
            if !v.is_finite() {
                return Err(input_err(line, format!("{name} = '{}' is not finite", &record[i])));
            }
            Ok(v)
        };
        points.push(Point::new(coord(0, "x")?, coord(1, "y")?));
        let label = record[2].to_string();
        if label.is_empty() {
            return Err(input_err(line, "empty label"));
        }
        if !class_names.contains(&label) {
            class_names.push(label.clone());
        }
        tokens.push(label);
    }
    if let Some(c) = case_label {
        if !tokens.iter().any(|t| t == c) {
            return Err(input_err(0, format!("case label '{c}' does not occur")));
        }
    }
    if points.len() < 2 {
        return Err(input_err(0, format!("need at least 2 rows, found {}", points.len())));
    }
    let labels = tokens
        .iter()
        .map(|t| class_names.iter().position(|c| c == t).expect("label registered"))
        .collect();
    Ok(Dataset {
        points: PointSet::new(points, labels, class_names.len())?,
        class_names,
        source: source.to_string(),
    })
}

pub fn read_dataset(path: &Path, case_label: Option<&str>) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_dataset(file, case_label, &path.display().to_string())
}
