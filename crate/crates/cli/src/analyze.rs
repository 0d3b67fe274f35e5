use std::io::{self, Write};

use nnct::battery::{Battery, TestId};
use nnct::dataset::read_dataset;
use nnct::dist::Alternative;
use nnct::nntest::TestResult;
use nnct::randomization::{battery_pvalues, PValueConvention, RandomizationPlan};
use nnct::sim::report::MISSING;
use nnct::{build_nn_structure, build_nnct, Error};
use serde::Serialize;

use crate::{AnalyzeArgs, Failure, Format, EXIT_DEGENERATE, EXIT_INPUT};

/// Randomization is skipped above this many points unless forced.
pub const RANDOMIZATION_LIMIT: usize = 50_000;

/// Bumped whenever report columns change.
pub const SCHEMA_VERSION: u32 = 1;

/// Column order of the CSV report.
pub const REPORT_COLUMNS: [&str; 10] = [
    "test",
    "alternative",
    "statistic",
    "std_err",
    "z_value",
    "chisq_value",
    "df",
    "p_asymptotic",
    "p_randomization",
    "status",
];

#[derive(Debug, Serialize)]
struct Row {
    test: String,
    alternative: Alternative,
    statistic: Option<f64>,
    std_err: Option<f64>,
    z_value: Option<f64>,
    chisq_value: Option<f64>,
    df: Option<usize>,
    p_asymptotic: Option<f64>,
    p_randomization: Option<f64>,
    /// `ok`, or the reason the test produced no result.
    status: String,
}

impl Row {
    fn new(test: &TestId, outcome: Result<TestResult, Error>, alternative: Alternative) -> Self {
        match outcome {
            Ok(r) => Row {
                test: test.to_string(),
                alternative: r.alternative,
                statistic: Some(r.statistic),
                std_err: r.std_err,
                z_value: r.z_value,
                chisq_value: r.chisq_value,
                df: r.df,
                p_asymptotic: r.p_asymptotic,
                p_randomization: None,
                status: "ok".into(),
            },
            Err(e) => Row {
                test: test.to_string(),
                alternative,
                statistic: None,
                std_err: None,
                z_value: None,
                chisq_value: None,
                df: None,
                p_asymptotic: None,
                p_randomization: None,
                status: e.to_string(),
            },
        }
    }

    fn ok(&self) -> bool {
        self.status == "ok"
    }

    fn fields(&self) -> [String; 10] {
        [
            self.test.clone(),
            self.alternative.to_string(),
            opt(self.statistic),
            opt(self.std_err),
            opt(self.z_value),
            opt(self.chisq_value),
            self.df.map_or_else(|| MISSING.to_string(), |d| d.to_string()),
            opt(self.p_asymptotic),
            opt(self.p_randomization),
            self.status.clone(),
        ]
    }
}

#[derive(Debug, Serialize)]
struct RandomizationInfo {
    n_permutations: usize,
    seed: u64,
    convention: PValueConvention,
}

#[derive(Debug, Serialize)]
struct Report {
    schema_version: u32,
    source: String,
    n: usize,
    class_names: Vec<String>,
    class_sizes: Vec<usize>,
    /// Row `i` counts base points of class `i` by the class of their NN.
    nnct: Vec<Vec<usize>>,
    randomization: Option<RandomizationInfo>,
    rows: Vec<Row>,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| MISSING.to_string(), |x| x.to_string())
}

fn parse_tests(spec: &str, m: usize, knn: usize) -> Result<Vec<TestId>, Failure> {
    let items: Vec<&str> = spec
        .split(|c: char| c == ';' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err(Failure::new(EXIT_INPUT, "no tests requested"));
    }
    let mut tests = Vec::new();
    for item in items {
        if item == "all" {
            tests.extend(TestId::full_battery(m, knn));
        } else {
            tests.push(item.parse().map_err(Failure::input)?);
        }
    }
    Ok(tests)
}

pub fn run(args: &AnalyzeArgs) -> Result<(), Failure> {
    let data = read_dataset(&args.input, args.case_label.as_deref()).map_err(Failure::input)?;
    let m = data.class_names.len();
    if m < 2 {
        return Err(Failure::new(EXIT_INPUT, "analysis requires ≥2 classes"));
    }
    if args.knn == 0 {
        return Err(Failure::new(EXIT_INPUT, "--knn must be at least 1"));
    }
    let tests = parse_tests(&args.tests, m, args.knn)?;
    let alternative: Alternative = args.alternative.into();
    // deeper tests than the data allow fail individually in the battery
    let depth = tests
        .iter()
        .map(TestId::depth)
        .max()
        .unwrap_or(1)
        .min(data.points.len().saturating_sub(1))
        .max(1);

    let points = &data.points;
    let structure = build_nn_structure(points.points(), depth).map_err(Failure::input)?;
    let nnct = build_nnct(points, &structure).map_err(Failure::input)?;
    let battery = Battery::new(&structure, points.class_sizes(), &tests, alternative).map_err(Failure::input)?;
    let results = battery.evaluate(points.labels()).map_err(Failure::input)?;
    let mut rows: Vec<Row> = tests
        .iter()
        .zip(results)
        .map(|(t, r)| Row::new(t, r, alternative))
        .collect();

    let mut randomization = None;
    if args.nperm > 0 {
        if points.len() > RANDOMIZATION_LIMIT && !args.force_randomization {
            eprintln!(
                "note: {} points exceed {RANDOMIZATION_LIMIT}; randomization skipped (use --force-randomization)",
                points.len()
            );
        } else {
            let mut plan = RandomizationPlan::sampled(args.nperm, args.seed);
            if args.add_one {
                plan.convention = PValueConvention::AddOne;
            }
            let outcome = battery_pvalues(&battery, points.labels(), &plan).map_err(Failure::input)?;
            for (row, p) in rows.iter_mut().zip(outcome.pvalues) {
                row.p_randomization = p;
            }
            randomization = Some(RandomizationInfo {
                n_permutations: args.nperm,
                seed: args.seed,
                convention: plan.convention,
            });
        }
    }

    let report = Report {
        schema_version: SCHEMA_VERSION,
        source: data.source.clone(),
        n: points.len(),
        class_names: data.class_names.clone(),
        class_sizes: points.class_sizes().to_vec(),
        nnct: (0..m).map(|i| (0..m).map(|j| nnct.count(i, j)).collect()).collect(),
        randomization,
        rows,
    };
    let io = |e: io::Error| Failure::new(EXIT_INPUT, format!("writing report: {e}"));
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match args.format {
        Format::Csv => write_csv(&mut out, &report)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &report).map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))?;
            writeln!(out).map_err(io)?;
        }
        Format::Table => write_table(&mut out, &report).map_err(io)?,
    }
    out.flush().map_err(io)?;

    if report.rows.iter().all(|r| !r.ok()) {
        return Err(Failure::new(EXIT_DEGENERATE, "no requested test could be computed"));
    }
    Ok(())
}

fn write_csv<W: Write>(out: &mut W, report: &Report) -> Result<(), Failure> {
    let err = |e: csv::Error| Failure::new(EXIT_INPUT, format!("writing report: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_COLUMNS).map_err(err)?;
    for row in &report.rows {
        w.write_record(row.fields()).map_err(err)?;
    }
    w.flush().map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))
}

fn fixed(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.4}"),
        Some(x) => x.to_string(),
        None => MISSING.to_string(),
    }
}

fn write_table<W: Write>(out: &mut W, report: &Report) -> io::Result<()> {
    writeln!(out, "source: {} (n = {})", report.source, report.n)?;
    let width = report.class_names.iter().map(|c| c.len()).max().unwrap_or(0).max(6);
    write!(out, "{:width$}", "NNCT")?;
    for c in &report.class_names {
        write!(out, "  {c:>width$}")?;
    }
    writeln!(out, "  {:>width$}", "sum")?;
    for (name, row) in report.class_names.iter().zip(&report.nnct) {
        write!(out, "{name:width$}")?;
        for v in row {
            write!(out, "  {v:>width$}")?;
        }
        writeln!(out, "  {:>width$}", row.iter().sum::<usize>())?;
    }
    if let Some(r) = &report.randomization {
        writeln!(out, "randomization: {} permutations, seed {}", r.n_permutations, r.seed)?;
    }
    writeln!(out)?;

    let cells: Vec<[String; 8]> = report
        .rows
        .iter()
        .map(|r| {
            [
                r.test.clone(),
                r.alternative.to_string(),
                fixed(r.statistic),
                fixed(r.std_err),
                fixed(r.z_value.or(r.chisq_value)),
                fixed(r.p_asymptotic),
                fixed(r.p_randomization),
                r.status.clone(),
            ]
        })
        .collect();
    let header = [
        "test",
        "alt",
        "statistic",
        "std_err",
        "z/chisq",
        "p_asym",
        "p_rand",
        "status",
    ];
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |out: &mut W, fields: &[&str]| -> io::Result<()> {
        let last = fields.len() - 1;
        for (i, (f, w)) in fields.iter().zip(&widths).enumerate() {
            if i == last {
                write!(out, "{f}")?;
            } else if i < 2 {
                write!(out, "{f:<w$}  ")?;
            } else {
                write!(out, "{f:>w$}  ")?;
            }
        }
        writeln!(out)
    };
    line(out, &header)?;
    for row in &cells {
        let refs: Vec<&str> = row.iter().map(String::as_str).collect();
        line(out, &refs)?;
    }
    Ok(())
}
