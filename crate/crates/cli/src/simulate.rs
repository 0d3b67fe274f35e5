use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use nnct::sim::{parse_campaigns, run_campaign, write_results_csv, Campaign, Scenario};
use serde::Serialize;

use crate::{Failure, SimulateArgs, EXIT_INPUT};

pub const FULL_SCALE_BACKGROUNDS: usize = 100;
pub const FULL_SCALE_REPLICATIONS: usize = 1000;

#[derive(Serialize)]
struct ScenarioEcho<'a> {
    label: &'a str,
    campaign: &'a Campaign,
}

#[derive(Serialize)]
struct ScenarioSummary<'a> {
    label: &'a str,
    n_replicates: u64,
    labeling_failures: u64,
    clamped: u64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    tool_version: &'static str,
    library_version: &'static str,
    config_path: String,
    config_text: &'a str,
    full_scale: bool,
    scenarios: Vec<ScenarioEcho<'a>>,
    results: Vec<ScenarioSummary<'a>>,
}

fn echo(scenarios: &[Scenario]) -> Vec<ScenarioEcho<'_>> {
    scenarios
        .iter()
        .map(|s| ScenarioEcho {
            label: &s.label,
            campaign: &s.campaign,
        })
        .collect()
}

fn write_err(path: &std::path::Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display()))
}

pub fn run(args: &SimulateArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", args.config.display())))?;
    let mut scenarios = parse_campaigns(&text).map_err(Failure::config)?;
    if args.full_scale {
        for s in &mut scenarios {
            s.campaign.n_backgrounds = FULL_SCALE_BACKGROUNDS;
            s.campaign.n_replications = FULL_SCALE_REPLICATIONS;
        }
    }

    if args.dry_run {
        let stdout = io::stdout();
        let mut out = stdout.lock();
        serde_json::to_writer_pretty(&mut out, &echo(&scenarios))
            .map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))?;
        writeln!(out).map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))?;
        return Ok(());
    }

    let mut results = Vec::with_capacity(scenarios.len());
    for s in &scenarios {
        eprintln!(
            "scenario {}: {} x {} replicates",
            s.label, s.campaign.n_backgrounds, s.campaign.n_replications
        );
        let r = run_campaign(&s.campaign).map_err(Failure::config)?;
        if r.labeling_failures > 0 {
            eprintln!("  {} replicates failed to label", r.labeling_failures);
        }
        results.push((s.clone(), r));
    }

    match &args.out {
        Some(path) => {
            let file = fs::File::create(path).map_err(write_err(path))?;
            write_results_csv(io::BufWriter::new(file), &results).map_err(Failure::config)?;
        }
        None => write_results_csv(io::stdout().lock(), &results).map_err(Failure::config)?,
    }

    let manifest_path: Option<PathBuf> = args.manifest.clone().or_else(|| {
        args.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    });
    if let Some(path) = manifest_path {
        let manifest = Manifest {
            tool: "nnct",
            tool_version: env!("CARGO_PKG_VERSION"),
            library_version: nnct::VERSION,
            config_path: args.config.display().to_string(),
            config_text: &text,
            full_scale: args.full_scale,
            scenarios: echo(&scenarios),
            results: results
                .iter()
                .map(|(s, r)| ScenarioSummary {
                    label: &s.label,
                    n_replicates: r.n_replicates,
                    labeling_failures: r.labeling_failures,
                    clamped: r.clamped,
                })
                .collect(),
        };
        let mut json = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))?;
        json.push('\n');
        fs::write(&path, json).map_err(write_err(&path))?;
    }
    Ok(())
}
