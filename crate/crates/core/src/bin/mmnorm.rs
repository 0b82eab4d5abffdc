use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mmnorm::config::{parse_config, RunConfig};
use mmnorm::coverage::{coverage, Alignment, CoverageMode, CoverageQuery, CoverageResult};
use mmnorm::mcsim::{run_grid, SimKind};
use mmnorm::netmodel::db_to_linear;
use mmnorm::normalize::NormalizedNetwork;
use mmnorm::output::{self, Cell, Table};
use mmnorm::sweep::{optimal_beamwidth, sweep, OptimizeOptions, SweepAxis};
use mmnorm::{Error, Result};

/// Coverage analysis of multi-tier mmWave networks via per-tier normalization.
#[derive(Debug, Parser)]
#[command(name = "mmnorm", version)]
struct Cli {
    /// TOML run configuration; the built-in two-tier example when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// CSV destination; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte Carlo seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Coverage mode: paper-literal or rigorous.
    #[arg(long, global = true)]
    mode: Option<CoverageMode>,
    /// Worker threads. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Thresholds {
    /// Comma-separated thresholds in dB (overrides the config).
    #[arg(
        long = "threshold-db",
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    threshold_db: Vec<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normalized density profiles of every branch.
    Densities,
    /// Analytic coverage per threshold.
    Coverage {
        #[command(flatten)]
        thresholds: Thresholds,
        /// with-errors or perfect (overrides the config).
        #[arg(long)]
        alignment: Option<Alignment>,
    },
    /// Monte Carlo coverage per threshold.
    Mc {
        #[command(flatten)]
        thresholds: Thresholds,
        /// branch-mirror or physical (overrides the config).
        #[arg(long)]
        kind: Option<SimKind>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Coverage over the threshold grid, perfect and imperfect alignment.
    SweepThreshold {
        #[command(flatten)]
        thresholds: Thresholds,
    },
    /// Coverage over the beamwidth grid at the sweep threshold.
    SweepBeamwidth {
        /// Threshold in dB (overrides sweep.threshold_db).
        #[arg(long = "threshold-db", allow_negative_numbers = true)]
        threshold_db: Option<f64>,
    },
    /// Coverage-maximizing beamwidth per threshold (derived antennas only).
    OptBeamwidth {
        #[command(flatten)]
        thresholds: Thresholds,
    },
    /// Check the configuration and print it with defaults filled in.
    Validate,
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let mut rc = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            parse_config(&text)?
        }
        None => RunConfig::example(),
    };
    if let Some(seed) = cli.seed {
        rc.simulation.seed = seed;
        rc.document.simulation.seed = seed;
    }
    if let Some(mode) = cli.mode {
        rc.analysis.mode = mode;
        rc.document.analysis.mode = mode;
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config {
                field: "--threads".into(),
                detail: "must be ≥ 1".into(),
            });
        }
        rc.simulation.threads = Some(n);
    }
    if let Some(out) = &cli.out {
        rc.output = Some(out.clone());
        rc.document.output.path = Some(out.clone());
    }
    Ok(rc)
}

fn thresholds(rc: &RunConfig, t: &Thresholds) -> Vec<f64> {
    if t.threshold_db.is_empty() {
        rc.analysis.thresholds_db.clone()
    } else {
        t.threshold_db.clone()
    }
}

fn both_alignments(mode: CoverageMode) -> Vec<(CoverageMode, Alignment)> {
    vec![(mode, Alignment::Perfect), (mode, Alignment::WithErrors)]
}

fn run(cli: &Cli) -> Result<()> {
    let rc = load(cli)?;
    if let Some(n) = rc.simulation.threads {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let out = rc.output.as_deref();
    let table = match &cli.command {
        Command::Densities => output::density_table(&NormalizedNetwork::new(&rc.network)?),
        Command::Coverage {
            thresholds: t,
            alignment,
        } => {
            let alignment = alignment.unwrap_or(rc.analysis.alignment);
            let ths = thresholds(&rc, t);
            let results = ths
                .iter()
                .map(|&db| {
                    coverage(&CoverageQuery::new(
                        &rc.network,
                        db_to_linear(db),
                        rc.analysis.mode,
                        alignment,
                    ))
                })
                .collect::<Result<Vec<CoverageResult>>>()?;
            output::coverage_table(&ths, &results)
        }
        Command::Mc {
            thresholds: t,
            kind,
            trials,
        } => {
            let mut sim = rc.simulation.clone();
            if let Some(k) = kind {
                sim.kind = *k;
            }
            if let Some(n) = trials {
                if *n == 0 {
                    return Err(Error::Config {
                        field: "--trials".into(),
                        detail: "must be ≥ 1".into(),
                    });
                }
                sim.trials = *n;
            }
            let ths = thresholds(&rc, t);
            let lin: Vec<f64> = ths.iter().map(|&db| db_to_linear(db)).collect();
            output::mc_table(&ths, sim.kind, &run_grid(&sim, &lin)?)
        }
        Command::SweepThreshold { thresholds: t } => {
            let mut spec = rc.sweep_spec(SweepAxis::ThresholdDb, both_alignments(rc.analysis.mode));
            spec.grid = thresholds(&rc, t);
            output::sweep_table(spec.axis, &sweep(&spec)?)
        }
        Command::SweepBeamwidth { threshold_db } => {
            let mut spec =
                rc.sweep_spec(SweepAxis::BeamwidthDeg, both_alignments(rc.analysis.mode));
            if let Some(db) = threshold_db {
                spec.threshold_db = *db;
            }
            output::sweep_table(spec.axis, &sweep(&spec)?)
        }
        Command::OptBeamwidth { thresholds: t } => {
            let (lo, hi) = rc.sweep.beamwidth_range_deg;
            let opts = OptimizeOptions {
                mode: rc.analysis.mode,
                ..OptimizeOptions::default()
            };
            let mut table = Table::new(&output::OPTIMUM_COLUMNS);
            for db in thresholds(&rc, t) {
                let best = optimal_beamwidth(
                    &rc.network,
                    db_to_linear(db),
                    (lo.to_radians(), hi.to_radians()),
                    &opts,
                )?;
                table.push(vec![
                    Cell::Num(db),
                    Cell::Num(best.beamwidth.to_degrees()),
                    Cell::Num(best.coverage),
                    Cell::Text(output::boundary_label(best.boundary).into()),
                ]);
            }
            table
        }
        Command::Validate => return write_text(&rc.to_toml(), out),
    };
    output::emit_csv(&table, out)
}

fn write_text(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("mmnorm: error {}: {msg}", e.code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
