//! Thin CLI over the walkholes library.
//!
//! Subcommands:
//!   run <experiment> --config <file> [--jobs N] [--out DIR]
//!   merge <files...> --out FILE
//!   oracle-check [--max-steps N] [--seeds N]
//!
//! WALKHOLES_OUT sets the default output directory.

use std::path::PathBuf;
use std::process::ExitCode;

use walkholes::config::{Experiment, RunConfig};
use walkholes::error::Error;
use walkholes::oracle::equivalence_sweep;
use walkholes::runner::{
    merge_records, read_ndjson, run_experiment_partial, write_csv_tables, write_ndjson, RunRecord,
};

const USAGE: &str = "\
walkholes: planar random walk hole census experiments

USAGE:
  walkholes run <experiment> --config <file> [--jobs N] [--out DIR]
  walkholes merge <files...> --out FILE
  walkholes oracle-check [--max-steps N] [--seeds N]

EXPERIMENTS:
  spectrum | theorem11 | fig7_slopes | census | coupling | disconnect |
  beurling | frontier_scaling | legall

OUTPUT:
  run writes <out>/<experiment>.ndjson plus CSV tables where the experiment
  defines them. --out defaults to $WALKHOLES_OUT, then `runs`.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Usage(_)) {
                eprintln!("\n{USAGE}");
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn dispatch(args: &[String]) -> Result<(), Error> {
    match args.first().map(String::as_str) {
        Some("run") => cmd_run(&args[1..]),
        Some("merge") => cmd_merge(&args[1..]),
        Some("oracle-check") => cmd_oracle(&args[1..]),
        Some("--help") | Some("-h") | None => {
            print!("{USAGE}");
            Ok(())
        }
        Some(other) => Err(Error::Usage(format!("unknown subcommand `{other}`"))),
    }
}

fn default_out() -> PathBuf {
    std::env::var_os("WALKHOLES_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"))
}

fn cmd_run(args: &[String]) -> Result<(), Error> {
    let experiment_name = args
        .first()
        .ok_or_else(|| Error::Usage("run: missing <experiment>".into()))?;
    let experiment = Experiment::parse(experiment_name)?;
    let mut config_path: Option<PathBuf> = None;
    let mut jobs: Option<usize> = None;
    let mut out = default_out();
    let mut it = args[1..].iter();
    while let Some(a) = it.next() {
        match a.as_str() {
            "--config" => {
                config_path = Some(PathBuf::from(next_value(&mut it, "--config")?));
            }
            "--jobs" => {
                let v = next_value(&mut it, "--jobs")?;
                jobs = Some(
                    v.parse()
                        .map_err(|_| Error::Usage(format!("--jobs: `{v}` is not a number")))?,
                );
            }
            "--out" => out = PathBuf::from(next_value(&mut it, "--out")?),
            other => return Err(Error::Usage(format!("run: unknown flag `{other}`"))),
        }
    }
    let config_path =
        config_path.ok_or_else(|| Error::Usage("run: missing --config <file>".into()))?;
    let text = std::fs::read_to_string(&config_path)?;
    let config = RunConfig::parse(experiment, &text)?;

    let (record, failure) = run_experiment_partial(&config, jobs);
    std::fs::create_dir_all(&out)?;
    let ndjson_path = out.join(format!("{}.ndjson", experiment.name()));
    let file = std::fs::File::create(&ndjson_path)?;
    write_ndjson(&record, std::io::BufWriter::new(file))?;
    let mut tables = write_csv_tables(&record, &out)?;
    tables.insert(0, ndjson_path);
    for p in &tables {
        println!("wrote {}", p.display());
    }
    print_summary(&record);
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn cmd_merge(args: &[String]) -> Result<(), Error> {
    let mut files: Vec<PathBuf> = Vec::new();
    let mut out: Option<PathBuf> = None;
    let mut it = args.iter();
    while let Some(a) = it.next() {
        match a.as_str() {
            "--out" => out = Some(PathBuf::from(next_value(&mut it, "--out")?)),
            other => files.push(PathBuf::from(other)),
        }
    }
    if files.is_empty() {
        return Err(Error::Usage("merge: no input files".into()));
    }
    let out = out.ok_or_else(|| Error::Usage("merge: missing --out FILE".into()))?;
    let records: Result<Vec<RunRecord>, Error> = files
        .iter()
        .map(|f| read_ndjson(&std::fs::read_to_string(f)?))
        .collect();
    let merged = merge_records(&records?)?;
    if let Some(dir) = out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let file = std::fs::File::create(&out)?;
    write_ndjson(&merged, std::io::BufWriter::new(file))?;
    println!("wrote {}", out.display());
    print_summary(&merged);
    Ok(())
}

fn cmd_oracle(args: &[String]) -> Result<(), Error> {
    let mut max_steps = 500usize;
    let mut seeds = 1000u64;
    let mut it = args.iter();
    while let Some(a) = it.next() {
        match a.as_str() {
            "--max-steps" => {
                let v = next_value(&mut it, "--max-steps")?;
                max_steps = v
                    .parse()
                    .map_err(|_| Error::Usage(format!("--max-steps: `{v}`")))?;
            }
            "--seeds" => {
                let v = next_value(&mut it, "--seeds")?;
                seeds = v
                    .parse()
                    .map_err(|_| Error::Usage(format!("--seeds: `{v}`")))?;
            }
            other => return Err(Error::Usage(format!("oracle-check: unknown flag `{other}`"))),
        }
    }
    let t0 = std::time::Instant::now();
    let mismatches = equivalence_sweep(max_steps, seeds);
    if mismatches.is_empty() {
        println!(
            "oracle-check: OK ({seeds} seeds, steps <= {max_steps}, {:?})",
            t0.elapsed()
        );
        Ok(())
    } else {
        for m in &mismatches {
            eprintln!(
                "MISMATCH seed={} steps={} kind={}: oracle {:?} vs {:?}",
                m.seed, m.step_count, m.kind, m.oracle, m.actual
            );
        }
        Err(Error::Conflict(format!(
            "{} oracle mismatches",
            mismatches.len()
        )))
    }
}

fn next_value<'a>(
    it: &mut std::slice::Iter<'a, String>,
    flag: &str,
) -> Result<&'a String, Error> {
    it.next()
        .ok_or_else(|| Error::Usage(format!("{flag}: missing value")))
}

fn print_summary(record: &RunRecord) {
    println!(
        "experiment={} replicas={} partial={} hash={} wall_ms={}",
        record.config["experiment"],
        record.replicas.len(),
        record.partial,
        &record.determinism_hash[..16],
        record.wall_ms
    );
    if let Ok(s) = serde_json::to_string_pretty(&record.aggregate) {
        println!("{s}");
    }
}
