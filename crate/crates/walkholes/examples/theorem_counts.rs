//! Ensemble check of the 2*pi counting law through the runner, printing the
//! normalized ratios with bootstrap confidence intervals.
//!
//!     cargo run --release --example theorem_counts [n] [replicas]

use walkholes::config::{Experiment, RunConfig};
use walkholes::runner::{run_experiment, Aggregate};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(100_000);
    let replicas: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(50);

    let cfg = RunConfig::parse(
        Experiment::Theorem11,
        &format!("n = {n}\nreplicas = {replicas}\nmaster_seed = 7\ndelta = 0.4\n"),
    )
    .unwrap();
    let record = run_experiment(&cfg, None).unwrap();
    let Aggregate::Theorem11 {
        gamma,
        mean_ratio_lattice,
        ci_lattice,
        mean_ratio_planar,
        ci_planar,
    } = record.aggregate
    else {
        unreachable!()
    };
    println!("n = {n}, delta = 0.4, {replicas} replicas (hash {})", &record.determinism_hash[..16]);
    println!("predicted count gamma = {gamma:.2}");
    println!(
        "normalized ratio, lattice: {mean_ratio_lattice:.3}  CI [{:.3}, {:.3}]",
        ci_lattice.0, ci_lattice.1
    );
    println!(
        "normalized ratio, planar:  {mean_ratio_planar:.3}  CI [{:.3}, {:.3}]",
        ci_planar.0, ci_planar.1
    );
    println!(
        "limit 2*pi = {:.3}; desk-scale values sit well below and rise with n",
        std::f64::consts::TAU
    );
}
