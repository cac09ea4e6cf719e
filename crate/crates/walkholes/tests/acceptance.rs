//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with its measured values (visible with `--nocapture`; failures always
//! show them). Tolerances are pinned here, not configurable.

use std::time::Instant;

use walkholes::config::{Experiment, RunConfig};
use walkholes::fit::fit_exponent;
use walkholes::grid::OccupancyGrid;
use walkholes::holes::{first_enclosure_time, lattice_holes, planar_holes, HoleKind};
use walkholes::oracle::equivalence_sweep;
use walkholes::runner::{merge_records, run_experiment, Aggregate};
use walkholes::walk::{Direction, Point, WalkPath};

const TWO_PI: f64 = std::f64::consts::TAU;

fn verdict(criterion: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {tag} ({detail})");
    assert!(pass, "criterion {criterion} FAILED: {detail}");
}

fn run(experiment: Experiment, config: &str) -> Aggregate {
    let cfg = RunConfig::parse(experiment, config).expect("valid config");
    run_experiment(&cfg, None).expect("run completes").aggregate
}

/// 1. Scanline extractors agree exactly with naive BFS on 1000 seeded walks
///    of step count <= 500, in under a minute.
#[test]
fn criterion_01_oracle_equivalence() {
    let t0 = Instant::now();
    let mismatches = equivalence_sweep(500, 1000);
    let elapsed = t0.elapsed();
    verdict(
        "01 oracle-equivalence",
        mismatches.is_empty() && elapsed.as_secs() < 60,
        &format!("{} mismatches, {elapsed:?}", mismatches.len()),
    );
}

/// 2. The documented 14-step loop realizes planar area 8 and lattice area 2,
///    with the enclosure-order invariant.
#[test]
fn criterion_02_figure1_fixture() {
    use Direction::*;
    let walk = WalkPath::from_steps(
        0,
        vec![
            East, East, East, East, East, North, West, West, North, West, West, West, South,
            South,
        ],
    );
    let grid = OccupancyGrid::build(&walk).unwrap();
    let lat = lattice_holes(&grid);
    let pla = planar_holes(&grid);
    let lat_area: u64 = lat.iter().map(|h| h.area).sum();
    let pla_area: u64 = pla.iter().map(|h| h.area).sum();
    let z = Point::new(1, 1);
    let t_lat = first_enclosure_time(&walk, z, HoleKind::Lattice);
    let t_pla = first_enclosure_time(&walk, z, HoleKind::Planar);
    let ordered = match (t_lat, t_pla) {
        (Some(a), Some(b)) => a <= b,
        _ => false,
    };
    verdict(
        "02 figure-1-fixture",
        lat.len() == 1 && pla.len() == 1 && lat_area == 2 && pla_area == 8 && ordered,
        &format!(
            "lattice area {lat_area}, planar area {pla_area}, enclosure {t_lat:?} <= {t_pla:?}"
        ),
    );
}

/// 3. Theorem 1.1 normalized ratios at delta = 0.4 over 200 replicas per n:
///    the n = 1e6 ensemble mean lies within [2pi/3, 3*2pi] for both kinds,
///    and the deviation from 2pi shrinks from n = 1e4 to n = 1e6.
#[test]
fn criterion_03_theorem11_trend() {
    let mut ratios = Vec::new(); // (n, lattice, planar)
    for n in [10_000u64, 100_000, 1_000_000] {
        let agg = run(
            Experiment::Theorem11,
            &format!("n = {n}\nmaster_seed = 7\nreplicas = 200\ndelta = 0.4\n"),
        );
        let Aggregate::Theorem11 {
            mean_ratio_lattice,
            mean_ratio_planar,
            ..
        } = agg
        else {
            panic!()
        };
        ratios.push((n, mean_ratio_lattice, mean_ratio_planar));
    }
    let (_, l6, p6) = ratios[2];
    let (_, l4, p4) = ratios[0];
    let window = |r: f64| r >= TWO_PI / 3.0 && r <= 3.0 * TWO_PI;
    let improves = (l6 - TWO_PI).abs() < (l4 - TWO_PI).abs()
        && (p6 - TWO_PI).abs() < (p4 - TWO_PI).abs();
    verdict(
        "03 theorem-1.1-trend",
        window(l6) && window(p6) && improves,
        &format!(
            "ratios (n=1e4) lattice {l4:.3} planar {p4:.3}; (n=1e6) lattice {l6:.3} planar \
             {p6:.3}; window [{:.3}, {:.3}]; deviation shrinks: {improves}",
            TWO_PI / 3.0,
            3.0 * TWO_PI
        ),
    );
}

/// 4. Figure-7 slopes at n = 1e6 over 100 replicas: lattice-hole counts fit
///    slope -1 +- 0.08 on A in [n^0.5, n^0.9] and -5/6 +- 0.08 on [1, 20].
#[test]
fn criterion_04_figure7_slopes() {
    let agg = run(
        Experiment::Fig7Slopes,
        "n = 1000000\nmaster_seed = 5\nreplicas = 100\n",
    );
    let Aggregate::Fig7 {
        small_fit,
        large_fit,
        ..
    } = agg
    else {
        panic!()
    };
    let small = small_fit.expect("small window fit").slope;
    let large = large_fit.expect("large window fit").slope;
    verdict(
        "04 figure-7-slopes",
        (small + 5.0 / 6.0).abs() <= 0.08 && (large + 1.0).abs() <= 0.08,
        &format!("small-window slope {small:.4} (target -0.8333), large-window slope {large:.4} (target -1)"),
    );
}

/// 5. Disconnection exponents at >= 1e5 trials per point: one-sided
///    -1/4 +- 0.05, two-sided fixed-time -1/3 +- 0.05, two-sided
///    fixed-radius -2/3 +- 0.08.
#[test]
fn criterion_05_disconnection_exponents() {
    let one_sided = run(
        Experiment::Disconnect,
        "variant = one_sided\nparams = 16,32,64,128,256,512\ntrials_per_replica = 5000\n\
         replicas = 20\nmaster_seed = 1\n",
    );
    let fixed_time = run(
        Experiment::Disconnect,
        "variant = two_sided_time\nparams = 256,512,1024,2048,4096,8192,16384,32768,65536\n\
         trials_per_replica = 5000\nreplicas = 20\nmaster_seed = 2\n",
    );
    let fixed_radius = run(
        Experiment::Disconnect,
        "variant = two_sided_radius\nparams = 16,32,64,128,256,512\ntrials_per_replica = 5000\n\
         replicas = 20\nmaster_seed = 3\n",
    );
    let slope = |agg: &Aggregate| {
        let Aggregate::Disconnect { fit, samples, .. } = agg else { panic!() };
        assert!(samples.iter().all(|s| s.trials >= 100_000));
        fit.expect("slope fit").slope
    };
    let s1 = slope(&one_sided);
    let st = slope(&fixed_time);
    let sr = slope(&fixed_radius);
    verdict(
        "05 disconnection-exponents",
        (s1 + 0.25).abs() <= 0.05 && (st + 1.0 / 3.0).abs() <= 0.05 && (sr + 2.0 / 3.0).abs() <= 0.08,
        &format!(
            "one-sided {s1:.4} (target -0.25 +- 0.05), fixed-time {st:.4} (target -0.3333 +- 0.05), \
             fixed-radius {sr:.4} (target -0.6667 +- 0.08)"
        ),
    );
}

/// 6. Outer-frontier boundary-square counts scale with slope 2/3 +- 0.08
///    over n in {1e4, 1e5, 1e6}.
#[test]
fn criterion_06_frontier_scaling() {
    let agg = run(
        Experiment::FrontierScaling,
        "ns = 10000,100000,1000000\nmaster_seed = 43\nreplicas = 24\n",
    );
    let Aggregate::Frontier { fit, mean_counts, .. } = agg else { panic!() };
    let slope = fit.expect("fit").slope;
    verdict(
        "06 frontier-scaling",
        (slope - 2.0 / 3.0).abs() <= 0.08,
        &format!("slope {slope:.4} (target 0.6667 +- 0.08), means {mean_counts:?}"),
    );
}

/// 7. Coupling bound: sup |B(t) - S(2t)| <= n^{1/4} ln^2 n in at least 99 of
///    100 seeds at n = 1e4.
#[test]
fn criterion_07_coupling_bound() {
    let agg = run(
        Experiment::Coupling,
        "n = 10000\nmaster_seed = 7\nreplicas = 100\n",
    );
    let Aggregate::Coupling {
        bound,
        fraction_within_bound,
        median_sup,
    } = agg
    else {
        panic!()
    };
    verdict(
        "07 coupling-bound",
        fraction_within_bound >= 0.99,
        &format!(
            "{:.0}/100 within bound {bound:.1}, median sup {median_sup:.2}",
            fraction_within_bound * 100.0
        ),
    );
}

/// 8. Total hole counts scale with slope 1 +- 0.1 in log n over
///    {1e3, 1e4, 1e5, 1e6}, for both kinds.
#[test]
fn criterion_08_total_count_scaling() {
    let grid: Vec<(u64, u64)> = vec![(1_000, 400), (10_000, 200), (100_000, 60), (1_000_000, 24)];
    let mut lat_pts = Vec::new();
    let mut pla_pts = Vec::new();
    for &(n, reps) in &grid {
        let agg = run(
            Experiment::Spectrum,
            &format!("n = {n}\nkind = lattice\nmaster_seed = 19\nreplicas = {reps}\n"),
        );
        let Aggregate::Spectrum { mean_total_holes, .. } = agg else { panic!() };
        lat_pts.push((n as f64, mean_total_holes));
        let agg = run(
            Experiment::Spectrum,
            &format!("n = {n}\nkind = planar\nmaster_seed = 19\nreplicas = {reps}\n"),
        );
        let Aggregate::Spectrum { mean_total_holes, .. } = agg else { panic!() };
        pla_pts.push((n as f64, mean_total_holes));
    }
    let lat_slope = fit_exponent(&lat_pts, None).unwrap().slope;
    let pla_slope = fit_exponent(&pla_pts, None).unwrap().slope;
    verdict(
        "08 total-count-scaling",
        (lat_slope - 1.0).abs() <= 0.1 && (pla_slope - 1.0).abs() <= 0.1,
        &format!("lattice slope {lat_slope:.4}, planar slope {pla_slope:.4} (target 1 +- 0.1)"),
    );
}

/// 9. Beurling escape probability grows with slope 1/2 +- 0.08 in log |x| at
///    fixed n = 512, >= 1e5 trials per point.
#[test]
fn criterion_09_beurling_exponent() {
    let agg = run(
        Experiment::Beurling,
        "n = 512\nxs = 1,2,4,8,16,32,64\ntrials_per_replica = 5000\nreplicas = 20\nmaster_seed = 4\n",
    );
    let Aggregate::Disconnect { fit, samples, .. } = agg else { panic!() };
    assert!(samples.iter().all(|s| s.trials >= 100_000));
    let slope = fit.expect("fit").slope;
    verdict(
        "09 beurling-exponent",
        (slope - 0.5).abs() <= 0.08,
        &format!("slope {slope:.4} (target 0.5 +- 0.08)"),
    );
}

/// 10. Rasterized Brownian hole counts drift toward the 2pi law: the
///     normalized ratio moves monotonically toward 2pi across u/n in
///     {0.1, 0.01, 0.001} in at least 70% of 20 fixed seeds.
#[test]
fn criterion_10_legall_trend() {
    let agg = run(
        Experiment::Legall,
        "n = 20000\nmaster_seed = 77\nreplicas = 20\n",
    );
    let Aggregate::Legall {
        monotone_fraction,
        mean_ratios,
        ..
    } = agg
    else {
        panic!()
    };
    verdict(
        "10 legall-trend",
        monotone_fraction >= 0.70,
        &format!("monotone fraction {monotone_fraction:.2}, mean ratios {mean_ratios:?} -> 2pi"),
    );
}

/// 11. Identical configs give identical determinism hashes; merging is an
///     exact identity/commutative operation.
#[test]
fn criterion_11_determinism_and_merge() {
    let conf = "n = 3000\nmaster_seed = 123\nreplicas = 8\ndelta = 0.4\n";
    let cfg = RunConfig::parse(Experiment::Theorem11, conf).unwrap();
    let a = run_experiment(&cfg, Some(1)).unwrap();
    let b = run_experiment(&cfg, Some(2)).unwrap();
    let identity = merge_records(&[a.clone()]).unwrap();
    let mut first_cfg = cfg.clone();
    first_cfg.replicas = 5;
    let mut second_cfg = cfg.clone();
    second_cfg.replica_base = 5;
    second_cfg.replicas = 3;
    let first = run_experiment(&first_cfg, None).unwrap();
    let second = run_experiment(&second_cfg, None).unwrap();
    let ab = merge_records(&[first.clone(), second.clone()]).unwrap();
    let ba = merge_records(&[second, first]).unwrap();
    let pass = a.determinism_hash == b.determinism_hash
        && identity.determinism_hash == a.determinism_hash
        && ab == ba
        && ab.determinism_hash == a.determinism_hash
        && ab.aggregate == a.aggregate;
    verdict(
        "11 determinism-and-merge",
        pass,
        &format!("hash {}", &a.determinism_hash[..16]),
    );
}
