//! Replica orchestration: deterministic execution, NDJSON/CSV persistence,
//! and exact merging of split runs.
//!
//! Replica `i` (absolute index `replica_base + i`) derives its seed as
//! `split_seed(master_seed, index)`, so any partition of an index range
//! into separate runs merges back into the identical record. Aggregation is
//! a pure fold over replica payloads in index order; the determinism hash
//! covers everything except wall-clock timings.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{Experiment, Params, RunConfig};
use crate::coupling::{bm_holes, embed_walk, sup_distance};
use crate::disconnect::{
    beurling_prob, one_sided_disconnect_prob, two_sided_disconnect_prob, DisconnectSample,
    DisconnectVariant,
};
use crate::error::{Error, Result};
use crate::fit::{bootstrap_mean_ci, fit_exponent, mean, ExponentEstimate};
use crate::grid::OccupancyGrid;
use crate::holes::{
    boundary_squares, lattice_holes, planar_holes, FrontierScope, HoleKind,
};
use crate::rng::split_seed;
use crate::spectrum::{bin_counts, normalized_count, shape_census, single_cell_key, BinCount, HoleSpectrum};
use crate::walk::{Point, WalkPath};

pub const SCHEMA_VERSION: u32 = 1;

/// Per-replica result payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ReplicaPayload {
    Spectrum {
        total_holes: u64,
        threshold_count: u64,
        bins: Vec<BinCount>,
    },
    Theorem11 {
        raw_lattice: u64,
        ratio_lattice: f64,
        raw_planar: u64,
        ratio_planar: f64,
    },
    Fig7 {
        counts: Vec<u64>,
    },
    Census {
        total_holes: u64,
        single_site: u64,
        distinct_shapes: u64,
    },
    Coupling {
        sup_distance: f64,
        within_bound: bool,
        tau_last: f64,
    },
    Disconnect {
        samples: Vec<DisconnectSample>,
    },
    Frontier {
        counts: Vec<u64>,
    },
    Legall {
        ratios: Vec<f64>,
        monotone_toward_2pi: bool,
    },
}

/// Ensemble aggregate; a pure fold of the replica payloads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Aggregate {
    Empty,
    Spectrum {
        mean_total_holes: f64,
        mean_threshold_count: f64,
        pooled_bins: Vec<BinCount>,
    },
    Theorem11 {
        gamma: f64,
        mean_ratio_lattice: f64,
        ci_lattice: (f64, f64),
        mean_ratio_planar: f64,
        ci_planar: (f64, f64),
    },
    Fig7 {
        a_values: Vec<f64>,
        mean_counts: Vec<f64>,
        small_fit: Option<ExponentEstimate>,
        large_fit: Option<ExponentEstimate>,
    },
    Census {
        mean_total_holes: f64,
        mean_single_site: f64,
        ci_single_site: (f64, f64),
        mean_distinct_shapes: f64,
    },
    Coupling {
        bound: f64,
        fraction_within_bound: f64,
        median_sup: f64,
    },
    Disconnect {
        samples: Vec<DisconnectSample>,
        p_hats: Vec<f64>,
        fit: Option<ExponentEstimate>,
    },
    Frontier {
        ns: Vec<u64>,
        mean_counts: Vec<f64>,
        fit: Option<ExponentEstimate>,
    },
    Legall {
        u_fracs: Vec<f64>,
        mean_ratios: Vec<f64>,
        monotone_fraction: f64,
    },
}

/// One self-contained run: config echo, per-replica summaries (sorted by
/// absolute index), aggregate, and the determinism hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub config: BTreeMap<String, String>,
    pub replicas: Vec<(u64, ReplicaPayload)>,
    pub aggregate: Aggregate,
    pub determinism_hash: String,
    /// True when a resource error stopped the run early; replicas before the
    /// failure are retained.
    pub partial: bool,
    /// Wall-clock milliseconds; excluded from the determinism hash.
    pub wall_ms: u64,
}

/// Run every replica of `config`, optionally bounding parallelism.
///
/// A resource failure stops the run at the first failing replica index;
/// everything before it is kept in a record marked partial, returned
/// alongside the error so callers can flush it.
pub fn run_experiment_partial(
    config: &RunConfig,
    jobs: Option<usize>,
) -> (RunRecord, Option<Error>) {
    let t0 = std::time::Instant::now();
    let indices: Vec<u64> =
        (config.replica_base..config.replica_base + config.replicas).collect();
    let results: Result<Vec<(u64, Result<ReplicaPayload>)>> = match jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| Error::Usage(format!("thread pool: {e}")));
            match pool {
                Ok(pool) => Ok(pool.install(|| {
                    indices
                        .par_iter()
                        .map(|&i| (i, run_replica(config, i)))
                        .collect()
                })),
                Err(e) => Err(e),
            }
        }
        None => Ok(indices
            .par_iter()
            .map(|&i| (i, run_replica(config, i)))
            .collect()),
    };
    let results = match results {
        Ok(r) => r,
        Err(e) => return (assemble(config, Vec::new(), true, 0), Some(e)),
    };
    // Keep the prefix before the first failure; later replicas are dropped
    // so reruns extend deterministically.
    let mut replicas = Vec::with_capacity(results.len());
    let mut failure: Option<Error> = None;
    for (idx, res) in results {
        match res {
            Ok(p) if failure.is_none() => replicas.push((idx, p)),
            Ok(_) => {}
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    let partial = failure.is_some();
    let record = assemble(config, replicas, partial, t0.elapsed().as_millis() as u64);
    (record, failure)
}

/// Run every replica; a failure anywhere is an error (partial record
/// dropped). The CLI uses [`run_experiment_partial`] to flush partials.
pub fn run_experiment(config: &RunConfig, jobs: Option<usize>) -> Result<RunRecord> {
    let (record, failure) = run_experiment_partial(config, jobs);
    match failure {
        Some(e) => Err(Error::Usage(format!(
            "run stopped early after {} replicas: {e}",
            record.replicas.len()
        ))),
        None => Ok(record),
    }
}

/// Run one replica by absolute index.
pub fn run_replica(config: &RunConfig, index: u64) -> Result<ReplicaPayload> {
    let seed = split_seed(config.master_seed, index);
    match &config.params {
        Params::Spectrum {
            n,
            kind,
            delta,
            eps,
            include_unbounded,
        } => {
            let walk = WalkPath::generate(seed, 2 * *n as usize)?;
            let grid = OccupancyGrid::build(&walk)?;
            let holes = match kind {
                HoleKind::Lattice => lattice_holes(&grid),
                HoleKind::Planar => planar_holes(&grid),
            };
            let spec = HoleSpectrum::from_holes(*n, *kind, &holes, index);
            let threshold = (*n as f64).powf(1.0 - delta);
            let extra = u64::from(*include_unbounded);
            Ok(ReplicaPayload::Spectrum {
                total_holes: spec.total_holes() + extra,
                threshold_count: spec.count_at_least(threshold) + extra,
                bins: bin_counts(&spec, *delta, *eps)?,
            })
        }
        Params::Theorem11 {
            n,
            delta,
            include_unbounded,
        } => {
            let walk = WalkPath::generate(seed, 2 * *n as usize)?;
            let grid = OccupancyGrid::build(&walk)?;
            let extra = u64::from(*include_unbounded);
            let sl = HoleSpectrum::from_holes(*n, HoleKind::Lattice, &lattice_holes(&grid), index);
            let sp = HoleSpectrum::from_holes(*n, HoleKind::Planar, &planar_holes(&grid), index);
            let ncl = normalized_count(&sl, *delta)?;
            let ncp = normalized_count(&sp, *delta)?;
            let scale = (*n as f64).powf(*delta);
            let log2 = scale.ln().powi(2);
            Ok(ReplicaPayload::Theorem11 {
                raw_lattice: ncl.raw + extra,
                ratio_lattice: (ncl.raw + extra) as f64 * log2 / scale,
                raw_planar: ncp.raw + extra,
                ratio_planar: (ncp.raw + extra) as f64 * log2 / scale,
            })
        }
        Params::Fig7Slopes { n, kind, .. } => {
            let walk = WalkPath::generate(seed, 2 * *n as usize)?;
            let grid = OccupancyGrid::build(&walk)?;
            let holes = match kind {
                HoleKind::Lattice => lattice_holes(&grid),
                HoleKind::Planar => planar_holes(&grid),
            };
            let spec = HoleSpectrum::from_holes(*n, *kind, &holes, index);
            let counts = fig7_grid(&config.params)
                .iter()
                .map(|&a| spec.count_at_least(a))
                .collect();
            Ok(ReplicaPayload::Fig7 { counts })
        }
        Params::Census { n, kind } => {
            let walk = WalkPath::generate(seed, 2 * *n as usize)?;
            let grid = OccupancyGrid::build(&walk)?;
            let census = shape_census(&grid, *kind);
            let single = census.get(&single_cell_key(*kind)).copied().unwrap_or(0);
            Ok(ReplicaPayload::Census {
                total_holes: census.values().sum(),
                single_site: single,
                distinct_shapes: census.len() as u64,
            })
        }
        Params::Coupling { n, dt } => {
            let trace = embed_walk(seed, *n, *dt)?;
            let sup = sup_distance(&trace);
            let bound = (*n as f64).powf(0.25) * (*n as f64).ln().powi(2);
            Ok(ReplicaPayload::Coupling {
                sup_distance: sup,
                within_bound: sup <= bound,
                tau_last: *trace.tau().last().unwrap(),
            })
        }
        Params::Disconnect {
            variant,
            params,
            trials_per_replica,
        } => {
            let samples: Result<Vec<DisconnectSample>> = params
                .iter()
                .map(|&p| match variant {
                    DisconnectVariant::OneSidedRadius => {
                        one_sided_disconnect_prob(p as u32, *trials_per_replica, seed)
                    }
                    DisconnectVariant::TwoSidedTime => {
                        two_sided_disconnect_prob(p as u32, false, *trials_per_replica, seed)
                    }
                    DisconnectVariant::TwoSidedRadius => {
                        two_sided_disconnect_prob(p as u32, true, *trials_per_replica, seed)
                    }
                    DisconnectVariant::Beurling => unreachable!("beurling has its own params"),
                })
                .collect();
            Ok(ReplicaPayload::Disconnect { samples: samples? })
        }
        Params::Beurling {
            n,
            xs,
            trials_per_replica,
        } => {
            let samples: Result<Vec<DisconnectSample>> = xs
                .iter()
                .map(|&k| beurling_prob(Point::new(0, k as i32), *n as u32, *trials_per_replica, seed))
                .collect();
            Ok(ReplicaPayload::Disconnect { samples: samples? })
        }
        Params::FrontierScaling { ns } => {
            let counts: Result<Vec<u64>> = ns
                .iter()
                .map(|&n| {
                    let walk = WalkPath::generate(split_seed(seed, n), 2 * n as usize)?;
                    let grid = OccupancyGrid::build(&walk)?;
                    let holes = planar_holes(&grid);
                    // min_area above every hole leaves the outer frontier.
                    Ok(boundary_squares(&grid, &holes, u64::MAX, FrontierScope::HolesAndOuter).count)
                })
                .collect();
            Ok(ReplicaPayload::Frontier { counts: counts? })
        }
        Params::Legall { n, dt, h, u_fracs } => {
            let trace = embed_walk(seed, *n, *dt)?;
            let holes = bm_holes(&trace, *h)?;
            let tau_2pi = std::f64::consts::TAU;
            let ratios: Vec<f64> = u_fracs
                .iter()
                .map(|&vf| {
                    let u = vf * *n as f64;
                    let count = holes.iter().filter(|r| r.area >= u).count() as f64;
                    vf * vf.ln().powi(2) * count
                })
                .collect();
            let monotone = ratios
                .windows(2)
                .all(|w| (w[1] - tau_2pi).abs() <= (w[0] - tau_2pi).abs());
            Ok(ReplicaPayload::Legall {
                ratios,
                monotone_toward_2pi: monotone,
            })
        }
    }
}

/// The area grid of a fig7 run: the small window integers, then
/// logarithmically spaced points across the large window.
pub fn fig7_grid(params: &Params) -> Vec<f64> {
    let Params::Fig7Slopes {
        n,
        small_lo,
        small_hi,
        large_lo_exp,
        large_hi_exp,
        large_points,
        ..
    } = params
    else {
        panic!("fig7_grid on a non-fig7 config");
    };
    let mut grid: Vec<f64> = (*small_lo..=*small_hi).map(|a| a as f64).collect();
    let lo = (*n as f64).powf(*large_lo_exp);
    let hi = (*n as f64).powf(*large_hi_exp);
    let m = *large_points - 1;
    for i in 0..=m {
        grid.push(lo * (hi / lo).powf(i as f64 / m as f64));
    }
    grid
}

/// Pure fold of replica payloads into the ensemble aggregate.
pub fn aggregate(config: &RunConfig, replicas: &[(u64, ReplicaPayload)]) -> Aggregate {
    if replicas.is_empty() {
        return Aggregate::Empty;
    }
    // Bootstrap resampling is seeded from the master seed so merged halves
    // reproduce the full run bit-for-bit.
    let boot_seed = split_seed(config.master_seed, u64::MAX);
    match &config.params {
        Params::Spectrum { .. } => {
            let mut totals = Vec::new();
            let mut thresholds = Vec::new();
            let mut pooled: Vec<BinCount> = Vec::new();
            for (_, p) in replicas {
                let ReplicaPayload::Spectrum {
                    total_holes,
                    threshold_count,
                    bins,
                } = p
                else {
                    unreachable!()
                };
                totals.push(*total_holes as f64);
                thresholds.push(*threshold_count as f64);
                for (i, b) in bins.iter().enumerate() {
                    if pooled.len() <= i {
                        pooled.push(*b);
                    } else {
                        pooled[i].count += b.count;
                    }
                }
            }
            Aggregate::Spectrum {
                mean_total_holes: mean(&totals),
                mean_threshold_count: mean(&thresholds),
                pooled_bins: pooled,
            }
        }
        Params::Theorem11 { n, delta, .. } => {
            let mut rl = Vec::new();
            let mut rp = Vec::new();
            for (_, p) in replicas {
                let ReplicaPayload::Theorem11 {
                    ratio_lattice,
                    ratio_planar,
                    ..
                } = p
                else {
                    unreachable!()
                };
                rl.push(*ratio_lattice);
                rp.push(*ratio_planar);
            }
            let scale = (*n as f64).powf(*delta);
            Aggregate::Theorem11 {
                gamma: std::f64::consts::TAU * scale / scale.ln().powi(2),
                mean_ratio_lattice: mean(&rl),
                ci_lattice: bootstrap_mean_ci(&rl, boot_seed),
                mean_ratio_planar: mean(&rp),
                ci_planar: bootstrap_mean_ci(&rp, split_seed(boot_seed, 1)),
            }
        }
        Params::Fig7Slopes {
            small_lo, small_hi, ..
        } => {
            let a_values = fig7_grid(&config.params);
            let m = replicas.len() as f64;
            let mut mean_counts = vec![0.0; a_values.len()];
            for (_, p) in replicas {
                let ReplicaPayload::Fig7 { counts } = p else { unreachable!() };
                for (i, &c) in counts.iter().enumerate() {
                    mean_counts[i] += c as f64 / m;
                }
            }
            let small_points: Vec<(f64, f64)> = a_values
                .iter()
                .zip(&mean_counts)
                .take((*small_hi - *small_lo + 1) as usize)
                .filter(|&(_, &c)| c > 0.0)
                .map(|(&a, &c)| (a, c))
                .collect();
            let large_points: Vec<(f64, f64)> = a_values
                .iter()
                .zip(&mean_counts)
                .skip((*small_hi - *small_lo + 1) as usize)
                .filter(|&(_, &c)| c > 0.0)
                .map(|(&a, &c)| (a, c))
                .collect();
            // Log-count variance scales inversely with the pooled count, so
            // the fits weight each point by its total observed holes.
            let weights = |pts: &[(f64, f64)]| -> Vec<f64> {
                pts.iter().map(|&(_, c)| c * m).collect()
            };
            let small_fit = fit_exponent(&small_points, Some(&weights(&small_points))).ok();
            let large_fit = fit_exponent(&large_points, Some(&weights(&large_points))).ok();
            Aggregate::Fig7 {
                a_values,
                mean_counts,
                small_fit,
                large_fit,
            }
        }
        Params::Census { .. } => {
            let mut totals = Vec::new();
            let mut singles = Vec::new();
            let mut distincts = Vec::new();
            for (_, p) in replicas {
                let ReplicaPayload::Census {
                    total_holes,
                    single_site,
                    distinct_shapes,
                } = p
                else {
                    unreachable!()
                };
                totals.push(*total_holes as f64);
                singles.push(*single_site as f64);
                distincts.push(*distinct_shapes as f64);
            }
            Aggregate::Census {
                mean_total_holes: mean(&totals),
                mean_single_site: mean(&singles),
                ci_single_site: bootstrap_mean_ci(&singles, boot_seed),
                mean_distinct_shapes: mean(&distincts),
            }
        }
        Params::Coupling { n, .. } => {
            let mut sups: Vec<f64> = Vec::new();
            let mut within = 0usize;
            for (_, p) in replicas {
                let ReplicaPayload::Coupling {
                    sup_distance,
                    within_bound,
                    ..
                } = p
                else {
                    unreachable!()
                };
                sups.push(*sup_distance);
                within += usize::from(*within_bound);
            }
            sups.sort_by(|a, b| a.total_cmp(b));
            Aggregate::Coupling {
                bound: (*n as f64).powf(0.25) * (*n as f64).ln().powi(2),
                fraction_within_bound: within as f64 / sups.len() as f64,
                median_sup: sups[sups.len() / 2],
            }
        }
        Params::Disconnect { .. } | Params::Beurling { .. } => {
            let mut merged: Vec<DisconnectSample> = Vec::new();
            for (_, p) in replicas {
                let ReplicaPayload::Disconnect { samples } = p else { unreachable!() };
                if merged.is_empty() {
                    merged = samples.clone();
                } else {
                    for (m, s) in merged.iter_mut().zip(samples) {
                        *m = m.merge(s).expect("same grid");
                    }
                }
            }
            let p_hats: Vec<f64> = merged.iter().map(|s| s.p_hat()).collect();
            let points: Vec<(f64, f64)> = merged
                .iter()
                .filter(|s| s.successes > 0)
                .map(|s| (s.radius_or_time as f64, s.p_hat()))
                .collect();
            Aggregate::Disconnect {
                samples: merged,
                p_hats,
                fit: fit_exponent(&points, None).ok(),
            }
        }
        Params::FrontierScaling { ns } => {
            let m = replicas.len() as f64;
            let mut mean_counts = vec![0.0; ns.len()];
            for (_, p) in replicas {
                let ReplicaPayload::Frontier { counts } = p else { unreachable!() };
                for (i, &c) in counts.iter().enumerate() {
                    mean_counts[i] += c as f64 / m;
                }
            }
            let points: Vec<(f64, f64)> = ns
                .iter()
                .zip(&mean_counts)
                .filter(|&(_, &c)| c > 0.0)
                .map(|(&n, &c)| (n as f64, c))
                .collect();
            Aggregate::Frontier {
                ns: ns.clone(),
                mean_counts,
                fit: fit_exponent(&points, None).ok(),
            }
        }
        Params::Legall { u_fracs, .. } => {
            let m = replicas.len() as f64;
            let mut mean_ratios = vec![0.0; u_fracs.len()];
            let mut monotone = 0usize;
            for (_, p) in replicas {
                let ReplicaPayload::Legall {
                    ratios,
                    monotone_toward_2pi,
                } = p
                else {
                    unreachable!()
                };
                for (i, &r) in ratios.iter().enumerate() {
                    mean_ratios[i] += r / m;
                }
                monotone += usize::from(*monotone_toward_2pi);
            }
            Aggregate::Legall {
                u_fracs: u_fracs.clone(),
                mean_ratios,
                monotone_fraction: monotone as f64 / m,
            }
        }
    }
}

fn assemble(
    config: &RunConfig,
    replicas: Vec<(u64, ReplicaPayload)>,
    partial: bool,
    wall_ms: u64,
) -> RunRecord {
    let aggregate = aggregate(config, &replicas);
    let mut record = RunRecord {
        schema_version: SCHEMA_VERSION,
        config: config.echo(),
        replicas,
        aggregate,
        determinism_hash: String::new(),
        partial,
        wall_ms,
    };
    record.determinism_hash = determinism_hash(&record);
    record
}

/// SHA-256 over the canonical JSON of everything except timings.
pub fn determinism_hash(record: &RunRecord) -> String {
    #[derive(Serialize)]
    struct Hashable<'a> {
        schema_version: u32,
        config: &'a BTreeMap<String, String>,
        replicas: &'a [(u64, ReplicaPayload)],
        aggregate: &'a Aggregate,
        partial: bool,
    }
    let bytes = serde_json::to_vec(&Hashable {
        schema_version: record.schema_version,
        config: &record.config,
        replicas: &record.replicas,
        aggregate: &record.aggregate,
        partial: record.partial,
    })
    .expect("serializable");
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    format!("{:x}", hasher.finalize())
}

/// Merge split runs over disjoint replica index sets into one record.
pub fn merge_records(records: &[RunRecord]) -> Result<RunRecord> {
    if records.is_empty() {
        return Err(Error::Conflict("nothing to merge".into()));
    }
    let strip = |cfg: &BTreeMap<String, String>| {
        let mut c = cfg.clone();
        c.remove("replicas");
        c.remove("replica_base");
        c
    };
    let base_cfg = strip(&records[0].config);
    for r in &records[1..] {
        if strip(&r.config) != base_cfg {
            return Err(Error::Conflict(
                "records have different configs beyond replica ranges".into(),
            ));
        }
    }
    if records.iter().any(|r| r.partial) {
        return Err(Error::Conflict("cannot merge partial records".into()));
    }
    let mut replicas: Vec<(u64, ReplicaPayload)> = Vec::new();
    for r in records {
        replicas.extend(r.replicas.iter().cloned());
    }
    replicas.sort_by_key(|(i, _)| *i);
    for w in replicas.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::Conflict(format!(
                "overlapping replica index {}",
                w[0].0
            )));
        }
    }
    // Rebuild the config for the merged range.
    let experiment = Experiment::parse(&records[0].config["experiment"])?;
    let mut flat = String::new();
    for (k, v) in &records[0].config {
        if k == "experiment" {
            continue;
        }
        flat.push_str(&format!("{k} = {v}\n"));
    }
    let mut config = RunConfig::parse(experiment, &flat)?;
    config.replica_base = replicas.first().map_or(0, |(i, _)| *i);
    config.replicas = replicas.len() as u64;
    let wall = records.iter().map(|r| r.wall_ms).sum();
    Ok(assemble(&config, replicas, false, wall))
}

/// Write a record as NDJSON: one line per replica, then the aggregate line.
pub fn write_ndjson(record: &RunRecord, mut out: impl Write) -> Result<()> {
    #[derive(Serialize)]
    struct ReplicaLine<'a> {
        schema_version: u32,
        line: &'static str,
        replica_index: u64,
        payload: &'a ReplicaPayload,
    }
    #[derive(Serialize)]
    struct AggregateLine<'a> {
        schema_version: u32,
        line: &'static str,
        config: &'a BTreeMap<String, String>,
        aggregate: &'a Aggregate,
        determinism_hash: &'a str,
        partial: bool,
        wall_ms: u64,
    }
    for (idx, payload) in &record.replicas {
        let l = ReplicaLine {
            schema_version: record.schema_version,
            line: "replica",
            replica_index: *idx,
            payload,
        };
        serde_json::to_writer(&mut out, &l)?;
        out.write_all(b"\n")?;
    }
    let l = AggregateLine {
        schema_version: record.schema_version,
        line: "aggregate",
        config: &record.config,
        aggregate: &record.aggregate,
        determinism_hash: &record.determinism_hash,
        partial: record.partial,
        wall_ms: record.wall_ms,
    };
    serde_json::to_writer(&mut out, &l)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Read a record back from NDJSON text.
pub fn read_ndjson(text: &str) -> Result<RunRecord> {
    #[derive(Deserialize)]
    struct Line {
        schema_version: u32,
        line: String,
        replica_index: Option<u64>,
        payload: Option<ReplicaPayload>,
        config: Option<BTreeMap<String, String>>,
        aggregate: Option<Aggregate>,
        determinism_hash: Option<String>,
        partial: Option<bool>,
        wall_ms: Option<u64>,
    }
    let mut replicas = Vec::new();
    let mut tail: Option<Line> = None;
    for raw in text.lines() {
        if raw.trim().is_empty() {
            continue;
        }
        let line: Line = serde_json::from_str(raw)?;
        if line.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema version {}",
                line.schema_version
            )));
        }
        match line.line.as_str() {
            "replica" => {
                let idx = line
                    .replica_index
                    .ok_or_else(|| Error::Config("replica line without index".into()))?;
                let payload = line
                    .payload
                    .ok_or_else(|| Error::Config("replica line without payload".into()))?;
                replicas.push((idx, payload));
            }
            "aggregate" => tail = Some(line),
            other => return Err(Error::Config(format!("unknown line type `{other}`"))),
        }
    }
    let tail = tail.ok_or_else(|| Error::Config("missing aggregate line".into()))?;
    Ok(RunRecord {
        schema_version: SCHEMA_VERSION,
        config: tail.config.ok_or_else(|| Error::Config("missing config".into()))?,
        replicas,
        aggregate: tail
            .aggregate
            .ok_or_else(|| Error::Config("missing aggregate".into()))?,
        determinism_hash: tail.determinism_hash.unwrap_or_default(),
        partial: tail.partial.unwrap_or(false),
        wall_ms: tail.wall_ms.unwrap_or(0),
    })
}

/// Emit the CSV tables matching the record's experiment into `dir`.
pub fn write_csv_tables(record: &RunRecord, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let mut written = Vec::new();
    let experiment = record.config["experiment"].clone();
    match &record.aggregate {
        Aggregate::Spectrum { pooled_bins, .. } => {
            let n = &record.config["n"];
            let kind = &record.config["kind"];
            let path = dir.join(format!("{experiment}_bins.csv"));
            let mut f = std::fs::File::create(&path)?;
            writeln!(f, "n,kind,bin_lo,bin_hi,count")?;
            for b in pooled_bins {
                writeln!(f, "{n},{kind},{},{},{}", b.lo, b.hi, b.count)?;
            }
            written.push(path);
        }
        Aggregate::Fig7 {
            a_values,
            mean_counts,
            small_fit,
            large_fit,
        } => {
            let path = dir.join(format!("{experiment}_fits.csv"));
            let mut f = std::fs::File::create(&path)?;
            writeln!(f, "x,y,slope,stderr")?;
            let small_hi: f64 = record.config["small_hi"].parse().unwrap_or(20.0);
            for (a, c) in a_values.iter().zip(mean_counts) {
                let fit = if *a <= small_hi { small_fit } else { large_fit };
                let (slope, stderr) = fit.map_or((f64::NAN, f64::NAN), |e| (e.slope, e.stderr));
                writeln!(f, "{a},{c},{slope},{stderr}")?;
            }
            written.push(path);
        }
        Aggregate::Disconnect { samples, fit, .. } => {
            let path = dir.join(format!("{experiment}_estimates.csv"));
            let mut f = std::fs::File::create(&path)?;
            writeln!(f, "variant,param,trials,successes,p_hat,ci_lo,ci_hi")?;
            for s in samples {
                let (lo, hi) = s.wilson_ci();
                let v = serde_json::to_value(s.variant)?;
                writeln!(
                    f,
                    "{},{},{},{},{},{lo},{hi}",
                    v.as_str().unwrap(),
                    s.radius_or_time,
                    s.trials,
                    s.successes,
                    s.p_hat()
                )?;
            }
            written.push(path);
            if let Some(fit) = fit {
                let path = dir.join(format!("{experiment}_fits.csv"));
                let mut f = std::fs::File::create(&path)?;
                writeln!(f, "x,y,slope,stderr")?;
                for s in samples {
                    writeln!(
                        f,
                        "{},{},{},{}",
                        s.radius_or_time,
                        s.p_hat(),
                        fit.slope,
                        fit.stderr
                    )?;
                }
                written.push(path);
            }
        }
        Aggregate::Frontier {
            ns,
            mean_counts,
            fit,
        } => {
            let path = dir.join(format!("{experiment}_fits.csv"));
            let mut f = std::fs::File::create(&path)?;
            writeln!(f, "x,y,slope,stderr")?;
            for (n, c) in ns.iter().zip(mean_counts) {
                let (slope, stderr) = fit.map_or((f64::NAN, f64::NAN), |e| (e.slope, e.stderr));
                writeln!(f, "{n},{c},{slope},{stderr}")?;
            }
            written.push(path);
        }
        _ => {}
    }
    Ok(written)
}
