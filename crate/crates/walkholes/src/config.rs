//! Flat key-value experiment configuration.
//!
//! Config files are `key = value` lines with `#` comments. Every key is
//! typed, defaults are materialized into the canonical echo, and unknown
//! keys are rejected.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::disconnect::DisconnectVariant;
use crate::error::{Error, Result};
use crate::holes::HoleKind;

/// The experiments the runner knows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Spectrum,
    Theorem11,
    Fig7Slopes,
    Census,
    Coupling,
    Disconnect,
    Beurling,
    FrontierScaling,
    Legall,
}

impl Experiment {
    pub fn parse(name: &str) -> Result<Experiment> {
        Ok(match name {
            "spectrum" => Experiment::Spectrum,
            "theorem11" => Experiment::Theorem11,
            "fig7_slopes" => Experiment::Fig7Slopes,
            "census" => Experiment::Census,
            "coupling" => Experiment::Coupling,
            "disconnect" => Experiment::Disconnect,
            "beurling" => Experiment::Beurling,
            "frontier_scaling" => Experiment::FrontierScaling,
            "legall" => Experiment::Legall,
            other => {
                return Err(Error::Usage(format!(
                    "unknown experiment `{other}` (expected one of: spectrum, theorem11, \
                     fig7_slopes, census, coupling, disconnect, beurling, frontier_scaling, \
                     legall)"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::Theorem11 => "theorem11",
            Experiment::Fig7Slopes => "fig7_slopes",
            Experiment::Census => "census",
            Experiment::Coupling => "coupling",
            Experiment::Disconnect => "disconnect",
            Experiment::Beurling => "beurling",
            Experiment::FrontierScaling => "frontier_scaling",
            Experiment::Legall => "legall",
        }
    }
}

/// Raw parsed key-value pairs with consumption tracking.
struct Keys {
    values: BTreeMap<String, String>,
    consumed: BTreeSet<String>,
}

impl Keys {
    fn parse(text: &str) -> Result<Keys> {
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let k = k.trim().to_string();
            let v = v.trim().to_string();
            if values.insert(k.clone(), v).is_some() {
                return Err(Error::Config(format!("duplicate key `{k}`")));
            }
        }
        Ok(Keys {
            values,
            consumed: BTreeSet::new(),
        })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.consumed.insert(key.to_string());
        self.values.get(key).cloned()
    }

    fn u64(&mut self, key: &'static str, default: Option<u64>) -> Result<u64> {
        match self.take(key) {
            None => default.ok_or_else(|| Error::Config(format!("missing key `{key}`"))),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("key `{key}`: `{v}` is not an integer"))),
        }
    }

    fn f64(&mut self, key: &'static str, default: Option<f64>) -> Result<f64> {
        match self.take(key) {
            None => default.ok_or_else(|| Error::Config(format!("missing key `{key}`"))),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("key `{key}`: `{v}` is not a number"))),
        }
    }

    fn bool(&mut self, key: &'static str, default: bool) -> Result<bool> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => match v.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(Error::Config(format!(
                    "key `{key}`: `{v}` is not `true`/`false`"
                ))),
            },
        }
    }

    fn u64_list(&mut self, key: &'static str, default: Option<&[u64]>) -> Result<Vec<u64>> {
        match self.take(key) {
            None => default
                .map(|d| d.to_vec())
                .ok_or_else(|| Error::Config(format!("missing key `{key}`"))),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("key `{key}`: `{s}` is not an integer")))
                })
                .collect(),
        }
    }

    fn f64_list(&mut self, key: &'static str, default: Option<&[f64]>) -> Result<Vec<f64>> {
        match self.take(key) {
            None => default
                .map(|d| d.to_vec())
                .ok_or_else(|| Error::Config(format!("missing key `{key}`"))),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("key `{key}`: `{s}` is not a number")))
                })
                .collect(),
        }
    }

    fn kind(&mut self, key: &'static str, default: HoleKind) -> Result<HoleKind> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => match v.as_str() {
                "lattice" => Ok(HoleKind::Lattice),
                "planar" => Ok(HoleKind::Planar),
                _ => Err(Error::Config(format!(
                    "key `{key}`: `{v}` is not `lattice`/`planar`"
                ))),
            },
        }
    }

    fn reject_unknown(&self) -> Result<()> {
        for k in self.values.keys() {
            if !self.consumed.contains(k) {
                return Err(Error::Config(format!("unknown key `{k}`")));
            }
        }
        Ok(())
    }
}

/// Fully resolved configuration of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub master_seed: u64,
    pub replicas: u64,
    /// Index of the first replica; sub-seeds are derived from absolute
    /// replica indices so split runs merge exactly.
    pub replica_base: u64,
    pub params: Params,
}

/// Per-experiment parameters, defaults materialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Params {
    Spectrum {
        n: u64,
        kind: HoleKind,
        delta: f64,
        eps: f64,
        include_unbounded: bool,
    },
    Theorem11 {
        n: u64,
        delta: f64,
        include_unbounded: bool,
    },
    Fig7Slopes {
        n: u64,
        kind: HoleKind,
        small_lo: u64,
        small_hi: u64,
        large_lo_exp: f64,
        large_hi_exp: f64,
        large_points: u64,
    },
    Census {
        n: u64,
        kind: HoleKind,
    },
    Coupling {
        n: u64,
        dt: f64,
    },
    Disconnect {
        variant: DisconnectVariant,
        params: Vec<u64>,
        trials_per_replica: u64,
    },
    Beurling {
        n: u64,
        xs: Vec<u64>,
        trials_per_replica: u64,
    },
    FrontierScaling {
        ns: Vec<u64>,
    },
    Legall {
        n: u64,
        dt: f64,
        h: f64,
        u_fracs: Vec<f64>,
    },
}

impl RunConfig {
    /// Parse a config file body for the named experiment.
    pub fn parse(experiment: Experiment, text: &str) -> Result<RunConfig> {
        let mut keys = Keys::parse(text)?;
        let master_seed = keys.u64("master_seed", Some(0))?;
        let replicas = keys.u64("replicas", Some(1))?;
        let replica_base = keys.u64("replica_base", Some(0))?;
        let params = match experiment {
            Experiment::Spectrum => Params::Spectrum {
                n: keys.u64("n", None)?,
                kind: keys.kind("kind", HoleKind::Planar)?,
                delta: keys.f64("delta", Some(0.4))?,
                eps: keys.f64("eps", Some(0.5))?,
                include_unbounded: keys.bool("include_unbounded", false)?,
            },
            Experiment::Theorem11 => Params::Theorem11 {
                n: keys.u64("n", None)?,
                delta: keys.f64("delta", Some(0.4))?,
                include_unbounded: keys.bool("include_unbounded", false)?,
            },
            Experiment::Fig7Slopes => Params::Fig7Slopes {
                n: keys.u64("n", None)?,
                kind: keys.kind("kind", HoleKind::Lattice)?,
                small_lo: keys.u64("small_lo", Some(1))?,
                small_hi: keys.u64("small_hi", Some(20))?,
                large_lo_exp: keys.f64("large_lo_exp", Some(0.5))?,
                large_hi_exp: keys.f64("large_hi_exp", Some(0.9))?,
                large_points: keys.u64("large_points", Some(12))?,
            },
            Experiment::Census => Params::Census {
                n: keys.u64("n", None)?,
                kind: keys.kind("kind", HoleKind::Lattice)?,
            },
            Experiment::Coupling => Params::Coupling {
                n: keys.u64("n", None)?,
                dt: keys.f64("dt", Some(1.0 / 64.0))?,
            },
            Experiment::Disconnect => {
                let variant = match keys.take("variant").as_deref() {
                    Some("one_sided") => DisconnectVariant::OneSidedRadius,
                    Some("two_sided_time") => DisconnectVariant::TwoSidedTime,
                    Some("two_sided_radius") => DisconnectVariant::TwoSidedRadius,
                    Some(v) => {
                        return Err(Error::Config(format!(
                            "key `variant`: `{v}` is not one_sided/two_sided_time/two_sided_radius"
                        )))
                    }
                    None => return Err(Error::Config("missing key `variant`".into())),
                };
                Params::Disconnect {
                    variant,
                    params: keys.u64_list("params", Some(&[16, 32, 64, 128, 256, 512]))?,
                    trials_per_replica: keys.u64("trials_per_replica", Some(10_000))?,
                }
            }
            Experiment::Beurling => Params::Beurling {
                n: keys.u64("n", Some(512))?,
                xs: keys.u64_list("xs", Some(&[1, 2, 4, 8, 16, 32, 64]))?,
                trials_per_replica: keys.u64("trials_per_replica", Some(10_000))?,
            },
            Experiment::FrontierScaling => Params::FrontierScaling {
                ns: keys.u64_list("ns", Some(&[10_000, 100_000, 1_000_000]))?,
            },
            Experiment::Legall => Params::Legall {
                n: keys.u64("n", Some(20_000))?,
                dt: keys.f64("dt", Some(1.0 / 64.0))?,
                h: keys.f64("h", Some(0.5))?,
                u_fracs: keys.f64_list("u_fracs", Some(&[0.1, 0.01, 0.001]))?,
            },
        };
        keys.reject_unknown()?;
        let config = RunConfig {
            experiment,
            master_seed,
            replicas,
            replica_base,
            params,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.params {
            Params::Spectrum { n, delta, eps, .. } => {
                check_n(*n)?;
                check_delta(*delta)?;
                if *eps <= 0.0 {
                    return Err(Error::argument("eps", "must be positive"));
                }
            }
            Params::Theorem11 { n, delta, .. } => {
                check_n(*n)?;
                check_delta(*delta)?;
            }
            Params::Fig7Slopes {
                n,
                small_lo,
                small_hi,
                large_lo_exp,
                large_hi_exp,
                large_points,
                ..
            } => {
                check_n(*n)?;
                if small_lo >= small_hi {
                    return Err(Error::argument("small_lo", "small window is empty"));
                }
                if !(large_lo_exp < large_hi_exp && *large_lo_exp > 0.0 && *large_hi_exp < 1.0) {
                    return Err(Error::argument("large_lo_exp", "need 0 < lo < hi < 1"));
                }
                if *large_points < 2 {
                    return Err(Error::argument("large_points", "need >= 2"));
                }
            }
            Params::Census { n, .. } => check_n(*n)?,
            Params::Coupling { n, dt } => {
                check_n(*n)?;
                if !(*dt > 0.0 && *dt <= 0.25) {
                    return Err(Error::argument("dt", "must be in (0, 1/4]"));
                }
            }
            Params::Disconnect {
                params,
                trials_per_replica,
                ..
            } => {
                if params.is_empty() || params.iter().any(|&p| p == 0) {
                    return Err(Error::argument("params", "need nonempty positive params"));
                }
                if *trials_per_replica == 0 {
                    return Err(Error::argument("trials_per_replica", "must be >= 1"));
                }
            }
            Params::Beurling { n, xs, .. } => {
                check_n(*n)?;
                if xs.is_empty() || xs.iter().any(|&x| x == 0 || x > *n) {
                    return Err(Error::argument("xs", "need 1 <= |x| <= n"));
                }
            }
            Params::FrontierScaling { ns } => {
                if ns.len() < 2 {
                    return Err(Error::argument("ns", "need >= 2 sizes"));
                }
                for &n in ns {
                    check_n(n)?;
                }
            }
            Params::Legall { n, dt, h, u_fracs } => {
                check_n(*n)?;
                if !(*dt > 0.0 && *dt <= 0.25) {
                    return Err(Error::argument("dt", "must be in (0, 1/4]"));
                }
                if !(*h > 0.0 && *h <= 1.0) {
                    return Err(Error::argument("h", "must be in (0, 1]"));
                }
                if u_fracs.len() < 2 || u_fracs.windows(2).any(|w| w[1] >= w[0]) {
                    return Err(Error::argument("u_fracs", "need a decreasing list"));
                }
            }
        }
        Ok(())
    }

    /// Canonical flat echo with every default materialized; reproducing the
    /// run needs nothing else.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("experiment".into(), self.experiment.name().into());
        m.insert("master_seed".into(), self.master_seed.to_string());
        m.insert("replicas".into(), self.replicas.to_string());
        m.insert("replica_base".into(), self.replica_base.to_string());
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        match &self.params {
            Params::Spectrum {
                n,
                kind,
                delta,
                eps,
                include_unbounded,
            } => {
                put("n", n.to_string());
                put("kind", kind_name(*kind).into());
                put("delta", fmt_f64(*delta));
                put("eps", fmt_f64(*eps));
                put("include_unbounded", include_unbounded.to_string());
            }
            Params::Theorem11 {
                n,
                delta,
                include_unbounded,
            } => {
                put("n", n.to_string());
                put("delta", fmt_f64(*delta));
                put("include_unbounded", include_unbounded.to_string());
            }
            Params::Fig7Slopes {
                n,
                kind,
                small_lo,
                small_hi,
                large_lo_exp,
                large_hi_exp,
                large_points,
            } => {
                put("n", n.to_string());
                put("kind", kind_name(*kind).into());
                put("small_lo", small_lo.to_string());
                put("small_hi", small_hi.to_string());
                put("large_lo_exp", fmt_f64(*large_lo_exp));
                put("large_hi_exp", fmt_f64(*large_hi_exp));
                put("large_points", large_points.to_string());
            }
            Params::Census { n, kind } => {
                put("n", n.to_string());
                put("kind", kind_name(*kind).into());
            }
            Params::Coupling { n, dt } => {
                put("n", n.to_string());
                put("dt", fmt_f64(*dt));
            }
            Params::Disconnect {
                variant,
                params,
                trials_per_replica,
            } => {
                let v = match variant {
                    DisconnectVariant::OneSidedRadius => "one_sided",
                    DisconnectVariant::TwoSidedTime => "two_sided_time",
                    DisconnectVariant::TwoSidedRadius => "two_sided_radius",
                    DisconnectVariant::Beurling => "beurling",
                };
                put("variant", v.into());
                put("params", join_u64(params));
                put("trials_per_replica", trials_per_replica.to_string());
            }
            Params::Beurling {
                n,
                xs,
                trials_per_replica,
            } => {
                put("n", n.to_string());
                put("xs", join_u64(xs));
                put("trials_per_replica", trials_per_replica.to_string());
            }
            Params::FrontierScaling { ns } => {
                put("ns", join_u64(ns));
            }
            Params::Legall { n, dt, h, u_fracs } => {
                put("n", n.to_string());
                put("dt", fmt_f64(*dt));
                put("h", fmt_f64(*h));
                put(
                    "u_fracs",
                    u_fracs.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(","),
                );
            }
        }
        m
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::argument("n", "must be >= 1"));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::argument("delta", "must be in (0, 1)"));
    }
    Ok(())
}

fn kind_name(kind: HoleKind) -> &'static str {
    match kind {
        HoleKind::Lattice => "lattice",
        HoleKind::Planar => "planar",
    }
}

fn fmt_f64(v: f64) -> String {
    // Shortest round-trip formatting keeps echoes canonical.
    format!("{v}")
}

fn join_u64(vs: &[u64]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip_with_defaults() {
        let cfg = RunConfig::parse(
            Experiment::Theorem11,
            "n = 10000\nmaster_seed = 7\nreplicas = 10\n# comment\ndelta = 0.4\n",
        )
        .unwrap();
        assert_eq!(cfg.master_seed, 7);
        assert_eq!(cfg.replicas, 10);
        let echo = cfg.echo();
        assert_eq!(echo["experiment"], "theorem11");
        assert_eq!(echo["include_unbounded"], "false");
        assert_eq!(echo["delta"], "0.4");
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = RunConfig::parse(Experiment::Theorem11, "n = 10\nbogus = 3\n").unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn missing_required_key() {
        let err = RunConfig::parse(Experiment::Theorem11, "delta = 0.4\n").unwrap_err();
        assert!(err.to_string().contains("missing key `n`"), "{err}");
    }

    #[test]
    fn invalid_values_name_the_field() {
        let err = RunConfig::parse(Experiment::Coupling, "n = 100\ndt = 0.3\n").unwrap_err();
        assert!(err.to_string().contains("dt"), "{err}");
        let err =
            RunConfig::parse(Experiment::Legall, "u_fracs = 0.1, 0.5\n").unwrap_err();
        assert!(err.to_string().contains("u_fracs"), "{err}");
    }

    #[test]
    fn duplicate_key_rejected() {
        let err = RunConfig::parse(Experiment::Theorem11, "n = 1\nn = 2\n").unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn experiment_names_roundtrip() {
        for name in [
            "spectrum",
            "theorem11",
            "fig7_slopes",
            "census",
            "coupling",
            "disconnect",
            "beurling",
            "frontier_scaling",
            "legall",
        ] {
            assert_eq!(Experiment::parse(name).unwrap().name(), name);
        }
        assert!(Experiment::parse("nope").is_err());
    }
}
