//! Key=value scenario files for the `eval` and `routesim` subcommands.
//!
//! One `key = value` per line, `#` comments. Example:
//!
//! ```text
//! topology = gnm:1024:3072        # or geometric:4096:6.0, file:as.edges
//! schemes  = rear,rear_opt,tz:2,tz_d:2,res:1
//! alpha    = 32
//! seeds    = 1,2,3
//! pairs    = sources:0.25         # or all
//! profile  = paper-eval           # or uniform, degree
//! variant  = stored               # or onfly
//! budgets  = 0,1,2,4              # probe curves (routesim)
//! orders   = farthest_first,closest_first
//! flows    = 1000
//! ```

use std::path::PathBuf;

use thiserror::Error;
use vicinity::routing::ProbeOrder;
use vicinity::stretch2::Variant;

use crate::eval::{Experiment, PairSampling, SamplingProfile, SchemeSpec, Topology};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("missing required key {0:?}")]
    Missing(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A parsed scenario: the experiment plus simulator knobs.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub experiment: Experiment,
    pub budgets: Vec<usize>,
    pub orders: Vec<ProbeOrder>,
    pub probe_budget: usize,
    pub probe_order: ProbeOrder,
    pub mtu: u64,
    pub id_bytes: u64,
}

pub fn parse_scheme(s: &str) -> Option<SchemeSpec> {
    let (name, arg) = match s.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (s, None),
    };
    let k = |default: u32| arg.and_then(|a| a.parse().ok()).unwrap_or(default);
    match name {
        "rear" => Some(SchemeSpec::Rear),
        "rear_opt" => Some(SchemeSpec::RearOpt),
        "res" => Some(SchemeSpec::Res { k: k(1) }),
        "res_opt" => Some(SchemeSpec::ResOpt { k: k(1) }),
        "tz" => Some(SchemeSpec::Tz { k: k(2) }),
        "tz_d" => Some(SchemeSpec::TzDegreeSampled { k: k(2) }),
        "additive2" => Some(SchemeSpec::Additive2),
        "additive4k" => Some(SchemeSpec::Additive4k { k: k(1) }),
        _ => None,
    }
}

pub fn parse_topology(s: &str) -> Option<Topology> {
    let mut parts = s.splitn(3, ':');
    match parts.next()? {
        "gnm" => {
            let n = parts.next()?.parse().ok()?;
            let m = parts.next()?.parse().ok()?;
            Some(Topology::Gnm { n, m })
        }
        "geometric" => {
            let n = parts.next()?.parse().ok()?;
            let deg = parts.next()?.parse().ok()?;
            Some(Topology::Geometric { n, deg })
        }
        "file" => Some(Topology::File(PathBuf::from(parts.next()?))),
        _ => None,
    }
}

fn parse_order(s: &str) -> Option<ProbeOrder> {
    match s {
        "farthest_first" => Some(ProbeOrder::FarthestFirst),
        "closest_first" => Some(ProbeOrder::ClosestFirst),
        _ => None,
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut topology = None;
    let mut schemes = vec![SchemeSpec::Rear];
    let mut alpha = 32.0f64;
    let mut seeds = vec![1u64];
    type Patch = Box<dyn FnOnce(&mut Experiment)>;
    let mut exp_overrides: Vec<Patch> = Vec::new();
    let mut budgets = vec![0usize, 1, 2, 4];
    let mut orders = vec![ProbeOrder::FarthestFirst, ProbeOrder::ClosestFirst];
    let mut probe_budget = 0usize;
    let mut probe_order = ProbeOrder::FarthestFirst;
    let mut mtu = 1500u64;
    let mut id_bytes = 4u64;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let data = raw.split('#').next().unwrap_or("").trim();
        if data.is_empty() {
            continue;
        }
        let bad = |msg: String| ScenarioError::Malformed { line, msg };
        let (key, value) = data
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key = value, got {data:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "topology" => {
                topology =
                    Some(parse_topology(value).ok_or_else(|| bad(format!("bad topology {value:?}")))?)
            }
            "schemes" => {
                schemes = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_scheme(s).ok_or_else(|| bad(format!("unknown scheme {s:?}"))))
                    .collect::<Result<_, _>>()?;
            }
            "alpha" => alpha = value.parse().map_err(|_| bad("bad alpha".into()))?,
            "seeds" => {
                seeds = value
                    .split(',')
                    .map(|s| s.trim().parse().map_err(|_| bad(format!("bad seed {s:?}"))))
                    .collect::<Result<_, _>>()?;
            }
            "pairs" => {
                let sampling = if value == "all" {
                    PairSampling::All
                } else if let Some(frac) = value.strip_prefix("sources:") {
                    PairSampling::Sources {
                        fraction: frac.parse().map_err(|_| bad("bad fraction".into()))?,
                    }
                } else {
                    return Err(bad(format!("bad pairs {value:?}")));
                };
                exp_overrides.push(Box::new(move |e| e.pair_sampling = sampling));
            }
            "profile" => {
                let p = match value {
                    "paper-eval" => SamplingProfile::PaperEval,
                    "uniform" => SamplingProfile::Uniform,
                    "degree" => SamplingProfile::Degree,
                    _ => return Err(bad(format!("bad profile {value:?}"))),
                };
                exp_overrides.push(Box::new(move |e| e.profile = p));
            }
            "variant" => {
                let v = match value {
                    "stored" => Variant::Stored,
                    "onfly" => Variant::OnFly,
                    _ => return Err(bad(format!("bad variant {value:?}"))),
                };
                exp_overrides.push(Box::new(move |e| e.variant = v));
            }
            "strict_paper" => {
                let b = parse_bool(value).ok_or_else(|| bad("bad bool".into()))?;
                exp_overrides.push(Box::new(move |e| e.strict_paper = b));
            }
            "vv_intersect" => {
                let b = parse_bool(value).ok_or_else(|| bad("bad bool".into()))?;
                exp_overrides.push(Box::new(move |e| e.vicinity_vicinity = b));
            }
            "no_exact" => {
                let b = parse_bool(value).ok_or_else(|| bad("bad bool".into()))?;
                exp_overrides.push(Box::new(move |e| e.no_exact = b));
            }
            "exact_cap" => {
                let c = value.parse().map_err(|_| bad("bad cap".into()))?;
                exp_overrides.push(Box::new(move |e| e.exact_cap = c));
            }
            "retries" => {
                let r = value.parse().map_err(|_| bad("bad retries".into()))?;
                exp_overrides.push(Box::new(move |e| e.retries = r));
            }
            "collect_rows" => {
                let b = parse_bool(value).ok_or_else(|| bad("bad bool".into()))?;
                exp_overrides.push(Box::new(move |e| e.collect_rows = b));
            }
            "flows" => {
                let f = value.parse().map_err(|_| bad("bad flows".into()))?;
                exp_overrides.push(Box::new(move |e| e.flows = f));
            }
            "budgets" => {
                budgets = value
                    .split(',')
                    .map(|s| s.trim().parse().map_err(|_| bad(format!("bad budget {s:?}"))))
                    .collect::<Result<_, _>>()?;
            }
            "orders" => {
                orders = value
                    .split(',')
                    .map(str::trim)
                    .map(|s| parse_order(s).ok_or_else(|| bad(format!("bad order {s:?}"))))
                    .collect::<Result<_, _>>()?;
            }
            "probe_budget" => probe_budget = value.parse().map_err(|_| bad("bad budget".into()))?,
            "probe_order" => {
                probe_order = parse_order(value).ok_or_else(|| bad(format!("bad order {value:?}")))?
            }
            "mtu" => mtu = value.parse().map_err(|_| bad("bad mtu".into()))?,
            "id_bytes" => id_bytes = value.parse().map_err(|_| bad("bad id_bytes".into()))?,
            other => return Err(bad(format!("unknown key {other:?}"))),
        }
    }

    let topology = topology.ok_or(ScenarioError::Missing("topology"))?;
    let mut experiment = Experiment::new(topology, schemes, alpha, seeds);
    for patch in exp_overrides {
        patch(&mut experiment);
    }
    Ok(Scenario { experiment, budgets, orders, probe_budget, probe_order, mtu, id_bytes })
}

pub fn load_scenario(path: &std::path::Path) -> Result<Scenario, ScenarioError> {
    parse_scenario(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_scenario() {
        let text = "\
# comment
topology = gnm:1024:3072
schemes = rear, tz:2, tz_d:2, additive4k:2
alpha = 32
seeds = 1,2,3
pairs = sources:0.25
profile = paper-eval
variant = stored
budgets = 0,2
orders = farthest_first
flows = 500
mtu = 9000
";
        let sc = parse_scenario(text).unwrap();
        assert_eq!(sc.experiment.topology, Topology::Gnm { n: 1024, m: 3072 });
        assert_eq!(sc.experiment.schemes.len(), 4);
        assert_eq!(sc.experiment.schemes[3], SchemeSpec::Additive4k { k: 2 });
        assert_eq!(sc.experiment.profile, SamplingProfile::PaperEval);
        assert_eq!(sc.experiment.flows, 500);
        assert_eq!(sc.budgets, vec![0, 2]);
        assert_eq!(sc.mtu, 9000);
    }

    #[test]
    fn rejects_unknown_keys_and_missing_topology() {
        assert!(matches!(
            parse_scenario("topology = gnm:8:8\nwat = 1"),
            Err(ScenarioError::Malformed { line: 2, .. })
        ));
        assert!(matches!(parse_scenario("alpha = 2"), Err(ScenarioError::Missing("topology"))));
    }

    #[test]
    fn geometric_and_file_topologies() {
        assert_eq!(
            parse_topology("geometric:256:6.0"),
            Some(Topology::Geometric { n: 256, deg: 6.0 })
        );
        assert!(matches!(parse_topology("file:as.edges"), Some(Topology::File(_))));
        assert_eq!(parse_topology("ring:5"), None);
    }
}
