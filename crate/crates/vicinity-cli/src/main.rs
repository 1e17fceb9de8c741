//! Command-line harness: graph generation, oracle builds, single queries,
//! experiment evaluation and the routing simulator.
//!
//! Exit codes: 0 ok, 1 usage error, 2 data error (parse, IO, build),
//! 3 bound violation detected during self-check.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vicinity::additive::{build_additive, AdditiveConfig, AdditiveMode};
use vicinity::generators::{gen_connected, gen_geometric, gen_gnm};
use vicinity::graph::Graph;
use vicinity::landmark::LandmarkMode;
use vicinity::mult::{build_mult, MultConfig};
use vicinity::stretch2::{build_stretch2, Stretch2Config, Variant};
use vicinity::tz::tz_build;
use vicinity_cli::container::{self, OracleContainer};
use vicinity_cli::edgelist;
use vicinity_cli::eval::{run_experiment, run_routesim};
use vicinity_cli::report;
use vicinity_cli::scenario::{self, Scenario};

#[derive(Parser)]
#[command(name = "vicinity", version, about = "Approximate distance oracles for sparse graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args, Clone)]
struct GlobalArgs {
    /// Build / experiment seed (eval: replaces the config's seed list).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Landmark sampling parameter.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Sub-oracle levels.
    #[arg(long, global = true)]
    k: Option<u32>,
    /// Vicinity handling of the search-based oracles.
    #[arg(long, global = true, value_enum)]
    variant: Option<VariantArg>,
    /// Landmark sampling profile.
    #[arg(long, global = true, value_enum)]
    sampling: Option<SamplingArg>,
    /// Disable the symmetric second intersection check.
    #[arg(long, global = true)]
    strict_paper: bool,
    /// Skip the exact-oracle comparison (allows over-cap topologies).
    #[arg(long, global = true)]
    no_exact: bool,
    /// Output file (gen, build, query) or directory (eval, routesim).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Onfly,
    Stored,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Onfly => Variant::OnFly,
            VariantArg::Stored => Variant::Stored,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplingArg {
    PaperEval,
    Uniform,
    Degree,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a graph and write it as an edge-list file.
    Gen {
        #[command(subcommand)]
        kind: GenCmd,
    },
    /// Build an oracle over an edge-list graph and write its container.
    Build {
        /// Edge-list graph file.
        graph: PathBuf,
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        /// Force the landmark set from a file (one node id per line).
        #[arg(long)]
        landmarks: Option<PathBuf>,
        /// Also dump per-node landmark/ball/vicinity sizes as CSV
        /// (stretch-2 scheme only).
        #[arg(long)]
        dump_balls: Option<PathBuf>,
    },
    /// Query a built oracle container for one pair.
    Query {
        /// Oracle container file.
        oracle: PathBuf,
        u: u32,
        v: u32,
        /// Also retrieve and print the walk.
        #[arg(long)]
        path: bool,
    },
    /// Run an experiment config and emit stretch reports.
    Eval {
        /// Scenario config file (key = value lines).
        config: PathBuf,
    },
    /// Run the routing simulator on a scenario config.
    Routesim {
        /// Scenario config file (key = value lines).
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum GenCmd {
    /// Uniform random graph with a fixed edge count (unit weights).
    Gnm {
        #[arg(short, long)]
        n: usize,
        #[arg(short, long)]
        m: usize,
        /// Retry seeds until the graph is connected.
        #[arg(long)]
        connected: bool,
    },
    /// Random geometric graph in the unit square (Euclidean weights).
    Geometric {
        #[arg(short, long)]
        n: usize,
        /// Target average degree.
        #[arg(long)]
        deg: f64,
        #[arg(long)]
        connected: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Rear,
    Res,
    Tz,
    Additive2,
    Additive4k,
}

/// Data-level failure: exit code 2.
struct DataError(String);

impl<E: std::fmt::Display> From<E> for DataError {
    fn from(e: E) -> Self {
        DataError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with success.
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(DataError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, DataError> {
    let g = &cli.global;
    match cli.cmd {
        Cmd::Gen { kind } => {
            let seed = g.seed.unwrap_or(1);
            let graph = match kind {
                GenCmd::Gnm { n, m, connected } => {
                    if connected {
                        gen_connected(|s| gen_gnm(n, m, s), seed, 64)?.0
                    } else {
                        gen_gnm(n, m, seed)?
                    }
                }
                GenCmd::Geometric { n, deg, connected } => {
                    if connected {
                        gen_connected(|s| gen_geometric(n, deg, s), seed, 64)?.0
                    } else {
                        gen_geometric(n, deg, seed)?
                    }
                }
            };
            let text = edgelist::format_edge_list(&graph);
            match &g.out {
                Some(path) => std::fs::write(path, text).map_err(DataError::from)?,
                None => print!("{text}"),
            }
            eprintln!(
                "generated n={} m={} avg_degree={:.3} connected={}",
                graph.node_count(),
                graph.edge_count(),
                graph.avg_degree(),
                graph.is_connected()
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Build { graph, scheme, landmarks, dump_balls } => {
            let input = edgelist::load_graph(&graph)?;
            let forced = landmarks
                .as_deref()
                .map(edgelist::load_landmark_file)
                .transpose()?;
            let bytes = build_oracle(&input, scheme, forced, g)?;
            if let Some(dump) = &dump_balls {
                match container::decode(&bytes)? {
                    OracleContainer::Stretch2(o) => {
                        std::fs::write(dump, edgelist::ball_dump_csv(&o)).map_err(DataError::from)?
                    }
                    _ => return Err(DataError("--dump-balls needs --scheme rear".into())),
                }
            }
            let out = g.out.clone().unwrap_or_else(|| graph.with_extension("oracle"));
            container::save(&out, &bytes)?;
            eprintln!("wrote {} ({} bytes)", out.display(), bytes.len());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Query { oracle, u, v, path } => {
            let loaded = container::load(&oracle)?;
            let row = query_row(&loaded, u, v, path)?;
            match &g.out {
                Some(p) => std::fs::write(p, &row).map_err(DataError::from)?,
                None => print!("{row}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Eval { config } => {
            let sc = load_scenario_with_overrides(&config, g)?;
            let reports = run_experiment(&sc.experiment)?;
            let violations: u64 = reports.iter().map(|r| r.bound_violations).sum();
            let summary = report::summary_text(&reports);
            match &g.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(DataError::from)?;
                    write_out(dir, "summary.txt", &summary)?;
                    write_out(dir, "cdf.csv", &report::cdf_to_csv(&reports))?;
                    if sc.experiment.collect_rows {
                        write_out(dir, "pairs.csv", &report::pairs_to_csv(&reports))?;
                    }
                }
                None => print!("{summary}"),
            }
            if violations > 0 {
                eprintln!("self-check: {violations} pairs violated their scheme's proven bound");
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Routesim { config } => {
            let sc = load_scenario_with_overrides(&config, g)?;
            let out = run_routesim(&sc)?;
            match &g.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(DataError::from)?;
                    write_out(dir, "flows.csv", &out.flows_csv)?;
                    write_out(dir, "curves.csv", &out.curves_csv)?;
                    write_out(dir, "summary.txt", &out.summary)?;
                }
                None => {
                    print!("{}", out.summary);
                    print!("{}", out.curves_csv);
                }
            }
            if out.violations > 0 {
                eprintln!("self-check: {} completed handshakes exceeded stretch 2", out.violations);
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn write_out(dir: &Path, name: &str, content: &str) -> Result<(), DataError> {
    std::fs::write(dir.join(name), content).map_err(DataError::from)
}

fn sampling_mode(arg: Option<SamplingArg>, alpha: f64, degree_weighted: bool) -> LandmarkMode {
    match (arg, degree_weighted) {
        (Some(SamplingArg::Uniform), _) => LandmarkMode::Uniform { alpha },
        (Some(SamplingArg::PaperEval), true) => LandmarkMode::PaperEvalDegree { alpha },
        (Some(SamplingArg::PaperEval), false) => LandmarkMode::PaperEvalUniform { alpha },
        (Some(SamplingArg::Degree), _) | (None, true) => {
            LandmarkMode::DegreeProportional { alpha, delta: None }
        }
        (None, false) => LandmarkMode::Uniform { alpha },
    }
}

fn build_oracle(
    input: &Graph,
    scheme: SchemeArg,
    forced: Option<Vec<u32>>,
    g: &GlobalArgs,
) -> Result<Vec<u8>, DataError> {
    let alpha = g.alpha.unwrap_or(32.0);
    let seed = g.seed.unwrap_or(1);
    let k = g.k.unwrap_or(2);
    let variant = g.variant.map(Variant::from).unwrap_or(Variant::Stored);
    let mode = |degree_weighted: bool| match &forced {
        Some(ids) => LandmarkMode::Forced(ids.clone()),
        None => sampling_mode(g.sampling, alpha, degree_weighted),
    };
    let bytes = match scheme {
        SchemeArg::Rear => {
            let cfg = Stretch2Config {
                sampling: mode(true),
                variant,
                seed,
                ..Stretch2Config::new(alpha, variant, seed)
            };
            container::encode_stretch2(&build_stretch2(input, &cfg)?)
        }
        SchemeArg::Res => {
            let cfg =
                MultConfig { sampling: mode(true), ..MultConfig::new(alpha, k, variant, seed) };
            container::encode_mult(&build_mult(input, &cfg)?)
        }
        SchemeArg::Tz => container::encode_tz(&tz_build(input, k, seed)?),
        SchemeArg::Additive2 => {
            let cfg = AdditiveConfig {
                sampling: mode(false),
                ..AdditiveConfig::new(alpha, AdditiveMode::TwoPlus, seed)
            };
            container::encode_additive(&build_additive(input, &cfg)?)
        }
        SchemeArg::Additive4k => {
            let cfg = AdditiveConfig {
                sampling: mode(false),
                ..AdditiveConfig::new(alpha, AdditiveMode::FourKPlus { k }, seed)
            };
            container::encode_additive(&build_additive(input, &cfg)?)
        }
    };
    Ok(bytes)
}

fn query_row(loaded: &OracleContainer, u: u32, v: u32, want_path: bool) -> Result<String, DataError> {
    use std::fmt::Write as _;
    let check = |n: usize| -> Result<(), DataError> {
        if (u as usize) < n && (v as usize) < n {
            Ok(())
        } else {
            Err(DataError(format!("node ids must lie in [0, {n})")))
        }
    };
    let mut out = String::new();
    let (estimate, branch, via, probes, path) = match loaded {
        OracleContainer::Tz(o) => {
            check(o.node_count())?;
            let t = vicinity::tz::tz_query(o, u, v);
            (t.estimate, "tz_fallback", Some(t.final_witness), t.level_used + 1, None)
        }
        OracleContainer::Stretch2(o) => {
            check(o.graph().node_count())?;
            let r = o.query(u, v);
            let path = want_path.then(|| o.retrieve_path(&r, u, v));
            (r.estimate, r.branch.as_str(), r.via, r.probes, path)
        }
        OracleContainer::Mult(o) => {
            check(o.graph().node_count())?;
            let r = o.query(u, v);
            let path = want_path.then(|| o.retrieve_path(&r, u, v));
            (r.estimate, r.branch.as_str(), r.via, r.probes, path)
        }
        OracleContainer::Additive(o) => {
            check(o.nearest_all().len())?;
            let r = o.query(u, v);
            (r.estimate, r.branch.as_str(), r.via, r.probes, None)
        }
    };
    let via = via.map(|w| w.to_string()).unwrap_or_default();
    let _ = writeln!(out, "{u},{v},{estimate},{branch},{via},{probes}");
    if let Some(path) = path {
        let hops: Vec<String> = path.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "path={}", hops.join(" "));
    } else if want_path {
        let _ = writeln!(out, "path=unsupported");
    }
    Ok(out)
}

fn load_scenario_with_overrides(path: &Path, g: &GlobalArgs) -> Result<Scenario, DataError> {
    let mut sc = scenario::load_scenario(path)?;
    let e = &mut sc.experiment;
    if let Some(seed) = g.seed {
        e.seeds = vec![seed];
    }
    if let Some(alpha) = g.alpha {
        e.alpha = alpha;
    }
    if let Some(variant) = g.variant {
        e.variant = variant.into();
    }
    if let Some(sampling) = g.sampling {
        e.profile = match sampling {
            SamplingArg::PaperEval => vicinity_cli::eval::SamplingProfile::PaperEval,
            SamplingArg::Uniform => vicinity_cli::eval::SamplingProfile::Uniform,
            SamplingArg::Degree => vicinity_cli::eval::SamplingProfile::Degree,
        };
    }
    if g.strict_paper {
        e.strict_paper = true;
    }
    if g.no_exact {
        e.no_exact = true;
    }
    Ok(sc)
}
