//! `schedlab` command line.
//!
//! Exit codes: 0 success, 2 usage or config error, 1 runtime failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::json;

use schedlab_core::bernoulli_tail::{
    asymp_tail_general, asymp_tail_power, chernoff_bound_default, exact_tail, ParamSeq, TailConstants,
};
use schedlab_core::queue::{workload, JobSizes};
use schedlab_core::rng::StreamFactory;
use schedlab_core::traffic::{conditional_cov, generate_path};

use crate::config::{load_config, ExperimentConfig, ModelSpec, ServiceName, DEFAULT_SEED};
use crate::experiments;
use crate::output::{fmt_f64, Sidecar};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "schedlab", version, about = "Scheduled-traffic models, exact tails and queueing experiments")]
pub struct Cli {
    /// Master seed [default: 1592597994 (0x5EED1DEA); overrides a config's seed when given]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write results here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads [default: all cores]; never changes the output
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tail constants r*, η*, γ for p_j = c (w + j)^-α
    Constants {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        w: f64,
    },
    /// Exact P(Z ≥ n) for a finite list (--p) or a power law (--c --alpha [--w])
    TailExact {
        /// Comma-separated success probabilities
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["c", "alpha"])]
        p: Option<Vec<f64>>,
        #[arg(long, requires = "alpha")]
        c: Option<f64>,
        #[arg(long, requires = "c")]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        w: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
    },
    /// Asymptotic forms and the Chernoff bound for p_j = c (w + j)^-α (natural logs)
    TailAsymp {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        w: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
    },
    /// Conditional covariance of (ΔN(1), ΔN(n)) given U = u
    Covariance {
        /// zero | laplace:B | pareto:C,A | pareto:C1,A1,C2,A2 | exp:D1,B1,D2,B2
        #[arg(long, default_value = "pareto:0.25,2", value_parser = ModelSpec::parse_cli)]
        model: ModelSpec,
        #[arg(long, default_value_t = 0.5)]
        u: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
    },
    /// Arrival times of one path on the window (lo, hi]
    Path {
        #[arg(long, default_value = "pareto:0.25,2", value_parser = ModelSpec::parse_cli)]
        model: ModelSpec,
        /// Fix the common shift instead of drawing it
        #[arg(long)]
        u: Option<f64>,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, required = true)]
        window: Vec<f64>,
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
    },
    /// Workload W(t) of one path, empty at the window start
    Workload {
        #[arg(long, default_value = "pareto:0.25,2", value_parser = ModelSpec::parse_cli)]
        model: ModelSpec,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long)]
        u: Option<f64>,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, required = true)]
        window: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<f64>,
        #[arg(long, value_enum, default_value_t = ServiceArg::Deterministic)]
        service: ServiceArg,
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
    },
    /// Run a registered experiment from a JSON config (or its defaults with --name)
    Experiment {
        #[arg(long, conflicts_with = "name", required_unless_present = "name")]
        config: Option<PathBuf>,
        /// covariance | bernoulli_tails | critical_loading | heavy_traffic | sg1_fclt | limit_distribution
        #[arg(long)]
        name: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ServiceArg {
    Deterministic,
    Exponential,
    Uniform,
}

impl From<ServiceArg> for ServiceName {
    fn from(s: ServiceArg) -> Self {
        match s {
            ServiceArg::Deterministic => ServiceName::Deterministic,
            ServiceArg::Exponential => ServiceName::Exponential,
            ServiceArg::Uniform => ServiceName::Uniform,
        }
    }
}

/// Plain table for the single-shot subcommands.
struct Table {
    comments: Vec<String>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = String::new();
                for c in &self.comments {
                    out.push_str(&format!("# {c}\n"));
                }
                let mut payload = vec![self.columns.join(",")];
                payload.extend(self.rows.iter().map(|r| r.join(",")));
                for l in &payload {
                    out.push_str(l);
                    out.push('\n');
                }
                out.push_str(&format!("# sha256: {}\n", sha256_lines(&payload)));
                out
            }
            Format::Json => {
                let rows: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let obj = self.columns.iter().zip(r).map(|(k, v)| (k.to_string(), json!(v))).collect();
                        serde_json::Value::Object(obj)
                    })
                    .collect();
                let mut s = serde_json::to_string_pretty(&json!({ "comments": self.comments, "rows": rows }))
                    .expect("tables always serialize");
                s.push('\n');
                s
            }
        }
    }
}

fn sha256_lines(lines: &[String]) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    for l in lines {
        h.update(l.as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn usage(sub: &str, msg: impl std::fmt::Display) -> Error {
    let mut cmd = Cli::command();
    cmd.build();
    let grammar = cmd.find_subcommand_mut(sub).map(|c| c.render_usage().to_string()).unwrap_or_default();
    Error::Usage(format!("{msg}\n\n{grammar}"))
}

fn f(x: f64) -> String {
    fmt_f64(x)
}

fn run_table(cli: &Cli) -> Result<Table> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    Ok(match &cli.command {
        Command::Constants { c, alpha, w } => {
            let k = TailConstants::new(*c, *alpha, *w).map_err(|e| usage("constants", e))?;
            Table {
                comments: vec![],
                columns: vec!["c", "alpha", "r_star", "eta_star", "gamma"],
                rows: vec![vec![f(k.c), f(k.alpha), f(k.r_star), f(k.eta_star), f(k.gamma)]],
            }
        }
        Command::TailExact { p, c, alpha, w, n, eps } => {
            let seq = match (p, c, alpha) {
                (Some(p), _, _) => ParamSeq::finite(p.clone()),
                (None, Some(c), Some(a)) => ParamSeq::power(*c, *w, *a),
                _ => return Err(usage("tail-exact", "give either --p or both --c and --alpha")),
            }
            .map_err(|e| usage("tail-exact", e))?;
            let rows = n
                .iter()
                .map(|&n| {
                    let t = exact_tail(&seq, n as usize, *eps)?;
                    Ok(vec![n.to_string(), f(t.value()), f(t.ln_value), f(t.ln_lower), f(t.ln_upper), f(t.abs_error)])
                })
                .collect::<Result<_>>()?;
            Table { comments: vec![], columns: vec!["n", "prob", "ln_prob", "ln_lower", "ln_upper", "abs_error"], rows }
        }
        Command::TailAsymp { c, alpha, w, n } => {
            let seq = ParamSeq::power(*c, *w, *alpha).map_err(|e| usage("tail-asymp", e))?;
            let rows = n
                .iter()
                .map(|&n| {
                    Ok(vec![
                        n.to_string(),
                        f(asymp_tail_general(&seq, n as usize)?),
                        f(asymp_tail_power(*c, *w, *alpha, n as usize)?),
                        f(chernoff_bound_default(&seq, n as f64)?),
                    ])
                })
                .collect::<Result<_>>()?;
            Table { comments: vec![], columns: vec!["n", "ln_form_i", "ln_form_ii", "ln_chernoff"], rows }
        }
        Command::Covariance { model, u, n, eps } => {
            let m = model.build().map_err(|e| usage("covariance", e))?;
            let rows = n
                .iter()
                .map(|&n| Ok(vec![n.to_string(), f(conditional_cov(&m, *u, n, *eps)?)]))
                .collect::<Result<_>>()?;
            Table { comments: vec![format!("u: {}", f(*u))], columns: vec!["n", "cov"], rows }
        }
        Command::Path { model, u, window, eps } => {
            let m = model.build().map_err(|e| usage("path", e))?;
            let mut rng = StreamFactory::new(seed, "path").stream(0);
            let path = generate_path(&m, window[0], window[1], *u, &mut rng, *eps)?;
            let (lo, hi) = path.window();
            Table {
                comments: vec![
                    format!("u: {}", f(path.u())),
                    format!("window: ({}, {}]", f(lo), f(hi)),
                    format!("eps: {}", f(*eps)),
                    format!("truncation_eps: {}", f(path.truncation_eps())),
                ],
                columns: vec!["schedule_index", "arrival_time"],
                rows: path.entries().iter().map(|a| vec![a.index.to_string(), f(a.time)]).collect(),
            }
        }
        Command::Workload { model, rho, u, window, grid, service, eps } => {
            let m = model.build().map_err(|e| usage("workload", e))?;
            let factory = StreamFactory::new(seed, "workload");
            let path = generate_path(&m, window[0], window[1], *u, &mut factory.stream(0), *eps)?;
            let sizes = ServiceName::from(*service).spec().draw(path.entries().len(), &mut factory.stream(1));
            let trace = workload(&path, *rho, grid, JobSizes::Given(&sizes))?;
            Table {
                comments: vec![format!("u: {}", f(path.u())), format!("rho: {}", f(*rho))],
                columns: vec!["t", "w"],
                rows: trace.grid.iter().map(|&(t, w)| vec![f(t), f(w)]).collect(),
            }
        }
        Command::Experiment { .. } => unreachable!("handled separately"),
    })
}

fn write_out(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|source| Error::Io { path: path.display().to_string(), source })
        }
        None => stdout.write_all(text.as_bytes()).map_err(|source| Error::Io { path: "<stdout>".into(), source }),
    }
}

fn run_experiment(cli: &Cli, config: Option<&Path>, name: Option<&str>, stdout: &mut dyn Write) -> Result<()> {
    let mut cfg = match (config, name) {
        (Some(path), _) => load_config(path)?,
        (None, Some(name)) => ExperimentConfig::default_for(name)
            .ok_or_else(|| usage("experiment", format!("unknown experiment {name:?}")))?,
        (None, None) => return Err(usage("experiment", "give --config or --name")),
    };
    if let Some(seed) = cli.seed {
        cfg.set_seed(seed);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Usage(format!("cannot start {:?} threads: {e}", cli.threads)))?;
    let threads = pool.current_num_threads();
    let start = Instant::now();
    let result = pool.install(|| experiments::run(&cfg))?;
    let wall = start.elapsed().as_secs_f64();
    let text = match cli.format {
        Format::Csv => result.to_csv(),
        Format::Json => result.to_json(),
    };
    write_out(cli.out.as_deref(), &text, stdout)?;
    if let Some(out) = &cli.out {
        let side = Sidecar {
            experiment: result.experiment.clone(),
            seed: cfg.seed(),
            version: env!("CARGO_PKG_VERSION"),
            wall_time_s: wall,
            threads,
            sha256: result.checksum(),
        };
        let mut path = out.clone().into_os_string();
        path.push(".meta.json");
        let body = serde_json::to_string_pretty(&side).expect("sidecar always serializes") + "\n";
        write_out(Some(Path::new(&path)), &body, stdout)?;
    }
    Ok(())
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return e.exit_code();
        }
    };
    let outcome = match &cli.command {
        Command::Experiment { config, name } => run_experiment(&cli, config.as_deref(), name.as_deref(), stdout),
        _ => run_table(&cli).and_then(|t| write_out(cli.out.as_deref(), &t.render(cli.format), stdout)),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
