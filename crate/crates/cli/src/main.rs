use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use edge_embed::experiment::{run_benchmark, Algorithm, BenchConfig, Testbed};
use edge_embed::pathfind::{enumerate_simple_paths_with_cap, path_coefficient, DEFAULT_PATH_CAP};
use edge_embed::report::emit_report;
use edge_embed::splitter::{bisection_oracle, optimal_split, SplitProblem, SPLIT_RTOL};
use edge_embed::workload::{
    generate_dag_batch, generate_network, import_dags, read_network, write_dags, write_network,
    DagInstance, WorkloadSpec,
};
use edge_embed::{DagDocument, Error, ServerId};
use serde::Serialize;

const PATH_CAP_VAR: &str = "EDGE_EMBED_PATH_CAP";

#[derive(Parser)]
#[command(
    name = "edge-embed",
    version,
    about = "Function placement and multipath stream mapping for DAG workloads on edge networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List every simple path between two servers with its coefficient.
    Paths {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        src: ServerId,
        #[arg(long)]
        dst: ServerId,
    },
    /// Split one stream optimally over paths with the given coefficients.
    Split {
        /// Seconds per bit of each path, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        coeffs: Vec<f64>,
        /// Stream size in bits.
        #[arg(long)]
        size: f64,
        /// Cross-check against the bisection oracle.
        #[arg(long)]
        verify: bool,
    },
    /// Embed one DAG and print the result as JSON.
    Embed {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        dag: PathBuf,
        #[arg(long, default_value = "dpe")]
        algo: Algorithm,
        /// JSON array with the ready time of every server.
        #[arg(long)]
        ready: Option<PathBuf>,
    },
    /// Generate a seeded network and DAG batch.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        servers: usize,
        #[arg(long, default_value_t = 0.5)]
        connectivity: f64,
        #[arg(long, default_value_t = 200)]
        dags: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run algorithms over a DAG batch and write reports. Inputs not given on
    /// the command line are generated from the seed.
    Bench {
        #[arg(long)]
        network: Option<PathBuf>,
        #[arg(long)]
        dags: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "dpe,heft,placement-only")]
        algos: Vec<Algorithm>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Record wall-clock runtimes (makes reports run-dependent).
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn path_cap() -> Result<usize, Failure> {
    match std::env::var(PATH_CAP_VAR) {
        Err(_) => Ok(DEFAULT_PATH_CAP),
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::Usage(format!(
                "{PATH_CAP_VAR} must be a non-negative integer, got `{v}`"
            ))
        }),
    }
}

fn print_json(value: &impl Serialize) -> Result<(), Failure> {
    println!(
        "{}",
        serde_json::to_string_pretty(value).map_err(Error::from)?
    );
    Ok(())
}

fn read_dag(path: &Path) -> Result<DagInstance, Failure> {
    let doc: DagDocument = serde_json::from_str(&fs::read_to_string(path).map_err(Error::from)?)
        .map_err(Error::from)?;
    Ok(DagInstance::from_document(doc)?)
}

fn read_ready(path: &Path) -> Result<Vec<f64>, Failure> {
    let ready: Vec<f64> = serde_json::from_str(&fs::read_to_string(path).map_err(Error::from)?)
        .map_err(Error::from)?;
    if let Some(r) = ready.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(Failure::Usage(format!(
            "ready times must be finite and non-negative, got {r}"
        )));
    }
    Ok(ready)
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Paths { network, src, dst } => {
            let net = read_network(&network)?;
            let paths = enumerate_simple_paths_with_cap(&net, src, dst, path_cap()?)?;
            for p in &paths {
                println!("{p} coeff={:e}", path_coefficient(p, &net));
            }
            println!("{} simple paths from {src} to {dst}", paths.len());
        }
        Cmd::Split {
            coeffs,
            size,
            verify,
        } => {
            let problem = SplitProblem::new(coeffs, size)?;
            let solution = optimal_split(&problem);
            if verify {
                let tau = solution.bottleneck_time;
                let oracle = bisection_oracle(&problem, tau * f64::EPSILON);
                let agrees = (oracle - tau).abs() <= SPLIT_RTOL * tau;
                #[derive(Serialize)]
                struct Verified<'a> {
                    tau: f64,
                    z: &'a [f64],
                    oracle_tau: f64,
                    agrees: bool,
                }
                print_json(&Verified {
                    tau,
                    z: &solution.allocations,
                    oracle_tau: oracle,
                    agrees,
                })?;
            } else {
                print_json(&solution)?;
            }
        }
        Cmd::Embed {
            network,
            dag,
            algo,
            ready,
        } => {
            let net = read_network(&network)?;
            let dag = read_dag(&dag)?.augment()?;
            let ready = ready.as_deref().map(read_ready).transpose()?;
            let bed = Testbed::new(&net, path_cap()?)?;
            print_json(&bed.embed(algo, &dag, ready.as_deref())?)?;
        }
        Cmd::Gen {
            seed,
            servers,
            connectivity,
            dags,
            out,
        } => {
            let spec = WorkloadSpec {
                seed,
                n_servers: servers,
                connectivity,
                n_dags: dags,
                ..Default::default()
            };
            let net = generate_network(&spec)?;
            let batch = generate_dag_batch(&spec)?;
            fs::create_dir_all(&out).map_err(Error::from)?;
            write_network(&net, &out.join("net.json"))?;
            write_dags(&batch, &out.join("dags.json"))?;
            eprintln!(
                "wrote {} servers, {} links and {} DAGs to {}",
                net.server_count(),
                net.link_count(),
                batch.len(),
                out.display()
            );
        }
        Cmd::Bench {
            network,
            dags,
            algos,
            out,
            seed,
            timing,
        } => {
            let spec = WorkloadSpec {
                seed,
                ..Default::default()
            };
            let net = match network {
                Some(p) => read_network(&p)?,
                None => generate_network(&spec)?,
            };
            let batch = match dags {
                Some(p) => import_dags(&p)?,
                None => generate_dag_batch(&spec)?,
            };
            let config = BenchConfig {
                algorithms: algos,
                timing,
                path_cap: path_cap()?,
            };
            let bundle = run_benchmark(&net, &batch, &config)?;
            emit_report(&bundle, &out)?;
            for (algo, mean) in &bundle.mean_makespan {
                eprintln!("{algo}: mean makespan {mean} s over {} DAGs", batch.len());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) if e.is_path_explosion() => {
            eprintln!("error: {e}");
            eprintln!("hint: lower the connectivity or server count, or raise {PATH_CAP_VAR}");
            ExitCode::from(3)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}
