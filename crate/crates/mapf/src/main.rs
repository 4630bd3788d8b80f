use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use mapf::bench::{self, BenchConfig, STATUS_ERROR};
use mapf::io::{instance_id, load_instance, LoadError};
use mapf::report::{export_model, SolutionReport};
use mapf::WallClock;
use mapf_core::solvers::{solve, Algorithm, SolverConfig};
use mapf_core::ModelMode;

#[derive(Parser)]
#[command(name = "mapf", version, about = "Sum-of-costs optimal multi-agent path finding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Complete,
    Incomplete,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and write the plan as JSON.
    Solve {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        scen: PathBuf,
        #[arg(long)]
        agents: usize,
        #[arg(long, default_value = "heuristic")]
        algo: Algorithm,
        #[arg(long, default_value_t = 128.0)]
        timeout: f64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Largest sum of costs to try before reporting infeasibility.
        #[arg(long)]
        cost_cap: Option<usize>,
        /// Accept UNSAT from sparse candidate sets without retrying on full diagrams.
        #[arg(long)]
        no_sparse_fallback: bool,
    },
    /// Run a suite directory and write one CSV row per run.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "cbs,mddsat,smtcbs,sparse,heuristic")]
        algos: Vec<Algorithm>,
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32,64,128")]
        agents: Vec<usize>,
        #[arg(long, default_value_t = 25)]
        per_count: usize,
        #[arg(long, default_value_t = 128.0)]
        timeout: f64,
        #[arg(long)]
        csv: PathBuf,
        /// Also write sorted solved runtimes per algorithm.
        #[arg(long)]
        cactus: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Write the CNF of the model over full diagrams at a given sum of costs.
    Encode {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        scen: PathBuf,
        #[arg(long)]
        agents: usize,
        #[arg(long)]
        soc: usize,
        #[arg(long, value_enum, default_value = "incomplete")]
        mode: Mode,
        #[arg(long)]
        out: PathBuf,
        /// JSON list mapping variables to agents, vertices and timesteps.
        #[arg(long)]
        varmap: Option<PathBuf>,
    },
}

const PARSE_FAILURE: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(PARSE_FAILURE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let parse = e.downcast_ref::<LoadError>().is_some_and(LoadError::is_parse_error);
            ExitCode::from(if parse { PARSE_FAILURE } else { 1 })
        }
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Solve {
            map,
            scen,
            agents,
            algo,
            timeout,
            out,
            cost_cap,
            no_sparse_fallback,
        } => {
            let instance = load_instance(&map, &scen, agents)?;
            let config = SolverConfig {
                algorithm: algo,
                timeout_s: timeout,
                cost_cap,
                sparse_unsat_fallback: !no_sparse_fallback,
                ..SolverConfig::default()
            };
            let clock = WallClock::start();
            let outcome = solve(&instance, &config, &clock)?;
            let report = SolutionReport::new(&instance_id(&scen), algo, &outcome);
            match out {
                Some(path) => {
                    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                    serde_json::to_writer_pretty(BufWriter::new(file), &report)?;
                }
                None => println!("{}", serde_json::to_string_pretty(&report)?),
            }
            eprintln!("{}: {} soc={:?} in {:.3}s", algo, outcome.status, outcome.soc, outcome.stats.runtime_s);
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench {
            suite,
            algos,
            agents,
            per_count,
            timeout,
            csv,
            cactus,
            threads,
        } => {
            let config = BenchConfig {
                algorithms: algos.clone(),
                agent_counts: agents.clone(),
                per_count,
                timeout_s: timeout,
                threads,
                ..BenchConfig::new(&suite)
            };
            let records = bench::run_benchmark(&config).with_context(|| format!("reading suite {}", suite.display()))?;
            let file = File::create(&csv).with_context(|| format!("creating {}", csv.display()))?;
            bench::write_csv(&records, BufWriter::new(file))?;
            let names: Vec<&str> = algos.iter().map(|a| a.name()).collect();
            if let Some(path) = cactus {
                let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                bench::write_cactus(&records, &names, BufWriter::new(file))?;
            }
            for &n in &agents {
                for name in &names {
                    if let Some(rate) = bench::success_rate(&records, name, n) {
                        eprintln!("agents={n:<4} {name:<10} success={rate:.2}");
                    }
                }
            }
            let failed = records.iter().any(|r| r.status == STATUS_ERROR);
            Ok(if failed { ExitCode::from(PARSE_FAILURE) } else { ExitCode::SUCCESS })
        }
        Command::Encode {
            map,
            scen,
            agents,
            soc,
            mode,
            out,
            varmap,
        } => {
            let instance = load_instance(&map, &scen, agents)?;
            let mode = match mode {
                Mode::Complete => ModelMode::Complete,
                Mode::Incomplete => ModelMode::Incomplete,
            };
            let (cnf, vars) = export_model(&instance, soc, mode)?;
            std::fs::write(&out, cnf).with_context(|| format!("writing {}", out.display()))?;
            if let Some(path) = varmap {
                let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                serde_json::to_writer_pretty(BufWriter::new(file), &vars)?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
