//! Batch runs over a suite directory of paired `.map` / `.scen` files.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use mapf_core::solvers::{solve, Algorithm, SolveStatus, SolverConfig};

use crate::clock::WallClock;
use crate::io::{instance_id, load_instance, paired_map, LoadError};

/// Status recorded when the instance files could not be loaded.
pub const STATUS_ERROR: &str = "error";

/// One (instance, algorithm) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub map: String,
    pub scen: String,
    pub agents: usize,
    pub algo: String,
    pub status: String,
    pub runtime_s: f64,
    pub soc: Option<usize>,
    pub sat_calls: usize,
    pub conflicts: usize,
}

impl BenchRecord {
    pub fn is_solved(&self) -> bool {
        self.status == SolveStatus::Solved.name()
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub suite: PathBuf,
    pub algorithms: Vec<Algorithm>,
    pub agent_counts: Vec<usize>,
    /// Scenario files used per agent count, in file-name order.
    pub per_count: usize,
    pub timeout_s: f64,
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
    /// Template for every run; algorithm and timeout are overridden.
    pub solver: SolverConfig,
}

impl BenchConfig {
    pub fn new(suite: impl Into<PathBuf>) -> Self {
        BenchConfig {
            suite: suite.into(),
            algorithms: Algorithm::ALL.to_vec(),
            agent_counts: vec![2, 4, 8, 16, 32, 64, 128],
            per_count: 25,
            timeout_s: 128.0,
            threads: None,
            solver: SolverConfig::default(),
        }
    }
}

/// Scenario files of a suite, sorted by name.
pub fn scenario_files(suite: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = fs::read_dir(suite)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "scen"))
        .collect();
    out.sort();
    Ok(out)
}

struct Job {
    scen: PathBuf,
    agents: usize,
    algorithm: Algorithm,
}

/// Runs every algorithm on the first `per_count` scenarios for each agent
/// count. Records come back in job order: agent count, then scenario, then
/// algorithm.
pub fn run_benchmark(config: &BenchConfig) -> std::io::Result<Vec<BenchRecord>> {
    let scens = scenario_files(&config.suite)?;
    let mut jobs = Vec::new();
    for &agents in &config.agent_counts {
        for scen in scens.iter().take(config.per_count) {
            for &algorithm in &config.algorithms {
                jobs.push(Job {
                    scen: scen.clone(),
                    agents,
                    algorithm,
                });
            }
        }
    }
    let work = || jobs.par_iter().map(|j| run_job(j, config)).collect::<Vec<_>>();
    match config.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(std::io::Error::other)?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

fn run_job(job: &Job, config: &BenchConfig) -> BenchRecord {
    let mut record = BenchRecord {
        map: String::new(),
        scen: instance_id(&job.scen),
        agents: job.agents,
        algo: job.algorithm.name().to_owned(),
        status: STATUS_ERROR.to_owned(),
        runtime_s: 0.0,
        soc: None,
        sat_calls: 0,
        conflicts: 0,
    };
    let loaded = paired_map(&job.scen).and_then(|map| {
        let inst = load_instance(&map, &job.scen, job.agents)?;
        Ok::<_, LoadError>((map, inst))
    });
    let (map, instance) = match loaded {
        Ok(x) => x,
        Err(_) => return record,
    };
    record.map = map.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let solver = SolverConfig {
        algorithm: job.algorithm,
        timeout_s: config.timeout_s,
        ..config.solver.clone()
    };
    let clock = WallClock::start();
    let outcome = solve(&instance, &solver, &clock);
    record.runtime_s = mapf_core::solvers::Clock::elapsed_s(&clock);
    match outcome {
        Ok(out) => {
            // a plan that arrives after the limit does not count
            let late = record.runtime_s > config.timeout_s;
            let status = if late && out.status == SolveStatus::Solved {
                SolveStatus::Timeout
            } else {
                out.status
            };
            record.status = status.name().to_owned();
            record.soc = if status == SolveStatus::Solved { out.soc } else { None };
            record.sat_calls = out.stats.sat_calls;
            record.conflicts = out.stats.conflicts;
        }
        Err(_) => record.status = STATUS_ERROR.to_owned(),
    }
    record
}

/// Share of solved records among those of `algorithm` with `agents` agents;
/// `None` for an empty group.
pub fn success_rate(records: &[BenchRecord], algorithm: &str, agents: usize) -> Option<f64> {
    let group: Vec<&BenchRecord> = records.iter().filter(|r| r.algo == algorithm && r.agents == agents).collect();
    if group.is_empty() {
        return None;
    }
    Some(group.iter().filter(|r| r.is_solved()).count() as f64 / group.len() as f64)
}

/// Runtimes of the solved records of `algorithm`, ascending.
pub fn sorted_runtimes(records: &[BenchRecord], algorithm: &str) -> Vec<f64> {
    let mut out: Vec<f64> = records
        .iter()
        .filter(|r| r.algo == algorithm && r.is_solved())
        .map(|r| r.runtime_s)
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> csv::Result<Vec<BenchRecord>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// Cactus data: one row per solved run, `algo,rank,runtime_s`, rank 1 being
/// the fastest.
pub fn write_cactus<W: Write>(records: &[BenchRecord], algorithms: &[&str], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["algo", "rank", "runtime_s"])?;
    for algo in algorithms {
        for (i, t) in sorted_runtimes(records, algo).into_iter().enumerate() {
            w.write_record([algo.to_string(), (i + 1).to_string(), t.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
