//! The `run`, `rates` and `sweep` verbs (`validate` is `run` in validation mode).

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use afem_core::adaptivity::{afem_run_with, AfemHistory, Clock, Observer};
use afem_core::mesh::Mesh;
use afem_core::problems::by_name;
use afem_core::space::DofMap;

use crate::config::{Mode, RunConfig};
use crate::history::{read_history, rates, write_history};
use crate::mesh_io::write_mesh;
use crate::plot::gnuplot_script;
use crate::{CliError, CliResult};

struct WallClock(Instant);

impl Clock for WallClock {
    fn now_ms(&self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1e3
    }
}

/// Which meshes to write.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum MeshDump {
    #[default]
    None,
    All,
    Last,
    Levels(Vec<usize>),
}

impl std::str::FromStr for MeshDump {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Self::All),
            "last" => Ok(Self::Last),
            "none" => Ok(Self::None),
            _ => s
                .split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|_| format!("bad level `{x}`")))
                .collect::<Result<Vec<_>, _>>()
                .map(Self::Levels),
        }
    }
}

struct MeshWriter<'a> {
    dir: &'a Path,
    dump: &'a MeshDump,
    error: Option<std::io::Error>,
}

impl Observer for MeshWriter<'_> {
    fn level_solved(&mut self, level: usize, mesh: &Mesh, _: &DofMap, _: &[f64]) {
        let wanted = match self.dump {
            MeshDump::All => true,
            MeshDump::Levels(l) => l.contains(&level),
            MeshDump::None | MeshDump::Last => false,
        };
        if wanted && self.error.is_none() {
            if let Err(e) = dump_mesh(self.dir, level, mesh) {
                self.error = Some(e);
            }
        }
    }
}

fn dump_mesh(dir: &Path, level: usize, mesh: &Mesh) -> std::io::Result<()> {
    let mut f = BufWriter::new(File::create(dir.join(format!("mesh_L{level}.txt")))?);
    write_mesh(mesh, &mut f)?;
    f.flush()
}

#[derive(Debug)]
pub struct RunSummary {
    pub history: AfemHistory,
    pub history_path: PathBuf,
}

/// Runs the adaptive loop and writes `history.csv`, `config.json`, requested
/// meshes and optionally `plot.gp` into `cfg.out`.
pub fn run(cfg: &RunConfig, dump: &MeshDump, plot: bool) -> CliResult<RunSummary> {
    let problem = by_name(&cfg.problem, cfg.k).map_err(|e| CliError::Usage(e.to_string()))?;
    fs::create_dir_all(&cfg.out)?;
    let clock = WallClock(Instant::now());
    let mut writer = MeshWriter { dir: &cfg.out, dump, error: None };
    let outcome = afem_run_with(&problem, &cfg.params(), &clock, &mut writer)?;
    if let Some(e) = writer.error {
        return Err(e.into());
    }
    if *dump == MeshDump::Last {
        dump_mesh(&cfg.out, outcome.hierarchy.finest_level(), outcome.hierarchy.finest_mesh())?;
    }
    let history_path = cfg.out.join("history.csv");
    write_history(&outcome.history.records, cfg.mode == Mode::Validate, BufWriter::new(File::create(&history_path)?))?;
    fs::write(cfg.out.join("config.json"), serde_json::to_string_pretty(cfg)?)?;
    if plot {
        let title = format!("{} p={} k={}", cfg.problem, cfg.p, cfg.k);
        fs::write(cfg.out.join("plot.gp"), gnuplot_script("history.csv", &title))?;
    }
    Ok(RunSummary { history: outcome.history, history_path })
}

/// One line of the rate table.
#[derive(Clone, Debug, PartialEq)]
pub struct RateRow {
    pub problem: String,
    pub p: usize,
    pub k: u32,
    pub rate_ndof: f64,
    pub rate_cost: f64,
}

/// Convergence rates of every history file. Problem, degree and `k` come from
/// the `config.json` next to the file when present.
pub fn rates_table(files: &[PathBuf], skip: usize, min_ndof: usize) -> CliResult<Vec<RateRow>> {
    let mut out = Vec::with_capacity(files.len());
    for f in files {
        let rows = read_history(File::open(f)?)?;
        let (rate_ndof, rate_cost) = rates(&rows, skip, min_ndof)?;
        let sidecar = f.with_file_name("config.json");
        let (problem, p, k) = match fs::read_to_string(&sidecar) {
            Ok(text) => {
                let cfg: RunConfig = serde_json::from_str(&text)?;
                (cfg.problem, cfg.p, cfg.k)
            }
            Err(_) => (f.display().to_string(), 0, 0),
        };
        out.push(RateRow { problem, p, k, rate_ndof, rate_cost });
    }
    Ok(out)
}

pub fn write_rates(rows: &[RateRow], out: impl Write) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["problem", "p", "k", "rate_ndof", "rate_cost"])?;
    for r in rows {
        w.write_record([r.problem.clone(), r.p.to_string(), r.k.to_string(), format!("{:.4}", r.rate_ndof), format!("{:.4}", r.rate_cost)])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub problem: String,
    pub p: usize,
    pub k: u32,
    pub mean_iter: f64,
    pub max_iter: usize,
}

/// Mean and maximum solver steps per level. `skip_initial` leaves out
/// level 0, where the iteration starts from zero instead of a prolongated
/// solution.
pub fn iteration_stats(history: &AfemHistory, skip_initial: bool) -> (f64, usize) {
    let it = history.iterations();
    let it = if skip_initial && it.len() > 1 { &it[1..] } else { &it[..] };
    if it.is_empty() {
        return (0.0, 0);
    }
    (it.iter().sum::<usize>() as f64 / it.len() as f64, it.iter().copied().max().unwrap_or(0))
}

/// Runs every combination and collects iteration statistics. Problems without
/// a contrast parameter run once with `k = 0`.
pub fn sweep(base: &RunConfig, problems: &[String], ps: &[usize], ks: &[u32], skip_initial: bool) -> CliResult<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for name in problems {
        let has_k = matches!(name.as_str(), "checkerboard" | "stripes" | "stripe");
        let klist: Vec<u32> = if has_k { ks.to_vec() } else { vec![0] };
        for &p in ps {
            for &k in &klist {
                let cfg = RunConfig {
                    problem: name.clone(),
                    p,
                    k,
                    out: base.out.join(format!("{name}_p{p}_k{k}")),
                    ..base.clone()
                };
                let summary = run(&cfg, &MeshDump::None, false)?;
                let (mean_iter, max_iter) = iteration_stats(&summary.history, skip_initial);
                rows.push(SweepRow { problem: name.clone(), p, k, mean_iter, max_iter });
            }
        }
    }
    Ok(rows)
}

pub fn write_sweep(rows: &[SweepRow], out: impl Write) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["problem", "p", "k", "mean_iter", "max_iter"])?;
    for r in rows {
        w.write_record([r.problem.clone(), r.p.to_string(), r.k.to_string(), format!("{:.4}", r.mean_iter), r.max_iter.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
