use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use afem_cli::commands::{self, MeshDump};
use afem_cli::config::{ConfigOverrides, Mode};
use afem_cli::CliResult;

#[derive(Parser)]
#[command(name = "afem", version, about = "Adaptive FEM with a local multigrid solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the adaptive loop on one problem.
    Run(RunArgs),
    /// Like `run`, with a direct solve per level to record algebraic errors.
    Validate(RunArgs),
    /// Convergence rates of history files.
    Rates {
        files: Vec<PathBuf>,
        /// Levels left out at the start (pre-asymptotic range).
        #[arg(long, default_value_t = 0)]
        skip: usize,
        /// Fit only levels with at least this many free dofs.
        #[arg(long, default_value_t = 0)]
        min_ndof: usize,
        /// Also write the table to this CSV file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iteration counts over problems, degrees and contrasts.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    overrides: ConfigOverrides,
    /// JSON file with any of the run options; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Meshes to write: `all`, `last` or a comma-separated list of levels.
    #[arg(long, default_value = "none")]
    dump_mesh: MeshDump,
    /// Write a gnuplot script next to the history.
    #[arg(long)]
    plot: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_value = "checkerboard,stripes")]
    problems: Vec<String>,
    #[arg(long = "p", value_delimiter = ',', default_value = "1,2")]
    ps: Vec<usize>,
    #[arg(long = "k", value_delimiter = ',', default_value = "1,2,3")]
    ks: Vec<u32>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    max_dofs: Option<usize>,
    #[arg(long, default_value = "sweep")]
    out: PathBuf,
    /// Leave level 0 (solved from a zero initial guess) out of the statistics.
    #[arg(long)]
    skip_initial: bool,
}

fn resolve(args: RunArgs, force: Option<Mode>) -> CliResult<(afem_cli::config::RunConfig, MeshDump, bool)> {
    let base = match &args.config {
        Some(p) => ConfigOverrides::from_json_file(p)?,
        None => ConfigOverrides::default(),
    };
    let mut merged = args.overrides.over(base);
    if force.is_some() {
        merged.mode = force;
    }
    Ok((merged.resolve()?, args.dump_mesh, args.plot))
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run(args) => run(args, None),
        Command::Validate(args) => run(args, Some(Mode::Validate)),
        Command::Rates { files, skip, min_ndof, out } => {
            let rows = commands::rates_table(&files, skip, min_ndof)?;
            commands::write_rates(&rows, std::io::stdout().lock())?;
            if let Some(path) = out {
                commands::write_rates(&rows, BufWriter::new(File::create(path)?))?;
            }
            Ok(())
        }
        Command::Sweep(a) => {
            let problems: Vec<String> = a.problems.into_iter().filter(|s| !s.trim().is_empty()).collect();
            let base = ConfigOverrides {
                theta: a.theta,
                mu: a.mu,
                max_dofs: a.max_dofs,
                out: Some(a.out.clone()),
                ..Default::default()
            }
            .resolve()?;
            std::fs::create_dir_all(&a.out)?;
            let rows = commands::sweep(&base, &problems, &a.ps, &a.ks, a.skip_initial)?;
            commands::write_sweep(&rows, std::io::stdout().lock())?;
            commands::write_sweep(&rows, BufWriter::new(File::create(a.out.join("sweep.csv"))?))?;
            Ok(())
        }
    }
}

fn run(args: RunArgs, force: Option<Mode>) -> CliResult<()> {
    let (cfg, dump, plot) = resolve(args, force)?;
    let summary = commands::run(&cfg, &dump, plot)?;
    let last = summary.history.records.last();
    eprintln!(
        "{}: {} levels, {} steps, final ndof {}, eta {:.4e} -> {}",
        cfg.problem,
        summary.history.levels(),
        summary.history.records.len(),
        last.map_or(0, |r| r.ndof),
        last.map_or(0.0, |r| r.eta),
        summary.history_path.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("afem: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
