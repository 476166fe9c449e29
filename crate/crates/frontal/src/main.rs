use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use frontal::config::RunParams;
use frontal::report::{comparison_csv, comparison_text, write_run, COMPARE_FILE};
use frontal::runner::load_problem;
use frontal::{mm, GenSpec, PrecondKind, ProblemSource, RunConfig, SolverMode};
use frontal_core::FactorMode;

/// Multifrontal solver benchmarks with HODLR-compressed fronts.
#[derive(Parser)]
#[command(name = "frontal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one system and print its report.
    Run {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_enum, default_value_t = Mode::Gmres)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Precond::Amf)]
        precond: Precond,
        #[command(flatten)]
        params: ParamArgs,
        /// Directory for report.json, history.csv and fronts.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run several pipelines on one system and print a table.
    Compare {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Pipelines: mf, amf, or gmres+{none,diag,ilut,amf}.
        #[arg(long, value_delimiter = ',', default_value = "gmres+ilut,gmres+amf")]
        pipelines: Vec<String>,
        #[command(flatten)]
        params: ParamArgs,
        /// Directory for compare.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a generated matrix to a Matrix Market file.
    Export {
        #[arg(long)]
        gen: GenSpec,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ProblemArgs {
    /// Matrix Market file; the right-hand side is A times ones.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// poisson:NX,NY,NZ or elasticity:NX,NY,NZ[,LAMBDA,MU].
    #[arg(long)]
    gen: Option<GenSpec>,
}

impl ProblemArgs {
    fn source(self) -> ProblemSource {
        match (self.matrix, self.gen) {
            (Some(p), _) => ProblemSource::File(p),
            (None, Some(g)) => ProblemSource::Gen(g),
            (None, None) => unreachable!("clap requires one source"),
        }
    }
}

#[derive(Args)]
struct ParamArgs {
    /// Fronts at least this large use the structured path.
    #[arg(long)]
    nc: Option<usize>,
    /// Low-rank compression tolerance.
    #[arg(long)]
    eps: Option<f64>,
    /// Boundary distance for row and column selection.
    #[arg(long)]
    d: Option<usize>,
    /// HODLR leaf size.
    #[arg(long)]
    nleaf: Option<usize>,
    /// Cap on off-diagonal ranks.
    #[arg(long)]
    maxrank: Option<usize>,
    /// ILUT fill parameter.
    #[arg(long)]
    k: Option<usize>,
    /// ILUT drop tolerance relative to the row norm.
    #[arg(long)]
    droptol: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 4000)]
    maxit: usize,
    #[arg(long, default_value_t = 100)]
    restart: usize,
    /// Divide each row of A and b by its largest absolute entry.
    #[arg(long)]
    scale_rows: bool,
}

impl ParamArgs {
    fn params(&self) -> RunParams {
        let d = RunParams::default();
        RunParams {
            n_c: self.nc.unwrap_or(d.n_c),
            eps: self.eps.unwrap_or(d.eps),
            d: self.d.unwrap_or(d.d),
            n_leaf: self.nleaf.unwrap_or(d.n_leaf),
            max_rank: self.maxrank.or(d.max_rank),
            k: self.k.unwrap_or(d.k),
            drop_tol: self.droptol.unwrap_or(d.drop_tol),
            tol: self.tol,
            max_iter: self.maxit,
            restart: self.restart,
            ..d
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Mf,
    Amf,
    Gmres,
}

#[derive(Clone, Copy, ValueEnum)]
enum Precond {
    None,
    Diag,
    Ilut,
    Amf,
}

impl From<Precond> for PrecondKind {
    fn from(p: Precond) -> Self {
        match p {
            Precond::None => PrecondKind::None,
            Precond::Diag => PrecondKind::Diag,
            Precond::Ilut => PrecondKind::Ilut,
            Precond::Amf => PrecondKind::Amf,
        }
    }
}

fn solver_mode(mode: Mode, precond: Precond) -> SolverMode {
    match mode {
        Mode::Mf => SolverMode::Direct(FactorMode::Conventional),
        Mode::Amf => SolverMode::Direct(FactorMode::Accelerated),
        Mode::Gmres => SolverMode::Gmres(precond.into()),
    }
}

fn parse_pipeline(s: &str) -> anyhow::Result<SolverMode> {
    let (mode, precond) = match s.trim().split_once('+') {
        Some(("gmres", p)) => (Mode::Gmres, Precond::from_str(p, true).map_err(anyhow::Error::msg)?),
        None if s.trim() == "mf" => (Mode::Mf, Precond::None),
        None if s.trim() == "amf" => (Mode::Amf, Precond::None),
        _ => bail!("unknown pipeline {s:?}"),
    };
    Ok(solver_mode(mode, precond))
}

fn config(source: ProblemSource, mode: SolverMode, params: &ParamArgs) -> RunConfig {
    RunConfig {
        params: params.params(),
        scale_rows: params.scale_rows,
        ..RunConfig::new(source, mode)
    }
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run {
            problem,
            mode,
            precond,
            params,
            out,
        } => {
            let mut cfg = config(problem.source(), solver_mode(mode, precond), &params);
            cfg.out = out.clone();
            let o = frontal::run(&cfg)?;
            if let Some(dir) = &out {
                write_run(dir, &o.report, o.history.as_ref(), o.fronts_csv.as_deref())?;
            }
            println!("{}", o.report.to_json()?);
            if o.report.converged == Some(false) {
                eprintln!("warning: GMRES did not reach the tolerance");
            }
        }
        Command::Compare {
            problem,
            pipelines,
            params,
            out,
        } => {
            let source = problem.source();
            let configs = pipelines
                .iter()
                .map(|p| parse_pipeline(p).map(|m| config(source.clone(), m, &params)))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let reports: Vec<_> = frontal::compare(&configs)?.into_iter().map(|o| o.report).collect();
            print!("{}", comparison_text(&reports));
            if let Some(dir) = out {
                fs::create_dir_all(&dir).with_context(|| dir.display().to_string())?;
                let p = dir.join(COMPARE_FILE);
                fs::write(&p, comparison_csv(&reports)).with_context(|| p.display().to_string())?;
            }
        }
        Command::Export { gen, out } => {
            let (a, _) = load_problem(&ProblemSource::Gen(gen))?;
            mm::write_matrix_market(&out, &a)?;
            eprintln!(
                "wrote {}x{} matrix with {} entries to {}",
                a.nrows(),
                a.ncols(),
                a.nnz(),
                out.display()
            );
        }
    }
    Ok(())
}
