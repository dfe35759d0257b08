use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spin_entangle::cli::{
    analyze_file, rows_to_csv, run_sweep, run_verify, ModelFamily, SweepConfig,
};
use spin_entangle::model::Boundary;
use spin_entangle::Error;

/// Two-spin entanglement in XXZ and transverse-field Ising chains.
#[derive(Parser)]
#[command(name = "spin-entangle", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a parameter grid and emit one CSV row per
    /// (parameter, separation, breaking-field) point.
    Sweep(Box<SweepArgs>),
    /// Analyze a density matrix stored in the 16-entry exchange format.
    Analyze {
        /// Path to the matrix file (16 whitespace-separated "re im" pairs,
        /// row-major).
        file: PathBuf,
    },
    /// Run a randomized verification suite.
    Verify {
        /// One of: wootters, mixture, convexity, z2, u1, ising, conditions, all.
        suite: String,
        /// Seed for the randomized trials.
        #[arg(long, default_value_t = 1234)]
        seed: u64,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Model family.
    #[arg(long, value_parser = ["xxz", "tfim"])]
    model: Option<String>,
    /// Number of chain sites N.
    #[arg(long)]
    sites: Option<usize>,
    /// Boundary condition.
    #[arg(long, value_parser = ["pbc", "obc"])]
    boundary: Option<String>,
    /// Comma-separated parameter grid (Δ for xxz, h_z for tfim).
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// Comma-separated site separations.
    #[arg(long = "sep", value_delimiter = ',')]
    sep: Option<Vec<usize>>,
    /// Comma-separated symmetry-breaking field values.
    #[arg(long = "break", value_delimiter = ',')]
    breaking: Option<Vec<f64>>,
    /// Inverse temperature; 0 selects the ground state.
    #[arg(long)]
    beta: Option<f64>,
    /// Worker threads (0 = all cores). Defaults to $SPIN_ENTANGLE_JOBS.
    #[arg(long)]
    jobs: Option<usize>,
    /// Solver seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_boundary(text: &str) -> Result<Boundary, Error> {
    match text {
        "pbc" => Ok(Boundary::Periodic),
        "obc" => Ok(Boundary::Open),
        other => Err(Error::Config(format!("unknown boundary {other:?}"))),
    }
}

fn parse_model(text: &str) -> Result<ModelFamily, Error> {
    match text {
        "xxz" => Ok(ModelFamily::Xxz),
        "tfim" => Ok(ModelFamily::Tfim),
        other => Err(Error::Config(format!("unknown model {other:?}"))),
    }
}

/// Partial sweep description used before flags and file are merged.
#[derive(Default)]
struct PartialConfig {
    model: Option<ModelFamily>,
    sites: Option<usize>,
    boundary: Option<Boundary>,
    grid: Option<Vec<f64>>,
    separations: Option<Vec<usize>>,
    breaking_fields: Option<Vec<f64>>,
    beta: Option<f64>,
    jobs: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

fn build_config(args: &SweepArgs) -> Result<SweepConfig, Error> {
    let mut base = PartialConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)?;
        let file_cfg: SweepConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("config file {}: {e}", path.display())))?;
        base = PartialConfig {
            model: Some(file_cfg.model),
            sites: Some(file_cfg.sites),
            boundary: Some(file_cfg.boundary),
            grid: Some(file_cfg.grid),
            separations: Some(file_cfg.separations),
            breaking_fields: Some(file_cfg.breaking_fields),
            beta: Some(file_cfg.beta),
            jobs: Some(file_cfg.jobs),
            seed: Some(file_cfg.seed),
            out: file_cfg.out,
        };
    }

    // Flags override file values; $SPIN_ENTANGLE_JOBS fills a missing --jobs.
    let model = match &args.model {
        Some(text) => parse_model(text)?,
        None => base
            .model
            .ok_or_else(|| Error::Config("--model (or a config file) is required".into()))?,
    };
    let sites = args
        .sites
        .or(base.sites)
        .ok_or_else(|| Error::Config("--sites (or a config file) is required".into()))?;
    let boundary = match &args.boundary {
        Some(text) => parse_boundary(text)?,
        None => base.boundary.unwrap_or(Boundary::Periodic),
    };
    let grid = args
        .grid
        .clone()
        .or(base.grid)
        .ok_or_else(|| Error::Config("--grid (or a config file) is required".into()))?;
    let separations = args.sep.clone().or(base.separations).unwrap_or(vec![1]);
    let breaking_fields = args
        .breaking
        .clone()
        .or(base.breaking_fields)
        .unwrap_or(vec![0.0]);
    let env_jobs = std::env::var("SPIN_ENTANGLE_JOBS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    let jobs = args.jobs.or(base.jobs).or(env_jobs).unwrap_or(0);

    Ok(SweepConfig {
        model,
        sites,
        boundary,
        grid,
        separations,
        breaking_fields,
        beta: args.beta.or(base.beta).unwrap_or(0.0),
        jobs,
        seed: args.seed.or(base.seed).unwrap_or(7),
        out: args.out.clone().or(base.out),
    })
}

/// Exit codes: 0 success, 1 usage, 2 numerical failure.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_)
        | Error::Parse(_)
        | Error::InvalidLattice(_)
        | Error::InvalidModel(_)
        | Error::Io(_) => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Sweep(args) => {
            let cfg = build_config(&args)?;
            cfg.validate()?;
            let rows = run_sweep(&cfg)?;
            let csv = rows_to_csv(&rows);
            match &cfg.out {
                Some(path) => std::fs::write(path, &csv)?,
                None => print!("{csv}"),
            }
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            if failed > 0 {
                eprintln!("{failed} of {} sweep points failed", rows.len());
                return Ok(2);
            }
            Ok(0)
        }
        Command::Analyze { file } => {
            let report = analyze_file(&file)?;
            println!("{report}");
            Ok(0)
        }
        Command::Verify { suite, seed } => {
            let outcomes = run_verify(&suite, seed)?;
            let mut ok = true;
            for outcome in &outcomes {
                println!("{outcome}");
                ok &= outcome.passed();
            }
            Ok(if ok { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are not usage errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
