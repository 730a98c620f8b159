use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use agq_cli::config::{format_complex, parse_complex, parse_levels, parse_point};
use agq_cli::{execute, write_outputs, Cache, CliError, ConfigDocument, Result, CACHE_DIR_ENV};
use agq_core::theta::{theta_basis, theta_eval, truncation_radius, DerivativeSelector};
use agq_core::C64;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "agq",
    version,
    about = "Theta functions, Toeplitz operators and curve operators on abelian varieties"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate level-k theta functions at one point.
    Theta {
        #[command(subcommand)]
        action: ThetaAction,
    },
    /// Orthonormality of the theta basis under quadrature.
    Gram(Common),
    /// Toeplitz operators.
    Toeplitz {
        #[command(subcommand)]
        action: ToeplitzAction,
    },
    /// Run experiments from a configuration file.
    Experiment {
        #[command(subcommand)]
        action: ExperimentAction,
    },
    /// Abelian Chern-Simons invariants.
    Tqft {
        #[command(subcommand)]
        action: TqftAction,
    },
}

#[derive(Subcommand)]
enum ThetaAction {
    Eval(ThetaArgs),
}

#[derive(Subcommand)]
enum ToeplitzAction {
    /// Closed-form matrices against quadrature.
    Compare(Common),
}

#[derive(Subcommand)]
enum ExperimentAction {
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum TqftAction {
    /// Z(Σ × S¹) with up to two link components given by --mode.
    Invariant(Common),
}

/// Flags shared by every experiment; they override configuration values.
#[derive(Args, Default)]
struct Common {
    /// Complex dimension (genus for tqft).
    #[arg(long)]
    n: Option<String>,
    /// Levels, comma-separated.
    #[arg(long)]
    k: Option<String>,
    /// Siegel point: `a+bi` or a row list `[[a, b], [c, d]]`. Repeatable.
    #[arg(long = "Z")]
    z: Vec<String>,
    /// Fourier mode `r,s` (`r_1,..,r_n,s_1,..,s_n`). Repeatable.
    #[arg(long)]
    mode: Vec<String>,
    /// Primary tolerance of the experiment.
    #[arg(long)]
    tol: Option<String>,
    /// Quadrature nodes per coordinate.
    #[arg(long)]
    grid: Option<String>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Directory for `<experiment>.csv` and `<experiment>.summary.txt`;
    /// without it the CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Result cache; caching is off when neither this nor the environment
    /// variable is set.
    #[arg(long, env = CACHE_DIR_ENV)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ThetaArgs {
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long)]
    k: u32,
    /// Siegel point; defaults to i·Id.
    #[arg(long = "Z")]
    z_matrix: Option<String>,
    /// Point of the torus, comma-separated complex coordinates; defaults to 0.
    #[arg(long)]
    z: Option<String>,
    /// Truncation error target.
    #[arg(long, default_value_t = 1e-15)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn flag_error(flag: &str, message: String) -> CliError {
    CliError::Config {
        location: agq_cli::error::Location::Flag(flag.into()),
        message,
    }
}

fn run_manifest(mut doc: ConfigDocument, common: Common) -> Result<bool> {
    let single = |v: &Option<String>| v.iter().cloned().collect::<Vec<_>>();
    doc.override_with("n", "n", &single(&common.n));
    doc.override_with("k", "k", &single(&common.k));
    doc.override_with("Z", "Z", &common.z);
    doc.override_with("mode", "mode", &common.mode);
    doc.override_with("tol", "tol", &single(&common.tol));
    doc.override_with("grid", "grid", &single(&common.grid));
    let manifest = doc.into_manifest()?;
    let cache = common.cache_dir.map(Cache::new);
    let run = execute(&manifest, common.workers, cache.as_ref())?;
    if cache.is_some() {
        let state = if run.cache_hit { "hit" } else { "miss" };
        eprintln!("cache {state}: {}", run.key);
    }
    match common.out.or(manifest.out.clone()) {
        Some(dir) => {
            let (csv, summary) = write_outputs(&dir, manifest.experiment, &run.result)?;
            eprintln!("wrote {} and {}", csv.display(), summary.display());
        }
        None => print!("{}", run.result.csv),
    }
    eprint!("{}", run.result.summary);
    Ok(run.result.passed)
}

fn experiment_doc(id: &str) -> ConfigDocument {
    ConfigDocument::parse(&format!("experiment = {id}")).expect("built-in experiment id")
}

fn theta(args: ThetaArgs) -> Result<bool> {
    let n = args.n;
    let p = match &args.z_matrix {
        Some(text) => parse_point(text).map_err(|e| flag_error("Z", e))?,
        None => agq_core::SiegelPoint::diagonal(&vec![C64::new(0.0, 1.0); n])?,
    };
    if p.dim() != n {
        return Err(flag_error(
            "Z",
            format!("Z is {0}x{0} but n = {n}", p.dim()),
        ));
    }
    let z = match &args.z {
        Some(text) => text
            .split(',')
            .map(parse_complex)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| flag_error("z", e))?,
        None => vec![C64::new(0.0, 0.0); n],
    };
    if z.len() != n {
        return Err(flag_error(
            "z",
            format!("expected {n} coordinates, got {}", z.len()),
        ));
    }
    parse_levels(&args.k.to_string()).map_err(|e| flag_error("k", e))?;
    let policy = truncation_radius(&p, args.k, args.tol, DerivativeSelector::Value)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["label", "value"])?;
    for label in theta_basis(args.k, n)? {
        let v = theta_eval(&p, &label, &z, DerivativeSelector::Value, &policy)?;
        let a: Vec<String> = label.numerators().iter().map(|x| x.to_string()).collect();
        w.write_record([a.join(" "), format_complex(v)])?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| csv::Error::from(e.into_error()))?;
    match args.out {
        Some(dir) => {
            fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
            let path = dir.join("theta.csv");
            fs::write(&path, &bytes).map_err(|e| CliError::io(&path, e))?;
        }
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| CliError::io("stdout", e))?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Theta {
            action: ThetaAction::Eval(args),
        } => theta(args),
        Command::Gram(common) => run_manifest(experiment_doc("gram"), common),
        Command::Toeplitz {
            action: ToeplitzAction::Compare(common),
        } => run_manifest(experiment_doc("toeplitz-compare"), common),
        Command::Tqft {
            action: TqftAction::Invariant(common),
        } => run_manifest(experiment_doc("tqft"), common),
        Command::Experiment {
            action: ExperimentAction::Run { config, common },
        } => fs::read_to_string(&config)
            .map_err(|e| CliError::io(&config, e))
            .and_then(|text| ConfigDocument::parse(&text))
            .and_then(|doc| run_manifest(doc, common)),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
