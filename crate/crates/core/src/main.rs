use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use zeno_core::config::{
    parse_cycle_counts, parse_epsilons, Command, ExperimentConfig, NoiseSource, OutputFormat,
    PsiKind, DEFAULT_POINTS,
};
use zeno_core::experiment;
use zeno_core::heisenberg::Status;
use zeno_core::output::FitStatus;
use zeno_core::protocol::{EnvPolicy, Observable};
use zeno_core::verify::run_suite;
use zeno_core::ZenoError;

/// Directory for outputs when `--output` is not given.
const OUTPUT_DIR_VAR: &str = "ZENO_OUTPUT_DIR";

const EXIT_FAILURE: u8 = 1;
const EXIT_INVALID_CONFIG: u8 = 2;
const EXIT_FLOOR: u8 = 3;

#[derive(Parser)]
#[command(
    name = "zeno",
    version,
    about = "Zeno-regime error-prevention code: identity checks and noise experiments"
)]
struct Cli {
    /// JSON experiment config; flags on the command line override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Check every algebraic identity of the code and the conditional-flip encoder.
    Verify(OutputArgs),
    /// Single-cycle failure and infidelity over a range of noise strengths.
    Sweep(ExperimentArgs),
    /// Repeated protected cycles at fixed total strength for several cycle counts.
    Zeno(ExperimentArgs),
    /// The two-time measurement protocol over a range of disturbance strengths.
    Twotime(ExperimentArgs),
    /// Run whatever the `--config` file describes.
    Run(OutputArgs),
}

#[derive(Args, Default)]
struct OutputArgs {
    /// csv or json.
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Output file; defaults to $ZENO_OUTPUT_DIR/<command>.<ext>, else stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Omit the `# generated_at` comment from CSV output.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Number of system qubits.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// `lo..hi` (geometric grid of --points values) or a comma list.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
    #[arg(long = "total-eps")]
    total_eps: Option<f64>,
    /// Comma-separated cycle counts.
    #[arg(long)]
    k: Option<String>,
    /// Read the noise model from a JSON file instead of drawing it from the seed.
    #[arg(long)]
    noise_file: Option<PathBuf>,
    /// reset or persist.
    #[arg(long)]
    env_policy: Option<EnvPolicy>,
    /// random, basis or basis:<index>.
    #[arg(long)]
    psi: Option<PsiKind>,
    /// failure or infidelity.
    #[arg(long)]
    observable: Option<Observable>,
    #[command(flatten)]
    out: OutputArgs,
}

fn base_config(
    path: Option<&PathBuf>,
    command: Option<Command>,
) -> Result<ExperimentConfig, ZenoError> {
    let Some(path) = path else {
        return Ok(ExperimentConfig {
            command: command.unwrap_or_default(),
            ..Default::default()
        });
    };
    let mut cfg = ExperimentConfig::from_file(path)?;
    if let Some(command) = command {
        if cfg.command != command {
            return Err(ZenoError::InvalidConfig {
                field: "command".into(),
                message: format!(
                    "config file is for '{}', not '{}'",
                    cfg.command.name(),
                    command.name()
                ),
            });
        }
        cfg.command = command;
    }
    Ok(cfg)
}

fn apply_output(cfg: &mut ExperimentConfig, out: &OutputArgs) {
    if let Some(f) = out.format {
        cfg.format = f;
    }
    if out.output.is_some() {
        cfg.output = out.output.clone();
    }
}

fn apply_experiment(cfg: &mut ExperimentConfig, args: &ExperimentArgs) -> Result<(), ZenoError> {
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(eps) = &args.eps {
        cfg.epsilons = parse_epsilons(eps, args.points)?;
    }
    if let Some(t) = args.total_eps {
        cfg.total_epsilon = t;
    }
    if let Some(k) = &args.k {
        cfg.ks = parse_cycle_counts(k)?;
    }
    if let Some(path) = &args.noise_file {
        cfg.noise = NoiseSource::File { path: path.clone() };
    }
    if let Some(p) = args.env_policy {
        cfg.env_policy = p;
    }
    if let Some(p) = args.psi {
        cfg.psi = p;
    }
    if let Some(o) = args.observable {
        cfg.observable = o;
    }
    apply_output(cfg, &args.out);
    Ok(())
}

fn resolve(cli: &Cli) -> Result<(ExperimentConfig, bool), ZenoError> {
    let config = cli.config.as_ref();
    let (cfg, out) = match &cli.command {
        CliCommand::Verify(out) => {
            let mut cfg = base_config(config, Some(Command::Verify))?;
            if config.is_none() {
                cfg.format = OutputFormat::Json;
            }
            apply_output(&mut cfg, out);
            (cfg, out)
        }
        CliCommand::Run(out) => {
            if config.is_none() {
                return Err(ZenoError::InvalidConfig {
                    field: "config".into(),
                    message: "run needs --config".into(),
                });
            }
            let mut cfg = base_config(config, None)?;
            apply_output(&mut cfg, out);
            (cfg, out)
        }
        CliCommand::Sweep(args) | CliCommand::Zeno(args) | CliCommand::Twotime(args) => {
            let command = match cli.command {
                CliCommand::Sweep(_) => Command::Sweep,
                CliCommand::Zeno(_) => Command::Zeno,
                _ => Command::Twotime,
            };
            let mut cfg = base_config(config, Some(command))?;
            apply_experiment(&mut cfg, args)?;
            (cfg, &args.out)
        }
    };
    Ok((cfg, out.no_timestamp))
}

fn destination(cfg: &ExperimentConfig) -> Option<PathBuf> {
    cfg.output.clone().or_else(|| {
        std::env::var_os(OUTPUT_DIR_VAR)
            .filter(|d| !d.is_empty())
            .map(|d| {
                PathBuf::from(d).join(format!("{}.{}", cfg.command.name(), cfg.format.extension()))
            })
    })
}

fn print_verify_report() -> Result<bool, ZenoError> {
    let reports = run_suite()?;
    let mut ok = true;
    for r in &reports {
        let tag = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Discrepancy => "NOTE",
        };
        ok &= r.passed();
        eprintln!("{tag}  {:<60} max_defect={:.3e}", r.identity, r.max_defect);
        if !r.detail.is_empty() {
            eprintln!("      {}", r.detail);
        }
    }
    eprintln!(
        "{} identities checked, {}",
        reports.len(),
        if ok { "all hold" } else { "some FAILED" }
    );
    Ok(ok)
}

fn execute(cli: &Cli) -> Result<ExitCode, ZenoError> {
    let (cfg, no_timestamp) = resolve(cli)?;
    cfg.validate()?;
    let verify_ok = if cfg.command == Command::Verify {
        print_verify_report()?
    } else {
        true
    };
    let table = experiment::run(&cfg)?;
    let timestamp = (!no_timestamp).then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    let text = table.render(&cfg, timestamp);
    match destination(&cfg) {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)
                    .map_err(|e| ZenoError::Io(format!("{}: {e}", dir.display())))?;
            }
            std::fs::write(&path, text)
                .map_err(|e| ZenoError::Io(format!("{}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    if !verify_ok {
        return Ok(ExitCode::from(EXIT_FAILURE));
    }
    match table.fit {
        FitStatus::Floor => {
            eprintln!("all values at or below the numerical floor; no fit");
            Ok(ExitCode::from(EXIT_FLOOR))
        }
        FitStatus::Fitted(f) => {
            eprintln!("fitted slope {:.4} over {} points", f.slope, f.points);
            Ok(ExitCode::SUCCESS)
        }
        FitStatus::NotApplicable => Ok(ExitCode::SUCCESS),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => code,
        Err(e @ ZenoError::InvalidConfig { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
