use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spinbath_cli::error::CliError;
use spinbath_cli::output::VERSION;
use spinbath_cli::{parse_config, run, RunConfig};
use spinbath_core::Engine;

#[derive(Parser)]
#[command(name = "spinbath", version = VERSION, about = "Reduced dynamics of a central spin in a spin bath")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured engines and write their trajectories.
    Simulate(Common),
    /// Run two or more engines and gate their pairwise deviations.
    Compare(Common),
    /// Stationary value: closed forms against the finite-N time average.
    Stationary(Common),
    /// Bessel identity residuals on a 5x5x5 grid over [0, 5]^3.
    IdentityCheck(Common),
    /// Stationary reports over a grid of delta, c_total and beta.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated engine list, e.g. `oracle,configsum`.
    #[arg(long, value_delimiter = ',')]
    engines: Option<Vec<String>>,
    /// Inner quadrature tolerance; the outer one becomes 100 times this.
    #[arg(long)]
    quad_abs_tol: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<Option<RunConfig>, CliError> {
        let Some(path) = &self.config else {
            return Ok(None);
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            field: "--config".into(),
            reason: format!("cannot read {}: {e}", path.display()),
        })?;
        let mut config = parse_config(&text)?;
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(names) = &self.engines {
            config.engines = names
                .iter()
                .map(|n| n.trim().parse::<Engine>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::config("--engines", e.to_string()))?;
        }
        if let Some(tol) = self.quad_abs_tol {
            config.quadrature.abs_tol = tol;
            config.quadrature.outer_abs_tol = None;
        }
        config.validate()?;
        Ok(Some(config))
    }

    fn require(&self) -> Result<RunConfig, CliError> {
        self.load()?
            .ok_or_else(|| CliError::Usage("this subcommand needs --config <path>".into()))
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("SPINBATH_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("SPINBATH_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}

fn dispatch(cli: Cli) -> Result<run::Outcome, CliError> {
    init_threads()?;
    match cli.command {
        Command::Simulate(c) => run::simulate(&c.require()?, &c.out_dir),
        Command::Compare(c) => run::compare(&c.require()?, &c.out_dir),
        Command::Stationary(c) => run::stationary(&c.require()?, &c.out_dir),
        Command::IdentityCheck(c) => run::identity_check(c.load()?.as_ref(), &c.out_dir),
        Command::Sweep(c) => run::sweep(&c.require()?, &c.out_dir),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            eprintln!("{}", CliError::Usage(e.kind().to_string()).record());
            return ExitCode::from(2);
        }
        Err(e) => e.exit(),
    };
    match dispatch(cli) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("{}", serde_json::json!({"gate": "failed"}));
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
