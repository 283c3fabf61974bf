use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use flaglab_cli::config::{self, Overrides};
use flaglab_cli::{run, CliError, Subcommand};

#[derive(Parser)]
#[command(name = "flaglab", version, about = "Flag-variety dynamics experiments for subgroups of SL(d, R)")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Experiment configuration (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory; overrides `out` in the config.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Word depth; overrides `depth` in the config.
    #[arg(long, value_name = "N")]
    depth: Option<usize>,
    /// Seed; overrides `seed` in the config.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Command {
    Cartan,
    Jordan,
    LimitSet,
    LimitCone,
    Contract,
    Holder,
    Obstruct,
    Sl8,
    Antipodal,
}

impl From<Command> for Subcommand {
    fn from(c: Command) -> Self {
        match c {
            Command::Cartan => Subcommand::Cartan,
            Command::Jordan => Subcommand::Jordan,
            Command::LimitSet => Subcommand::LimitSet,
            Command::LimitCone => Subcommand::LimitCone,
            Command::Contract => Subcommand::Contract,
            Command::Holder => Subcommand::Holder,
            Command::Obstruct => Subcommand::Obstruct,
            Command::Sl8 => Subcommand::Sl8,
            Command::Antipodal => Subcommand::Antipodal,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config::load(&cli.config).and_then(|mut loaded| {
        loaded.apply(&Overrides { out: cli.out.clone(), depth: cli.depth, seed: cli.seed });
        run(cli.command.into(), &loaded, None)
    });
    match result {
        Ok(report) => {
            if !cli.quiet {
                let dir = report.config.get("out").and_then(|v| v.as_str()).unwrap_or("out").to_string();
                println!("{}", serde_json::to_string_pretty(&report.results).unwrap_or_default());
                println!("{} finished in {:.2}s; wrote {} files to {dir}", report.subcommand, report.wall_time_seconds, report.files.len() + 1);
                println!("determinism hash {}", report.determinism_hash);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &CliError) -> u8 {
    e.exit_code() as u8
}
