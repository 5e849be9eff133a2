use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qvortex::scenario::{self, OutputFormat, ScenarioConfig};

#[derive(Parser)]
#[command(name = "qvortex", version, about = "Run vortex-line scenarios and verification checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write polylines, events and a summary.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output directory (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// List the built-in presets.
    ListPresets,
    /// Check a configuration and report every problem found.
    Validate {
        #[command(flatten)]
        source: Source,
        /// Print the resolved configuration as TOML.
        #[arg(long)]
        print: bool,
    },
}

#[derive(Args)]
struct Source {
    /// TOML scenario file.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset name (see `list-presets`).
    #[arg(long)]
    preset: Option<String>,
    /// Nodes per axis, keeping the box.
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
    /// Number of frames.
    #[arg(long, value_name = "N")]
    frames: Option<usize>,
    /// Seed for randomized sample points.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Table,
    Svg,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Table => OutputFormat::Table,
            Format::Svg => OutputFormat::Svg,
        }
    }
}

impl Source {
    fn load(&self) -> Result<ScenarioConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(p), _) => ScenarioConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
            (None, Some(name)) => match scenario::preset(name) {
                Some(c) => c,
                None => bail!("unknown preset `{name}`; try `qvortex list-presets`"),
            },
            (None, None) => bail!("either --config or --preset is required"),
        };
        if let Some(n) = self.grid {
            cfg = cfg.with_resolution(n);
        }
        if let Some(n) = self.frames {
            cfg.n_frames = n;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

fn print_diagnostics(cfg: &ScenarioConfig) -> bool {
    let d = cfg.validate();
    for x in &d {
        eprintln!("invalid: {x}");
    }
    d.is_empty()
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn real_main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::ListPresets => {
            let list = scenario::list_presets();
            let w = list.iter().map(|p| p.name.len()).max().unwrap_or(0);
            for p in list {
                println!("{:w$}  {}", p.name, p.description);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { source, print } => {
            let cfg = source.load()?;
            if print {
                print!("{}", cfg.to_toml_string()?);
            }
            if print_diagnostics(&cfg) {
                eprintln!("{}: ok", cfg.name);
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }
        Command::Run { source, out, format } => {
            let mut cfg = source.load()?;
            if let Some(o) = out {
                cfg.output.dir = o;
            }
            if let Some(f) = format {
                cfg.output.format = f.into();
            }
            if !print_diagnostics(&cfg) {
                return Ok(ExitCode::from(2));
            }
            let report = scenario::run(&cfg)?;
            for c in &report.summary.checks {
                println!(
                    "{}  {:28} measured={:<12.5e} tol={:<10.3e} {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.measured,
                    c.tolerance,
                    c.detail
                );
            }
            println!(
                "{}: {} ({} frames, {} events) -> {}",
                cfg.name,
                if report.summary.pass { "PASS" } else { "FAIL" },
                report.frames.len(),
                report.events.events.len(),
                cfg.output.dir.display()
            );
            Ok(if report.summary.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}
