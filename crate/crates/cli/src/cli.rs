//! Argument parsing and output handling of the `hardy` binary.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::{cmd_constants, cmd_gap, cmd_hardy, cmd_indicial, cmd_verify, Outcome};
use crate::config::{parse_domain, RunConfig, Suite};
use crate::error::{exit, CliError};
use crate::report::ReportDocument;
use crate::sweep::{run_sweep, sweep_exit_code, sweep_plot, to_csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "hardy", version, about = "Weighted L^p-Hardy constants on radial model domains")]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,

    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for the report and figures; the report goes to stdout otherwise.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write SVG figures next to the report.
    #[arg(long, global = true)]
    pub plots: bool,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Seed of the sampling suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub dim: Option<u32>,
    /// `annulus:1,2`, `ball:1`, `exterior:1`, `half-line:1` or `interval:1`.
    #[arg(long, global = true)]
    pub domain: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form constants and regime.
    Constants,
    /// Roots of the indicial equations.
    Indicial,
    /// Discrete Hardy constant with refinement study and decay fits.
    Hardy,
    /// Gap verdict with constants at infinity from collar studies.
    Gap,
    /// Property suites; exit code 3 when a check fails.
    Verify {
        /// Suites to run (repeatable); all by default.
        #[arg(long = "suite", value_enum)]
        suites: Vec<Suite>,
        /// Random tuples of the cross-term suite.
        #[arg(long)]
        samples: Option<usize>,
        /// Add a sign check with an exponent below its interval (must fail).
        #[arg(long)]
        corrupt_exponent: bool,
    },
    /// Batch run over the `[sweep]` grid of the configuration.
    Sweep,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Indicial => "indicial",
            Command::Hardy => "hardy",
            Command::Gap => "gap",
            Command::Verify { .. } => "verify",
            Command::Sweep => "sweep",
        }
    }
}

/// Configuration file (or defaults) with command-line overrides applied.
pub fn resolve_config(args: &Args) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(a) = args.alpha {
        cfg.alpha = a;
    }
    if let Some(p) = args.p {
        cfg.p = p;
    }
    if let Some(n) = args.dim {
        cfg.dim = n;
    }
    if let Some(d) = &args.domain {
        cfg.domain = parse_domain(d)?;
    }
    if let Some(seed) = args.seed {
        cfg.verify.seed = seed;
    }
    if let Command::Verify { suites, samples, .. } = &args.command {
        if !suites.is_empty() {
            cfg.verify.suites = suites.clone();
        }
        if let Some(n) = samples {
            cfg.verify.samples = *n;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Report text plus the name of the file it goes to under `--out`.
struct Rendered {
    file: String,
    text: String,
    exit_code: i32,
}

fn write_plots(dir: &Path, prefix: &str, plots: &[(String, crate::plots::Plot)]) -> Result<Vec<String>, CliError> {
    std::fs::create_dir_all(dir)?;
    let mut names = Vec::new();
    for (stem, plot) in plots {
        let name = format!("{prefix}_{stem}.svg");
        std::fs::write(dir.join(&name), plot.to_svg())?;
        names.push(name);
    }
    Ok(names)
}

fn render(report: &ReportDocument, format: Format, command: &str) -> Result<(String, String), CliError> {
    Ok(match format {
        Format::Json => (format!("{command}.json"), report.to_json()?),
        Format::Csv => (format!("{command}.csv"), report.to_csv()?),
    })
}

pub fn execute(args: &Args) -> Result<i32, CliError> {
    let cfg = resolve_config(args)?;
    let name = args.command.name();
    let plot_dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let rendered = match &args.command {
        Command::Sweep => {
            let rows = run_sweep(&cfg, args.jobs)?;
            let mut report = ReportDocument::new(name, &cfg, serde_json::json!({ "rows": rows }), ())?;
            if args.plots {
                let plots: Vec<_> = sweep_plot(&rows).map(|p| ("alpha".to_string(), p)).into_iter().collect();
                report.artifacts = write_plots(&plot_dir, name, &plots)?;
            }
            let (file, text) = match args.format {
                Format::Csv => ("sweep.csv".to_string(), to_csv(&rows)?),
                Format::Json => ("sweep.json".to_string(), report.to_json()?),
            };
            Rendered { file, text, exit_code: sweep_exit_code(&rows) }
        }
        cmd => {
            let Outcome { mut report, exit_code, plots } = match cmd {
                Command::Constants => cmd_constants(&cfg)?,
                Command::Indicial => cmd_indicial(&cfg)?,
                Command::Hardy => cmd_hardy(&cfg)?,
                Command::Gap => cmd_gap(&cfg)?,
                Command::Verify { corrupt_exponent, .. } => cmd_verify(&cfg, *corrupt_exponent)?,
                Command::Sweep => unreachable!(),
            };
            if args.plots {
                report.artifacts = write_plots(&plot_dir, name, &plots)?;
            }
            let (file, text) = render(&report, args.format, name)?;
            Rendered { file, text, exit_code }
        }
    };
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(&rendered.file);
            std::fs::write(&path, &rendered.text)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{}", rendered.text),
    }
    Ok(rendered.exit_code)
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG } else { exit::SUCCESS };
            let _ = e.print();
            return code;
        }
    };
    match execute(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
