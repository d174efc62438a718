use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use cycles_cli::builtin::{builtin_example, builtin_examples};
use cycles_cli::config::{load_config, SystemConfig};
use cycles_cli::plot::{render_svg, Window};
use cycles_cli::report::{closing_report, run, RunOptions, Stage, StageError};
use cycles_core::closing::bound_report;
use cycles_core::fields::CenterKind;

/// Detect, count and verify crossing limit cycles of saddle/center
/// piecewise systems switching on the positive semi-axes.
#[derive(Parser)]
#[command(name = "cycles", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// System config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Plot window `x0,x1,y0,y1`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    window: Option<Window>,
    /// Built-in example name (q1..q4).
    #[arg(long, global = true)]
    case: Option<String>,
    /// JSON indentation; 0 prints compact JSON.
    #[arg(long, global = true, default_value_t = 2)]
    json_indent: usize,
    /// Include wall-clock stage timings in reports.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Degree, Bézout number and admissible-cycle cap of a center family.
    Bound {
        #[arg(long)]
        kind: Option<CenterKind>,
    },
    /// The closing polynomials P_S and P_i.
    ClosingPolys,
    /// Full pipeline; report with verified cycle count.
    Solve,
    /// Full pipeline with per-cycle arc data.
    Verify,
    /// Full pipeline plus the return-map oracle cross-check.
    Oracle,
    /// SVG phase portrait of the verified cycles.
    Plot {
        /// Draw field direction glyphs.
        #[arg(long)]
        glyphs: bool,
    },
    /// Run the built-in reference systems with regression checks.
    PaperExamples,
}

enum Failure {
    Usage(String),
    Stage(StageError),
}

impl From<StageError> for Failure {
    fn from(e: StageError) -> Self {
        Failure::Stage(e)
    }
}

fn system(cli: &Cli) -> Result<SystemConfig, Failure> {
    match (&cli.config, &cli.case) {
        (Some(path), None) => load_config(path).map_err(|e| Failure::Usage(e.to_string())),
        (None, Some(name)) => {
            builtin_example(name).ok_or_else(|| Failure::Usage(format!("unknown case {name:?}")))
        }
        (Some(_), Some(_)) => Err(Failure::Usage(
            "give either --config or --case, not both".into(),
        )),
        (None, None) => Err(Failure::Usage(
            "this command needs --config or --case".into(),
        )),
    }
}

fn to_json<T: Serialize>(value: &T, indent: usize) -> Result<String, Failure> {
    let mut buf = Vec::new();
    let res = if indent == 0 {
        serde_json::to_writer(&mut buf, value)
    } else {
        let pad = vec![b' '; indent];
        let fmt = serde_json::ser::PrettyFormatter::with_indent(&pad);
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
        value.serialize(&mut ser)
    };
    res.map_err(|e| StageError::new(Stage::Output, e))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| StageError::new(Stage::Output, format!("{}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| StageError::new(Stage::Output, e))?,
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let base = RunOptions {
        timings: cli.timings,
        ..RunOptions::default()
    };
    let text = match &cli.command {
        Command::Bound { kind } => match kind {
            Some(k) => to_json(&bound_report(*k), cli.json_indent)?,
            None => {
                let all: Vec<_> = CenterKind::ALL.iter().map(|&k| bound_report(k)).collect();
                to_json(&all, cli.json_indent)?
            }
        },
        Command::ClosingPolys => to_json(&closing_report(&system(cli)?)?, cli.json_indent)?,
        Command::Solve => to_json(&run(&system(cli)?, base)?.report, cli.json_indent)?,
        Command::Verify => {
            let opts = RunOptions {
                details: true,
                ..base
            };
            to_json(&run(&system(cli)?, opts)?.report, cli.json_indent)?
        }
        Command::Oracle => {
            let opts = RunOptions {
                oracle: true,
                ..base
            };
            to_json(&run(&system(cli)?, opts)?.report, cli.json_indent)?
        }
        Command::Plot { glyphs } => {
            let cfg = system(cli)?;
            let analysis = run(&cfg, base)?;
            let win = cli.window.unwrap_or_else(|| Window::fit(&analysis.cycles));
            render_svg(
                &cfg.saddle,
                &cfg.center_system(),
                &analysis.cycles,
                win,
                *glyphs,
            )
        }
        Command::PaperExamples => {
            let opts = RunOptions {
                oracle: true,
                ..base
            };
            match &cli.case {
                Some(name) => {
                    let cfg = builtin_example(name)
                        .ok_or_else(|| Failure::Usage(format!("unknown case {name:?}")))?;
                    to_json(&run(&cfg, opts)?.report, cli.json_indent)?
                }
                None => {
                    let reports = builtin_examples()
                        .iter()
                        .map(|c| run(c, opts).map(|a| a.report))
                        .collect::<Result<Vec<_>, _>>()?;
                    to_json(&reports, cli.json_indent)?
                }
            }
        }
    };
    emit(cli, &text)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CYCLES_LOG", "error")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Stage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
