use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use solwarp_cli::config::{load_config, RunConfig, SampleSpec, Task, TolerancesSpec};
use solwarp_cli::report::Report;
use solwarp_cli::runner::{run_config, CliError, RunOutput};
use solwarp_cli::suites::SUITE_NAMES;

/// Numerical verification of gradient Ricci soliton warped products.
#[derive(Parser)]
#[command(name = "solwarp", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct RunFlags {
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the sample seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the sample count
    #[arg(long)]
    samples: Option<usize>,
    /// Override both tolerances
    #[arg(long)]
    tol: Option<f64>,
    /// Omit the timestamp so identical runs emit identical bytes
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the task described by a JSON or TOML config file
    Verify {
        config: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run a built-in named suite
    Suite {
        /// One of the built-in suite names
        name: String,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Integrate the profile equation from a config and export CSV
    Ode {
        config: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Re-emit a JSON report in another format
    Report {
        file: PathBuf,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in suites
    Suites,
}

fn apply_overrides(cfg: &mut RunConfig, flags: &RunFlags) {
    if flags.seed.is_some() || flags.samples.is_some() {
        let mut sample = cfg.sample.unwrap_or_default();
        if let Some(seed) = flags.seed {
            sample.seed = seed;
        }
        if let Some(count) = flags.samples {
            sample.count = count;
        }
        cfg.sample = Some(sample);
    }
    if let Some(tol) = flags.tol {
        cfg.tolerances = Some(TolerancesSpec {
            tensor: tol,
            constancy: tol,
        });
    }
}

fn emit(
    task_name: &str,
    digest: String,
    output: RunOutput,
    flags: &RunFlags,
) -> Result<bool, String> {
    for note in &output.notes {
        eprintln!("note: {note}");
    }
    let report = Report::new(task_name, digest, output.entries, !flags.no_timestamp);
    let json = report.to_json();
    match &flags.out {
        Some(path) => {
            std::fs::write(path, &json).map_err(|e| format!("write {}: {e}", path.display()))?
        }
        None => print!("{json}"),
    }

    for (name, contents) in &output.tables {
        let path = match &flags.out {
            Some(out) => {
                let stem = out
                    .file_stem()
                    .map(|s| s.to_string_lossy().to_string())
                    .unwrap_or_else(|| "report".into());
                out.with_file_name(format!("{stem}_{name}.csv"))
            }
            None => PathBuf::from(format!("{name}.csv")),
        };
        std::fs::write(&path, contents).map_err(|e| format!("write {}: {e}", path.display()))?;
        eprintln!("note: wrote {}", path.display());
    }
    Ok(report.pass)
}

fn run(cfg: RunConfig, task_name: &str, flags: &RunFlags) -> ExitCode {
    let digest = cfg.digest();
    match run_config(&cfg) {
        Ok(output) => match emit(task_name, digest, output, flags) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
        },
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn load(path: &Path) -> Result<RunConfig, CliError> {
    load_config(path).map_err(CliError::Config)
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Verify { config, flags } => match load(&config) {
            Ok(mut cfg) => {
                apply_overrides(&mut cfg, &flags);
                let name = match (cfg.task, &cfg.suite) {
                    (Task::Suite, Some(s)) => format!("suite:{s}"),
                    (t, _) => t.name().to_string(),
                };
                run(cfg, &name, &flags)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Cmd::Suite { name, flags } => {
            let mut cfg = RunConfig {
                task: Task::Suite,
                suite: Some(name.clone()),
                chart: None,
                fields: None,
                constants: None,
                sample: Some(SampleSpec::default()),
                tolerances: None,
                ode: None,
                torus: None,
                geodesics: None,
            };
            apply_overrides(&mut cfg, &flags);
            run(cfg, &format!("suite:{name}"), &flags)
        }
        Cmd::Ode { config, flags } => match load(&config) {
            Ok(mut cfg) => {
                cfg.task = Task::Ode;
                apply_overrides(&mut cfg, &flags);
                run(cfg, "ode", &flags)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Cmd::Report { file, format, out } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", file.display());
                    return ExitCode::from(2);
                }
            };
            let report: Report = match serde_json::from_str(&text) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {}: {e}", file.display());
                    return ExitCode::from(2);
                }
            };
            let rendered = match format.as_str() {
                "json" => report.to_json(),
                "csv" => report.to_csv(),
                other => {
                    eprintln!("error: unknown format `{other}` (json or csv)");
                    return ExitCode::from(2);
                }
            };
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, rendered) {
                        eprintln!("error: write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{rendered}"),
            }
            ExitCode::SUCCESS
        }
        Cmd::Suites => {
            for name in SUITE_NAMES {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
    }
}
