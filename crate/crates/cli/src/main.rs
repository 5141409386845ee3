use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use htpde::bench::{compare_formats, fit_rate, run_experiment, ExperimentConfig, TensorFormat};
use htpde::BenchError;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "htpde", version, about = "Adaptive low-rank solver for parametric diffusion")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one format over the configured target schedule.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        format: Option<TensorFormat>,
        /// Replaces the schedule by this single target.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run split and full formats and write a comparison table.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Regenerate the frozen oracle fixtures.
    Oracle {
        #[arg(long)]
        fixtures: PathBuf,
    },
    /// Least-squares log-log slope over the trailing rows of a CSV.
    Fit {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        window: usize,
    },
}

/// Exit status: 0 certified, 1 configuration or input error, 2 iteration cap.
fn status(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<BenchError>() {
        Some(BenchError::NotCertified(_)) => 2,
        _ => 1,
    }
}

fn copy_source(config: &Path, out: &Path) -> Result<()> {
    let ext = config.extension().and_then(|e| e.to_str()).unwrap_or("txt");
    std::fs::copy(config, out.join(format!("config_source.{ext}"))).context("copying config")?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Solve { config, format, eps, out } => {
            let mut c = ExperimentConfig::load(&config)?;
            if let Some(f) = format {
                c.format = f;
            }
            if let Some(e) = eps {
                c.eps_schedule = Some(vec![e]);
            }
            if let Some(o) = out {
                c.out_dir = o;
            }
            let res = run_experiment(&c);
            if c.out_dir.is_dir() {
                copy_source(&config, &c.out_dir)?;
            }
            let s = res?;
            for (t, pos) in &s.certified {
                if let Some(p) = pos {
                    let st = &s.stats[*p];
                    println!(
                        "eps {t:e}: k = {}, eps_k = {:.4e}, max rank {}, #mode0 {}, sum modes {}",
                        st.k, st.eps_k, st.max_rank, st.dofs_mode0, st.dofs_parametric
                    );
                }
            }
            println!("artifacts in {}", c.out_dir.display());
        }
        Cmd::Compare { config, out } => {
            let c = ExperimentConfig::load(&config)?;
            let (_, _, rows) = compare_formats(&c, &out)?;
            copy_source(&config, &out)?;
            for r in &rows {
                println!("eps {:e}: max rank split {} full {}; sum modes split {} full {}", r.target_eps, r.a.2, r.b.2, r.a.4, r.b.4);
            }
            println!("comparison in {}", out.join("comparison.csv").display());
        }
        Cmd::Oracle { fixtures } => {
            let text = htpde::oracle::fixtures::to_string()?;
            if let Some(dir) = fixtures.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&fixtures, text).with_context(|| format!("writing {}", fixtures.display()))?;
            println!("wrote {}", fixtures.display());
        }
        Cmd::Fit { csv, x, y, window } => {
            println!("{}", fit_rate(&csv, &x, &y, window)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(status(&e))
        }
    }
}
