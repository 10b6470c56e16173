use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use ris_qaoa::config::{render_defaults, RunConfig};
use ris_qaoa::pipeline::{self, PipelineOptions, HEATMAP_FLOOR_DB};
use ris_qaoa::{Bitstring, Error, ModelId};

/// RIS beam steering as Ising optimization: coupling models, exhaustive
/// oracle, simulated QAOA and far-field validation.
///
/// Bitstrings are printed with character i = element i (row-major,
/// element 0 leftmost); '1' is a pi phase shift.
#[derive(Debug, Parser)]
#[command(name = "ris-qaoa", version, arg_required_else_help = true)]
struct Cli {
    /// TOML configuration; every key is optional (see --print-defaults).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `qaoa.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for reports and artifacts.
    #[arg(long, global = true, default_value = "ris-qaoa-out")]
    out_dir: PathBuf,
    /// Worker threads for the data-parallel kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Skip the exhaustive oracle (no approximation ratio or overlap).
    #[arg(long, global = true)]
    no_oracle: bool,
    /// Print the default configuration and exit.
    #[arg(long)]
    print_defaults: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full workflow for the configured model.
    Run,
    /// Full workflow for all four models, tabulated.
    Compare,
    /// Exhaustive search and validation of the optimum, without QAOA.
    Oracle,
    /// Radiation pattern and pointing error of one bitstring.
    Pattern {
        #[arg(long)]
        bitstring: String,
    },
    /// Repeats the workflow over coupling strengths.
    Sweep {
        /// Comma-separated alpha values.
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.3, 0.5])]
        alphas: Vec<f64>,
        /// Model number; defaults to the configured model.
        #[arg(long)]
        model: Option<u8>,
        /// Validate oracle optima only.
        #[arg(long)]
        skip_qaoa: bool,
    },
}

fn load_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.qaoa.seed = seed;
    }
    Ok(cfg)
}

fn configure_threads(threads: Option<usize>) -> anyhow::Result<()> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(Error::Config { field: "--threads".into(), message: "must be at least 1".into() }.into());
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")?;
    #[cfg(not(feature = "parallel"))]
    eprintln!("note: built without the `parallel` feature; --threads {n} ignored");
    Ok(())
}

fn write_json(dir: &Path, name: &str, value: &impl serde::Serialize) -> anyhow::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.4}"))
}

fn execute(cli: &Cli) -> anyhow::Result<()> {
    if cli.print_defaults {
        print!("{}", render_defaults());
        return Ok(());
    }
    let Some(command) = &cli.command else {
        bail!(Error::Config { field: "command".into(), message: "no subcommand given".into() });
    };
    configure_threads(cli.threads)?;
    let mut cfg = load_config(cli)?;
    let opts = PipelineOptions { run_oracle: !cli.no_oracle, run_qaoa: true };
    let out = &cli.out_dir;
    match command {
        Command::Run => {
            let result = pipeline::run(&cfg, opts)?;
            result.write_to(out)?;
            let r = &result.report;
            println!("model {}  edges {}", r.model.model, r.model.edge_count);
            if let Some(q) = &r.qaoa {
                println!(
                    "qaoa bitstring {}  p={:.4}  oracle_optimal={}  approx_ratio={}  overlap={}",
                    q.best_bitstring,
                    q.probability,
                    q.oracle_optimal.map_or("-".into(), |b| b.to_string()),
                    fmt_opt(q.approx_ratio),
                    fmt_opt(q.overlap),
                );
            }
            for (label, p) in [("qaoa", &r.validation.qaoa), ("oracle", &r.validation.oracle)] {
                if let Some(p) = p {
                    println!(
                        "{label} peak ({}, {}) deg  epsilon {:.3} deg",
                        p.peak.theta_deg, p.peak.phi_deg, p.epsilon_deg
                    );
                }
            }
            println!("wrote {}", out.display());
        }
        Command::Compare => {
            let cmp = pipeline::compare_models(&cfg, opts)?;
            write_json(out, "comparison.json", &cmp)?;
            print!("{}", cmp.to_table());
        }
        Command::Oracle => {
            if cli.no_oracle {
                bail!(Error::Config { field: "--no-oracle".into(), message: "conflicts with `oracle`".into() });
            }
            let result = pipeline::run(&cfg, PipelineOptions { run_oracle: true, run_qaoa: false })?;
            result.write_to(out)?;
            let o = result.report.oracle.as_ref().expect("oracle stage ran");
            println!(
                "objective max {:.12}  min {:.12}  degeneracy {}",
                o.objective_max, o.objective_min, o.degeneracy
            );
            for b in &o.optimal_set {
                println!("{b}");
            }
            if let Some(p) = &result.report.validation.oracle {
                println!("epsilon {:.3} deg", p.epsilon_deg);
            }
        }
        Command::Pattern { bitstring } => {
            let bits: Bitstring = bitstring
                .parse()
                .map_err(|e: Error| Error::Config { field: "--bitstring".into(), message: e.to_string() })?;
            let n = cfg.scenario().element_count();
            if bits.len() != n {
                bail!(Error::Config {
                    field: "--bitstring".into(),
                    message: format!("expected {n} characters, got {}", bits.len()),
                });
            }
            let (summary, pattern) = pipeline::pattern_for(&cfg, &bits)?;
            fs::create_dir_all(out)?;
            fs::write(out.join("pattern.csv"), pattern.to_csv())?;
            fs::write(out.join("pattern.pgm"), pattern.to_pgm(HEATMAP_FLOOR_DB))?;
            write_json(out, "pointing.json", &summary)?;
            println!(
                "peak ({}, {}) deg  epsilon {:.3} deg",
                summary.peak.theta_deg, summary.peak.phi_deg, summary.epsilon_deg
            );
        }
        Command::Sweep { alphas, model, skip_qaoa } => {
            if let Some(m) = model {
                cfg.model.model = ModelId::try_from(*m)
                    .map_err(|message| Error::Config { field: "--model".into(), message })?;
            }
            let opts = PipelineOptions { run_qaoa: !skip_qaoa, ..opts };
            let sweep = pipeline::alpha_sweep(&cfg, alphas, opts)?;
            write_json(out, "sweep.json", &sweep)?;
            print!("{}", sweep.to_table());
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::Config { .. }) | Some(Error::Parse(_)) => 2,
        Some(Error::Capacity { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
