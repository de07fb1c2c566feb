//! `qnd`: run QND complementarity sweeps and emit CSV or JSON.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use qnd_core::analysis::{criteria_summary, CriteriaReport};
use qnd_core::experiments::visibility_identity_check;
use qnd_core::harness::{
    branch_probability_curves, noise_from_rates, parse_csv, render_csv, render_json, repeat_fixed_state,
    run_full_protocol, run_sweep, sweep_fits, JsonReport, OutputFormat, SweepConfig, SweepObservable,
};

#[derive(Parser)]
#[command(name = "qnd", version, about = "Nondemolition measurement sweeps for two-qubit complementarity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep φ for one observable through the full protocol.
    Sweep(RunArgs),
    /// Repeat the protocol on the Bell input φ = π/2, θ = π.
    Repeat {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 50)]
        repetitions: usize,
    },
    /// Sweep all six observables and print the criteria table.
    FullProtocol(RunArgs),
    /// Criteria table from a CSV produced by `sweep` or `full-protocol`.
    Criteria {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the visibility-circuit operator identity on the angle grid.
    CheckAppendixA,
    /// Theoretical ancilla branch probabilities along φ.
    Amplitudes(RunArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// VA, VB, PA, PB, C1 or C2.
    #[arg(long)]
    observable: Option<SweepObservable>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Number of φ points.
    #[arg(long)]
    phi_steps: Option<usize>,
    #[arg(long)]
    shots: Option<u64>,
    /// Use exact probabilities instead of sampling.
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    noise_1q: Option<f64>,
    #[arg(long)]
    noise_2q: Option<f64>,
    #[arg(long)]
    readout_flip: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also emit one row per ancilla branch.
    #[arg(long)]
    branches: bool,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the φ points (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl RunArgs {
    fn config(&self) -> Result<SweepConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                SweepConfig::from_json(&text)?
            }
            None => SweepConfig::default(),
        };
        if let Some(o) = self.observable {
            cfg.observable = o;
        }
        if self.theta.is_some() {
            cfg.theta = self.theta;
        }
        if let Some(l) = self.lambda {
            cfg.lambda = l;
        }
        if let Some(n) = self.phi_steps {
            cfg.phi_count = n;
        }
        if let Some(s) = self.shots {
            cfg.shots = s;
        }
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        cfg.exact_mode |= self.exact;
        cfg.branches |= self.branches;
        if self.noise_1q.is_some() || self.noise_2q.is_some() || self.readout_flip.is_some() {
            let n = &cfg.noise;
            cfg.noise = noise_from_rates(
                self.noise_1q.unwrap_or(n.depol_1q),
                self.noise_2q.unwrap_or(n.depol_2q),
                self.readout_flip.unwrap_or(n.readout_flip),
            )?;
        }
        if let Some(out) = &self.out {
            cfg.output_path = Some(out.display().to_string());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn in_pool<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            Some(0) => bail!("--threads must be at least 1"),
            Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
            None => Ok(f()),
        }
    }

    fn emit(&self, text: &str) -> Result<()> {
        emit(self.out.as_ref(), text)
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn criteria_table(report: &CriteriaReport) -> String {
    let mut s = format!(
        "{:<4} {:>6} {:>8} {:>8} {:>8} {:>9} {:>8} {:>8} {:>8}\n",
        "obs", "points", "E_in", "E_qnd", "E_out", "E_out-qnd", "F_in", "F_out", "F_post"
    );
    for c in &report.per_observable {
        s += &format!(
            "{:<4} {:>6} {:>8.4} {:>8.4} {:>8.4} {:>9.4} {:>8.4} {:>8.4} {:>8}\n",
            c.observable,
            c.points,
            c.e_input,
            c.e_qnd,
            c.e_output,
            c.e_output_minus_qnd,
            c.mean_fidelity_in,
            c.mean_fidelity_out,
            c.mean_fidelity_post.map_or("-".into(), |f| format!("{f:.4}")),
        );
    }
    s += &format!(
        "average ({}): E_in {:.4}  E_qnd {:.4}  E_out {:.4}\n",
        report.weighting, report.average_e_input, report.average_e_qnd, report.average_e_output
    );
    s
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep(args) => {
            let cfg = args.config()?;
            let records = args.in_pool(|| run_sweep(&cfg))??;
            let text = match args.format {
                OutputFormat::Csv => render_csv(&records)?,
                OutputFormat::Json => {
                    let fits = sweep_fits(&cfg, &records)?;
                    render_json(&JsonReport::new(&cfg, records, fits))?
                }
            };
            args.emit(&text)
        }
        Command::Repeat { run, repetitions } => {
            let cfg = run.config()?;
            let records = run.in_pool(|| repeat_fixed_state(&cfg, repetitions))??;
            let text = match run.format {
                OutputFormat::Csv => render_csv(&records)?,
                OutputFormat::Json => render_json(&JsonReport::new(&cfg, records, vec![]))?,
            };
            run.emit(&text)
        }
        Command::FullProtocol(args) => {
            let cfg = args.config()?;
            let (records, report) = args.in_pool(|| run_full_protocol(&cfg))??;
            match args.format {
                OutputFormat::Csv => {
                    args.emit(&render_csv(&records)?)?;
                    eprint!("{}", criteria_table(&report));
                    Ok(())
                }
                OutputFormat::Json => {
                    let mut doc = JsonReport::new(&cfg, records, vec![]);
                    doc.criteria = Some(report);
                    args.emit(&render_json(&doc)?)
                }
            }
        }
        Command::Criteria { input, out } => {
            let text = fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
            let report = criteria_summary(&parse_csv(&text)?)?;
            eprint!("{}", criteria_table(&report));
            emit(out.as_ref(), &render_json(&report)?)
        }
        Command::CheckAppendixA => {
            let report = visibility_identity_check()?;
            print!("{}", render_json(&report)?);
            if !report.passed {
                bail!("identity violated: max deviation {:.3e}", report.max_deviation);
            }
            Ok(())
        }
        Command::Amplitudes(args) => {
            let cfg = args.config()?;
            let curves = branch_probability_curves(&cfg)?;
            let text = match args.format {
                OutputFormat::Json => render_json(&curves)?,
                OutputFormat::Csv => {
                    let mut s = String::from("phi,branch,probability,reliable\n");
                    for point in &curves {
                        for (outcome, p, reliable) in &point.branches {
                            s += &format!("{},{},{},{}\n", point.phi, outcome, p, reliable);
                        }
                    }
                    s
                }
            };
            args.emit(&text)
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
