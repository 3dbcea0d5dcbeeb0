use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use lbm1d::analysis::OrderEstimate;
use lbm1d::harness::{
    compare_runs, convergence, parse_config, preset, run_experiment, stability_scan, with_overrides, Coarsening, Norm,
    Outcome, ReferenceSpec, ResolvedConfig, RunConfig, SchemeKind,
};

#[derive(Parser)]
#[command(name = "lbm1d", version, about = "1D lattice Boltzmann experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Built-in setup: fig1, fig2, fig3, fig4, stab7
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// TOML configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a key by dotted path, e.g. --set gas.gamma=1.3
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Source {
    fn base(&self) -> Result<RunConfig> {
        match (&self.preset, &self.config) {
            (Some(p), None) => Ok(preset(p)?),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Ok(parse_config(&text, &[])
                    .with_context(|| format!("in {}", path.display()))?
                    .config)
            }
            _ => bail!("give exactly one of --preset and --config"),
        }
    }

    fn resolve(&self, extra: &[String]) -> Result<ResolvedConfig> {
        let mut o = extra.to_vec();
        o.extend(self.set.iter().cloned());
        if let (None, Some(path)) = (&self.preset, &self.config) {
            // keep the document's own [derived] check when nothing is overridden
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return parse_config(&text, &o).with_context(|| format!("in {}", path.display()));
        }
        Ok(with_overrides(&self.base()?, &o)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    L2,
    Linf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoarsenArg {
    Average,
    Inject,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write snapshots, diagnostics and a summary
    Run {
        #[command(flatten)]
        source: Source,
        /// Number of cells (overrides grid.n)
        #[arg(long)]
        mesh: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Von Neumann scan of the linearised scheme
    Stability {
        #[command(flatten)]
        source: Source,
        /// Directory for stability.csv and summary.toml
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-field distances between two runs or snapshot files
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "l2")]
        norm: NormArg,
        #[arg(long, value_enum, default_value = "average")]
        coarsen: CoarsenArg,
    },
    /// Empirical orders of accuracy over nested meshes
    Convergence {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',', default_value = "40,80,160")]
        meshes: Vec<usize>,
        /// self, fd:N or lbm:N
        #[arg(long, default_value = "fd:640")]
        reference: String,
    },
}

fn print_orders(name: &str, est: &OrderEstimate) {
    let errs: Vec<String> = est.errors.iter().map(|e| format!("{e:.4e}")).collect();
    let ords: Vec<String> = est.orders.iter().map(|o| format!("{o:.3}")).collect();
    let warn = est.warning.map(|w| format!("  warning: {w:?}")).unwrap_or_default();
    println!(
        "{name:<5} errors [{}]  orders [{}]{warn}",
        errs.join(", "),
        ords.join(", ")
    );
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { source, mesh, out } => {
            let extra: Vec<String> = mesh.map(|n| format!("grid.n={n}")).into_iter().collect();
            let r = source.resolve(&extra)?;
            match run_experiment(&r, &out)? {
                Outcome::Runs(runs) => {
                    for (dir, s) in runs {
                        println!(
                            "{}: {} N={} steps={} t={:.6} source={} mass_drift={:.3e} momentum_drift={:.3e} energy_drift={:.3e} entropy_change={:.3e} wall={:.3}s",
                            dir.display(),
                            s.scheme,
                            s.n,
                            s.steps,
                            s.t_final,
                            s.source,
                            s.mass_drift_rel,
                            s.momentum_drift,
                            s.energy_drift_rel,
                            s.entropy_change,
                            s.wall_time_s
                        );
                    }
                }
                Outcome::Stability(dir, s) => {
                    println!(
                        "{}: max radius {:.15} at k_dx={:.4} ({})",
                        dir.display(),
                        s.max_radius,
                        s.argmax_k_dx,
                        s.verdict
                    );
                }
            }
        }
        Command::Stability { source, out } => {
            let r = source.resolve(&[format!("scheme={}", SchemeKind::LinStability.as_str())])?;
            let (rep, note) = stability_scan(&r)?;
            if let Some(dir) = out {
                lbm1d::harness::run::run_stability(&r, &dir)?;
            }
            println!("{note}");
            println!(
                "u0={} s0={} equilibria={:?} samples={} max_radius={:.15} argmax_k_dx={:.6} radius_at_zero={:.15} zero_modes={} verdict={:?}",
                r.config.stability.u0,
                r.config.stability.s0,
                r.config.stability.equilibria,
                rep.k_dx.len(),
                rep.max_radius,
                rep.argmax_k_dx,
                rep.radius_at_zero,
                rep.zero_mode_multiplicity,
                rep.verdict
            );
        }
        Command::Compare { a, b, norm, coarsen } => {
            let mode = match coarsen {
                CoarsenArg::Average => Coarsening::Average,
                CoarsenArg::Inject => Coarsening::Inject,
            };
            let c = compare_runs(&a, &b, mode)?;
            let norm = match norm {
                NormArg::L2 => Norm::L2,
                NormArg::Linf => Norm::Linf,
            };
            print!("{}", c.table(norm));
        }
        Command::Convergence {
            source,
            meshes,
            reference,
        } => {
            let spec: ReferenceSpec = reference.parse()?;
            let base = source.base()?;
            let rep = convergence(&base, &meshes, spec, &source.set)?;
            println!("meshes {:?} reference {reference}", rep.meshes);
            print_orders("rho", &rep.rho);
            print_orders("J", &rep.j);
            print_orders("zeta", &rep.zeta);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
