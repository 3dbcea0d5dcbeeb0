//! Executing a resolved configuration.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::advdiff::AdvDiffScheme;
use crate::analysis::{
    amplification_scan, compatible_equilibria, jacobian_equilibria, linearized_equilibria, reconcile_equilibria,
    LinearEquilibria, ReferenceState, StabilityReport,
};
use crate::error::{Error, Result};
use crate::fd::fd_run_observed;
use crate::fields::{acoustic_wave, diagnostics, gaussian_pulse, sine_mode, Macroscopic};
use crate::fluid::{FluidConfig, FluidScheme, IsentropicClosure};
use crate::gas::GasModel;
use crate::harness::config::{EquilibriaChoice, Profile, ResolvedConfig, SchemeKind};
use crate::harness::output::{snapshot_name, write_diag, write_index, DiagRecord, IndexEntry, Snapshot, DIAG_FILE};
use crate::lattice::build_moment_matrix_d1q3q3;
use crate::ns::{NsScheme, SourceTerm};

/// Conserved fields at t = 0.
pub fn initial_fields(r: &ResolvedConfig) -> Macroscopic {
    let c = &r.config;
    let n = r.n();
    let gas = &r.gas;
    let scalar = |n: usize| match c.initial.profile {
        Profile::Gaussian => gaussian_pulse(n, c.initial.base, c.initial.center, c.initial.width),
        Profile::Sine => sine_mode(n, c.initial.base, c.initial.amplitude, c.initial.mode),
        _ => vec![c.initial.base; n],
    };
    if c.scheme == SchemeKind::AdvdiffD1q3 {
        let mut f = Macroscopic::uniform(n, gas.rho0, gas.rho0 * c.advdiff.u0, 0.0);
        f.zeta = match c.initial.profile {
            Profile::AcousticWave | Profile::Uniform => vec![c.initial.base; n],
            _ => scalar(n),
        };
        return f;
    }
    match c.initial.profile {
        Profile::AcousticWave => acoustic_wave(n, gas, c.initial.delta_rho),
        Profile::Uniform => Macroscopic::uniform(n, gas.rho0, 0.0, gas.rho0 * gas.s0),
        // entropy spot on the resting reference state
        Profile::Gaussian | Profile::Sine => {
            let mut f = Macroscopic::uniform(n, gas.rho0, 0.0, 0.0);
            for (z, s) in f.zeta.iter_mut().zip(scalar(n)) {
                *z = gas.rho0 * (gas.s0 + s);
            }
            f
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub step: usize,
    pub t: f64,
    pub fields: Macroscopic,
}

/// Everything a run produces, held in memory.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub frames: Vec<Frame>,
    pub diag: Vec<DiagRecord>,
    pub steps: usize,
    pub t_final: f64,
    /// Σ over steps of Δt Σ_cells S Δx.
    pub source_total: f64,
    /// Smallest cell value of S over the run (0 without source).
    pub min_source: f64,
}

impl Simulation {
    pub fn last(&self) -> &Frame {
        self.frames.last().expect("a run keeps at least its final frame")
    }
}

struct Recorder<'a> {
    gas: &'a GasModel,
    every: usize,
    last_step: usize,
    frames: Vec<Frame>,
    diag: Vec<DiagRecord>,
}

impl Recorder<'_> {
    fn record(&mut self, step: usize, t: f64, fields: &Macroscopic) -> Result<()> {
        let totals = diagnostics(fields, self.gas).map_err(|e| e.at_step(step, t))?;
        self.diag.push(DiagRecord { t, totals });
        if step.is_multiple_of(self.every) || step == self.last_step {
            self.frames.push(Frame {
                step,
                t,
                fields: fields.clone(),
            });
        }
        Ok(())
    }
}

/// Runs the configured time-stepping scheme.
pub fn simulate(r: &ResolvedConfig) -> Result<Simulation> {
    let c = &r.config;
    let d = &r.derived;
    let n = r.n();
    let init = initial_fields(r);
    let mut rec = Recorder {
        gas: &r.gas,
        every: c.output.snapshot_every,
        last_step: d.steps,
        frames: Vec::new(),
        diag: Vec::with_capacity(d.steps + 1),
    };
    let mut source_total = 0.0;
    let mut min_source = f64::INFINITY;
    let (steps, t_final) = match c.scheme {
        SchemeKind::NsD1q3q3 => {
            let mut scheme = NsScheme::new(r.ns_config(), n)?;
            let mut state = scheme.initial_state(&init)?;
            rec.record(0, 0.0, &init)?;
            for step in 1..=d.steps {
                let t = step as f64 * d.dt;
                let rep = scheme.step(&mut state).map_err(|e| e.at_step(step, t))?;
                if c.source.term != SourceTerm::Off {
                    source_total += rep.source_increment * d.dx;
                    min_source = min_source.min(rep.min_source);
                }
                rec.record(step, t, &scheme.macroscopic(&state))?;
            }
            (d.steps, d.steps as f64 * d.dt)
        }
        SchemeKind::FluidD1q3 => {
            let closure = IsentropicClosure {
                gas: r.gas,
                lambda: d.lambda,
            };
            let cfg = FluidConfig {
                rho0: r.gas.rho0,
                lambda: d.lambda,
                dx: d.dx,
                s_e: r.rates.s_e,
            };
            let mut scheme = FluidScheme::new(cfg, closure, n)?;
            let mut field = scheme.initial_field(&init.rho, &init.j)?;
            let block = *scheme.block();
            rec.record(0, 0.0, &init)?;
            for step in 1..=d.steps {
                let t = step as f64 * d.dt;
                scheme.step(&mut field).map_err(|e| e.at_step(step, t))?;
                let m = field.moments(&block);
                let fields = Macroscopic {
                    rho: m.iter().map(|v| v[0]).collect(),
                    j: m.iter().map(|v| v[1]).collect(),
                    zeta: m.iter().map(|v| v[0] * r.gas.s0).collect(),
                };
                rec.record(step, t, &fields)?;
            }
            (d.steps, d.steps as f64 * d.dt)
        }
        SchemeKind::AdvdiffD1q3 => {
            let params = r.advdiff_params()?;
            let mut scheme = AdvDiffScheme::new(params, 1.0, n)?;
            let mut field = scheme.initial_field(&init.zeta);
            rec.record(0, 0.0, &init)?;
            let mut fields = init.clone();
            for step in 1..=d.steps {
                let t = step as f64 * d.dt;
                scheme.step(&mut field);
                fields.zeta = field.zeta(scheme.block());
                rec.record(step, t, &fields)?;
            }
            (d.steps, d.steps as f64 * d.dt)
        }
        SchemeKind::ReferenceFd => {
            let sample_dt = c.output.snapshot_every as f64 * d.dt;
            let mut samples = vec![0.0];
            let mut k = 1;
            while (k as f64) * sample_dt < d.t_final {
                samples.push(k as f64 * sample_dt);
                k += 1;
            }
            rec.diag.push(DiagRecord {
                t: 0.0,
                totals: diagnostics(&init, &r.gas)?,
            });
            let gas = r.gas;
            let diag = &mut rec.diag;
            let traj = fd_run_observed(
                &init,
                &r.gas,
                &r.transport,
                d.t_final,
                c.fd.cfl,
                &samples,
                |step, t, f| {
                    let totals = diagnostics(f, &gas).map_err(|e| e.at_step(step, t))?;
                    diag.push(DiagRecord { t, totals });
                    Ok(())
                },
            )?;
            rec.frames = traj
                .snapshots
                .iter()
                .map(|s| Frame {
                    step: s.step,
                    t: s.t,
                    fields: s.fields.clone(),
                })
                .collect();
            (traj.steps, traj.last().t)
        }
        SchemeKind::LinStability => {
            return Err(Error::Config(
                "scheme lin-stability has no time stepping; use the stability scan".into(),
            ))
        }
    };
    if !min_source.is_finite() {
        min_source = 0.0;
    }
    Ok(Simulation {
        frames: rec.frames,
        diag: rec.diag,
        steps,
        t_final,
        source_total,
        min_source,
    })
}

/// Linear equilibria for the `[stability]` settings.
pub fn stability_equilibria(r: &ResolvedConfig) -> Result<(GasModel, LinearEquilibria, String)> {
    let c = &r.config;
    let lambda = r.derived.lambda;
    let g = &c.gas;
    let gas = GasModel::from_sound_speed(g.gamma, g.cp, g.rho0, g.c0, c.stability.s0)?;
    let reference = ReferenceState::from_gas(&gas, c.stability.u0, lambda)?;
    let verbatim = linearized_equilibria(&reference, &gas, lambda);
    let jacobian = jacobian_equilibria(&reference, &gas, lambda);
    let rec = reconcile_equilibria(verbatim, jacobian, 1e-8);
    let lin = match c.stability.equilibria {
        EquilibriaChoice::Verbatim => verbatim,
        EquilibriaChoice::Compatible => compatible_equilibria(&reference, &gas, lambda),
        EquilibriaChoice::Jacobian => jacobian,
        EquilibriaChoice::Resolved => rec.resolved(),
    };
    Ok((gas, lin, rec.report()))
}

pub fn stability_scan(r: &ResolvedConfig) -> Result<(StabilityReport, String)> {
    let (gas, lin, note) = stability_equilibria(r)?;
    let m = build_moment_matrix_d1q3q3(gas.rho0, gas.cp, r.derived.lambda)?;
    Ok((
        amplification_scan(&m, &lin, &r.rates, r.config.stability.k_samples)?,
        note,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub name: String,
    pub scheme: String,
    pub n: usize,
    pub steps: usize,
    pub t_final: f64,
    pub source: String,
    pub wall_time_s: f64,
    pub mass_drift_rel: f64,
    pub momentum_drift: f64,
    pub energy_drift_rel: f64,
    pub entropy_change: f64,
    pub source_total: f64,
    pub min_source: f64,
    pub min_rho: f64,
    pub max_entropy_deviation: f64,
    pub snapshots: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilitySummary {
    pub name: String,
    pub equilibria: String,
    pub k_samples: usize,
    pub max_radius: f64,
    pub argmax_k_dx: f64,
    pub radius_at_zero: f64,
    pub zero_mode_multiplicity: usize,
    pub verdict: String,
    pub equilibria_check: String,
}

fn summarize(r: &ResolvedConfig, sim: &Simulation, wall: f64) -> RunSummary {
    let first = sim.diag.first().expect("initial totals").totals;
    let last = sim.diag.last().expect("final totals").totals;
    let fin = &sim.last().fields;
    let s0 = r.gas.s0;
    let rel = |a: f64, b: f64| if a != 0.0 { (b - a) / a.abs() } else { b - a };
    RunSummary {
        name: r.config.name.clone(),
        scheme: r.config.scheme.as_str().into(),
        n: r.n(),
        steps: sim.steps,
        t_final: sim.t_final,
        source: format!("{:?}", r.config.source.term).to_lowercase(),
        wall_time_s: wall,
        mass_drift_rel: rel(first.mass, last.mass),
        momentum_drift: last.momentum - first.momentum,
        energy_drift_rel: rel(first.energy, last.energy),
        entropy_change: last.entropy - first.entropy,
        source_total: sim.source_total,
        min_source: sim.min_source,
        min_rho: sim
            .frames
            .iter()
            .flat_map(|f| f.fields.rho.iter().copied())
            .fold(f64::INFINITY, f64::min),
        max_entropy_deviation: fin.entropy().iter().map(|s| (s - s0).abs()).fold(0.0, f64::max),
        snapshots: sim.frames.len(),
    }
}

/// Writes snapshots, index, diagnostics, config echo and summary into `dir`.
pub fn write_run(r: &ResolvedConfig, sim: &Simulation, dir: &Path, wall: f64) -> Result<RunSummary> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("config.toml"), r.to_toml()?)?;
    let mut index = Vec::with_capacity(sim.frames.len());
    for f in &sim.frames {
        let file = snapshot_name(f.step);
        Snapshot::from_fields(&f.fields, &r.gas)
            .map_err(|e| e.at_step(f.step, f.t))?
            .write(&dir.join(&file))?;
        index.push(IndexEntry {
            step: f.step,
            t: f.t,
            file,
        });
    }
    write_index(dir, &index)?;
    write_diag(&dir.join(DIAG_FILE), &sim.diag)?;
    let summary = summarize(r, sim, wall);
    let text = toml::to_string(&summary).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(dir.join("summary.toml"), text)?;
    Ok(summary)
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Runs(Vec<(PathBuf, RunSummary)>),
    Stability(PathBuf, StabilitySummary),
}

/// Runs the experiment into `out`. A dual-source configuration writes
/// `out/source-on` and `out/source-off`.
pub fn run_experiment(r: &ResolvedConfig, out: &Path) -> Result<Outcome> {
    if r.config.scheme == SchemeKind::LinStability {
        return run_stability(r, out).map(|s| Outcome::Stability(out.to_path_buf(), s));
    }
    let mut variants = vec![(out.to_path_buf(), r.clone())];
    if r.config.source.dual {
        let mut on = r.clone();
        if on.config.source.term == SourceTerm::Off {
            on.config.source.term = SourceTerm::Plain;
        }
        let mut off = r.clone();
        off.config.source.term = SourceTerm::Off;
        variants = vec![(out.join("source-on"), on), (out.join("source-off"), off)];
    }
    let mut done = Vec::new();
    for (dir, cfg) in variants {
        let start = Instant::now();
        let sim = simulate(&cfg)?;
        let summary = write_run(&cfg, &sim, &dir, start.elapsed().as_secs_f64())?;
        done.push((dir, summary));
    }
    Ok(Outcome::Runs(done))
}

pub fn run_stability(r: &ResolvedConfig, out: &Path) -> Result<StabilitySummary> {
    std::fs::create_dir_all(out)?;
    let (rep, note) = stability_scan(r)?;
    rep.write_csv(&out.join("stability.csv"))?;
    std::fs::write(out.join("config.toml"), r.to_toml()?)?;
    let s = StabilitySummary {
        name: r.config.name.clone(),
        equilibria: format!("{:?}", r.config.stability.equilibria).to_lowercase(),
        k_samples: rep.k_dx.len(),
        max_radius: rep.max_radius,
        argmax_k_dx: rep.argmax_k_dx,
        radius_at_zero: rep.radius_at_zero,
        zero_mode_multiplicity: rep.zero_mode_multiplicity,
        verdict: format!("{:?}", rep.verdict).to_lowercase(),
        equilibria_check: note,
    };
    std::fs::write(
        out.join("summary.toml"),
        toml::to_string(&s).map_err(|e| Error::Config(e.to_string()))?,
    )?;
    Ok(s)
}
