//! Built-in experiment setups.
//!
//! fig1..fig3: progressive acoustic wave, N = 40, t = 3, γ = 1.4, Pr = 1,
//! c₀ = λ/2, s₀ = 0, ν = 6.579e-4, with δρ/ρ₀ = 0.001, 0.01 and 0.1.
//! fig4 is fig3 run twice, with and without the entropy source.
//! stab7 is the 120-step linear wave whose linearisation `stability` scans.

use crate::error::{Error, Result};
use crate::harness::config::{Profile, RunConfig, SchemeKind};

pub const PRESETS: [&str; 5] = ["fig1", "fig2", "fig3", "fig4", "stab7"];

fn wave(name: &str, delta_rho: f64) -> RunConfig {
    let mut c = RunConfig::new(SchemeKind::NsD1q3q3);
    c.name = name.into();
    c.grid.n = 40;
    c.transport.nu = Some(6.579e-4);
    c.transport.prandtl = 1.0;
    c.initial.profile = Profile::AcousticWave;
    c.initial.delta_rho = delta_rho;
    c.time.t_final = Some(3.0);
    c
}

pub fn preset(name: &str) -> Result<RunConfig> {
    Ok(match name {
        "fig1" => wave("fig1", 0.001),
        "fig2" => wave("fig2", 0.01),
        "fig3" => wave("fig3", 0.1),
        "fig4" => {
            let mut c = wave("fig4", 0.1);
            c.source.dual = true;
            c
        }
        "stab7" => {
            let mut c = wave("stab7", 0.001);
            c.time.t_final = None;
            c.time.steps = Some(120);
            c.output.snapshot_every = 120;
            c
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset '{other}' (available: {})",
                PRESETS.join(", ")
            )))
        }
    })
}
