//! Macroscopic (ρ, J, ζ) fields on the periodic unit interval, grid totals,
//! and the initial wave profiles used by the experiments.

use std::f64::consts::PI;

use crate::error::Result;
use crate::gas::GasModel;

/// Conserved variables per cell at x_j = jΔx, j = 0..N, on [0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Macroscopic {
    pub rho: Vec<f64>,
    pub j: Vec<f64>,
    pub zeta: Vec<f64>,
}

impl Macroscopic {
    pub fn uniform(n: usize, rho: f64, j: f64, zeta: f64) -> Self {
        Self {
            rho: vec![rho; n],
            j: vec![j; n],
            zeta: vec![zeta; n],
        }
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.len() as f64
    }

    pub fn x(&self) -> Vec<f64> {
        grid(self.len())
    }

    pub fn velocity(&self) -> Vec<f64> {
        self.rho.iter().zip(&self.j).map(|(r, j)| j / r).collect()
    }

    pub fn entropy(&self) -> Vec<f64> {
        self.rho.iter().zip(&self.zeta).map(|(r, z)| z / r).collect()
    }

    pub fn temperature(&self, gas: &GasModel) -> Result<Vec<f64>> {
        (0..self.len())
            .map(|c| {
                gas.eos(self.rho[c], self.zeta[c])
                    .map(|st| st.t)
                    .map_err(|e| e.at_cell(c))
            })
            .collect()
    }
}

pub fn grid(n: usize) -> Vec<f64> {
    let dx = 1.0 / n as f64;
    (0..n).map(|j| j as f64 * dx).collect()
}

/// Grid totals, each multiplied by Δx.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Totals {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
    pub entropy: f64,
}

/// Σρ, ΣJ, Σρ(i + u²/2) and Σζ times Δx.
pub fn diagnostics(fields: &Macroscopic, gas: &GasModel) -> Result<Totals> {
    let dx = fields.dx();
    let mut totals = Totals {
        mass: 0.0,
        momentum: 0.0,
        energy: 0.0,
        entropy: 0.0,
    };
    for c in 0..fields.len() {
        let (rho, j, zeta) = (fields.rho[c], fields.j[c], fields.zeta[c]);
        let st = gas.eos(rho, zeta).map_err(|e| e.at_cell(c))?;
        let u = j / rho;
        totals.mass += rho;
        totals.momentum += j;
        totals.energy += rho * (st.i + 0.5 * u * u);
        totals.entropy += zeta;
    }
    totals.mass *= dx;
    totals.momentum *= dx;
    totals.energy *= dx;
    totals.entropy *= dx;
    Ok(totals)
}

/// Right-moving simple wave on [0, 1):
/// ρ = ρ₀(1 + a sin 2πx), u = c₀ a sin(2πx) ρ₀/ρ, s = s₀, with a = δρ/ρ₀.
pub fn acoustic_wave(n: usize, gas: &GasModel, delta_rho: f64) -> Macroscopic {
    let a = delta_rho / gas.rho0;
    let c0 = gas.c0();
    let mut out = Macroscopic::uniform(n, gas.rho0, 0.0, gas.rho0 * gas.s0);
    for (c, x) in grid(n).into_iter().enumerate() {
        let wave = (2.0 * PI * x).sin();
        let rho = gas.rho0 * (1.0 + a * wave);
        out.rho[c] = rho;
        out.j[c] = gas.rho0 * c0 * a * wave;
        out.zeta[c] = rho * gas.s0;
    }
    out
}

/// Periodic Gaussian bump of the scalar ζ (standard deviation `width`) on
/// top of `base`, centred at `center`, with unit area.
pub fn gaussian_pulse(n: usize, base: f64, center: f64, width: f64) -> Vec<f64> {
    // the sum over periodic images converges long before |m| = 8 for width < 1
    let norm = 1.0 / (width * (2.0 * PI).sqrt());
    grid(n)
        .into_iter()
        .map(|x| {
            base + (-8..=8)
                .map(|m| {
                    let d = x - center + m as f64;
                    norm * (-0.5 * (d / width).powi(2)).exp()
                })
                .sum::<f64>()
        })
        .collect()
}

pub fn sine_mode(n: usize, base: f64, amplitude: f64, mode: usize) -> Vec<f64> {
    grid(n)
        .into_iter()
        .map(|x| base + amplitude * (2.0 * PI * mode as f64 * x).sin())
        .collect()
}
