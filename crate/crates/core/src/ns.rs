//! Coupled D1Q3Q3 scheme for the Navier-Stokes equations in (ρ, J, ζ = ρs)
//! variables, with the dissipation source of the entropy equation.
//!
//! Particles f_d = (f₀, f₊, f₋, g₀, g₊, g₋), moments m = (ρ, J, ζ, e, ψ, ε).
//! Equilibria:
//!
//! ```text
//! e^eq = 3(ρu² + p) − 2λ²ρ
//! ψ^eq = ζu
//! ε^eq = (2ρc_pλ²/γ) log(T/T₀) + e^eq s
//! ```
//!
//! Relaxation rates follow σ_e = ν/(λΔx), σ_ψ = (3/2)(γ/Pr)σ_e and s_ε = 1.5.
//! The source ΔtS, S = (ρν/T)(∂ₓu)² + (κ/T²)(∂ₓT)², is added to ζ in moment
//! space before the post-collision distributions are rebuilt; gradients are
//! centred differences of the time-t fields.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, require_rate, Error, Result};
use crate::fields::Macroscopic;
use crate::gas::GasModel;
use crate::lattice::{henon_sigma, sigma_to_s, D1q3Block, Populations};

pub use crate::fields::{diagnostics, Totals};

pub const DEFAULT_S_EPS: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportModel {
    pub nu: f64,
    pub prandtl: f64,
}

impl TransportModel {
    pub fn new(nu: f64, prandtl: f64) -> Result<Self> {
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "nu",
                value: nu,
                reason: "viscosity must be finite and >= 0".into(),
            });
        }
        require_positive("prandtl", prandtl)?;
        Ok(Self { nu, prandtl })
    }

    /// κ = ρνc_p/Pr
    #[inline]
    pub fn kappa(&self, rho: f64, cp: f64) -> f64 {
        rho * self.nu * cp / self.prandtl
    }
}

/// λ = ν/(σ_e Δx): the lattice speed implied by a viscosity and a relaxation rate.
pub fn resolve_lattice_speed(nu: f64, dx: f64, s_e: f64) -> Result<f64> {
    require_positive("nu", nu)?;
    require_positive("dx", dx)?;
    Ok(nu / (henon_sigma(s_e)? * dx))
}

/// How the third non-conserved moment relaxes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsRelaxation {
    Rate(f64),
    Sigma(f64),
}

impl Default for EpsRelaxation {
    fn default() -> Self {
        EpsRelaxation::Rate(DEFAULT_S_EPS)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceTerm {
    Off,
    /// ζ ← ζ + ΔtS after relaxation.
    #[default]
    Plain,
    /// ζ ← ζ + ΔtS/2 before relaxation and again after it.
    HalfStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelaxationRates {
    pub s_e: f64,
    pub s_psi: f64,
    pub s_eps: f64,
}

impl RelaxationRates {
    pub fn sigma_e(&self) -> f64 {
        1.0 / self.s_e - 0.5
    }

    pub fn sigma_psi(&self) -> f64 {
        1.0 / self.s_psi - 0.5
    }

    pub fn sigma_eps(&self) -> f64 {
        1.0 / self.s_eps - 0.5
    }

    /// σ_e from ν = σ_eλΔx, unless `s_e` is given explicitly; σ_ψ from the
    /// link σ_ψ = (3/2)(γ/Pr)σ_e.
    pub fn resolve(
        gas: &GasModel,
        transport: &TransportModel,
        lambda: f64,
        dx: f64,
        s_e: Option<f64>,
        eps: EpsRelaxation,
    ) -> Result<Self> {
        require_positive("lambda", lambda)?;
        require_positive("dx", dx)?;
        let s_e = match s_e {
            Some(s) => {
                require_rate("s_e", s)?;
                s
            }
            None => sigma_to_s(transport.nu / (lambda * dx))?,
        };
        let sigma_psi = 1.5 * gas.gamma / transport.prandtl * henon_sigma(s_e)?;
        let s_eps = match eps {
            EpsRelaxation::Rate(s) => s,
            EpsRelaxation::Sigma(sigma) => sigma_to_s(sigma)?,
        };
        let rates = Self {
            s_e,
            s_psi: sigma_to_s(sigma_psi)?,
            s_eps,
        };
        require_rate("s_psi", rates.s_psi)?;
        require_rate("s_eps", rates.s_eps)?;
        Ok(rates)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NsConfig {
    pub gas: GasModel,
    pub transport: TransportModel,
    pub lambda: f64,
    pub dx: f64,
    pub rates: RelaxationRates,
    pub source: SourceTerm,
}

impl NsConfig {
    pub fn dt(&self) -> f64 {
        self.dx / self.lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NsEquilibria {
    pub e: f64,
    pub psi: f64,
    pub eps: f64,
}

/// Nonlinear equilibria of the three non-conserved moments.
#[inline]
pub fn ns_equilibria(rho: f64, j: f64, zeta: f64, gas: &GasModel, lambda: f64) -> Result<NsEquilibria> {
    let st = gas.eos(rho, zeta)?;
    Ok(equilibria_from_state(rho, j, zeta, st.p, st.t, gas, lambda))
}

#[inline]
fn equilibria_from_state(rho: f64, j: f64, zeta: f64, p: f64, t: f64, gas: &GasModel, lambda: f64) -> NsEquilibria {
    let l2 = lambda * lambda;
    let u = j / rho;
    let s = zeta / rho;
    let e = 3.0 * (rho * u * u + p) - 2.0 * l2 * rho;
    NsEquilibria {
        e,
        psi: zeta * u,
        eps: 2.0 * rho * gas.cp * l2 / gas.gamma * (t / gas.t0).ln() + e * s,
    }
}

/// ε^eq specialised to the polytropic pressure law:
/// 2λ²[ρ(s − s₀) + (1 − 1/γ)c_pρ log(ρ/ρ₀)] + [3(ρu² + p) − 2λ²ρ] s.
pub fn entropy_energy_equilibrium_perfect_gas(rho: f64, j: f64, zeta: f64, gas: &GasModel, lambda: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Positivity {
            rho,
            cell: crate::error::Cell(None),
        });
    }
    let l2 = lambda * lambda;
    let s = zeta / rho;
    let u = j / rho;
    let p = gas.pressure(rho, s);
    let e = 3.0 * (rho * u * u + p) - 2.0 * l2 * rho;
    Ok(2.0 * l2 * (rho * (s - gas.s0) + (1.0 - 1.0 / gas.gamma) * gas.cp * rho * (rho / gas.rho0).ln()) + e * s)
}

/// (q_{j+1} − q_{j−1})/(2Δx) with periodic wrap.
pub fn centered_gradients(q: &[f64], dx: f64) -> Vec<f64> {
    let mut out = vec![0.0; q.len()];
    centered_gradients_into(q, dx, &mut out);
    out
}

pub fn centered_gradients_into(q: &[f64], dx: f64, out: &mut [f64]) {
    let n = q.len();
    assert!(n >= 3, "centred gradients need at least 3 cells");
    let inv = 0.5 / dx;
    out[0] = (q[1] - q[n - 1]) * inv;
    for c in 1..n - 1 {
        out[c] = (q[c + 1] - q[c - 1]) * inv;
    }
    out[n - 1] = (q[0] - q[n - 2]) * inv;
}

/// S = (ρν/T)(∂ₓu)² + (κ/T²)(∂ₓT)² per cell.
pub fn entropy_source(fields: &Macroscopic, gas: &GasModel, transport: &TransportModel) -> Result<Vec<f64>> {
    let u = fields.velocity();
    let t = fields.temperature(gas)?;
    let mut out = vec![0.0; fields.len()];
    let mut du = vec![0.0; fields.len()];
    let mut dt = vec![0.0; fields.len()];
    entropy_source_into(
        &fields.rho,
        &u,
        &t,
        fields.dx(),
        gas,
        transport,
        &mut du,
        &mut dt,
        &mut out,
    );
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn entropy_source_into(
    rho: &[f64],
    u: &[f64],
    t: &[f64],
    dx: f64,
    gas: &GasModel,
    transport: &TransportModel,
    du: &mut [f64],
    dtemp: &mut [f64],
    out: &mut [f64],
) {
    centered_gradients_into(u, dx, du);
    centered_gradients_into(t, dx, dtemp);
    for c in 0..rho.len() {
        let kappa = transport.kappa(rho[c], gas.cp);
        out[c] = rho[c] * transport.nu / t[c] * du[c] * du[c] + kappa / (t[c] * t[c]) * dtemp[c] * dtemp[c];
    }
}

/// The six distributions of the coupled scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct NsState {
    pub f: Populations,
    pub g: Populations,
}

impl NsState {
    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }
}

/// Per-step bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepReport {
    /// Δt Σ_cells S (not multiplied by Δx).
    pub source_increment: f64,
    /// min over cells of S.
    pub min_source: f64,
}

/// Time stepper with preallocated work arrays.
#[derive(Debug, Clone)]
pub struct NsScheme {
    config: NsConfig,
    fblock: D1q3Block,
    gblock: D1q3Block,
    post: NsState,
    rho: Vec<f64>,
    u: Vec<f64>,
    temp: Vec<f64>,
    du: Vec<f64>,
    dtemp: Vec<f64>,
    source: Vec<f64>,
}

impl NsScheme {
    pub fn new(config: NsConfig, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::DimensionMismatch(format!("grid of {n} cells, need at least 3")));
        }
        require_rate("s_e", config.rates.s_e)?;
        require_rate("s_psi", config.rates.s_psi)?;
        require_rate("s_eps", config.rates.s_eps)?;
        require_positive("dx", config.dx)?;
        let gas = config.gas;
        Ok(Self {
            fblock: D1q3Block::new(gas.rho0, config.lambda)?,
            gblock: D1q3Block::new(gas.rho0 * gas.cp, config.lambda)?,
            config,
            post: NsState {
                f: Populations::zeros(n),
                g: Populations::zeros(n),
            },
            rho: vec![0.0; n],
            u: vec![0.0; n],
            temp: vec![0.0; n],
            du: vec![0.0; n],
            dtemp: vec![0.0; n],
            source: vec![0.0; n],
        })
    }

    pub fn config(&self) -> &NsConfig {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.rho.len()
    }

    /// f_d = M⁻¹(ρ, J, ζ, e^eq, ψ^eq, ε^eq).
    pub fn initial_state(&self, fields: &Macroscopic) -> Result<NsState> {
        let n = self.n();
        if fields.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "initial fields of length {} on a {n}-cell scheme",
                fields.len()
            )));
        }
        let mut state = NsState {
            f: Populations::zeros(n),
            g: Populations::zeros(n),
        };
        for c in 0..n {
            let (rho, j, zeta) = (fields.rho[c], fields.j[c], fields.zeta[c]);
            let eq = ns_equilibria(rho, j, zeta, &self.config.gas, self.config.lambda).map_err(|e| e.at_cell(c))?;
            state.f.set(c, self.fblock.distributions([rho, j, eq.e]));
            state.g.set(c, self.gblock.distributions([zeta, eq.psi, eq.eps]));
        }
        Ok(state)
    }

    pub fn macroscopic(&self, state: &NsState) -> Macroscopic {
        let n = state.len();
        let mut out = Macroscopic::uniform(n, 0.0, 0.0, 0.0);
        for c in 0..n {
            let [rho, j, _] = self.fblock.moments(state.f.get(c));
            let [zeta, _, _] = self.gblock.moments(state.g.get(c));
            out.rho[c] = rho;
            out.j[c] = j;
            out.zeta[c] = zeta;
        }
        out
    }

    /// Entropy production of the most recent step, per cell.
    pub fn last_source(&self) -> &[f64] {
        &self.source
    }

    /// Steps (i)-(viii): moments, equilibria, relaxation, back to particles,
    /// entropy source, streaming.
    pub fn step(&mut self, state: &mut NsState) -> Result<StepReport> {
        let NsConfig {
            gas,
            transport,
            lambda,
            rates,
            source,
            dx,
        } = self.config;
        let dt = self.config.dt();
        let n = self.n();
        if state.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "state of length {} on a {n}-cell scheme",
                state.len()
            )));
        }

        // time-t macroscopic fields for the gradients
        for c in 0..n {
            let [rho, j, _] = self.fblock.moments(state.f.get(c));
            let [zeta, _, _] = self.gblock.moments(state.g.get(c));
            let st = gas.eos(rho, zeta).map_err(|e| e.at_cell(c))?;
            self.rho[c] = rho;
            self.u[c] = j / rho;
            self.temp[c] = st.t;
        }
        if source == SourceTerm::Off {
            self.source.fill(0.0);
        } else {
            entropy_source_into(
                &self.rho,
                &self.u,
                &self.temp,
                dx,
                &gas,
                &transport,
                &mut self.du,
                &mut self.dtemp,
                &mut self.source,
            );
        }
        let (before, after) = match source {
            SourceTerm::Off => (0.0, 0.0),
            SourceTerm::Plain => (0.0, dt),
            SourceTerm::HalfStep => (0.5 * dt, 0.5 * dt),
        };

        let mut report = StepReport {
            source_increment: 0.0,
            min_source: f64::INFINITY,
        };
        for c in 0..n {
            let [rho, j, e] = self.fblock.moments(state.f.get(c));
            let [zeta, psi, eps] = self.gblock.moments(state.g.get(c));
            let s = self.source[c];
            report.source_increment += dt * s;
            report.min_source = report.min_source.min(s);

            let zeta = zeta + before * s;
            let eq = if before == 0.0 {
                let p = gas.r * rho * self.temp[c];
                equilibria_from_state(rho, j, zeta, p, self.temp[c], &gas, lambda)
            } else {
                ns_equilibria(rho, j, zeta, &gas, lambda).map_err(|e| e.at_cell(c))?
            };
            let e_star = e + rates.s_e * (eq.e - e);
            let psi_star = psi + rates.s_psi * (eq.psi - psi);
            let eps_star = eps + rates.s_eps * (eq.eps - eps);
            let zeta_star = zeta + after * s;

            self.post.f.set(c, self.fblock.distributions([rho, j, e_star]));
            self.post
                .g
                .set(c, self.gblock.distributions([zeta_star, psi_star, eps_star]));
        }

        state.f.stream_from(&self.post.f);
        state.g.stream_from(&self.post.g);
        Ok(report)
    }
}

/// One step with a freshly allocated scheme.
pub fn ns_step(state: &NsState, config: NsConfig) -> Result<(NsState, StepReport)> {
    let mut scheme = NsScheme::new(config, state.len())?;
    let mut next = state.clone();
    let report = scheme.step(&mut next)?;
    Ok((next, report))
}
