//! Explicit finite-difference solver of
//!
//! ```text
//! ∂ₜρ + ∂ₓJ = 0
//! ∂ₜJ + ∂ₓ(ρu² + p) − ∂ₓ(ρν ∂ₓu) = 0
//! ∂ₜζ + ∂ₓ(ζu) − ∂ₓ((κ/T) ∂ₓT) = (ρν/T)(∂ₓu)² + (κ/T²)(∂ₓT)²
//! ```
//!
//! Centred conservative fluxes, face-averaged diffusion coefficients,
//! forward Euler in time.

use crate::error::{Error, Result};
use crate::fields::Macroscopic;
use crate::gas::GasModel;
use crate::ns::{centered_gradients_into, TransportModel};

pub const DEFAULT_CFL: f64 = 0.4;

/// Time derivatives (∂ₜρ, ∂ₜJ, ∂ₜζ) stored in a `Macroscopic`.
pub fn fd_rhs(fields: &Macroscopic, gas: &GasModel, transport: &TransportModel) -> Result<Macroscopic> {
    let mut ws = Workspace::new(fields.len());
    let mut out = Macroscopic::uniform(fields.len(), 0.0, 0.0, 0.0);
    ws.rhs(fields, gas, transport, &mut out)?;
    Ok(out)
}

/// Stable step for the current state.
pub fn fd_stable_dt(fields: &Macroscopic, gas: &GasModel, transport: &TransportModel, cfl: f64) -> Result<f64> {
    let dx = fields.dx();
    let mut vmax: f64 = 0.0;
    for c in 0..fields.len() {
        let st = gas.eos(fields.rho[c], fields.zeta[c]).map_err(|e| e.at_cell(c))?;
        vmax = vmax.max((fields.j[c] / fields.rho[c]).abs() + st.c);
    }
    let diff = transport.nu.max(gas.gamma * transport.nu / transport.prandtl);
    let mut dt = dx / vmax;
    if diff > 0.0 {
        dt = dt.min(dx * dx / (2.0 * diff));
    }
    Ok(cfl * dt)
}

struct Workspace {
    u: Vec<f64>,
    p: Vec<f64>,
    t: Vec<f64>,
    du: Vec<f64>,
    dt: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            u: vec![0.0; n],
            p: vec![0.0; n],
            t: vec![0.0; n],
            du: vec![0.0; n],
            dt: vec![0.0; n],
        }
    }

    fn rhs(&mut self, f: &Macroscopic, gas: &GasModel, tr: &TransportModel, out: &mut Macroscopic) -> Result<()> {
        let n = f.len();
        if n < 3 {
            return Err(Error::DimensionMismatch(format!("grid of {n} cells, need at least 3")));
        }
        let dx = f.dx();
        for c in 0..n {
            let st = gas.eos(f.rho[c], f.zeta[c]).map_err(|e| e.at_cell(c))?;
            self.u[c] = f.j[c] / f.rho[c];
            self.p[c] = st.p;
            self.t[c] = st.t;
        }
        centered_gradients_into(&self.u, dx, &mut self.du);
        centered_gradients_into(&self.t, dx, &mut self.dt);

        let inv2 = 0.5 / dx;
        let inv_sq = 1.0 / (dx * dx);
        let mu = |c: usize| f.rho[c] * tr.nu;
        let kt = |c: usize| tr.kappa(f.rho[c], gas.cp) / self.t[c];
        for c in 0..n {
            let (l, r) = ((c + n - 1) % n, (c + 1) % n);
            let mom = |k: usize| f.j[k] * self.u[k] + self.p[k];
            let visc =
                0.5 * (mu(c) + mu(r)) * (self.u[r] - self.u[c]) - 0.5 * (mu(l) + mu(c)) * (self.u[c] - self.u[l]);
            let cond =
                0.5 * (kt(c) + kt(r)) * (self.t[r] - self.t[c]) - 0.5 * (kt(l) + kt(c)) * (self.t[c] - self.t[l]);
            let kappa = tr.kappa(f.rho[c], gas.cp);
            let source =
                f.rho[c] * tr.nu / self.t[c] * self.du[c].powi(2) + kappa / self.t[c].powi(2) * self.dt[c].powi(2);

            out.rho[c] = -(f.j[r] - f.j[l]) * inv2;
            out.j[c] = -(mom(r) - mom(l)) * inv2 + visc * inv_sq;
            out.zeta[c] = -(f.zeta[r] * self.u[r] - f.zeta[l] * self.u[l]) * inv2 + cond * inv_sq + source;
        }
        Ok(())
    }
}

/// Snapshot of the solver state.
#[derive(Debug, Clone, PartialEq)]
pub struct FdState {
    pub t: f64,
    pub step: usize,
    pub fields: Macroscopic,
}

#[derive(Debug, Clone)]
pub struct FdTrajectory {
    /// One entry per requested sample time, in increasing order.
    pub snapshots: Vec<FdState>,
    pub steps: usize,
}

impl FdTrajectory {
    pub fn last(&self) -> &FdState {
        self.snapshots
            .last()
            .expect("trajectory holds at least the final state")
    }
}

/// Integrates to `t_final`, landing exactly on each sample time; the final
/// state is always included.
pub fn fd_run(
    initial: &Macroscopic,
    gas: &GasModel,
    transport: &TransportModel,
    t_final: f64,
    cfl: f64,
    sample_times: &[f64],
) -> Result<FdTrajectory> {
    fd_run_observed(initial, gas, transport, t_final, cfl, sample_times, |_, _, _| Ok(()))
}

/// As [`fd_run`], calling `on_step(step, t, fields)` after every step.
pub fn fd_run_observed<F>(
    initial: &Macroscopic,
    gas: &GasModel,
    transport: &TransportModel,
    t_final: f64,
    cfl: f64,
    sample_times: &[f64],
    mut on_step: F,
) -> Result<FdTrajectory>
where
    F: FnMut(usize, f64, &Macroscopic) -> Result<()>,
{
    if !(cfl > 0.0 && cfl < 1.0) {
        return Err(Error::InvalidParameter {
            name: "cfl",
            value: cfl,
            reason: "must lie in (0, 1)".into(),
        });
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t_final",
            value: t_final,
            reason: "must be finite and >= 0".into(),
        });
    }
    let mut targets: Vec<f64> = sample_times
        .iter()
        .copied()
        .filter(|&t| t >= 0.0 && t < t_final)
        .collect();
    targets.push(t_final);
    targets.sort_by(f64::total_cmp);
    targets.dedup();

    let n = initial.len();
    let mut ws = Workspace::new(n);
    let mut state = initial.clone();
    let mut rate = Macroscopic::uniform(n, 0.0, 0.0, 0.0);
    let mut t = 0.0;
    let mut step = 0;
    let mut snapshots = Vec::with_capacity(targets.len());
    for &target in &targets {
        while t < target {
            let stable = fd_stable_dt(&state, gas, transport, cfl).map_err(|e| e.at_step(step, t))?;
            let mut dt = stable;
            // land on the target without leaving a sliver step
            if t + dt >= target || target - (t + dt) < 1e-12 * target.max(1.0) {
                dt = target - t;
            }
            ws.rhs(&state, gas, transport, &mut rate)
                .map_err(|e| e.at_step(step, t))?;
            for c in 0..n {
                state.rho[c] += dt * rate.rho[c];
                state.j[c] += dt * rate.j[c];
                state.zeta[c] += dt * rate.zeta[c];
            }
            step += 1;
            t = if dt == target - t { target } else { t + dt };
            on_step(step, t, &state)?;
        }
        snapshots.push(FdState {
            t,
            step,
            fields: state.clone(),
        });
    }
    Ok(FdTrajectory { snapshots, steps: step })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{acoustic_wave, diagnostics};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn gas() -> GasModel {
        GasModel::from_sound_speed(1.4, 1.0, 1.0, 0.5, 0.0).unwrap()
    }

    fn transport() -> TransportModel {
        TransportModel::new(6.579e-4, 1.0).unwrap()
    }

    #[test]
    fn uniform_state_is_steady() {
        let g = gas();
        let f = Macroscopic::uniform(16, 1.0, 0.1, 0.05);
        let r = fd_rhs(&f, &g, &transport()).unwrap();
        for v in r.rho.iter().chain(&r.j).chain(&r.zeta) {
            assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-15);
        }
        let traj = fd_run(&f, &g, &transport(), 0.5, 0.4, &[0.25]).unwrap();
        assert_eq!(traj.snapshots.len(), 2);
        assert_eq!(traj.snapshots[0].t, 0.25);
        assert_eq!(traj.last().t, 0.5);
        for c in 0..16 {
            assert_abs_diff_eq!(traj.last().fields.j[c], 0.1, epsilon = 1e-14);
        }
    }

    #[test]
    fn manufactured_mass_equation() {
        // u = 0, J = 0 ⇒ ∂ₜρ = 0 exactly; J = ε sin 2πx ⇒ ∂ₜρ = −2πε cos 2πx + O(Δx²)
        let g = gas();
        let eps = 1e-2;
        let mut errs = Vec::new();
        for n in [40, 80, 160] {
            let mut f = Macroscopic::uniform(n, 1.0, 0.0, 0.0);
            for c in 0..n {
                let x = c as f64 / n as f64;
                f.rho[c] = 1.0 + eps * (2.0 * PI * x).sin();
            }
            assert!(fd_rhs(&f, &g, &transport()).unwrap().rho.iter().all(|&v| v == 0.0));
            for c in 0..n {
                f.j[c] = eps * (2.0 * PI * c as f64 / n as f64).sin();
            }
            let r = fd_rhs(&f, &g, &transport()).unwrap();
            let err = (0..n)
                .map(|c| (r.rho[c] + 2.0 * PI * eps * (2.0 * PI * c as f64 / n as f64).cos()).abs())
                .fold(0.0, f64::max);
            errs.push(err);
        }
        let order = (errs[1] / errs[2]).log2();
        assert!((order - 2.0).abs() < 0.05, "{errs:?}");
    }

    #[test]
    fn inviscid_limit_has_no_source() {
        let g = gas();
        let f = acoustic_wave(32, &g, 0.05);
        let tr = TransportModel::new(0.0, 1.0).unwrap();
        let r = fd_rhs(&f, &g, &tr).unwrap();
        // zeta = 0 everywhere, so the entropy rate is the (vanishing) source alone
        assert!(r.zeta.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn flux_form_conserves_mass_and_momentum() {
        let g = gas();
        let f = acoustic_wave(64, &g, 0.05);
        let traj = fd_run(&f, &g, &transport(), 0.2, 0.4, &[]).unwrap();
        let (a, b) = (
            diagnostics(&f, &g).unwrap(),
            diagnostics(&traj.last().fields, &g).unwrap(),
        );
        assert!(((a.mass - b.mass) / a.mass).abs() < 1e-13);
        assert_abs_diff_eq!(a.momentum, b.momentum, epsilon = 1e-14);
        assert!(b.entropy >= a.entropy);
    }

    #[test]
    fn rejects_bad_cfl_and_reports_failure_time() {
        let g = gas();
        let f = Macroscopic::uniform(8, 1.0, 0.0, 0.0);
        assert!(fd_run(&f, &g, &transport(), 1.0, 1.0, &[]).is_err());
        let mut bad = f.clone();
        bad.rho[2] = -1.0;
        let err = fd_run(&bad, &g, &transport(), 1.0, 0.4, &[]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("t = 0") && msg.contains("cell 2"), "{msg}");
    }
}
