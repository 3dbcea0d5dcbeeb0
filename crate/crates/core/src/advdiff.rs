//! Scalar advection-diffusion D1Q3 scheme.
//!
//! Moments (ζ, ψ, ε) with ψ^eq = u₀ζ and ε^eq = αλ²ζ. The diffusivity follows
//! from the second-order closure
//!
//! ```text
//! ((2 + α)/3 · λ² − u₀²) · σ_ψ · Δt = κ,   σ_ψ = 1/s_ψ − 1/2
//! ```
//!
//! with −2 < α < 1 required for stability.

use crate::error::{require_positive, require_rate, Error, Result};
use crate::lattice::{D1q3Block, Populations};

pub const DEFAULT_S_EPS: f64 = 1.5;

/// The member of (α, s_ψ) held fixed when solving the κ closure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixedMember {
    Alpha(f64),
    SPsi(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdvDiffParams {
    pub u0: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub s_psi: f64,
    pub s_eps: f64,
    pub lambda: f64,
    pub dt: f64,
}

impl AdvDiffParams {
    pub fn sigma_psi(&self) -> f64 {
        1.0 / self.s_psi - 0.5
    }

    /// κ implied by the current (α, s_ψ).
    pub fn closure_kappa(&self) -> f64 {
        closure_kappa(self.u0, self.alpha, self.sigma_psi(), self.lambda, self.dt)
    }

    pub fn with_s_eps(mut self, s_eps: f64) -> Result<Self> {
        require_rate("s_eps", s_eps)?;
        self.s_eps = s_eps;
        Ok(self)
    }
}

fn closure_kappa(u0: f64, alpha: f64, sigma_psi: f64, lambda: f64, dt: f64) -> f64 {
    ((2.0 + alpha) / 3.0 * lambda * lambda - u0 * u0) * sigma_psi * dt
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > -2.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::ClosureInfeasible(format!("alpha={alpha} outside (-2,1)")))
    }
}

pub fn resolve_advdiff_params(u0: f64, kappa: f64, lambda: f64, dt: f64, fixed: FixedMember) -> Result<AdvDiffParams> {
    require_positive("kappa", kappa)?;
    require_positive("lambda", lambda)?;
    require_positive("dt", dt)?;
    let (alpha, s_psi) = match fixed {
        FixedMember::Alpha(alpha) => {
            check_alpha(alpha)?;
            let a = (2.0 + alpha) / 3.0 * lambda * lambda - u0 * u0;
            if a <= 0.0 {
                return Err(Error::ClosureInfeasible(format!(
                    "(2+alpha)/3*lambda^2 - u0^2 = {a} <= 0 leaves no positive kappa"
                )));
            }
            let sigma = kappa / (a * dt);
            (alpha, 1.0 / (sigma + 0.5))
        }
        FixedMember::SPsi(s_psi) => {
            require_rate("s_psi", s_psi)?;
            let sigma = 1.0 / s_psi - 0.5;
            let alpha = 3.0 * (kappa / (sigma * dt) + u0 * u0) / (lambda * lambda) - 2.0;
            check_alpha(alpha)?;
            (alpha, s_psi)
        }
    };
    Ok(AdvDiffParams {
        u0,
        kappa,
        alpha,
        s_psi,
        s_eps: DEFAULT_S_EPS,
        lambda,
        dt,
    })
}

/// (ψ^eq, ε^eq) = (u₀ζ, αλ²ζ)
#[inline]
pub fn advdiff_equilibria(zeta: f64, u0: f64, alpha: f64, lambda: f64) -> (f64, f64) {
    (u0 * zeta, alpha * lambda * lambda * zeta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdvDiffField {
    pub g: Populations,
    pub zeta0: f64,
}

impl AdvDiffField {
    pub fn zeta(&self, block: &D1q3Block) -> Vec<f64> {
        self.g.moments(block).iter().map(|m| m[0]).collect()
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct AdvDiffScheme {
    params: AdvDiffParams,
    block: D1q3Block,
    post: Populations,
}

impl AdvDiffScheme {
    /// `zeta0` is the moment scale: 1 standalone, ρ₀c_p inside the coupled scheme.
    pub fn new(params: AdvDiffParams, zeta0: f64, n: usize) -> Result<Self> {
        require_rate("s_psi", params.s_psi)?;
        require_rate("s_eps", params.s_eps)?;
        check_alpha(params.alpha)?;
        Ok(Self {
            block: D1q3Block::new(zeta0, params.lambda)?,
            params,
            post: Populations::zeros(n),
        })
    }

    pub fn params(&self) -> &AdvDiffParams {
        &self.params
    }

    pub fn block(&self) -> &D1q3Block {
        &self.block
    }

    pub fn initial_field(&self, zeta: &[f64]) -> AdvDiffField {
        let p = &self.params;
        let g = Populations::from_moments(
            &self.block,
            zeta.iter().map(|&z| {
                let (psi, eps) = advdiff_equilibria(z, p.u0, p.alpha, p.lambda);
                [z, psi, eps]
            }),
            zeta.len(),
        );
        AdvDiffField {
            g,
            zeta0: self.block.scale(),
        }
    }

    pub fn step(&mut self, field: &mut AdvDiffField) {
        let p = self.params;
        if self.post.len() != field.len() {
            self.post = Populations::zeros(field.len());
        }
        for c in 0..field.len() {
            let [zeta, psi, eps] = self.block.moments(field.g.get(c));
            let (psi_eq, eps_eq) = advdiff_equilibria(zeta, p.u0, p.alpha, p.lambda);
            let psi_star = psi + p.s_psi * (psi_eq - psi);
            let eps_star = eps + p.s_eps * (eps_eq - eps);
            self.post.set(c, self.block.distributions([zeta, psi_star, eps_star]));
        }
        field.g.stream_from(&self.post);
    }
}

/// One step with a fresh buffer.
pub fn advdiff_step(field: &AdvDiffField, params: AdvDiffParams) -> Result<AdvDiffField> {
    let mut scheme = AdvDiffScheme::new(params, field.zeta0, field.len())?;
    let mut next = field.clone();
    scheme.step(&mut next);
    Ok(next)
}
