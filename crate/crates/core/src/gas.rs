//! Polytropic perfect gas in (ρ, ζ = ρs) variables.
//!
//! p = (γ−1)ρi = ρrT = p₀ (ρ/ρ₀)^γ exp(γ(s−s₀)/c_p), with r = c_p(γ−1)/γ.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasModel {
    pub gamma: f64,
    pub cp: f64,
    pub r: f64,
    pub rho0: f64,
    pub p0: f64,
    pub t0: f64,
    pub s0: f64,
}

/// Thermodynamic state of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoState {
    pub p: f64,
    pub t: f64,
    pub c: f64,
    pub i: f64,
    pub s: f64,
}

impl GasModel {
    /// Reference state fixed by its sound speed: p₀ = ρ₀c₀²/γ, T₀ = p₀/(ρ₀r).
    pub fn from_sound_speed(gamma: f64, cp: f64, rho0: f64, c0: f64, s0: f64) -> Result<Self> {
        require_positive("c0", c0)?;
        Self::from_pressure(gamma, cp, rho0, rho0 * c0 * c0 / gamma, s0)
    }

    pub fn from_pressure(gamma: f64, cp: f64, rho0: f64, p0: f64, s0: f64) -> Result<Self> {
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "specific-heat ratio must exceed 1".into(),
            });
        }
        require_positive("cp", cp)?;
        require_positive("rho0", rho0)?;
        require_positive("p0", p0)?;
        if !s0.is_finite() {
            return Err(Error::InvalidParameter {
                name: "s0",
                value: s0,
                reason: "must be finite".into(),
            });
        }
        let r = cp * (gamma - 1.0) / gamma;
        Ok(Self {
            gamma,
            cp,
            r,
            rho0,
            p0,
            t0: p0 / (rho0 * r),
            s0,
        })
    }

    pub fn c0(&self) -> f64 {
        (self.gamma * self.p0 / self.rho0).sqrt()
    }

    pub fn cv(&self) -> f64 {
        self.cp / self.gamma
    }

    /// Isentropic-exponential form of the pressure.
    #[inline]
    pub fn pressure(&self, rho: f64, s: f64) -> f64 {
        self.p0 * (rho / self.rho0).powf(self.gamma) * (self.gamma * (s - self.s0) / self.cp).exp()
    }

    /// Specific entropy of a state given by density and temperature.
    pub fn entropy_from_temperature(&self, rho: f64, t: f64) -> f64 {
        let g = self.gamma;
        self.s0 + self.cp / g * ((t / self.t0).ln() - (g - 1.0) * (rho / self.rho0).ln())
    }

    pub fn internal_energy(&self, rho: f64, p: f64) -> f64 {
        p / ((self.gamma - 1.0) * rho)
    }

    #[inline]
    pub fn eos(&self, rho: f64, zeta: f64) -> Result<ThermoState> {
        if !(rho > 0.0) {
            return Err(Error::positivity(rho));
        }
        let s = zeta / rho;
        let p = self.pressure(rho, s);
        let t = p / (rho * self.r);
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::thermo(format!("temperature {t} from rho = {rho}, s = {s}")));
        }
        Ok(ThermoState {
            p,
            t,
            c: (self.gamma * p / rho).sqrt(),
            i: self.internal_energy(rho, p),
            s,
        })
    }
}
