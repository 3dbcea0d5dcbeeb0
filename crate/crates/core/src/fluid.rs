//! Isentropic D1Q3 fluid scheme: relax the energy moment, keep (ρ, J), stream.

use crate::error::{require_positive, require_rate, Error, Result};
use crate::gas::GasModel;
use crate::lattice::{D1q3Block, Populations};

/// e^eq = 3(ρu² + p) − 2λ²ρ with u = J/ρ.
#[inline]
pub fn fluid_equilibrium_energy(rho: f64, j: f64, p: f64, lambda: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::positivity(rho));
    }
    Ok(3.0 * (j * j / rho + p) - 2.0 * lambda * lambda * rho)
}

/// Equilibrium energy as a function of the conserved moments.
pub trait FluidEquilibrium {
    fn energy(&self, rho: f64, j: f64) -> Result<f64>;
}

/// Navier-Stokes closure with the pressure taken along the isentrope s = s₀.
#[derive(Debug, Clone, Copy)]
pub struct IsentropicClosure {
    pub gas: GasModel,
    pub lambda: f64,
}

impl FluidEquilibrium for IsentropicClosure {
    #[inline]
    fn energy(&self, rho: f64, j: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::positivity(rho));
        }
        let p = self.gas.pressure(rho, self.gas.s0);
        fluid_equilibrium_energy(rho, j, p, self.lambda)
    }
}

impl<F: Fn(f64, f64) -> f64> FluidEquilibrium for F {
    fn energy(&self, rho: f64, j: f64) -> Result<f64> {
        Ok(self(rho, j))
    }
}

/// Particle densities (f₀, f₊, f₋) over the periodic grid, per unit ρ₀.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidField {
    pub f: Populations,
}

impl FluidField {
    /// Distributions at equilibrium for the given macroscopic fields.
    pub fn at_equilibrium(block: &D1q3Block, eq: &impl FluidEquilibrium, rho: &[f64], j: &[f64]) -> Result<Self> {
        if rho.len() != j.len() || rho.len() < 4 {
            return Err(Error::DimensionMismatch(format!(
                "fluid grid needs N >= 4 matching fields, got rho {} / J {}",
                rho.len(),
                j.len()
            )));
        }
        let mut f = Populations::zeros(rho.len());
        for c in 0..rho.len() {
            let e = eq.energy(rho[c], j[c]).map_err(|e| e.at_cell(c))?;
            f.set(c, block.distributions([rho[c], j[c], e]));
        }
        Ok(Self { f })
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// (ρ, J, e) per cell.
    pub fn moments(&self, block: &D1q3Block) -> Vec<[f64; 3]> {
        self.f.moments(block)
    }

    pub fn density(&self, block: &D1q3Block) -> Vec<f64> {
        self.moments(block).iter().map(|m| m[0]).collect()
    }

    pub fn momentum(&self, block: &D1q3Block) -> Vec<f64> {
        self.moments(block).iter().map(|m| m[1]).collect()
    }
}

/// Relaxation: ρ* = ρ, J* = J, e* = e + s_e(e^eq − e), f* = M⁻¹m*.
pub fn fluid_collide(
    field: &FluidField,
    block: &D1q3Block,
    eq: &impl FluidEquilibrium,
    s_e: f64,
) -> Result<FluidField> {
    require_rate("s_e", s_e)?;
    let mut post = field.clone();
    collide_into(&field.f, &mut post.f, block, eq, s_e)?;
    Ok(post)
}

#[inline]
fn collide_into(
    src: &Populations,
    dst: &mut Populations,
    block: &D1q3Block,
    eq: &impl FluidEquilibrium,
    s_e: f64,
) -> Result<()> {
    for c in 0..src.len() {
        let [rho, j, e] = block.moments(src.get(c));
        let e_eq = eq.energy(rho, j).map_err(|err| err.at_cell(c))?;
        let e_star = e + s_e * (e_eq - e);
        dst.set(c, block.distributions([rho, j, e_star]));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidConfig {
    pub rho0: f64,
    pub lambda: f64,
    pub dx: f64,
    pub s_e: f64,
}

impl FluidConfig {
    pub fn dt(&self) -> f64 {
        self.dx / self.lambda
    }

    /// ν = σ_e λ Δx
    pub fn viscosity(&self) -> f64 {
        (1.0 / self.s_e - 0.5) * self.lambda * self.dx
    }
}

/// Time stepper owning the post-collision buffer.
#[derive(Debug, Clone)]
pub struct FluidScheme<E> {
    config: FluidConfig,
    block: D1q3Block,
    closure: E,
    post: Populations,
}

impl<E: FluidEquilibrium> FluidScheme<E> {
    pub fn new(config: FluidConfig, closure: E, n: usize) -> Result<Self> {
        require_rate("s_e", config.s_e)?;
        require_positive("dx", config.dx)?;
        Ok(Self {
            block: D1q3Block::new(config.rho0, config.lambda)?,
            config,
            closure,
            post: Populations::zeros(n),
        })
    }

    pub fn block(&self) -> &D1q3Block {
        &self.block
    }

    pub fn config(&self) -> &FluidConfig {
        &self.config
    }

    pub fn closure(&self) -> &E {
        &self.closure
    }

    pub fn initial_field(&self, rho: &[f64], j: &[f64]) -> Result<FluidField> {
        FluidField::at_equilibrium(&self.block, &self.closure, rho, j)
    }

    /// One collide-then-stream step.
    pub fn step(&mut self, field: &mut FluidField) -> Result<()> {
        if self.post.len() != field.len() {
            self.post = Populations::zeros(field.len());
        }
        collide_into(&field.f, &mut self.post, &self.block, &self.closure, self.config.s_e)?;
        field.f.stream_from(&self.post);
        Ok(())
    }
}

/// Convenience wrapper for a single step with a fresh buffer.
pub fn fluid_step<E: FluidEquilibrium + Clone>(
    field: &FluidField,
    config: FluidConfig,
    closure: &E,
) -> Result<FluidField> {
    let mut scheme = FluidScheme::new(config, closure.clone(), field.len())?;
    let mut next = field.clone();
    scheme.step(&mut next)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn gas() -> GasModel {
        GasModel::from_sound_speed(1.4, 1.0, 1.0, 0.5, 0.0).unwrap()
    }

    fn config(n: usize) -> FluidConfig {
        FluidConfig {
            rho0: 1.0,
            lambda: 1.0,
            dx: 1.0 / n as f64,
            s_e: 1.9,
        }
    }

    #[test]
    fn equilibrium_energy_values() {
        assert_abs_diff_eq!(fluid_equilibrium_energy(1.0, 0.0, 0.0, 1.0).unwrap(), -2.0);
        assert_abs_diff_eq!(fluid_equilibrium_energy(1.0, 1.0, 0.0, 1.0).unwrap(), 1.0);
        let p0 = 0.25 / 1.4;
        // 3p₀ − 2 evaluated independently
        assert_abs_diff_eq!(
            fluid_equilibrium_energy(1.0, 0.0, p0, 1.0).unwrap(),
            -1.464_285_714_285_714,
            epsilon = 1e-14
        );
        assert!(fluid_equilibrium_energy(0.0, 0.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn equilibrium_is_a_fixed_point_of_collision() {
        let closure = IsentropicClosure {
            gas: gas(),
            lambda: 1.0,
        };
        let block = D1q3Block::new(1.0, 1.0).unwrap();
        let rho: Vec<f64> = (0..8).map(|i| 1.0 + 0.01 * i as f64).collect();
        let j: Vec<f64> = (0..8).map(|i| 0.002 * i as f64).collect();
        let field = FluidField::at_equilibrium(&block, &closure, &rho, &j).unwrap();
        let post = fluid_collide(&field, &block, &closure, 1.3).unwrap();
        for c in 0..8 {
            for (a, b) in field.f.get(c).iter().zip(post.f.get(c)) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn full_relaxation_reaches_equilibrium() {
        let closure = IsentropicClosure {
            gas: gas(),
            lambda: 1.0,
        };
        let block = D1q3Block::new(1.0, 1.0).unwrap();
        let mut field = FluidField {
            f: Populations::zeros(5),
        };
        for c in 0..5 {
            field.f.set(c, [0.5 + 0.01 * c as f64, 0.3, 0.25 - 0.02 * c as f64]);
        }
        let post = fluid_collide(&field, &block, &closure, 1.0).unwrap();
        for m in post.moments(&block) {
            assert_abs_diff_eq!(m[2], closure.energy(m[0], m[1]).unwrap(), epsilon = 1e-14);
        }
    }

    #[test]
    fn collision_conserves_mass_and_momentum() {
        let closure = IsentropicClosure {
            gas: gas(),
            lambda: 1.0,
        };
        let block = D1q3Block::new(1.0, 1.0).unwrap();
        let mut field = FluidField {
            f: Populations::zeros(16),
        };
        // deterministic pseudo-random state
        let mut x = 0.123_456_f64;
        for c in 0..16 {
            let mut next = || {
                x = (x * 9301.0 + 0.49297).fract();
                x
            };
            field
                .f
                .set(c, [0.2 + 0.5 * next(), 0.1 + 0.4 * next(), 0.1 + 0.4 * next()]);
        }
        let post = fluid_collide(&field, &block, &closure, 1.7).unwrap();
        for (a, b) in field.moments(&block).iter().zip(post.moments(&block)) {
            assert_abs_diff_eq!(a[0], b[0], epsilon = 1e-13);
            assert_abs_diff_eq!(a[1], b[1], epsilon = 1e-13);
        }
    }

    #[test]
    fn rejects_rate_outside_domain() {
        let closure = IsentropicClosure {
            gas: gas(),
            lambda: 1.0,
        };
        let block = D1q3Block::new(1.0, 1.0).unwrap();
        let field = FluidField {
            f: Populations::zeros(4),
        };
        assert!(matches!(
            fluid_collide(&field, &block, &closure, 2.0),
            Err(Error::StabilityDomain { .. })
        ));
    }

    #[test]
    fn uniform_state_is_stationary() {
        let closure = IsentropicClosure {
            gas: gas(),
            lambda: 1.0,
        };
        let n = 10;
        let mut scheme = FluidScheme::new(config(n), closure, n).unwrap();
        let mut field = scheme.initial_field(&vec![1.0; n], &vec![0.0; n]).unwrap();
        let start = field.clone();
        for _ in 0..100 {
            scheme.step(&mut field).unwrap();
        }
        for c in 0..n {
            for (a, b) in start.f.get(c).iter().zip(field.f.get(c)) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn mass_drift_over_many_steps() {
        let closure = IsentropicClosure {
            gas: gas(),
            lambda: 1.0,
        };
        let n = 40;
        let mut scheme = FluidScheme::new(config(n), closure, n).unwrap();
        let rho: Vec<f64> = (0..n)
            .map(|i| 1.0 + 1e-3 * (2.0 * PI * i as f64 / n as f64).sin())
            .collect();
        let mut field = scheme.initial_field(&rho, &vec![0.0; n]).unwrap();
        let block = *scheme.block();
        let m0: f64 = field.density(&block).iter().sum();
        for _ in 0..10_000 {
            scheme.step(&mut field).unwrap();
        }
        let m1: f64 = field.density(&block).iter().sum();
        assert!(((m1 - m0) / m0).abs() <= 1e-12);
    }

    #[test]
    fn closure_accepts_plain_functions() {
        let eq = |rho: f64, _j: f64| -rho;
        assert_eq!(eq.energy(2.0, 0.0).unwrap(), -2.0);
    }
}
