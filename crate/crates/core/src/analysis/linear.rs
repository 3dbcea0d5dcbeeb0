//! Linear equilibria around a reference state W₀ = (ρ₀, ρ₀u₀, ρ₀s₀).

use crate::error::{require_positive, Error, Result};
use crate::gas::GasModel;

/// Base state of the linearisation. The sound speed is that of the gas at
/// (ρ₀, s₀), so the gas must be built with the same s₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceState {
    pub rho0: f64,
    pub u0: f64,
    pub s0: f64,
    pub c0: f64,
}

impl ReferenceState {
    pub fn from_gas(gas: &GasModel, u0: f64, lambda: f64) -> Result<Self> {
        require_positive("lambda", lambda)?;
        if !(u0.abs() < lambda) {
            return Err(Error::InvalidParameter {
                name: "u0",
                value: u0,
                reason: format!("|u0| must stay below lambda = {lambda}"),
            });
        }
        Ok(Self {
            rho0: gas.rho0,
            u0,
            s0: gas.s0,
            c0: gas.c0(),
        })
    }

    /// (ρ₀, ρ₀u₀, ρ₀s₀)
    pub fn conserved(&self) -> [f64; 3] {
        [self.rho0, self.rho0 * self.u0, self.rho0 * self.s0]
    }
}

/// Rows give e^eq, ψ^eq and ε^eq as linear forms in (ρ, J, ζ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearEquilibria {
    pub e: [f64; 3],
    pub psi: [f64; 3],
    pub eps: [f64; 3],
}

impl LinearEquilibria {
    pub fn rows(&self) -> [[f64; 3]; 3] {
        [self.e, self.psi, self.eps]
    }

    pub fn from_rows([e, psi, eps]: [[f64; 3]; 3]) -> Self {
        Self { e, psi, eps }
    }

    pub fn evaluate(&self, w: [f64; 3]) -> [f64; 3] {
        let dot = |r: &[f64; 3]| r[0] * w[0] + r[1] * w[1] + r[2] * w[2];
        [dot(&self.e), dot(&self.psi), dot(&self.eps)]
    }

    /// Largest |a − b| / (|b| + 1) over the nine coefficients.
    pub fn max_gap(&self, other: &LinearEquilibria) -> f64 {
        let (a, b) = (self.rows(), other.rows());
        let mut gap: f64 = 0.0;
        for r in 0..3 {
            for c in 0..3 {
                gap = gap.max((a[r][c] - b[r][c]).abs() / (b[r][c].abs() + 1.0));
            }
        }
        gap
    }
}

/// The published linear forms, taken literally. The constants of the ε row
/// carry no λ or c_p factors, so they read as lattice units with λ = c_p = 1.
pub fn linearized_equilibria(r: &ReferenceState, gas: &GasModel, lambda: f64) -> LinearEquilibria {
    let (u0, s0, c0, cp, g) = (r.u0, r.s0, r.c0, gas.cp, gas.gamma);
    let l2 = lambda * lambda;
    LinearEquilibria {
        e: [
            3.0 * (1.0 - s0 / cp) * c0 * c0 - 3.0 * u0 * u0 - 2.0 * l2,
            6.0 * u0,
            3.0 * u0 * u0 / cp,
        ],
        psi: [-u0 * s0, s0, u0],
        eps: [
            -3.0 * (s0 * c0).powi(2) - 6.0 * s0 * u0 * u0 + 3.0 * s0 * c0 * c0 + 2.0 - 2.0 * s0 - 2.0 / g,
            6.0 * u0 * s0,
            3.0 * (cp * u0 * u0 + s0 * c0 * c0),
        ],
    }
}

/// Forms matching the linearised momentum flux (2/3)λ²ρ + (1/3)e^eq =
/// (c₀² − u₀² − s₀c₀²/c_p)ρ + 2u₀J + (c₀²/c_p)ζ, with the λ² and c_p factors
/// of the ε row written out.
pub fn compatible_equilibria(r: &ReferenceState, gas: &GasModel, lambda: f64) -> LinearEquilibria {
    let (u0, s0, c0, cp, g) = (r.u0, r.s0, r.c0, gas.cp, gas.gamma);
    let l2 = lambda * lambda;
    let c2 = c0 * c0;
    LinearEquilibria {
        e: [
            3.0 * (1.0 - s0 / cp) * c2 - 3.0 * u0 * u0 - 2.0 * l2,
            6.0 * u0,
            3.0 * c2 / cp,
        ],
        psi: [-u0 * s0, s0, u0],
        eps: [
            2.0 * l2 * (1.0 - 1.0 / g) * cp - 2.0 * l2 * s0 + 3.0 * s0 * c2
                - 6.0 * s0 * u0 * u0
                - 3.0 * s0 * s0 * c2 / cp,
            6.0 * u0 * s0,
            3.0 * (u0 * u0 + s0 * c2 / cp),
        ],
    }
}

/// Exact Jacobian of the nonlinear equilibria at the reference state.
pub fn jacobian_equilibria(r: &ReferenceState, gas: &GasModel, lambda: f64) -> LinearEquilibria {
    let (u, s, c, cp, g) = (r.u0, r.s0, r.c0, gas.cp, gas.gamma);
    let l2 = lambda * lambda;
    let c2 = c * c;
    let e_rho = 3.0 * c2 * (1.0 - s / cp) - 3.0 * u * u - 2.0 * l2;
    let e_j = 6.0 * u;
    let e_zeta = 3.0 * c2 / cp;
    // e^eq/ρ at the reference state
    let e_per_rho = 3.0 * u * u + 3.0 * c2 / g - 2.0 * l2;
    LinearEquilibria {
        e: [e_rho, e_j, e_zeta],
        psi: [-u * s, s, u],
        eps: [
            2.0 * cp * l2 * (1.0 - s / cp) - 2.0 * cp * l2 / g + s * e_rho - s * e_per_rho,
            s * e_j,
            2.0 * l2 + s * e_zeta + e_per_rho,
        ],
    }
}

/// Outcome of checking the published forms against a Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriaReconciliation {
    pub verbatim: LinearEquilibria,
    pub jacobian: LinearEquilibria,
    pub tolerance: f64,
    /// Coefficients failing |a − b| ≤ tol (|b| + 1), as (moment, variable, verbatim, jacobian).
    pub mismatches: Vec<(&'static str, &'static str, f64, f64)>,
}

impl EquilibriaReconciliation {
    pub fn consistent(&self) -> bool {
        self.mismatches.is_empty()
    }

    /// The forms to use downstream: the Jacobian whenever the check fails.
    pub fn resolved(&self) -> LinearEquilibria {
        if self.consistent() {
            self.verbatim
        } else {
            self.jacobian
        }
    }

    pub fn report(&self) -> String {
        if self.consistent() {
            return format!("linear equilibria consistent with the Jacobian to {:e}", self.tolerance);
        }
        let mut out = format!(
            "{} coefficient(s) differ from the Jacobian beyond {:e}:",
            self.mismatches.len(),
            self.tolerance
        );
        for (m, v, a, b) in &self.mismatches {
            out.push_str(&format!("\n  d{m}/d{v}: published {a:.12e}, jacobian {b:.12e}"));
        }
        out
    }
}

pub fn reconcile_equilibria(
    verbatim: LinearEquilibria,
    jacobian: LinearEquilibria,
    tolerance: f64,
) -> EquilibriaReconciliation {
    const MOMENTS: [&str; 3] = ["e", "psi", "eps"];
    const VARS: [&str; 3] = ["rho", "J", "zeta"];
    let (a, b) = (verbatim.rows(), jacobian.rows());
    let mut mismatches = Vec::new();
    for r in 0..3 {
        for c in 0..3 {
            if (a[r][c] - b[r][c]).abs() > tolerance * (b[r][c].abs() + 1.0) {
                mismatches.push((MOMENTS[r], VARS[c], a[r][c], b[r][c]));
            }
        }
    }
    EquilibriaReconciliation {
        verbatim,
        jacobian,
        tolerance,
        mismatches,
    }
}

/// α implied by κ = γν/Pr and the closure of the scalar scheme:
/// α = 3(γσ_e/(Pr σ_ψ) − 2/3 + u₀²/λ²).
pub fn implied_alpha(gamma: f64, prandtl: f64, sigma_e: f64, sigma_psi: f64, u0: f64, lambda: f64) -> f64 {
    3.0 * (gamma / prandtl * sigma_e / sigma_psi - 2.0 / 3.0 + u0 * u0 / (lambda * lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ns::ns_equilibria;
    use approx::assert_abs_diff_eq;

    fn gas(s0: f64) -> GasModel {
        GasModel::from_sound_speed(1.4, 1.0, 1.0, 0.5, s0).unwrap()
    }

    /// Central-difference Jacobian of the nonlinear equilibria.
    fn fd_jacobian(g: &GasModel, w0: [f64; 3]) -> [[f64; 3]; 3] {
        let mut jac = [[0.0; 3]; 3];
        for k in 0..3 {
            let h = 1e-5 * (1.0 + w0[k].abs());
            let (mut wp, mut wm) = (w0, w0);
            wp[k] += h;
            wm[k] -= h;
            let p = ns_equilibria(wp[0], wp[1], wp[2], g, 1.0).unwrap();
            let m = ns_equilibria(wm[0], wm[1], wm[2], g, 1.0).unwrap();
            jac[0][k] = (p.e - m.e) / (2.0 * h);
            jac[1][k] = (p.psi - m.psi) / (2.0 * h);
            jac[2][k] = (p.eps - m.eps) / (2.0 * h);
        }
        jac
    }

    #[test]
    fn published_forms_at_rest() {
        let g = gas(0.0);
        let r = ReferenceState::from_gas(&g, 0.0, 1.0).unwrap();
        let lin = linearized_equilibria(&r, &g, 1.0);
        // (3c₀² − 2λ²), 0, (2 − 2/γ)
        assert_abs_diff_eq!(lin.e[0], 3.0 * 0.25 - 2.0, epsilon = 1e-15);
        assert_eq!(&lin.e[1..], &[0.0, 0.0]);
        assert_eq!(lin.psi, [0.0; 3]);
        assert_abs_diff_eq!(lin.eps[0], 2.0 - 2.0 / 1.4, epsilon = 1e-15);
        assert_eq!(&lin.eps[1..], &[0.0, 0.0]);
    }

    #[test]
    fn moving_reference_gives_finite_forms() {
        let g = gas(0.2);
        let r = ReferenceState::from_gas(&g, 0.15, 1.0).unwrap();
        for row in linearized_equilibria(&r, &g, 1.0).rows() {
            assert!(row.iter().all(|v| v.is_finite()));
        }
        assert!(ReferenceState::from_gas(&g, 1.0, 1.0).is_err());
    }

    #[test]
    fn analytic_jacobian_matches_finite_differences() {
        for (u0, s0) in [(0.0, 0.0), (0.15, 0.2), (-0.3, -0.4)] {
            let g = gas(s0);
            let r = ReferenceState::from_gas(&g, u0, 1.0).unwrap();
            let exact = jacobian_equilibria(&r, &g, 1.0);
            let fd = LinearEquilibria::from_rows(fd_jacobian(&g, r.conserved()));
            assert!(exact.max_gap(&fd) <= 1e-8, "{:?} vs {:?}", exact, fd);
        }
    }

    #[test]
    fn published_energy_row_misses_the_entropy_coupling() {
        let g = gas(0.0);
        let r = ReferenceState::from_gas(&g, 0.0, 1.0).unwrap();
        let rec = reconcile_equilibria(
            linearized_equilibria(&r, &g, 1.0),
            jacobian_equilibria(&r, &g, 1.0),
            1e-8,
        );
        assert!(!rec.consistent());
        assert!(rec.mismatches.iter().any(|m| m.0 == "e" && m.1 == "zeta"));
        assert_eq!(rec.resolved(), rec.jacobian);
        assert!(rec.report().contains("de/dzeta"));
        // ψ rows agree exactly
        assert!(rec.mismatches.iter().all(|m| m.0 != "psi"));
    }

    #[test]
    fn compatible_energy_row_is_the_jacobian() {
        let g = gas(0.2);
        let r = ReferenceState::from_gas(&g, 0.15, 1.0).unwrap();
        let a = compatible_equilibria(&r, &g, 1.0);
        let b = jacobian_equilibria(&r, &g, 1.0);
        for c in 0..3 {
            assert_abs_diff_eq!(a.e[c], b.e[c], epsilon = 1e-15);
        }
        assert_eq!(a.psi, b.psi);
    }

    #[test]
    fn link_formula_gives_alpha() {
        let sigma_e = 1.0 / 1.9 - 0.5;
        for u0 in [0.0, 0.1, 0.3, 0.5] {
            let sigma_psi = 1.5 * 1.4 * sigma_e;
            let a = implied_alpha(1.4, 1.0, sigma_e, sigma_psi, u0, 1.0);
            assert_abs_diff_eq!(a, 3.0 * u0 * u0, epsilon = 1e-14);
            assert_eq!(a > -2.0 && a < 1.0, u0 < 1.0 / 3f64.sqrt());
        }
    }
}
