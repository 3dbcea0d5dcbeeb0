//! Defects of conservation θ_ℓ = ∂ₜm_ℓ^eq + Σ_p Λ_ℓp ∂ₓm_p^eq.
//!
//! The time derivative is removed with the first-order equations
//! ∂ₜW_k = −Σ_p Λ_kp ∂ₓm_p^eq and the chain rule, using a central-difference
//! Jacobian of the equilibrium map in the conserved variables.

use crate::error::{Error, Result};
use crate::lattice::LambdaTensor;
use crate::ns::centered_gradients;

/// θ for every non-conserved moment, one array per moment in row order.
///
/// `equilibrium` maps the conserved values of one cell to the full
/// equilibrium moment vector (conserved entries included). `conserved` lists
/// the conserved row indices in the order of `fields`.
pub fn defect_theta<F>(
    equilibrium: F,
    conserved: &[usize],
    lambda: &LambdaTensor,
    fields: &[Vec<f64>],
    dx: f64,
) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let d = lambda.dim();
    let nc = conserved.len();
    if fields.len() != nc || nc == 0 || conserved.iter().any(|&r| r >= d) {
        return Err(Error::DimensionMismatch(format!(
            "{} conserved rows for {} fields on a {d}-moment tensor",
            nc,
            fields.len()
        )));
    }
    let n = fields[0].len();
    if fields.iter().any(|f| f.len() != n) {
        return Err(Error::DimensionMismatch("conserved fields of unequal length".into()));
    }

    // equilibrium moments and their gradients
    let mut meq = vec![vec![0.0; n]; d];
    let mut w = vec![0.0; nc];
    for c in 0..n {
        for k in 0..nc {
            w[k] = fields[k][c];
        }
        let m = equilibrium(&w).map_err(|e| e.at_cell(c))?;
        if m.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "equilibrium of length {} for {d} moments",
                m.len()
            )));
        }
        for (row, v) in meq.iter_mut().zip(m) {
            row[c] = v;
        }
    }
    let grad: Vec<Vec<f64>> = meq.iter().map(|q| centered_gradients(q, dx)).collect();

    let free: Vec<usize> = (0..d).filter(|r| !conserved.contains(r)).collect();
    let mut theta = vec![vec![0.0; n]; free.len()];
    let flux = |row: usize, c: usize| -> f64 { (0..d).map(|p| lambda.get(row, p) * grad[p][c]).sum() };
    for c in 0..n {
        for k in 0..nc {
            w[k] = fields[k][c];
        }
        // ∂ₜW_k
        let dw: Vec<f64> = conserved.iter().map(|&row| -flux(row, c)).collect();
        let mut dt_meq = vec![0.0; d];
        for k in 0..nc {
            let h = 1e-6 * (1.0 + w[k].abs());
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[k] += h;
            wm[k] -= h;
            let mp = equilibrium(&wp).map_err(|e| e.at_cell(c))?;
            let mm = equilibrium(&wm).map_err(|e| e.at_cell(c))?;
            for l in 0..d {
                dt_meq[l] += (mp[l] - mm[l]) / (2.0 * h) * dw[k];
            }
        }
        for (i, &l) in free.iter().enumerate() {
            theta[i][c] = dt_meq[l] + flux(l, c);
        }
    }
    Ok(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_moment_matrix_d1q3, momentum_velocity_tensor, VelocitySet};
    use std::f64::consts::PI;

    fn fluid_lambda() -> LambdaTensor {
        let m = build_moment_matrix_d1q3(1.0, 1.0).unwrap();
        momentum_velocity_tensor(&m, &VelocitySet::d1q3(1.0).unwrap()).unwrap()
    }

    fn sine(n: usize, base: f64, amp: f64) -> Vec<f64> {
        (0..n)
            .map(|j| base + amp * (2.0 * PI * j as f64 / n as f64).sin())
            .collect()
    }

    #[test]
    fn uniform_state_has_no_defect() {
        let eq = |w: &[f64]| Ok(vec![w[0], w[1], 3.0 * (w[1] * w[1] / w[0] + 0.2 * w[0]) - 2.0 * w[0]]);
        let th = defect_theta(eq, &[0, 1], &fluid_lambda(), &[vec![1.0; 8], vec![0.1; 8]], 0.125).unwrap();
        assert!(th[0].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn linear_fluid_defect() {
        let (u0, c0) = (0.1, 0.5);
        let eq = move |w: &[f64]| {
            Ok(vec![
                w[0],
                w[1],
                (3.0 * c0 * c0 - 3.0 * u0 * u0 - 2.0) * w[0] + 6.0 * u0 * w[1],
            ])
        };
        let n = 64;
        let dx = 1.0 / n as f64;
        let rho = sine(n, 1.0, 0.01);
        let j = sine(n, 0.2, 0.03);
        let th = defect_theta(eq, &[0, 1], &fluid_lambda(), &[rho.clone(), j.clone()], dx).unwrap();
        let (drho, dj) = (centered_gradients(&rho, dx), centered_gradients(&j, dx));
        for c in 0..n {
            let expect = 3.0 * (1.0 - 3.0 * u0 * u0 - c0 * c0) * dj[c] - 6.0 * u0 * (c0 * c0 - u0 * u0) * drho[c];
            assert!((th[0][c] - expect).abs() < 1e-8, "{} vs {expect}", th[0][c]);
        }
    }

    #[test]
    fn linear_fluid_defect_at_rest() {
        let eq = |w: &[f64]| Ok(vec![w[0], w[1], (0.75 - 2.0) * w[0]]);
        let n = 32;
        let dx = 1.0 / n as f64;
        let j = sine(n, 0.0, 0.01);
        let th = defect_theta(eq, &[0, 1], &fluid_lambda(), &[vec![1.0; n], j.clone()], dx).unwrap();
        let dj = centered_gradients(&j, dx);
        for c in 0..n {
            assert!((th[0][c] - 2.25 * dj[c]).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let eq = |w: &[f64]| Ok(vec![w[0], w[1], 0.0]);
        assert!(defect_theta(eq, &[0, 1], &fluid_lambda(), &[vec![1.0; 4]], 0.25).is_err());
    }
}
