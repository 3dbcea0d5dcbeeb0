//! Von Neumann analysis of the linearised D1Q3Q3 scheme.
//!
//! For a Fourier mode e^{ikx} one step maps f̂ to G(k) f̂ with
//! G(k) = A(k) M⁻¹ R M, where A(k) = diag(1, e^{−ikΔx}, e^{ikΔx}) per
//! distribution and R relaxes moment ℓ to (1 − s_ℓ) m_ℓ + s_ℓ E_ℓ·(ρ, J, ζ).

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::analysis::linear::LinearEquilibria;
use crate::error::{Error, Result};
use crate::lattice::MomentMatrix;
use crate::ns::RelaxationRates;

/// Radius threshold for the stable verdict.
pub const STABILITY_TOLERANCE: f64 = 1e-10;

/// Moment-space relaxation map: identity on (ρ, J, ζ).
pub fn relaxation_matrix(lin: &LinearEquilibria, rates: &RelaxationRates) -> DMatrix<f64> {
    let mut r = DMatrix::identity(6, 6);
    let rows = lin.rows();
    let s = [rates.s_e, rates.s_psi, rates.s_eps];
    for (i, l) in [3usize, 4, 5].into_iter().enumerate() {
        r[(l, l)] = 1.0 - s[i];
        for c in 0..3 {
            r[(l, c)] = s[i] * rows[i][c];
        }
    }
    r
}

/// G(k) for kΔx = `k_dx`, acting on (f₀, f₊, f₋, g₀, g₊, g₋).
pub fn amplification_matrix(m: &MomentMatrix, relax: &DMatrix<f64>, k_dx: f64) -> Result<DMatrix<Complex64>> {
    if m.dim() != 6 || relax.nrows() != 6 || relax.ncols() != 6 {
        return Err(Error::DimensionMismatch(format!(
            "amplification needs 6x6 operators, got {} and {}x{}",
            m.dim(),
            relax.nrows(),
            relax.ncols()
        )));
    }
    let collide = m.inverse() * relax * m.entries();
    let shift = Complex64::from_polar(1.0, -k_dx);
    let phases = [Complex64::new(1.0, 0.0), shift, shift.conj()];
    Ok(DMatrix::from_fn(6, 6, |r, c| phases[r % 3] * collide[(r, c)]))
}

pub fn eigenvalues(g: &DMatrix<Complex64>, k_dx: f64) -> Result<Vec<Complex64>> {
    let schur = g.clone().try_schur(1e-14, 10_000).ok_or(Error::Eigen(k_dx))?;
    let ev = schur.eigenvalues().ok_or(Error::Eigen(k_dx))?;
    if ev.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigen(k_dx));
    }
    Ok(ev.iter().copied().collect())
}

pub fn spectral_radius(g: &DMatrix<Complex64>, k_dx: f64) -> Result<f64> {
    Ok(eigenvalues(g, k_dx)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub k_dx: Vec<f64>,
    pub spectral_radius: Vec<f64>,
    pub max_radius: f64,
    pub argmax_k_dx: f64,
    pub radius_at_zero: f64,
    /// dim ker(G(0) − I)
    pub zero_mode_multiplicity: usize,
    pub verdict: Verdict,
}

impl StabilityReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k_dx,spectral_radius\n");
        for (k, r) in self.k_dx.iter().zip(&self.spectral_radius) {
            writeln!(out, "{k:.16e},{r:.16e}").unwrap();
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Uniform samples kΔx = πi/n, i = 1..=n, plus the k = 0 eigenstructure.
pub fn amplification_scan(
    m: &MomentMatrix,
    lin: &LinearEquilibria,
    rates: &RelaxationRates,
    k_samples: usize,
) -> Result<StabilityReport> {
    if k_samples == 0 {
        return Err(Error::InvalidParameter {
            name: "k_samples",
            value: 0.0,
            reason: "need at least one wavenumber".into(),
        });
    }
    let relax = relaxation_matrix(lin, rates);
    let g0 = amplification_matrix(m, &relax, 0.0)?;
    let radius_at_zero = spectral_radius(&g0, 0.0)?;
    let zero_mode_multiplicity = unit_eigenspace_dim(&g0);

    let mut k_dx = Vec::with_capacity(k_samples);
    let mut radius = Vec::with_capacity(k_samples);
    for i in 1..=k_samples {
        let k = std::f64::consts::PI * i as f64 / k_samples as f64;
        let g = amplification_matrix(m, &relax, k)?;
        k_dx.push(k);
        radius.push(spectral_radius(&g, k)?);
    }
    let (imax, &max_radius) = radius
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty scan");
    let max_radius = max_radius.max(radius_at_zero);
    Ok(StabilityReport {
        argmax_k_dx: k_dx[imax],
        k_dx,
        spectral_radius: radius,
        max_radius,
        radius_at_zero,
        zero_mode_multiplicity,
        verdict: if max_radius <= 1.0 + STABILITY_TOLERANCE {
            Verdict::Stable
        } else {
            Verdict::Unstable
        },
    })
}

/// Numerical nullity of G − I from its singular values.
fn unit_eigenspace_dim(g: &DMatrix<Complex64>) -> usize {
    let n = g.nrows();
    let shifted = g - DMatrix::<Complex64>::identity(n, n);
    let sv: DVector<f64> = shifted.singular_values();
    let scale = sv.max().max(1.0);
    sv.iter().filter(|&&s| s <= 1e-10 * scale).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::linear::{compatible_equilibria, jacobian_equilibria, linearized_equilibria, ReferenceState};
    use crate::gas::GasModel;
    use crate::lattice::build_moment_matrix_d1q3q3;
    use crate::ns::{EpsRelaxation, RelaxationRates, TransportModel};

    fn setup(u0: f64, s0: f64) -> (MomentMatrix, GasModel, ReferenceState, RelaxationRates) {
        let g = GasModel::from_sound_speed(1.4, 1.0, 1.0, 0.5, s0).unwrap();
        let t = TransportModel::new(6.579e-4, 1.0).unwrap();
        let rates = RelaxationRates::resolve(&g, &t, 1.0, 1.0 / 40.0, None, EpsRelaxation::default()).unwrap();
        let r = ReferenceState::from_gas(&g, u0, 1.0).unwrap();
        (build_moment_matrix_d1q3q3(1.0, 1.0, 1.0).unwrap(), g, r, rates)
    }

    #[test]
    fn zero_wavenumber_keeps_conserved_modes() {
        for (u0, s0) in [(0.0, 0.0), (0.15, 0.2)] {
            let (m, g, r, rates) = setup(u0, s0);
            let rep = amplification_scan(&m, &linearized_equilibria(&r, &g, 1.0), &rates, 16).unwrap();
            assert!((rep.radius_at_zero - 1.0).abs() <= 1e-12, "{}", rep.radius_at_zero);
            assert!(rep.zero_mode_multiplicity >= 3);
        }
    }

    #[test]
    fn published_and_compatible_forms_are_stable() {
        for (u0, s0) in [(0.0, 0.0), (0.15, 0.2)] {
            let (m, g, r, rates) = setup(u0, s0);
            for lin in [linearized_equilibria(&r, &g, 1.0), compatible_equilibria(&r, &g, 1.0)] {
                let rep = amplification_scan(&m, &lin, &rates, 512).unwrap();
                assert_eq!(rep.verdict, Verdict::Stable, "max {}", rep.max_radius);
            }
        }
    }

    #[test]
    fn jacobian_at_rest_is_stable() {
        let (m, g, r, rates) = setup(0.0, 0.0);
        let rep = amplification_scan(&m, &jacobian_equilibria(&r, &g, 1.0), &rates, 512).unwrap();
        assert_eq!(rep.verdict, Verdict::Stable);
    }

    #[test]
    fn acoustic_phase_at_small_wavenumber() {
        let (m, g, r, rates) = setup(0.0, 0.0);
        let relax = relaxation_matrix(&jacobian_equilibria(&r, &g, 1.0), &rates);
        for k in [0.01, 0.03, 0.05] {
            let ev = eigenvalues(&amplification_matrix(&m, &relax, k).unwrap(), k).unwrap();
            let target = 0.5 * k; // c₀kΔt with λ = 1
            let mut hits = 0;
            for sign in [1.0, -1.0] {
                let best = ev
                    .iter()
                    .filter(|z| z.norm() > 0.9)
                    .map(|z| (z.arg() - sign * target).abs())
                    .fold(f64::INFINITY, f64::min);
                if best <= 0.05 * target {
                    hits += 1;
                }
            }
            assert_eq!(hits, 2, "k = {k}: {ev:?}");
        }
    }

    #[test]
    fn csv_schema() {
        let (m, g, r, rates) = setup(0.0, 0.0);
        let rep = amplification_scan(&m, &linearized_equilibria(&r, &g, 1.0), &rates, 4).unwrap();
        let csv = rep.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "k_dx,spectral_radius");
        assert_eq!(lines.len(), 5);
        let last: f64 = lines[4].split(',').next().unwrap().parse().unwrap();
        assert!((last - std::f64::consts::PI).abs() < 1e-15);
    }
}
