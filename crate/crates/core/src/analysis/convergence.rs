//! Grid-convergence measurement on nested periodic grids.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::Macroscopic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceWarning {
    /// Errors do not decrease along the mesh sequence.
    NonMonotone,
    /// Some error vanished; the order is undefined.
    ZeroError,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub errors: Vec<f64>,
    /// log(e_i/e_{i+1}) / log(h_i/h_{i+1})
    pub orders: Vec<f64>,
    pub warning: Option<ConvergenceWarning>,
}

impl OrderEstimate {
    /// Order for the last pair of meshes, or None when undefined.
    pub fn last_order(&self) -> Option<f64> {
        self.orders.last().copied().filter(|o| o.is_finite())
    }

    pub fn min_order(&self) -> Option<f64> {
        if self.orders.is_empty() || self.orders.iter().any(|o| !o.is_finite()) {
            None
        } else {
            Some(self.orders.iter().copied().fold(f64::INFINITY, f64::min))
        }
    }
}

/// Empirical orders from errors on meshes with the given cell counts.
pub fn order_from_errors(meshes: &[usize], errors: &[f64]) -> OrderEstimate {
    let mut warning = None;
    let mut orders = Vec::new();
    for w in 0..errors.len().saturating_sub(1) {
        let (a, b) = (errors[w], errors[w + 1]);
        let ratio = meshes[w + 1] as f64 / meshes[w] as f64;
        if a == 0.0 || b == 0.0 {
            warning = Some(ConvergenceWarning::ZeroError);
            orders.push(f64::NAN);
            continue;
        }
        if b >= a && warning.is_none() {
            warning = Some(ConvergenceWarning::NonMonotone);
        }
        orders.push((a / b).ln() / ratio.ln());
    }
    OrderEstimate {
        errors: errors.to_vec(),
        orders,
        warning,
    }
}

/// Fine-grid samples at the coarse points x_j = jΔx (exact subset).
pub fn coarsen_inject(fine: &[f64], coarse_n: usize) -> Result<Vec<f64>> {
    let r = ratio(fine.len(), coarse_n)?;
    Ok((0..coarse_n).map(|j| fine[j * r]).collect())
}

/// Symmetric average over the window of r fine points centred on each
/// coarse point (half weights at the ends when r is even), periodic.
pub fn coarsen_average(fine: &[f64], coarse_n: usize) -> Result<Vec<f64>> {
    let r = ratio(fine.len(), coarse_n)?;
    if r == 1 {
        return Ok(fine.to_vec());
    }
    let n = fine.len() as isize;
    let at = |i: isize| fine[i.rem_euclid(n) as usize];
    Ok((0..coarse_n)
        .map(|j| {
            let c = (j * r) as isize;
            let h = (r / 2) as isize;
            let mut sum = 0.0;
            if r % 2 == 0 {
                for o in -h + 1..h {
                    sum += at(c + o);
                }
                sum += 0.5 * (at(c - h) + at(c + h));
            } else {
                for o in -h..=h {
                    sum += at(c + o);
                }
            }
            sum / r as f64
        })
        .collect())
}

fn ratio(fine: usize, coarse: usize) -> Result<usize> {
    if coarse == 0 || fine < coarse || !fine.is_multiple_of(coarse) {
        return Err(Error::Incompatible(format!(
            "grid of {fine} cells is not an integer refinement of {coarse}"
        )));
    }
    Ok(fine / coarse)
}

/// √(Δx Σ (a − b)²)
pub fn l2_distance(a: &[f64], b: &[f64]) -> f64 {
    let dx = 1.0 / a.len() as f64;
    (a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() * dx).sqrt()
}

pub fn linf_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// What the runs are measured against.
#[derive(Debug, Clone)]
pub enum Reference {
    /// Differences of successive meshes, e_i = ‖W_{h_i} − W_{h_{i+1}}‖.
    SelfConvergence,
    /// A solution on a grid that refines every mesh, sampled by injection.
    Fields(Macroscopic),
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub meshes: Vec<usize>,
    pub rho: OrderEstimate,
    pub j: OrderEstimate,
    pub zeta: OrderEstimate,
}

/// Runs every mesh once and estimates per-field L2 orders.
pub fn convergence_order<F>(mut run: F, meshes: &[usize], reference: &Reference) -> Result<ConvergenceReport>
where
    F: FnMut(usize) -> Result<Macroscopic>,
{
    let need = match reference {
        Reference::SelfConvergence => 3,
        Reference::Fields(_) => 2,
    };
    if meshes.len() < need || meshes.windows(2).any(|w| w[1] <= w[0] || w[1] % w[0] != 0) {
        return Err(Error::Incompatible(format!(
            "need at least {need} nested, increasing meshes, got {meshes:?}"
        )));
    }
    let runs: Vec<Macroscopic> = meshes.iter().map(|&n| run(n)).collect::<Result<_>>()?;
    for (r, &n) in runs.iter().zip(meshes) {
        if r.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "run for N = {n} returned {} cells",
                r.len()
            )));
        }
    }

    let field = |m: &Macroscopic, k: usize| -> Vec<f64> {
        match k {
            0 => m.rho.clone(),
            1 => m.j.clone(),
            _ => m.zeta.clone(),
        }
    };
    let mut est = Vec::new();
    for k in 0..3 {
        let (errs, used): (Vec<f64>, &[usize]) = match reference {
            Reference::SelfConvergence => {
                let mut e = Vec::new();
                for w in 0..runs.len() - 1 {
                    let coarse = field(&runs[w], k);
                    let fine = coarsen_inject(&field(&runs[w + 1], k), coarse.len())?;
                    e.push(l2_distance(&coarse, &fine));
                }
                (e, &meshes[..meshes.len() - 1])
            }
            Reference::Fields(refm) => {
                let mut e = Vec::new();
                for r in &runs {
                    let coarse = field(r, k);
                    let ref_c = coarsen_inject(&field(refm, k), coarse.len())?;
                    e.push(l2_distance(&coarse, &ref_c));
                }
                (e, meshes)
            }
        };
        est.push(order_from_errors(used, &errs));
    }
    let zeta = est.pop().unwrap();
    let j = est.pop().unwrap();
    let rho = est.pop().unwrap();
    Ok(ConvergenceReport {
        meshes: meshes.to_vec(),
        rho,
        j,
        zeta,
    })
}
