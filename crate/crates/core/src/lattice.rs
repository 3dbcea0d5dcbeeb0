//! Moment matrices, particle/moment conversion, the momentum-velocity
//! tensor and Hénon coefficients shared by every scheme.
//!
//! Hot loops use [`D1q3Block`] (closed-form 3×3 transform and inverse).
//! The dense [`MomentMatrix`] is assembled from the same blocks and is used
//! by the linear analysis.

use nalgebra::DMatrix;

use crate::error::{require_positive, require_rate, Error, Result};

/// Discrete velocities (in units of λ) with the lattice speed λ = Δx/Δt.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocitySet {
    velocities: Vec<i8>,
    lambda: f64,
}

impl VelocitySet {
    pub fn new(velocities: Vec<i8>, lambda: f64) -> Result<Self> {
        require_positive("lambda", lambda)?;
        if let Some(&v) = velocities.iter().find(|v| !(-1..=1).contains(*v)) {
            return Err(Error::InvalidParameter {
                name: "velocity",
                value: v as f64,
                reason: "discrete velocities must lie in {-1, 0, +1}".into(),
            });
        }
        Ok(Self { velocities, lambda })
    }

    /// (v₀, v₊, v₋) = (0, +1, −1).
    pub fn d1q3(lambda: f64) -> Result<Self> {
        Self::new(vec![0, 1, -1], lambda)
    }

    /// Two D1Q3 sets side by side: (f₀, f₊, f₋, g₀, g₊, g₋).
    pub fn d1q3q3(lambda: f64) -> Result<Self> {
        Self::new(vec![0, 1, -1, 0, 1, -1], lambda)
    }

    pub fn velocities(&self) -> &[i8] {
        &self.velocities
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn len(&self) -> usize {
        self.velocities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.velocities.is_empty()
    }
}

/// D1Q3 moment transform with density scale `scale` (ρ₀, or ρ₀c_p for the
/// entropy distribution):
///
/// ```text
/// (ρ, J, e) = scale · ( f₀+f₊+f₋,  λ(f₊−f₋),  λ²(f₊+f₋−2f₀) )
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D1q3Block {
    scale: f64,
    lambda: f64,
    inv_scale: f64,
    inv_lambda: f64,
    inv_lambda2: f64,
}

impl D1q3Block {
    pub fn new(scale: f64, lambda: f64) -> Result<Self> {
        require_positive("scale", scale)?;
        require_positive("lambda", lambda)?;
        Ok(Self {
            scale,
            lambda,
            inv_scale: 1.0 / scale,
            inv_lambda: 1.0 / lambda,
            inv_lambda2: 1.0 / (lambda * lambda),
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn moments(&self, [f0, fp, fm]: [f64; 3]) -> [f64; 3] {
        let l = self.lambda;
        [
            self.scale * (f0 + fp + fm),
            self.scale * l * (fp - fm),
            self.scale * l * l * (fp + fm - 2.0 * f0),
        ]
    }

    #[inline]
    pub fn distributions(&self, [rho, j, e]: [f64; 3]) -> [f64; 3] {
        let a = rho * self.inv_scale;
        let b = j * self.inv_scale * self.inv_lambda;
        let c = e * self.inv_scale * self.inv_lambda2;
        let moving = (2.0 * a + c) / 6.0;
        [(a - c) / 3.0, moving + 0.5 * b, moving - 0.5 * b]
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        let (s, l) = (self.scale, self.lambda);
        [
            [s, s, s],
            [0.0, s * l, -s * l],
            [-2.0 * s * l * l, s * l * l, s * l * l],
        ]
    }

    pub fn inverse_matrix(&self) -> [[f64; 3]; 3] {
        let a = self.inv_scale;
        let b = self.inv_scale * self.inv_lambda;
        let c = self.inv_scale * self.inv_lambda2;
        [
            [a / 3.0, 0.0, -c / 3.0],
            [a / 3.0, b / 2.0, c / 6.0],
            [a / 3.0, -b / 2.0, c / 6.0],
        ]
    }
}

/// Dense moment matrix with its inverse, fixed at construction.
#[derive(Debug, Clone)]
pub struct MomentMatrix {
    entries: DMatrix<f64>,
    inverse: DMatrix<f64>,
    rho0: f64,
    cp: Option<f64>,
}

/// D1Q3Q3 moment positions for the f-block (ρ, J, e) and the g-block (ζ, ψ, ε)
/// under the conserved-first order (ρ, J, ζ, e, ψ, ε).
pub const FLUID_ROWS: [usize; 3] = [0, 1, 3];
pub const ENTROPY_ROWS: [usize; 3] = [2, 4, 5];

/// The 3×3 matrix of the isentropic fluid scheme, moment order (ρ, J, e).
pub fn build_moment_matrix_d1q3(rho0: f64, lambda: f64) -> Result<MomentMatrix> {
    let block = D1q3Block::new(rho0, lambda)?;
    let m = block.matrix();
    let mi = block.inverse_matrix();
    Ok(MomentMatrix {
        entries: DMatrix::from_fn(3, 3, |r, c| m[r][c]),
        inverse: DMatrix::from_fn(3, 3, |r, c| mi[r][c]),
        rho0,
        cp: None,
    })
}

/// The 6×6 matrix of the coupled scheme, particle order (f₀,f₊,f₋,g₀,g₊,g₋),
/// moment order (ρ, J, ζ, e, ψ, ε).
pub fn build_moment_matrix_d1q3q3(rho0: f64, cp: f64, lambda: f64) -> Result<MomentMatrix> {
    require_positive("cp", cp)?;
    let fluid = D1q3Block::new(rho0, lambda)?;
    let entropy = D1q3Block::new(rho0 * cp, lambda)?;
    let mut entries = DMatrix::zeros(6, 6);
    let mut inverse = DMatrix::zeros(6, 6);
    for (block, rows, offset) in [(fluid, FLUID_ROWS, 0), (entropy, ENTROPY_ROWS, 3)] {
        let m = block.matrix();
        let mi = block.inverse_matrix();
        for a in 0..3 {
            for b in 0..3 {
                entries[(rows[a], offset + b)] = m[a][b];
                inverse[(offset + a, rows[b])] = mi[a][b];
            }
        }
    }
    Ok(MomentMatrix {
        entries,
        inverse,
        rho0,
        cp: Some(cp),
    })
}

impl MomentMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn cp(&self) -> Option<f64> {
        self.cp
    }

    /// m = M f
    pub fn to_moments(&self, f: &[f64]) -> Result<Vec<f64>> {
        mat_vec(&self.entries, f)
    }

    /// f = M⁻¹ m
    pub fn to_distributions(&self, m: &[f64]) -> Result<Vec<f64>> {
        mat_vec(&self.inverse, m)
    }
}

fn mat_vec(a: &DMatrix<f64>, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against a {}x{} matrix",
            x.len(),
            a.nrows(),
            a.ncols()
        )));
    }
    Ok((0..a.nrows())
        .map(|r| (0..a.ncols()).map(|c| a[(r, c)] * x[c]).sum())
        .collect())
}

/// Λ = λ M diag(v) M⁻¹, governing the first-order fluxes of the equivalent equations.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaTensor {
    entries: DMatrix<f64>,
}

impl LambdaTensor {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[(row, col)]
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }
}

pub fn momentum_velocity_tensor(m: &MomentMatrix, v: &VelocitySet) -> Result<LambdaTensor> {
    let n = m.dim();
    if v.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} velocities for a {n}x{n} moment matrix",
            v.len()
        )));
    }
    let lambda = v.lambda();
    let mut scaled = m.entries.clone();
    for (j, &vj) in v.velocities().iter().enumerate() {
        scaled.column_mut(j).scale_mut(lambda * vj as f64);
    }
    Ok(LambdaTensor {
        entries: scaled * &m.inverse,
    })
}

/// σ = 1/s − 1/2.
pub fn henon_sigma(s: f64) -> Result<f64> {
    require_rate("s", s)?;
    Ok(1.0 / s - 0.5)
}

/// s = 1/(σ + 1/2).
pub fn sigma_to_s(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "sigma",
            value: sigma,
            reason: "Hénon coefficient must be finite and > 0".into(),
        });
    }
    Ok(1.0 / (sigma + 0.5))
}

/// Relaxation rates of the non-conserved moments with their Hénon coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct HenonMap {
    s: Vec<f64>,
    sigma: Vec<f64>,
}

impl HenonMap {
    pub fn from_rates(rates: &[f64]) -> Result<Self> {
        let sigma = rates.iter().map(|&s| henon_sigma(s)).collect::<Result<_>>()?;
        Ok(Self {
            s: rates.to_vec(),
            sigma,
        })
    }

    pub fn from_sigmas(sigmas: &[f64]) -> Result<Self> {
        let s = sigmas.iter().map(|&g| sigma_to_s(g)).collect::<Result<_>>()?;
        Ok(Self {
            s,
            sigma: sigmas.to_vec(),
        })
    }

    pub fn rates(&self) -> &[f64] {
        &self.s
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigma
    }
}

/// Periodic streaming of one distribution: `dst[j] = src[j - shift]`.
///
/// `shift` is the discrete velocity, so +1 moves mass one cell to the right.
pub fn stream_shift(src: &[f64], dst: &mut [f64], shift: i8) {
    let n = src.len();
    debug_assert_eq!(n, dst.len());
    match shift {
        0 => dst.copy_from_slice(src),
        1 => {
            dst[1..].copy_from_slice(&src[..n - 1]);
            dst[0] = src[n - 1];
        }
        -1 => {
            dst[..n - 1].copy_from_slice(&src[1..]);
            dst[n - 1] = src[0];
        }
        _ => unreachable!("D1Q3 velocities are -1, 0, +1"),
    }
}

/// One D1Q3 particle distribution over a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Populations {
    pub rest: Vec<f64>,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

impl Populations {
    pub fn zeros(n: usize) -> Self {
        Self {
            rest: vec![0.0; n],
            plus: vec![0.0; n],
            minus: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.rest.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rest.is_empty()
    }

    #[inline]
    pub fn get(&self, j: usize) -> [f64; 3] {
        [self.rest[j], self.plus[j], self.minus[j]]
    }

    #[inline]
    pub fn set(&mut self, j: usize, [a, b, c]: [f64; 3]) {
        self.rest[j] = a;
        self.plus[j] = b;
        self.minus[j] = c;
    }

    /// Advection step: `self` becomes `post` displaced by one cell along each velocity.
    pub fn stream_from(&mut self, post: &Populations) {
        stream_shift(&post.rest, &mut self.rest, 0);
        stream_shift(&post.plus, &mut self.plus, 1);
        stream_shift(&post.minus, &mut self.minus, -1);
    }

    /// Fills the populations from per-cell moments.
    pub fn from_moments(block: &D1q3Block, moments: impl Iterator<Item = [f64; 3]>, n: usize) -> Self {
        let mut p = Self::zeros(n);
        for (j, m) in moments.enumerate() {
            p.set(j, block.distributions(m));
        }
        p
    }

    /// Per-cell moments.
    pub fn moments(&self, block: &D1q3Block) -> Vec<[f64; 3]> {
        (0..self.len()).map(|j| block.moments(self.get(j))).collect()
    }
}
