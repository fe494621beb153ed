//! Problem representation: projecting an anchor `v̄` onto `⋂ᵢ Aᵢ⁻¹Cᵢ`, and
//! the dual objective whose block coordinate minimization the solver runs.
//!
//! With `𝐀ᵀ𝐲 = Σᵢ Aᵢᵀyᵢ` the dual objective is
//!
//! ```text
//! d(𝐲) = ½‖𝐀ᵀ𝐲 − v̄‖² − ½‖v̄‖² + Σᵢ σ_{Cᵢ}(yᵢ)
//! ```
//!
//! and any minimizer `𝐲*` recovers the projection as `x* = v̄ − 𝐀ᵀ𝐲*`.

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm, power_iteration, sub, Matrix};
use crate::sets::{ConvexSet, ExtendedReal};

/// Multiplicative safety margin applied to power-iteration estimates of
/// `λ_max(AᵀA)`, so the step constants never underestimate it.
pub const GAMMA_SAFETY: f64 = 1e-6;

/// `(1 + δ) · λ̂_max(AᵀA)`; exactly `1` when `A` is the identity matrix.
pub fn compute_gamma(a: &Matrix) -> Result<f64> {
    if a.is_identity() {
        return Ok(1.0);
    }
    Ok((1.0 + GAMMA_SAFETY) * lambda_max_gram(a)?)
}

/// Power-iteration estimate of `λ_max(AᵀA)` without the safety factor.
pub fn lambda_max_gram(a: &Matrix) -> Result<f64> {
    if a.is_zero() {
        return Err(Error::InvalidArgument("matrix must be nonzero".into()));
    }
    // same nonzero spectrum as AAᵀ; iterate in the smaller dimension
    let lam = if a.cols() <= a.rows() {
        power_iteration(a.cols(), |v| a.tr_mul_vec(&a.mul_vec(v)))
    } else {
        power_iteration(a.rows(), |v| a.mul_vec(&a.tr_mul_vec(v)))
    };
    Ok(lam)
}

/// One constraint `A x ∈ C` of the problem.
#[derive(Debug, Clone)]
pub struct Block {
    matrix: Matrix,
    set: ConvexSet,
    gamma: f64,
    identity: bool,
}

impl Block {
    pub fn new(matrix: Matrix, set: ConvexSet) -> Result<Self> {
        check_dim(matrix.rows(), set.dim())?;
        if matrix.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite".into()));
        }
        let gamma = compute_gamma(&matrix)?;
        let identity = matrix.is_identity();
        Ok(Self {
            matrix,
            set,
            gamma,
            identity,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn set(&self) -> &ConvexSet {
        &self.set
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Whether the block matrix is exactly the identity.
    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// Dual variable `𝐲 = (y₁, …, y_ℓ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint {
    pub blocks: Vec<Vec<f64>>,
}

impl DualPoint {
    pub fn zeros(inst: &Instance) -> Self {
        Self {
            blocks: inst.blocks.iter().map(|b| vec![0.0; b.dim()]).collect(),
        }
    }

    pub fn new(blocks: Vec<Vec<f64>>) -> Self {
        Self { blocks }
    }

    pub fn norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| dot(b, b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| crate::linalg::dist(a, b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn dist_inf(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    /// All coordinates, block after block.
    pub fn flatten(&self) -> Vec<f64> {
        self.blocks.concat()
    }
}

/// A best-approximation problem `min ½‖x − v̄‖²  s.t. Aᵢx ∈ Cᵢ`.
#[derive(Debug, Clone)]
pub struct Instance {
    anchor: Vec<f64>,
    blocks: Vec<Block>,
}

impl Instance {
    pub fn new(anchor: Vec<f64>, blocks: Vec<(Matrix, ConvexSet)>) -> Result<Self> {
        if anchor.is_empty() {
            return Err(Error::InvalidArgument("anchor must be non-empty".into()));
        }
        if anchor.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("anchor must be finite".into()));
        }
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("at least one block is required".into()));
        }
        let blocks = blocks
            .into_iter()
            .map(|(m, s)| {
                check_dim(anchor.len(), m.cols())?;
                Block::new(m, s)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { anchor, blocks })
    }

    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.blocks.iter().map(Block::gamma).collect()
    }

    /// `L_g = λ_max(𝐀𝐀ᵀ)`, the Lipschitz modulus of `∇g`, without any
    /// safety factor.
    pub fn gradient_lipschitz(&self) -> f64 {
        power_iteration(self.dim(), |v| {
            let mut out = vec![0.0; v.len()];
            for b in &self.blocks {
                b.matrix.tr_mul_acc(1.0, &b.matrix.mul_vec(v), &mut out);
            }
            out
        })
    }

    fn check_dual(&self, y: &DualPoint) -> Result<()> {
        check_dim(self.blocks.len(), y.blocks.len())?;
        for (b, yi) in self.blocks.iter().zip(&y.blocks) {
            check_dim(b.dim(), yi.len())?;
        }
        Ok(())
    }

    /// `𝐀ᵀ𝐲`
    pub fn stacked_transpose(&self, y: &DualPoint) -> Result<Vec<f64>> {
        self.check_dual(y)?;
        let mut out = vec![0.0; self.dim()];
        for (b, yi) in self.blocks.iter().zip(&y.blocks) {
            b.matrix.tr_mul_acc(1.0, yi, &mut out);
        }
        Ok(out)
    }

    /// `x = v̄ − 𝐀ᵀ𝐲`
    pub fn primal_from_dual(&self, y: &DualPoint) -> Result<Vec<f64>> {
        Ok(sub(&self.anchor, &self.stacked_transpose(y)?))
    }

    /// Smooth part `g(𝐲) = ½‖𝐀ᵀ𝐲 − v̄‖² − ½‖v̄‖²`.
    pub fn smooth_part(&self, y: &DualPoint) -> Result<f64> {
        let x = self.primal_from_dual(y)?;
        // ½‖x‖² − ½‖v̄‖² written as ½⟨x − v̄, x + v̄⟩ to limit cancellation
        Ok(0.5
            * x.iter()
                .zip(&self.anchor)
                .map(|(xi, vi)| (xi - vi) * (xi + vi))
                .sum::<f64>())
    }

    /// Blocks `Aᵢ(𝐀ᵀ𝐲 − v̄) = −Aᵢx` of `∇g(𝐲)`.
    pub fn gradient(&self, y: &DualPoint) -> Result<DualPoint> {
        let x = self.primal_from_dual(y)?;
        Ok(DualPoint::new(
            self.blocks
                .iter()
                .map(|b| b.matrix.mul_vec(&x).into_iter().map(|v| -v).collect())
                .collect(),
        ))
    }

    /// Dual objective `d(𝐲) = g(𝐲) + Σᵢ σ_{Cᵢ}(yᵢ)`.
    pub fn dual_objective(&self, y: &DualPoint) -> Result<ExtendedReal> {
        let g = self.smooth_part(y)?;
        let mut total = ExtendedReal::Finite(g);
        for (b, yi) in self.blocks.iter().zip(&y.blocks) {
            total = total + b.set.support(yi)?;
        }
        Ok(total)
    }

    /// Prox-gradient residual `𝒢(𝐲) = 𝐲 − prox_{σ_D}(𝐲 − ∇g(𝐲))`.
    pub fn residual_map(&self, y: &DualPoint) -> Result<DualPoint> {
        let grad = self.gradient(y)?;
        let mut out = Vec::with_capacity(self.blocks.len());
        for ((b, yi), gi) in self.blocks.iter().zip(&y.blocks).zip(&grad.blocks) {
            let u = sub(yi, gi);
            let prox = b.set.prox_scaled_support(&u, 1.0)?;
            out.push(sub(yi, &prox));
        }
        Ok(DualPoint::new(out))
    }

    /// Largest distance `dist(Aᵢx, Cᵢ)` over the blocks.
    pub fn max_infeasibility(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let mut worst = 0.0f64;
        for b in &self.blocks {
            let ax = b.matrix.mul_vec(x);
            let p = b.set.project(&ax)?;
            worst = worst.max(crate::linalg::dist(&ax, &p));
        }
        Ok(worst)
    }

    /// `d* = −½‖x* − v̄‖²` for a known projection `x*`.
    pub fn optimal_value_from_primal(&self, x_star: &[f64]) -> f64 {
        -0.5 * norm(&sub(x_star, &self.anchor)).powi(2)
    }
}
