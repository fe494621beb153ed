//! Two small worked instances with analytic answers.
//!
//! *Tight*: `v̄ = (2, 0)`, `A₁ = diag(1, 0)`, `C₁` the unit p-norm ball. The
//! projection is `x* = (1, 0)` and the dual minimizer is `y₁* = (1, 0)`.
//!
//! *Nonlinear*: `v̄ = (1, −1, 1)`, `C₁ = {x₃ ≤ −‖(x₁, x₂)‖}`, `C₂ = {x₁ = 0}`,
//! both with identity maps. The dual iterates follow a scalar recurrence
//! whose distance to the minimizer decays like `1/t`, not geometrically.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{DualPoint, Instance};
use crate::sets::{ConvexSet, Orientation};

pub fn tight_instance(p: f64) -> Result<Instance> {
    let a1 = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]])?;
    let c1 = ConvexSet::p_ball(vec![0.0, 0.0], 1.0, p)?;
    Instance::new(vec![2.0, 0.0], vec![(a1, c1)])
}

/// Closed-form `(d(y^ε) − d*, dist(y^ε, Argmin d))` along `y^ε = (1, ε)` on
/// the tight instance: `((1 + ε^q)^{1/q} − 1, ε)` with `q = p/(p−1)`.
pub fn example_tight(p: f64, eps: f64) -> Result<(f64, f64)> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::InvalidArgument(format!("p must lie in (1, 2], got {p}")));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidArgument(format!("eps must lie in [0, 1], got {eps}")));
    }
    let q = p / (p - 1.0);
    // expm1/ln_1p keep the tiny-ε regime accurate
    let gap = (eps.powf(q).ln_1p() / q).exp_m1();
    Ok((gap, eps))
}

pub fn nonlinear_instance() -> Instance {
    let c1 = ConvexSet::reflected_cone(
        Orientation::from_signed_indices(&[1, 2, -3]).expect("valid orientation"),
    );
    let c2 = ConvexSet::hyperplane(vec![1.0, 0.0, 0.0], 0.0).expect("valid hyperplane");
    Instance::new(
        vec![1.0, -1.0, 1.0],
        vec![(Matrix::identity(3), c1), (Matrix::identity(3), c2)],
    )
    .expect("valid instance")
}

/// The unique dual minimizer `((0, −1, 1), (1, 0, 0))`.
pub fn nonlinear_dual_solution() -> DualPoint {
    DualPoint::new(vec![vec![0.0, -1.0, 1.0], vec![1.0, 0.0, 0.0]])
}

/// `a_{t+1} = ½(1 + 1/√(a_t² + 1))·a_t` with `a₀ = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceState {
    pub t: usize,
    pub a: f64,
}

impl Default for RecurrenceState {
    fn default() -> Self {
        Self { t: 0, a: 1.0 }
    }
}

/// Analytic dual iterate `(y₁ᵗ, y₂ᵗ)` of the nonlinear instance.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceStep {
    pub t: usize,
    pub a: f64,
    pub y1: [f64; 3],
    pub y2: [f64; 3],
    /// `‖(y₁ᵗ, y₂ᵗ) − (y₁*, y₂*)‖²`
    pub dist_sq: f64,
}

impl RecurrenceStep {
    pub fn dual_point(&self) -> DualPoint {
        DualPoint::new(vec![self.y1.to_vec(), self.y2.to_vec()])
    }
}

impl Iterator for RecurrenceState {
    type Item = RecurrenceStep;

    fn next(&mut self) -> Option<RecurrenceStep> {
        let a_prev = self.a;
        let s = (a_prev * a_prev + 1.0).sqrt();
        let a = 0.5 * (1.0 + 1.0 / s) * a_prev;
        // s − 1 computed without cancellation
        let s_minus_1 = a_prev * a_prev / (s + 1.0);
        let dist_sq = 2.0 * a * a + (s_minus_1 / (2.0 * s)).powi(2) + (0.5 * s_minus_1).powi(2);
        self.a = a;
        self.t += 1;
        Some(RecurrenceStep {
            t: self.t,
            a,
            y1: [a, -0.5 * (1.0 + 1.0 / s), 0.5 * (1.0 + s)],
            y2: [1.0 - a, 0.0, 0.0],
            dist_sq,
        })
    }
}

/// Iterates `t = 1, …, T` of the nonlinear instance from `𝐲⁰ = 0`.
pub fn example_fails_recurrence(t_max: usize) -> Vec<RecurrenceStep> {
    RecurrenceState::default().take(t_max).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tight_closed_form() {
        let (gap, dist) = example_tight(2.0, 1.0).unwrap();
        assert!((gap - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert_eq!(dist, 1.0);
        assert_eq!(example_tight(1.5, 0.0).unwrap(), (0.0, 0.0));
        assert!(example_tight(3.0, 0.1).is_err());
        assert!(example_tight(1.5, -0.1).is_err());
    }

    #[test]
    fn tight_gap_leading_order() {
        // gap / ε^q → 1/q = (p − 1)/p
        for &p in &[1.5, 2.0, 1.2] {
            let q = p / (p - 1.0);
            for &eps in &[1e-4, 1e-5] {
                let (gap, _) = example_tight(p, eps).unwrap();
                let ratio = gap / eps.powf(q);
                assert!((ratio - (p - 1.0) / p).abs() < 1e-6, "p={p} eps={eps} ratio={ratio}");
            }
        }
    }

    #[test]
    fn closed_form_matches_dual_objective() {
        for &p in &[1.5, 2.0] {
            let inst = tight_instance(p).unwrap();
            let d_star = inst.dual_objective(&DualPoint::new(vec![vec![1.0, 0.0]])).unwrap();
            for &eps in &[0.5, 0.1, 0.01] {
                let d = inst.dual_objective(&DualPoint::new(vec![vec![1.0, eps]])).unwrap();
                let (gap, _) = example_tight(p, eps).unwrap();
                let got = d.finite().unwrap() - d_star.finite().unwrap();
                assert!((got - gap).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn recurrence_first_value_and_second_block() {
        let steps = example_fails_recurrence(50);
        assert!((steps[0].a - 0.853_553_390_593_273_8).abs() < 1e-15);
        assert_eq!(steps[0].t, 1);
        for s in &steps {
            assert_eq!(s.y2[0], 1.0 - s.a);
        }
        assert!(steps.windows(2).all(|w| w[1].a < w[0].a));
    }

    #[test]
    fn recurrence_dist_matches_direct_evaluation() {
        let ystar = nonlinear_dual_solution();
        for s in example_fails_recurrence(20) {
            let direct = s.dual_point().dist(&ystar).powi(2);
            assert!((direct - s.dist_sq).abs() <= 1e-14 * (1.0 + s.dist_sq));
        }
    }

    #[test]
    fn recurrence_decays_like_inverse_sqrt() {
        let steps = example_fails_recurrence(100_000);
        let (lo, hi) = steps[999..]
            .iter()
            .map(|s| s.a * (s.t as f64).sqrt())
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        assert!(lo > 1.0 && hi < 2.0, "a_t·√t ∈ [{lo}, {hi}]");
    }
}
