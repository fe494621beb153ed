//! Euclidean projection onto `{x : ‖x‖_p ≤ β}` for `p ∈ [1.1, 10]`.
//!
//! The projection of `w` outside the ball lies on its boundary and satisfies,
//! coordinatewise on magnitudes,
//!
//! ```text
//! x_i + λ p x_i^{p-1} = |w_i|,      Σ x_i^p = β^p,
//! ```
//!
//! for a multiplier `λ > 0`. For fixed `λ` each coordinate equation has a
//! unique root in `[0, |w_i|]`, and `‖x(λ)‖_p` is strictly decreasing in `λ`,
//! so both levels are bracketed monotone root-finds.

use crate::error::{Error, Result};

pub(crate) const OUTER_BUDGET: usize = 200;
pub(crate) const INNER_BUDGET: usize = 100;
pub(crate) const NORM_RESIDUAL_TOL: f64 = 1e-12;

/// `‖x‖_p`, evaluated with scaling to avoid overflow.
pub fn p_norm(x: &[f64], p: f64) -> f64 {
    let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    // scaled to avoid overflow for large p
    let s: f64 = x.iter().map(|v| (v.abs() / m).powf(p)).sum();
    m * s.powf(1.0 / p)
}

/// Root of `x + c x^{p-1} = a` on `[0, a]`, where `c = λp ≥ 0`, `a ≥ 0`.
fn coordinate_root(a: f64, c: f64, p: f64) -> Result<f64> {
    if a == 0.0 || c == 0.0 {
        return Ok(a);
    }
    let h = |x: f64| x + c * x.powf(p - 1.0) - a;
    let mut lo = 0.0;
    let mut hi = a;
    let mut x = a.min((a / c).powf(1.0 / (p - 1.0)));
    for _ in 0..INNER_BUDGET {
        let hx = h(x);
        if hx == 0.0 {
            return Ok(x);
        }
        if hx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let slope = 1.0 + c * (p - 1.0) * x.powf(p - 2.0);
        let mut next = x - hx / slope;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 2.0 * f64::EPSILON * x.max(f64::MIN_POSITIVE)
            || hi - lo <= 2.0 * f64::EPSILON * hi
        {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NumericalFailure {
        what: "p-norm ball coordinate equation",
        residual: h(x).abs() / a,
    })
}

fn magnitudes_at(a: &[f64], lambda: f64, p: f64) -> Result<Vec<f64>> {
    a.iter()
        .map(|&ai| coordinate_root(ai, lambda * p, p))
        .collect()
}

/// `d/dλ ‖x(λ)‖_p` by implicit differentiation of the coordinate equations.
fn norm_derivative(x: &[f64], norm: f64, lambda: f64, p: f64) -> f64 {
    let mut s = 0.0;
    for &xi in x {
        if xi > 0.0 {
            let dx = -p * xi.powf(p - 1.0) / (1.0 + lambda * p * (p - 1.0) * xi.powf(p - 2.0));
            s += (xi / norm).powf(p - 1.0) * dx;
        }
    }
    s
}

/// Projects the centered vector `w` onto the origin-centered ball of radius
/// `beta`. Also returns the multiplier `λ` (zero when `w` is inside).
pub(crate) fn project_centered(w: &[f64], beta: f64, p: f64) -> Result<(Vec<f64>, f64)> {
    if p_norm(w, p) <= beta {
        return Ok((w.to_vec(), 0.0));
    }
    let a: Vec<f64> = w.iter().map(|v| v.abs()).collect();
    let phi = |x: &[f64]| p_norm(x, p) - beta;

    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut x_hi = magnitudes_at(&a, hi, p)?;
    let mut grow = 0;
    while phi(&x_hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        x_hi = magnitudes_at(&a, hi, p)?;
        grow += 1;
        if grow > 2000 {
            return Err(Error::NumericalFailure {
                what: "p-norm ball multiplier bracket",
                residual: phi(&x_hi),
            });
        }
    }

    let mut lambda = 0.5 * (lo + hi);
    let mut x = magnitudes_at(&a, lambda, p)?;
    let mut residual = phi(&x);
    for _ in 0..OUTER_BUDGET {
        if residual == 0.0 {
            break;
        }
        if residual > 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        let norm = residual + beta;
        let slope = norm_derivative(&x, norm, lambda, p);
        let mut next = if slope < 0.0 {
            lambda - residual / slope
        } else {
            f64::NAN
        };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let settled = (next - lambda).abs() <= 4.0 * f64::EPSILON * lambda
            || hi - lo <= 4.0 * f64::EPSILON * hi;
        if settled && residual.abs() <= NORM_RESIDUAL_TOL * beta.max(1.0) {
            break;
        }
        lambda = next;
        x = magnitudes_at(&a, lambda, p)?;
        residual = phi(&x);
    }
    if residual.abs() > NORM_RESIDUAL_TOL * beta.max(1.0) {
        return Err(Error::NumericalFailure {
            what: "p-norm ball projection",
            residual: residual.abs(),
        });
    }
    let out = x
        .into_iter()
        .zip(w)
        .map(|(m, wi)| m.copysign(*wi))
        .collect();
    Ok((out, lambda))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_norm_matches_definition() {
        let v = [3.0, -4.0];
        assert!((p_norm(&v, 2.0) - 5.0).abs() < 1e-14);
        let direct = (3f64.powf(1.5) + 4f64.powf(1.5)).powf(1.0 / 1.5);
        assert!((p_norm(&v, 1.5) - direct).abs() < 1e-13);
    }

    #[test]
    fn coordinate_root_solves_equation() {
        for &(a, c, p) in &[(2.0, 0.7, 1.1), (5.0, 3.0, 1.5), (0.3, 1e-3, 10.0), (1e-8, 50.0, 1.2)] {
            let x = coordinate_root(a, c, p).unwrap();
            let r = x + c * x.powf(p - 1.0) - a;
            assert!(r.abs() <= 1e-14 * a.max(1.0), "a={a} c={c} p={p} r={r}");
        }
    }

    #[test]
    fn p_two_agrees_with_radial_scaling() {
        let w = [3.0, 4.0, -12.0];
        let (x, _) = project_centered(&w, 2.0, 2.0).unwrap();
        let n = 13.0;
        for (xi, wi) in x.iter().zip(&w) {
            assert!((xi - 2.0 * wi / n).abs() < 1e-13);
        }
    }

    #[test]
    fn kkt_holds_at_return() {
        let w = [1.7, -0.2, 0.0, 3.1];
        for &p in &[1.1, 1.5, 3.0, 10.0] {
            let (x, lambda) = project_centered(&w, 0.8, p).unwrap();
            assert!((p_norm(&x, p) - 0.8).abs() <= 1e-12);
            for (xi, wi) in x.iter().zip(&w) {
                let g = xi + lambda * p * xi.abs().powf(p - 1.0).copysign(*xi) - wi;
                assert!(g.abs() <= 1e-10, "p={p} residual {g}");
            }
        }
    }
}
