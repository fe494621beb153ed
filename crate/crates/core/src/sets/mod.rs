//! Closed convex sets presented through their projection, support function
//! and a tolerance-based membership test.
//!
//! Every set is validated at construction and immutable afterwards.

mod cone;
mod pnorm;

use std::fmt;
use std::ops::Add;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm, sub};

pub use cone::Orientation;
pub use pnorm::p_norm;

/// Relative tolerance used when deciding whether a dual vector lies in the
/// domain of a support function that is an indicator (cones, rays,
/// orthogonal complements).
pub const SUPPORT_DOMAIN_TOL: f64 = 1e-9;

/// Smallest admissible exponent of a p-norm ball.
pub const P_MIN: f64 = 1.1;
/// Largest admissible exponent of a p-norm ball.
pub const P_MAX: f64 = 10.0;

/// A real number or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    pub const ZERO: Self = Self::Finite(0.0);

    pub fn is_finite(self) -> bool {
        matches!(self, Self::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Infinity => None,
        }
    }

    /// Value as `f64`, with `+∞` mapped to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl Add for ExtendedReal {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Self::Finite(a), Self::Finite(b)) => Self::Finite(a + b),
            _ => Self::Infinity,
        }
    }
}

impl Add<f64> for ExtendedReal {
    type Output = Self;
    fn add(self, rhs: f64) -> Self {
        self + Self::Finite(rhs)
    }
}

impl std::iter::Sum for ExtendedReal {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

/// Variant parameters of a [`ConvexSet`].
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `{x : lower ≤ x ≤ upper}`; bounds may be infinite.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// `{x : ⟨normal, x⟩ ≤ offset}`
    Halfspace { normal: Vec<f64>, offset: f64 },
    /// `{x : ⟨normal, x⟩ = offset}`
    Hyperplane { normal: Vec<f64>, offset: f64 },
    /// `anchor + span(basis)`, with `basis` orthonormal and `anchor`
    /// orthogonal to it.
    Affine { basis: Vec<Vec<f64>>, anchor: Vec<f64> },
    EuclideanBall { center: Vec<f64>, radius: f64 },
    PNormBall { center: Vec<f64>, radius: f64, p: f64 },
    /// `{(x, r) : r ≥ ‖x‖}`, cone coordinate last.
    SecondOrderCone { dim: usize },
    /// Image of the second-order cone under a signed permutation.
    PolarReflectedCone { orientation: Orientation },
    NonnegativeOrthant { dim: usize },
}

/// A closed convex set.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexSet {
    shape: Shape,
}

fn require_finite(name: &str, v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be finite")))
    }
}

fn require_nonempty(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        Err(Error::InvalidArgument(format!("{name} must be non-empty")))
    } else {
        Ok(())
    }
}

fn require_nonzero_normal(normal: &[f64], offset: f64) -> Result<()> {
    require_nonempty("normal", normal)?;
    require_finite("normal", normal)?;
    if !offset.is_finite() {
        return Err(Error::InvalidArgument("offset must be finite".into()));
    }
    if normal.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidArgument("normal must be nonzero".into()));
    }
    Ok(())
}

fn require_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "radius must be positive and finite, got {radius}"
        )))
    }
}

impl ConvexSet {
    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        require_nonempty("lower", &lower)?;
        check_dim(lower.len(), upper.len())?;
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if l.is_nan() || u.is_nan() || l > u || *l == f64::INFINITY || *u == f64::NEG_INFINITY {
                return Err(Error::InvalidArgument(format!(
                    "box bounds at coordinate {i} are invalid: [{l}, {u}]"
                )));
            }
        }
        Ok(Self {
            shape: Shape::Box { lower, upper },
        })
    }

    pub fn halfspace(normal: Vec<f64>, offset: f64) -> Result<Self> {
        require_nonzero_normal(&normal, offset)?;
        Ok(Self {
            shape: Shape::Halfspace { normal, offset },
        })
    }

    pub fn hyperplane(normal: Vec<f64>, offset: f64) -> Result<Self> {
        require_nonzero_normal(&normal, offset)?;
        Ok(Self {
            shape: Shape::Hyperplane { normal, offset },
        })
    }

    /// `anchor + span(columns)`. Columns are orthonormalized here; linearly
    /// dependent columns are dropped.
    pub fn affine(columns: Vec<Vec<f64>>, anchor: Vec<f64>) -> Result<Self> {
        require_nonempty("anchor", &anchor)?;
        require_finite("anchor", &anchor)?;
        let dim = anchor.len();
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for col in columns {
            check_dim(dim, col.len())?;
            require_finite("basis", &col)?;
            let scale = norm(&col);
            if scale == 0.0 {
                continue;
            }
            let mut q = col;
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &q);
                    q.iter_mut().zip(b).for_each(|(qi, bi)| *qi -= c * bi);
                }
            }
            let nq = norm(&q);
            if nq > 1e-10 * scale {
                q.iter_mut().for_each(|v| *v /= nq);
                basis.push(q);
            }
        }
        // the anchor is kept as given so that it projects onto itself exactly
        Ok(Self {
            shape: Shape::Affine { basis, anchor },
        })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        require_nonempty("center", &center)?;
        require_finite("center", &center)?;
        require_radius(radius)?;
        Ok(Self {
            shape: Shape::EuclideanBall { center, radius },
        })
    }

    pub fn p_ball(center: Vec<f64>, radius: f64, p: f64) -> Result<Self> {
        require_nonempty("center", &center)?;
        require_finite("center", &center)?;
        require_radius(radius)?;
        if !(P_MIN..=P_MAX).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "p-norm exponent must lie in [{P_MIN}, {P_MAX}], got {p}"
            )));
        }
        Ok(Self {
            shape: Shape::PNormBall { center, radius, p },
        })
    }

    pub fn second_order_cone(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("cone dimension must be positive".into()));
        }
        Ok(Self {
            shape: Shape::SecondOrderCone { dim },
        })
    }

    pub fn reflected_cone(orientation: Orientation) -> Self {
        Self {
            shape: Shape::PolarReflectedCone { orientation },
        }
    }

    pub fn orthant(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("orthant dimension must be positive".into()));
        }
        Ok(Self {
            shape: Shape::NonnegativeOrthant { dim },
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Short lowercase name of the variant, as used in problem files.
    pub fn kind_name(&self) -> &'static str {
        match &self.shape {
            Shape::Box { .. } => "box",
            Shape::Halfspace { .. } => "halfspace",
            Shape::Hyperplane { .. } => "hyperplane",
            Shape::Affine { .. } => "affine",
            Shape::EuclideanBall { .. } => "ball2",
            Shape::PNormBall { .. } => "ballp",
            Shape::SecondOrderCone { .. } => "soc",
            Shape::PolarReflectedCone { .. } => "soc_reflected",
            Shape::NonnegativeOrthant { .. } => "orthant",
        }
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Box { lower, .. } => lower.len(),
            Shape::Halfspace { normal, .. } | Shape::Hyperplane { normal, .. } => normal.len(),
            Shape::Affine { anchor, .. } => anchor.len(),
            Shape::EuclideanBall { center, .. } | Shape::PNormBall { center, .. } => center.len(),
            Shape::SecondOrderCone { dim } | Shape::NonnegativeOrthant { dim } => *dim,
            Shape::PolarReflectedCone { orientation } => orientation.dim(),
        }
    }

    /// True for sets that are polyhedra.
    pub fn is_polyhedral(&self) -> bool {
        matches!(
            self.shape,
            Shape::Box { .. }
                | Shape::Halfspace { .. }
                | Shape::Hyperplane { .. }
                | Shape::Affine { .. }
                | Shape::NonnegativeOrthant { .. }
        )
    }

    /// Euclidean projection of `u`. Points already in the set are returned
    /// unchanged, bit for bit.
    pub fn project(&self, u: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), u.len())?;
        Ok(match &self.shape {
            Shape::Box { lower, upper } => u
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(&v, (&l, &h))| v.max(l).min(h))
                .collect(),
            Shape::Halfspace { normal, offset } => {
                let excess = dot(normal, u) - offset;
                if excess <= 0.0 {
                    u.to_vec()
                } else {
                    shift_along(u, normal, excess)
                }
            }
            Shape::Hyperplane { normal, offset } => {
                let excess = dot(normal, u) - offset;
                if excess == 0.0 {
                    u.to_vec()
                } else {
                    shift_along(u, normal, excess)
                }
            }
            Shape::Affine { basis, anchor } => {
                let mut out = anchor.clone();
                let w = sub(u, anchor);
                for b in basis {
                    let c = dot(b, &w);
                    out.iter_mut().zip(b).for_each(|(o, bi)| *o += c * bi);
                }
                out
            }
            Shape::EuclideanBall { center, radius } => {
                let w = sub(u, center);
                let nw = norm(&w);
                if nw <= *radius {
                    u.to_vec()
                } else {
                    let s = radius / nw;
                    center.iter().zip(&w).map(|(c, wi)| c + s * wi).collect()
                }
            }
            Shape::PNormBall { center, radius, p } => {
                let w = sub(u, center);
                if pnorm::p_norm(&w, *p) <= *radius {
                    u.to_vec()
                } else {
                    let (x, _) = pnorm::project_centered(&w, *radius, *p)?;
                    x.iter().zip(center).map(|(xi, c)| xi + c).collect()
                }
            }
            Shape::SecondOrderCone { .. } => cone::project_soc(u),
            Shape::PolarReflectedCone { orientation } => {
                let z = cone::project_soc(&orientation.apply_transpose(u));
                let out = orientation.apply(&z);
                // keep exact fixed points exact
                if out.iter().zip(u).all(|(a, b)| a == b) {
                    u.to_vec()
                } else {
                    out
                }
            }
            Shape::NonnegativeOrthant { .. } => u.iter().map(|v| v.max(0.0)).collect(),
        })
    }

    /// Support function `sup_{z ∈ C} ⟨y, z⟩`.
    ///
    /// Indicator-type supports (cones, rays, orthogonal complements) accept
    /// `y` within `SUPPORT_DOMAIN_TOL · (1 + ‖y‖)` of their domain.
    pub fn support(&self, y: &[f64]) -> Result<ExtendedReal> {
        check_dim(self.dim(), y.len())?;
        let tol = SUPPORT_DOMAIN_TOL * (1.0 + norm(y));
        Ok(match &self.shape {
            Shape::Box { lower, upper } => y
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(&yi, (&l, &h))| {
                    if yi > 0.0 {
                        finite_or_inf(yi * h)
                    } else if yi < 0.0 {
                        finite_or_inf(yi * l)
                    } else {
                        ExtendedReal::ZERO
                    }
                })
                .sum(),
            Shape::Halfspace { normal, offset } => {
                let t = (dot(y, normal) / dot(normal, normal)).max(0.0);
                ray_support(y, normal, t, *offset, tol)
            }
            Shape::Hyperplane { normal, offset } => {
                let t = dot(y, normal) / dot(normal, normal);
                ray_support(y, normal, t, *offset, tol)
            }
            Shape::Affine { basis, anchor } => {
                let along: f64 = basis.iter().map(|b| dot(b, y).powi(2)).sum::<f64>().sqrt();
                if along > tol {
                    ExtendedReal::Infinity
                } else {
                    ExtendedReal::Finite(dot(y, anchor))
                }
            }
            Shape::EuclideanBall { center, radius } => {
                ExtendedReal::Finite(dot(y, center) + radius * norm(y))
            }
            Shape::PNormBall { center, radius, p } => {
                let q = p / (p - 1.0);
                ExtendedReal::Finite(dot(y, center) + radius * pnorm::p_norm(y, q))
            }
            Shape::SecondOrderCone { .. } => polar_soc_indicator(y, tol),
            Shape::PolarReflectedCone { orientation } => {
                polar_soc_indicator(&orientation.apply_transpose(y), tol)
            }
            Shape::NonnegativeOrthant { .. } => {
                let pos: f64 = y.iter().map(|v| v.max(0.0).powi(2)).sum::<f64>().sqrt();
                if pos <= tol {
                    ExtendedReal::ZERO
                } else {
                    ExtendedReal::Infinity
                }
            }
        })
    }

    /// `‖u − Proj(u)‖ ≤ tol · (1 + ‖u‖)`
    pub fn contains(&self, u: &[f64], tol: f64) -> Result<bool> {
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be nonnegative, got {tol}"
            )));
        }
        let p = self.project(u)?;
        Ok(crate::linalg::dist(u, &p) <= tol * (1.0 + norm(u)))
    }

    /// `prox_{r σ_C}(u) = u − r · Proj_C(u / r)`.
    pub fn prox_scaled_support(&self, u: &[f64], r: f64) -> Result<Vec<f64>> {
        if r.is_nan() || r <= 0.0 || r.is_infinite() {
            return Err(Error::InvalidArgument(format!(
                "prox scale must be positive and finite, got {r}"
            )));
        }
        check_dim(self.dim(), u.len())?;
        let scaled: Vec<f64> = u.iter().map(|v| v / r).collect();
        let p = self.project(&scaled)?;
        // r·(u/r − p) rather than u − r·p: coordinates the projection leaves
        // untouched come out exactly zero, inside the support's domain
        Ok(scaled.iter().zip(&p).map(|(si, pi)| r * (si - pi)).collect())
    }
}

fn finite_or_inf(v: f64) -> ExtendedReal {
    if v.is_finite() {
        ExtendedReal::Finite(v)
    } else {
        ExtendedReal::Infinity
    }
}

fn shift_along(u: &[f64], normal: &[f64], excess: f64) -> Vec<f64> {
    let s = excess / dot(normal, normal);
    u.iter().zip(normal).map(|(ui, ai)| ui - s * ai).collect()
}

fn ray_support(y: &[f64], normal: &[f64], t: f64, offset: f64, tol: f64) -> ExtendedReal {
    let off_ray: f64 = y
        .iter()
        .zip(normal)
        .map(|(yi, ai)| (yi - t * ai).powi(2))
        .sum::<f64>()
        .sqrt();
    if off_ray <= tol {
        ExtendedReal::Finite(t * offset)
    } else {
        ExtendedReal::Infinity
    }
}

/// Indicator of the polar of the second-order cone, `{(x, r) : r ≤ -‖x‖}`.
fn polar_soc_indicator(y: &[f64], tol: f64) -> ExtendedReal {
    let neg: Vec<f64> = y.iter().map(|v| -v).collect();
    // dist(y, −K) = dist(−y, K)
    let p = cone::project_soc(&neg);
    if crate::linalg::dist(&neg, &p) <= tol {
        ExtendedReal::ZERO
    } else {
        ExtendedReal::Infinity
    }
}
