//! Exact projection onto a small polyhedron by active-set enumeration.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, solve_dense, Matrix};
use crate::model::Instance;
use crate::sets::Shape;

/// Largest number of inequality rows accepted for enumeration.
pub const MAX_CONSTRAINTS: usize = 24;
const FEAS_TOL: f64 = 1e-9;
const MULT_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-12;

/// `min ½‖x − v̄‖²  s.t. ⟨gⱼ, x⟩ ≤ hⱼ`.
#[derive(Debug, Clone)]
pub struct PolyhedralQP {
    pub anchor: Vec<f64>,
    pub rows: Vec<(Vec<f64>, f64)>,
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub x: Vec<f64>,
    /// Indices of the rows held at equality.
    pub active: Vec<usize>,
    /// Multipliers of the active rows, in the order of `active`.
    pub multipliers: Vec<f64>,
}

impl PolyhedralQP {
    pub fn new(anchor: Vec<f64>, rows: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if rows.len() > MAX_CONSTRAINTS {
            return Err(Error::InvalidArgument(format!(
                "{} constraint rows exceed the enumeration limit {MAX_CONSTRAINTS}",
                rows.len()
            )));
        }
        for (g, _) in &rows {
            crate::error::check_dim(anchor.len(), g.len())?;
        }
        Ok(Self { anchor, rows })
    }

    /// Collects `⟨gⱼ, x⟩ ≤ hⱼ` rows from an instance whose sets are boxes,
    /// halfspaces, hyperplanes or orthants. Hyperplanes contribute two
    /// opposing rows, boxes one row per finite bound.
    pub fn from_instance(inst: &Instance) -> Result<Self> {
        let mut rows = Vec::new();
        for block in inst.blocks() {
            let a = block.matrix();
            match block.set().shape() {
                Shape::Halfspace { normal, offset } => {
                    rows.push((a.tr_mul_vec(normal), *offset));
                }
                Shape::Hyperplane { normal, offset } => {
                    let g = a.tr_mul_vec(normal);
                    rows.push((g.iter().map(|v| -v).collect(), -offset));
                    rows.push((g, *offset));
                }
                Shape::Box { lower, upper } => {
                    for k in 0..a.rows() {
                        if upper[k].is_finite() {
                            rows.push((a.row(k).to_vec(), upper[k]));
                        }
                        if lower[k].is_finite() {
                            rows.push((a.row(k).iter().map(|v| -v).collect(), -lower[k]));
                        }
                    }
                }
                Shape::NonnegativeOrthant { .. } => {
                    for k in 0..a.rows() {
                        rows.push((a.row(k).iter().map(|v| -v).collect(), 0.0));
                    }
                }
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "set type `{}` is not supported by the polyhedral oracle",
                        block.set().kind_name()
                    )))
                }
            }
        }
        Self::new(inst.anchor().to_vec(), rows)
    }

    fn feasible(&self, x: &[f64]) -> bool {
        self.rows
            .iter()
            .all(|(g, h)| dot(g, x) - h <= FEAS_TOL * (1.0 + h.abs() + norm(g) * norm(x)))
    }

    /// Equality-constrained candidate for the active set `s`; `None` when the
    /// rows of `s` are linearly dependent.
    fn candidate(&self, s: &[usize]) -> Option<(Vec<f64>, Vec<f64>)> {
        let k = s.len();
        if k == 0 {
            return Some((self.anchor.clone(), Vec::new()));
        }
        // x = v̄ − Gᵀμ with (G Gᵀ) μ = G v̄ − h
        let mut gram = Matrix::zeros(k, k);
        let mut rhs = vec![0.0; k];
        for (a, &i) in s.iter().enumerate() {
            let (gi, hi) = &self.rows[i];
            rhs[a] = dot(gi, &self.anchor) - hi;
            for (b, &j) in s.iter().enumerate() {
                gram[(a, b)] = dot(gi, &self.rows[j].0);
            }
        }
        let mu = solve_dense(&gram, &rhs, PIVOT_TOL)?;
        let mut x = self.anchor.clone();
        for (m, &i) in mu.iter().zip(s) {
            crate::linalg::axpy(-m, &self.rows[i].0, &mut x);
        }
        Some((x, mu))
    }
}

/// Enumerates active sets by increasing cardinality and returns the first
/// KKT point: primal feasible with nonnegative multipliers. For this strictly
/// convex problem that point is the projection.
pub fn solve_qp_activeset(qp: &PolyhedralQP) -> Result<QpSolution> {
    let n = qp.anchor.len();
    let j = qp.rows.len();
    for k in 0..=j.min(n) {
        for s in (0..j).combinations(k) {
            let Some((x, mu)) = qp.candidate(&s) else {
                continue;
            };
            let scale = 1.0 + mu.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if mu.iter().all(|&m| m >= -MULT_TOL * scale) && qp.feasible(&x) {
                return Ok(QpSolution {
                    x,
                    active: s,
                    multipliers: mu,
                });
            }
        }
    }
    Err(Error::Infeasible(
        "no active set satisfies the KKT conditions".into(),
    ))
}
