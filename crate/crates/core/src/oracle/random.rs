//! Seeded random instances with a known feasible point or a known projection.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{dot, norm, Matrix};
use crate::model::Instance;
use crate::sets::{ConvexSet, Orientation};

/// Set variants the generators can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    Box,
    Halfspace,
    Hyperplane,
    Affine,
    Ball,
    PNormBall,
    SecondOrderCone,
    ReflectedCone,
    Orthant,
}

impl SetKind {
    pub const ALL: [SetKind; 9] = [
        SetKind::Box,
        SetKind::Halfspace,
        SetKind::Hyperplane,
        SetKind::Affine,
        SetKind::Ball,
        SetKind::PNormBall,
        SetKind::SecondOrderCone,
        SetKind::ReflectedCone,
        SetKind::Orthant,
    ];

    /// Variants with nonempty interior, for which a generated point can be
    /// placed strictly inside.
    pub const SOLID: [SetKind; 7] = [
        SetKind::Box,
        SetKind::Halfspace,
        SetKind::Ball,
        SetKind::PNormBall,
        SetKind::SecondOrderCone,
        SetKind::ReflectedCone,
        SetKind::Orthant,
    ];

    fn min_dim(self) -> usize {
        match self {
            SetKind::SecondOrderCone | SetKind::ReflectedCone => 2,
            _ => 1,
        }
    }
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

pub fn gaussian_vec<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| normal(rng)).collect()
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_row_major(rows, cols, gaussian_vec(rng, rows * cols)).expect("non-empty shape")
}

fn random_orientation<R: Rng>(rng: &mut R, dim: usize) -> Orientation {
    let mut idx: Vec<i64> = (1..=dim as i64).collect();
    idx.shuffle(rng);
    for v in &mut idx {
        if rng.random_bool(0.5) {
            *v = -*v;
        }
    }
    Orientation::from_signed_indices(&idx).expect("signed permutation")
}

/// A random set of the given kind and dimension, not tied to any point.
pub fn random_set<R: Rng>(rng: &mut R, kind: SetKind, dim: usize) -> ConvexSet {
    let dim = dim.max(kind.min_dim());
    let set = match kind {
        SetKind::Box => {
            let lower: Vec<f64> = gaussian_vec(rng, dim);
            let upper = lower
                .iter()
                .map(|l| l + rng.random_range(0.0..2.0))
                .collect();
            let (lower, upper) = with_infinite_bounds(rng, lower, upper);
            ConvexSet::boxed(lower, upper)
        }
        SetKind::Halfspace => ConvexSet::halfspace(nonzero(rng, dim), normal(rng)),
        SetKind::Hyperplane => ConvexSet::hyperplane(nonzero(rng, dim), normal(rng)),
        SetKind::Affine => {
            let k = rng.random_range(0..dim);
            let cols = (0..k).map(|_| gaussian_vec(rng, dim)).collect();
            ConvexSet::affine(cols, gaussian_vec(rng, dim))
        }
        SetKind::Ball => ConvexSet::ball(gaussian_vec(rng, dim), rng.random_range(0.2..2.0)),
        SetKind::PNormBall => ConvexSet::p_ball(
            gaussian_vec(rng, dim),
            rng.random_range(0.2..2.0),
            rng.random_range(1.1..=10.0),
        ),
        SetKind::SecondOrderCone => ConvexSet::second_order_cone(dim),
        SetKind::ReflectedCone => Ok(ConvexSet::reflected_cone(random_orientation(rng, dim))),
        SetKind::Orthant => ConvexSet::orthant(dim),
    };
    set.expect("generated parameters are valid")
}

fn with_infinite_bounds<R: Rng>(rng: &mut R, mut lower: Vec<f64>, mut upper: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    for i in 0..lower.len() {
        if rng.random_bool(0.2) {
            lower[i] = f64::NEG_INFINITY;
        }
        if rng.random_bool(0.2) {
            upper[i] = f64::INFINITY;
        }
    }
    (lower, upper)
}

fn nonzero<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v = gaussian_vec(rng, dim);
        if norm(&v) > 1e-3 {
            return v;
        }
    }
}

/// A point of `set`, obtained by projecting a random point near it.
pub fn sample_in_set<R: Rng>(rng: &mut R, set: &ConvexSet, spread: f64) -> Vec<f64> {
    let u: Vec<f64> = gaussian_vec(rng, set.dim()).iter().map(|v| spread * v).collect();
    set.project(&u).expect("projection of generated point")
}

/// How the anchor of a generated instance relates to its feasible point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnchorMode {
    /// `v̄` is the feasible point itself.
    Feasible,
    /// `v̄` is the feasible point plus Gaussian noise of this scale.
    Perturbed(f64),
}

#[derive(Debug, Clone)]
pub struct InstanceSpec {
    pub max_dim: usize,
    pub max_blocks: usize,
    pub kinds: Vec<SetKind>,
    pub anchor: AnchorMode,
    /// Probability of an exact identity block when its shape allows it.
    pub identity_prob: f64,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        Self {
            max_dim: 8,
            max_blocks: 4,
            kinds: SetKind::ALL.to_vec(),
            anchor: AnchorMode::Perturbed(2.0),
            identity_prob: 0.15,
        }
    }
}

/// A random instance with nonempty feasible region; returns the instance and
/// one feasible point, which lies in the interior of every solid set.
pub fn random_instance<R: Rng>(rng: &mut R, spec: &InstanceSpec) -> (Instance, Vec<f64>) {
    let n = rng.random_range(1..=spec.max_dim);
    let l = rng.random_range(1..=spec.max_blocks);
    let x_f = nonzero(rng, n);
    let mut blocks = Vec::with_capacity(l);
    for _ in 0..l {
        let kind = *spec.kinds.choose(rng).expect("at least one set kind");
        blocks.push(block_containing(rng, kind, &x_f, spec.identity_prob));
    }
    let anchor = match spec.anchor {
        AnchorMode::Feasible => x_f.clone(),
        AnchorMode::Perturbed(s) => x_f
            .iter()
            .map(|v| v + s * normal(rng))
            .collect(),
    };
    (Instance::new(anchor, blocks).expect("generated instance is valid"), x_f)
}

/// Adds `(target − ⟨row, x⟩)·xᵀ/‖x‖²` to `row` so that `⟨row, x⟩ = target`.
fn steer_row(row: &mut [f64], x: &[f64], target: f64) {
    let c = (target - dot(row, x)) / dot(x, x);
    row.iter_mut().zip(x).for_each(|(r, xi)| *r += c * xi);
}

fn block_containing<R: Rng>(rng: &mut R, kind: SetKind, x_f: &[f64], identity_prob: f64) -> (Matrix, ConvexSet) {
    let n = x_f.len();
    let can_identity = !matches!(
        kind,
        SetKind::SecondOrderCone | SetKind::ReflectedCone | SetKind::Orthant
    );
    let mut a = if can_identity && rng.random_bool(identity_prob) {
        Matrix::identity(n)
    } else {
        let m = rng.random_range(kind.min_dim()..=(n + 1).max(kind.min_dim()));
        gaussian_matrix(rng, m, n)
    };
    let m = a.rows();
    let margin = |rng: &mut R| rng.random_range(0.1..1.0);

    let set = match kind {
        SetKind::SecondOrderCone => {
            let w = a.mul_vec(x_f);
            let r = norm(&w[..m - 1]) + margin(rng);
            steer_row(a.row_mut(m - 1), x_f, r);
            ConvexSet::second_order_cone(m)
        }
        SetKind::ReflectedCone => {
            let q = random_orientation(rng, m);
            let w = a.mul_vec(x_f);
            let z = q.apply_transpose(&w);
            let r = norm(&z[..m - 1]) + margin(rng);
            // output coordinate that carries the cone coordinate
            let e_last = {
                let mut e = vec![0.0; m];
                e[m - 1] = 1.0;
                q.apply(&e)
            };
            let i = e_last.iter().position(|v| *v != 0.0).expect("permutation");
            steer_row(a.row_mut(i), x_f, e_last[i] * r);
            Ok(ConvexSet::reflected_cone(q))
        }
        SetKind::Orthant => {
            for k in 0..m {
                let target = margin(rng);
                if dot(a.row(k), x_f) < 0.1 {
                    steer_row(a.row_mut(k), x_f, target);
                }
            }
            ConvexSet::orthant(m)
        }
        _ => {
            let w = a.mul_vec(x_f);
            match kind {
                SetKind::Box => {
                    let lower = w.iter().map(|v| v - margin(rng)).collect();
                    let upper = w.iter().map(|v| v + margin(rng)).collect();
                    let (lower, upper) = with_infinite_bounds(rng, lower, upper);
                    ConvexSet::boxed(lower, upper)
                }
                SetKind::Halfspace => {
                    let normal = nonzero(rng, m);
                    let b = dot(&normal, &w) + margin(rng);
                    ConvexSet::halfspace(normal, b)
                }
                SetKind::Hyperplane => {
                    let normal = nonzero(rng, m);
                    let b = dot(&normal, &w);
                    ConvexSet::hyperplane(normal, b)
                }
                SetKind::Affine => {
                    let k = rng.random_range(0..=m);
                    let cols = (0..k).map(|_| gaussian_vec(rng, m)).collect();
                    ConvexSet::affine(cols, w)
                }
                SetKind::Ball => {
                    let center: Vec<f64> = w.iter().map(|v| v + 0.5 * normal(rng)).collect();
                    let r = crate::linalg::dist(&w, &center) + margin(rng);
                    ConvexSet::ball(center, r)
                }
                SetKind::PNormBall => {
                    let p = rng.random_range(1.1..=10.0);
                    let center: Vec<f64> = w.iter().map(|v| v + 0.5 * normal(rng)).collect();
                    let offset: Vec<f64> = w.iter().zip(&center).map(|(a, b)| a - b).collect();
                    let r = crate::sets::p_norm(&offset, p) + margin(rng);
                    ConvexSet::p_ball(center, r, p)
                }
                _ => unreachable!(),
            }
        }
    };
    (a, set.expect("generated parameters are valid"))
}

/// Band for the smallest eigenvalue of the Gram matrix of the normalized
/// active normals drawn by [`random_polyhedral_instance`]. Near-parallel
/// normals (small eigenvalue) make the linear rate crawl; near-orthogonal
/// ones make it so fast that only a handful of sweeps sit above rounding.
pub const ACTIVE_GRAM_BAND: (f64, f64) = (0.02, 0.3);

fn min_normalized_gram_eig(normals: &[Vec<f64>]) -> f64 {
    let unit: Vec<Vec<f64>> = normals
        .iter()
        .map(|g| {
            let ng = norm(g);
            g.iter().map(|v| v / ng).collect()
        })
        .collect();
    let g = Matrix::from_rows(&unit).expect("consistent rows");
    crate::oracle::jacobi_eigenvalues(&g.matmul(&g.transpose()))
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// A random polyhedral instance whose projection is known by construction.
///
/// Builds `x*`, between two and four active rows `⟨gⱼ, x⟩ ≤ ⟨gⱼ, x*⟩` with
/// normals spread around a common direction and redrawn until their
/// conditioning falls in [`ACTIVE_GRAM_BAND`], inactive rows with slack,
/// and `v̄ = x* + Σ μⱼgⱼ` with `μⱼ > 0`. Rows are realized either as
/// halfspaces behind random maps or as box rows. At most `max_rows`
/// inequality rows are produced.
pub fn random_polyhedral_instance<R: Rng>(rng: &mut R, max_dim: usize, max_rows: usize) -> (Instance, Vec<f64>) {
    let n = rng.random_range(2..=max_dim.max(2));
    let x_star = gaussian_vec(rng, n);
    let k_active = rng.random_range(2..=n.min(4));
    let total = rng.random_range(k_active + 1..=max_rows.max(k_active + 1));

    let base = {
        let d = nonzero(rng, n);
        let nd = norm(&d);
        d.into_iter().map(|v| v / nd).collect::<Vec<_>>()
    };
    let (lo, hi) = ACTIVE_GRAM_BAND;
    let mut normals: Vec<Vec<f64>>;
    let mut attempts = 0;
    loop {
        normals = (0..k_active)
            .map(|_| {
                base.iter()
                    .map(|b| b + normal(rng) / (n as f64).sqrt())
                    .collect()
            })
            .collect();
        attempts += 1;
        let e = min_normalized_gram_eig(&normals);
        if (lo..=hi).contains(&e) || attempts == 10_000 {
            break;
        }
    }
    let mut rows: Vec<(Vec<f64>, f64, bool)> = Vec::new();
    let mut anchor = x_star.clone();
    for g in normals {
        let h = dot(&g, &x_star);
        let mu = rng.random_range(0.3..1.5);
        crate::linalg::axpy(mu, &g, &mut anchor);
        rows.push((g, h, true));
    }
    while rows.len() < total {
        let g = nonzero(rng, n);
        let h = dot(&g, &x_star) + rng.random_range(0.2..1.5);
        rows.push((g, h, false));
    }
    rows.shuffle(rng);

    let mut blocks = Vec::new();
    let mut iter = rows.into_iter().peekable();
    while let Some((g, h, _)) = iter.next() {
        if rng.random_bool(0.5) {
            let m = rng.random_range(1..=3);
            let mut a = gaussian_matrix(rng, m, n);
            let normal = nonzero(rng, m);
            // make Aᵀ·normal = g
            let at = a.tr_mul_vec(&normal);
            let nn = dot(&normal, &normal);
            for i in 0..m {
                for j in 0..n {
                    a[(i, j)] += normal[i] * (g[j] - at[j]) / nn;
                }
            }
            blocks.push((a, ConvexSet::halfspace(normal, h).expect("nonzero normal")));
        } else {
            let mut grows = vec![g];
            let mut upper = vec![h];
            while grows.len() < 3 && rng.random_bool(0.5) {
                match iter.next() {
                    Some((g2, h2, _)) => {
                        grows.push(g2);
                        upper.push(h2);
                    }
                    None => break,
                }
            }
            let lower = vec![f64::NEG_INFINITY; grows.len()];
            let a = Matrix::from_rows(&grows).expect("consistent rows");
            blocks.push((a, ConvexSet::boxed(lower, upper).expect("valid box")));
        }
    }
    (Instance::new(anchor, blocks).expect("valid instance"), x_star)
}
