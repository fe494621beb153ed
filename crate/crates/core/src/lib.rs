//! Projection onto `⋂ᵢ Aᵢ⁻¹Cᵢ` with a Dykstra-type method.
//!
//! Given an anchor `v̄ ∈ ℝⁿ` and blocks `(Aᵢ, Cᵢ)` with closed convex
//! `Cᵢ ⊆ ℝ^{mᵢ}`, the library computes
//!
//! ```text
//! x* = argmin ½‖x − v̄‖²  s.t.  Aᵢx ∈ Cᵢ,  i = 1, …, ℓ
//! ```
//!
//! touching each `Cᵢ` only through its projection and each `Aᵢ` only through
//! products with `Aᵢ` and `Aᵢᵀ`. The iteration is cyclic block coordinate
//! descent on the dual objective; [`solver`] records per-sweep diagnostics
//! and [`rates`] fits linear or power-law convergence models to them.
//!
//! ```
//! use dykstra_msf::{linalg::Matrix, model::Instance, sets::ConvexSet, solver};
//!
//! let a = Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
//! let inst = Instance::new(
//!     vec![2.0, 2.0],
//!     vec![(a, ConvexSet::halfspace(vec![1.0], 1.0).unwrap())],
//! )
//! .unwrap();
//! let res = solver::solve(&inst, &solver::SolverConfig::default()).unwrap();
//! assert!((res.x[0] - 0.5).abs() < 1e-8 && (res.x[1] - 0.5).abs() < 1e-8);
//! ```

pub mod cli;
pub mod error;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod rates;
pub mod sets;
pub mod solver;

pub use error::{Error, Result};
