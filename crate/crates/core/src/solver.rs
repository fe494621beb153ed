//! Dykstra-type projection sweeps and the solve driver.
//!
//! One sweep visits the blocks in their given order. For block `i`, with the
//! running primal point `x` and `w = γᵢyᵢ + Aᵢx`,
//!
//! ```text
//! yᵢ⁺ = yᵢ + γᵢ⁻¹(Aᵢx − Proj_{Cᵢ}(w))
//! x⁺  = x − Aᵢᵀ(yᵢ⁺ − yᵢ)
//! ```
//!
//! which keeps `x = v̄ − 𝐀ᵀ𝐲` after every block. The same dual iterates are
//! produced by cyclic proximal coordinate descent on the dual objective,
//! implemented independently in [`sweep_cgd_reference`].

use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::linalg::{dist, norm, sub};
use crate::model::{DualPoint, Instance};
use crate::sets::ExtendedReal;

/// Relative slack allowed in the sufficient-decrease checks.
pub const DESCENT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub max_sweeps: usize,
    /// Stop once `‖𝐲ᵗ⁺¹ − 𝐲ᵗ‖ ≤ step_tol`.
    pub step_tol: f64,
    /// Stop once `‖𝒢(𝐲ᵗ)‖ ≤ residual_tol`.
    pub residual_tol: f64,
    pub record_every: usize,
    /// Check the sufficient-decrease inequality after every sweep and fail
    /// with [`Error::DescentViolation`] when it does not hold. Debug builds
    /// additionally check it block by block.
    pub assert_descent: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_sweeps: 1_000_000,
            step_tol: 1e-10,
            residual_tol: 1e-9,
            record_every: 1,
            assert_descent: false,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if self.max_sweeps == 0 || self.record_every == 0 {
            return Err(Error::InvalidArgument(
                "max_sweeps and record_every must be positive".into(),
            ));
        }
        if !(self.step_tol >= 0.0 && self.residual_tol >= 0.0) {
            return Err(Error::InvalidArgument(
                "tolerances must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Known quantities of the problem used to populate gap and distance columns.
#[derive(Debug, Clone, Default)]
pub struct Reference {
    pub d_star: Option<f64>,
    /// The (unique) dual minimizer, when known.
    pub dual_solution: Option<DualPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub sweep: usize,
    pub d_value: ExtendedReal,
    pub step_norm: f64,
    pub residual_norm: f64,
    pub x: Vec<f64>,
    pub gap: Option<f64>,
    pub dist_argmin: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    StepTol,
    ResidualTol,
    MaxSweeps,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::StepTol => "step_tol",
            Self::ResidualTol => "residual_tol",
            Self::MaxSweeps => "max_sweeps",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub y: DualPoint,
    pub x: Vec<f64>,
    pub termination: Termination,
    pub sweeps: usize,
    pub history: Vec<SweepRecord>,
}

/// Runs one sweep in place. `on_block(i, y)` is called after block `i` has
/// been updated.
fn sweep_blocks<F>(inst: &Instance, y: &mut DualPoint, x: &mut [f64], mut on_block: F) -> Result<()>
where
    F: FnMut(usize, &DualPoint) -> Result<()>,
{
    for (i, block) in inst.blocks().iter().enumerate() {
        let a = block.matrix();
        let gamma = block.gamma();
        let ax = a.mul_vec(x);
        let yi = &mut y.blocks[i];
        let w: Vec<f64> = yi.iter().zip(&ax).map(|(v, u)| gamma * v + u).collect();
        let p = block.set().project(&w)?;
        // yᵢ + (Aᵢx − p)/γ written as (w − p)/γ: w − p is an exact normal
        // vector at p, so yᵢ stays inside the support's domain (e.g. exactly
        // zero where a box bound is inactive)
        let mut delta = Vec::with_capacity(yi.len());
        for ((v, wk), pk) in yi.iter_mut().zip(&w).zip(&p) {
            let next = (wk - pk) / gamma;
            delta.push(next - *v);
            *v = next;
        }
        if block.is_identity() {
            x.copy_from_slice(&p);
        } else {
            a.tr_mul_acc(-1.0, &delta, x);
        }
        on_block(i, y)?;
    }
    Ok(())
}

/// One Dykstra-type sweep from `(y, x_in)` with `x_in = v̄ − 𝐀ᵀ𝐲`.
/// Returns the new dual point and `x_ℓ`.
pub fn sweep_dykstra(inst: &Instance, y: &DualPoint, x_in: &[f64]) -> Result<(DualPoint, Vec<f64>)> {
    debug_assert!({
        let expect = inst.primal_from_dual(y)?;
        dist(&expect, x_in) <= 1e-8 * (1.0 + norm(&expect))
    });
    let mut y = y.clone();
    let mut x = x_in.to_vec();
    sweep_blocks(inst, &mut y, &mut x, |_, _| Ok(()))?;
    Ok((y, x))
}

/// One sweep of cyclic proximal coordinate gradient descent on the dual
/// objective, with the gradient recomputed from the current dual point at
/// every block.
pub fn sweep_cgd_reference(inst: &Instance, y: &DualPoint) -> Result<DualPoint> {
    let mut y = y.clone();
    for (i, block) in inst.blocks().iter().enumerate() {
        let gamma = block.gamma();
        let grad = inst.gradient(&y)?;
        let u: Vec<f64> = y.blocks[i]
            .iter()
            .zip(&grad.blocks[i])
            .map(|(v, g)| v - g / gamma)
            .collect();
        y.blocks[i] = block.set().prox_scaled_support(&u, 1.0 / gamma)?;
    }
    Ok(y)
}

pub fn solve(inst: &Instance, cfg: &SolverConfig) -> Result<SolveResult> {
    solve_with(inst, cfg, &Reference::default())
}

/// Runs sweeps from `𝐲⁰ = 0`, `x⁰ = v̄` until a stopping rule fires.
pub fn solve_with(inst: &Instance, cfg: &SolverConfig, reference: &Reference) -> Result<SolveResult> {
    solve_observed(inst, cfg, reference, |_, _, _| {})
}

/// [`solve_with`], calling `observe(t, 𝐲ᵗ, xᵗ)` after every sweep whether or
/// not it is recorded.
pub fn solve_observed<F>(
    inst: &Instance,
    cfg: &SolverConfig,
    reference: &Reference,
    mut observe: F,
) -> Result<SolveResult>
where
    F: FnMut(usize, &DualPoint, &[f64]),
{
    cfg.validate()?;
    let gamma_min = inst.gammas().into_iter().fold(f64::INFINITY, f64::min);
    let check_blocks = cfg.assert_descent && cfg!(debug_assertions);

    let mut y = DualPoint::zeros(inst);
    let mut x = inst.anchor().to_vec();
    let mut d_prev = inst.dual_objective(&y)?;
    let mut history = Vec::new();

    for t in 1..=cfg.max_sweeps {
        let y_prev = y.clone();
        if check_blocks {
            let mut d_block = d_prev;
            let mut before = y_prev.clone();
            sweep_blocks(inst, &mut y, &mut x, |i, current| {
                let d_now = inst.dual_objective(current)?;
                let step = dist(&current.blocks[i], &before.blocks[i]);
                check_descent(t, d_block, d_now, inst.blocks()[i].gamma(), step)?;
                before.blocks[i].clone_from(&current.blocks[i]);
                d_block = d_now;
                Ok(())
            })?;
        } else {
            sweep_blocks(inst, &mut y, &mut x, |_, _| Ok(()))?;
        }

        observe(t, &y, &x);
        let step_norm = y.dist(&y_prev);
        let last = t == cfg.max_sweeps;
        let wants_record = t % cfg.record_every == 0;
        let need_residual = cfg.residual_tol > 0.0 || wants_record || last;
        let residual_norm = if need_residual {
            inst.residual_map(&y)?.norm()
        } else {
            f64::NAN
        };

        let termination = if step_norm <= cfg.step_tol {
            Some(Termination::StepTol)
        } else if residual_norm <= cfg.residual_tol {
            Some(Termination::ResidualTol)
        } else if last {
            Some(Termination::MaxSweeps)
        } else {
            None
        };

        let need_d = cfg.assert_descent || wants_record || termination.is_some();
        let d_value = if need_d {
            inst.dual_objective(&y)?
        } else {
            ExtendedReal::Infinity
        };
        if cfg.assert_descent {
            check_descent(t, d_prev, d_value, gamma_min, step_norm)?;
        }
        if need_d {
            d_prev = d_value;
        }

        if wants_record || termination.is_some() {
            let residual_norm = if residual_norm.is_nan() {
                inst.residual_map(&y)?.norm()
            } else {
                residual_norm
            };
            history.push(SweepRecord {
                sweep: t,
                d_value,
                step_norm,
                residual_norm,
                x: x.clone(),
                gap: match (d_value, reference.d_star) {
                    (ExtendedReal::Finite(d), Some(ds)) => Some(d - ds),
                    _ => None,
                },
                dist_argmin: reference.dual_solution.as_ref().map(|ys| y.dist(ys)),
            });
        }

        if let Some(termination) = termination {
            return Ok(SolveResult {
                y,
                x,
                termination,
                sweeps: t,
                history,
            });
        }
    }
    unreachable!("the last sweep always terminates")
}

/// `d_next − d_prev ≤ −(γ/2)·step² + slack`; skipped when either value is
/// `+∞` (indicator supports evaluated at points just outside their domain).
fn check_descent(sweep: usize, d_prev: ExtendedReal, d_next: ExtendedReal, gamma: f64, step: f64) -> Result<()> {
    let (Some(a), Some(b)) = (d_prev.finite(), d_next.finite()) else {
        return Ok(());
    };
    let required = 0.5 * gamma * step * step;
    let slack = DESCENT_SLACK * (1.0 + a.abs());
    if b - a > -required + slack {
        return Err(Error::DescentViolation {
            sweep,
            decrease: a - b,
            required: required - slack,
        });
    }
    Ok(())
}

fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

/// Column names of the history CSV, without the optional `x_*` columns.
pub const HISTORY_COLUMNS: [&str; 6] = [
    "sweep",
    "d_value",
    "step_norm",
    "residual_norm",
    "gap",
    "dist_argmin",
];

/// Writes the history with 17 significant digits per number; `gap` and
/// `dist_argmin` are left empty when unknown.
pub fn write_history_csv<W: Write>(records: &[SweepRecord], out: W, emit_x: bool) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let n = records.first().map_or(0, |r| r.x.len());
    let mut header: Vec<String> = HISTORY_COLUMNS.iter().map(|s| s.to_string()).collect();
    if emit_x {
        header.extend((0..n).map(|i| format!("x_{i}")));
    }
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.sweep.to_string(),
            fmt_num(r.d_value.to_f64()),
            fmt_num(r.step_norm),
            fmt_num(r.residual_norm),
            r.gap.map_or(String::new(), fmt_num),
            r.dist_argmin.map_or(String::new(), fmt_num),
        ];
        if emit_x {
            row.extend(r.x.iter().map(|&v| fmt_num(v)));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Bound `M̂ = ℓL_g + (ℓ + Σγᵢ)√ℓ` relating `‖𝒢(𝐲ᵗ)‖` to `‖𝐲ᵗ⁺¹ − 𝐲ᵗ‖`.
pub fn residual_step_bound(inst: &Instance) -> f64 {
    let l = inst.num_blocks() as f64;
    let gamma_sum: f64 = inst.gammas().iter().sum();
    l * inst.gradient_lipschitz() + (l + gamma_sum) * l.sqrt()
}

/// `‖x − (v̄ − 𝐀ᵀ𝐲)‖`
pub fn primal_identity_error(inst: &Instance, y: &DualPoint, x: &[f64]) -> Result<f64> {
    Ok(norm(&sub(x, &inst.primal_from_dual(y)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::sets::{ConvexSet, Orientation};

    fn example_5_2() -> Instance {
        let c1 = ConvexSet::reflected_cone(Orientation::from_signed_indices(&[1, 2, -3]).unwrap());
        let c2 = ConvexSet::hyperplane(vec![1.0, 0.0, 0.0], 0.0).unwrap();
        Instance::new(
            vec![1.0, -1.0, 1.0],
            vec![(Matrix::identity(3), c1), (Matrix::identity(3), c2)],
        )
        .unwrap()
    }

    #[test]
    fn feasible_anchor_is_a_fixed_point() {
        let inst = Instance::new(
            vec![0.2, -0.1],
            vec![
                (Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap(), ConvexSet::halfspace(vec![1.0], 1.0).unwrap()),
                (Matrix::identity(2), ConvexSet::ball(vec![0.0, 0.0], 1.0).unwrap()),
            ],
        )
        .unwrap();
        let y0 = DualPoint::zeros(&inst);
        let (y1, x1) = sweep_dykstra(&inst, &y0, inst.anchor()).unwrap();
        assert_eq!(y1, y0);
        assert_eq!(x1, inst.anchor());
        let res = solve(&inst, &SolverConfig::default()).unwrap();
        assert_eq!(res.sweeps, 1);
        assert_eq!(res.termination, Termination::StepTol);
        assert_eq!(res.history[0].step_norm, 0.0);
        assert_eq!(res.x, inst.anchor());
    }

    #[test]
    fn first_sweep_on_cone_example() {
        let inst = example_5_2();
        let (y, _) = sweep_dykstra(&inst, &DualPoint::zeros(&inst), inst.anchor()).unwrap();
        let s2 = 2f64.sqrt();
        let a1 = 0.5 * (1.0 + 1.0 / s2);
        let expect = [[a1, -0.5 * (1.0 + 1.0 / s2), 0.5 * (1.0 + s2)], [1.0 - a1, 0.0, 0.0]];
        for (got, want) in y.blocks.iter().zip(&expect) {
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() < 1e-15, "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn cgd_reference_is_a_gradient_step_for_the_origin() {
        // C = {0}: σ ≡ 0, so the update is y − γ⁻¹∇g
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        let inst = Instance::new(
            vec![1.0, -1.0],
            vec![(a, ConvexSet::boxed(vec![0.0, 0.0], vec![0.0, 0.0]).unwrap())],
        )
        .unwrap();
        let y = DualPoint::new(vec![vec![0.3, -0.2]]);
        let gamma = inst.gammas()[0];
        let grad = inst.gradient(&y).unwrap();
        let next = sweep_cgd_reference(&inst, &y).unwrap();
        for k in 0..2 {
            let want = y.blocks[0][k] - grad.blocks[0][k] / gamma;
            assert!((next.blocks[0][k] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn cgd_first_step_on_tight_example() {
        let a1 = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let inst = Instance::new(
            vec![2.0, 0.0],
            vec![(a1, ConvexSet::p_ball(vec![0.0, 0.0], 1.0, 1.5).unwrap())],
        )
        .unwrap();
        let gamma = inst.gammas()[0];
        let y1 = sweep_cgd_reference(&inst, &DualPoint::zeros(&inst)).unwrap();
        // prox_{γ⁻¹σ}(γ⁻¹A₁v̄) = γ⁻¹(2, 0) − γ⁻¹Proj((2, 0)) = γ⁻¹(1, 0)
        assert!((y1.blocks[0][0] - 1.0 / gamma).abs() < 1e-14);
        assert_eq!(y1.blocks[0][1], 0.0);
        let (yd, _) = sweep_dykstra(&inst, &DualPoint::zeros(&inst), inst.anchor()).unwrap();
        assert!(yd.dist_inf(&y1) <= 1e-12);
    }

    #[test]
    fn rejects_invalid_config() {
        let inst = example_5_2();
        let cfg = SolverConfig {
            record_every: 0,
            ..SolverConfig::default()
        };
        assert!(solve(&inst, &cfg).is_err());
        let cfg = SolverConfig {
            step_tol: f64::NAN,
            ..SolverConfig::default()
        };
        assert!(solve(&inst, &cfg).is_err());
    }

    #[test]
    fn descent_check_flags_increase() {
        let err = check_descent(3, ExtendedReal::Finite(1.0), ExtendedReal::Finite(1.1), 1.0, 0.0);
        assert!(matches!(err, Err(Error::DescentViolation { sweep: 3, .. })));
        assert!(check_descent(1, ExtendedReal::Finite(1.0), ExtendedReal::Finite(0.4), 1.0, 1.0).is_ok());
        assert!(check_descent(1, ExtendedReal::Finite(1.0), ExtendedReal::Finite(0.6), 1.0, 1.0).is_err());
        assert!(check_descent(1, ExtendedReal::Infinity, ExtendedReal::Finite(5.0), 1.0, 1.0).is_ok());
    }

    #[test]
    fn history_csv_is_deterministic() {
        let rec = SweepRecord {
            sweep: 1,
            d_value: ExtendedReal::Infinity,
            step_norm: 0.1,
            residual_norm: 1.0,
            x: vec![1.0, -2.5],
            gap: None,
            dist_argmin: Some(0.25),
        };
        let mut buf = Vec::new();
        write_history_csv(&[rec], &mut buf, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "sweep,d_value,step_norm,residual_norm,gap,dist_argmin,x_0,x_1\n\
             1,inf,1.0000000000000001e-1,1.0000000000000000e0,,2.5000000000000000e-1,1.0000000000000000e0,-2.5000000000000000e0\n"
        );
    }
}
