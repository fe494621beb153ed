//! A cone and a hyperplane meeting tangentially: the dual iterates follow
//! a closed-form recurrence and `dist²(yᵗ, Argmin d)` decays like `1/t`
//! instead of geometrically.
//!
//! cargo run --release --example sublinear_counterexample [sweeps]

use dykstra_msf::oracle::{nonlinear_dual_solution, nonlinear_instance, RecurrenceState};
use dykstra_msf::rates::{fit_linear_ratio, fit_power_law};
use dykstra_msf::solver::{solve_observed, Reference, SolverConfig};

fn main() -> dykstra_msf::Result<()> {
    let sweeps: usize = std::env::args().nth(1).map_or(100_000, |s| s.parse().expect("sweeps"));
    let inst = nonlinear_instance();
    let cfg = SolverConfig {
        max_sweeps: sweeps,
        step_tol: 0.0,
        residual_tol: 0.0,
        ..SolverConfig::default()
    };
    let reference = Reference {
        d_star: Some(-1.5),
        dual_solution: Some(nonlinear_dual_solution()),
    };

    let mut rec = RecurrenceState::default();
    let mut deviation = 0.0f64;
    let res = solve_observed(&inst, &cfg, &reference, |t, y, _| {
        let step = rec.next().unwrap();
        deviation = deviation.max(y.dist_inf(&step.dual_point()));
        if t.is_power_of_two() && t >= 1024 {
            println!("t = {t:7}  a_t = {:.6e}  t·dist² = {:.6}", step.a, t as f64 * step.dist_sq);
        }
    })?;
    println!("largest deviation from the recurrence: {deviation:.2e}");

    let dist_sq: Vec<f64> = res
        .history
        .iter()
        .map(|r| r.dist_argmin.unwrap().powi(2))
        .collect();
    let power = fit_power_law(&dist_sq, 999)?;
    println!(
        "dist² ~ t^{:.4} (R² = {:.6}) over sweeps {}..={}",
        power.parameter,
        power.r_squared,
        power.window.0 + 1,
        power.window.1 + 1
    );
    let gaps: Vec<f64> = res.history.iter().map(|r| r.gap.unwrap()).collect();
    let linear = fit_linear_ratio(&gaps)?;
    println!("best geometric fit of the gap: r̂ = {:.7}", linear.parameter);
    Ok(())
}
