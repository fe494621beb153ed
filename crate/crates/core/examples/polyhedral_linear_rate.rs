//! Linear convergence on polyhedral instances.
//!
//! Generates random polyhedral problems, solves each with the active-set
//! oracle and with the sweep solver, then fits `gapₜ₊₁ ≈ r̂·gapₜ` to the
//! solver's dual gap history.
//!
//! cargo run --release --example polyhedral_linear_rate [count] [seed]

use dykstra_msf::linalg::dist;
use dykstra_msf::oracle::random::random_polyhedral_instance;
use dykstra_msf::oracle::{solve_qp_activeset, PolyhedralQP};
use dykstra_msf::rates::{fit_linear_ratio_above, gap_noise_floor};
use dykstra_msf::solver::{solve_with, Reference, SolverConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dykstra_msf::Result<()> {
    let mut args = std::env::args().skip(1);
    let count: usize = args.next().map_or(20, |s| s.parse().expect("count"));
    let seed: u64 = args.next().map_or(2024, |s| s.parse().expect("seed"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let cfg = SolverConfig {
        max_sweeps: 100_000,
        step_tol: 1e-14,
        residual_tol: 1e-12,
        ..SolverConfig::default()
    };
    println!("  #  n  blocks  sweeps   |x - x*|      r_hat     R^2    points");
    for k in 0..count {
        let (inst, _) = random_polyhedral_instance(&mut rng, 6, 10);
        let oracle = solve_qp_activeset(&PolyhedralQP::from_instance(&inst)?)?;
        let d_star = inst.optimal_value_from_primal(&oracle.x);
        let reference = Reference {
            d_star: Some(d_star),
            dual_solution: None,
        };
        let res = solve_with(&inst, &cfg, &reference)?;
        // a missing gap means d was +∞, which the fit treats as a cut point
        let gaps: Vec<f64> = res
            .history
            .iter()
            .map(|r| r.gap.unwrap_or(f64::INFINITY))
            .collect();
        let err = dist(&res.x, &oracle.x);
        match fit_linear_ratio_above(&gaps, gap_noise_floor(d_star)) {
            Ok(fit) => println!(
                "{k:3} {:2} {:6} {:8} {err:10.2e} {:10.6} {:7.4} {:6}",
                inst.dim(),
                inst.num_blocks(),
                res.sweeps,
                fit.parameter,
                fit.r_squared,
                fit.window.1 + 1
            ),
            Err(e) => println!(
                "{k:3} {:2} {:6} {:8} {err:10.2e}   no fit: {e}",
                inst.dim(),
                inst.num_blocks(),
                res.sweeps
            ),
        }
    }
    Ok(())
}
