//! Along `y^ε = (1, ε)` on the p-ball instance the dual gap grows like
//! `ε^{p/(p−1)}` while the distance to the minimizer is exactly `ε`, so the
//! error-bound exponent cannot be improved.
//!
//! cargo run --example exponent_tightness

use dykstra_msf::cli::default_eps_grid;
use dykstra_msf::oracle::example_tight;
use dykstra_msf::rates::fit_path_exponent;

fn main() -> dykstra_msf::Result<()> {
    let grid = default_eps_grid();
    println!("   p   fitted   p/(p-1)   dist exp      R²");
    for p in [1.1, 1.25, 1.5, 1.75, 2.0] {
        let fit = match fit_path_exponent(p, &grid) {
            Ok(fit) => fit,
            Err(e) => {
                println!("{p:4.2}  {e}");
                continue;
            }
        };
        println!(
            "{p:4.2} {:8.4} {:9.4} {:10.6} {:9.6}",
            fit.exponent, fit.expected, fit.dist_exponent, fit.r_squared
        );
    }

    println!("\nclosed form at p = 1.5:");
    for eps in [1e-1, 1e-2, 1e-3] {
        let (gap, d) = example_tight(1.5, eps)?;
        println!("ε = {eps:.0e}  gap = {gap:.6e}  gap/ε³ = {:.6}  dist = {d:.0e}", gap / eps.powi(3));
    }
    Ok(())
}
