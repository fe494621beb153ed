//! Block step constants `γᵢ = (1 + δ)·λ_max(AᵢᵀAᵢ)` from power iteration,
//! checked against a Jacobi eigensolver.
//!
//! cargo run --release --example gamma_estimation

use dykstra_msf::linalg::Matrix;
use dykstra_msf::model::{compute_gamma, lambda_max_gram, GAMMA_SAFETY};
use dykstra_msf::oracle::eig_max_sym;
use dykstra_msf::oracle::random::gaussian_matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> dykstra_msf::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    println!("γ(I₄) = {}  (identity blocks skip the safety factor)", compute_gamma(&Matrix::identity(4))?);
    println!("safety factor δ = {GAMMA_SAFETY:e}\n");
    println!(" rows cols     power iteration           Jacobi   rel diff");
    let mut worst = 0.0f64;
    for k in 0..100 {
        let (m, n) = (rng.random_range(1..=20), rng.random_range(1..=30));
        let a = gaussian_matrix(&mut rng, m, n);
        let power = lambda_max_gram(&a)?;
        let jacobi = eig_max_sym(&a.gram());
        let rel = (power - jacobi).abs() / jacobi;
        worst = worst.max(rel);
        if k < 8 {
            println!("{m:5} {n:4} {power:19.12} {jacobi:16.12} {rel:10.1e}");
        }
    }
    println!("\nlargest relative difference over 100 matrices: {worst:.2e}");
    Ok(())
}
