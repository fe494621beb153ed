//! Projection, support function and membership for every set in the catalog.
//!
//! cargo run --example project_sets

use dykstra_msf::sets::{ConvexSet, Orientation};

fn main() -> dykstra_msf::Result<()> {
    let inf = f64::INFINITY;
    let sets = [
        ConvexSet::boxed(vec![-1.0, 0.0, -inf], vec![1.0, inf, 0.5])?,
        ConvexSet::halfspace(vec![1.0, 1.0, 1.0], 1.0)?,
        ConvexSet::hyperplane(vec![1.0, -1.0, 0.0], 0.0)?,
        ConvexSet::affine(vec![vec![1.0, 1.0, 0.0]], vec![0.0, 0.0, 1.0])?,
        ConvexSet::ball(vec![0.0, 0.0, 0.0], 1.0)?,
        ConvexSet::p_ball(vec![0.0, 0.0, 0.0], 1.0, 1.5)?,
        ConvexSet::second_order_cone(3)?,
        // {x : x₃ ≤ −‖(x₁, x₂)‖}
        ConvexSet::reflected_cone(Orientation::from_signed_indices(&[1, 2, -3])?),
        ConvexSet::orthant(3)?,
    ];
    let u = [2.0, -1.0, 0.75];
    let y = [0.5, 0.5, 0.5];

    println!("u = {u:?}, y = {y:?}");
    println!("{:<14} {:<52} {:>10} {:>8}", "set", "Proj(u)", "σ(y)", "u ∈ C");
    for set in &sets {
        let p = set.project(&u)?;
        let shown: Vec<String> = p.iter().map(|v| format!("{v:+.6}")).collect();
        println!(
            "{:<14} [{:<50}] {:>10} {:>8}",
            set.kind_name(),
            shown.join(", "),
            set.support(&y)?.to_string(),
            set.contains(&u, 1e-9)?
        );
    }

    // Moreau: u = Proj_C(u) + prox_{σ_C}(u)
    let ball = &sets[5];
    let prox = ball.prox_scaled_support(&u, 1.0)?;
    let proj = ball.project(&u)?;
    let sum: Vec<f64> = prox.iter().zip(&proj).map(|(a, b)| a + b).collect();
    println!("\nMoreau check on the 1.5-ball: prox + proj = {sum:?}");
    Ok(())
}
