//! With every `Aᵢ = I` the solver is Dykstra's classical algorithm for the
//! projection onto `C₁ ∩ … ∩ C_ℓ`. Compares it with a textbook
//! implementation that keeps one correction vector per set.
//!
//! cargo run --example classical_dykstra

use dykstra_msf::linalg::{dist, Matrix};
use dykstra_msf::model::{DualPoint, Instance};
use dykstra_msf::sets::ConvexSet;
use dykstra_msf::solver::sweep_dykstra;

fn main() -> dykstra_msf::Result<()> {
    let sets = [
        ConvexSet::ball(vec![0.0, 0.0], 1.0)?,
        ConvexSet::halfspace(vec![1.0, 1.0], 1.2)?,
        ConvexSet::boxed(vec![-0.2, -2.0], vec![2.0, 2.0])?,
    ];
    let v = vec![1.5, 1.0];
    let inst = Instance::new(
        v.clone(),
        sets.iter().map(|s| (Matrix::identity(2), s.clone())).collect(),
    )?;

    // textbook form: xᵢ = Proj_i(x_{i−1} + qᵢ), qᵢ ← x_{i−1} + qᵢ − xᵢ
    let mut x_ref = v.clone();
    let mut q = vec![vec![0.0; 2]; sets.len()];

    let mut y = DualPoint::zeros(&inst);
    let mut x = v;
    for t in 1..=200 {
        (y, x) = sweep_dykstra(&inst, &y, &x)?;
        for (set, qi) in sets.iter().zip(q.iter_mut()) {
            let w: Vec<f64> = x_ref.iter().zip(qi.iter()).map(|(a, b)| a + b).collect();
            let next = set.project(&w)?;
            *qi = w.iter().zip(&next).map(|(a, b)| a - b).collect();
            x_ref = next;
        }
        if t <= 5 || t % 50 == 0 {
            println!("t = {t:3}  x = [{:+.12}, {:+.12}]  |x - x_ref| = {:.1e}", x[0], x[1], dist(&x, &x_ref));
        }
    }
    // the dual blocks are the correction vectors
    let worst = y
        .blocks
        .iter()
        .zip(&q)
        .map(|(a, b)| dist(a, b))
        .fold(0.0, f64::max);
    println!("largest |yᵢ - qᵢ| after 200 sweeps: {worst:.1e}");
    println!("max infeasibility of x: {:.1e}", inst.max_infeasibility(&x)?);
    Ok(())
}
