//! The Dykstra-type sweep and cyclic proximal coordinate descent on the dual
//! generate the same dual iterates. Runs both side by side on random
//! instances and reports the largest disagreement.
//!
//! cargo run --release --example dykstra_vs_cgd [instances] [sweeps]

use dykstra_msf::model::DualPoint;
use dykstra_msf::oracle::random::{random_instance, InstanceSpec};
use dykstra_msf::solver::{sweep_cgd_reference, sweep_dykstra};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dykstra_msf::Result<()> {
    let mut args = std::env::args().skip(1);
    let count: usize = args.next().map_or(100, |s| s.parse().expect("instances"));
    let sweeps: usize = args.next().map_or(50, |s| s.parse().expect("sweeps"));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let spec = InstanceSpec::default();

    let mut worst = 0.0f64;
    for k in 0..count {
        let (inst, _) = random_instance(&mut rng, &spec);
        let mut y_dyk = DualPoint::zeros(&inst);
        let mut x = inst.anchor().to_vec();
        let mut y_cgd = y_dyk.clone();
        let mut gap = 0.0f64;
        for _ in 0..sweeps {
            (y_dyk, x) = sweep_dykstra(&inst, &y_dyk, &x)?;
            y_cgd = sweep_cgd_reference(&inst, &y_cgd)?;
            gap = gap.max(y_dyk.dist_inf(&y_cgd) / (1.0 + y_cgd.norm()));
        }
        if k < 10 {
            let kinds: Vec<&str> = inst.blocks().iter().map(|b| b.set().kind_name()).collect();
            println!("{k:3}  n={}  {:<40} max rel diff {gap:.2e}", inst.dim(), kinds.join(","));
        }
        worst = worst.max(gap);
    }
    println!("largest relative ∞-norm difference over {count} instances: {worst:.3e}");
    Ok(())
}
