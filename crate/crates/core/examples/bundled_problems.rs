//! Regenerates the problem files under `problems/`.
//!
//! Each `<name>.json` is a problem file accepted by `dykstra-msf solve`;
//! `<name>.solution.json` holds the known projection `x_star` and the
//! optimal dual value `d_star`.
//!
//! cargo run --example bundled_problems [out_dir]

use std::fs;
use std::path::{Path, PathBuf};

use dykstra_msf::cli::{ProblemFile, SolutionFile};
use dykstra_msf::linalg::Matrix;
use dykstra_msf::model::Instance;
use dykstra_msf::oracle::random::random_polyhedral_instance;
use dykstra_msf::oracle::{nonlinear_instance, solve_qp_activeset, tight_instance, PolyhedralQP};
use dykstra_msf::sets::ConvexSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn write(dir: &Path, name: &str, inst: &Instance, x_star: Vec<f64>) -> dykstra_msf::Result<()> {
    let problem = ProblemFile::from_instance(inst);
    fs::write(dir.join(format!("{name}.json")), problem.to_json() + "\n")?;
    let solution = SolutionFile {
        d_star: inst.optimal_value_from_primal(&x_star) + 0.0,
        x_star,
    };
    let text = serde_json::to_string_pretty(&solution).expect("serializable");
    fs::write(dir.join(format!("{name}.solution.json")), text + "\n")?;
    println!("wrote {name}");
    Ok(())
}

fn feasible_anchor() -> dykstra_msf::Result<Instance> {
    let v = vec![0.5, 0.25, -0.5];
    Instance::new(
        v,
        vec![
            (
                Matrix::identity(3),
                ConvexSet::boxed(vec![-1.0, 0.0, f64::NEG_INFINITY], vec![1.0, 1.0, 0.0])?,
            ),
            (
                Matrix::from_rows(&[vec![1.0, 1.0, 1.0]])?,
                ConvexSet::halfspace(vec![1.0], 1.0)?,
            ),
            (
                Matrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 1.0]])?,
                ConvexSet::ball(vec![0.0, 0.0], 1.0)?,
            ),
            (
                Matrix::from_rows(&[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]])?,
                ConvexSet::second_order_cone(2)?,
            ),
        ],
    )
}

fn main() -> dykstra_msf::Result<()> {
    let dir: PathBuf = std::env::args()
        .nth(1)
        .map_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("problems"), PathBuf::from);
    fs::create_dir_all(&dir)?;

    write(&dir, "example_4_1_p1.5", &tight_instance(1.5)?, vec![1.0, 0.0])?;
    write(&dir, "example_4_1_p2", &tight_instance(2.0)?, vec![1.0, 0.0])?;
    write(&dir, "example_5_2", &nonlinear_instance(), vec![0.0; 3])?;
    let inst = feasible_anchor()?;
    let v = inst.anchor().to_vec();
    write(&dir, "feasible_anchor", &inst, v)?;

    for (k, seed) in [11u64, 12, 13].into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (inst, _) = random_polyhedral_instance(&mut rng, 6, 10);
        let oracle = solve_qp_activeset(&PolyhedralQP::from_instance(&inst)?)?;
        write(&dir, &format!("polyhedral_{}", k + 1), &inst, oracle.x)?;
    }
    Ok(())
}
