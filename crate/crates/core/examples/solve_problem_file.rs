//! Loads a problem file, solves it and compares against the stored solution
//! when one sits next to it.
//!
//! cargo run --example solve_problem_file [problem.json]

use std::path::{Path, PathBuf};

use dykstra_msf::cli::{ProblemFile, SolutionFile};
use dykstra_msf::linalg::dist;
use dykstra_msf::solver::{solve_with, write_history_csv, Reference, SolverConfig};

fn main() -> dykstra_msf::Result<()> {
    let path: PathBuf = std::env::args().nth(1).map_or_else(
        || Path::new(env!("CARGO_MANIFEST_DIR")).join("problems/polyhedral_1.json"),
        PathBuf::from,
    );
    let inst = ProblemFile::read(&path)?.to_instance()?;
    println!(
        "{}: n = {}, {} blocks, gammas {:?}",
        path.display(),
        inst.dim(),
        inst.num_blocks(),
        inst.gammas()
    );

    let solution = SolutionFile::read(&path.with_extension("solution.json")).ok();
    let reference = Reference {
        d_star: solution.as_ref().map(|s| s.d_star),
        dual_solution: None,
    };
    let cfg = SolverConfig {
        record_every: 10,
        ..SolverConfig::default()
    };
    let res = solve_with(&inst, &cfg, &reference)?;
    println!("stopped by {} after {} sweeps", res.termination, res.sweeps);
    println!("x = {:?}", res.x);
    println!("max infeasibility {:e}", inst.max_infeasibility(&res.x)?);
    if let Some(s) = &solution {
        println!("|x - x*| = {:e}", dist(&res.x, &s.x_star));
    }

    println!("\nlast recorded sweeps:");
    let tail = &res.history[res.history.len().saturating_sub(3)..];
    write_history_csv(tail, std::io::stdout().lock(), false)?;
    Ok(())
}
