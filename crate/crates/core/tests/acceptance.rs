//! Acceptance gate: runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::time::{Duration, Instant};

use dykstra_msf::cli::default_eps_grid;
use dykstra_msf::linalg::{dist, dot, norm, sub};
use dykstra_msf::model::{lambda_max_gram, compute_gamma, DualPoint, Instance, GAMMA_SAFETY};
use dykstra_msf::oracle::random::{
    gaussian_matrix, gaussian_vec, random_instance, random_polyhedral_instance, random_set, sample_in_set,
    AnchorMode, InstanceSpec, SetKind,
};
use dykstra_msf::oracle::{
    eig_max_sym, nonlinear_dual_solution, nonlinear_instance, solve_qp_activeset, PolyhedralQP, RecurrenceState,
};
use dykstra_msf::rates::{fit_linear_ratio_above, fit_path_exponent, fit_power_law, gap_noise_floor};
use dykstra_msf::sets::{ConvexSet, ExtendedReal};
use dykstra_msf::solver::{
    solve, solve_observed, solve_with, sweep_cgd_reference, sweep_dykstra, Reference, SolverConfig, Termination,
    DESCENT_SLACK,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

/// Descent bookkeeping shared by every run below.
#[derive(Default)]
struct DescentLog {
    checked: usize,
    violations: usize,
    infinite: usize,
}

impl DescentLog {
    fn record(&mut self, d_prev: ExtendedReal, d_next: ExtendedReal, gamma_min: f64, step: f64) {
        let (Some(a), Some(b)) = (d_prev.finite(), d_next.finite()) else {
            self.infinite += 1;
            return;
        };
        self.checked += 1;
        if b - a > -0.5 * gamma_min * step * step + DESCENT_SLACK * (1.0 + a.abs()) {
            self.violations += 1;
        }
    }

    fn record_run(&mut self, inst: &Instance, values: &[ExtendedReal], steps: &[f64]) {
        let gamma_min = inst.gammas().into_iter().fold(f64::INFINITY, f64::min);
        let mut prev = ExtendedReal::ZERO; // d(0)
        for (&d, &s) in values.iter().zip(steps) {
            self.record(prev, d, gamma_min, s);
            prev = d;
        }
    }
}

fn every_sweep(max_sweeps: usize) -> SolverConfig {
    SolverConfig {
        max_sweeps,
        step_tol: 0.0,
        residual_tol: 0.0,
        record_every: 1,
        assert_descent: false,
    }
}

fn criterion_1(log: &mut DescentLog) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let spec = InstanceSpec::default();
    let mut worst = 0.0f64;
    let mut kinds = std::collections::BTreeSet::new();
    for _ in 0..100 {
        let (inst, _) = random_instance(&mut rng, &spec);
        kinds.extend(inst.blocks().iter().map(|b| b.set().kind_name()));
        let mut y = DualPoint::zeros(&inst);
        let mut x = inst.anchor().to_vec();
        let mut z = y.clone();
        let (mut values, mut steps) = (Vec::new(), Vec::new());
        for _ in 0..50 {
            let (y_next, x_next) = sweep_dykstra(&inst, &y, &x).unwrap();
            z = sweep_cgd_reference(&inst, &z).unwrap();
            worst = worst.max(y_next.dist_inf(&z));
            steps.push(y_next.dist(&y));
            values.push(inst.dual_objective(&y_next).unwrap());
            (y, x) = (y_next, x_next);
        }
        log.record_run(&inst, &values, &steps);
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 1e-12 && elapsed < Duration::from_secs(10),
        detail: format!(
            "max ∞-norm difference {worst:.2e} over 100 instances × 50 sweeps ({} set kinds), {:.2}s",
            kinds.len(),
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_2(log: &DescentLog) -> Outcome {
    Outcome {
        pass: log.violations == 0 && log.infinite == 0 && log.checked > 0,
        detail: format!(
            "{} violations in {} checked sweeps, {} sweeps with d = +inf",
            log.violations, log.checked, log.infinite
        ),
    }
}

fn criterion_3(log: &mut DescentLog) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cfg = SolverConfig {
        max_sweeps: 100_000,
        step_tol: 1e-14,
        residual_tol: 1e-12,
        record_every: 1,
        assert_descent: false,
    };
    let (mut worst_x, mut worst_r, mut worst_r2, mut min_pts, mut failures) = (0.0f64, 0.0f64, 1.0f64, usize::MAX, 0);
    for k in 0..20 {
        let (inst, _) = random_polyhedral_instance(&mut rng, 6, 10);
        let qp = PolyhedralQP::from_instance(&inst).unwrap();
        assert!(qp.rows.len() <= 10 && inst.dim() <= 6);
        let oracle = solve_qp_activeset(&qp).unwrap();
        let d_star = inst.optimal_value_from_primal(&oracle.x);
        let reference = Reference {
            d_star: Some(d_star),
            dual_solution: None,
        };
        let res = solve_with(&inst, &cfg, &reference).unwrap();
        let values: Vec<ExtendedReal> = res.history.iter().map(|r| r.d_value).collect();
        let steps: Vec<f64> = res.history.iter().map(|r| r.step_norm).collect();
        log.record_run(&inst, &values, &steps);

        let err = dist(&res.x, &oracle.x);
        worst_x = worst_x.max(err);
        let gaps: Vec<f64> = res.history.iter().map(|r| r.gap.unwrap_or(f64::INFINITY)).collect();
        match fit_linear_ratio_above(&gaps, gap_noise_floor(d_star)) {
            Ok(fit) => {
                worst_r = worst_r.max(fit.parameter);
                worst_r2 = worst_r2.min(fit.r_squared);
                min_pts = min_pts.min(fit.window.1 + 1);
                if err > 1e-6 || fit.parameter >= 1.0 || fit.r_squared <= 0.95 {
                    failures += 1;
                }
            }
            Err(e) => {
                eprintln!("  instance {k}: {e}");
                failures += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: failures == 0 && elapsed < Duration::from_secs(30),
        detail: format!(
            "{failures} failing of 20; max |x - x*| {worst_x:.2e}, max r̂ {worst_r:.6}, min R² {worst_r2:.6}, \
             min fit length {min_pts}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_4(log: &mut DescentLog) -> Outcome {
    let start = Instant::now();
    let inst = nonlinear_instance();
    let reference = Reference {
        d_star: Some(-1.5),
        dual_solution: Some(nonlinear_dual_solution()),
    };
    let mut rec = RecurrenceState::default();
    let mut deviation = 0.0f64;
    let res = solve_observed(&inst, &every_sweep(100_000), &reference, |t, y, _| {
        let step = rec.next().unwrap();
        if t <= 10_000 {
            deviation = deviation.max(y.dist_inf(&step.dual_point()));
        }
    })
    .unwrap();
    let values: Vec<ExtendedReal> = res.history.iter().map(|r| r.d_value).collect();
    let steps: Vec<f64> = res.history.iter().map(|r| r.step_norm).collect();
    log.record_run(&inst, &values, &steps);

    let dist_sq: Vec<f64> = res.history.iter().map(|r| r.dist_argmin.unwrap().powi(2)).collect();
    let power = fit_power_law(&dist_sq, 999).unwrap();
    let gaps: Vec<f64> = res.history.iter().map(|r| r.gap.unwrap()).collect();
    let linear = fit_linear_ratio_above(&gaps, gap_noise_floor(-1.5));
    let r_hat = linear.as_ref().map_or(f64::NAN, |f| f.parameter);
    let elapsed = start.elapsed();
    Outcome {
        pass: deviation <= 1e-10
            && (power.parameter + 1.0).abs() <= 0.05
            && r_hat >= 0.999
            && elapsed < Duration::from_secs(60),
        detail: format!(
            "recurrence deviation {deviation:.2e} (t ≤ 1e4), κ̂ = {:.4} (R² {:.6}) over [1e3, 1e5], gap r̂ = {r_hat:.7}, {:.2}s",
            power.parameter,
            power.r_squared,
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_5() -> Outcome {
    let grid = default_eps_grid();
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [1.5, 2.0] {
        match fit_path_exponent(p, &grid) {
            Ok(fit) => {
                pass &= (fit.exponent - fit.expected).abs() <= 0.05 && (fit.dist_exponent - 1.0).abs() <= 1e-6;
                parts.push(format!(
                    "p={p}: {:.4} (expected {:.4}), dist {:.8}",
                    fit.exponent, fit.expected, fit.dist_exponent
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("p={p}: {e}"));
            }
        }
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

/// `r·σ(z) + ½‖z − u‖²`
fn prox_objective(set: &ConvexSet, z: &[f64], u: &[f64], r: f64) -> f64 {
    match set.support(z).unwrap() {
        ExtendedReal::Finite(s) => r * s + 0.5 * dist(z, u).powi(2),
        ExtendedReal::Infinity => f64::INFINITY,
    }
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures: Vec<String> = Vec::new();
    let mut trials = 0;
    for kind in SetKind::ALL {
        let mut bad = [0usize; 6];
        for _ in 0..1000 {
            trials += 1;
            let dim = rng.random_range(1..=8);
            let set = random_set(&mut rng, kind, dim);
            let n = set.dim();
            let s = 10f64.powf(rng.random_range(-1.0..1.0));
            let u: Vec<f64> = gaussian_vec(&mut rng, n).into_iter().map(|v| s * v).collect();
            let w: Vec<f64> = gaussian_vec(&mut rng, n).into_iter().map(|v| s * v).collect();
            let p = set.project(&u).unwrap();

            // idempotence
            if dist(&set.project(&p).unwrap(), &p) > 1e-10 * (1.0 + norm(&p)) {
                bad[0] += 1;
            }
            // nonexpansiveness
            let pw = set.project(&w).unwrap();
            if dist(&p, &pw) > dist(&u, &w) * (1.0 + 1e-12) + 1e-14 {
                bad[1] += 1;
            }
            // variational inequality and support inequality against sampled members
            let r = sub(&u, &p);
            let sigma = set.support(&w).unwrap();
            for _ in 0..100 {
                let z = sample_in_set(&mut rng, &set, 3.0 * s);
                if dot(&r, &sub(&z, &p)) > 1e-8 * (1.0 + norm(&u)) * (1.0 + norm(&z)) {
                    bad[2] += 1;
                }
                if let ExtendedReal::Finite(v) = sigma {
                    if v < dot(&w, &z) - 1e-8 * (1.0 + norm(&w)) * (1.0 + norm(&z)) {
                        bad[3] += 1;
                    }
                }
            }
            // Moreau: Proj(u) + prox_σ(u) = u
            let prox = set.prox_scaled_support(&u, 1.0).unwrap();
            let sum: Vec<f64> = p.iter().zip(&prox).map(|(a, b)| a + b).collect();
            if dist(&sum, &u) > 1e-14 * (1.0 + norm(&u)) {
                bad[4] += 1;
            }
            // prox minimizes r·σ(z) + ½‖z − u‖², checked on a grid in dims ≤ 2
            if n <= 2 {
                let rr = rng.random_range(0.2..5.0);
                let pr = set.prox_scaled_support(&u, rr).unwrap();
                let best = prox_objective(&set, &pr, &u, rr);
                let h = 0.05 * (1.0 + norm(&pr));
                let mut grid_min = f64::INFINITY;
                for i in -20i32..=20 {
                    for j in if n == 2 { -20i32..=20 } else { 0..=0 } {
                        let mut z = pr.clone();
                        z[0] += h * i as f64;
                        if n == 2 {
                            z[1] += h * j as f64;
                        }
                        grid_min = grid_min.min(prox_objective(&set, &z, &u, rr));
                    }
                }
                if !(best <= grid_min + 1e-9 * (1.0 + best.abs())) {
                    bad[5] += 1;
                }
            }
        }
        if bad.iter().any(|&b| b > 0) {
            failures.push(format!("{kind:?}: {bad:?}"));
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{trials} trials (1000 per variant, 100 members each){}, {:.2}s",
            if failures.is_empty() { String::new() } else { format!("; failures {}", failures.join(", ")) },
            start.elapsed().as_secs_f64()
        ),
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let spec = InstanceSpec {
        anchor: AnchorMode::Feasible,
        ..InstanceSpec::default()
    };
    let mut bad = 0;
    for _ in 0..50 {
        let (inst, _) = random_instance(&mut rng, &spec);
        let res = solve(&inst, &SolverConfig::default()).unwrap();
        if !(res.sweeps == 1 && res.termination == Termination::StepTol && res.x == inst.anchor()) {
            bad += 1;
        }
    }
    Outcome {
        pass: bad == 0,
        detail: format!("{bad} of 50 feasible-anchor instances did not stop at sweep 1 with x = v̄"),
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (m, n) = (rng.random_range(1..=20), rng.random_range(1..=30));
        let a = gaussian_matrix(&mut rng, m, n);
        let jacobi = eig_max_sym(&a.gram());
        let power = lambda_max_gram(&a).unwrap();
        let gamma = compute_gamma(&a).unwrap();
        assert!((gamma / power - (1.0 + GAMMA_SAFETY)).abs() < 1e-15);
        worst = worst.max((power - jacobi).abs() / jacobi);
    }
    Outcome {
        pass: worst <= 1e-6,
        detail: format!("max relative difference {worst:.2e} over 100 matrices up to 20×30"),
    }
}

fn main() {
    let mut log = DescentLog::default();
    let results = [
        ("1 dykstra/cgd equivalence", criterion_1(&mut log)),
        ("3 polyhedral linear rate", criterion_3(&mut log)),
        ("4 sublinear example", criterion_4(&mut log)),
        ("5 exponent tightness", criterion_5()),
        ("6 projection properties", criterion_6()),
        ("7 feasible anchor", criterion_7()),
        ("8 gamma estimate", criterion_8()),
    ];
    // descent is checked on every run above
    let descent = ("2 monotone descent", criterion_2(&log));
    let mut all: Vec<_> = results.into_iter().collect();
    all.insert(1, descent);

    let mut failed = 0;
    for (name, outcome) in &all {
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {name}: {tag} ({})", outcome.detail);
        failed += usize::from(!outcome.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
