use dykstra_msf::linalg::{dist, norm, sub};
use dykstra_msf::model::{DualPoint, Instance};
use dykstra_msf::oracle::random::{gaussian_vec, random_instance, InstanceSpec};
use dykstra_msf::sets::ExtendedReal;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64) -> (ChaCha8Rng, Instance, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (inst, x_f) = random_instance(&mut rng, &InstanceSpec::default());
    (rng, inst, x_f)
}

/// A dual point in the domain of every support function: each block is a
/// normal vector `u − Proj(u)`.
fn domain_point(rng: &mut ChaCha8Rng, inst: &Instance, scale: f64) -> DualPoint {
    DualPoint::new(
        inst.blocks()
            .iter()
            .map(|b| {
                let u: Vec<f64> = gaussian_vec(rng, b.dim()).into_iter().map(|v| scale * v).collect();
                sub(&u, &b.set().project(&u).unwrap())
            })
            .collect(),
    )
}

fn finite(v: ExtendedReal) -> f64 {
    v.finite().expect("finite dual value")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn smooth_gradient_matches_finite_differences(seed in any::<u64>()) {
        let (mut rng, inst, _) = instance(seed);
        let y = domain_point(&mut rng, &inst, 2.0);
        let grad = inst.gradient(&y).unwrap();
        let h = 1e-6;
        for i in 0..inst.num_blocks() {
            for k in 0..y.blocks[i].len() {
                let mut plus = y.clone();
                let mut minus = y.clone();
                plus.blocks[i][k] += h;
                minus.blocks[i][k] -= h;
                let fd = (inst.smooth_part(&plus).unwrap() - inst.smooth_part(&minus).unwrap()) / (2.0 * h);
                let g = grad.blocks[i][k];
                prop_assert!((fd - g).abs() <= 1e-5 * (1.0 + g.abs()), "{fd} vs {g}");
            }
        }
    }

    #[test]
    fn dual_objective_is_convex_on_its_domain(seed in any::<u64>(), theta in 0.0f64..1.0) {
        let (mut rng, inst, _) = instance(seed);
        let y1 = domain_point(&mut rng, &inst, 2.0);
        let y2 = domain_point(&mut rng, &inst, 2.0);
        let mix = DualPoint::new(
            y1.blocks.iter().zip(&y2.blocks)
                .map(|(a, b)| a.iter().zip(b).map(|(u, v)| theta * u + (1.0 - theta) * v).collect())
                .collect(),
        );
        let (d1, d2) = (finite(inst.dual_objective(&y1).unwrap()), finite(inst.dual_objective(&y2).unwrap()));
        let dm = inst.dual_objective(&mix).unwrap();
        // the domain is convex, so the mixture stays in it up to rounding
        let dm = finite(dm);
        let rhs = theta * d1 + (1.0 - theta) * d2;
        prop_assert!(dm <= rhs + 1e-9 * (1.0 + rhs.abs()), "{dm} > {rhs}");
    }

    /// `d(𝐲) ≥ d* = −½‖x* − v̄‖² ≥ −½‖x_f − v̄‖²` for any feasible `x_f`.
    #[test]
    fn weak_duality(seed in any::<u64>()) {
        let (mut rng, inst, x_f) = instance(seed);
        let lower = -0.5 * dist(&x_f, inst.anchor()).powi(2);
        for _ in 0..10 {
            let y = domain_point(&mut rng, &inst, 3.0);
            let d = finite(inst.dual_objective(&y).unwrap());
            prop_assert!(d >= lower - 1e-9 * (1.0 + lower.abs()), "{d} < {lower}");
        }
    }

    #[test]
    fn primal_recovery_is_affine(seed in any::<u64>()) {
        let (mut rng, inst, _) = instance(seed);
        let y = domain_point(&mut rng, &inst, 1.0);
        let x = inst.primal_from_dual(&y).unwrap();
        let aty = inst.stacked_transpose(&y).unwrap();
        let back: Vec<f64> = x.iter().zip(&aty).map(|(a, b)| a + b).collect();
        prop_assert!(dist(&back, inst.anchor()) <= 1e-12 * (1.0 + norm(inst.anchor())));
    }
}

#[test]
fn dual_value_at_origin_is_zero() {
    for seed in 0..50 {
        let (_, inst, _) = instance(seed);
        let d = inst.dual_objective(&DualPoint::zeros(&inst)).unwrap();
        assert_eq!(d, ExtendedReal::Finite(0.0));
    }
}

#[test]
fn dual_outside_domain_is_infinite() {
    let inst = dykstra_msf::oracle::nonlinear_instance();
    // the hyperplane block only admits multiples of (1, 0, 0)
    let y = DualPoint::new(vec![vec![0.0; 3], vec![0.0, 1.0, 0.0]]);
    assert_eq!(inst.dual_objective(&y).unwrap(), ExtendedReal::Infinity);
}

#[test]
fn residual_map_vanishes_at_known_minimizer() {
    let inst = dykstra_msf::oracle::nonlinear_instance();
    let y = dykstra_msf::oracle::nonlinear_dual_solution();
    assert!(inst.residual_map(&y).unwrap().norm() < 1e-14);
    let tight = dykstra_msf::oracle::tight_instance(1.5).unwrap();
    let y = DualPoint::new(vec![vec![1.0, 0.0]]);
    assert!(tight.residual_map(&y).unwrap().norm() < 1e-12);
}
