use std::f64::consts::PI;

use proptest::prelude::*;
use rotjac_core::fd::{fd_point_jacobian, fd_rotation_jacobian};
use rotjac_core::jacobian::{
    dpoint_classical, dpoint_compact, drot_classical, drot_compact, generators, taylor_predict, Linearization,
};
use rotjac_core::sampling::{ball_vector, cube_vector, rotation_vector_in_band, trial_rng, unit_vector};
use rotjac_core::so3::{exp_rodrigues, hat};
use rotjac_core::{RotationJacobian, Vector3};

fn point_diff(a: &rotjac_core::PointJacobian, b: &rotjac_core::PointJacobian) -> f64 {
    (*a.matrix() - *b.matrix()).max_abs()
}

#[test]
fn compact_and_classical_agree_over_the_chart() {
    let mut worst_rot = 0.0_f64;
    let mut worst_point = 0.0_f64;
    for k in 0..10_000u64 {
        let mut rng = trial_rng(1, k);
        let v = rotation_vector_in_band(&mut rng, 1e-3, PI - 1e-3);
        let u = unit_vector(&mut rng);
        worst_rot = worst_rot.max(drot_compact(&v).max_abs_diff(&drot_classical(&v)));
        worst_point = worst_point.max(point_diff(&dpoint_compact(&v, &u), &dpoint_classical(&v, &u)));
    }
    assert!(worst_rot <= 1e-12, "{worst_rot:e}");
    assert!(worst_point <= 1e-12, "{worst_point:e}");
}

#[test]
fn point_jacobian_matches_finite_differences() {
    let v = Vector3::new(0.4, -1.1, 0.2);
    let u = Vector3::new(1.0, 2.0, 3.0);
    let fd = fd_point_jacobian(&v, &u, 1e-5);
    assert!(fd.max_abs_diff(&dpoint_compact(&v, &u)) <= 1e-8);
    assert!(fd.max_abs_diff(&dpoint_classical(&v, &u)) <= 1e-8);
}

#[test]
fn rotation_jacobian_matches_finite_differences() {
    let v = Vector3::new(0.4, -1.1, 0.2);
    let fd = fd_rotation_jacobian(&v, 1e-5);
    assert!(fd.max_abs_diff(&drot_compact(&v)) <= 1e-8);
    assert!(fd.max_abs_diff(&drot_classical(&v)) <= 1e-8);
}

#[test]
fn near_the_chart_boundary() {
    let v = Vector3::new(0.0, 0.0, PI - 1e-3);
    let fd = fd_rotation_jacobian(&v, 1e-5);
    assert!(fd.max_abs_diff(&drot_classical(&v)) <= 1e-7);
    assert!(fd.max_abs_diff(&drot_compact(&v)) <= 1e-7);
}

#[test]
fn finite_difference_error_is_second_order() {
    for k in 0..50u64 {
        let mut rng = trial_rng(8, k);
        let v = ball_vector(&mut rng, PI);
        let u = cube_vector(&mut rng, 1.0);
        let exact = dpoint_compact(&v, &u);
        let coarse = fd_point_jacobian(&v, &u, 1e-2).max_abs_diff(&exact);
        let fine = fd_point_jacobian(&v, &u, 5e-3).max_abs_diff(&exact);
        let ratio = coarse / fine;
        assert!((3.0..=5.0).contains(&ratio), "trial {k}: ratio {ratio}");
    }
}

#[test]
fn identity_limit() {
    let g = generators();
    for k in 0..100u64 {
        let axis = unit_vector(&mut trial_rng(4, k));
        for t in [1e-3, 1e-4, 1e-5, 1e-8] {
            let jac = drot_compact(&axis.scale(t));
            for (i, gi) in g.iter().enumerate() {
                let d = jac.block(i).distance(gi);
                assert!(d <= 10.0 * t, "t={t}: {d:e}");
            }
        }
    }
}

#[test]
fn small_angle_switch_is_smooth() {
    let axis = Vector3::new(0.48, -0.6, 0.64);
    let below = drot_compact(&axis.scale(1e-4 * (1.0 - 1e-9)));
    let above = drot_compact(&axis.scale(1e-4 * (1.0 + 1e-9)));
    assert!(below.max_abs_diff(&above) <= 1e-11);
    let small = axis.scale(5e-5);
    let fd = fd_rotation_jacobian(&small, 1e-5);
    assert!(fd.max_abs_diff(&drot_compact(&small)) <= 1e-8);
}

#[test]
fn derivative_stays_in_tangent_space() {
    for k in 0..1000u64 {
        let v = ball_vector(&mut trial_rng(6, k), PI);
        let r = *exp_rodrigues(&v).matrix();
        for jac in [drot_compact(&v), drot_classical(&v)] {
            for d in jac.blocks() {
                let sym = d.transpose() * r + r.transpose() * *d;
                assert!(sym.frobenius_norm() <= 1e-11);
            }
        }
    }
}

#[test]
fn operator_form_matches_point_jacobian() {
    for k in 0..1000u64 {
        let mut rng = trial_rng(7, k);
        let v = ball_vector(&mut rng, PI);
        let u = unit_vector(&mut rng);
        let drot = drot_compact(&v);
        let dpoint = dpoint_compact(&v, &u);
        for i in 0..3 {
            assert!((*drot.block(i) * u - dpoint.column(i)).norm() <= 1e-12);
        }
    }
}

#[test]
fn parallel_perturbation_identity() {
    for k in 0..1000u64 {
        let mut rng = trial_rng(9, k);
        let v = rotation_vector_in_band(&mut rng, 1e-3, PI);
        let u = cube_vector(&mut rng, 10.0);
        let axis = v.scale(1.0 / v.norm());
        let r = exp_rodrigues(&v);
        let residual = dpoint_compact(&v, &u).apply(&axis) + r * u.cross(&axis);
        assert!(residual.norm() <= 1e-12 * u.norm(), "{:e}", residual.norm());
        // the same tangent direction, seen after rotating
        let equivariant = (r * u.cross(&axis) - (r * u).cross(&axis)).norm();
        assert!(equivariant <= 1e-12 * u.norm().max(1.0));
    }
}

#[test]
fn precomputed_rotation_overload_agrees() {
    let v = Vector3::new(-2.0, 0.3, 1.1);
    let u = Vector3::new(0.5, 0.5, -1.0);
    let lin = Linearization::with_rotation(&v, &exp_rodrigues(&v)).unwrap();
    assert_eq!(lin.dpoint_compact(&u), dpoint_compact(&v, &u));
    assert_eq!(lin.drot_compact(), drot_compact(&v));
}

#[test]
fn taylor_parallel_step() {
    let v = Vector3::new(0.7, 0.2, -1.4);
    let u = Vector3::new(1.0, -1.0, 0.5);
    let axis = v.scale(1.0 / v.norm());
    let t = 1e-4;
    let p = taylor_predict(&v, &u, &axis.scale(t));
    let expected = -(exp_rodrigues(&v) * u.cross(&axis)).scale(t);
    assert!((p.predicted - p.base - expected).norm() <= 1e-16);
    assert!(p.perpendicular_term.norm() <= 1e-16);
}

#[test]
fn taylor_remainder_is_second_order() {
    for k in 0..200u64 {
        let mut rng = trial_rng(10, k);
        let v = rotation_vector_in_band(&mut rng, 0.1, 3.0);
        let u = cube_vector(&mut rng, 1.0);
        let dir = unit_vector(&mut rng);
        let remainder = |s: f64| {
            let dv = dir.scale(s);
            (taylor_predict(&v, &u, &dv).predicted - exp_rodrigues(&(v + dv)) * u).norm()
        };
        let (r1, r2) = (remainder(1e-2), remainder(5e-3));
        let ratio = r1 / r2;
        assert!((3.0..=5.0).contains(&ratio), "trial {k}: ratio {ratio}");
        assert!(remainder(1e-4) <= 10.0 * 1e-8 * u.norm().max(1.0));
    }
}

#[test]
fn decomposed_terms_match_jacobian_action() {
    let v = Vector3::new(1.2, -0.4, 2.0);
    let u = Vector3::new(0.3, 0.9, -0.2);
    let dv = Vector3::new(1e-3, -2e-3, 4e-4);
    let p = taylor_predict(&v, &u, &dv);
    let j = dpoint_compact(&v, &u);
    assert!((p.parallel_term - j.apply(&p.dv_parallel)).norm() <= 1e-16);
    assert!((p.perpendicular_term - j.apply(&p.dv_perpendicular)).norm() <= 1e-16);
}

proptest! {
    #[test]
    fn point_jacobian_is_linear_in_u(
        v in (-1.8..1.8f64, -1.8..1.8f64, -1.8..1.8f64),
        u1 in (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64),
        u2 in (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64),
        alpha in -3.0..3.0f64,
        beta in -3.0..3.0f64,
    ) {
        let v = Vector3::new(v.0, v.1, v.2);
        let (u1, u2) = (Vector3::new(u1.0, u1.1, u1.2), Vector3::new(u2.0, u2.1, u2.2));
        let combined = dpoint_compact(&v, &(u1.scale(alpha) + u2.scale(beta)));
        let separate = *dpoint_compact(&v, &u1).matrix() * alpha + *dpoint_compact(&v, &u2).matrix() * beta;
        prop_assert!((*combined.matrix() - separate).max_abs() <= 1e-13);
    }

    #[test]
    fn classical_zero_limit_is_generators(x in -1.0..1.0f64, y in -1.0..1.0f64, z in -1.0..1.0f64) {
        let jac = drot_classical(&Vector3::new(x, y, z).scale(1e-12));
        let expected = RotationJacobian::from_blocks(generators());
        prop_assert!(jac.max_abs_diff(&expected) <= 1e-11);
    }
}

#[test]
fn point_jacobian_at_identity_is_minus_hat() {
    let u = Vector3::new(1.0, 2.0, 3.0);
    for t in [0.0, 1e-9, 1e-6] {
        let j = dpoint_compact(&Vector3::new(t, -t, 0.5 * t), &u);
        assert!((*j.matrix() + hat(&u)).max_abs() <= 10.0 * t * u.norm());
    }
}
