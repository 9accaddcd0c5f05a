//! Group-theoretic properties of the rotation and SU(2) algebra: closure
//! under long composition chains, the adjoint homomorphism and its double
//! cover, non-commutativity witnesses, and norm preservation.

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::{FRAC_PI_2, PI};

use trihelix_core::symmetry::{
    adjoint_map, commutator_defect, compose, euler_to_matrix, rotation_about_axis,
    su2_from_axis_angle, Axis, EulerAngles, RotationMatrix, Su2Element, Vec3,
};

fn random_rotation(rng: &mut StdRng) -> RotationMatrix {
    euler_to_matrix(&EulerAngles {
        phi: rng.gen_range(-PI..PI),
        theta: rng.gen_range(-PI..PI),
        psi: rng.gen_range(-PI..PI),
    })
}

fn random_su2(rng: &mut StdRng) -> Su2Element {
    let mut axis;
    loop {
        axis = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = axis.norm();
        if n > 0.1 {
            axis = axis.scale(1.0 / n);
            break;
        }
    }
    su2_from_axis_angle(&axis, rng.gen_range(-2.0 * PI..2.0 * PI)).unwrap()
}

#[test]
fn closure_after_ten_thousand_compositions() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut acc = RotationMatrix::IDENTITY;
    for _ in 0..10_000 {
        acc = compose(&acc, &random_rotation(&mut rng));
    }
    assert!(
        acc.orthogonality_defect() < 1e-10,
        "orthogonality defect {}",
        acc.orthogonality_defect()
    );
    assert!((acc.det() - 1.0).abs() < 1e-10, "det {}", acc.det());
}

#[test]
fn adjoint_homomorphism_over_random_pairs() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..1_000 {
        let u1 = random_su2(&mut rng);
        let u2 = random_su2(&mut rng);
        let lhs = adjoint_map(&u1.mul(&u2));
        let rhs = compose(&adjoint_map(&u1), &adjoint_map(&u2));
        assert!(
            lhs.frobenius_distance(&rhs) < 1e-9,
            "homomorphism defect {}",
            lhs.frobenius_distance(&rhs)
        );
    }
}

#[test]
fn double_cover_over_random_elements() {
    let mut rng = StdRng::seed_from_u64(13);
    for _ in 0..1_000 {
        let u = random_su2(&mut rng);
        let plus = adjoint_map(&u);
        let minus = adjoint_map(&u.neg());
        for i in 0..3 {
            for j in 0..3 {
                assert!((plus.entry(i, j) - minus.entry(i, j)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn non_commutativity_witness() {
    let rx = rotation_about_axis(Axis::X, FRAC_PI_2);
    let ry = rotation_about_axis(Axis::Y, FRAC_PI_2);
    assert!(commutator_defect(&rx, &ry) > 0.5);

    let mut rng = StdRng::seed_from_u64(17);
    for _ in 0..100 {
        let axis = match rng.gen_range(0..3) {
            0 => Axis::X,
            1 => Axis::Y,
            _ => Axis::Z,
        };
        let r1 = rotation_about_axis(axis, rng.gen_range(-PI..PI));
        let r2 = rotation_about_axis(axis, rng.gen_range(-PI..PI));
        assert!(commutator_defect(&r1, &r2) < 1e-12);
    }
}

proptest! {
    #[test]
    fn rotation_preserves_norm(
        phi in -PI..PI,
        theta in -PI..PI,
        psi in -PI..PI,
        vx in -10.0..10.0,
        vy in -10.0..10.0,
        vz in -10.0..10.0,
    ) {
        let r = euler_to_matrix(&EulerAngles { phi, theta, psi });
        let v = Vec3::new(vx, vy, vz);
        let rv = r.apply(&v);
        prop_assert!((rv.norm() - v.norm()).abs() < 1e-12);
        prop_assert!(rv.is_finite());
    }

    #[test]
    fn composition_stays_in_the_group(
        phi1 in -PI..PI, theta1 in -PI..PI, psi1 in -PI..PI,
        phi2 in -PI..PI, theta2 in -PI..PI, psi2 in -PI..PI,
    ) {
        let r1 = euler_to_matrix(&EulerAngles { phi: phi1, theta: theta1, psi: psi1 });
        let r2 = euler_to_matrix(&EulerAngles { phi: phi2, theta: theta2, psi: psi2 });
        let c = compose(&r2, &r1);
        prop_assert!(c.orthogonality_defect() < 1e-12);
        prop_assert!((c.det() - 1.0).abs() < 1e-12);
    }
}
