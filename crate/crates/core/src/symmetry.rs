//! Exact small-matrix algebra for SO(3) and SU(2).
//!
//! Conventions used throughout the crate:
//! - active rotations, right-hand rule, column vectors (`v' = R v`);
//! - Euler angles in the z-x-z convention, `R = Rz(phi) * Rx(theta) * Rz(psi)`;
//! - the spinor-to-vector map is implemented verbatim in its published form,
//!   which yields complex components for generic spinors (see
//!   [`spinor_to_vector`]).

use num_complex::Complex64;
use thiserror::Error;

/// Tolerance for algebraic identities on freshly constructed group elements.
pub const ALGEBRAIC_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SymmetryError {
    #[error("axis must have unit norm (got |axis| = {norm})")]
    NonUnitAxis { norm: f64 },
    #[error("matrix is not a rotation: {reason}")]
    NotARotation { reason: String },
}

/// A vector in the three-dimensional actor space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn cross(&self, other: &Vec3) -> Vec3 {
        let a = &self.0;
        let b = &other.0;
        Vec3([
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }

    pub fn scale(&self, s: f64) -> Vec3 {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

/// One of the three coordinate axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn unit(self) -> Vec3 {
        match self {
            Axis::X => Vec3::new(1.0, 0.0, 0.0),
            Axis::Y => Vec3::new(0.0, 1.0, 0.0),
            Axis::Z => Vec3::new(0.0, 0.0, 1.0),
        }
    }
}

/// A proper rotation: orthogonal 3x3 matrix with determinant +1.
///
/// Row-major storage, applied to column vectors: `v' = R v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix {
    m: [[f64; 3]; 3],
}

impl RotationMatrix {
    pub const IDENTITY: Self = RotationMatrix {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Validates orthogonality and det = +1 (both within `ALGEBRAIC_TOL`).
    pub fn try_from_matrix(m: [[f64; 3]; 3]) -> Result<Self, SymmetryError> {
        let r = RotationMatrix { m };
        let defect = r.orthogonality_defect();
        if defect > ALGEBRAIC_TOL {
            return Err(SymmetryError::NotARotation {
                reason: format!("orthogonality defect {defect:.3e}"),
            });
        }
        let det = r.det();
        if (det - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(SymmetryError::NotARotation {
                reason: format!("determinant {det} != +1"),
            });
        }
        Ok(r)
    }

    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.m[row][col]
    }

    /// Applies the rotation to a column vector.
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        let mut out = [0.0; 3];
        for (i, row) in self.m.iter().enumerate() {
            out[i] = row[0] * v.0[0] + row[1] * v.0[1] + row[2] * v.0[2];
        }
        Vec3(out)
    }

    pub fn transpose(&self) -> RotationMatrix {
        let mut t = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                t[i][j] = self.m[j][i];
            }
        }
        RotationMatrix { m: t }
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Max-entry deviation of `M Mᵀ` from the identity.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += self.m[i][k] * self.m[j][k];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// Frobenius norm of the entrywise difference to `other`.
    pub fn frobenius_distance(&self, other: &RotationMatrix) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let d = self.m[i][j] - other.m[i][j];
                s += d * d;
            }
        }
        s.sqrt()
    }
}

fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut s = 0.0;
            for (k, bk) in b.iter().enumerate() {
                s += a[i][k] * bk[j];
            }
            out[i][j] = s;
        }
    }
    out
}

/// Active right-hand-rule rotation about a coordinate axis.
pub fn rotation_about_axis(axis: Axis, angle: f64) -> RotationMatrix {
    let (s, c) = angle.sin_cos();
    let m = match axis {
        Axis::X => [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]],
        Axis::Y => [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]],
        Axis::Z => [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
    };
    RotationMatrix { m }
}

/// Product `second * first`: `first` is applied first.
pub fn compose(second: &RotationMatrix, first: &RotationMatrix) -> RotationMatrix {
    RotationMatrix {
        m: mat_mul(&second.m, &first.m),
    }
}

/// Euler angles, z-x-z convention, radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

/// `Rz(phi) * Rx(theta) * Rz(psi)`.
pub fn euler_to_matrix(angles: &EulerAngles) -> RotationMatrix {
    let rz_phi = rotation_about_axis(Axis::Z, angles.phi);
    let rx_theta = rotation_about_axis(Axis::X, angles.theta);
    let rz_psi = rotation_about_axis(Axis::Z, angles.psi);
    compose(&compose(&rz_phi, &rx_theta), &rz_psi)
}

/// Frobenius norm of `R1 R2 - R2 R1`; zero iff the rotations commute.
pub fn commutator_defect(r1: &RotationMatrix, r2: &RotationMatrix) -> f64 {
    let ab = mat_mul(&r1.m, &r2.m);
    let ba = mat_mul(&r2.m, &r1.m);
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let d = ab[i][j] - ba[i][j];
            s += d * d;
        }
    }
    s.sqrt()
}

/// An element of SU(2): unitary 2x2 complex matrix with determinant 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2Element {
    m: [[Complex64; 2]; 2],
}

const I_UNIT: Complex64 = Complex64::new(0.0, 1.0);

impl Su2Element {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Su2Element {
            m: [[one, zero], [zero, one]],
        }
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.m
    }

    pub fn mul(&self, other: &Su2Element) -> Su2Element {
        let a = &self.m;
        let b = &other.m;
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Su2Element { m: out }
    }

    /// Conjugate transpose (= inverse for unitary matrices).
    pub fn dagger(&self) -> Su2Element {
        let a = &self.m;
        Su2Element {
            m: [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]],
        }
    }

    pub fn neg(&self) -> Su2Element {
        let a = &self.m;
        Su2Element {
            m: [[-a[0][0], -a[0][1]], [-a[1][0], -a[1][1]]],
        }
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Max-entry deviation of `U U†` from the identity, plus |det - 1|.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.mul(&self.dagger());
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let target = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                worst = worst.max((p.m[i][j] - target).norm());
            }
        }
        worst.max((self.det() - Complex64::new(1.0, 0.0)).norm())
    }
}

/// The Pauli matrices sigma_1, sigma_2, sigma_3.
fn pauli() -> [[[Complex64; 2]; 2]; 3] {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    [
        [[zero, one], [one, zero]],
        [[zero, -I_UNIT], [I_UNIT, zero]],
        [[one, zero], [zero, -one]],
    ]
}

/// `cos(angle/2) I - i sin(angle/2) (axis . sigma)` for a unit axis.
///
/// Rejects axes whose norm deviates from 1 by more than 1e-9.
pub fn su2_from_axis_angle(axis: &Vec3, angle: f64) -> Result<Su2Element, SymmetryError> {
    let norm = axis.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(SymmetryError::NonUnitAxis { norm });
    }
    let half = angle / 2.0;
    let c = Complex64::new(half.cos(), 0.0);
    let s = half.sin();
    let sigma = pauli();
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let n_dot_sigma = axis.0[0] * sigma[0][i][j]
                + axis.0[1] * sigma[1][i][j]
                + axis.0[2] * sigma[2][i][j];
            m[i][j] = -I_UNIT * s * n_dot_sigma;
            if i == j {
                m[i][j] += c;
            }
        }
    }
    Ok(Su2Element { m })
}

/// The SO(3) image of an SU(2) element: `R_ab = tr(sigma_a U sigma_b U†) / 2`.
///
/// This is the adjoint action on the Pauli basis; it satisfies
/// `adjoint_map(U) == adjoint_map(-U)` (the 2:1 double cover).
pub fn adjoint_map(u: &Su2Element) -> RotationMatrix {
    let sigma = pauli();
    let udag = u.dagger();
    let mut r = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            // trace(sigma_a * U * sigma_b * U†)
            let mut tr = Complex64::new(0.0, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        for l in 0..2 {
                            tr += sigma[a][i][j] * u.m[j][k] * sigma[b][k][l] * udag.m[l][i];
                        }
                    }
                }
            }
            r[a][b] = 0.5 * tr.re;
        }
    }
    RotationMatrix { m: r }
}

/// A two-component complex spinor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub xi1: Complex64,
    pub xi2: Complex64,
}

/// The complex vector produced by the spinor map, in (S, B, G) component order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorVector {
    pub v_s: Complex64,
    pub v_b: Complex64,
    pub v_g: Complex64,
}

/// The quadratic spinor-to-vector map, implemented verbatim:
///
/// `V_S = (xi2^2 - xi1^2) / 2i`, `V_B = (xi1^2 + xi2^2) / 2i`, `V_G = xi1 xi2`.
///
/// As printed this yields complex components for simple real spinors (e.g.
/// `(1, 0)` maps to `(i/2, -i/2, 0)`); no corrected standard map is
/// substituted. The map is quadratic: scaling the spinor by a real factor
/// scales the vector by its square.
pub fn spinor_to_vector(xi: &Spinor) -> SpinorVector {
    let two_i = Complex64::new(0.0, 2.0);
    let xi1_sq = xi.xi1 * xi.xi1;
    let xi2_sq = xi.xi2 * xi.xi2;
    SpinorVector {
        v_s: (xi2_sq - xi1_sq) / two_i,
        v_b: (xi1_sq + xi2_sq) / two_i,
        v_g: xi.xi1 * xi.xi2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn assert_vec3_eq(v: &Vec3, expect: [f64; 3], tol: f64) {
        for k in 0..3 {
            assert!(
                (v.0[k] - expect[k]).abs() < tol,
                "component {k}: {} vs {}",
                v.0[k],
                expect[k]
            );
        }
    }

    #[test]
    fn zero_angle_rotation_is_identity() {
        let r = rotation_about_axis(Axis::X, 0.0);
        assert_eq!(r.frobenius_distance(&RotationMatrix::IDENTITY), 0.0);
    }

    #[test]
    fn right_hand_rule_conventions() {
        let rx = rotation_about_axis(Axis::X, FRAC_PI_2);
        assert_vec3_eq(&rx.apply(&Vec3::new(0.0, 1.0, 0.0)), [0.0, 0.0, 1.0], 1e-15);
        let ry = rotation_about_axis(Axis::Y, FRAC_PI_2);
        assert_vec3_eq(&ry.apply(&Vec3::new(1.0, 0.0, 0.0)), [0.0, 0.0, -1.0], 1e-15);
    }

    #[test]
    fn compose_with_identity() {
        let r = rotation_about_axis(Axis::Z, 0.37);
        let c = compose(&RotationMatrix::IDENTITY, &r);
        assert_eq!(c.frobenius_distance(&r), 0.0);
    }

    // Independent brute-force matrix product used as the oracle for the
    // composition examples.
    fn oracle_mul(a: &RotationMatrix, b: &RotationMatrix) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out[i][j] += a.entries()[i][k] * b.entries()[k][j];
                }
            }
        }
        out
    }

    #[test]
    fn rotation_order_matters() {
        let rx = rotation_about_axis(Axis::X, FRAC_PI_2);
        let ry = rotation_about_axis(Axis::Y, FRAC_PI_2);
        let e1 = Vec3::new(1.0, 0.0, 0.0);

        let y_then_x = compose(&rx, &ry);
        assert_vec3_eq(&y_then_x.apply(&e1), [0.0, 1.0, 0.0], 1e-12);

        let x_then_y = compose(&ry, &rx);
        assert_vec3_eq(&x_then_y.apply(&e1), [0.0, 0.0, -1.0], 1e-12);

        // Cross-check against the brute-force product.
        let oracle = oracle_mul(&rx, &ry);
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(y_then_x.entry(i, j), oracle[i][j], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn euler_zero_is_identity() {
        let r = euler_to_matrix(&EulerAngles {
            phi: 0.0,
            theta: 0.0,
            psi: 0.0,
        });
        assert!(r.frobenius_distance(&RotationMatrix::IDENTITY) < 1e-15);
    }

    #[test]
    fn euler_single_angle_collapses() {
        let phi = 0.83;
        let r = euler_to_matrix(&EulerAngles {
            phi,
            theta: 0.0,
            psi: 0.0,
        });
        let rz = rotation_about_axis(Axis::Z, phi);
        assert!(r.frobenius_distance(&rz) < 1e-15);
    }

    #[test]
    fn euler_two_factor_product() {
        let r = euler_to_matrix(&EulerAngles {
            phi: FRAC_PI_2,
            theta: FRAC_PI_2,
            psi: 0.0,
        });
        let expect = compose(
            &rotation_about_axis(Axis::Z, FRAC_PI_2),
            &rotation_about_axis(Axis::X, FRAC_PI_2),
        );
        assert!(r.frobenius_distance(&expect) < 1e-15);
    }

    #[test]
    fn same_axis_rotations_commute() {
        let r1 = rotation_about_axis(Axis::Z, 0.4);
        let r2 = rotation_about_axis(Axis::Z, 1.9);
        assert!(commutator_defect(&r1, &r2) < 1e-12);
        assert!(commutator_defect(&r1, &RotationMatrix::IDENTITY) < 1e-15);
    }

    #[test]
    fn quarter_turn_commutator_is_sqrt_six() {
        let rx = rotation_about_axis(Axis::X, FRAC_PI_2);
        let ry = rotation_about_axis(Axis::Y, FRAC_PI_2);
        let defect = commutator_defect(&rx, &ry);
        // [Rx, Ry] at 90 degrees has six unit entries: Frobenius norm sqrt(6).
        assert_abs_diff_eq!(defect, 6.0_f64.sqrt(), epsilon = 1e-12);
        assert!(defect > 1.0);
    }

    #[test]
    fn su2_zero_angle_is_identity() {
        let u = su2_from_axis_angle(&Vec3::new(0.0, 0.0, 1.0), 0.0).unwrap();
        assert!(u.unitarity_defect() < 1e-15);
        assert_abs_diff_eq!(u.entries()[0][0].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(u.entries()[0][1].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn su2_full_turn_is_minus_identity() {
        let u = su2_from_axis_angle(&Vec3::new(0.0, 0.0, 1.0), 2.0 * PI).unwrap();
        assert_abs_diff_eq!(u.entries()[0][0].re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(u.entries()[1][1].re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(u.entries()[0][1].norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(u.entries()[1][0].norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn su2_half_turn_about_z() {
        // cos(pi/2) I - i sin(pi/2) sigma_z = diag(-i, i)
        let u = su2_from_axis_angle(&Vec3::new(0.0, 0.0, 1.0), PI).unwrap();
        let e = u.entries();
        assert_abs_diff_eq!((e[0][0] - Complex64::new(0.0, -1.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((e[1][1] - Complex64::new(0.0, 1.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e[0][1].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e[1][0].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn su2_rejects_non_unit_axis() {
        let err = su2_from_axis_angle(&Vec3::new(0.0, 0.0, 2.0), 1.0);
        assert!(matches!(err, Err(SymmetryError::NonUnitAxis { .. })));
    }

    #[test]
    fn adjoint_of_identity_and_its_negative() {
        let id = Su2Element::identity();
        assert!(adjoint_map(&id).frobenius_distance(&RotationMatrix::IDENTITY) < 1e-15);
        assert!(adjoint_map(&id.neg()).frobenius_distance(&RotationMatrix::IDENTITY) < 1e-15);
    }

    #[test]
    fn adjoint_matches_vector_rotation_over_angle_grid() {
        for k in 0..24 {
            let theta = -2.0 * PI + k as f64 * (4.0 * PI / 23.0);
            for axis in [Axis::X, Axis::Y, Axis::Z] {
                let u = su2_from_axis_angle(&axis.unit(), theta).unwrap();
                let r = adjoint_map(&u);
                let expect = rotation_about_axis(axis, theta);
                assert!(
                    r.frobenius_distance(&expect) < 1e-12,
                    "axis {axis:?}, theta {theta}"
                );
            }
        }
    }

    #[test]
    fn spinor_map_matches_printed_form() {
        let v = spinor_to_vector(&Spinor {
            xi1: Complex64::new(1.0, 0.0),
            xi2: Complex64::new(0.0, 0.0),
        });
        assert_abs_diff_eq!((v.v_s - Complex64::new(0.0, 0.5)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((v.v_b - Complex64::new(0.0, -0.5)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.v_g.norm(), 0.0, epsilon = 1e-15);

        let zero = spinor_to_vector(&Spinor {
            xi1: Complex64::new(0.0, 0.0),
            xi2: Complex64::new(0.0, 0.0),
        });
        assert_eq!(zero.v_s.norm(), 0.0);
        assert_eq!(zero.v_b.norm(), 0.0);
        assert_eq!(zero.v_g.norm(), 0.0);

        let ones = spinor_to_vector(&Spinor {
            xi1: Complex64::new(1.0, 0.0),
            xi2: Complex64::new(1.0, 0.0),
        });
        assert_abs_diff_eq!(ones.v_s.norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((ones.v_b - Complex64::new(0.0, -1.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((ones.v_g - Complex64::new(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn spinor_map_is_quadratic_in_scale() {
        let xi = Spinor {
            xi1: Complex64::new(0.3, -0.7),
            xi2: Complex64::new(-1.1, 0.2),
        };
        let lambda = 1.7;
        let scaled = spinor_to_vector(&Spinor {
            xi1: xi.xi1 * lambda,
            xi2: xi.xi2 * lambda,
        });
        let base = spinor_to_vector(&xi);
        let l2 = lambda * lambda;
        assert!((scaled.v_s - base.v_s * l2).norm() < 1e-14);
        assert!((scaled.v_b - base.v_b * l2).norm() < 1e-14);
        assert!((scaled.v_g - base.v_g * l2).norm() < 1e-14);
    }
}
