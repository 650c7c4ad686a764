//! Exact linear-algebra kernels on `R^3`.
//!
//! Everything here is a pure function of its inputs. The two operators are
//! `L(x)`, the antisymmetric matrix of the cross product (`L(x) y = x × y`),
//! and the effective field operator
//!
//! ```text
//! A(x) = alpha |x|^2 I - alpha x x^T - L(x)
//! ```
//!
//! which combines the damping torque (the `alpha` terms) with the precession
//! torque (`-L(x)`). On the unit sphere it reduces to
//! `alpha I - alpha x x^T - L(x)`. The general form is kept so identities can
//! be tested off the sphere as well.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// A 3-vector in model units. Carries states, fields and noise increments.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };
    /// Canonical basis, `AXES[j]` is `e_{j+1}`.
    pub const AXES: [Vec3; 3] = [
        Vec3 { x: 1.0, y: 0.0, z: 0.0 },
        Vec3 { x: 0.0, y: 1.0, z: 0.0 },
        Vec3 { x: 0.0, y: 0.0, z: 1.0 },
    ];

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// `self / |self|`. The caller is responsible for checking degeneracy.
    pub fn normalized(self) -> Vec3 {
        self * (1.0 / self.norm())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn component(self, j: usize) -> f64 {
        match j {
            0 => self.x,
            1 => self.y,
            2 => self.z,
            _ => panic!("component index out of range: {j}"),
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

/// A 3x3 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const ZERO: Mat3 = Mat3([[0.0; 3]; 3]);
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn row(&self, i: usize) -> Vec3 {
        Vec3::new(self.0[i][0], self.0[i][1], self.0[i][2])
    }

    pub fn col(&self, j: usize) -> Vec3 {
        Vec3::new(self.0[0][j], self.0[1][j], self.0[2][j])
    }

    pub fn mul_vec(&self, v: Vec3) -> Vec3 {
        Vec3::new(self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v))
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat3) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        worst
    }

    /// Outer product `a b^T`.
    pub fn outer(a: Vec3, b: Vec3) -> Mat3 {
        let a = [a.x, a.y, a.z];
        let b = [b.x, b.y, b.z];
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = a[i] * b[j];
            }
        }
        Mat3(m)
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, o: Mat3) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.0[i][j] + o.0[i][j];
            }
        }
        Mat3(m)
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, o: Mat3) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.0[i][j] - o.0[i][j];
            }
        }
        Mat3(m)
    }
}

impl Mul<f64> for Mat3 {
    type Output = Mat3;
    fn mul(self, s: f64) -> Mat3 {
        let mut m = self.0;
        for row in m.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        Mat3(m)
    }
}

impl Mul<Mat3> for Mat3 {
    type Output = Mat3;
    fn mul(self, o: Mat3) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.row(i).dot(o.col(j));
            }
        }
        Mat3(m)
    }
}

/// The antisymmetric matrix `L(x)` with `L(x) y = x × y`.
pub fn cross_matrix(x: Vec3) -> Mat3 {
    Mat3([[0.0, -x.z, x.y], [x.z, 0.0, -x.x], [-x.y, x.x, 0.0]])
}

/// The effective field operator `A(x) = alpha |x|^2 I - alpha x x^T - L(x)`.
///
/// `A(x) x = 0` and `A(x)^T x = 0` hold for every `x`; the latter is what
/// makes midpoint discretizations norm-preserving.
pub fn effective_operator(x: Vec3, alpha: f64) -> Mat3 {
    Mat3::IDENTITY * (alpha * x.norm_squared()) - Mat3::outer(x, x) * alpha - cross_matrix(x)
}

/// The rotation `exp(L(b) t)` about the axis `b/|b|` by the angle `|b| t`,
/// via the Rodrigues formula
///
/// ```text
/// R = I + sin(|b| t)/|b| L(b) + (1 - cos(|b| t))/|b|^2 L(b)^2.
/// ```
///
/// For `|b| |t| < 1e-8` the second-order Taylor form
/// `I + t L(b) + t^2/2 L(b)^2` is used instead to avoid the 0/0 at `b = 0`;
/// at that angle the truncation error is below round-off.
pub fn rotation_exp(b: Vec3, t: f64) -> Mat3 {
    let speed = b.norm();
    let theta = speed * t;
    let l = cross_matrix(b);
    let l2 = l * l;
    if theta.abs() < 1e-8 {
        Mat3::IDENTITY + l * t + l2 * (0.5 * t * t)
    } else {
        let c1 = theta.sin() / speed;
        let c2 = (1.0 - theta.cos()) / (speed * speed);
        Mat3::IDENTITY + l * c1 + l2 * c2
    }
}

/// Closed form of `sum_j (D_j A) A^T_{.j}(x) = -2 (alpha^2 |x|^2 + 1) x`, the
/// quantity whose half, scaled by `eps_t^2`, converts the Stratonovich noise
/// term `eps_t A(mu) dW` into its Ito drift correction.
pub fn strato_drift_correction(x: Vec3, alpha: f64) -> Vec3 {
    x * (-2.0 * (alpha * alpha * x.norm_squared() + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PI: f64 = std::f64::consts::PI;

    fn assert_close(a: Vec3, b: Vec3, tol: f64) {
        assert!(
            (a - b).norm() <= tol,
            "vectors differ: {a:?} vs {b:?} (tol {tol})"
        );
    }

    #[test]
    fn cross_matrix_matches_cross_product_on_basis() {
        let m = cross_matrix(Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(m.mul_vec(Vec3::new(0.0, 1.0, 0.0)), Vec3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn cross_matrix_of_zero_is_zero() {
        assert_eq!(cross_matrix(Vec3::ZERO), Mat3::ZERO);
    }

    #[test]
    fn cross_matrix_annihilates_its_argument() {
        let x = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(cross_matrix(x).mul_vec(x), Vec3::ZERO);
    }

    #[test]
    fn effective_operator_hand_expanded_value() {
        // unit x orthogonal to b: A(x) b = alpha b - alpha (x.b) x - x × b
        let x = Vec3::new(0.0, 0.0, 1.0);
        let b = Vec3::new(1.0, 0.0, 0.0);
        let got = effective_operator(x, 2.0).mul_vec(b);
        assert_close(got, Vec3::new(2.0, -1.0, 0.0), 1e-15);
    }

    #[test]
    fn effective_operator_at_alpha_zero_is_minus_cross_matrix() {
        let x = Vec3::new(0.3, -1.2, 0.7);
        let a = effective_operator(x, 0.0);
        let l = cross_matrix(x);
        assert!(a.max_abs_diff(&(Mat3::ZERO - l)) == 0.0);
    }

    #[test]
    fn rotation_exp_at_zero_time_is_identity() {
        let r = rotation_exp(Vec3::new(0.4, -2.0, 1.0), 0.0);
        assert!(r.max_abs_diff(&Mat3::IDENTITY) == 0.0);
    }

    #[test]
    fn rotation_exp_quarter_turn_about_z() {
        let r = rotation_exp(Vec3::new(0.0, 0.0, 1.0), PI / 2.0);
        assert_close(r.mul_vec(Vec3::new(1.0, 0.0, 0.0)), Vec3::new(0.0, 1.0, 0.0), 1e-15);
    }

    #[test]
    fn rotation_exp_matches_truncated_power_series() {
        // exp(L(b) t) = sum_k (L(b) t)^k / k!, summed far past convergence.
        let b = Vec3::new(0.0, 0.0, 1.0);
        let t = PI / 2.0;
        let l = cross_matrix(b) * t;
        let mut series = Mat3::IDENTITY;
        let mut term = Mat3::IDENTITY;
        for k in 1..40 {
            term = term * l * (1.0 / k as f64);
            series = series + term;
        }
        assert!(rotation_exp(b, t).max_abs_diff(&series) < 1e-14);
    }

    #[test]
    fn strato_drift_correction_reference_values() {
        assert_eq!(
            strato_drift_correction(Vec3::new(1.0, 0.0, 0.0), 1.0),
            Vec3::new(-4.0, 0.0, 0.0)
        );
        assert_eq!(strato_drift_correction(Vec3::ZERO, 3.7), Vec3::ZERO);
        // alpha = 0 on the unit sphere reduces to -2x
        let x = Vec3::new(0.6, 0.8, 0.0);
        assert_close(strato_drift_correction(x, 0.0), x * -2.0, 1e-15);
    }

    fn arb_vec3() -> impl Strategy<Value = Vec3> {
        (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    proptest! {
        #[test]
        fn cross_matrix_is_antisymmetric(x in arb_vec3()) {
            let m = cross_matrix(x);
            prop_assert!(m.max_abs_diff(&(Mat3::ZERO - m.transpose())) == 0.0);
        }

        #[test]
        fn cross_matrix_anticommutes(x in arb_vec3(), y in arb_vec3()) {
            let lhs = cross_matrix(x).mul_vec(y);
            let rhs = -cross_matrix(y).mul_vec(x);
            prop_assert!((lhs - rhs).norm() == 0.0);
        }

        #[test]
        fn effective_operator_annihilates_state(x in arb_vec3(), alpha in 0.0..4.0f64) {
            // states live near the unit sphere; clamp draws accordingly so
            // the absolute 1e-14 bound is meaningful
            let x = if x.norm() > 1.2 { x.normalized() * 1.2 } else { x };
            let a = effective_operator(x, alpha);
            prop_assert!(a.mul_vec(x).norm() <= 1e-14);
            // the transpose annihilates x as well
            prop_assert!(a.transpose().mul_vec(x).norm() <= 1e-14);
        }

        #[test]
        fn rotation_exp_is_a_one_parameter_group(
            b in arb_vec3(),
            t in -5.0..5.0f64,
            s in -5.0..5.0f64,
        ) {
            let lhs = rotation_exp(b, t) * rotation_exp(b, s);
            let rhs = rotation_exp(b, t + s);
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        }

        #[test]
        fn rotation_exp_fixes_the_axis(b in arb_vec3(), t in -5.0..5.0f64) {
            let r = rotation_exp(b, t);
            prop_assert!((r.mul_vec(b) - b).norm() <= 1e-13 * (1.0 + b.norm()));
        }

        #[test]
        fn rotation_exp_is_orthogonal_with_unit_determinant(b in arb_vec3(), t in -5.0..5.0f64) {
            let r = rotation_exp(b, t);
            prop_assert!((r * r.transpose()).max_abs_diff(&Mat3::IDENTITY) <= 1e-13);
            let det = r.row(0).dot(r.row(1).cross(r.row(2)));
            prop_assert!((det - 1.0).abs() <= 1e-13);
        }
    }
}
