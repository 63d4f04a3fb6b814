//! Differentiable rigid motions: Rodrigues rotations about a pivot,
//! translations along an axis, and the unit-normalization Jacobian.

use nalgebra::{Matrix3, Point3, Unit, Vector3};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MotionError {
    #[error("degenerate axis: norm {norm} below 1e-12")]
    DegenerateAxis { norm: f64 },
}

/// Rotation matrix about unit axis `u` by angle `theta`:
/// `cosθ·I + sinθ·[u]× + (1−cosθ)·uuᵀ`.
pub fn rodrigues_matrix(axis: &Unit<Vector3<f64>>, theta: f64) -> Matrix3<f64> {
    let u = axis.into_inner();
    let (s, c) = theta.sin_cos();
    let cross = Matrix3::new(0.0, -u.z, u.y, u.z, 0.0, -u.x, -u.y, u.x, 0.0);
    Matrix3::identity() * c + cross * s + u * u.transpose() * (1.0 - c)
}

/// Rotate one point about the axis through `pivot`.
pub fn rotate_point(
    point: &Point3<f64>,
    pivot: &Point3<f64>,
    axis: &Unit<Vector3<f64>>,
    theta: f64,
) -> Point3<f64> {
    pivot + rodrigues_matrix(axis, theta) * (point - pivot)
}

pub fn rotate_points(
    points: &[Point3<f64>],
    pivot: &Point3<f64>,
    axis: &Unit<Vector3<f64>>,
    theta: f64,
) -> Vec<Point3<f64>> {
    let rot = rodrigues_matrix(axis, theta);
    points.iter().map(|x| pivot + rot * (x - pivot)).collect()
}

pub fn translate_points(
    points: &[Point3<f64>],
    axis: &Unit<Vector3<f64>>,
    displacement: f64,
) -> Vec<Point3<f64>> {
    let t = axis.into_inner() * displacement;
    points.iter().map(|x| x + t).collect()
}

/// Jacobian of `u(a) = a/‖a‖` with respect to the raw axis `a`:
/// `(1/‖a‖)(I − aaᵀ/‖a‖²)`.
pub fn axis_jacobian(raw: &Vector3<f64>) -> Result<Matrix3<f64>, MotionError> {
    let norm = raw.norm();
    if norm <= 1e-12 {
        return Err(MotionError::DegenerateAxis { norm });
    }
    Ok((Matrix3::identity() - raw * raw.transpose() / (norm * norm)) / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unit(rng: &mut ChaCha8Rng) -> Unit<Vector3<f64>> {
        loop {
            let v = Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            if v.norm() > 1e-3 {
                return Unit::new_normalize(v);
            }
        }
    }

    #[test]
    fn quarter_turn_about_z() {
        let p = rotate_point(
            &Point3::new(1.0, 0.0, 0.0),
            &Point3::origin(),
            &Vector3::z_axis(),
            std::f64::consts::FRAC_PI_2,
        );
        assert!((p - Point3::new(0.0, 1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn zero_angle_is_identity_and_pivot_is_fixed() {
        let axis = Vector3::z_axis();
        let x = Point3::new(0.3, -0.7, 2.0);
        let y = rotate_point(&x, &Point3::new(1.0, 2.0, 3.0), &axis, 0.0);
        assert!((y - x).norm() < 1e-15);

        let pivot = Point3::new(1.0, 2.0, 3.0);
        for theta in [0.1, 1.0, 2.5, -0.7] {
            assert!((rotate_point(&pivot, &pivot, &axis, theta) - pivot).norm() < 1e-15);
        }
    }

    #[test]
    fn translation_cases() {
        let x = Point3::new(0.0, 1.0, 0.0);
        let u = Vector3::x_axis();
        assert_eq!(translate_points(&[x], &u, 0.0), vec![x]);
        assert_eq!(
            translate_points(&[x], &u, 2.0),
            vec![Point3::new(2.0, 1.0, 0.0)]
        );
        let back = translate_points(&translate_points(&[x], &u, 3.5), &u, -3.5);
        assert!((back[0] - x).norm() < 1e-15);
    }

    #[test]
    fn rotation_group_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..200 {
            let u = random_unit(&mut rng);
            let a = rng.random_range(-3.0..3.0);
            let b = rng.random_range(-3.0..3.0);
            let ra = rodrigues_matrix(&u, a);
            // Orthogonality and determinant.
            assert!(((ra.transpose() * ra) - Matrix3::identity()).abs().max() <= 1e-12);
            assert!((ra.determinant() - 1.0).abs() <= 1e-12);
            // Composition about a shared axis.
            let rb = rodrigues_matrix(&u, b);
            let rab = rodrigues_matrix(&u, a + b);
            assert!((ra * rb - rab).abs().max() <= 1e-9);
        }
        // Exact identity at zero.
        let u = random_unit(&mut rng);
        assert_eq!(rodrigues_matrix(&u, 0.0), Matrix3::identity());
    }

    #[test]
    fn axis_sign_equivalence() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let u = random_unit(&mut rng);
            let neg = Unit::new_normalize(-u.into_inner());
            let theta = rng.random_range(-2.0..2.0);
            let x = Point3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let p = Point3::new(0.1, 0.2, 0.3);
            let a = rotate_point(&x, &p, &u, theta);
            let b = rotate_point(&x, &p, &neg, -theta);
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn jacobian_frozen_cases() {
        // a = (2,0,0): (1/2)·diag(0,1,1).
        let j = axis_jacobian(&Vector3::new(2.0, 0.0, 0.0)).unwrap();
        let expected = Matrix3::from_diagonal(&Vector3::new(0.0, 0.5, 0.5));
        assert!((j - expected).abs().max() < 1e-15);

        // Unit a: I − aaᵀ.
        let a = Vector3::new(0.0, 1.0, 0.0);
        let j = axis_jacobian(&a).unwrap();
        assert!((j - (Matrix3::identity() - a * a.transpose())).abs().max() < 1e-15);

        assert!(axis_jacobian(&Vector3::zeros()).is_err());
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let h = 1e-7;
        for _ in 0..100 {
            let scale = rng.random_range(0.1..10.0);
            let a = random_unit(&mut rng).into_inner() * scale;
            let j = axis_jacobian(&a).unwrap();
            for k in 0..3 {
                let mut hi = a;
                let mut lo = a;
                hi[k] += h;
                lo[k] -= h;
                let fd = (hi.normalize() - lo.normalize()) / (2.0 * h);
                for r in 0..3 {
                    assert!(
                        (j[(r, k)] - fd[r]).abs() <= 1e-6,
                        "J[{r},{k}] = {} vs fd {}",
                        j[(r, k)],
                        fd[r]
                    );
                }
            }
        }
    }
}
