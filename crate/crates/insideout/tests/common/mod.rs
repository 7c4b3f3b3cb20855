//! Shared oracles for the integration tests: independent, deliberately
//! naive implementations (homogeneous 4x4 matrices, dense sampling) that
//! the library's algebra is checked against.

#![allow(dead_code)]

use insideout::geometry::{Line3, RigidTransform, Rotation};
use nalgebra::{Matrix4, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Compose two rigid transforms the slow way, through 4x4 matrices.
pub fn compose_oracle(a: &RigidTransform, b: &RigidTransform) -> Matrix4<f64> {
    a.to_homogeneous() * b.to_homogeneous()
}

/// Invert a rigid transform the slow way.
pub fn inverse_oracle(a: &RigidTransform) -> Matrix4<f64> {
    a.to_homogeneous().try_inverse().expect("rigid transforms are invertible")
}

/// Largest entry-wise difference between a transform and a 4x4 oracle.
pub fn matrix_gap(t: &RigidTransform, oracle: &Matrix4<f64>) -> f64 {
    (t.to_homogeneous() - oracle).abs().max()
}

/// Point-to-line distance by dense sampling plus golden-section refinement,
/// never touching the cross-product formula used by the library.
pub fn brute_point_line_distance(line: &Line3, point: &Vector3<f64>) -> f64 {
    let eval = |s: f64| (line.point_at(s) - point).norm();
    // Bracket the minimum: the closest approach is within the projection of
    // the point onto the line, padded generously.
    let center = (point - line.origin).dot(&line.direction);
    let (mut lo, mut hi) = (center - 1.0e4, center + 1.0e4);
    let mut best = (eval(lo), lo);
    let steps = 4_096;
    for k in 0..=steps {
        let s = lo + (hi - lo) * k as f64 / steps as f64;
        let d = eval(s);
        if d < best.0 {
            best = (d, s);
        }
    }
    let span = (hi - lo) / steps as f64;
    lo = best.1 - span;
    hi = best.1 + span;
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    while (hi - lo).abs() > 1e-12 {
        if eval(c) < eval(d) {
            hi = d;
            d = c;
            c = hi - inv_phi * (hi - lo);
        } else {
            lo = c;
            c = d;
            d = lo + inv_phi * (hi - lo);
        }
    }
    eval((lo + hi) / 2.0)
}

/// A rotation drawn uniformly enough for testing: random axis, random angle.
pub fn random_rotation(rng: &mut ChaCha8Rng) -> Rotation {
    let axis = Vector3::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    );
    let axis = if axis.norm() < 1e-6 { Vector3::x() } else { axis };
    let angle = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    Rotation::from_axis_angle(&axis, angle).expect("non-zero axis")
}

/// A random rigid transform with translations up to `extent_mm`.
pub fn random_transform(rng: &mut ChaCha8Rng, extent_mm: f64) -> RigidTransform {
    RigidTransform {
        rotation: random_rotation(rng),
        translation: Vector3::new(
            rng.random_range(-extent_mm..extent_mm),
            rng.random_range(-extent_mm..extent_mm),
            rng.random_range(-extent_mm..extent_mm),
        ),
    }
}
