//! Rigid-body primitives: rotations, SE(3) transforms, and 3-D lines.
//!
//! # Conventions
//!
//! * A transform named `a_t_b` maps coordinates expressed in frame `B` into
//!   frame `A` via `p_a = R * p_b + t`.
//! * Rotations are stored as unit quaternions and renormalized after every
//!   composition so long chains cannot drift off the unit sphere. Rotation
//!   matrices appear only at API boundaries.
//! * Lengths are millimetres and internal angles radians; any quantity
//!   reported in degrees carries a `_deg` suffix.
//! * Serialized rotations are `[w, x, y, z]` arrays with the sign chosen so
//!   `w >= 0`, which makes save → load → save byte-stable.

use nalgebra::{Matrix3, Matrix4, Quaternion, Unit, UnitQuaternion, Vector3};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Maximum deviation from unit norm accepted when ingesting a quaternion or
/// line direction from external data.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("direction vector has near-zero length ({norm:.3e})")]
    ZeroDirection { norm: f64 },
    #[error("rotation axis has near-zero length ({norm:.3e})")]
    ZeroAxis { norm: f64 },
    #[error("quaternion has near-zero norm ({norm:.3e})")]
    ZeroQuaternion { norm: f64 },
    #[error("quaternion norm {norm} deviates from 1 by more than {tolerance:.1e}")]
    NotUnitQuaternion { norm: f64, tolerance: f64 },
}

fn near_zero(norm: f64) -> bool {
    norm < 1e-12
}

/// A rotation in SO(3) backed by a unit quaternion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(UnitQuaternion<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(UnitQuaternion::identity())
    }

    /// Rotation by `angle_rad` about an arbitrary (not necessarily unit) axis.
    pub fn from_axis_angle(axis: &Vector3<f64>, angle_rad: f64) -> Result<Self, GeometryError> {
        let norm = axis.norm();
        if near_zero(norm) {
            return Err(GeometryError::ZeroAxis { norm });
        }
        Ok(Rotation(UnitQuaternion::from_axis_angle(
            &Unit::new_normalize(*axis),
            angle_rad,
        )))
    }

    pub fn about_x(angle_rad: f64) -> Self {
        Rotation(UnitQuaternion::from_axis_angle(&Vector3::x_axis(), angle_rad))
    }

    pub fn about_y(angle_rad: f64) -> Self {
        Rotation(UnitQuaternion::from_axis_angle(&Vector3::y_axis(), angle_rad))
    }

    pub fn about_z(angle_rad: f64) -> Self {
        Rotation(UnitQuaternion::from_axis_angle(&Vector3::z_axis(), angle_rad))
    }

    /// Exponential map: rotation whose axis is `v / |v|` and angle `|v|` radians.
    pub fn from_scaled_axis(v: Vector3<f64>) -> Self {
        Rotation(UnitQuaternion::from_scaled_axis(v))
    }

    /// Builds a rotation from a `[w, x, y, z]` quaternion, normalizing it.
    pub fn from_quaternion_wxyz(wxyz: [f64; 4]) -> Result<Self, GeometryError> {
        let [w, x, y, z] = wxyz;
        let q = Quaternion::new(w, x, y, z);
        let norm = q.norm();
        if near_zero(norm) {
            return Err(GeometryError::ZeroQuaternion { norm });
        }
        Ok(Rotation(UnitQuaternion::new_normalize(q)))
    }

    /// Like [`Rotation::from_quaternion_wxyz`] but rejects inputs whose norm
    /// deviates from 1 by more than [`UNIT_NORM_TOLERANCE`]. Used when
    /// ingesting external data, where a non-unit quaternion signals a
    /// corrupted or hand-edited file rather than accumulated round-off.
    pub fn from_unit_quaternion_wxyz(wxyz: [f64; 4]) -> Result<Self, GeometryError> {
        let [w, x, y, z] = wxyz;
        let q = Quaternion::new(w, x, y, z);
        let norm = q.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOLERANCE {
            return Err(GeometryError::NotUnitQuaternion {
                norm,
                tolerance: UNIT_NORM_TOLERANCE,
            });
        }
        // Validated unit within tolerance; keep the stored bits untouched so
        // save → load → save round trips are byte-identical.
        Ok(Rotation(UnitQuaternion::new_unchecked(q)))
    }

    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        Rotation(UnitQuaternion::from_rotation_matrix(
            &nalgebra::Rotation3::from_matrix_unchecked(*m),
        ))
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        self.0.to_rotation_matrix().into_inner()
    }

    /// Quaternion components `[w, x, y, z]` with the sign canonicalized so the
    /// first non-zero component is positive.
    pub fn quaternion_wxyz(&self) -> [f64; 4] {
        let q = self.0.quaternion();
        let mut wxyz = [q.w, q.i, q.j, q.k];
        let flip = wxyz
            .iter()
            .find(|c| c.abs() > 0.0)
            .map(|c| *c < 0.0)
            .unwrap_or(false);
        if flip {
            for c in &mut wxyz {
                *c = -*c;
            }
        }
        wxyz
    }

    /// Composition `self * other` (apply `other` first), renormalized.
    pub fn compose(&self, other: &Rotation) -> Rotation {
        let q = self.0.into_inner() * other.0.into_inner();
        Rotation(UnitQuaternion::new_normalize(q))
    }

    pub fn inverse(&self) -> Rotation {
        Rotation(self.0.inverse())
    }

    pub fn rotate_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    /// Logarithm map: axis scaled by angle, in radians. The angle is in
    /// `[0, pi]`, so the result is the canonical representative.
    pub fn scaled_axis_rad(&self) -> Vector3<f64> {
        self.0.scaled_axis()
    }

    /// Rotation angle in radians, in `[0, pi]`.
    pub fn angle_rad(&self) -> f64 {
        self.0.angle()
    }

    /// Signed per-axis decomposition of the rotation logarithm, in degrees.
    ///
    /// These are the x/y/z components of the rotation vector, not Euler
    /// angles; they are the natural way to report "how much rotation happened
    /// about each body axis" for small-to-moderate rotations.
    pub fn angles_about_axes_deg(&self) -> [f64; 3] {
        let v = self.scaled_axis_rad() * 180.0 / std::f64::consts::PI;
        [v.x, v.y, v.z]
    }

    /// Geodesic distance to another rotation, in radians.
    pub fn angle_to(&self, other: &Rotation) -> f64 {
        self.0.angle_to(&other.0)
    }
}

impl Default for Rotation {
    fn default() -> Self {
        Rotation::identity()
    }
}

impl Serialize for Rotation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.quaternion_wxyz().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Rotation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wxyz = <[f64; 4]>::deserialize(deserializer)?;
        Rotation::from_unit_quaternion_wxyz(wxyz).map_err(D::Error::custom)
    }
}

/// A rigid transform in SE(3): rotation followed by translation.
///
/// Instances are conventionally named `a_t_b` and map frame-`B` coordinates
/// into frame `A`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RigidTransform {
    pub rotation: Rotation,
    pub translation: Vector3<f64>,
}

#[derive(Serialize, Deserialize)]
struct TransformRepr {
    rotation_wxyz: [f64; 4],
    translation_mm: [f64; 3],
}

impl Serialize for RigidTransform {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TransformRepr {
            rotation_wxyz: self.rotation.quaternion_wxyz(),
            translation_mm: self.translation.into(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RigidTransform {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = TransformRepr::deserialize(deserializer)?;
        let rotation =
            Rotation::from_unit_quaternion_wxyz(repr.rotation_wxyz).map_err(D::Error::custom)?;
        Ok(RigidTransform {
            rotation,
            translation: Vector3::from(repr.translation_mm),
        })
    }
}

impl RigidTransform {
    pub fn identity() -> Self {
        RigidTransform::default()
    }

    pub fn new(rotation: Rotation, translation: Vector3<f64>) -> Self {
        RigidTransform { rotation, translation }
    }

    pub fn from_rotation(rotation: Rotation) -> Self {
        RigidTransform { rotation, translation: Vector3::zeros() }
    }

    pub fn from_translation(translation: Vector3<f64>) -> Self {
        RigidTransform { rotation: Rotation::identity(), translation }
    }

    /// Composition: `(self ∘ other)(p) = self(other(p))`. If `self` is
    /// `a_t_b` and `other` is `b_t_c`, the result is `a_t_c`.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation.compose(&other.rotation),
            translation: self.rotation.rotate_vector(&other.translation) + self.translation,
        }
    }

    pub fn inverse(&self) -> RigidTransform {
        let inv_rot = self.rotation.inverse();
        RigidTransform {
            rotation: inv_rot,
            translation: -inv_rot.rotate_vector(&self.translation),
        }
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.rotate_vector(p) + self.translation
    }

    /// Rotates a direction without applying the translation.
    pub fn transform_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.rotate_vector(v)
    }

    pub fn transform_line(&self, line: &Line3) -> Line3 {
        Line3 {
            origin: self.transform_point(&line.origin),
            direction: Unit::new_normalize(self.transform_vector(&line.direction)),
        }
    }

    /// 4x4 homogeneous matrix, for interop at API boundaries.
    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation.to_matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    /// Reads the rotation/translation blocks of a homogeneous matrix. The
    /// rotation block is re-orthonormalized through the quaternion
    /// conversion; the bottom row is ignored.
    pub fn from_homogeneous(m: &Matrix4<f64>) -> Self {
        let r: Matrix3<f64> = m.fixed_view::<3, 3>(0, 0).into();
        RigidTransform {
            rotation: Rotation::from_matrix(&r),
            translation: m.fixed_view::<3, 1>(0, 3).into(),
        }
    }

    /// Euclidean distance between the two translations, in millimetres.
    pub fn translation_distance_to(&self, other: &RigidTransform) -> f64 {
        (self.translation - other.translation).norm()
    }

    /// Geodesic rotation distance to another transform, in radians.
    pub fn rotation_angle_to(&self, other: &RigidTransform) -> f64 {
        self.rotation.angle_to(&other.rotation)
    }
}

/// An infinite line in 3-D, stored as an origin point plus a unit direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line3 {
    pub origin: Vector3<f64>,
    pub direction: Unit<Vector3<f64>>,
}

#[derive(Serialize, Deserialize)]
struct Line3Repr {
    origin_mm: [f64; 3],
    direction: [f64; 3],
}

impl Serialize for Line3 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        Line3Repr {
            origin_mm: self.origin.into(),
            direction: (*self.direction.as_ref()).into(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Line3 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = Line3Repr::deserialize(deserializer)?;
        let dir = Vector3::from(repr.direction);
        if (dir.norm() - 1.0).abs() > UNIT_NORM_TOLERANCE {
            return Err(D::Error::custom(format!(
                "line direction norm {} deviates from 1 by more than {:.1e}",
                dir.norm(),
                UNIT_NORM_TOLERANCE
            )));
        }
        // Validated unit within tolerance; keep the stored bits untouched so
        // round trips are exact.
        Ok(Line3 { origin: Vector3::from(repr.origin_mm), direction: Unit::new_unchecked(dir) })
    }
}

impl Line3 {
    /// Line through `origin` along `direction`; the direction is normalized
    /// and must be non-degenerate.
    pub fn new(origin: Vector3<f64>, direction: Vector3<f64>) -> Result<Self, GeometryError> {
        let norm = direction.norm();
        if near_zero(norm) {
            return Err(GeometryError::ZeroDirection { norm });
        }
        Ok(Line3 { origin, direction: Unit::new_normalize(direction) })
    }

    pub fn through_points(a: Vector3<f64>, b: Vector3<f64>) -> Result<Self, GeometryError> {
        Line3::new(a, b - a)
    }

    /// Perpendicular distance from `p` to the line.
    pub fn distance_to_point(&self, p: &Vector3<f64>) -> f64 {
        (p - self.origin).cross(&self.direction).norm()
    }

    /// Point on the line at signed arc length `s` from the origin.
    pub fn point_at(&self, s: f64) -> Vector3<f64> {
        self.origin + self.direction.into_inner() * s
    }

    /// Signed arc length of the orthogonal projection of `p` onto the line.
    pub fn project_arc_length(&self, p: &Vector3<f64>) -> f64 {
        (p - self.origin).dot(&self.direction)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn deg(d: f64) -> f64 {
        d * PI / 180.0
    }

    fn random_rotation(rng: &mut ChaCha8Rng) -> Rotation {
        let axis = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let axis = if axis.norm() < 1e-6 { Vector3::x() } else { axis };
        Rotation::from_axis_angle(&axis, rng.random_range(-PI..PI)).unwrap()
    }

    fn random_transform(rng: &mut ChaCha8Rng) -> RigidTransform {
        RigidTransform::new(
            random_rotation(rng),
            Vector3::new(
                rng.random_range(-1000.0..1000.0),
                rng.random_range(-1000.0..1000.0),
                rng.random_range(-1000.0..1000.0),
            ),
        )
    }

    #[test]
    fn compose_quarter_turns_about_z() {
        let t = RigidTransform::new(Rotation::about_z(FRAC_PI_2), Vector3::new(1.0, 0.0, 0.0));
        let tt = t.compose(&t);
        let expected = RigidTransform::new(Rotation::about_z(PI), Vector3::new(1.0, 1.0, 0.0));
        assert!(tt.rotation_angle_to(&expected) < 1e-12);
        assert_abs_diff_eq!(tt.translation, expected.translation, epsilon = 1e-12);
    }

    #[test]
    fn inverse_of_quarter_turn() {
        let t = RigidTransform::new(Rotation::about_z(FRAC_PI_2), Vector3::new(1.0, 0.0, 0.0));
        let inv = t.inverse();
        let expected =
            RigidTransform::new(Rotation::about_z(-FRAC_PI_2), Vector3::new(0.0, 1.0, 0.0));
        assert!(inv.rotation_angle_to(&expected) < 1e-12);
        assert_abs_diff_eq!(inv.translation, expected.translation, epsilon = 1e-12);
    }

    #[test]
    fn per_axis_angles_of_small_composition() {
        // Composing 3 deg about x with 4 deg about y leaves those components
        // nearly intact plus a small second-order z term (~ theta_x*theta_y/2).
        let r = Rotation::about_x(deg(3.0)).compose(&Rotation::about_y(deg(4.0)));
        let [ax, ay, az] = r.angles_about_axes_deg();
        assert_abs_diff_eq!(ax, 2.99878132, epsilon = 1e-6);
        assert_abs_diff_eq!(ay, 3.99908596, epsilon = 1e-6);
        assert_abs_diff_eq!(az, 0.10471975, epsilon = 1e-6);
        assert!((ax - 3.0).abs() < 0.05 && (ay - 4.0).abs() < 0.05 && az.abs() < 0.15);

        let [ix, iy, iz] = r.inverse().angles_about_axes_deg();
        assert_abs_diff_eq!(ix, -ax, epsilon = 1e-12);
        assert_abs_diff_eq!(iy, -ay, epsilon = 1e-12);
        assert_abs_diff_eq!(iz, -az, epsilon = 1e-12);
    }

    #[test]
    fn point_line_distance_unit_diagonal() {
        // Distance from (1,2,3) to the line through the origin along
        // (1,1,1)/sqrt(3): the projection has arc length 2*sqrt(3), leaving
        // the offset (-1,0,1), so the distance is sqrt(2). Cross-checked by a
        // one-dimensional golden-section minimization.
        let line = Line3::new(Vector3::zeros(), Vector3::new(1.0, 1.0, 1.0)).unwrap();
        let p = Vector3::new(1.0, 2.0, 3.0);
        let d = line.distance_to_point(&p);
        assert_abs_diff_eq!(d, std::f64::consts::SQRT_2, epsilon = 1e-12);

        let brute = {
            let f = |s: f64| (line.point_at(s) - p).norm();
            let (mut lo, mut hi) = (-100.0f64, 100.0f64);
            for _ in 0..200 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                if f(m1) < f(m2) {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            f(0.5 * (lo + hi))
        };
        assert_abs_diff_eq!(d, brute, epsilon = 1e-9);
    }

    #[test]
    fn points_on_line_have_zero_distance() {
        let line = Line3::through_points(
            Vector3::new(1.0, -2.0, 0.5),
            Vector3::new(4.0, 1.0, -3.0),
        )
        .unwrap();
        for s in [-10.0, 0.0, 0.25, 7.5] {
            assert!(line.distance_to_point(&line.point_at(s)) < 1e-12);
        }
    }

    #[test]
    fn compose_matches_homogeneous_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let a = random_transform(&mut rng);
            let b = random_transform(&mut rng);
            let direct = a.compose(&b).to_homogeneous();
            let via_matrices = a.to_homogeneous() * b.to_homogeneous();
            assert_abs_diff_eq!(direct, via_matrices, epsilon = 1e-9);
        }
    }

    #[test]
    fn ten_thousand_compose_inverse_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let t = random_transform(&mut rng);
            let round = t.compose(&t.inverse());
            assert!(round.rotation.angle_rad() < 1e-10);
            assert!(round.translation.norm() < 1e-10);
            let p = Vector3::new(
                rng.random_range(-500.0..500.0),
                rng.random_range(-500.0..500.0),
                rng.random_range(-500.0..500.0),
            );
            let back = t.inverse().transform_point(&t.transform_point(&p));
            assert_abs_diff_eq!(back, p, epsilon = 1e-9);
        }
    }

    #[test]
    fn long_composition_chain_stays_unit_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut acc = Rotation::identity();
        for _ in 0..50_000 {
            acc = acc.compose(&random_rotation(&mut rng));
            let [w, x, y, z] = acc.quaternion_wxyz();
            let norm = (w * w + x * x + y * y + z * z).sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_unit_quaternion_rejected_on_ingest() {
        let err = Rotation::from_unit_quaternion_wxyz([1.0, 1e-3, 0.0, 0.0]).unwrap_err();
        assert!(matches!(err, GeometryError::NotUnitQuaternion { .. }));
        // ...but plain construction normalizes.
        let r = Rotation::from_quaternion_wxyz([2.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(r.angle_rad() < 1e-15);
        assert!(Rotation::from_quaternion_wxyz([0.0; 4]).is_err());
    }

    #[test]
    fn canonical_quaternion_has_nonnegative_leading_component() {
        let r = Rotation::about_x(deg(350.0));
        let [w, ..] = r.quaternion_wxyz();
        assert!(w >= 0.0);
        let half_turn = Rotation::about_y(PI);
        let [w, x, y, _] = half_turn.quaternion_wxyz();
        assert!(w.abs() < 1e-15 && x.abs() < 1e-15 && y > 0.0);
    }

    #[test]
    fn degenerate_axes_and_directions_error() {
        assert!(matches!(
            Rotation::from_axis_angle(&Vector3::zeros(), 1.0),
            Err(GeometryError::ZeroAxis { .. })
        ));
        assert!(matches!(
            Line3::new(Vector3::zeros(), Vector3::zeros()),
            Err(GeometryError::ZeroDirection { .. })
        ));
        assert!(Line3::through_points(Vector3::x(), Vector3::x()).is_err());
    }

    proptest! {
        #[test]
        fn quaternion_matrix_round_trip(seed in 0u64..1_000_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = random_rotation(&mut rng);
            let back = Rotation::from_matrix(&r.to_matrix());
            prop_assert!(r.angle_to(&back) < 1e-12);
        }

        #[test]
        fn point_line_distance_is_rigid_invariant(seed in 0u64..1_000_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_transform(&mut rng);
            let line = Line3::new(
                Vector3::new(
                    rng.random_range(-100.0..100.0),
                    rng.random_range(-100.0..100.0),
                    rng.random_range(-100.0..100.0),
                ),
                Vector3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(1.0..2.0),
                ),
            ).unwrap();
            let p = Vector3::new(
                rng.random_range(-100.0..100.0),
                rng.random_range(-100.0..100.0),
                rng.random_range(-100.0..100.0),
            );
            let before = line.distance_to_point(&p);
            let after = t.transform_line(&line).distance_to_point(&t.transform_point(&p));
            prop_assert!((before - after).abs() < 1e-9);
        }

        #[test]
        fn homogeneous_round_trip(seed in 0u64..1_000_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_transform(&mut rng);
            let back = RigidTransform::from_homogeneous(&t.to_homogeneous());
            prop_assert!(t.rotation_angle_to(&back) < 1e-12);
            prop_assert!(t.translation_distance_to(&back) < 1e-12);
        }
    }
}
