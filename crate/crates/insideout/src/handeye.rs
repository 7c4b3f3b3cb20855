//! Hand-eye calibration: recovering the tracker-to-C-arm mounting transform
//! `X = tracker_t_carm` from relative-motion pairs `(A, B)` satisfying
//! `A ∘ X = X ∘ B`.
//!
//! The rotation is solved first by linearizing the quaternion constraint
//! `q_a * q_x = q_x * q_b`: writing `P = 2 sin(θ/2) n̂` for each side (twice
//! the vector part of the canonical, non-negative-scalar quaternion), every
//! pair yields `skew(P_a + P_b) · p = P_b - P_a`, whose least-squares
//! solution gives `q_x ∝ [1, p]`. The translation then comes from stacking
//! `(R_a - I) t_x = R_x t_b - t_a`.
//!
//! A circular orbit rotates about a single axis, which leaves one direction
//! of both systems unobservable. [`diagnose_degeneracy`] detects this from
//! the spread of the relative rotation axes; when the motion is single-axis
//! the solvers truncate the normal systems to rank 2 and return the
//! minimum-norm solution, flagging the result instead of failing or
//! returning noise-amplified garbage. The translation component along the
//! reported [`DegeneracyReport::unobservable_direction`] is then a
//! gauge choice, not a measurement — downstream consumers must treat it
//! accordingly.

use crate::geometry::{RigidTransform, Rotation};
use crate::trajectory::RelativePosePair;
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Axis-spread threshold (degrees) below which the motion is treated as
/// single-axis. Well above the spread produced by pose noise on a circular
/// orbit, well below the spread of any deliberate out-of-plane excursion.
pub const DEFAULT_AXIS_TOLERANCE_DEG: f64 = 20.0;

/// Pairs rotating less than this (degrees) carry mostly noise in their axis
/// direction and are excluded from the degeneracy diagnosis. Capped at half
/// the largest observed rotation so slow, fine-grained sweeps still have
/// informative pairs.
pub const INFORMATIVE_ANGLE_FLOOR_DEG: f64 = 15.0;

/// Below this rotation angle (radians) a pair is considered rotationless.
const MIN_ROTATION_RAD: f64 = 1e-9;

/// Relative singular-value cutoff for the pseudo-inverse solves.
const SINGULAR_VALUE_RTOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HandEyeError {
    #[error("hand-eye needs at least 2 pairs with rotational motion, got {usable}")]
    InsufficientMotion { usable: usize },
    #[error("no pair carries rotational motion")]
    NoRotationalMotion,
    #[error("translation system has rank < 2; the motion cannot constrain t_x")]
    TranslationUnderconstrained,
}

/// Geometric observability analysis of a set of motion pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    /// Largest angle (degrees) between an informative rotation axis and the
    /// dominant axis.
    pub axis_spread_deg: f64,
    /// 3 when the axes span enough directions to determine everything,
    /// 2 when the motion is effectively single-axis.
    pub observable_rank: usize,
    /// Dominant rotation axis (tracker frame) when `observable_rank == 2`:
    /// the direction along which the solved translation is a gauge choice.
    pub unobservable_direction: Option<Vector3<f64>>,
    /// Number of pairs whose rotation cleared the informative-angle floor.
    pub informative_pairs: usize,
    /// Largest relative rotation (degrees) in the set.
    pub max_rotation_deg: f64,
}

/// Rotation part of a hand-eye solution.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationSolve {
    pub rotation: Rotation,
    /// True when the system was truncated to rank 2 because the motion is
    /// single-axis; the rotation is then the minimum-norm representative.
    pub single_axis: bool,
}

/// Translation part of a hand-eye solution.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationSolve {
    pub translation: Vector3<f64>,
    /// Per-pair equation residuals `(R_a - I) t - (R_x t_b - t_a)`,
    /// millimetres, in pair order.
    pub residuals: Vec<Vector3<f64>>,
}

/// Complete hand-eye solution with residual statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandEyeSolution {
    /// Recovered `tracker_t_carm`.
    pub x: RigidTransform,
    /// Mean absolute rotation-equation residual about each tracker axis,
    /// degrees.
    pub rot_residual_per_axis_deg: [f64; 3],
    /// Root-mean-square norm of the translation-equation residuals,
    /// millimetres.
    pub trans_residual_rms_mm: f64,
    /// Median absolute translation residual along each tracker axis,
    /// millimetres. A pronounced imbalance singles out the direction the
    /// tracker measures worst.
    pub trans_residual_median_per_axis_mm: [f64; 3],
    pub degeneracy: DegeneracyReport,
}

fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Twice the vector part of the canonical (non-negative scalar) quaternion:
/// `2 sin(θ/2) n̂`.
fn rotation_vector_part(r: &Rotation) -> Vector3<f64> {
    let [_, x, y, z] = r.quaternion_wxyz();
    Vector3::new(x, y, z) * 2.0
}

struct TruncatedSolve {
    solution: Vector3<f64>,
    /// Second-largest singular value, for rank checks.
    sigma2: f64,
}

/// Minimum-norm least-squares solution of `a x = b` keeping at most
/// `max_rank` singular directions (plus the usual relative cutoff).
fn truncated_solve(a: DMatrix<f64>, b: &DVector<f64>, max_rank: usize) -> TruncatedSolve {
    let svd = a.svd(true, true);
    let u = svd.u.as_ref().expect("svd requested u");
    let v_t = svd.v_t.as_ref().expect("svd requested v_t");
    let s = &svd.singular_values;

    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].partial_cmp(&s[i]).expect("singular values are finite"));
    let sigma_max = s[order[0]];

    let mut x = Vector3::zeros();
    for (kept, &i) in order.iter().enumerate() {
        if kept >= max_rank || s[i] <= sigma_max * SINGULAR_VALUE_RTOL {
            break;
        }
        let coeff = u.column(i).dot(b) / s[i];
        x += Vector3::new(v_t[(i, 0)], v_t[(i, 1)], v_t[(i, 2)]) * coeff;
    }
    TruncatedSolve { solution: x, sigma2: if order.len() > 1 { s[order[1]] } else { 0.0 } }
}

/// Classifies the rotational motion of `pairs` by the spread of their
/// tracker-side rotation axes.
///
/// Axes are weighted equally after discarding pairs below the informative
/// floor; the dominant axis is the principal eigenvector of the axis
/// scatter matrix, sign-aligned with the first informative axis.
pub fn diagnose_degeneracy(
    pairs: &[RelativePosePair],
    axis_tolerance_deg: f64,
) -> Result<DegeneracyReport, HandEyeError> {
    let mut axes = Vec::with_capacity(pairs.len());
    let mut max_angle: f64 = 0.0;
    for pair in pairs {
        let angle = pair.tracker_motion.rotation.angle_rad();
        if angle > MIN_ROTATION_RAD {
            axes.push((pair.tracker_motion.rotation.scaled_axis_rad() / angle, angle));
            max_angle = max_angle.max(angle);
        }
    }
    if axes.is_empty() {
        return Err(HandEyeError::NoRotationalMotion);
    }

    let floor = INFORMATIVE_ANGLE_FLOOR_DEG.to_radians().min(0.5 * max_angle);
    let informative: Vec<Vector3<f64>> =
        axes.iter().filter(|(_, angle)| *angle >= floor).map(|(axis, _)| *axis).collect();

    let mut scatter = Matrix3::zeros();
    for axis in &informative {
        scatter += axis * axis.transpose();
    }
    let eigen = nalgebra::SymmetricEigen::new(scatter);
    let dominant_idx = eigen
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.partial_cmp(b).expect("eigenvalues are finite"))
        .map(|(i, _)| i)
        .expect("3x3 eigen always yields values");
    let mut dominant: Vector3<f64> = eigen.eigenvectors.column(dominant_idx).into_owned();
    if dominant.dot(&informative[0]) < 0.0 {
        dominant = -dominant;
    }

    let axis_spread_deg = informative
        .iter()
        .map(|axis| axis.dot(&dominant).abs().clamp(0.0, 1.0).acos().to_degrees())
        .fold(0.0f64, f64::max);

    let observable_rank = if axis_spread_deg < axis_tolerance_deg { 2 } else { 3 };
    Ok(DegeneracyReport {
        axis_spread_deg,
        observable_rank,
        unobservable_direction: (observable_rank == 2).then_some(dominant),
        informative_pairs: informative.len(),
        max_rotation_deg: max_angle.to_degrees(),
    })
}

fn solve_rotation_given(
    pairs: &[RelativePosePair],
    report: &DegeneracyReport,
) -> Result<RotationSolve, HandEyeError> {
    let mut rows: Vec<(Vector3<f64>, Vector3<f64>)> = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let pa = rotation_vector_part(&pair.tracker_motion.rotation);
        let pb = rotation_vector_part(&pair.carm_motion.rotation);
        if pa.norm() < MIN_ROTATION_RAD && pb.norm() < MIN_ROTATION_RAD {
            continue;
        }
        rows.push((pa, pb));
    }
    if rows.len() < 2 {
        return Err(HandEyeError::InsufficientMotion { usable: rows.len() });
    }

    let mut a = DMatrix::zeros(3 * rows.len(), 3);
    let mut b = DVector::zeros(3 * rows.len());
    for (r, (pa, pb)) in rows.iter().enumerate() {
        a.fixed_view_mut::<3, 3>(3 * r, 0).copy_from(&skew(&(pa + pb)));
        b.fixed_view_mut::<3, 1>(3 * r, 0).copy_from(&(pb - pa));
    }

    let solved = truncated_solve(a, &b, report.observable_rank);
    let p = solved.solution;
    let rotation = Rotation::from_quaternion_wxyz([1.0, p.x, p.y, p.z])
        .expect("[1, p] always has norm >= 1");
    Ok(RotationSolve { rotation, single_axis: report.observable_rank == 2 })
}

fn solve_translation_given(
    pairs: &[RelativePosePair],
    rotation: &Rotation,
    report: &DegeneracyReport,
) -> Result<TranslationSolve, HandEyeError> {
    if pairs.is_empty() {
        return Err(HandEyeError::TranslationUnderconstrained);
    }
    let identity = Matrix3::identity();
    let mut a = DMatrix::zeros(3 * pairs.len(), 3);
    let mut b = DVector::zeros(3 * pairs.len());
    for (r, pair) in pairs.iter().enumerate() {
        let lhs = pair.tracker_motion.rotation.to_matrix() - identity;
        let rhs = rotation.rotate_vector(&pair.carm_motion.translation)
            - pair.tracker_motion.translation;
        a.fixed_view_mut::<3, 3>(3 * r, 0).copy_from(&lhs);
        b.fixed_view_mut::<3, 1>(3 * r, 0).copy_from(&rhs);
    }

    let solved = truncated_solve(a, &b, report.observable_rank);
    if solved.sigma2 <= 1e-9 {
        return Err(HandEyeError::TranslationUnderconstrained);
    }
    let translation = solved.solution;
    let x = RigidTransform::new(*rotation, translation);
    Ok(TranslationSolve { translation, residuals: translation_residuals(pairs, &x) })
}

/// Rotation-only solve. The full [`solve`] is usually what you want; this
/// entry point exists for analyses that compare rotation quality across pair
/// selections without paying for the translation stage.
pub fn solve_rotation(pairs: &[RelativePosePair]) -> Result<RotationSolve, HandEyeError> {
    let report = diagnose_degeneracy(pairs, DEFAULT_AXIS_TOLERANCE_DEG)?;
    solve_rotation_given(pairs, &report)
}

/// Translation-only solve for a known rotation.
pub fn solve_translation(
    pairs: &[RelativePosePair],
    rotation: &Rotation,
) -> Result<TranslationSolve, HandEyeError> {
    let report = match diagnose_degeneracy(pairs, DEFAULT_AXIS_TOLERANCE_DEG) {
        Ok(report) => report,
        Err(HandEyeError::NoRotationalMotion) => {
            return Err(HandEyeError::TranslationUnderconstrained)
        }
        Err(other) => return Err(other),
    };
    solve_translation_given(pairs, rotation, &report)
}

/// Full hand-eye solve with the default single-axis tolerance.
pub fn solve(pairs: &[RelativePosePair]) -> Result<HandEyeSolution, HandEyeError> {
    solve_with_tolerance(pairs, DEFAULT_AXIS_TOLERANCE_DEG)
}

/// Full hand-eye solve: degeneracy diagnosis, rotation, translation, and
/// residual statistics.
pub fn solve_with_tolerance(
    pairs: &[RelativePosePair],
    axis_tolerance_deg: f64,
) -> Result<HandEyeSolution, HandEyeError> {
    let degeneracy = diagnose_degeneracy(pairs, axis_tolerance_deg)?;
    let rotation = solve_rotation_given(pairs, &degeneracy)?;
    let translation = solve_translation_given(pairs, &rotation.rotation, &degeneracy)?;

    let mut rot_acc = Vector3::zeros();
    for pair in pairs {
        let predicted = rotation.rotation.compose(&pair.carm_motion.rotation);
        let mismatch = pair
            .tracker_motion
            .rotation
            .compose(&rotation.rotation)
            .compose(&predicted.inverse());
        rot_acc += mismatch.scaled_axis_rad().abs();
    }
    let rot_residual = rot_acc * (180.0 / std::f64::consts::PI) / pairs.len() as f64;

    let mean_sq = translation.residuals.iter().map(Vector3::norm_squared).sum::<f64>()
        / translation.residuals.len() as f64;
    let mut per_axis = [0.0; 3];
    for (c, slot) in per_axis.iter_mut().enumerate() {
        let mut values: Vec<f64> =
            translation.residuals.iter().map(|r| r[c].abs()).collect();
        *slot = median(&mut values);
    }

    Ok(HandEyeSolution {
        x: RigidTransform::new(rotation.rotation, translation.translation),
        rot_residual_per_axis_deg: [rot_residual.x, rot_residual.y, rot_residual.z],
        trans_residual_rms_mm: mean_sq.sqrt(),
        trans_residual_median_per_axis_mm: per_axis,
        degeneracy,
    })
}

/// Translation-equation residuals `(R_a - I) t_x - (R_x t_b - t_a)` for an
/// arbitrary candidate `x`, in pair order.
///
/// Useful for verifying gauge freedom: on single-axis motion, shifting `t_x`
/// along the unobservable direction leaves these untouched.
pub fn translation_residuals(
    pairs: &[RelativePosePair],
    x: &RigidTransform,
) -> Vec<Vector3<f64>> {
    let identity = Matrix3::identity();
    pairs
        .iter()
        .map(|pair| {
            let lhs = (pair.tracker_motion.rotation.to_matrix() - identity) * x.translation;
            let rhs = x.rotation.rotate_vector(&pair.carm_motion.translation)
                - pair.tracker_motion.translation;
            lhs - rhs
        })
        .collect()
}

fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty set");
    values.sort_unstable_by(|a, b| a.partial_cmp(b).expect("residuals are finite"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{
        generate_orbit, relative_pairs, simulate_tracker, NoiseSpec, OrbitSpec, PairMode,
        PoseSample, PoseStream,
    };
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_transform(rng: &mut ChaCha8Rng, trans_range: f64) -> RigidTransform {
        let axis = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let axis = if axis.norm() < 1e-6 { Vector3::z() } else { axis };
        RigidTransform::new(
            Rotation::from_axis_angle(&axis, rng.random_range(-PI..PI)).unwrap(),
            Vector3::new(
                rng.random_range(-trans_range..trans_range),
                rng.random_range(-trans_range..trans_range),
                rng.random_range(-trans_range..trans_range),
            ),
        )
    }

    /// A stream of general (full-rank) motions with the given noise.
    fn general_stream(rng: &mut ChaCha8Rng, n: usize, x: &RigidTransform) -> PoseStream {
        let w = random_transform(rng, 1000.0);
        let carm_poses: Vec<RigidTransform> =
            (0..n).map(|_| random_transform(rng, 500.0)).collect();
        simulate_tracker(&carm_poses, x, &w, &NoiseSpec::none())
    }

    #[test]
    fn exact_recovery_on_general_motion() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for mode in [PairMode::Consecutive, PairMode::AllPairs] {
            for _ in 0..5 {
                let x = random_transform(&mut rng, 400.0);
                let stream = general_stream(&mut rng, 10, &x);
                let pairs = relative_pairs(&stream, mode).unwrap();
                let solution = solve(&pairs).unwrap();
                assert!(solution.degeneracy.unobservable_direction.is_none());
                assert!(solution.x.rotation_angle_to(&x) < 1e-9);
                assert!(solution.x.translation_distance_to(&x) < 1e-6);
            }
        }
    }

    #[test]
    fn identity_motion_yields_identity_mount() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let stream = general_stream(&mut rng, 8, &RigidTransform::identity());
        let pairs = relative_pairs(&stream, PairMode::AllPairs).unwrap();
        let solution = solve(&pairs).unwrap();
        assert!(solution.x.rotation.angle_rad() < 1e-9);
        assert!(solution.x.translation.norm() < 1e-6);
    }

    #[test]
    fn single_pair_is_insufficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = random_transform(&mut rng, 100.0);
        let stream = general_stream(&mut rng, 2, &x);
        let pairs = relative_pairs(&stream, PairMode::Consecutive).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!(matches!(
            solve_rotation(&pairs),
            Err(HandEyeError::InsufficientMotion { usable: 1 })
        ));
    }

    #[test]
    fn translation_only_motion_is_rejected() {
        let samples: Vec<PoseSample> = (0..4)
            .map(|i| {
                let t = Vector3::new(10.0 * i as f64, -3.0 * i as f64, 0.0);
                PoseSample {
                    index: i as u64,
                    world_t_tracker: RigidTransform::from_translation(t),
                    volume_t_carm: RigidTransform::from_translation(t),
                }
            })
            .collect();
        let stream = PoseStream::new(samples).unwrap();
        let pairs = relative_pairs(&stream, PairMode::AllPairs).unwrap();
        assert!(matches!(
            diagnose_degeneracy(&pairs, DEFAULT_AXIS_TOLERANCE_DEG),
            Err(HandEyeError::NoRotationalMotion)
        ));
        assert!(matches!(
            solve_translation(&pairs, &Rotation::identity()),
            Err(HandEyeError::TranslationUnderconstrained)
        ));
        assert!(matches!(solve(&pairs), Err(HandEyeError::NoRotationalMotion)));
    }

    #[test]
    fn circular_orbit_is_single_axis_with_gauge_freedom() {
        // Tracker mounted with its viewing axis along the orbit axis: the
        // unobservable direction is the tracker z axis.
        let x = RigidTransform::new(
            Rotation::about_x(PI / 2.0),
            Vector3::new(0.0, 980.0, 0.0),
        );
        let w = RigidTransform::new(
            Rotation::about_z(0.4),
            Vector3::new(1500.0, -200.0, 900.0),
        );
        let orbit = generate_orbit(&OrbitSpec::default()).unwrap();
        let stream = simulate_tracker(&orbit, &x, &w, &NoiseSpec::none());
        let pairs = relative_pairs(&stream, PairMode::AllPairs).unwrap();

        let solution = solve(&pairs).unwrap();
        let report = &solution.degeneracy;
        assert_eq!(report.observable_rank, 2);
        assert!(report.axis_spread_deg < 1e-5);
        let dir = report.unobservable_direction.unwrap();
        assert!(dir.dot(&Vector3::z()).abs() > 1.0 - 1e-6);

        // Rotation: exact in its action on the orbit axis (the component
        // about the axis itself is gauge).
        let axis_in_carm = Vector3::y();
        assert_abs_diff_eq!(
            solution.x.rotation.rotate_vector(&axis_in_carm),
            x.rotation.rotate_vector(&axis_in_carm),
            epsilon = 1e-6
        );

        // Translation: in-plane components recovered exactly; the true t_x
        // has no component along the gauge direction, so the minimum-norm
        // answer matches it outright.
        assert_abs_diff_eq!(solution.x.translation, x.translation, epsilon = 1e-6);

        // Gauge invariance: shifting t_x along the unobservable direction
        // does not change a single residual.
        let base = translation_residuals(&pairs, &solution.x);
        let shifted = RigidTransform::new(
            solution.x.rotation,
            solution.x.translation + dir * 5.0,
        );
        for (r0, r1) in base.iter().zip(translation_residuals(&pairs, &shifted)) {
            assert_abs_diff_eq!(*r0, r1, epsilon = 1e-9);
        }
        assert!(base.iter().map(|r| r.norm()).fold(0.0f64, f64::max) < 1e-8);
    }

    #[test]
    fn zero_tolerance_disables_the_single_axis_path() {
        let x = RigidTransform::new(Rotation::about_x(PI / 2.0), Vector3::new(20.0, 250.0, 400.0));
        let orbit = generate_orbit(&OrbitSpec::default()).unwrap();
        let noise = NoiseSpec { seed: 1, ..NoiseSpec::default() };
        let stream = simulate_tracker(&orbit, &x, &RigidTransform::identity(), &noise);
        let pairs = relative_pairs(&stream, PairMode::AllPairs).unwrap();
        let forced_full = solve_with_tolerance(&pairs, 0.0).unwrap();
        assert_eq!(forced_full.degeneracy.observable_rank, 3);
        assert!(forced_full.degeneracy.unobservable_direction.is_none());
        let default = solve(&pairs).unwrap();
        assert_eq!(default.degeneracy.observable_rank, 2);
    }

    #[test]
    fn reported_rms_matches_independent_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let x = random_transform(&mut rng, 300.0);
        let w = random_transform(&mut rng, 1000.0);
        let orbit = generate_orbit(&OrbitSpec { n_poses: 20, ..OrbitSpec::default() }).unwrap();
        let stream = simulate_tracker(&orbit, &x, &w, &NoiseSpec::default());
        let pairs = relative_pairs(&stream, PairMode::AllPairs).unwrap();
        let solution = solve(&pairs).unwrap();

        let residuals = translation_residuals(&pairs, &solution.x);
        let rms =
            (residuals.iter().map(Vector3::norm_squared).sum::<f64>() / residuals.len() as f64)
                .sqrt();
        assert_abs_diff_eq!(solution.trans_residual_rms_mm, rms, epsilon = 1e-12);
        assert!(rms > 0.0);
    }

    #[test]
    fn errors_grow_monotonically_with_noise() {
        // Mean recovery error over 20 seeds at five noise scales; each step
        // up in noise must not reduce the error by more than 10%.
        let scales = [0.0, 1.0, 2.0, 4.0, 8.0];
        let mut means = Vec::new();
        for scale in scales {
            let mut total = 0.0;
            for seed in 0..20u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
                let x = random_transform(&mut rng, 300.0);
                let w = random_transform(&mut rng, 1000.0);
                let carm: Vec<RigidTransform> =
                    (0..12).map(|_| random_transform(&mut rng, 500.0)).collect();
                // Same noise realization per seed across all levels, only
                // scaled: a paired design that makes monotonicity sharp.
                let noise = NoiseSpec {
                    rotation_sigma_deg: 0.1 * scale,
                    translation_sigma_mm: 0.5 * scale,
                    drift_mm_per_pose: 0.0,
                    seed: 777 + seed,
                };
                let stream = simulate_tracker(&carm, &x, &w, &noise);
                let pairs = relative_pairs(&stream, PairMode::AllPairs).unwrap();
                let solution = solve(&pairs).unwrap();
                total += solution.x.translation_distance_to(&x);
            }
            means.push(total / 20.0);
        }
        for step in means.windows(2) {
            assert!(
                step[1] >= step[0] * 0.9,
                "noise response not monotone: {means:?}"
            );
        }
        assert!(means[0] < 1e-6 && means[4] > means[0]);
    }
}
