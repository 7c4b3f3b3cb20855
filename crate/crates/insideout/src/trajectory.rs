//! Synthetic C-arm orbits and the tracker pose streams observed while
//! driving them.
//!
//! The simulated rig has four frames:
//!
//! * `volume` — the imaged anatomy / phantom, with the isocenter at its
//!   origin. Encoder-derived C-arm poses `volume_t_carm` are expressed here
//!   and are treated as exact.
//! * `carm` — the imaging device. Its `+z` axis is the principal ray
//!   direction (source toward isocenter) and its `+y` axis lies along the
//!   orbit axis.
//! * `tracker` — an inside-out camera rigidly mounted on the device, looking
//!   along its own `+z`. The mounting transform `tracker_t_carm` is the
//!   calibration unknown.
//! * `world` — the tracker's map frame. Simulated tracker poses
//!   `world_t_tracker` carry all the measurement error.
//!
//! Tracker noise has three parts, all driven by one seeded RNG so streams are
//! reproducible: an isotropic rotation perturbation applied on the world
//! side, isotropic additive translation noise, and a deterministic drift that
//! accumulates along the tracker's current viewing axis — the depth direction
//! where inside-out localization is least constrained.

use crate::geometry::{RigidTransform, Rotation};
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrajectoryError {
    #[error("an orbit needs at least 2 poses, got {got}")]
    TooFewPoses { got: usize },
    #[error("sweep must lie in (0, 360] degrees, got {got_deg}")]
    SweepOutOfRange { got_deg: f64 },
    #[error("source-to-isocenter distance must be positive, got {got_mm} mm")]
    NonPositiveRadius { got_mm: f64 },
    #[error("orbit axis must be non-zero")]
    ZeroOrbitAxis,
    #[error("sample indices must be strictly increasing (violated at position {position})")]
    NonIncreasingIndex { position: usize },
    #[error("need at least 2 samples to form relative pairs, got {got}")]
    TooFewSamples { got: usize },
    #[error("pose stream carries no rotational motion to orient the augmentation")]
    NoRotationalMotion,
    #[error("out-of-plane rotation must be non-zero, got {got_deg} degrees")]
    InvalidOutOfPlaneRotation { got_deg: f64 },
}

/// Geometry of a circular C-arm orbit around the isocenter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OrbitSpec {
    /// Number of equally spaced poses along the sweep.
    pub n_poses: usize,
    /// Total angular sweep in degrees, in (0, 360].
    pub sweep_deg: f64,
    /// Radius of the source circle around the isocenter, millimetres.
    pub source_to_isocenter_mm: f64,
    /// Axis of the orbit in the volume frame (normalized internally).
    pub orbit_axis: Vector3<f64>,
}

impl Default for OrbitSpec {
    fn default() -> Self {
        OrbitSpec {
            n_poses: 98,
            sweep_deg: 190.0,
            source_to_isocenter_mm: 600.0,
            orbit_axis: Vector3::z(),
        }
    }
}

impl OrbitSpec {
    pub fn validate(&self) -> Result<(), TrajectoryError> {
        if self.n_poses < 2 {
            return Err(TrajectoryError::TooFewPoses { got: self.n_poses });
        }
        if !(self.sweep_deg > 0.0 && self.sweep_deg <= 360.0) {
            return Err(TrajectoryError::SweepOutOfRange { got_deg: self.sweep_deg });
        }
        if !(self.source_to_isocenter_mm > 0.0) {
            return Err(TrajectoryError::NonPositiveRadius { got_mm: self.source_to_isocenter_mm });
        }
        if self.orbit_axis.norm() < 1e-12 {
            return Err(TrajectoryError::ZeroOrbitAxis);
        }
        Ok(())
    }
}

/// Tracker measurement-error model. All randomness is derived from `seed`,
/// so identical specs reproduce identical streams bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseSpec {
    /// Std-dev of the rotation perturbation per axis, degrees.
    pub rotation_sigma_deg: f64,
    /// Std-dev of the additive translation noise per axis, millimetres.
    pub translation_sigma_mm: f64,
    /// Deterministic drift accumulated along the tracker's viewing axis,
    /// millimetres per pose index.
    pub drift_mm_per_pose: f64,
    pub seed: u64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            rotation_sigma_deg: 0.5,
            translation_sigma_mm: 1.0,
            drift_mm_per_pose: 0.5,
            seed: 7,
        }
    }
}

impl NoiseSpec {
    /// A noise-free spec, handy for exactness tests and demos.
    pub fn none() -> Self {
        NoiseSpec {
            rotation_sigma_deg: 0.0,
            translation_sigma_mm: 0.0,
            drift_mm_per_pose: 0.0,
            seed: 0,
        }
    }
}

/// One synchronized observation: the tracker pose reported by inside-out
/// localization and the exact encoder-derived C-arm pose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseSample {
    pub index: u64,
    pub world_t_tracker: RigidTransform,
    pub volume_t_carm: RigidTransform,
}

/// An ordered stream of [`PoseSample`]s with strictly increasing indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseStream {
    samples: Vec<PoseSample>,
}

impl PoseStream {
    pub fn new(samples: Vec<PoseSample>) -> Result<Self, TrajectoryError> {
        for (pos, pair) in samples.windows(2).enumerate() {
            if pair[1].index <= pair[0].index {
                return Err(TrajectoryError::NonIncreasingIndex { position: pos + 1 });
            }
        }
        Ok(PoseStream { samples })
    }

    pub fn samples(&self) -> &[PoseSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Strategy for turning a pose stream into relative-motion pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PairMode {
    /// Adjacent samples only: `n - 1` pairs.
    Consecutive,
    /// Every unordered sample pair: `n * (n - 1) / 2` pairs.
    AllPairs,
}

/// Relative motion between two samples, expressed on both sides of the rig.
///
/// With `X = tracker_t_carm`, every pair satisfies
/// `tracker_motion ∘ X = X ∘ carm_motion` up to measurement error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativePosePair {
    pub first_index: u64,
    pub second_index: u64,
    /// `tracker_i_t_tracker_j`: motion seen by the tracker.
    pub tracker_motion: RigidTransform,
    /// `carm_i_t_carm_j`: the same motion from the encoders.
    pub carm_motion: RigidTransform,
}

/// Unit vectors `(u, v)` spanning the plane orthogonal to `axis`, chosen
/// deterministically so repeated runs lay out the same orbit.
fn plane_basis(axis: &Vector3<f64>) -> Result<(Vector3<f64>, Vector3<f64>), TrajectoryError> {
    let norm = axis.norm();
    if norm < 1e-12 {
        return Err(TrajectoryError::ZeroOrbitAxis);
    }
    let a = axis / norm;
    let hint = if a.dot(&Vector3::x()).abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let u = (hint - a * hint.dot(&a)).normalize();
    let v = a.cross(&u);
    Ok((u, v))
}

/// C-arm pose at angle `angle_rad` on the orbit: the source sits on a circle
/// of radius `source_to_isocenter_mm` around the volume origin, the `+z`
/// column looks at the isocenter and the `+y` column runs along the axis.
pub fn orbit_pose(
    orbit_axis: &Vector3<f64>,
    source_to_isocenter_mm: f64,
    angle_rad: f64,
) -> Result<RigidTransform, TrajectoryError> {
    if !(source_to_isocenter_mm > 0.0) {
        return Err(TrajectoryError::NonPositiveRadius { got_mm: source_to_isocenter_mm });
    }
    let (u, v) = plane_basis(orbit_axis)?;
    let a = orbit_axis.normalize();
    let radial = u * angle_rad.cos() + v * angle_rad.sin();
    let z = -radial;
    let x = a.cross(&z);
    let rotation = Rotation::from_matrix(&nalgebra::Matrix3::from_columns(&[x, a, z]));
    Ok(RigidTransform::new(rotation, radial * source_to_isocenter_mm))
}

/// Exact `volume_t_carm` poses equally spaced along the sweep.
pub fn generate_orbit(spec: &OrbitSpec) -> Result<Vec<RigidTransform>, TrajectoryError> {
    spec.validate()?;
    let sweep_rad = spec.sweep_deg.to_radians();
    let step = sweep_rad / (spec.n_poses - 1) as f64;
    (0..spec.n_poses)
        .map(|k| orbit_pose(&spec.orbit_axis, spec.source_to_isocenter_mm, k as f64 * step))
        .collect()
}

fn standard_normal3(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    Vector3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn noisy_tracker_pose(
    truth: &RigidTransform,
    index: u64,
    noise: &NoiseSpec,
    rng: &mut ChaCha8Rng,
) -> RigidTransform {
    // Order matters for reproducibility: three rotation draws, then three
    // translation draws, for every sample regardless of the sigmas.
    let rot_delta = standard_normal3(rng) * noise.rotation_sigma_deg.to_radians();
    let trans_eps = standard_normal3(rng) * noise.translation_sigma_mm;
    let viewing_axis_world = truth.rotation.rotate_vector(&Vector3::z());
    RigidTransform {
        rotation: Rotation::from_scaled_axis(rot_delta).compose(&truth.rotation),
        translation: truth.translation
            + trans_eps
            + viewing_axis_world * (noise.drift_mm_per_pose * index as f64),
    }
}

/// Simulates the tracker stream for a sequence of exact C-arm poses.
///
/// `tracker_t_carm` is the ground-truth mounting transform and
/// `world_t_volume` places the anatomy in the tracker's map frame; neither is
/// observable by the downstream solver.
pub fn simulate_tracker(
    volume_t_carm: &[RigidTransform],
    tracker_t_carm: &RigidTransform,
    world_t_volume: &RigidTransform,
    noise: &NoiseSpec,
) -> PoseStream {
    let carm_t_tracker = tracker_t_carm.inverse();
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let samples = volume_t_carm
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let truth = world_t_volume.compose(v).compose(&carm_t_tracker);
            PoseSample {
                index: i as u64,
                world_t_tracker: noisy_tracker_pose(&truth, i as u64, noise, &mut rng),
                volume_t_carm: *v,
            }
        })
        .collect();
    PoseStream { samples }
}

/// Builds relative-motion pairs from a stream.
pub fn relative_pairs(
    stream: &PoseStream,
    mode: PairMode,
) -> Result<Vec<RelativePosePair>, TrajectoryError> {
    let s = stream.samples();
    if s.len() < 2 {
        return Err(TrajectoryError::TooFewSamples { got: s.len() });
    }
    let make = |i: usize, j: usize| RelativePosePair {
        first_index: s[i].index,
        second_index: s[j].index,
        tracker_motion: s[i].world_t_tracker.inverse().compose(&s[j].world_t_tracker),
        carm_motion: s[i].volume_t_carm.inverse().compose(&s[j].volume_t_carm),
    };
    let pairs = match mode {
        PairMode::Consecutive => (0..s.len() - 1).map(|i| make(i, i + 1)).collect(),
        PairMode::AllPairs => (0..s.len())
            .flat_map(|i| (i + 1..s.len()).map(move |j| (i, j)))
            .map(|(i, j)| make(i, j))
            .collect(),
    };
    Ok(pairs)
}

/// Golden angle used to fan successive tilt planes apart.
const TILT_FAN_DEG: f64 = 137.5;

/// Appends short out-of-plane excursions to an orbital stream.
///
/// For each entry of `tilts_deg` the C-arm leaves the last orbital pose and
/// rotates by `rotation_deg` about an axis tilted away from the orbit axis by
/// that amount (successive tilt planes are fanned apart by the golden angle
/// so they do not all lie in one plane). The excursions break the
/// single-axis degeneracy of a circular orbit while staying close to the
/// clinically reachable range.
///
/// The same ground-truth transforms and noise model as the original
/// simulation must be supplied; appended samples continue the index sequence
/// and draw from an RNG stream derived from `noise.seed`.
pub fn add_out_of_plane_poses(
    stream: &PoseStream,
    tilts_deg: &[f64],
    rotation_deg: f64,
    tracker_t_carm: &RigidTransform,
    world_t_volume: &RigidTransform,
    noise: &NoiseSpec,
) -> Result<PoseStream, TrajectoryError> {
    if stream.len() < 2 {
        return Err(TrajectoryError::TooFewSamples { got: stream.len() });
    }
    if tilts_deg.is_empty() {
        return Ok(stream.clone());
    }
    if rotation_deg.abs() < 1e-9 {
        return Err(TrajectoryError::InvalidOutOfPlaneRotation { got_deg: rotation_deg });
    }

    // Recover the orbit axis (volume frame) from the first consecutive pair
    // that actually rotates; the left-relative rotation of volume_t_carm
    // turns exactly about it.
    let samples = stream.samples();
    let axis = samples
        .windows(2)
        .map(|w| w[1].volume_t_carm.rotation.compose(&w[0].volume_t_carm.rotation.inverse()))
        .find(|r| r.angle_rad() > 1e-9)
        .map(|r| r.scaled_axis_rad().normalize())
        .ok_or(TrajectoryError::NoRotationalMotion)?;
    let (u0, _) = plane_basis(&axis)?;

    let reference = samples.last().expect("stream checked non-empty");
    let base_index = reference.index;
    let carm_t_tracker = tracker_t_carm.inverse();
    // A distinct but still seed-derived stream, so augmenting does not
    // perturb the noise of the original samples.
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed ^ 0x9e37_79b9_7f4a_7c15);

    let mut samples = samples.to_vec();
    for (k, tilt_deg) in tilts_deg.iter().enumerate() {
        let fan = Rotation::from_axis_angle(&axis, ((k + 1) as f64 * TILT_FAN_DEG).to_radians())
            .expect("axis is unit length");
        let tilt_axis = fan.rotate_vector(&u0);
        let excursion_axis = Rotation::from_axis_angle(&tilt_axis, tilt_deg.to_radians())
            .expect("tilt axis is unit length")
            .rotate_vector(&axis);
        let excursion = Rotation::from_axis_angle(&excursion_axis, rotation_deg.to_radians())
            .expect("excursion axis is unit length");
        // Rotating about the isocenter keeps the source on its sphere.
        let volume_t_carm =
            RigidTransform::from_rotation(excursion).compose(&reference.volume_t_carm);
        let index = base_index + 1 + k as u64;
        let truth = world_t_volume.compose(&volume_t_carm).compose(&carm_t_tracker);
        samples.push(PoseSample {
            index,
            world_t_tracker: noisy_tracker_pose(&truth, index, noise, &mut rng),
            volume_t_carm,
        });
    }
    PoseStream::new(samples)
}
