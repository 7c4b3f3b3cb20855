//! Accuracy evaluation against a physical phantom: gaze-based target
//! registration error and bull's-eye tube alignment.
//!
//! The phantom carries small spheres (point targets) and a rigid open tube.
//! Two complementary protocols quantify how well a calibration places the
//! anatomy:
//!
//! * **TRE** — observers sight each sphere along a line (e.g. through a
//!   head-mounted display); the target registration error is the mean
//!   perpendicular distance between those lines and the registered sphere
//!   positions, averaged over a complete observers × targets grid.
//! * **Bull's-eye** — the imaging device is steered until its principal ray
//!   threads the tube without touching the wall, the down-the-barrel view.
//!   Because the ray always passes through the isocenter, only the two
//!   gantry angles need to be searched.
//!
//! Everything here works in the volume frame unless a name says otherwise.

use crate::geometry::{Line3, RigidTransform};
use crate::trajectory;
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvaluationError {
    #[error("phantom has no sphere targets")]
    EmptyPhantom,
    #[error("no gaze observations supplied")]
    NoObservations,
    #[error("observation references target {index} but the phantom has {targets}")]
    InvalidTargetIndex { index: usize, targets: usize },
    #[error("duplicate observation for user {user_id}, target {target_index}")]
    DuplicateObservation { user_id: u32, target_index: usize },
    #[error("missing observation for user {user_id}, target {target_index}")]
    MissingObservation { user_id: u32, target_index: usize },
    #[error("user {user_id} is on top of target {target_index}; gaze direction undefined")]
    DegenerateGaze { user_id: u32, target_index: usize },
    #[error("invalid tube: {0}")]
    InvalidTube(String),
    #[error("invalid gantry: {0}")]
    InvalidGantry(String),
    #[error("no reachable gantry pose threads the tube; best misalignment {best_misalignment_deg:.2} degrees")]
    Unreachable { best_misalignment_deg: f64 },
}

/// Open cylindrical tube on the phantom, volume frame. The ray is expected
/// to enter through the disk at `start_mm` and exit at `end_mm`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tube {
    pub start_mm: Vector3<f64>,
    pub end_mm: Vector3<f64>,
    pub radius_mm: f64,
}

impl Tube {
    pub fn validate(&self) -> Result<(), EvaluationError> {
        if (self.end_mm - self.start_mm).norm() < 1e-9 {
            return Err(EvaluationError::InvalidTube("tube has zero length".into()));
        }
        if !(self.radius_mm > 0.0) {
            return Err(EvaluationError::InvalidTube(format!(
                "radius must be positive, got {}",
                self.radius_mm
            )));
        }
        Ok(())
    }

    /// The tube's center line, oriented from entry to exit.
    pub fn axis(&self) -> Line3 {
        Line3::through_points(self.start_mm, self.end_mm)
            .expect("validated tube has non-zero length")
    }
}

/// Evaluation phantom: sphere targets plus one tube, volume frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phantom {
    pub spheres_mm: Vec<Vector3<f64>>,
    pub tube: Tube,
}

impl Default for Phantom {
    fn default() -> Self {
        // Seven spheres spread over a head-sized working volume and a tube
        // lying in the orbital plane, oriented so the neutral gantry pose
        // looks straight down the barrel.
        Phantom {
            spheres_mm: vec![
                Vector3::new(30.0, 0.0, 10.0),
                Vector3::new(-30.0, 15.0, -10.0),
                Vector3::new(0.0, 35.0, 0.0),
                Vector3::new(15.0, -30.0, 20.0),
                Vector3::new(-20.0, -25.0, -15.0),
                Vector3::new(35.0, 25.0, -20.0),
                Vector3::new(-10.0, 10.0, 30.0),
            ],
            tube: Tube {
                start_mm: Vector3::new(40.0, 0.0, 0.0),
                end_mm: Vector3::new(-40.0, 0.0, 0.0),
                radius_mm: 5.0,
            },
        }
    }
}

impl Phantom {
    pub fn validate(&self) -> Result<(), EvaluationError> {
        if self.spheres_mm.is_empty() {
            return Err(EvaluationError::EmptyPhantom);
        }
        self.tube.validate()
    }
}

/// One sighting: a user looked at one sphere along a world-frame line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazeObservation {
    pub user_id: u32,
    pub target_index: usize,
    pub line_world: Line3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserTre {
    pub user_id: u32,
    pub mean_mm: f64,
}

/// Target registration error over a complete users x targets grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreResult {
    /// Grand mean over every observation, millimetres.
    pub overall_mm: f64,
    /// Mean per user (ascending user id).
    pub per_user: Vec<UserTre>,
    /// Mean per target, aligned with the phantom's sphere order.
    pub per_target_mm: Vec<f64>,
}

/// Mean perpendicular distance between gaze lines and the registered sphere
/// positions `world_t_volume * sphere`.
///
/// The grid must be complete: every user must have sighted every target
/// exactly once, so per-user and per-target means stay comparable.
pub fn compute_tre(
    phantom: &Phantom,
    world_t_volume: &RigidTransform,
    observations: &[GazeObservation],
) -> Result<TreResult, EvaluationError> {
    let targets = phantom.spheres_mm.len();
    if targets == 0 {
        return Err(EvaluationError::EmptyPhantom);
    }
    if observations.is_empty() {
        return Err(EvaluationError::NoObservations);
    }

    let registered: Vec<Vector3<f64>> =
        phantom.spheres_mm.iter().map(|s| world_t_volume.transform_point(s)).collect();

    let mut grid: BTreeMap<(u32, usize), f64> = BTreeMap::new();
    let mut users: BTreeSet<u32> = BTreeSet::new();
    for obs in observations {
        if obs.target_index >= targets {
            return Err(EvaluationError::InvalidTargetIndex { index: obs.target_index, targets });
        }
        let distance = obs.line_world.distance_to_point(&registered[obs.target_index]);
        if grid.insert((obs.user_id, obs.target_index), distance).is_some() {
            return Err(EvaluationError::DuplicateObservation {
                user_id: obs.user_id,
                target_index: obs.target_index,
            });
        }
        users.insert(obs.user_id);
    }
    for &user_id in &users {
        for target_index in 0..targets {
            if !grid.contains_key(&(user_id, target_index)) {
                return Err(EvaluationError::MissingObservation { user_id, target_index });
            }
        }
    }

    let per_user: Vec<UserTre> = users
        .iter()
        .map(|&user_id| UserTre {
            user_id,
            mean_mm: (0..targets).map(|t| grid[&(user_id, t)]).sum::<f64>() / targets as f64,
        })
        .collect();
    let per_target_mm: Vec<f64> = (0..targets)
        .map(|t| users.iter().map(|&u| grid[&(u, t)]).sum::<f64>() / users.len() as f64)
        .collect();
    let overall_mm = grid.values().sum::<f64>() / grid.len() as f64;

    Ok(TreResult { overall_mm, per_user, per_target_mm })
}

/// Unit vectors spanning the plane orthogonal to `dir` (which must be unit).
fn perpendicular_basis(dir: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let hint = if dir.dot(&Vector3::x()).abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = (hint - dir * hint.dot(dir)).normalize();
    let e2 = dir.cross(&e1);
    (e1, e2)
}

/// Simulates a complete gaze grid: each user sights each true sphere
/// position with an isotropic perpendicular aiming error of
/// `aim_sigma_mm` (std-dev per axis).
///
/// `world_t_volume` is the ground-truth registration; user ids follow the
/// position order. All randomness comes from `seed`.
pub fn simulate_gaze(
    phantom: &Phantom,
    world_t_volume: &RigidTransform,
    user_positions_world: &[Vector3<f64>],
    aim_sigma_mm: f64,
    seed: u64,
) -> Result<Vec<GazeObservation>, EvaluationError> {
    phantom.validate()?;
    if user_positions_world.is_empty() {
        return Err(EvaluationError::NoObservations);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut observations = Vec::with_capacity(user_positions_world.len() * phantom.spheres_mm.len());
    for (user_id, position) in user_positions_world.iter().enumerate() {
        let user_id = user_id as u32;
        for (target_index, sphere) in phantom.spheres_mm.iter().enumerate() {
            let target = world_t_volume.transform_point(sphere);
            let to_target = target - position;
            if to_target.norm() < 1e-6 {
                return Err(EvaluationError::DegenerateGaze { user_id, target_index });
            }
            let dir = to_target.normalize();
            let (e1, e2) = perpendicular_basis(&dir);
            let g1: f64 = rng.sample(StandardNormal);
            let g2: f64 = rng.sample(StandardNormal);
            let aim = target + (e1 * g1 + e2 * g2) * aim_sigma_mm;
            let line_world = Line3::through_points(*position, aim)
                .expect("aim point stays clear of the user position");
            observations.push(GazeObservation { user_id, target_index, line_world });
        }
    }
    Ok(observations)
}

/// Outcome of shooting one ray at the tube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BullseyeAssessment {
    /// True when the ray enters the start disk, exits the end disk, and
    /// never touches the wall.
    pub hit: bool,
    /// Angle between the ray and the tube axis, degrees; 180 means looking
    /// in through the exit.
    pub misalignment_deg: f64,
    /// Tube radius minus the ray's largest axis offset inside the tube,
    /// millimetres. Positive iff the ray threads cleanly; `None` when the
    /// ray never traverses the tube's end planes.
    pub min_clearance_mm: Option<f64>,
}

/// Assesses whether `ray_volume` threads the tube.
///
/// Inside the slab between the two end planes, the ray's distance to the
/// tube axis is the square root of a convex quadratic, so its maximum over
/// the traversal is attained at one of the end planes — two evaluations
/// decide the whole pass.
pub fn check_bullseye(tube: &Tube, ray_volume: &Line3) -> Result<BullseyeAssessment, EvaluationError> {
    tube.validate()?;
    let axis = tube.axis();
    let u = axis.direction.into_inner();
    let d = ray_volume.direction.into_inner();
    let along = d.dot(&u);
    let misalignment_deg = along.clamp(-1.0, 1.0).acos().to_degrees();

    if along.abs() < 1e-12 {
        // Ray parallel to the end planes: it can never cross both.
        return Ok(BullseyeAssessment { hit: false, misalignment_deg, min_clearance_mm: None });
    }

    let plane_crossing = |plane_point: &Vector3<f64>| -> Vector3<f64> {
        let t = (plane_point - ray_volume.origin).dot(&u) / along;
        ray_volume.point_at(t)
    };
    let offset_at_start = axis.distance_to_point(&plane_crossing(&tube.start_mm));
    let offset_at_end = axis.distance_to_point(&plane_crossing(&tube.end_mm));
    let min_clearance_mm = tube.radius_mm - offset_at_start.max(offset_at_end);

    // `along > 0` means the start plane is crossed first: entry through the
    // entry disk.
    let hit = along > 0.0 && min_clearance_mm > 0.0;
    Ok(BullseyeAssessment { hit, misalignment_deg, min_clearance_mm: Some(min_clearance_mm) })
}

/// Reachable gantry poses: an orbital rotation about the orbit axis chained
/// with an angular tilt about the device's neutral long axis, both about the
/// isocenter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GantrySpec {
    /// Orbit axis in the volume frame.
    pub orbit_axis: Vector3<f64>,
    pub source_to_isocenter_mm: f64,
    /// Orbital angle limits, degrees.
    pub orbital_range_deg: [f64; 2],
    /// Angular (tilt) limits, degrees.
    pub angular_range_deg: [f64; 2],
}

impl Default for GantrySpec {
    fn default() -> Self {
        GantrySpec {
            orbit_axis: Vector3::z(),
            source_to_isocenter_mm: 600.0,
            orbital_range_deg: [-100.0, 100.0],
            angular_range_deg: [-45.0, 45.0],
        }
    }
}

struct GantryBasis {
    neutral: RigidTransform,
    orbit_axis: Vector3<f64>,
    tilt_axis: Vector3<f64>,
}

impl GantrySpec {
    pub fn validate(&self) -> Result<(), EvaluationError> {
        if self.orbit_axis.norm() < 1e-12 {
            return Err(EvaluationError::InvalidGantry("orbit axis must be non-zero".into()));
        }
        if !(self.source_to_isocenter_mm > 0.0) {
            return Err(EvaluationError::InvalidGantry(format!(
                "source-to-isocenter distance must be positive, got {}",
                self.source_to_isocenter_mm
            )));
        }
        for (name, range) in
            [("orbital", self.orbital_range_deg), ("angular", self.angular_range_deg)]
        {
            if !(range[0] < range[1]) {
                return Err(EvaluationError::InvalidGantry(format!(
                    "{name} range [{}, {}] is empty or unordered",
                    range[0], range[1]
                )));
            }
        }
        Ok(())
    }

    fn basis(&self) -> Result<GantryBasis, EvaluationError> {
        self.validate()?;
        let neutral = trajectory::orbit_pose(&self.orbit_axis, self.source_to_isocenter_mm, 0.0)
            .map_err(|e| EvaluationError::InvalidGantry(e.to_string()))?;
        Ok(GantryBasis {
            neutral,
            orbit_axis: self.orbit_axis.normalize(),
            tilt_axis: neutral.rotation.rotate_vector(&Vector3::x()),
        })
    }

    /// Device pose in the volume frame at the given gantry angles.
    pub fn pose(&self, orbital_deg: f64, angular_deg: f64) -> Result<RigidTransform, EvaluationError> {
        Ok(self.basis()?.pose(orbital_deg, angular_deg))
    }

    /// Principal ray in the volume frame at the given gantry angles.
    pub fn principal_ray(
        &self,
        orbital_deg: f64,
        angular_deg: f64,
    ) -> Result<Line3, EvaluationError> {
        Ok(self.basis()?.ray(orbital_deg, angular_deg))
    }
}

impl GantryBasis {
    fn pose(&self, orbital_deg: f64, angular_deg: f64) -> RigidTransform {
        let orbital = crate::geometry::Rotation::from_axis_angle(
            &self.orbit_axis,
            orbital_deg.to_radians(),
        )
        .expect("orbit axis is unit length");
        let tilt = crate::geometry::Rotation::from_axis_angle(
            &self.tilt_axis,
            angular_deg.to_radians(),
        )
        .expect("tilt axis is unit length");
        RigidTransform::from_rotation(orbital.compose(&tilt)).compose(&self.neutral)
    }

    fn ray(&self, orbital_deg: f64, angular_deg: f64) -> Line3 {
        let pose = self.pose(orbital_deg, angular_deg);
        Line3::new(pose.translation, pose.rotation.rotate_vector(&Vector3::z()))
            .expect("rotated unit vector cannot be zero")
    }
}

/// Gantry angles that thread the tube, plus the assessment at the solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BullseyeSolve {
    pub orbital_deg: f64,
    pub angular_deg: f64,
    pub ray_volume: Line3,
    pub assessment: BullseyeAssessment,
}

/// Coarse step of the alignment search, degrees.
const ALIGN_GRID_STEP_DEG: f64 = 5.0;

fn golden_min(f: &mut impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = hi - (hi - lo) * INV_PHI;
    let mut d = lo + (hi - lo) * INV_PHI;
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - (hi - lo) * INV_PHI;
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + (hi - lo) * INV_PHI;
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

fn grid_values(range: [f64; 2], step: f64) -> Vec<f64> {
    let span = range[1] - range[0];
    let n = (span / step).ceil() as usize;
    (0..=n).map(|i| (range[0] + i as f64 * step).min(range[1])).collect()
}

/// Searches the gantry's two angles for a pose whose principal ray threads
/// the tube: coarse grid on misalignment, golden-section refinement, and a
/// clearance-maximizing polish when the aligned ray still clips the wall.
///
/// Rays always pass through the isocenter, so this can only succeed for
/// tubes whose axis runs near it — exactly the bull's-eye protocol's setup.
pub fn align_to_bullseye(
    gantry: &GantrySpec,
    tube: &Tube,
) -> Result<BullseyeSolve, EvaluationError> {
    tube.validate()?;
    let basis = gantry.basis()?;
    let tube_dir = tube.axis().direction.into_inner();
    let misalign = |orbital: f64, angular: f64| -> f64 {
        basis
            .ray(orbital, angular)
            .direction
            .dot(&tube_dir)
            .clamp(-1.0, 1.0)
            .acos()
            .to_degrees()
    };

    let mut best = (f64::INFINITY, 0.0, 0.0);
    for &orbital in &grid_values(gantry.orbital_range_deg, ALIGN_GRID_STEP_DEG) {
        for &angular in &grid_values(gantry.angular_range_deg, ALIGN_GRID_STEP_DEG) {
            let m = misalign(orbital, angular);
            if m < best.0 {
                best = (m, orbital, angular);
            }
        }
    }
    let (_, mut orbital, mut angular) = best;

    let window = ALIGN_GRID_STEP_DEG;
    for _ in 0..3 {
        orbital = golden_min(
            &mut |o| misalign(o, angular),
            (orbital - window).max(gantry.orbital_range_deg[0]),
            (orbital + window).min(gantry.orbital_range_deg[1]),
            1e-5,
        );
        angular = golden_min(
            &mut |a| misalign(orbital, a),
            (angular - window).max(gantry.angular_range_deg[0]),
            (angular + window).min(gantry.angular_range_deg[1]),
            1e-5,
        );
    }

    let mut assessment = check_bullseye(tube, &basis.ray(orbital, angular))?;
    if !assessment.hit {
        // Aligned but clipping the wall (off-isocenter tube): trade a little
        // alignment for clearance.
        let wall_cost = |o: f64, a: f64| -> f64 {
            match check_bullseye(tube, &basis.ray(o, a)).expect("tube already validated") {
                BullseyeAssessment { min_clearance_mm: Some(c), .. } => -c,
                BullseyeAssessment { min_clearance_mm: None, .. } => f64::INFINITY,
            }
        };
        for _ in 0..3 {
            orbital = golden_min(
                &mut |o| wall_cost(o, angular),
                (orbital - window).max(gantry.orbital_range_deg[0]),
                (orbital + window).min(gantry.orbital_range_deg[1]),
                1e-5,
            );
            angular = golden_min(
                &mut |a| wall_cost(orbital, a),
                (angular - window).max(gantry.angular_range_deg[0]),
                (angular + window).min(gantry.angular_range_deg[1]),
                1e-5,
            );
        }
        assessment = check_bullseye(tube, &basis.ray(orbital, angular))?;
    }

    if !assessment.hit {
        return Err(EvaluationError::Unreachable {
            best_misalignment_deg: misalign(orbital, angular),
        });
    }
    Ok(BullseyeSolve { orbital_deg: orbital, angular_deg: angular, ray_volume: basis.ray(orbital, angular), assessment })
}
