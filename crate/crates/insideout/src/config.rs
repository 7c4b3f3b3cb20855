//! One JSON file describing a whole simulated session: orbit, noise, the
//! ground-truth transforms, the phantom, and the evaluation parameters.
//!
//! Every field has a default, so a config file only needs to spell out what
//! it changes — `{}` is a valid config.

use crate::evaluation::{GantrySpec, Phantom};
use crate::formats::{self, FormatError};
use crate::geometry::{RigidTransform, Rotation};
use crate::handeye::DEFAULT_AXIS_TOLERANCE_DEG;
use crate::trajectory::{NoiseSpec, OrbitSpec, PairMode};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use std::path::Path;

/// Parameters of the simulated gaze-evaluation session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GazeSimConfig {
    /// Observer positions in the world frame, millimetres.
    pub user_positions_mm: Vec<Vector3<f64>>,
    /// Perpendicular aiming error per axis, millimetres.
    pub aim_sigma_mm: f64,
    pub seed: u64,
}

impl Default for GazeSimConfig {
    fn default() -> Self {
        GazeSimConfig {
            user_positions_mm: vec![
                Vector3::new(1500.0, 1400.0, 400.0),
                Vector3::new(-1400.0, 1500.0, 500.0),
                Vector3::new(1600.0, -1300.0, 300.0),
                Vector3::new(-1500.0, -1500.0, 600.0),
            ],
            aim_sigma_mm: 2.0,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub orbit: OrbitSpec,
    pub noise: NoiseSpec,
    pub pair_mode: PairMode,
    /// Axis-spread threshold handed to the solver, degrees.
    pub axis_tolerance_deg: f64,
    /// Out-of-plane excursions appended after the orbit; empty keeps the
    /// stream purely orbital.
    pub out_of_plane_tilts_deg: Vec<f64>,
    /// Rotation magnitude of each excursion, degrees.
    pub out_of_plane_rotation_deg: f64,
    /// Ground-truth mount used by the simulator (the solver never sees it).
    pub ground_truth_tracker_t_carm: RigidTransform,
    /// Ground-truth anatomy placement in the tracker map frame.
    pub world_t_volume: RigidTransform,
    pub phantom: Phantom,
    pub gaze: GazeSimConfig,
    pub gantry: GantrySpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            orbit: OrbitSpec::default(),
            noise: NoiseSpec::default(),
            pair_mode: PairMode::AllPairs,
            axis_tolerance_deg: DEFAULT_AXIS_TOLERANCE_DEG,
            out_of_plane_tilts_deg: vec![],
            out_of_plane_rotation_deg: 30.0,
            // Tracker on the intensifier side, 980 mm up the device y axis,
            // viewing axis parallel to the orbit axis.
            ground_truth_tracker_t_carm: RigidTransform::new(
                Rotation::about_x(FRAC_PI_2),
                Vector3::new(0.0, 980.0, 0.0),
            ),
            world_t_volume: RigidTransform::identity(),
            phantom: Phantom::default(),
            gaze: GazeSimConfig::default(),
            gantry: GantrySpec::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, FormatError> {
        let config: RunConfig = formats::read_json(path)?;
        config.validate().map_err(|detail| FormatError::Invalid { path: path.into(), detail })?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), String> {
        self.orbit.validate().map_err(|e| e.to_string())?;
        self.phantom.validate().map_err(|e| e.to_string())?;
        self.gantry.validate().map_err(|e| e.to_string())?;
        if !(self.axis_tolerance_deg >= 0.0) {
            return Err(format!("axis tolerance must be >= 0, got {}", self.axis_tolerance_deg));
        }
        if !(self.noise.rotation_sigma_deg >= 0.0)
            || !(self.noise.translation_sigma_mm >= 0.0)
        {
            return Err("noise sigmas must be >= 0".into());
        }
        if !(self.gaze.aim_sigma_mm >= 0.0) {
            return Err(format!("aim sigma must be >= 0, got {}", self.gaze.aim_sigma_mm));
        }
        if self.gaze.user_positions_mm.is_empty() {
            return Err("gaze simulation needs at least one user position".into());
        }
        Ok(())
    }
}
