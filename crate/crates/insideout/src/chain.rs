//! Frame-chain bookkeeping once the mount is calibrated.
//!
//! A calibration session fixes two constants: the mount `tracker_t_carm`
//! solved by [`crate::handeye`] and the anatomy registration
//! `world_t_volume`, anchored at a reference instant `t0`:
//!
//! ```text
//! world_t_volume = world_t_tracker(t0) ∘ tracker_t_carm ∘ volume_t_carm(t0)⁻¹
//! ```
//!
//! Afterwards, live tracker poses are enough to place the imaging device
//! relative to the anatomy or any bystander frame — no external tracking
//! hardware, no line of sight.

use crate::geometry::{Line3, RigidTransform};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Reference frames a pose or ray can be expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// The tracker's map frame.
    World,
    /// The imaged anatomy, isocenter at the origin.
    Volume,
    /// A bystander frame, e.g. the surgeon's head-mounted display.
    Surgeon,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("unknown frame '{0}' (expected world, volume, or surgeon)")]
pub struct UnknownFrame(pub String);

impl FromStr for Frame {
    type Err = UnknownFrame;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "world" => Ok(Frame::World),
            "volume" => Ok(Frame::Volume),
            "surgeon" => Ok(Frame::Surgeon),
            other => Err(UnknownFrame(other.to_string())),
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frame::World => "world",
            Frame::Volume => "volume",
            Frame::Surgeon => "surgeon",
        })
    }
}

/// Live poses needed to evaluate the chain at some instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FramePoses {
    pub world_t_tracker: RigidTransform,
    /// Pose of the bystander frame; identity if nobody is watching.
    pub world_t_surgeon: RigidTransform,
}

/// The two calibration constants plus the reference-instant poses they were
/// anchored to, kept so the registration can be re-verified after a round
/// trip through storage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationState {
    pub tracker_t_carm: RigidTransform,
    pub world_t_volume: RigidTransform,
    pub world_t_tracker_t0: RigidTransform,
    pub volume_t_carm_t0: RigidTransform,
}

/// Anchors the anatomy registration at a reference instant.
pub fn calibrate(
    world_t_tracker_t0: &RigidTransform,
    tracker_t_carm: &RigidTransform,
    volume_t_carm_t0: &RigidTransform,
) -> CalibrationState {
    let world_t_volume =
        world_t_tracker_t0.compose(tracker_t_carm).compose(&volume_t_carm_t0.inverse());
    CalibrationState {
        tracker_t_carm: *tracker_t_carm,
        world_t_volume,
        world_t_tracker_t0: *world_t_tracker_t0,
        volume_t_carm_t0: *volume_t_carm_t0,
    }
}

impl CalibrationState {
    /// How far the stored `world_t_volume` deviates from one recomputed from
    /// the anchored poses: the larger of the rotation defect (radians) and
    /// the translation defect (millimetres). Freshly calibrated states sit at
    /// rounding level; anything bigger means the state was corrupted.
    pub fn consistency_defect(&self) -> f64 {
        let recomputed = self
            .world_t_tracker_t0
            .compose(&self.tracker_t_carm)
            .compose(&self.volume_t_carm_t0.inverse());
        let rot = self.world_t_volume.rotation_angle_to(&recomputed);
        let trans = self.world_t_volume.translation_distance_to(&recomputed);
        rot.max(trans)
    }

    /// Imaging-device pose in the world frame at the instant of `poses`.
    pub fn world_t_carm(&self, poses: &FramePoses) -> RigidTransform {
        poses.world_t_tracker.compose(&self.tracker_t_carm)
    }

    /// Imaging-device pose relative to the anatomy, from live tracking only.
    pub fn volume_t_carm(&self, poses: &FramePoses) -> RigidTransform {
        self.world_t_volume.inverse().compose(&self.world_t_carm(poses))
    }

    /// Where the anatomy sits for the bystander.
    pub fn surgeon_t_volume(&self, poses: &FramePoses) -> RigidTransform {
        poses.world_t_surgeon.inverse().compose(&self.world_t_volume)
    }

    /// Where the imaging device sits for the bystander.
    pub fn surgeon_t_carm(&self, poses: &FramePoses) -> RigidTransform {
        poses.world_t_surgeon.inverse().compose(&self.world_t_carm(poses))
    }

    /// The principal ray (source through isocenter, the device's `+z`),
    /// expressed in the requested frame.
    pub fn principal_ray(&self, poses: &FramePoses, frame: Frame) -> Line3 {
        let world_t_carm = self.world_t_carm(poses);
        let ray_world = Line3::new(
            world_t_carm.translation,
            world_t_carm.rotation.rotate_vector(&Vector3::z()),
        )
        .expect("a rotated unit vector cannot be zero");
        match frame {
            Frame::World => ray_world,
            Frame::Volume => self.world_t_volume.inverse().transform_line(&ray_world),
            Frame::Surgeon => poses.world_t_surgeon.inverse().transform_line(&ray_world),
        }
    }
}
