//! Calibration and simulation toolkit for inside-out tracked mobile C-arms.
//!
//! A camera rigidly mounted on a C-arm gantry watches the room while the
//! gantry orbits. This crate simulates that setup, recovers the fixed
//! camera-to-gantry mount from relative motion alone, and scores the result
//! the way an operating-room protocol would:
//!
//! 1. [`trajectory`] — synthesize an orbital scan and the tracker poses a
//!    mounted inside-out camera would report, with configurable noise and
//!    drift, plus out-of-plane excursions that rescue degenerate geometry.
//! 2. [`handeye`] — solve `A·X = X·B` for the mount from relative pose
//!    pairs, with residual statistics and a degeneracy report that flags
//!    single-axis orbits and the direction they leave unobservable.
//! 3. [`chain`] — assemble the calibrated transform chain (world, tracker,
//!    gantry, patient volume, surgeon) and read rays across it.
//! 4. [`evaluation`] — target registration error against a sphere phantom
//!    from gaze lines, and bull's-eye alignment of the gantry's principal
//!    ray down a tube.
//!
//! [`geometry`] supplies the rigid-transform algebra underneath;
//! [`formats`] and [`config`] define the on-disk JSON formats; [`cli`]
//! wires everything into the `insideout` binary (`simulate`, `calibrate`,
//! `evaluate`, `bullseye`).
//!
//! # Conventions
//!
//! Transforms are named `a_t_b` and map frame-`b` coordinates into frame
//! `a`: `p_a = R · p_b + t`. Lengths are millimetres, angles degrees at
//! every API boundary (radians internally). Rotations are stored as unit
//! quaternions in `[w, x, y, z]` order. All randomness flows from explicit
//! seeds, so every pipeline is reproducible byte for byte.
//!
//! The `examples/` directory walks through each stage: orbit synthesis,
//! mount recovery, the single-axis trap and its out-of-plane rescue, chain
//! bookkeeping, the gaze-based error protocol, and bull's-eye planning.

// Validation guards are written `!(x > 0.0)` on purpose: unlike `x <= 0.0`
// they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod cli;
pub mod config;
pub mod evaluation;
pub mod formats;
pub mod geometry;
pub mod handeye;
pub mod trajectory;

pub use chain::{calibrate, CalibrationState, Frame, FramePoses};
pub use evaluation::{
    align_to_bullseye, check_bullseye, compute_tre, simulate_gaze, BullseyeAssessment,
    BullseyeSolve, GantrySpec, GazeObservation, Phantom, TreResult, Tube,
};
pub use geometry::{GeometryError, Line3, RigidTransform, Rotation};
pub use handeye::{
    solve, solve_rotation, solve_translation, solve_with_tolerance, DegeneracyReport,
    HandEyeError, HandEyeSolution,
};
pub use trajectory::{
    add_out_of_plane_poses, generate_orbit, relative_pairs, simulate_tracker, NoiseSpec,
    OrbitSpec, PairMode, PoseSample, PoseStream, RelativePosePair, TrajectoryError,
};
