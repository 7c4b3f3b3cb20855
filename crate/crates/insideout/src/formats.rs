//! On-disk interchange formats.
//!
//! Everything is JSON with a `schema_version` field; files carrying
//! transforms also embed the naming convention and units so a stream can be
//! audited without the code. Quaternions are stored `[w, x, y, z]` with a
//! canonical sign, and `serde_json` prints the shortest round-trippable
//! float representation, so save → load → save is byte-identical.
//!
//! Loaders validate hard: wrong schema version, convention mismatch,
//! non-unit quaternions, out-of-order sample indices, and internally
//! inconsistent calibration states are all rejected with the offending path
//! in the error.

use crate::chain::CalibrationState;
use crate::evaluation::{BullseyeAssessment, GazeObservation, Phantom, TreResult};
use crate::geometry::Line3;
use crate::handeye::HandEyeSolution;
use crate::trajectory::{PairMode, PoseSample, PoseStream};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;
pub const TRANSFORM_CONVENTION: &str =
    "a_t_b maps frame-b coordinates into frame a: p_a = R * p_b + t";

/// Largest tolerated self-consistency defect in a loaded calibration state
/// (max of radians and millimetres). Serialization is exact, so anything
/// above rounding noise means the file was edited or mixed up.
pub const STATE_CONSISTENCY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid JSON: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: schema version {found}, this build reads {expected}")]
    SchemaVersion { path: PathBuf, found: u32, expected: u32 },
    #[error("{path}: {detail}")]
    Invalid { path: PathBuf, detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Units {
    pub length: String,
    pub angle: String,
}

impl Default for Units {
    fn default() -> Self {
        Units { length: "mm".into(), angle: "deg".into() }
    }
}

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let text = fs::read_to_string(path)
        .map_err(|source| FormatError::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| FormatError::Parse { path: path.into(), source })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FormatError> {
    let mut text = serde_json::to_string_pretty(value).expect("our reports always serialize");
    text.push('\n');
    fs::write(path, text).map_err(|source| FormatError::Io { path: path.into(), source })
}

fn check_version(path: &Path, found: u32) -> Result<(), FormatError> {
    if found != SCHEMA_VERSION {
        return Err(FormatError::SchemaVersion { path: path.into(), found, expected: SCHEMA_VERSION });
    }
    Ok(())
}

fn invalid(path: &Path, detail: impl Into<String>) -> FormatError {
    FormatError::Invalid { path: path.into(), detail: detail.into() }
}

/// A recorded pose stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseFile {
    pub schema_version: u32,
    pub convention: String,
    pub units: Units,
    pub samples: Vec<PoseSample>,
}

impl PoseFile {
    pub fn from_stream(stream: &PoseStream) -> Self {
        PoseFile {
            schema_version: SCHEMA_VERSION,
            convention: TRANSFORM_CONVENTION.into(),
            units: Units::default(),
            samples: stream.samples().to_vec(),
        }
    }
}

pub fn save_poses(path: &Path, stream: &PoseStream) -> Result<(), FormatError> {
    write_json(path, &PoseFile::from_stream(stream))
}

pub fn load_poses(path: &Path) -> Result<PoseStream, FormatError> {
    let file: PoseFile = read_json(path)?;
    check_version(path, file.schema_version)?;
    if file.convention != TRANSFORM_CONVENTION {
        return Err(invalid(path, format!("unexpected convention '{}'", file.convention)));
    }
    if file.units != Units::default() {
        return Err(invalid(
            path,
            format!("unexpected units {}/{}", file.units.length, file.units.angle),
        ));
    }
    PoseStream::new(file.samples).map_err(|e| invalid(path, e.to_string()))
}

/// Flat spreadsheet view of a pose stream, for plotting. Write-only: the
/// JSON format is the source of truth.
pub fn export_poses_csv(path: &Path, stream: &PoseStream) -> Result<(), FormatError> {
    let mut text = String::from(
        "index,tracker_qw,tracker_qx,tracker_qy,tracker_qz,\
         tracker_tx_mm,tracker_ty_mm,tracker_tz_mm,\
         carm_qw,carm_qx,carm_qy,carm_qz,carm_tx_mm,carm_ty_mm,carm_tz_mm\n",
    );
    for sample in stream.samples() {
        let [tw, tx, ty, tz] = sample.world_t_tracker.rotation.quaternion_wxyz();
        let tt = sample.world_t_tracker.translation;
        let [cw, cx, cy, cz] = sample.volume_t_carm.rotation.quaternion_wxyz();
        let ct = sample.volume_t_carm.translation;
        text.push_str(&format!(
            "{},{tw},{tx},{ty},{tz},{},{},{},{cw},{cx},{cy},{cz},{},{},{}\n",
            sample.index, tt.x, tt.y, tt.z, ct.x, ct.y, ct.z,
        ));
    }
    fs::write(path, text).map_err(|source| FormatError::Io { path: path.into(), source })
}

/// Result of a calibration run: the solved mount with its diagnostics, plus
/// the anchored frame-chain state ready for downstream use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub schema_version: u32,
    pub convention: String,
    pub pair_mode: PairMode,
    pub pairs_used: usize,
    pub solution: HandEyeSolution,
    pub state: CalibrationState,
}

impl CalibrationReport {
    pub fn new(
        pair_mode: PairMode,
        pairs_used: usize,
        solution: HandEyeSolution,
        state: CalibrationState,
    ) -> Self {
        CalibrationReport {
            schema_version: SCHEMA_VERSION,
            convention: TRANSFORM_CONVENTION.into(),
            pair_mode,
            pairs_used,
            solution,
            state,
        }
    }
}

pub fn save_calibration(path: &Path, report: &CalibrationReport) -> Result<(), FormatError> {
    write_json(path, report)
}

pub fn load_calibration(path: &Path) -> Result<CalibrationReport, FormatError> {
    let report: CalibrationReport = read_json(path)?;
    check_version(path, report.schema_version)?;
    if report.convention != TRANSFORM_CONVENTION {
        return Err(invalid(path, format!("unexpected convention '{}'", report.convention)));
    }
    let defect = report.state.consistency_defect();
    if defect > STATE_CONSISTENCY_TOLERANCE {
        return Err(invalid(
            path,
            format!("calibration state is self-inconsistent (defect {defect:.3e}); the file was modified or mixed from different runs"),
        ));
    }
    Ok(report)
}

/// Phantom geometry definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhantomFile {
    pub schema_version: u32,
    pub phantom: Phantom,
}

pub fn save_phantom(path: &Path, phantom: &Phantom) -> Result<(), FormatError> {
    write_json(path, &PhantomFile { schema_version: SCHEMA_VERSION, phantom: phantom.clone() })
}

pub fn load_phantom(path: &Path) -> Result<Phantom, FormatError> {
    let file: PhantomFile = read_json(path)?;
    check_version(path, file.schema_version)?;
    file.phantom.validate().map_err(|e| invalid(path, e.to_string()))?;
    Ok(file.phantom)
}

/// Recorded gaze observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazeFile {
    pub schema_version: u32,
    pub observations: Vec<GazeObservation>,
}

pub fn save_gaze(path: &Path, observations: &[GazeObservation]) -> Result<(), FormatError> {
    write_json(
        path,
        &GazeFile { schema_version: SCHEMA_VERSION, observations: observations.to_vec() },
    )
}

pub fn load_gaze(path: &Path) -> Result<Vec<GazeObservation>, FormatError> {
    let file: GazeFile = read_json(path)?;
    check_version(path, file.schema_version)?;
    Ok(file.observations)
}

/// Target-registration-error evaluation output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreReport {
    pub schema_version: u32,
    pub users: usize,
    pub targets: usize,
    pub tre: TreResult,
}

impl TreReport {
    pub fn new(tre: TreResult) -> Self {
        TreReport {
            schema_version: SCHEMA_VERSION,
            users: tre.per_user.len(),
            targets: tre.per_target_mm.len(),
            tre,
        }
    }
}

pub fn save_tre(path: &Path, report: &TreReport) -> Result<(), FormatError> {
    write_json(path, report)
}

pub fn load_tre(path: &Path) -> Result<TreReport, FormatError> {
    let report: TreReport = read_json(path)?;
    check_version(path, report.schema_version)?;
    Ok(report)
}

/// Bull's-eye planning/assessment output. `ray_world` is present when a
/// calibration state was available to express the ray outside the volume
/// frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BullseyeReport {
    pub schema_version: u32,
    pub mode: String,
    pub orbital_deg: f64,
    pub angular_deg: f64,
    pub ray_volume: Line3,
    pub ray_world: Option<Line3>,
    pub assessment: BullseyeAssessment,
}

pub fn save_bullseye(path: &Path, report: &BullseyeReport) -> Result<(), FormatError> {
    write_json(path, report)
}

pub fn load_bullseye(path: &Path) -> Result<BullseyeReport, FormatError> {
    let report: BullseyeReport = read_json(path)?;
    check_version(path, report.schema_version)?;
    Ok(report)
}

impl FormatError {
    /// Path the error refers to, for callers that aggregate.
    pub fn path(&self) -> &Path {
        match self {
            FormatError::Io { path, .. }
            | FormatError::Parse { path, .. }
            | FormatError::SchemaVersion { path, .. }
            | FormatError::Invalid { path, .. } => path,
        }
    }
}
