//! Command-line front end: `simulate`, `calibrate`, `evaluate`, `bullseye`.
//!
//! Exit codes: 0 success; 2 invalid input, file content, or configuration;
//! 3 the problem is well-posed but unsolvable (insufficient motion,
//! unreachable tube); 4 file-system errors. All console output uses fixed
//! decimal formatting, so identical inputs print identical bytes.

use crate::chain::calibrate;
use crate::config::RunConfig;
use crate::evaluation::{self, EvaluationError};
use crate::formats::{
    self, BullseyeReport, CalibrationReport, FormatError, TreReport, SCHEMA_VERSION,
};
use crate::handeye::{self, HandEyeError};
use crate::trajectory::{self, PairMode, TrajectoryError};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error(transparent)]
    HandEye(#[from] HandEyeError),
    #[error(transparent)]
    Evaluation(#[from] EvaluationError),
}

impl CliError {
    /// 2: bad input or configuration; 3: well-posed but unsolvable;
    /// 4: file-system trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Format(FormatError::Io { .. }) => 4,
            CliError::Format(_) => 2,
            CliError::Trajectory(_) => 2,
            CliError::HandEye(_) => 3,
            CliError::Evaluation(EvaluationError::Unreachable { .. }) => 3,
            CliError::Evaluation(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "insideout",
    version,
    about = "Inside-out C-arm tracking: simulate, calibrate, evaluate"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BullseyeMode {
    /// Assess the ray at explicitly given gantry angles.
    Check,
    /// Search the gantry ranges for a threading pose.
    Solve,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate an orbit and write the tracker pose stream
    Simulate {
        /// Output pose file (JSON)
        #[arg(long)]
        out: PathBuf,
        /// Run configuration; defaults apply if omitted
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the noise seed from the config
        #[arg(long)]
        seed: Option<u64>,
        /// Also export a flat CSV copy
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Solve the mount transform from a recorded pose stream
    Calibrate {
        /// Input pose file
        poses: PathBuf,
        /// Output calibration report (JSON)
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Pairing strategy (overrides the config)
        #[arg(long, value_enum)]
        pair_mode: Option<PairMode>,
        /// Single-axis detection threshold, degrees (overrides the config)
        #[arg(long)]
        axis_tolerance_deg: Option<f64>,
    },
    /// Score a calibration against gaze observations (target registration error)
    Evaluate {
        /// Calibration report to score
        calibration: PathBuf,
        /// Output report (JSON)
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Phantom file (defaults to the config phantom)
        #[arg(long)]
        phantom: Option<PathBuf>,
        /// Recorded gaze file; omitted, gaze is simulated from the config
        #[arg(long)]
        gaze: Option<PathBuf>,
        /// Calibration treated as ground truth when simulating gaze
        /// (defaults to the evaluated one)
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Override the gaze seed from the config
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check or solve a bull's-eye alignment on the phantom tube
    Bullseye {
        /// Calibration report (used to express the ray in the world frame)
        calibration: PathBuf,
        /// Output report (JSON)
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        phantom: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: BullseyeMode,
        /// Orbital angle, degrees (check mode)
        #[arg(long)]
        orbital_deg: Option<f64>,
        /// Angular tilt, degrees (check mode)
        #[arg(long)]
        angular_deg: Option<f64>,
    },
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, CliError> {
    Ok(match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    })
}

fn in_range(name: &str, value: f64, range: [f64; 2]) -> Result<(), CliError> {
    if value < range[0] || value > range[1] {
        return Err(CliError::Config(format!(
            "{name} {value} outside the gantry range [{}, {}]",
            range[0], range[1]
        )));
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { out, config, seed, csv } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.noise.seed = seed;
            }
            let orbit = trajectory::generate_orbit(&cfg.orbit)?;
            let mut stream = trajectory::simulate_tracker(
                &orbit,
                &cfg.ground_truth_tracker_t_carm,
                &cfg.world_t_volume,
                &cfg.noise,
            );
            let orbital = stream.len();
            if !cfg.out_of_plane_tilts_deg.is_empty() {
                stream = trajectory::add_out_of_plane_poses(
                    &stream,
                    &cfg.out_of_plane_tilts_deg,
                    cfg.out_of_plane_rotation_deg,
                    &cfg.ground_truth_tracker_t_carm,
                    &cfg.world_t_volume,
                    &cfg.noise,
                )?;
            }
            formats::save_poses(&out, &stream)?;
            if let Some(csv) = &csv {
                formats::export_poses_csv(csv, &stream)?;
                println!("exported {}", csv.display());
            }
            println!(
                "simulated {} poses ({} orbital, {} out-of-plane), seed {}",
                stream.len(),
                orbital,
                stream.len() - orbital,
                cfg.noise.seed
            );
            println!("wrote {}", out.display());
            Ok(())
        }

        Command::Calibrate { poses, out, config, pair_mode, axis_tolerance_deg } => {
            let cfg = load_config(&config)?;
            let stream = formats::load_poses(&poses)?;
            let mode = pair_mode.unwrap_or(cfg.pair_mode);
            let tolerance = axis_tolerance_deg.unwrap_or(cfg.axis_tolerance_deg);
            let pairs = trajectory::relative_pairs(&stream, mode)?;
            let solution = handeye::solve_with_tolerance(&pairs, tolerance)?;
            let anchor = &stream.samples()[0];
            let state = calibrate(&anchor.world_t_tracker, &solution.x, &anchor.volume_t_carm);
            let report = CalibrationReport::new(mode, pairs.len(), solution, state);
            formats::save_calibration(&out, &report)?;

            let s = &report.solution;
            println!("pairs used: {}", report.pairs_used);
            println!(
                "rotation residual per axis [deg]: {:.4} {:.4} {:.4}",
                s.rot_residual_per_axis_deg[0],
                s.rot_residual_per_axis_deg[1],
                s.rot_residual_per_axis_deg[2]
            );
            println!("translation residual rms [mm]: {:.4}", s.trans_residual_rms_mm);
            println!(
                "translation residual median per axis [mm]: {:.4} {:.4} {:.4}",
                s.trans_residual_median_per_axis_mm[0],
                s.trans_residual_median_per_axis_mm[1],
                s.trans_residual_median_per_axis_mm[2]
            );
            println!(
                "observable rank: {} (axis spread {:.3} deg over {} informative pairs)",
                s.degeneracy.observable_rank,
                s.degeneracy.axis_spread_deg,
                s.degeneracy.informative_pairs
            );
            if let Some(dir) = s.degeneracy.unobservable_direction {
                println!(
                    "unobservable direction: [{:.4}, {:.4}, {:.4}] (translation along it is a gauge choice)",
                    dir.x, dir.y, dir.z
                );
            }
            println!("wrote {}", out.display());
            Ok(())
        }

        Command::Evaluate { calibration, out, config, phantom, gaze, truth, seed } => {
            let cfg = load_config(&config)?;
            let report = formats::load_calibration(&calibration)?;
            let phantom = match &phantom {
                Some(p) => formats::load_phantom(p)?,
                None => cfg.phantom.clone(),
            };
            let observations = match &gaze {
                Some(g) => formats::load_gaze(g)?,
                None => {
                    let truth_state = match &truth {
                        Some(t) => formats::load_calibration(t)?.state,
                        None => report.state,
                    };
                    evaluation::simulate_gaze(
                        &phantom,
                        &truth_state.world_t_volume,
                        &cfg.gaze.user_positions_mm,
                        cfg.gaze.aim_sigma_mm,
                        seed.unwrap_or(cfg.gaze.seed),
                    )?
                }
            };
            let tre = evaluation::compute_tre(&phantom, &report.state.world_t_volume, &observations)?;
            let tre_report = TreReport::new(tre);
            formats::save_tre(&out, &tre_report)?;

            println!(
                "tre overall [mm]: {:.4} ({} users x {} targets)",
                tre_report.tre.overall_mm, tre_report.users, tre_report.targets
            );
            for user in &tre_report.tre.per_user {
                println!("  user {} mean [mm]: {:.4}", user.user_id, user.mean_mm);
            }
            let per_target: Vec<String> =
                tre_report.tre.per_target_mm.iter().map(|v| format!("{v:.4}")).collect();
            println!("  per target [mm]: {}", per_target.join(" "));
            println!("wrote {}", out.display());
            Ok(())
        }

        Command::Bullseye { calibration, out, config, phantom, mode, orbital_deg, angular_deg } => {
            let cfg = load_config(&config)?;
            let report = formats::load_calibration(&calibration)?;
            let phantom = match &phantom {
                Some(p) => formats::load_phantom(p)?,
                None => cfg.phantom.clone(),
            };
            let (mode_name, orbital, angular, ray_volume, assessment) = match mode {
                BullseyeMode::Check => {
                    let (Some(orbital), Some(angular)) = (orbital_deg, angular_deg) else {
                        return Err(CliError::Config(
                            "check mode needs --orbital-deg and --angular-deg".into(),
                        ));
                    };
                    in_range("orbital angle", orbital, cfg.gantry.orbital_range_deg)?;
                    in_range("angular tilt", angular, cfg.gantry.angular_range_deg)?;
                    let ray = cfg.gantry.principal_ray(orbital, angular)?;
                    let assessment = evaluation::check_bullseye(&phantom.tube, &ray)?;
                    ("check", orbital, angular, ray, assessment)
                }
                BullseyeMode::Solve => {
                    let solve = evaluation::align_to_bullseye(&cfg.gantry, &phantom.tube)?;
                    ("solve", solve.orbital_deg, solve.angular_deg, solve.ray_volume, solve.assessment)
                }
            };
            let ray_world = report.state.world_t_volume.transform_line(&ray_volume);
            formats::save_bullseye(
                &out,
                &BullseyeReport {
                    schema_version: SCHEMA_VERSION,
                    mode: mode_name.into(),
                    orbital_deg: orbital,
                    angular_deg: angular,
                    ray_volume,
                    ray_world: Some(ray_world),
                    assessment,
                },
            )?;

            println!(
                "gantry angles [deg]: orbital {orbital:.3}, angular {angular:.3} ({mode_name})"
            );
            println!("misalignment [deg]: {:.4}", assessment.misalignment_deg);
            match assessment.min_clearance_mm {
                Some(c) => println!("min clearance [mm]: {c:.4}"),
                None => println!("min clearance [mm]: n/a (ray never traverses the tube)"),
            }
            println!("hit: {}", assessment.hit);
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}
