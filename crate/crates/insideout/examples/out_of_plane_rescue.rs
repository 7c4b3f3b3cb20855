//! Rescue a degenerate circular scan by tacking on a few out-of-plane
//! excursions: tilted rotations break the single-axis geometry and make
//! the full mount translation observable again.

use insideout::geometry::{RigidTransform, Rotation};
use insideout::handeye;
use insideout::trajectory::{
    add_out_of_plane_poses, generate_orbit, relative_pairs, simulate_tracker, NoiseSpec,
    OrbitSpec, PairMode,
};
use nalgebra::Vector3;
use std::f64::consts::FRAC_PI_2;

fn main() {
    let mount = RigidTransform::new(
        Rotation::about_x(FRAC_PI_2),
        Vector3::new(20.0, 250.0, 400.0),
    );
    let registration =
        RigidTransform::new(Rotation::about_z(25f64.to_radians()), Vector3::new(2000.0, 1000.0, 800.0));
    let noise = NoiseSpec { seed: 11, ..NoiseSpec::default() };

    let orbit = generate_orbit(&OrbitSpec::default()).expect("valid default orbit");
    let flat_stream = simulate_tracker(&orbit, &mount, &registration, &noise);
    let flat_pairs = relative_pairs(&flat_stream, PairMode::AllPairs).unwrap();
    let flat = handeye::solve(&flat_pairs).unwrap();

    // Three extra poses, tilted 45/60/75 degrees out of the orbit plane.
    let rescued_stream =
        add_out_of_plane_poses(&flat_stream, &[45.0, 60.0, 75.0], 45.0, &mount, &registration, &noise)
            .expect("valid excursion parameters");
    let rescued_pairs = relative_pairs(&rescued_stream, PairMode::AllPairs).unwrap();
    let rescued = handeye::solve(&rescued_pairs).unwrap();

    println!(
        "flat orbit:  {} poses, rank {}, axis spread {:6.2} deg",
        flat_stream.len(),
        flat.degeneracy.observable_rank,
        flat.degeneracy.axis_spread_deg
    );
    println!(
        "with rescue: {} poses, rank {}, axis spread {:6.2} deg",
        rescued_stream.len(),
        rescued.degeneracy.observable_rank,
        rescued.degeneracy.axis_spread_deg
    );

    let err = |t: Vector3<f64>| (t - mount.translation).norm();
    println!(
        "mount translation error: {:8.2} mm -> {:.2} mm",
        err(flat.x.translation),
        err(rescued.x.translation)
    );
    println!(
        "blind-axis component:    {:8.2} mm -> {:.2} mm (true 400.00 mm)",
        flat.x.translation.z, rescued.x.translation.z
    );
}
