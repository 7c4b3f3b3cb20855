//! Recover a camera mount from relative motion alone. With unstructured,
//! noise-free motion the solve is exact to machine precision.

use insideout::geometry::{RigidTransform, Rotation};
use insideout::handeye;
use insideout::trajectory::{relative_pairs, simulate_tracker, NoiseSpec, PairMode};
use nalgebra::Vector3;

fn main() {
    // The transform we pretend not to know: camera 980 mm up the gantry,
    // tilted 90 degrees about x.
    let mount = RigidTransform::new(
        Rotation::about_x(std::f64::consts::FRAC_PI_2),
        Vector3::new(20.0, 980.0, -15.0),
    );
    let registration = RigidTransform::new(
        Rotation::about_z(0.4),
        Vector3::new(1800.0, -600.0, 1200.0),
    );

    // Unstructured motion: rotations about three different axes.
    let motion: Vec<RigidTransform> = vec![
        RigidTransform::identity(),
        RigidTransform::new(Rotation::about_x(0.7), Vector3::new(100.0, 0.0, 50.0)),
        RigidTransform::new(Rotation::about_y(-0.5), Vector3::new(-80.0, 120.0, 0.0)),
        RigidTransform::new(Rotation::about_z(1.1), Vector3::new(0.0, -60.0, 90.0)),
        RigidTransform::new(
            Rotation::from_axis_angle(&Vector3::new(1.0, 1.0, -1.0), 0.9).unwrap(),
            Vector3::new(40.0, 40.0, 40.0),
        ),
    ];

    let stream = simulate_tracker(&motion, &mount, &registration, &NoiseSpec::none());
    let pairs = relative_pairs(&stream, PairMode::AllPairs).expect("enough samples");
    let solution = handeye::solve(&pairs).expect("well-conditioned motion");

    println!("pairs used: {}", pairs.len());
    println!(
        "rotation error: {:.3e} rad, translation error: {:.3e} mm",
        solution.x.rotation.angle_to(&mount.rotation),
        (solution.x.translation - mount.translation).norm()
    );
    println!(
        "observable rank: {} (axis spread {:.1} deg)",
        solution.degeneracy.observable_rank, solution.degeneracy.axis_spread_deg
    );
    let t = solution.x.translation;
    println!("recovered mount translation: [{:.6}, {:.6}, {:.6}] mm", t.x, t.y, t.z);
}
