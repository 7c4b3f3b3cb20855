//! Synthesize a C-arm orbit and the tracker stream a mounted inside-out
//! camera would report, then look at the geometry of a few poses.

use insideout::geometry::{RigidTransform, Rotation};
use insideout::trajectory::{generate_orbit, simulate_tracker, NoiseSpec, OrbitSpec};
use nalgebra::Vector3;
use std::f64::consts::FRAC_PI_2;

fn main() {
    let spec = OrbitSpec { n_poses: 10, sweep_deg: 190.0, ..OrbitSpec::default() };
    let orbit = generate_orbit(&spec).expect("valid orbit spec");
    println!(
        "orbit: {} poses sweeping {} deg at {} mm from the isocenter",
        orbit.len(),
        spec.sweep_deg,
        spec.source_to_isocenter_mm
    );

    for (k, pose) in orbit.iter().enumerate().step_by(3) {
        let source = pose.translation;
        let ray = pose.rotation.rotate_vector(&Vector3::z());
        let through_isocenter = (source + ray * spec.source_to_isocenter_mm).norm();
        println!(
            "  pose {k}: source at [{:7.1}, {:7.1}, {:7.1}] mm, viewing ray misses the \
             isocenter by {through_isocenter:.1e} mm",
            source.x, source.y, source.z
        );
    }

    // Mount the camera on the gantry and watch the same sweep through its
    // eyes, first noise-free and then with measurement noise and drift.
    let mount = RigidTransform::new(Rotation::about_x(FRAC_PI_2), Vector3::new(0.0, 980.0, 0.0));
    let registration = RigidTransform::identity();
    let clean = simulate_tracker(&orbit, &mount, &registration, &NoiseSpec::none());
    let noisy = simulate_tracker(&orbit, &mount, &registration, &NoiseSpec::default());

    let gap: f64 = clean
        .samples()
        .iter()
        .zip(noisy.samples())
        .map(|(c, n)| c.world_t_tracker.translation_distance_to(&n.world_t_tracker))
        .sum::<f64>()
        / clean.len() as f64;
    println!("tracker stream: {} samples, mean noise displacement {gap:.2} mm", noisy.len());
}
