//! Score a registration the way an accuracy protocol would: several users
//! sight the phantom spheres through a tracked pointer, and the mean
//! point-to-line distance against the registered positions is the target
//! registration error.

use insideout::evaluation::{compute_tre, simulate_gaze, Phantom};
use insideout::geometry::{RigidTransform, Rotation};
use nalgebra::Vector3;

fn main() {
    let phantom = Phantom::default();
    let truth = RigidTransform::new(Rotation::about_z(0.2), Vector3::new(1200.0, 400.0, 900.0));

    // Four users around the table, 2 mm aiming scatter.
    let users = [
        Vector3::new(1500.0, 1400.0, 400.0),
        Vector3::new(-1400.0, 1500.0, 500.0),
        Vector3::new(1600.0, -1300.0, 300.0),
        Vector3::new(-1500.0, -1500.0, 600.0),
    ];
    let observations =
        simulate_gaze(&phantom, &truth, &users, 2.0, 42).expect("valid protocol setup");
    println!(
        "{} observations: {} users x {} spheres",
        observations.len(),
        users.len(),
        phantom.spheres_mm.len()
    );

    // A perfect registration scores (almost) only the aiming scatter...
    let perfect = compute_tre(&phantom, &truth, &observations).expect("complete grid");
    println!("tre with the true registration: {:.3} mm", perfect.overall_mm);

    // ...while a registration that is 8 mm off shows it immediately.
    let mut off = truth;
    off.translation += Vector3::new(5.0, -5.0, 3.7);
    let skewed = compute_tre(&phantom, &off, &observations).expect("complete grid");
    println!("tre with an 8 mm misregistration: {:.3} mm", skewed.overall_mm);

    for user in &skewed.per_user {
        println!("  user {}: {:.3} mm", user.user_id, user.mean_mm);
    }
    let worst = skewed
        .per_target_mm
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty targets");
    println!("  worst sphere: #{} at {:.3} mm", worst.0, worst.1);
}
