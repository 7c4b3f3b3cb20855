//! Assemble the full transform chain from a calibration and read device
//! poses out of it in whichever frame is convenient: world, patient
//! volume, or a surgeon looking over the table.

use insideout::chain::{calibrate, Frame, FramePoses};
use insideout::geometry::{RigidTransform, Rotation};
use nalgebra::Vector3;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

fn main() {
    // Snapshot at calibration time: tracker pose in the world, device pose
    // in the volume, and the solved mount between them.
    let world_t_tracker_t0 = RigidTransform::new(
        Rotation::about_z(0.3),
        Vector3::new(1500.0, 800.0, 1900.0),
    );
    let mount = RigidTransform::new(Rotation::about_x(FRAC_PI_2), Vector3::new(0.0, 980.0, 0.0));
    let volume_t_carm_t0 =
        RigidTransform::new(Rotation::about_y(0.2), Vector3::new(0.0, 0.0, -600.0));

    let state = calibrate(&world_t_tracker_t0, &mount, &volume_t_carm_t0);
    println!("chain self-consistency defect: {:.2e}", state.consistency_defect());
    let w = state.world_t_volume.translation;
    println!("volume registered at [{:.1}, {:.1}, {:.1}] mm in the world", w.x, w.y, w.z);

    // Later: the gantry has moved, a surgeon stands at the table edge.
    let poses = FramePoses {
        world_t_tracker: RigidTransform::new(
            Rotation::about_z(0.3).compose(&Rotation::about_x(0.45)),
            Vector3::new(1430.0, 750.0, 1825.0),
        ),
        world_t_surgeon: RigidTransform::new(
            Rotation::about_z(-FRAC_PI_4),
            w + Vector3::new(600.0, 600.0, 350.0),
        ),
    };

    let device_in_volume = state.volume_t_carm(&poses).translation;
    let device_for_surgeon = state.surgeon_t_carm(&poses).translation;
    println!(
        "device source: [{:.1}, {:.1}, {:.1}] mm from the isocenter, [{:.1}, {:.1}, {:.1}] mm \
         from the surgeon",
        device_in_volume.x,
        device_in_volume.y,
        device_in_volume.z,
        device_for_surgeon.x,
        device_for_surgeon.y,
        device_for_surgeon.z,
    );

    for frame in [Frame::World, Frame::Volume, Frame::Surgeon] {
        let ray = state.principal_ray(&poses, frame);
        println!(
            "principal ray in {frame:>7} frame: origin [{:8.1}, {:8.1}, {:8.1}] mm, \
             direction [{:6.3}, {:6.3}, {:6.3}]",
            ray.origin.x,
            ray.origin.y,
            ray.origin.z,
            ray.direction.x,
            ray.direction.y,
            ray.direction.z,
        );
    }
}
