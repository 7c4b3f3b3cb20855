//! Plan a bull's-eye view: find gantry angles whose principal ray looks
//! straight down a tube in the volume, the classic alignment check before
//! driving a tool along that path.

use insideout::evaluation::{align_to_bullseye, check_bullseye, GantrySpec, Tube};
use nalgebra::Vector3;

fn main() {
    let gantry = GantrySpec::default();

    // A tube tilted away from every neutral direction.
    let axis = Vector3::new(-0.82, 0.35, 0.45).normalize();
    let tube = Tube {
        start_mm: -axis * 45.0,
        end_mm: axis * 45.0,
        radius_mm: 4.0,
    };

    // Staring from the neutral pose misses badly.
    let neutral = gantry.principal_ray(0.0, 0.0).expect("angles in range");
    let at_neutral = check_bullseye(&tube, &neutral).expect("valid tube");
    println!(
        "neutral view: hit = {}, misalignment {:.1} deg",
        at_neutral.hit, at_neutral.misalignment_deg
    );

    // Search the gantry ranges for the threading pose.
    let solve = align_to_bullseye(&gantry, &tube).expect("tube is reachable");
    println!(
        "solved view:  orbital {:+.2} deg, angular {:+.2} deg",
        solve.orbital_deg, solve.angular_deg
    );
    println!(
        "              hit = {}, misalignment {:.4} deg, clearance {:.2} mm",
        solve.assessment.hit,
        solve.assessment.misalignment_deg,
        solve.assessment.min_clearance_mm.expect("threading ray traverses the tube")
    );

    // An unreachable request fails loudly rather than returning a bad pose.
    let vertical = Tube {
        start_mm: Vector3::new(0.0, 0.0, 40.0),
        end_mm: Vector3::new(0.0, 0.0, -40.0),
        radius_mm: 5.0,
    };
    match align_to_bullseye(&gantry, &vertical) {
        Err(err) => println!("vertical tube: {err}"),
        Ok(_) => unreachable!("the orbit axis is never a viewing direction"),
    }
}
