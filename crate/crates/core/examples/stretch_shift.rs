//! Capacity curves for two separations coincide after scaling distance by (d2/d1)^2.

use losmimo::asp::shifted_distance;
use losmimo::design::{capacity_profile, stretch_shift_verify, DesignSpec};

fn main() -> losmimo::Result<()> {
    let spec = DesignSpec {
        d_min: 40.0,
        d_max: 100.0,
        grid_step: 0.1,
        ..DesignSpec::v2v_default()
    };
    let a = capacity_profile(0.5976, &spec)?;
    let b = capacity_profile(0.7, &spec)?;
    let r = stretch_shift_verify(&a, &b)?;
    println!(
        "factor {:.4}, {} points compared, max deviation {:.4} bps/Hz",
        r.shift_factor, r.compared_points, r.max_deviation
    );
    println!("50 m with d = 0.5976 maps to {:.2} m with d = 0.7", shifted_distance(0.5976, 0.7, 50.0)?);
    Ok(())
}
