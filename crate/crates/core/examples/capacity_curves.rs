//! Water-filling versus equal-power capacity across distance.

use losmimo::channel::{build_channel, Wavelength};
use losmimo::geometry::{LinkGeometry, PathModel};
use losmimo::spectrum::{eigen_spectrum, equal_power_capacity, max_capacity, waterfill_capacity};

fn main() -> losmimo::Result<()> {
    let wl = Wavelength::from_frequency_hz(28e9)?;
    let snr_db = 13.0;
    println!("upper bound {:.3} bps/Hz", max_capacity(3, 3, snr_db));
    println!("{:>8} {:>10} {:>10}", "D [m]", "WF", "EQ");
    for dist in [10.0, 20.0, 33.3, 50.0, 66.7, 100.0] {
        let geom = LinkGeometry::broadside(3, 3, 0.5976, dist)?;
        let spec = eigen_spectrum(&build_channel(&geom, wl, PathModel::Exact)?)?;
        let wf = waterfill_capacity(&spec, snr_db)?;
        println!(
            "{dist:>8.1} {:>10.3} {:>10.3}",
            wf.bits_per_s_per_hz,
            equal_power_capacity(&spec, snr_db)?
        );
    }
    Ok(())
}
