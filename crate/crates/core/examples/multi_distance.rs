//! Every distance in 10..100 m at which a fixed separation stays optimal.

use losmimo::asp::{equal_separation, optimal_distances};
use losmimo::channel::Wavelength;

fn main() -> losmimo::Result<()> {
    let wl = Wavelength::from_frequency_hz(28e9)?;
    let d = equal_separation(2, wl, 50.0, 3)?;
    let distances = optimal_distances(d, wl, 3, 3, 10.0, 100.0)?;
    println!("d = {d:.4} m is optimal at {} distances:", distances.len());
    for dist in distances {
        println!("  {dist:.3} m");
    }
    Ok(())
}
