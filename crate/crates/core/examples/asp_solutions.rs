//! Admissible separation products for a 3x3 link at 50 m and 28 GHz.

use losmimo::asp::{asp_solutions, divisor_set, LinkParams};
use losmimo::channel::Wavelength;

fn main() -> losmimo::Result<()> {
    let wl = Wavelength::from_frequency_hz(28e9)?;
    let set = asp_solutions(LinkParams::broadside(wl, 50.0), 3, 3, 12)?;
    println!("excluded multiples of {:?}", divisor_set(3, 3)?.divisors);
    for ((p, asp), d) in set.admissible_p.iter().zip(&set.asp_values).zip(set.equal_separations()) {
        println!("p = {p:>2}  d_tx*d_rx = {asp:.4} m^2  d = {d:.4} m");
    }
    Ok(())
}
