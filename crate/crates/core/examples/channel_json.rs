//! Dump a tilted-array channel matrix and its column correlations as JSON.

use losmimo::channel::{build_channel, Wavelength};
use losmimo::geometry::{LinkGeometry, PathModel};
use losmimo::report::write_json;

fn main() -> losmimo::Result<()> {
    let wl = Wavelength::from_frequency_hz(28e9)?;
    let geom = LinkGeometry::new(4, 4, 0.5, 0.45, 30.0, 0.2, 0.35, 0.1)?;
    let h = build_channel(&geom, wl, PathModel::Exact)?;
    for k in 1..h.cols() {
        let ip = h.column_inner_product(k, k + 1)?;
        eprintln!("|<h{k}, h{}>| = {:.4}", k + 1, ip.norm());
    }
    write_json(&h.to_json(), std::io::stdout().lock())
}
