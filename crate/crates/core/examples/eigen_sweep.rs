//! Eigenvalue sweep over distance, written as CSV to stdout.

use losmimo::channel::{build_channel, Wavelength};
use losmimo::design::distance_grid;
use losmimo::geometry::{LinkGeometry, PathModel};
use losmimo::report::write_spectrum_csv;
use losmimo::spectrum::eigen_spectrum;

fn main() -> losmimo::Result<()> {
    let wl = Wavelength::from_frequency_hz(28e9)?;
    let distances = distance_grid(10.0, 100.0, 2.5);
    let spectra = distances
        .iter()
        .map(|&dist| {
            let geom = LinkGeometry::broadside(3, 3, 0.5976, dist)?;
            eigen_spectrum(&build_channel(&geom, wl, PathModel::Exact)?)
        })
        .collect::<losmimo::Result<Vec<_>>>()?;
    write_spectrum_csv(&distances, &spectra, std::io::stdout().lock())
}
