//! CSV emitters for solution tables and distance sweeps.
//!
//! Numbers use Rust's `Display` for `f64` (shortest round-trip, `.` as the
//! decimal separator), so identical inputs give identical bytes.

use std::io::Write;

use serde::Serialize;

use crate::asp::{admissible_p, equal_separation, AspSolutionSet};
use crate::channel::Wavelength;
use crate::design::CapacityProfile;
use crate::error::{Error, Result};
use crate::spectrum::EigenSpectrum;

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Computation(format!("write failed: {e}"))
}

/// Array length caps in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthCaps {
    pub tx: f64,
    pub rx: f64,
}

impl LengthCaps {
    pub fn fits(&self, n_tx: usize, m_rx: usize, d: f64) -> bool {
        (n_tx - 1) as f64 * d <= self.tx * (1.0 + 1e-12)
            && (m_rx - 1) as f64 * d <= self.rx * (1.0 + 1e-12)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AspRow {
    pub p: usize,
    pub asp_m2: f64,
    pub d_equal_m: f64,
    pub within_length_limit: bool,
}

pub fn asp_rows(set: &AspSolutionSet, caps: LengthCaps) -> Vec<AspRow> {
    set.admissible_p
        .iter()
        .zip(&set.asp_values)
        .map(|(&p, &asp)| {
            let d = asp.sqrt();
            AspRow {
                p,
                asp_m2: asp,
                d_equal_m: d,
                within_length_limit: caps.fits(set.n_tx, set.m_rx, d),
            }
        })
        .collect()
}

pub fn write_asp_csv<W: Write>(rows: &[AspRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p", "asp_m2", "d_equal_m", "within_length_limit"])
        .map_err(io_err)?;
    for r in rows {
        w.write_record([
            r.p.to_string(),
            r.asp_m2.to_string(),
            r.d_equal_m.to_string(),
            r.within_length_limit.to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationRow {
    pub distance_m: f64,
    pub p: usize,
    pub d_m: f64,
    pub within_length_limit: bool,
}

/// Optimal common spacing versus distance for each admissible `p`.
pub fn separation_rows(
    wavelength: Wavelength,
    m_rx: usize,
    n_tx: usize,
    p_max: usize,
    distances: &[f64],
    caps: LengthCaps,
) -> Result<Vec<SeparationRow>> {
    let big = m_rx.max(n_tx);
    let ps = admissible_p(big, m_rx.min(n_tx), p_max)?;
    let mut rows = Vec::with_capacity(ps.len() * distances.len());
    for &p in &ps {
        for &dist in distances {
            let d = equal_separation(p, wavelength, dist, big)?;
            rows.push(SeparationRow {
                distance_m: dist,
                p,
                d_m: d,
                within_length_limit: caps.fits(n_tx, m_rx, d),
            });
        }
    }
    Ok(rows)
}

pub fn write_separations_csv<W: Write>(rows: &[SeparationRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["distance_m", "p", "d_m", "within_length_limit"])
        .map_err(io_err)?;
    for r in rows {
        w.write_record([
            r.distance_m.to_string(),
            r.p.to_string(),
            r.d_m.to_string(),
            r.within_length_limit.to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn eig_headers(k: usize) -> impl Iterator<Item = String> {
    (1..=k).map(|i| format!("eig{i}"))
}

/// `distance_m, eig1..eigK, rank`.
pub fn write_spectrum_csv<W: Write>(distances: &[f64], spectra: &[EigenSpectrum], out: W) -> Result<()> {
    let k = spectra.first().map_or(0, |s| s.values.len());
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = std::iter::once("distance_m".to_string())
        .chain(eig_headers(k))
        .chain(std::iter::once("rank".to_string()))
        .collect();
    w.write_record(&header).map_err(io_err)?;
    for (d, s) in distances.iter().zip(spectra) {
        let rec: Vec<String> = std::iter::once(d.to_string())
            .chain(s.values.iter().map(f64::to_string))
            .chain(std::iter::once(s.numerical_rank.to_string()))
            .collect();
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// `distance_m, capacity_bps_hz, eig1..eigK, rank`.
pub fn write_profile_csv<W: Write>(profile: &CapacityProfile, out: W) -> Result<()> {
    let k = profile.spectra.first().map_or(0, |s| s.values.len());
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = ["distance_m".to_string(), "capacity_bps_hz".to_string()]
        .into_iter()
        .chain(eig_headers(k))
        .chain(std::iter::once("rank".to_string()))
        .collect();
    w.write_record(&header).map_err(io_err)?;
    for ((d, c), s) in profile
        .distances
        .iter()
        .zip(&profile.capacities)
        .zip(&profile.spectra)
    {
        let rec: Vec<String> = [d.to_string(), c.to_string()]
            .into_iter()
            .chain(s.values.iter().map(f64::to_string))
            .chain(std::iter::once(s.numerical_rank.to_string()))
            .collect();
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn write_json<W: Write, T: Serialize>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(io_err)?;
    writeln!(out).map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asp::{asp_solutions, LinkParams};

    #[test]
    fn asp_table_layout() {
        let wl = Wavelength::from_meters(3.0 / 280.0).unwrap();
        let set = asp_solutions(LinkParams::broadside(wl, 50.0), 3, 3, 4).unwrap();
        let rows = asp_rows(&set, LengthCaps { tx: 1.8, rx: 1.8 });
        let mut buf = Vec::new();
        write_asp_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "p,asp_m2,d_equal_m,within_length_limit");
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("2,0.3571428571428"));
        assert!(lines[3].ends_with(",true"));
    }

    #[test]
    fn separation_rows_flag_long_arrays() {
        let wl = Wavelength::from_meters(3.0 / 280.0).unwrap();
        let rows = separation_rows(wl, 3, 3, 11, &[10.0, 100.0], LengthCaps { tx: 1.8, rx: 1.8 }).unwrap();
        assert_eq!(rows.len(), 8 * 2);
        let p11_far = rows.iter().find(|r| r.p == 11 && r.distance_m == 100.0).unwrap();
        assert!(!p11_far.within_length_limit);
        let p1_near = rows.iter().find(|r| r.p == 1 && r.distance_m == 10.0).unwrap();
        assert!(p1_near.within_length_limit);
    }
}
