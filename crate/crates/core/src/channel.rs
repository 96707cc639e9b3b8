//! Normalized LOS channel matrix built by ray tracing every antenna pair,
//! plus the closed-form column inner product used as an analytic check.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{path_lengths, LinkGeometry, PathModel};

/// Propagation speed used to convert carrier frequency to wavelength.
///
/// Rounded to 3e8 m/s so that 28 GHz gives lambda = 3/280 m.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Below this magnitude `1 - w` is treated as zero in geometric sums.
pub const GEOMETRIC_SINGULARITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wavelength(f64);

impl Wavelength {
    pub fn from_meters(lambda_m: f64) -> Result<Self> {
        if !(lambda_m.is_finite() && lambda_m > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "wavelength must be positive, got {lambda_m}"
            )));
        }
        Ok(Self(lambda_m))
    }

    pub fn from_frequency_hz(f_c: f64) -> Result<Self> {
        Self::from_frequency_hz_with_c(f_c, SPEED_OF_LIGHT)
    }

    pub fn from_frequency_hz_with_c(f_c: f64, c: f64) -> Result<Self> {
        if !(f_c.is_finite() && f_c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "carrier frequency must be positive, got {f_c}"
            )));
        }
        Self::from_meters(c / f_c)
    }

    pub fn meters(self) -> f64 {
        self.0
    }
}

/// `M x N` matrix of unit-modulus phasors `exp(j 2 pi r_mn / lambda)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub entries: DMatrix<Complex64>,
    pub model: PathModel,
    pub wavelength: Wavelength,
    pub geometry: LinkGeometry,
}

impl ChannelMatrix {
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    /// `h_k^H h_l` for 1-based column indices.
    pub fn column_inner_product(&self, k: usize, l: usize) -> Result<Complex64> {
        let n = self.cols();
        for idx in [k, l] {
            if idx == 0 || idx > n {
                return Err(Error::IndexOutOfRange {
                    what: "tx",
                    index: idx,
                    len: n,
                });
            }
        }
        let hk = self.entries.column(k - 1);
        let hl = self.entries.column(l - 1);
        Ok(hk.iter().zip(hl.iter()).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn to_json(&self) -> ChannelJson {
        let entries = self
            .entries
            .row_iter()
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        ChannelJson {
            rows: self.rows(),
            cols: self.cols(),
            model: self.model,
            wavelength_m: self.wavelength.meters(),
            geometry: self.geometry,
            entries,
        }
    }
}

/// Debug export: row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub rows: usize,
    pub cols: usize,
    pub model: PathModel,
    pub wavelength_m: f64,
    pub geometry: LinkGeometry,
    pub entries: Vec<Vec<[f64; 2]>>,
}

/// Unit phasor for a path of `r` meters.
fn phasor(r: f64, lambda: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * (r / lambda).fract())
}

/// Turns a row-major path-length table into the phasor matrix.
pub fn phasor_matrix(lengths: &[Vec<f64>], wl: Wavelength) -> DMatrix<Complex64> {
    let rows = lengths.len();
    let cols = lengths.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows, cols, |m, n| phasor(lengths[m][n], wl.meters()))
}

pub fn build_channel(geom: &LinkGeometry, wl: Wavelength, model: PathModel) -> Result<ChannelMatrix> {
    let lengths = path_lengths(geom, model)?;
    Ok(ChannelMatrix {
        entries: phasor_matrix(&lengths, wl),
        model,
        wavelength: wl,
        geometry: *geom,
    })
}

/// `H^H H`, an `N x N` Hermitian matrix with `M` on the diagonal.
pub fn gram_matrix(h: &ChannelMatrix) -> DMatrix<Complex64> {
    h.entries.adjoint() * &h.entries
}

/// Normalized separation product `d_tx d_rx cos(theta_tx) cos(theta_rx) / (lambda R)`.
pub fn delta(geom: &LinkGeometry, wl: Wavelength) -> f64 {
    geom.d_tx * geom.d_rx * geom.theta_tx.cos() * geom.theta_rx.cos()
        / (wl.meters() * geom.range_r)
}

/// `sum_{m=0}^{M-1} exp(j 2 pi x m)` via the geometric-series identity,
/// falling back to `M` when `exp(j 2 pi x) = 1`.
pub fn geometric_phasor_sum(x: f64, m: usize) -> Complex64 {
    let w = Complex64::from_polar(1.0, TAU * x.fract());
    let den = Complex64::new(1.0, 0.0) - w;
    if den.norm() < GEOMETRIC_SINGULARITY_TOL {
        return Complex64::new(m as f64, 0.0);
    }
    let wm = Complex64::from_polar(1.0, TAU * (x * m as f64).fract());
    (Complex64::new(1.0, 0.0) - wm) / den
}

/// Closed form of `h_k^H h_l` under the far-field path model.
///
/// The common phase is `exp(j 2 pi gamma / lambda)` with
/// `gamma = (l-k) d_tx sin(theta_tx) + ((l-1)^2 - (k-1)^2) d_tx^2 cos^2(theta_tx) / (2R)`.
pub fn inner_product_closed_form(
    geom: &LinkGeometry,
    wl: Wavelength,
    k: usize,
    l: usize,
) -> Result<Complex64> {
    geom.validate()?;
    for idx in [k, l] {
        if idx == 0 || idx > geom.n_tx {
            return Err(Error::IndexOutOfRange {
                what: "tx",
                index: idx,
                len: geom.n_tx,
            });
        }
    }
    if k == l {
        return Err(Error::InvalidParameter(
            "closed-form inner product needs distinct columns".into(),
        ));
    }
    let (kf, lf) = ((k - 1) as f64, (l - 1) as f64);
    let (st, ct) = geom.theta_tx.sin_cos();
    let gamma = (lf - kf) * geom.d_tx * st
        + (lf * lf - kf * kf) * geom.d_tx * geom.d_tx * ct * ct / (2.0 * geom.range_r);
    let common = phasor(gamma, wl.meters());
    let q = kf - lf;
    Ok(common * geometric_phasor_sum(delta(geom, wl) * q, geom.m_rx))
}
