//! Antenna placement for a pair of uniform linear arrays and the
//! transmitter-to-receiver path lengths between every antenna pair.
//!
//! The transmit array starts at the origin and lies in the xz-plane, tilted
//! by `theta_tx` from the z-axis. The receive array starts at `(R, 0, 0)`,
//! tilted by `theta_rx` from the vertical and rotated by `phi_rx` around it.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in meters.
pub type Point3 = [f64; 3];

/// Full parameterization of a two-ULA line-of-sight link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    pub n_tx: usize,
    pub m_rx: usize,
    pub d_tx: f64,
    pub d_rx: f64,
    pub range_r: f64,
    pub theta_tx: f64,
    pub theta_rx: f64,
    pub phi_rx: f64,
}

/// Which path-length model to use when building a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathModel {
    /// Euclidean distance between antenna coordinates (spherical wavefront).
    Exact,
    /// First-order Taylor expansion around the reference range.
    Approximate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntennaCoordinates {
    pub tx: Vec<Point3>,
    pub rx: Vec<Point3>,
}

impl LinkGeometry {
    /// Validated constructor.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n_tx: usize,
        m_rx: usize,
        d_tx: f64,
        d_rx: f64,
        range_r: f64,
        theta_tx: f64,
        theta_rx: f64,
        phi_rx: f64,
    ) -> Result<Self> {
        let geom = Self {
            n_tx,
            m_rx,
            d_tx,
            d_rx,
            range_r,
            theta_tx,
            theta_rx,
            phi_rx,
        };
        geom.validate()?;
        Ok(geom)
    }

    /// Two facing, vertically mounted arrays with a common spacing `d`.
    pub fn broadside(n_tx: usize, m_rx: usize, d: f64, range_r: f64) -> Result<Self> {
        Self::new(n_tx, m_rx, d, d, range_r, 0.0, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tx < 2 || self.m_rx < 2 {
            return Err(Error::InvalidGeometry(format!(
                "both arrays need at least two antennas (N = {}, M = {})",
                self.n_tx, self.m_rx
            )));
        }
        for (name, v) in [
            ("d_tx", self.d_tx),
            ("d_rx", self.d_rx),
            ("range_r", self.range_r),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidGeometry(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        for (name, v) in [("theta_tx", self.theta_tx), ("theta_rx", self.theta_rx)] {
            if !(0.0..=FRAC_PI_2).contains(&v) {
                return Err(Error::InvalidGeometry(format!(
                    "{name} must lie in [0, pi/2], got {v}"
                )));
            }
        }
        if !self.phi_rx.is_finite() {
            return Err(Error::InvalidGeometry("phi_rx must be finite".into()));
        }
        Ok(())
    }

    pub fn tx_length(&self) -> f64 {
        (self.n_tx - 1) as f64 * self.d_tx
    }

    pub fn rx_length(&self) -> f64 {
        (self.m_rx - 1) as f64 * self.d_rx
    }

    /// Largest physical array length of the two.
    pub fn aperture(&self) -> f64 {
        self.tx_length().max(self.rx_length())
    }

    pub fn with_range(mut self, range_r: f64) -> Result<Self> {
        self.range_r = range_r;
        self.validate()?;
        Ok(self)
    }

    fn tx_point(&self, n: usize) -> Point3 {
        let k = (n - 1) as f64 * self.d_tx;
        [-k * self.theta_tx.sin(), 0.0, k * self.theta_tx.cos()]
    }

    fn rx_point(&self, m: usize) -> Point3 {
        let k = (m - 1) as f64 * self.d_rx;
        let (st, ct) = self.theta_rx.sin_cos();
        let (sp, cp) = self.phi_rx.sin_cos();
        [self.range_r + k * st * cp, k * st * sp, k * ct]
    }

    fn check_indices(&self, m: usize, n: usize) -> Result<()> {
        if m == 0 || m > self.m_rx {
            return Err(Error::IndexOutOfRange {
                what: "rx",
                index: m,
                len: self.m_rx,
            });
        }
        if n == 0 || n > self.n_tx {
            return Err(Error::IndexOutOfRange {
                what: "tx",
                index: n,
                len: self.n_tx,
            });
        }
        Ok(())
    }
}

/// Coordinates of all antennas of both arrays.
pub fn antenna_coordinates(geom: &LinkGeometry) -> Result<AntennaCoordinates> {
    geom.validate()?;
    Ok(AntennaCoordinates {
        tx: (1..=geom.n_tx).map(|n| geom.tx_point(n)).collect(),
        rx: (1..=geom.m_rx).map(|m| geom.rx_point(m)).collect(),
    })
}

pub fn distance(a: &Point3, b: &Point3) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Euclidean distance between receive antenna `m` and transmit antenna `n`
/// (both 1-based).
pub fn path_length_exact(geom: &LinkGeometry, m: usize, n: usize) -> Result<f64> {
    geom.check_indices(m, n)?;
    Ok(distance(&geom.rx_point(m), &geom.tx_point(n)))
}

/// Far-field expansion of the path length: the along-range offsets enter
/// linearly and the transverse offsets through `transverse^2 / (2R)`.
pub fn path_length_approx(geom: &LinkGeometry, m: usize, n: usize) -> Result<f64> {
    geom.check_indices(m, n)?;
    Ok(approx_unchecked(geom, m, n))
}

fn approx_unchecked(geom: &LinkGeometry, m: usize, n: usize) -> f64 {
    let km = (m - 1) as f64 * geom.d_rx;
    let kn = (n - 1) as f64 * geom.d_tx;
    let (st_rx, ct_rx) = geom.theta_rx.sin_cos();
    let (st_tx, ct_tx) = geom.theta_tx.sin_cos();
    let (sp, cp) = geom.phi_rx.sin_cos();
    let y = km * st_rx * sp;
    let z = km * ct_rx - kn * ct_tx;
    geom.range_r + km * st_rx * cp + kn * st_tx + (y * y + z * z) / (2.0 * geom.range_r)
}

/// All `M x N` path lengths under the chosen model, row-major by receive
/// antenna.
pub fn path_lengths(geom: &LinkGeometry, model: PathModel) -> Result<Vec<Vec<f64>>> {
    geom.validate()?;
    if model == PathModel::Approximate && geom.range_r < 10.0 * geom.aperture() {
        log::warn!(
            "range {:.3} m is less than 10x the array aperture {:.3} m; \
             the far-field path model may be inaccurate",
            geom.range_r,
            geom.aperture()
        );
    }
    let rows = (1..=geom.m_rx)
        .map(|m| {
            (1..=geom.n_tx)
                .map(|n| match model {
                    PathModel::Exact => distance(&geom.rx_point(m), &geom.tx_point(n)),
                    PathModel::Approximate => approx_unchecked(geom, m, n),
                })
                .collect()
        })
        .collect();
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn broadside_vertical_coordinates() {
        let g = LinkGeometry::broadside(2, 2, 1.0, 10.0).unwrap();
        let c = antenna_coordinates(&g).unwrap();
        assert_eq!(c.tx, vec![[0.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
        assert_eq!(c.rx, vec![[10.0, 0.0, 0.0], [10.0, 0.0, 1.0]]);
    }

    #[test]
    fn horizontal_tx_array_points_backwards() {
        let g = LinkGeometry::new(2, 2, 0.4, 0.4, 10.0, FRAC_PI_2, 0.0, 0.0).unwrap();
        let c = antenna_coordinates(&g).unwrap();
        assert!(close(c.tx[1][0], -0.4, 1e-15));
        assert!(close(c.tx[1][2], 0.0, 1e-15));
    }

    #[test]
    fn design_point_z_coordinates() {
        let g = LinkGeometry::broadside(3, 3, 0.5976, 50.0).unwrap();
        let c = antenna_coordinates(&g).unwrap();
        let z: Vec<f64> = c.tx.iter().map(|p| p[2]).collect();
        assert!(close(z[0], 0.0, 1e-15));
        assert!(close(z[1], 0.5976, 1e-15));
        assert!(close(z[2], 1.1952, 1e-15));
    }

    #[test]
    fn rejects_invalid_geometry() {
        assert!(matches!(
            LinkGeometry::broadside(1, 1, 0.5, 10.0),
            Err(Error::InvalidGeometry(_))
        ));
        assert!(LinkGeometry::broadside(2, 2, 0.0, 10.0).is_err());
        assert!(LinkGeometry::broadside(2, 2, 0.5, -1.0).is_err());
        assert!(LinkGeometry::new(2, 2, 0.5, 0.5, 10.0, -0.1, 0.0, 0.0).is_err());
        assert!(LinkGeometry::new(2, 2, 0.5, 0.5, 10.0, 0.0, 1.6, 0.0).is_err());
        assert!(LinkGeometry::new(2, 2, 0.5, 0.5, 10.0, 0.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn exact_path_lengths() {
        let g = LinkGeometry::broadside(2, 2, 1.0, 10.0).unwrap();
        assert_eq!(path_length_exact(&g, 1, 1).unwrap(), 10.0);
        assert!(close(path_length_exact(&g, 2, 1).unwrap(), 101f64.sqrt(), 1e-14));

        let g = LinkGeometry::broadside(3, 3, 0.5976, 50.0).unwrap();
        let expected = (50.0f64.powi(2) + 1.1952f64.powi(2)).sqrt();
        assert!(close(path_length_exact(&g, 3, 1).unwrap(), expected, 1e-12));
    }

    #[test]
    fn index_errors() {
        let g = LinkGeometry::broadside(3, 2, 0.5, 10.0).unwrap();
        assert!(matches!(
            path_length_exact(&g, 0, 1),
            Err(Error::IndexOutOfRange { what: "rx", .. })
        ));
        assert!(matches!(
            path_length_approx(&g, 1, 4),
            Err(Error::IndexOutOfRange { what: "tx", .. })
        ));
        assert!(path_length_exact(&g, 3, 1).is_err());
    }

    #[test]
    fn approx_reference_pair_and_broadside_form() {
        let g = LinkGeometry::new(3, 4, 0.3, 0.2, 25.0, 0.4, 0.7, 1.1).unwrap();
        assert_eq!(path_length_approx(&g, 1, 1).unwrap(), 25.0);

        let g = LinkGeometry::new(3, 4, 0.3, 0.2, 25.0, 0.0, 0.0, 0.9).unwrap();
        for m in 1..=4 {
            for n in 1..=3 {
                let dz = (m - 1) as f64 * 0.2 - (n - 1) as f64 * 0.3;
                let want = 25.0 + dz * dz / 50.0;
                assert!(close(path_length_approx(&g, m, n).unwrap(), want, 1e-13));
            }
        }
    }

    #[test]
    fn approx_tracks_exact_at_design_point() {
        let g = LinkGeometry::broadside(3, 3, 0.5976, 50.0).unwrap();
        let e = path_length_exact(&g, 3, 1).unwrap();
        let a = path_length_approx(&g, 3, 1).unwrap();
        assert!((a - e).abs() / e < 1e-6);
    }

    #[test]
    fn path_length_matrix_matches_pointwise() {
        let g = LinkGeometry::new(3, 2, 0.3, 0.2, 25.0, 0.4, 0.7, 1.1).unwrap();
        let rows = path_lengths(&g, PathModel::Exact).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1][2], path_length_exact(&g, 2, 3).unwrap());
    }

    fn geometry_strategy() -> impl Strategy<Value = LinkGeometry> {
        (
            2usize..8,
            2usize..8,
            0.01f64..1.0,
            0.01f64..1.0,
            1.0f64..500.0,
            0.0f64..=FRAC_PI_2,
            0.0f64..=FRAC_PI_2,
            -PI..PI,
        )
            .prop_map(|(n, m, dt, dr, r, tt, tr, pr)| LinkGeometry {
                n_tx: n,
                m_rx: m,
                d_tx: dt,
                d_rx: dr,
                range_r: r,
                theta_tx: tt,
                theta_rx: tr,
                phi_rx: pr,
            })
    }

    proptest! {
        #[test]
        fn reference_pair_is_range(g in geometry_strategy()) {
            prop_assert_eq!(path_length_exact(&g, 1, 1).unwrap(), g.range_r);
        }

        #[test]
        fn uniform_spacing(g in geometry_strategy()) {
            let c = antenna_coordinates(&g).unwrap();
            for w in c.tx.windows(2) {
                prop_assert!((distance(&w[0], &w[1]) - g.d_tx).abs() < 1e-12);
            }
            for w in c.rx.windows(2) {
                prop_assert!((distance(&w[0], &w[1]) - g.d_rx).abs() < 1e-12);
            }
        }

        #[test]
        fn exact_length_is_translation_invariant(
            g in geometry_strategy(),
            off in prop::array::uniform3(-100.0f64..100.0),
        ) {
            let c = antenna_coordinates(&g).unwrap();
            let shift = |p: &Point3| [p[0] + off[0], p[1] + off[1], p[2] + off[2]];
            for (m, rx) in c.rx.iter().enumerate() {
                for (n, tx) in c.tx.iter().enumerate() {
                    let d = distance(&shift(rx), &shift(tx));
                    let r = path_length_exact(&g, m + 1, n + 1).unwrap();
                    prop_assert!((d - r).abs() < 1e-9);
                    prop_assert!((distance(tx, rx) - r).abs() < 1e-12);
                }
            }
        }

        // Broadside arrays: the only neglected term is fourth order in
        // aperture / range, so 25x aperture keeps the relative error tiny.
        #[test]
        fn approx_converges_in_far_field_broadside(
            mut g in geometry_strategy(),
            scale in 25.0f64..200.0,
        ) {
            g.theta_tx = 0.0;
            g.theta_rx = 0.0;
            g.range_r = scale * g.aperture();
            for m in 1..=g.m_rx {
                for n in 1..=g.n_tx {
                    let e = path_length_exact(&g, m, n).unwrap();
                    let a = path_length_approx(&g, m, n).unwrap();
                    prop_assert!((a - e).abs() / e < 1e-6);
                }
            }
        }

        // Tilted arrays also drop a cross term of order
        // transverse^2 * along / R^2, which shrinks more slowly.
        #[test]
        fn approx_converges_in_far_field_tilted(
            mut g in geometry_strategy(),
            scale in 25.0f64..200.0,
        ) {
            g.range_r = scale * g.aperture();
            for m in 1..=g.m_rx {
                for n in 1..=g.n_tx {
                    let e = path_length_exact(&g, m, n).unwrap();
                    let a = path_length_approx(&g, m, n).unwrap();
                    prop_assert!((a - e).abs() / e < 3e-4);
                }
            }
        }
    }
}
