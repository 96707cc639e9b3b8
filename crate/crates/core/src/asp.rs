//! The family of antenna separation products that make every pair of
//! channel columns orthogonal.
//!
//! Columns are orthogonal when the normalized product `delta` equals `p / M`
//! for a positive integer `p` that is not a multiple of any divisor `nu` of
//! `M` with `nu >= M / (N - 1)`. All integer reasoning here assumes
//! `N <= M`; callers with more transmit than receive antennas swap roles.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::Wavelength;
use crate::error::{Error, Result};

/// A geometric ratio below this counts as zero.
pub const ORTHOGONALITY_TOL: f64 = 1e-6;

/// Relative slack applied to distance-range bounds in [`optimal_distances`]
/// so that separations quoted to four decimals still hit their endpoints.
pub const DISTANCE_RANGE_SLACK: f64 = 5e-4;

const SINGULAR_TOL: f64 = 1e-12;
const ENDFIRE_COS_TOL: f64 = 1e-12;
const MAX_P_SCAN: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorSet {
    pub m: usize,
    pub n: usize,
    pub divisors: Vec<usize>,
}

impl DivisorSet {
    /// True if `p` is not a multiple of any member.
    pub fn admits(&self, p: usize) -> bool {
        p > 0 && self.divisors.iter().all(|nu| !p.is_multiple_of(*nu))
    }
}

/// Divisors `nu` of `M` with `nu >= M / (N - 1)`, compared in integers.
pub fn divisor_set(m: usize, n: usize) -> Result<DivisorSet> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need N >= 2, got {n}")));
    }
    if n > m {
        return Err(Error::SwapRequired { m, n });
    }
    let divisors = (1..=m)
        .filter(|nu| m.is_multiple_of(*nu) && nu * (n - 1) >= m)
        .collect();
    Ok(DivisorSet { m, n, divisors })
}

/// Admissible integers `p` in `1..=p_max`, ascending.
pub fn admissible_p(m: usize, n: usize, p_max: usize) -> Result<Vec<usize>> {
    if p_max < 1 {
        return Err(Error::InvalidParameter("p_max must be at least 1".into()));
    }
    let set = divisor_set(m, n)?;
    Ok((1..=p_max).filter(|&p| set.admits(p)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityCheck {
    pub orthogonal: bool,
    /// Largest `|1 - e^{j2 pi delta M q}| / |1 - e^{j2 pi delta q}|` over
    /// `q = 1..N-1`; infinite when some denominator vanishes.
    pub residual: f64,
    /// The `q` that produced the residual.
    pub worst_q: usize,
}

fn unit_gap(x: f64) -> f64 {
    (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, TAU * x.fract())).norm()
}

/// Direct numerical evaluation of the column-orthogonality ratio for all
/// column offsets, with no divisor reasoning.
pub fn orthogonality_check(delta: f64, m: usize, n: usize) -> Result<OrthogonalityCheck> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    if m < 1 || n < 2 {
        return Err(Error::InvalidParameter(format!(
            "need M >= 1 and N >= 2, got M = {m}, N = {n}"
        )));
    }
    let mut worst = OrthogonalityCheck {
        orthogonal: true,
        residual: 0.0,
        worst_q: 1,
    };
    for q in 1..n {
        let qf = q as f64;
        let den = unit_gap(delta * qf);
        if den < SINGULAR_TOL {
            return Ok(OrthogonalityCheck {
                orthogonal: false,
                residual: f64::INFINITY,
                worst_q: q,
            });
        }
        let ratio = unit_gap(delta * m as f64 * qf) / den;
        if ratio > worst.residual {
            worst.residual = ratio;
            worst.worst_q = q;
        }
    }
    worst.orthogonal = worst.residual < ORTHOGONALITY_TOL;
    Ok(worst)
}

/// Link parameters that enter the separation product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    pub wavelength: Wavelength,
    pub range_r: f64,
    pub theta_tx: f64,
    pub theta_rx: f64,
}

impl LinkParams {
    pub fn broadside(wavelength: Wavelength, range_r: f64) -> Self {
        Self {
            wavelength,
            range_r,
            theta_tx: 0.0,
            theta_rx: 0.0,
        }
    }

    /// `lambda R / (cos(theta_tx) cos(theta_rx))`, the product per unit of `p / M`.
    fn product_scale(&self) -> Result<f64> {
        if !(self.range_r.is_finite() && self.range_r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "range must be positive, got {}",
                self.range_r
            )));
        }
        for (name, v) in [("theta_tx", self.theta_tx), ("theta_rx", self.theta_rx)] {
            if !(0.0..=FRAC_PI_2).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0, pi/2], got {v}"
                )));
            }
        }
        let cc = self.theta_tx.cos() * self.theta_rx.cos();
        if cc < ENDFIRE_COS_TOL {
            return Err(Error::NoSolution(
                "endfire orientation: delta is zero for every separation".into(),
            ));
        }
        Ok(self.wavelength.meters() * self.range_r / cc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AspSolutionSet {
    pub admissible_p: Vec<usize>,
    /// `d_tx * d_rx` in square meters, one per admissible `p`.
    pub asp_values: Vec<f64>,
    pub link: LinkParams,
    pub m_rx: usize,
    pub n_tx: usize,
}

impl AspSolutionSet {
    /// Separation when both arrays use the same spacing.
    pub fn equal_separations(&self) -> Vec<f64> {
        self.asp_values.iter().map(|a| a.sqrt()).collect()
    }
}

/// Optimal separation products for a link. Roles are swapped when `N > M`
/// so that the larger array count plays `M`.
pub fn asp_solutions(link: LinkParams, m: usize, n: usize, p_max: usize) -> Result<AspSolutionSet> {
    let scale = link.product_scale()?;
    let (big, small) = (m.max(n), m.min(n));
    let admissible = admissible_p(big, small, p_max)?;
    let asp_values = admissible.iter().map(|&p| p as f64 * scale / big as f64).collect();
    Ok(AspSolutionSet {
        admissible_p: admissible,
        asp_values,
        link,
        m_rx: m,
        n_tx: n,
    })
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

/// Common spacing `sqrt(p lambda D / M)` for facing broadside arrays.
pub fn equal_separation(p: usize, wavelength: Wavelength, distance: f64, m_antennas: usize) -> Result<f64> {
    if p == 0 || m_antennas == 0 {
        return Err(Error::InvalidParameter("p and M must be positive".into()));
    }
    positive("distance", distance)?;
    Ok((p as f64 * wavelength.meters() * distance / m_antennas as f64).sqrt())
}

/// Distances in `[d_min, d_max]` at which a common spacing `d` is optimal:
/// `D = d^2 M / (p lambda)` for every admissible `p`, ascending.
pub fn optimal_distances(
    d: f64,
    wavelength: Wavelength,
    m: usize,
    n: usize,
    d_min: f64,
    d_max: f64,
) -> Result<Vec<f64>> {
    positive("separation", d)?;
    positive("d_min", d_min)?;
    positive("d_max", d_max)?;
    if d_min > d_max {
        return Err(Error::InvalidParameter(format!(
            "empty distance range [{d_min}, {d_max}]"
        )));
    }
    let (big, small) = (m.max(n), m.min(n));
    let set = divisor_set(big, small)?;
    let k = d * d * big as f64 / wavelength.meters();
    let lo = d_min * (1.0 - DISTANCE_RANGE_SLACK);
    let hi = d_max * (1.0 + DISTANCE_RANGE_SLACK);
    let p_lo = ((k / hi).ceil() as usize).max(1);
    let p_hi = (k / lo).floor() as usize;
    if p_hi.saturating_sub(p_lo) > MAX_P_SCAN {
        return Err(Error::InvalidParameter(
            "distance range spans too many solutions; raise d_min".into(),
        ));
    }
    let mut out: Vec<f64> = (p_lo..=p_hi)
        .filter(|&p| set.admits(p))
        .map(|p| k / p as f64)
        .filter(|&dist| dist >= lo && dist <= hi)
        .collect();
    out.reverse();
    Ok(out)
}

/// Distance at which spacing `d_to` realizes the same `d^2 / D` as
/// `d_from` does at `dist_from`.
pub fn shifted_distance(d_from: f64, d_to: f64, dist_from: f64) -> Result<f64> {
    positive("d_from", d_from)?;
    positive("d_to", d_to)?;
    positive("distance", dist_from)?;
    Ok(dist_from * (d_to / d_from).powi(2))
}
