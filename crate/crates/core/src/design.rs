//! Antenna-separation design for a link whose distance varies over a range,
//! e.g. two vehicles in the same lane with bumper-mounted arrays.
//!
//! Candidates come from the far-field solution family at a set of anchor
//! distances; each one is then scored on a capacity profile computed over
//! the whole distance grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asp::{admissible_p, equal_separation, optimal_distances};
use crate::channel::{build_channel, Wavelength};
use crate::error::{Error, Result};
use crate::geometry::{LinkGeometry, PathModel};
use crate::spectrum::{eigen_spectrum, max_capacity, waterfill_capacity, EigenSpectrum};

/// Candidates closer than this (meters) are merged.
pub const DEDUP_TOL: f64 = 1e-4;

/// Capacity scores within this many bps/Hz of the best count as tied.
pub const SCORE_TIE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    MaxMinCapacity,
    MaxMeanCapacity,
    MaxOptimalCount,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub d_min: f64,
    pub d_max: f64,
    pub m_rx: usize,
    pub n_tx: usize,
    pub wavelength: Wavelength,
    pub snr_db: f64,
    pub length_max_tx: f64,
    pub length_max_rx: f64,
    pub grid_step: f64,
    /// Distances used to generate candidates; the grid when `None`.
    pub anchor_distances: Option<Vec<f64>>,
    pub objective: Objective,
    pub profile_model: PathModel,
}

impl DesignSpec {
    /// Same-lane vehicles at 28 GHz: 3x3 arrays, 10-100 m, 1.8 m bumpers.
    pub fn v2v_default() -> Self {
        Self {
            d_min: 10.0,
            d_max: 100.0,
            m_rx: 3,
            n_tx: 3,
            wavelength: Wavelength::from_frequency_hz(28e9).expect("28 GHz is valid"),
            snr_db: 13.0,
            length_max_tx: 1.8,
            length_max_rx: 1.8,
            grid_step: 0.5,
            anchor_distances: None,
            objective: Objective::MaxMinCapacity,
            profile_model: PathModel::Exact,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.d_min.is_finite() && self.d_min > 0.0 && self.d_max.is_finite()) {
            return bad(format!("invalid distance range [{}, {}]", self.d_min, self.d_max));
        }
        if self.d_min > self.d_max {
            return bad(format!("d_min {} exceeds d_max {}", self.d_min, self.d_max));
        }
        if !(self.grid_step.is_finite() && self.grid_step > 0.0) {
            return bad(format!("grid step must be positive, got {}", self.grid_step));
        }
        if !(self.length_max_tx > 0.0 && self.length_max_rx > 0.0) {
            return bad("array length caps must be positive".into());
        }
        if self.m_rx < 2 || self.n_tx < 2 {
            return bad("both arrays need at least two antennas".into());
        }
        if !self.snr_db.is_finite() {
            return bad("SNR must be finite".into());
        }
        if let Some(anchors) = &self.anchor_distances {
            if anchors.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
                return bad("anchor distances must be positive".into());
            }
        }
        Ok(())
    }

    /// Distance grid `d_min, d_min + step, ..., <= d_max`.
    pub fn grid(&self) -> Vec<f64> {
        distance_grid(self.d_min, self.d_max, self.grid_step)
    }

    /// Largest common spacing both arrays can use under their length caps.
    pub fn max_separation(&self) -> f64 {
        (self.length_max_tx / (self.n_tx - 1) as f64).min(self.length_max_rx / (self.m_rx - 1) as f64)
    }

    fn fits(&self, d: f64) -> bool {
        (self.n_tx - 1) as f64 * d <= self.length_max_tx * (1.0 + 1e-12)
            && (self.m_rx - 1) as f64 * d <= self.length_max_rx * (1.0 + 1e-12)
    }

    /// Geometry used for a profile point. Cars face each other, so both
    /// arrays are broadside and the reference range equals the distance.
    pub fn link_geometry(&self, d: f64, distance: f64) -> Result<LinkGeometry> {
        LinkGeometry::broadside(self.n_tx, self.m_rx, d, distance)
    }

    fn big(&self) -> usize {
        self.m_rx.max(self.n_tx)
    }
}

/// `min, min + step, ...` up to and including `max` (within rounding).
pub fn distance_grid(min: f64, max: f64, step: f64) -> Vec<f64> {
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| min + i as f64 * step).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateSource {
    pub p: usize,
    pub anchor_distance_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationCandidate {
    pub separation_m: f64,
    pub source: CandidateSource,
}

/// Every common spacing that is optimal at some anchor distance and fits
/// the length caps, ascending and deduplicated.
pub fn candidate_separations(spec: &DesignSpec) -> Result<Vec<SeparationCandidate>> {
    spec.validate()?;
    let anchors = spec.anchor_distances.clone().unwrap_or_else(|| spec.grid());
    let big = spec.big();
    let small = spec.m_rx.min(spec.n_tx);
    let d_cap = spec.max_separation();
    let lam = spec.wavelength.meters();

    let mut all = Vec::new();
    for &anchor in &anchors {
        // d = sqrt(p lambda D / M) <= d_cap bounds p from above.
        let p_max = (d_cap * d_cap * big as f64 / (lam * anchor) * (1.0 + 1e-12)).floor() as usize;
        if p_max == 0 {
            continue;
        }
        for p in admissible_p(big, small, p_max)? {
            let d = equal_separation(p, spec.wavelength, anchor, big)?;
            if spec.fits(d) {
                all.push(SeparationCandidate {
                    separation_m: d,
                    source: CandidateSource {
                        p,
                        anchor_distance_m: anchor,
                    },
                });
            }
        }
    }
    all.sort_by(|a, b| {
        a.separation_m
            .total_cmp(&b.separation_m)
            .then(a.source.p.cmp(&b.source.p))
            .then(a.source.anchor_distance_m.total_cmp(&b.source.anchor_distance_m))
    });
    let mut out: Vec<SeparationCandidate> = Vec::with_capacity(all.len());
    for c in all {
        match out.last() {
            Some(prev) if c.separation_m - prev.separation_m < DEDUP_TOL => {}
            _ => out.push(c),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityProfile {
    pub separation_m: f64,
    pub distances: Vec<f64>,
    pub capacities: Vec<f64>,
    pub spectra: Vec<EigenSpectrum>,
}

impl CapacityProfile {
    pub fn min(&self) -> f64 {
        self.capacities.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> f64 {
        self.capacities.iter().sum::<f64>() / self.capacities.len() as f64
    }

    /// Linear interpolation; `None` outside the grid.
    pub fn capacity_at(&self, distance: f64) -> Option<f64> {
        interpolate(&self.distances, &self.capacities, distance)
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> Option<f64> {
    let (first, last) = (*xs.first()?, *xs.last()?);
    if x < first || x > last {
        return None;
    }
    let i = xs.partition_point(|&v| v <= x);
    if i == 0 {
        return Some(ys[0]);
    }
    if i == xs.len() {
        return Some(ys[xs.len() - 1]);
    }
    let (x0, x1) = (xs[i - 1], xs[i]);
    let t = (x - x0) / (x1 - x0);
    Some(ys[i - 1] + t * (ys[i] - ys[i - 1]))
}

/// Capacity and spectrum at one distance.
pub fn capacity_at(spec: &DesignSpec, d: f64, distance: f64) -> Result<(f64, EigenSpectrum)> {
    let geom = spec.link_geometry(d, distance)?;
    let h = build_channel(&geom, spec.wavelength, spec.profile_model)?;
    let s = eigen_spectrum(&h)?;
    let c = waterfill_capacity(&s, spec.snr_db)?;
    Ok((c.bits_per_s_per_hz, s))
}

/// Capacity over the spec's distance grid for a common spacing `d`.
pub fn capacity_profile(d: f64, spec: &DesignSpec) -> Result<CapacityProfile> {
    spec.validate()?;
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::InvalidParameter(format!("separation must be positive, got {d}")));
    }
    let distances = spec.grid();
    let points: Vec<(f64, EigenSpectrum)> = distances
        .par_iter()
        .map(|&dist| capacity_at(spec, d, dist))
        .collect::<Result<_>>()?;
    let (capacities, spectra) = points.into_iter().unzip();
    Ok(CapacityProfile {
        separation_m: d,
        distances,
        capacities,
        spectra,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub separation_m: f64,
    pub source: CandidateSource,
    pub min_capacity: f64,
    pub mean_capacity: f64,
    pub optimal_distances: Vec<f64>,
    pub capacity_profile: Vec<f64>,
}

impl Candidate {
    pub fn score(&self, objective: Objective) -> f64 {
        match objective {
            Objective::MaxMinCapacity => self.min_capacity,
            Objective::MaxMeanCapacity => self.mean_capacity,
            Objective::MaxOptimalCount => self.optimal_distances.len() as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub spec: DesignSpec,
    pub grid: Vec<f64>,
    pub max_capacity: f64,
    /// Ascending by separation.
    pub candidates: Vec<Candidate>,
    /// Winner under the objective; `None` when no candidate fits.
    pub best: Option<usize>,
}

impl DesignReport {
    pub fn winner(&self) -> Option<&Candidate> {
        self.best.map(|i| &self.candidates[i])
    }
}

/// Scores every candidate and picks the winner. Scores within
/// [`SCORE_TIE_TOL`] of the best are tied and the smallest separation wins.
pub fn rank_candidates(spec: &DesignSpec) -> Result<DesignReport> {
    let seeds = candidate_separations(spec)?;
    if seeds.is_empty() {
        log::warn!("no separation satisfies the array length caps");
    }
    let candidates: Vec<Candidate> = seeds
        .par_iter()
        .map(|seed| {
            let profile = capacity_profile(seed.separation_m, spec)?;
            let optimal = optimal_distances(
                seed.separation_m,
                spec.wavelength,
                spec.m_rx,
                spec.n_tx,
                spec.d_min,
                spec.d_max,
            )?;
            Ok(Candidate {
                separation_m: seed.separation_m,
                source: seed.source,
                min_capacity: profile.min(),
                mean_capacity: profile.mean(),
                optimal_distances: optimal,
                capacity_profile: profile.capacities,
            })
        })
        .collect::<Result<_>>()?;

    let tol = match spec.objective {
        Objective::MaxOptimalCount => 0.0,
        _ => SCORE_TIE_TOL,
    };
    let top = candidates
        .iter()
        .map(|c| c.score(spec.objective))
        .fold(f64::NEG_INFINITY, f64::max);
    let best = candidates
        .iter()
        .position(|c| c.score(spec.objective) >= top - tol);

    Ok(DesignReport {
        spec: spec.clone(),
        grid: spec.grid(),
        max_capacity: max_capacity(spec.m_rx, spec.n_tx, spec.snr_db),
        candidates,
        best,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    /// `(d_b / d_a)^2`: where profile A's point at `D` reappears in B.
    pub shift_factor: f64,
    pub max_deviation: f64,
    /// Grid points of A whose shifted distance lies inside B's grid.
    pub compared_points: usize,
}

impl ShiftReport {
    pub fn map_distance(&self, distance: f64) -> f64 {
        distance * self.shift_factor
    }
}

/// Checks `capacity(d_b, D (d_b/d_a)^2) = capacity(d_a, D)` by linear
/// interpolation of profile B.
pub fn stretch_shift_verify(a: &CapacityProfile, b: &CapacityProfile) -> Result<ShiftReport> {
    if a.distances != b.distances {
        return Err(Error::InvalidParameter(
            "profiles must share the same distance grid".into(),
        ));
    }
    let shift_factor = (b.separation_m / a.separation_m).powi(2);
    let mut max_deviation = 0.0f64;
    let mut compared_points = 0;
    for (&dist, &cap) in a.distances.iter().zip(&a.capacities) {
        if let Some(other) = b.capacity_at(dist * shift_factor) {
            max_deviation = max_deviation.max((other - cap).abs());
            compared_points += 1;
        }
    }
    Ok(ShiftReport {
        shift_factor,
        max_deviation,
        compared_points,
    })
}
