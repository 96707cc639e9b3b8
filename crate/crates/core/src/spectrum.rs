//! Eigenmodes of the channel and the resulting capacity.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};

/// Eigenvalues below `RANK_TOL * max` count as zero.
pub const RANK_TOL: f64 = 1e-6;

/// Negative eigenvalues down to this (relative) level are rounding noise.
const NEGATIVE_EIG_TOL: f64 = 1e-10;

const EIG_EPS: f64 = 1e-14;
const EIG_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSpectrum {
    /// `min(M, N)` nonnegative eigenvalues of `H H^H`, descending.
    pub values: Vec<f64>,
    /// Trace of the Gram matrix; `M N` for a unit-modulus channel.
    pub trace: f64,
    pub numerical_rank: usize,
    pub m_rx: usize,
    pub n_tx: usize,
}

impl EigenSpectrum {
    /// Wraps externally supplied eigenvalues (sorted, clipped at zero).
    pub fn from_eigenvalues(mut values: Vec<f64>, m_rx: usize, n_tx: usize) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("eigenvalues must be finite".into()));
        }
        let scale = values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        if let Some(v) = values.iter().find(|&&v| v < -NEGATIVE_EIG_TOL * scale) {
            return Err(Error::InvalidParameter(format!(
                "eigenvalue {v} is negative; Gram matrices are positive semidefinite"
            )));
        }
        for v in values.iter_mut() {
            *v = v.max(0.0);
        }
        values.sort_by(|a, b| b.total_cmp(a));
        let trace = values.iter().sum();
        Ok(Self {
            numerical_rank: numerical_rank(&values),
            values,
            trace,
            m_rx,
            n_tx,
        })
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Number of spatial streams the link could carry at full rank.
    pub fn full_rank(&self) -> usize {
        self.m_rx.min(self.n_tx)
    }
}

fn numerical_rank(sorted_desc: &[f64]) -> usize {
    let max = sorted_desc.first().copied().unwrap_or(0.0);
    if max <= 0.0 {
        return 0;
    }
    sorted_desc.iter().filter(|&&v| v > RANK_TOL * max).count()
}

/// Eigenvalues of the smaller of `H H^H` and `H^H H`; both share the same
/// nonzero spectrum.
pub fn eigen_spectrum(h: &ChannelMatrix) -> Result<EigenSpectrum> {
    let (m, n) = (h.rows(), h.cols());
    let gram: DMatrix<Complex64> = if m <= n {
        &h.entries * h.entries.adjoint()
    } else {
        h.entries.adjoint() * &h.entries
    };
    hermitian_spectrum(gram, m, n)
}

/// Spectrum of a Hermitian positive semidefinite matrix.
pub fn hermitian_spectrum(gram: DMatrix<Complex64>, m_rx: usize, n_tx: usize) -> Result<EigenSpectrum> {
    let trace: f64 = gram.diagonal().iter().map(|z| z.re).sum();
    let eig = gram
        .try_symmetric_eigen(EIG_EPS, EIG_MAX_ITER)
        .ok_or_else(|| Error::Computation("Hermitian eigensolver did not converge".into()))?;
    let mut spec = EigenSpectrum::from_eigenvalues(eig.eigenvalues.iter().copied().collect(), m_rx, n_tx)
        .map_err(|e| Error::Computation(e.to_string()))?;
    spec.trace = trace;
    Ok(spec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    pub bits_per_s_per_hz: f64,
    /// Power fraction per eigenvalue, in spectrum order. Empty when the
    /// channel carries nothing.
    pub per_mode_power: Vec<f64>,
    pub snr_linear: f64,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn check_snr(snr_db: f64) -> Result<f64> {
    if !snr_db.is_finite() {
        return Err(Error::InvalidParameter(format!("SNR must be finite, got {snr_db}")));
    }
    Ok(db_to_linear(snr_db))
}

/// Capacity with water-filling over eigenmodes under unit total power.
pub fn waterfill_capacity(spec: &EigenSpectrum, snr_db: f64) -> Result<CapacityResult> {
    let snr = check_snr(snr_db)?;
    let active = spec.numerical_rank;
    if active == 0 {
        return Ok(CapacityResult {
            bits_per_s_per_hz: 0.0,
            per_mode_power: Vec::new(),
            snr_linear: snr,
        });
    }
    // Inverse gains 1/(snr * lambda), ascending since values are descending.
    let inv: Vec<f64> = spec.values[..active].iter().map(|v| 1.0 / (snr * v)).collect();
    let mut k = active;
    let mut level = 0.0;
    while k > 0 {
        level = (1.0 + inv[..k].iter().sum::<f64>()) / k as f64;
        if level > inv[k - 1] {
            break;
        }
        k -= 1;
    }
    let mut powers = vec![0.0; spec.values.len()];
    for (p, i) in powers.iter_mut().zip(&inv[..k - 1]) {
        *p = level - i;
    }
    // The weakest active mode takes whatever budget is left.
    powers[k - 1] = (1.0 - powers[..k - 1].iter().sum::<f64>()).max(0.0);
    let capacity = powers
        .iter()
        .zip(&spec.values)
        .map(|(p, v)| (1.0 + snr * p * v).log2())
        .sum();
    Ok(CapacityResult {
        bits_per_s_per_hz: capacity,
        per_mode_power: powers,
        snr_linear: snr,
    })
}

/// Capacity with the total power split evenly over the `N` transmit antennas.
pub fn equal_power_capacity(spec: &EigenSpectrum, snr_db: f64) -> Result<f64> {
    let snr = check_snr(snr_db)?;
    let share = snr / spec.n_tx as f64;
    Ok(spec.values.iter().map(|v| (1.0 + share * v).log2()).sum())
}

/// Upper bound reached when all `min(M, N)` eigenvalues equal `max(M, N)`.
pub fn max_capacity(m_rx: usize, n_tx: usize, snr_db: f64) -> f64 {
    let k = m_rx.min(n_tx) as f64;
    let big = m_rx.max(n_tx) as f64;
    k * (1.0 + db_to_linear(snr_db) * big / k).log2()
}

/// `lambda_max / lambda_min`; infinite when the channel is rank deficient.
pub fn condition_number(spec: &EigenSpectrum) -> f64 {
    if spec.values.is_empty() || spec.numerical_rank < spec.values.len() {
        return f64::INFINITY;
    }
    spec.max() / spec.values[spec.numerical_rank - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_channel, Wavelength};
    use crate::geometry::{LinkGeometry, PathModel};
    use proptest::prelude::*;

    fn spec(v: &[f64]) -> EigenSpectrum {
        EigenSpectrum::from_eigenvalues(v.to_vec(), 3, 3).unwrap()
    }

    fn rank2() -> Vec<f64> {
        let r = 17f64.sqrt();
        vec![(9.0 + r) / 2.0, (9.0 - r) / 2.0, 0.0]
    }

    fn lambda28() -> Wavelength {
        Wavelength::from_frequency_hz(28e9).unwrap()
    }

    #[test]
    fn sorts_and_clips() {
        let s = EigenSpectrum::from_eigenvalues(vec![1.0, -1e-13, 4.0], 3, 3).unwrap();
        assert_eq!(s.values, vec![4.0, 1.0, 0.0]);
        assert_eq!(s.numerical_rank, 2);
        assert!(EigenSpectrum::from_eigenvalues(vec![1.0, -0.5], 2, 2).is_err());
    }

    #[test]
    fn plateau_capacities() {
        let c = waterfill_capacity(&spec(&[3.0, 3.0, 3.0]), 13.0).unwrap();
        assert!((c.bits_per_s_per_hz - 13.18).abs() < 0.02);
        let c = waterfill_capacity(&spec(&rank2()), 13.0).unwrap();
        assert!((c.bits_per_s_per_hz - 10.72).abs() < 0.02);
        // Frozen from the closed-form water level with two active modes.
        assert!((c.per_mode_power[0] - 0.5065).abs() < 1e-3);
        assert!((c.per_mode_power[1] - 0.4935).abs() < 1e-3);
        assert_eq!(c.per_mode_power[2], 0.0);
        let c = waterfill_capacity(&spec(&[9.0, 0.0, 0.0]), 13.0).unwrap();
        assert!((c.bits_per_s_per_hz - 7.50).abs() < 0.02);
        assert_eq!(c.per_mode_power, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_spectrum_has_zero_capacity() {
        let c = waterfill_capacity(&spec(&[0.0, 0.0, 0.0]), 13.0).unwrap();
        assert_eq!(c.bits_per_s_per_hz, 0.0);
        assert!(c.per_mode_power.is_empty());
        assert!(waterfill_capacity(&spec(&[1.0]), f64::NAN).is_err());
    }

    #[test]
    fn low_snr_drops_weak_modes() {
        let c = waterfill_capacity(&spec(&[8.0, 0.9, 0.1]), -10.0).unwrap();
        assert!(c.per_mode_power[0] > 0.0);
        assert_eq!(c.per_mode_power[2], 0.0);
        assert!((c.per_mode_power.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn condition_numbers() {
        assert!((condition_number(&spec(&[3.0, 3.0, 3.0])) - 1.0).abs() < 1e-15);
        assert!(condition_number(&spec(&[9.0, 0.0, 0.0])).is_infinite());
        assert!(condition_number(&spec(&rank2())).is_infinite());
        assert!((condition_number(&spec(&[4.0, 2.0, 1.0])) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn design_point_spectrum() {
        let g = LinkGeometry::broadside(3, 3, 0.5976, 50.0).unwrap();
        let h = build_channel(&g, lambda28(), PathModel::Exact).unwrap();
        let s = eigen_spectrum(&h).unwrap();
        for v in &s.values {
            assert!((v - 3.0).abs() < 0.05);
        }
        assert!((s.trace - 9.0).abs() < 1e-12);
        assert_eq!(s.numerical_rank, 3);
    }

    #[test]
    fn rank_collapse_points() {
        let d = 0.5976f64;
        let lam = lambda28().meters();
        // delta = 1: every column identical under the far-field model
        let g = LinkGeometry::broadside(3, 3, d, d * d / lam).unwrap();
        let s = eigen_spectrum(&build_channel(&g, lambda28(), PathModel::Approximate).unwrap()).unwrap();
        assert!((s.values[0] - 9.0).abs() < 1e-9);
        assert!(s.values[1] < 1e-9 && s.values[2] < 1e-9);
        assert_eq!(s.numerical_rank, 1);

        // delta = 1/2: columns 1 and 3 coincide
        let g = LinkGeometry::broadside(3, 3, d, 2.0 * d * d / lam).unwrap();
        let s = eigen_spectrum(&build_channel(&g, lambda28(), PathModel::Approximate).unwrap()).unwrap();
        let want = rank2();
        for (v, w) in s.values.iter().zip(&want) {
            assert!((v - w).abs() < 1e-9, "{:?}", s.values);
        }
        assert_eq!(s.numerical_rank, 2);
    }

    #[test]
    fn rectangular_channels_use_smaller_gram() {
        let g = LinkGeometry::broadside(2, 5, 0.3, 30.0).unwrap();
        let s = eigen_spectrum(&build_channel(&g, lambda28(), PathModel::Exact).unwrap()).unwrap();
        assert_eq!(s.values.len(), 2);
        assert!((s.values.iter().sum::<f64>() - 10.0).abs() < 1e-9);
        let g = LinkGeometry::broadside(5, 2, 0.3, 30.0).unwrap();
        let s = eigen_spectrum(&build_channel(&g, lambda28(), PathModel::Exact).unwrap()).unwrap();
        assert_eq!(s.values.len(), 2);
    }

    fn capacity_of(values: &[f64], powers: &[f64], snr: f64) -> f64 {
        values.iter().zip(powers).map(|(v, p)| (1.0 + snr * p * v).log2()).sum()
    }

    proptest! {
        #[test]
        fn waterfilling_is_locally_optimal(
            values in prop::collection::vec(0.0f64..10.0, 2..6),
            snr_db in -10.0f64..30.0,
            i in 0usize..6,
            j in 0usize..6,
        ) {
            let n = values.len();
            let s = EigenSpectrum::from_eigenvalues(values, n, n).unwrap();
            let c = waterfill_capacity(&s, snr_db).unwrap();
            prop_assume!(!c.per_mode_power.is_empty());
            let (i, j) = (i % n, j % n);
            prop_assume!(i != j);
            let step = 1e-3f64.min(c.per_mode_power[j]);
            let mut p = c.per_mode_power.clone();
            p[i] += step;
            p[j] -= step;
            let perturbed = capacity_of(&s.values, &p, c.snr_linear);
            prop_assert!(perturbed <= c.bits_per_s_per_hz + 1e-12);
        }

        #[test]
        fn waterfilling_beats_equal_power(
            values in prop::collection::vec(0.0f64..10.0, 1..6),
            snr_db in -10.0f64..30.0,
        ) {
            let n = values.len();
            let s = EigenSpectrum::from_eigenvalues(values, n, n).unwrap();
            let wf = waterfill_capacity(&s, snr_db).unwrap();
            let eq = equal_power_capacity(&s, snr_db).unwrap();
            prop_assert!(wf.bits_per_s_per_hz >= eq - 1e-12);
            if !wf.per_mode_power.is_empty() {
                prop_assert!(wf.per_mode_power.iter().all(|&p| p >= 0.0));
                prop_assert!((wf.per_mode_power.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            }
        }

        #[test]
        fn capacity_grows_with_snr(
            values in prop::collection::vec(0.0f64..10.0, 1..6),
            snr_db in -10.0f64..30.0,
            bump in 0.0f64..10.0,
        ) {
            let n = values.len();
            let s = EigenSpectrum::from_eigenvalues(values, n, n).unwrap();
            let lo = waterfill_capacity(&s, snr_db).unwrap().bits_per_s_per_hz;
            let hi = waterfill_capacity(&s, snr_db + bump).unwrap().bits_per_s_per_hz;
            prop_assert!(hi >= lo - 1e-12);
        }

        #[test]
        fn trace_is_conserved(
            n in 2usize..6, m in 2usize..6,
            d in 0.05f64..1.0, r in 5.0f64..200.0,
        ) {
            let g = LinkGeometry::broadside(n, m, d, r).unwrap();
            let s = eigen_spectrum(&build_channel(&g, lambda28(), PathModel::Exact).unwrap()).unwrap();
            let mn = (m * n) as f64;
            prop_assert!((s.values.iter().sum::<f64>() - mn).abs() < 1e-8 * mn);
        }
    }
}
