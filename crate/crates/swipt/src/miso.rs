//! K-user MISO downlink model: channels, beamformers, per-user SINR and
//! harvested energy, and the closed-form feasibility predicate.
//!
//! Conventions: the channel matrix is N-by-K with column `k` the vector from
//! the N transmit antennas to user `k`; every per-user quantity is expressed
//! through the inner products `h_k^H w_j`. A user's detector sees the signal
//! power of its own beam against the interference of all others plus the
//! equivalent baseband noise `sigma_sq`, while its harvester integrates the
//! power of all beams.

use crate::hermitian::C64;
use nalgebra::{DMatrix, DVector};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MisoError {
    #[error("channel matrix must have at least one antenna and one user")]
    EmptyChannel,
    #[error("channel entry ({row},{col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("channel matrix has no nonzero column")]
    AllColumnsZero,
    #[error("gamma[{index}] = {value} must be positive and finite")]
    InvalidGamma { index: usize, value: f64 },
    #[error("mu[{index}] = {value} must be nonnegative and finite")]
    InvalidMu { index: usize, value: f64 },
    #[error("eta = {value} must lie in (0, 1]")]
    InvalidEta { value: f64 },
    #[error("noise power {value} must be positive and finite")]
    InvalidNoise { value: f64 },
    #[error("gamma has {gammas} entries but mu has {mus}")]
    ThresholdLengthMismatch { gammas: usize, mus: usize },
    #[error("beamformer {index} has dimension {found}, expected {expected}")]
    BeamformerDimension {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("csv row {row} has {found} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("csv entry ({row},{col}) is not a complex number: {text:?}")]
    BadEntry {
        row: usize,
        col: usize,
        text: String,
    },
}

/// N-by-K complex channel matrix; column `k` serves user `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MisoChannel {
    h: DMatrix<C64>,
}

impl MisoChannel {
    pub fn new(h: DMatrix<C64>) -> Result<Self, MisoError> {
        if h.nrows() == 0 || h.ncols() == 0 {
            return Err(MisoError::EmptyChannel);
        }
        for col in 0..h.ncols() {
            for row in 0..h.nrows() {
                let z = h[(row, col)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(MisoError::NonFiniteEntry { row, col });
                }
            }
        }
        if (0..h.ncols()).all(|c| h.column(c).norm() == 0.0) {
            return Err(MisoError::AllColumnsZero);
        }
        Ok(Self { h })
    }

    pub fn n_antennas(&self) -> usize {
        self.h.nrows()
    }

    pub fn k_users(&self) -> usize {
        self.h.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.h
    }

    pub fn user_column(&self, k: usize) -> DVector<C64> {
        self.h.column(k).into_owned()
    }

    /// Numerical rank: singular values above `1e-10` of the largest.
    pub fn rank(&self) -> usize {
        let sv = self.h.clone().singular_values();
        let top = sv.iter().fold(0.0f64, |a, &s| a.max(s));
        if top == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > 1e-10 * top).count()
    }

    /// One text row per antenna, entries `re±imj` separated by commas.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in 0..self.h.nrows() {
            for col in 0..self.h.ncols() {
                if col > 0 {
                    out.push(',');
                }
                let z = self.h[(row, col)];
                let sign = if z.im.is_sign_negative() { '-' } else { '+' };
                let _ = write!(out, "{}{}{}j", z.re, sign, z.im.abs());
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, MisoError> {
        let mut rows: Vec<Vec<C64>> = Vec::new();
        for (r, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut row = Vec::new();
            for (c, entry) in line.split(',').enumerate() {
                let entry = entry.trim();
                row.push(parse_complex(entry).ok_or_else(|| MisoError::BadEntry {
                    row: r,
                    col: c,
                    text: entry.to_string(),
                })?);
            }
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(MisoError::RaggedRow {
                        row: r,
                        expected: first.len(),
                        found: row.len(),
                    });
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(MisoError::EmptyChannel);
        }
        let n = rows.len();
        let k = rows[0].len();
        Self::new(DMatrix::from_fn(n, k, |i, j| rows[i][j]))
    }
}

/// Parse `re±imj`, tolerating exponents in both parts.
fn parse_complex(s: &str) -> Option<C64> {
    let body = s.strip_suffix(['j', 'J'])?;
    let bytes = body.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        let c = bytes[idx];
        if (c == b'+' || c == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
            split = Some(idx);
            break;
        }
    }
    let idx = split?;
    let re: f64 = body[..idx].parse().ok()?;
    let im_mag: f64 = body[idx + 1..].parse().ok()?;
    let im = if bytes[idx] == b'-' { -im_mag } else { im_mag };
    Some(C64::new(re, im))
}

/// Per-user constraint thresholds and the receiver-side scalars they are
/// measured against.
#[derive(Debug, Clone, PartialEq)]
pub struct UserThresholds {
    /// Linear SINR thresholds, one per user.
    pub gamma: Vec<f64>,
    /// Harvested-power thresholds in watts, one per user.
    pub mu: Vec<f64>,
    /// Rectifier efficiency.
    pub eta: f64,
    /// Equivalent detection-path noise power.
    pub sigma_sq: f64,
    /// Antenna noise power (enters the received-sample model).
    pub sigma_a_sq: f64,
}

impl UserThresholds {
    pub fn new(
        gamma: Vec<f64>,
        mu: Vec<f64>,
        eta: f64,
        sigma_sq: f64,
        sigma_a_sq: f64,
    ) -> Result<Self, MisoError> {
        if gamma.len() != mu.len() {
            return Err(MisoError::ThresholdLengthMismatch {
                gammas: gamma.len(),
                mus: mu.len(),
            });
        }
        for (index, &value) in gamma.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(MisoError::InvalidGamma { index, value });
            }
        }
        for (index, &value) in mu.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(MisoError::InvalidMu { index, value });
            }
        }
        if !(eta.is_finite() && eta > 0.0 && eta <= 1.0) {
            return Err(MisoError::InvalidEta { value: eta });
        }
        if !(sigma_sq.is_finite() && sigma_sq > 0.0) {
            return Err(MisoError::InvalidNoise { value: sigma_sq });
        }
        if !(sigma_a_sq.is_finite() && sigma_a_sq >= 0.0) {
            return Err(MisoError::InvalidNoise { value: sigma_a_sq });
        }
        Ok(Self {
            gamma,
            mu,
            eta,
            sigma_sq,
            sigma_a_sq,
        })
    }

    /// Build from link-level noise parameters: the detection path sees the
    /// antenna noise plus twice the conversion noise.
    pub fn from_link_noise(
        gamma: Vec<f64>,
        mu: Vec<f64>,
        eta: f64,
        sigma_a_sq: f64,
        sigma_cov_sq: f64,
    ) -> Result<Self, MisoError> {
        let sigma_sq = sigma_a_sq + 2.0 * sigma_cov_sq;
        Self::new(gamma, mu, eta, sigma_sq, sigma_a_sq)
    }

    pub fn k_users(&self) -> usize {
        self.gamma.len()
    }

    /// Equivalent harvested-power bounds on the beam domain: `2 mu_k / eta`.
    pub fn derive_xi(&self) -> Vec<f64> {
        self.mu.iter().map(|&m| 2.0 * m / self.eta).collect()
    }
}

/// One beamforming vector per user.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerSet {
    w: Vec<DVector<C64>>,
}

impl BeamformerSet {
    pub fn new(w: Vec<DVector<C64>>) -> Result<Self, MisoError> {
        if w.is_empty() {
            return Err(MisoError::EmptyChannel);
        }
        let expected = w[0].len();
        for (index, v) in w.iter().enumerate() {
            if v.len() != expected {
                return Err(MisoError::BeamformerDimension {
                    index,
                    expected,
                    found: v.len(),
                });
            }
        }
        Ok(Self { w })
    }

    pub fn vectors(&self) -> &[DVector<C64>] {
        &self.w
    }

    pub fn k_users(&self) -> usize {
        self.w.len()
    }

    pub fn dimension(&self) -> usize {
        self.w[0].len()
    }

    /// Total transmit power: sum of squared beamformer norms.
    pub fn total_power(&self) -> f64 {
        self.w.iter().map(|v| v.norm_squared()).sum()
    }
}

/// `|h_k^H w_k|^2 / (sum_{j != k} |h_k^H w_j|^2 + sigma_sq)`.
pub fn sinr(ch: &MisoChannel, w: &BeamformerSet, th: &UserThresholds, k: usize) -> f64 {
    assert!(k < ch.k_users(), "user index {k} out of range");
    assert_eq!(ch.k_users(), w.k_users(), "beamformer count mismatch");
    assert_eq!(ch.n_antennas(), w.dimension(), "beamformer dimension mismatch");
    let h_k = ch.h.column(k);
    let mut interference = 0.0;
    let mut signal = 0.0;
    for (j, v) in w.w.iter().enumerate() {
        let gain = h_k.dotc(v).norm_sqr();
        if j == k {
            signal = gain;
        } else {
            interference += gain;
        }
    }
    signal / (interference + th.sigma_sq)
}

/// Harvested power at user `k`: `(eta / 2) sum_j |h_k^H w_j|^2`.
pub fn harvested(ch: &MisoChannel, w: &BeamformerSet, th: &UserThresholds, k: usize) -> f64 {
    assert!(k < ch.k_users(), "user index {k} out of range");
    assert_eq!(ch.k_users(), w.k_users(), "beamformer count mismatch");
    assert_eq!(ch.n_antennas(), w.dimension(), "beamformer dimension mismatch");
    let h_k = ch.h.column(k);
    let total: f64 = w.w.iter().map(|v| h_k.dotc(v).norm_sqr()).sum();
    0.5 * th.eta * total
}

/// One received symbol at user `k`: `h_k^H (sum_m w_m s_m) + noise`.
pub fn received_sample(
    ch: &MisoChannel,
    w: &BeamformerSet,
    symbols: &[C64],
    noise: C64,
    k: usize,
) -> C64 {
    assert!(k < ch.k_users(), "user index {k} out of range");
    assert_eq!(symbols.len(), w.k_users(), "one symbol per user expected");
    assert_eq!(ch.n_antennas(), w.dimension(), "beamformer dimension mismatch");
    let h_k = ch.h.column(k);
    let mut acc = C64::new(0.0, 0.0);
    for (v, &s) in w.w.iter().zip(symbols) {
        acc += h_k.dotc(v) * s;
    }
    acc + noise
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// `sum_k gamma_k / (gamma_k + 1)`.
    pub threshold_sum: f64,
    /// Numerical rank of the channel matrix.
    pub rank: usize,
}

/// SINR feasibility: the thresholds are jointly attainable at some finite
/// power iff `sum_k gamma_k / (gamma_k + 1)` does not exceed the channel
/// rank. Harvest thresholds never decide feasibility: any feasible beam set
/// can be amplified until every harvester is satisfied.
pub fn feasibility_test(ch: &MisoChannel, th: &UserThresholds) -> FeasibilityReport {
    let threshold_sum: f64 = th.gamma.iter().map(|&g| g / (g + 1.0)).sum();
    let rank = ch.rank();
    FeasibilityReport {
        feasible: threshold_sum <= rank as f64,
        threshold_sum,
        rank,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::complex_gaussian;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn channel_from_cols(cols: &[Vec<C64>]) -> MisoChannel {
        let n = cols[0].len();
        let k = cols.len();
        MisoChannel::new(DMatrix::from_fn(n, k, |i, j| cols[j][i])).unwrap()
    }

    fn random_channel(n: usize, k: usize, rng: &mut ChaCha8Rng) -> MisoChannel {
        MisoChannel::new(DMatrix::from_fn(n, k, |_, _| complex_gaussian(rng, 1.0))).unwrap()
    }

    fn random_beams(n: usize, k: usize, rng: &mut ChaCha8Rng) -> BeamformerSet {
        BeamformerSet::new(
            (0..k)
                .map(|_| DVector::from_fn(n, |_, _| complex_gaussian(rng, 1.0)))
                .collect(),
        )
        .unwrap()
    }

    fn thresholds(k: usize, sigma_sq: f64, sigma_a_sq: f64) -> UserThresholds {
        UserThresholds::new(vec![1.0; k], vec![0.0; k], 1.0, sigma_sq, sigma_a_sq).unwrap()
    }

    #[test]
    fn single_user_sinr_without_interference() {
        let ch = channel_from_cols(&[vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        let w = BeamformerSet::new(vec![DVector::from_vec(vec![c(2.0, 0.0), c(0.0, 0.0)])]).unwrap();
        let th = thresholds(1, 1.0, 1.0);
        assert!((sinr(&ch, &w, &th, 0) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn equal_beams_halve_the_ratio() {
        let ch = channel_from_cols(&[
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ]);
        let beam = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let w = BeamformerSet::new(vec![beam.clone(), beam]).unwrap();
        let th = thresholds(2, 1.0, 1.0);
        assert!((sinr(&ch, &w, &th, 0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn harvested_scales_linearly_with_eta() {
        let ch = channel_from_cols(&[vec![c(1.0, 0.0)]]);
        let w = BeamformerSet::new(vec![DVector::from_vec(vec![c(2.0, 0.0)])]).unwrap();
        let full = UserThresholds::new(vec![1.0], vec![0.0], 1.0, 1.0, 1.0).unwrap();
        let half = UserThresholds::new(vec![1.0], vec![0.0], 0.5, 1.0, 1.0).unwrap();
        assert!((harvested(&ch, &w, &full, 0) - 2.0).abs() < 1e-12);
        assert!((harvested(&ch, &w, &half, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn received_sample_degenerate_cases() {
        let ch = channel_from_cols(&[vec![c(1.0, 0.0)]]);
        let zero = BeamformerSet::new(vec![DVector::from_vec(vec![c(0.0, 0.0)])]).unwrap();
        let z = c(0.3, -0.7);
        assert_eq!(received_sample(&ch, &zero, &[c(1.0, 0.0)], z, 0), z);

        let unit = BeamformerSet::new(vec![DVector::from_vec(vec![c(1.0, 0.0)])]).unwrap();
        let y = received_sample(&ch, &unit, &[c(1.0, 0.0)], c(0.0, 0.0), 0);
        assert!((y - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn received_sample_second_moment_matches_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let n = 4;
        let k = 4;
        let ch = random_channel(n, k, &mut rng);
        let w = random_beams(n, k, &mut rng);
        let sigma_a_sq = 0.3;
        let draws = 100_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            let symbols: Vec<C64> = (0..k).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
            let noise = complex_gaussian(&mut rng, sigma_a_sq);
            acc += received_sample(&ch, &w, &symbols, noise, 0).norm_sqr();
        }
        let measured = acc / draws as f64;
        let h0 = ch.user_column(0);
        let expected: f64 = w.vectors().iter().map(|v| h0.dotc(v).norm_sqr()).sum::<f64>() + sigma_a_sq;
        let rel = (measured - expected).abs() / expected;
        assert!(rel < 0.03, "measured {measured}, expected {expected}");
    }

    #[test]
    fn sinr_matches_symbol_level_estimate() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let n = 4;
        let k = 4;
        let ch = random_channel(n, k, &mut rng);
        let w = random_beams(n, k, &mut rng);
        // Matched-noise comparison: the detector noise equals the sample noise.
        let sigma_sq = 0.5;
        let th = thresholds(k, sigma_sq, sigma_sq);
        let draws = 100_000;
        let h0 = ch.user_column(0);
        let own_gain = h0.dotc(&w.vectors()[0]);
        let mut signal_acc = 0.0;
        let mut rest_acc = 0.0;
        for _ in 0..draws {
            let symbols: Vec<C64> = (0..k).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
            let noise = complex_gaussian(&mut rng, sigma_sq);
            let y = received_sample(&ch, &w, &symbols, noise, 0);
            let signal = own_gain * symbols[0];
            signal_acc += signal.norm_sqr();
            rest_acc += (y - signal).norm_sqr();
        }
        let estimate = signal_acc / rest_acc;
        let exact = sinr(&ch, &w, &th, 0);
        let rel = (estimate - exact).abs() / exact;
        assert!(rel < 0.03, "estimate {estimate}, exact {exact}");
    }

    #[test]
    fn feasibility_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let ch = random_channel(4, 4, &mut rng);
        let th = thresholds(4, 1.0, 1.0);
        let report = feasibility_test(&ch, &th);
        assert!(report.feasible);
        assert_eq!(report.rank, 4);
        assert!((report.threshold_sum - 2.0).abs() < 1e-12);

        // Identical columns collapse the rank to one.
        let col: Vec<C64> = (0..4).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
        let rank_one = channel_from_cols(&[col.clone(), col.clone(), col.clone(), col]);
        let report = feasibility_test(&rank_one, &th);
        assert!(!report.feasible);
        assert_eq!(report.rank, 1);

        // Boundary: huge thresholds sum to just under the rank.
        let ch2 = random_channel(2, 2, &mut rng);
        let th2 = UserThresholds::new(vec![1e6, 1e6], vec![0.0, 0.0], 1.0, 1.0, 1.0).unwrap();
        let report = feasibility_test(&ch2, &th2);
        assert!(report.feasible);
        assert!(report.threshold_sum < 2.0);
    }

    #[test]
    fn achieved_sinrs_always_pass_the_predicate() {
        // Whatever SINRs a beam set actually achieves must be declared
        // feasible; this is the one-sided soundness of the rank bound.
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..50 {
            let n = rng.gen_range(1..=5);
            let k = rng.gen_range(1..=5);
            let ch = random_channel(n, k, &mut rng);
            let w = random_beams(n, k, &mut rng);
            let sigma_sq = rng.gen_range(0.1..2.0);
            let probe = thresholds(k, sigma_sq, sigma_sq);
            let achieved: Vec<f64> = (0..k).map(|u| sinr(&ch, &w, &probe, u).max(1e-12)).collect();
            let th = UserThresholds::new(achieved, vec![0.0; k], 1.0, sigma_sq, sigma_sq).unwrap();
            let report = feasibility_test(&ch, &th);
            assert!(
                report.feasible,
                "achieved SINRs rejected: sum {} rank {}",
                report.threshold_sum, report.rank
            );
        }
    }

    #[test]
    fn rotation_invariance_of_sinr_and_harvest() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let n = 4;
        let k = 3;
        let ch = random_channel(n, k, &mut rng);
        let w = random_beams(n, k, &mut rng);
        let th = thresholds(k, 0.7, 0.7);
        // Unitary factor of a random complex matrix.
        let raw = DMatrix::from_fn(n, n, |_, _| complex_gaussian(&mut rng, 1.0));
        let q = raw.qr().q();
        let ch_rot = MisoChannel::new(&q * ch.matrix()).unwrap();
        let w_rot = BeamformerSet::new(w.vectors().iter().map(|v| &q * v).collect()).unwrap();
        for u in 0..k {
            let a = sinr(&ch, &w, &th, u);
            let b = sinr(&ch_rot, &w_rot, &th, u);
            assert!((a - b).abs() <= 1e-10 * (1.0 + a), "sinr {a} vs {b}");
            let qa = harvested(&ch, &w, &th, u);
            let qb = harvested(&ch_rot, &w_rot, &th, u);
            assert!((qa - qb).abs() <= 1e-10 * (1.0 + qa), "harvest {qa} vs {qb}");
        }
    }

    #[test]
    fn beam_scaling_is_quadratic() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let ch = random_channel(3, 2, &mut rng);
        let w = random_beams(3, 2, &mut rng);
        let th = thresholds(2, 1.0, 1.0);
        let t = 1.7;
        let scaled =
            BeamformerSet::new(w.vectors().iter().map(|v| v * C64::new(t, 0.0)).collect()).unwrap();
        assert!(
            (scaled.total_power() - t * t * w.total_power()).abs()
                <= 1e-12 * (1.0 + w.total_power())
        );
        for u in 0..2 {
            let ratio = harvested(&ch, &scaled, &th, u) / harvested(&ch, &w, &th, u);
            assert!((ratio - t * t).abs() < 1e-10);
        }
    }

    #[test]
    fn total_power_examples() {
        let zero = BeamformerSet::new(vec![DVector::from_vec(vec![c(0.0, 0.0)])]).unwrap();
        assert_eq!(zero.total_power(), 0.0);
        let w = BeamformerSet::new(vec![DVector::from_vec(vec![c(3.0, 0.0), c(4.0, 0.0)])]).unwrap();
        assert!((w.total_power() - 25.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let random = random_beams(3, 2, &mut rng);
        let brute: f64 = random
            .vectors()
            .iter()
            .flat_map(|v| v.iter())
            .map(|z| z.re * z.re + z.im * z.im)
            .sum();
        assert!((random.total_power() - brute).abs() <= 1e-12 * (1.0 + brute));
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let ch = random_channel(3, 4, &mut rng);
        let text = ch.to_csv();
        let back = MisoChannel::from_csv(&text).unwrap();
        assert_eq!(ch, back);
    }

    #[test]
    fn csv_parses_signs_and_exponents() {
        let text = "1+0j,-1.5e-3-2.25j\n0+1j,3.25-0.5j\n";
        let ch = MisoChannel::from_csv(text).unwrap();
        assert_eq!(ch.matrix()[(0, 0)], c(1.0, 0.0));
        assert_eq!(ch.matrix()[(0, 1)], c(-1.5e-3, -2.25));
        assert_eq!(ch.matrix()[(1, 0)], c(0.0, 1.0));
        assert_eq!(ch.matrix()[(1, 1)], c(3.25, -0.5));
    }

    #[test]
    fn csv_rejects_garbage() {
        assert!(matches!(
            MisoChannel::from_csv("1+0j,oops\n"),
            Err(MisoError::BadEntry { .. })
        ));
        assert!(matches!(
            MisoChannel::from_csv("1+0j,2+0j\n1+0j\n"),
            Err(MisoError::RaggedRow { .. })
        ));
        assert!(matches!(
            MisoChannel::from_csv(""),
            Err(MisoError::EmptyChannel)
        ));
    }

    #[test]
    fn validation_rejects_bad_thresholds() {
        assert!(matches!(
            UserThresholds::new(vec![0.0], vec![0.0], 1.0, 1.0, 1.0),
            Err(MisoError::InvalidGamma { .. })
        ));
        assert!(matches!(
            UserThresholds::new(vec![1.0], vec![-0.5], 1.0, 1.0, 1.0),
            Err(MisoError::InvalidMu { .. })
        ));
        assert!(matches!(
            UserThresholds::new(vec![1.0], vec![0.0], 1.5, 1.0, 1.0),
            Err(MisoError::InvalidEta { .. })
        ));
        assert!(matches!(
            UserThresholds::new(vec![1.0], vec![0.0], 1.0, 0.0, 1.0),
            Err(MisoError::InvalidNoise { .. })
        ));
        assert!(matches!(
            UserThresholds::new(vec![1.0, 2.0], vec![0.0], 1.0, 1.0, 1.0),
            Err(MisoError::ThresholdLengthMismatch { .. })
        ));
    }

    #[test]
    fn link_noise_combines_conversion_noise_twice() {
        let th = UserThresholds::from_link_noise(vec![1.0], vec![0.0], 1.0, 1e-10, 1e-8).unwrap();
        assert!((th.sigma_sq - 2.01e-8).abs() < 1e-20);
        let xi = UserThresholds::new(vec![1.0], vec![3.0], 0.5, 1.0, 1.0)
            .unwrap()
            .derive_xi();
        assert!((xi[0] - 12.0).abs() < 1e-12);
    }
}
