//! Monte-Carlo experiment layer: random channel ensembles and threshold
//! sweeps over the beamforming optimizer.
//!
//! A sweep varies one constraint axis (the harvest floor xi or the SINR
//! floor gamma) while the other stays fixed, reusing one common set of
//! channel realizations across every sweep point so curves are comparable
//! point to point.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beamform::{optimize, OptimizeError, OptimizeOptions};
use crate::miso::{MisoChannel, MisoError, UserThresholds};
use crate::random::complex_gaussian;
use crate::units::{db_to_linear, dbm_to_watts, watts_to_dbm};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("antenna count must be at least one")]
    NoAntennas,
    #[error("user count must be at least one")]
    NoUsers,
    #[error("trials must be at least one")]
    NoTrials,
    #[error("field {0} is not finite")]
    NonFiniteField(&'static str),
    #[error("rectifier coefficient must lie in (0, 1], got {0}")]
    RectifierOutOfRange(f64),
    #[error("sweep needs at least one value")]
    EmptySweep,
    #[error("sweep values must be strictly increasing and finite")]
    UnsortedSweep,
    #[error("sweep value {0} is out of range for the swept parameter")]
    SweepValueOutOfRange(f64),
    #[error("fixed parameter value {0} is out of range")]
    FixedValueOutOfRange(f64),
    #[error(transparent)]
    Model(#[from] MisoError),
    #[error("trial optimization failed: {0}")]
    Optimize(#[from] OptimizeError),
}

/// Which constraint axis a sweep moves along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    /// Harvest floor xi = 2 mu / eta, in watts.
    Xi,
    /// SINR floor gamma, linear.
    Gamma,
}

/// Sweep axis description: the moving parameter, its values in linear units,
/// and the value the other parameter is held at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub fixed: f64,
}

/// Full experiment description, loadable from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_antennas: usize,
    pub k_users: usize,
    /// Per-entry channel pathloss (dB); -40 means average gain 1e-4.
    pub pathloss_db: f64,
    /// Antenna noise power (dBm).
    pub sigma_a_dbm: f64,
    /// Conversion noise power (dBm).
    pub sigma_cov_dbm: f64,
    /// Rectifier coefficient, in (0, 1].
    pub eta: f64,
    pub seed: u64,
    /// Channel realizations averaged per sweep point.
    pub trials: usize,
    pub sweep: SweepSpec,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.n_antennas == 0 {
            return Err(ExperimentError::NoAntennas);
        }
        if self.k_users == 0 {
            return Err(ExperimentError::NoUsers);
        }
        if self.trials == 0 {
            return Err(ExperimentError::NoTrials);
        }
        for (value, name) in [
            (self.pathloss_db, "pathloss_db"),
            (self.sigma_a_dbm, "sigma_a_dbm"),
            (self.sigma_cov_dbm, "sigma_cov_dbm"),
            (self.eta, "eta"),
            (self.sweep.fixed, "sweep.fixed"),
        ] {
            if !value.is_finite() {
                return Err(ExperimentError::NonFiniteField(name));
            }
        }
        if self.eta <= 0.0 || self.eta > 1.0 {
            return Err(ExperimentError::RectifierOutOfRange(self.eta));
        }
        if self.sweep.values.is_empty() {
            return Err(ExperimentError::EmptySweep);
        }
        if self.sweep.values.iter().any(|v| !v.is_finite())
            || self.sweep.values.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(ExperimentError::UnsortedSweep);
        }
        // Gamma must be positive wherever it appears; xi only nonnegative.
        let (gamma_floor, xi_floor) = (0.0, -0.0);
        match self.sweep.parameter {
            SweepParameter::Xi => {
                if self.sweep.values[0] < xi_floor {
                    return Err(ExperimentError::SweepValueOutOfRange(self.sweep.values[0]));
                }
                if self.sweep.fixed <= gamma_floor {
                    return Err(ExperimentError::FixedValueOutOfRange(self.sweep.fixed));
                }
            }
            SweepParameter::Gamma => {
                if self.sweep.values[0] <= gamma_floor {
                    return Err(ExperimentError::SweepValueOutOfRange(self.sweep.values[0]));
                }
                if self.sweep.fixed < xi_floor {
                    return Err(ExperimentError::FixedValueOutOfRange(self.sweep.fixed));
                }
            }
        }
        Ok(())
    }

    /// Antenna noise power in watts.
    pub fn sigma_a_sq(&self) -> f64 {
        dbm_to_watts(self.sigma_a_dbm)
    }

    /// Conversion noise power in watts.
    pub fn sigma_cov_sq(&self) -> f64 {
        dbm_to_watts(self.sigma_cov_dbm)
    }

    /// Per-user thresholds at one position of the swept parameter.
    pub fn thresholds_at(&self, sweep_value: f64) -> Result<UserThresholds, ExperimentError> {
        let (gamma, xi) = match self.sweep.parameter {
            SweepParameter::Xi => (self.sweep.fixed, sweep_value),
            SweepParameter::Gamma => (sweep_value, self.sweep.fixed),
        };
        let mu = self.eta * xi / 2.0;
        Ok(UserThresholds::from_link_noise(
            vec![gamma; self.k_users],
            vec![mu; self.k_users],
            self.eta,
            self.sigma_a_sq(),
            self.sigma_cov_sq(),
        )?)
    }
}

/// Draws the experiment's channel ensemble: `trials` matrices with i.i.d.
/// circular complex Gaussian entries of variance 10^(pathloss_db / 10).
/// Deterministic for a given seed.
pub fn generate_channels(cfg: &ExperimentConfig, seed: u64) -> Vec<MisoChannel> {
    let variance = db_to_linear(cfg.pathloss_db);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cfg.trials)
        .map(|_| {
            let h = DMatrix::from_fn(cfg.n_antennas, cfg.k_users, |_, _| {
                complex_gaussian(&mut rng, variance)
            });
            MisoChannel::new(h).expect("nonzero Gaussian draws form a valid channel")
        })
        .collect()
}

/// SplitMix finalizer; spreads structured seed inputs over the whole range.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-trial seed from the master seed and grid position, so
/// trials can run in any order or in parallel without changing results.
pub fn trial_seed(master: u64, point: usize, trial: usize) -> u64 {
    mix64(mix64(mix64(master) ^ point as u64) ^ trial as u64)
}

/// One aggregated sweep point. Power fields are absent when every trial at
/// the point was infeasible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub mean_power_w: Option<f64>,
    pub mean_power_dbm: Option<f64>,
    pub feasible_rate: f64,
    pub rank1_rate: f64,
    pub mean_gap: Option<f64>,
}

/// Runs the whole sweep: every sweep value sees the same channel set, drawn
/// once from the master seed. Infeasible trials count toward the rates but
/// never enter the power mean.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, ExperimentError> {
    cfg.validate()?;
    let channels = generate_channels(cfg, cfg.seed);
    let mut rows = Vec::with_capacity(cfg.sweep.values.len());
    for (point, &sweep_value) in cfg.sweep.values.iter().enumerate() {
        let thresholds = cfg.thresholds_at(sweep_value)?;
        let mut feasible = 0usize;
        let mut rank_one = 0usize;
        let mut power_sum = 0.0;
        let mut gap_sum = 0.0;
        for (trial, channel) in channels.iter().enumerate() {
            let options = OptimizeOptions {
                seed: trial_seed(cfg.seed, point, trial),
                ..OptimizeOptions::default()
            };
            match optimize(channel, &thresholds, &options) {
                Ok(solution) => {
                    feasible += 1;
                    if solution.all_rank_one() {
                        rank_one += 1;
                    }
                    power_sum += solution.total_power;
                    gap_sum += solution.gap;
                }
                Err(
                    OptimizeError::InfeasibleThresholds { .. }
                    | OptimizeError::InfeasibleCertified
                    | OptimizeError::UnsatisfiableHarvest { .. },
                ) => {}
                Err(other) => return Err(other.into()),
            }
        }
        let mean_power_w = (feasible > 0).then(|| power_sum / feasible as f64);
        rows.push(ResultRow {
            sweep_value,
            mean_power_w,
            mean_power_dbm: mean_power_w.map(watts_to_dbm),
            feasible_rate: feasible as f64 / cfg.trials as f64,
            rank1_rate: rank_one as f64 / cfg.trials as f64,
            mean_gap: (feasible > 0).then(|| gap_sum / feasible as f64),
        });
    }
    Ok(rows)
}

/// Sweep results as CSV with a fixed header; absent powers leave their
/// fields empty.
pub fn sweep_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from("sweep_value,mean_power_w,mean_power_dbm,feasible_rate,rank1_rate,mean_gap\n");
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.sweep_value,
            opt(row.mean_power_w),
            opt(row.mean_power_dbm),
            row.feasible_rate,
            row.rank1_rate,
            opt(row.mean_gap),
        ));
    }
    out
}

/// Sweep results as a JSON array mirroring the CSV columns; absent powers
/// serialize as null.
pub fn sweep_json(rows: &[ResultRow]) -> serde_json::Value {
    serde_json::json!(rows)
}
