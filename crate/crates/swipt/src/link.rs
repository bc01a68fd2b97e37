//! Single-antenna link simulation and the diplexer receiver chain.
//!
//! The transmitter upconverts a unit-power complex message onto a carrier.
//! The receiver mixes the incoming bandpass waveform with both local
//! oscillator phases, splits each mixer output into its baseband and
//! doubling-frequency parts with a diplexer, and then uses the baseband sum
//! for information decoding while the doubling-frequency sum is rectified for
//! energy harvesting. Every stage works on explicitly sampled waveforms so
//! the closed-form power identities can be checked against time averages.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hermitian::C64;
use crate::random::complex_gaussian;

/// Carrier-grid oversampling: samples per carrier cycle for synthesized
/// waveforms. Sixteen times the doubling frequency, comfortably above the
/// factor-eight floor the traces need.
pub const SAMPLES_PER_CARRIER_CYCLE: usize = 32;

/// Largest accepted deviation of the empirical message power from one.
pub const MESSAGE_POWER_TOL: f64 = 0.1;

#[derive(Debug, Error)]
pub enum LinkError {
    #[error("average transmit power must be positive, got {0}")]
    NonPositiveAveragePower(f64),
    #[error("channel power gain must be positive, got {0}")]
    NonPositiveGain(f64),
    #[error("antenna noise power must be nonnegative, got {0}")]
    NegativeAntennaNoise(f64),
    #[error("conversion noise power must be nonnegative, got {0}")]
    NegativeConversionNoise(f64),
    #[error("rectifier coefficient must lie in (0, 1], got {0}")]
    RectifierOutOfRange(f64),
    #[error("channel phase must lie in [0, 2*pi), got {0}")]
    PhaseOutOfRange(f64),
    #[error("message bandwidth must be positive, got {0}")]
    NonPositiveBandwidth(f64),
    #[error("carrier {f_c} below ten times the message bandwidth {bandwidth_b}")]
    CarrierTooLow { f_c: f64, bandwidth_b: f64 },
    #[error("configuration field {0} is not finite")]
    NonFiniteField(&'static str),
    #[error("message has no samples")]
    EmptyMessage,
    #[error("waveform contains a non-finite sample")]
    NonFiniteSample,
    #[error("sample rate must be positive, got {0}")]
    NonPositiveRate(f64),
    #[error("symbol rate {symbol_rate} exceeds sample rate {sample_rate}")]
    SymbolRateTooHigh { symbol_rate: f64, sample_rate: f64 },
    #[error("mean squared message amplitude {mean_square} deviates from one beyond {MESSAGE_POWER_TOL}")]
    UnnormalizedMessage { mean_square: f64 },
    #[error("carrier grid rate {carrier_rate} is not an integer multiple of the message rate {message_rate}")]
    GridMismatch { carrier_rate: f64, message_rate: f64 },
    #[error("waveform rate {rate} cannot represent doubling-frequency content, need at least {required}")]
    RateTooLow { rate: f64, required: f64 },
    #[error("sample rates differ: {left} vs {right}")]
    RateMismatch { left: f64, right: f64 },
    #[error("trace lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("crossover {crossover} must lie strictly between {low} and {high}")]
    BadCrossover { crossover: f64, low: f64, high: f64 },
    #[error("window of {samples} samples covers fewer than {required_symbols} symbol periods")]
    WindowTooShort { samples: usize, required_symbols: usize },
    #[error("window of {samples} samples is not an integer number of carrier cycles")]
    FractionalCarrierCycles { samples: usize },
    #[error("trace carries no power")]
    DegenerateTrace,
}

/// Parameters of the single-antenna link: transmit power, carrier, channel
/// gain and phase, the two receiver noise powers, and the rectifier
/// coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    /// Average transmit power (W).
    pub p_avg: f64,
    /// Carrier frequency (Hz; normalized units work too).
    pub f_c: f64,
    /// Message bandwidth, equal to the symbol rate of the default messages (Hz).
    pub bandwidth_b: f64,
    /// Channel power gain, dimensionless.
    pub a_gain: f64,
    /// Channel phase shift (rad, in [0, 2*pi)).
    pub phi: f64,
    /// Antenna noise power (W).
    pub sigma_a_sq: f64,
    /// Passband-to-baseband conversion noise power on the decoding path (W).
    pub sigma_cov_sq: f64,
    /// Rectifier coefficient, in (0, 1].
    pub eta: f64,
}

impl LinkConfig {
    pub fn validate(&self) -> Result<(), LinkError> {
        let fields = [
            (self.p_avg, "p_avg"),
            (self.f_c, "f_c"),
            (self.bandwidth_b, "bandwidth_b"),
            (self.a_gain, "a_gain"),
            (self.phi, "phi"),
            (self.sigma_a_sq, "sigma_a_sq"),
            (self.sigma_cov_sq, "sigma_cov_sq"),
            (self.eta, "eta"),
        ];
        for (value, name) in fields {
            if !value.is_finite() {
                return Err(LinkError::NonFiniteField(name));
            }
        }
        if self.p_avg <= 0.0 {
            return Err(LinkError::NonPositiveAveragePower(self.p_avg));
        }
        if self.a_gain <= 0.0 {
            return Err(LinkError::NonPositiveGain(self.a_gain));
        }
        if self.sigma_a_sq < 0.0 {
            return Err(LinkError::NegativeAntennaNoise(self.sigma_a_sq));
        }
        if self.sigma_cov_sq < 0.0 {
            return Err(LinkError::NegativeConversionNoise(self.sigma_cov_sq));
        }
        if self.eta <= 0.0 || self.eta > 1.0 {
            return Err(LinkError::RectifierOutOfRange(self.eta));
        }
        if !(0.0..TAU).contains(&self.phi) {
            return Err(LinkError::PhaseOutOfRange(self.phi));
        }
        if self.bandwidth_b <= 0.0 {
            return Err(LinkError::NonPositiveBandwidth(self.bandwidth_b));
        }
        if self.f_c < 10.0 * self.bandwidth_b {
            return Err(LinkError::CarrierTooLow {
                f_c: self.f_c,
                bandwidth_b: self.bandwidth_b,
            });
        }
        Ok(())
    }

    /// Sample rate of every synthesized carrier-grid waveform.
    pub fn carrier_sample_rate(&self) -> f64 {
        SAMPLES_PER_CARRIER_CYCLE as f64 * self.f_c
    }

    /// Equivalent decoding-path noise power: antenna noise plus twice the
    /// conversion noise.
    pub fn id_noise_power(&self) -> f64 {
        self.sigma_a_sq + 2.0 * self.sigma_cov_sq
    }
}

/// Complex baseband message m(t) = a(t) e^{j b(t)} with unit mean square
/// amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct BasebandMessage {
    samples: Vec<C64>,
    sample_rate: f64,
    symbol_rate: f64,
}

impl BasebandMessage {
    pub fn new(samples: Vec<C64>, sample_rate: f64, symbol_rate: f64) -> Result<Self, LinkError> {
        if samples.is_empty() {
            return Err(LinkError::EmptyMessage);
        }
        if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(LinkError::NonFiniteSample);
        }
        if !(sample_rate > 0.0) {
            return Err(LinkError::NonPositiveRate(sample_rate));
        }
        if !(symbol_rate > 0.0) {
            return Err(LinkError::NonPositiveRate(symbol_rate));
        }
        if symbol_rate > sample_rate {
            return Err(LinkError::SymbolRateTooHigh {
                symbol_rate,
                sample_rate,
            });
        }
        let mean_square =
            samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / samples.len() as f64;
        if (mean_square - 1.0).abs() > MESSAGE_POWER_TOL {
            return Err(LinkError::UnnormalizedMessage { mean_square });
        }
        Ok(Self {
            samples,
            sample_rate,
            symbol_rate,
        })
    }

    /// Random four-phase symbols from {1, j, -1, -j}: exactly unit power,
    /// one sample per symbol.
    pub fn qpsk(n_symbols: usize, symbol_rate: f64, seed: u64) -> Result<Self, LinkError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alphabet = [
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, -1.0),
        ];
        let samples = (0..n_symbols)
            .map(|_| alphabet[rng.gen_range(0..4)])
            .collect();
        Self::new(samples, symbol_rate, symbol_rate)
    }

    /// Random square sixteen-point constellation, rescaled so the drawn
    /// sequence has exactly unit mean square amplitude.
    pub fn qam16(n_symbols: usize, symbol_rate: f64, seed: u64) -> Result<Self, LinkError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let levels = [-3.0, -1.0, 1.0, 3.0];
        let mut samples: Vec<C64> = (0..n_symbols)
            .map(|_| {
                C64::new(levels[rng.gen_range(0..4)], levels[rng.gen_range(0..4)]) / 10f64.sqrt()
            })
            .collect();
        let mean_square =
            samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / n_symbols.max(1) as f64;
        if mean_square > 0.0 {
            let scale = mean_square.sqrt().recip();
            for s in &mut samples {
                *s *= scale;
            }
        }
        Self::new(samples, symbol_rate, symbol_rate)
    }

    /// Repeats one symbol; it must have unit amplitude to keep the message
    /// normalized.
    pub fn constant(symbol: C64, n_symbols: usize, symbol_rate: f64) -> Result<Self, LinkError> {
        Self::new(vec![symbol; n_symbols], symbol_rate, symbol_rate)
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn symbol_rate(&self) -> f64 {
        self.symbol_rate
    }

    pub fn mean_square_amplitude(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }
}

/// Real waveform sampled uniformly from t = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformTrace {
    samples: Vec<f64>,
    sample_rate: f64,
}

impl WaveformTrace {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self, LinkError> {
        if samples.is_empty() {
            return Err(LinkError::EmptyMessage);
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(LinkError::NonFiniteSample);
        }
        if !(sample_rate > 0.0) {
            return Err(LinkError::NonPositiveRate(sample_rate));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time-averaged squared amplitude over the whole trace.
    pub fn power(&self) -> f64 {
        self.samples.iter().map(|s| s * s).sum::<f64>() / self.samples.len() as f64
    }
}

fn same_grid(a: &WaveformTrace, b: &WaveformTrace) -> Result<(), LinkError> {
    if a.sample_rate != b.sample_rate {
        return Err(LinkError::RateMismatch {
            left: a.sample_rate,
            right: b.sample_rate,
        });
    }
    if a.len() != b.len() {
        return Err(LinkError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// Number of carrier-grid samples each message sample is held for.
fn hold_factor(cfg: &LinkConfig, msg: &BasebandMessage) -> Result<usize, LinkError> {
    let ratio = cfg.carrier_sample_rate() / msg.sample_rate();
    let rounded = ratio.round();
    if rounded < 1.0 || (ratio - rounded).abs() > 1e-6 * ratio {
        return Err(LinkError::GridMismatch {
            carrier_rate: cfg.carrier_sample_rate(),
            message_rate: msg.sample_rate(),
        });
    }
    Ok(rounded as usize)
}

/// Upconverts the message through the fading channel and adds lowpass antenna
/// noise, returning the received bandpass waveform on the carrier grid.
/// Deterministic for a given seed.
pub fn synthesize_received(
    cfg: &LinkConfig,
    msg: &BasebandMessage,
    seed: u64,
) -> Result<WaveformTrace, LinkError> {
    synthesize_received_with_truth(cfg, msg, seed).map(|(trace, _)| trace)
}

/// As [`synthesize_received`], but also returns the antenna noise actually
/// drawn for each message sample, so analytic receiver expressions can be
/// evaluated from ground truth.
pub fn synthesize_received_with_truth(
    cfg: &LinkConfig,
    msg: &BasebandMessage,
    seed: u64,
) -> Result<(WaveformTrace, Vec<C64>), LinkError> {
    cfg.validate()?;
    let hold = hold_factor(cfg, msg)?;
    let rate = cfg.carrier_sample_rate();
    let dt = 1.0 / rate;
    let signal_scale = (2.0 * cfg.a_gain * cfg.p_avg).sqrt();
    let noise_scale = 2f64.sqrt();

    // The antenna noise is lowpass: held constant over each message sample,
    // like the symbols, rather than redrawn at the carrier rate.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<C64> = (0..msg.samples().len())
        .map(|_| complex_gaussian(&mut rng, cfg.sigma_a_sq))
        .collect();

    let mut samples = Vec::with_capacity(msg.samples().len() * hold);
    for (k, symbol) in msg.samples().iter().enumerate() {
        let amplitude = symbol.norm();
        let phase = if amplitude > 0.0 { symbol.arg() } else { 0.0 };
        let c = noise[k].norm();
        let d = if c > 0.0 { noise[k].arg() } else { 0.0 };
        for i in 0..hold {
            let t = (k * hold + i) as f64 * dt;
            let carrier = TAU * cfg.f_c * t;
            samples.push(
                signal_scale * amplitude * (carrier + phase + cfg.phi).cos()
                    + noise_scale * c * (carrier + d).cos(),
            );
        }
    }
    Ok((WaveformTrace::new(samples, rate)?, noise))
}

/// Mixes the received waveform with the two local oscillator phases, which
/// are locked to the known channel phase.
pub fn mix(
    cfg: &LinkConfig,
    r: &WaveformTrace,
) -> Result<(WaveformTrace, WaveformTrace), LinkError> {
    cfg.validate()?;
    let required = 8.0 * 2.0 * cfg.f_c;
    if r.sample_rate() < required {
        return Err(LinkError::RateTooLow {
            rate: r.sample_rate(),
            required,
        });
    }
    let dt = 1.0 / r.sample_rate();
    let mut g1 = Vec::with_capacity(r.len());
    let mut g2 = Vec::with_capacity(r.len());
    for (i, &v) in r.samples().iter().enumerate() {
        let lo = TAU * cfg.f_c * (i as f64 * dt) + cfg.phi;
        g1.push(v * lo.cos());
        g2.push(v * lo.sin());
    }
    Ok((
        WaveformTrace::new(g1, r.sample_rate())?,
        WaveformTrace::new(g2, r.sample_rate())?,
    ))
}

/// Ideal frequency-domain lowpass: zeroes every bin strictly above the
/// crossover frequency.
fn brick_wall_lowpass(trace: &WaveformTrace, crossover: f64) -> Vec<f64> {
    let n = trace.len();
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut spectrum: Vec<Complex64> = trace
        .samples()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    forward.process(&mut spectrum);
    for (k, bin) in spectrum.iter_mut().enumerate() {
        let freq = if 2 * k <= n { k as f64 } else { k as f64 - n as f64 }
            * trace.sample_rate()
            / n as f64;
        if freq.abs() > crossover {
            *bin = Complex64::new(0.0, 0.0);
        }
    }
    inverse.process(&mut spectrum);
    spectrum.iter().map(|v| v.re / n as f64).collect()
}

/// Splits each mixer output into its baseband part (below the crossover at
/// the carrier frequency) and its doubling-frequency remainder. The two
/// parts re-sum to the input exactly by construction.
pub fn diplex(
    g1: &WaveformTrace,
    g2: &WaveformTrace,
    f_c: f64,
    bandwidth_b: f64,
) -> Result<(WaveformTrace, WaveformTrace, WaveformTrace, WaveformTrace), LinkError> {
    same_grid(g1, g2)?;
    let crossover = f_c;
    if !(crossover > bandwidth_b && crossover < 2.0 * f_c - bandwidth_b) {
        return Err(LinkError::BadCrossover {
            crossover,
            low: bandwidth_b,
            high: 2.0 * f_c - bandwidth_b,
        });
    }
    let required = 8.0 * 2.0 * f_c;
    if g1.sample_rate() < required {
        return Err(LinkError::RateTooLow {
            rate: g1.sample_rate(),
            required,
        });
    }
    let rate = g1.sample_rate();
    let split = |g: &WaveformTrace| -> Result<(WaveformTrace, WaveformTrace), LinkError> {
        let low = brick_wall_lowpass(g, crossover);
        let high: Vec<f64> = g
            .samples()
            .iter()
            .zip(&low)
            .map(|(total, l)| total - l)
            .collect();
        Ok((WaveformTrace::new(low, rate)?, WaveformTrace::new(high, rate)?))
    };
    let (r1, r2) = split(g1)?;
    let (r3, r4) = split(g2)?;
    Ok((r1, r2, r3, r4))
}

/// Combines the diplexer outputs into the decoding and harvesting waveforms
/// and the recovered complex lowpass sequence r1 + j r3.
pub fn assemble_paths(
    r1: &WaveformTrace,
    r2: &WaveformTrace,
    r3: &WaveformTrace,
    r4: &WaveformTrace,
) -> Result<(WaveformTrace, WaveformTrace, Vec<C64>), LinkError> {
    same_grid(r1, r2)?;
    same_grid(r1, r3)?;
    same_grid(r1, r4)?;
    let rate = r1.sample_rate();
    let l: Vec<f64> = r1
        .samples()
        .iter()
        .zip(r3.samples())
        .map(|(a, b)| a + b)
        .collect();
    let h: Vec<f64> = r2
        .samples()
        .iter()
        .zip(r4.samples())
        .map(|(a, b)| a + b)
        .collect();
    let recovered: Vec<C64> = r1
        .samples()
        .iter()
        .zip(r3.samples())
        .map(|(&re, &im)| C64::new(re, im))
        .collect();
    Ok((
        WaveformTrace::new(l, rate)?,
        WaveformTrace::new(h, rate)?,
        recovered,
    ))
}

/// Summary of one receiver run: the measured path powers and splitting
/// factor, the analytic harvested power and decoding SNR, and the recovered
/// lowpass sequence with conversion noise applied.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverReport {
    /// Mean of L^2 over the steady-state window (W).
    pub power_l: f64,
    /// Mean of H^2 over the steady-state window (W).
    pub power_h: f64,
    /// Measured power-splitting factor power_h / (power_l + power_h).
    pub rho: f64,
    /// Harvested power eta * A * P_avg / 2 (W).
    pub q_harvested: f64,
    /// Decoding-path SNR A * P_avg / (sigma_A^2 + 2 sigma_cov^2), linear.
    pub snr: f64,
    /// Recovered lowpass sequence with conversion noise on it.
    pub recovered_lowpass: Vec<C64>,
}

impl ReceiverReport {
    /// Harvested power implied by the measured harvesting-path power after
    /// removing its noise share.
    pub fn q_empirical(&self, cfg: &LinkConfig) -> f64 {
        cfg.eta * (self.power_h - cfg.sigma_a_sq / 2.0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "power_l": self.power_l,
            "power_h": self.power_h,
            "rho": self.rho,
            "q_harvested": self.q_harvested,
            "snr": self.snr,
            "recovered_lowpass": self
                .recovered_lowpass
                .iter()
                .map(|z| serde_json::json!([z.re, z.im]))
                .collect::<Vec<_>>(),
        })
    }
}

/// Measures path powers over the first `n_samples` samples and assembles the
/// report. The window must cover at least 100 symbol periods and an integer
/// number of carrier cycles; one symbol period at each edge is excluded from
/// the averages as a filter transient guard. Conversion noise is drawn from
/// the seed and applied to the recovered lowpass sequence only.
pub fn receiver_report(
    cfg: &LinkConfig,
    l: &WaveformTrace,
    h: &WaveformTrace,
    recovered_lowpass: &[C64],
    n_samples: usize,
    seed: u64,
) -> Result<ReceiverReport, LinkError> {
    cfg.validate()?;
    same_grid(l, h)?;
    if recovered_lowpass.len() != l.len() {
        return Err(LinkError::LengthMismatch {
            left: recovered_lowpass.len(),
            right: l.len(),
        });
    }
    if n_samples > l.len() {
        return Err(LinkError::LengthMismatch {
            left: n_samples,
            right: l.len(),
        });
    }
    let rate = l.sample_rate();
    let symbol_samples = (rate / cfg.bandwidth_b).round() as usize;
    if n_samples < 100 * symbol_samples.max(1) {
        return Err(LinkError::WindowTooShort {
            samples: n_samples,
            required_symbols: 100,
        });
    }
    let cycles = n_samples as f64 * cfg.f_c / rate;
    if (cycles - cycles.round()).abs() > 1e-6 {
        return Err(LinkError::FractionalCarrierCycles { samples: n_samples });
    }

    let guard = symbol_samples;
    let window = &l.samples()[guard..n_samples - guard];
    let power_l = window.iter().map(|v| v * v).sum::<f64>() / window.len() as f64;
    let window = &h.samples()[guard..n_samples - guard];
    let power_h = window.iter().map(|v| v * v).sum::<f64>() / window.len() as f64;
    let total = power_l + power_h;
    if total <= 0.0 {
        return Err(LinkError::DegenerateTrace);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let recovered: Vec<C64> = recovered_lowpass[..n_samples]
        .iter()
        .map(|&z| z + complex_gaussian(&mut rng, cfg.sigma_cov_sq))
        .collect();

    Ok(ReceiverReport {
        power_l,
        power_h,
        rho: power_h / total,
        q_harvested: cfg.eta * cfg.a_gain * cfg.p_avg / 2.0,
        snr: cfg.a_gain * cfg.p_avg / cfg.id_noise_power(),
        recovered_lowpass: recovered,
    })
}

/// Every stage output of one simulated receiver run.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverChain {
    pub received: WaveformTrace,
    pub g1: WaveformTrace,
    pub g2: WaveformTrace,
    pub r1: WaveformTrace,
    pub r2: WaveformTrace,
    pub r3: WaveformTrace,
    pub r4: WaveformTrace,
    pub l: WaveformTrace,
    pub h: WaveformTrace,
    pub report: ReceiverReport,
}

/// Runs the whole receiver chain: synthesis, mixing, diplexing, path
/// assembly, and the report. Antenna and conversion noise use separate
/// streams derived from the one seed.
pub fn run_receiver_chain(
    cfg: &LinkConfig,
    msg: &BasebandMessage,
    seed: u64,
) -> Result<ReceiverChain, LinkError> {
    let mut root = ChaCha8Rng::seed_from_u64(seed);
    let antenna_seed = root.gen::<u64>();
    let conversion_seed = root.gen::<u64>();
    let received = synthesize_received(cfg, msg, antenna_seed)?;
    let (g1, g2) = mix(cfg, &received)?;
    let (r1, r2, r3, r4) = diplex(&g1, &g2, cfg.f_c, cfg.bandwidth_b)?;
    let (l, h, recovered) = assemble_paths(&r1, &r2, &r3, &r4)?;
    let n_samples = l.len();
    let report = receiver_report(cfg, &l, &h, &recovered, n_samples, conversion_seed)?;
    Ok(ReceiverChain {
        received,
        g1,
        g2,
        r1,
        r2,
        r3,
        r4,
        l,
        h,
        report,
    })
}

/// Runs the chain and returns only the report.
pub fn simulate_receiver(
    cfg: &LinkConfig,
    msg: &BasebandMessage,
    seed: u64,
) -> Result<ReceiverReport, LinkError> {
    run_receiver_chain(cfg, msg, seed).map(|chain| chain.report)
}
