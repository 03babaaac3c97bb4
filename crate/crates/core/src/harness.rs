//! Monte Carlo experiment harness.
//!
//! Draws channels, builds signals per strategy, pushes them through the
//! rectenna model and aggregates z_dc with confidence intervals. Covers
//! static closed-loop runs, open-loop modulation and transmit diversity,
//! the delayed-CSIT frame loop under mobility, and parameter sweeps.
//!
//! Reproducibility contract: trial t of a run seeded with `seed` uses the
//! ChaCha8 stream (seed, t + 1), so results are bit-identical for equal
//! (spec, seed) regardless of batching, and sweeps reuse the same trial
//! streams at every axis point (common random numbers).

use crate::channel::{
    evolve_gauss_markov, jakes_epsilon, jakes_epsilon_raw, ls_estimate, sample_channel,
    ChannelFreqResponse, ChannelSpec, MobilityProfile,
};
use crate::diversity::{td_baseband, td_phase_schedule, TdKind};
use crate::error::{Error, Result};
use crate::math::{complex_normal, CompensatedSum};
use crate::modulation::{empirical_moments, sample_symbols, ModulationScheme};
use crate::rectenna::{zdc_coefficient_terms, zdc_modulated_terms, RectennaParams, ZdcTerms};
use crate::waveform::{design_waveform, received_tones, DesignMethod};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Give up after this many degenerate channel draws in one trial.
pub const REDRAW_CAP: u32 = 100;

/// Signal strategy evaluated by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Strategy {
    /// Deterministic multisine, optionally channel-adaptive.
    Waveform {
        #[serde(flatten)]
        method: DesignMethod,
    },
    /// Random single-carrier modulation through a one-tone channel.
    Modulation {
        #[serde(flatten)]
        scheme: ModulationScheme,
        #[serde(default = "default_symbols_per_trial")]
        symbols_per_trial: usize,
    },
    /// Antenna-dependent time-varying phases, slot-averaged.
    TransmitDiversity {
        #[serde(flatten)]
        kind: TdKind,
        #[serde(default = "default_slots_per_trial")]
        slots_per_trial: usize,
    },
}

fn default_symbols_per_trial() -> usize {
    10_000
}
fn default_slots_per_trial() -> usize {
    1_000
}

impl Strategy {
    pub fn waveform(method: DesignMethod) -> Self {
        Strategy::Waveform { method }
    }

    pub fn modulation(scheme: ModulationScheme) -> Self {
        Strategy::Modulation { scheme, symbols_per_trial: default_symbols_per_trial() }
    }

    pub fn transmit_diversity(kind: TdKind) -> Self {
        Strategy::TransmitDiversity { kind, slots_per_trial: default_slots_per_trial() }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Strategy::Waveform { method } => method.name(),
            Strategy::Modulation { scheme, .. } => scheme.name(),
            Strategy::TransmitDiversity { kind, .. } => kind.name(),
        }
    }

    /// beta column value (waveform SMF variants).
    pub fn beta(&self) -> Option<f64> {
        match self {
            Strategy::Waveform { method } => method.beta(),
            _ => None,
        }
    }

    /// Flash l column value (plain or diversity-carried flash).
    pub fn flash_l(&self) -> Option<f64> {
        let scheme = match self {
            Strategy::Modulation { scheme, .. } => Some(*scheme),
            Strategy::TransmitDiversity { kind: TdKind::Modulated { scheme }, .. } => Some(*scheme),
            _ => None,
        };
        match scheme {
            Some(ModulationScheme::Flash { l }) => Some(l),
            _ => None,
        }
    }
}

/// Closed-loop frame timing for delayed-CSIT runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameConfig {
    /// Frame length T_frame (s); also the channel instantiation interval.
    #[serde(default = "default_t_frame")]
    pub t_frame_s: f64,
    /// Pilot + synchronization duration (s).
    #[serde(default = "default_t_pilot")]
    pub t_pilot_s: f64,
    /// Signal recomputation time at the start of a frame (s).
    #[serde(default = "default_t_prev")]
    pub t_prev_s: f64,
    /// Variance of the additive complex Gaussian estimation error; 0 means
    /// the previous frame's channel is known exactly.
    #[serde(default)]
    pub est_noise_var: f64,
}

fn default_t_frame() -> f64 {
    1.0
}
fn default_t_pilot() -> f64 {
    512e-6
}
fn default_t_prev() -> f64 {
    0.035
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            t_frame_s: default_t_frame(),
            t_pilot_s: default_t_pilot(),
            t_prev_s: default_t_prev(),
            est_noise_var: 0.0,
        }
    }
}

impl FrameConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t_frame_s <= 0.0 || self.t_pilot_s < 0.0 || self.t_prev_s < 0.0 || self.est_noise_var < 0.0 {
            return Err(Error::InvalidParameter(
                "frame durations must be nonnegative with t_frame > 0".into(),
            ));
        }
        if self.t_pilot_s + self.t_prev_s >= self.t_frame_s {
            return Err(Error::InvalidParameter(format!(
                "t_pilot + t_prev = {} must stay below t_frame = {}",
                self.t_pilot_s + self.t_prev_s,
                self.t_frame_s
            )));
        }
        Ok(())
    }

    /// Fraction of the frame spent delivering power with current CSI.
    pub fn duty_cycle(&self) -> f64 {
        (self.t_frame_s - self.t_pilot_s - self.t_prev_s) / self.t_frame_s
    }
}

/// Sweep axis and its grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", rename_all = "kebab-case")]
pub enum SweepAxis {
    /// Number of tones.
    N { values: Vec<usize> },
    /// Number of transmit antennas.
    M { values: Vec<usize> },
    /// SMF exponent.
    Beta { values: Vec<f64> },
    /// Flash amplitude parameter.
    FlashL { values: Vec<f64> },
    /// Terminal velocity (m/s); runs the delayed-CSIT path.
    Velocity { values: Vec<f64> },
    /// Direct channel time-correlation override; delayed-CSIT path.
    Epsilon { values: Vec<f64> },
}

impl SweepAxis {
    fn float_values(&self) -> Vec<f64> {
        match self {
            SweepAxis::N { values } | SweepAxis::M { values } => {
                values.iter().map(|&v| v as f64).collect()
            }
            SweepAxis::Beta { values }
            | SweepAxis::FlashL { values }
            | SweepAxis::Velocity { values }
            | SweepAxis::Epsilon { values } => values.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let vals = self.float_values();
        if vals.is_empty() {
            return Err(Error::InvalidParameter("sweep needs at least one value".into()));
        }
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("sweep values must be finite".into()));
        }
        if vals.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter("sweep values must be sorted ascending".into()));
        }
        Ok(())
    }
}

/// A complete experiment description. This struct is also the config-file
/// schema (JSON field names as written here); the seed arrives separately
/// at run time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default = "default_name")]
    pub name: String,
    pub strategy: Strategy,
    pub channel: ChannelSpec,
    #[serde(default = "default_power")]
    pub power_w: f64,
    pub trials: usize,
    #[serde(default)]
    pub params: Option<RectennaParams>,
    /// Mobility profile; switches channel-adaptive waveforms to the
    /// delayed-CSIT evaluation path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mobility: Option<MobilityProfile>,
    /// Direct time-correlation override (takes precedence over mobility).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepAxis>,
}

fn default_name() -> String {
    "experiment".to_string()
}
fn default_power() -> f64 {
    1.0
}

impl ExperimentSpec {
    pub fn new(name: &str, strategy: Strategy, channel: ChannelSpec, trials: usize) -> Self {
        Self {
            name: name.to_string(),
            strategy,
            channel,
            power_w: 1.0,
            trials,
            params: None,
            mobility: None,
            epsilon: None,
            frame: None,
            sweep: None,
        }
    }

    pub fn rectenna(&self) -> RectennaParams {
        self.params.unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if !(self.power_w > 0.0) {
            return Err(Error::InvalidParameter(format!("power {} must be positive", self.power_w)));
        }
        self.channel.validate()?;
        if let Some(axis) = &self.sweep {
            axis.validate()?;
        }
        if let Some(frame) = &self.frame {
            frame.validate()?;
        }
        if let Some(eps) = self.epsilon {
            if !(0.0..1.0).contains(&eps) {
                return Err(Error::InvalidParameter(format!("epsilon {eps} outside [0, 1)")));
            }
        }
        match &self.strategy {
            Strategy::Waveform { method } => {
                method.validate()?;
                if method.is_miso() && self.channel.n_antennas < 1 {
                    return Err(Error::InvalidParameter("MISO method needs antennas".into()));
                }
                if !method.is_miso() && self.channel.n_antennas != 1 {
                    return Err(Error::InvalidParameter(format!(
                        "method {} is single-antenna but channel has m = {}",
                        method.name(),
                        self.channel.n_antennas
                    )));
                }
            }
            Strategy::Modulation { scheme, symbols_per_trial } => {
                scheme.validate()?;
                if *symbols_per_trial == 0 {
                    return Err(Error::InvalidParameter("symbols_per_trial must be >= 1".into()));
                }
                if self.channel.n_tones != 1 || self.channel.n_antennas != 1 {
                    return Err(Error::InvalidParameter(
                        "modulation runs use a single-tone, single-antenna channel".into(),
                    ));
                }
                if self.mobility.is_some() || self.epsilon.is_some() {
                    return Err(Error::InvalidParameter(
                        "mobility applies to channel-adaptive waveform strategies only".into(),
                    ));
                }
            }
            Strategy::TransmitDiversity { kind, slots_per_trial } => {
                if *slots_per_trial == 0 {
                    return Err(Error::InvalidParameter("slots_per_trial must be >= 1".into()));
                }
                if let TdKind::Modulated { scheme } = kind {
                    scheme.validate()?;
                }
                if self.channel.n_tones != kind.n_tones() {
                    return Err(Error::InvalidParameter(format!(
                        "diversity kind {} uses {} tone(s) but channel has {}",
                        kind.name(),
                        kind.n_tones(),
                        self.channel.n_tones
                    )));
                }
                if self.mobility.is_some() || self.epsilon.is_some() {
                    return Err(Error::InvalidParameter(
                        "mobility applies to channel-adaptive waveform strategies only".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Monte Carlo estimate of z_dc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZdcReport {
    pub mean: f64,
    /// 95% confidence half-width (1.96 sigma / sqrt(trials)).
    pub ci95_half_width: f64,
    pub mean_second: f64,
    pub mean_fourth: f64,
    pub trials: u64,
    pub seed: u64,
    /// Degenerate channel draws that were replaced.
    pub redraws: u64,
}

fn aggregate(values: &[ZdcTerms], seed: u64, redraws: u64) -> ZdcReport {
    let n = values.len() as f64;
    let mut total = CompensatedSum::new();
    let mut second = CompensatedSum::new();
    let mut fourth = CompensatedSum::new();
    for t in values {
        total.add(t.total());
        second.add(t.second);
        fourth.add(t.fourth);
    }
    let mean = total.value() / n;
    let mut var = CompensatedSum::new();
    for t in values {
        let d = t.total() - mean;
        var.add(d * d);
    }
    let ci = if values.len() > 1 {
        1.96 * (var.value() / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    ZdcReport {
        mean,
        ci95_half_width: ci,
        mean_second: second.value() / n,
        mean_fourth: fourth.value() / n,
        trials: values.len() as u64,
        seed,
        redraws,
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial + 1);
    rng
}

/// Draw channels until the closure accepts one, counting rejections.
fn redraw_until<F>(
    spec: &ChannelSpec,
    rng: &mut ChaCha8Rng,
    mut accept: F,
) -> Result<(ChannelFreqResponse, u32)>
where
    F: FnMut(&ChannelFreqResponse) -> bool,
{
    let mut redraws = 0;
    loop {
        let ch = sample_channel(spec, rng)?;
        if accept(&ch) {
            return Ok((ch, redraws));
        }
        redraws += 1;
        if redraws >= REDRAW_CAP {
            return Err(Error::RedrawLimit(redraws));
        }
    }
}

fn waveform_degenerate(method: DesignMethod, ch: &ChannelFreqResponse) -> bool {
    matches!(
        design_waveform(method, Some(ch), ch.n_tones(), ch.n_antennas(), 1.0),
        Err(Error::DegenerateChannel(_))
    )
}

/// Noisy LS estimate of a realization: unit block-type pilots per antenna
/// on orthogonal resources, received = h + CN(0, noise_var).
fn estimate_channel(
    ch: &ChannelFreqResponse,
    noise_var: f64,
    rng: &mut ChaCha8Rng,
) -> Result<ChannelFreqResponse> {
    let n = ch.n_tones();
    let m = ch.n_antennas();
    let pilot = vec![Complex64::new(1.0, 0.0); n];
    let sigma = noise_var.sqrt();
    let rounds: Vec<Vec<Complex64>> = (0..m)
        .map(|ant| {
            (0..n)
                .map(|tone| {
                    let noise = if noise_var > 0.0 {
                        complex_normal(rng) * sigma
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    ch.gain(tone, ant) + noise
                })
                .collect()
        })
        .collect();
    ls_estimate(&pilot, &rounds, ch.f0_hz, ch.spacing_hz)
}

fn eval_waveform_static(
    method: DesignMethod,
    spec: &ExperimentSpec,
    params: &RectennaParams,
    rng: &mut ChaCha8Rng,
) -> Result<(ZdcTerms, u32)> {
    let (ch, redraws) = if method.needs_csit() {
        redraw_until(&spec.channel, rng, |ch| !waveform_degenerate(method, ch))?
    } else {
        (sample_channel(&spec.channel, rng)?, 0)
    };
    let chan_arg = method.needs_csit().then_some(&ch);
    let w = design_waveform(method, chan_arg, ch.n_tones(), ch.n_antennas(), spec.power_w)?;
    let tones = received_tones(&w, &ch)?;
    Ok((zdc_coefficient_terms(&tones.coefficients, params)?, redraws))
}

fn eval_waveform_delayed(
    method: DesignMethod,
    spec: &ExperimentSpec,
    params: &RectennaParams,
    epsilon_gm: f64,
    noise_var: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(ZdcTerms, u32)> {
    // The design sees (a noisy estimate of) the previous instantiation.
    let (h_prev, redraws) =
        redraw_until(&spec.channel, rng, |ch| !method.needs_csit() || !waveform_degenerate(method, ch))?;
    let h_est = estimate_channel(&h_prev, noise_var, rng)?;
    let chan_arg = method.needs_csit().then_some(&h_est);
    let w = design_waveform(method, chan_arg, h_prev.n_tones(), h_prev.n_antennas(), spec.power_w)?;
    let h_now = evolve_gauss_markov(&h_prev, epsilon_gm, &spec.channel, rng)?;
    let tones = received_tones(&w, &h_now)?;
    Ok((zdc_coefficient_terms(&tones.coefficients, params)?, redraws))
}

fn eval_modulation(
    scheme: ModulationScheme,
    symbols: usize,
    spec: &ExperimentSpec,
    params: &RectennaParams,
    rng: &mut ChaCha8Rng,
) -> Result<ZdcTerms> {
    let ch = sample_channel(&spec.channel, rng)?;
    let gain = ch.gain(0, 0).norm_sqr();
    let stream = sample_symbols(scheme, symbols, rng)?;
    let (m2, m4) = empirical_moments(&stream)?;
    if gain == 0.0 {
        return Ok(ZdcTerms::default());
    }
    zdc_modulated_terms(m2, m4, spec.power_w * gain, params)
}

fn eval_transmit_diversity(
    kind: TdKind,
    slots: usize,
    spec: &ExperimentSpec,
    params: &RectennaParams,
    rng: &mut ChaCha8Rng,
) -> Result<ZdcTerms> {
    let ch = sample_channel(&spec.channel, rng)?;
    let m = ch.n_antennas();
    let n = kind.n_tones();
    let schedule = td_phase_schedule(m, slots, rng)?;
    let baseband = td_baseband(kind, &schedule, spec.power_w, rng)?;
    let mut second = CompensatedSum::new();
    let mut fourth = CompensatedSum::new();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for slot in &baseband.slots {
        for (tone, c) in coeffs.iter_mut().enumerate() {
            *c = slot[tone * m..(tone + 1) * m]
                .iter()
                .zip(ch.tone_row(tone))
                .map(|(w, h)| h * w)
                .sum();
        }
        let terms = zdc_coefficient_terms(&coeffs, params)?;
        second.add(terms.second);
        fourth.add(terms.fourth);
    }
    Ok(ZdcTerms {
        second: second.value() / slots as f64,
        fourth: fourth.value() / slots as f64,
    })
}

/// The Gauss-Markov coefficient a spec implies: an explicit epsilon wins,
/// otherwise the Jakes correlation of the mobility profile evaluated at the
/// frame length (clamped into [0, 1)).
pub fn effective_epsilon(spec: &ExperimentSpec) -> Option<f64> {
    if let Some(eps) = spec.epsilon {
        return Some(eps);
    }
    spec.mobility.map(|profile| {
        let frame = spec.frame.unwrap_or_default();
        let at_frame = MobilityProfile {
            velocity_mps: profile.velocity_mps,
            carrier_hz: profile.carrier_hz,
            interval_s: frame.t_frame_s,
        };
        jakes_epsilon(&at_frame)
    })
}

/// Run the Monte Carlo estimate for one experiment point (no sweep
/// expansion). Trials are independent given their (seed, trial) streams;
/// degenerate channel draws are replaced and counted.
pub fn run_monte_carlo(spec: &ExperimentSpec, seed: u64) -> Result<ZdcReport> {
    spec.validate()?;
    let params = spec.rectenna();
    let delayed = effective_epsilon(spec);
    let noise_var = spec.frame.map(|f| f.est_noise_var).unwrap_or(0.0);
    let mut values = Vec::with_capacity(spec.trials);
    let mut redraws_total = 0u64;
    for trial in 0..spec.trials {
        let mut rng = trial_rng(seed, trial as u64);
        let (terms, redraws) = match &spec.strategy {
            Strategy::Waveform { method } => match delayed {
                Some(eps) => eval_waveform_delayed(*method, spec, &params, eps, noise_var, &mut rng)?,
                None => eval_waveform_static(*method, spec, &params, &mut rng)?,
            },
            Strategy::Modulation { scheme, symbols_per_trial } => {
                (eval_modulation(*scheme, *symbols_per_trial, spec, &params, &mut rng)?, 0)
            }
            Strategy::TransmitDiversity { kind, slots_per_trial } => {
                (eval_transmit_diversity(*kind, *slots_per_trial, spec, &params, &mut rng)?, 0)
            }
        };
        values.push(terms);
        redraws_total += redraws as u64;
    }
    Ok(aggregate(&values, seed, redraws_total))
}

/// Frame-by-frame delayed-CSIT time series under mobility.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MobilityRun {
    /// Raw Jakes correlation at the frame interval (can be negative).
    pub epsilon_raw: f64,
    /// Clamped Gauss-Markov coefficient actually used.
    pub epsilon: f64,
    pub duty_cycle: f64,
    pub pilot_overhead: f64,
    pub prev_overhead: f64,
    pub zdc_per_frame: Vec<f64>,
    pub report: ZdcReport,
}

/// Evolve one channel chain frame by frame; in every frame the waveform is
/// designed from a (optionally noisy) estimate of the previous frame's
/// channel and scored against the current one.
///
/// The spec must carry a waveform strategy and a mobility profile; the
/// frame count is the spec's trial count and the correlation comes from
/// the Jakes model at the frame length.
pub fn run_mobility(spec: &ExperimentSpec, seed: u64) -> Result<MobilityRun> {
    spec.validate()?;
    let Strategy::Waveform { method } = spec.strategy else {
        return Err(Error::InvalidParameter(
            "mobility runs apply to waveform strategies".into(),
        ));
    };
    let Some(profile) = spec.mobility else {
        return Err(Error::InvalidParameter("mobility run needs a mobility profile".into()));
    };
    let frame = spec.frame.unwrap_or_default();
    frame.validate()?;
    let params = spec.rectenna();
    let frames = spec.trials;
    let channel = &spec.channel;

    let at_frame = MobilityProfile {
        velocity_mps: profile.velocity_mps,
        carrier_hz: profile.carrier_hz,
        interval_s: frame.t_frame_s,
    };
    let epsilon_raw = jakes_epsilon_raw(&at_frame);
    let epsilon = jakes_epsilon(&at_frame);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h_prev = {
        let (ch, _) = redraw_until(channel, &mut rng, |ch| {
            !method.needs_csit() || !waveform_degenerate(method, ch)
        })?;
        ch
    };

    let mut series = Vec::with_capacity(frames);
    let mut terms = Vec::with_capacity(frames);
    for _ in 0..frames {
        let h_est = estimate_channel(&h_prev, frame.est_noise_var, &mut rng)?;
        let chan_arg = method.needs_csit().then_some(&h_est);
        let w = design_waveform(method, chan_arg, channel.n_tones, channel.n_antennas, spec.power_w)?;
        let h_now = evolve_gauss_markov(&h_prev, epsilon, channel, &mut rng)?;
        let tones = received_tones(&w, &h_now)?;
        let t = zdc_coefficient_terms(&tones.coefficients, &params)?;
        series.push(t.total());
        terms.push(t);
        h_prev = h_now;
    }

    Ok(MobilityRun {
        epsilon_raw,
        epsilon,
        duty_cycle: frame.duty_cycle(),
        pilot_overhead: frame.t_pilot_s / frame.t_frame_s,
        prev_overhead: frame.t_prev_s / frame.t_frame_s,
        zdc_per_frame: series,
        report: aggregate(&terms, seed, 0),
    })
}

/// Result row for one experiment point; the CSV/JSON output unit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub experiment: String,
    pub strategy: String,
    pub channel: String,
    pub n: usize,
    pub m: usize,
    pub beta: Option<f64>,
    pub l: Option<f64>,
    pub epsilon: Option<f64>,
    pub velocity_mps: Option<f64>,
    pub zdc_mean: f64,
    pub zdc_ci95: f64,
    pub zdc_second: f64,
    pub zdc_fourth: f64,
    pub trials: u64,
    pub seed: u64,
    pub redraws: u64,
}

impl RunRecord {
    fn from_report(spec: &ExperimentSpec, report: &ZdcReport) -> Self {
        Self {
            experiment: spec.name.clone(),
            strategy: spec.strategy.label().to_string(),
            channel: spec.channel.kind.as_str().to_string(),
            n: spec.channel.n_tones,
            m: spec.channel.n_antennas,
            beta: spec.strategy.beta(),
            l: spec.strategy.flash_l(),
            epsilon: effective_epsilon(spec),
            velocity_mps: spec.mobility.map(|p| p.velocity_mps),
            zdc_mean: report.mean,
            zdc_ci95: report.ci95_half_width,
            zdc_second: report.mean_second,
            zdc_fourth: report.mean_fourth,
            trials: report.trials,
            seed: report.seed,
            redraws: report.redraws,
        }
    }
}

/// Apply one sweep-axis value to a copy of the spec.
fn apply_axis(spec: &ExperimentSpec, axis: &SweepAxis, index: usize) -> Result<ExperimentSpec> {
    let mut point = spec.clone();
    point.sweep = None;
    match axis {
        SweepAxis::N { values } => {
            let n = values[index];
            point.channel.n_tones = n;
            if let Strategy::TransmitDiversity { kind: TdKind::Multisine { n: ref mut tones }, .. } =
                point.strategy
            {
                *tones = n;
            }
        }
        SweepAxis::M { values } => {
            point.channel.n_antennas = values[index];
        }
        SweepAxis::Beta { values } => {
            let beta = values[index];
            match &mut point.strategy {
                Strategy::Waveform { method: DesignMethod::Smf { beta: b } }
                | Strategy::Waveform { method: DesignMethod::MisoSmf { beta: b } } => *b = beta,
                _ => {
                    return Err(Error::InvalidParameter(
                        "beta sweep needs an SMF waveform strategy".into(),
                    ))
                }
            }
        }
        SweepAxis::FlashL { values } => {
            let l = values[index];
            match &mut point.strategy {
                Strategy::Modulation { scheme: ModulationScheme::Flash { l: lv }, .. } => *lv = l,
                Strategy::TransmitDiversity {
                    kind: TdKind::Modulated { scheme: ModulationScheme::Flash { l: lv } },
                    ..
                } => *lv = l,
                _ => {
                    return Err(Error::InvalidParameter(
                        "flash-l sweep needs a flash modulation strategy".into(),
                    ))
                }
            }
        }
        SweepAxis::Velocity { values } => {
            let v = values[index];
            let mut profile = point.mobility.unwrap_or(MobilityProfile {
                velocity_mps: v,
                carrier_hz: 2.45e9,
                interval_s: point.frame.unwrap_or_default().t_frame_s,
            });
            profile.velocity_mps = v;
            point.mobility = Some(profile);
            point.epsilon = None;
        }
        SweepAxis::Epsilon { values } => {
            point.epsilon = Some(values[index]);
        }
    }
    Ok(point)
}

/// Expand the sweep (if any) and run every point with the same seed, so
/// trial streams are shared across points.
pub fn run_experiment(spec: &ExperimentSpec, seed: u64) -> Result<Vec<RunRecord>> {
    spec.validate()?;
    let Some(axis) = spec.sweep.clone() else {
        let report = run_monte_carlo(spec, seed)?;
        return Ok(vec![RunRecord::from_report(spec, &report)]);
    };
    let count = axis.float_values().len();
    let mut records = Vec::with_capacity(count);
    for index in 0..count {
        let point = apply_axis(spec, &axis, index)?;
        let report = run_monte_carlo(&point, seed)?;
        records.push(RunRecord::from_report(&point, &report));
    }
    Ok(records)
}

/// CSV header for run records.
pub const CSV_HEADER: &str =
    "experiment,strategy,channel,N,M,beta,l,epsilon,velocity_mps,zdc_mean,zdc_ci95,trials,seed";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Render records in the stable CSV schema.
pub fn records_to_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.experiment,
            r.strategy,
            r.channel,
            r.n,
            r.m,
            opt(r.beta),
            opt(r.l),
            opt(r.epsilon),
            opt(r.velocity_mps),
            r.zdc_mean,
            r.zdc_ci95,
            r.trials,
            r.seed
        ));
    }
    out
}

/// Render records as pretty JSON (includes the term breakdown).
pub fn records_to_json(records: &[RunRecord]) -> String {
    serde_json::to_string_pretty(records).expect("run records serialize")
}
