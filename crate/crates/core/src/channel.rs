//! MISO fading channel synthesis, time evolution and pilot estimation.
//!
//! Frequency responses live on the same uniform tone grid as the transmit
//! waveform. Frequency-flat channels use one complex gain per antenna;
//! frequency-selective channels are built from L equal-power Rayleigh taps
//! whose DFT gives the per-tone gains. Successive channel instantiations
//! follow a first-order Gauss-Markov recursion whose correlation comes
//! from the Jakes model.

use crate::error::{Error, Result};
use crate::math::{bessel_j0, complex_normal};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Propagation speed used for Doppler (m/s).
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Upper clamp for the Gauss-Markov coefficient; keeps sqrt(1 - eps^2) real
/// and strictly positive.
pub const EPSILON_MAX: f64 = 1.0 - 1e-9;

/// Channel flavor on the tone grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    /// One complex gain per antenna, common to all tones.
    Flat,
    /// Per-tone gains from L i.i.d. Rayleigh taps.
    Selective,
    /// Deterministic all-ones response (calibration/baseline runs).
    Identity,
}

impl ChannelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChannelKind::Flat => "flat",
            ChannelKind::Selective => "selective",
            ChannelKind::Identity => "identity",
        }
    }
}

impl std::str::FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" | "ff" => Ok(ChannelKind::Flat),
            "selective" | "fs" => Ok(ChannelKind::Selective),
            "identity" => Ok(ChannelKind::Identity),
            other => Err(Error::InvalidParameter(format!(
                "unknown channel kind `{other}` (expected flat, selective or identity)"
            ))),
        }
    }
}

/// Parameters for sampling channel realizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    /// Number of tones N.
    #[serde(rename = "n")]
    pub n_tones: usize,
    /// Number of transmit antennas M.
    #[serde(rename = "m", default = "default_one")]
    pub n_antennas: usize,
    /// Tap count L for selective channels.
    #[serde(default = "default_taps")]
    pub taps: usize,
    /// First tone frequency (Hz).
    #[serde(default = "default_f0")]
    pub f0_hz: f64,
    /// Tone spacing (Hz).
    #[serde(default = "default_spacing")]
    pub spacing_hz: f64,
}

fn default_one() -> usize {
    1
}
fn default_taps() -> usize {
    8
}
fn default_f0() -> f64 {
    2.45e9
}
fn default_spacing() -> f64 {
    78_125.0
}

impl ChannelSpec {
    pub fn new(kind: ChannelKind, n_tones: usize, n_antennas: usize) -> Self {
        Self {
            kind,
            n_tones,
            n_antennas,
            taps: default_taps(),
            f0_hz: default_f0(),
            spacing_hz: default_spacing(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tones == 0 || self.n_antennas == 0 {
            return Err(Error::InvalidParameter(format!(
                "channel needs n >= 1 tones and m >= 1 antennas (got {} x {})",
                self.n_tones, self.n_antennas
            )));
        }
        if self.kind == ChannelKind::Selective && self.taps == 0 {
            return Err(Error::InvalidParameter("selective channel needs taps >= 1".into()));
        }
        if !(self.spacing_hz > 0.0) || !(self.f0_hz > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tone grid must have positive f0 and spacing (got f0={}, spacing={})",
                self.f0_hz, self.spacing_hz
            )));
        }
        Ok(())
    }
}

/// Terminal mobility driving the channel time correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MobilityProfile {
    pub velocity_mps: f64,
    #[serde(default = "default_carrier")]
    pub carrier_hz: f64,
    /// Channel instantiation interval T (seconds).
    #[serde(default = "default_interval")]
    pub interval_s: f64,
}

fn default_carrier() -> f64 {
    2.45e9
}
fn default_interval() -> f64 {
    1.0
}

impl MobilityProfile {
    pub fn new(velocity_mps: f64, carrier_hz: f64, interval_s: f64) -> Result<Self> {
        if velocity_mps < 0.0 || !(carrier_hz > 0.0) || !(interval_s > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mobility profile needs v >= 0, f_c > 0, T > 0 (got v={velocity_mps}, f_c={carrier_hz}, T={interval_s})"
            )));
        }
        Ok(Self { velocity_mps, carrier_hz, interval_s })
    }

    /// Maximum Doppler frequency v f_c / c (Hz).
    pub fn doppler_hz(&self) -> f64 {
        self.velocity_mps * self.carrier_hz / SPEED_OF_LIGHT
    }
}

/// Raw Jakes correlation J0(2 pi f_D T). Oscillates and may be negative;
/// scaling-law formulas take it as-is (they only use even powers).
pub fn jakes_epsilon_raw(profile: &MobilityProfile) -> f64 {
    bessel_j0(2.0 * PI * profile.doppler_hz() * profile.interval_s)
}

/// Jakes correlation clamped to [0, 1 - 1e-9], the admissible range for the
/// Gauss-Markov recursion coefficient.
pub fn jakes_epsilon(profile: &MobilityProfile) -> f64 {
    jakes_epsilon_raw(profile).clamp(0.0, EPSILON_MAX)
}

/// One channel realization: N x M complex gains, row-major by (tone, antenna).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelFreqResponse {
    pub kind: ChannelKind,
    gains: Vec<Complex64>,
    n_tones: usize,
    n_antennas: usize,
    pub f0_hz: f64,
    pub spacing_hz: f64,
}

impl ChannelFreqResponse {
    pub fn from_gains(
        kind: ChannelKind,
        gains: Vec<Complex64>,
        n_tones: usize,
        n_antennas: usize,
        f0_hz: f64,
        spacing_hz: f64,
    ) -> Result<Self> {
        if n_tones == 0 || n_antennas == 0 || gains.len() != n_tones * n_antennas {
            return Err(Error::DimensionMismatch(format!(
                "gain matrix {} does not fill {} x {}",
                gains.len(),
                n_tones,
                n_antennas
            )));
        }
        if gains.iter().any(|g| !g.re.is_finite() || !g.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite channel gain".into()));
        }
        Ok(Self { kind, gains, n_tones, n_antennas, f0_hz, spacing_hz })
    }

    /// All-ones response of the given dimensions.
    pub fn identity(n_tones: usize, n_antennas: usize, f0_hz: f64, spacing_hz: f64) -> Self {
        Self {
            kind: ChannelKind::Identity,
            gains: vec![Complex64::new(1.0, 0.0); n_tones * n_antennas],
            n_tones,
            n_antennas,
            f0_hz,
            spacing_hz,
        }
    }

    pub fn n_tones(&self) -> usize {
        self.n_tones
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    pub fn gain(&self, tone: usize, antenna: usize) -> Complex64 {
        self.gains[tone * self.n_antennas + antenna]
    }

    /// Gains of one tone across antennas (the row vector h_n).
    pub fn tone_row(&self, tone: usize) -> &[Complex64] {
        &self.gains[tone * self.n_antennas..(tone + 1) * self.n_antennas]
    }

    pub fn gains(&self) -> &[Complex64] {
        &self.gains
    }

    /// Euclidean norm of h_n over antennas.
    pub fn tone_norm(&self, tone: usize) -> f64 {
        self.tone_row(tone).iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt()
    }

    /// True when every tone row equals the first (bitwise).
    pub fn is_flat(&self) -> bool {
        let first = self.tone_row(0);
        (1..self.n_tones).all(|n| self.tone_row(n) == first)
    }
}

/// Draw one channel realization.
///
/// Flat: one CN(0,1) gain per antenna, replicated across tones.
/// Selective: L i.i.d. CN(0, 1/L) taps per antenna, per-tone gain
/// h_{n,m} = sum_l tap_{l,m} exp(-j 2 pi n l / N). Both give
/// E|h_{n,m}|^2 = 1. Identity: deterministic all-ones.
pub fn sample_channel<R: Rng + ?Sized>(spec: &ChannelSpec, rng: &mut R) -> Result<ChannelFreqResponse> {
    spec.validate()?;
    let (n, m) = (spec.n_tones, spec.n_antennas);
    let mut gains = vec![Complex64::new(0.0, 0.0); n * m];
    match spec.kind {
        ChannelKind::Identity => {
            return Ok(ChannelFreqResponse::identity(n, m, spec.f0_hz, spec.spacing_hz));
        }
        ChannelKind::Flat => {
            for ant in 0..m {
                let g = complex_normal(rng);
                for tone in 0..n {
                    gains[tone * m + ant] = g;
                }
            }
        }
        ChannelKind::Selective => {
            let l = spec.taps;
            let scale = 1.0 / (l as f64).sqrt();
            for ant in 0..m {
                let taps: Vec<Complex64> = (0..l).map(|_| complex_normal(rng) * scale).collect();
                for tone in 0..n {
                    let mut h = Complex64::new(0.0, 0.0);
                    for (li, tap) in taps.iter().enumerate() {
                        let phase = -2.0 * PI * (tone as f64) * (li as f64) / (n as f64);
                        h += tap * Complex64::from_polar(1.0, phase);
                    }
                    gains[tone * m + ant] = h;
                }
            }
        }
    }
    ChannelFreqResponse::from_gains(spec.kind, gains, n, m, spec.f0_hz, spec.spacing_hz)
}

/// One-shot seeded channel draw (ChaCha8 stream from `seed`).
pub fn sample_channel_seeded(spec: &ChannelSpec, seed: u64) -> Result<ChannelFreqResponse> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    sample_channel(spec, &mut rng)
}

/// One Gauss-Markov step: h_k = eps h_{k-1} + sqrt(1 - eps^2) g_k.
///
/// The innovation is CN(0,1) per entry, drawn i.i.d. across tones for
/// selective channels and shared across tones (per antenna) for flat ones,
/// so a flat response stays flat. Identity channels are static and pass
/// through unchanged.
pub fn evolve_gauss_markov<R: Rng + ?Sized>(
    h_prev: &ChannelFreqResponse,
    epsilon: f64,
    spec: &ChannelSpec,
    rng: &mut R,
) -> Result<ChannelFreqResponse> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!(
            "Gauss-Markov coefficient {epsilon} outside [0, 1)"
        )));
    }
    if h_prev.n_tones != spec.n_tones || h_prev.n_antennas != spec.n_antennas {
        return Err(Error::DimensionMismatch(format!(
            "previous response {}x{} does not match spec {}x{}",
            h_prev.n_tones, h_prev.n_antennas, spec.n_tones, spec.n_antennas
        )));
    }
    if spec.kind == ChannelKind::Identity {
        return Ok(h_prev.clone());
    }
    let (n, m) = (spec.n_tones, spec.n_antennas);
    let innov_scale = (1.0 - epsilon * epsilon).sqrt();
    let mut gains = vec![Complex64::new(0.0, 0.0); n * m];
    match spec.kind {
        ChannelKind::Flat => {
            for ant in 0..m {
                let g = complex_normal(rng);
                for tone in 0..n {
                    let idx = tone * m + ant;
                    gains[idx] = h_prev.gains[idx] * epsilon + g * innov_scale;
                }
            }
        }
        ChannelKind::Selective => {
            for (g, prev) in gains.iter_mut().zip(&h_prev.gains) {
                *g = prev * epsilon + complex_normal(rng) * innov_scale;
            }
        }
        ChannelKind::Identity => unreachable!(),
    }
    ChannelFreqResponse::from_gains(spec.kind, gains, n, m, spec.f0_hz, spec.spacing_hz)
}

/// Per-tone least-squares estimates for one antenna sounding:
/// h_hat_n = received_n / pilot_n.
pub fn ls_estimate_tones(pilot: &[Complex64], received: &[Complex64]) -> Result<Vec<Complex64>> {
    if pilot.is_empty() {
        return Err(Error::EmptyInput("pilot"));
    }
    if pilot.len() != received.len() {
        return Err(Error::DimensionMismatch(format!(
            "pilot has {} tones, received has {}",
            pilot.len(),
            received.len()
        )));
    }
    if let Some(idx) = pilot.iter().position(|p| p.norm_sqr() == 0.0) {
        return Err(Error::ZeroPilot(idx));
    }
    Ok(pilot.iter().zip(received).map(|(p, r)| r / p).collect())
}

/// LS channel estimate for M antennas sounded on orthogonal (time-separated)
/// pilot resources; `received_rounds[m]` holds the received tones while
/// antenna m transmits the block-type pilot alone.
pub fn ls_estimate(
    pilot: &[Complex64],
    received_rounds: &[Vec<Complex64>],
    f0_hz: f64,
    spacing_hz: f64,
) -> Result<ChannelFreqResponse> {
    if received_rounds.is_empty() {
        return Err(Error::EmptyInput("received rounds"));
    }
    let n = pilot.len();
    let m = received_rounds.len();
    let mut gains = vec![Complex64::new(0.0, 0.0); n * m];
    for (ant, round) in received_rounds.iter().enumerate() {
        let est = ls_estimate_tones(pilot, round)?;
        for (tone, h) in est.into_iter().enumerate() {
            gains[tone * m + ant] = h;
        }
    }
    // An estimate is in general tone-dependent, so label it selective.
    ChannelFreqResponse::from_gains(ChannelKind::Selective, gains, n, m, f0_hz, spacing_hz)
}

/// Serialized form of a channel realization.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub kind: ChannelKind,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub f0_hz: f64,
    pub spacing_hz: f64,
    /// Row-major by (tone, antenna), each entry [re, im].
    pub gains: Vec<[f64; 2]>,
}

impl From<&ChannelFreqResponse> for ChannelJson {
    fn from(ch: &ChannelFreqResponse) -> Self {
        Self {
            kind: ch.kind,
            n: ch.n_tones,
            m: ch.n_antennas,
            f0_hz: ch.f0_hz,
            spacing_hz: ch.spacing_hz,
            gains: ch.gains.iter().map(|g| [g.re, g.im]).collect(),
        }
    }
}

impl TryFrom<ChannelJson> for ChannelFreqResponse {
    type Error = Error;

    fn try_from(j: ChannelJson) -> Result<Self> {
        let gains = j.gains.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        ChannelFreqResponse::from_gains(j.kind, gains, j.n, j.m, j.f0_hz, j.spacing_hz)
    }
}
