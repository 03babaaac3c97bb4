//! Nonlinear rectenna model.
//!
//! The harvested-DC proxy combines the second and fourth moments of the
//! received signal y(t):
//!
//!   z_dc = k2 R E{y^2} + k4 R^2 E{y^4}
//!
//! with k2, k4 from the Taylor expansion of the diode I-V characteristic
//! and R the antenna resistance. Three evaluation routes are provided:
//! an exact frequency-domain sum for deterministic multisines, time-domain
//! sample averaging (the oracle route), and a moment form for modulated
//! single-carrier signals.

use crate::error::{Error, Result};
use crate::math::CompensatedSum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Diode small-signal parameters from which k2/k4 can be derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiodeParams {
    /// Reverse bias saturation current (A).
    pub i_s: f64,
    /// Ideality factor (dimensionless).
    pub n_ideality: f64,
    /// Thermal voltage (V).
    pub v_t: f64,
}

/// Rectenna nonlinearity coefficients and antenna resistance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectennaParams {
    /// Second-order Taylor coefficient of the diode characteristic.
    #[serde(default = "default_k2")]
    pub k2: f64,
    /// Fourth-order Taylor coefficient.
    #[serde(default = "default_k4")]
    pub k4: f64,
    /// Antenna resistance (ohm).
    #[serde(default = "default_r_ant")]
    pub r_ant: f64,
    /// Diode parameters, when k2/k4 were derived from them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diode: Option<DiodeParams>,
}

fn default_k2() -> f64 {
    RectennaParams::DEFAULT_K2
}
fn default_k4() -> f64 {
    RectennaParams::DEFAULT_K4
}
fn default_r_ant() -> f64 {
    RectennaParams::DEFAULT_R_ANT
}

impl RectennaParams {
    /// Reference coefficients: k2 = 0.0034, k4 = 0.3829, R = 50 ohm.
    /// With these, the fourth-order coefficient k4 R^2 is 5630x the
    /// second-order coefficient k2 R.
    pub const DEFAULT_K2: f64 = 0.0034;
    pub const DEFAULT_K4: f64 = 0.3829;
    pub const DEFAULT_R_ANT: f64 = 50.0;

    pub fn new(k2: f64, k4: f64, r_ant: f64) -> Result<Self> {
        if !(k2 > 0.0) || !(k4 > 0.0) || !(r_ant > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rectenna coefficients must be positive (k2={k2}, k4={k4}, r_ant={r_ant})"
            )));
        }
        Ok(Self { k2, k4, r_ant, diode: None })
    }

    /// Derive k2/k4 from diode parameters.
    pub fn from_diode(diode: DiodeParams, r_ant: f64) -> Result<Self> {
        let (k2, k4) = taylor_coefficients(diode.i_s, diode.n_ideality, diode.v_t)?;
        let mut p = Self::new(k2, k4, r_ant)?;
        p.diode = Some(diode);
        Ok(p)
    }

    /// Attach diode parameters to explicit coefficients, checking consistency
    /// to relative 1e-12.
    pub fn with_diode(mut self, diode: DiodeParams) -> Result<Self> {
        let (k2, k4) = taylor_coefficients(diode.i_s, diode.n_ideality, diode.v_t)?;
        let ok = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs();
        if !ok(self.k2, k2) || !ok(self.k4, k4) {
            return Err(Error::InvalidParameter(format!(
                "diode parameters imply (k2, k4) = ({k2}, {k4}), got ({}, {})",
                self.k2, self.k4
            )));
        }
        self.diode = Some(diode);
        Ok(self)
    }
}

impl Default for RectennaParams {
    fn default() -> Self {
        Self {
            k2: Self::DEFAULT_K2,
            k4: Self::DEFAULT_K4,
            r_ant: Self::DEFAULT_R_ANT,
            diode: None,
        }
    }
}

/// k_i = i_s / (i! (n v_t)^i) for i = 2, 4.
pub fn taylor_coefficients(i_s: f64, n_ideality: f64, v_t: f64) -> Result<(f64, f64)> {
    if !(i_s > 0.0) || !(n_ideality > 0.0) || !(v_t > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "diode parameters must be positive (i_s={i_s}, n={n_ideality}, v_t={v_t})"
        )));
    }
    let nv = n_ideality * v_t;
    let k2 = i_s / (2.0 * nv * nv);
    let k4 = i_s / (24.0 * nv.powi(4));
    Ok((k2, k4))
}

/// Received multisine in the frequency domain: entry n is the complex
/// coefficient of tone n (h_n w_n in SISO, sum over antennas in MISO).
///
/// Tones sit on the uniform grid f_n = base_hz + n * spacing_hz. The DC
/// extraction behind [`zdc_multisine_freq`] assumes no intermodulation
/// product of up to four tones lands at DC, which holds exactly when
/// base_hz > (N-1) spacing_hz / 2; construction enforces that. The ratio
/// base_hz / spacing_hz must be rational so the signal has a finite period
/// for the time-domain oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct ToneVector {
    pub coefficients: Vec<Complex64>,
    pub spacing_hz: f64,
    pub base_hz: f64,
}

impl ToneVector {
    pub fn new(coefficients: Vec<Complex64>, spacing_hz: f64, base_hz: f64) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::EmptyInput("tone vector"));
        }
        if !(spacing_hz > 0.0) || !spacing_hz.is_finite() {
            return Err(Error::InvalidParameter(format!("tone spacing {spacing_hz} must be positive")));
        }
        if !(base_hz > 0.0) || !base_hz.is_finite() {
            return Err(Error::InvalidParameter(format!("base frequency {base_hz} must be positive")));
        }
        let n = coefficients.len();
        if base_hz <= 0.5 * (n as f64 - 1.0) * spacing_hz {
            return Err(Error::InvalidParameter(format!(
                "base frequency {base_hz} must exceed (N-1)/2 * spacing = {} so no fourth-order \
                 product aliases to DC",
                0.5 * (n as f64 - 1.0) * spacing_hz
            )));
        }
        rational_ratio(base_hz / spacing_hz)?;
        Ok(Self { coefficients, spacing_hz, base_hz })
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Fundamental period of the real signal: q / spacing where
    /// base/spacing = p/q in lowest terms.
    pub fn period_s(&self) -> f64 {
        let (_, q) = rational_ratio(self.base_hz / self.spacing_hz).expect("validated at construction");
        q as f64 / self.spacing_hz
    }

    /// Highest tone frequency present.
    pub fn max_frequency_hz(&self) -> f64 {
        self.base_hz + (self.len() as f64 - 1.0) * self.spacing_hz
    }

    /// Synthesize the real passband signal over exactly one period.
    ///
    /// `oversample` is the sampling rate as a multiple of the highest tone
    /// frequency; values below 8 are raised to 8 so moment averages over the
    /// period are alias-free.
    pub fn synthesize(&self, oversample: f64) -> SampledSignal {
        let period = self.period_s();
        let f_max = self.max_frequency_hz();
        let rate_target = oversample.max(8.0) * f_max;
        let n_samples = (rate_target * period).ceil() as usize;
        let sample_rate = n_samples as f64 / period;

        let mut samples = Vec::with_capacity(n_samples);
        for i in 0..n_samples {
            let t = i as f64 / sample_rate;
            let mut y = 0.0;
            for (n, c) in self.coefficients.iter().enumerate() {
                let f = self.base_hz + n as f64 * self.spacing_hz;
                let phase = 2.0 * PI * f * t;
                y += c.re * phase.cos() - c.im * phase.sin();
            }
            samples.push(y);
        }
        SampledSignal { samples, sample_rate }
    }
}

/// Best rational approximation p/q of a positive ratio, by continued
/// fractions with q capped at 1 << 20. Errors when no q reproduces the
/// ratio to relative 1e-9.
fn rational_ratio(ratio: f64) -> Result<(u64, u64)> {
    const MAX_DEN: u64 = 1 << 20;
    let mut x = ratio;
    let (mut p0, mut q0, mut p1, mut q1) = (1u64, 0u64, ratio.floor() as u64, 1u64);
    for _ in 0..64 {
        let approx = p1 as f64 / q1 as f64;
        if (approx - ratio).abs() <= 1e-9 * ratio {
            return Ok((p1, q1));
        }
        let frac = x - x.floor();
        if frac.abs() < 1e-15 {
            break;
        }
        x = 1.0 / frac;
        let a = x.floor() as u64;
        let p2 = a.saturating_mul(p1).saturating_add(p0);
        let q2 = a.saturating_mul(q1).saturating_add(q0);
        if q2 > MAX_DEN {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    let approx = p1 as f64 / q1 as f64;
    if (approx - ratio).abs() <= 1e-9 * ratio {
        Ok((p1, q1))
    } else {
        Err(Error::InvalidParameter(format!(
            "base/spacing ratio {ratio} is not rational within 1e-9 (denominator cap {MAX_DEN})"
        )))
    }
}

/// Real signal samples (volts at the antenna, up to scale).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub samples: Vec<f64>,
    pub sample_rate: f64,
}

impl SampledSignal {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("sample buffer"));
        }
        if !(sample_rate > 0.0) {
            return Err(Error::InvalidParameter(format!("sample rate {sample_rate} must be positive")));
        }
        Ok(Self { samples, sample_rate })
    }
}

/// Second- and fourth-order contributions to z_dc; `total` adds them.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ZdcTerms {
    pub second: f64,
    pub fourth: f64,
}

impl ZdcTerms {
    pub fn total(&self) -> f64 {
        self.second + self.fourth
    }
}

/// z_dc terms straight from uniformly spaced received tone coefficients.
///
/// With y(t) = Re{sum_n c_n e^(j 2 pi f_n t)} on a uniform grid, the DC
/// component of y^2 is (1/2) sum |c_n|^2 and the DC component of y^4 is
/// (3/8) sum over n1+n2=n3+n4 of c_n1 c_n2 conj(c_n3) conj(c_n4). The
/// quadruple sum collapses to sum_s |A_s|^2 with A_s = sum_{i+j=s} c_i c_j,
/// which is what gets evaluated here (O(N^2), exactly real).
pub fn zdc_coefficient_terms(c: &[Complex64], params: &RectennaParams) -> Result<ZdcTerms> {
    if c.is_empty() {
        return Err(Error::EmptyInput("tone vector"));
    }
    let n = c.len();

    let mut power2 = CompensatedSum::new();
    for cn in c {
        power2.add(cn.norm_sqr());
    }

    let mut quad = CompensatedSum::new();
    for s in 0..(2 * n - 1) {
        let mut a_s = Complex64::new(0.0, 0.0);
        let lo = s.saturating_sub(n - 1);
        let hi = s.min(n - 1);
        for i in lo..=hi {
            a_s += c[i] * c[s - i];
        }
        quad.add(a_s.norm_sqr());
    }

    Ok(ZdcTerms {
        second: params.k2 * params.r_ant * 0.5 * power2.value(),
        fourth: params.k4 * params.r_ant * params.r_ant * 0.375 * quad.value(),
    })
}

/// z_dc of a deterministic multisine, split into second- and fourth-order
/// terms.
pub fn zdc_multisine_terms(tones: &ToneVector, params: &RectennaParams) -> Result<ZdcTerms> {
    zdc_coefficient_terms(&tones.coefficients, params)
}

/// z_dc of a deterministic multisine (total of both terms).
pub fn zdc_multisine_freq(tones: &ToneVector, params: &RectennaParams) -> Result<f64> {
    Ok(zdc_multisine_terms(tones, params)?.total())
}

/// z_dc from time-domain samples: k2 R mean(y^2) + k4 R^2 mean(y^4).
///
/// Exact for deterministic signals sampled over an integer number of
/// periods; a statistical estimate otherwise.
pub fn zdc_time_domain_terms(signal: &SampledSignal, params: &RectennaParams) -> Result<ZdcTerms> {
    if signal.samples.is_empty() {
        return Err(Error::EmptyInput("sample buffer"));
    }
    let mut m2 = CompensatedSum::new();
    let mut m4 = CompensatedSum::new();
    for &y in &signal.samples {
        let y2 = y * y;
        m2.add(y2);
        m4.add(y2 * y2);
    }
    let count = signal.samples.len() as f64;
    Ok(ZdcTerms {
        second: params.k2 * params.r_ant * m2.value() / count,
        fourth: params.k4 * params.r_ant * params.r_ant * m4.value() / count,
    })
}

/// Total z_dc from time-domain samples.
pub fn zdc_time_domain(signal: &SampledSignal, params: &RectennaParams) -> Result<f64> {
    Ok(zdc_time_domain_terms(signal, params)?.total())
}

/// z_dc of a modulated single carrier at average received power `p_avg`,
/// from the normalized symbol moments m2 = E|m|^2 and m4 = E|m|^4:
///
///   z_dc = k2 R m2 P + (3/2) k4 R^2 m4 P^2
///
/// Requires m4 >= m2^2 (Jensen), with 1e-12 relative slack so empirical
/// moments of constant-modulus streams do not trip the check on rounding.
pub fn zdc_modulated_terms(m2: f64, m4: f64, p_avg: f64, params: &RectennaParams) -> Result<ZdcTerms> {
    if !(p_avg > 0.0) {
        return Err(Error::InvalidParameter(format!("average power {p_avg} must be positive")));
    }
    if !(m2 >= 0.0) || !m2.is_finite() || !m4.is_finite() {
        return Err(Error::InvalidParameter(format!("moments must be finite and m2 >= 0 (m2={m2}, m4={m4})")));
    }
    if m4 < m2 * m2 * (1.0 - 1e-12) {
        return Err(Error::MomentInconsistency { m4, m2_sq: m2 * m2 });
    }
    Ok(ZdcTerms {
        second: params.k2 * params.r_ant * m2 * p_avg,
        fourth: 1.5 * params.k4 * params.r_ant * params.r_ant * m4 * p_avg * p_avg,
    })
}

/// Total modulated-signal z_dc.
pub fn zdc_modulated(m2: f64, m4: f64, p_avg: f64, params: &RectennaParams) -> Result<f64> {
    Ok(zdc_modulated_terms(m2, m4, p_avg, params)?.total())
}
