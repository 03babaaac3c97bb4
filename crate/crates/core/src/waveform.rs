//! Multisine waveform design.
//!
//! Closed-form per-tone amplitude/phase allocations for single- and
//! multi-antenna transmitters, all normalized so the transmit power
//! constraint sum |w|^2 = 2P holds with equality:
//!
//! - UP: equal amplitude, zero phase, no channel knowledge.
//! - ASS: all power on the strongest tone, conjugate phase.
//! - UPMF: equal amplitudes, per-tone conjugate phase.
//! - MF: amplitude proportional to the channel gain.
//! - MAX PAPR: amplitude inversely proportional to the channel gain.
//! - SMF: amplitude proportional to gain^beta (beta = 0 gives UPMF, beta = 1
//!   gives MF).
//! - MISO UPMF / MISO SMF: same frequency allocations with maximum ratio
//!   transmission across antennas on every tone.

use crate::channel::ChannelFreqResponse;
use crate::error::{Error, Result};
use crate::rectenna::ToneVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Tones with amplitude below this fraction of the strongest are excluded
/// from MAX PAPR channel inversion instead of receiving unbounded power.
pub const MAX_PAPR_AMPLITUDE_FLOOR: f64 = 1e-6;

/// Waveform design method selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum DesignMethod {
    Up,
    Ass,
    Upmf,
    Mf,
    MaxPapr,
    Smf { beta: f64 },
    MisoUpmf,
    MisoSmf { beta: f64 },
}

impl DesignMethod {
    pub fn name(&self) -> &'static str {
        match self {
            DesignMethod::Up => "up",
            DesignMethod::Ass => "ass",
            DesignMethod::Upmf => "upmf",
            DesignMethod::Mf => "mf",
            DesignMethod::MaxPapr => "maxpapr",
            DesignMethod::Smf { .. } => "smf",
            DesignMethod::MisoUpmf => "miso-upmf",
            DesignMethod::MisoSmf { .. } => "miso-smf",
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match self {
            DesignMethod::Smf { beta } | DesignMethod::MisoSmf { beta } => Some(*beta),
            _ => None,
        }
    }

    /// True when the design needs channel state at the transmitter.
    pub fn needs_csit(&self) -> bool {
        !matches!(self, DesignMethod::Up)
    }

    /// True for the multi-antenna variants.
    pub fn is_miso(&self) -> bool {
        matches!(self, DesignMethod::MisoUpmf | DesignMethod::MisoSmf { .. })
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(beta) = self.beta() {
            if !beta.is_finite() {
                return Err(Error::InvalidParameter(format!("beta {beta} must be finite")));
            }
        }
        Ok(())
    }
}

/// Transmit coefficients w_{n,m}, row-major by (tone, antenna), with
/// sum |w|^2 = 2 * total_power.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformWeights {
    pub method: DesignMethod,
    weights: Vec<Complex64>,
    n_tones: usize,
    n_antennas: usize,
    pub total_power: f64,
}

impl WaveformWeights {
    pub fn n_tones(&self) -> usize {
        self.n_tones
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    pub fn weight(&self, tone: usize, antenna: usize) -> Complex64 {
        self.weights[tone * self.n_antennas + antenna]
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn tone_row(&self, tone: usize) -> &[Complex64] {
        &self.weights[tone * self.n_antennas..(tone + 1) * self.n_antennas]
    }

    /// sum |w|^2; equals 2P up to rounding for every design.
    pub fn power_sum(&self) -> f64 {
        self.weights.iter().map(|w| w.norm_sqr()).sum()
    }
}

fn phase_factor(h: Complex64) -> Complex64 {
    let a = h.norm();
    if a == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        h.conj() / a
    }
}

/// SISO amplitude-profile designs (UPMF/MF/SMF share this path so the
/// beta = 0 and beta = 1 specializations are bit-identical to UPMF and MF).
fn smf_siso(amps: &[f64], phases: &[Complex64], beta: f64, p: f64) -> Result<Vec<Complex64>> {
    let profile: Vec<f64> = amps.iter().map(|a| a.powf(beta)).collect();
    if profile.iter().any(|x| !x.is_finite()) {
        return Err(Error::DegenerateChannel(format!(
            "amplitude profile with beta = {beta} is not finite on this channel"
        )));
    }
    let norm_sq: f64 = profile.iter().map(|x| x * x).sum();
    if norm_sq == 0.0 {
        return Err(Error::DegenerateChannel("all-zero amplitude profile".into()));
    }
    let scale = (2.0 * p / norm_sq).sqrt();
    Ok(profile.iter().zip(phases).map(|(a, ph)| ph * (a * scale)).collect())
}

/// Compute the transmit weights of the chosen design.
///
/// `channel` must be present for every method except UP and must match
/// (n_tones, n_antennas). SISO methods require n_antennas = 1.
pub fn design_waveform(
    method: DesignMethod,
    channel: Option<&ChannelFreqResponse>,
    n_tones: usize,
    n_antennas: usize,
    p: f64,
) -> Result<WaveformWeights> {
    method.validate()?;
    if n_tones == 0 || n_antennas == 0 {
        return Err(Error::InvalidParameter(format!(
            "waveform needs n >= 1 tones and m >= 1 antennas (got {n_tones} x {n_antennas})"
        )));
    }
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("transmit power {p} must be positive")));
    }
    if method.needs_csit() {
        let ch = channel.ok_or(Error::MissingChannel(method.name()))?;
        if ch.n_tones() != n_tones || ch.n_antennas() != n_antennas {
            return Err(Error::DimensionMismatch(format!(
                "channel is {}x{}, design asked for {}x{}",
                ch.n_tones(),
                ch.n_antennas(),
                n_tones,
                n_antennas
            )));
        }
    }
    if !method.is_miso() && n_antennas != 1 {
        return Err(Error::InvalidParameter(format!(
            "method {} is single-antenna but m = {n_antennas}",
            method.name()
        )));
    }

    let weights = match method {
        DesignMethod::Up => {
            let amp = (2.0 * p / n_tones as f64).sqrt();
            vec![Complex64::new(amp, 0.0); n_tones]
        }
        DesignMethod::Ass => {
            let ch = channel.unwrap();
            let mut best = 0usize;
            for n in 1..n_tones {
                if ch.gain(n, 0).norm() > ch.gain(best, 0).norm() {
                    best = n;
                }
            }
            let mut w = vec![Complex64::new(0.0, 0.0); n_tones];
            w[best] = phase_factor(ch.gain(best, 0)) * (2.0 * p).sqrt();
            w
        }
        DesignMethod::Upmf | DesignMethod::Mf | DesignMethod::Smf { .. } | DesignMethod::MaxPapr => {
            let ch = channel.unwrap();
            let amps: Vec<f64> = (0..n_tones).map(|n| ch.gain(n, 0).norm()).collect();
            let phases: Vec<Complex64> = (0..n_tones).map(|n| phase_factor(ch.gain(n, 0))).collect();
            match method {
                DesignMethod::Upmf => smf_siso(&amps, &phases, 0.0, p)?,
                DesignMethod::Mf => smf_siso(&amps, &phases, 1.0, p)?,
                DesignMethod::Smf { beta } => {
                    if amps.iter().all(|&a| a == 0.0) {
                        return Err(Error::DegenerateChannel("all-zero channel for SMF".into()));
                    }
                    smf_siso(&amps, &phases, beta, p)?
                }
                DesignMethod::MaxPapr => {
                    let a_max = amps.iter().cloned().fold(0.0, f64::max);
                    if a_max == 0.0 {
                        return Err(Error::DegenerateChannel("all-zero channel for MAX PAPR".into()));
                    }
                    let floor = MAX_PAPR_AMPLITUDE_FLOOR * a_max;
                    let inv: Vec<f64> =
                        amps.iter().map(|&a| if a >= floor { 1.0 / a } else { 0.0 }).collect();
                    let norm_sq: f64 = inv.iter().map(|x| x * x).sum();
                    let scale = (2.0 * p / norm_sq).sqrt();
                    inv.iter().zip(&phases).map(|(a, ph)| ph * (a * scale)).collect()
                }
                _ => unreachable!(),
            }
        }
        DesignMethod::MisoUpmf | DesignMethod::MisoSmf { .. } => {
            let ch = channel.unwrap();
            let beta = method.beta().unwrap_or(0.0);
            let norms: Vec<f64> = (0..n_tones).map(|n| ch.tone_norm(n)).collect();
            if norms.iter().all(|&x| x == 0.0) {
                return Err(Error::DegenerateChannel("all-zero channel for MISO design".into()));
            }
            if beta == 0.0 && norms.contains(&0.0) {
                return Err(Error::DegenerateChannel(
                    "zero-norm tone leaves the MRT direction undefined".into(),
                ));
            }
            let profile: Vec<f64> = norms.iter().map(|x| x.powf(beta)).collect();
            if profile.iter().any(|x| !x.is_finite()) {
                return Err(Error::DegenerateChannel(format!(
                    "amplitude profile with beta = {beta} is not finite on this channel"
                )));
            }
            let norm_sq: f64 = profile.iter().map(|x| x * x).sum();
            let scale = (2.0 * p / norm_sq).sqrt();
            let mut w = vec![Complex64::new(0.0, 0.0); n_tones * n_antennas];
            for n in 0..n_tones {
                if norms[n] == 0.0 {
                    continue; // beta > 0: tone carries no power
                }
                let gain = profile[n] * scale / norms[n];
                for m in 0..n_antennas {
                    w[n * n_antennas + m] = ch.gain(n, m).conj() * gain;
                }
            }
            w
        }
    };

    Ok(WaveformWeights { method, weights, n_tones, n_antennas, total_power: p })
}

/// Received tone coefficients through a channel: entry n is
/// sum_m h_{n,m} w_{n,m}, on the channel's tone grid.
pub fn received_tones(weights: &WaveformWeights, channel: &ChannelFreqResponse) -> Result<ToneVector> {
    if weights.n_tones != channel.n_tones() || weights.n_antennas != channel.n_antennas() {
        return Err(Error::DimensionMismatch(format!(
            "weights {}x{} through channel {}x{}",
            weights.n_tones,
            weights.n_antennas,
            channel.n_tones(),
            channel.n_antennas()
        )));
    }
    let coefficients: Vec<Complex64> = (0..weights.n_tones)
        .map(|n| {
            weights
                .tone_row(n)
                .iter()
                .zip(channel.tone_row(n))
                .map(|(w, h)| h * w)
                .sum()
        })
        .collect();
    ToneVector::new(coefficients, channel.spacing_hz, channel.f0_hz)
}

/// Peak-to-average power ratio of the real passband signal.
///
/// In the narrowband regime (base frequency well above the occupied
/// bandwidth) the RF peak is reached where the complex envelope
/// B(t) = sum_n c_n e^(j 2 pi n df t) peaks, so
/// PAPR = max|B|^2 / ((1/2) mean|B|^2). The envelope is sampled over one
/// envelope period at 64x the occupied bandwidth; the average is exact by
/// tone orthogonality, the peak is sampled (in-phase peaks land on t = 0).
pub fn papr(tones: &ToneVector) -> Result<f64> {
    let n = tones.len();
    if n == 0 {
        return Err(Error::EmptyInput("tone vector"));
    }
    let total: f64 = tones.coefficients.iter().map(|c| c.norm_sqr()).sum();
    if total == 0.0 {
        return Err(Error::InvalidParameter("PAPR of the all-zero signal is undefined".into()));
    }
    let samples = 64 * n.max(2);
    let mut peak = 0.0f64;
    let mut acc = 0.0f64;
    for i in 0..samples {
        let t = i as f64 / samples as f64; // in envelope periods
        let mut b = Complex64::new(0.0, 0.0);
        for (k, c) in tones.coefficients.iter().enumerate() {
            b += c * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 * t);
        }
        let p_inst = b.norm_sqr();
        peak = peak.max(p_inst);
        acc += p_inst;
    }
    let mean = acc / samples as f64;
    Ok(2.0 * peak / mean)
}

/// Serialized waveform form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveformJson {
    pub method: String,
    pub beta: Option<f64>,
    #[serde(rename = "P")]
    pub p: f64,
    pub n: usize,
    pub m: usize,
    /// Row-major by (tone, antenna), each entry [re, im].
    pub weights: Vec<[f64; 2]>,
}

impl From<&WaveformWeights> for WaveformJson {
    fn from(w: &WaveformWeights) -> Self {
        Self {
            method: w.method.name().to_string(),
            beta: w.method.beta(),
            p: w.total_power,
            n: w.n_tones,
            m: w.n_antennas,
            weights: w.weights.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_channel, ChannelFreqResponse, ChannelKind, ChannelSpec};
    use crate::rectenna::{zdc_multisine_freq, RectennaParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn siso_channel_from(gains: Vec<Complex64>) -> ChannelFreqResponse {
        let n = gains.len();
        ChannelFreqResponse::from_gains(ChannelKind::Selective, gains, n, 1, 2.45e9, 78_125.0).unwrap()
    }

    const ALL_SISO: [DesignMethod; 6] = [
        DesignMethod::Up,
        DesignMethod::Ass,
        DesignMethod::Upmf,
        DesignMethod::Mf,
        DesignMethod::MaxPapr,
        DesignMethod::Smf { beta: 3.0 },
    ];

    #[test]
    fn up_uniform_amplitudes() {
        // sqrt(2P/N) = sqrt(1/2) for N = 4 at P = 1.
        let w = design_waveform(DesignMethod::Up, None, 4, 1, 1.0).unwrap();
        for n in 0..4 {
            let c = w.weight(n, 0);
            assert!((c.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
            assert_eq!(c.im, 0.0);
        }
    }

    #[test]
    fn ass_strongest_tone_allocation() {
        let ch = siso_channel_from(vec![
            Complex64::from_polar(0.5, 0.3),
            Complex64::from_polar(2.0, -1.1),
            Complex64::from_polar(1.0, 0.9),
        ]);
        let w = design_waveform(DesignMethod::Ass, Some(&ch), 3, 1, 1.0).unwrap();
        assert_eq!(w.weight(0, 0), Complex64::new(0.0, 0.0));
        assert_eq!(w.weight(2, 0), Complex64::new(0.0, 0.0));
        let expected = Complex64::from_polar(2.0f64.sqrt(), 1.1);
        assert!((w.weight(1, 0) - expected).norm() < 1e-12);
    }

    #[test]
    fn ass_tie_breaks_to_lowest_index() {
        let ch = siso_channel_from(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
        ]);
        let w = design_waveform(DesignMethod::Ass, Some(&ch), 3, 1, 1.0).unwrap();
        assert!(w.weight(0, 0).norm() > 0.0);
        assert_eq!(w.weight(1, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn smf_specializations_bit_equal() {
        let ch = sample_channel(&ChannelSpec::new(ChannelKind::Selective, 16, 1), &mut rng(21)).unwrap();
        let upmf = design_waveform(DesignMethod::Upmf, Some(&ch), 16, 1, 2.0).unwrap();
        let smf0 = design_waveform(DesignMethod::Smf { beta: 0.0 }, Some(&ch), 16, 1, 2.0).unwrap();
        let mf = design_waveform(DesignMethod::Mf, Some(&ch), 16, 1, 2.0).unwrap();
        let smf1 = design_waveform(DesignMethod::Smf { beta: 1.0 }, Some(&ch), 16, 1, 2.0).unwrap();
        assert_eq!(upmf.weights(), smf0.weights());
        assert_eq!(mf.weights(), smf1.weights());
    }

    #[test]
    fn power_constraint_all_methods() {
        let mut r = rng(22);
        for trial in 0..25 {
            let p = 0.5 + r.gen::<f64>() * 2.0;
            let siso = sample_channel(&ChannelSpec::new(ChannelKind::Selective, 8, 1), &mut r).unwrap();
            for method in ALL_SISO {
                let w = design_waveform(method, Some(&siso), 8, 1, p).unwrap();
                let err = (w.power_sum() - 2.0 * p).abs() / (2.0 * p);
                assert!(err <= 1e-12, "trial {trial} {} err {err}", method.name());
            }
            let miso = sample_channel(&ChannelSpec::new(ChannelKind::Selective, 8, 3), &mut r).unwrap();
            for method in [DesignMethod::MisoUpmf, DesignMethod::MisoSmf { beta: 3.0 }] {
                let w = design_waveform(method, Some(&miso), 8, 3, p).unwrap();
                let err = (w.power_sum() - 2.0 * p).abs() / (2.0 * p);
                assert!(err <= 1e-12, "trial {trial} {} err {err}", method.name());
            }
        }
    }

    #[test]
    fn csit_methods_require_channel() {
        for method in [DesignMethod::Ass, DesignMethod::Mf, DesignMethod::MisoUpmf] {
            let got = design_waveform(method, None, 4, if method.is_miso() { 2 } else { 1 }, 1.0);
            assert!(matches!(got, Err(Error::MissingChannel(_))), "{}", method.name());
        }
    }

    #[test]
    fn degenerate_channel_rejected() {
        let ch = siso_channel_from(vec![Complex64::new(0.0, 0.0); 4]);
        for method in [DesignMethod::Mf, DesignMethod::MaxPapr, DesignMethod::Smf { beta: 3.0 }] {
            assert!(matches!(
                design_waveform(method, Some(&ch), 4, 1, 1.0),
                Err(Error::DegenerateChannel(_))
            ));
        }
    }

    #[test]
    fn received_identity_channel_up() {
        let ch = ChannelFreqResponse::identity(8, 1, 2.45e9, 78_125.0);
        let w = design_waveform(DesignMethod::Up, None, 8, 1, 1.0).unwrap();
        let tones = received_tones(&w, &ch).unwrap();
        let expected = (2.0 / 8.0f64).sqrt();
        for c in &tones.coefficients {
            assert!((c - Complex64::new(expected, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn matched_phase_designs_receive_real_nonnegative() {
        let ch = sample_channel(&ChannelSpec::new(ChannelKind::Selective, 16, 1), &mut rng(23)).unwrap();
        for method in [DesignMethod::Upmf, DesignMethod::Mf, DesignMethod::Smf { beta: 2.0 }] {
            let w = design_waveform(method, Some(&ch), 16, 1, 1.0).unwrap();
            let tones = received_tones(&w, &ch).unwrap();
            for c in &tones.coefficients {
                assert!(c.re >= 0.0, "{}: re = {}", method.name(), c.re);
                assert!(c.im.abs() <= 1e-12 * c.re.max(1e-30), "{}: im = {}", method.name(), c.im);
            }
        }
    }

    #[test]
    fn max_papr_inverts_channel() {
        let ch = sample_channel(&ChannelSpec::new(ChannelKind::Selective, 8, 1), &mut rng(24)).unwrap();
        let w = design_waveform(DesignMethod::MaxPapr, Some(&ch), 8, 1, 1.0).unwrap();
        let tones = received_tones(&w, &ch).unwrap();
        let first = tones.coefficients[0].re;
        assert!(first > 0.0);
        for c in &tones.coefficients {
            assert!((c.re - first).abs() < 1e-12 * first);
            assert!(c.im.abs() < 1e-12 * first);
        }
    }

    #[test]
    fn miso_upmf_receives_tone_norm() {
        let ch = sample_channel(&ChannelSpec::new(ChannelKind::Selective, 8, 2), &mut rng(25)).unwrap();
        let w = design_waveform(DesignMethod::MisoUpmf, Some(&ch), 8, 2, 1.0).unwrap();
        let tones = received_tones(&w, &ch).unwrap();
        let scale = (2.0 / 8.0f64).sqrt();
        for n in 0..8 {
            let expected = scale * ch.tone_norm(n);
            let c = tones.coefficients[n];
            assert!((c.re - expected).abs() < 1e-12 * expected.max(1e-30));
            assert!(c.im.abs() < 1e-12 * expected.max(1e-30));
        }
    }

    #[test]
    fn received_tones_dimension_mismatch() {
        let ch = ChannelFreqResponse::identity(8, 1, 2.45e9, 78_125.0);
        let w = design_waveform(DesignMethod::Up, None, 4, 1, 1.0).unwrap();
        assert!(matches!(received_tones(&w, &ch), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn papr_single_tone() {
        let tv = ToneVector::new(vec![Complex64::new(1.3, 0.0)], 1_000.0, 10_000.0).unwrap();
        assert!((papr(&tv).unwrap() - 2.0).abs() < 1e-12);
        // An arbitrary common phase keeps a single tone at PAPR 2.
        let tv = ToneVector::new(vec![Complex64::from_polar(0.7, 1.1)], 1_000.0, 10_000.0).unwrap();
        assert!((papr(&tv).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn papr_in_phase_tones() {
        for n in [2usize, 4, 8, 16] {
            let tv = ToneVector::new(
                vec![Complex64::new(0.5, 0.0); n],
                1_000.0,
                4.0 * n as f64 * 1_000.0,
            )
            .unwrap();
            let got = papr(&tv).unwrap();
            assert!((got - 2.0 * n as f64).abs() < 1e-9, "n={n} papr={got}");
        }
    }

    #[test]
    fn papr_zero_signal_rejected() {
        let tv = ToneVector::new(vec![Complex64::new(0.0, 0.0); 2], 1_000.0, 10_000.0).unwrap();
        assert!(papr(&tv).is_err());
    }

    #[test]
    fn max_papr_beats_upmf_papr_statistically() {
        // Channel inversion flattens the received spectrum, which maximizes
        // PAPR; demand it wins on at least 95% of selective draws.
        let mut r = rng(26);
        let spec = ChannelSpec::new(ChannelKind::Selective, 8, 1);
        let trials = 1_000;
        let mut wins = 0;
        for _ in 0..trials {
            let ch = sample_channel(&spec, &mut r).unwrap();
            let inv = design_waveform(DesignMethod::MaxPapr, Some(&ch), 8, 1, 1.0).unwrap();
            let upmf = design_waveform(DesignMethod::Upmf, Some(&ch), 8, 1, 1.0).unwrap();
            let p_inv = papr(&received_tones(&inv, &ch).unwrap()).unwrap();
            let p_upmf = papr(&received_tones(&upmf, &ch).unwrap()).unwrap();
            if p_inv >= p_upmf {
                wins += 1;
            }
        }
        assert!(wins >= 950, "MAX PAPR won only {wins}/{trials}");
    }

    #[test]
    fn smf_large_beta_approaches_ass() {
        // beta -> inf concentrates power on the strongest tone. Use a draw
        // with a clear amplitude gap so beta = 50 is effectively converged.
        let mut r = rng(27);
        let spec = ChannelSpec::new(ChannelKind::Selective, 8, 1);
        let params = RectennaParams::default();
        let mut checked = 0;
        for _ in 0..50 {
            let ch = sample_channel(&spec, &mut r).unwrap();
            let mut amps: Vec<f64> = (0..8).map(|n| ch.gain(n, 0).norm()).collect();
            amps.sort_by(|a, b| b.partial_cmp(a).unwrap());
            if amps[1] / amps[0] > 0.9 {
                continue; // near-tie: beta = 50 not yet converged
            }
            let smf = design_waveform(DesignMethod::Smf { beta: 50.0 }, Some(&ch), 8, 1, 1.0).unwrap();
            let ass = design_waveform(DesignMethod::Ass, Some(&ch), 8, 1, 1.0).unwrap();
            let z_smf = zdc_multisine_freq(&received_tones(&smf, &ch).unwrap(), &params).unwrap();
            let z_ass = zdc_multisine_freq(&received_tones(&ass, &ch).unwrap(), &params).unwrap();
            assert!((z_smf / z_ass - 1.0).abs() < 0.01, "smf {z_smf} vs ass {z_ass}");
            checked += 1;
        }
        assert!(checked >= 20, "only {checked} channels had a clear gap");
    }

    #[test]
    fn smf_zdc_continuous_in_beta() {
        // On a fixed channel, a small beta perturbation moves z_dc by a
        // proportionally small amount everywhere on [0, 4].
        let ch = sample_channel(&ChannelSpec::new(ChannelKind::Selective, 16, 1), &mut rng(29)).unwrap();
        let params = RectennaParams::default();
        let z = |beta: f64| {
            let w = design_waveform(DesignMethod::Smf { beta }, Some(&ch), 16, 1, 1.0).unwrap();
            zdc_multisine_freq(&received_tones(&w, &ch).unwrap(), &params).unwrap()
        };
        for i in 0..=16 {
            let beta = i as f64 * 0.25;
            let base = z(beta);
            let nudged = z(beta + 1e-4);
            assert!((nudged - base).abs() <= 1e-2 * base, "jump at beta = {beta}");
        }
    }

    #[test]
    fn ass_maximizes_second_order_term() {
        // ASS is optimal for the second-order-only (linear) objective:
        // (1/2) sum |h_n w_n|^2 <= A_max^2 P with equality for ASS.
        let mut r = rng(28);
        let spec = ChannelSpec::new(ChannelKind::Selective, 8, 1);
        for _ in 0..100 {
            let ch = sample_channel(&spec, &mut r).unwrap();
            let second = |w: &WaveformWeights| -> f64 {
                (0..8).map(|n| (ch.gain(n, 0) * w.weight(n, 0)).norm_sqr()).sum::<f64>() * 0.5
            };
            let ass = design_waveform(DesignMethod::Ass, Some(&ch), 8, 1, 1.0).unwrap();
            let ass_term = second(&ass);
            for method in ALL_SISO {
                let w = design_waveform(method, Some(&ch), 8, 1, 1.0).unwrap();
                assert!(second(&w) <= ass_term * (1.0 + 1e-12), "{} beats ASS", method.name());
            }
        }
    }

    #[test]
    fn waveform_json_shape() {
        let w = design_waveform(DesignMethod::Up, None, 2, 1, 1.0).unwrap();
        let json = serde_json::to_string(&WaveformJson::from(&w)).unwrap();
        assert!(json.contains("\"method\":\"up\""));
        assert!(json.contains("\"P\":1.0"));
    }
}
