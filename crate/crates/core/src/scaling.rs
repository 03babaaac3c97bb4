//! Closed-form z_dc scaling laws.
//!
//! Asymptotic predictions (large N, and large M where marked) for the
//! uniform-power and matched-filter multisine strategies under delayed
//! channel knowledge, exact moment formulas for modulated carriers, and
//! the transmit-diversity gain compositions. The Monte Carlo harness is
//! the ground truth at finite sizes; these evaluators are what it is
//! compared against.

use crate::diversity::{td_gain_theoretical, td_multisine_gain};
use crate::error::{Error, Result};
use crate::modulation::{theoretical_m4, ModulationScheme};
use crate::rectenna::{zdc_modulated, RectennaParams};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Channel selectivity regime of a scaling-law cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelRegime {
    /// Frequency flat.
    Ff,
    /// Frequency selective.
    Fs,
}

/// Strategy column of the waveform scaling table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingStrategy {
    Up,
    Upmf,
}

/// One waveform scaling-law evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingCase {
    pub channel: ChannelRegime,
    pub strategy: ScalingStrategy,
    pub n_tones: usize,
    pub n_antennas: usize,
    /// Time correlation of the delayed channel knowledge. The raw Jakes
    /// value may be negative; only even powers enter the formulas, so the
    /// admissible range here is [-1, 1].
    pub epsilon: f64,
    pub power_w: f64,
    pub params: RectennaParams,
}

impl ScalingCase {
    pub fn validate(&self) -> Result<()> {
        if self.n_tones == 0 || self.n_antennas == 0 {
            return Err(Error::InvalidParameter(format!(
                "scaling case needs n >= 1 and m >= 1 (got {} x {})",
                self.n_tones, self.n_antennas
            )));
        }
        if !(self.epsilon.abs() <= 1.0) {
            return Err(Error::InvalidParameter(format!("|epsilon| = {} exceeds 1", self.epsilon)));
        }
        if !(self.power_w > 0.0) {
            return Err(Error::InvalidParameter(format!("power {} must be positive", self.power_w)));
        }
        Ok(())
    }
}

/// Waveform scaling law for the requested (channel, strategy, M-regime)
/// cell. All entries are asymptotic in N; M > 1 selects the large-M cell.
pub fn scaling_waveform(case: &ScalingCase) -> Result<f64> {
    case.validate()?;
    let p = case.power_w;
    let n = case.n_tones as f64;
    let m = case.n_antennas as f64;
    let eps2 = case.epsilon * case.epsilon;
    let eps4 = eps2 * eps2;
    let k2r = case.params.k2 * case.params.r_ant * p;
    let k4r2 = case.params.k4 * case.params.r_ant * case.params.r_ant * p * p;

    let z = match (case.channel, case.strategy, case.n_antennas) {
        // UP ignores channel knowledge entirely: no epsilon, no M.
        (ChannelRegime::Ff, ScalingStrategy::Up, _) => k2r + 2.0 * k4r2 * n,
        (ChannelRegime::Fs, ScalingStrategy::Up, _) => k2r + 3.0 * k4r2,
        // Single-antenna UPMF in a flat channel only compensates a common
        // phase, which z_dc is invariant to: same law as UP.
        (ChannelRegime::Ff, ScalingStrategy::Upmf, 1) => k2r + 2.0 * k4r2 * n,
        (ChannelRegime::Fs, ScalingStrategy::Upmf, 1) => {
            k2r + 3.0 * k4r2 + eps4 * PI * PI / 16.0 * k4r2 * n
        }
        (ChannelRegime::Ff, ScalingStrategy::Upmf, _) => {
            eps2 * k2r * m
                + (1.0 - eps2) * k2r
                + eps4 * k4r2 * n * m * m
                + 2.0 * (1.0 - eps2) * (1.0 - eps2) * k4r2 * n
        }
        (ChannelRegime::Fs, ScalingStrategy::Upmf, _) => {
            eps2 * k2r * m
                + (1.0 - eps2) * k2r
                + eps4 * k4r2 * n * m * m
                + 3.0 * (1.0 - eps2) * (1.0 - eps2) * k4r2
        }
    };
    Ok(z)
}

/// Modulation scaling law: k2 R P + c k4 R^2 P^2 with
/// c = (3/2) E|m|^4. Same formula as the moment route through the
/// rectenna model, composed here from the scheme's exact fourth moment.
pub fn scaling_modulation(scheme: ModulationScheme, p: f64, params: &RectennaParams) -> Result<f64> {
    scheme.validate()?;
    zdc_modulated(1.0, theoretical_m4(scheme), p, params)
}

/// Transmit-diversity scaling rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TdScalingKind {
    /// Single-antenna continuous wave baseline.
    Cw,
    TdCw,
    TdModulated(ModulationScheme),
    TdMultisine(usize),
}

impl TdScalingKind {
    pub fn name(&self) -> &'static str {
        match self {
            TdScalingKind::Cw => "cw",
            TdScalingKind::TdCw => "td-cw",
            TdScalingKind::TdModulated(_) => "td-mod",
            TdScalingKind::TdMultisine(_) => "td-multisine",
        }
    }
}

/// Transmit-diversity scaling law: the CW fourth-order term scaled by
/// G_td = 2 - 1/M, further multiplied by G_mod = E|m|^4 or G_mt ~ 2N/3.
pub fn scaling_td(kind: TdScalingKind, n_antennas: usize, p: f64, params: &RectennaParams) -> Result<f64> {
    if n_antennas == 0 {
        return Err(Error::InvalidParameter("td scaling needs m >= 1".into()));
    }
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("power {p} must be positive")));
    }
    let gain = match kind {
        TdScalingKind::Cw => 1.0,
        TdScalingKind::TdCw => td_gain_theoretical(n_antennas),
        TdScalingKind::TdModulated(scheme) => {
            scheme.validate()?;
            td_gain_theoretical(n_antennas) * theoretical_m4(scheme)
        }
        TdScalingKind::TdMultisine(n) => {
            if n == 0 {
                return Err(Error::InvalidParameter("td multisine needs n >= 1".into()));
            }
            td_gain_theoretical(n_antennas) * td_multisine_gain(n)
        }
    };
    let second = params.k2 * params.r_ant * p;
    let fourth = 1.5 * params.k4 * params.r_ant * params.r_ant * p * p * gain;
    Ok(second + fourth)
}
