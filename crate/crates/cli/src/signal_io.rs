//! File formats the CLI reads beyond the library's own JSON forms.

use anyhow::{bail, Result};
use num_complex::Complex64;
use serde::Deserialize;
use wpt_sim::channel::ChannelFreqResponse;
use wpt_sim::rectenna::ToneVector;
use wpt_sim::waveform::WaveformJson;

/// Received-tone coefficients on a uniform grid.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TonesJson {
    pub f0_hz: f64,
    pub spacing_hz: f64,
    /// One [re, im] pair per tone.
    pub tones: Vec<[f64; 2]>,
}

impl TonesJson {
    pub fn to_tone_vector(&self) -> Result<ToneVector> {
        let coeffs = self.tones.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        Ok(ToneVector::new(coeffs, self.spacing_hz, self.f0_hz)?)
    }
}

/// Received tone coefficients of a serialized waveform through a channel:
/// entry n is sum_m h_{n,m} w_{n,m}.
pub fn propagate(wf: &WaveformJson, ch: &ChannelFreqResponse) -> Result<Vec<Complex64>> {
    if wf.weights.len() != wf.n * wf.m {
        bail!("waveform file holds {} weights, expected {} x {}", wf.weights.len(), wf.n, wf.m);
    }
    if ch.n_tones() != wf.n || ch.n_antennas() != wf.m {
        bail!(
            "channel is {}x{} but the waveform is {}x{}",
            ch.n_tones(),
            ch.n_antennas(),
            wf.n,
            wf.m
        );
    }
    Ok((0..wf.n)
        .map(|tone| {
            (0..wf.m)
                .map(|ant| {
                    let [re, im] = wf.weights[tone * wf.m + ant];
                    ch.gain(tone, ant) * Complex64::new(re, im)
                })
                .sum()
        })
        .collect())
}
