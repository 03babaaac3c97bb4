//! Property tests over randomly generated tone vectors and channels.

use num_complex::Complex64;
use proptest::prelude::*;
use wpt_sim::channel::{ChannelFreqResponse, ChannelKind};
use wpt_sim::rectenna::{zdc_multisine_terms, RectennaParams, ToneVector};
use wpt_sim::waveform::{design_waveform, DesignMethod};

fn tone_vector(coeffs: Vec<(f64, f64)>) -> ToneVector {
    let n = coeffs.len();
    let c = coeffs.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
    ToneVector::new(c, 1_000.0, 4.0 * n as f64 * 1_000.0).unwrap()
}

fn channel_from(coeffs: &[(f64, f64)]) -> ChannelFreqResponse {
    let gains: Vec<Complex64> = coeffs.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
    let n = gains.len();
    ChannelFreqResponse::from_gains(ChannelKind::Selective, gains, n, 1, 2.45e9, 78_125.0).unwrap()
}

proptest! {
    #[test]
    fn zdc_scale_law(
        coeffs in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..12),
        alpha in 0.1f64..3.0,
    ) {
        let params = RectennaParams::default();
        let base = zdc_multisine_terms(&tone_vector(coeffs.clone()), &params).unwrap();
        let scaled: Vec<(f64, f64)> = coeffs.iter().map(|&(re, im)| (re * alpha, im * alpha)).collect();
        let big = zdc_multisine_terms(&tone_vector(scaled), &params).unwrap();
        let a2 = alpha * alpha;
        prop_assert!((big.second - base.second * a2).abs() <= 1e-9 * base.second.max(1e-12));
        prop_assert!((big.fourth - base.fourth * a2 * a2).abs() <= 1e-9 * base.fourth.max(1e-12));
    }

    #[test]
    fn zdc_common_phase_invariance(
        coeffs in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..12),
        theta in 0.0f64..std::f64::consts::TAU,
    ) {
        let params = RectennaParams::default();
        let a = zdc_multisine_terms(&tone_vector(coeffs.clone()), &params).unwrap();
        let rot = Complex64::from_polar(1.0, theta);
        let rotated: Vec<(f64, f64)> = coeffs
            .iter()
            .map(|&(re, im)| {
                let c = Complex64::new(re, im) * rot;
                (c.re, c.im)
            })
            .collect();
        let b = zdc_multisine_terms(&tone_vector(rotated), &params).unwrap();
        prop_assert!((a.total() - b.total()).abs() <= 1e-9 * a.total().max(1e-12));
    }

    #[test]
    fn power_constraint_always_met(
        coeffs in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2..10),
        p in 0.01f64..10.0,
        beta in -1.5f64..4.0,
    ) {
        // Skip channels that are legitimately degenerate for the method.
        prop_assume!(coeffs.iter().any(|&(re, im)| re * re + im * im > 1e-9));
        let n = coeffs.len();
        let ch = channel_from(&coeffs);
        for method in [
            DesignMethod::Up,
            DesignMethod::Ass,
            DesignMethod::Upmf,
            DesignMethod::Mf,
            DesignMethod::MaxPapr,
            DesignMethod::Smf { beta },
        ] {
            let Ok(w) = design_waveform(method, Some(&ch), n, 1, p) else {
                continue; // degenerate profile for this beta
            };
            let err = (w.power_sum() - 2.0 * p).abs() / (2.0 * p);
            prop_assert!(err <= 1e-12, "{}: err {err}", method.name());
        }
    }
}
