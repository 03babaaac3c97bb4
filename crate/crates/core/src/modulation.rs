//! Energy modulation: single-carrier symbol distributions and their moments.
//!
//! All schemes are normalized to unit mean-square symbol power, so the
//! harvested-DC difference between them is carried entirely by the fourth
//! moment E|m|^4. Conventional constellations (PSK, 16QAM, CSCG) are
//! compared against distributions designed for power delivery: the real
//! Gaussian and flash signaling, whose rare high-amplitude bursts push
//! E|m|^4 to l^2.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

/// Symbol distribution selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum ModulationScheme {
    /// Unmodulated carrier: constant symbol 1.
    Cw,
    Bpsk,
    Qpsk,
    /// k-ary phase shift keying, k >= 2.
    Psk { k: u32 },
    Qam16,
    /// Circularly symmetric complex Gaussian, variance 1/2 per dimension.
    Cscg,
    /// Real Gaussian: all power on the in-phase dimension.
    RealGaussian,
    /// Two-point amplitude distribution: 0 with probability 1 - 1/l^2,
    /// magnitude l with probability 1/l^2, uniform phase.
    Flash { l: f64 },
}

impl ModulationScheme {
    pub fn name(&self) -> &'static str {
        match self {
            ModulationScheme::Cw => "cw",
            ModulationScheme::Bpsk => "bpsk",
            ModulationScheme::Qpsk => "qpsk",
            ModulationScheme::Psk { .. } => "psk",
            ModulationScheme::Qam16 => "qam16",
            ModulationScheme::Cscg => "cscg",
            ModulationScheme::RealGaussian => "real-gaussian",
            ModulationScheme::Flash { .. } => "flash",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModulationScheme::Psk { k } if *k < 2 => {
                Err(Error::InvalidParameter(format!("PSK order {k} must be >= 2")))
            }
            ModulationScheme::Flash { l } if !(*l >= 1.0) || !l.is_finite() => {
                Err(Error::InvalidParameter(format!("flash parameter l = {l} must be >= 1")))
            }
            _ => Ok(()),
        }
    }

    /// True for schemes whose symbols all share |m| = 1.
    pub fn constant_modulus(&self) -> bool {
        matches!(
            self,
            ModulationScheme::Cw | ModulationScheme::Bpsk | ModulationScheme::Qpsk | ModulationScheme::Psk { .. }
        )
    }
}

/// A sampled stream of normalized complex baseband symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolStream {
    pub symbols: Vec<Complex64>,
}

impl SymbolStream {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Write the stream as CSV rows `re,im` for external cross-checks.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "re,im")?;
        for s in &self.symbols {
            writeln!(out, "{},{}", s.re, s.im)?;
        }
        Ok(())
    }
}

/// The 16QAM grid (+/-1, +/-3)^2 normalized to unit average power.
fn qam16_point<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    const LEVELS: [f64; 4] = [-3.0, -1.0, 1.0, 3.0];
    let re = LEVELS[rng.gen_range(0..4)];
    let im = LEVELS[rng.gen_range(0..4)];
    Complex64::new(re, im) / 10.0f64.sqrt()
}

/// Draw `count` i.i.d. symbols of the given scheme.
pub fn sample_symbols<R: Rng + ?Sized>(
    scheme: ModulationScheme,
    count: usize,
    rng: &mut R,
) -> Result<SymbolStream> {
    scheme.validate()?;
    if count == 0 {
        return Err(Error::InvalidParameter("symbol count must be >= 1".into()));
    }
    let mut symbols = Vec::with_capacity(count);
    match scheme {
        ModulationScheme::Cw => {
            symbols.resize(count, Complex64::new(1.0, 0.0));
        }
        ModulationScheme::Bpsk => {
            for _ in 0..count {
                let s = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                symbols.push(Complex64::new(s, 0.0));
            }
        }
        ModulationScheme::Qpsk => {
            for _ in 0..count {
                let idx = rng.gen_range(0..4u32);
                symbols.push(Complex64::from_polar(1.0, PI / 4.0 + idx as f64 * PI / 2.0));
            }
        }
        ModulationScheme::Psk { k } => {
            for _ in 0..count {
                let idx = rng.gen_range(0..k);
                symbols.push(Complex64::from_polar(1.0, 2.0 * PI * idx as f64 / k as f64));
            }
        }
        ModulationScheme::Qam16 => {
            for _ in 0..count {
                symbols.push(qam16_point(rng));
            }
        }
        ModulationScheme::Cscg => {
            for _ in 0..count {
                symbols.push(crate::math::complex_normal(rng));
            }
        }
        ModulationScheme::RealGaussian => {
            for _ in 0..count {
                symbols.push(Complex64::new(crate::math::standard_normal(rng), 0.0));
            }
        }
        ModulationScheme::Flash { l } => {
            let p_on = 1.0 / (l * l);
            for _ in 0..count {
                if rng.gen::<f64>() < p_on {
                    symbols.push(Complex64::from_polar(l, 2.0 * PI * rng.gen::<f64>()));
                } else {
                    symbols.push(Complex64::new(0.0, 0.0));
                }
            }
        }
    }
    Ok(SymbolStream { symbols })
}

/// Exact E|m|^4 of each normalized scheme. Constant-modulus schemes give 1,
/// 16QAM 1.32, CSCG 2, real Gaussian 3 and flash l^2.
pub fn theoretical_m4(scheme: ModulationScheme) -> f64 {
    match scheme {
        ModulationScheme::Cw
        | ModulationScheme::Bpsk
        | ModulationScheme::Qpsk
        | ModulationScheme::Psk { .. } => 1.0,
        ModulationScheme::Qam16 => 1.32,
        ModulationScheme::Cscg => 2.0,
        ModulationScheme::RealGaussian => 3.0,
        ModulationScheme::Flash { l } => l * l,
    }
}

/// Sample means of |m|^2 and |m|^4.
pub fn empirical_moments(stream: &SymbolStream) -> Result<(f64, f64)> {
    if stream.is_empty() {
        return Err(Error::EmptyInput("symbol stream"));
    }
    let mut m2 = crate::math::CompensatedSum::new();
    let mut m4 = crate::math::CompensatedSum::new();
    for s in &stream.symbols {
        let p = s.norm_sqr();
        m2.add(p);
        m4.add(p * p);
    }
    let n = stream.len() as f64;
    Ok((m2.value() / n, m4.value() / n))
}
