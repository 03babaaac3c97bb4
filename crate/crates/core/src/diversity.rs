//! Transmit diversity: antenna-dependent time-varying phases.
//!
//! Dumb antennas fed with the same low-PAPR signal but independently
//! rotating phases induce artificial fast fading at the rectifier input.
//! The fourth-order z_dc term picks up the gain G_td = 2 - 1/M without any
//! channel knowledge; combined with modulation or a multisine the gains
//! multiply.

use crate::error::{Error, Result};
use crate::modulation::{sample_symbols, ModulationScheme};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Per-slot, per-antenna phases in [0, 2 pi).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSchedule {
    /// Row-major by (slot, antenna).
    phases: Vec<f64>,
    n_slots: usize,
    n_antennas: usize,
    pub slot_rate_hz: f64,
}

impl PhaseSchedule {
    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    pub fn phase(&self, slot: usize, antenna: usize) -> f64 {
        self.phases[slot * self.n_antennas + antenna]
    }

    pub fn slot_row(&self, slot: usize) -> &[f64] {
        &self.phases[slot * self.n_antennas..(slot + 1) * self.n_antennas]
    }
}

/// Default phase update rate (Hz), matching the symbol rate used in the
/// combined modes.
pub const DEFAULT_SLOT_RATE_HZ: f64 = 2.5e6;

/// Draw i.i.d. uniform phases for every slot and antenna.
pub fn td_phase_schedule<R: Rng + ?Sized>(
    n_antennas: usize,
    n_slots: usize,
    rng: &mut R,
) -> Result<PhaseSchedule> {
    if n_antennas == 0 || n_slots == 0 {
        return Err(Error::InvalidParameter(format!(
            "phase schedule needs m >= 1 and slots >= 1 (got {n_antennas} x {n_slots})"
        )));
    }
    let phases = (0..n_slots * n_antennas).map(|_| 2.0 * PI * rng.gen::<f64>()).collect();
    Ok(PhaseSchedule { phases, n_slots, n_antennas, slot_rate_hz: DEFAULT_SLOT_RATE_HZ })
}

/// Carrier content under transmit diversity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TdKind {
    /// Continuous wave on every antenna, amplitude sqrt(2P/M).
    Cw,
    /// Same modulation symbol on all antennas plus the diversity phase.
    Modulated {
        #[serde(flatten)]
        scheme: ModulationScheme,
    },
    /// Same uniform-power in-phase multisine on all antennas, the diversity
    /// phase applied to all of its tones; per-tone amplitude sqrt(2P/(NM)).
    Multisine { n: usize },
}

impl TdKind {
    pub fn name(&self) -> &'static str {
        match self {
            TdKind::Cw => "td-cw",
            TdKind::Modulated { .. } => "td-mod",
            TdKind::Multisine { .. } => "td-multisine",
        }
    }

    pub fn n_tones(&self) -> usize {
        match self {
            TdKind::Multisine { n } => *n,
            _ => 1,
        }
    }
}

/// Per-antenna baseband coefficients for every slot: `slots[t]` is an
/// N x M matrix (row-major by tone, antenna). The common symbol stream is
/// kept alongside for the modulated kind (unit for CW/multisine).
#[derive(Debug, Clone, PartialEq)]
pub struct TdBaseband {
    pub kind: TdKind,
    /// Per slot: N*M coefficients, row-major by (tone, antenna).
    pub slots: Vec<Vec<Complex64>>,
    pub n_tones: usize,
    pub n_antennas: usize,
    /// |m(t)|^2 of the shared symbol per slot (1 for CW and multisine).
    pub symbol_power: Vec<f64>,
    pub total_power: f64,
}

/// Build the per-antenna streams for a diversity transmission.
///
/// Total average transmit power across antennas is P (scaled by the unit
/// mean-square modulation factor for the modulated kind).
pub fn td_baseband<R: Rng + ?Sized>(
    kind: TdKind,
    schedule: &PhaseSchedule,
    p: f64,
    rng: &mut R,
) -> Result<TdBaseband> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("transmit power {p} must be positive")));
    }
    let m = schedule.n_antennas();
    let slots = schedule.n_slots();
    let n = kind.n_tones();
    if n == 0 {
        return Err(Error::InvalidParameter("multisine diversity needs n >= 1 tones".into()));
    }

    let symbols = match kind {
        TdKind::Modulated { scheme } => sample_symbols(scheme, slots, rng)?.symbols,
        _ => vec![Complex64::new(1.0, 0.0); slots],
    };

    let amp = match kind {
        TdKind::Cw | TdKind::Modulated { .. } => (2.0 * p / m as f64).sqrt(),
        TdKind::Multisine { n } => (2.0 * p / (n as f64 * m as f64)).sqrt(),
    };

    let mut out = Vec::with_capacity(slots);
    let mut symbol_power = Vec::with_capacity(slots);
    for (t, symbol) in symbols.iter().enumerate() {
        let mut mat = vec![Complex64::new(0.0, 0.0); n * m];
        for ant in 0..m {
            let rot = Complex64::from_polar(amp, schedule.phase(t, ant));
            let coeff = rot * symbol;
            for tone in 0..n {
                mat[tone * m + ant] = coeff;
            }
        }
        out.push(mat);
        symbol_power.push(symbol.norm_sqr());
    }

    Ok(TdBaseband {
        kind,
        slots: out,
        n_tones: n,
        n_antennas: m,
        symbol_power,
        total_power: p,
    })
}

/// Theoretical diversity gain on the fourth-order term: G_td = 2 - 1/M.
pub fn td_gain_theoretical(n_antennas: usize) -> f64 {
    2.0 - 1.0 / n_antennas as f64
}

/// Large-N multisine gain approximation G_mt ~ 2N/3. Asymptotic only;
/// finite-N values come from the Monte Carlo path.
pub fn td_multisine_gain(n_tones: usize) -> f64 {
    2.0 * n_tones as f64 / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rectenna::RectennaParams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn schedule_shape_and_range() {
        let s = td_phase_schedule(3, 50, &mut rng(1)).unwrap();
        assert_eq!(s.n_antennas(), 3);
        assert_eq!(s.n_slots(), 50);
        for t in 0..50 {
            for a in 0..3 {
                let p = s.phase(t, a);
                assert!((0.0..2.0 * PI).contains(&p));
            }
        }
        assert!(td_phase_schedule(0, 1, &mut rng(1)).is_err());
    }

    #[test]
    fn schedule_deterministic_per_seed() {
        let a = td_phase_schedule(2, 100, &mut rng(2)).unwrap();
        let b = td_phase_schedule(2, 100, &mut rng(2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn phase_difference_uniform() {
        // Kolmogorov-Smirnov distance of the wrapped phase difference
        // against the uniform CDF on [0, 2 pi).
        let slots = 100_000;
        let s = td_phase_schedule(2, slots, &mut rng(3)).unwrap();
        let mut diffs: Vec<f64> = (0..slots)
            .map(|t| (s.phase(t, 0) - s.phase(t, 1)).rem_euclid(2.0 * PI))
            .collect();
        diffs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ks: f64 = 0.0;
        for (i, &d) in diffs.iter().enumerate() {
            let cdf = d / (2.0 * PI);
            let emp_hi = (i + 1) as f64 / slots as f64;
            let emp_lo = i as f64 / slots as f64;
            ks = ks.max((cdf - emp_lo).abs()).max((emp_hi - cdf).abs());
        }
        assert!(ks <= 0.01, "KS distance {ks}");
    }

    #[test]
    fn cw_per_antenna_amplitude() {
        // M = 2 at P = 1: each antenna carries amplitude sqrt(P) = 1.
        let s = td_phase_schedule(2, 10, &mut rng(4)).unwrap();
        let b = td_baseband(TdKind::Cw, &s, 1.0, &mut rng(5)).unwrap();
        for slot in &b.slots {
            for c in slot {
                assert!((c.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn modulated_shares_symbol_across_antennas() {
        let s = td_phase_schedule(2, 200, &mut rng(6)).unwrap();
        let b = td_baseband(TdKind::Modulated { scheme: ModulationScheme::Cscg }, &s, 1.0, &mut rng(7))
            .unwrap();
        for (t, slot) in b.slots.iter().enumerate() {
            // Same magnitude on both antennas, phases differ by the schedule.
            assert!((slot[0].norm() - slot[1].norm()).abs() < 1e-12);
            let want = (s.phase(t, 0) - s.phase(t, 1)).rem_euclid(2.0 * PI);
            if slot[0].norm() > 1e-12 {
                let got = (slot[0].arg() - slot[1].arg()).rem_euclid(2.0 * PI);
                assert!((got - want).abs() < 1e-9 || (got - want).abs() > 2.0 * PI - 1e-9);
            }
        }
    }

    #[test]
    fn multisine_tone_amplitude() {
        // N = 8, M = 2 at P = 1: per-antenna tone amplitude sqrt(2P/16).
        let s = td_phase_schedule(2, 5, &mut rng(8)).unwrap();
        let b = td_baseband(TdKind::Multisine { n: 8 }, &s, 1.0, &mut rng(9)).unwrap();
        let want = (2.0 / 16.0f64).sqrt();
        assert_eq!(b.n_tones, 8);
        for slot in &b.slots {
            for c in slot {
                assert!((c.norm() - want).abs() < 1e-12);
            }
            // All tones of one antenna share the slot phase.
            let a0 = slot[0].arg();
            for tone in 1..8 {
                assert!((slot[tone * 2].arg() - a0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn power_conservation_all_kinds() {
        let p = 0.7;
        let s = td_phase_schedule(3, 400, &mut rng(10)).unwrap();
        for kind in [
            TdKind::Cw,
            TdKind::Modulated { scheme: ModulationScheme::Cscg },
            TdKind::Multisine { n: 4 },
        ] {
            let b = td_baseband(kind, &s, p, &mut rng(11)).unwrap();
            for (slot, &sym_p) in b.slots.iter().zip(&b.symbol_power) {
                if sym_p == 0.0 {
                    continue;
                }
                let slot_power: f64 = slot.iter().map(|c| c.norm_sqr()).sum::<f64>() * 0.5;
                let err = (slot_power / sym_p - p).abs() / p;
                assert!(err <= 1e-12, "{}: err {err}", kind.name());
            }
        }
    }

    #[test]
    fn gain_formula() {
        assert_eq!(td_gain_theoretical(1), 1.0);
        assert_eq!(td_gain_theoretical(2), 1.5);
        assert!((td_gain_theoretical(1_000_000) - 2.0).abs() < 1e-5);
        assert_eq!(td_multisine_gain(3), 2.0);
    }

    #[test]
    fn td_cw_monte_carlo_gain() {
        // Unit flat channel per antenna: the slot-averaged fourth-order term
        // is G_td times the single-antenna CW term at the same total power.
        let params = RectennaParams::default();
        let p = 1.0;
        let baseline4 = 1.5 * params.k4 * params.r_ant * params.r_ant * p * p;
        for m in [2usize, 4] {
            let slots = 20_000;
            let s = td_phase_schedule(m, slots, &mut rng(12 + m as u64)).unwrap();
            let b = td_baseband(TdKind::Cw, &s, p, &mut rng(13)).unwrap();
            let mut acc = 0.0;
            for slot in &b.slots {
                // Unit channel: received coefficient is the antenna sum.
                let c: Complex64 = slot.iter().sum();
                acc += 0.375 * params.k4 * params.r_ant * params.r_ant * c.norm_sqr() * c.norm_sqr();
            }
            let got = acc / slots as f64;
            let want = td_gain_theoretical(m) * baseline4;
            assert!((got / want - 1.0).abs() < 0.05, "M={m}: got {got}, want {want}");
        }
    }

    #[test]
    fn zero_symbol_slots_carry_no_power() {
        let s = td_phase_schedule(2, 2_000, &mut rng(14)).unwrap();
        let b = td_baseband(TdKind::Modulated { scheme: ModulationScheme::Flash { l: 2.0 } }, &s, 1.0, &mut rng(15))
            .unwrap();
        let zero_slots = b.symbol_power.iter().filter(|&&p| p == 0.0).count();
        assert!(zero_slots > 1_000, "flash l=2 should blank ~75% of slots, got {zero_slots}");
        for (slot, &sym_p) in b.slots.iter().zip(&b.symbol_power) {
            if sym_p == 0.0 {
                assert!(slot.iter().all(|c| c.norm_sqr() == 0.0));
            }
        }
    }
}
