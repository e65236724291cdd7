//! Multipath channels between sectorized base stations and UEs.
//!
//! Beams follow the linear-array response
//! `β_k(Ω) = Σ_{n=1..B} exp(i·n·π·(cos Ω − cos Ω_k))`, used raw: beamforming
//! gain is folded into the transmit powers (EIRP), so a beam peaks at `B`.
//! Angles are azimuth only, measured from the array axis in `[0, π]`.

pub mod mpc_file;
pub mod synthetic;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use mpc_file::{export_mpcs, import_mpcs, Link, LinkSet, Node};
pub use synthetic::{generate_synthetic_scenario, GenParams};

/// One propagation path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultipathComponent {
    /// Linear amplitude `|α|`.
    pub gain_mag: f64,
    /// Radians.
    pub phase: f64,
    /// Seconds.
    pub delay: f64,
    /// Direction of departure, radians from the transmit array axis.
    pub dod: f64,
    /// Direction of arrival; only present on base-station to base-station links.
    pub doa: Option<f64>,
}

impl MultipathComponent {
    pub fn new(gain_mag: f64, phase: f64, delay: f64, dod: f64) -> Self {
        Self {
            gain_mag,
            phase,
            delay,
            dod,
            doa: None,
        }
    }

    pub fn with_doa(mut self, doa: f64) -> Self {
        self.doa = Some(doa);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gain_mag >= 0.0 && self.gain_mag.is_finite()) {
            return Err(Error::config(format!(
                "MPC gain magnitude must be finite and nonnegative, got {}",
                self.gain_mag
            )));
        }
        if !(self.delay >= 0.0 && self.delay.is_finite()) {
            return Err(Error::config(format!(
                "MPC delay must be finite and nonnegative, got {}",
                self.delay
            )));
        }
        let angles_ok = self.phase.is_finite() && self.dod.is_finite() && self.doa.is_none_or(f64::is_finite);
        if !angles_ok {
            return Err(Error::config("MPC phase and angles must be finite"));
        }
        Ok(())
    }

    /// `|α|·e^{iφ}·e^{−i2πτf}`, the path term without antenna patterns.
    #[inline]
    fn path_phasor(&self, freq: f64) -> Complex64 {
        Complex64::from_polar(self.gain_mag, self.phase - 2.0 * PI * self.delay * freq)
    }
}

/// Steering angles of a sectorized base station, one per beam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamConfig {
    steer_angles: Vec<f64>,
}

impl BeamConfig {
    /// Sectors may be non-uniform; angles must be finite and strictly increasing.
    pub fn new(steer_angles: Vec<f64>) -> Result<Self> {
        if steer_angles.is_empty() {
            return Err(Error::config("a base station needs at least one beam"));
        }
        if steer_angles.len() > crate::mask::MAX_BEAMS {
            return Err(Error::config(format!(
                "{} beams requested, at most {} supported",
                steer_angles.len(),
                crate::mask::MAX_BEAMS
            )));
        }
        if steer_angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::config("steering angles must be finite"));
        }
        if steer_angles.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("steering angles must be strictly increasing"));
        }
        Ok(Self { steer_angles })
    }

    /// Orthogonal (spatial-DFT) beams: `cos Ω_k = 1 − (2k+1)/B`.
    pub fn uniform(num_beams: usize) -> Result<Self> {
        if num_beams == 0 {
            return Err(Error::config("a base station needs at least one beam"));
        }
        let b = num_beams as f64;
        let angles = (0..num_beams).map(|k| (1.0 - (2 * k + 1) as f64 / b).acos()).collect();
        Self::new(angles)
    }

    #[inline]
    pub fn num_beams(&self) -> usize {
        self.steer_angles.len()
    }

    pub fn steer_angles(&self) -> &[f64] {
        &self.steer_angles
    }

    pub fn steer(&self, beam: usize) -> Result<f64> {
        self.steer_angles
            .get(beam)
            .copied()
            .ok_or_else(|| Error::config(format!("beam index {beam} out of range for {} beams", self.num_beams())))
    }

    /// Pattern of `beam` towards `angle`.
    pub fn pattern(&self, beam: usize, angle: f64) -> Result<Complex64> {
        Ok(beam_pattern(self.steer(beam)?, self.num_beams(), angle))
    }
}

/// Equally spaced tones across the band, centered in their bins:
/// `f_j = f_c − BW/2 + (j + 1/2)·BW/F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    carrier: f64,
    bandwidth: f64,
    frequencies: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(carrier: f64, bandwidth: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::config("frequency count must be positive"));
        }
        if !(carrier > 0.0 && carrier.is_finite()) || !(bandwidth >= 0.0 && bandwidth.is_finite()) {
            return Err(Error::config(format!(
                "invalid band: carrier {carrier} Hz, bandwidth {bandwidth} Hz"
            )));
        }
        let spacing = bandwidth / count as f64;
        let frequencies = (0..count)
            .map(|j| carrier - bandwidth / 2.0 + (j as f64 + 0.5) * spacing)
            .collect();
        Ok(Self {
            carrier,
            bandwidth,
            frequencies,
        })
    }

    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.frequencies.len()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }
}

/// Complete world state for one coexistence study.
///
/// Powers are in mW; `pbs_power` and `sbs_power` are EIRP per tone.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub pbs: BeamConfig,
    pub sbs: BeamConfig,
    pub grid: FrequencyGrid,
    pub pbs_to_sbs: Vec<MultipathComponent>,
    /// UE coordinates in meters; absent for imported channel sets.
    pub ue_positions: Option<Vec<[f64; 2]>>,
    pub pbs_to_ue: Vec<Vec<MultipathComponent>>,
    pub sbs_to_ue: Vec<Vec<MultipathComponent>>,
    pub pbs_power: f64,
    pub sbs_power: f64,
    pub noise_power: f64,
}

impl Scenario {
    #[inline]
    pub fn num_ues(&self) -> usize {
        self.pbs_to_ue.len()
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("PBS power", self.pbs_power)?;
        positive("noise power", self.noise_power)?;
        if !(self.sbs_power >= 0.0 && self.sbs_power.is_finite()) {
            return Err(Error::config(format!(
                "SBS power must be nonnegative and finite, got {}",
                self.sbs_power
            )));
        }
        let u = self.num_ues();
        if self.sbs_to_ue.len() != u {
            return Err(Error::config(format!(
                "{u} PBS-UE links but {} SBS-UE links",
                self.sbs_to_ue.len()
            )));
        }
        if let Some(pos) = &self.ue_positions {
            if pos.len() != u {
                return Err(Error::config(format!("{} UE positions for {u} UEs", pos.len())));
            }
        }
        for m in &self.pbs_to_sbs {
            m.validate()?;
            if m.doa.is_none() {
                return Err(Error::config("PBS-SBS MPCs need a direction of arrival"));
            }
        }
        for m in self.pbs_to_ue.iter().chain(&self.sbs_to_ue).flatten() {
            m.validate()?;
        }
        Ok(())
    }

    /// Sets `sbs_power` to `pbs_power · 10^(ratio_db/10)`.
    pub fn set_power_ratio_db(&mut self, ratio_db: f64) {
        self.sbs_power = self.pbs_power * db_to_linear(ratio_db);
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// `Σ_{n=1..num_beams} exp(i·n·π·(cos angle − cos steer_angle))`.
pub fn beam_pattern(steer_angle: f64, num_beams: usize, angle: f64) -> Complex64 {
    let psi = PI * (angle.cos() - steer_angle.cos());
    (1..=num_beams)
        .map(|n| Complex64::from_polar(1.0, n as f64 * psi))
        .sum()
}

/// Transfer function from `tx_beam` to `rx_beam` between two base stations.
pub fn bs_to_bs_channel(
    mpcs: &[MultipathComponent],
    tx_beam: usize,
    rx_beam: usize,
    freq: f64,
    tx_cfg: &BeamConfig,
    rx_cfg: &BeamConfig,
) -> Result<Complex64> {
    let tx_steer = tx_cfg.steer(tx_beam)?;
    let rx_steer = rx_cfg.steer(rx_beam)?;
    let (bt, br) = (tx_cfg.num_beams(), rx_cfg.num_beams());
    mpcs.iter()
        .map(|m| {
            let doa = m
                .doa
                .ok_or_else(|| Error::config("base-station link MPC without a direction of arrival"))?;
            Ok(m.path_phasor(freq) * beam_pattern(tx_steer, bt, m.dod) * beam_pattern(rx_steer, br, doa))
        })
        .sum()
}

/// Transfer function from `tx_beam` to an omnidirectional UE.
pub fn bs_to_ue_channel(
    mpcs: &[MultipathComponent],
    tx_beam: usize,
    freq: f64,
    tx_cfg: &BeamConfig,
) -> Result<Complex64> {
    let steer = tx_cfg.steer(tx_beam)?;
    let b = tx_cfg.num_beams();
    Ok(mpcs
        .iter()
        .map(|m| m.path_phasor(freq) * beam_pattern(steer, b, m.dod))
        .sum())
}

/// Small-scale-averaged path gain `(1/F)·Σ_j |h_j|²` of a BS-to-UE link.
pub fn mean_path_gain(
    mpcs: &[MultipathComponent],
    tx_beam: usize,
    tx_cfg: &BeamConfig,
    grid: &FrequencyGrid,
) -> Result<f64> {
    let steer = tx_cfg.steer(tx_beam)?;
    let b = tx_cfg.num_beams();
    // Patterns do not depend on frequency.
    let weighted: Vec<(Complex64, &MultipathComponent)> =
        mpcs.iter().map(|m| (beam_pattern(steer, b, m.dod), m)).collect();
    let total: f64 = grid
        .frequencies()
        .iter()
        .map(|&f| {
            weighted
                .iter()
                .map(|(beta, m)| m.path_phasor(f) * beta)
                .sum::<Complex64>()
                .norm_sqr()
        })
        .sum();
    Ok(total / grid.count() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn pattern_boresight_equals_beam_count() {
        for b in 1..=16 {
            let cfg = BeamConfig::uniform(b).unwrap();
            for (k, &steer) in cfg.steer_angles().iter().enumerate() {
                let g = cfg.pattern(k, steer).unwrap();
                assert!((g.re - b as f64).abs() < 1e-12, "b={b} k={k} g={g}");
                assert!(g.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pattern_cancellations() {
        // cos Δ = 1 with two elements: e^{iπ} + e^{i2π} = 0
        let steer = (0.0f64).acos(); // cos = 0
        let angle = (1.0f64).acos(); // cos = 1
        assert!(beam_pattern(steer, 2, angle).norm() < 1e-12);
        // cos Δ = 0.5 with four elements: i − 1 − i + 1 = 0
        let angle = (0.5f64).acos();
        assert!(beam_pattern(steer, 4, angle).norm() < 1e-12);
    }

    #[test]
    fn pattern_bounded_by_beam_count() {
        let cfg = BeamConfig::uniform(8).unwrap();
        for k in 0..8 {
            for deg in 0..=180 {
                let a = (deg as f64).to_radians();
                assert!(cfg.pattern(k, a).unwrap().norm() <= 8.0 + 1e-12);
            }
        }
    }

    #[test]
    fn uniform_beams_are_orthogonal() {
        let cfg = BeamConfig::uniform(8).unwrap();
        for k in 0..8 {
            for l in 0..8 {
                let g = cfg.pattern(k, cfg.steer(l).unwrap()).unwrap();
                let want = if k == l { 8.0 } else { 0.0 };
                assert!((g.norm() - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn beam_config_rejects_bad_angles() {
        assert!(BeamConfig::new(vec![]).is_err());
        assert!(BeamConfig::new(vec![0.5, 0.5]).is_err());
        assert!(BeamConfig::new(vec![0.5, 0.2]).is_err());
        assert!(BeamConfig::new(vec![0.1, f64::NAN]).is_err());
        // non-uniform sectors are allowed
        assert!(BeamConfig::new(vec![0.1, 0.3, 2.0]).is_ok());
    }

    #[test]
    fn grid_is_centered() {
        let g = FrequencyGrid::new(2.5e9, 1e6, 4).unwrap();
        let f = g.frequencies();
        assert_eq!(f.len(), 4);
        assert!((f[0] - (2.5e9 - 375e3)).abs() < 1e-3);
        assert!((f[3] - (2.5e9 + 375e3)).abs() < 1e-3);
        let mean = f.iter().sum::<f64>() / 4.0;
        assert!((mean - 2.5e9).abs() < 1e-3);
        assert!(FrequencyGrid::new(2.5e9, 1e6, 0).is_err());
    }

    #[test]
    fn empty_links_are_zero() {
        let cfg = BeamConfig::uniform(4).unwrap();
        let grid = FrequencyGrid::new(2.5e9, 1e6, 8).unwrap();
        assert_eq!(
            bs_to_bs_channel(&[], 0, 1, 2.5e9, &cfg, &cfg).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        assert_eq!(bs_to_ue_channel(&[], 2, 2.5e9, &cfg).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(mean_path_gain(&[], 3, &cfg, &grid).unwrap(), 0.0);
    }

    #[test]
    fn single_path_reductions() {
        let tx = BeamConfig::uniform(4).unwrap();
        let rx = BeamConfig::uniform(6).unwrap();
        let m = MultipathComponent::new(1.0, 0.0, 0.0, 0.7).with_doa(2.1);
        let h = bs_to_bs_channel(&[m], 1, 4, 2.5e9, &tx, &rx).unwrap();
        let want = tx.pattern(1, 0.7).unwrap() * rx.pattern(4, 2.1).unwrap();
        assert!(close(h, want, 1e-12));

        // τ = 1/(2f) flips the sign
        let f = 2.5e9;
        let m = MultipathComponent::new(0.3, 0.0, 1.0 / (2.0 * f), 1.2);
        let h = bs_to_ue_channel(&[m], 2, f, &tx).unwrap();
        let want = -0.3 * tx.pattern(2, 1.2).unwrap();
        assert!(close(h, want, 1e-9));
    }

    #[test]
    fn opposite_paths_cancel() {
        let cfg = BeamConfig::uniform(4).unwrap();
        let f = 2.5e9;
        let a = MultipathComponent::new(0.5, 0.3, 1e-7, 1.0).with_doa(0.4);
        let b = MultipathComponent { phase: 0.3 + PI, ..a };
        // oracle: direct complex sum of the two path terms
        let term = |m: &MultipathComponent| {
            Complex64::from_polar(m.gain_mag, m.phase)
                * Complex64::from_polar(1.0, -2.0 * PI * m.delay * f)
                * beam_pattern(cfg.steer(0).unwrap(), 4, m.dod)
                * beam_pattern(cfg.steer(3).unwrap(), 4, m.doa.unwrap())
        };
        let oracle = term(&a) + term(&b);
        let h = bs_to_bs_channel(&[a, b], 0, 3, f, &cfg, &cfg).unwrap();
        assert!(h.norm() < 1e-12);
        assert!(oracle.norm() < 1e-12);
    }

    #[test]
    fn three_path_ue_channel_matches_oracle() {
        let cfg = BeamConfig::uniform(8).unwrap();
        let paths = [
            MultipathComponent::new(1e-3, 0.2, 1.1e-6, 0.4),
            MultipathComponent::new(4e-4, 2.9, 1.4e-6, 1.9),
            MultipathComponent::new(2e-4, -1.0, 2.3e-6, 2.7),
        ];
        let f = 2.5003e9;
        for k in 0..8 {
            let steer = cfg.steer(k).unwrap();
            let mut oracle = Complex64::new(0.0, 0.0);
            for m in &paths {
                let mut beta = Complex64::new(0.0, 0.0);
                for n in 1..=8 {
                    let arg = n as f64 * PI * (m.dod.cos() - steer.cos());
                    beta += Complex64::new(arg.cos(), arg.sin());
                }
                let arg = m.phase - 2.0 * PI * m.delay * f;
                oracle += m.gain_mag * Complex64::new(arg.cos(), arg.sin()) * beta;
            }
            let h = bs_to_ue_channel(&paths, k, f, &cfg).unwrap();
            assert!((h - oracle).norm() <= 1e-12 * oracle.norm().max(1e-300));
        }
    }

    #[test]
    fn mean_gain_matches_per_frequency_average() {
        let cfg = BeamConfig::uniform(8).unwrap();
        let grid = FrequencyGrid::new(2.5e9, 1e6, 16).unwrap();
        let paths = [
            MultipathComponent::new(1.0, 0.0, 0.0, 0.9),
            MultipathComponent::new(0.6, 1.0, 0.7e-6, 1.3),
        ];
        for k in 0..8 {
            let oracle = grid
                .frequencies()
                .iter()
                .map(|&f| bs_to_ue_channel(&paths, k, f, &cfg).unwrap().norm_sqr())
                .sum::<f64>()
                / 16.0;
            let g = mean_path_gain(&paths, k, &cfg, &grid).unwrap();
            assert!((g - oracle).abs() <= 1e-12 * oracle);
        }
        // a single path has unit-modulus delay phase
        let single = [MultipathComponent::new(0.4, 0.3, 3e-6, 1.1)];
        let g = mean_path_gain(&single, 2, &cfg, &grid).unwrap();
        let want = 0.16 * cfg.pattern(2, 1.1).unwrap().norm_sqr();
        assert!((g - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn out_of_range_beam_is_config_error() {
        let cfg = BeamConfig::uniform(4).unwrap();
        assert!(matches!(bs_to_ue_channel(&[], 4, 1.0, &cfg), Err(Error::Config(_))));
    }
}
