//! Energy signatures of PBS beam masks and maximum-likelihood mask detection.
//!
//! The signature of mask `B` on SBS beam `l` is
//! `g_l(B) = Σ_k Σ_j b_k·σ²_PBS·|h_{j,k,l}|² + σ²_noise`. Note the single
//! noise term: the observed energy sums `F` tones of noise, so learned
//! signatures settle at `(F − 1)·σ²_noise` above the exact ones.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::Scenario;
use crate::error::{Error, Result};
use crate::mask::{BeamMask, Owner};
use crate::radio::{CrossChannel, SensingBlock};

/// Largest PBS beam count the dense signature table accepts by default.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// Per-SBS-beam received energy.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyVector(pub Vec<f64>);

impl EnergyVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn squared_distance(&self, other: &[f64]) -> f64 {
        squared_distance(&self.0, other)
    }
}

#[inline]
fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `v_l = (1/N)·Σ_n Σ_j |r_{j,l,n}|²`.
pub fn energy_features(block: &SensingBlock) -> EnergyVector {
    let n = block.samples_per_beam() as f64;
    let mut v = vec![0.0; block.num_beams()];
    for j in 0..block.num_freqs() {
        for (l, e) in v.iter_mut().enumerate() {
            let mut partial = 0.0;
            for r in block.series(j, l) {
                partial += r.norm_sqr();
            }
            *e += partial;
        }
    }
    v.iter_mut().for_each(|e| *e /= n);
    EnergyVector(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignatureMode {
    /// Closed-form expected energies from known channels.
    Exact,
    /// Averaged from synthesized sensing frames.
    Learned,
}

/// Dense map from every PBS mask to its expected SBS energy vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureTable {
    pbs_beams: usize,
    sbs_beams: usize,
    mode: SignatureMode,
    /// `2^pbs_beams` rows of `sbs_beams` energies, indexed by mask encoding.
    entries: Vec<f64>,
}

fn check_cap(beams: usize, cap: usize) -> Result<()> {
    if beams > cap {
        Err(Error::Capacity { beams, cap })
    } else {
        Ok(())
    }
}

/// `c[k][l] = σ²_PBS·Σ_j |h_{j,k,l}|²`.
fn beam_energies(cross: &CrossChannel, pbs_power: f64) -> Vec<f64> {
    cross.energy_coupling().into_iter().map(|c| pbs_power * c).collect()
}

fn signature_from_energies(coupling: &[f64], sbs_beams: usize, noise: f64, mask: &BeamMask) -> Vec<f64> {
    (0..sbs_beams)
        .map(|l| mask.iter_on().map(|k| coupling[k * sbs_beams + l]).sum::<f64>() + noise)
        .collect()
}

/// Expected energy vector of `pbs_mask` from the closed form.
pub fn exact_signature(scenario: &Scenario, pbs_mask: &BeamMask) -> Result<EnergyVector> {
    if pbs_mask.owner() != Owner::Pbs || pbs_mask.len() != scenario.pbs.num_beams() {
        return Err(Error::config(format!("mask {pbs_mask:?} does not fit the PBS")));
    }
    let cross = CrossChannel::new(scenario)?;
    let coupling = beam_energies(&cross, scenario.pbs_power);
    Ok(EnergyVector(signature_from_energies(
        &coupling,
        cross.sbs_beams(),
        scenario.noise_power,
        pbs_mask,
    )))
}

impl SignatureTable {
    /// Exact signatures of every PBS mask.
    pub fn exact(scenario: &Scenario, cap: usize) -> Result<Self> {
        let pbs_beams = scenario.pbs.num_beams();
        check_cap(pbs_beams, cap)?;
        let cross = CrossChannel::new(scenario)?;
        let sbs_beams = cross.sbs_beams();
        let coupling = beam_energies(&cross, scenario.pbs_power);
        let mut entries = Vec::with_capacity(sbs_beams << pbs_beams);
        for mask in BeamMask::enumerate(Owner::Pbs, pbs_beams) {
            entries.extend(signature_from_energies(
                &coupling,
                sbs_beams,
                scenario.noise_power,
                &mask,
            ));
        }
        Ok(Self {
            pbs_beams,
            sbs_beams,
            mode: SignatureMode::Exact,
            entries,
        })
    }

    /// Learns every signature by averaging the energy features of
    /// `frames_per_mask` synthesized frames of `samples_per_frame` samples.
    ///
    /// PBS activity is known during learning. Each mask draws from its own
    /// substream of a seed taken from `rng`.
    pub fn learn<R: Rng + ?Sized>(
        scenario: &Scenario,
        frames_per_mask: usize,
        samples_per_frame: usize,
        cap: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if frames_per_mask == 0 || samples_per_frame == 0 {
            return Err(Error::config("learning needs at least one frame of one sample"));
        }
        let pbs_beams = scenario.pbs.num_beams();
        check_cap(pbs_beams, cap)?;
        let cross = CrossChannel::new(scenario)?;
        let sbs_beams = cross.sbs_beams();
        let base: u64 = rng.gen();
        let mut entries = Vec::with_capacity(sbs_beams << pbs_beams);
        for mask in BeamMask::enumerate(Owner::Pbs, pbs_beams) {
            let mut stream = ChaCha8Rng::seed_from_u64(base);
            stream.set_stream(mask.bits() as u64);
            let mut acc = vec![0.0; sbs_beams];
            for _ in 0..frames_per_mask {
                let v = cross.sense_energy(
                    &mask,
                    samples_per_frame,
                    scenario.pbs_power,
                    scenario.noise_power,
                    &mut stream,
                )?;
                acc.iter_mut().zip(&v).for_each(|(a, e)| *a += e);
            }
            entries.extend(acc.into_iter().map(|a| a / frames_per_mask as f64));
        }
        Ok(Self {
            pbs_beams,
            sbs_beams,
            mode: SignatureMode::Learned,
            entries,
        })
    }

    pub fn from_entries(
        pbs_beams: usize,
        sbs_beams: usize,
        mode: SignatureMode,
        entries: Vec<EnergyVector>,
    ) -> Result<Self> {
        check_cap(pbs_beams, crate::mask::MAX_BEAMS - 1)?;
        if entries.len() != 1 << pbs_beams {
            return Err(Error::config(format!(
                "{} signatures for {pbs_beams} PBS beams",
                entries.len()
            )));
        }
        let mut flat = Vec::with_capacity(sbs_beams << pbs_beams);
        for e in entries {
            if e.len() != sbs_beams || e.0.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
                return Err(Error::config("signatures must be finite, nonnegative and full length"));
            }
            flat.extend(e.0);
        }
        Ok(Self {
            pbs_beams,
            sbs_beams,
            mode,
            entries: flat,
        })
    }

    pub fn pbs_beams(&self) -> usize {
        self.pbs_beams
    }

    pub fn sbs_beams(&self) -> usize {
        self.sbs_beams
    }

    pub fn mode(&self) -> SignatureMode {
        self.mode
    }

    pub fn signature(&self, mask: &BeamMask) -> &[f64] {
        let start = mask.bits() as usize * self.sbs_beams;
        &self.entries[start..start + self.sbs_beams]
    }

    /// `(mask, signature)` pairs in encoding order.
    pub fn iter(&self) -> impl Iterator<Item = (BeamMask, &[f64])> {
        let b = self.pbs_beams;
        self.entries
            .chunks_exact(self.sbs_beams)
            .enumerate()
            .map(move |(bits, g)| (BeamMask::from_bits(Owner::Pbs, b, bits as u32), g))
    }

    /// One line per mask: `mask_hex g_1 ... g_B`, preceded by a header comment.
    pub fn export(&self) -> String {
        let mode = match self.mode {
            SignatureMode::Exact => "exact",
            SignatureMode::Learned => "learned",
        };
        let width = self.pbs_beams.div_ceil(4).max(1);
        let mut out = format!(
            "# signatures pbs_beams={} sbs_beams={} mode={mode}\n",
            self.pbs_beams, self.sbs_beams
        );
        for (mask, g) in self.iter() {
            let _ = write!(out, "{:0width$x}", mask.bits());
            for v in g {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn import(source: &str) -> Result<Self> {
        let mut pbs_beams = None;
        let mut sbs_beams = None;
        let mut mode = SignatureMode::Learned;
        let mut rows: Vec<(usize, u32, Vec<f64>)> = Vec::new();
        for (idx, raw) in source.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = raw.trim();
            if let Some(comment) = trimmed.strip_prefix('#') {
                let mut words = comment.split_whitespace();
                if words.next() == Some("signatures") {
                    for word in words {
                        match word.split_once('=') {
                            Some(("pbs_beams", v)) => {
                                pbs_beams = Some(v.parse().map_err(|_| Error::parse(line_no, "bad pbs_beams"))?)
                            }
                            Some(("sbs_beams", v)) => {
                                sbs_beams = Some(v.parse().map_err(|_| Error::parse(line_no, "bad sbs_beams"))?)
                            }
                            Some(("mode", "exact")) => mode = SignatureMode::Exact,
                            Some(("mode", "learned")) => mode = SignatureMode::Learned,
                            _ => return Err(Error::parse(line_no, format!("unknown header field `{word}`"))),
                        }
                    }
                }
                continue;
            }
            if trimmed.is_empty() {
                continue;
            }
            let mut fields = trimmed.split_whitespace();
            let hex = fields.next().unwrap_or_default();
            let bits = u32::from_str_radix(hex, 16)
                .map_err(|_| Error::parse(line_no, format!("`{hex}` is not a hex mask")))?;
            let values = fields
                .map(|t| {
                    t.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite() && *v >= 0.0)
                        .ok_or_else(|| Error::parse(line_no, format!("`{t}` is not a nonnegative energy")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push((line_no, bits, values));
        }
        let sbs_beams = match sbs_beams {
            Some(b) => b,
            None => rows.first().map(|r| r.2.len()).unwrap_or(0),
        };
        let pbs_beams = match pbs_beams {
            Some(b) => b,
            None if rows.len().is_power_of_two() => rows.len().trailing_zeros() as usize,
            None => return Err(Error::parse(0, format!("{} rows is not a power of two", rows.len()))),
        };
        if pbs_beams >= crate::mask::MAX_BEAMS {
            return Err(Error::Capacity {
                beams: pbs_beams,
                cap: crate::mask::MAX_BEAMS - 1,
            });
        }
        let mut slots: Vec<Option<Vec<f64>>> = vec![None; 1 << pbs_beams];
        for (line_no, bits, values) in rows {
            if values.len() != sbs_beams {
                return Err(Error::parse(
                    line_no,
                    format!("expected {sbs_beams} energies, found {}", values.len()),
                ));
            }
            let slot = slots
                .get_mut(bits as usize)
                .ok_or_else(|| Error::parse(line_no, format!("mask {bits:#x} out of range")))?;
            if slot.is_some() {
                return Err(Error::parse(line_no, format!("duplicate mask {bits:#x}")));
            }
            *slot = Some(values);
        }
        let entries = slots
            .into_iter()
            .enumerate()
            .map(|(bits, s)| {
                s.map(EnergyVector)
                    .ok_or_else(|| Error::config(format!("mask {bits:#x} missing")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_entries(pbs_beams, sbs_beams, mode, entries)
    }
}

/// Learns a table with the default enumeration cap.
pub fn learn_signatures<R: Rng + ?Sized>(
    scenario: &Scenario,
    frames_per_mask: usize,
    samples_per_frame: usize,
    rng: &mut R,
) -> Result<SignatureTable> {
    SignatureTable::learn(
        scenario,
        frames_per_mask,
        samples_per_frame,
        DEFAULT_ENUMERATION_CAP,
        rng,
    )
}

/// `argmin_B ‖x − g(B)‖²` over every PBS mask. Ties go to the lower
/// popcount, then the lower encoding.
pub fn ml_detect(x: &[f64], table: &SignatureTable) -> BeamMask {
    assert_eq!(x.len(), table.sbs_beams, "energy vector length mismatch");
    let mut best_bits = 0u32;
    let mut best_dist = f64::INFINITY;
    for (bits, g) in table.entries.chunks_exact(table.sbs_beams).enumerate() {
        let bits = bits as u32;
        let d = squared_distance(x, g);
        if d < best_dist || (d == best_dist && bits.count_ones() < best_bits.count_ones()) {
            best_dist = d;
            best_bits = bits;
        }
    }
    BeamMask::from_bits(Owner::Pbs, table.pbs_beams, best_bits)
}

/// Directionless presence flag: any PBS beam detected at all.
pub fn detect_presence(x: &[f64], table: &SignatureTable) -> bool {
    !ml_detect(x, table).is_empty()
}
