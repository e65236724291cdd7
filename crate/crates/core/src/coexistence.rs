//! PU/SU SINR from additive power tables, the per-sector interference
//! constraint, SBS beam selection and the two binary-access baselines.

use std::fmt::Write as _;

use crate::channel::{db_to_linear, Scenario};
use crate::error::{Error, Result};
use crate::mask::{BeamMask, Owner};
use crate::radio::{associate_from_gains, gain_rows, Association};

/// Frequency-averaged path gains of every (UE, beam) pair from both stations.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTable {
    pub pbs_gain: Vec<Vec<f64>>,
    pub sbs_gain: Vec<Vec<f64>>,
    pub association: Association,
    sectors: Vec<Vec<usize>>,
    /// `Σ_u sbs_gain[u][l]`, the selection tie-break score per beam.
    sbs_beam_totals: Vec<f64>,
}

impl PowerTable {
    /// Builds a table from precomputed gains; associations are the row argmaxes.
    pub fn from_gains(pbs_gain: Vec<Vec<f64>>, sbs_gain: Vec<Vec<f64>>) -> Result<Self> {
        if pbs_gain.len() != sbs_gain.len() {
            return Err(Error::config("PBS and SBS gain tables cover different UE counts"));
        }
        let width = |rows: &[Vec<f64>]| rows.first().map_or(0, Vec::len);
        let (bp, bs) = (width(&pbs_gain), width(&sbs_gain));
        if bp == 0 || bs == 0 && !sbs_gain.is_empty() {
            return Err(Error::config("gain tables need at least one beam"));
        }
        for row in pbs_gain.iter().chain(&sbs_gain) {
            if row.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
                return Err(Error::config("gains must be finite and nonnegative"));
            }
        }
        if pbs_gain.iter().any(|r| r.len() != bp) || sbs_gain.iter().any(|r| r.len() != bs) {
            return Err(Error::config("ragged gain table"));
        }
        let association = associate_from_gains(&pbs_gain, &sbs_gain);
        let sectors = association.pbs_sectors(bp);
        let mut sbs_beam_totals = vec![0.0; bs];
        for row in &sbs_gain {
            for (t, g) in sbs_beam_totals.iter_mut().zip(row) {
                *t += g;
            }
        }
        Ok(Self {
            pbs_gain,
            sbs_gain,
            association,
            sectors,
            sbs_beam_totals,
        })
    }

    pub fn num_ues(&self) -> usize {
        self.pbs_gain.len()
    }

    pub fn pbs_beams(&self) -> usize {
        self.sectors.len()
    }

    pub fn sbs_beams(&self) -> usize {
        self.sbs_beam_totals.len()
    }

    /// UEs served by PBS beam `k`.
    pub fn sector(&self, k: usize) -> &[usize] {
        &self.sectors[k]
    }

    /// `ue,station,beam,gain,serving` rows for debugging.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ue,station,beam,gain,serving\n");
        for u in 0..self.num_ues() {
            for (station, rows, serving) in [
                ("pbs", &self.pbs_gain, self.association.pbs_beam[u]),
                ("sbs", &self.sbs_gain, self.association.sbs_beam[u]),
            ] {
                for (k, g) in rows[u].iter().enumerate() {
                    let _ = writeln!(out, "{u},{station},{k},{g},{}", u8::from(k == serving));
                }
            }
        }
        out
    }
}

/// Exact frequency-averaged gain tables for a scenario.
pub fn build_power_tables(scenario: &Scenario) -> PowerTable {
    let pbs = gain_rows(&scenario.pbs_to_ue, &scenario.pbs, &scenario.grid);
    let sbs = gain_rows(&scenario.sbs_to_ue, &scenario.sbs, &scenario.grid);
    PowerTable::from_gains(pbs, sbs).expect("channel gains are finite")
}

/// PU protection rule: in every active PBS sector, the fraction of PUs below
/// `theta` must stay strictly under `cap`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintSpec {
    /// Linear SINR threshold.
    pub theta: f64,
    /// Maximum violating fraction per sector, in `[0, 1]`.
    pub cap: f64,
    /// Drop PUs already below `theta` without any SBS transmission from the
    /// sector accounting (the PBS scheduler is assumed not to serve them).
    pub exclude_baseline_failures: bool,
}

impl ConstraintSpec {
    pub fn new(theta: f64, cap: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::config(format!("SINR threshold must be positive, got {theta}")));
        }
        if !(0.0..=1.0).contains(&cap) {
            return Err(Error::config(format!("violation cap must lie in [0, 1], got {cap}")));
        }
        Ok(Self {
            theta,
            cap,
            exclude_baseline_failures: true,
        })
    }

    pub fn from_db(theta_db: f64, cap: f64) -> Result<Self> {
        Self::new(db_to_linear(theta_db), cap)
    }
}

#[inline]
fn masked_sum(row: &[f64], mask: &BeamMask, skip: Option<usize>) -> f64 {
    let mut acc = 0.0;
    for k in mask.iter_on() {
        if Some(k) != skip {
            acc += row[k];
        }
    }
    acc
}

/// Power terms of one PU under a PBS mask; SBS interference added later.
#[derive(Debug, Clone, Copy)]
struct PuTerms {
    signal: f64,
    pbs_interference: f64,
}

fn pu_terms(u: usize, pbs_mask: &BeamMask, tables: &PowerTable, scenario: &Scenario) -> PuTerms {
    let c = tables.association.pbs_beam[u];
    let row = &tables.pbs_gain[u];
    let signal = if pbs_mask.get(c) {
        scenario.pbs_power * row[c]
    } else {
        0.0
    };
    PuTerms {
        signal,
        pbs_interference: scenario.pbs_power * masked_sum(row, pbs_mask, Some(c)),
    }
}

#[inline]
fn sinr(signal: f64, interference_a: f64, interference_b: f64, noise: f64) -> f64 {
    signal / (interference_a + interference_b + noise)
}

#[inline]
fn pu_sinr_from_terms(t: &PuTerms, u: usize, sbs_mask: &BeamMask, tables: &PowerTable, scenario: &Scenario) -> f64 {
    let sbs_interference = scenario.sbs_power * masked_sum(&tables.sbs_gain[u], sbs_mask, None);
    sinr(t.signal, t.pbs_interference, sbs_interference, scenario.noise_power)
}

/// SINR of UE `u` as a PU; zero when its serving PBS beam is OFF.
pub fn pu_sinr(u: usize, pbs_mask: &BeamMask, sbs_mask: &BeamMask, tables: &PowerTable, scenario: &Scenario) -> f64 {
    let t = pu_terms(u, pbs_mask, tables, scenario);
    pu_sinr_from_terms(&t, u, sbs_mask, tables, scenario)
}

/// SINR of UE `u` as an SU: the PBS and SBS roles are swapped.
pub fn su_sinr(u: usize, pbs_mask: &BeamMask, sbs_mask: &BeamMask, tables: &PowerTable, scenario: &Scenario) -> f64 {
    let c = tables.association.sbs_beam[u];
    let row = &tables.sbs_gain[u];
    let signal = if sbs_mask.get(c) {
        scenario.sbs_power * row[c]
    } else {
        0.0
    };
    let sbs_interference = scenario.sbs_power * masked_sum(row, sbs_mask, Some(c));
    let pbs_interference = scenario.pbs_power * masked_sum(&tables.pbs_gain[u], pbs_mask, None);
    sinr(signal, sbs_interference, pbs_interference, scenario.noise_power)
}

/// The constraint prepared for one PBS mask: per active sector, the PUs that
/// count and their SBS-independent power terms.
#[derive(Debug, Clone)]
pub struct SectorConstraints<'a> {
    tables: &'a PowerTable,
    scenario: &'a Scenario,
    spec: ConstraintSpec,
    /// `(sector, counted PUs)`; only active sectors with at least one PU.
    sectors: Vec<(usize, Vec<(usize, PuTerms)>)>,
}

impl<'a> SectorConstraints<'a> {
    pub fn new(pbs_mask: &BeamMask, tables: &'a PowerTable, spec: &ConstraintSpec, scenario: &'a Scenario) -> Self {
        let empty_sbs = BeamMask::empty(Owner::Sbs, tables.sbs_beams());
        let mut sectors = Vec::new();
        for k in pbs_mask.iter_on() {
            let counted: Vec<(usize, PuTerms)> = tables
                .sector(k)
                .iter()
                .map(|&u| (u, pu_terms(u, pbs_mask, tables, scenario)))
                .filter(|(u, t)| {
                    !spec.exclude_baseline_failures
                        || pu_sinr_from_terms(t, *u, &empty_sbs, tables, scenario) >= spec.theta
                })
                .collect();
            if !counted.is_empty() {
                sectors.push((k, counted));
            }
        }
        Self {
            tables,
            scenario,
            spec: *spec,
            sectors,
        }
    }

    fn violations(&self, pus: &[(usize, PuTerms)], sbs_mask: &BeamMask) -> usize {
        pus.iter()
            .filter(|(u, t)| pu_sinr_from_terms(t, *u, sbs_mask, self.tables, self.scenario) < self.spec.theta)
            .count()
    }

    /// Violating fraction per PBS beam; `None` where the sector imposes
    /// nothing (beam OFF, or no PU counted).
    pub fn fractions(&self, sbs_mask: &BeamMask) -> Vec<Option<f64>> {
        let mut out = vec![None; self.tables.pbs_beams()];
        for (k, pus) in &self.sectors {
            out[*k] = Some(self.violations(pus, sbs_mask) as f64 / pus.len() as f64);
        }
        out
    }

    pub fn satisfied(&self, sbs_mask: &BeamMask) -> bool {
        self.sectors.iter().all(|(_, pus)| {
            let n = pus.len() as f64;
            let mut bad = 0usize;
            for (u, t) in pus {
                if pu_sinr_from_terms(t, *u, sbs_mask, self.tables, self.scenario) < self.spec.theta {
                    bad += 1;
                    if !within_cap(bad as f64 / n, self.spec.cap) {
                        return false;
                    }
                }
            }
            true
        })
    }
}

/// `fraction < cap`, except that a sector with no violation always passes
/// (so a zero cap means "no PU below threshold").
#[inline]
pub fn within_cap(fraction: f64, cap: f64) -> bool {
    fraction == 0.0 || fraction < cap
}

/// Per-sector violating fractions of `sbs_mask` under `pbs_mask`.
pub fn sector_violations(
    pbs_mask: &BeamMask,
    sbs_mask: &BeamMask,
    tables: &PowerTable,
    spec: &ConstraintSpec,
    scenario: &Scenario,
) -> Vec<Option<f64>> {
    SectorConstraints::new(pbs_mask, tables, spec, scenario).fractions(sbs_mask)
}

/// True iff every active PBS sector keeps its violating PU fraction below the cap.
pub fn constraint_satisfied(
    pbs_mask: &BeamMask,
    sbs_mask: &BeamMask,
    tables: &PowerTable,
    spec: &ConstraintSpec,
    scenario: &Scenario,
) -> bool {
    SectorConstraints::new(pbs_mask, tables, spec, scenario).satisfied(sbs_mask)
}

/// PUs that miss `theta` under `pbs_mask` with the SBS silent.
pub fn baseline_failures(
    pbs_mask: &BeamMask,
    tables: &PowerTable,
    spec: &ConstraintSpec,
    scenario: &Scenario,
) -> Vec<usize> {
    let silent = BeamMask::empty(Owner::Sbs, tables.sbs_beams());
    pbs_mask
        .iter_on()
        .flat_map(|k| tables.sector(k).iter().copied())
        .filter(|&u| pu_sinr(u, pbs_mask, &silent, tables, scenario) < spec.theta)
        .collect()
}

/// Masks of `len` bits with exactly `ones` set, ascending (Gosper's hack).
fn masks_with_popcount(len: usize, ones: usize) -> impl Iterator<Item = u32> {
    let limit = 1u64 << len;
    let mut next = if ones == 0 {
        Some(0u64)
    } else {
        Some((1u64 << ones) - 1)
    };
    std::iter::from_fn(move || {
        let cur = next?;
        if cur >= limit {
            return None;
        }
        next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            Some((((r ^ cur) >> 2) / c) | r)
        };
        Some(cur as u32)
    })
}

fn selection_score(mask: &BeamMask, tables: &PowerTable) -> f64 {
    masked_sum(&tables.sbs_beam_totals, mask, None)
}

/// Largest feasible SBS mask under `pbs_mask_est`; ties go to the larger
/// total SU-side gain, then the lower encoding. Always returns a mask: the
/// silent SBS is the fallback.
pub fn select_sbs_beams(
    pbs_mask_est: &BeamMask,
    tables: &PowerTable,
    spec: &ConstraintSpec,
    scenario: &Scenario,
    cap: usize,
) -> Result<BeamMask> {
    let b = tables.sbs_beams();
    if b > cap {
        return Err(Error::Capacity { beams: b, cap });
    }
    let constraints = SectorConstraints::new(pbs_mask_est, tables, spec, scenario);
    for ones in (1..=b).rev() {
        let mut best: Option<(BeamMask, f64)> = None;
        for bits in masks_with_popcount(b, ones) {
            let mask = BeamMask::from_bits(Owner::Sbs, b, bits);
            if !constraints.satisfied(&mask) {
                continue;
            }
            let score = selection_score(&mask, tables);
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((mask, score));
            }
        }
        if let Some((mask, _)) = best {
            return Ok(mask);
        }
    }
    Ok(BeamMask::empty(Owner::Sbs, b))
}

/// Multi-detection binary access: all beams if that is feasible, else none.
pub fn mdba_decision(
    pbs_mask_est: &BeamMask,
    tables: &PowerTable,
    spec: &ConstraintSpec,
    scenario: &Scenario,
) -> BeamMask {
    let all = BeamMask::full(Owner::Sbs, tables.sbs_beams());
    if constraint_satisfied(pbs_mask_est, &all, tables, spec, scenario) {
        all
    } else {
        BeamMask::empty(Owner::Sbs, tables.sbs_beams())
    }
}

/// Binary-detection binary access: all beams iff no PBS activity was detected.
pub fn bdba_decision(presence: bool, sbs_beams: usize) -> BeamMask {
    if presence {
        BeamMask::empty(Owner::Sbs, sbs_beams)
    } else {
        BeamMask::full(Owner::Sbs, sbs_beams)
    }
}
