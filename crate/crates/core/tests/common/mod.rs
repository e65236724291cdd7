//! Independent oracles and random instances shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use cogbeam::channel::{generate_synthetic_scenario, GenParams, MultipathComponent, Scenario};
use cogbeam::coexistence::{build_power_tables, pu_sinr, ConstraintSpec, PowerTable};
use cogbeam::{BeamMask, Owner};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random small scenario with a constraint spec and a PBS mask.
pub struct Instance {
    pub scenario: Scenario,
    pub tables: PowerTable,
    pub spec: ConstraintSpec,
    pub pbs_mask: BeamMask,
}

pub fn random_instance(seed: u64, max_sbs_beams: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = GenParams {
        pbs_beams: rng.gen_range(1..=6),
        sbs_beams: rng.gen_range(1..=max_sbs_beams),
        num_ues: rng.gen_range(3..=30),
        num_freqs: rng.gen_range(1..=4),
        power_ratio_db: rng.gen_range(-20.0..20.0),
        ..GenParams::default()
    };
    let scenario = generate_synthetic_scenario(&params, rng.gen()).unwrap();
    let mut spec = ConstraintSpec::from_db(
        rng.gen_range(-5.0..10.0),
        [0.0, 0.05, 0.1, 0.25, 0.5, 1.0][rng.gen_range(0..6)],
    )
    .unwrap();
    spec.exclude_baseline_failures = rng.gen_bool(0.7);
    let bits = rng.gen_range(0..1u32 << params.pbs_beams);
    Instance {
        tables: build_power_tables(&scenario),
        scenario,
        spec,
        pbs_mask: BeamMask::from_bits(Owner::Pbs, params.pbs_beams, bits),
    }
}

/// PUs that count towards each active sector, by brute force.
pub fn counted_sectors(inst: &Instance) -> Vec<Vec<usize>> {
    let t = &inst.tables;
    let silent = BeamMask::empty(Owner::Sbs, t.sbs_beams());
    inst.pbs_mask
        .iter_on()
        .map(|k| {
            (0..t.num_ues())
                .filter(|&u| t.association.pbs_beam[u] == k)
                .filter(|&u| {
                    !inst.spec.exclude_baseline_failures
                        || pu_sinr(u, &inst.pbs_mask, &silent, t, &inst.scenario) >= inst.spec.theta
                })
                .collect::<Vec<_>>()
        })
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn oracle_feasible(inst: &Instance, sectors: &[Vec<usize>], sbs: &BeamMask) -> bool {
    sectors.iter().all(|sec| {
        let bad = sec
            .iter()
            .filter(|&&u| pu_sinr(u, &inst.pbs_mask, sbs, &inst.tables, &inst.scenario) < inst.spec.theta)
            .count();
        bad == 0 || (bad as f64 / sec.len() as f64) < inst.spec.cap
    })
}

/// Exhaustive selection: most beams, then highest SU-side gain, then lowest
/// encoding; silent when nothing else is feasible.
pub fn oracle_select(inst: &Instance) -> BeamMask {
    let b = inst.tables.sbs_beams();
    let sectors = counted_sectors(inst);
    let totals: Vec<f64> = (0..b)
        .map(|l| inst.tables.sbs_gain.iter().map(|row| row[l]).sum())
        .collect();
    let mut best: Option<(usize, f64, u32)> = None;
    for bits in 1..(1u32 << b) {
        let m = BeamMask::from_bits(Owner::Sbs, b, bits);
        if !oracle_feasible(inst, &sectors, &m) {
            continue;
        }
        let ones = bits.count_ones() as usize;
        let score: f64 = (0..b).filter(|&l| m.get(l)).map(|l| totals[l]).sum();
        let better = match best {
            None => true,
            Some((o, s, _)) => ones > o || (ones == o && score > s),
        };
        if better {
            best = Some((ones, score, bits));
        }
    }
    BeamMask::from_bits(Owner::Sbs, b, best.map_or(0, |(_, _, bits)| bits))
}

/// Array factor written out from its definition.
pub fn array_factor(steer: f64, b: usize, angle: f64) -> Complex64 {
    (1..=b)
        .map(|n| Complex64::from_polar(1.0, n as f64 * PI * (angle.cos() - steer.cos())))
        .sum()
}

pub fn tones(scenario: &Scenario) -> Vec<f64> {
    let g = &scenario.grid;
    let f = g.count() as f64;
    (0..g.count())
        .map(|j| g.carrier() - g.bandwidth() / 2.0 + (j as f64 + 0.5) * g.bandwidth() / f)
        .collect()
}

/// `(1/F) Σ_j |Σ_m α_m e^{−i2πτ_m f_j} β(dod_m)|²` by direct summation.
pub fn direct_gain(mpcs: &[MultipathComponent], steer: f64, b: usize, freqs: &[f64]) -> f64 {
    freqs
        .iter()
        .map(|&f| {
            mpcs.iter()
                .map(|m| {
                    Complex64::from_polar(m.gain_mag, m.phase - 2.0 * PI * m.delay * f) * array_factor(steer, b, m.dod)
                })
                .sum::<Complex64>()
                .norm_sqr()
        })
        .sum::<f64>()
        / freqs.len() as f64
}

pub fn argmax_lowest(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}
