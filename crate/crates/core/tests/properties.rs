mod common;

use std::f64::consts::PI;

use cogbeam::channel::{
    beam_pattern, export_mpcs, generate_synthetic_scenario, import_mpcs, mean_path_gain, BeamConfig, FrequencyGrid,
    GenParams, LinkSet, MultipathComponent,
};
use cogbeam::coexistence::{select_sbs_beams, SectorConstraints};
use cogbeam::evaluation::{pci, pmo, throughput, IntervalOutcome};
use cogbeam::sensing::{ml_detect, EnergyVector, SignatureMode, SignatureTable};
use cogbeam::{BeamMask, Owner};
use common::*;
use proptest::prelude::*;

fn mpc() -> impl Strategy<Value = MultipathComponent> {
    (1e-6..1.0f64, 0.0..2.0 * PI, 0.0..2e-6f64, 0.0..PI).prop_map(|(g, p, d, a)| MultipathComponent::new(g, p, d, a))
}

fn grid() -> FrequencyGrid {
    FrequencyGrid::new(2.5e9, 1e6, 8).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pattern_bounded_by_beam_count(b in 1usize..=32, steer in 0.0..PI, angle in 0.0..PI) {
        let v = beam_pattern(steer, b, angle);
        prop_assert!(v.norm() <= b as f64 * (1.0 + 1e-12));
    }

    #[test]
    fn gain_scales_quadratically(mpcs in prop::collection::vec(mpc(), 1..6), c in 0.1..10.0f64, beam in 0usize..4) {
        let cfg = BeamConfig::uniform(4).unwrap();
        let base = mean_path_gain(&mpcs, beam, &cfg, &grid()).unwrap();
        let scaled: Vec<_> = mpcs.iter().map(|m| MultipathComponent { gain_mag: m.gain_mag * c, ..*m }).collect();
        let got = mean_path_gain(&scaled, beam, &cfg, &grid()).unwrap();
        prop_assert!(rel_close(got, base * c * c, 1e-10));
    }

    #[test]
    fn gain_ignores_common_phase_and_delay(
        mpcs in prop::collection::vec(mpc(), 1..6),
        phase in 0.0..2.0 * PI,
        shift in 0.0..1e-6f64,
        beam in 0usize..4,
    ) {
        let cfg = BeamConfig::uniform(4).unwrap();
        let base = mean_path_gain(&mpcs, beam, &cfg, &grid()).unwrap();
        let rotated: Vec<_> = mpcs.iter().map(|m| MultipathComponent { phase: m.phase + phase, ..*m }).collect();
        prop_assert!(rel_close(mean_path_gain(&rotated, beam, &cfg, &grid()).unwrap(), base, 1e-9));
        let delayed: Vec<_> = mpcs.iter().map(|m| MultipathComponent { delay: m.delay + shift, ..*m }).collect();
        prop_assert!(rel_close(mean_path_gain(&delayed, beam, &cfg, &grid()).unwrap(), base, 1e-9));
        let freqs = grid().frequencies().to_vec();
        let want = direct_gain(&mpcs, cfg.steer(beam).unwrap(), 4, &freqs);
        prop_assert!(rel_close(base, want, 1e-9));
    }

    #[test]
    fn detection_invariant_to_common_scale(
        entries in prop::collection::vec(prop::collection::vec(0.0..10.0f64, 3), 8),
        x in prop::collection::vec(0.0..10.0f64, 3),
        exp in -8i32..8,
    ) {
        // powers of two keep every product exact
        let c = 2f64.powi(exp);
        let table = |s: f64| {
            let e = entries.iter().map(|v| EnergyVector(v.iter().map(|g| g * s).collect())).collect();
            SignatureTable::from_entries(3, 3, SignatureMode::Exact, e).unwrap()
        };
        let scaled: Vec<f64> = x.iter().map(|v| v * c).collect();
        prop_assert_eq!(ml_detect(&x, &table(1.0)), ml_detect(&scaled, &table(c)));
    }

    #[test]
    fn signature_of_a_mask_detects_that_mask(seed in 0u64..1000) {
        let params = GenParams { pbs_beams: 4, sbs_beams: 4, num_ues: 5, num_freqs: 4, ..Default::default() };
        let s = generate_synthetic_scenario(&params, seed).unwrap();
        let table = SignatureTable::exact(&s, 20).unwrap();
        for (mask, g) in table.iter() {
            let distinct = table.iter().filter(|(m, _)| *m != mask).all(|(_, h)| h != g);
            if distinct {
                prop_assert_eq!(ml_detect(g, &table), mask);
            }
        }
    }

    #[test]
    fn optimizer_matches_oracle(seed in any::<u64>()) {
        let inst = random_instance(seed, 8);
        let got = select_sbs_beams(&inst.pbs_mask, &inst.tables, &inst.spec, &inst.scenario, 20).unwrap();
        prop_assert_eq!(got, oracle_select(&inst));
    }

    #[test]
    fn feasible_set_closed_under_submasks(seed in any::<u64>(), bits in any::<u32>()) {
        let inst = random_instance(seed, 6);
        let b = inst.tables.sbs_beams();
        let m = BeamMask::from_bits(Owner::Sbs, b, bits & ((1 << b) - 1));
        let sc = SectorConstraints::new(&inst.pbs_mask, &inst.tables, &inst.spec, &inst.scenario);
        if sc.satisfied(&m) {
            for sub in BeamMask::enumerate(Owner::Sbs, b).filter(|s| s.is_submask_of(&m)) {
                prop_assert!(sc.satisfied(&sub), "{sub} under {m}");
            }
        }
    }

    #[test]
    fn selection_is_feasible(seed in any::<u64>()) {
        let inst = random_instance(seed, 8);
        let got = select_sbs_beams(&inst.pbs_mask, &inst.tables, &inst.spec, &inst.scenario, 20).unwrap();
        let sc = SectorConstraints::new(&inst.pbs_mask, &inst.tables, &inst.spec, &inst.scenario);
        prop_assert!(got.is_empty() || sc.satisfied(&got));
    }

    #[test]
    fn mpc_export_round_trips(seed in 0u64..500) {
        let params = GenParams { num_ues: 4, num_freqs: 2, ..Default::default() };
        let s = generate_synthetic_scenario(&params, seed).unwrap();
        let links = LinkSet::from_links(import_mpcs(&export_mpcs(&s)).unwrap()).unwrap();
        prop_assert_eq!(links.pbs_to_sbs, s.pbs_to_sbs);
        prop_assert_eq!(links.pbs_to_ue, s.pbs_to_ue);
        prop_assert_eq!(links.sbs_to_ue, s.sbs_to_ue);
    }

    #[test]
    fn signature_export_round_trips(entries in prop::collection::vec(prop::collection::vec(0.0..1e3f64, 2), 4)) {
        let table = SignatureTable::from_entries(2, 2, SignatureMode::Learned, entries.into_iter().map(EnergyVector).collect()).unwrap();
        prop_assert_eq!(SignatureTable::import(&table.export()).unwrap(), table);
    }

    #[test]
    fn metrics_bounded_and_order_free(
        raw in prop::collection::vec((0u32..4, 0u32..8, 0u32..8, prop::collection::vec(0.0..5.0f64, 3)), 1..20),
        rotate in 0usize..20,
    ) {
        let spec = cogbeam::coexistence::ConstraintSpec::new(2.0, 0.1).unwrap();
        let mut outcomes: Vec<IntervalOutcome> = raw
            .iter()
            .map(|(t, gt, ch, su)| {
                let tm = BeamMask::from_bits(Owner::Pbs, 2, *t);
                IntervalOutcome {
                    true_pbs_mask: tm,
                    est_pbs_mask: tm,
                    chosen_sbs_mask: BeamMask::from_bits(Owner::Sbs, 3, *ch),
                    gt_sbs_mask: BeamMask::from_bits(Owner::Sbs, 3, *gt),
                    sector_violations: (0..2).map(|k| tm.get(k).then_some(su[k] / 5.0)).collect(),
                    su_sinr: su.clone(),
                }
            })
            .collect();
        let before = (pmo(&outcomes), pci(&outcomes, &spec), throughput(&outcomes, &spec));
        for v in [before.0, before.1, Some(before.2)].into_iter().flatten() {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        let r = rotate % outcomes.len();
        outcomes.rotate_left(r);
        let after = (pmo(&outcomes), pci(&outcomes, &spec), throughput(&outcomes, &spec));
        let close = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(x), Some(y)) => (x - y).abs() < 1e-12,
            (None, None) => true,
            _ => false,
        };
        prop_assert!(close(before.0, after.0) && close(before.1, after.1) && close(Some(before.2), Some(after.2)));
    }

    #[test]
    fn mask_bits_round_trip(len in 1usize..=32, bits in any::<u32>()) {
        let bits = if len == 32 { bits } else { bits & ((1 << len) - 1) };
        let m = BeamMask::from_bits(Owner::Pbs, len, bits);
        let on: Vec<usize> = m.iter_on().collect();
        prop_assert_eq!(BeamMask::from_indices(Owner::Pbs, len, &on), m);
        prop_assert_eq!(m.popcount(), bits.count_ones() as usize);
        prop_assert_eq!(m.to_string().len(), len);
    }
}
