//! Per-interval online pipeline, Monte-Carlo driver and the three
//! coexistence metrics: missed opportunity (PMO), catastrophic interference
//! (PCI) and secondary throughput.
//!
//! Interval `i` of a run seeded with `seed` draws from ChaCha8 stream `i` of
//! that seed, so results do not depend on scheduling or on which methods are
//! evaluated together.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::Scenario;
use crate::coexistence::{
    bdba_decision, build_power_tables, mdba_decision, select_sbs_beams, su_sinr, ConstraintSpec, PowerTable,
    SectorConstraints,
};
use crate::error::{Error, Result};
use crate::mask::{BeamMask, Owner};
use crate::radio::{sample_pbs_activity, CrossChannel};
use crate::sensing::{detect_presence, ml_detect, SignatureTable, DEFAULT_ENUMERATION_CAP};

/// SBS transmission strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Constrained beam selection on the detected PBS mask.
    Proposed,
    /// Multi-detection binary access.
    Mdba,
    /// Binary-detection binary access.
    Bdba,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Proposed, Method::Mdba, Method::Bdba];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::Mdba => "mdba",
            Method::Bdba => "bdba",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::config(format!("unknown method `{s}` (expected proposed, mdba or bdba)")))
    }
}

/// How the SBS learns the PBS mask each interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    /// Energy detection over `samples` sensing samples per beam and tone.
    Sensed { samples: usize },
    /// Energy features equal to their expectation, as with an unbounded
    /// sensing window.
    Expected,
    /// The estimate is forced to the true mask.
    Perfect,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalOutcome {
    pub true_pbs_mask: BeamMask,
    pub est_pbs_mask: BeamMask,
    pub chosen_sbs_mask: BeamMask,
    /// Selection under perfect knowledge of the PBS mask.
    pub gt_sbs_mask: BeamMask,
    /// Violating PU fraction per PBS sector under the true PBS mask and the
    /// chosen SBS mask; `None` where the sector imposes nothing.
    pub sector_violations: Vec<Option<f64>>,
    pub su_sinr: Vec<f64>,
}

/// True and estimated PBS masks of one interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observation {
    pub true_mask: BeamMask,
    pub est_mask: BeamMask,
}

/// Everything the online phase needs for one scenario, with the beam
/// decisions for every possible PBS mask precomputed.
#[derive(Debug, Clone)]
pub struct Evaluator {
    scenario: Scenario,
    tables: PowerTable,
    signatures: SignatureTable,
    spec: ConstraintSpec,
    cross: CrossChannel,
    p_on: f64,
    selected: Vec<BeamMask>,
    mdba: Vec<BeamMask>,
}

impl Evaluator {
    pub fn new(
        scenario: Scenario,
        signatures: SignatureTable,
        spec: ConstraintSpec,
        p_on: f64,
        cap: usize,
    ) -> Result<Self> {
        scenario.validate()?;
        if !(0.0..=1.0).contains(&p_on) {
            return Err(Error::config(format!(
                "activity probability must lie in [0, 1], got {p_on}"
            )));
        }
        let bp = scenario.pbs.num_beams();
        if bp > cap {
            return Err(Error::Capacity { beams: bp, cap });
        }
        if signatures.pbs_beams() != bp || signatures.sbs_beams() != scenario.sbs.num_beams() {
            return Err(Error::config(
                "signature table does not match the scenario's beam counts",
            ));
        }
        let tables = build_power_tables(&scenario);
        let cross = CrossChannel::new(&scenario)?;
        let masks: Vec<BeamMask> = BeamMask::enumerate(Owner::Pbs, bp).collect();
        let selected = masks
            .par_iter()
            .map(|m| select_sbs_beams(m, &tables, &spec, &scenario, cap))
            .collect::<Result<Vec<_>>>()?;
        let mdba = masks
            .par_iter()
            .map(|m| mdba_decision(m, &tables, &spec, &scenario))
            .collect();
        Ok(Self {
            scenario,
            tables,
            signatures,
            spec,
            cross,
            p_on,
            selected,
            mdba,
        })
    }

    /// Exact signatures, activity probability 1/2 and the default cap.
    pub fn with_exact_signatures(scenario: Scenario, spec: ConstraintSpec) -> Result<Self> {
        let signatures = SignatureTable::exact(&scenario, DEFAULT_ENUMERATION_CAP)?;
        Self::new(scenario, signatures, spec, 0.5, DEFAULT_ENUMERATION_CAP)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn tables(&self) -> &PowerTable {
        &self.tables
    }

    pub fn signatures(&self) -> &SignatureTable {
        &self.signatures
    }

    pub fn spec(&self) -> &ConstraintSpec {
        &self.spec
    }

    /// Beam selection for an estimated PBS mask (cached).
    pub fn selection(&self, pbs_mask: &BeamMask) -> BeamMask {
        self.selected[pbs_mask.bits() as usize]
    }

    pub fn decision(&self, method: Method, est: &BeamMask) -> BeamMask {
        match method {
            Method::Proposed => self.selection(est),
            Method::Mdba => self.mdba[est.bits() as usize],
            Method::Bdba => bdba_decision(!est.is_empty(), self.scenario.sbs.num_beams()),
        }
    }

    /// Draws the PBS mask and, unless detection is perfect, senses and
    /// detects it.
    pub fn observe(&self, detection: Detection, rng: &mut ChaCha8Rng) -> Result<Observation> {
        let true_mask = sample_pbs_activity(self.p_on, self.scenario.pbs.num_beams(), rng);
        let est_mask = match detection {
            Detection::Perfect => true_mask,
            Detection::Sensed { samples } => {
                let x = self.cross.sense_energy(
                    &true_mask,
                    samples,
                    self.scenario.pbs_power,
                    self.scenario.noise_power,
                    rng,
                )?;
                ml_detect(&x, &self.signatures)
            }
            Detection::Expected => {
                let x = self
                    .cross
                    .expected_energy(&true_mask, self.scenario.pbs_power, self.scenario.noise_power)?;
                ml_detect(&x, &self.signatures)
            }
        };
        Ok(Observation { true_mask, est_mask })
    }

    /// Applies `method` to an observation and scores it against the truth.
    pub fn outcome(&self, obs: &Observation, method: Method) -> IntervalOutcome {
        let chosen = self.decision(method, &obs.est_mask);
        let gt = self.selection(&obs.true_mask);
        score(&self.scenario, &self.tables, &self.spec, obs, chosen, gt)
    }

    pub fn run_interval(&self, detection: Detection, method: Method, rng: &mut ChaCha8Rng) -> Result<IntervalOutcome> {
        let obs = self.observe(detection, rng)?;
        Ok(self.outcome(&obs, method))
    }

    /// Observations of intervals `0..intervals`, each on its own substream.
    pub fn observe_many(&self, detection: Detection, intervals: usize, seed: u64) -> Result<Vec<Observation>> {
        (0..intervals)
            .into_par_iter()
            .map(|i| self.observe(detection, &mut interval_rng(seed, i)))
            .collect()
    }

    /// Reports for each method over the same observations.
    pub fn report_many(
        &self,
        observations: &[Observation],
        methods: &[Method],
        detection: Detection,
        seed: u64,
    ) -> Result<Vec<MetricsReport>> {
        if observations.is_empty() {
            return Err(Error::config("at least one interval is required"));
        }
        Ok(methods
            .iter()
            .map(|&method| {
                let outcomes: Vec<IntervalOutcome> = observations.par_iter().map(|o| self.outcome(o, method)).collect();
                MetricsReport::from_outcomes(&outcomes, &self.spec, method, detection, seed)
            })
            .collect())
    }

    pub fn run_monte_carlo(
        &self,
        detection: Detection,
        intervals: usize,
        method: Method,
        seed: u64,
    ) -> Result<MetricsReport> {
        let obs = self.observe_many(detection, intervals, seed)?;
        Ok(self.report_many(&obs, &[method], detection, seed)?.remove(0))
    }
}

fn score(
    scenario: &Scenario,
    tables: &PowerTable,
    spec: &ConstraintSpec,
    obs: &Observation,
    chosen: BeamMask,
    gt: BeamMask,
) -> IntervalOutcome {
    let truth = SectorConstraints::new(&obs.true_mask, tables, spec, scenario);
    let su = (0..tables.num_ues())
        .map(|u| su_sinr(u, &obs.true_mask, &chosen, tables, scenario))
        .collect();
    IntervalOutcome {
        true_pbs_mask: obs.true_mask,
        est_pbs_mask: obs.est_mask,
        chosen_sbs_mask: chosen,
        gt_sbs_mask: gt,
        sector_violations: truth.fractions(&chosen),
        su_sinr: su,
    }
}

/// One interval without precomputed decisions: draws the PBS mask with
/// activity 1/2, senses `samples` samples, detects and applies `method`.
/// Matches [`Evaluator::run_interval`] draw for draw.
pub fn run_interval<R: Rng + ?Sized>(
    scenario: &Scenario,
    tables: &PowerTable,
    signatures: &SignatureTable,
    spec: &ConstraintSpec,
    samples: usize,
    method: Method,
    rng: &mut R,
) -> Result<IntervalOutcome> {
    let true_mask = sample_pbs_activity(0.5, scenario.pbs.num_beams(), rng);
    let x = CrossChannel::new(scenario)?.sense_energy(
        &true_mask,
        samples,
        scenario.pbs_power,
        scenario.noise_power,
        rng,
    )?;
    let est_mask = ml_detect(&x, signatures);
    let cap = DEFAULT_ENUMERATION_CAP;
    let chosen = match method {
        Method::Proposed => select_sbs_beams(&est_mask, tables, spec, scenario, cap)?,
        Method::Mdba => mdba_decision(&est_mask, tables, spec, scenario),
        Method::Bdba => bdba_decision(detect_presence(&x, signatures), scenario.sbs.num_beams()),
    };
    let gt = select_sbs_beams(&true_mask, tables, spec, scenario, cap)?;
    let obs = Observation { true_mask, est_mask };
    Ok(score(scenario, tables, spec, &obs, chosen, gt))
}

/// Random stream of interval `i` under `seed`.
pub fn interval_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng
}

/// Runs `intervals` intervals of one method with exact signatures.
pub fn run_monte_carlo(
    scenario: &Scenario,
    spec: &ConstraintSpec,
    samples: usize,
    intervals: usize,
    method: Method,
    seed: u64,
) -> Result<MetricsReport> {
    if intervals == 0 {
        return Err(Error::config("at least one interval is required"));
    }
    let eval = Evaluator::with_exact_signatures(scenario.clone(), *spec)?;
    eval.run_monte_carlo(Detection::Sensed { samples }, intervals, method, seed)
}

/// Ratio estimate `Σa/Σb` with its delta-method standard error over intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEstimate {
    pub value: Option<f64>,
    pub stderr: Option<f64>,
}

fn ratio_estimate(pairs: impl Iterator<Item = (f64, f64)> + Clone) -> RatioEstimate {
    let (mut a, mut b, mut n) = (0.0, 0.0, 0usize);
    for (x, y) in pairs.clone() {
        a += x;
        b += y;
        n += 1;
    }
    if b == 0.0 {
        return RatioEstimate {
            value: None,
            stderr: None,
        };
    }
    let r = a / b;
    let stderr = (n > 1).then(|| {
        let ss: f64 = pairs.map(|(x, y)| (x - r * y).powi(2)).sum();
        (ss * n as f64 / (n as f64 - 1.0)).sqrt() / b
    });
    RatioEstimate { value: Some(r), stderr }
}

fn pmo_pairs(outcomes: &[IntervalOutcome]) -> impl Iterator<Item = (f64, f64)> + Clone + '_ {
    outcomes.iter().map(|o| {
        let gt = o.gt_sbs_mask.bits();
        let missed = gt & !o.chosen_sbs_mask.bits();
        (missed.count_ones() as f64, gt.count_ones() as f64)
    })
}

fn pci_pairs<'a>(
    outcomes: &'a [IntervalOutcome],
    spec: &'a ConstraintSpec,
) -> impl Iterator<Item = (f64, f64)> + Clone + 'a {
    outcomes.iter().map(move |o| {
        let hit = o
            .true_pbs_mask
            .iter_on()
            .filter(|&k| o.sector_violations[k].is_some_and(|f| f > spec.cap))
            .count();
        (hit as f64, o.true_pbs_mask.popcount() as f64)
    })
}

fn served_fraction(o: &IntervalOutcome, spec: &ConstraintSpec) -> f64 {
    if o.su_sinr.is_empty() {
        return 0.0;
    }
    o.su_sinr.iter().filter(|&&s| s > spec.theta).count() as f64 / o.su_sinr.len() as f64
}

/// Probability of missed opportunity: admissible SBS beam slots left unused.
/// `None` when no slot was admissible.
pub fn pmo(outcomes: &[IntervalOutcome]) -> Option<f64> {
    ratio_estimate(pmo_pairs(outcomes)).value
}

/// Probability of catastrophic interference: active PBS beam-intervals whose
/// violating PU fraction exceeds the cap. `None` when no beam was ever active.
pub fn pci(outcomes: &[IntervalOutcome], spec: &ConstraintSpec) -> Option<f64> {
    ratio_estimate(pci_pairs(outcomes, spec)).value
}

/// Mean fraction of UEs served above threshold as SUs.
pub fn throughput(outcomes: &[IntervalOutcome], spec: &ConstraintSpec) -> f64 {
    if outcomes.is_empty() {
        return 0.0;
    }
    outcomes.iter().map(|o| served_fraction(o, spec)).sum::<f64>() / outcomes.len() as f64
}

fn mean_and_stderr(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Aggregated metrics of one Monte-Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub method: Method,
    /// Sensing samples; `None` unless detection was sampled.
    pub samples: Option<usize>,
    pub intervals: usize,
    pub seed: u64,
    pub pmo: Option<f64>,
    pub pci: Option<f64>,
    pub throughput: f64,
    pub detector_error_rate: f64,
    pub stderr_pmo: Option<f64>,
    pub stderr_pci: Option<f64>,
    pub stderr_thru: f64,
    pub stderr_detector: f64,
}

impl MetricsReport {
    pub fn from_outcomes(
        outcomes: &[IntervalOutcome],
        spec: &ConstraintSpec,
        method: Method,
        detection: Detection,
        seed: u64,
    ) -> Self {
        let pmo = ratio_estimate(pmo_pairs(outcomes));
        let pci = ratio_estimate(pci_pairs(outcomes, spec));
        let (thru, stderr_thru) = mean_and_stderr(outcomes.iter().map(|o| served_fraction(o, spec)));
        let (err, stderr_detector) = mean_and_stderr(
            outcomes
                .iter()
                .map(|o| f64::from(u8::from(o.est_pbs_mask != o.true_pbs_mask))),
        );
        Self {
            method,
            samples: match detection {
                Detection::Sensed { samples } => Some(samples),
                Detection::Expected | Detection::Perfect => None,
            },
            intervals: outcomes.len(),
            seed,
            pmo: pmo.value,
            pci: pci.value,
            throughput: thru,
            detector_error_rate: err,
            stderr_pmo: pmo.stderr,
            stderr_pci: pci.stderr,
            stderr_thru,
            stderr_detector,
        }
    }
}
