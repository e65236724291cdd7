//! Time-slotted PBS/SBS behavior: beam activity, UE association, sensing
//! samples at the SBS, and PBS power calibration.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::{bs_to_bs_channel, mean_path_gain, BeamConfig, FrequencyGrid, MultipathComponent, Scenario};
use crate::error::{Error, Result};
use crate::mask::{BeamMask, Owner};

/// Serving beam of every UE at each base station.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Association {
    pub pbs_beam: Vec<usize>,
    pub sbs_beam: Vec<usize>,
}

impl Association {
    /// UEs served by PBS beam `k` (the sector `U_k`).
    pub fn pbs_sector(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.pbs_beam
            .iter()
            .enumerate()
            .filter(move |(_, &c)| c == k)
            .map(|(u, _)| u)
    }

    /// Partition of all UEs into PBS sectors.
    pub fn pbs_sectors(&self, num_beams: usize) -> Vec<Vec<usize>> {
        let mut sectors = vec![Vec::new(); num_beams];
        for (u, &k) in self.pbs_beam.iter().enumerate() {
            sectors[k].push(u);
        }
        sectors
    }
}

/// Mean path gain of every (UE, beam) pair; rows are UEs.
pub(crate) fn gain_rows(links: &[Vec<MultipathComponent>], cfg: &BeamConfig, grid: &FrequencyGrid) -> Vec<Vec<f64>> {
    links
        .iter()
        .map(|mpcs| {
            (0..cfg.num_beams())
                .map(|k| mean_path_gain(mpcs, k, cfg, grid).expect("beam index in range"))
                .collect()
        })
        .collect()
}

/// Index of the largest entry; the lowest index wins ties.
pub(crate) fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (k, &g) in row.iter().enumerate().skip(1) {
        if g > row[best] {
            best = k;
        }
    }
    best
}

pub(crate) fn associate_from_gains(pbs: &[Vec<f64>], sbs: &[Vec<f64>]) -> Association {
    Association {
        pbs_beam: pbs.iter().map(|r| argmax(r)).collect(),
        sbs_beam: sbs.iter().map(|r| argmax(r)).collect(),
    }
}

/// Associates each UE with the beam of largest small-scale-averaged gain.
pub fn associate_ues(scenario: &Scenario) -> Association {
    let pbs = gain_rows(&scenario.pbs_to_ue, &scenario.pbs, &scenario.grid);
    let sbs = gain_rows(&scenario.sbs_to_ue, &scenario.sbs, &scenario.grid);
    associate_from_gains(&pbs, &sbs)
}

/// Independent Bernoulli(`p_on`) activity for each of `num_beams` PBS beams.
pub fn sample_pbs_activity<R: Rng + ?Sized>(p_on: f64, num_beams: usize, rng: &mut R) -> BeamMask {
    assert!((0.0..=1.0).contains(&p_on), "p_on must be a probability, got {p_on}");
    let mut mask = BeamMask::empty(Owner::Pbs, num_beams);
    for k in 0..num_beams {
        if rng.gen_bool(p_on) {
            mask.set(k, true);
        }
    }
    mask
}

/// Samples collected by the SBS during one sensing sub-interval.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingBlock {
    freqs: usize,
    beams: usize,
    samples_per_beam: usize,
    /// Indexed `[j][l][n]`.
    samples: Vec<Complex64>,
    /// Ground truth, kept for evaluation only.
    pub true_mask: BeamMask,
}

impl SensingBlock {
    pub fn new(
        freqs: usize,
        beams: usize,
        samples_per_beam: usize,
        samples: Vec<Complex64>,
        true_mask: BeamMask,
    ) -> Result<Self> {
        if samples_per_beam == 0 {
            return Err(Error::config("a sensing block needs at least one sample"));
        }
        if samples.len() != freqs * beams * samples_per_beam {
            return Err(Error::config(format!(
                "{} samples for a {freqs}x{beams}x{samples_per_beam} block",
                samples.len()
            )));
        }
        Ok(Self {
            freqs,
            beams,
            samples_per_beam,
            samples,
            true_mask,
        })
    }

    pub fn num_freqs(&self) -> usize {
        self.freqs
    }

    pub fn num_beams(&self) -> usize {
        self.beams
    }

    pub fn samples_per_beam(&self) -> usize {
        self.samples_per_beam
    }

    /// Samples of frequency `j`, SBS beam `l`.
    pub fn series(&self, j: usize, l: usize) -> &[Complex64] {
        let start = (j * self.beams + l) * self.samples_per_beam;
        &self.samples[start..start + self.samples_per_beam]
    }
}

/// PBS-to-SBS transfer functions for every (tone, PBS beam, SBS beam).
#[derive(Debug, Clone)]
pub struct CrossChannel {
    freqs: usize,
    pbs_beams: usize,
    sbs_beams: usize,
    h: Vec<Complex64>,
}

impl CrossChannel {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        let (freqs, pbs_beams, sbs_beams) = (
            scenario.grid.count(),
            scenario.pbs.num_beams(),
            scenario.sbs.num_beams(),
        );
        let mut h = Vec::with_capacity(freqs * pbs_beams * sbs_beams);
        for &f in scenario.grid.frequencies() {
            for k in 0..pbs_beams {
                for l in 0..sbs_beams {
                    h.push(bs_to_bs_channel(
                        &scenario.pbs_to_sbs,
                        k,
                        l,
                        f,
                        &scenario.pbs,
                        &scenario.sbs,
                    )?);
                }
            }
        }
        Ok(Self {
            freqs,
            pbs_beams,
            sbs_beams,
            h,
        })
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize, l: usize) -> Complex64 {
        self.h[(j * self.pbs_beams + k) * self.sbs_beams + l]
    }

    pub fn num_freqs(&self) -> usize {
        self.freqs
    }

    pub fn pbs_beams(&self) -> usize {
        self.pbs_beams
    }

    pub fn sbs_beams(&self) -> usize {
        self.sbs_beams
    }

    /// `Σ_j |h_{j,k,l}|²` for every (k, l), row-major in k.
    pub fn energy_coupling(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.pbs_beams * self.sbs_beams];
        for j in 0..self.freqs {
            for k in 0..self.pbs_beams {
                for l in 0..self.sbs_beams {
                    c[k * self.sbs_beams + l] += self.get(j, k, l).norm_sqr();
                }
            }
        }
        c
    }

    /// Mean energy features, `Σ_k b_k σ²_PBS Σ_j |h_{j,k,l}|² + F σ²_noise`:
    /// what an unbounded sensing window converges to.
    pub fn expected_energy(&self, mask: &BeamMask, pbs_power: f64, noise_power: f64) -> Result<Vec<f64>> {
        self.check_mask(mask)?;
        let coupling = self.energy_coupling();
        let mut x = vec![self.freqs as f64 * noise_power; self.sbs_beams];
        for k in mask.iter_on() {
            for (l, e) in x.iter_mut().enumerate() {
                *e += pbs_power * coupling[k * self.sbs_beams + l];
            }
        }
        Ok(x)
    }

    /// Draws one interval's samples in canonical order: for each tone `j`
    /// and sample `n`, the PBS symbols of the active beams (ascending `k`),
    /// then the noise of each SBS beam (ascending `l`). `visit` sees
    /// `(j, l, n, r)` in that order.
    fn draw<R: Rng + ?Sized>(
        &self,
        mask: &BeamMask,
        samples: usize,
        pbs_power: f64,
        noise_power: f64,
        rng: &mut R,
        mut visit: impl FnMut(usize, usize, usize, Complex64),
    ) {
        let active: Vec<usize> = mask.iter_on().collect();
        let s_scale = (pbs_power / 2.0).sqrt();
        let w_scale = (noise_power / 2.0).sqrt();
        let mut symbols = vec![Complex64::new(0.0, 0.0); active.len()];
        for j in 0..self.freqs {
            for n in 0..samples {
                for s in symbols.iter_mut() {
                    *s = circular_gaussian(rng, s_scale);
                }
                for l in 0..self.sbs_beams {
                    let mut r = circular_gaussian(rng, w_scale);
                    for (&k, s) in active.iter().zip(&symbols) {
                        r += self.get(j, k, l) * s;
                    }
                    visit(j, l, n, r);
                }
            }
        }
    }

    /// `r_{j,l,n} = Σ_k b_k·h_{j,k,l}·s_{j,k,n} + w_{j,l,n}`; one symbol per
    /// PBS beam drives every SBS beam.
    pub fn synthesize<R: Rng + ?Sized>(
        &self,
        mask: &BeamMask,
        samples: usize,
        pbs_power: f64,
        noise_power: f64,
        rng: &mut R,
    ) -> Result<SensingBlock> {
        self.check_mask(mask)?;
        if samples == 0 {
            return Err(Error::config("a sensing block needs at least one sample"));
        }
        let (fb, nb) = (self.sbs_beams, samples);
        let mut data = vec![Complex64::new(0.0, 0.0); self.freqs * fb * nb];
        self.draw(mask, samples, pbs_power, noise_power, rng, |j, l, n, r| {
            data[(j * fb + l) * nb + n] = r;
        });
        SensingBlock::new(self.freqs, fb, samples, data, *mask)
    }

    /// Same draws as [`CrossChannel::synthesize`], reduced straight to the
    /// per-beam energy features without materializing the block.
    pub fn sense_energy<R: Rng + ?Sized>(
        &self,
        mask: &BeamMask,
        samples: usize,
        pbs_power: f64,
        noise_power: f64,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        self.check_mask(mask)?;
        if samples == 0 {
            return Err(Error::config("a sensing block needs at least one sample"));
        }
        // Per-(j, l) partial sums keep the summation order of energy_features.
        let mut partial = vec![0.0; self.freqs * self.sbs_beams];
        let fb = self.sbs_beams;
        self.draw(mask, samples, pbs_power, noise_power, rng, |j, l, _, r| {
            partial[j * fb + l] += r.norm_sqr();
        });
        let mut energy = vec![0.0; fb];
        for j in 0..self.freqs {
            for l in 0..fb {
                energy[l] += partial[j * fb + l];
            }
        }
        let n = samples as f64;
        energy.iter_mut().for_each(|e| *e /= n);
        Ok(energy)
    }

    fn check_mask(&self, mask: &BeamMask) -> Result<()> {
        if mask.owner() != Owner::Pbs || mask.len() != self.pbs_beams {
            return Err(Error::config(format!(
                "expected a {}-beam PBS mask, got {mask:?}",
                self.pbs_beams
            )));
        }
        Ok(())
    }
}

#[inline]
fn circular_gaussian<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * scale, im * scale)
}

/// Synthesizes the SBS sensing samples of one interval.
pub fn synthesize_sensing_samples<R: Rng + ?Sized>(
    scenario: &Scenario,
    pbs_mask: &BeamMask,
    samples: usize,
    rng: &mut R,
) -> Result<SensingBlock> {
    CrossChannel::new(scenario)?.synthesize(pbs_mask, samples, scenario.pbs_power, scenario.noise_power, rng)
}

/// PBS power giving the weakest UE exactly `target_snr` on its serving beam:
/// `σ²_PBS = target·σ²_noise / min_u g(u, c_u)`.
pub fn calibrate_pbs_power(scenario: &Scenario, target_snr: f64) -> Result<f64> {
    if !(target_snr > 0.0 && target_snr.is_finite()) {
        return Err(Error::Calibration(format!(
            "target SNR must be positive, got {target_snr}"
        )));
    }
    let gains = gain_rows(&scenario.pbs_to_ue, &scenario.pbs, &scenario.grid);
    calibrate_from_gains(&gains, scenario.noise_power, target_snr)
}

pub(crate) fn calibrate_from_gains(gains: &[Vec<f64>], noise_power: f64, target_snr: f64) -> Result<f64> {
    let mut weakest: Option<(usize, f64)> = None;
    for (u, row) in gains.iter().enumerate() {
        let g = row[argmax(row)];
        if !(g > 0.0) {
            return Err(Error::Calibration(format!("UE {u} has zero gain on its serving beam")));
        }
        if weakest.is_none_or(|(_, w)| g < w) {
            weakest = Some((u, g));
        }
    }
    let (_, g_min) = weakest.ok_or_else(|| Error::Calibration("scenario has no UEs".into()))?;
    Ok(target_snr * noise_power / g_min)
}
