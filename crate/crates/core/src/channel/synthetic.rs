//! Seeded synthetic multipath scenarios.
//!
//! Each link gets a deterministic line-of-sight path plus a Poisson number of
//! scattered paths. Scattered paths have exponentially distributed excess
//! delay, angles drawn from a wrapped Gaussian around the LOS directions, and
//! amplitudes that follow the same power law as LOS over their longer path
//! length, scaled by a random reflection coefficient.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, Poisson};
use serde::{Deserialize, Serialize};

use super::{db_to_linear, BeamConfig, FrequencyGrid, MultipathComponent, Scenario};
use crate::error::{Error, Result};

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Parameters of the synthetic scenario generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenParams {
    pub pbs_position: [f64; 2],
    pub sbs_position: [f64; 2],
    /// Array-axis orientation of each base station, radians.
    pub pbs_orientation: f64,
    pub sbs_orientation: f64,
    pub pbs_beams: usize,
    pub sbs_beams: usize,
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub num_freqs: usize,
    pub num_ues: usize,
    /// UE placement rectangle `[x_min, x_max]`, `[y_min, y_max]` in meters.
    pub region_x: [f64; 2],
    pub region_y: [f64; 2],
    /// UEs closer than this to either base station are redrawn.
    pub min_bs_distance: f64,
    pub pathloss_exponent: f64,
    /// Mean number of scattered paths per BS-UE link.
    pub ue_scatter_mean: f64,
    /// Mean number of scattered paths on the PBS-SBS link.
    pub bs_scatter_mean: f64,
    /// Obstruction loss on the PBS-SBS line-of-sight path, dB.
    pub bs_los_loss_db: f64,
    pub max_scattered_paths: usize,
    /// Mean excess delay of scattered paths, seconds.
    pub delay_spread: f64,
    /// Wrapped-Gaussian angular spread around LOS, radians.
    pub ue_angular_spread: f64,
    pub bs_angular_spread: f64,
    /// Range of scattered-path amplitude reflection coefficients.
    pub reflection_range: [f64; 2],
    pub noise_power_dbm: f64,
    /// Minimum per-UE SNR the PBS power is calibrated to.
    pub target_snr_db: f64,
    /// SBS power relative to the calibrated PBS power.
    pub power_ratio_db: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            pbs_position: [0.0, 0.0],
            sbs_position: [250.0, 40.0],
            pbs_orientation: 0.0,
            sbs_orientation: 0.0,
            pbs_beams: 8,
            sbs_beams: 8,
            carrier_hz: 2.5e9,
            bandwidth_hz: 1e6,
            num_freqs: 16,
            num_ues: 100,
            region_x: [-250.0, 500.0],
            region_y: [10.0, 400.0],
            min_bs_distance: 10.0,
            pathloss_exponent: 3.0,
            ue_scatter_mean: 6.0,
            bs_scatter_mean: 40.0,
            bs_los_loss_db: 20.0,
            max_scattered_paths: 64,
            delay_spread: 300e-9,
            ue_angular_spread: 0.3,
            bs_angular_spread: 3.0,
            reflection_range: [0.1, 0.6],
            noise_power_dbm: -107.0,
            target_snr_db: 3.0,
            power_ratio_db: -5.0,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        let [x0, x1] = self.region_x;
        let [y0, y1] = self.region_y;
        if !(x1 > x0 && y1 > y0) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::config("UE placement region is empty"));
        }
        if self.num_ues == 0 {
            return Err(Error::config("at least one UE is required"));
        }
        if self.pbs_beams == 0 || self.sbs_beams == 0 {
            return Err(Error::config("beam counts must be positive"));
        }
        if !(self.pathloss_exponent > 0.0) {
            return Err(Error::config("pathloss exponent must be positive"));
        }
        if !(self.ue_scatter_mean >= 0.0 && self.bs_scatter_mean >= 0.0) {
            return Err(Error::config("scatter means must be nonnegative"));
        }
        if !(self.bs_los_loss_db >= 0.0 && self.bs_los_loss_db.is_finite()) {
            return Err(Error::config("BS line-of-sight loss must be nonnegative"));
        }
        if !(self.delay_spread > 0.0) {
            return Err(Error::config("delay spread must be positive"));
        }
        if !(self.ue_angular_spread >= 0.0 && self.bs_angular_spread >= 0.0) {
            return Err(Error::config("angular spreads must be nonnegative"));
        }
        let [r0, r1] = self.reflection_range;
        if !(0.0 <= r0 && r0 <= r1) {
            return Err(Error::config("reflection range must satisfy 0 <= lo <= hi"));
        }
        if !self.min_bs_distance.is_finite() || self.min_bs_distance < 0.0 {
            return Err(Error::config("minimum BS distance must be nonnegative"));
        }
        for p in [self.pbs_position, self.sbs_position] {
            if !p.iter().all(|v| v.is_finite()) {
                return Err(Error::config("base-station positions must be finite"));
            }
        }
        if distance(self.pbs_position, self.sbs_position) <= 0.0 {
            return Err(Error::config("PBS and SBS must not be co-located"));
        }
        Ok(())
    }

    /// Free-space amplitude at 1 m.
    fn reference_amplitude(&self) -> f64 {
        let wavelength = SPEED_OF_LIGHT / self.carrier_hz;
        wavelength / (4.0 * PI)
    }

    /// LOS amplitude after `dist` meters: `A_0·d^{−n/2}`.
    pub fn los_amplitude(&self, dist: f64) -> f64 {
        self.reference_amplitude() * dist.powf(-self.pathloss_exponent / 2.0)
    }
}

/// Generates a scenario; identical `(params, seed)` give identical output.
///
/// PBS power is calibrated to `target_snr_db` at the weakest UE and the SBS
/// power is set from `power_ratio_db`.
pub fn generate_synthetic_scenario(params: &GenParams, seed: u64) -> Result<Scenario> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pbs = BeamConfig::uniform(params.pbs_beams)?;
    let sbs = BeamConfig::uniform(params.sbs_beams)?;
    let grid = FrequencyGrid::new(params.carrier_hz, params.bandwidth_hz, params.num_freqs)?;

    let gen = LinkGenerator::new(params)?;
    let pbs_node = Station {
        position: params.pbs_position,
        orientation: params.pbs_orientation,
    };
    let sbs_node = Station {
        position: params.sbs_position,
        orientation: params.sbs_orientation,
    };

    let pbs_to_sbs = gen.link(
        &mut rng,
        &pbs_node,
        params.sbs_position,
        Some(params.sbs_orientation),
        params.bs_scatter_mean,
        params.bs_angular_spread,
        db_to_linear(-params.bs_los_loss_db).sqrt(),
    );

    let mut positions = Vec::with_capacity(params.num_ues);
    while positions.len() < params.num_ues {
        let p = [
            rng.gen_range(params.region_x[0]..params.region_x[1]),
            rng.gen_range(params.region_y[0]..params.region_y[1]),
        ];
        if distance(p, params.pbs_position) >= params.min_bs_distance
            && distance(p, params.sbs_position) >= params.min_bs_distance
        {
            positions.push(p);
        }
    }

    let mut pbs_to_ue = Vec::with_capacity(params.num_ues);
    let mut sbs_to_ue = Vec::with_capacity(params.num_ues);
    for &p in &positions {
        pbs_to_ue.push(gen.link(
            &mut rng,
            &pbs_node,
            p,
            None,
            params.ue_scatter_mean,
            params.ue_angular_spread,
            1.0,
        ));
        sbs_to_ue.push(gen.link(
            &mut rng,
            &sbs_node,
            p,
            None,
            params.ue_scatter_mean,
            params.ue_angular_spread,
            1.0,
        ));
    }

    let mut scenario = Scenario {
        pbs,
        sbs,
        grid,
        pbs_to_sbs,
        ue_positions: Some(positions),
        pbs_to_ue,
        sbs_to_ue,
        pbs_power: 1.0,
        sbs_power: 0.0,
        noise_power: db_to_linear(params.noise_power_dbm),
    };
    scenario.pbs_power = crate::radio::calibrate_pbs_power(&scenario, db_to_linear(params.target_snr_db))?;
    scenario.set_power_ratio_db(params.power_ratio_db);
    scenario.validate()?;
    Ok(scenario)
}

struct Station {
    position: [f64; 2],
    orientation: f64,
}

impl Station {
    /// Planar bearing towards `p`, relative to the array axis.
    fn bearing(&self, p: [f64; 2]) -> f64 {
        let (dx, dy) = (p[0] - self.position[0], p[1] - self.position[1]);
        dy.atan2(dx) - self.orientation
    }
}

struct LinkGenerator<'a> {
    params: &'a GenParams,
    excess_delay: Exp<f64>,
}

impl<'a> LinkGenerator<'a> {
    fn new(params: &'a GenParams) -> Result<Self> {
        let excess_delay =
            Exp::new(1.0 / params.delay_spread).map_err(|e| Error::config(format!("delay spread: {e}")))?;
        Ok(Self { params, excess_delay })
    }

    /// `rx_orientation` is set for base-station receivers, which get a DoA.
    #[allow(clippy::too_many_arguments)]
    fn link(
        &self,
        rng: &mut ChaCha8Rng,
        tx: &Station,
        rx: [f64; 2],
        rx_orientation: Option<f64>,
        scatter_mean: f64,
        spread: f64,
        los_scale: f64,
    ) -> Vec<MultipathComponent> {
        let p = self.params;
        let dist = distance(tx.position, rx);
        let departure = tx.bearing(rx);
        let rx_station = rx_orientation.map(|orientation| Station {
            position: rx,
            orientation,
        });
        let arrival = rx_station.as_ref().map(|s| s.bearing(tx.position));

        let los = MultipathComponent {
            gain_mag: p.los_amplitude(dist) * los_scale,
            phase: 0.0,
            delay: dist / SPEED_OF_LIGHT,
            dod: fold_angle(departure),
            doa: arrival.map(fold_angle),
        };
        let mut mpcs = vec![los];

        let count = if scatter_mean > 0.0 {
            let n: f64 = Poisson::new(scatter_mean).expect("positive Poisson mean").sample(rng);
            (n as usize).min(p.max_scattered_paths)
        } else {
            0
        };
        let angle_noise = Normal::new(0.0, spread).expect("finite angular spread");
        for _ in 0..count {
            let excess = self.excess_delay.sample(rng);
            let path_len = dist + excess * SPEED_OF_LIGHT;
            let reflection = if p.reflection_range[1] > p.reflection_range[0] {
                rng.gen_range(p.reflection_range[0]..p.reflection_range[1])
            } else {
                p.reflection_range[0]
            };
            let phase = rng.gen_range(0.0..2.0 * PI);
            let dod = fold_angle(departure + angle_noise.sample(rng));
            let doa = arrival.map(|a| fold_angle(a + angle_noise.sample(rng)));
            mpcs.push(MultipathComponent {
                gain_mag: p.los_amplitude(path_len) * reflection,
                phase,
                delay: path_len / SPEED_OF_LIGHT,
                dod,
                doa,
            });
        }
        mpcs
    }
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Maps a planar bearing to the linear-array angle in `[0, π]`.
///
/// The array response depends on `cos` only, so `φ` and `−φ` coincide.
fn fold_angle(phi: f64) -> f64 {
    let wrapped = (phi + PI).rem_euclid(2.0 * PI) - PI;
    wrapped.abs()
}
