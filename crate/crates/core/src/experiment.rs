//! Experiment configuration, parameter sweeps and report output.
//!
//! A config file is TOML with the sections `[scenario]`, `[synthetic]`,
//! `[constraint]`, `[sensing]`, `[sweep]` and `[run]`. Every key is optional;
//! unknown keys are rejected.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{
    db_to_linear, generate_synthetic_scenario, import_mpcs, BeamConfig, FrequencyGrid, GenParams, LinkSet, Scenario,
};
use crate::coexistence::ConstraintSpec;
use crate::error::{Error, Result};
use crate::evaluation::{Detection, Evaluator, Method, MetricsReport};
use crate::radio::calibrate_pbs_power;
use crate::sensing::{SignatureTable, DEFAULT_ENUMERATION_CAP};

pub const CSV_HEADER: &str = "method,N,ratio_db,pmo,pci,throughput,detector_err,stderr_pmo,stderr_pci,stderr_thru,seed";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    /// Seed of the synthetic generator.
    pub seed: u64,
    /// Channel set to import instead of generating one. Beam counts, band,
    /// noise and calibration still come from `[synthetic]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mpc_file: Option<PathBuf>,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            seed: 4,
            mpc_file: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstraintSection {
    pub theta_db: f64,
    pub cap: f64,
    pub exclude_baseline_failures: bool,
}

impl Default for ConstraintSection {
    fn default() -> Self {
        Self {
            theta_db: 3.0,
            cap: 0.1,
            exclude_baseline_failures: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignatureSource {
    Exact,
    Learned,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensingSection {
    /// Probability that each PBS beam is on in an interval.
    pub p_on: f64,
    pub signatures: SignatureSource,
    /// Training frames per mask when signatures are learned.
    pub learn_frames: usize,
    pub learn_samples_per_frame: usize,
    /// Largest PBS beam count for exhaustive enumeration.
    pub enumeration_cap: usize,
}

impl Default for SensingSection {
    fn default() -> Self {
        Self {
            p_on: 0.5,
            signatures: SignatureSource::Exact,
            learn_frames: 200,
            learn_samples_per_frame: 10,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// Sensing sample counts.
    pub samples: Vec<usize>,
    /// SBS-to-PBS power ratios, dB.
    pub ratios_db: Vec<f64>,
    pub intervals: usize,
    pub methods: Vec<Method>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            samples: vec![1, 3, 10, 30, 100, 300, 1000],
            ratios_db: vec![-20.0, -5.0, 5.0],
            intervals: 5000,
            methods: Method::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Monte-Carlo seed.
    pub seed: u64,
    pub output: PathBuf,
    /// Fraction of an interval taken by one sensing sample. When positive the
    /// reported throughput is scaled by `1 - N·overhead`, floored at zero.
    pub sensing_overhead_per_sample: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seed: 1,
            output: PathBuf::from("results.csv"),
            sensing_overhead_per_sample: 0.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSection,
    pub synthetic: GenParams,
    pub constraint: ConstraintSection,
    pub sensing: SensingSection,
    pub sweep: SweepSection,
    pub run: RunSection,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.synthetic.validate()?;
        self.constraint_spec()?;
        let s = &self.sensing;
        if !(0.0..=1.0).contains(&s.p_on) {
            return Err(Error::config(format!(
                "sensing.p_on must lie in [0, 1], got {}",
                s.p_on
            )));
        }
        if s.signatures == SignatureSource::Learned && (s.learn_frames == 0 || s.learn_samples_per_frame == 0) {
            return Err(Error::config(
                "learned signatures need positive learn_frames and learn_samples_per_frame",
            ));
        }
        if self.synthetic.pbs_beams > s.enumeration_cap {
            return Err(Error::Capacity {
                beams: self.synthetic.pbs_beams,
                cap: s.enumeration_cap,
            });
        }
        let w = &self.sweep;
        if w.samples.is_empty() || w.samples.contains(&0) {
            return Err(Error::config(
                "sweep.samples must be a nonempty list of positive counts",
            ));
        }
        if w.ratios_db.is_empty() || !w.ratios_db.iter().all(|r| r.is_finite()) {
            return Err(Error::config(
                "sweep.ratios_db must be a nonempty list of finite values",
            ));
        }
        if w.intervals == 0 {
            return Err(Error::config("sweep.intervals must be positive"));
        }
        if w.methods.is_empty() {
            return Err(Error::config("sweep.methods must not be empty"));
        }
        let o = self.run.sensing_overhead_per_sample;
        if !(0.0..=1.0).contains(&o) {
            return Err(Error::config(format!(
                "run.sensing_overhead_per_sample must lie in [0, 1], got {o}"
            )));
        }
        Ok(())
    }

    pub fn constraint_spec(&self) -> Result<ConstraintSpec> {
        let mut spec = ConstraintSpec::from_db(self.constraint.theta_db, self.constraint.cap)?;
        spec.exclude_baseline_failures = self.constraint.exclude_baseline_failures;
        Ok(spec)
    }

    /// Canonical TOML with every default spelled out.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Parses and validates a config. Syntax errors carry line and column.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::config(e.to_string().trim_end()))?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut config = parse_config(&text)?;
    if let Some(mpc) = &config.scenario.mpc_file {
        if mpc.is_relative() {
            if let Some(dir) = path.parent() {
                config.scenario.mpc_file = Some(dir.join(mpc));
            }
        }
    }
    Ok(config)
}

/// Builds a scenario from imported links, calibrating the PBS power and
/// applying the power ratio as the generator would.
pub fn scenario_from_links(links: LinkSet, params: &GenParams) -> Result<Scenario> {
    let mut scenario = Scenario {
        pbs: BeamConfig::uniform(params.pbs_beams)?,
        sbs: BeamConfig::uniform(params.sbs_beams)?,
        grid: FrequencyGrid::new(params.carrier_hz, params.bandwidth_hz, params.num_freqs)?,
        pbs_to_sbs: links.pbs_to_sbs,
        ue_positions: None,
        pbs_to_ue: links.pbs_to_ue,
        sbs_to_ue: links.sbs_to_ue,
        pbs_power: 1.0,
        sbs_power: 0.0,
        noise_power: db_to_linear(params.noise_power_dbm),
    };
    scenario.validate()?;
    scenario.pbs_power = calibrate_pbs_power(&scenario, db_to_linear(params.target_snr_db))?;
    scenario.set_power_ratio_db(params.power_ratio_db);
    Ok(scenario)
}

/// The base scenario named by a config.
pub fn build_scenario(config: &ExperimentConfig) -> Result<Scenario> {
    match &config.scenario.mpc_file {
        None => generate_synthetic_scenario(&config.synthetic, config.scenario.seed),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            scenario_from_links(LinkSet::from_links(import_mpcs(&text)?)?, &config.synthetic)
        }
    }
}

fn build_signatures(config: &ExperimentConfig, scenario: &Scenario) -> Result<SignatureTable> {
    let s = &config.sensing;
    match s.signatures {
        SignatureSource::Exact => SignatureTable::exact(scenario, s.enumeration_cap),
        SignatureSource::Learned => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.run.seed ^ 0x5167_6e61_7475_7265);
            SignatureTable::learn(
                scenario,
                s.learn_frames,
                s.learn_samples_per_frame,
                s.enumeration_cap,
                &mut rng,
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub ratio_db: f64,
    pub report: MetricsReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub config: ExperimentConfig,
    /// Ordered by method, then N, then ratio, each in config order.
    pub rows: Vec<ResultRow>,
}

/// Runs the full sweep.
///
/// Every (N, ratio, method) cell uses the run seed, so cells share their PBS
/// activity and sensing draws and any single cell can be reproduced with
/// [`crate::evaluation::run_monte_carlo`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let spec = config.constraint_spec()?;
    let base = build_scenario(config)?;
    let signatures = build_signatures(config, &base)?;
    let sweep = &config.sweep;
    let seed = config.run.seed;

    let evaluators = sweep
        .ratios_db
        .iter()
        .map(|&r| {
            let mut s = base.clone();
            s.set_power_ratio_db(r);
            Evaluator::new(
                s,
                signatures.clone(),
                spec,
                config.sensing.p_on,
                config.sensing.enumeration_cap,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let mut cells: HashMap<(Method, usize, usize), MetricsReport> = HashMap::new();
    for &n in &sweep.samples {
        let detection = Detection::Sensed { samples: n };
        // Observations do not depend on the SBS power.
        let observations = evaluators[0].observe_many(detection, sweep.intervals, seed)?;
        for (ri, eval) in evaluators.iter().enumerate() {
            let reports = eval.report_many(&observations, &sweep.methods, detection, seed)?;
            for (m, mut report) in sweep.methods.iter().zip(reports) {
                let overhead = config.run.sensing_overhead_per_sample;
                if overhead > 0.0 {
                    let keep = (1.0 - n as f64 * overhead).max(0.0);
                    report.throughput *= keep;
                    report.stderr_thru *= keep;
                }
                cells.insert((*m, n, ri), report);
            }
        }
    }

    let mut rows = Vec::with_capacity(cells.len());
    for &m in &sweep.methods {
        for &n in &sweep.samples {
            for (ri, &r) in sweep.ratios_db.iter().enumerate() {
                if let Some(report) = cells.remove(&(m, n, ri)) {
                    rows.push(ResultRow { ratio_db: r, report });
                }
            }
        }
    }
    Ok(ResultTable {
        config: config.clone(),
        rows,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ResultTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let r = &row.report;
            let n = r.samples.map(|n| n.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.method,
                n,
                row.ratio_db,
                opt(r.pmo),
                opt(r.pci),
                r.throughput,
                r.detector_error_rate,
                opt(r.stderr_pmo),
                opt(r.stderr_pci),
                r.stderr_thru,
                r.seed
            );
        }
        out
    }

    /// Row with the highest throughput for `method` at sample count `n`.
    pub fn best_ratio(&self, method: Method, n: usize) -> Option<&ResultRow> {
        self.rows
            .iter()
            .filter(|r| r.report.method == method && r.report.samples == Some(n))
            .fold(None, |best: Option<&ResultRow>, r| match best {
                Some(b) if b.report.throughput >= r.report.throughput => Some(b),
                _ => Some(r),
            })
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let _ = writeln!(
            out,
            "intervals {}  seed {}  theta {} dB  cap {}",
            c.sweep.intervals, c.run.seed, c.constraint.theta_db, c.constraint.cap
        );
        for &m in &c.sweep.methods {
            let _ = writeln!(out, "\n[{m}]");
            for &n in &c.sweep.samples {
                if let Some(best) = self.best_ratio(m, n) {
                    let _ = writeln!(
                        out,
                        "N={n:<6} best ratio {} dB  throughput {:.6}",
                        best.ratio_db, best.report.throughput
                    );
                }
            }
            let rows: Vec<&ResultRow> = self.rows.iter().filter(|r| r.report.method == m).collect();
            let metrics: [(&str, Metric); 3] = [
                ("pmo", |r| r.pmo),
                ("pci", |r| r.pci),
                ("throughput", |r| Some(r.throughput)),
            ];
            for (name, get) in metrics {
                if let Some((lo, hi)) = extrema(&rows, get) {
                    let _ = writeln!(out, "{name:<10} min {}  max {}", describe(lo, get), describe(hi, get));
                }
            }
        }
        let all: Vec<&ResultRow> = self.rows.iter().collect();
        if let Some((_, top)) = extrema(&all, |r| Some(r.throughput)) {
            let _ = writeln!(
                out,
                "\nthroughput is highest at ratio {} dB ({}, N={})",
                top.ratio_db,
                top.report.method,
                top.report.samples.map(|n| n.to_string()).unwrap_or_default()
            );
        }
        out
    }
}

type Metric = fn(&MetricsReport) -> Option<f64>;

/// First rows attaining the minimum and maximum of a defined metric.
fn extrema<'a>(
    rows: &[&'a ResultRow],
    get: impl Fn(&MetricsReport) -> Option<f64>,
) -> Option<(&'a ResultRow, &'a ResultRow)> {
    let mut found: Option<(&ResultRow, f64, &ResultRow, f64)> = None;
    for &r in rows {
        let Some(v) = get(&r.report) else { continue };
        found = Some(match found {
            None => (r, v, r, v),
            Some((lo, lv, hi, hv)) => {
                let (lo, lv) = if v < lv { (r, v) } else { (lo, lv) };
                let (hi, hv) = if v > hv { (r, v) } else { (hi, hv) };
                (lo, lv, hi, hv)
            }
        });
    }
    found.map(|(lo, _, hi, _)| (lo, hi))
}

fn describe(row: &ResultRow, get: impl Fn(&MetricsReport) -> Option<f64>) -> String {
    format!(
        "{:.6} (N={}, {} dB)",
        get(&row.report).unwrap_or(f64::NAN),
        row.report.samples.map(|n| n.to_string()).unwrap_or_default(),
        row.ratio_db
    )
}

/// Paths written by [`emit_report`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportPaths {
    pub csv: PathBuf,
    pub summary: PathBuf,
    pub config: PathBuf,
}

/// Writes the CSV to `path`, a text summary to `<stem>.summary.txt` and the
/// effective config to `<stem>.config.toml`.
pub fn emit_report(table: &ResultTable, path: &Path) -> Result<ReportPaths> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let paths = ReportPaths {
        csv: path.to_path_buf(),
        summary: path.with_extension("summary.txt"),
        config: path.with_extension("config.toml"),
    };
    fs::write(&paths.csv, table.to_csv()).map_err(|e| Error::io(&paths.csv, e))?;
    fs::write(&paths.summary, table.summary()).map_err(|e| Error::io(&paths.summary, e))?;
    fs::write(&paths.config, table.config.to_toml()).map_err(|e| Error::io(&paths.config, e))?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c.synthetic.pbs_beams, 8);
        assert_eq!(c.synthetic.sbs_beams, 8);
        assert_eq!(c.synthetic.num_freqs, 16);
        assert_eq!(c.synthetic.carrier_hz, 2.5e9);
        assert_eq!(c.synthetic.bandwidth_hz, 1e6);
        assert_eq!(c.sensing.p_on, 0.5);
        assert_eq!(c.constraint.theta_db, 3.0);
        assert_eq!(c.constraint.cap, 0.1);
        assert_eq!(c.sweep.intervals, 5000);
        assert_eq!(c.sensing.signatures, SignatureSource::Exact);
    }

    #[test]
    fn canonical_round_trip() {
        let mut c = ExperimentConfig::default();
        c.sweep.ratios_db = vec![-3.5, 0.0];
        c.sweep.methods = vec![Method::Bdba];
        c.scenario.mpc_file = Some("chan.mpc".into());
        let text = c.to_toml();
        assert_eq!(parse_config(&text).unwrap(), c);
    }

    #[test]
    fn unknown_key_names_key_and_line() {
        let err = parse_config("[sweep]\nintervals = 10\nintervalz = 3\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("intervalz"), "{err}");
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn misspelled_key_is_named() {
        let err = parse_config("[synthetic]\npowr_ratio = -5.0\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("powr_ratio"), "{err}");
    }

    fn one_row(pmo: Option<f64>) -> ResultTable {
        let report = MetricsReport {
            method: Method::Mdba,
            samples: Some(10),
            intervals: 3,
            seed: 5,
            pmo,
            pci: Some(0.25),
            throughput: 0.125,
            detector_error_rate: 0.5,
            stderr_pmo: pmo.map(|_| 0.0),
            stderr_pci: Some(0.1),
            stderr_thru: 0.01,
            stderr_detector: 0.2,
        };
        ResultTable {
            config: ExperimentConfig::default(),
            rows: vec![ResultRow { ratio_db: -5.0, report }],
        }
    }

    #[test]
    fn one_row_gives_two_lines() {
        let csv = one_row(Some(0.5)).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines, [CSV_HEADER, "mdba,10,-5,0.5,0.25,0.125,0.5,0,0.1,0.01,5"]);
    }

    #[test]
    fn undefined_pmo_is_an_empty_field() {
        let csv = one_row(None).to_csv();
        assert_eq!(csv.lines().nth(1), Some("mdba,10,-5,,0.25,0.125,0.5,,0.1,0.01,5"));
    }

    #[test]
    fn summary_names_best_ratio() {
        let mut c = small_config();
        c.sweep.ratios_db = vec![-20.0, -5.0, 5.0];
        c.sweep.samples = vec![50];
        let t = run_experiment(&c).unwrap();
        let best = t.best_ratio(Method::Proposed, 50).unwrap();
        let summary = t.summary();
        assert!(
            summary.contains(&format!("N=50     best ratio {} dB", best.ratio_db)),
            "{summary}"
        );
        assert!(summary.contains("throughput is highest at ratio"));
        assert!(summary.contains("pmo        min"));
    }

    #[test]
    fn emit_report_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let t = one_row(None);
        let paths = emit_report(&t, &dir.path().join("nested/run.csv")).unwrap();
        assert_eq!(fs::read_to_string(&paths.csv).unwrap(), t.to_csv());
        assert_eq!(
            parse_config(&fs::read_to_string(&paths.config).unwrap()).unwrap(),
            t.config
        );
        assert!(fs::read_to_string(&paths.summary).unwrap().contains("[proposed]"));
        assert!(emit_report(&t, Path::new("/proc/forbidden/run.csv")).is_err());
    }

    #[test]
    fn bad_values_rejected() {
        assert!(parse_config("[sensing]\np_on = 1.5\n").is_err());
        assert!(parse_config("[sweep]\nsamples = [0]\n").is_err());
        assert!(parse_config("[sweep]\nmethods = []\n").is_err());
        assert!(parse_config("[sweep]\nmethods = [\"greedy\"]\n").is_err());
        assert!(parse_config("[constraint]\ncap = -0.1\n").is_err());
        assert!(parse_config("[synthetic]\npbs_beams = 21\n").is_err());
        assert!(parse_config("[sweep]\nintervals = \"many\"\n").is_err());
    }

    fn small_config() -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.synthetic.pbs_beams = 3;
        c.synthetic.sbs_beams = 3;
        c.synthetic.num_freqs = 4;
        c.synthetic.num_ues = 20;
        c.sweep.samples = vec![2, 20];
        c.sweep.ratios_db = vec![-10.0, 0.0];
        c.sweep.intervals = 50;
        c
    }

    #[test]
    fn rows_are_ordered_and_reproducible() {
        let c = small_config();
        let a = run_experiment(&c).unwrap();
        let b = run_experiment(&c).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.rows.len(), 3 * 2 * 2);
        let keys: Vec<(Method, Option<usize>, f64)> = a
            .rows
            .iter()
            .map(|r| (r.report.method, r.report.samples, r.ratio_db))
            .collect();
        assert_eq!(keys[0], (Method::Proposed, Some(2), -10.0));
        assert_eq!(keys[1], (Method::Proposed, Some(2), 0.0));
        assert_eq!(keys[2], (Method::Proposed, Some(20), -10.0));
        assert_eq!(keys[4].0, Method::Mdba);
    }

    #[test]
    fn csv_shape() {
        let t = run_experiment(&small_config()).unwrap();
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        for line in lines {
            assert_eq!(line.split(',').count(), 11, "{line}");
        }
    }

    #[test]
    fn sensing_overhead_scales_throughput() {
        let mut c = small_config();
        let plain = run_experiment(&c).unwrap();
        c.run.sensing_overhead_per_sample = 0.01;
        let charged = run_experiment(&c).unwrap();
        for (p, q) in plain.rows.iter().zip(&charged.rows) {
            let n = p.report.samples.unwrap() as f64;
            assert!((q.report.throughput - p.report.throughput * (1.0 - 0.01 * n)).abs() < 1e-12);
        }
    }

    #[test]
    fn imported_scenario_matches_generated() {
        let c = small_config();
        let generated = build_scenario(&c).unwrap();
        let text = crate::channel::export_mpcs(&generated);
        let links = LinkSet::from_links(import_mpcs(&text).unwrap()).unwrap();
        let imported = scenario_from_links(links, &c.synthetic).unwrap();
        assert_eq!(imported.pbs_to_ue, generated.pbs_to_ue);
        assert_eq!(imported.pbs_power, generated.pbs_power);
        assert_eq!(imported.sbs_power, generated.sbs_power);
    }

    #[test]
    fn learned_signatures_run() {
        let mut c = small_config();
        c.sensing.signatures = SignatureSource::Learned;
        c.sensing.learn_frames = 5;
        let t = run_experiment(&c).unwrap();
        assert!(t.rows.iter().all(|r| r.report.detector_error_rate <= 1.0));
    }
}
