//! Scenario runner: dispatches a [`RunConfig`] to one thought experiment,
//! then writes the report, plot data and a manifest.
//!
//! Output files in the run directory:
//!
//! | file | content |
//! |---|---|
//! | `report.json` | scenario report, deterministic given the config |
//! | `records.jsonl` | one measurement record per trial (screen and decay runs) |
//! | `*.csv` | plot data, see [`emit_plot_data`] |
//! | `manifest.json` | config echo, seed, version, wall time, SHA-256 of every other file |

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

use crate::config::{RunConfig, ScenarioId, ScreenProfile};
use crate::epr::{self, AnalyzerSetting, ChshEstimate, Detector, FrameOrdering};
use crate::lorentz_action::{self, SpacetimeSampleSet};
use crate::reduction::{self, Branch, DetectorArray, MeasurementRecord};
use crate::seeding::{derive_seed, stream_id};
use crate::spacetime::{BoostParameters, FourVector};
use crate::twoparticle::{self, AngularProfile, DecayGeometry, DecayReport, HemisphereBins, Hit, SWaveState};
use crate::wavepacket::{self, MomentumGrid};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error(transparent)]
    Wavepacket(#[from] crate::wavepacket::WavepacketError),
    #[error(transparent)]
    LorentzAction(#[from] crate::lorentz_action::LorentzActionError),
    #[error(transparent)]
    Reduction(#[from] crate::reduction::ReductionError),
    #[error(transparent)]
    TwoParticle(#[from] crate::twoparticle::TwoParticleError),
    #[error(transparent)]
    Epr(#[from] crate::epr::EprError),
    #[error("plot data: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunError {
    /// CLI exit status: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScreenReport {
    pub bins: HemisphereBins,
    pub profile: AngularProfile,
    pub seed: u64,
    pub n_trials: usize,
    pub probabilities: Vec<f64>,
    pub counts: Vec<usize>,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    #[serde(skip)]
    pub hits: Vec<Hit>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameRoleRow {
    pub beta: f64,
    pub first_detector: Option<Detector>,
    pub delay: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub angle_deg: f64,
    pub analytic: f64,
    pub estimate: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EprReport {
    pub settings_deg: [f64; 4],
    pub n_trials: usize,
    pub seed: u64,
    pub boost: BoostParameters,
    pub detector_separation: f64,
    /// Ordering in the configured frame, the reversed frame and the rest frame.
    pub frame_roles: Vec<FrameRoleRow>,
    /// CHSH with the measurement order of the configured frame.
    pub chsh: ChshEstimate,
    /// CHSH with the opposite measurement order.
    pub chsh_reversed: ChshEstimate,
    /// Counts in `(++, +-, -+, --)` order at settings `(a, b)`.
    pub joint_counts_d1_first: [usize; 4],
    pub joint_counts_d2_first: [usize; 4],
    pub joint_analytic: [f64; 4],
    pub correlation_sweep: Vec<SweepRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PacketReductionSummary {
    pub outcome_label: String,
    pub probabilities: Vec<f64>,
    pub support: (f64, f64),
    pub window: (f64, f64),
    pub width: f64,
    pub expected_width: f64,
    pub pre_samples: usize,
    pub post_samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PacketDemoReport {
    pub center: f64,
    pub sigma: f64,
    pub mass: f64,
    pub boost: BoostParameters,
    pub grid_samples: usize,
    pub grid_k_max: f64,
    pub n_targets: usize,
    pub pullback_vs_momentum_boost_l2: f64,
    pub norm_rest: f64,
    pub norm_boosted: f64,
    pub reduction: PacketReductionSummary,
    #[serde(skip)]
    pub samples: SpacetimeSampleSet,
    #[serde(skip)]
    pub branches: Vec<Branch>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "scenario", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum ScenarioReport {
    EinsteinScreen(ScreenReport),
    #[serde(rename = "decay_90")]
    Decay90(DecayReport),
    EprBoosted(EprReport),
    PacketBoostDemo(PacketDemoReport),
}

/// A named CSV document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlotFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

fn deg(a: f64) -> f64 {
    a * PI / 180.0
}

fn run_screen(c: &RunConfig) -> Result<(ScreenReport, Vec<MeasurementRecord>), RunError> {
    let bins = HemisphereBins::new(c.screen_rings, c.screen_sectors)?;
    let profile = match c.screen_profile {
        ScreenProfile::Isotropic => AngularProfile::Isotropic,
        ScreenProfile::Cosine => AngularProfile::Cosine { n: c.screen_cosine_power },
    };
    let run = twoparticle::run_einstein_screen(c.n_trials, &profile, bins, c.seed, c.parallel)?;
    let n = c.n_trials as f64;
    let chi_square = run
        .counts
        .iter()
        .zip(&run.probabilities)
        .filter(|(_, p)| **p > 0.0)
        .map(|(k, p)| (*k as f64 - n * p).powi(2) / (n * p))
        .sum();
    let stream = stream_id("einstein_screen");
    let records = run
        .hits
        .iter()
        .map(|h| {
            let (s, ct) = (h.theta.sin(), h.theta.cos());
            MeasurementRecord {
                outcome_index: h.bin,
                outcome_label: format!("ring{}-sector{}", h.bin / bins.sectors, h.bin % bins.sectors),
                event: FourVector::new(1.0, s * h.phi.cos(), s * h.phi.sin(), ct),
                pre_norm: 1.0,
                rng_seed: derive_seed(c.seed, stream, h.trial as u64),
                probabilities: run.probabilities.clone(),
                policy: c.policy.clone(),
            }
        })
        .collect();
    let dof = run.probabilities.iter().filter(|p| **p > 0.0).count().saturating_sub(1);
    Ok((
        ScreenReport {
            bins,
            profile,
            seed: c.seed,
            n_trials: c.n_trials,
            probabilities: run.probabilities,
            counts: run.counts,
            chi_square,
            degrees_of_freedom: dof,
            hits: run.hits,
        },
        records,
    ))
}

fn run_decay(c: &RunConfig) -> Result<(DecayReport, Vec<MeasurementRecord>), RunError> {
    let geom = DecayGeometry::right_angle(c.detector_distances, deg(c.detector_half_angle_deg))?;
    let state = SWaveState::gaussian(c.decay_k0, c.decay_width, c.mass, c.decay_samples)?;
    let report = twoparticle::run_90deg_scenario(&geom, &state, &c.boost()?, c.n_trials, c.seed, c.parallel)?;
    let records = report
        .trials
        .iter()
        .map(|t| MeasurementRecord {
            outcome_index: t.fired,
            outcome_label: format!("D{}", t.fired + 1),
            event: t.arrivals_rest[t.fired],
            pre_norm: 1.0,
            rng_seed: t.seed,
            probabilities: report.born_weights.clone(),
            policy: c.policy.clone(),
        })
        .collect();
    Ok((report, records))
}

fn run_epr(c: &RunConfig) -> Result<EprReport, RunError> {
    let b = c.boost()?;
    let settings_deg = [c.angle_a_deg, c.angle_a2_deg, c.angle_b_deg, c.angle_b2_deg];
    let [a, a2, bb, b2] = settings_deg.map(|d| AnalyzerSetting::in_plane(deg(d)));
    let half = 0.5 * c.detector_separation;
    let axis = b.axis();
    let positions = [crate::spacetime::scale3(axis, -half), crate::spacetime::scale3(axis, half)];
    let arrival = 1.0;
    let roles: Vec<FrameRoleRow> = [b, b.inverse(), BoostParameters::identity()]
        .iter()
        .map(|bp| {
            let o = epr::frame_roles(positions, arrival, bp);
            FrameRoleRow { beta: bp.beta(), first_detector: o.first_detector, delay: o.delay }
        })
        .collect();
    let operative = epr::frame_roles(positions, arrival, &b);
    let reversed = FrameOrdering {
        first_detector: match operative.first_detector {
            Some(Detector::D1) => Some(Detector::D2),
            Some(Detector::D2) => Some(Detector::D1),
            None => None,
        },
        ..operative
    };
    let chsh = epr::chsh_ordered(&a, &a2, &bb, &b2, &operative, c.n_trials, c.seed, c.parallel)?;
    let chsh_reversed = epr::chsh_ordered(&a, &a2, &bb, &b2, &reversed, c.n_trials, c.seed, c.parallel)?;
    let tables = stream_id("epr/joint");
    let d1 = epr::tally(&epr::sample_many(&a, &bb, &FrameOrdering::first(Detector::D1), c.n_trials, c.seed, tables, c.parallel));
    let d2 = epr::tally(&epr::sample_many(&a, &bb, &FrameOrdering::first(Detector::D2), c.n_trials, c.seed, tables, c.parallel));
    let sweep = correlation_sweep(c.n_trials, c.seed, c.parallel)?;
    Ok(EprReport {
        settings_deg,
        n_trials: c.n_trials,
        seed: c.seed,
        boost: b,
        detector_separation: c.detector_separation,
        frame_roles: roles,
        chsh,
        chsh_reversed,
        joint_counts_d1_first: d1,
        joint_counts_d2_first: d2,
        joint_analytic: epr::joint_table(&a, &bb),
        correlation_sweep: sweep,
    })
}

/// `E(0, theta)` at 19 angles from 0 to 180 degrees.
pub fn correlation_sweep(n_trials: usize, seed: u64, parallel: bool) -> Result<Vec<SweepRow>, RunError> {
    let a = AnalyzerSetting::in_plane(0.0);
    (0..19)
        .map(|i| {
            let angle_deg = 10.0 * i as f64;
            let b = AnalyzerSetting::in_plane(deg(angle_deg));
            let order = FrameOrdering::first(Detector::D1);
            let outcomes = epr::sample_many(&a, &b, &order, n_trials, seed, stream_id(&format!("epr/sweep/{i}")), parallel);
            let e = outcomes.iter().map(|o| (o.s1 * o.s2) as f64).sum::<f64>() / n_trials as f64;
            let se = ((1.0 - e * e).max(0.0) / (n_trials.max(2) - 1) as f64).sqrt();
            Ok(SweepRow { angle_deg, analytic: -(deg(angle_deg).cos()), estimate: e, std_error: se })
        })
        .collect()
}

fn run_packet(c: &RunConfig) -> Result<PacketDemoReport, RunError> {
    let b = c.boost()?;
    let grid = MomentumGrid::symmetric_1d(c.grid_samples, c.grid_k_max)?;
    let amp = wavepacket::gaussian_packet([c.packet_center, 0.0, 0.0], c.packet_sigma, c.mass, &grid)?;
    let targets: Vec<FourVector> = (0..11)
        .flat_map(|i| (0..41).map(move |j| FourVector::new(-5.0 + i as f64, -20.0 + j as f64, 0.0, 0.0)))
        .collect();
    let pulled = lorentz_action::pullback_transform(&amp, &b, &targets);
    let boosted = lorentz_action::momentum_boost(&amp, &b)?;
    let direct = wavepacket::synthesize_many(&boosted, &targets);
    let l2 = lorentz_action::relative_l2(pulled.values(), &direct);

    let field = wavepacket::momentum_to_position(&amp, 0.0);
    let (mean, _) = field.moments_along(0)?;
    let xs = field.grid().axes()[0].values();
    let dx = xs[1] - xs[0];
    let det = DetectorArray::partition_line(&[xs[0], mean, xs[xs.len() - 1] + dx])?;
    let policy = reduction::policy_by_id(&c.policy).expect("validated policy");
    let (record, reduced) = reduction::measure(&field, &det, policy.as_ref(), derive_seed(c.seed, stream_id("packet/measure"), 0))?;
    let post = wavepacket::position_to_momentum(&reduced, c.mass)?.amplitude;
    let support = field.extent_along([1.0, 0.0, 0.0], 1e-6).ok_or(crate::wavepacket::WavepacketError::ZeroNorm)?;
    let probe = reduction::reduction_in_boosted_frame(&amp, &post, &FourVector::ORIGIN, support, &b, &[])?;
    let (w0, w1) = probe.window;
    let pad = 0.1 * (w1 - w0) + 1.0;
    let window_targets: Vec<FourVector> = (0..41)
        .flat_map(|i| {
            let t = w0 - pad + (w1 - w0 + 2.0 * pad) * i as f64 / 40.0;
            (0..41).map(move |j| {
                let s = support.0 + (support.1 - support.0) * j as f64 / 40.0;
                FourVector::new(t, s, 0.0, 0.0)
            })
        })
        .collect();
    let boosted_reduction = reduction::reduction_in_boosted_frame(&amp, &post, &FourVector::ORIGIN, support, &b, &window_targets)?;
    let pre_samples = boosted_reduction.branches.iter().filter(|x| **x == Branch::Pre).count();
    let expected_width = lorentz_action::time_slice_spread(support.1 - support.0, &b)?;
    Ok(PacketDemoReport {
        center: c.packet_center,
        sigma: c.packet_sigma,
        mass: c.mass,
        boost: b,
        grid_samples: c.grid_samples,
        grid_k_max: c.grid_k_max,
        n_targets: targets.len(),
        pullback_vs_momentum_boost_l2: l2,
        norm_rest: wavepacket::norm(&amp),
        norm_boosted: wavepacket::norm(&boosted),
        reduction: PacketReductionSummary {
            outcome_label: record.outcome_label,
            probabilities: record.probabilities,
            support,
            window: boosted_reduction.window,
            width: boosted_reduction.width(),
            expected_width,
            pre_samples,
            post_samples: window_targets.len() - pre_samples,
        },
        samples: boosted_reduction.samples,
        branches: boosted_reduction.branches,
    })
}

/// Runs the configured scenario in memory.
pub fn execute(config: &RunConfig) -> Result<(ScenarioReport, Vec<MeasurementRecord>), RunError> {
    config.validate()?;
    Ok(match config.scenario {
        ScenarioId::EinsteinScreen => {
            let (r, rec) = run_screen(config)?;
            (ScenarioReport::EinsteinScreen(r), rec)
        }
        ScenarioId::Decay90 => {
            let (r, rec) = run_decay(config)?;
            (ScenarioReport::Decay90(r), rec)
        }
        ScenarioId::EprBoosted => (ScenarioReport::EprBoosted(run_epr(config)?), Vec::new()),
        ScenarioId::PacketBoostDemo => (ScenarioReport::PacketBoostDemo(run_packet(config)?), Vec::new()),
    })
}

fn csv_file<F>(name: &str, header: &[&str], fill: F) -> Result<PlotFile, RunError>
where
    F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> Result<(), csv::Error>,
{
    let mut bytes = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut bytes);
        w.write_record(header)?;
        fill(&mut w)?;
        w.flush().map_err(csv::Error::from)?;
    }
    Ok(PlotFile { name: name.to_string(), bytes })
}

fn opt_detector(d: Option<Detector>) -> String {
    match d {
        Some(Detector::D1) => "D1".into(),
        Some(Detector::D2) => "D2".into(),
        None => "tie".into(),
    }
}

/// CSV plot data for a report.
///
/// | scenario | file | columns |
/// |---|---|---|
/// | einstein_screen | `hemisphere_hits.csv` | `theta,phi,trial,bin` |
/// | einstein_screen | `bin_counts.csv` | `bin,ring,sector,probability,count` |
/// | decay_90 | `arrival_timeline.csv` | `trial,detector,t_rest,x,y,z,t_boosted,x_boosted,fired,first` |
/// | epr_boosted | `correlation_sweep.csv` | `angle_deg,analytic,estimate,std_error` |
/// | epr_boosted | `frame_roles.csv` | `beta,first_detector,delay` |
/// | packet_boost_demo | `spacetime_samples.csv` | `t,x,y,z,re,im,branch` |
pub fn emit_plot_data(report: &ScenarioReport) -> Result<Vec<PlotFile>, RunError> {
    match report {
        ScenarioReport::EinsteinScreen(r) => Ok(vec![
            csv_file("hemisphere_hits.csv", &["theta", "phi", "trial", "bin"], |w| {
                for h in &r.hits {
                    w.write_record([h.theta.to_string(), h.phi.to_string(), h.trial.to_string(), h.bin.to_string()])?;
                }
                Ok(())
            })?,
            csv_file("bin_counts.csv", &["bin", "ring", "sector", "probability", "count"], |w| {
                for (i, (p, k)) in r.probabilities.iter().zip(&r.counts).enumerate() {
                    w.write_record([
                        i.to_string(),
                        (i / r.bins.sectors).to_string(),
                        (i % r.bins.sectors).to_string(),
                        p.to_string(),
                        k.to_string(),
                    ])?;
                }
                Ok(())
            })?,
        ]),
        ScenarioReport::Decay90(r) => Ok(vec![csv_file(
            "arrival_timeline.csv",
            &["trial", "detector", "t_rest", "x", "y", "z", "t_boosted", "x_boosted", "fired", "first"],
            |w| {
                for t in &r.trials {
                    for d in 0..2 {
                        let e = t.arrivals_rest[d];
                        let eb = t.arrivals_boosted[d];
                        w.write_record([
                            t.trial.to_string(),
                            format!("D{}", d + 1),
                            e.t.to_string(),
                            e.x.to_string(),
                            e.y.to_string(),
                            e.z.to_string(),
                            eb.t.to_string(),
                            eb.x.to_string(),
                            (t.fired == d).to_string(),
                            t.first.map(|f| f == d).map_or("tie".to_string(), |b| b.to_string()),
                        ])?;
                    }
                }
                Ok(())
            },
        )?]),
        ScenarioReport::EprBoosted(r) => Ok(vec![
            sweep_csv(&r.correlation_sweep)?,
            csv_file("frame_roles.csv", &["beta", "first_detector", "delay"], |w| {
                for row in &r.frame_roles {
                    w.write_record([row.beta.to_string(), opt_detector(row.first_detector), row.delay.to_string()])?;
                }
                Ok(())
            })?,
        ]),
        ScenarioReport::PacketBoostDemo(r) => Ok(vec![csv_file(
            "spacetime_samples.csv",
            &["t", "x", "y", "z", "re", "im", "branch"],
            |w| {
                for ((e, v), br) in r.samples.events().iter().zip(r.samples.values()).zip(&r.branches) {
                    let branch = match br {
                        Branch::Pre => "pre",
                        Branch::Post => "post",
                    };
                    w.write_record([
                        e.t.to_string(),
                        e.x.to_string(),
                        e.y.to_string(),
                        e.z.to_string(),
                        v.re.to_string(),
                        v.im.to_string(),
                        branch.to_string(),
                    ])?;
                }
                Ok(())
            },
        )?]),
    }
}

/// `correlation_sweep.csv` with columns `angle_deg,analytic,estimate,std_error`.
pub fn sweep_csv(rows: &[SweepRow]) -> Result<PlotFile, RunError> {
    csv_file("correlation_sweep.csv", &["angle_deg", "analytic", "estimate", "std_error"], |w| {
        for row in rows {
            w.write_record([
                row.angle_deg.to_string(),
                row.analytic.to_string(),
                row.estimate.to_string(),
                row.std_error.to_string(),
            ])?;
        }
        Ok(())
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub scenario: ScenarioId,
    pub seed: u64,
    pub version: String,
    pub wall_time_seconds: f64,
    pub config: RunConfig,
    pub files: Vec<FileDigest>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub output_dir: PathBuf,
    pub manifest: Manifest,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Serialized report: compact JSON with a trailing newline.
pub fn report_json(report: &ScenarioReport) -> Result<Vec<u8>, RunError> {
    let mut bytes = serde_json::to_vec(report)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Runs the scenario and writes every artifact to `config.output_dir`.
/// Nothing is written unless the scenario succeeds, and files already
/// written are removed if a later write fails.
pub fn run(config: &RunConfig) -> Result<RunOutcome, RunError> {
    let started = Instant::now();
    let (report, records) = execute(config)?;
    let mut files: Vec<PlotFile> = vec![PlotFile { name: "report.json".into(), bytes: report_json(&report)? }];
    if !records.is_empty() {
        let mut bytes = Vec::new();
        reduction::write_jsonl(&records, &mut bytes)?;
        files.push(PlotFile { name: "records.jsonl".into(), bytes });
    }
    files.extend(emit_plot_data(&report)?);
    let manifest = Manifest {
        scenario: config.scenario,
        seed: config.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_seconds: started.elapsed().as_secs_f64(),
        config: config.clone(),
        files: files
            .iter()
            .map(|f| FileDigest { name: f.name.clone(), bytes: f.bytes.len(), sha256: sha256_hex(&f.bytes) })
            .collect(),
    };
    files.push(PlotFile { name: "manifest.json".into(), bytes: serde_json::to_vec_pretty(&manifest)? });

    let dir = PathBuf::from(&config.output_dir);
    let created_dir = !dir.exists();
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RunError::Io { path, source }
    };
    std::fs::create_dir_all(&dir).map_err(io(&dir))?;
    let mut written: Vec<PathBuf> = Vec::new();
    for f in &files {
        let path = dir.join(&f.name);
        if let Err(e) = std::fs::write(&path, &f.bytes).map_err(io(&path)) {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            let _ = std::fs::remove_file(&path);
            if created_dir {
                let _ = std::fs::remove_dir(&dir);
            }
            return Err(e);
        }
        written.push(path);
    }
    Ok(RunOutcome { output_dir: dir, manifest })
}
