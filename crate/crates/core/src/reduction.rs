//! Born-rule measurement and reduction.
//!
//! Reduction is instantaneous in the rest frame of the detector. Seen from a
//! moving frame only whole histories are transformed: the events before the
//! rest-frame reduction time read the pre-measurement history, the rest read
//! the reduced one ([`reduction_in_boosted_frame`]). Nothing is ever boosted
//! point by point as a collapsing shape.
//!
//! The collapse dynamics is pluggable through [`ReductionPolicy`]; every
//! policy must reproduce Born statistics.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

use crate::lorentz_action::SpacetimeSampleSet;
use crate::seeding::{derive_seed, rng_from_seed};
use crate::spacetime::{boost, dot3, scale3, BoostParameters, FourVector, Vec3};
use crate::wavepacket::{synthesize, MomentumAmplitude, PositionField};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("detector cells {0} and {1} overlap")]
    OverlappingCells(usize, usize),
    #[error("detector array has no cells")]
    NoCells,
    #[error("cell region has lo >= hi on axis {0}")]
    EmptyRegion(usize),
    #[error("total intensity over the detector cells is zero")]
    ZeroIntensity,
    #[error("field is expressed in a different frame than the detector rest frame")]
    FrameMismatch,
    #[error("detector is in {0:?} mode")]
    ModeMismatch(DetectorMode),
    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),
    #[error("cell index {0} out of range")]
    NoSuchCell(usize),
    #[error(transparent)]
    Wavepacket(#[from] crate::wavepacket::WavepacketError),
    #[error(transparent)]
    LorentzAction(#[from] crate::lorentz_action::LorentzActionError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Tolerance on `sum p = 1` accepted by [`sample_outcome`].
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

/// Half-open box `[lo, hi)`. Infinite bounds are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub lo: Vec3,
    pub hi: Vec3,
}

impl Region {
    pub fn new(lo: Vec3, hi: Vec3) -> Result<Self, ReductionError> {
        for a in 0..3 {
            if !(lo[a] < hi[a]) {
                return Err(ReductionError::EmptyRegion(a));
            }
        }
        Ok(Region { lo, hi })
    }

    /// Slab `a <= x < b`, unbounded in y and z.
    pub fn interval(a: f64, b: f64) -> Result<Self, ReductionError> {
        Self::new([a, f64::NEG_INFINITY, f64::NEG_INFINITY], [b, f64::INFINITY, f64::INFINITY])
    }

    pub fn contains(&self, p: Vec3) -> bool {
        (0..3).all(|a| self.lo[a] <= p[a] && p[a] < self.hi[a])
    }

    pub fn overlaps(&self, other: &Region) -> bool {
        (0..3).all(|a| self.lo[a] < other.hi[a] && other.lo[a] < self.hi[a])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorMode {
    Position,
    Momentum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub label: String,
    pub region: Region,
}

/// Pairwise-disjoint detector cells at rest in one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorArray {
    cells: Vec<Cell>,
    rest_frame: BoostParameters,
    mode: DetectorMode,
}

impl DetectorArray {
    pub fn new(cells: Vec<Cell>, rest_frame: BoostParameters, mode: DetectorMode) -> Result<Self, ReductionError> {
        if cells.is_empty() {
            return Err(ReductionError::NoCells);
        }
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                if cells[i].region.overlaps(&cells[j].region) {
                    return Err(ReductionError::OverlappingCells(i, j));
                }
            }
        }
        Ok(DetectorArray { cells, rest_frame, mode })
    }

    /// Lab-frame position detector with cells `[e_i, e_{i+1})` along x,
    /// labelled `c0, c1, ...`. Cells are contiguous, so their union is
    /// exactly `[e_0, e_n)`.
    pub fn partition_line(edges: &[f64]) -> Result<Self, ReductionError> {
        let cells = edges
            .windows(2)
            .enumerate()
            .map(|(i, w)| Ok(Cell { label: format!("c{i}"), region: Region::interval(w[0], w[1])? }))
            .collect::<Result<Vec<_>, ReductionError>>()?;
        Self::new(cells, BoostParameters::identity(), DetectorMode::Position)
    }

    pub fn with_rest_frame(mut self, rest_frame: BoostParameters) -> Self {
        self.rest_frame = rest_frame;
        self
    }

    pub fn with_mode(mut self, mode: DetectorMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn rest_frame(&self) -> &BoostParameters {
        &self.rest_frame
    }

    pub fn mode(&self) -> DetectorMode {
        self.mode
    }

    pub fn cell_index(&self, p: Vec3) -> Option<usize> {
        self.cells.iter().position(|c| c.region.contains(p))
    }
}

fn cell_intensities(field: &PositionField, det: &DetectorArray) -> Vec<f64> {
    let vol = field.grid().volume_weights();
    let mut acc = vec![0.0; det.cells.len()];
    for (i, (v, w)) in field.values().iter().zip(&vol).enumerate() {
        if let Some(c) = det.cell_index(field.grid().point(i)) {
            acc[c] += v.norm_sqr() * w;
        }
    }
    acc
}

fn normalize(acc: Vec<f64>) -> Result<Vec<f64>, ReductionError> {
    let total: f64 = acc.iter().sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(ReductionError::ZeroIntensity);
    }
    Ok(acc.into_iter().map(|a| a / total).collect())
}

/// `p_i = sum_{x in cell_i} |phi|^2 dV / sum over all cells`.
pub fn born_probabilities(field: &PositionField, det: &DetectorArray) -> Result<Vec<f64>, ReductionError> {
    if det.mode != DetectorMode::Position {
        return Err(ReductionError::ModeMismatch(det.mode));
    }
    if !field.frame().same_frame(&det.rest_frame, 1e-12) {
        return Err(ReductionError::FrameMismatch);
    }
    normalize(cell_intensities(field, det))
}

/// Momentum-bin probabilities under the `1/(2 k0)` measure.
pub fn born_probabilities_momentum(amp: &MomentumAmplitude, det: &DetectorArray) -> Result<Vec<f64>, ReductionError> {
    if det.mode != DetectorMode::Momentum {
        return Err(ReductionError::ModeMismatch(det.mode));
    }
    let grid = amp.grid();
    let mut acc = vec![0.0; det.cells.len()];
    for i in 0..amp.len() {
        if let Some(c) = det.cell_index(grid.k(i)) {
            acc[c] += amp.values()[i].norm_sqr() * grid.weight(i) / (2.0 * amp.energies()[i]);
        }
    }
    normalize(acc)
}

pub fn validate_distribution(p: &[f64]) -> Result<(), ReductionError> {
    if p.is_empty() {
        return Err(ReductionError::InvalidDistribution("empty".into()));
    }
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(ReductionError::InvalidDistribution("entries must be finite and >= 0".into()));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > DISTRIBUTION_TOLERANCE {
        return Err(ReductionError::InvalidDistribution(format!("sums to {s}")));
    }
    Ok(())
}

/// Inverse-CDF draw with a single uniform. Zero-probability outcomes are never returned.
pub fn sample_with(p: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = p.iter().sum();
    let u: f64 = rng.gen::<f64>() * total;
    let mut cum = 0.0;
    let mut last_nonzero = 0;
    for (i, &pi) in p.iter().enumerate() {
        if pi > 0.0 {
            cum += pi;
            last_nonzero = i;
            if u < cum {
                return i;
            }
        }
    }
    last_nonzero
}

pub fn sample_outcome(p: &[f64], seed: u64) -> Result<usize, ReductionError> {
    validate_distribution(p)?;
    Ok(sample_with(p, &mut rng_from_seed(seed)))
}

/// How a measurement picks its outcome.
pub trait ReductionPolicy: Send + Sync {
    fn id(&self) -> &'static str;
    fn select(&self, probabilities: &[f64], rng: &mut ChaCha8Rng) -> usize;
}

/// One-shot Born sampling at the detection time.
#[derive(Debug, Clone, Copy, Default)]
pub struct InstantaneousBorn;

impl ReductionPolicy for InstantaneousBorn {
    fn id(&self) -> &'static str {
        "instantaneous-born"
    }

    fn select(&self, probabilities: &[f64], rng: &mut ChaCha8Rng) -> usize {
        sample_with(probabilities, rng)
    }
}

/// Stepwise collapse: surviving components are merged pairwise, each merge
/// a fair game that hands the pair's weight to one member with probability
/// proportional to its share. Weights are a martingale, so the final outcome
/// is Born-distributed.
#[derive(Debug, Clone, Copy, Default)]
pub struct PairwiseElimination;

impl ReductionPolicy for PairwiseElimination {
    fn id(&self) -> &'static str {
        "pairwise-elimination"
    }

    fn select(&self, probabilities: &[f64], rng: &mut ChaCha8Rng) -> usize {
        let mut alive: Vec<(usize, f64)> =
            probabilities.iter().copied().enumerate().filter(|(_, p)| *p > 0.0).collect();
        while alive.len() > 1 {
            let (i, pi) = alive[alive.len() - 2];
            let (j, pj) = alive[alive.len() - 1];
            alive.truncate(alive.len() - 2);
            let winner = if rng.gen::<f64>() * (pi + pj) < pi { i } else { j };
            alive.push((winner, pi + pj));
        }
        alive.first().map(|(i, _)| *i).unwrap_or(0)
    }
}

pub fn policy_by_id(id: &str) -> Option<Box<dyn ReductionPolicy>> {
    match id {
        "instantaneous-born" => Some(Box::new(InstantaneousBorn)),
        "pairwise-elimination" => Some(Box::new(PairwiseElimination)),
        _ => None,
    }
}

/// Restricts the field to `cell`, renormalizing to `sum |phi|^2 dV = 1`. Time is unchanged.
pub fn reduce_position(field: &PositionField, det: &DetectorArray, cell: usize) -> Result<PositionField, ReductionError> {
    let region = det.cells.get(cell).ok_or(ReductionError::NoSuchCell(cell))?.region;
    let kept: Vec<Complex64> = field
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| if region.contains(field.grid().point(i)) { *v } else { Complex64::new(0.0, 0.0) })
        .collect();
    let restricted = field.with_values(kept)?;
    let n = restricted.l2_norm_sqr();
    if n <= 0.0 {
        return Err(ReductionError::ZeroIntensity);
    }
    let s = 1.0 / n.sqrt();
    Ok(restricted.with_values(restricted.values().iter().map(|v| v * s).collect())?)
}

/// One detection, in the detector rest frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub outcome_index: usize,
    pub outcome_label: String,
    pub event: FourVector,
    pub pre_norm: f64,
    pub rng_seed: u64,
    pub probabilities: Vec<f64>,
    pub policy: String,
}

/// Born probabilities, outcome selection and reduction of one field.
pub fn measure(
    field: &PositionField,
    det: &DetectorArray,
    policy: &dyn ReductionPolicy,
    seed: u64,
) -> Result<(MeasurementRecord, PositionField), ReductionError> {
    let probabilities = born_probabilities(field, det)?;
    let outcome = policy.select(&probabilities, &mut rng_from_seed(seed));
    let reduced = reduce_position(field, det, outcome)?;
    let vol = reduced.grid().volume_weights();
    let mut centroid = [0.0; 3];
    for (i, (v, w)) in reduced.values().iter().zip(&vol).enumerate() {
        let rho = v.norm_sqr() * w;
        let p = reduced.grid().point(i);
        for a in 0..3 {
            centroid[a] += rho * p[a];
        }
    }
    let record = MeasurementRecord {
        outcome_index: outcome,
        outcome_label: det.cells[outcome].label.clone(),
        event: FourVector::from_parts(field.time(), centroid),
        pre_norm: field.l2_norm_sqr(),
        rng_seed: seed,
        probabilities,
        policy: policy.id().to_string(),
    };
    Ok((record, reduced))
}

/// `n` independent draws with per-trial seeds from `master`. Serial and
/// parallel runs return identical vectors.
pub fn run_trials(
    probabilities: &[f64],
    policy: &dyn ReductionPolicy,
    master: u64,
    stream: u64,
    n: usize,
    parallel: bool,
) -> Result<Vec<usize>, ReductionError> {
    validate_distribution(probabilities)?;
    let draw = |i: usize| policy.select(probabilities, &mut rng_from_seed(derive_seed(master, stream, i as u64)));
    Ok(if parallel { (0..n).into_par_iter().map(draw).collect() } else { (0..n).map(draw).collect() })
}

/// Writes one JSON object per line.
pub fn write_jsonl<W: Write, T: Serialize>(records: &[T], mut out: W) -> Result<(), ReductionError> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// A whole evolution that can be evaluated at any event of its frame.
pub trait History: Sync {
    fn value_at(&self, event: &FourVector) -> Complex64;
}

impl History for MomentumAmplitude {
    fn value_at(&self, event: &FourVector) -> Complex64 {
        synthesize(self, event)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Pre,
    Post,
}

/// A rest-frame-instantaneous reduction as described in a moving frame.
#[derive(Debug, Clone)]
pub struct BoostedReduction {
    pub samples: SpacetimeSampleSet,
    pub branches: Vec<Branch>,
    /// New-frame times over which the reduction surface crosses the packet.
    pub window: (f64, f64),
}

impl BoostedReduction {
    pub fn width(&self) -> f64 {
        self.window.1 - self.window.0
    }
}

/// Evaluates `pre` or `post` at each new-frame target according to whether
/// its rest-frame time precedes `reduction_event.t`.
///
/// `support` is the packet's extent `(lo, hi)` along the boost axis at the
/// reduction time, in rest-frame coordinates. Its two ends fix the window of
/// new-frame times during which part of the packet is already reduced.
pub fn reduction_in_boosted_frame(
    pre: &dyn History,
    post: &dyn History,
    reduction_event: &FourVector,
    support: (f64, f64),
    b: &BoostParameters,
    targets: &[FourVector],
) -> Result<BoostedReduction, ReductionError> {
    let back = b.inverse();
    let t_r = reduction_event.t;
    let (branches, values): (Vec<Branch>, Vec<Complex64>) = targets
        .par_iter()
        .map(|x_new| {
            let x = boost(x_new, &back);
            if x.t < t_r {
                (Branch::Pre, pre.value_at(&x))
            } else {
                (Branch::Post, post.value_at(&x))
            }
        })
        .unzip();
    let axis = b.axis();
    let s0 = dot3(reduction_event.space(), axis);
    let perp = crate::spacetime::sub3(reduction_event.space(), scale3(axis, s0));
    let edge = |s: f64| boost(&FourVector::from_parts(t_r, crate::spacetime::add3(perp, scale3(axis, s))), b).t;
    let (a, c) = (edge(support.0), edge(support.1));
    let window = if a <= c { (a, c) } else { (c, a) };
    Ok(BoostedReduction { samples: SpacetimeSampleSet::new(targets.to_vec(), values, *b)?, branches, window })
}
