//! Four-vectors and boosts in natural units (c = 1).
//!
//! Boosts along an arbitrary axis are built by splitting the spatial part into
//! components parallel and perpendicular to the axis; only the parallel
//! component mixes with time. Interval sign convention is space minus time:
//! `|dx|^2 - dt^2`, so space-like separations are positive.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest admissible |beta|. Keeps gamma below ~2.2e4.
pub const BETA_LIMIT: f64 = 1.0 - 1e-9;

/// Tolerance used when deciding whether an axis is a unit vector.
pub const AXIS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpacetimeError {
    #[error("|beta| < 1 violated: beta = {0} (limit {BETA_LIMIT})")]
    Superluminal(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("boost axis has zero length")]
    ZeroAxis,
    #[error("boost axis is not a unit vector: |axis| = {0}")]
    AxisNotUnit(f64),
}

pub type Vec3 = [f64; 3];

pub fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3(a: Vec3) -> f64 {
    dot3(a, a).sqrt()
}

pub fn sub3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale3(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Returns `v / |v|`, or an error for a zero or non-finite vector.
pub fn unit3(v: Vec3) -> Result<Vec3, SpacetimeError> {
    if v.iter().any(|c| !c.is_finite()) {
        return Err(SpacetimeError::NonFinite("vector"));
    }
    let n = norm3(v);
    if n == 0.0 {
        return Err(SpacetimeError::ZeroAxis);
    }
    Ok(scale3(v, 1.0 / n))
}

/// A space-time event (or displacement) `(t, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FourVector {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl FourVector {
    pub const ORIGIN: FourVector = FourVector { t: 0.0, x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        FourVector { t, x, y, z }
    }

    pub fn from_parts(t: f64, space: Vec3) -> Self {
        FourVector { t, x: space[0], y: space[1], z: space[2] }
    }

    pub fn space(&self) -> Vec3 {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn checked(self) -> Result<Self, SpacetimeError> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(SpacetimeError::NonFinite("four-vector"))
        }
    }

    pub fn sub(&self, other: &FourVector) -> FourVector {
        FourVector::new(self.t - other.t, self.x - other.x, self.y - other.y, self.z - other.z)
    }

    /// Minkowski product `a0 b0 - a.b`, the phase convention used for plane waves.
    pub fn minkowski_dot(&self, other: &FourVector) -> f64 {
        self.t * other.t - (self.x * other.x + self.y * other.y + self.z * other.z)
    }
}

/// Velocity `beta` along a unit `axis`. Gamma is derived on demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBoost", into = "RawBoost")]
pub struct BoostParameters {
    beta: f64,
    axis: Vec3,
}

#[derive(Serialize, Deserialize)]
struct RawBoost {
    beta: f64,
    axis: Vec3,
}

impl TryFrom<RawBoost> for BoostParameters {
    type Error = SpacetimeError;
    fn try_from(raw: RawBoost) -> Result<Self, Self::Error> {
        BoostParameters::new(raw.beta, raw.axis)
    }
}

impl From<BoostParameters> for RawBoost {
    fn from(b: BoostParameters) -> Self {
        RawBoost { beta: b.beta, axis: b.axis }
    }
}

impl BoostParameters {
    /// Validates `|beta| < BETA_LIMIT` and that `axis` is a unit vector.
    pub fn new(beta: f64, axis: Vec3) -> Result<Self, SpacetimeError> {
        check_beta(beta)?;
        if axis.iter().any(|c| !c.is_finite()) {
            return Err(SpacetimeError::NonFinite("axis"));
        }
        let n = norm3(axis);
        if n == 0.0 {
            return Err(SpacetimeError::ZeroAxis);
        }
        if (n - 1.0).abs() > AXIS_TOLERANCE {
            return Err(SpacetimeError::AxisNotUnit(n));
        }
        Ok(BoostParameters { beta, axis })
    }

    /// Like [`BoostParameters::new`] but normalizes any nonzero axis first.
    pub fn along(beta: f64, direction: Vec3) -> Result<Self, SpacetimeError> {
        let axis = unit3(direction)?;
        Self::new(beta, axis)
    }

    pub fn along_x(beta: f64) -> Result<Self, SpacetimeError> {
        Self::new(beta, [1.0, 0.0, 0.0])
    }

    pub fn identity() -> Self {
        BoostParameters { beta: 0.0, axis: [1.0, 0.0, 0.0] }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    pub fn gamma(&self) -> f64 {
        gamma(self.beta)
    }

    pub fn is_identity(&self) -> bool {
        self.beta == 0.0
    }

    /// The boost back to the original frame.
    pub fn inverse(&self) -> Self {
        BoostParameters { beta: -self.beta, axis: self.axis }
    }

    /// True when both describe the same frame change, comparing the velocity vectors.
    pub fn same_frame(&self, other: &BoostParameters, tol: f64) -> bool {
        let a = scale3(self.axis, self.beta);
        let b = scale3(other.axis, other.beta);
        norm3(sub3(a, b)) <= tol
    }
}

fn check_beta(beta: f64) -> Result<(), SpacetimeError> {
    if !beta.is_finite() {
        return Err(SpacetimeError::NonFinite("beta"));
    }
    if beta.abs() >= BETA_LIMIT {
        return Err(SpacetimeError::Superluminal(beta));
    }
    Ok(())
}

pub fn gamma(beta: f64) -> f64 {
    1.0 / (1.0 - beta * beta).sqrt()
}

/// Collinear velocity addition `(b1 + b2) / (1 + b1 b2)`.
pub fn compose_collinear(beta1: f64, beta2: f64) -> f64 {
    (beta1 + beta2) / (1.0 + beta1 * beta2)
}

/// Invariant interval `|x_a - x_b|^2 - (t_a - t_b)^2`.
pub fn interval(a: &FourVector, b: &FourVector) -> f64 {
    let d = a.sub(b);
    d.x * d.x + d.y * d.y + d.z * d.z - d.t * d.t
}

/// Coordinates of `v` in the frame moving with velocity `beta * axis`.
pub fn boost(v: &FourVector, b: &BoostParameters) -> FourVector {
    if b.beta == 0.0 {
        return *v;
    }
    let g = b.gamma();
    let s = v.space();
    let par = dot3(s, b.axis);
    let perp = sub3(s, scale3(b.axis, par));
    let par_new = g * (par - b.beta * v.t);
    let t_new = g * (v.t - b.beta * par);
    FourVector::from_parts(t_new, add3(perp, scale3(b.axis, par_new)))
}

/// Time by which an event displaced `dx` along the boost axis precedes its
/// rest-frame-simultaneous partner in the boosted frame: `gamma * beta * dx`.
///
/// Positive when the displaced event happens first.
pub fn ordering_delay(dx: f64, b: &BoostParameters) -> f64 {
    b.gamma() * b.beta * dx
}

/// A stick of rest length `L` at rest in the boosted frame, measured with
/// equal-time endpoints in the unboosted frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contraction {
    pub length_moving: f64,
    /// Boosted-frame time offset between the two endpoint events.
    pub desync_time: f64,
}

pub fn contraction_check(stick_length_rest: f64, b: &BoostParameters) -> Contraction {
    let length_moving = stick_length_rest * (1.0 - b.beta * b.beta).sqrt();
    Contraction { length_moving, desync_time: b.beta * length_moving * b.gamma() }
}
