//! Radial formulas of the Poincaré ball model and of a Euclidean radial model.
//!
//! Everything here is reduced to the geodesic distance `d` from the origin.
//! Sphere-area factors are omitted throughout: a radial volume integral is
//! represented by its line integral against [`volume_weight`], i.e. with
//! respect to a normalized sphere measure. Every quantity the crate verifies
//! is either a ratio or an inequality in which that common factor cancels;
//! the few exceptions (terms raised to an outer power other than one) carry
//! an explicit correction, see `catalog::BuiltTerm::sphere_scale`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("ball radius {0} outside [0, 1)")]
    RadiusOutOfRange(f64),
    #[error("distance {0} is negative")]
    NegativeDistance(f64),
    #[error("point with norm {0} is not inside the unit ball")]
    OutsideBall(f64),
    #[error("points have different dimensions ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("dimension n = {0} must be at least 2")]
    Dimension(u32),
    #[error("radial Laplacian is undefined at d = {0}")]
    LaplacianAtOrigin(f64),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// A radial function of the geodesic distance with two derivatives.
pub trait RadialFunction {
    fn value(&self, d: f64) -> f64;
    fn d1(&self, d: f64) -> f64;
    fn d2(&self, d: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Hyperbolic,
    Euclidean,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Hyperbolic => f.write_str("hyperbolic"),
            ModelKind::Euclidean => f.write_str("euclidean"),
        }
    }
}

/// Radial model of the ambient space.
///
/// Both models satisfy `|∇d| = 1` and `Δd ≥ C/d` with `C = n − 1`; for the
/// Euclidean model the second relation is an equality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceModel {
    kind: ModelKind,
    n: u32,
}

impl SpaceModel {
    pub fn new(kind: ModelKind, n: u32) -> Result<Self> {
        if n < 2 {
            return Err(GeometryError::Dimension(n));
        }
        Ok(Self { kind, n })
    }

    pub fn hyperbolic(n: u32) -> Result<Self> {
        Self::new(ModelKind::Hyperbolic, n)
    }

    pub fn euclidean(n: u32) -> Result<Self> {
        Self::new(ModelKind::Euclidean, n)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// The constant `C` in `Δd ≥ C/d`.
    pub fn geometric_constant(&self) -> f64 {
        f64::from(self.n - 1)
    }

    /// Radial volume density `J(d)`: `sinh^{n−1} d` or `d^{n−1}`.
    pub fn jacobian(&self, d: f64) -> f64 {
        match self.kind {
            ModelKind::Hyperbolic => powi(sinh(d), self.n - 1),
            ModelKind::Euclidean => powi(d, self.n - 1),
        }
    }

    /// `J(d) / d^{n−1}`, bounded and equal to 1 at the origin.
    pub fn jacobian_regular(&self, d: f64) -> f64 {
        match self.kind {
            ModelKind::Hyperbolic => powi(sinhc(d), self.n - 1),
            ModelKind::Euclidean => 1.0,
        }
    }

    /// Mean-curvature coefficient `k(d)`: `coth d` or `1/d`.
    pub fn curvature(&self, d: f64) -> f64 {
        match self.kind {
            ModelKind::Hyperbolic => coth(d),
            ModelKind::Euclidean => 1.0 / d,
        }
    }

    /// `d · k(d)`, bounded and equal to 1 at the origin.
    pub fn curvature_regular(&self, d: f64) -> f64 {
        match self.kind {
            ModelKind::Hyperbolic => d_coth(d),
            ModelKind::Euclidean => 1.0,
        }
    }

    /// Radial Lebesgue density in the `d` variable (hyperbolic) or the
    /// ordinary radial density (Euclidean, where both measures coincide).
    pub fn lebesgue_density(&self, d: f64) -> f64 {
        match self.kind {
            ModelKind::Hyperbolic => lebesgue_density_unchecked(d, self.n),
            ModelKind::Euclidean => powi(d, self.n - 1),
        }
    }

    /// `lebesgue_density(d) / d^{n−1}`.
    pub fn lebesgue_density_regular(&self, d: f64) -> f64 {
        match self.kind {
            ModelKind::Hyperbolic => {
                let half = 0.5 * d;
                let t = half.tanh();
                // tanh(d/2)/d → 1/2 at the origin
                let tc = if half.abs() < 1e-4 {
                    0.5 * (1.0 - half * half / 3.0)
                } else {
                    t / d
                };
                powi(tc, self.n - 1) * 0.5 * (1.0 - t * t)
            }
            ModelKind::Euclidean => 1.0,
        }
    }
}

impl fmt::Display for SpaceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={})", self.kind, self.n)
    }
}

/// A point described both by geodesic distance and by Euclidean ball radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPoint {
    pub d: f64,
    pub r: f64,
}

impl RadialPoint {
    pub fn from_distance(d: f64) -> Result<Self> {
        Ok(Self {
            d,
            r: radius_from_dist(d)?,
        })
    }

    pub fn from_radius(r: f64) -> Result<Self> {
        Ok(Self {
            d: dist_from_origin(r)?,
            r,
        })
    }
}

fn check_radius(r: f64) -> Result<()> {
    if (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(GeometryError::RadiusOutOfRange(r))
    }
}

fn check_distance(d: f64) -> Result<()> {
    if d >= 0.0 {
        Ok(())
    } else {
        Err(GeometryError::NegativeDistance(d))
    }
}

/// Conformal factor `λ = 2/(1 − r²)` of the ball metric.
pub fn conformal_factor(r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(2.0 / ((1.0 - r) * (1.0 + r)))
}

/// Geodesic distance from the origin, `2 artanh r`.
pub fn dist_from_origin(r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(2.0 * r.atanh())
}

/// Ball radius of the point at geodesic distance `d`, `tanh(d/2)`.
pub fn radius_from_dist(d: f64) -> Result<f64> {
    check_distance(d)?;
    Ok((0.5 * d).tanh())
}

/// Geodesic distance between two points of the ball.
pub fn hyperbolic_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(GeometryError::DimensionMismatch(x.len(), y.len()));
    }
    let nx: f64 = x.iter().map(|v| v * v).sum();
    let ny: f64 = y.iter().map(|v| v * v).sum();
    for norm2 in [nx, ny] {
        if norm2 >= 1.0 || !norm2.is_finite() {
            return Err(GeometryError::OutsideBall(norm2.sqrt()));
        }
    }
    let diff: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    let t = 2.0 * diff / ((1.0 - nx) * (1.0 - ny));
    // acosh(1 + t) without the cancellation of forming 1 + t
    Ok((t + (t * (t + 2.0)).sqrt()).ln_1p())
}

/// Radial volume weight `sinh^{n−1} d` (hyperbolic) or `d^{n−1}` (Euclidean).
pub fn volume_weight(d: f64, model: &SpaceModel) -> Result<f64> {
    check_distance(d)?;
    Ok(model.jacobian(d))
}

/// Radial Lebesgue density `r^{n−1} dr/dd` of the ball, in the `d` variable.
pub fn lebesgue_radial_factor(d: f64, n: u32) -> Result<f64> {
    check_distance(d)?;
    if n < 2 {
        return Err(GeometryError::Dimension(n));
    }
    Ok(lebesgue_density_unchecked(d, n))
}

fn lebesgue_density_unchecked(d: f64, n: u32) -> f64 {
    let r = (0.5 * d).tanh();
    // dr/dd = 1/λ(r) = (1 − r²)/2
    powi(r, n - 1) * 0.5 / (0.5 * d).cosh().powi(2)
}

/// Radial Laplace–Beltrami operator `φ'' + (n−1) k(d) φ'`.
pub fn radial_laplacian<F: RadialFunction + ?Sized>(phi: &F, d: f64, model: &SpaceModel) -> Result<f64> {
    if d <= 0.0 || d.is_nan() {
        return Err(GeometryError::LaplacianAtOrigin(d));
    }
    let c = f64::from(model.n - 1);
    Ok(phi.d2(d) + c * model.curvature(d) * phi.d1(d))
}

/// `sinh` through `expm1`, accurate for tiny arguments.
pub fn sinh(d: f64) -> f64 {
    if d.abs() > 20.0 {
        return d.sinh();
    }
    let e = d.exp_m1();
    0.5 * (e + e / (e + 1.0))
}

/// `sinh(d)/d`, equal to 1 at the origin.
pub fn sinhc(d: f64) -> f64 {
    let a = d.abs();
    if a < 1e-4 {
        let d2 = d * d;
        1.0 + d2 / 6.0 * (1.0 + d2 / 20.0)
    } else {
        sinh(d) / d
    }
}

/// `coth d = 1 + 2/(e^{2d} − 1)`.
pub fn coth(d: f64) -> f64 {
    1.0 + 2.0 / (2.0 * d).exp_m1()
}

/// `d coth d`, equal to 1 at the origin.
pub fn d_coth(d: f64) -> f64 {
    if d.abs() < 1e-4 {
        let d2 = d * d;
        1.0 + d2 / 3.0 * (1.0 - d2 / 15.0)
    } else {
        d * coth(d)
    }
}

#[inline]
pub(crate) fn powi(x: f64, k: u32) -> f64 {
    x.powi(k as i32)
}
