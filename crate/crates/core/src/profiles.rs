//! Radial test functions: extremal families, Gaussians, seeded bumps and
//! sampled grids.
//!
//! Every profile carries its exact support, the local power of its value,
//! first derivative and radial Laplacian at the origin, and "regular parts"
//! (the quantities divided by those powers) so that quadrature never has to
//! evaluate `d^s` for tiny `d`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::catalog::{BuiltIntegrand, BuiltTerm, Params};
use crate::geometry::{RadialFunction, SpaceModel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("shape parameter must be positive, got {0}")]
    Shape(f64),
    #[error("missing parameter {0}")]
    MissingParam(&'static str),
    #[error("grid needs at least 7 points, got {0}")]
    GridTooShort(usize),
    #[error("grid abscissae must be finite, nonnegative and strictly increasing (index {0})")]
    GridOrder(usize),
    #[error("grid has {0} abscissae but {1} values")]
    GridLength(usize, usize),
    #[error("invalid bump: centre {c}, half-width {w}")]
    Bump { c: f64, w: f64 },
    #[error("invalid bump window ({0}, {1})")]
    Window(f64, f64),
    #[error("{0} profiles need explicit data")]
    NeedsData(&'static str),
    #[error("no critical exponent rule for {0}")]
    NoExponentRule(String),
}

/// Extremal and generic families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    HardyPaper,
    HardyConcentration,
    RellichPaper,
    RellichConcentration,
    Gaussian,
    Bump,
    Grid,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 7] = [
        FamilyKind::HardyPaper,
        FamilyKind::HardyConcentration,
        FamilyKind::RellichPaper,
        FamilyKind::RellichConcentration,
        FamilyKind::Gaussian,
        FamilyKind::Bump,
        FamilyKind::Grid,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::HardyPaper => "hardy-paper",
            FamilyKind::HardyConcentration => "hardy-conc",
            FamilyKind::RellichPaper => "rellich-paper",
            FamilyKind::RellichConcentration => "rellich-conc",
            FamilyKind::Gaussian => "gaussian",
            FamilyKind::Bump => "bump",
            FamilyKind::Grid => "grid",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl std::fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyOptions {
    /// Truncation radius of the extremal power families; `f64::INFINITY` keeps the
    /// raw outer branch.
    pub truncate_at: f64,
    /// Weight power of the denominator term (defaults to `alpha`).
    pub mass_weight: Option<f64>,
    pub amplitude: f64,
    /// Centre window for seeded bumps.
    pub window: (f64, f64),
}

impl Default for FamilyOptions {
    fn default() -> Self {
        Self {
            truncate_at: 10.0,
            mass_weight: None,
            amplitude: 1.0,
            window: DEFAULT_WINDOW,
        }
    }
}

pub const DEFAULT_WINDOW: (f64, f64) = (0.1, 3.0);

/// Quintic smoothstep cutoff: 1 below `start`, 0 above `end`, C² in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub start: f64,
    pub end: f64,
}

impl Cutoff {
    pub const UNIT: Cutoff = Cutoff { start: 0.5, end: 1.0 };

    /// `(η, η', η'')` at `d`.
    pub fn jet(&self, d: f64) -> [f64; 3] {
        if d <= self.start {
            return [1.0, 0.0, 0.0];
        }
        if d >= self.end {
            return [0.0, 0.0, 0.0];
        }
        let h = self.end - self.start;
        let t = (d - self.start) / h;
        let s = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
        let s1 = 30.0 * t * t * (t - 1.0) * (t - 1.0);
        let s2 = 60.0 * t * (2.0 * t - 1.0) * (t - 1.0);
        [1.0 - s, -s1 / h, -s2 / (h * h)]
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    /// `d^s η(d)`.
    Power {
        s: f64,
        cutoff: Cutoff,
    },
    /// `d^σ` on `[0, 1]`, `d^{−σ}` beyond.
    HardyPaper {
        sigma: f64,
        cutoff: Option<Cutoff>,
    },
    /// `−k(d − 1) + 1` on `[0, 1]`, `d^{−k}` beyond.
    RellichPaper {
        k: f64,
        cutoff: Option<Cutoff>,
    },
    Gaussian {
        a: f64,
    },
    Bump {
        c: f64,
        w: f64,
    },
    Grid(Grid),
}

/// How a profile behaves as `d → ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileTail {
    Compact,
    Gaussian,
    /// Value, derivative and Laplacian decay like `d^{γ₀}`, `d^{γ₁}`, `d^{γ₂}`.
    Power([f64; 3]),
}

/// A radial test function with exact derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    shape: Shape,
    amplitude: f64,
    support: (f64, f64),
    local_powers: [f64; 3],
    tail: ProfileTail,
    breakpoints: Vec<f64>,
}

impl RadialProfile {
    /// `d^s` times the unit cutoff (1 on `[0, 1/2]`, 0 beyond 1).
    pub fn power(s: f64) -> Self {
        Self::power_with_cutoff(s, Cutoff::UNIT)
    }

    pub fn power_with_cutoff(s: f64, cutoff: Cutoff) -> Self {
        Self {
            shape: Shape::Power { s, cutoff },
            amplitude: 1.0,
            support: (0.0, cutoff.end),
            local_powers: if s == 0.0 { [0.0; 3] } else { [s, s - 1.0, s - 2.0] },
            tail: ProfileTail::Compact,
            breakpoints: vec![cutoff.start],
        }
    }

    pub fn gaussian(a: f64) -> Result<Self, ProfileError> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(ProfileError::Shape(a));
        }
        let scale = a.sqrt().recip();
        Ok(Self {
            shape: Shape::Gaussian { a },
            amplitude: 1.0,
            support: (0.0, f64::INFINITY),
            local_powers: [0.0, 1.0, 0.0],
            tail: ProfileTail::Gaussian,
            breakpoints: vec![0.5 * scale, scale, 2.0 * scale, 4.0 * scale],
        })
    }

    /// `exp(−1/(1 − t²))` with `t = (d − c)/w`.
    pub fn bump(c: f64, w: f64) -> Result<Self, ProfileError> {
        if !(w > 0.0 && c - w >= 0.0 && (c + w).is_finite()) {
            return Err(ProfileError::Bump { c, w });
        }
        Ok(Self {
            shape: Shape::Bump { c, w },
            amplitude: 1.0,
            support: (c - w, c + w),
            local_powers: [0.0; 3],
            tail: ProfileTail::Compact,
            breakpoints: vec![c - 0.5 * w, c, c + 0.5 * w],
        })
    }

    /// A bump with centre and width drawn from `ChaCha8Rng::seed_from_u64`.
    ///
    /// With `u₁, u₂` the first two uniform draws on `[0, 1)`, the centre is
    /// `lo + (hi − lo)(1/4 + u₁/2)` and the half-width
    /// `min(c − lo, hi − c)(0.3 + 0.7 u₂)`, so the support stays inside
    /// `(lo, hi)`.
    pub fn seeded_bump(seed: u64, window: (f64, f64)) -> Result<Self, ProfileError> {
        let (lo, hi) = window;
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return Err(ProfileError::Window(lo, hi));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u1: f64 = rng.gen();
        let u2: f64 = rng.gen();
        let c = lo + (hi - lo) * (0.25 + 0.5 * u1);
        let w = (c - lo).min(hi - c) * (0.3 + 0.7 * u2);
        Self::bump(c, w)
    }

    /// Extremal Hardy family: `d^σ` on `[0, 1]`, `d^{−σ}` beyond, with
    /// the outer branch cut off smoothly on `[D − 1, D]` when `D` is finite.
    pub fn hardy_paper(sigma: f64, truncate_at: f64) -> Self {
        let cutoff = finite_cutoff(truncate_at);
        Self {
            shape: Shape::HardyPaper { sigma, cutoff },
            amplitude: 1.0,
            support: (0.0, truncate_at),
            local_powers: [sigma, sigma - 1.0, sigma - 2.0],
            tail: tail_for(cutoff, [-sigma, -sigma - 1.0, -sigma - 2.0]),
            breakpoints: extremal_breakpoints(cutoff),
        }
    }

    /// Extremal Rellich family: linear on `[0, 1]`, `d^{−k}` beyond.
    pub fn rellich_paper(k: f64, truncate_at: f64) -> Self {
        let cutoff = finite_cutoff(truncate_at);
        Self {
            shape: Shape::RellichPaper { k, cutoff },
            amplitude: 1.0,
            support: (0.0, truncate_at),
            local_powers: [0.0, 0.0, -1.0],
            tail: tail_for(cutoff, [-k, -k - 1.0, -k - 2.0]),
            breakpoints: extremal_breakpoints(cutoff),
        }
    }

    /// Interpolates samples with Dirichlet ends (first and last values are
    /// replaced by 0). Nodal derivatives come from five-point finite
    /// differences and the interpolant is the quintic Hermite spline through
    /// values, first and second derivatives, so it is C².
    pub fn grid(d: &[f64], values: &[f64]) -> Result<Self, ProfileError> {
        let grid = Grid::new(d, values)?;
        let lo = grid.x[0];
        let hi = *grid.x.last().expect("grid is non-empty");
        let local_powers = if lo == 0.0 { [0.0, 0.0, -1.0] } else { [0.0; 3] };
        let breakpoints = grid.x[1..grid.x.len() - 1].to_vec();
        Ok(Self {
            shape: Shape::Grid(grid),
            amplitude: 1.0,
            support: (lo, hi),
            local_powers,
            tail: ProfileTail::Compact,
            breakpoints,
        })
    }

    /// Parses a two-column text file (distance, value), ignoring blank lines
    /// and lines starting with `#`.
    pub fn grid_from_text(text: &str) -> Result<Self, ProfileError> {
        let mut d = Vec::new();
        let mut v = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line
                .split(|ch: char| ch.is_whitespace() || ch == ',')
                .filter(|s| !s.is_empty());
            let parse = |s: Option<&str>| s.and_then(|s| s.parse::<f64>().ok());
            match (parse(cols.next()), parse(cols.next())) {
                (Some(x), Some(y)) => {
                    d.push(x);
                    v.push(y);
                }
                _ => return Err(ProfileError::GridOrder(d.len())),
            }
        }
        Self::grid(&d, &v)
    }

    /// The same profile multiplied by `c`.
    pub fn scaled(mut self, c: f64) -> Self {
        self.amplitude *= c;
        self
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Local powers at the origin of value, derivative and Laplacian.
    pub fn local_powers(&self) -> [f64; 3] {
        self.local_powers
    }

    pub fn local_power_at_zero(&self) -> f64 {
        self.local_powers[0]
    }

    pub fn tail(&self) -> ProfileTail {
        self.tail
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// `(φ, φ', φ'')` at `d` without the amplitude.
    fn jet(&self, d: f64) -> [f64; 3] {
        match &self.shape {
            Shape::Power { s, cutoff } => {
                if d >= cutoff.end {
                    return [0.0; 3];
                }
                let [e, e1, e2] = cutoff.jet(d);
                let v = d.powf(*s);
                let v1 = s * d.powf(s - 1.0);
                let v2 = s * (s - 1.0) * d.powf(s - 2.0);
                [v * e, v1 * e + v * e1, v2 * e + 2.0 * v1 * e1 + v * e2]
            }
            Shape::HardyPaper { sigma, cutoff } => {
                if d <= 1.0 {
                    let s = *sigma;
                    [d.powf(s), s * d.powf(s - 1.0), s * (s - 1.0) * d.powf(s - 2.0)]
                } else {
                    let s = -*sigma;
                    outer_branch(d, s, *cutoff)
                }
            }
            Shape::RellichPaper { k, cutoff } => {
                if d <= 1.0 {
                    [-k * (d - 1.0) + 1.0, -k, 0.0]
                } else {
                    outer_branch(d, -*k, *cutoff)
                }
            }
            Shape::Gaussian { a } => {
                let e = (-a * d * d).exp();
                [e, -2.0 * a * d * e, (4.0 * a * a * d * d - 2.0 * a) * e]
            }
            Shape::Bump { c, w } => bump_jet(d, *c, *w),
            Shape::Grid(g) => g.jet(d),
        }
    }

    /// Radial Laplacian `φ'' + (n−1) k(d) φ'` for `d > 0`.
    pub fn laplacian(&self, d: f64, model: &SpaceModel) -> f64 {
        let [_, v1, v2] = self.jet(d);
        let c = f64::from(model.n() - 1);
        self.amplitude * (v2 + c * model.curvature(d) * v1)
    }

    /// Value, derivative and Laplacian divided by `d` to their local powers.
    ///
    /// These stay bounded as `d → 0` and are evaluated without forming
    /// `d^s`, so they remain accurate where `d^s` under- or overflows.
    pub fn regular_parts(&self, d: f64, model: &SpaceModel) -> [f64; 3] {
        let c = f64::from(model.n() - 1);
        let dk = model.curvature_regular(d);
        let raw = match &self.shape {
            Shape::Power { s, cutoff } if *s != 0.0 => {
                if d >= cutoff.end {
                    return [0.0; 3];
                }
                let [e, e1, e2] = cutoff.jet(d);
                let s = *s;
                [
                    e,
                    s * e + d * e1,
                    (s * (s - 1.0) + c * dk * s) * e + d * (2.0 * s + c * dk) * e1 + d * d * e2,
                ]
            }
            Shape::Gaussian { a } => {
                let e = (-a * d * d).exp();
                let d1_over_d = -2.0 * a * e;
                let d2 = (4.0 * a * a * d * d - 2.0 * a) * e;
                [e, d1_over_d, d2 + c * dk * d1_over_d]
            }
            _ => {
                let [v, v1, v2] = self.jet(d);
                let lap = v2 + c * dk / d * v1;
                let [p0, p1, p2] = self.local_powers;
                [
                    divide_power(v, d, p0),
                    divide_power(v1, d, p1),
                    divide_power(lap, d, p2),
                ]
            }
        };
        raw.map(|x| x * self.amplitude)
    }
}

impl RadialFunction for RadialProfile {
    fn value(&self, d: f64) -> f64 {
        self.amplitude * self.jet(d)[0]
    }

    fn d1(&self, d: f64) -> f64 {
        self.amplitude * self.jet(d)[1]
    }

    fn d2(&self, d: f64) -> f64 {
        self.amplitude * self.jet(d)[2]
    }
}

fn divide_power(x: f64, d: f64, p: f64) -> f64 {
    if p == 0.0 || x == 0.0 {
        x
    } else {
        x / d.powf(p)
    }
}

fn finite_cutoff(truncate_at: f64) -> Option<Cutoff> {
    truncate_at.is_finite().then_some(Cutoff {
        start: truncate_at - 1.0,
        end: truncate_at,
    })
}

fn tail_for(cutoff: Option<Cutoff>, powers: [f64; 3]) -> ProfileTail {
    match cutoff {
        Some(_) => ProfileTail::Compact,
        None => ProfileTail::Power(powers),
    }
}

fn extremal_breakpoints(cutoff: Option<Cutoff>) -> Vec<f64> {
    let mut points = vec![1.0];
    if let Some(c) = cutoff {
        points.push(c.start);
    }
    points
}

fn outer_branch(d: f64, s: f64, cutoff: Option<Cutoff>) -> [f64; 3] {
    let v = d.powf(s);
    let v1 = s * v / d;
    let v2 = s * (s - 1.0) * v / (d * d);
    match cutoff {
        None => [v, v1, v2],
        Some(c) => {
            let [e, e1, e2] = c.jet(d);
            [v * e, v1 * e + v * e1, v2 * e + 2.0 * v1 * e1 + v * e2]
        }
    }
}

fn bump_jet(d: f64, c: f64, w: f64) -> [f64; 3] {
    let t = (d - c) / w;
    if t.abs() >= 1.0 {
        return [0.0; 3];
    }
    let one = 1.0 - t * t;
    let g = -1.0 / one;
    let e = g.exp();
    if e == 0.0 {
        return [0.0; 3];
    }
    let g1 = -2.0 * t / (one * one);
    let g2 = -2.0 * (1.0 + 3.0 * t * t) / (one * one * one);
    [e, g1 * e / w, (g2 + g1 * g1) * e / (w * w)]
}

#[derive(Debug, Clone, PartialEq)]
struct Grid {
    x: Vec<f64>,
    v: Vec<f64>,
    v1: Vec<f64>,
    v2: Vec<f64>,
}

impl Grid {
    fn new(x: &[f64], values: &[f64]) -> Result<Self, ProfileError> {
        if x.len() != values.len() {
            return Err(ProfileError::GridLength(x.len(), values.len()));
        }
        if x.len() < 7 {
            return Err(ProfileError::GridTooShort(x.len()));
        }
        for (i, &xi) in x.iter().enumerate() {
            let bad = !xi.is_finite() || xi < 0.0 || (i > 0 && xi <= x[i - 1]);
            if bad || !values[i].is_finite() {
                return Err(ProfileError::GridOrder(i));
            }
        }
        let mut v = values.to_vec();
        let last = v.len() - 1;
        v[0] = 0.0;
        v[last] = 0.0;
        let m = x.len();
        let mut v1 = vec![0.0; m];
        let mut v2 = vec![0.0; m];
        for i in 0..m {
            let start = i.saturating_sub(2).min(m - 5);
            let w = fornberg(x[i], &x[start..start + 5], 2);
            for j in 0..5 {
                v1[i] += w[1][j] * v[start + j];
                v2[i] += w[2][j] * v[start + j];
            }
        }
        Ok(Self {
            x: x.to_vec(),
            v,
            v1,
            v2,
        })
    }

    fn jet(&self, d: f64) -> [f64; 3] {
        let last = self.x.len() - 1;
        if d < self.x[0] || d > self.x[last] {
            return [0.0; 3];
        }
        let i = match self.x.partition_point(|&xi| xi <= d) {
            0 => 0,
            k => (k - 1).min(last - 1),
        };
        let h = self.x[i + 1] - self.x[i];
        let t = (d - self.x[i]) / h;
        let b = quintic_hermite_basis(t);
        let coef = [
            self.v[i],
            self.v1[i] * h,
            self.v2[i] * h * h,
            self.v[i + 1],
            self.v1[i + 1] * h,
            self.v2[i + 1] * h * h,
        ];
        let mut out = [0.0; 3];
        for k in 0..6 {
            out[0] += coef[k] * b[0][k];
            out[1] += coef[k] * b[1][k];
            out[2] += coef[k] * b[2][k];
        }
        [out[0], out[1] / h, out[2] / (h * h)]
    }
}

/// Quintic Hermite basis on `[0, 1]` and its first two derivatives, in the
/// order `(p0, m0, a0, p1, m1, a1)`.
fn quintic_hermite_basis(t: f64) -> [[f64; 6]; 3] {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    [
        [
            1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
            t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
            0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5),
            10.0 * t3 - 15.0 * t4 + 6.0 * t5,
            -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
            0.5 * (t3 - 2.0 * t4 + t5),
        ],
        [
            -30.0 * t2 + 60.0 * t3 - 30.0 * t4,
            1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
            0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4),
            30.0 * t2 - 60.0 * t3 + 30.0 * t4,
            -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
            0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4),
        ],
        [
            -60.0 * t + 180.0 * t2 - 120.0 * t3,
            -36.0 * t + 96.0 * t2 - 60.0 * t3,
            0.5 * (2.0 - 18.0 * t + 36.0 * t2 - 20.0 * t3),
            60.0 * t - 180.0 * t2 + 120.0 * t3,
            -24.0 * t + 84.0 * t2 - 60.0 * t3,
            0.5 * (6.0 * t - 24.0 * t2 + 20.0 * t3),
        ],
    ]
}

/// Fornberg finite-difference weights for derivatives `0..=order` at `z`.
fn fornberg(z: f64, x: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Builds a member of one of the parameterised families.
///
/// `shape` is `ε` for the extremal and concentration families, the width `a`
/// for Gaussians and the seed for bumps.
pub fn make_family(
    kind: FamilyKind,
    shape: f64,
    params: &Params,
    options: &FamilyOptions,
) -> Result<RadialProfile, ProfileError> {
    let n = f64::from(params.n);
    let alpha = || params.alpha.ok_or(ProfileError::MissingParam("alpha"));
    let p = params.p.unwrap_or(2.0);
    let positive = || {
        if shape > 0.0 && shape.is_finite() {
            Ok(shape)
        } else {
            Err(ProfileError::Shape(shape))
        }
    };
    let profile = match kind {
        FamilyKind::HardyPaper => {
            let eps = positive()?;
            RadialProfile::hardy_paper((n + alpha()?) / p + eps, options.truncate_at)
        }
        FamilyKind::RellichPaper => {
            let eps = positive()?;
            RadialProfile::rellich_paper((n + alpha()? - 4.0) / 2.0 + eps, options.truncate_at)
        }
        FamilyKind::HardyConcentration => {
            let eps = positive()?;
            let a_den = match options.mass_weight {
                Some(a) => a,
                None => alpha()?,
            };
            RadialProfile::power(-(n + a_den) / p + eps)
        }
        FamilyKind::RellichConcentration => {
            let eps = positive()?;
            RadialProfile::power((4.0 - n - alpha()?) / 2.0 + eps)
        }
        FamilyKind::Gaussian => RadialProfile::gaussian(positive()?)?,
        FamilyKind::Bump => {
            if !(shape >= 0.0 && shape.fract() == 0.0 && shape <= u64::MAX as f64) {
                return Err(ProfileError::Shape(shape));
            }
            RadialProfile::seeded_bump(shape as u64, options.window)?
        }
        FamilyKind::Grid => return Err(ProfileError::NeedsData("grid")),
    };
    Ok(profile.scaled(options.amplitude))
}

/// The power `s` for which the term's integrand with `φ = d^s` behaves like
/// `d^{−1}` at the origin: the threshold of logarithmic divergence.
pub fn critical_exponent(term: &BuiltTerm, model: &SpaceModel) -> Result<f64, ProfileError> {
    if !term.extra_weight.is_none() {
        return Err(ProfileError::NoExponentRule(format!(
            "terms with extra weight {}",
            term.extra_weight.name()
        )));
    }
    let n = f64::from(model.n());
    let a = term.weight_power;
    Ok(match term.integrand {
        BuiltIntegrand::AbsPhi(g) => -(n + a) / g,
        BuiltIntegrand::Grad(g) => 1.0 - (n + a) / g,
        BuiltIntegrand::Laplacian => 2.0 - (n + a) / 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn hyp(n: u32) -> SpaceModel {
        SpaceModel::hyperbolic(n).unwrap()
    }

    fn params(n: u32, alpha: f64, p: f64) -> Params {
        Params::new(n).with_alpha(alpha).with_p(p)
    }

    fn fd_check(phi: &RadialProfile, points: &[f64]) {
        for &d in points {
            let h = 1e-4 * d.min(1.0);
            let fd1 = (phi.value(d + h) - phi.value(d - h)) / (2.0 * h);
            let fd2 = (phi.value(d + h) - 2.0 * phi.value(d) + phi.value(d - h)) / (h * h);
            let d1 = phi.d1(d);
            let d2 = phi.d2(d);
            assert!((fd1 - d1).abs() <= 1e-6 * (1.0 + d1.abs()), "d1 at {d}: {fd1} vs {d1}");
            assert!((fd2 - d2).abs() <= 1e-5 * (1.0 + d2.abs()), "d2 at {d}: {fd2} vs {d2}");
        }
    }

    fn interior_points(lo: f64, hi: f64, avoid: &[f64], seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        while out.len() < 100 {
            let d = lo + (hi - lo) * rng.gen::<f64>();
            if avoid.iter().all(|b| (d - b).abs() > 1e-3) && d - lo > 1e-3 && hi - d > 1e-3 {
                out.push(d);
            }
        }
        out
    }

    #[test]
    fn hardy_paper_branches_match_at_one() {
        let p = params(3, 0.0, 2.0);
        let phi = make_family(FamilyKind::HardyPaper, 0.1, &p, &FamilyOptions::default()).unwrap();
        assert_eq!(phi.value(1.0), 1.0);
        assert_relative_eq!(phi.value(1.0 + 1e-12), 1.0, max_relative = 1e-11);
    }

    #[test]
    fn rellich_paper_is_c1_at_one() {
        let p = params(5, 1.5, 2.0);
        for eps in [0.3, 0.05] {
            let phi = make_family(FamilyKind::RellichPaper, eps, &p, &FamilyOptions::default()).unwrap();
            let k = (5.0 + 1.5 - 4.0) / 2.0 + eps;
            assert_eq!(phi.value(1.0), 1.0);
            assert_relative_eq!(phi.d1(1.0), -k);
            assert_relative_eq!(phi.d1(1.0 + 1e-14), -k, max_relative = 1e-12);
        }
    }

    #[test]
    fn gaussian_taylor_values() {
        let phi = RadialProfile::gaussian(1.0).unwrap();
        assert_eq!(phi.value(0.0), 1.0);
        assert_eq!(phi.d1(0.0), 0.0);
        assert_eq!(phi.d2(0.0), -2.0);
    }

    #[test]
    fn bump_centre_and_support() {
        let phi = RadialProfile::bump(1.0, 0.5).unwrap();
        assert_relative_eq!(phi.value(1.0), (-1.0f64).exp());
        assert_eq!(phi.support(), (0.5, 1.5));
        assert_eq!(phi.value(0.5), 0.0);
        assert_eq!(phi.value(1.5), 0.0);
        assert!(phi.value(0.5 + 1e-3) >= 0.0);
    }

    #[test]
    fn seeded_bumps_are_reproducible_and_inside_window() {
        for seed in 0..50 {
            let a = RadialProfile::seeded_bump(seed, (0.1, 1.8)).unwrap();
            let b = RadialProfile::seeded_bump(seed, (0.1, 1.8)).unwrap();
            assert_eq!(a, b);
            let (lo, hi) = a.support();
            assert!(lo > 0.1 && hi < 1.8);
        }
    }

    #[test]
    fn derivatives_are_consistent() {
        let p = params(3, 0.0, 2.0);
        let opts = FamilyOptions::default();
        let cases = [
            (
                make_family(FamilyKind::HardyConcentration, 0.1, &p, &opts).unwrap(),
                0.05,
                1.0,
            ),
            (
                make_family(FamilyKind::RellichConcentration, 0.2, &p, &opts).unwrap(),
                0.05,
                1.0,
            ),
            (make_family(FamilyKind::HardyPaper, 0.1, &p, &opts).unwrap(), 0.05, 10.0),
            (
                make_family(FamilyKind::RellichPaper, 0.1, &params(5, 1.5, 2.0), &opts).unwrap(),
                0.05,
                10.0,
            ),
            (RadialProfile::gaussian(1.5).unwrap(), 0.0, 4.0),
            (RadialProfile::bump(1.0, 0.5).unwrap(), 0.6, 1.4),
        ];
        for (i, (phi, lo, hi)) in cases.iter().enumerate() {
            let avoid = [0.5, 1.0, 9.0];
            fd_check(phi, &interior_points(*lo, *hi, &avoid, i as u64));
        }
    }

    #[test]
    fn grid_derivatives_are_consistent() {
        let x: Vec<f64> = (0..=40).map(|i| 0.2 + 0.05 * f64::from(i)).collect();
        let v: Vec<f64> = x.iter().map(|&d| ((d - 0.2) * (2.2 - d)).powi(2)).collect();
        let phi = RadialProfile::grid(&x, &v).unwrap();
        let knots = x.clone();
        fd_check(&phi, &interior_points(0.2, 2.2, &knots, 9));
        // interpolation reproduces the smooth function closely
        assert!((phi.value(1.01) - (0.81f64 * 1.19).powi(2)).abs() < 1e-6);
    }

    #[test]
    fn grid_rejects_short_or_unsorted_input() {
        assert_eq!(
            RadialProfile::grid(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]),
            Err(ProfileError::GridTooShort(3))
        );
        let x = [0.0, 1.0, 2.0, 3.0, 3.0, 4.0, 5.0];
        assert!(matches!(
            RadialProfile::grid(&x, &[0.0; 7]),
            Err(ProfileError::GridOrder(4))
        ));
        let text = "# d value\n0 0\n0.5 1\n1 2\n1.5 2\n2 1\n2.5 0.5\n3 0\n";
        let phi = RadialProfile::grid_from_text(text).unwrap();
        assert_eq!(phi.support(), (0.0, 3.0));
        assert_relative_eq!(phi.value(1.0), 2.0);
    }

    #[test]
    fn local_power_matches_log_log_slope() {
        let p = params(3, 0.0, 2.0);
        let opts = FamilyOptions::default();
        for (kind, eps) in [
            (FamilyKind::HardyConcentration, 0.1),
            (FamilyKind::RellichConcentration, 0.3),
            (FamilyKind::HardyPaper, 0.1),
        ] {
            let phi = make_family(kind, eps, &p, &opts).unwrap();
            let (a, b) = (1e-8f64, 1e-4f64);
            let slope = (phi.value(b).abs().ln() - phi.value(a).abs().ln()) / (b.ln() - a.ln());
            assert!((slope - phi.local_power_at_zero()).abs() < 1e-3, "{kind}: {slope}");
        }
    }

    #[test]
    fn regular_parts_reassemble_the_profile() {
        let model = hyp(4);
        let p = params(4, 0.5, 2.0);
        let opts = FamilyOptions::default();
        let profiles = [
            make_family(FamilyKind::HardyConcentration, 0.05, &p, &opts).unwrap(),
            make_family(FamilyKind::HardyPaper, 0.2, &p, &opts).unwrap(),
            make_family(FamilyKind::RellichPaper, 0.2, &p, &opts).unwrap(),
            RadialProfile::gaussian(0.7).unwrap().scaled(3.0),
        ];
        for phi in &profiles {
            let [p0, p1, p2] = phi.local_powers();
            for d in [0.01, 0.3, 0.75, 2.0] {
                let [r0, r1, r2] = phi.regular_parts(d, &model);
                assert_relative_eq!(r0 * d.powf(p0), phi.value(d), max_relative = 1e-12);
                assert_relative_eq!(r1 * d.powf(p1), phi.d1(d), max_relative = 1e-12);
                assert_relative_eq!(
                    r2 * d.powf(p2),
                    phi.laplacian(d, &model),
                    max_relative = 1e-10,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn regular_parts_survive_underflow() {
        let phi = RadialProfile::power(-1.5 + 0.0025);
        let [r0, r1, r2] = phi.regular_parts(1e-300, &hyp(3));
        assert_eq!(r0, 1.0);
        assert_relative_eq!(r1, -1.4975);
        assert!(r2.is_finite());
    }

    #[test]
    fn scaling_multiplies_everything() {
        let phi = RadialProfile::bump(1.0, 0.4).unwrap();
        let psi = phi.clone().scaled(7.3);
        for d in [0.7, 1.0, 1.2] {
            assert_relative_eq!(psi.value(d), 7.3 * phi.value(d));
            assert_relative_eq!(psi.d2(d), 7.3 * phi.d2(d));
        }
    }

    #[test]
    fn bad_shapes_are_rejected() {
        let p = params(3, 0.0, 2.0);
        let opts = FamilyOptions::default();
        assert!(make_family(FamilyKind::HardyConcentration, 0.0, &p, &opts).is_err());
        assert!(make_family(FamilyKind::Gaussian, -1.0, &p, &opts).is_err());
        assert!(make_family(FamilyKind::Grid, 1.0, &p, &opts).is_err());
        assert!(RadialProfile::bump(0.2, 0.5).is_err());
    }
}
