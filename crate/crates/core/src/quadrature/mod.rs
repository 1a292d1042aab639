//! Adaptive integration of weighted radial integrands.
//!
//! Integrands are stored factored as `d^β · h(d)`, where `β` is the exact
//! power-law behaviour at the origin supplied by the caller and `h` is
//! bounded near 0. When the left endpoint is the origin and `β` is negative
//! or fractional, the first panel `[0, b]` is integrated through the
//! substitution `d = b·u^m`, `m = 1/(1+β)`, which turns the integral into
//! `b^{1+β} m ∫₀¹ h(b u^m) du`. Only `h` is evaluated there, so the scheme
//! keeps working when `d` underflows (m can be in the hundreds for the
//! concentration families).
//!
//! The panel rule is the 7/15-point Gauss–Kronrod pair with the QUADPACK
//! error heuristic; panels are refined globally, largest error first.

mod term;

pub use term::{integrate_term, TermError};

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_SUBDIVISIONS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
    pub converged: bool,
}

impl QuadResult {
    fn zero() -> Self {
        Self {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions: 0,
            converged: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("integrand grows exponentially and the interval is unbounded: divergent tail")]
    DivergentTail,
    #[error("endpoint singularity d^{power} is not integrable at the origin")]
    DivergentEndpoint { power: f64 },
    #[error("integrand is not finite at d = {at}")]
    NonFinite { at: f64 },
    #[error("no convergence (estimate {} ± {})", best.value, best.error_estimate)]
    NonConvergence { best: QuadResult },
}

/// Behaviour of an integrand as `d → ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailClass {
    /// Integrand vanishes for `d ≥ D`.
    CompactSupport(f64),
    /// Decays faster than any exponential.
    GaussianDecay,
    /// A polynomial times a growing exponential: not integrable at infinity.
    PolynomialTimesExpGrowth,
    /// Behaves like `d^γ` with `γ < −1`.
    PowerDecay(f64),
}

/// Integrand `f(d) = d^β · h(d)`.
pub struct Integrand<'a> {
    regular: Box<dyn Fn(f64) -> f64 + 'a>,
    singular_power: f64,
    tail: TailClass,
    breakpoints: Vec<f64>,
}

impl<'a> Integrand<'a> {
    /// A bounded integrand with no special behaviour at the origin.
    pub fn new(f: impl Fn(f64) -> f64 + 'a) -> Self {
        Self::factored(0.0, f)
    }

    /// `d^beta · h(d)` with `h` bounded near the origin.
    pub fn factored(beta: f64, h: impl Fn(f64) -> f64 + 'a) -> Self {
        Self {
            regular: Box::new(h),
            singular_power: beta,
            tail: TailClass::CompactSupport(f64::INFINITY),
            breakpoints: Vec::new(),
        }
    }

    /// A full evaluator `f` known to behave like `c·d^beta` at the origin.
    pub fn with_singularity(beta: f64, f: impl Fn(f64) -> f64 + 'a) -> Self {
        Self::factored(beta, move |d| if d > 0.0 { f(d) / d.powf(beta) } else { f64::NAN })
    }

    pub fn tail(mut self, tail: TailClass) -> Self {
        self.tail = tail;
        self
    }

    pub fn breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints = points.into_iter().collect();
        self.breakpoints.sort_by(f64::total_cmp);
        self.breakpoints.dedup();
        self
    }

    pub fn singular_power(&self) -> f64 {
        self.singular_power
    }

    pub fn tail_class(&self) -> TailClass {
        self.tail
    }

    /// Full integrand value.
    pub fn eval(&self, d: f64) -> f64 {
        let h = (self.regular)(d);
        if h == 0.0 {
            return 0.0;
        }
        h * power(d, self.singular_power)
    }

    fn needs_substitution(&self) -> bool {
        let b = self.singular_power;
        b < 0.0 || (b - b.round()).abs() > 1e-12
    }
}

fn power(d: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        1.0
    } else if beta.fract() == 0.0 && beta.abs() < 64.0 {
        d.powi(beta as i32)
    } else {
        d.powf(beta)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_subdivisions: DEFAULT_MAX_SUBDIVISIONS,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Integrate `f` over `[a, b]` (`b` may be `f64::INFINITY`) to relative
/// tolerance `tol`.
pub fn integrate(f: &Integrand<'_>, a: f64, b: f64, tol: f64) -> Result<QuadResult, QuadError> {
    integrate_with(f, a, b, &QuadOptions::with_tol(tol))
}

pub fn integrate_with(f: &Integrand<'_>, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult, QuadError> {
    if !(opts.tol > 0.0) {
        return Err(QuadError::InvalidTolerance(opts.tol));
    }
    if !(a < b) || !a.is_finite() || a < 0.0 && f.needs_substitution() {
        return Err(QuadError::InvalidInterval { a, b });
    }
    if a == 0.0 && f.singular_power <= -1.0 {
        return Err(QuadError::DivergentEndpoint {
            power: f.singular_power,
        });
    }
    let b = match (b.is_finite(), f.tail) {
        (true, TailClass::CompactSupport(end)) => b.min(end),
        (true, _) => b,
        (false, TailClass::CompactSupport(end)) if end.is_finite() => end,
        (false, TailClass::CompactSupport(_)) => return Err(QuadError::DivergentTail),
        (false, TailClass::PolynomialTimesExpGrowth) => return Err(QuadError::DivergentTail),
        (false, TailClass::GaussianDecay) => return integrate_gaussian_tail(f, a, opts),
        (false, TailClass::PowerDecay(gamma)) => return integrate_power_tail(f, a, gamma, opts),
    };
    if !(a < b) {
        return Ok(QuadResult::zero());
    }
    let panels = finite_panels(f, a, b);
    adapt(f, &panels, opts.tol, 0.0, opts.max_subdivisions)
}

#[derive(Debug, Clone, Copy)]
enum Map {
    Identity,
    /// `d = scale · u^m` on `u ∈ [0, 1]`.
    Power {
        scale: f64,
        m: f64,
    },
    /// `d = start · u^{−k}` on `u ∈ (0, 1]`.
    Reciprocal {
        start: f64,
        k: f64,
    },
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    map: Map,
}

fn finite_panels(f: &Integrand<'_>, a: f64, b: f64) -> Vec<Panel> {
    let mut cuts = vec![a];
    cuts.extend(f.breakpoints.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);
    cuts.windows(2)
        .map(|w| {
            if w[0] == 0.0 && f.needs_substitution() {
                Panel {
                    lo: 0.0,
                    hi: 1.0,
                    map: Map::Power {
                        scale: w[1],
                        m: 1.0 / (1.0 + f.singular_power),
                    },
                }
            } else {
                Panel {
                    lo: w[0],
                    hi: w[1],
                    map: Map::Identity,
                }
            }
        })
        .collect()
}

fn mapped_eval(f: &Integrand<'_>, map: Map, u: f64) -> f64 {
    match map {
        Map::Identity => f.eval(u),
        Map::Power { scale, m } => {
            let d = scale * u.powf(m);
            let h = (f.regular)(d);
            if h == 0.0 {
                0.0
            } else {
                scale.powf(1.0 + f.singular_power) * m * h
            }
        }
        Map::Reciprocal { start, k } => {
            let d = start * u.powf(-k);
            if !d.is_finite() {
                return 0.0;
            }
            let v = f.eval(d);
            if v == 0.0 {
                0.0
            } else {
                v * k * d / u
            }
        }
    }
}

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct RuleOutput {
    value: f64,
    error: f64,
}

fn gk15(f: &Integrand<'_>, map: Map, lo: f64, hi: f64) -> Result<RuleOutput, QuadError> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let eval = |u: f64| -> Result<f64, QuadError> {
        let v = mapped_eval(f, map, u);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadError::NonFinite { at: u })
        }
    };
    let fc = eval(center)?;
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(RuleOutput { value, error })
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    panel: usize,
    value: f64,
    error: f64,
    seq: u64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        // largest error first; older segments win ties
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Global adaptive refinement over a fixed set of panels.
fn adapt(
    f: &Integrand<'_>,
    panels: &[Panel],
    rel_tol: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<QuadResult, QuadError> {
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    let mut seq = 0u64;
    for (i, p) in panels.iter().enumerate() {
        let r = gk15(f, p.map, p.lo, p.hi)?;
        heap.push(Segment {
            lo: p.lo,
            hi: p.hi,
            panel: i,
            value: r.value,
            error: r.error,
            seq,
        });
        seq += 1;
    }
    let mut subdivisions = 0;
    loop {
        let (value, error) = totals(heap.iter().chain(frozen.iter()));
        if error <= rel_tol * value.abs() || error <= abs_tol {
            break;
        }
        if subdivisions >= max_subdivisions {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi)
            || (worst.hi - worst.lo) <= 64.0 * f64::EPSILON * worst.lo.abs().max(worst.hi.abs())
        {
            frozen.push(worst);
            continue;
        }
        let map = panels[worst.panel].map;
        let left = gk15(f, map, worst.lo, mid)?;
        let right = gk15(f, map, mid, worst.hi)?;
        subdivisions += 1;
        for (lo, hi, r) in [(worst.lo, mid, left), (mid, worst.hi, right)] {
            heap.push(Segment {
                lo,
                hi,
                panel: worst.panel,
                value: r.value,
                error: r.error,
                seq,
            });
            seq += 1;
        }
    }
    let (value, error_estimate) = totals(heap.iter().chain(frozen.iter()));
    let converged = error_estimate <= rel_tol * value.abs().max(1.0) || error_estimate <= abs_tol;
    let result = QuadResult {
        value,
        error_estimate,
        subdivisions,
        converged,
    };
    if converged {
        Ok(result)
    } else {
        Err(QuadError::NonConvergence { best: result })
    }
}

/// Sums in a fixed order (panel, then position) so results do not depend on
/// heap layout.
fn totals<'s>(segments: impl Iterator<Item = &'s Segment>) -> (f64, f64) {
    let mut all: Vec<&Segment> = segments.collect();
    all.sort_by(|a, b| a.panel.cmp(&b.panel).then(a.lo.total_cmp(&b.lo)));
    all.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error))
}

fn integrate_gaussian_tail(f: &Integrand<'_>, a: f64, opts: &QuadOptions) -> Result<QuadResult, QuadError> {
    let start = f
        .breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a)
        .fold(f64::NAN, f64::max);
    let start = if start.is_nan() { a + 1.0 } else { start };
    // pieces run at half the tolerance so their summed errors plus the
    // truncation bound stay within the overall target
    let inner = 0.5 * opts.tol;
    let head = adapt(f, &finite_panels(f, a, start), inner, 0.0, opts.max_subdivisions)?;
    let width = start - a;
    let mut partial = head.value;
    let mut error = head.error_estimate;
    let mut subdivisions = head.subdivisions;
    let mut lo = start;
    let mut previous = f64::INFINITY;
    for _ in 0..10_000 {
        let hi = lo + width;
        let target = inner * partial.abs() / 10.0;
        let panel = [Panel {
            lo,
            hi,
            map: Map::Identity,
        }];
        let r = adapt(f, &panel, inner, target, opts.max_subdivisions)?;
        partial += r.value;
        error += r.error_estimate;
        subdivisions += r.subdivisions;
        let small = r.value.abs() <= opts.tol * partial.abs() / 10.0;
        let decaying = r.value.abs() <= 0.5 * previous;
        if small && decaying {
            // super-exponential decay: the remaining tail is below the last panel
            let bound = r.value.abs();
            let result = QuadResult {
                value: partial,
                error_estimate: error + bound,
                subdivisions,
                converged: error + bound <= opts.tol * partial.abs().max(1.0),
            };
            return if result.converged {
                Ok(result)
            } else {
                Err(QuadError::NonConvergence { best: result })
            };
        }
        previous = r.value.abs();
        lo = hi;
    }
    Err(QuadError::NonConvergence {
        best: QuadResult {
            value: partial,
            error_estimate: f64::INFINITY,
            subdivisions,
            converged: false,
        },
    })
}

fn integrate_power_tail(f: &Integrand<'_>, a: f64, gamma: f64, opts: &QuadOptions) -> Result<QuadResult, QuadError> {
    if gamma >= -1.0 {
        return Err(QuadError::DivergentTail);
    }
    let start = f
        .breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a)
        .fold(f64::NAN, f64::max);
    let start = if start.is_nan() { a + 1.0 } else { start };
    let mut panels = finite_panels(f, a, start);
    panels.push(Panel {
        lo: 0.0,
        hi: 1.0,
        map: Map::Reciprocal {
            start,
            k: -1.0 / (gamma + 1.0),
        },
    });
    adapt(f, &panels, opts.tol, 0.0, opts.max_subdivisions)
}
