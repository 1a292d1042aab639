use std::f64::consts::PI;

use serde::Serialize;
use statrs::function::gamma::gamma;

use super::{Problem, Result};
use crate::catalog::Params;
use crate::geometry::{sinhc, ModelKind};
use crate::profiles::RadialProfile;
use crate::quadrature::{integrate_with, Integrand, QuadOptions, TailClass};

/// Iterates stop once the width passes this value.
pub const DEFAULT_A_CAP: f64 = 1e6;
const MAX_ITERATIONS: usize = 200;
const STEP_TOL: f64 = 1e-10;

/// How the Gaussian volume integrals in the width formula are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaConvention {
    /// `I_m(a) = ∫₀^∞ e^{−a d²} sinh^{m−1}(d) dd`.
    RadialOnly,
    /// `|S^{m−1}| · I_m(a)`, the full volume integral over `H^m`.
    WithSphereArea,
}

impl AlphaConvention {
    pub fn name(&self) -> &'static str {
        match self {
            AlphaConvention::RadialOnly => "radial-only",
            AlphaConvention::WithSphereArea => "with-sphere-area",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "radial-only" => Some(AlphaConvention::RadialOnly),
            "with-sphere-area" => Some(AlphaConvention::WithSphereArea),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaperAlphaReport {
    pub n: u32,
    pub convention: AlphaConvention,
    pub iterations: usize,
    pub converged: bool,
    /// The iterate left the range `a ≤ cap` or stopped being finite.
    pub diverged: bool,
    /// Last iterate inside the cap.
    pub a: f64,
    pub last_step: f64,
    /// Uncertainty-principle quotient of `e^{−a d²}`.
    pub q: f64,
    /// `Q − n²/4`.
    pub gap: f64,
    pub history: Vec<f64>,
}

fn gaussian_volume(m: u32, a: f64, convention: AlphaConvention, opts: &QuadOptions) -> Result<f64> {
    let k = f64::from(m - 1);
    let f = Integrand::factored(k, move |d: f64| (-a * d * d).exp() * sinhc(d).powf(k))
        .tail(TailClass::GaussianDecay)
        .breakpoints([0.5, 1.0, 2.0, 4.0].map(|t| t / a.sqrt()));
    let i = integrate_with(&f, 0.0, f64::INFINITY, opts).map_err(crate::quadrature::TermError::from)?;
    Ok(match convention {
        AlphaConvention::RadialOnly => i.value,
        AlphaConvention::WithSphereArea => {
            let h = 0.5 * f64::from(m);
            2.0 * PI.powf(h) / gamma(h) * i.value
        }
    })
}

/// Fixed-point iteration `a ← ((n−1)/(n−2))(n − 1 + 2π C_{n−2}(a)/C_n(a))`
/// from `a₀ = start`, then the quotient at the last iterate.
pub fn solve_paper_alpha(n: u32, convention: AlphaConvention, start: f64, cap: f64) -> Result<PaperAlphaReport> {
    let problem = Problem::builtin("hpw", Params::new(n), ModelKind::Hyperbolic)?;
    let opts = *problem.quad_options();
    let nf = f64::from(n);
    let map = |a: f64| -> Result<f64> {
        let ratio = gaussian_volume(n - 2, a, convention, &opts)? / gaussian_volume(n, a, convention, &opts)?;
        Ok((nf - 1.0) / (nf - 2.0) * (nf - 1.0 + 2.0 * PI * ratio))
    };
    let mut a = start;
    let mut history = vec![a];
    let (mut converged, mut diverged, mut last_step) = (false, false, f64::NAN);
    for _ in 0..MAX_ITERATIONS {
        let next = map(a)?;
        last_step = (next - a).abs();
        if !next.is_finite() || next > cap {
            diverged = true;
            break;
        }
        a = next;
        history.push(a);
        if last_step < STEP_TOL {
            converged = true;
            break;
        }
    }
    let q = problem.rayleigh_quotient(&RadialProfile::gaussian(a)?)?.q;
    Ok(PaperAlphaReport {
        n,
        convention,
        iterations: history.len() - 1,
        converged,
        diverged,
        a,
        last_step,
        q,
        gap: q - nf * nf / 4.0,
        history,
    })
}
