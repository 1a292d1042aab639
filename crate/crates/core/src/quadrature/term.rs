use thiserror::Error;

use super::{integrate_with, Integrand, QuadError, QuadOptions, QuadResult, TailClass};
use crate::catalog::{BuiltIntegrand, BuiltTerm, Measure};
use crate::geometry::{ModelKind, SpaceModel};
use crate::profiles::{ProfileTail, RadialProfile};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TermError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("profile support reaches d = {support_end} but the term's weight is singular at R = {radius}")]
    BoundaryWeightSingularity { radius: f64, support_end: f64 },
}

/// `(∫ d^w · extra(d) · I(φ)(d) · density(d) dd)^γ` over the support of `φ`.
///
/// The coefficient and the sphere-area factor of the term are not applied.
/// The power of `d` at the origin is the term's weight power plus the
/// profile's local power for the integrand plus `n − 1` from the density.
pub fn integrate_term(
    term: &BuiltTerm,
    phi: &RadialProfile,
    model: &SpaceModel,
    opts: &QuadOptions,
) -> Result<QuadResult, TermError> {
    let (lo, hi) = phi.support();
    if let Some(radius) = term.extra_weight.singular_radius() {
        if hi >= radius {
            return Err(TermError::BoundaryWeightSingularity {
                radius,
                support_end: hi,
            });
        }
    }
    if phi.amplitude() == 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions: 0,
            converged: true,
        });
    }
    let n1 = f64::from(model.n() - 1);
    let [p0, p1, p2] = phi.local_powers();
    let local = match term.integrand {
        BuiltIntegrand::AbsPhi(g) => g * p0,
        BuiltIntegrand::Grad(g) => g * p1,
        BuiltIntegrand::Laplacian => 2.0 * p2,
    };
    let beta = term.weight_power + local + n1;
    let integrand = term.integrand;
    let extra = term.extra_weight;
    let measure = term.measure;
    let model = *model;
    let h = move |d: f64| -> f64 {
        let r = phi.regular_parts(d, &model);
        let k = match integrand {
            BuiltIntegrand::AbsPhi(g) => abs_pow(r[0], g),
            BuiltIntegrand::Grad(g) => abs_pow(r[1], g),
            BuiltIntegrand::Laplacian => r[2] * r[2],
        };
        if k == 0.0 {
            return 0.0;
        }
        let density = match measure {
            Measure::Riemannian => model.jacobian_regular(d),
            Measure::Lebesgue => model.lebesgue_density_regular(d),
        };
        let v = k * extra.eval(d) * density;
        if v.is_finite() || !density.is_infinite() {
            return v;
        }
        // the density overflowed: recombine in log space
        (k.ln() + extra.eval(d).ln() + n1 * ln_sinhc(d)).exp()
    };
    let tail = match phi.tail() {
        ProfileTail::Compact => TailClass::CompactSupport(hi),
        ProfileTail::Gaussian => TailClass::GaussianDecay,
        ProfileTail::Power(g) => match (model.kind(), measure) {
            (ModelKind::Hyperbolic, Measure::Riemannian) => TailClass::PolynomialTimesExpGrowth,
            (ModelKind::Hyperbolic, Measure::Lebesgue) => TailClass::GaussianDecay,
            (ModelKind::Euclidean, _) => {
                let far = match integrand {
                    BuiltIntegrand::AbsPhi(e) => e * g[0],
                    BuiltIntegrand::Grad(e) => e * g[1],
                    BuiltIntegrand::Laplacian => 2.0 * g[2],
                };
                TailClass::PowerDecay(term.weight_power + far + n1)
            }
        },
    };
    let f = Integrand::factored(beta, h)
        .tail(tail)
        .breakpoints(phi.breakpoints().iter().copied());
    let r = integrate_with(&f, lo, hi, opts)?;
    let gamma = term.outer_power;
    if gamma == 1.0 {
        return Ok(r);
    }
    let value = r.value.max(0.0).powf(gamma);
    let error_estimate = if r.value > 0.0 {
        (gamma * r.value.powf(gamma - 1.0) * r.error_estimate).abs()
    } else {
        r.error_estimate.powf(gamma)
    };
    Ok(QuadResult {
        value,
        error_estimate,
        ..r
    })
}

fn abs_pow(x: f64, g: f64) -> f64 {
    if g == 2.0 {
        x * x
    } else {
        x.abs().powf(g)
    }
}

/// `ln(sinh(d)/d)` for large `d`.
fn ln_sinhc(d: f64) -> f64 {
    d - std::f64::consts::LN_2 - d.ln() + (-(-2.0 * d).exp()).ln_1p()
}
