use rayon::prelude::*;
use serde::Serialize;

use super::{Problem, Result, SharpnessError};
use crate::catalog::{InequalityShape, Params};
use crate::geometry::ModelKind;
use crate::profiles::{critical_exponent, make_family, FamilyKind, FamilyOptions, RadialProfile};

/// Which profiles a sweep evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepFamily {
    /// `d^{s*+ε}` with `s*` the critical exponent of the main right-hand
    /// term, cut off smoothly on `[1/2, 1]`.
    Concentration,
    /// The piecewise power family of the entry, truncated at the options'
    /// radius.
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    /// `ε`, or the Gaussian width `a`.
    pub shape: f64,
    pub q: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub id: String,
    pub model: ModelKind,
    pub params: Params,
    pub family: String,
    pub rows: Vec<SweepRow>,
    /// Linear least-squares fit through the last three rows, evaluated at
    /// `ε = 0` (or `1/a = 0`).
    pub extrapolated_limit: f64,
    pub sharp_constant: Option<f64>,
    /// `|extrapolated_limit − K|/K`.
    pub relative_gap: Option<f64>,
}

impl SweepReport {
    pub fn min_q(&self) -> f64 {
        self.rows.iter().map(|r| r.q).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianScan {
    #[serde(flatten)]
    pub sweep: SweepReport,
    /// Width minimizing the quotient after golden-section refinement.
    pub argmin: f64,
    pub min_q: f64,
}

/// `Q₀` of the least-squares line `Q = Q₀ + c·x` through the last three
/// points (two points give the line through them, one gives itself).
pub fn extrapolate_linear(xs: &[f64], ys: &[f64]) -> f64 {
    let k = xs.len().min(ys.len());
    let start = k.saturating_sub(3);
    let (xs, ys) = (&xs[start..k], &ys[start..k]);
    match xs.len() {
        0 => f64::NAN,
        1 => ys[0],
        m => {
            let m = m as f64;
            let mx = xs.iter().sum::<f64>() / m;
            let my = ys.iter().sum::<f64>() / m;
            let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
            let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
            my - slope * mx
        }
    }
}

impl Problem {
    fn family_kind(&self) -> Result<FamilyKind> {
        self.built()
            .sharpness_family
            .ok_or_else(|| SharpnessError::NoFamily(self.id().to_string()))
    }

    fn uses_widths(&self) -> Result<bool> {
        Ok(self.family_kind()? == FamilyKind::Gaussian || self.built().shape == InequalityShape::Product)
    }

    /// The profile of `family` at shape parameter `shape`.
    pub fn family_member(&self, family: SweepFamily, shape: f64, options: &FamilyOptions) -> Result<RadialProfile> {
        let kind = self.family_kind()?;
        if self.uses_widths()? {
            return Ok(RadialProfile::gaussian(shape)?.scaled(options.amplitude));
        }
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(SharpnessError::ShapeList(format!("ε must be positive, got {shape}")));
        }
        match family {
            SweepFamily::Concentration => {
                let main = self
                    .built()
                    .main_rhs()
                    .ok_or_else(|| SharpnessError::NoFamily(self.id().to_string()))?;
                let s = critical_exponent(main, self.model())?;
                Ok(RadialProfile::power(s + shape).scaled(options.amplitude))
            }
            SweepFamily::Paper => {
                let extremal = match kind {
                    FamilyKind::HardyPaper | FamilyKind::HardyConcentration => FamilyKind::HardyPaper,
                    FamilyKind::RellichPaper | FamilyKind::RellichConcentration => FamilyKind::RellichPaper,
                    _ => return Err(SharpnessError::NoFamily(self.id().to_string())),
                };
                Ok(make_family(extremal, shape, self.params(), options)?)
            }
        }
    }

    /// Evaluates the quotient on each shape in parallel; rows keep the input
    /// order. `ε` lists must be strictly decreasing, width lists strictly
    /// increasing, so the extrapolation variable shrinks along the list.
    pub fn sweep(&self, family: SweepFamily, shapes: &[f64], options: &FamilyOptions) -> Result<SweepReport> {
        let widths = self.uses_widths()?;
        if shapes.is_empty() {
            return Err(SharpnessError::ShapeList("empty".into()));
        }
        let ordered = shapes
            .windows(2)
            .all(|w| if widths { w[0] < w[1] } else { w[0] > w[1] });
        if !ordered {
            let want = if widths { "increasing" } else { "decreasing" };
            return Err(SharpnessError::ShapeList(format!("values must be strictly {want}")));
        }
        let rows = shapes
            .par_iter()
            .map(|&shape| {
                let phi = self.family_member(family, shape, options)?;
                let q = self.rayleigh_quotient(&phi)?;
                Ok(SweepRow {
                    shape,
                    q: q.q,
                    numerator: q.numerator,
                    denominator: q.denominator,
                    error: q.error,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let xs: Vec<f64> = rows
            .iter()
            .map(|r| if widths { 1.0 / r.shape } else { r.shape })
            .collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.q).collect();
        let limit = extrapolate_linear(&xs, &ys);
        let sharp_constant = self.built().sharp_constant;
        let family_name = if widths {
            FamilyKind::Gaussian.name().to_string()
        } else {
            match family {
                SweepFamily::Concentration => "concentration".to_string(),
                SweepFamily::Paper => "paper".to_string(),
            }
        };
        Ok(SweepReport {
            id: self.id().to_string(),
            model: self.model().kind(),
            params: *self.params(),
            family: family_name,
            rows,
            extrapolated_limit: limit,
            sharp_constant,
            relative_gap: sharp_constant.map(|k| (limit - k).abs() / k),
        })
    }

    /// Quotients of Gaussians `e^{−a d²}` over an increasing grid of widths,
    /// with the grid minimum refined by golden-section search in `ln a`
    /// between its neighbours.
    pub fn gaussian_scan(&self, widths: &[f64]) -> Result<GaussianScan> {
        let sweep = self.sweep(SweepFamily::Concentration, widths, &FamilyOptions::default())?;
        let q_at = |a: f64| -> Result<f64> { Ok(self.rayleigh_quotient(&RadialProfile::gaussian(a)?)?.q) };
        let (i, best) = sweep
            .rows
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.q.total_cmp(&b.1.q))
            .map(|(i, r)| (i, *r))
            .expect("sweep has rows");
        let (mut argmin, mut min_q) = (best.shape, best.q);
        if sweep.rows.len() >= 3 && i > 0 && i + 1 < sweep.rows.len() {
            let (a, b) = golden_min(sweep.rows[i - 1].shape.ln(), sweep.rows[i + 1].shape.ln(), |x| {
                q_at(x.exp())
            })?;
            if b < min_q {
                argmin = a.exp();
                min_q = b;
            }
        }
        Ok(GaussianScan { sweep, argmin, min_q })
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn golden_min(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..60 {
        if (hi - lo).abs() <= 1e-7 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Gaussian scan of the first-order uncertainty principle in dimension `n`
/// on hyperbolic space.
pub fn hpw_scan(params: Params, widths: &[f64]) -> Result<GaussianScan> {
    Problem::builtin("hpw", params, ModelKind::Hyperbolic)?.gaussian_scan(widths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn extrapolation_is_exact_on_lines() {
        let xs = [0.4, 0.2, 0.1, 0.05];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 + 3.0 * x).collect();
        assert_relative_eq!(extrapolate_linear(&xs, &ys), 2.0, epsilon = 1e-14);
        assert_eq!(extrapolate_linear(&[0.1], &[5.0]), 5.0);
        assert_relative_eq!(extrapolate_linear(&[0.2, 0.1], &[3.0, 2.0]), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, y) = golden_min(-1.0, 3.0, |x| Ok((x - 1.2) * (x - 1.2) + 0.5)).unwrap();
        assert_relative_eq!(x, 1.2, epsilon = 1e-6);
        assert_relative_eq!(y, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn hardy_poincare_sweep_approaches_constant() {
        let p = Problem::builtin(
            "hardy-poincare",
            Params::new(3).with_alpha(0.0).with_p(2.0),
            ModelKind::Hyperbolic,
        )
        .unwrap();
        let r = p
            .sweep(
                SweepFamily::Concentration,
                &[0.1, 0.05, 0.025],
                &FamilyOptions::default(),
            )
            .unwrap();
        assert_eq!(r.rows.len(), 3);
        assert!(r.rows.windows(2).all(|w| w[1].q < w[0].q));
        assert!(r.rows.iter().all(|row| row.q > 2.25));
        assert!(r.relative_gap.unwrap().abs() < 0.02, "{r:?}");
    }

    #[test]
    fn shape_lists_are_validated() {
        let p = Problem::builtin(
            "hardy-poincare",
            Params::new(3).with_alpha(0.0).with_p(2.0),
            ModelKind::Hyperbolic,
        )
        .unwrap();
        let o = FamilyOptions::default();
        assert!(matches!(
            p.sweep(SweepFamily::Paper, &[], &o),
            Err(SharpnessError::ShapeList(_))
        ));
        assert!(matches!(
            p.sweep(SweepFamily::Paper, &[0.1, 0.2], &o),
            Err(SharpnessError::ShapeList(_))
        ));
        assert!(p.sweep(SweepFamily::Paper, &[0.1, -0.2], &o).is_err());
    }

    #[test]
    fn hpw_scan_stays_above_constant() {
        let s = hpw_scan(Params::new(3), &[0.25, 1.0, 4.0, 16.0]).unwrap();
        assert!(s.sweep.rows.iter().all(|r| r.q >= 2.25));
        assert!(s.min_q >= 2.25 && s.min_q <= s.sweep.min_q());
    }
}
