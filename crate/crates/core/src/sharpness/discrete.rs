//! Smallest generalized eigenvalue of the discretized quotient on a
//! log-spaced Dirichlet grid.

use serde::Serialize;

use super::banded::{dot, SymBand};
use super::{Problem, Result, SharpnessError};
use crate::catalog::{BuiltIntegrand, BuiltTerm, InequalityShape, Measure, Params};
use crate::geometry::{ModelKind, SpaceModel};

/// Gauss–Legendre nodes and weights on `[−1, 1]`, 8 points.
const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

const BISECTION_STEPS: usize = 200;
const INVERSE_STEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscreteGrid {
    /// Inner Dirichlet radius.
    pub delta: f64,
    /// Outer Dirichlet radius.
    pub outer: f64,
    /// Number of elements; the grid has `points + 1` nodes.
    pub points: usize,
}

impl Default for DiscreteGrid {
    fn default() -> Self {
        Self {
            delta: 1e-3,
            outer: 10.0,
            points: 1000,
        }
    }
}

impl DiscreteGrid {
    fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.outer > self.delta && self.outer.is_finite()) {
            return Err(SharpnessError::Grid(format!(
                "need 0 < delta < D, got delta = {}, D = {}",
                self.delta, self.outer
            )));
        }
        if self.points < 50 {
            return Err(SharpnessError::Grid(format!(
                "need at least 50 points, got {}",
                self.points
            )));
        }
        Ok(())
    }

    /// `x_i = δ (D/δ)^{i/N}`; doubling `N` keeps every old node.
    pub fn nodes(&self) -> Vec<f64> {
        let ratio = (self.outer / self.delta).ln();
        let n = self.points as f64;
        let mut x: Vec<f64> = (0..=self.points)
            .map(|i| self.delta * (ratio * i as f64 / n).exp())
            .collect();
        x[self.points] = self.outer;
        x
    }
}

/// Stiffness `a` and mass `b` over the interior nodes of `nodes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Forms {
    pub a: SymBand,
    pub b: SymBand,
    pub nodes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteReport {
    pub id: String,
    pub model: ModelKind,
    pub params: Params,
    pub grid: DiscreteGrid,
    pub lambda_min: f64,
    pub sharp_constant: Option<f64>,
    /// `lambda_min` recomputed with the inner radius divided by ten.
    pub lambda_at_delta_tenth: Option<f64>,
    pub nodes: Vec<f64>,
    /// Eigenvector on all nodes, boundary zeros included, scaled to max 1.
    pub eigenvector: Vec<f64>,
}

fn weight<'t>(term: &'t BuiltTerm, model: &SpaceModel) -> impl Fn(f64) -> f64 + 't {
    let model = *model;
    move |d: f64| {
        let density = match term.measure {
            Measure::Riemannian => model.jacobian(d),
            Measure::Lebesgue => model.lebesgue_density(d),
        };
        term.sphere_scale * d.powf(term.weight_power) * term.extra_weight.eval(d) * density
    }
}

fn quadratic(problem: &Problem) -> Result<(&BuiltTerm, &BuiltTerm)> {
    let built = problem.built();
    let fail = |reason: &str| SharpnessError::NotQuadratic {
        id: built.id.clone(),
        reason: reason.to_string(),
    };
    if built.shape != InequalityShape::Linear {
        return Err(fail("product-shape inequality"));
    }
    let lhs = built.lhs().next().ok_or_else(|| fail("no lhs term"))?;
    let rhs = built.main_rhs().ok_or_else(|| fail("no rhs term"))?;
    for t in [lhs, rhs] {
        if t.outer_power != 1.0 {
            return Err(fail("outer power is not 1"));
        }
        match t.integrand {
            BuiltIntegrand::AbsPhi(g) | BuiltIntegrand::Grad(g) if g != 2.0 => {
                return Err(fail("integrand exponent is not 2"))
            }
            _ => {}
        }
    }
    if rhs.integrand == BuiltIntegrand::Laplacian {
        return Err(fail("second-order denominator"));
    }
    Ok((lhs, rhs))
}

/// Adds the P1 element form of `term` to `m`.
fn add_element_form(m: &mut SymBand, term: &BuiltTerm, model: &SpaceModel, nodes: &[f64]) {
    let w = weight(term, model);
    let last = nodes.len() - 1;
    for e in 0..last {
        let (x0, x1) = (nodes[e], nodes[e + 1]);
        let h = x1 - x0;
        let mut local = [[0.0; 2]; 2];
        for &(t, wq) in &GL8 {
            let x = 0.5 * (x0 + x1) + 0.5 * h * t;
            let jw = 0.5 * h * wq * w(x);
            match term.integrand {
                BuiltIntegrand::Grad(_) => {
                    let g = jw / (h * h);
                    local[0][0] += g;
                    local[1][1] += g;
                    local[0][1] -= g;
                }
                BuiltIntegrand::AbsPhi(_) => {
                    let left = (x1 - x) / h;
                    let n = [left, 1.0 - left];
                    local[0][0] += jw * n[0] * n[0];
                    local[1][1] += jw * n[1] * n[1];
                    local[0][1] += jw * n[0] * n[1];
                }
                BuiltIntegrand::Laplacian => unreachable!("second-order terms use the difference form"),
            }
        }
        // node k of the grid is unknown k − 1; the end nodes are pinned
        let idx = |k: usize| (k >= 1 && k < last).then(|| k - 1);
        for (a, ka) in [(0, e), (1, e + 1)] {
            for (b, kb) in [(0, e), (1, e + 1)] {
                if let (Some(i), Some(j)) = (idx(ka), idx(kb)) {
                    if i >= j {
                        let v = if a == b { local[a][a] } else { local[0][1] };
                        m.add(i, j, v);
                    }
                }
            }
        }
    }
}

/// `Lᵀ W L` with `L` the three-point nonuniform difference form of
/// `u'' + (n − 1) k(d) u'` at the interior nodes.
fn add_laplacian_form(m: &mut SymBand, term: &BuiltTerm, model: &SpaceModel, nodes: &[f64]) {
    let w = weight(term, model);
    let c = f64::from(model.n() - 1);
    let last = nodes.len() - 1;
    let unknowns = last - 1;
    for i in 1..last {
        let (hm, hp) = (nodes[i] - nodes[i - 1], nodes[i + 1] - nodes[i]);
        let s = hm + hp;
        let k = c * model.curvature(nodes[i]);
        let row = [
            2.0 / (hm * s) - k * hp / (hm * s),
            -2.0 / (hm * hp) + k * (hp - hm) / (hm * hp),
            2.0 / (hp * s) + k * hm / (hp * s),
        ];
        let wi = w(nodes[i]) * 0.5 * s;
        // row entries act on unknowns i − 2, i − 1, i
        let cols: Vec<(usize, f64)> = (0..3)
            .filter_map(|t| {
                let node = i + t - 1;
                (node >= 1 && node <= unknowns).then(|| (node - 1, row[t]))
            })
            .collect();
        for &(p, lp) in &cols {
            for &(q, lq) in &cols {
                if p >= q {
                    m.add(p, q, wi * lp * lq);
                }
            }
        }
    }
}

/// Assembles the LHS form and the main RHS form of `problem` on `nodes`,
/// with Dirichlet conditions at both ends.
pub fn assemble_forms(problem: &Problem, nodes: &[f64]) -> Result<Forms> {
    let (lhs, rhs) = quadratic(problem)?;
    if nodes.len() < 3 || nodes[0] <= 0.0 || nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SharpnessError::Grid(
            "nodes must be positive, increasing, at least three".into(),
        ));
    }
    let end = nodes[nodes.len() - 1];
    for t in [lhs, rhs] {
        if let Some(r) = t.extra_weight.singular_radius() {
            if end >= r {
                return Err(SharpnessError::Grid(format!(
                    "outer radius {end} reaches the weight singularity at {r}"
                )));
            }
        }
    }
    let m = nodes.len() - 2;
    let model = problem.model();
    let a = if lhs.integrand == BuiltIntegrand::Laplacian {
        let mut a = SymBand::zeros(m, 2);
        add_laplacian_form(&mut a, lhs, model, nodes);
        a
    } else {
        let mut a = SymBand::zeros(m, 1);
        add_element_form(&mut a, lhs, model, nodes);
        a
    };
    let mut b = SymBand::zeros(m, 1);
    add_element_form(&mut b, rhs, model, nodes);
    Ok(Forms {
        a,
        b,
        nodes: nodes.to_vec(),
    })
}

fn count_below(a: &SymBand, b: &SymBand, sigma: f64) -> Option<usize> {
    a.shifted(sigma, b).ldlt().map(|f| f.negative_pivots())
}

/// Smallest `λ` with `A v = λ B v`: Sylvester-inertia bisection followed by
/// shift-invert iteration and a final Rayleigh quotient.
pub fn generalized_min_eigen(a: &SymBand, b: &SymBand) -> Result<(f64, Vec<f64>)> {
    let m = a.dim();
    if m == 0 || b.dim() != m {
        return Err(SharpnessError::Assembly("empty or mismatched forms".into()));
    }
    let fb = b.ldlt().filter(|f| f.is_positive_definite());
    if fb.is_none() {
        return Err(SharpnessError::Assembly("mass form is not positive definite".into()));
    }
    let mut hi = (0..m).map(|i| a.get(i, i) / b.get(i, i)).fold(f64::INFINITY, f64::min);
    let mut lo = 0.0;
    let mut widen = hi.abs().max(1.0);
    while count_below(a, b, lo).is_none_or(|c| c > 0) {
        lo = -widen;
        widen *= 2.0;
        if !widen.is_finite() {
            return Err(SharpnessError::Assembly("no lower bound for the spectrum".into()));
        }
    }
    hi *= 1.0 + 1e-12;
    for _ in 0..BISECTION_STEPS {
        if hi - lo <= 1e-13 * hi.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match count_below(a, b, mid) {
            Some(0) => lo = mid,
            Some(_) => hi = mid,
            None => hi = mid,
        }
    }
    let sigma = lo - 1e-10 * lo.abs();
    let shifted = a
        .shifted(sigma, b)
        .ldlt()
        .ok_or_else(|| SharpnessError::Assembly("singular shifted form".into()))?;
    let mut v = vec![1.0; m];
    let mut rq = a.quadratic_form(&v) / b.quadratic_form(&v);
    for _ in 0..INVERSE_STEPS {
        let mut next = shifted.solve(&b.matvec(&v));
        let norm = b.quadratic_form(&next).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(SharpnessError::EigenStagnation { best: rq });
        }
        next.iter_mut().for_each(|x| *x /= norm);
        let bv = b.matvec(&next);
        let new_rq = a.quadratic_form(&next) / dot(&next, &bv);
        v = next;
        let settled = (new_rq - rq).abs() <= 1e-13 * new_rq.abs();
        rq = new_rq;
        if settled {
            let peak = v
                .iter()
                .copied()
                .fold(0.0, |m: f64, x| if x.abs() > m.abs() { x } else { m });
            v.iter_mut().for_each(|x| *x /= peak);
            return Ok((rq, v));
        }
    }
    Err(SharpnessError::EigenStagnation { best: rq })
}

/// Minimizes the discrete quotient on `grid`, and again with `delta / 10`
/// when `sensitivity` is set.
pub fn minimize_discrete(problem: &Problem, grid: DiscreteGrid, sensitivity: bool) -> Result<DiscreteReport> {
    grid.validate()?;
    let solve = |g: DiscreteGrid| -> Result<(f64, Vec<f64>, Vec<f64>)> {
        let forms = assemble_forms(problem, &g.nodes())?;
        let (lambda, v) = generalized_min_eigen(&forms.a, &forms.b)?;
        Ok((lambda, v, forms.nodes))
    };
    let (lambda_min, v, nodes) = solve(grid)?;
    let lambda_at_delta_tenth = if sensitivity {
        let finer = DiscreteGrid {
            delta: grid.delta / 10.0,
            ..grid
        };
        Some(solve(finer)?.0)
    } else {
        None
    };
    let mut eigenvector = Vec::with_capacity(nodes.len());
    eigenvector.push(0.0);
    eigenvector.extend(v);
    eigenvector.push(0.0);
    Ok(DiscreteReport {
        id: problem.id().to_string(),
        model: problem.model().kind(),
        params: *problem.params(),
        grid,
        lambda_min,
        sharp_constant: problem.built().sharp_constant,
        lambda_at_delta_tenth,
        nodes,
        eigenvector,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, Integrand};
    use approx::assert_relative_eq;

    fn hp(n: u32, kind: ModelKind) -> Problem {
        Problem::builtin("hardy-poincare", Params::new(n).with_alpha(0.0).with_p(2.0), kind).unwrap()
    }

    #[test]
    fn single_hat_eigenvalue_is_its_quotient() {
        let p = hp(3, ModelKind::Hyperbolic);
        let forms = assemble_forms(&p, &[0.5, 1.0, 1.5]).unwrap();
        let (lambda, v) = generalized_min_eigen(&forms.a, &forms.b).unwrap();
        assert_eq!(v, vec![1.0]);
        // hat with slope ±2: ∫ d² sinh² · 4 / ∫ hat² sinh²
        let num = integrate(
            &Integrand::new(|d: f64| 4.0 * d * d * d.sinh().powi(2)),
            0.5,
            1.5,
            1e-13,
        )
        .unwrap();
        let hat = |d: f64| 1.0 - 2.0 * (d - 1.0).abs();
        let den = integrate(
            &Integrand::new(|d: f64| hat(d).powi(2) * d.sinh().powi(2)).breakpoints([1.0]),
            0.5,
            1.5,
            1e-13,
        )
        .unwrap();
        assert_relative_eq!(lambda, num.value / den.value, max_relative = 1e-10);
    }

    #[test]
    fn uniform_dirichlet_laplacian_eigenvalue() {
        // −u'' = λu on a unit interval, P1 elements
        let n = 200;
        let mut a = SymBand::zeros(n - 1, 1);
        let mut b = SymBand::zeros(n - 1, 1);
        let h = 1.0 / n as f64;
        for i in 0..n - 1 {
            a.add(i, i, 2.0 / h);
            b.add(i, i, 4.0 * h / 6.0);
            if i > 0 {
                a.add(i, i - 1, -1.0 / h);
                b.add(i, i - 1, h / 6.0);
            }
        }
        let (lambda, v) = generalized_min_eigen(&a, &b).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!(lambda > pi2 && lambda < pi2 * (1.0 + 1e-4), "{lambda}");
        assert!(v.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn hardy_poincare_refinement_is_monotone() {
        let p = hp(3, ModelKind::Hyperbolic);
        let mut last = f64::INFINITY;
        for points in [250, 500, 1000] {
            let grid = DiscreteGrid {
                delta: 1e-3,
                outer: 10.0,
                points,
            };
            let r = minimize_discrete(&p, grid, false).unwrap();
            assert!(
                r.lambda_min >= 2.25 - 0.05 && r.lambda_min <= last + 1e-9,
                "{points}: {}",
                r.lambda_min
            );
            last = r.lambda_min;
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = hp(3, ModelKind::Hyperbolic);
        let small = DiscreteGrid {
            points: 10,
            ..DiscreteGrid::default()
        };
        assert!(matches!(
            minimize_discrete(&p, small, false),
            Err(SharpnessError::Grid(_))
        ));
        let hpw = Problem::builtin("hpw", Params::new(3), ModelKind::Hyperbolic).unwrap();
        assert!(matches!(
            minimize_discrete(&hpw, DiscreteGrid::default(), false),
            Err(SharpnessError::NotQuadratic { .. })
        ));
        let mut b = SymBand::zeros(2, 1);
        b.add(0, 0, 1.0);
        b.add(1, 1, -1.0);
        assert!(matches!(
            generalized_min_eigen(&b.clone(), &b),
            Err(SharpnessError::Assembly(_))
        ));
    }

    #[test]
    fn grid_nodes_nest() {
        let g = DiscreteGrid::default();
        let coarse = g.nodes();
        let fine = DiscreteGrid { points: 2000, ..g }.nodes();
        for (i, x) in coarse.iter().enumerate() {
            assert_relative_eq!(*x, fine[2 * i], max_relative = 1e-14);
        }
    }
}
