//! Inequalities as structured data: weighted integral terms, coefficient
//! formulas, admissibility constraints and sharp constants.

mod document;
pub mod expr;
mod registry;

pub use document::{load_custom, serialize};
pub use expr::{Constraint, Expr, ExprError, Symbol};
pub use registry::{Entry, Registry};

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;
use statrs::function::gamma::gamma;
use thiserror::Error;

use crate::profiles::FamilyKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown inequality '{0}'")]
    UnknownId(String),
    #[error("parameters are not admissible for {id}: {}", violations.join("; "))]
    Inadmissible { id: String, violations: Vec<String> },
    #[error("{context}: {source}")]
    Expr {
        context: String,
        #[source]
        source: ExprError,
    },
    #[error("{context} evaluates to {value}")]
    NotFinite { context: String, value: f64 },
    #[error("document error at line {line}, column {column}: {message}")]
    Document {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown {what} '{name}'")]
    UnknownName { what: &'static str, name: String },
    #[error("inequality '{0}' is already registered")]
    Duplicate(String),
    #[error("startup check failed: {0}")]
    Startup(String),
}

/// Surface area `|Sⁿ|` of the unit sphere in `ℝ^{n+1}`.
pub fn sphere_area(n: u32) -> f64 {
    let h = 0.5 * f64::from(n + 1);
    2.0 * PI.powf(h) / gamma(h)
}

/// Parameter tuple of an inequality instance. Only the fields referenced by
/// the selected inequality need to be set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    pub n: u32,
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    /// Geometric constant `C`; `n − 1` when unset.
    #[serde(rename = "C")]
    pub geom_c: Option<f64>,
    pub q: Option<f64>,
    pub s: Option<f64>,
    /// Domain radius `R` of the remainder inequalities.
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    /// The user-supplied weighted Sobolev constant `c`.
    #[serde(rename = "c")]
    pub fks_c: Option<f64>,
}

impl Params {
    pub fn new(n: u32) -> Self {
        Self {
            n,
            alpha: None,
            p: None,
            geom_c: None,
            q: None,
            s: None,
            radius: None,
            fks_c: None,
        }
    }

    pub fn with_alpha(mut self, v: f64) -> Self {
        self.alpha = Some(v);
        self
    }

    pub fn with_p(mut self, v: f64) -> Self {
        self.p = Some(v);
        self
    }

    pub fn with_c(mut self, v: f64) -> Self {
        self.geom_c = Some(v);
        self
    }

    pub fn with_q(mut self, v: f64) -> Self {
        self.q = Some(v);
        self
    }

    pub fn with_s(mut self, v: f64) -> Self {
        self.s = Some(v);
        self
    }

    pub fn with_radius(mut self, v: f64) -> Self {
        self.radius = Some(v);
        self
    }

    pub fn with_fks_c(mut self, v: f64) -> Self {
        self.fks_c = Some(v);
        self
    }

    pub fn geometric_c(&self) -> f64 {
        self.geom_c.unwrap_or(f64::from(self.n) - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lhs,
    Rhs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InequalityShape {
    /// `LHS ≥ Σ RHS`.
    Linear,
    /// `T₁·T₂ ≥ const·T₃²`.
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelConstraint {
    Hyperbolic,
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Riemannian,
    Lebesgue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtraWeight {
    None,
    /// `(log(R/d))^{−2}`
    InvLogSq,
    /// `(R − d)^{−2}`
    InvDistToRSq,
}

impl ExtraWeight {
    pub fn name(&self) -> &'static str {
        match self {
            ExtraWeight::None => "none",
            ExtraWeight::InvLogSq => "inv_log_sq",
            ExtraWeight::InvDistToRSq => "inv_dist_to_r_sq",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [ExtraWeight::None, ExtraWeight::InvLogSq, ExtraWeight::InvDistToRSq]
            .into_iter()
            .find(|w| w.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IntegrandKind {
    AbsPhiP,
    AbsPhiQ,
    GradP,
    GradSq,
    LaplacianSq,
    PhiSq,
    DSqPhiSq,
    D4PhiSq,
    /// `|φ|^e` for an expression `e`.
    AbsPhiPow(Expr),
}

impl IntegrandKind {
    const NAMED: [(&'static str, IntegrandKind); 8] = [
        ("abs_phi_p", IntegrandKind::AbsPhiP),
        ("abs_phi_q", IntegrandKind::AbsPhiQ),
        ("grad_p", IntegrandKind::GradP),
        ("grad_sq", IntegrandKind::GradSq),
        ("laplacian_sq", IntegrandKind::LaplacianSq),
        ("phi_sq", IntegrandKind::PhiSq),
        ("d_sq_phi_sq", IntegrandKind::DSqPhiSq),
        ("d4_phi_sq", IntegrandKind::D4PhiSq),
    ];

    pub fn parse(text: &str) -> Result<Self, CatalogError> {
        let text = text.trim();
        if let Some((_, kind)) = Self::NAMED.iter().find(|(name, _)| *name == text) {
            return Ok(kind.clone());
        }
        if let Some(inner) = text.strip_prefix("abs_phi^(").and_then(|rest| rest.strip_suffix(')')) {
            let e = Expr::parse(inner).map_err(|source| CatalogError::Expr {
                context: format!("integrand '{text}'"),
                source,
            })?;
            return Ok(IntegrandKind::AbsPhiPow(e));
        }
        Err(CatalogError::UnknownName {
            what: "integrand kind",
            name: text.to_string(),
        })
    }
}

impl fmt::Display for IntegrandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let IntegrandKind::AbsPhiPow(e) = self {
            return write!(f, "abs_phi^({e})");
        }
        let name = Self::NAMED
            .iter()
            .find(|(_, k)| k == self)
            .map(|(n, _)| *n)
            .unwrap_or("?");
        f.write_str(name)
    }
}

/// One weighted integral `coef · (∫ d^w · extra · I(φ) dμ)^γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalTerm {
    pub side: Side,
    pub coefficient: Expr,
    pub weight_power: Expr,
    pub extra_weight: ExtraWeight,
    pub integrand: IntegrandKind,
    pub measure: Measure,
    pub outer_power: Expr,
}

/// Structured description of one inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalitySpec {
    pub id: String,
    pub shape: InequalityShape,
    pub model: ModelConstraint,
    pub terms: Vec<FunctionalTerm>,
    pub constraints: Vec<Constraint>,
    pub sharp_constant: Option<Expr>,
    pub sharpness_family: Option<FamilyKind>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    pub violations: Vec<String>,
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        self.violations.is_empty()
    }
}

impl InequalitySpec {
    /// Every parameter symbol referenced anywhere in the entry.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut exprs: Vec<&Expr> = Vec::new();
        for t in &self.terms {
            exprs.extend([&t.coefficient, &t.weight_power, &t.outer_power]);
            if let IntegrandKind::AbsPhiPow(e) = &t.integrand {
                exprs.push(e);
            }
            match t.integrand {
                IntegrandKind::AbsPhiP | IntegrandKind::GradP => exprs.push(&P_EXPR),
                IntegrandKind::AbsPhiQ => exprs.push(&Q_EXPR),
                _ => {}
            }
        }
        exprs.extend(self.sharp_constant.iter());
        let mut out: Vec<Symbol> = Vec::new();
        for e in exprs {
            for s in e.symbols() {
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        for c in &self.constraints {
            for s in c.symbols() {
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        if self.terms.iter().any(|t| t.extra_weight != ExtraWeight::None) && !out.contains(&Symbol::R) {
            out.push(Symbol::R);
        }
        out
    }

    /// Evaluates every constraint and reports all violations, including
    /// parameters the entry needs but that are unset.
    pub fn admissible(&self, params: &Params) -> Admissibility {
        let mut violations = Vec::new();
        if params.n < 2 {
            violations.push("n >= 2".to_string());
        }
        for s in self.symbols() {
            if let Err(ExprError::MissingParam(name)) = s.value(params) {
                violations.push(format!("missing parameter {name}"));
            }
        }
        if violations.is_empty() {
            for c in &self.constraints {
                match c.holds(params) {
                    Ok(true) => {}
                    Ok(false) => violations.push(c.source().to_string()),
                    Err(e) => violations.push(format!("{}: {e}", c.source())),
                }
            }
        }
        Admissibility { violations }
    }

    fn require_admissible(&self, params: &Params) -> Result<(), CatalogError> {
        let a = self.admissible(params);
        if a.is_admissible() {
            Ok(())
        } else {
            Err(CatalogError::Inadmissible {
                id: self.id.clone(),
                violations: a.violations,
            })
        }
    }

    pub fn sharp_constant(&self, params: &Params) -> Result<Option<f64>, CatalogError> {
        self.require_admissible(params)?;
        self.sharp_constant
            .as_ref()
            .map(|e| eval_finite(e, params, "sharp constant"))
            .transpose()
    }

    /// Evaluates every symbolic expression for `params`.
    pub fn build(&self, params: &Params) -> Result<BuiltInequality, CatalogError> {
        self.require_admissible(params)?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (i, t) in self.terms.iter().enumerate() {
            let ctx = |what: &str| format!("term {} {what}", i + 1);
            let coefficient = eval_finite(&t.coefficient, params, &ctx("coefficient"))?;
            let mut weight_power = eval_finite(&t.weight_power, params, &ctx("weight power"))?;
            let outer_power = eval_finite(&t.outer_power, params, &ctx("outer power"))?;
            let integrand = match &t.integrand {
                IntegrandKind::AbsPhiP => BuiltIntegrand::AbsPhi(eval_finite(&P_EXPR, params, "p")?),
                IntegrandKind::AbsPhiQ => BuiltIntegrand::AbsPhi(eval_finite(&Q_EXPR, params, "q")?),
                IntegrandKind::GradP => BuiltIntegrand::Grad(eval_finite(&P_EXPR, params, "p")?),
                IntegrandKind::GradSq => BuiltIntegrand::Grad(2.0),
                IntegrandKind::LaplacianSq => BuiltIntegrand::Laplacian,
                IntegrandKind::PhiSq => BuiltIntegrand::AbsPhi(2.0),
                IntegrandKind::DSqPhiSq => {
                    weight_power += 2.0;
                    BuiltIntegrand::AbsPhi(2.0)
                }
                IntegrandKind::D4PhiSq => {
                    weight_power += 4.0;
                    BuiltIntegrand::AbsPhi(2.0)
                }
                IntegrandKind::AbsPhiPow(e) => BuiltIntegrand::AbsPhi(eval_finite(e, params, &ctx("integrand power"))?),
            };
            let extra_weight = match t.extra_weight {
                ExtraWeight::None => BuiltExtraWeight::None,
                ExtraWeight::InvLogSq => BuiltExtraWeight::InvLogSq(eval_finite(&R_EXPR, params, "R")?),
                ExtraWeight::InvDistToRSq => BuiltExtraWeight::InvDistToRSq(eval_finite(&R_EXPR, params, "R")?),
            };
            let omega = sphere_area(params.n - 1);
            terms.push(BuiltTerm {
                side: t.side,
                coefficient,
                weight_power,
                extra_weight,
                integrand,
                measure: t.measure,
                outer_power,
                sphere_scale: omega.powf(outer_power - 1.0),
                unquantified: t.coefficient.references(Symbol::FksC),
                label: t.integrand.to_string(),
            });
        }
        Ok(BuiltInequality {
            id: self.id.clone(),
            shape: self.shape,
            model: self.model,
            terms,
            sharp_constant: self.sharp_constant(params)?,
            sharpness_family: self.sharpness_family,
        })
    }
}

static P_EXPR: Expr = Expr::Var(Symbol::P);
static Q_EXPR: Expr = Expr::Var(Symbol::Q);
static R_EXPR: Expr = Expr::Var(Symbol::R);

fn eval_finite(e: &Expr, params: &Params, context: &str) -> Result<f64, CatalogError> {
    let value = e.eval(params).map_err(|source| CatalogError::Expr {
        context: context.to_string(),
        source,
    })?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(CatalogError::NotFinite {
            context: context.to_string(),
            value,
        })
    }
}

/// Numeric integrand `|φ|^γ`, `|φ'|^γ` or `(Δφ)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BuiltIntegrand {
    AbsPhi(f64),
    Grad(f64),
    Laplacian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BuiltExtraWeight {
    None,
    InvLogSq(f64),
    InvDistToRSq(f64),
}

impl BuiltExtraWeight {
    pub fn is_none(&self) -> bool {
        matches!(self, BuiltExtraWeight::None)
    }

    pub fn name(&self) -> &'static str {
        match self {
            BuiltExtraWeight::None => "none",
            BuiltExtraWeight::InvLogSq(_) => "inv_log_sq",
            BuiltExtraWeight::InvDistToRSq(_) => "inv_dist_to_r_sq",
        }
    }

    pub fn eval(&self, d: f64) -> f64 {
        match *self {
            BuiltExtraWeight::None => 1.0,
            BuiltExtraWeight::InvLogSq(r) => {
                let l = (r / d).ln();
                1.0 / (l * l)
            }
            BuiltExtraWeight::InvDistToRSq(r) => {
                let delta = r - d;
                1.0 / (delta * delta)
            }
        }
    }

    /// The radius at which the weight blows up, if any.
    pub fn singular_radius(&self) -> Option<f64> {
        match *self {
            BuiltExtraWeight::None => None,
            BuiltExtraWeight::InvLogSq(r) | BuiltExtraWeight::InvDistToRSq(r) => Some(r),
        }
    }
}

/// A term with all expressions evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuiltTerm {
    pub side: Side,
    pub coefficient: f64,
    /// Power of `d`, including the extra powers of the `d_sq`/`d4` kinds.
    pub weight_power: f64,
    pub extra_weight: BuiltExtraWeight,
    pub integrand: BuiltIntegrand,
    pub measure: Measure,
    pub outer_power: f64,
    /// `|S^{n−1}|^{γ−1}`: restores the sphere-area factor that does not
    /// cancel when a term is raised to an outer power `γ ≠ 1`. Multiply the
    /// radial value of the term by it before comparing sides.
    pub sphere_scale: f64,
    /// The coefficient involves the user-supplied constant `c`.
    pub unquantified: bool,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuiltInequality {
    pub id: String,
    pub shape: InequalityShape,
    pub model: ModelConstraint,
    pub terms: Vec<BuiltTerm>,
    pub sharp_constant: Option<f64>,
    #[serde(skip)]
    pub sharpness_family: Option<FamilyKind>,
}

impl BuiltInequality {
    pub fn lhs(&self) -> impl Iterator<Item = &BuiltTerm> {
        self.terms.iter().filter(|t| t.side == Side::Lhs)
    }

    pub fn rhs(&self) -> impl Iterator<Item = &BuiltTerm> {
        self.terms.iter().filter(|t| t.side == Side::Rhs)
    }

    /// The first right-hand term: the denominator of the Rayleigh quotient.
    pub fn main_rhs(&self) -> Option<&BuiltTerm> {
        self.rhs().next()
    }
}
