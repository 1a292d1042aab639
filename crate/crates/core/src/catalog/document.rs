//! JSON documents describing custom inequalities.
//!
//! ```json
//! {
//!   "id": "my-hardy",
//!   "shape": "linear",
//!   "model": "any",
//!   "terms": [
//!     {"side": "lhs", "coefficient": "1", "weight_power": "alpha + 2",
//!      "extra_weight": "none", "integrand": "grad_sq", "measure": "riemannian",
//!      "outer_power": "1"}
//!   ],
//!   "constraints": ["-n < alpha"],
//!   "sharp_constant": "((n + alpha)/2)^2",
//!   "sharpness_family": "hardy-conc"
//! }
//! ```
//!
//! `extra_weight`, `measure` and `outer_power` may be omitted.

use serde::{Deserialize, Serialize};

use super::{
    CatalogError, Constraint, Expr, ExtraWeight, FunctionalTerm, InequalityShape, InequalitySpec, IntegrandKind,
    Measure, ModelConstraint, Side,
};
use crate::profiles::FamilyKind;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    id: String,
    shape: String,
    model: String,
    terms: Vec<TermDocument>,
    #[serde(default)]
    constraints: Vec<String>,
    sharp_constant: Option<String>,
    sharpness_family: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDocument {
    side: String,
    coefficient: String,
    weight_power: String,
    #[serde(default = "none")]
    extra_weight: String,
    integrand: String,
    #[serde(default = "riemannian")]
    measure: String,
    #[serde(default = "one")]
    outer_power: String,
}

fn none() -> String {
    "none".into()
}

fn riemannian() -> String {
    "riemannian".into()
}

fn one() -> String {
    "1".into()
}

fn unknown(what: &'static str, name: &str) -> CatalogError {
    CatalogError::UnknownName {
        what,
        name: name.to_string(),
    }
}

fn expr(text: &str, context: String) -> Result<Expr, CatalogError> {
    Expr::parse(text).map_err(|source| CatalogError::Expr { context, source })
}

/// Parses a custom inequality document.
pub fn load_custom(document: &str) -> Result<InequalitySpec, CatalogError> {
    let doc: Document = serde_json::from_str(document).map_err(|e| CatalogError::Document {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let shape = match doc.shape.as_str() {
        "linear" => InequalityShape::Linear,
        "product" => InequalityShape::Product,
        other => return Err(unknown("shape", other)),
    };
    let model = match doc.model.as_str() {
        "hyperbolic" => ModelConstraint::Hyperbolic,
        "any" => ModelConstraint::Any,
        other => return Err(unknown("model", other)),
    };
    let mut terms = Vec::with_capacity(doc.terms.len());
    for (i, t) in doc.terms.iter().enumerate() {
        let ctx = |field: &str| format!("terms[{i}].{field}");
        let side = match t.side.as_str() {
            "lhs" => Side::Lhs,
            "rhs" => Side::Rhs,
            other => return Err(unknown("side", other)),
        };
        let measure = match t.measure.as_str() {
            "riemannian" => Measure::Riemannian,
            "lebesgue" => Measure::Lebesgue,
            other => return Err(unknown("measure", other)),
        };
        terms.push(FunctionalTerm {
            side,
            coefficient: expr(&t.coefficient, ctx("coefficient"))?,
            weight_power: expr(&t.weight_power, ctx("weight_power"))?,
            extra_weight: ExtraWeight::from_name(&t.extra_weight)
                .ok_or_else(|| unknown("extra weight", &t.extra_weight))?,
            integrand: IntegrandKind::parse(&t.integrand)?,
            measure,
            outer_power: expr(&t.outer_power, ctx("outer_power"))?,
        });
    }
    let constraints = doc
        .constraints
        .iter()
        .enumerate()
        .map(|(i, c)| {
            Constraint::parse(c).map_err(|source| CatalogError::Expr {
                context: format!("constraints[{i}]"),
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let sharp_constant = doc
        .sharp_constant
        .as_deref()
        .map(|s| expr(s, "sharp_constant".into()))
        .transpose()?;
    let sharpness_family = doc
        .sharpness_family
        .as_deref()
        .map(|s| FamilyKind::from_name(s).ok_or_else(|| unknown("family", s)))
        .transpose()?;
    let counts = (
        terms.iter().filter(|t| t.side == Side::Lhs).count(),
        terms.iter().filter(|t| t.side == Side::Rhs).count(),
    );
    let valid = match shape {
        InequalityShape::Linear => counts.0 == 1 && counts.1 >= 1,
        InequalityShape::Product => counts == (2, 1),
    };
    if !valid {
        return Err(CatalogError::Document {
            line: 0,
            column: 0,
            message: format!(
                "{} inequality needs {}, found {} lhs and {} rhs terms",
                doc.shape,
                match shape {
                    InequalityShape::Linear => "one lhs and at least one rhs term",
                    InequalityShape::Product => "two lhs and one rhs term",
                },
                counts.0,
                counts.1
            ),
        });
    }
    Ok(InequalitySpec {
        id: doc.id,
        shape,
        model,
        terms,
        constraints,
        sharp_constant,
        sharpness_family,
    })
}

/// Writes an inequality in the document format read by [`load_custom`].
pub fn serialize(spec: &InequalitySpec) -> String {
    let doc = Document {
        id: spec.id.clone(),
        shape: match spec.shape {
            InequalityShape::Linear => "linear",
            InequalityShape::Product => "product",
        }
        .into(),
        model: match spec.model {
            ModelConstraint::Hyperbolic => "hyperbolic",
            ModelConstraint::Any => "any",
        }
        .into(),
        terms: spec
            .terms
            .iter()
            .map(|t| TermDocument {
                side: match t.side {
                    Side::Lhs => "lhs",
                    Side::Rhs => "rhs",
                }
                .into(),
                coefficient: t.coefficient.to_string(),
                weight_power: t.weight_power.to_string(),
                extra_weight: t.extra_weight.name().into(),
                integrand: t.integrand.to_string(),
                measure: match t.measure {
                    Measure::Riemannian => "riemannian",
                    Measure::Lebesgue => "lebesgue",
                }
                .into(),
                outer_power: t.outer_power.to_string(),
            })
            .collect(),
        constraints: spec.constraints.iter().map(|c| c.source().to_string()).collect(),
        sharp_constant: spec.sharp_constant.as_ref().map(Expr::to_string),
        sharpness_family: spec.sharpness_family.map(|f| f.name().to_string()),
    };
    serde_json::to_string_pretty(&doc).expect("document serializes")
}
