//! Built-in inequalities.

use std::sync::OnceLock;

use super::{
    expr::Expr, load_custom, serialize, CatalogError, Constraint, ExtraWeight, FunctionalTerm, InequalityShape,
    InequalitySpec, IntegrandKind, Measure, ModelConstraint, Params, Side,
};
use crate::profiles::FamilyKind;

/// A registered inequality with its equation tag and, for built-ins, a
/// parameter set known to be admissible.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub spec: InequalitySpec,
    pub tag: String,
    pub witness: Option<Params>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Registry {
    entries: Vec<Entry>,
}

impl Registry {
    /// The shared built-in registry. Startup checks run once on first use.
    pub fn builtin() -> &'static Registry {
        static REGISTRY: OnceLock<Registry> = OnceLock::new();
        REGISTRY.get_or_init(|| {
            let r = Registry::with_builtins();
            if let Err(e) = r.startup_checks() {
                panic!("{e}");
            }
            r
        })
    }

    /// A fresh registry holding the built-ins, ready for custom additions.
    pub fn with_builtins() -> Self {
        Self {
            entries: builtin_entries(),
        }
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn get(&self, id: &str) -> Result<&Entry, CatalogError> {
        self.entries
            .iter()
            .find(|e| e.spec.id == id)
            .ok_or_else(|| CatalogError::UnknownId(id.to_string()))
    }

    pub fn add(&mut self, spec: InequalitySpec) -> Result<&Entry, CatalogError> {
        if self.entries.iter().any(|e| e.spec.id == spec.id) {
            return Err(CatalogError::Duplicate(spec.id));
        }
        self.entries.push(Entry {
            spec,
            tag: "custom".to_string(),
            witness: None,
        });
        Ok(self.entries.last().expect("just pushed"))
    }

    /// Parses a custom document and registers it.
    pub fn load(&mut self, document: &str) -> Result<&Entry, CatalogError> {
        let spec = load_custom(document)?;
        self.add(spec)
    }

    /// Checks every entry: witness parameters admissible, coefficients finite
    /// and nonnegative, serialization round trip, and the equivalence of the
    /// two printed forms of the improved Hardy-Sobolev remainder exponent.
    pub fn startup_checks(&self) -> Result<(), CatalogError> {
        let fail = |msg: String| Err(CatalogError::Startup(msg));
        for entry in &self.entries {
            let spec = &entry.spec;
            if let Some(w) = &entry.witness {
                let adm = spec.admissible(w);
                if !adm.is_admissible() {
                    return fail(format!("{}: witness violates {:?}", spec.id, adm.violations));
                }
                let built = spec.build(w)?;
                for t in &built.terms {
                    if !(t.coefficient >= 0.0) {
                        return fail(format!("{}: negative coefficient {}", spec.id, t.coefficient));
                    }
                }
            }
            let reloaded = load_custom(&serialize(spec))?;
            if &reloaded != spec {
                return fail(format!("{}: serialization does not round-trip", spec.id));
            }
        }
        let remainder = &self.get("hardy-sobolev-improved")?.spec.terms[2].weight_power;
        let proof_form = Expr::parse("((n - 2)*(q - 2) + alpha*q)/2").expect("valid expression");
        if !remainder.equivalent(&proof_form) {
            return fail(format!("remainder exponent {remainder} differs from {proof_form}"));
        }
        Ok(())
    }
}

struct TermDef {
    side: Side,
    coefficient: &'static str,
    weight: &'static str,
    extra: ExtraWeight,
    integrand: &'static str,
    measure: Measure,
    outer: &'static str,
}

const fn lhs(weight: &'static str, integrand: &'static str) -> TermDef {
    TermDef {
        side: Side::Lhs,
        coefficient: "1",
        weight,
        extra: ExtraWeight::None,
        integrand,
        measure: Measure::Riemannian,
        outer: "1",
    }
}

const fn rhs(coefficient: &'static str, weight: &'static str, integrand: &'static str) -> TermDef {
    TermDef {
        side: Side::Rhs,
        coefficient,
        weight,
        extra: ExtraWeight::None,
        integrand,
        measure: Measure::Riemannian,
        outer: "1",
    }
}

impl TermDef {
    const fn extra(mut self, extra: ExtraWeight) -> Self {
        self.extra = extra;
        self
    }

    const fn lebesgue(mut self) -> Self {
        self.measure = Measure::Lebesgue;
        self
    }

    const fn outer(mut self, outer: &'static str) -> Self {
        self.outer = outer;
        self
    }

    fn build(&self) -> FunctionalTerm {
        let e = |s: &str| Expr::parse(s).unwrap_or_else(|err| panic!("built-in '{s}': {err}"));
        FunctionalTerm {
            side: self.side,
            coefficient: e(self.coefficient),
            weight_power: e(self.weight),
            extra_weight: self.extra,
            integrand: IntegrandKind::parse(self.integrand).expect("built-in integrand"),
            measure: self.measure,
            outer_power: e(self.outer),
        }
    }
}

struct EntryDef {
    id: &'static str,
    tag: &'static str,
    shape: InequalityShape,
    model: ModelConstraint,
    terms: Vec<TermDef>,
    constraints: &'static [&'static str],
    sharp: Option<&'static str>,
    family: Option<FamilyKind>,
    witness: Params,
}

impl EntryDef {
    fn build(self) -> Entry {
        let spec = InequalitySpec {
            id: self.id.to_string(),
            shape: self.shape,
            model: self.model,
            terms: self.terms.iter().map(TermDef::build).collect(),
            constraints: self
                .constraints
                .iter()
                .map(|c| Constraint::parse(c).expect("built-in constraint"))
                .collect(),
            sharp_constant: self.sharp.map(|s| Expr::parse(s).expect("built-in constant")),
            sharpness_family: self.family,
        };
        Entry {
            spec,
            tag: self.tag.to_string(),
            witness: Some(self.witness),
        }
    }
}

const HARDY_MAIN: &str = "((n + alpha - 2)/2)^2";
const RELLICH_MAIN: &str = "(n - alpha)^2/4";
const RELLICH_K: &str = "(n - alpha)*(n + 3*alpha - 8)/16";
const RELLICH_RANGE: &str = "(8 - n)/3 < alpha < 2";
const Q_RANGE: &str = "2 <= q <= 2*n/(n - 1)";

fn builtin_entries() -> Vec<Entry> {
    use ExtraWeight::{InvDistToRSq, InvLogSq};
    use FamilyKind::{Gaussian, HardyConcentration, RellichConcentration};
    use InequalityShape::{Linear, Product};
    use ModelConstraint::{Any, Hyperbolic};

    let hardy_lp = "((C + 1 + alpha - p)/p)^p";
    let rellich_phi = "(C + alpha - 3)^2*(C - alpha + 1)^2/16";
    let hardy_poincare = "((n + alpha)/p)^p";
    let sobolev_coef = "((n - 2)/2)^(2*s/(2*(n - s)/(n - 2)))*(n*(n - 2)/4*Sn^(2/n))^(n*(2 - s)/(2*(n - s)))";
    let fks_hardy = "2^(n - 2)/c^2*(Sn/2)^((q - 2)/q)";
    let fks_rellich = "(n - alpha)*(n + 3*alpha - 8)*2^(n - 2)/(4*c^2)*(Sn/2)^((q - 2)/q)";

    let defs = vec![
        EntryDef {
            id: "hardy-lp",
            tag: "(1.6)",
            shape: Linear,
            model: Any,
            terms: vec![lhs("alpha", "grad_p"), rhs(hardy_lp, "alpha - p", "abs_phi_p")],
            constraints: &["1 < p", "C + 1 + alpha - p > 0", "C <= n - 1"],
            sharp: Some(hardy_lp),
            family: Some(HardyConcentration),
            witness: Params::new(3).with_alpha(0.0).with_p(2.0),
        },
        EntryDef {
            id: "rellich-phi",
            tag: "(1.7)",
            shape: Linear,
            model: Any,
            terms: vec![lhs("alpha", "laplacian_sq"), rhs(rellich_phi, "alpha - 4", "phi_sq")],
            constraints: &["alpha < 2", "C + alpha - 3 > 0", "C <= n - 1"],
            sharp: Some(rellich_phi),
            family: Some(RellichConcentration),
            witness: Params::new(5).with_alpha(0.0),
        },
        EntryDef {
            id: "hardy-poincare",
            tag: "(2.4)",
            shape: Linear,
            model: Any,
            terms: vec![lhs("alpha + p", "grad_p"), rhs(hardy_poincare, "alpha", "abs_phi_p")],
            constraints: &["1 < p", "-n < alpha"],
            sharp: Some(hardy_poincare),
            family: Some(HardyConcentration),
            witness: Params::new(3).with_alpha(0.0).with_p(2.0),
        },
        EntryDef {
            id: "hardy-improved-log",
            tag: "(2.12)",
            shape: Linear,
            model: Any,
            terms: vec![
                lhs("alpha", "grad_sq"),
                rhs(HARDY_MAIN, "alpha - 2", "phi_sq"),
                rhs("1/4", "alpha - 2", "phi_sq").extra(InvLogSq),
            ],
            constraints: &["n + alpha - 2 > 0", "R > 0"],
            sharp: Some(HARDY_MAIN),
            family: Some(HardyConcentration),
            witness: Params::new(3).with_alpha(0.0).with_radius(2.0),
        },
        EntryDef {
            id: "hardy-improved-ball",
            tag: "(2.13)",
            shape: Linear,
            model: Any,
            terms: vec![
                lhs("alpha", "grad_sq"),
                rhs(HARDY_MAIN, "alpha - 2", "phi_sq"),
                rhs("1/4", "alpha", "phi_sq").extra(InvDistToRSq),
            ],
            constraints: &["n + alpha - 2 > 0", "R > 0"],
            sharp: Some(HARDY_MAIN),
            family: Some(HardyConcentration),
            witness: Params::new(3).with_alpha(0.0).with_radius(2.0),
        },
        EntryDef {
            id: "hardy-sobolev",
            tag: "(Cor. 2.3)",
            shape: Linear,
            model: Hyperbolic,
            terms: vec![
                lhs("0", "grad_sq"),
                rhs(sobolev_coef, "-s", "abs_phi^(2*(n - s)/(n - 2))").outer("(n - 2)/(n - s)"),
            ],
            constraints: &["n >= 3", "0 <= s <= 2"],
            sharp: None,
            family: None,
            witness: Params::new(3).with_s(1.0),
        },
        EntryDef {
            id: "hardy-sobolev-improved",
            tag: "(2.16)",
            shape: Linear,
            model: Hyperbolic,
            terms: vec![
                lhs("alpha", "grad_sq"),
                rhs(HARDY_MAIN, "alpha - 2", "phi_sq"),
                rhs(fks_hardy, "((2 - n)*(2 - q) + alpha*q)/2", "abs_phi_q")
                    .lebesgue()
                    .outer("2/q"),
            ],
            constraints: &["n > 2", "n + alpha - 2 > 0", Q_RANGE, "c > 0"],
            sharp: Some(HARDY_MAIN),
            family: Some(HardyConcentration),
            witness: Params::new(3).with_alpha(0.0).with_q(2.5).with_fks_c(1.0),
        },
        EntryDef {
            id: "rellich-grad",
            tag: "(3.9)",
            shape: Linear,
            model: Any,
            terms: vec![lhs("alpha", "laplacian_sq"), rhs(RELLICH_MAIN, "alpha - 2", "grad_sq")],
            constraints: &[RELLICH_RANGE],
            sharp: Some(RELLICH_MAIN),
            family: Some(RellichConcentration),
            witness: Params::new(5).with_alpha(1.5),
        },
        EntryDef {
            id: "rellich-grad-improved-log",
            tag: "(3.11)",
            shape: Linear,
            model: Any,
            terms: vec![
                lhs("alpha", "laplacian_sq"),
                rhs(RELLICH_MAIN, "alpha - 2", "grad_sq"),
                rhs(RELLICH_K, "alpha - 4", "phi_sq").extra(InvLogSq),
            ],
            constraints: &[RELLICH_RANGE, "R > 0"],
            sharp: Some(RELLICH_MAIN),
            family: Some(RellichConcentration),
            witness: Params::new(5).with_alpha(1.5).with_radius(2.0),
        },
        EntryDef {
            id: "rellich-grad-improved-ball",
            tag: "(3.12)",
            shape: Linear,
            model: Any,
            terms: vec![
                lhs("alpha", "laplacian_sq"),
                rhs(RELLICH_MAIN, "alpha - 2", "grad_sq"),
                rhs(RELLICH_K, "alpha - 2", "phi_sq").extra(InvDistToRSq),
            ],
            constraints: &[RELLICH_RANGE, "R > 0"],
            sharp: Some(RELLICH_MAIN),
            family: Some(RellichConcentration),
            witness: Params::new(5).with_alpha(1.5).with_radius(2.0),
        },
        EntryDef {
            id: "rellich-sobolev",
            tag: "(3.13)",
            shape: Linear,
            model: Hyperbolic,
            terms: vec![
                lhs("alpha", "laplacian_sq"),
                rhs(RELLICH_MAIN, "alpha - 2", "grad_sq"),
                rhs(fks_rellich, "((n - 2)*(q - 2) + (alpha - 2)*q)/2", "abs_phi_q")
                    .lebesgue()
                    .outer("2/q"),
            ],
            constraints: &["n > 2", RELLICH_RANGE, Q_RANGE, "c > 0"],
            sharp: Some(RELLICH_MAIN),
            family: Some(RellichConcentration),
            witness: Params::new(5).with_alpha(1.5).with_q(2.5).with_fks_c(1.0),
        },
        EntryDef {
            id: "hpw",
            tag: "(4.1)/(4.3)",
            shape: Product,
            model: Any,
            terms: vec![
                lhs("2", "phi_sq"),
                lhs("0", "grad_sq"),
                rhs("(C + 1)^2/4", "0", "phi_sq"),
            ],
            constraints: &["0 < C <= n - 1"],
            sharp: Some("(C + 1)^2/4"),
            family: Some(Gaussian),
            witness: Params::new(3),
        },
        EntryDef {
            id: "hpw-second-order",
            tag: "(4.4)/(4.5)",
            shape: Product,
            model: Any,
            terms: vec![
                lhs("4", "phi_sq"),
                lhs("0", "laplacian_sq"),
                rhs("(C + 1)^4/16", "0", "phi_sq"),
            ],
            constraints: &["1 < C <= n - 1", "(7 - C)/3 < alpha < 2"],
            sharp: Some("(C + 1)^4/16"),
            family: Some(Gaussian),
            witness: Params::new(9).with_alpha(0.0),
        },
    ];
    defs.into_iter().map(EntryDef::build).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{BuiltExtraWeight, BuiltIntegrand};
    use approx::assert_relative_eq;

    fn spec(id: &str) -> &'static InequalitySpec {
        &Registry::builtin().get(id).unwrap().spec
    }

    #[test]
    fn thirteen_entries_pass_startup_checks() {
        let r = Registry::with_builtins();
        assert_eq!(r.entries().len(), 13);
        r.startup_checks().unwrap();
    }

    #[test]
    fn sharp_constant_examples() {
        let p = Params::new(3).with_alpha(0.0).with_p(2.0);
        assert_eq!(spec("hardy-poincare").sharp_constant(&p).unwrap(), Some(2.25));
        let p = Params::new(4).with_alpha(0.0);
        // admissibility of rellich-grad needs (8 - n)/3 < alpha: n = 4 gives 4/3 > 0
        assert!(spec("rellich-grad").sharp_constant(&p).is_err());
        let rg = spec("rellich-grad").sharp_constant.as_ref().unwrap();
        assert_eq!(rg.eval(&p).unwrap(), 4.0);
        let p = Params::new(5).with_alpha(0.0);
        assert_eq!(spec("rellich-phi").sharp_constant(&p).unwrap(), Some(1.5625));
        assert_eq!(spec("hpw").sharp_constant(&Params::new(3)).unwrap(), Some(2.25));
        let p = Params::new(3).with_alpha(0.0).with_p(2.0);
        assert_eq!(spec("hardy-lp").sharp_constant(&p).unwrap(), Some(0.25));
    }

    #[test]
    fn admissibility_examples() {
        let a = spec("rellich-grad").admissible(&Params::new(5).with_alpha(0.0));
        assert_eq!(a.violations, vec!["(8 - n)/3 < alpha < 2".to_string()]);
        let a = spec("hardy-poincare").admissible(&Params::new(2).with_alpha(-2.0).with_p(2.0));
        assert_eq!(a.violations, vec!["-n < alpha".to_string()]);
        let a = spec("hardy-poincare").admissible(&Params::new(3).with_alpha(0.0).with_p(2.0));
        assert!(a.is_admissible());
        let a = spec("hardy-sobolev-improved").admissible(&Params::new(3).with_alpha(0.0).with_q(2.5));
        assert_eq!(a.violations, vec!["missing parameter c".to_string()]);
    }

    #[test]
    fn build_terms_examples() {
        let b = spec("hardy-improved-ball")
            .build(&Params::new(3).with_alpha(0.0).with_radius(2.0))
            .unwrap();
        let coefs: Vec<f64> = b.rhs().map(|t| t.coefficient).collect();
        assert_eq!(coefs, vec![0.25, 0.25]);
        assert_eq!(b.terms[2].extra_weight, BuiltExtraWeight::InvDistToRSq(2.0));

        let b = spec("hardy-sobolev").build(&Params::new(4).with_s(0.0)).unwrap();
        let t = b.main_rhs().unwrap();
        assert_eq!(t.integrand, BuiltIntegrand::AbsPhi(4.0));
        assert_relative_eq!(t.outer_power, 0.5);
        let a_n = 4.0 * 2.0 / 4.0 * crate::catalog::sphere_area(4).powf(0.5);
        assert_relative_eq!(t.coefficient, a_n, max_relative = 1e-14);

        let b = spec("hpw").build(&Params::new(3)).unwrap();
        assert_eq!(b.shape, InequalityShape::Product);
        assert_eq!(b.terms[0].weight_power, 2.0);
        assert_eq!(b.terms[1].integrand, BuiltIntegrand::Grad(2.0));
        assert_eq!(b.terms[2].coefficient, 2.25);
    }

    #[test]
    fn unquantified_remainders_are_flagged() {
        let p = Params::new(3).with_alpha(0.0).with_q(2.5).with_fks_c(1.0);
        let b = spec("hardy-sobolev-improved").build(&p).unwrap();
        assert_eq!(
            b.terms.iter().map(|t| t.unquantified).collect::<Vec<_>>(),
            [false, false, true]
        );
    }

    #[test]
    fn sharp_constants_are_continuous_in_alpha() {
        for entry in Registry::builtin().entries() {
            let Some(w) = entry.witness else { continue };
            let Some(a0) = w.alpha else { continue };
            let Ok(Some(k0)) = entry.spec.sharp_constant(&w) else {
                continue;
            };
            for h in [1e-4, -1e-4] {
                let p = Params {
                    alpha: Some(a0 + h),
                    ..w
                };
                if let Ok(Some(k)) = entry.spec.sharp_constant(&p) {
                    assert!((k - k0).abs() < 1e-2 * (1.0 + k0.abs()), "{}", entry.spec.id);
                }
            }
        }
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let mut r = Registry::with_builtins();
        let dup = r.get("hpw").unwrap().spec.clone();
        assert!(matches!(r.add(dup), Err(CatalogError::Duplicate(_))));
    }
}
