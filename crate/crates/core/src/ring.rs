//! Ring contexts: the ambient data every polynomial refers to.

use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::exponent::ratio_has_p_power_denominator;
use crate::field::FieldSpec;
use crate::monomial::{Monomial, OrderSpec};
use crate::param::ParamFraction;
use crate::poly::Polynomial;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Raw term data of a relation; context-free so contexts can own their
/// defining relations without a reference cycle.
pub type TermData = Vec<(Monomial, ParamFraction)>;

/// A polynomial ring (or quotient) presentation: coefficient field,
/// variables with optional grading weights, transcendental parameters,
/// defining relations, and the active term order.
///
/// Contexts compare structurally; the id only speeds up the common case.
#[derive(Debug)]
pub struct RingContext {
    pub field: Arc<FieldSpec>,
    pub vars: Vec<String>,
    pub weights: Option<Vec<Ratio<i64>>>,
    pub params: Vec<String>,
    pub relations: Vec<TermData>,
    pub order: OrderSpec,
    pub(crate) id: u64,
}

impl PartialEq for RingContext {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            || (self.field == other.field
                && self.vars == other.vars
                && self.weights == other.weights
                && self.params == other.params
                && self.relations == other.relations
                && self.order == other.order)
    }
}
impl Eq for RingContext {}

impl RingContext {
    pub fn new(
        field: Arc<FieldSpec>,
        vars: Vec<String>,
        weights: Option<Vec<Ratio<i64>>>,
        params: Vec<String>,
        order: OrderSpec,
    ) -> Result<Arc<Self>> {
        let mut seen = std::collections::HashSet::new();
        for name in vars.iter().chain(params.iter()) {
            if !is_ident(name) {
                return Err(Error::InvalidInput(format!("bad symbol name {name:?}")));
            }
            if !seen.insert(name.clone()) {
                return Err(Error::InvalidInput(format!("duplicate symbol {name:?}")));
            }
            if Some(name.as_str()) == field.generator.as_deref() {
                return Err(Error::InvalidInput(format!(
                    "symbol {name:?} collides with the field generator"
                )));
            }
        }
        if let Some(w) = &weights {
            if w.len() != vars.len() {
                return Err(Error::InvalidInput("weights/variables length mismatch".into()));
            }
            for wi in w {
                if *wi <= Ratio::from_integer(0) {
                    return Err(Error::InvalidInput("weights must be positive".into()));
                }
                if !ratio_has_p_power_denominator(wi, field.p) {
                    return Err(Error::InvalidInput(
                        "weight denominators must be powers of the characteristic".into(),
                    ));
                }
            }
        }
        if let OrderSpec::Elim(k) = order {
            if k == 0 || k >= vars.len() {
                return Err(Error::InvalidInput("elimination block out of range".into()));
            }
        }
        Ok(Arc::new(RingContext {
            field,
            vars,
            weights,
            params,
            relations: Vec::new(),
            order,
            id: NEXT_ID.fetch_add(1, AtomicOrdering::Relaxed),
        }))
    }

    /// Quotient presentation: same ambient data plus defining relations.
    /// Relations must have integer exponents and, in a graded context,
    /// must be homogeneous.
    pub fn with_relations(self: &Arc<Self>, relations: Vec<Polynomial>) -> Result<Arc<Self>> {
        let mut data = Vec::with_capacity(relations.len());
        for r in &relations {
            if !r.ctx_is(self) {
                return Err(Error::ContextMismatch("relation from another context".into()));
            }
            if r.is_zero() {
                continue;
            }
            if !r.has_integer_exponents() {
                return Err(Error::InvalidInput(
                    "defining relations must have integer exponents".into(),
                ));
            }
            if self.weights.is_some() && r.homogeneous_degree().is_none() {
                return Err(Error::InvalidInput(format!(
                    "relation {} is not homogeneous for the declared weights",
                    r.print()
                )));
            }
            data.push(r.terms.clone());
        }
        Ok(Arc::new(RingContext {
            field: self.field.clone(),
            vars: self.vars.clone(),
            weights: self.weights.clone(),
            params: self.params.clone(),
            relations: data,
            order: self.order,
            id: NEXT_ID.fetch_add(1, AtomicOrdering::Relaxed),
        }))
    }

    pub fn p(&self) -> u64 {
        self.field.p
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn nparams(&self) -> usize {
        self.params.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|v| v == name)
    }

    pub fn is_graded(&self) -> bool {
        self.weights.is_some()
    }

    pub fn weight_slice(&self) -> Option<&[Ratio<i64>]> {
        self.weights.as_deref()
    }

    pub fn relation_polys(self: &Arc<Self>) -> Vec<Polynomial> {
        self.relations
            .iter()
            .map(|t| Polynomial { ctx: self.clone(), terms: t.clone() })
            .collect()
    }

    pub fn compare(&self, a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
        self.order.compare(a, b, self.field.p)
    }

    /// Same ambient ring, different order. Relations carry over.
    pub fn with_order(self: &Arc<Self>, order: OrderSpec) -> Result<Arc<Self>> {
        if let OrderSpec::Elim(k) = order {
            if k == 0 || k >= self.vars.len() {
                return Err(Error::InvalidInput("elimination block out of range".into()));
            }
        }
        Ok(Arc::new(RingContext {
            field: self.field.clone(),
            vars: self.vars.clone(),
            weights: self.weights.clone(),
            params: self.params.clone(),
            relations: self.relations.clone(),
            order,
            id: NEXT_ID.fetch_add(1, AtomicOrdering::Relaxed),
        }))
    }

    /// A relation-free context with extra variables spliced in front
    /// (`front = true`) or appended. Used for elimination constructions;
    /// the caller transports generators and relations explicitly.
    pub fn extended(
        self: &Arc<Self>,
        new_vars: &[String],
        front: bool,
        order: OrderSpec,
    ) -> Result<(Arc<Self>, Vec<usize>)> {
        let mut vars = Vec::with_capacity(self.vars.len() + new_vars.len());
        let map: Vec<usize>; // old index -> new index
        if front {
            vars.extend(new_vars.iter().cloned());
            vars.extend(self.vars.iter().cloned());
            map = (0..self.vars.len()).map(|i| i + new_vars.len()).collect();
        } else {
            vars.extend(self.vars.iter().cloned());
            vars.extend(new_vars.iter().cloned());
            map = (0..self.vars.len()).collect();
        }
        let ctx = RingContext::new(self.field.clone(), vars, None, self.params.clone(), order)?;
        Ok((ctx, map))
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    #[test]
    fn duplicate_symbols_are_rejected() {
        let f = FieldSpec::prime(2).unwrap();
        let r = RingContext::new(
            f,
            vec!["x".into(), "x".into()],
            None,
            vec![],
            OrderSpec::GrevLex,
        );
        assert!(r.is_err());
    }

    #[test]
    fn structural_equality_ignores_ids() {
        let f = FieldSpec::prime(3).unwrap();
        let a = RingContext::new(f.clone(), vec!["x".into()], None, vec![], OrderSpec::GrevLex)
            .unwrap();
        let b = RingContext::new(f, vec!["x".into()], None, vec![], OrderSpec::GrevLex).unwrap();
        assert_ne!(a.id, b.id);
        assert_eq!(*a, *b);
    }

    #[test]
    fn inhomogeneous_relations_rejected_under_weights() {
        let f = FieldSpec::prime(2).unwrap();
        let ctx = RingContext::new(
            f,
            vec!["x".into(), "y".into()],
            Some(vec![Ratio::from_integer(1), Ratio::from_integer(1)]),
            vec![],
            OrderSpec::GrevLex,
        )
        .unwrap();
        let bad = parse_poly("x^2 + y", &ctx).unwrap();
        assert!(ctx.with_relations(vec![bad]).is_err());
        let good = parse_poly("x^2 + x*y", &ctx).unwrap();
        assert!(ctx.with_relations(vec![good]).is_ok());
    }
}
