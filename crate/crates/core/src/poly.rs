//! Sparse polynomials over a ring context.
//!
//! Terms are kept sorted strictly descending in the context's order, with
//! no zero coefficients and no duplicate monomials, so equality is plain
//! structural equality of term lists.

use std::sync::Arc;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::exponent::PExp;
use crate::field::FieldScalar;
use crate::monomial::Monomial;
use crate::par;
use crate::param::ParamFraction;
use crate::ring::RingContext;

#[derive(Debug, Clone)]
pub struct Polynomial {
    pub ctx: Arc<RingContext>,
    pub terms: Vec<(Monomial, ParamFraction)>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.terms == other.terms
    }
}
impl Eq for Polynomial {}

impl Polynomial {
    pub fn zero(ctx: &Arc<RingContext>) -> Self {
        Polynomial { ctx: ctx.clone(), terms: Vec::new() }
    }

    pub fn one(ctx: &Arc<RingContext>) -> Self {
        Self::constant(ParamFraction::one(&ctx.field, ctx.nparams()), ctx)
    }

    pub fn constant(c: ParamFraction, ctx: &Arc<RingContext>) -> Self {
        if c.is_zero() {
            return Self::zero(ctx);
        }
        Polynomial { ctx: ctx.clone(), terms: vec![(Monomial::unit(ctx.nvars()), c)] }
    }

    pub fn from_int(n: i64, ctx: &Arc<RingContext>) -> Self {
        let c = ParamFraction::from_scalar(ctx.field.from_int(n), &ctx.field, ctx.nparams());
        Self::constant(c, ctx)
    }

    pub fn var(i: usize, ctx: &Arc<RingContext>) -> Self {
        Self::monomial(Monomial::var(i, ctx.nvars()), ctx)
    }

    pub fn var_named(name: &str, ctx: &Arc<RingContext>) -> Result<Self> {
        let i = ctx
            .var_index(name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown variable {name:?}")))?;
        Ok(Self::var(i, ctx))
    }

    pub fn monomial(m: Monomial, ctx: &Arc<RingContext>) -> Self {
        Polynomial {
            ctx: ctx.clone(),
            terms: vec![(m, ParamFraction::one(&ctx.field, ctx.nparams()))],
        }
    }

    pub fn from_terms(terms: Vec<(Monomial, ParamFraction)>, ctx: &Arc<RingContext>) -> Self {
        let mut p = Polynomial { ctx: ctx.clone(), terms };
        p.canonicalize();
        p
    }

    fn canonicalize(&mut self) {
        let ctx = self.ctx.clone();
        self.terms.sort_by(|a, b| ctx.compare(&b.0, &a.0));
        let field = &ctx.field;
        let nparams = ctx.nparams();
        let mut out: Vec<(Monomial, ParamFraction)> = Vec::with_capacity(self.terms.len());
        for (m, c) in self.terms.drain(..) {
            match out.last_mut() {
                Some((pm, pc)) if *pm == m => {
                    *pc = pc.add(&c, field, nparams);
                }
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        self.terms = out;
    }

    pub fn ctx_is(&self, ctx: &Arc<RingContext>) -> bool {
        Arc::ptr_eq(&self.ctx, ctx) || *self.ctx == **ctx
    }

    pub fn check_ctx(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch(format!(
                "operands over different rings ({:?} vs {:?})",
                self.ctx.vars, other.ctx.vars
            )))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_unit() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.iter().all(|(m, _)| m.is_unit())
    }

    pub fn leading_term(&self) -> Option<&(Monomial, ParamFraction)> {
        self.terms.first()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self::from_terms(terms, &self.ctx))
    }

    pub fn neg(&self) -> Self {
        let field = &self.ctx.field;
        Polynomial {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg(field)))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Multiplies by a single term.
    pub fn mul_term(&self, m: &Monomial, c: &ParamFraction) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        let field = &self.ctx.field;
        let nparams = self.ctx.nparams();
        let p = self.ctx.p();
        Polynomial {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(tm, tc)| (tm.mul(m, p), tc.mul(c, field, nparams)))
                .collect(),
        }
    }

    pub fn mul_coef(&self, c: &ParamFraction) -> Self {
        self.mul_term(&Monomial::unit(self.ctx.nvars()), c)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.ctx));
        }
        let ctx = self.ctx.clone();
        let p = ctx.p();
        let field = ctx.field.clone();
        let nparams = ctx.nparams();
        let (small, large) = if self.terms.len() <= other.terms.len() {
            (&self.terms, &other.terms)
        } else {
            (&other.terms, &self.terms)
        };
        // one sorted product stream per term of the smaller factor, merged
        // canonically afterwards; safe to compute in parallel
        let chunks: Vec<Vec<(Monomial, ParamFraction)>> = par::map_vec(small, |(m, c)| {
            large
                .iter()
                .map(|(tm, tc)| (tm.mul(m, p), tc.mul(c, &field, nparams)))
                .collect()
        });
        let mut terms = Vec::with_capacity(small.len() * large.len());
        for ch in chunks {
            terms.extend(ch);
        }
        Ok(Self::from_terms(terms, &ctx))
    }

    pub fn pow(&self, mut e: u64) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            if e > 1 {
                base = base.mul(&base)?;
            }
            e >>= 1;
        }
        Ok(acc)
    }

    /// The e-th Frobenius power f^(p^e), computed termwise; exact because
    /// the p-th power map is additive in characteristic p.
    pub fn frobenius_power(&self, e: u32) -> Self {
        if e == 0 {
            return self.clone();
        }
        let field = &self.ctx.field;
        let p = self.ctx.p();
        Polynomial {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.frobenius(p, e), c.frobenius_power(e, field)))
                .collect(),
        }
    }

    /// Termwise p-th root staying inside integer/valid exponents: every
    /// variable exponent must be divisible by p (so no new denominators
    /// appear) and every coefficient must have a p-th root.
    pub fn p_th_root_integral(&self) -> Option<Self> {
        let p = self.ctx.p();
        let field = &self.ctx.field;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut exps = smallvec::SmallVec::with_capacity(m.exps.len());
            for e in &m.exps {
                if !e.is_integer() || e.num % p != 0 {
                    return None;
                }
                exps.push(PExp::int(e.num / p));
            }
            let rc = c.p_th_root(field)?;
            terms.push((Monomial { exps }, rc));
        }
        Some(Polynomial { ctx: self.ctx.clone(), terms })
    }

    pub fn has_integer_exponents(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.has_integer_exponents())
    }

    /// Weighted degree of the leading term (the context's grading, or
    /// total degree when no weights are declared).
    pub fn degree_of(&self) -> Option<Ratio<i64>> {
        self.terms
            .first()
            .map(|(m, _)| m.weighted_degree(self.ctx.p(), self.ctx.weight_slice()))
    }

    /// Maximum weighted degree over all terms.
    pub fn max_degree(&self) -> Option<Ratio<i64>> {
        self.terms
            .iter()
            .map(|(m, _)| m.weighted_degree(self.ctx.p(), self.ctx.weight_slice()))
            .max()
    }

    /// Maximum plain total degree (used by budgets).
    pub fn total_degree(&self) -> Ratio<i64> {
        self.terms
            .iter()
            .map(|(m, _)| m.total_degree(self.ctx.p()))
            .max()
            .unwrap_or_else(|| Ratio::from_integer(0))
    }

    /// The common weighted degree of all terms, when homogeneous.
    pub fn homogeneous_degree(&self) -> Option<Ratio<i64>> {
        let mut it = self
            .terms
            .iter()
            .map(|(m, _)| m.weighted_degree(self.ctx.p(), self.ctx.weight_slice()));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Transports term data into `target`, mapping variable `i` of `self`
    /// onto variable `var_map[i]` of the target. Coefficients transfer
    /// verbatim (parameter lists must match).
    pub fn transport(&self, target: &Arc<RingContext>, var_map: &[usize]) -> Result<Self> {
        if self.ctx.params != target.params || self.ctx.field != target.field {
            return Err(Error::ContextMismatch(
                "transport requires identical field and parameters".into(),
            ));
        }
        let n = target.nvars();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut exps = smallvec::SmallVec::from_elem(PExp::ZERO, n);
            for (i, e) in m.exps.iter().enumerate() {
                if !e.is_zero() {
                    exps[var_map[i]] = *e;
                }
            }
            terms.push((Monomial { exps }, c.clone()));
        }
        Ok(Self::from_terms(terms, target))
    }

    /// Inverse of [`transport`]: keeps only the mapped variables; errors
    /// if the polynomial touches any unmapped variable.
    pub fn restrict(&self, target: &Arc<RingContext>, var_map: &[usize]) -> Result<Self> {
        // var_map[j] = index in self.ctx of target variable j
        if self.ctx.params != target.params || self.ctx.field != target.field {
            return Err(Error::ContextMismatch(
                "restrict requires identical field and parameters".into(),
            ));
        }
        let mut back = vec![None; self.ctx.nvars()];
        for (j, src) in var_map.iter().enumerate() {
            back[*src] = Some(j);
        }
        let n = target.nvars();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut exps = smallvec::SmallVec::from_elem(PExp::ZERO, n);
            for (i, e) in m.exps.iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                match back[i] {
                    Some(j) => exps[j] = *e,
                    None => {
                        return Err(Error::InvalidInput(format!(
                            "element involves eliminated variable {}",
                            self.ctx.vars[i]
                        )))
                    }
                }
            }
            terms.push((Monomial { exps }, c.clone()));
        }
        Ok(Self::from_terms(terms, target))
    }

    pub fn print(&self) -> String {
        crate::parse::print_poly(self)
    }
}

/// Convenience scalar constructor used in tests and fixtures.
pub fn scalar(c: FieldScalar, ctx: &Arc<RingContext>) -> ParamFraction {
    ParamFraction::from_scalar(c, &ctx.field, ctx.nparams())
}
