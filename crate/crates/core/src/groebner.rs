//! Buchberger's algorithm over quotient rings, with budget guards and
//! optional cofactor tracking for membership certificates.
//!
//! Every computation works in the ambient polynomial ring: the context's
//! relations are appended to the input generators, so normal forms and
//! membership answers are correct in the quotient. The reduced monic basis
//! is unique for a given context and order, and the implementation makes
//! deterministic choices throughout (pair selection, divisor scan order,
//! final sorting), so repeated runs produce byte-identical output.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::sync::Arc;

use num_rational::Ratio;

use crate::budget::GbBudget;
use crate::error::{Error, Result};
use crate::monomial::{Monomial, OrderSpec};
use crate::param::ParamFraction;
use crate::poly::Polynomial;
use crate::ring::RingContext;

#[derive(Debug, Clone)]
pub struct DivisionOutcome {
    /// One quotient per divisor, in the divisor order given.
    pub quotients: Vec<Polynomial>,
    /// No term of the remainder is divisible by any divisor's leading term.
    pub remainder: Polynomial,
}

/// Multivariate division of `f` by an ordered list of divisors. The scan
/// always picks the first divisor whose leading term divides the current
/// working term, so the outcome is deterministic.
pub fn divide(f: &Polynomial, divisors: &[Polynomial], budget: &GbBudget) -> Result<DivisionOutcome> {
    let ctx = f.ctx.clone();
    for d in divisors {
        f.check_ctx(d)?;
        if d.is_zero() {
            return Err(Error::InvalidInput("zero divisor in polynomial division".into()));
        }
    }
    let p = ctx.p();
    let degree_cap = Ratio::from_integer(budget.max_degree as i64);
    let lts: Vec<(&Monomial, &ParamFraction)> = divisors
        .iter()
        .map(|d| {
            let (m, c) = d.leading_term().expect("nonzero divisor");
            (m, c)
        })
        .collect();
    let mut work = f.clone();
    let mut quotients = vec![Polynomial::zero(&ctx); divisors.len()];
    let mut rem_terms: Vec<(Monomial, ParamFraction)> = Vec::new();
    while let Some((lm, lc)) = work.leading_term().cloned() {
        if work.total_degree() > degree_cap {
            return Err(Error::Budget(format!(
                "division intermediate degree exceeded {}",
                budget.max_degree
            )));
        }
        let hit = lts.iter().position(|(m, _)| m.divides(&lm, p));
        match hit {
            Some(k) => {
                let factor_m = lts[k].0.div(&lm, p)?;
                let factor_c = lc.div(lts[k].1, &ctx.field, ctx.nparams())?;
                let single = Polynomial::from_terms(
                    vec![(factor_m.clone(), factor_c.clone())],
                    &ctx,
                );
                quotients[k] = quotients[k].add(&single)?;
                work = work.sub(&divisors[k].mul_term(&factor_m, &factor_c))?;
            }
            None => {
                rem_terms.push((lm.clone(), lc.clone()));
                let single = Polynomial { ctx: ctx.clone(), terms: vec![(lm, lc)] };
                work = work.sub(&single)?;
            }
        }
    }
    // terms were peeled in descending order, so they are already sorted
    Ok(DivisionOutcome {
        quotients,
        remainder: Polynomial { ctx, terms: rem_terms },
    })
}

#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    pub ctx: Arc<RingContext>,
    /// The input generators, without the context's relations.
    pub gens: Vec<Polynomial>,
    /// Reduced monic basis of (gens + relations), sorted by ascending
    /// leading monomial.
    pub basis: Vec<Polynomial>,
    /// When tracked: `basis[i] = sum_j cofactors[i][j] * inputs[j]` where
    /// `inputs = gens ++ relations`.
    pub cofactors: Option<Vec<Vec<Polynomial>>>,
    pub pairs_processed: usize,
}

/// Min-heap key for the pair queue: lowest lcm degree first, then the lcm
/// exponent vector, then the pair indices. Close to the normal selection
/// strategy for degree-compatible orders, and fully deterministic.
type PairKey = (u64, Vec<u64>, usize, usize);

fn int_exps(m: &Monomial) -> Vec<u64> {
    m.exps.iter().map(|e| e.num).collect()
}

struct GbState {
    ctx: Arc<RingContext>,
    basis: Vec<Polynomial>,
    lts: Vec<Monomial>,
    cofactors: Option<Vec<Vec<Polynomial>>>,
    heap: BinaryHeap<Reverse<PairKey>>,
    treated: HashSet<(usize, usize)>,
}

impl GbState {
    fn push_pairs_for(&mut self, new_idx: usize) {
        let p = self.ctx.p();
        for i in 0..new_idx {
            let lcm = self.lts[i].lcm(&self.lts[new_idx], p);
            let exps = int_exps(&lcm);
            let deg: u64 = exps.iter().sum();
            self.heap.push(Reverse((deg, exps, i, new_idx)));
        }
    }

    fn insert(&mut self, g: Polynomial, cof: Option<Vec<Polynomial>>) {
        let lt = g.leading_term().expect("inserted element is nonzero").0.clone();
        self.basis.push(g);
        self.lts.push(lt);
        if let (Some(all), Some(c)) = (self.cofactors.as_mut(), cof) {
            all.push(c);
        }
        self.push_pairs_for(self.basis.len() - 1);
    }

    fn is_treated(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.treated.contains(&key)
    }
}

fn scale_cof(cof: &[Polynomial], c: &ParamFraction) -> Vec<Polynomial> {
    cof.iter().map(|q| q.mul_coef(c)).collect()
}

/// Computes the reduced monic Groebner basis of (gens + context relations).
///
/// Budget overruns surface as [`Error::Budget`]: the pair budget counts
/// every S-pair examined (including ones discarded by the standard
/// criteria), and the degree budget bounds intermediate reduction degrees.
pub fn buchberger(
    gens: &[Polynomial],
    ctx: &Arc<RingContext>,
    budget: &GbBudget,
    with_cofactors: bool,
) -> Result<GroebnerBasis> {
    let mut inputs: Vec<Polynomial> = Vec::with_capacity(gens.len() + ctx.relations.len());
    for g in gens {
        if !g.ctx_is(ctx) {
            return Err(Error::ContextMismatch("generator from another context".into()));
        }
        inputs.push(g.clone());
    }
    inputs.extend(ctx.relation_polys());
    for g in &inputs {
        if !g.has_integer_exponents() {
            return Err(Error::InvalidInput(
                "basis computation requires integer exponents".into(),
            ));
        }
    }

    let field = ctx.field.clone();
    let nparams = ctx.nparams();
    let p = ctx.p();
    let one = ParamFraction::one(&field, nparams);
    let mut state = GbState {
        ctx: ctx.clone(),
        basis: Vec::new(),
        lts: Vec::new(),
        cofactors: with_cofactors.then(Vec::new),
        heap: BinaryHeap::new(),
        treated: HashSet::new(),
    };

    for (j, g) in inputs.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let lc = g.leading_term().unwrap().1.clone();
        let lc_inv = lc.inv(&field, nparams)?;
        let monic = g.mul_coef(&lc_inv);
        let cof = with_cofactors.then(|| {
            let mut unit = vec![Polynomial::zero(ctx); inputs.len()];
            unit[j] = Polynomial::constant(lc_inv.clone(), ctx);
            unit
        });
        state.insert(monic, cof);
    }

    let mut pairs_processed = 0usize;
    while let Some(Reverse((_, _, i, j))) = state.heap.pop() {
        pairs_processed += 1;
        if pairs_processed > budget.max_pairs {
            return Err(Error::Budget(format!(
                "pair budget of {} exhausted",
                budget.max_pairs
            )));
        }
        let mark = (i.min(j), i.max(j));
        if state.lts[i].coprime(&state.lts[j]) {
            state.treated.insert(mark);
            continue;
        }
        let lcm = state.lts[i].lcm(&state.lts[j], p);
        let chain = (0..state.basis.len()).any(|k| {
            k != i
                && k != j
                && state.lts[k].divides(&lcm, p)
                && state.is_treated(i, k)
                && state.is_treated(j, k)
        });
        if chain {
            state.treated.insert(mark);
            continue;
        }
        let mi = state.lts[i].div(&lcm, p)?;
        let mj = state.lts[j].div(&lcm, p)?;
        let s = state.basis[i]
            .mul_term(&mi, &one)
            .sub(&state.basis[j].mul_term(&mj, &one))?;
        state.treated.insert(mark);
        if s.is_zero() {
            continue;
        }
        let out = divide(&s, &state.basis, budget)?;
        if out.remainder.is_zero() {
            continue;
        }
        let lc = out.remainder.leading_term().unwrap().1.clone();
        let lc_inv = lc.inv(&field, nparams)?;
        let monic = out.remainder.mul_coef(&lc_inv);
        let cof = state.cofactors.as_ref().map(|all| {
            let mut c: Vec<Polynomial> =
                all[i].iter().map(|q| q.mul_term(&mi, &one)).collect();
            for (t, q) in all[j].iter().enumerate() {
                c[t] = c[t].sub(&q.mul_term(&mj, &one)).unwrap();
            }
            for (k, qk) in out.quotients.iter().enumerate() {
                if qk.is_zero() {
                    continue;
                }
                for t in 0..c.len() {
                    let delta = qk.mul(&all[k][t]).unwrap();
                    c[t] = c[t].sub(&delta).unwrap();
                }
            }
            scale_cof(&c, &lc_inv)
        });
        state.insert(monic, cof);
    }

    let (basis, cofactors) = reduce_basis(state, budget)?;
    Ok(GroebnerBasis {
        ctx: ctx.clone(),
        gens: gens.to_vec(),
        basis,
        cofactors,
        pairs_processed,
    })
}

/// Minimalizes and tail-reduces the basis, yielding the unique reduced
/// monic form sorted by ascending leading monomial.
fn reduce_basis(
    state: GbState,
    budget: &GbBudget,
) -> Result<(Vec<Polynomial>, Option<Vec<Vec<Polynomial>>>)> {
    let GbState { ctx, basis, lts, cofactors, .. } = state;
    let p = ctx.p();
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by(|a, b| ctx.compare(&lts[*a], &lts[*b]).then(a.cmp(b)));
    let mut kept: Vec<usize> = Vec::new();
    for idx in order {
        if !kept.iter().any(|k| lts[*k].divides(&lts[idx], p)) {
            kept.push(idx);
        }
    }
    let mut reduced: Vec<Polynomial> = kept.iter().map(|i| basis[*i].clone()).collect();
    let mut red_cof: Option<Vec<Vec<Polynomial>>> =
        cofactors.as_ref().map(|all| kept.iter().map(|i| all[*i].clone()).collect());
    for a in 0..reduced.len() {
        let others: Vec<Polynomial> = reduced
            .iter()
            .enumerate()
            .filter(|(b, _)| *b != a)
            .map(|(_, g)| g.clone())
            .collect();
        if others.is_empty() {
            continue;
        }
        let out = divide(&reduced[a], &others, budget)?;
        if let Some(all) = red_cof.as_mut() {
            let mut c = all[a].clone();
            let mut others_cof: Vec<&Vec<Polynomial>> = Vec::new();
            for (b, cof) in all.iter().enumerate() {
                if b != a {
                    others_cof.push(cof);
                }
            }
            for (k, qk) in out.quotients.iter().enumerate() {
                if qk.is_zero() {
                    continue;
                }
                for t in 0..c.len() {
                    let delta = qk.mul(&others_cof[k][t])?;
                    c[t] = c[t].sub(&delta)?;
                }
            }
            all[a] = c;
        }
        reduced[a] = out.remainder;
    }
    Ok((reduced, red_cof))
}

impl GroebnerBasis {
    pub fn normal_form(&self, f: &Polynomial, budget: &GbBudget) -> Result<Polynomial> {
        if self.basis.is_empty() {
            return Ok(f.clone());
        }
        Ok(divide(f, &self.basis, budget)?.remainder)
    }

    pub fn contains(&self, f: &Polynomial, budget: &GbBudget) -> Result<bool> {
        Ok(self.normal_form(f, budget)?.is_zero())
    }

    /// When `f` lies in the ideal, expresses it over the input generators:
    /// `f = sum_j out[j] * gens[j]` up to the context's relations. Requires
    /// the basis to have been computed with cofactor tracking.
    pub fn membership_certificate(
        &self,
        f: &Polynomial,
        budget: &GbBudget,
    ) -> Result<Option<Vec<Polynomial>>> {
        let cof = self.cofactors.as_ref().ok_or_else(|| {
            Error::InvalidInput("basis was computed without cofactor tracking".into())
        })?;
        let out = divide(f, &self.basis, budget)?;
        if !out.remainder.is_zero() {
            return Ok(None);
        }
        let mut combo = vec![Polynomial::zero(&self.ctx); self.gens.len()];
        for (i, qi) in out.quotients.iter().enumerate() {
            if qi.is_zero() {
                continue;
            }
            for (j, slot) in combo.iter_mut().enumerate() {
                let delta = qi.mul(&cof[i][j])?;
                *slot = slot.add(&delta)?;
            }
        }
        Ok(Some(combo))
    }
}

/// Reduced bases are unique, so ideal equality is basis equality.
pub fn ideal_equal(a: &GroebnerBasis, b: &GroebnerBasis) -> bool {
    a.ctx == b.ctx && a.basis == b.basis
}

/// Basis of the context's relation ideal alone; normal forms against it
/// are canonical representatives in the quotient ring.
pub fn quotient_basis(ctx: &Arc<RingContext>, budget: &GbBudget) -> Result<GroebnerBasis> {
    buchberger(&[], ctx, budget, false)
}

/// Intersects (gens + relations) with the subring omitting the first `k`
/// variables. Returned elements live in the original context but involve
/// only the remaining variables.
pub fn eliminate(
    gens: &[Polynomial],
    ctx: &Arc<RingContext>,
    k: usize,
    budget: &GbBudget,
) -> Result<Vec<Polynomial>> {
    let ctx_e = ctx.with_order(OrderSpec::Elim(k))?;
    let identity: Vec<usize> = (0..ctx.nvars()).collect();
    let gens_e: Vec<Polynomial> = gens
        .iter()
        .map(|g| g.transport(&ctx_e, &identity))
        .collect::<Result<_>>()?;
    let gb = buchberger(&gens_e, &ctx_e, budget, false)?;
    let mut out = Vec::new();
    for g in &gb.basis {
        let free = g
            .terms
            .iter()
            .all(|(m, _)| m.exps.iter().take(k).all(|e| e.is_zero()));
        if free {
            out.push(g.transport(ctx, &identity)?);
        }
    }
    Ok(out)
}

fn fresh_name(base: &str, ctx: &RingContext) -> String {
    let taken = |s: &str| {
        ctx.vars.iter().any(|v| v == s)
            || ctx.params.iter().any(|v| v == s)
            || ctx.field.generator.as_deref() == Some(s)
    };
    if !taken(base) {
        return base.to_string();
    }
    for i in 0.. {
        let cand = format!("{base}{i}");
        if !taken(&cand) {
            return cand;
        }
    }
    unreachable!()
}

/// Generators of the colon ideal ((gens + relations) : f) in the quotient
/// ring, obtained from the intersection with (f) via an auxiliary variable
/// and exact division by `f`.
pub fn colon_ideal(
    gens: &[Polynomial],
    f: &Polynomial,
    ctx: &Arc<RingContext>,
    budget: &GbBudget,
) -> Result<Vec<Polynomial>> {
    if f.is_zero() {
        return Err(Error::InvalidInput("colon ideal by zero".into()));
    }
    let aux = fresh_name("t", ctx);
    let (ctx_e, map) = ctx.extended(&[aux], true, OrderSpec::Elim(1))?;
    let mut all: Vec<Polynomial> = gens.to_vec();
    all.extend(ctx.relation_polys());
    let t = Polynomial::var(0, &ctx_e);
    let mut j_gens = Vec::with_capacity(all.len() + 1);
    for g in &all {
        j_gens.push(t.mul(&g.transport(&ctx_e, &map)?)?);
    }
    let f_e = f.transport(&ctx_e, &map)?;
    j_gens.push(Polynomial::one(&ctx_e).sub(&t)?.mul(&f_e)?);
    let gb = buchberger(&j_gens, &ctx_e, budget, false)?;
    let mut out = Vec::new();
    for g in &gb.basis {
        let t_free = g.terms.iter().all(|(m, _)| m.exps[0].is_zero());
        if !t_free {
            continue;
        }
        let back = g.restrict(ctx, &map)?;
        let div = divide(&back, std::slice::from_ref(f), budget)?;
        if !div.remainder.is_zero() {
            return Err(Error::Verification(
                "intersection element not divisible by colon denominator".into(),
            ));
        }
        let q = div.quotients.into_iter().next().unwrap();
        if !q.is_zero() && !out.contains(&q) {
            out.push(q);
        }
    }
    Ok(out)
}

/// Kernel of the ring map sending fresh symbols to `images` in `target`.
/// Returns the source context (fresh symbols only, grevlex, optional
/// grading weights) together with kernel generators in it.
pub fn kernel_of_ring_map(
    target: &Arc<RingContext>,
    new_vars: &[String],
    images: &[Polynomial],
    source_weights: Option<Vec<Ratio<i64>>>,
    budget: &GbBudget,
) -> Result<(Arc<RingContext>, Vec<Polynomial>)> {
    if new_vars.len() != images.len() {
        return Err(Error::InvalidInput(
            "one image per fresh symbol is required".into(),
        ));
    }
    for img in images {
        if !img.ctx_is(target) {
            return Err(Error::ContextMismatch("image from another context".into()));
        }
    }
    let source = RingContext::new(
        target.field.clone(),
        new_vars.to_vec(),
        source_weights,
        target.params.clone(),
        OrderSpec::GrevLex,
    )?;
    let nx = target.nvars();
    let (combined, map) = target.extended(new_vars, false, OrderSpec::Elim(nx))?;
    let mut graph = Vec::with_capacity(images.len() + target.relations.len());
    for (j, img) in images.iter().enumerate() {
        let y = Polynomial::var(nx + j, &combined);
        graph.push(y.sub(&img.transport(&combined, &map)?)?);
    }
    for r in ctx_relations_in(target, &combined, &map)? {
        graph.push(r);
    }
    let gb = buchberger(&graph, &combined, budget, false)?;
    let source_map: Vec<usize> = (0..new_vars.len()).map(|j| nx + j).collect();
    let mut kernel = Vec::new();
    for g in &gb.basis {
        let free = g
            .terms
            .iter()
            .all(|(m, _)| m.exps.iter().take(nx).all(|e| e.is_zero()));
        if free {
            kernel.push(g.restrict(&source, &source_map)?);
        }
    }
    Ok((source, kernel))
}

fn ctx_relations_in(
    ctx: &Arc<RingContext>,
    target: &Arc<RingContext>,
    map: &[usize],
) -> Result<Vec<Polynomial>> {
    ctx.relation_polys()
        .iter()
        .map(|r| r.transport(target, map))
        .collect()
}

#[derive(Debug, Clone)]
pub struct RegularSequenceOutcome {
    pub regular: bool,
    /// Index of the first element that fails to be a nonzerodivisor.
    pub failed_index: Option<usize>,
    /// Element `z` outside the prefix ideal with `z * seq[failed_index]`
    /// inside it.
    pub witness: Option<Polynomial>,
    /// Whether the full sequence generates a proper ideal.
    pub proper: bool,
}

/// Checks a sequence for regularity in the quotient ring: each element
/// must be a nonzerodivisor modulo its predecessors, detected by comparing
/// the colon ideal with the prefix ideal.
pub fn is_regular_sequence(
    seq: &[Polynomial],
    ctx: &Arc<RingContext>,
    budget: &GbBudget,
) -> Result<RegularSequenceOutcome> {
    for (i, f) in seq.iter().enumerate() {
        let prefix = &seq[..i];
        let gb_prefix = buchberger(prefix, ctx, budget, false)?;
        if f.is_zero() {
            return Ok(RegularSequenceOutcome {
                regular: false,
                failed_index: Some(i),
                witness: Some(Polynomial::one(ctx)),
                proper: false,
            });
        }
        let colon = colon_ideal(prefix, f, ctx, budget)?;
        for z in &colon {
            let nf = gb_prefix.normal_form(z, budget)?;
            if !nf.is_zero() {
                // confirm the witness property before reporting it
                let prod_nf = gb_prefix.normal_form(&z.mul(f)?, budget)?;
                if !prod_nf.is_zero() {
                    return Err(Error::Verification(
                        "colon generator fails its defining property".into(),
                    ));
                }
                return Ok(RegularSequenceOutcome {
                    regular: false,
                    failed_index: Some(i),
                    witness: Some(z.clone()),
                    proper: false,
                });
            }
        }
    }
    let gb_all = buchberger(seq, ctx, budget, false)?;
    let proper = !gb_all.contains(&Polynomial::one(ctx), budget)?;
    Ok(RegularSequenceOutcome {
        regular: proper,
        failed_index: None,
        witness: None,
        proper,
    })
}
