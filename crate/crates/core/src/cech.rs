//! Cech complexes on an explicit element sequence, with truncation-exact
//! arithmetic.
//!
//! The complex attached to elements `x_0..x_n` of a quotient ring has one
//! component per subset of the indices: a degree-`d` cochain stores, for
//! every `d`-element subset `S`, a numerator polynomial understood over the
//! implicit denominator `(prod_{j in S} x_j)^N`. The truncation exponent
//! `N` is carried on the cochain; raising it multiplies numerators by the
//! missing powers, and all maps commute with that refinement, so the
//! truncated complexes present the usual direct limit without ever storing
//! fractions.
//!
//! On top of the differential the module provides the Frobenius action
//! (p-th power on numerators, p-fold truncation), a bounded linear solver
//! deciding whether a cocycle bounds at its truncation level, the
//! contracting homotopy of a complex whose leading element is 1, classes
//! attached to three-term relations, and a procedure that makes a
//! Frobenius-nilpotent class a coboundary after adjoining a solvable tower
//! of Artin-Schreier and p-th roots to the coefficient ring.

use std::collections::HashMap;
use std::sync::Arc;

use num_rational::Ratio;
use smallvec::SmallVec;

use crate::budget::{GbBudget, SolveBudget};
use crate::error::{Error, Result};
use crate::exponent::PExp;
use crate::extension::{GaloisStepKind, GaloisTowerReport};
use crate::groebner::{quotient_basis, GroebnerBasis};
use crate::linalg;
use crate::monomial::Monomial;
use crate::par;
use crate::poly::Polynomial;
use crate::ring::RingContext;

/// Hard cap on the element sequence length (subsets are bitmasks).
const MAX_ELEMS: usize = 16;
/// Cap on unknowns in one coboundary solve.
const MAX_COLUMNS: usize = 4_000;
/// Cap on equations in one coboundary solve.
const MAX_ROWS: usize = 20_000;

/// Answer of the bounded coboundary search. `NotFound` is conclusive only
/// when the search space provably contains every possible preimage: the
/// cochain has degree one (so candidate numerators are plain ring
/// elements, immune to truncation refinement), the data is homogeneous (so
/// the graded piece searched is the only one that matters), and the caller
/// has marked the ring as having no zerodivisors (so refinement maps are
/// injective).
#[derive(Debug, Clone)]
pub enum CoboundaryOutcome {
    Found(Cochain),
    NotFound { conclusive: bool },
}

/// A degree-`degree` element of the truncated complex: one numerator per
/// `degree`-element subset of the sequence indices, listed in ascending
/// bitmask order, over the implicit denominator `(prod_{j in S} x_j)^trunc`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    pub degree: usize,
    pub trunc: u64,
    pub comps: Vec<Polynomial>,
}

/// The complex of a fixed element sequence over a fixed quotient ring. A
/// Groebner basis of the ring's relations is computed once at construction
/// and reused by every reduction.
#[derive(Debug, Clone)]
pub struct CechComplex {
    pub ctx: Arc<RingContext>,
    pub elems: Vec<Polynomial>,
    /// Truncation used when the complex builds cochains on its own behalf.
    pub default_truncation: u64,
    /// Caller-supplied promise that the coefficient ring has no
    /// zerodivisors; enables conclusive degree-one refutations.
    pub integral_hint: bool,
    gb: Arc<GroebnerBasis>,
    nf_budget: GbBudget,
}

impl CechComplex {
    pub fn new(
        ctx: &Arc<RingContext>,
        elems: Vec<Polynomial>,
        default_truncation: u64,
        budget: &GbBudget,
    ) -> Result<Arc<Self>> {
        if elems.is_empty() || elems.len() > MAX_ELEMS {
            return Err(Error::InvalidInput(format!(
                "element sequence length must be between 1 and {MAX_ELEMS}"
            )));
        }
        let gb = quotient_basis(ctx, budget)?;
        for e in &elems {
            if !e.ctx_is(ctx) {
                return Err(Error::ContextMismatch(
                    "sequence element from another context".into(),
                ));
            }
            if gb.normal_form(e, budget)?.is_zero() {
                return Err(Error::InvalidInput(
                    "sequence elements must be nonzero in the quotient".into(),
                ));
            }
        }
        Ok(Arc::new(CechComplex {
            ctx: ctx.clone(),
            elems,
            default_truncation,
            integral_hint: false,
            gb: Arc::new(gb),
            nf_budget: *budget,
        }))
    }

    /// A copy of the complex carrying the caller's assertion that the
    /// coefficient ring is a domain.
    pub fn marked_integral(self: &Arc<Self>) -> Arc<Self> {
        let mut c = (**self).clone();
        c.integral_hint = true;
        Arc::new(c)
    }

    pub fn nelems(&self) -> usize {
        self.elems.len()
    }

    pub fn gb(&self) -> &GroebnerBasis {
        &self.gb
    }

    /// Normal form against the ring's relations.
    pub fn nf(&self, f: &Polynomial) -> Result<Polynomial> {
        self.gb.normal_form(f, &self.nf_budget)
    }

    /// All `d`-element index subsets as bitmasks, ascending. This is the
    /// component order used by every cochain of the complex.
    pub fn subsets(&self, d: usize) -> Vec<u32> {
        let n = self.elems.len();
        let mut out = Vec::new();
        for mask in 0u32..(1u32 << n) {
            if mask.count_ones() as usize == d {
                out.push(mask);
            }
        }
        out
    }

    fn check_cochain(&self, c: &Cochain) -> Result<()> {
        if c.degree > self.elems.len() {
            return Err(Error::InvalidInput(
                "cochain degree exceeds the sequence length".into(),
            ));
        }
        let expected = self.subsets(c.degree).len();
        if c.comps.len() != expected {
            return Err(Error::InvalidInput(format!(
                "cochain needs {expected} components, found {}",
                c.comps.len()
            )));
        }
        for p in &c.comps {
            if !p.ctx_is(&self.ctx) {
                return Err(Error::ContextMismatch(
                    "cochain component from another context".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn zero_cochain(&self, degree: usize, trunc: u64) -> Cochain {
        let comps = vec![Polynomial::zero(&self.ctx); self.subsets(degree).len()];
        Cochain { degree, trunc, comps }
    }

    pub fn from_components(
        &self,
        degree: usize,
        trunc: u64,
        comps: Vec<Polynomial>,
    ) -> Result<Cochain> {
        let c = Cochain { degree, trunc, comps };
        self.check_cochain(&c)?;
        Ok(c)
    }

    /// Re-expresses the cochain at a deeper truncation level: the numerator
    /// over `x_S^to` representing the same fraction as the one over
    /// `x_S^trunc` is the old numerator times `x_S^(to - trunc)`.
    pub fn raise_truncation(&self, c: &Cochain, to: u64) -> Result<Cochain> {
        self.check_cochain(c)?;
        if to < c.trunc {
            return Err(Error::InvalidInput(
                "truncation can only be refined upward".into(),
            ));
        }
        if to == c.trunc {
            return Ok(c.clone());
        }
        let delta = to - c.trunc;
        let subs = self.subsets(c.degree);
        let mut comps = Vec::with_capacity(c.comps.len());
        for (s, comp) in subs.iter().zip(&c.comps) {
            let mut acc = comp.clone();
            let mut mask = *s;
            while mask != 0 {
                let k = mask.trailing_zeros() as usize;
                mask &= mask - 1;
                acc = acc.mul(&self.elems[k].pow(delta)?)?;
            }
            comps.push(acc);
        }
        Ok(Cochain { degree: c.degree, trunc: to, comps })
    }

    /// The Cech differential. At a target subset `T` the component is the
    /// signed sum over `k in T` of `c_{T \ k} * x_k^trunc`, the sign being
    /// the parity of `k`'s position within `T`.
    pub fn differential(&self, c: &Cochain) -> Result<Cochain> {
        self.check_cochain(c)?;
        let n = self.elems.len();
        if c.degree >= n {
            return Err(Error::InvalidInput(
                "the differential vanishes above the top degree".into(),
            ));
        }
        let mut pows = Vec::with_capacity(n);
        for e in &self.elems {
            pows.push(e.pow(c.trunc)?);
        }
        let sub_in = self.subsets(c.degree);
        let sub_out = self.subsets(c.degree + 1);
        let comps = par::try_map_vec(&sub_out, |t| {
            let mut acc = Polynomial::zero(&self.ctx);
            let mut mask = *t;
            while mask != 0 {
                let k = mask.trailing_zeros() as usize;
                mask &= mask - 1;
                let s = t & !(1u32 << k);
                let si = sub_in
                    .binary_search(&s)
                    .map_err(|_| Error::InvalidInput("subset enumeration broken".into()))?;
                let term = c.comps[si].mul(&pows[k])?;
                acc = if position_sign_negative(k, *t) {
                    acc.sub(&term)?
                } else {
                    acc.add(&term)?
                };
            }
            Ok(acc)
        })?;
        Ok(Cochain { degree: c.degree + 1, trunc: c.trunc, comps })
    }

    /// The Frobenius action: p-th powers on numerators, p-fold truncation.
    /// Exact because `(a/x_S^N)^p = a^p / x_S^(pN)`.
    pub fn frobenius_on_cochain(&self, c: &Cochain) -> Result<Cochain> {
        self.check_cochain(c)?;
        let p = self.ctx.p();
        let trunc = c.trunc.checked_mul(p).ok_or_else(|| {
            Error::Truncation("Frobenius image exceeds the representable truncation".into())
        })?;
        let comps = c.comps.iter().map(|f| f.frobenius_power(1)).collect();
        Ok(Cochain { degree: c.degree, trunc, comps })
    }

    /// Componentwise vanishing modulo the ring's relations.
    pub fn is_zero_cochain(&self, c: &Cochain) -> Result<bool> {
        self.check_cochain(c)?;
        for comp in &c.comps {
            if !self.nf(comp)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Sum after aligning truncations.
    pub fn add(&self, a: &Cochain, b: &Cochain) -> Result<Cochain> {
        self.combine(a, b, false)
    }

    /// Difference after aligning truncations.
    pub fn sub(&self, a: &Cochain, b: &Cochain) -> Result<Cochain> {
        self.combine(a, b, true)
    }

    fn combine(&self, a: &Cochain, b: &Cochain, negate: bool) -> Result<Cochain> {
        if a.degree != b.degree {
            return Err(Error::InvalidInput(
                "cochains of different degrees cannot be combined".into(),
            ));
        }
        let t = a.trunc.max(b.trunc);
        let a2 = self.raise_truncation(a, t)?;
        let b2 = self.raise_truncation(b, t)?;
        let comps = a2
            .comps
            .iter()
            .zip(&b2.comps)
            .map(|(x, y)| if negate { x.sub(y) } else { x.add(y) })
            .collect::<Result<Vec<_>>>()?;
        Ok(Cochain { degree: a.degree, trunc: t, comps })
    }

    /// Equality as truncated fractions: the difference reduces to zero.
    pub fn eq_cochain(&self, a: &Cochain, b: &Cochain) -> Result<bool> {
        let d = self.sub(a, b)?;
        self.is_zero_cochain(&d)
    }

    /// Contracting homotopy of a complex whose leading element is 1: the
    /// component of `h(c)` at `S` (with `0` outside `S`) is the component
    /// of `c` at `S + {0}`, and components at subsets containing `0` are
    /// zero. Satisfies `dh + hd = id` in positive degrees, and `h(d(r)) = r`
    /// for ring elements `r`.
    pub fn contracting_homotopy_with_unit(&self, c: &Cochain) -> Result<Cochain> {
        self.check_cochain(c)?;
        if !self.elems[0].is_one() {
            return Err(Error::InvalidInput(
                "the contracting homotopy needs the leading sequence element to be 1".into(),
            ));
        }
        if c.degree == 0 {
            return Err(Error::InvalidInput(
                "no homotopy target below degree zero".into(),
            ));
        }
        let sub_in = self.subsets(c.degree);
        let sub_out = self.subsets(c.degree - 1);
        let mut comps = Vec::with_capacity(sub_out.len());
        for s in &sub_out {
            if s & 1 == 1 {
                comps.push(Polynomial::zero(&self.ctx));
            } else {
                let si = sub_in
                    .binary_search(&(s | 1))
                    .map_err(|_| Error::InvalidInput("subset enumeration broken".into()))?;
                comps.push(c.comps[si].clone());
            }
        }
        Ok(Cochain { degree: c.degree - 1, trunc: c.trunc, comps })
    }

    /// Verifies the cocycle condition (trivial in top degree) and wraps the
    /// cochain as a cohomology class.
    pub fn cohomology_class(&self, c: Cochain) -> Result<CohomologyClass> {
        self.check_cochain(&c)?;
        if c.degree < self.elems.len() {
            let dc = self.differential(&c)?;
            if !self.is_zero_cochain(&dc)? {
                return Err(Error::InvalidInput(
                    "the cochain is not a cocycle".into(),
                ));
            }
        }
        Ok(CohomologyClass { cochain: c })
    }

    /// Decides whether the cocycle bounds at its truncation level, by a
    /// linear solve over candidate numerators. See [`CoboundaryOutcome`]
    /// for when a negative answer is conclusive.
    pub fn is_coboundary(
        &self,
        c: &Cochain,
        solve: &SolveBudget,
        gb: &GbBudget,
    ) -> Result<CoboundaryOutcome> {
        self.check_cochain(c)?;
        let n = self.elems.len();
        let d = c.degree;
        if d == 0 {
            return Err(Error::InvalidInput(
                "degree-zero cochains bound nothing; compare with zero instead".into(),
            ));
        }
        if d < n {
            let dc = self.differential(c)?;
            if !self.is_zero_cochain(&dc)? {
                return Err(Error::InvalidInput("the cochain is not a cocycle".into()));
            }
        }
        let nf_c = par::try_map_vec(&c.comps, |f| self.gb.normal_form(f, gb))?;
        if nf_c.iter().all(|f| f.is_zero()) {
            return Ok(CoboundaryOutcome::Found(self.zero_cochain(d - 1, c.trunc)));
        }

        let sub_out = self.subsets(d);
        let sub_in = self.subsets(d - 1);
        let p = self.ctx.p();
        let trunc_ratio = Ratio::from_integer(c.trunc as i64);

        // Grading analysis. In the homogeneous graded case the preimage can
        // be searched in a single exact degree per source subset.
        let positive_weights = match self.ctx.weight_slice() {
            Some(ws) => ws.iter().all(|w| *w > Ratio::from_integer(0)),
            None => true,
        };
        let elem_degs: Vec<Option<Ratio<i64>>> =
            self.elems.iter().map(|e| e.homogeneous_degree()).collect();
        let mut exact = positive_weights && elem_degs.iter().all(|d| d.is_some());
        let mut class_deg: Option<Ratio<i64>> = None;
        if exact {
            for (ti, f) in nf_c.iter().enumerate() {
                if f.is_zero() {
                    continue;
                }
                match f.homogeneous_degree() {
                    Some(df) => {
                        let den = trunc_ratio * mask_degree(sub_out[ti], &elem_degs);
                        let delta = df - den;
                        if class_deg.is_some_and(|d| d != delta) {
                            exact = false;
                            break;
                        }
                        class_deg = Some(delta);
                    }
                    None => {
                        exact = false;
                        break;
                    }
                }
            }
        }

        // Candidate numerators per source subset: standard monomials (not
        // divisible by any relation leading monomial) up to the exact graded
        // degree, or a degree cap on ungraded data.
        let leads: Vec<Monomial> = self
            .gb
            .basis
            .iter()
            .filter_map(|g| g.leading_term().map(|(m, _)| m.clone()))
            .collect();
        let one_weights = vec![Ratio::from_integer(1); self.ctx.nvars()];
        let enum_weights: Vec<Ratio<i64>> = if exact {
            match self.ctx.weight_slice() {
                Some(ws) => ws.to_vec(),
                None => one_weights.clone(),
            }
        } else {
            one_weights.clone()
        };
        let cap_degree = {
            let max_c = nf_c
                .iter()
                .filter(|f| !f.is_zero())
                .map(|f| f.total_degree())
                .max()
                .unwrap_or_else(|| Ratio::from_integer(0));
            let min_elem = self
                .elems
                .iter()
                .map(|e| e.total_degree())
                .min()
                .unwrap_or_else(|| Ratio::from_integer(0));
            let natural = max_c - trunc_ratio * min_elem;
            natural.min(Ratio::from_integer(solve.max_degree as i64))
        };

        let mut cols: Vec<(usize, Monomial)> = Vec::new();
        for (si, s) in sub_in.iter().enumerate() {
            let target = if exact {
                let den = trunc_ratio * mask_degree(*s, &elem_degs);
                DegTarget::Exact(class_deg.expect("nonzero cochain has a degree") + den)
            } else {
                DegTarget::AtMost(cap_degree)
            };
            let mons = standard_monomials(
                self.ctx.nvars(),
                &enum_weights,
                &leads,
                &target,
                MAX_COLUMNS,
                p,
            )?;
            for m in mons {
                cols.push((si, m));
            }
            if cols.len() > MAX_COLUMNS {
                return Err(Error::Budget(
                    "coboundary candidate space exceeds the column cap".into(),
                ));
            }
        }
        let refuted = CoboundaryOutcome::NotFound {
            conclusive: d == 1 && exact && self.integral_hint,
        };
        if cols.is_empty() {
            return Ok(refuted);
        }

        // One column of the linear system per candidate monomial: its
        // differential, component by component, reduced to normal form.
        let mut pows = Vec::with_capacity(n);
        for e in &self.elems {
            pows.push(e.pow(c.trunc)?);
        }
        let col_images: Vec<Vec<(usize, Polynomial)>> = par::try_map_vec(&cols, |(si, m)| {
            let s = sub_in[*si];
            let mp = Polynomial::monomial(m.clone(), &self.ctx);
            let mut out = Vec::new();
            for k in 0..n {
                if s & (1u32 << k) != 0 {
                    continue;
                }
                let t = s | (1u32 << k);
                let ti = sub_out
                    .binary_search(&t)
                    .map_err(|_| Error::InvalidInput("subset enumeration broken".into()))?;
                let prod = self.gb.normal_form(&mp.mul(&pows[k])?, gb)?;
                let signed = if position_sign_negative(k, t) { prod.neg() } else { prod };
                out.push((ti, signed));
            }
            Ok(out)
        })?;

        // Row space: every monomial seen in any reduced column image or in
        // the right-hand side.
        let field = self.ctx.field.clone();
        let nparams = self.ctx.nparams();
        let mut row_ids: HashMap<(usize, Monomial), usize> = HashMap::new();
        for (ti, f) in nf_c.iter().enumerate() {
            for (m, _) in &f.terms {
                let next = row_ids.len();
                row_ids.entry((ti, m.clone())).or_insert(next);
            }
        }
        for image in &col_images {
            for (ti, f) in image {
                for (m, _) in &f.terms {
                    let next = row_ids.len();
                    row_ids.entry((*ti, m.clone())).or_insert(next);
                }
            }
        }
        if row_ids.len() > MAX_ROWS {
            return Err(Error::Budget(
                "coboundary equation count exceeds the row cap".into(),
            ));
        }
        let nrows = row_ids.len();
        let ncols = cols.len();
        let zero = crate::param::ParamFraction::zero(&field, nparams);
        let mut a = vec![vec![zero.clone(); ncols]; nrows];
        for (ci, image) in col_images.iter().enumerate() {
            for (ti, f) in image {
                for (m, coef) in &f.terms {
                    let r = row_ids[&(*ti, m.clone())];
                    a[r][ci] = a[r][ci].add(coef, &field, nparams);
                }
            }
        }
        let mut b = vec![zero; nrows];
        for (ti, f) in nf_c.iter().enumerate() {
            for (m, coef) in &f.terms {
                let r = row_ids[&(ti, m.clone())];
                b[r] = b[r].add(coef, &field, nparams);
            }
        }

        match linalg::solve(&a, &b, &field, nparams) {
            None => Ok(refuted),
            Some(x) => {
                let mut comps = vec![Polynomial::zero(&self.ctx); sub_in.len()];
                for (ci, (si, m)) in cols.iter().enumerate() {
                    if x[ci].is_zero() {
                        continue;
                    }
                    let term = Polynomial::from_terms(
                        vec![(m.clone(), x[ci].clone())],
                        &self.ctx,
                    );
                    comps[*si] = comps[*si].add(&term)?;
                }
                let beta = Cochain { degree: d - 1, trunc: c.trunc, comps };
                let dbeta = self.differential(&beta)?;
                if !self.is_zero_cochain(&self.sub(&dbeta, c)?)? {
                    return Err(Error::Verification(
                        "solved coboundary preimage fails re-reduction".into(),
                    ));
                }
                Ok(CoboundaryOutcome::Found(beta))
            }
        }
    }

    /// Transports a cochain from `source` into this complex. The target
    /// context must extend the source's variable list, and the element
    /// sequences must agree under that inclusion.
    pub fn import_cochain(&self, c: &Cochain, source: &CechComplex) -> Result<Cochain> {
        source.check_cochain(c)?;
        if source.elems.len() != self.elems.len() {
            return Err(Error::ContextMismatch(
                "element sequences have different lengths".into(),
            ));
        }
        let sn = source.ctx.nvars();
        if self.ctx.nvars() < sn || self.ctx.vars[..sn] != source.ctx.vars[..sn] {
            return Err(Error::ContextMismatch(
                "target context does not extend the source context".into(),
            ));
        }
        let map: Vec<usize> = (0..sn).collect();
        for (a, b) in source.elems.iter().zip(&self.elems) {
            if &a.transport(&self.ctx, &map)? != b {
                return Err(Error::ContextMismatch(
                    "element sequences differ under the inclusion".into(),
                ));
            }
        }
        let comps = c
            .comps
            .iter()
            .map(|f| f.transport(&self.ctx, &map))
            .collect::<Result<Vec<_>>>()?;
        Ok(Cochain { degree: c.degree, trunc: c.trunc, comps })
    }
}

/// A cocycle-checked cochain.
#[derive(Debug, Clone)]
pub struct CohomologyClass {
    pub cochain: Cochain,
}

/// The degree-two class attached to a relation `u x_1 + v x_2 + w x_3 = 0`
/// on a three-element sequence: components `w`, `-v`, `u` at the subsets
/// `{0,1}`, `{0,2}`, `{1,2}`, each over the product of the two elements.
/// The relation makes it a cocycle.
pub fn class_from_relation(
    complex: &CechComplex,
    u: &Polynomial,
    v: &Polynomial,
    w: &Polynomial,
) -> Result<CohomologyClass> {
    if complex.nelems() != 3 {
        return Err(Error::InvalidInput(
            "relation classes need exactly three sequence elements".into(),
        ));
    }
    let rel = u
        .mul(&complex.elems[0])?
        .add(&v.mul(&complex.elems[1])?)?
        .add(&w.mul(&complex.elems[2])?)?;
    if !complex.nf(&rel)?.is_zero() {
        return Err(Error::InvalidInput(
            "coefficients do not form a relation on the sequence".into(),
        ));
    }
    let comps = vec![w.clone(), v.neg(), u.clone()];
    let c = complex.from_components(2, 1, comps)?;
    complex.cohomology_class(c)
}

/// Result of trivializing a Frobenius-nilpotent class: the extended ring
/// presentation, the transported class, a cochain bounding it there, and
/// the tower data. `reduced_relations` lists numerators that were visibly
/// nilpotent in the constructed presentation and were added as relations to
/// pass to its reduced quotient (their p-th powers already reduced to
/// zero, so they vanish in every reduced image of the extension).
#[derive(Debug, Clone)]
pub struct TrivializationRecord {
    /// Least `e` with `F^e(class)` a coboundary over the base ring.
    pub order: u32,
    pub report: GaloisTowerReport,
    pub ring: Arc<RingContext>,
    pub complex: Arc<CechComplex>,
    pub eta: Cochain,
    pub xi: Cochain,
    pub reduced_relations: Vec<Polynomial>,
}

struct LevelOutcome {
    complex: Arc<CechComplex>,
    xi: Cochain,
    steps: Vec<(String, GaloisStepKind)>,
    reduced: Vec<Polynomial>,
}

/// Makes a Frobenius-nilpotent class a coboundary over a tower of ring
/// extensions, one level per Frobenius power.
///
/// First the least `e <= e_max` with `F^e(class)` a coboundary is found
/// together with a bounding cochain `alpha`. Then, walking `e` back down to
/// zero, each level turns a bounding cochain for `F(class_level)` into one
/// for `class_level` itself: Artin-Schreier roots absorb the components
/// supported on the leading sequence element, the contracting homotopy of
/// the auxiliary unit complex moves the remainder away from that element,
/// and p-th roots finish the remaining components. The residual cochain is
/// checked to have an identically vanishing Frobenius image, and its
/// numerators are passed to the reduced quotient as relations.
///
/// The final bounding identity is re-verified from scratch in a freshly
/// reduced presentation before the record is returned.
pub fn trivialize_nilpotent_class(
    complex: &Arc<CechComplex>,
    class: &CohomologyClass,
    e_max: u32,
    solve: &SolveBudget,
    gb: &GbBudget,
) -> Result<TrivializationRecord> {
    let eta0 = &class.cochain;
    complex.check_cochain(eta0)?;

    let mut cur = eta0.clone();
    let mut found: Option<(u32, Cochain)> = None;
    let mut all_conclusive = true;
    for e in 0..=e_max {
        if e > 0 {
            cur = complex.frobenius_on_cochain(&cur)?;
        }
        match complex.is_coboundary(&cur, solve, gb)? {
            CoboundaryOutcome::Found(alpha) => {
                found = Some((e, alpha));
                break;
            }
            CoboundaryOutcome::NotFound { conclusive } => all_conclusive &= conclusive,
        }
    }
    let Some((order, alpha0)) = found else {
        return Err(if all_conclusive {
            Error::InvalidInput(
                "the class is not Frobenius-nilpotent within the exponent bound".into(),
            )
        } else {
            Error::Budget(
                "Frobenius nilpotency was not established within the exponent bound".into(),
            )
        });
    };

    let mut steps: Vec<(String, GaloisStepKind)> = Vec::new();
    let mut reduced_all: Vec<Polynomial> = Vec::new();
    let mut cur_complex = complex.clone();
    let mut cur_alpha = alpha0;
    let mut counter = 1usize;
    for level in (0..order).rev() {
        let mut eta_l = cur_complex.import_cochain(eta0, complex)?;
        for _ in 0..level {
            eta_l = cur_complex.frobenius_on_cochain(&eta_l)?;
        }
        let out = trivialize_level(&cur_complex, &eta_l, &cur_alpha, gb, &mut counter)?;
        steps.extend(out.steps);
        reduced_all.extend(out.reduced);
        cur_alpha = out.xi;
        cur_complex = out.complex;
    }

    // Independent final check: recompute the quotient presentation from
    // scratch and re-reduce the bounding identity in it.
    let final_complex = CechComplex::new(
        &cur_complex.ctx,
        cur_complex.elems.clone(),
        cur_complex.default_truncation,
        gb,
    )?;
    let eta_f = final_complex.import_cochain(eta0, complex)?;
    let dxi = final_complex.differential(&cur_alpha)?;
    if !final_complex.is_zero_cochain(&final_complex.sub(&dxi, &eta_f)?)? {
        return Err(Error::Verification(
            "trivialization failed its final re-verification".into(),
        ));
    }
    let generically_separable = !steps
        .iter()
        .any(|(_, k)| matches!(k, GaloisStepKind::InseparableRoot { .. }));
    Ok(TrivializationRecord {
        order,
        report: GaloisTowerReport { steps, solvable_tower: true, generically_separable },
        ring: final_complex.ctx.clone(),
        complex: final_complex,
        eta: eta_f,
        xi: cur_alpha,
        reduced_relations: reduced_all,
    })
}

/// One level: from `d(alpha) = F(eta)` to a cochain `xi` with `d(xi) = eta`
/// over an extension of the coefficient ring.
fn trivialize_level(
    complex: &Arc<CechComplex>,
    eta: &Cochain,
    alpha: &Cochain,
    gb: &GbBudget,
    counter: &mut usize,
) -> Result<LevelOutcome> {
    let i = eta.degree;
    if i == 0 || alpha.degree + 1 != i {
        return Err(Error::InvalidInput(
            "level input must pair a degree-i class with a degree i-1 bound".into(),
        ));
    }
    let feta = complex.frobenius_on_cochain(eta)?;
    let dalpha = complex.differential(alpha)?;
    if !complex.is_zero_cochain(&complex.sub(&dalpha, &feta)?)? {
        return Err(Error::Verification(
            "level input does not bound the Frobenius image of the class".into(),
        ));
    }
    if i == 1 {
        level_dim_one(complex, eta, alpha, gb, counter)
    } else {
        level_general(complex, eta, alpha, gb, counter)
    }
}

/// Degree-one level. The bound `alpha` is a single ring element `a` with
/// `a * x_k^(p N) = eta_k^p` up to relations. Adjoining `t` with
/// `t^p + x_0 t = a` and then `w` with `w^p = x_0 t` makes `xi = t + w`
/// work: `F(xi) = t^p + w^p = a`, so `d(xi)` and `eta` share a Frobenius
/// image and their difference is nilpotent.
fn level_dim_one(
    complex: &Arc<CechComplex>,
    eta: &Cochain,
    alpha: &Cochain,
    gb: &GbBudget,
    counter: &mut usize,
) -> Result<LevelOutcome> {
    let ctx = &complex.ctx;
    let p = ctx.p();
    let a = complex.nf(&alpha.comps[0])?;
    if a.is_zero() {
        let xi = complex.zero_cochain(0, alpha.trunc);
        return finish_level(complex.clone(), complex, eta, &xi, Vec::new(), gb);
    }
    let x0 = complex.elems[0].clone();
    let p_ratio = Ratio::from_integer(p as i64);

    let tname = next_name(ctx, "t", counter);
    let t_weight = match (ctx.weight_slice(), a.homogeneous_degree(), x0.homogeneous_degree()) {
        (Some(_), Some(da), Some(d0)) => {
            let cand = da / p_ratio;
            (d0 + cand == da).then_some(cand)
        }
        _ => None,
    };
    let c2 = grow(complex, &[(tname.clone(), t_weight)], gb, |bare, idmap| {
        let t = Polynomial::var_named(&tname, bare)?;
        let rel = t
            .pow(p)?
            .add(&x0.transport(bare, idmap)?.mul(&t)?)?
            .sub(&a.transport(bare, idmap)?)?;
        Ok(vec![rel])
    })?;
    let mut steps = vec![(tname.clone(), GaloisStepKind::ArtinSchreier { degree: p })];

    let t2 = Polynomial::var_named(&tname, &c2.ctx)?;
    let idmap2: Vec<usize> = (0..ctx.nvars()).collect();
    let x0_2 = x0.transport(&c2.ctx, &idmap2)?;
    let root_target = c2.nf(&x0_2.mul(&t2)?)?;
    let (c3, xi_poly) = if root_target.is_zero() {
        (c2.clone(), t2)
    } else {
        let wname = next_name(&c2.ctx, "w", counter);
        let w_weight = match (c2.ctx.weight_slice(), root_target.homogeneous_degree()) {
            (Some(_), Some(dc)) => Some(dc / p_ratio),
            _ => None,
        };
        let c3 = grow(&c2, &[(wname.clone(), w_weight)], gb, |bare, idmap| {
            let w = Polynomial::var_named(&wname, bare)?;
            Ok(vec![w.pow(p)?.sub(&root_target.transport(bare, idmap)?)?])
        })?;
        steps.push((wname.clone(), GaloisStepKind::InseparableRoot { degree: p }));
        let id3: Vec<usize> = (0..c2.ctx.nvars()).collect();
        let t3 = t2.transport(&c3.ctx, &id3)?;
        let w3 = Polynomial::var_named(&wname, &c3.ctx)?;
        (c3, t3.add(&w3)?)
    };
    let xi = c3.from_components(0, alpha.trunc, vec![xi_poly])?;
    finish_level(c3, complex, eta, &xi, steps, gb)
}

/// General level in degree `i >= 2`, at the truncation `q`, the least
/// p-power dominating `alpha`'s truncation. Components of `alpha` at
/// subsets containing index 0 become Artin-Schreier adjunctions
/// `t^p + x_0^q t = b_S`; splicing the roots into `alpha` over the
/// auxiliary complex on `(1, x_1, .., x_n)` and subtracting the coboundary
/// of its contracting homotopy leaves components away from index 0 only,
/// which p-th root adjunctions then absorb.
fn level_general(
    complex: &Arc<CechComplex>,
    eta: &Cochain,
    alpha: &Cochain,
    gb: &GbBudget,
    counter: &mut usize,
) -> Result<LevelOutcome> {
    let ctx = &complex.ctx;
    let p = ctx.p();
    let i = eta.degree;
    let p_ratio = Ratio::from_integer(p as i64);

    let mut q = p;
    while q < alpha.trunc {
        q = q.checked_mul(p).ok_or_else(|| {
            Error::Truncation("level truncation exceeds the representable range".into())
        })?;
    }
    let qp = q / p;
    let alpha_q = complex.raise_truncation(alpha, q)?;
    let x0 = complex.elems[0].clone();
    let x0_deg = x0.homogeneous_degree();
    let sub_im1 = complex.subsets(i - 1);

    // Artin-Schreier adjunctions for the components at subsets through 0.
    let mut t_for: Vec<Option<String>> = vec![None; sub_im1.len()];
    let mut new_vars: Vec<(String, Option<Ratio<i64>>)> = Vec::new();
    let mut as_rhs: Vec<(String, Polynomial)> = Vec::new();
    for (si, s) in sub_im1.iter().enumerate() {
        if s & 1 == 0 {
            continue;
        }
        let b = complex.nf(&alpha_q.comps[si])?;
        if b.is_zero() {
            continue;
        }
        let name = next_name(ctx, "t", counter);
        let weight = match (ctx.weight_slice(), b.homogeneous_degree(), x0_deg) {
            (Some(_), Some(db), Some(d0)) => {
                let cand = db / p_ratio;
                (Ratio::from_integer(q as i64) * d0 + cand == db).then_some(cand)
            }
            _ => None,
        };
        new_vars.push((name.clone(), weight));
        as_rhs.push((name.clone(), b));
        t_for[si] = Some(name);
    }
    let c2 = if new_vars.is_empty() {
        complex.clone()
    } else {
        grow(complex, &new_vars, gb, |bare, idmap| {
            let x0q = x0.transport(bare, idmap)?.pow(q)?;
            as_rhs
                .iter()
                .map(|(name, b)| {
                    let t = Polynomial::var_named(name, bare)?;
                    t.pow(p)?.add(&x0q.mul(&t)?)?.sub(&b.transport(bare, idmap)?)
                })
                .collect()
        })?
    };
    let steps: Vec<(String, GaloisStepKind)> = new_vars
        .iter()
        .map(|(n, _)| (n.clone(), GaloisStepKind::ArtinSchreier { degree: p }))
        .collect();
    let alpha_q2 = c2.import_cochain(&alpha_q, complex)?;

    // Sanity check per adjunction: the root satisfies its defining identity
    // against the transported component.
    let idmap2: Vec<usize> = (0..ctx.nvars()).collect();
    let x0q_2 = x0.transport(&c2.ctx, &idmap2)?.pow(q)?;
    for (si, name) in t_for.iter().enumerate() {
        let Some(name) = name else { continue };
        let t = Polynomial::var_named(name, &c2.ctx)?;
        let probe = alpha_q2.comps[si].sub(&t.pow(p)?)?.sub(&x0q_2.mul(&t)?)?;
        if !c2.nf(&probe)?.is_zero() {
            return Err(Error::Verification(
                "adjoined root fails its defining identity".into(),
            ));
        }
    }

    // beta: the adjoined roots over the p-th root of the denominators.
    let mut beta_comps = vec![Polynomial::zero(&c2.ctx); sub_im1.len()];
    for (si, name) in t_for.iter().enumerate() {
        if let Some(name) = name {
            beta_comps[si] = Polynomial::var_named(name, &c2.ctx)?;
        }
    }
    let beta = c2.from_components(i - 1, qp, beta_comps)?;

    // gamma over the unit complex (1, x_1, .., x_n): roots where the
    // subset passes through 0, the raised alpha components elsewhere.
    let mut unit_elems = vec![Polynomial::one(&c2.ctx)];
    for e in &c2.elems[1..] {
        unit_elems.push(e.clone());
    }
    let unit = CechComplex::new(&c2.ctx, unit_elems, c2.default_truncation, gb)?;
    let mut gamma_comps = Vec::with_capacity(sub_im1.len());
    for (si, s) in sub_im1.iter().enumerate() {
        if s & 1 == 1 {
            gamma_comps.push(match &t_for[si] {
                Some(name) => Polynomial::var_named(name, &c2.ctx)?,
                None => Polynomial::zero(&c2.ctx),
            });
        } else {
            gamma_comps.push(alpha_q2.comps[si].clone());
        }
    }
    let gamma = unit.from_components(i - 1, q, gamma_comps)?;
    let zeta = unit.contracting_homotopy_with_unit(&gamma)?;
    let dzeta = unit.differential(&zeta)?;
    let gamma_prime = unit.sub(&gamma, &dzeta)?;
    for (si, s) in sub_im1.iter().enumerate() {
        if s & 1 == 1 && !c2.nf(&gamma_prime.comps[si])?.is_zero() {
            return Err(Error::Verification(
                "homotopy failed to clear the leading-element components".into(),
            ));
        }
    }

    // p-th roots for the remaining components.
    let mut w_for: Vec<Option<String>> = vec![None; sub_im1.len()];
    let mut w_vars: Vec<(String, Option<Ratio<i64>>)> = Vec::new();
    let mut w_rhs: Vec<(String, Polynomial)> = Vec::new();
    for (si, s) in sub_im1.iter().enumerate() {
        if s & 1 == 1 {
            continue;
        }
        let cval = c2.nf(&gamma_prime.comps[si])?;
        if cval.is_zero() {
            continue;
        }
        let name = next_name(&c2.ctx, "w", counter);
        let weight = match (c2.ctx.weight_slice(), cval.homogeneous_degree()) {
            (Some(_), Some(dc)) => Some(dc / p_ratio),
            _ => None,
        };
        w_vars.push((name.clone(), weight));
        w_rhs.push((name.clone(), cval));
        w_for[si] = Some(name);
    }
    let c3 = if w_vars.is_empty() {
        c2.clone()
    } else {
        grow(&c2, &w_vars, gb, |bare, idmap| {
            w_rhs
                .iter()
                .map(|(name, cval)| {
                    let w = Polynomial::var_named(name, bare)?;
                    w.pow(p)?.sub(&cval.transport(bare, idmap)?)
                })
                .collect()
        })?
    };
    let mut steps = steps;
    for (n, _) in &w_vars {
        steps.push((n.clone(), GaloisStepKind::InseparableRoot { degree: p }));
    }

    let beta3 = c3.import_cochain(&beta, &c2)?;
    let mut xi_comps = vec![Polynomial::zero(&c3.ctx); sub_im1.len()];
    for (si, name) in w_for.iter().enumerate() {
        if let Some(name) = name {
            xi_comps[si] = Polynomial::var_named(name, &c3.ctx)?;
        }
    }
    let xi_roots = c3.from_components(i - 1, qp, xi_comps)?;
    let xi = c3.add(&beta3, &xi_roots)?;
    let steps = steps;
    finish_level(c3, complex, eta, &xi, steps, gb)
}

/// Level epilogue shared by all degrees: checks that the residual
/// `delta = eta - d(xi)` has identically vanishing Frobenius image, then
/// adds its (hence nilpotent) numerators as relations to pass to the
/// reduced quotient, where the bounding identity must hold on the nose.
fn finish_level(
    complex: Arc<CechComplex>,
    base: &CechComplex,
    eta: &Cochain,
    xi: &Cochain,
    steps: Vec<(String, GaloisStepKind)>,
    gb: &GbBudget,
) -> Result<LevelOutcome> {
    let eta_here = complex.import_cochain(eta, base)?;
    let dxi = complex.differential(xi)?;
    let delta = complex.sub(&eta_here, &dxi)?;
    let fdelta = complex.frobenius_on_cochain(&delta)?;
    if !complex.is_zero_cochain(&fdelta)? {
        return Err(Error::Verification(
            "residual class has a nonvanishing Frobenius image".into(),
        ));
    }
    let mut nils: Vec<Polynomial> = Vec::new();
    for comp in &delta.comps {
        let nf = complex.nf(comp)?;
        if nf.is_zero() {
            continue;
        }
        if !complex.nf(&nf.frobenius_power(1))?.is_zero() {
            return Err(Error::Verification(
                "residual numerator is not visibly nilpotent".into(),
            ));
        }
        if !nils.contains(&nf) {
            nils.push(nf);
        }
    }
    if nils.is_empty() {
        return Ok(LevelOutcome { complex, xi: xi.clone(), steps, reduced: Vec::new() });
    }
    let nils_for_grow = nils.clone();
    let grown = grow(&complex, &[], gb, move |bare, idmap| {
        nils_for_grow.iter().map(|f| f.transport(bare, idmap)).collect()
    })?;
    if grown.nf(&Polynomial::one(&grown.ctx))?.is_zero() {
        return Err(Error::Verification(
            "reduced quotient collapsed to the zero ring".into(),
        ));
    }
    let eta_g = grown.import_cochain(eta, base)?;
    let xi_g = grown.import_cochain(xi, &complex)?;
    let dxi_g = grown.differential(&xi_g)?;
    if !grown.is_zero_cochain(&grown.sub(&eta_g, &dxi_g)?)? {
        return Err(Error::Verification(
            "residual class persists in the reduced quotient".into(),
        ));
    }
    Ok(LevelOutcome { complex: grown, xi: xi_g, steps, reduced: nils })
}

/// Rebuilds the complex over a context extended by `new_vars` (possibly
/// none) and by the relations returned by `build`, which receives the bare
/// extended context and the identity variable map for transports. Grading
/// is kept when every new variable has a weight and every relation stays
/// homogeneous; otherwise the extended context drops the grading rather
/// than fail.
pub(crate) fn grow<F>(
    base: &CechComplex,
    new_vars: &[(String, Option<Ratio<i64>>)],
    gb: &GbBudget,
    build: F,
) -> Result<Arc<CechComplex>>
where
    F: Fn(&Arc<RingContext>, &[usize]) -> Result<Vec<Polynomial>>,
{
    let ctx = &base.ctx;
    let mut names = ctx.vars.clone();
    for (n, _) in new_vars {
        if names.contains(n) || ctx.params.contains(n) {
            return Err(Error::InvalidInput(format!("name {n} is already taken")));
        }
        names.push(n.clone());
    }
    let idmap: Vec<usize> = (0..ctx.nvars()).collect();
    let weighted: Option<Vec<Ratio<i64>>> = match ctx.weight_slice() {
        Some(ws) if new_vars.iter().all(|(_, w)| w.is_some()) => Some(
            ws.iter()
                .cloned()
                .chain(new_vars.iter().map(|(_, w)| w.unwrap()))
                .collect(),
        ),
        _ => None,
    };
    let make = |weights: Option<Vec<Ratio<i64>>>| -> Result<(Arc<RingContext>, Vec<Polynomial>)> {
        let bare = RingContext::new(
            ctx.field.clone(),
            names.clone(),
            weights,
            ctx.params.clone(),
            ctx.order.clone(),
        )?;
        let mut rels = ctx
            .relation_polys()
            .iter()
            .map(|r| r.transport(&bare, &idmap))
            .collect::<Result<Vec<_>>>()?;
        rels.extend(build(&bare, &idmap)?);
        Ok((bare, rels))
    };
    let (bare, rels) = make(weighted.clone())?;
    let (bare, rels) = if weighted.is_some()
        && rels
            .iter()
            .any(|r| !r.is_zero() && r.homogeneous_degree().is_none())
    {
        make(None)?
    } else {
        (bare, rels)
    };
    let ctx2 = bare.with_relations(rels)?;
    let elems = base
        .elems
        .iter()
        .map(|e| e.transport(&ctx2, &idmap))
        .collect::<Result<Vec<_>>>()?;
    CechComplex::new(&ctx2, elems, base.default_truncation, gb)
}

/// First generator name of the form `{base}{counter}` not colliding with a
/// variable, parameter, or the field generator; advances the counter.
pub(crate) fn next_name(ctx: &RingContext, base: &str, counter: &mut usize) -> String {
    loop {
        let cand = format!("{base}{counter}");
        *counter += 1;
        if ctx.var_index(&cand).is_none()
            && ctx.param_index(&cand).is_none()
            && ctx.field.generator.as_deref() != Some(cand.as_str())
        {
            return cand;
        }
    }
}

/// Parity of the position of `k` inside the subset `t` (which contains it).
fn position_sign_negative(k: usize, t: u32) -> bool {
    (t & ((1u32 << k) - 1)).count_ones() % 2 == 1
}

fn mask_degree(mask: u32, elem_degs: &[Option<Ratio<i64>>]) -> Ratio<i64> {
    let mut acc = Ratio::from_integer(0);
    let mut m = mask;
    while m != 0 {
        let k = m.trailing_zeros() as usize;
        m &= m - 1;
        acc += elem_degs[k].expect("exact mode requires homogeneous elements");
    }
    acc
}

pub(crate) enum DegTarget {
    Exact(Ratio<i64>),
    AtMost(Ratio<i64>),
}

/// Monomials with integer exponents, not divisible by any of `leads`,
/// whose weighted degree matches the target. Weights must be positive.
pub(crate) fn standard_monomials(
    nvars: usize,
    weights: &[Ratio<i64>],
    leads: &[Monomial],
    target: &DegTarget,
    cap: usize,
    p: u64,
) -> Result<Vec<Monomial>> {
    let bound = match target {
        DegTarget::Exact(b) | DegTarget::AtMost(b) => *b,
    };
    let mut out = Vec::new();
    if bound < Ratio::from_integer(0) {
        return Ok(out);
    }
    let mut exps = vec![0u64; nvars];
    descend(0, Ratio::from_integer(0), &mut exps, &mut out, nvars, weights, leads, target, bound, cap, p)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn descend(
    var: usize,
    used: Ratio<i64>,
    exps: &mut Vec<u64>,
    out: &mut Vec<Monomial>,
    nvars: usize,
    weights: &[Ratio<i64>],
    leads: &[Monomial],
    target: &DegTarget,
    bound: Ratio<i64>,
    cap: usize,
    p: u64,
) -> Result<()> {
    if out.len() > cap {
        return Err(Error::Budget(
            "candidate monomial enumeration exceeds its cap".into(),
        ));
    }
    if var == nvars {
        if matches!(target, DegTarget::Exact(_)) && used != bound {
            return Ok(());
        }
        let m = Monomial {
            exps: exps.iter().map(|e| PExp::int(*e)).collect::<SmallVec<[PExp; 6]>>(),
        };
        if leads.iter().any(|lt| lt.divides(&m, p)) {
            return Ok(());
        }
        out.push(m);
        return Ok(());
    }
    let w = weights[var];
    let mut e = 0u64;
    loop {
        let deg = used + w * Ratio::from_integer(e as i64);
        if deg > bound {
            break;
        }
        exps[var] = e;
        descend(var + 1, deg, exps, out, nvars, weights, leads, target, bound, cap, p)?;
        e += 1;
    }
    exps[var] = 0;
    Ok(())
}
