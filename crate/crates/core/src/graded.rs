//! Blowup-algebra presentations, characteristic-p power identities, and
//! direct trivialization of top-degree local cohomology classes.
//!
//! Everything here works over quotient presentations. A blowup subalgebra
//! A[g_1 t, ..., g_m t] of A[t] is presented on named symbols by
//! eliminating the graph of the substitution; identities between
//! fractional-power expressions are certified by raising both sides to a
//! p-power that clears every denominator; and a homogeneous top-degree
//! cohomology class of nonnegative degree is made a coboundary over an
//! explicit tower of additive-polynomial root adjunctions.

use std::collections::HashMap;
use std::sync::Arc;

use num_rational::Ratio;

use crate::budget::{GbBudget, SolveBudget};
use crate::cech::{
    grow, next_name, standard_monomials, CechComplex, Cochain, CoboundaryOutcome, CohomologyClass,
    DegTarget,
};
use crate::error::{Error, Result};
use crate::exponent::PExp;
use crate::extension::{GaloisStepKind, GaloisTowerReport};
use crate::field::{FieldScalar, FieldSpec};
use crate::groebner::{kernel_of_ring_map, quotient_basis};
use crate::linalg;
use crate::monomial::{Monomial, OrderSpec};
use crate::param::ParamFraction;
use crate::parse::parse_poly;
use crate::poly::Polynomial;
use crate::ring::RingContext;

/// Candidate cap shared by the monomial enumerations in this module.
const ENUM_CAP: usize = 4_000;

/// Upper bound on the number of scalar tuples tried when searching for a
/// linear relation among Frobenius iterates.
const SCALAR_SEARCH_CAP: u128 = 4_096;

/// A blowup subalgebra A[g_1 t, ..., g_m t] of A[t], presented on the base
/// variables together with one named symbol per generator.
#[derive(Debug, Clone)]
pub struct ReesFixture {
    /// The base ring A.
    pub base: Arc<RingContext>,
    /// Generators whose degree-one multiples span the subalgebra.
    pub gens: Vec<Polynomial>,
    /// Quotient presentation: base variables first, then the new symbols.
    pub ring: Arc<RingContext>,
    /// Names of the adjoined symbols, in generator order.
    pub new_vars: Vec<String>,
    /// Kernel of the defining substitution, in the relation-free ambient
    /// of `ring` (the same polynomials are installed as its relations).
    pub kernel: Vec<Polynomial>,
}

/// Presents the subalgebra of A[t] generated by the base variables and the
/// products g_j t. The graph of the substitution is eliminated, and every
/// returned kernel generator is re-verified to substitute to zero.
pub fn rees_presentation(
    base: &Arc<RingContext>,
    gens: &[Polynomial],
    new_names: &[String],
    weights: Option<Vec<Ratio<i64>>>,
    budget: &GbBudget,
) -> Result<ReesFixture> {
    if gens.is_empty() || gens.len() != new_names.len() {
        return Err(Error::InvalidInput(
            "one fresh symbol per blowup generator is required".into(),
        ));
    }
    for g in gens {
        if !g.ctx_is(base) {
            return Err(Error::ContextMismatch("generator from another ring".into()));
        }
        if g.is_zero() || !g.has_integer_exponents() {
            return Err(Error::InvalidInput(
                "blowup generators must be nonzero with integer exponents".into(),
            ));
        }
    }
    // The elimination ring holds disjoint copies of the base variables plus
    // the parameter t; mangle the copies until they avoid every requested
    // presentation name.
    let mut suffix = String::from("_b");
    let (mangled, t_name) = loop {
        let cand: Vec<String> = base.vars.iter().map(|v| format!("{v}{suffix}")).collect();
        let t_name = format!("t{suffix}");
        let taken = |n: &String| {
            base.vars.contains(n)
                || new_names.contains(n)
                || base.params.contains(n)
                || base.field.generator.as_deref() == Some(n.as_str())
        };
        let clash = cand.iter().any(taken) || taken(&t_name) || cand.contains(&t_name);
        if !clash {
            break (cand, t_name);
        }
        suffix.push('_');
    };
    let mut tvars = mangled;
    tvars.push(t_name);
    let idmap: Vec<usize> = (0..base.nvars()).collect();
    let bare = RingContext::new(
        base.field.clone(),
        tvars,
        None,
        base.params.clone(),
        OrderSpec::GrevLex,
    )?;
    let rels = base
        .relation_polys()
        .iter()
        .map(|r| r.transport(&bare, &idmap))
        .collect::<Result<Vec<_>>>()?;
    let target = bare.with_relations(rels)?;
    let t_poly = Polynomial::var(base.nvars(), &target);
    let mut images: Vec<Polynomial> =
        (0..base.nvars()).map(|i| Polynomial::var(i, &target)).collect();
    for g in gens {
        images.push(g.transport(&target, &idmap)?.mul(&t_poly)?);
    }
    let mut all_names = base.vars.clone();
    all_names.extend(new_names.iter().cloned());
    let (ambient, kernel) = kernel_of_ring_map(&target, &all_names, &images, weights, budget)?;
    // Invariant: substituting the defining images into any kernel generator
    // must give zero in A[t].
    let qb = quotient_basis(&target, budget)?;
    for k in &kernel {
        let sub = substitute(k, &images, &target)?;
        if !qb.normal_form(&sub, budget)?.is_zero() {
            return Err(Error::Verification(format!(
                "kernel generator {} does not substitute to zero",
                k.print()
            )));
        }
    }
    let ring = ambient.with_relations(kernel.clone())?;
    Ok(ReesFixture {
        base: base.clone(),
        gens: gens.to_vec(),
        ring,
        new_vars: new_names.to_vec(),
        kernel,
    })
}

/// Evaluates `f` by sending variable `i` to `images[i]`. Exponents must be
/// integers.
fn substitute(
    f: &Polynomial,
    images: &[Polynomial],
    target: &Arc<RingContext>,
) -> Result<Polynomial> {
    if images.len() < f.ctx.nvars() {
        return Err(Error::InvalidInput("one image per variable is required".into()));
    }
    let mut acc = Polynomial::zero(target);
    for (m, c) in &f.terms {
        if !m.has_integer_exponents() {
            return Err(Error::InvalidInput(
                "substitution requires integer exponents".into(),
            ));
        }
        let mut t = Polynomial::constant(c.clone(), target);
        for (i, e) in m.exps.iter().enumerate() {
            if !e.is_zero() {
                t = t.mul(&images[i].pow(e.num)?)?;
            }
        }
        acc = acc.add(&t)?;
    }
    Ok(acc)
}

/// Certifies that `lhs` and `rhs` agree after `level` applications of
/// Frobenius: both p^level-th powers must have integer exponents, and
/// their difference must reduce to zero against the ring's relations.
/// In a ring without zerodivisors p-th roots are unique, so the
/// certificate then witnesses `lhs = rhs` itself; `domain_hypothesis`
/// records whether that stronger reading is claimed.
#[derive(Debug, Clone)]
pub struct PowerIdentityCertificate {
    pub lhs: Polynomial,
    pub rhs: Polynomial,
    /// Number of Frobenius applications used to clear fractional exponents.
    pub level: u32,
    /// `(lhs - rhs)^(p^level)`, expanded termwise.
    pub power_difference: Polynomial,
    /// Normal form of `power_difference`; zero for a valid certificate.
    pub reduced: Polynomial,
    pub domain_hypothesis: bool,
}

impl PowerIdentityCertificate {
    /// Recomputes the certificate from its stored inputs and compares the
    /// intermediate data.
    pub fn reverify(&self, budget: &GbBudget) -> Result<bool> {
        let fresh =
            verify_power_identity(&self.lhs, &self.rhs, self.level, self.domain_hypothesis, budget)?;
        Ok(fresh.power_difference == self.power_difference && self.reduced.is_zero())
    }
}

/// Verifies `lhs^(p^level) = rhs^(p^level)` in the quotient ring of the
/// operands' shared context. Both sides may carry fractional exponents as
/// long as `level` Frobenius applications clear them.
pub fn verify_power_identity(
    lhs: &Polynomial,
    rhs: &Polynomial,
    level: u32,
    domain_hypothesis: bool,
    budget: &GbBudget,
) -> Result<PowerIdentityCertificate> {
    if !rhs.ctx_is(&lhs.ctx) {
        return Err(Error::ContextMismatch("sides live in different rings".into()));
    }
    let lp = lhs.frobenius_power(level);
    let rp = rhs.frobenius_power(level);
    if !lp.has_integer_exponents() || !rp.has_integer_exponents() {
        return Err(Error::InvalidInput(format!(
            "exponents stay fractional after {level} Frobenius applications"
        )));
    }
    let diff = lp.sub(&rp)?;
    let qb = quotient_basis(&lhs.ctx, budget)?;
    let reduced = qb.normal_form(&diff, budget)?;
    if !reduced.is_zero() {
        return Err(Error::Verification(format!(
            "p^{level}-th powers differ by {}",
            reduced.print()
        )));
    }
    Ok(PowerIdentityCertificate {
        lhs: lhs.clone(),
        rhs: rhs.clone(),
        level,
        power_difference: diff,
        reduced,
        domain_hypothesis,
    })
}

/// A single monomial with the given variable exponents, coefficient one.
fn frac_monomial(ctx: &Arc<RingContext>, pairs: &[(usize, PExp)]) -> Polynomial {
    let mut m = Monomial::unit(ctx.nvars());
    for (i, e) in pairs {
        m.exps[*i] = *e;
    }
    Polynomial::monomial(m, ctx)
}

/// One certified identity of the inductive family, labelled by the p-power
/// stage it belongs to.
#[derive(Debug, Clone)]
pub struct FamilyCertificate {
    pub q: u64,
    pub label: String,
    pub certificate: PowerIdentityCertificate,
}

/// Certified data for the family of fractional-power elements living on
/// the blowup of the cubic cone x^3 + y^3 + z^3 = 0 in characteristic two.
/// For each stage q = 2^e the six elements x^(1-2/q)(yz)^(1/q), ... and
/// their degree-one counterparts satisfy a product recombination over the
/// regular sequence (x, y + xt) and a root refinement that halves the
/// exponents; both are certified as p-power identities on the presented
/// blowup ring.
#[derive(Debug, Clone)]
pub struct RootFamilyReport {
    pub fixture: ReesFixture,
    /// The certified stages.
    pub qs: Vec<u64>,
    pub certificates: Vec<FamilyCertificate>,
    /// The six recorded family members per stage, in the presentation ring.
    pub elements: Vec<(u64, Vec<Polynomial>)>,
    /// Degree k of the coefficient field F_{2^k} used for the checks.
    pub field_degree: usize,
    /// Homogeneous degree bound of the square-root representative search.
    pub root_search_bound: u64,
    /// Whether a pair (u, h) of degree at most the bound satisfies
    /// z^2 u^2 = x y h^2. Such a pair would realize the square root of
    /// x y / z^2 inside the fraction field image; none exists here, which
    /// keeps the fraction field extension generated by the family infinite.
    pub root_representative_found: bool,
}

/// Certifies the displayed identities of the fractional-power family for
/// each requested stage q (a power of two; q = 1 degenerates to the
/// defining cubic itself), records the family members, and searches for a
/// bounded-degree representative of the square root of x y / z^2.
pub fn verify_root_family(
    qs: &[u64],
    field_degree: usize,
    root_search_bound: u64,
    budget: &GbBudget,
) -> Result<RootFamilyReport> {
    if qs.is_empty() {
        return Err(Error::InvalidInput("at least one stage is required".into()));
    }
    for q in qs {
        if *q == 0 || !q.is_power_of_two() {
            return Err(Error::InvalidInput(format!("stage {q} is not a power of two")));
        }
    }
    let field = FieldSpec::new(2, field_degree)?;
    let base_bare = RingContext::new(
        field,
        vec!["x".into(), "y".into(), "z".into()],
        Some(vec![Ratio::from_integer(1); 3]),
        vec![],
        OrderSpec::GrevLex,
    )?;
    let cubic = parse_poly("x^3 + y^3 + z^3", &base_bare)?;
    let base = base_bare.with_relations(vec![cubic])?;
    let gens: Vec<Polynomial> = (0..3).map(|i| Polynomial::var(i, &base)).collect();
    let names: Vec<String> = vec!["X".into(), "Y".into(), "Z".into()];
    let fixture = rees_presentation(
        &base,
        &gens,
        &names,
        Some(vec![Ratio::from_integer(1); 6]),
        budget,
    )?;
    let ring = fixture.ring.clone();

    let half = PExp::new(2, 1, 1);
    let three_half = PExp::new(2, 3, 1);
    let mut certificates = Vec::new();
    let mut elements = Vec::new();

    // The seed: in characteristic two the cubic relation z^3 = x^3 + y^3
    // rewrites as z^2 = x (xz)^(1/2) + y (yz)^(1/2).
    let seed_rhs = frac_monomial(&base, &[(0, three_half), (2, half)])
        .add(&frac_monomial(&base, &[(1, three_half), (2, half)]))?;
    certificates.push(FamilyCertificate {
        q: 2,
        label: "square-root expansion of the defining cubic".into(),
        certificate: verify_power_identity(&parse_poly("z^2", &base)?, &seed_rhs, 1, true, budget)?,
    });

    for &q in qs {
        if q == 1 {
            // The stage collapses onto the defining relation.
            certificates.push(FamilyCertificate {
                q,
                label: "degenerate stage".into(),
                certificate: verify_power_identity(
                    &parse_poly("z^3", &ring)?,
                    &parse_poly("x^3 + y^3", &ring)?,
                    0,
                    true,
                    budget,
                )?,
            });
            elements.push((q, (0..6).map(|i| Polynomial::var(i, &ring)).collect()));
            continue;
        }
        let e = q.trailing_zeros();
        let inv_q = PExp::new(2, 1, e);
        let one_m2q = PExp::new(2, q - 2, e);
        let e1 = frac_monomial(&ring, &[(0, one_m2q), (1, inv_q), (2, inv_q)]);
        let e2 = frac_monomial(&ring, &[(0, inv_q), (1, one_m2q), (2, inv_q)]);
        let e3 = frac_monomial(&ring, &[(0, inv_q), (1, inv_q), (2, one_m2q)]);
        let te1 = frac_monomial(&ring, &[(3, one_m2q), (4, inv_q), (5, inv_q)]);
        let te2 = frac_monomial(&ring, &[(3, inv_q), (4, one_m2q), (5, inv_q)]);
        let te3 = frac_monomial(&ring, &[(3, inv_q), (4, inv_q), (5, one_m2q)]);
        elements.push((
            q,
            vec![e1.clone(), e2.clone(), e3, te1.clone(), te2.clone(), te3],
        ));

        let x = Polynomial::var(0, &ring);
        let y = Polynomial::var(1, &ring);
        let xt = Polynomial::var(3, &ring);
        let yt = Polynomial::var(4, &ring);

        // Product recombination over the regular sequence: the family
        // members distribute over y + xt exactly as in A[t].
        let lhs_a = e1.mul(&te2)?.mul(&y.add(&xt)?)?;
        let rhs_a = te1.mul(&te2)?.mul(&x)?.add(&e1.mul(&e2)?.mul(&yt)?)?;
        certificates.push(FamilyCertificate {
            q,
            label: "product recombination".into(),
            certificate: verify_power_identity(&lhs_a, &rhs_a, e, true, budget)?,
        });

        // Root refinement: the recombined product re-expands with halved
        // exponents, which is what produces the next stage of the family.
        let inv_2q = PExp::new(2, 1, e + 1);
        let one_m1q = PExp::new(2, q - 1, e);
        let qm2_2q = PExp::new(2, q - 2, e + 1);
        let two_q = PExp::new(2, 2, e);
        let lhs_c = frac_monomial(
            &ring,
            &[(0, half), (1, half), (3, qm2_2q), (4, qm2_2q), (5, two_q)],
        );
        let t_yx = frac_monomial(&ring, &[(3, inv_2q), (4, one_m1q), (5, inv_2q)]);
        let e_xy = frac_monomial(&ring, &[(0, one_m1q), (1, inv_2q), (2, inv_2q)]);
        let rhs_c = t_yx.mul(&x)?.add(&e_xy.mul(&yt)?)?;
        certificates.push(FamilyCertificate {
            q,
            label: "root refinement".into(),
            certificate: verify_power_identity(&lhs_c, &rhs_c, e + 1, true, budget)?,
        });
    }

    let found = square_root_representative_within(&ring, root_search_bound, budget)?;
    Ok(RootFamilyReport {
        fixture,
        qs: qs.to_vec(),
        certificates,
        elements,
        field_degree,
        root_search_bound,
        root_representative_found: found,
    })
}

/// Searches for a homogeneous pair (u, h), both of degree at most `bound`,
/// with z^2 u^2 = x y h^2 in the presentation. Squaring is
/// coefficient-linear in characteristic two, so each degree reduces to a
/// rank computation over the prime field; in a ring without zerodivisors
/// any nonzero kernel vector of the combined matrix has h != 0, and the
/// degrees of u and h must agree.
fn square_root_representative_within(
    ring: &Arc<RingContext>,
    bound: u64,
    budget: &GbBudget,
) -> Result<bool> {
    let qb = quotient_basis(ring, budget)?;
    let leads: Vec<Monomial> = qb
        .basis
        .iter()
        .filter_map(|g| g.leading_term().map(|(m, _)| m.clone()))
        .collect();
    let weights = vec![Ratio::from_integer(1); ring.nvars()];
    let z2 = parse_poly("z^2", ring)?;
    let xy = parse_poly("x*y", ring)?;
    for m in 0..=bound {
        let basis_m = standard_monomials(
            ring.nvars(),
            &weights,
            &leads,
            &DegTarget::Exact(Ratio::from_integer(m as i64)),
            ENUM_CAP,
            ring.p(),
        )?;
        if basis_m.is_empty() {
            continue;
        }
        let mut cols: Vec<Polynomial> = Vec::new();
        for factor in [&z2, &xy] {
            for mu in &basis_m {
                let sq = Polynomial::monomial(mu.clone(), ring).frobenius_power(1);
                cols.push(qb.normal_form(&factor.mul(&sq)?, budget)?);
            }
        }
        let mut row_ids: HashMap<Monomial, usize> = HashMap::new();
        for c in &cols {
            for (mon, _) in &c.terms {
                let next = row_ids.len();
                row_ids.entry(mon.clone()).or_insert(next);
            }
        }
        let field = &ring.field;
        let npar = ring.nparams();
        let nrows = row_ids.len().max(1);
        let mut rows = vec![vec![ParamFraction::zero(field, npar); cols.len()]; nrows];
        for (ci, c) in cols.iter().enumerate() {
            for (mon, coef) in &c.terms {
                rows[row_ids[mon]][ci] = coef.clone();
            }
        }
        if linalg::rank(&rows, field, npar) < cols.len() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Certified outcome of trivializing a top-degree class: over `ring`, the
/// transported class `eta` is the differential of `xi`, obtained by
/// adjoining componentwise roots of the additive polynomial
/// T^(p^e) + r_1 T^(p^(e-1)) + ... + r_e T matched against a coboundary
/// preimage of the corresponding combination of Frobenius iterates.
#[derive(Debug, Clone)]
pub struct TopTrivialization {
    /// Frobenius exponent e of the relation used; zero when the class was
    /// already a coboundary over the base ring.
    pub order: u32,
    /// Scalars r_1..r_e of the relation; all zero in the pure-power case.
    pub scalars: Vec<FieldScalar>,
    pub ring: Arc<RingContext>,
    pub complex: Arc<CechComplex>,
    /// The class transported to the extension.
    pub eta: Cochain,
    /// Preimage with differential equal to `eta` over the extension.
    pub xi: Cochain,
    pub report: GaloisTowerReport,
    /// Nilpotent numerators quotiented away for the final verification.
    pub reduced_relations: Vec<Polynomial>,
    /// Relations identifying an integral fraction with a fresh ring
    /// element, used when the additive relation has nonzero scalars.
    pub normalization_relations: Vec<Polynomial>,
    /// Class degrees of the iterates F^j(eta) for j = 0..=order;
    /// consecutive entries differ by a factor of p.
    pub degree_trace: Vec<Ratio<i64>>,
}

/// Makes a homogeneous top-degree class of nonnegative degree a coboundary
/// over a module-finite extension. For positive degree, some Frobenius
/// power of the class is itself a coboundary for degree reasons; in degree
/// zero a linear relation with scalar coefficients among the Frobenius
/// iterates is searched as well. Either way the matched preimage supplies
/// one additive-polynomial root adjunction per nonzero component, and the
/// resulting boundary identity is re-verified from scratch.
pub fn top_cohomology_trivialize(
    complex: &Arc<CechComplex>,
    class: &CohomologyClass,
    e_max: u32,
    solve: &SolveBudget,
    gb: &GbBudget,
) -> Result<TopTrivialization> {
    let ctx = &complex.ctx;
    let p = ctx.p();
    let n = complex.nelems();
    let c0 = &class.cochain;
    if c0.degree != n {
        return Err(Error::InvalidInput(
            "only top-degree classes admit this trivialization".into(),
        ));
    }
    let elem_degs = complex
        .elems
        .iter()
        .map(|e| e.homogeneous_degree())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::InvalidInput("the parameter elements must be homogeneous".into()))?;
    let den_deg: Ratio<i64> = elem_degs.iter().cloned().sum();
    let comp0 = complex.nf(&c0.comps[0])?;
    let class_deg = if comp0.is_zero() {
        Ratio::from_integer(0)
    } else {
        comp0
            .homogeneous_degree()
            .ok_or_else(|| Error::InvalidInput("the class must be homogeneous".into()))?
            - Ratio::from_integer(c0.trunc as i64) * den_deg
    };
    if class_deg < Ratio::from_integer(0) {
        return Err(Error::InvalidInput(
            "the trivialization applies to classes of nonnegative degree".into(),
        ));
    }
    let mut trace = vec![class_deg];
    if let CoboundaryOutcome::Found(xi) = complex.is_coboundary(c0, solve, gb)? {
        return finalize(
            complex.clone(),
            complex,
            c0,
            xi,
            0,
            Vec::new(),
            Vec::new(),
            Vec::new(),
            Vec::new(),
            trace,
            gb,
        );
    }
    let field = ctx.field.clone();
    let mut iters = vec![c0.clone()];
    for e in 1..=e_max {
        let next = complex.frobenius_on_cochain(iters.last().unwrap())?;
        // Degree bookkeeping: Frobenius multiplies the class degree by p.
        let nfc = complex.nf(&next.comps[0])?;
        let want = *trace.last().unwrap() * Ratio::from_integer(p as i64);
        if !nfc.is_zero() {
            let got = nfc.homogeneous_degree().ok_or_else(|| {
                Error::Verification(
                    "the Frobenius image of a homogeneous class must stay homogeneous".into(),
                )
            })? - Ratio::from_integer(next.trunc as i64) * den_deg;
            if got != want {
                return Err(Error::Verification(format!(
                    "Frobenius scaled the class degree to {got} instead of {want}"
                )));
            }
        }
        trace.push(want);
        iters.push(next);
        if let CoboundaryOutcome::Found(alpha) =
            complex.is_coboundary(&iters[e as usize], solve, gb)?
        {
            let rs = vec![field.zero(); e as usize];
            return descend(complex, c0, e, rs, alpha, trace, gb);
        }
        if class_deg == Ratio::from_integer(0) {
            let all = field.enumerate();
            let space = (all.len() as u128).saturating_pow(e);
            if space > SCALAR_SEARCH_CAP {
                return Err(Error::Budget(
                    "scalar relation search space exceeds the cap".into(),
                ));
            }
            let mut idx = vec![0usize; e as usize];
            'tuples: loop {
                let mut pos = 0;
                loop {
                    if pos == idx.len() {
                        break 'tuples;
                    }
                    idx[pos] += 1;
                    if idx[pos] < all.len() {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                let rs: Vec<FieldScalar> = idx.iter().map(|i| all[*i].clone()).collect();
                let mut combo = iters[e as usize].clone();
                for (j, r) in rs.iter().enumerate() {
                    if r.is_zero() {
                        continue;
                    }
                    let term = scale_cochain(&iters[e as usize - (j + 1)], r, ctx);
                    combo = complex.add(&combo, &term)?;
                }
                if let CoboundaryOutcome::Found(alpha) = complex.is_coboundary(&combo, solve, gb)? {
                    return descend(complex, c0, e, rs, alpha, trace, gb);
                }
            }
        }
    }
    Err(Error::Budget(format!(
        "no additive relation on the class within {e_max} Frobenius steps"
    )))
}

/// Multiplies every component by a scalar of the coefficient field.
fn scale_cochain(c: &Cochain, r: &FieldScalar, ctx: &Arc<RingContext>) -> Cochain {
    let pf = ParamFraction::from_scalar(r.clone(), &ctx.field, ctx.nparams());
    Cochain {
        degree: c.degree,
        trunc: c.trunc,
        comps: c.comps.iter().map(|f| f.mul_coef(&pf)).collect(),
    }
}

/// Builds the extension for a found relation. Each nonzero component of the
/// preimage `alpha` acquires a root of the denominator-twisted additive
/// polynomial (or reuses an in-ring p^e-th root in the pure case), the
/// resulting cochain is peeled off the class, and the leftover top
/// component is removed either as a visible nilpotent or by naming the
/// integral fraction it represents.
fn descend(
    complex: &Arc<CechComplex>,
    c0: &Cochain,
    e: u32,
    rs: Vec<FieldScalar>,
    alpha: Cochain,
    trace: Vec<Ratio<i64>>,
    gb: &GbBudget,
) -> Result<TopTrivialization> {
    let ctx = &complex.ctx;
    let p = ctx.p();
    let pe = p
        .checked_pow(e)
        .ok_or_else(|| Error::Budget("Frobenius exponent overflow".into()))?;
    let n = complex.nelems();
    let n0 = c0.trunc;
    let subs = complex.subsets(n - 1);
    let pure = rs.iter().all(|r| r.is_zero());
    let separable = rs.last().map(|r| !r.is_zero()).unwrap_or(false);

    let mut counter = 1usize;
    let mut roots: Vec<Option<Polynomial>> = Vec::with_capacity(subs.len());
    let mut adjoin: Vec<(usize, String, Polynomial, Option<Ratio<i64>>)> = Vec::new();
    for (si, _) in subs.iter().enumerate() {
        let a = complex.nf(&alpha.comps[si])?;
        if a.is_zero() {
            roots.push(Some(Polynomial::zero(ctx)));
            continue;
        }
        if pure {
            // An in-ring p^e-th root makes the adjunction unnecessary.
            let mut r = Some(a.clone());
            for _ in 0..e {
                r = r.and_then(|f| f.p_th_root_integral());
            }
            if let Some(root) = r {
                roots.push(Some(root));
                continue;
            }
        }
        let name = next_name(ctx, "u", &mut counter);
        let w = a
            .homogeneous_degree()
            .map(|d| d / Ratio::from_integer(pe as i64))
            .filter(|d| *d > Ratio::from_integer(0));
        adjoin.push((si, name, a, w));
        roots.push(None);
    }
    let kind = || {
        if separable {
            GaloisStepKind::ArtinSchreier { degree: pe }
        } else {
            GaloisStepKind::InseparableRoot { degree: pe }
        }
    };
    let mut steps: Vec<(String, GaloisStepKind)> =
        adjoin.iter().map(|(_, nm, _, _)| (nm.clone(), kind())).collect();

    let c2: Arc<CechComplex> = if adjoin.is_empty() {
        complex.clone()
    } else {
        let new_vars: Vec<(String, Option<Ratio<i64>>)> =
            adjoin.iter().map(|(_, nm, _, w)| (nm.clone(), *w)).collect();
        let nbase = ctx.nvars();
        let rs_c = rs.clone();
        grow(complex, &new_vars, gb, |bare, idmap| {
            let mut rels = Vec::new();
            for (k, (si, _, a, _)) in adjoin.iter().enumerate() {
                let u = Polynomial::var(nbase + k, bare);
                let mut rel = u.pow(pe)?;
                for (j, r) in rs_c.iter().enumerate() {
                    if r.is_zero() {
                        continue;
                    }
                    let pej = p.pow(e - (j as u32 + 1));
                    let mut den = Polynomial::one(bare);
                    let mut mask = subs[*si];
                    while mask != 0 {
                        let b = mask.trailing_zeros() as usize;
                        mask &= mask - 1;
                        den = den.mul(&complex.elems[b].transport(bare, idmap)?)?;
                    }
                    let twist = den.pow(
                        n0.checked_mul(pe - pej)
                            .ok_or_else(|| Error::Truncation("twist exponent overflow".into()))?,
                    )?;
                    let pf = ParamFraction::from_scalar(r.clone(), &bare.field, bare.nparams());
                    rel = rel.add(&u.pow(pej)?.mul(&twist)?.mul_coef(&pf))?;
                }
                rels.push(rel.sub(&a.transport(bare, idmap)?)?);
            }
            Ok(rels)
        })?
    };

    // The peeled cochain: in-ring roots where available, fresh symbols
    // elsewhere. Over the common denominators the defining relations say
    // exactly that the scalar combination of its Frobenius iterates is
    // alpha.
    let id0: Vec<usize> = (0..ctx.nvars()).collect();
    let mut beta_comps = Vec::with_capacity(subs.len());
    let mut next_new = 0usize;
    for r in &roots {
        match r {
            Some(f) => beta_comps.push(f.transport(&c2.ctx, &id0)?),
            None => {
                beta_comps.push(Polynomial::var(ctx.nvars() + next_new, &c2.ctx));
                next_new += 1;
            }
        }
    }
    let beta = c2.from_components(n - 1, n0, beta_comps)?;
    let eta2 = c2.import_cochain(c0, complex)?;
    let alpha2 = c2.import_cochain(&alpha, complex)?;

    let combo_beta = additive_combination(&c2, &beta, e, &rs)?;
    if !c2.eq_cochain(&combo_beta, &alpha2)? {
        return Err(Error::Verification(
            "adjoined roots do not satisfy their defining relations".into(),
        ));
    }

    let delta = c2.sub(&eta2, &c2.differential(&beta)?)?;
    let combo_delta = additive_combination(&c2, &delta, e, &rs)?;
    if !c2.is_zero_cochain(&combo_delta)? {
        return Err(Error::Verification(
            "the peeled class does not satisfy the additive relation".into(),
        ));
    }
    let leftover = c2.nf(&delta.comps[0])?;

    let mut reduced_relations = Vec::new();
    let mut normalization_relations = Vec::new();
    let id2: Vec<usize> = (0..c2.ctx.nvars()).collect();
    let (c3, xi) = if leftover.is_zero() {
        (c2.clone(), beta.clone())
    } else if pure {
        // F^e kills the leftover numerator, so it is nilpotent; pass to the
        // quotient by it before the final check.
        if !c2.nf(&leftover.pow(pe)?)?.is_zero() {
            return Err(Error::Verification(
                "the leftover numerator is not visibly nilpotent".into(),
            ));
        }
        let grown = grow(&c2, &[], gb, {
            let lf = leftover.clone();
            move |bare, idmap| Ok(vec![lf.transport(bare, idmap)?])
        })?;
        if grown.nf(&Polynomial::one(&grown.ctx))?.is_zero() {
            return Err(Error::Verification(
                "removing the nilpotent numerator collapsed the ring".into(),
            ));
        }
        reduced_relations.push(leftover.transport(&grown.ctx, &id2)?);
        let beta3 = grown.import_cochain(&beta, &c2)?;
        (grown, beta3)
    } else {
        // The leftover fraction is a root of the additive polynomial, hence
        // integral; name it and identify it with its numerator over the full
        // denominator, which turns the leftover into an explicit boundary.
        let mut cnt = 1usize;
        let name = next_name(&c2.ctx, "s", &mut cnt);
        let w = {
            let degs: Option<Vec<Ratio<i64>>> =
                c2.elems.iter().map(|f| f.homogeneous_degree()).collect();
            match (leftover.homogeneous_degree(), degs) {
                (Some(dl), Some(ds)) => {
                    let den: Ratio<i64> = ds.iter().cloned().sum();
                    let cand = dl - Ratio::from_integer(n0 as i64) * den;
                    (cand > Ratio::from_integer(0)).then_some(cand)
                }
                _ => None,
            }
        };
        let nb2 = c2.ctx.nvars();
        let grown = grow(&c2, &[(name.clone(), w)], gb, {
            let lf = leftover.clone();
            let c2c = c2.clone();
            move |bare, idmap| {
                let s = Polynomial::var(nb2, bare);
                let mut prod = Polynomial::one(bare);
                for el in &c2c.elems {
                    prod = prod.mul(&el.transport(bare, idmap)?)?;
                }
                let rel = s.mul(&prod.pow(n0)?)?.sub(&lf.transport(bare, idmap)?)?;
                Ok(vec![rel])
            }
        })?;
        if grown.nf(&Polynomial::one(&grown.ctx))?.is_zero() {
            return Err(Error::Verification(
                "identifying the integral fraction collapsed the ring".into(),
            ));
        }
        steps.push((name.clone(), kind()));
        let s_idx = grown
            .ctx
            .var_index(&name)
            .expect("the fresh symbol was just adjoined");
        let s = Polynomial::var(s_idx, &grown.ctx);
        let mut prod_all = Polynomial::one(&grown.ctx);
        for el in &grown.elems {
            prod_all = prod_all.mul(el)?;
        }
        normalization_relations
            .push(s.mul(&prod_all.pow(n0)?)?.sub(&leftover.transport(&grown.ctx, &id2)?)?);
        // The boundary witness: a single component s (x_T)^N at the subset
        // omitting the leading element.
        let full: u32 = (1u32 << n) - 1;
        let t_mask = full & !1u32;
        let ti = subs
            .iter()
            .position(|m| *m == t_mask)
            .expect("the subset omitting the leading element exists");
        let mut prod_t = Polynomial::one(&grown.ctx);
        let mut mask = t_mask;
        while mask != 0 {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            prod_t = prod_t.mul(&grown.elems[b])?;
        }
        let mut gcomps = vec![Polynomial::zero(&grown.ctx); subs.len()];
        gcomps[ti] = s.mul(&prod_t.pow(n0)?)?;
        let gamma = grown.from_components(n - 1, n0, gcomps)?;
        let beta3 = grown.import_cochain(&beta, &c2)?;
        let xi3 = grown.add(&beta3, &gamma)?;
        (grown, xi3)
    };

    finalize(
        c3,
        complex,
        c0,
        xi,
        e,
        rs,
        steps,
        reduced_relations,
        normalization_relations,
        trace,
        gb,
    )
}

/// F^e(c) + r_1 F^(e-1)(c) + ... + r_e c with truncations aligned.
fn additive_combination(
    complex: &CechComplex,
    c: &Cochain,
    e: u32,
    rs: &[FieldScalar],
) -> Result<Cochain> {
    let mut iter = vec![c.clone()];
    for _ in 0..e {
        let last = iter.last().unwrap();
        iter.push(complex.frobenius_on_cochain(last)?);
    }
    let mut combo = iter[e as usize].clone();
    for (j, r) in rs.iter().enumerate() {
        if r.is_zero() {
            continue;
        }
        let term = scale_cochain(&iter[e as usize - (j + 1)], r, &complex.ctx);
        combo = complex.add(&combo, &term)?;
    }
    Ok(combo)
}

/// Independent final check and report assembly: a fresh basis, a fresh
/// complex, and the boundary identity verified from scratch.
#[allow(clippy::too_many_arguments)]
fn finalize(
    current: Arc<CechComplex>,
    base: &Arc<CechComplex>,
    c0: &Cochain,
    xi: Cochain,
    order: u32,
    scalars: Vec<FieldScalar>,
    steps: Vec<(String, GaloisStepKind)>,
    reduced_relations: Vec<Polynomial>,
    normalization_relations: Vec<Polynomial>,
    degree_trace: Vec<Ratio<i64>>,
    gb: &GbBudget,
) -> Result<TopTrivialization> {
    let fresh = CechComplex::new(
        &current.ctx,
        current.elems.clone(),
        current.default_truncation,
        gb,
    )?;
    let eta = fresh.import_cochain(c0, base)?;
    let dxi = fresh.differential(&xi)?;
    if !fresh.eq_cochain(&dxi, &eta)? {
        return Err(Error::Verification(
            "final verification failed: the preimage does not bound the class".into(),
        ));
    }
    let generically_separable = steps
        .iter()
        .all(|(_, k)| !matches!(k, GaloisStepKind::InseparableRoot { .. }));
    Ok(TopTrivialization {
        order,
        scalars,
        ring: fresh.ctx.clone(),
        complex: fresh.clone(),
        eta,
        xi,
        report: GaloisTowerReport {
            steps,
            solvable_tower: true,
            generically_separable,
        },
        reduced_relations,
        normalization_relations,
        degree_trace,
    })
}

/// One computed graded piece of top local cohomology.
#[derive(Debug, Clone)]
pub struct GradedPiece {
    pub degree: i64,
    /// Truncation at which the piece was computed.
    pub truncation: u64,
    /// Dimension of the piece at that truncation: numerator classes modulo
    /// the boundaries of matching truncation.
    pub dimension: usize,
}

/// The subring of a polynomial ring generated by the product of all d
/// variables together with the d-th power of each variable, presented on
/// symbols U, V_1..V_d with every generator in degree one, together with
/// its top complex on V_1..V_d and computed graded pieces of top local
/// cohomology. Negative pieces stay nonzero; each reported piece comes
/// with the truncation it was computed at and, when nonzero, an explicit
/// cocycle outside the coboundary span.
#[derive(Debug, Clone)]
pub struct SplinterFixture {
    pub d: usize,
    pub ring: Arc<RingContext>,
    /// Defining relations of the presentation (installed on `ring`).
    pub kernel: Vec<Polynomial>,
    pub complex: Arc<CechComplex>,
    pub pieces: Vec<GradedPiece>,
    /// Witness cocycle for the first requested degree whose piece is
    /// nonzero.
    pub witness: Option<(i64, Cochain)>,
}

/// Builds the product-and-powers subring fixture for 1 <= d <= 3 and
/// computes the requested graded pieces of top local cohomology.
pub fn splinter_fixture(d: usize, degrees: &[i64], budget: &GbBudget) -> Result<SplinterFixture> {
    if d == 0 || d > 3 {
        return Err(Error::InvalidInput(
            "the product-and-powers fixture is provided for 1 <= d <= 3".into(),
        ));
    }
    let field = FieldSpec::prime(2)?;
    let xnames: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    let ambient = RingContext::new(field, xnames, None, vec![], OrderSpec::GrevLex)?;
    let mut prod = Polynomial::one(&ambient);
    for i in 0..d {
        prod = prod.mul(&Polynomial::var(i, &ambient))?;
    }
    let mut images = vec![prod];
    for i in 0..d {
        images.push(Polynomial::var(i, &ambient).pow(d as u64)?);
    }
    let mut names = vec!["U".to_string()];
    for i in 1..=d {
        names.push(format!("V{i}"));
    }
    let weights = Some(vec![Ratio::from_integer(1); d + 1]);
    let (presentation, kernel) = kernel_of_ring_map(&ambient, &names, &images, weights, budget)?;
    for k in &kernel {
        if !substitute(k, &images, &ambient)?.is_zero() {
            return Err(Error::Verification(format!(
                "kernel generator {} does not substitute to zero",
                k.print()
            )));
        }
    }
    let ring = presentation.with_relations(kernel.clone())?;
    let elems: Vec<Polynomial> = (1..=d).map(|i| Polynomial::var(i, &ring)).collect();
    let complex = CechComplex::new(&ring, elems, 1, budget)?;
    let mut pieces = Vec::new();
    let mut witness = None;
    for &deg in degrees {
        let (trunc, dim, w) = graded_piece(&complex, deg)?;
        if witness.is_none() {
            if let Some(c) = w {
                witness = Some((deg, c));
            }
        }
        pieces.push(GradedPiece { degree: deg, truncation: trunc, dimension: dim });
    }
    Ok(SplinterFixture { d, ring, kernel, complex, pieces, witness })
}

/// Dimension of the degree-`class_deg` piece of top cohomology at the
/// smallest truncation exposing it, with a cocycle outside the coboundary
/// span whenever the piece is nonzero.
fn graded_piece(
    complex: &Arc<CechComplex>,
    class_deg: i64,
) -> Result<(u64, usize, Option<Cochain>)> {
    let ctx = &complex.ctx;
    let p = ctx.p();
    let d = complex.nelems();
    let weights: Vec<Ratio<i64>> = match ctx.weight_slice() {
        Some(w) => w.to_vec(),
        None => vec![Ratio::from_integer(1); ctx.nvars()],
    };
    let elem_degs = complex
        .elems
        .iter()
        .map(|f| f.homogeneous_degree())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::InvalidInput("homogeneous parameter elements are required".into()))?;
    let den: Ratio<i64> = elem_degs.iter().cloned().sum();
    let cd = Ratio::from_integer(class_deg);
    let mut trunc = 1u64;
    while cd + Ratio::from_integer(trunc as i64) * den < Ratio::from_integer(0) {
        trunc += 1;
    }
    let leads: Vec<Monomial> = complex
        .gb()
        .basis
        .iter()
        .filter_map(|g| g.leading_term().map(|(m, _)| m.clone()))
        .collect();
    let target = cd + Ratio::from_integer(trunc as i64) * den;
    let cands = standard_monomials(
        ctx.nvars(),
        &weights,
        &leads,
        &DegTarget::Exact(target),
        ENUM_CAP,
        p,
    )?;
    if cands.is_empty() {
        return Ok((trunc, 0, None));
    }
    let mut row_ids: HashMap<Monomial, usize> = HashMap::new();
    for m in &cands {
        let next = row_ids.len();
        row_ids.entry(m.clone()).or_insert(next);
    }
    let full: u32 = (1u32 << d) - 1;
    let mut images: Vec<Polynomial> = Vec::new();
    for s in complex.subsets(d - 1) {
        let k = (full ^ s).trailing_zeros() as usize;
        let sdeg = cd + Ratio::from_integer(trunc as i64) * (den - elem_degs[k]);
        if sdeg < Ratio::from_integer(0) {
            continue;
        }
        let bc = standard_monomials(
            ctx.nvars(),
            &weights,
            &leads,
            &DegTarget::Exact(sdeg),
            ENUM_CAP,
            p,
        )?;
        let xk = complex.elems[k].pow(trunc)?;
        for b in bc {
            images.push(complex.nf(&Polynomial::monomial(b, ctx).mul(&xk)?)?);
        }
    }
    for im in &images {
        for (m, _) in &im.terms {
            let next = row_ids.len();
            row_ids.entry(m.clone()).or_insert(next);
        }
    }
    let field = &ctx.field;
    let npar = ctx.nparams();
    let ncols = row_ids.len();
    let rows: Vec<Vec<ParamFraction>> = images
        .iter()
        .map(|im| {
            let mut v = vec![ParamFraction::zero(field, npar); ncols];
            for (m, c) in &im.terms {
                v[row_ids[m]] = c.clone();
            }
            v
        })
        .collect();
    let rk = if rows.is_empty() { 0 } else { linalg::rank(&rows, field, npar) };
    let dim = cands.len() - rk;
    let mut witness = None;
    if dim > 0 {
        for m in &cands {
            let mut v = vec![ParamFraction::zero(field, npar); ncols];
            v[row_ids[m]] = ParamFraction::one(field, npar);
            let inside =
                !rows.is_empty() && linalg::in_span(&rows, &v, field, npar).is_some();
            if !inside {
                let comp = Polynomial::monomial(m.clone(), ctx);
                witness = Some(Cochain { degree: d, trunc, comps: vec![comp] });
                break;
            }
        }
    }
    Ok((trunc, dim, witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::{buchberger, ideal_equal};

    fn gbb() -> GbBudget {
        GbBudget::default()
    }

    fn slv() -> SolveBudget {
        SolveBudget::default()
    }

    fn free_ctx(p: u64, vars: &[&str]) -> Arc<RingContext> {
        RingContext::new(
            FieldSpec::prime(p).unwrap(),
            vars.iter().map(|s| s.to_string()).collect(),
            None,
            vec![],
            OrderSpec::GrevLex,
        )
        .unwrap()
    }

    fn fermat_ctx() -> Arc<RingContext> {
        let free = free_ctx(2, &["x", "y", "z"]);
        let rel = parse_poly("x^3 + y^3 + z^3", &free).unwrap();
        free.with_relations(vec![rel]).unwrap()
    }

    fn pp(s: &str, ctx: &Arc<RingContext>) -> Polynomial {
        parse_poly(s, ctx).unwrap()
    }

    fn one() -> Ratio<i64> {
        Ratio::from_integer(1)
    }

    #[test]
    fn free_base_gives_a_relation_free_presentation() {
        let base = free_ctx(2, &["x"]);
        let fx = rees_presentation(
            &base,
            &[pp("x", &base)],
            &["X".into()],
            Some(vec![one(); 2]),
            &gbb(),
        )
        .unwrap();
        // x and x t are algebraically independent, so the presentation on
        // (x, X) is free.
        assert!(fx.kernel.is_empty());
        assert_eq!(fx.ring.nvars(), 2);
        assert!(fx.ring.relations.is_empty());
    }

    #[test]
    fn plane_blowup_kernel_is_the_single_graph_binomial() {
        let base = free_ctx(2, &["x", "y"]);
        let gens = vec![pp("x", &base), pp("y", &base)];
        let fx = rees_presentation(
            &base,
            &gens,
            &["X".into(), "Y".into()],
            Some(vec![one(); 4]),
            &gbb(),
        )
        .unwrap();
        assert!(!fx.kernel.is_empty());
        let amb = fx.kernel[0].ctx.clone();
        let expected = buchberger(&[pp("y*X + x*Y", &amb)], &amb, &gbb(), false).unwrap();
        let got = buchberger(&fx.kernel, &amb, &gbb(), false).unwrap();
        assert!(ideal_equal(&got, &expected));
    }

    #[test]
    fn plane_blowup_dimensions_match_the_ambient_count() {
        let base = free_ctx(2, &["x", "y"]);
        let gens = vec![pp("x", &base), pp("y", &base)];
        let fx = rees_presentation(
            &base,
            &gens,
            &["X".into(), "Y".into()],
            Some(vec![one(); 4]),
            &gbb(),
        )
        .unwrap();
        let qb = quotient_basis(&fx.ring, &gbb()).unwrap();
        let leads: Vec<Monomial> = qb
            .basis
            .iter()
            .filter_map(|g| g.leading_term().map(|(m, _)| m.clone()))
            .collect();
        let w = vec![one(); 4];
        // Inside k[x, y, t] the subalgebra is spanned in degree n by the
        // monomials x^a y^b t^c with a + b = n and c <= n: (n+1)^2 of them.
        for n in 0i64..=6 {
            let ms = standard_monomials(
                4,
                &w,
                &leads,
                &DegTarget::Exact(Ratio::from_integer(n)),
                ENUM_CAP,
                2,
            )
            .unwrap();
            assert_eq!(ms.len() as i64, (n + 1) * (n + 1), "degree {n}");
        }
    }

    #[test]
    fn presentation_symbols_must_be_fresh() {
        let base = free_ctx(2, &["x"]);
        assert!(rees_presentation(&base, &[pp("x", &base)], &["x".into()], None, &gbb()).is_err());
    }

    #[test]
    fn cubic_cone_blowup_keeps_the_grading_and_graph_relations() {
        let base = fermat_ctx();
        let gens: Vec<Polynomial> = (0..3).map(|i| Polynomial::var(i, &base)).collect();
        let fx = rees_presentation(
            &base,
            &gens,
            &["X".into(), "Y".into(), "Z".into()],
            Some(vec![one(); 6]),
            &gbb(),
        )
        .unwrap();
        assert!(fx.ring.is_graded());
        assert!(fx.kernel.len() >= 2);
        let qb = quotient_basis(&fx.ring, &gbb()).unwrap();
        for s in ["y*X + x*Y", "z*X + x*Z", "z*Y + y*Z", "x^3 + y^3 + z^3"] {
            let r = pp(s, &fx.ring);
            assert!(
                qb.normal_form(&r, &gbb()).unwrap().is_zero(),
                "{s} should vanish in the presentation"
            );
        }
    }

    #[test]
    fn power_identity_certifies_the_square_root_expansion() {
        let base = fermat_ctx();
        let lhs = pp("z^2", &base);
        let half = PExp::new(2, 1, 1);
        let three_half = PExp::new(2, 3, 1);
        let rhs = frac_monomial(&base, &[(0, three_half), (2, half)])
            .add(&frac_monomial(&base, &[(1, three_half), (2, half)]))
            .unwrap();
        let cert = verify_power_identity(&lhs, &rhs, 1, true, &gbb()).unwrap();
        assert!(cert.reduced.is_zero());
        assert!(cert.power_difference.has_integer_exponents());
        assert!(cert.reverify(&gbb()).unwrap());
    }

    #[test]
    fn power_identity_rejects_an_unequal_pair() {
        let base = fermat_ctx();
        let lhs = pp("z^2", &base);
        let half = PExp::new(2, 1, 1);
        let three_half = PExp::new(2, 3, 1);
        let rhs = frac_monomial(&base, &[(0, three_half), (2, half)]);
        match verify_power_identity(&lhs, &rhs, 1, true, &gbb()) {
            Err(Error::Verification(_)) => {}
            other => panic!("expected a verification error, got {other:?}"),
        }
    }

    #[test]
    fn power_identity_requires_enough_frobenius_applications() {
        let base = fermat_ctx();
        let lhs = pp("z^2", &base);
        let half = PExp::new(2, 1, 1);
        let three_half = PExp::new(2, 3, 1);
        let rhs = frac_monomial(&base, &[(0, three_half), (2, half)]);
        match verify_power_identity(&lhs, &rhs, 0, true, &gbb()) {
            Err(Error::InvalidInput(_)) => {}
            other => panic!("expected an input error, got {other:?}"),
        }
    }

    #[test]
    fn root_family_certifies_every_stage() {
        let rep = verify_root_family(&[1, 2, 4], 1, 4, &gbb()).unwrap();
        // One seed certificate, one degenerate stage, two per honest stage.
        assert_eq!(rep.certificates.len(), 6);
        for c in &rep.certificates {
            assert!(c.certificate.reduced.is_zero(), "stage {} {}", c.q, c.label);
        }
        assert_eq!(rep.elements.len(), 3);
        for (_, els) in &rep.elements {
            assert_eq!(els.len(), 6);
        }
        assert!(rep
            .certificates
            .iter()
            .any(|c| c.q == 4 && c.certificate.level == 3));
        assert!(!rep.root_representative_found);
    }

    #[test]
    fn root_family_rejects_stages_that_are_not_two_powers() {
        assert!(verify_root_family(&[3], 1, 2, &gbb()).is_err());
    }

    #[test]
    fn top_class_on_the_cubic_cone_trivializes_at_order_one() {
        let ctx = fermat_ctx();
        let complex =
            CechComplex::new(&ctx, vec![pp("x", &ctx), pp("y", &ctx)], 1, &gbb()).unwrap();
        let eta = complex.from_components(2, 1, vec![pp("z^2", &ctx)]).unwrap();
        let class = complex.cohomology_class(eta).unwrap();
        let out = top_cohomology_trivialize(&complex, &class, 3, &slv(), &gbb()).unwrap();
        assert_eq!(out.order, 1);
        assert!(out.scalars.iter().all(|r| r.is_zero()));
        // The preimage components are square roots of y z and x z, neither
        // of which exists in the cone itself.
        assert_eq!(out.report.steps.len(), 2);
        assert!(out
            .report
            .steps
            .iter()
            .all(|(_, k)| matches!(k, GaloisStepKind::InseparableRoot { degree: 2 })));
        assert!(!out.report.generically_separable);
        assert!(out.report.solvable_tower);
        assert_eq!(out.reduced_relations.len(), 1);
        assert!(out.normalization_relations.is_empty());
        assert_eq!(out.degree_trace, vec![Ratio::from_integer(0); 2]);
        let dxi = out.complex.differential(&out.xi).unwrap();
        assert!(out.complex.eq_cochain(&dxi, &out.eta).unwrap());
    }

    #[test]
    fn positive_degree_class_on_the_cubic_cone_bounds_in_the_ring() {
        // z^3 = x * x^2 + y * y^2 via the defining relation, so the class
        // dies without any extension.
        let ctx = fermat_ctx();
        let complex =
            CechComplex::new(&ctx, vec![pp("x", &ctx), pp("y", &ctx)], 1, &gbb()).unwrap();
        let eta = complex.from_components(2, 1, vec![pp("z^3", &ctx)]).unwrap();
        let class = complex.cohomology_class(eta).unwrap();
        let out = top_cohomology_trivialize(&complex, &class, 3, &slv(), &gbb()).unwrap();
        assert_eq!(out.order, 0);
        assert!(out.report.steps.is_empty());
        assert_eq!(out.degree_trace, vec![Ratio::from_integer(1)]);
        let dxi = out.complex.differential(&out.xi).unwrap();
        assert!(out.complex.eq_cochain(&dxi, &out.eta).unwrap());
    }

    #[test]
    fn quintic_cone_class_of_degree_one_needs_one_frobenius() {
        // On k[x,y,z]/(x^5 + y^5 + z^5) the numerator z^3 is not in (x, y),
        // but its square z^6 = x^2 (x^3 z) + y^2 (y^3 z) is in the bracket
        // power, so the class trivializes at order one with an honest
        // doubling of the class degree.
        let free = free_ctx(2, &["x", "y", "z"]);
        let ctx = free
            .with_relations(vec![pp("x^5 + y^5 + z^5", &free)])
            .unwrap();
        let complex =
            CechComplex::new(&ctx, vec![pp("x", &ctx), pp("y", &ctx)], 1, &gbb()).unwrap();
        let eta = complex.from_components(2, 1, vec![pp("z^3", &ctx)]).unwrap();
        let class = complex.cohomology_class(eta).unwrap();
        let out = top_cohomology_trivialize(&complex, &class, 3, &slv(), &gbb()).unwrap();
        assert_eq!(out.order, 1);
        assert!(out.scalars.iter().all(|r| r.is_zero()));
        assert_eq!(out.report.steps.len(), 2);
        assert!(out
            .report
            .steps
            .iter()
            .all(|(_, k)| matches!(k, GaloisStepKind::InseparableRoot { degree: 2 })));
        assert_eq!(out.reduced_relations.len(), 1);
        assert!(out.normalization_relations.is_empty());
        assert_eq!(
            out.degree_trace,
            vec![Ratio::from_integer(1), Ratio::from_integer(2)]
        );
        let dxi = out.complex.differential(&out.xi).unwrap();
        assert!(out.complex.eq_cochain(&dxi, &out.eta).unwrap());
    }

    #[test]
    fn immediate_coboundary_needs_no_extension() {
        let ctx = free_ctx(2, &["x", "y"]);
        let complex =
            CechComplex::new(&ctx, vec![pp("x", &ctx), pp("y", &ctx)], 1, &gbb()).unwrap();
        let eta = complex.from_components(2, 1, vec![pp("x*y", &ctx)]).unwrap();
        let class = complex.cohomology_class(eta).unwrap();
        let out = top_cohomology_trivialize(&complex, &class, 2, &slv(), &gbb()).unwrap();
        assert_eq!(out.order, 0);
        assert!(out.report.steps.is_empty());
        assert!(out.scalars.is_empty());
        assert_eq!(out.ring.nvars(), 2);
        assert_eq!(out.degree_trace.len(), 1);
        let dxi = out.complex.differential(&out.xi).unwrap();
        assert!(out.complex.eq_cochain(&dxi, &out.eta).unwrap());
    }

    #[test]
    fn degree_zero_class_with_scalar_relation_normalizes_the_fraction() {
        // In k[x, u]/(u^2 - u x) the fraction u/x is idempotent: Frobenius
        // fixes its class, so F[c] + [c] = 0 with the nonzero scalar 1, and
        // the class only trivializes by naming the fraction itself.
        let free = free_ctx(2, &["x", "u"]);
        let ctx = free.with_relations(vec![pp("u^2 + u*x", &free)]).unwrap();
        let complex = CechComplex::new(&ctx, vec![pp("x", &ctx)], 1, &gbb()).unwrap();
        let eta = complex.from_components(1, 1, vec![pp("u", &ctx)]).unwrap();
        let class = complex.cohomology_class(eta).unwrap();
        let out = top_cohomology_trivialize(&complex, &class, 2, &slv(), &gbb()).unwrap();
        assert_eq!(out.order, 1);
        assert_eq!(out.scalars.len(), 1);
        assert!(out.scalars[0].is_one());
        assert_eq!(out.report.steps.len(), 1);
        assert!(matches!(
            out.report.steps[0].1,
            GaloisStepKind::ArtinSchreier { degree: 2 }
        ));
        assert!(out.report.generically_separable);
        assert_eq!(out.normalization_relations.len(), 1);
        assert!(out.reduced_relations.is_empty());
        assert_eq!(out.ring.nvars(), 3);
        let dxi = out.complex.differential(&out.xi).unwrap();
        assert!(out.complex.eq_cochain(&dxi, &out.eta).unwrap());
    }

    #[test]
    fn negative_degree_classes_are_rejected() {
        let ctx = fermat_ctx();
        let complex =
            CechComplex::new(&ctx, vec![pp("x", &ctx), pp("y", &ctx)], 1, &gbb()).unwrap();
        let eta = complex.from_components(2, 1, vec![pp("z", &ctx)]).unwrap();
        let class = complex.cohomology_class(eta).unwrap();
        match top_cohomology_trivialize(&complex, &class, 2, &slv(), &gbb()) {
            Err(Error::InvalidInput(_)) => {}
            other => panic!("expected an input error, got {other:?}"),
        }
    }

    #[test]
    fn zero_frobenius_budget_is_a_budget_error() {
        let free = free_ctx(2, &["x", "u"]);
        let ctx = free.with_relations(vec![pp("u^2 + u*x", &free)]).unwrap();
        let complex = CechComplex::new(&ctx, vec![pp("x", &ctx)], 1, &gbb()).unwrap();
        let eta = complex.from_components(1, 1, vec![pp("u", &ctx)]).unwrap();
        let class = complex.cohomology_class(eta).unwrap();
        let err = top_cohomology_trivialize(&complex, &class, 0, &slv(), &gbb()).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn product_and_powers_fixture_has_the_expected_negative_pieces() {
        let fx = splinter_fixture(2, &[-1, -2, 0], &gbb()).unwrap();
        assert_eq!(fx.kernel.len(), 1);
        let amb = fx.kernel[0].ctx.clone();
        let expected = buchberger(&[pp("U^2 + V1*V2", &amb)], &amb, &gbb(), false).unwrap();
        let got = buchberger(&fx.kernel, &amb, &gbb(), false).unwrap();
        assert!(ideal_equal(&got, &expected));
        let by_deg: HashMap<i64, usize> =
            fx.pieces.iter().map(|p| (p.degree, p.dimension)).collect();
        assert!(by_deg[&-1] >= 1);
        assert!(by_deg[&-2] >= 1);
        assert_eq!(by_deg[&0], 0);
        let (wd, w) = fx.witness.as_ref().unwrap();
        assert_eq!(*wd, -1);
        assert_eq!(w.degree, 2);
        // The witness class is the product generator over V1 V2, the
        // classical residue representative.
        assert_eq!(fx.complex.nf(&w.comps[0]).unwrap(), pp("U", &fx.ring));
    }

    #[test]
    fn triple_product_fixture_sees_the_lowest_negative_piece() {
        let fx = splinter_fixture(3, &[-1], &gbb()).unwrap();
        assert_eq!(fx.pieces.len(), 1);
        assert_eq!(fx.pieces[0].dimension, 1);
        assert!(fx.witness.is_some());
    }

    #[test]
    fn degenerate_single_variable_fixture_reports_the_residue_piece() {
        let fx = splinter_fixture(1, &[-1], &gbb()).unwrap();
        assert_eq!(fx.pieces[0].dimension, 1);
        let (_, w) = fx.witness.as_ref().unwrap();
        assert!(fx.complex.nf(&w.comps[0]).unwrap().is_one());
    }

    #[test]
    fn presentation_dimensions_match_the_semigroup_count() {
        fn semigroup_dimension(d: usize, m: usize) -> usize {
            fn fill(
                i: usize,
                left: u64,
                comp: &mut Vec<u64>,
                k: u64,
                d: u64,
                seen: &mut std::collections::HashSet<Vec<u64>>,
            ) {
                if i + 1 == comp.len() {
                    comp[i] = left;
                    let v: Vec<u64> = comp.iter().map(|c| k + d * c).collect();
                    seen.insert(v);
                    return;
                }
                for c in 0..=left {
                    comp[i] = c;
                    fill(i + 1, left - c, comp, k, d, seen);
                }
            }
            let mut seen = std::collections::HashSet::new();
            let mut comp = vec![0u64; d];
            for k in 0..=m as u64 {
                fill(0, m as u64 - k, &mut comp, k, d as u64, &mut seen);
            }
            seen.len()
        }
        for d in 1..=3usize {
            let fx = splinter_fixture(d, &[], &gbb()).unwrap();
            let leads: Vec<Monomial> = fx
                .complex
                .gb()
                .basis
                .iter()
                .filter_map(|g| g.leading_term().map(|(m, _)| m.clone()))
                .collect();
            let w = vec![one(); d + 1];
            for m in 0..=6usize {
                let ms = standard_monomials(
                    d + 1,
                    &w,
                    &leads,
                    &DegTarget::Exact(Ratio::from_integer(m as i64)),
                    ENUM_CAP,
                    2,
                )
                .unwrap();
                assert_eq!(ms.len(), semigroup_dimension(d, m), "d = {d}, degree {m}");
            }
        }
    }
}
