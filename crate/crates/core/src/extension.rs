//! Finite ring extensions presented by towers of monic relations.
//!
//! An extension adjoins generators `g_0, g_1, ...` to a quotient ring, one
//! at a time. Each generator carries a single monic relation
//! `g_i^d = rhs_i` where `rhs_i` may involve the base ring, all earlier
//! generators, and `g_i` itself only with exponents below `d`. That
//! triangular shape makes the rewriting system terminate: reducing a power
//! of `g_i` strictly lowers its exponent, and lower-index generators are
//! handled afterwards.
//!
//! Elements are kept as sums of tower monomials with base-ring polynomial
//! coefficients. Normal forms rewrite all generator exponents below their
//! relation degrees and reduce every coefficient modulo the base ring's
//! relation ideal, so an element is zero in the extension exactly when its
//! normal form has no terms. The zero test is sound for deciding the
//! certificate identities produced elsewhere in this crate: those are
//! stated as equalities in the presented ring itself.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use smallvec::SmallVec;

use crate::budget::GbBudget;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::groebner::{quotient_basis, GroebnerBasis};
use crate::poly::Polynomial;
use crate::ring::RingContext;

static NEXT_EXT_ID: AtomicU64 = AtomicU64::new(1);

pub type TowerExps = SmallVec<[u64; 4]>;

/// How a tower step sits in the Galois-theoretic catalogue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GaloisStepKind {
    /// `g^n = 1`.
    RootOfUnity { n: u64 },
    /// `g^d = r` with d prime to the characteristic (Kummer step).
    Radical { degree: u64 },
    /// Root of an additive polynomial with nonzero linear part, e.g.
    /// `g^p = b - a*g`; generically separable.
    ArtinSchreier { degree: u64 },
    /// `g^(p^e) = r` with no lower terms; purely inseparable.
    InseparableRoot { degree: u64 },
}

#[derive(Debug, Clone)]
pub struct TowerGen {
    pub name: String,
    /// Exponent of the monic relation `g^degree = rhs`.
    pub degree: u64,
    /// Right-hand side of the relation; may mention `g` itself only with
    /// exponents strictly below `degree`.
    pub rhs: ExtElem,
    pub kind: GaloisStepKind,
}

/// A tower of monic extensions over a quotient ring.
#[derive(Debug)]
pub struct PresentedExtension {
    pub base: Arc<RingContext>,
    pub gens: Vec<TowerGen>,
    base_gb: Arc<GroebnerBasis>,
    id: u64,
}

/// An element of a [`PresentedExtension`]: tower monomials with base-ring
/// coefficients. Exponent vectors shorter than the current tower are
/// implicitly padded with zeros, so elements of a smaller tower can be
/// used directly in any extension of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtElem {
    pub terms: Vec<(TowerExps, Polynomial)>,
}

fn is_p_power(n: u64, p: u64) -> bool {
    let mut d = n;
    while d > 1 && d % p == 0 {
        d /= p;
    }
    d == 1
}

fn tower_cmp(a: &[u64], b: &[u64]) -> std::cmp::Ordering {
    // top generator is most significant
    let n = a.len().max(b.len());
    for i in (0..n).rev() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        match x.cmp(&y) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

impl ExtElem {
    pub fn zero() -> Self {
        ExtElem { terms: Vec::new() }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        if p.is_zero() {
            return Self::zero();
        }
        ExtElem { terms: vec![(SmallVec::new(), p)] }
    }

    pub fn is_zero_raw(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of a tower monomial (zero polynomial if absent).
    pub fn coefficient_of(&self, exps: &[u64], ctx: &Arc<RingContext>) -> Polynomial {
        for (e, c) in &self.terms {
            if tower_cmp(e, exps) == std::cmp::Ordering::Equal {
                return c.clone();
            }
        }
        Polynomial::zero(ctx)
    }

    fn combine(terms: Vec<(TowerExps, Polynomial)>) -> Result<Self> {
        let mut sorted = terms;
        sorted.sort_by(|a, b| tower_cmp(&b.0, &a.0));
        let mut out: Vec<(TowerExps, Polynomial)> = Vec::with_capacity(sorted.len());
        for (e, c) in sorted {
            match out.last_mut() {
                Some((pe, pc)) if tower_cmp(pe, &e) == std::cmp::Ordering::Equal => {
                    *pc = pc.add(&c)?;
                }
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Ok(ExtElem { terms: out })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::combine(terms)
    }

    pub fn neg(&self) -> Self {
        ExtElem {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let n = ea.len().max(eb.len());
                let mut e: TowerExps = SmallVec::with_capacity(n);
                for i in 0..n {
                    let x = ea.get(i).copied().unwrap_or(0);
                    let y = eb.get(i).copied().unwrap_or(0);
                    e.push(x.checked_add(y).ok_or_else(|| {
                        Error::InvalidInput("tower exponent overflow".into())
                    })?);
                }
                terms.push((e, ca.mul(cb)?));
            }
        }
        Self::combine(terms)
    }

    pub fn mul_poly(&self, p: &Polynomial) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            terms.push((e.clone(), c.mul(p)?));
        }
        Self::combine(terms)
    }

    /// `self^n` for positive `n`; the zeroth power would need a base ring
    /// to build 1 in, so it is rejected.
    pub fn pow(&self, mut n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput(
                "zeroth power of a tower element is context-dependent".into(),
            ));
        }
        let mut base = self.clone();
        let mut acc: Option<Self> = None;
        while n > 0 {
            if n & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?,
                });
            }
            if n > 1 {
                base = base.mul(&base)?;
            }
            n >>= 1;
        }
        Ok(acc.expect("positive exponent yields a factor"))
    }

    /// The e-th Frobenius power, termwise: tower exponents scale by p^e
    /// and coefficients take their own Frobenius power.
    pub fn frobenius_power(&self, e: u32, p: u64) -> Result<Self> {
        if e == 0 {
            return Ok(self.clone());
        }
        let mut q: u64 = 1;
        for _ in 0..e {
            q = q
                .checked_mul(p)
                .ok_or_else(|| Error::InvalidInput("Frobenius exponent overflow".into()))?;
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (exps, c) in &self.terms {
            let mut scaled: TowerExps = SmallVec::with_capacity(exps.len());
            for x in exps {
                scaled.push(x.checked_mul(q).ok_or_else(|| {
                    Error::InvalidInput("tower exponent overflow".into())
                })?);
            }
            terms.push((scaled, c.frobenius_power(e)));
        }
        Self::combine(terms)
    }
}

impl PresentedExtension {
    /// The trivial tower: the quotient ring itself, with its relation
    /// basis precomputed for coefficient normal forms.
    pub fn trivial(base: &Arc<RingContext>, budget: &GbBudget) -> Result<Arc<Self>> {
        let base_gb = Arc::new(quotient_basis(base, budget)?);
        Ok(Arc::new(PresentedExtension {
            base: base.clone(),
            gens: Vec::new(),
            base_gb,
            id: NEXT_EXT_ID.fetch_add(1, AtomicOrdering::Relaxed),
        }))
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.base.field
    }

    pub fn one(&self) -> ExtElem {
        ExtElem::from_poly(Polynomial::one(&self.base))
    }

    /// The i-th tower generator as an element.
    pub fn gen_elem(&self, i: usize) -> ExtElem {
        let mut exps: TowerExps = SmallVec::from_elem(0, i + 1);
        exps[i] = 1;
        ExtElem { terms: vec![(exps, Polynomial::one(&self.base))] }
    }

    pub fn gen_named(&self, name: &str) -> Option<ExtElem> {
        self.gens
            .iter()
            .position(|g| g.name == name)
            .map(|i| self.gen_elem(i))
    }

    fn validate_new_name(&self, name: &str) -> Result<()> {
        let clash = self.gens.iter().any(|g| g.name == name)
            || self.base.vars.iter().any(|v| v == name)
            || self.base.params.iter().any(|v| v == name)
            || self.base.field.generator.as_deref() == Some(name);
        if clash {
            return Err(Error::InvalidInput(format!(
                "generator name {name:?} collides with an existing symbol"
            )));
        }
        Ok(())
    }

    fn validate_rhs(&self, rhs: &ExtElem, new_index: usize, degree: u64) -> Result<()> {
        for (e, c) in &rhs.terms {
            if !c.ctx_is(&self.base) {
                return Err(Error::ContextMismatch(
                    "relation coefficient from another base ring".into(),
                ));
            }
            if e.len() > new_index + 1 {
                return Err(Error::InvalidInput(
                    "relation mentions generators above the one being adjoined".into(),
                ));
            }
            if e.get(new_index).copied().unwrap_or(0) >= degree {
                return Err(Error::InvalidInput(
                    "relation right-hand side must stay below the relation degree".into(),
                ));
            }
        }
        Ok(())
    }

    /// Adjoins `name` with the relation `name^degree = rhs`, where `rhs`
    /// lives in the current tower. The step kind is derived from the shape:
    /// a p-power degree gives an inseparable root, a degree prime to p a
    /// Kummer radical (or root of unity when `rhs` is 1).
    pub fn adjoin_root(
        self: &Arc<Self>,
        name: &str,
        degree: u64,
        rhs: &ExtElem,
    ) -> Result<Arc<Self>> {
        if degree < 2 {
            return Err(Error::InvalidInput("relation degree must be at least 2".into()));
        }
        self.validate_new_name(name)?;
        let new_index = self.gens.len();
        self.validate_rhs(rhs, new_index, degree)?;
        let p = self.base.p();
        let kind = if degree % p == 0 {
            let mut d = degree;
            while d % p == 0 {
                d /= p;
            }
            if d == 1 {
                GaloisStepKind::InseparableRoot { degree }
            } else {
                // mixed degree: treat as a radical of the p-free part
                // composed with inseparable roots; report the raw degree
                GaloisStepKind::Radical { degree }
            }
        } else if rhs.terms.len() == 1
            && rhs.terms[0].0.iter().all(|e| *e == 0)
            && rhs.terms[0].1.is_one()
        {
            GaloisStepKind::RootOfUnity { n: degree }
        } else {
            GaloisStepKind::Radical { degree }
        };
        self.push_gen(TowerGen { name: name.to_string(), degree, rhs: rhs.clone(), kind })
    }

    /// Adjoins `name` with the Artin-Schreier relation
    /// `name^p + a*name - b = 0`. When `a` is zero this degenerates to a
    /// purely inseparable p-th root of `b`.
    pub fn adjoin_artin_schreier(
        self: &Arc<Self>,
        name: &str,
        a: &ExtElem,
        b: &ExtElem,
    ) -> Result<Arc<Self>> {
        self.adjoin_additive_root(name, self.base.p(), a, b)
    }

    /// Adjoins a root of `T^q + a*T - b` with `q` a power of p: the
    /// relation stored is `name^q = b - a*name`.
    pub fn adjoin_additive_root(
        self: &Arc<Self>,
        name: &str,
        q: u64,
        a: &ExtElem,
        b: &ExtElem,
    ) -> Result<Arc<Self>> {
        self.adjoin_additive_poly_root(name, q, &[(1, a.clone())], b)
    }

    /// Adjoins a root of the additive polynomial
    /// `T^top + sum_j lower[j].1 * T^(lower[j].0) - b`, where `top` is a
    /// power of p and every lower exponent is a smaller power of p (or 1).
    /// The stored relation is `g^top = b - sum_j coeff_j * g^(e_j)`. The
    /// step is generically separable (Artin-Schreier kind) exactly when
    /// the linear coefficient is nonzero.
    pub fn adjoin_additive_poly_root(
        self: &Arc<Self>,
        name: &str,
        top: u64,
        lower: &[(u64, ExtElem)],
        b: &ExtElem,
    ) -> Result<Arc<Self>> {
        let p = self.base.p();
        if !is_p_power(top, p) || top < 2 {
            return Err(Error::InvalidInput(
                "additive root degree must be a positive power of p".into(),
            ));
        }
        for (e, _) in lower {
            if *e >= top || (*e != 1 && !is_p_power(*e, p)) {
                return Err(Error::InvalidInput(
                    "lower exponents must be smaller powers of p".into(),
                ));
            }
        }
        self.validate_new_name(name)?;
        let new_index = self.gens.len();
        let mut linear_coef = ExtElem::zero();
        for (e, c) in lower {
            if *e == 1 {
                linear_coef = linear_coef.add(c)?;
            }
        }
        let kind = if lower.iter().all(|(_, c)| self.is_zero(c).unwrap_or(false)) {
            GaloisStepKind::InseparableRoot { degree: top }
        } else if self.is_zero(&linear_coef)? {
            // nonzero lower terms but vanishing derivative: inseparable
            GaloisStepKind::InseparableRoot { degree: top }
        } else {
            GaloisStepKind::ArtinSchreier { degree: top }
        };
        let mut rhs = b.clone();
        for (e, c) in lower {
            let mut g_exp: TowerExps = SmallVec::from_elem(0, new_index + 1);
            g_exp[new_index] = *e;
            let g_pow = ExtElem { terms: vec![(g_exp, Polynomial::one(&self.base))] };
            rhs = rhs.sub(&c.mul(&g_pow)?)?;
        }
        self.validate_rhs(&rhs, new_index, top)?;
        self.push_gen(TowerGen { name: name.to_string(), degree: top, rhs, kind })
    }

    fn push_gen(self: &Arc<Self>, gen: TowerGen) -> Result<Arc<Self>> {
        let mut gens = self.gens.clone();
        gens.push(gen);
        Ok(Arc::new(PresentedExtension {
            base: self.base.clone(),
            gens,
            base_gb: self.base_gb.clone(),
            id: NEXT_EXT_ID.fetch_add(1, AtomicOrdering::Relaxed),
        }))
    }

    /// Rewrites every tower exponent below its relation degree and reduces
    /// coefficients modulo the base relations. The result is the canonical
    /// form of the element in this extension.
    pub fn normal_form(&self, elem: &ExtElem) -> Result<ExtElem> {
        self.normal_form_with(elem, &GbBudget::default())
    }

    pub fn normal_form_with(&self, elem: &ExtElem, budget: &GbBudget) -> Result<ExtElem> {
        let n = self.gens.len();
        for (e, c) in &elem.terms {
            if e.len() > n {
                return Err(Error::ContextMismatch(
                    "element mentions generators outside this tower".into(),
                ));
            }
            if !c.ctx_is(&self.base) {
                return Err(Error::ContextMismatch(
                    "coefficient from another base ring".into(),
                ));
            }
        }
        let mut acc: BTreeMap<Vec<u64>, Polynomial> = BTreeMap::new();
        let mut work: Vec<(TowerExps, Polynomial)> = elem
            .terms
            .iter()
            .map(|(e, c)| {
                let mut padded = e.clone();
                padded.resize(n, 0);
                (padded, c.clone())
            })
            .collect();
        let mut steps = 0usize;
        while let Some((exps, coef)) = work.pop() {
            if coef.is_zero() {
                continue;
            }
            steps += 1;
            if steps > budget.max_pairs {
                return Err(Error::Budget(format!(
                    "tower rewriting exceeded {} steps",
                    budget.max_pairs
                )));
            }
            let reducible = (0..n).rev().find(|i| exps[*i] >= self.gens[*i].degree);
            match reducible {
                None => {
                    let key: Vec<u64> = exps.to_vec();
                    match acc.get_mut(&key) {
                        Some(slot) => *slot = slot.add(&coef)?,
                        None => {
                            acc.insert(key, coef);
                        }
                    }
                }
                Some(i) => {
                    let mut rest = exps.clone();
                    rest[i] -= self.gens[i].degree;
                    for (re, rc) in &self.gens[i].rhs.terms {
                        let mut e = rest.clone();
                        for (j, x) in re.iter().enumerate() {
                            e[j] = e[j].checked_add(*x).ok_or_else(|| {
                                Error::InvalidInput("tower exponent overflow".into())
                            })?;
                        }
                        work.push((e, coef.mul(rc)?));
                    }
                }
            }
        }
        let mut terms: Vec<(TowerExps, Polynomial)> = Vec::with_capacity(acc.len());
        for (exps, coef) in acc {
            let nf = self.base_gb.normal_form(&coef, budget)?;
            if !nf.is_zero() {
                terms.push((SmallVec::from_vec(exps), nf));
            }
        }
        terms.sort_by(|a, b| tower_cmp(&b.0, &a.0));
        Ok(ExtElem { terms })
    }

    pub fn is_zero(&self, elem: &ExtElem) -> Result<bool> {
        Ok(self.normal_form(elem)?.is_zero_raw())
    }

    pub fn eq_mod(&self, a: &ExtElem, b: &ExtElem) -> Result<bool> {
        self.is_zero(&a.sub(b)?)
    }

    /// Normal form of a base-ring polynomial in the quotient.
    pub fn base_normal_form(&self, f: &Polynomial, budget: &GbBudget) -> Result<Polynomial> {
        self.base_gb.normal_form(f, budget)
    }

    pub fn print_elem(&self, elem: &ExtElem) -> String {
        if elem.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = elem
            .terms
            .iter()
            .map(|(exps, c)| {
                let mut factors = Vec::new();
                for (i, e) in exps.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => factors.push(self.gens[i].name.clone()),
                        e => factors.push(format!("{}^{}", self.gens[i].name, e)),
                    }
                }
                let coef = c.print();
                if factors.is_empty() {
                    coef
                } else if c.is_one() {
                    factors.join("*")
                } else {
                    let wrapped = if c.terms.len() > 1 { format!("({coef})") } else { coef };
                    format!("{}*{}", wrapped, factors.join("*"))
                }
            })
            .collect();
        parts.join(" + ")
    }

    pub fn tower_report(&self) -> GaloisTowerReport {
        let steps: Vec<(String, GaloisStepKind)> = self
            .gens
            .iter()
            .map(|g| (g.name.clone(), g.kind.clone()))
            .collect();
        let generically_separable = !steps
            .iter()
            .any(|(_, k)| matches!(k, GaloisStepKind::InseparableRoot { .. }));
        GaloisTowerReport { steps, generically_separable, solvable_tower: true }
    }
}

impl PartialEq for PresentedExtension {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

/// Summary of a tower's Galois-theoretic shape. Every step we construct
/// is a root of unity, a radical, an Artin-Schreier root, or a purely
/// inseparable root, so `solvable_tower` records that the presentation
/// stays inside that catalogue; `generically_separable` additionally
/// requires the absence of inseparable steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisTowerReport {
    pub steps: Vec<(String, GaloisStepKind)>,
    pub solvable_tower: bool,
    pub generically_separable: bool,
}

/// A tower certifying membership of `z` in the Frobenius closure of the
/// ideal generated by `gens`: the relations force
/// `(z - witness)^q = 0` with `q = p^e`, so `z` equals the witness in any
/// reduced quotient, and the witness visibly lies in the extended ideal.
#[derive(Debug)]
pub struct WitnessTower {
    pub ext: Arc<PresentedExtension>,
    /// One tower element per ideal generator; the witness is
    /// `sum_i roots[i] * gens[i]`.
    pub roots: Vec<ExtElem>,
    pub witness: ExtElem,
    pub q: u64,
}

/// Builds the tower realizing a Frobenius closure certificate
/// `z^q = sum_i b_i * gens[i]^q` (q = p^e): for i >= 1 adjoin roots of
/// `T^q + gens[0]^q T - b_i`, then a q-th root closing the i = 0 slot.
/// Verifies that `(z - witness)^q` reduces to zero.
pub fn witness_tower_from_certificate(
    ctx: &Arc<RingContext>,
    z: &Polynomial,
    gens: &[Polynomial],
    b: &[Polynomial],
    e: u32,
    budget: &GbBudget,
) -> Result<WitnessTower> {
    if gens.is_empty() || gens.len() != b.len() {
        return Err(Error::InvalidInput(
            "certificate and generator lists must match and be nonempty".into(),
        ));
    }
    if e == 0 {
        return Err(Error::InvalidInput(
            "a closure certificate needs a positive Frobenius exponent".into(),
        ));
    }
    let p = ctx.p();
    let mut q: u64 = 1;
    for _ in 0..e {
        q = q
            .checked_mul(p)
            .ok_or_else(|| Error::InvalidInput("Frobenius exponent overflow".into()))?;
    }
    let mut ext = PresentedExtension::trivial(ctx, budget)?;
    let a0_q = ExtElem::from_poly(gens[0].frobenius_power(e));
    // generators t_1..t_m first, then t_0 whose relation uses them
    for i in 1..gens.len() {
        let name = format!("t{i}");
        let bi = ExtElem::from_poly(b[i].clone());
        ext = ext.adjoin_additive_root(&name, q, &a0_q, &bi)?;
    }
    let mut t0_rhs = ExtElem::from_poly(b[0].clone());
    for i in 1..gens.len() {
        let ti = ext.gen_elem(i - 1);
        t0_rhs = t0_rhs.add(&ti.mul_poly(&gens[i].frobenius_power(e))?)?;
    }
    ext = ext.adjoin_root("t0", q, &t0_rhs)?;
    let t0_index = gens.len() - 1;

    let mut roots = Vec::with_capacity(gens.len());
    roots.push(ext.gen_elem(t0_index));
    for i in 1..gens.len() {
        roots.push(ext.gen_elem(i - 1));
    }
    let mut witness = ExtElem::zero();
    for (r, g) in roots.iter().zip(gens) {
        witness = witness.add(&r.mul_poly(g)?)?;
    }
    let diff = ExtElem::from_poly(z.clone()).sub(&witness)?;
    let diff_q = diff.frobenius_power(e, p)?;
    if !ext.is_zero(&diff_q)? {
        return Err(Error::Verification(
            "witness tower does not certify the closure identity".into(),
        ));
    }
    Ok(WitnessTower { ext, roots, witness, q })
}

/// Data for the normalized form of a trinomial `T^p + a*T - b`: an element
/// `c` with `c^(p-1) = -a`, so that substituting `T = c*S` turns the
/// trinomial into `c^p*(S^p - S) - b`. When no such `c` exists in the
/// ring, a radical step adjoining one is recorded.
#[derive(Debug)]
pub struct SolvableWitness {
    pub ext: Arc<PresentedExtension>,
    /// The adjoined root of the trinomial.
    pub root: ExtElem,
    /// The normalizing element, with the tower it lives in (either the
    /// input tower or one radical step above it).
    pub normalizer: Option<ExtElem>,
    pub report: GaloisTowerReport,
}

/// Adjoins a root of `T^p + a*T - b` and, when possible, normalizes the
/// equation to Artin-Schreier shape. With `a = 0` the step is recorded as
/// a purely inseparable root instead.
pub fn solvable_witness(
    ext: &Arc<PresentedExtension>,
    name: &str,
    a: &ExtElem,
    b: &ExtElem,
) -> Result<SolvableWitness> {
    let p = ext.base.p();
    let a_nf = ext.normal_form(a)?;
    let mut current = ext.clone();
    let mut normalizer = None;
    if !a_nf.is_zero_raw() {
        let minus_a = a_nf.neg();
        match literal_root_of(&minus_a, p - 1, &current)? {
            Some(c) => normalizer = Some(c),
            None => {
                let rad_name = format!("{name}_nrm");
                current = current.adjoin_root(&rad_name, p - 1, &minus_a)?;
                normalizer = Some(current.gen_elem(current.ngens() - 1));
            }
        }
    }
    let with_root = current.adjoin_artin_schreier(name, &a_nf, b)?;
    let root = with_root.gen_elem(with_root.ngens() - 1);
    // sanity: the defining relation reduces to zero
    let rel = root
        .frobenius_power(1, p)?
        .add(&a_nf.mul(&root)?)?
        .sub(b)?;
    if !with_root.is_zero(&rel)? {
        return Err(Error::Verification("trinomial relation fails to reduce".into()));
    }
    if let Some(c) = &normalizer {
        // the defining property of the normalizer: c^(p-1) + a = 0
        let chk = c.pow(p - 1)?.add(&a_nf)?;
        if !with_root.is_zero(&chk)? {
            return Err(Error::Verification(
                "normalizer fails its defining relation".into(),
            ));
        }
    }
    let report = with_root.tower_report();
    Ok(SolvableWitness { ext: with_root, root, normalizer, report })
}

/// Tries to express `elem^(1/d)` literally in the tower: works when the
/// normal form is a single term whose exponents are all divisible by `d`
/// and whose coefficient has a literal d-th root.
fn literal_root_of(
    elem: &ExtElem,
    d: u64,
    ext: &Arc<PresentedExtension>,
) -> Result<Option<ExtElem>> {
    if d == 1 {
        return Ok(Some(elem.clone()));
    }
    let nf = ext.normal_form(elem)?;
    if nf.terms.len() != 1 {
        return Ok(None);
    }
    let (exps, coef) = &nf.terms[0];
    if exps.iter().any(|e| e % d != 0) {
        return Ok(None);
    }
    let Some(croot) = poly_literal_root(coef, d, &ext.base) else {
        return Ok(None);
    };
    let scaled: TowerExps = exps.iter().map(|e| e / d).collect();
    let candidate = ExtElem { terms: vec![(scaled, croot)] };
    // confirm, since d-th powering can reshuffle terms in small fields
    let check = candidate.pow(d)?.sub(&nf)?;
    if ext.is_zero(&check)? {
        Ok(Some(candidate))
    } else {
        Ok(None)
    }
}

/// A literal d-th root of a one-term polynomial, if the exponents divide
/// and the scalar has a d-th root in the coefficient field.
fn poly_literal_root(f: &Polynomial, d: u64, ctx: &Arc<RingContext>) -> Option<Polynomial> {
    if f.terms.len() != 1 {
        return None;
    }
    let (m, c) = &f.terms[0];
    let scalar = c.as_scalar()?.clone();
    let field = &ctx.field;
    let root_scalar = field
        .enumerate()
        .into_iter()
        .find(|cand| field.pow(cand, d) == scalar)?;
    let mut exps = SmallVec::with_capacity(m.exps.len());
    for e in &m.exps {
        if !e.is_integer() || e.num % d != 0 {
            return None;
        }
        exps.push(crate::exponent::PExp::int(e.num / d));
    }
    Some(Polynomial {
        ctx: ctx.clone(),
        terms: vec![(
            crate::monomial::Monomial { exps },
            crate::param::ParamFraction::from_scalar(root_scalar, field, ctx.nparams()),
        )],
    })
}

/// Adjoins a root of `S^(p^e) - S - beta` by the tower factorization
/// `F^e - 1 = (F - 1) (F^(e-1) + ... + F + 1)`: one Artin-Schreier step
/// for the left factor, then a root of the separable additive polynomial
/// on the right. Returns the extension and the root.
pub fn adjoin_reduced_trinomial_root(
    ext: &Arc<PresentedExtension>,
    name: &str,
    beta: &ExtElem,
    e: u32,
) -> Result<(Arc<PresentedExtension>, ExtElem)> {
    if e == 0 {
        return Err(Error::InvalidInput("exponent must be positive".into()));
    }
    let p = ext.base.p();
    if e == 1 {
        let minus_one = ExtElem::from_poly(Polynomial::from_int(-1, &ext.base));
        let next = ext.adjoin_artin_schreier(name, &minus_one, beta)?;
        let root = next.gen_elem(next.ngens() - 1);
        return Ok((next, root));
    }
    let helper = format!("{name}_h");
    let minus_one = ExtElem::from_poly(Polynomial::from_int(-1, &ext.base));
    let with_u = ext.adjoin_artin_schreier(&helper, &minus_one, beta)?;
    let u = with_u.gen_elem(with_u.ngens() - 1);
    // relation for s: s^(p^(e-1)) = u - (s^(p^(e-2)) + ... + s^p + s)
    let q_top = p.pow(e - 1);
    let new_index = with_u.ngens();
    let mut rhs = u.clone();
    let mut power = 1u64;
    loop {
        let mut exps: TowerExps = SmallVec::from_elem(0, new_index + 1);
        exps[new_index] = power;
        let term = ExtElem { terms: vec![(exps, Polynomial::one(&with_u.base))] };
        rhs = rhs.sub(&term)?;
        match power.checked_mul(p) {
            Some(next) if next < q_top => power = next,
            _ => break,
        }
    }
    let with_s = with_u.push_gen(TowerGen {
        name: name.to_string(),
        degree: q_top,
        rhs,
        kind: GaloisStepKind::ArtinSchreier { degree: q_top },
    })?;
    let s = with_s.gen_elem(with_s.ngens() - 1);
    // confirm the composed relation s^(p^e) - s = beta
    let check = s.frobenius_power(e, p)?.sub(&s)?.sub(beta)?;
    if !with_s.is_zero(&check)? {
        return Err(Error::Verification(
            "tower factorization failed to produce a trinomial root".into(),
        ));
    }
    Ok((with_s, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::OrderSpec;
    use crate::parse::parse_poly;

    fn plain_ctx(p: u64, vars: &[&str]) -> Arc<RingContext> {
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
        let c = plain_ctx(2, &["x", "y", "z"]);
        let rel = parse_poly("x^3 + y^3 + z^3", &c).unwrap();
        c.with_relations(vec![rel]).unwrap()
    }

    #[test]
    fn square_root_generator_reduces_even_powers() {
        let c = plain_ctx(3, &["x"]);
        let ext = PresentedExtension::trivial(&c, &GbBudget::default()).unwrap();
        let x = ExtElem::from_poly(parse_poly("x", &c).unwrap());
        let ext = ext.adjoin_root("s", 2, &x).unwrap();
        let s = ext.gen_elem(0);
        let s4 = s.pow(4).unwrap();
        let want = ExtElem::from_poly(parse_poly("x^2", &c).unwrap());
        assert!(ext.eq_mod(&s4, &want).unwrap());
        assert_eq!(
            ext.gens[0].kind,
            GaloisStepKind::Radical { degree: 2 }
        );
    }

    #[test]
    fn artin_schreier_relation_rewrites_self_referentially() {
        let c = plain_ctx(2, &["x"]);
        let ext = PresentedExtension::trivial(&c, &GbBudget::default()).unwrap();
        let x = ExtElem::from_poly(parse_poly("x", &c).unwrap());
        let one = ExtElem::from_poly(Polynomial::one(&c));
        // t^2 + t = x, i.e. t^2 = x + t
        let ext = ext.adjoin_artin_schreier("t", &one, &x).unwrap();
        let t = ext.gen_elem(0);
        let t4 = t.pow(4).unwrap();
        // t^4 = (x + t)^2 = x^2 + x + t
        let want = t
            .add(&ExtElem::from_poly(parse_poly("x^2 + x", &c).unwrap()))
            .unwrap();
        assert!(ext.eq_mod(&t4, &want).unwrap());
    }

    #[test]
    fn frobenius_power_is_additive_on_tower_elements() {
        let c = plain_ctx(2, &["x", "y"]);
        let ext = PresentedExtension::trivial(&c, &GbBudget::default()).unwrap();
        let xy = ExtElem::from_poly(parse_poly("x*y", &c).unwrap());
        let ext = ext.adjoin_root("r", 2, &xy).unwrap();
        let r = ext.gen_elem(0);
        let sum = r.add(&ExtElem::from_poly(parse_poly("x + y", &c).unwrap())).unwrap();
        let lhs = ext.normal_form(&sum.frobenius_power(1, 2).unwrap()).unwrap();
        let rhs = ext.normal_form(&sum.mul(&sum).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn witness_tower_matches_cubic_surface_certificate() {
        let ctx = fermat_ctx();
        let z2 = parse_poly("z^2", &ctx).unwrap();
        let gens = vec![
            parse_poly("x", &ctx).unwrap(),
            parse_poly("y", &ctx).unwrap(),
        ];
        let b = vec![
            parse_poly("x*z", &ctx).unwrap(),
            parse_poly("y*z", &ctx).unwrap(),
        ];
        let tower =
            witness_tower_from_certificate(&ctx, &z2, &gens, &b, 1, &GbBudget::default())
                .unwrap();
        assert_eq!(tower.q, 2);
        assert_eq!(tower.ext.ngens(), 2);
        // t1 was adjoined first with relation t1^2 = y*z + x^2*t1
        let t1 = &tower.ext.gens[0];
        assert_eq!(t1.name, "t1");
        assert_eq!(t1.kind, GaloisStepKind::ArtinSchreier { degree: 2 });
        let t1_elem = tower.ext.gen_elem(0);
        let rhs = ExtElem::from_poly(parse_poly("y*z", &ctx).unwrap())
            .add(&t1_elem.mul_poly(&parse_poly("x^2", &ctx).unwrap()).unwrap())
            .unwrap();
        assert!(tower.ext.eq_mod(&t1_elem.mul(&t1_elem).unwrap(), &rhs).unwrap());
        // t0^2 = x*z + t1*y^2, an inseparable square root
        let t0 = &tower.ext.gens[1];
        assert_eq!(t0.name, "t0");
        assert_eq!(t0.kind, GaloisStepKind::InseparableRoot { degree: 2 });
        let report = tower.ext.tower_report();
        assert!(!report.generically_separable);
    }

    #[test]
    fn tampered_witness_certificates_fail_verification() {
        let ctx = fermat_ctx();
        let z2 = parse_poly("z^2", &ctx).unwrap();
        let gens = vec![
            parse_poly("x", &ctx).unwrap(),
            parse_poly("y", &ctx).unwrap(),
        ];
        let b = vec![
            parse_poly("x*z", &ctx).unwrap(),
            parse_poly("y*z + x^2", &ctx).unwrap(),
        ];
        assert!(matches!(
            witness_tower_from_certificate(&ctx, &z2, &gens, &b, 1, &GbBudget::default()),
            Err(Error::Verification(_))
        ));
    }

    #[test]
    fn char_two_normalizer_is_the_linear_coefficient() {
        let ctx = fermat_ctx();
        let ext = PresentedExtension::trivial(&ctx, &GbBudget::default()).unwrap();
        let a = ExtElem::from_poly(parse_poly("x^2", &ctx).unwrap());
        let b = ExtElem::from_poly(parse_poly("y*z", &ctx).unwrap());
        let w = solvable_witness(&ext, "t", &a, &b).unwrap();
        // in characteristic 2 the normalizer is -a = a itself, no radical step
        assert_eq!(w.ext.ngens(), 1);
        let c = w.normalizer.expect("normalizer exists");
        assert!(w.ext.eq_mod(&c, &a).unwrap());
        assert!(w.report.generically_separable);
    }

    #[test]
    fn odd_characteristic_normalizer_may_need_a_radical_step() {
        let c = plain_ctx(3, &["x"]);
        let ext = PresentedExtension::trivial(&c, &GbBudget::default()).unwrap();
        // a = x^3: -a = 2*x^3 needs a square root, x^3 has odd exponents
        let a = ExtElem::from_poly(parse_poly("x^3", &c).unwrap());
        let b = ExtElem::from_poly(parse_poly("x", &c).unwrap());
        let w = solvable_witness(&ext, "t", &a, &b).unwrap();
        assert_eq!(w.ext.ngens(), 2);
        assert_eq!(w.ext.gens[0].kind, GaloisStepKind::Radical { degree: 2 });
        let cnorm = w.normalizer.unwrap();
        let chk = cnorm.pow(2).unwrap().add(&a).unwrap();
        assert!(w.ext.is_zero(&chk).unwrap());
    }

    #[test]
    fn trinomial_tower_factorization_solves_higher_exponents() {
        let c = plain_ctx(2, &["x"]);
        let ext = PresentedExtension::trivial(&c, &GbBudget::default()).unwrap();
        let beta = ExtElem::from_poly(parse_poly("x", &c).unwrap());
        let (ext2, s) = adjoin_reduced_trinomial_root(&ext, "s", &beta, 2).unwrap();
        assert_eq!(ext2.ngens(), 2);
        let lhs = s.frobenius_power(2, 2).unwrap().sub(&s).unwrap();
        assert!(ext2.eq_mod(&lhs, &beta).unwrap());
    }

    #[test]
    fn elements_of_a_smaller_tower_promote_silently() {
        let c = plain_ctx(2, &["x"]);
        let ext0 = PresentedExtension::trivial(&c, &GbBudget::default()).unwrap();
        let x = ExtElem::from_poly(parse_poly("x", &c).unwrap());
        let ext1 = ext0.adjoin_root("r", 2, &x).unwrap();
        let r = ext1.gen_elem(0);
        let sum = r.add(&x).unwrap();
        assert_eq!(ext1.normal_form(&sum).unwrap().terms.len(), 2);
    }
}
