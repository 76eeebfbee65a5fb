//! Coefficients: rational functions in the declared transcendental
//! parameters over F_q.
//!
//! A [`ParamPoly`] is a sparse multivariate polynomial in the parameters
//! with [`FieldScalar`] coefficients; a [`ParamFraction`] is a quotient of
//! two of them kept in canonical form: gcd-reduced, denominator monic
//! under the parameter term order (graded reverse lexicographic).

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::field::{FieldScalar, FieldSpec};

pub type ParamExps = SmallVec<[u32; 4]>;

/// Sparse polynomial in the parameters; terms sorted descending in
/// grevlex, exponent vectors all of the declared length.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParamPoly {
    pub terms: Vec<(ParamExps, FieldScalar)>,
}

fn grevlex(a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let ta: u64 = a.iter().map(|e| *e as u64).sum();
    let tb: u64 = b.iter().map(|e| *e as u64).sum();
    match ta.cmp(&tb) {
        Ordering::Equal => {}
        o => return o,
    }
    for i in (0..a.len()).rev() {
        match a[i].cmp(&b[i]) {
            Ordering::Equal => {}
            // larger exponent in the last differing position means smaller
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
        }
    }
    Ordering::Equal
}

impl ParamPoly {
    pub fn zero() -> Self {
        ParamPoly { terms: Vec::new() }
    }

    pub fn constant(c: FieldScalar, nparams: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ParamPoly { terms: vec![(SmallVec::from_elem(0, nparams), c)] }
    }

    pub fn one(field: &FieldSpec, nparams: usize) -> Self {
        Self::constant(field.one(), nparams)
    }

    pub fn param(i: usize, field: &FieldSpec, nparams: usize) -> Self {
        let mut e: ParamExps = SmallVec::from_elem(0, nparams);
        e[i] = 1;
        ParamPoly { terms: vec![(e, field.one())] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].1.is_one() && self.terms[0].0.iter().all(|e| *e == 0)
    }

    pub fn as_constant(&self) -> Option<&FieldScalar> {
        if self.terms.is_empty() {
            return None; // callers treat zero separately
        }
        if self.terms.len() == 1 && self.terms[0].0.iter().all(|e| *e == 0) {
            Some(&self.terms[0].1)
        } else {
            None
        }
    }

    pub fn total_degree(&self) -> u64 {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().map(|x| *x as u64).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|(e, _)| e[v]).max().unwrap_or(0)
    }

    fn normalize(mut terms: Vec<(ParamExps, FieldScalar)>, field: &FieldSpec) -> Self {
        terms.sort_by(|a, b| grevlex(&b.0, &a.0));
        let mut out: Vec<(ParamExps, FieldScalar)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            match out.last_mut() {
                Some((pe, pc)) if *pe == e => {
                    *pc = field.add(pc, &c);
                }
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        ParamPoly { terms: out }
    }

    pub fn add(&self, other: &Self, field: &FieldSpec) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::normalize(terms, field)
    }

    pub fn neg(&self, field: &FieldSpec) -> Self {
        ParamPoly {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), field.neg(c))).collect(),
        }
    }

    pub fn sub(&self, other: &Self, field: &FieldSpec) -> Self {
        self.add(&other.neg(field), field)
    }

    pub fn mul(&self, other: &Self, field: &FieldSpec) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: ParamExps = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                terms.push((e, field.mul(ca, cb)));
            }
        }
        Self::normalize(terms, field)
    }

    pub fn mul_scalar(&self, c: &FieldScalar, field: &FieldSpec) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ParamPoly {
            terms: self.terms.iter().map(|(e, x)| (e.clone(), field.mul(x, c))).collect(),
        }
    }

    pub fn pow(&self, mut e: u64, field: &FieldSpec, nparams: usize) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(field, nparams);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, field);
            }
            base = base.mul(&base, field);
            e >>= 1;
        }
        acc
    }

    /// Termwise q-power for q = p^e (Frobenius is additive).
    pub fn frobenius_power(&self, e: u32, field: &FieldSpec) -> Self {
        let q = (field.p as u128).pow(e);
        let q64 = u64::try_from(q).expect("frobenius exponent overflow");
        ParamPoly {
            terms: self
                .terms
                .iter()
                .map(|(ex, c)| {
                    let ex2: ParamExps = ex
                        .iter()
                        .map(|x| u32::try_from(*x as u64 * q64).expect("exponent overflow"))
                        .collect();
                    (ex2, field.pow(c, q64))
                })
                .collect(),
        }
    }

    /// Termwise p-th root if every exponent is divisible by p.
    pub fn p_th_root(&self, field: &FieldSpec) -> Option<Self> {
        let p = field.p as u32;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            if e.iter().any(|x| x % p != 0) {
                return None;
            }
            let e2: ParamExps = e.iter().map(|x| x / p).collect();
            terms.push((e2, field.p_th_root(c)));
        }
        Some(ParamPoly { terms })
    }

    pub fn leading(&self) -> Option<&(ParamExps, FieldScalar)> {
        self.terms.first()
    }

    /// Divides by the leading coefficient, making the polynomial monic.
    pub fn monic(&self, field: &FieldSpec) -> Self {
        match self.leading() {
            None => self.clone(),
            Some((_, lc)) => {
                if lc.is_one() {
                    self.clone()
                } else {
                    let inv = field.inv(lc).expect("nonzero leading coefficient");
                    self.mul_scalar(&inv, field)
                }
            }
        }
    }

    /// Exact division; `None` when not divisible.
    pub fn div_exact(&self, b: &Self, field: &FieldSpec) -> Option<Self> {
        if b.is_zero() {
            return None;
        }
        let mut rem = self.clone();
        let mut q_terms: Vec<(ParamExps, FieldScalar)> = Vec::new();
        let (lbe, lbc) = b.leading().unwrap();
        let lbc_inv = field.inv(lbc).ok()?;
        while !rem.is_zero() {
            let (lre, lrc) = rem.leading().unwrap();
            let mut qe: ParamExps = SmallVec::with_capacity(lre.len());
            for (x, y) in lre.iter().zip(lbe.iter()) {
                if x < y {
                    return None;
                }
                qe.push(x - y);
            }
            let qc = field.mul(lrc, &lbc_inv);
            let t = ParamPoly { terms: vec![(qe.clone(), qc.clone())] };
            rem = rem.sub(&t.mul(b, field), field);
            q_terms.push((qe, qc));
        }
        Some(Self::normalize(q_terms, field))
    }

    fn vars_used(&self) -> Vec<usize> {
        let n = self.terms.first().map(|(e, _)| e.len()).unwrap_or(0);
        (0..n)
            .filter(|v| self.terms.iter().any(|(e, _)| e[*v] > 0))
            .collect()
    }

    /// Coefficients of the powers of parameter `v`, as polynomials with the
    /// `v`-exponent zeroed; returned sparse as (degree, coefficient).
    fn univariate_view(&self, v: usize, field: &FieldSpec) -> Vec<(u32, ParamPoly)> {
        let mut buckets: std::collections::BTreeMap<u32, Vec<(ParamExps, FieldScalar)>> =
            std::collections::BTreeMap::new();
        for (e, c) in &self.terms {
            let d = e[v];
            let mut e2 = e.clone();
            e2[v] = 0;
            buckets.entry(d).or_default().push((e2, c.clone()));
        }
        buckets
            .into_iter()
            .map(|(d, ts)| (d, Self::normalize(ts, field)))
            .collect()
    }

    fn lead_coef_in(&self, v: usize, field: &FieldSpec) -> (u32, ParamPoly) {
        let view = self.univariate_view(v, field);
        view.into_iter().next_back().expect("nonzero polynomial")
    }

    fn mul_var_pow(&self, v: usize, d: u32) -> Self {
        ParamPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2[v] += d;
                    (e2, c.clone())
                })
                .collect(),
        }
    }
}

/// Monic gcd of two parameter polynomials (primitive remainder sequences,
/// recursing on the highest parameter present).
pub fn param_gcd(a: &ParamPoly, b: &ParamPoly, field: &FieldSpec) -> ParamPoly {
    let g = param_gcd_inner(a, b, field);
    g.monic(field)
}

fn param_gcd_inner(a: &ParamPoly, b: &ParamPoly, field: &FieldSpec) -> ParamPoly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.as_constant().is_some() || b.as_constant().is_some() {
        let nparams = a.terms[0].0.len();
        return ParamPoly::one(field, nparams);
    }
    let va = a.vars_used();
    let vb = b.vars_used();
    let v = *va.iter().chain(vb.iter()).max().unwrap();
    if !va.contains(&v) || !vb.contains(&v) {
        // v appears in only one of them: gcd divides the content of that one
        let (with_v, without) = if va.contains(&v) { (a, b) } else { (b, a) };
        let cont = content_in(with_v, v, field);
        return param_gcd_inner(&cont, without, field);
    }
    let cont_a = content_in(a, v, field);
    let cont_b = content_in(b, v, field);
    let cont = param_gcd_inner(&cont_a, &cont_b, field);
    let pa = a.div_exact(&cont_a, field).expect("content divides");
    let pb = b.div_exact(&cont_b, field).expect("content divides");
    let (mut big, mut small) = if pa.degree_in(v) >= pb.degree_in(v) {
        (pa, pb)
    } else {
        (pb, pa)
    };
    loop {
        let r = pseudo_rem(&big, &small, v, field);
        if r.is_zero() {
            let pp = primitive_part(&small, v, field);
            return cont.mul(&pp, field);
        }
        big = small;
        small = primitive_part(&r, v, field);
        if small.as_constant().is_some() {
            return cont;
        }
    }
}

fn content_in(a: &ParamPoly, v: usize, field: &FieldSpec) -> ParamPoly {
    let view = a.univariate_view(v, field);
    let mut acc = ParamPoly::zero();
    for (_, c) in view {
        acc = param_gcd_inner(&acc, &c, field);
        if acc.as_constant().is_some() {
            break;
        }
    }
    acc
}

fn primitive_part(a: &ParamPoly, v: usize, field: &FieldSpec) -> ParamPoly {
    let cont = content_in(a, v, field);
    a.div_exact(&cont, field).expect("content divides")
}

fn pseudo_rem(a: &ParamPoly, b: &ParamPoly, v: usize, field: &FieldSpec) -> ParamPoly {
    let (db, lb) = b.lead_coef_in(v, field);
    let mut r = a.clone();
    loop {
        if r.is_zero() {
            return r;
        }
        let (dr, lr) = r.lead_coef_in(v, field);
        if dr < db {
            return r;
        }
        // r := lb * r - lr * v^(dr-db) * b
        let t = lr.mul_var_pow(v, dr - db);
        r = r.mul(&lb, field).sub(&t.mul(b, field), field);
    }
}

/// A quotient of parameter polynomials in canonical form: gcd-reduced,
/// denominator monic. The zero fraction is 0/1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParamFraction {
    pub num: ParamPoly,
    pub den: ParamPoly,
}

impl ParamFraction {
    pub fn zero(field: &FieldSpec, nparams: usize) -> Self {
        ParamFraction { num: ParamPoly::zero(), den: ParamPoly::one(field, nparams) }
    }

    pub fn one(field: &FieldSpec, nparams: usize) -> Self {
        ParamFraction {
            num: ParamPoly::one(field, nparams),
            den: ParamPoly::one(field, nparams),
        }
    }

    pub fn from_scalar(c: FieldScalar, field: &FieldSpec, nparams: usize) -> Self {
        ParamFraction {
            num: ParamPoly::constant(c, nparams),
            den: ParamPoly::one(field, nparams),
        }
    }

    pub fn from_poly(p: ParamPoly, field: &FieldSpec, nparams: usize) -> Self {
        ParamFraction { num: p, den: ParamPoly::one(field, nparams) }
    }

    pub fn new(num: ParamPoly, den: ParamPoly, field: &FieldSpec, nparams: usize) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let mut f = ParamFraction { num, den };
        f.reduce(field, nparams);
        Ok(f)
    }

    fn reduce(&mut self, field: &FieldSpec, nparams: usize) {
        if self.num.is_zero() {
            self.den = ParamPoly::one(field, nparams);
            return;
        }
        if !self.den.is_one() {
            let g = param_gcd(&self.num, &self.den, field);
            if !g.is_one() {
                self.num = self.num.div_exact(&g, field).expect("gcd divides");
                self.den = self.den.div_exact(&g, field).expect("gcd divides");
            }
            // scale so the denominator is monic
            if let Some((_, lc)) = self.den.leading() {
                if !lc.is_one() {
                    let inv = field.inv(lc).expect("nonzero");
                    self.num = self.num.mul_scalar(&inv, field);
                    self.den = self.den.mul_scalar(&inv, field);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn as_scalar(&self) -> Option<&FieldScalar> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self, field: &FieldSpec, nparams: usize) -> Self {
        if self.den.is_one() && other.den.is_one() {
            return ParamFraction {
                num: self.num.add(&other.num, field),
                den: ParamPoly::one(field, nparams),
            };
        }
        let num = self
            .num
            .mul(&other.den, field)
            .add(&other.num.mul(&self.den, field), field);
        let den = self.den.mul(&other.den, field);
        Self::new(num, den, field, nparams).expect("nonzero denominator")
    }

    pub fn neg(&self, field: &FieldSpec) -> Self {
        ParamFraction { num: self.num.neg(field), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self, field: &FieldSpec, nparams: usize) -> Self {
        self.add(&other.neg(field), field, nparams)
    }

    pub fn mul(&self, other: &Self, field: &FieldSpec, nparams: usize) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(field, nparams);
        }
        if self.den.is_one() && other.den.is_one() {
            return ParamFraction {
                num: self.num.mul(&other.num, field),
                den: ParamPoly::one(field, nparams),
            };
        }
        let num = self.num.mul(&other.num, field);
        let den = self.den.mul(&other.den, field);
        Self::new(num, den, field, nparams).expect("nonzero denominator")
    }

    pub fn inv(&self, field: &FieldSpec, nparams: usize) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidInput("division by zero coefficient".into()));
        }
        Self::new(self.den.clone(), self.num.clone(), field, nparams)
    }

    pub fn div(&self, other: &Self, field: &FieldSpec, nparams: usize) -> Result<Self> {
        Ok(self.mul(&other.inv(field, nparams)?, field, nparams))
    }

    pub fn frobenius_power(&self, e: u32, field: &FieldSpec) -> Self {
        ParamFraction {
            num: self.num.frobenius_power(e, field),
            den: self.den.frobenius_power(e, field),
        }
    }

    pub fn pow(&self, e: u64, field: &FieldSpec, nparams: usize) -> Self {
        ParamFraction {
            num: self.num.pow(e, field, nparams),
            den: self.den.pow(e, field, nparams),
        }
    }

    pub fn p_th_root(&self, field: &FieldSpec) -> Option<Self> {
        Some(ParamFraction {
            num: self.num.p_th_root(field)?,
            den: self.den.p_th_root(field)?,
        })
    }
}
