//! Additive polynomials with prescribed root spans.
//!
//! Over a field with q elements, the product of (T - v) over every v in
//! the scalar span of the variables x_1..x_n collapses to the sparse
//! additive polynomial T^(q^n) + c_1 T^(q^(n-1)) + ... + c_n T. The
//! coefficients c_i are the classical Dickson invariants: they generate
//! the GL_n(F_q)-invariant subring of the polynomial ring. This module
//! computes them by a one-variable-at-a-time recursion, exposes the
//! defining checks (additivity in the argument, vanishing on the span,
//! agreement with the brute-force product), and reuses the same
//! polynomial shape to certify membership of z in the expansion of the
//! ideal (x, y) for a family of twisted hypersurfaces.

use std::sync::Arc;

use crate::budget::GbBudget;
use crate::error::{Error, Result};
use crate::exponent::PExp;
use crate::extension::{ExtElem, PresentedExtension};
use crate::field::FieldSpec;
use crate::monomial::{Monomial, OrderSpec};
use crate::param::{ParamFraction, ParamPoly};
use crate::poly::Polynomial;
use crate::ring::RingContext;

/// Default cap on the span size q^n enumerated when expanding or checking
/// products over all span vectors.
pub const DEFAULT_SPAN_CAP: u64 = 64;

/// The additive polynomial with root set equal to the scalar span of the
/// variables: prod_{v in span}(T - v) = sum_i coeffs[i] * T^(q^i).
#[derive(Debug, Clone)]
pub struct DicksonSystem {
    pub ctx: Arc<RingContext>,
    /// Number of spanning variables (all variables of `ctx`).
    pub n: usize,
    /// Field size; every exponent appearing in the product is a power of q.
    pub q: u64,
    /// `coeffs[i]` multiplies T^(q^i); `coeffs[n]` is 1.
    pub coeffs: Vec<Polynomial>,
}

impl DicksonSystem {
    pub fn new(ctx: &Arc<RingContext>) -> Result<Self> {
        Self::with_cap(ctx, DEFAULT_SPAN_CAP)
    }

    /// Runs the recursion phi_j(T) = phi_{j-1}(T)^q - phi_{j-1}(x_j)^(q-1) *
    /// phi_{j-1}(T), which extends the vanishing locus from the span of
    /// x_1..x_{j-1} to the span of x_1..x_j. Only the additive coefficient
    /// vector is stored, so each step is two passes over n polynomials.
    pub fn with_cap(ctx: &Arc<RingContext>, cap: u64) -> Result<Self> {
        if !ctx.relations.is_empty() {
            return Err(Error::InvalidInput(
                "span invariants are computed in a free polynomial ring".into(),
            ));
        }
        let n = ctx.nvars();
        if n == 0 {
            return Err(Error::InvalidInput("need at least one variable".into()));
        }
        let q = ctx.field.q();
        span_size_checked(q, n, cap)?;
        let k = ctx.field.k as u32;
        let mut coeffs = vec![Polynomial::one(ctx)];
        for j in 0..n {
            let xj = Polynomial::var(j, ctx);
            let e = additive_eval(&coeffs, &xj, k)?.pow(q - 1)?;
            let mut next = vec![Polynomial::zero(ctx); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] = next[i + 1].add(&c.frobenius_power(k))?;
                next[i] = next[i].sub(&e.mul(c)?)?;
            }
            coeffs = next;
        }
        Ok(DicksonSystem { ctx: ctx.clone(), n, q, coeffs })
    }

    /// Applies the additive polynomial to `f` using Frobenius powers for
    /// the q^i-th powers.
    pub fn evaluate(&self, f: &Polynomial) -> Result<Polynomial> {
        additive_eval(&self.coeffs, f, self.ctx.field.k as u32)
    }

    /// Applies the additive polynomial to `f` using generic binary
    /// exponentiation. Slower than [`evaluate`](Self::evaluate) but does
    /// not assume the Frobenius shortcut, so comparing the two is a real
    /// consistency check.
    pub fn evaluate_via_pow(&self, f: &Polynomial) -> Result<Polynomial> {
        let mut acc = Polynomial::zero(&self.ctx);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let qe = self
                .q
                .checked_pow(i as u32)
                .ok_or_else(|| Error::Budget("span exponent overflow".into()))?;
            acc = acc.add(&c.mul(&f.pow(qe)?)?)?;
        }
        Ok(acc)
    }

    /// The invariants c_1..c_n in classical order: c_i is the coefficient
    /// of T^(q^(n-i)), so c_n multiplies the linear term.
    pub fn invariants(&self) -> Vec<Polynomial> {
        (1..=self.n).map(|i| self.coeffs[self.n - i].clone()).collect()
    }

    /// Checks D(a f + b g) = a D(f) + b D(g) for scalars by verifying the
    /// symbolic two-variable identity D(T + U) = D(T) + D(U) together with
    /// D(alpha T) = alpha D(T) for every field scalar alpha. Both sides are
    /// expanded with generic powers.
    pub fn verify_additivity(&self) -> Result<()> {
        let (ext_ctx, _) = self.ctx.extended(
            &[fresh_var(&self.ctx, "T"), fresh_var(&self.ctx, "U")],
            false,
            OrderSpec::GrevLex,
        )?;
        let lifted = self.lift_to(&ext_ctx)?;
        let t = Polynomial::var(self.n, &ext_ctx);
        let u = Polynomial::var(self.n + 1, &ext_ctx);
        let both = lifted.evaluate_via_pow(&t.add(&u)?)?;
        let split = lifted.evaluate_via_pow(&t)?.add(&lifted.evaluate_via_pow(&u)?)?;
        if both != split {
            return Err(Error::Verification("additivity identity failed".into()));
        }
        for alpha in self.ctx.field.enumerate() {
            let af = ParamFraction::from_scalar(alpha, &ext_ctx.field, ext_ctx.nparams());
            let scaled = lifted.evaluate_via_pow(&t.mul_coef(&af))?;
            if scaled != lifted.evaluate_via_pow(&t)?.mul_coef(&af) {
                return Err(Error::Verification("scalar linearity failed".into()));
            }
        }
        Ok(())
    }

    /// Checks that the additive polynomial vanishes on every vector of the
    /// span, i.e. on all q^n combinations sum_j alpha_j x_j.
    pub fn verify_vanishing(&self, cap: u64) -> Result<()> {
        let size = span_size_checked(self.q, self.n, cap)?;
        let scalars = self.ctx.field.enumerate();
        let mut digits = vec![0usize; self.n];
        for _ in 0..size {
            let mut v = Polynomial::zero(&self.ctx);
            for (j, &d) in digits.iter().enumerate() {
                let c = ParamFraction::from_scalar(
                    scalars[d].clone(),
                    &self.ctx.field,
                    self.ctx.nparams(),
                );
                v = v.add(&Polynomial::var(j, &self.ctx).mul_coef(&c))?;
            }
            if !self.evaluate_via_pow(&v)?.is_zero() {
                return Err(Error::Verification(format!(
                    "span vector {} is not a root",
                    v.print()
                )));
            }
            increment(&mut digits, scalars.len());
        }
        Ok(())
    }

    fn lift_to(&self, target: &Arc<RingContext>) -> Result<Self> {
        let map: Vec<usize> = (0..self.n).collect();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.transport(target, &map))
            .collect::<Result<Vec<_>>>()?;
        Ok(DicksonSystem { ctx: target.clone(), n: self.n, q: self.q, coeffs })
    }
}

/// Brute-force oracle: literally expands prod_{v in span}(T - v) in a ring
/// extended by a fresh variable and reads off the additive coefficients.
/// Errors if any exponent of T other than a power of q appears.
pub fn naive_coeffs(ctx: &Arc<RingContext>, cap: u64) -> Result<Vec<Polynomial>> {
    if !ctx.relations.is_empty() {
        return Err(Error::InvalidInput(
            "span invariants are computed in a free polynomial ring".into(),
        ));
    }
    let n = ctx.nvars();
    let q = ctx.field.q();
    let size = span_size_checked(q, n, cap)?;
    let tname = fresh_var(ctx, "T");
    let (ext_ctx, _) = ctx.extended(&[tname], false, OrderSpec::GrevLex)?;
    let t_index = n;
    let tvar = Polynomial::var(t_index, &ext_ctx);
    let scalars = ctx.field.enumerate();
    let mut digits = vec![0usize; n];
    let mut prod = Polynomial::one(&ext_ctx);
    for _ in 0..size {
        let mut v = Polynomial::zero(&ext_ctx);
        for (j, &d) in digits.iter().enumerate() {
            let c = ParamFraction::from_scalar(
                scalars[d].clone(),
                &ext_ctx.field,
                ext_ctx.nparams(),
            );
            v = v.add(&Polynomial::var(j, &ext_ctx).mul_coef(&c))?;
        }
        prod = prod.mul(&tvar.sub(&v)?)?;
        increment(&mut digits, scalars.len());
    }
    let mut slots: Vec<Vec<(Monomial, ParamFraction)>> = vec![Vec::new(); n + 1];
    for (m, c) in &prod.terms {
        let te = m.exps[t_index];
        if !te.is_integer() {
            return Err(Error::Verification("fractional exponent in span product".into()));
        }
        let i = q_log(te.num, q).ok_or_else(|| {
            Error::Verification(format!(
                "product has T-exponent {} which is not a power of {q}",
                te.num
            ))
        })?;
        let mut rest = m.clone();
        rest.exps[t_index] = PExp::ZERO;
        slots[i].push((rest, c.clone()));
    }
    let map: Vec<usize> = (0..n).collect();
    slots
        .into_iter()
        .map(|terms| Polynomial::from_terms(terms, &ext_ctx).restrict(ctx, &map))
        .collect()
}

/// The invariants in classical order from the brute-force product; see
/// [`DicksonSystem::invariants`].
pub fn dickson_polynomial(ctx: &Arc<RingContext>, cap: u64) -> Result<Vec<Polynomial>> {
    let system = DicksonSystem::with_cap(ctx, cap)?;
    Ok(system.invariants())
}

fn span_size_checked(q: u64, n: usize, cap: u64) -> Result<u64> {
    let size = n
        .try_into()
        .ok()
        .and_then(|n: u32| q.checked_pow(n))
        .ok_or_else(|| Error::Budget("span size overflows".into()))?;
    if size > cap {
        return Err(Error::Budget(format!("span size {size} exceeds cap {cap}")));
    }
    Ok(size)
}

fn additive_eval(coeffs: &[Polynomial], f: &Polynomial, k: u32) -> Result<Polynomial> {
    let ctx = &f.ctx;
    let mut acc = Polynomial::zero(ctx);
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let power = f.frobenius_power(k * i as u32);
        acc = acc.add(&c.mul(&power)?)?;
    }
    Ok(acc)
}

fn increment(digits: &mut [usize], base: usize) {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return;
        }
        *d = 0;
    }
}

fn q_log(mut value: u64, q: u64) -> Option<usize> {
    let mut i = 0;
    while value > 1 {
        if value % q != 0 {
            return None;
        }
        value /= q;
        i += 1;
    }
    if value == 1 { Some(i) } else { None }
}

fn fresh_var(ctx: &Arc<RingContext>, base: &str) -> String {
    let mut name = base.to_string();
    let clashes = |n: &str| {
        ctx.vars.iter().any(|v| v == n)
            || ctx.params.iter().any(|v| v == n)
            || ctx.field.generator.as_deref() == Some(n)
    };
    while clashes(&name) {
        name.push('_');
    }
    name
}

/// Verification record for the twisted-hypersurface membership examples:
/// in F_q(a, b, c_1..c_n)[x, y, z] modulo
/// z^Q + c_1 (xy)^(Q - Q/q) z^(Q/q) + ... + c_n (xy)^(Q-1) z + a x^Q + b y^Q
/// with Q = q^n, adjoining roots u, v of the y- and x-twisted additive
/// polynomials makes w = z - ux - vy a root of the span polynomial with
/// (xy)-power coefficients. Equivalently (z - ux - vy)/(xy) is a root of
/// the monic additive polynomial T^Q + c_1 T^(Q/q) + ... + c_n T, so
/// z = ux + vy + xy * w' exhibits z inside (x, y) of the extension.
#[derive(Debug, Clone)]
pub struct PlusClosureExample {
    pub q: u64,
    pub n: u32,
    /// The hypersurface quotient F_q(a, b, c_1..c_n)[x, y, z]/(relation).
    pub ring: Arc<RingContext>,
    /// Tower adjoining u (index 0) and v (index 1).
    pub ext: Arc<PresentedExtension>,
    /// w = z - ux - vy.
    pub w: ExtElem,
    /// The raw expansion of the span polynomial applied to w, before any
    /// reduction; its normal form is zero.
    pub expansion: ExtElem,
}

/// Builds the twisted hypersurface with exponent ladder q^n and certifies
/// z = ux + vy + (xy) * w' as above. `p` and `k` fix the coefficient field
/// F_q with q = p^k. Errors if the reduced identity is nonzero, which
/// would indicate an implementation bug rather than bad input.
pub fn verify_plus_closure_example(
    p: u64,
    k: usize,
    n: u32,
    budget: &GbBudget,
) -> Result<PlusClosureExample> {
    if n == 0 {
        return Err(Error::InvalidInput("exponent ladder needs n >= 1".into()));
    }
    let field = FieldSpec::new(p, k)?;
    let q = field.q();
    let big_q = q
        .checked_pow(n)
        .filter(|&b| b <= DEFAULT_SPAN_CAP)
        .ok_or_else(|| Error::Budget(format!("q^n exceeds cap {DEFAULT_SPAN_CAP}")))?;
    let mut params = vec!["a".to_string(), "b".to_string()];
    for i in 1..=n {
        params.push(format!("c{i}"));
    }
    let ctx0 = RingContext::new(
        field.clone(),
        vec!["x".into(), "y".into(), "z".into()],
        None,
        params,
        OrderSpec::GrevLex,
    )?;
    let nparams = ctx0.nparams();
    let x = Polynomial::var(0, &ctx0);
    let y = Polynomial::var(1, &ctx0);
    let z = Polynomial::var(2, &ctx0);
    let param_coef = |i: usize| -> ParamFraction {
        ParamFraction {
            num: ParamPoly::param(i, &field, nparams),
            den: ParamPoly::one(&field, nparams),
        }
    };
    let a = param_coef(0);
    let b = param_coef(1);
    // relation g = z^Q + sum_i c_i (xy)^(Q - E_i) z^(E_i) + a x^Q + b y^Q
    // with E_i = q^(n-i)
    let kn = k as u32 * n;
    let mut g = z.frobenius_power(kn);
    for i in 1..=n {
        let e_i = q.pow(n - i);
        let xy_pow = x.pow(big_q - e_i)?.mul(&y.pow(big_q - e_i)?)?;
        let term = xy_pow
            .mul(&z.pow(e_i)?)?
            .mul_coef(&param_coef(1 + i as usize));
        g = g.add(&term)?;
    }
    g = g.add(&x.frobenius_power(kn).mul_coef(&a))?;
    g = g.add(&y.frobenius_power(kn).mul_coef(&b))?;
    let ring = ctx0.with_relations(vec![g])?;

    // u is a root of T^Q + c_1 y^(Q - E_1) T^(E_1) + ... + c_n y^(Q-1) T + a,
    // v the same with x in place of y and b in place of a.
    let x = x.transport(&ring, &[0, 1, 2])?;
    let y = y.transport(&ring, &[0, 1, 2])?;
    let z = z.transport(&ring, &[0, 1, 2])?;
    let ext = PresentedExtension::trivial(&ring, budget)?;
    let twisted_lower = |t: &Polynomial| -> Result<Vec<(u64, ExtElem)>> {
        let mut lower = Vec::new();
        for i in 1..=n {
            let e_i = q.pow(n - i);
            let coef = t.pow(big_q - e_i)?.mul_coef(&param_coef(1 + i as usize));
            lower.push((e_i, ExtElem::from_poly(coef)));
        }
        Ok(lower)
    };
    let neg_a = ExtElem::from_poly(Polynomial::constant(a, &ring).neg());
    let neg_b = ExtElem::from_poly(Polynomial::constant(b, &ring).neg());
    let ext = ext.adjoin_additive_poly_root("u", big_q, &twisted_lower(&y)?, &neg_a)?;
    let ext = ext.adjoin_additive_poly_root("v", big_q, &twisted_lower(&x)?, &neg_b)?;

    let u = ext.gen_elem(0);
    let v = ext.gen_elem(1);
    let w = ExtElem::from_poly(z)
        .sub(&u.mul_poly(&x)?)?
        .sub(&v.mul_poly(&y)?)?;

    // span polynomial with (xy)-power coefficients applied to w
    let mut expansion = w.frobenius_power(kn, p)?;
    for i in 1..=n {
        let e_i = q.pow(n - i);
        let xy_pow = x
            .pow(big_q - e_i)?
            .mul(&y.pow(big_q - e_i)?)?
            .mul_coef(&param_coef(1 + i as usize));
        let w_pow = w.frobenius_power(k as u32 * (n - i), p)?;
        expansion = expansion.add(&w_pow.mul_poly(&xy_pow)?)?;
    }
    let reduced = ext.normal_form_with(&expansion, budget)?;
    if !reduced.is_zero_raw() {
        return Err(Error::Verification(
            "twisted hypersurface identity did not reduce to zero".into(),
        ));
    }
    Ok(PlusClosureExample { q, n, ring, ext, w, expansion })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn poly_ring(p: u64, k: usize, vars: &[&str]) -> Arc<RingContext> {
        RingContext::new(
            FieldSpec::new(p, k).unwrap(),
            vars.iter().map(|s| s.to_string()).collect(),
            None,
            Vec::new(),
            OrderSpec::GrevLex,
        )
        .unwrap()
    }

    fn parse(src: &str, ctx: &Arc<RingContext>) -> Polynomial {
        crate::parse::parse_poly(src, ctx).unwrap()
    }

    #[test]
    fn two_variables_over_f2_give_the_classical_invariants() {
        let ctx = poly_ring(2, 1, &["x1", "x2"]);
        let sys = DicksonSystem::new(&ctx).unwrap();
        let inv = sys.invariants();
        assert_eq!(inv.len(), 2);
        assert_eq!(inv[0], parse("x1^2 + x1*x2 + x2^2", &ctx));
        assert_eq!(inv[1], parse("x1^2*x2 + x1*x2^2", &ctx));
        assert_eq!(sys.coeffs[2], Polynomial::one(&ctx));
    }

    #[test]
    fn one_variable_invariant_is_minus_the_q_minus_first_power() {
        let ctx = poly_ring(3, 1, &["x1"]);
        let sys = DicksonSystem::new(&ctx).unwrap();
        let inv = sys.invariants();
        assert_eq!(inv.len(), 1);
        assert_eq!(inv[0], parse("-x1^2", &ctx));
    }

    #[test]
    fn recursion_matches_the_expanded_product() {
        for (p, k, vars) in [
            (2u64, 1usize, vec!["x1", "x2"]),
            (3, 1, vec!["x1", "x2"]),
            (2, 2, vec!["x1", "x2"]),
            (2, 1, vec!["x1", "x2", "x3"]),
            (5, 1, vec!["x1"]),
        ] {
            let ctx = poly_ring(p, k, &vars);
            let sys = DicksonSystem::new(&ctx).unwrap();
            let naive = naive_coeffs(&ctx, DEFAULT_SPAN_CAP).unwrap();
            assert_eq!(sys.coeffs, naive, "p={p} k={k} n={}", vars.len());
        }
    }

    #[test]
    fn additivity_and_vanishing_hold_over_f3() {
        let ctx = poly_ring(3, 1, &["x1", "x2"]);
        let sys = DicksonSystem::new(&ctx).unwrap();
        sys.verify_additivity().unwrap();
        sys.verify_vanishing(DEFAULT_SPAN_CAP).unwrap();
    }

    #[test]
    fn evaluate_agrees_with_generic_powers() {
        let ctx = poly_ring(2, 1, &["x1", "x2"]);
        let sys = DicksonSystem::new(&ctx).unwrap();
        let f = parse("x1^3 + x1*x2 + x2", &ctx);
        assert_eq!(sys.evaluate(&f).unwrap(), sys.evaluate_via_pow(&f).unwrap());
    }

    #[test]
    fn span_cap_is_enforced() {
        let ctx = poly_ring(5, 1, &["x1", "x2", "x3"]);
        let err = DicksonSystem::new(&ctx).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn hypersurface_membership_verifies_at_p2() {
        let ex = verify_plus_closure_example(2, 1, 2, &GbBudget::default()).unwrap();
        assert_eq!(ex.q, 2);
        assert_eq!(ex.ext.ngens(), 2);
        // the raw expansion is nonzero before reduction
        assert!(!ex.expansion.is_zero_raw());
    }

    #[test]
    fn hypersurface_membership_verifies_for_general_ladder_shapes() {
        // one-layer ladder degenerates to a single Artin-Schreier-type root
        verify_plus_closure_example(3, 1, 1, &GbBudget::default()).unwrap();
        // q = 4 exercises a non-prime coefficient field
        verify_plus_closure_example(2, 2, 1, &GbBudget::default()).unwrap();
    }
}
