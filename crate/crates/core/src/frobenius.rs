//! Frobenius closure of ideals and Frobenius nilpotency of cohomology
//! classes.
//!
//! The closure test searches for the least `e` with `z^(p^e)` inside the
//! bracket power (gens^(p^e)), and extracts an in-ring certificate from
//! the Groebner cofactors: coefficients `b_j` with
//! `z^(p^e) = sum_j b_j * gens[j]^(p^e)` modulo the context's relations.

use std::sync::Arc;

use crate::budget::{GbBudget, SolveBudget};
use crate::cech::{CechComplex, Cochain, CoboundaryOutcome};
use crate::error::{Error, Result};
use crate::groebner::{buchberger, quotient_basis};
use crate::poly::Polynomial;
use crate::ring::RingContext;

/// Generators of the e-th bracket power: each generator raised to p^e.
/// Exact termwise because the Frobenius is additive in characteristic p.
pub fn bracket_power(gens: &[Polynomial], e: u32) -> Vec<Polynomial> {
    gens.iter().map(|g| g.frobenius_power(e)).collect()
}

#[derive(Debug, Clone)]
pub struct FrobeniusClosureCertificate {
    /// The exponent: `z^(p^e)` lands in the e-th bracket power.
    pub e: u32,
    /// `z^(p^e) = sum_j cofactors[j] * gens[j]^(p^e)` in the quotient ring.
    pub cofactors: Vec<Polynomial>,
}

#[derive(Debug, Clone)]
pub enum FrobeniusClosureOutcome {
    /// Already in the ideal itself (certificate at e = 0).
    InIdeal(FrobeniusClosureCertificate),
    /// In the Frobenius closure but not the ideal; `e` is minimal.
    InClosure(FrobeniusClosureCertificate),
    /// No exponent up to `max_e` worked. This refutes membership in the
    /// closure only up to the search bound.
    NotDetected { max_e: u32 },
}

/// Tests `z` for membership in the Frobenius closure of (gens), searching
/// exponents 0..=max_e in order so the returned certificate is minimal.
pub fn frobenius_closure_test(
    z: &Polynomial,
    gens: &[Polynomial],
    ctx: &Arc<RingContext>,
    max_e: u32,
    budget: &GbBudget,
) -> Result<FrobeniusClosureOutcome> {
    if !z.ctx_is(ctx) {
        return Err(Error::ContextMismatch("element from another context".into()));
    }
    for e in 0..=max_e {
        let bracket = bracket_power(gens, e);
        let gb = buchberger(&bracket, ctx, budget, true)?;
        let target = z.frobenius_power(e);
        if let Some(cofactors) = gb.membership_certificate(&target, budget)? {
            let cert = FrobeniusClosureCertificate { e, cofactors };
            verify_closure_certificate(z, gens, ctx, &cert, budget)?;
            return Ok(if e == 0 {
                FrobeniusClosureOutcome::InIdeal(cert)
            } else {
                FrobeniusClosureOutcome::InClosure(cert)
            });
        }
    }
    Ok(FrobeniusClosureOutcome::NotDetected { max_e })
}

/// Recomputes the certified identity from scratch: the difference
/// `z^(p^e) - sum_j b_j * gens[j]^(p^e)` must reduce to zero modulo the
/// context's relations alone.
pub fn verify_closure_certificate(
    z: &Polynomial,
    gens: &[Polynomial],
    ctx: &Arc<RingContext>,
    cert: &FrobeniusClosureCertificate,
    budget: &GbBudget,
) -> Result<()> {
    if cert.cofactors.len() != gens.len() {
        return Err(Error::Verification(
            "certificate length does not match generator count".into(),
        ));
    }
    let mut acc = z.frobenius_power(cert.e);
    for (b, g) in cert.cofactors.iter().zip(gens) {
        acc = acc.sub(&b.mul(&g.frobenius_power(cert.e))?)?;
    }
    let gb = quotient_basis(ctx, budget)?;
    if gb.normal_form(&acc, budget)?.is_zero() {
        Ok(())
    } else {
        Err(Error::Verification(
            "closure certificate identity fails in the quotient ring".into(),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NilpotencyOutcome {
    /// Least e with F^e(class) a coboundary, when one was found.
    pub order: Option<u32>,
    /// True when the answer is definitive: either an order was found, or
    /// every exponent up to the bound was conclusively refuted.
    pub conclusive: bool,
}

/// Least `e <= max_e` with `F^e(class)` zero in cohomology (e = 0 asks
/// whether the class itself vanishes).
pub fn f_nilpotent_order(
    class: &Cochain,
    complex: &CechComplex,
    max_e: u32,
    solve: &SolveBudget,
    gb: &GbBudget,
) -> Result<NilpotencyOutcome> {
    let mut current = class.clone();
    let mut all_conclusive = true;
    for e in 0..=max_e {
        if e > 0 {
            current = complex.frobenius_on_cochain(&current)?;
        }
        match complex.is_coboundary(&current, solve, gb)? {
            CoboundaryOutcome::Found(_) => {
                return Ok(NilpotencyOutcome { order: Some(e), conclusive: true })
            }
            CoboundaryOutcome::NotFound { conclusive } => {
                all_conclusive &= conclusive;
            }
        }
    }
    Ok(NilpotencyOutcome { order: None, conclusive: all_conclusive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::monomial::OrderSpec;
    use crate::parse::parse_poly;

    fn fermat_quotient() -> Arc<RingContext> {
        let c0 = RingContext::new(
            FieldSpec::prime(2).unwrap(),
            vec!["x".into(), "y".into(), "z".into()],
            None,
            vec![],
            OrderSpec::GrevLex,
        )
        .unwrap();
        let rel = parse_poly("x^3 + y^3 + z^3", &c0).unwrap();
        c0.with_relations(vec![rel]).unwrap()
    }

    #[test]
    fn cubic_surface_square_closes_at_first_power() {
        let ctx = fermat_quotient();
        let z2 = parse_poly("z^2", &ctx).unwrap();
        let gens = vec![
            parse_poly("x", &ctx).unwrap(),
            parse_poly("y", &ctx).unwrap(),
        ];
        let out =
            frobenius_closure_test(&z2, &gens, &ctx, 3, &GbBudget::default()).unwrap();
        match out {
            FrobeniusClosureOutcome::InClosure(cert) => {
                assert_eq!(cert.e, 1);
                assert_eq!(cert.cofactors[0], parse_poly("x*z", &ctx).unwrap());
                assert_eq!(cert.cofactors[1], parse_poly("y*z", &ctx).unwrap());
            }
            other => panic!("expected closure membership, got {other:?}"),
        }
    }

    #[test]
    fn ideal_members_certify_at_exponent_zero() {
        let ctx = fermat_quotient();
        let gens = vec![
            parse_poly("x", &ctx).unwrap(),
            parse_poly("y", &ctx).unwrap(),
        ];
        let f = parse_poly("x^2 + y*x", &ctx).unwrap();
        let out = frobenius_closure_test(&f, &gens, &ctx, 2, &GbBudget::default()).unwrap();
        assert!(matches!(out, FrobeniusClosureOutcome::InIdeal(c) if c.e == 0));
    }

    #[test]
    fn polynomial_rings_have_trivial_closure() {
        let ctx = RingContext::new(
            FieldSpec::prime(2).unwrap(),
            vec!["x".into(), "y".into()],
            None,
            vec![],
            OrderSpec::GrevLex,
        )
        .unwrap();
        let gens = vec![
            parse_poly("x^2", &ctx).unwrap(),
            parse_poly("y^2", &ctx).unwrap(),
        ];
        let f = parse_poly("x*y", &ctx).unwrap();
        let out = frobenius_closure_test(&f, &gens, &ctx, 3, &GbBudget::default()).unwrap();
        assert!(matches!(out, FrobeniusClosureOutcome::NotDetected { max_e: 3 }));
    }

    #[test]
    fn tampered_certificates_are_rejected() {
        let ctx = fermat_quotient();
        let z2 = parse_poly("z^2", &ctx).unwrap();
        let gens = vec![
            parse_poly("x", &ctx).unwrap(),
            parse_poly("y", &ctx).unwrap(),
        ];
        let bad = FrobeniusClosureCertificate {
            e: 1,
            cofactors: vec![
                parse_poly("x*z", &ctx).unwrap(),
                parse_poly("y*z + x", &ctx).unwrap(),
            ],
        };
        assert!(matches!(
            verify_closure_certificate(&z2, &gens, &ctx, &bad, &GbBudget::default()),
            Err(Error::Verification(_))
        ));
    }
}
