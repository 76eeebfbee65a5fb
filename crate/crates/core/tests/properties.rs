//! Randomized property tests for the algebraic invariants the library is
//! built on: exact ring axioms, Frobenius semilinearity, certificate
//! soundness, normal-form stability, and the cochain calculus.

use std::sync::Arc;

use proptest::prelude::*;

use charp_core::budget::{GbBudget, SolveBudget};
use charp_core::cech::{class_from_relation, CechComplex, CoboundaryOutcome, Cochain};
use charp_core::dickson::DicksonSystem;
use charp_core::extension::{solvable_witness, ExtElem, GaloisStepKind, PresentedExtension};
use charp_core::exponent::PExp;
use charp_core::field::FieldSpec;
use charp_core::frobenius::{bracket_power, frobenius_closure_test, FrobeniusClosureOutcome};
use charp_core::graded::verify_power_identity;
use charp_core::groebner::{buchberger, colon_ideal, divide, ideal_equal, quotient_basis};
use charp_core::monomial::{Monomial, OrderSpec};
use charp_core::param::ParamFraction;
use charp_core::parse::parse_poly;
use charp_core::poly::Polynomial;
use charp_core::ring::RingContext;

/// Raw term data: per-variable integer exponents plus a coefficient seed.
/// Kept as plain numbers so proptest can generate and shrink it; the tests
/// build actual polynomials in a concrete ring from it.
type RawPoly = Vec<(Vec<u64>, i64)>;

fn raw_poly(nvars: usize, max_terms: usize, max_exp: u64) -> impl Strategy<Value = RawPoly> {
    prop::collection::vec(
        (prop::collection::vec(0..=max_exp, nvars), 1i64..20),
        1..=max_terms,
    )
}

fn gbb() -> GbBudget {
    GbBudget::default()
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

fn build(raw: &RawPoly, ctx: &Arc<RingContext>) -> Polynomial {
    let mut acc = Polynomial::zero(ctx);
    for (exps, seed) in raw {
        let mut m = Monomial::unit(ctx.nvars());
        for (i, e) in exps.iter().enumerate() {
            m.exps[i] = PExp::int(*e);
        }
        let c = ParamFraction::from_scalar(ctx.field.from_int(*seed), &ctx.field, ctx.nparams());
        acc = acc.add(&Polynomial::monomial(m, ctx).mul_coef(&c)).unwrap();
    }
    acc
}

fn prime_of(choice: u8) -> u64 {
    [2, 3, 5][choice as usize % 3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn products_are_associative_and_distribute_over_sums(
        pc in 0u8..3,
        fr in raw_poly(3, 4, 3),
        gr in raw_poly(3, 4, 3),
        hr in raw_poly(3, 4, 3),
    ) {
        let ctx = free_ctx(prime_of(pc), &["x", "y", "z"]);
        let (f, g, h) = (build(&fr, &ctx), build(&gr, &ctx), build(&hr, &ctx));
        let fg_h = f.mul(&g).unwrap().mul(&h).unwrap();
        let f_gh = f.mul(&g.mul(&h).unwrap()).unwrap();
        prop_assert_eq!(fg_h, f_gh);
        let lhs = f.mul(&g.add(&h).unwrap()).unwrap();
        let rhs = f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(f.add(&g).unwrap(), g.add(&f).unwrap());
        prop_assert!(f.sub(&f).unwrap().is_zero());
    }

    #[test]
    fn frobenius_powers_are_additive_and_compose(
        pc in 0u8..3,
        fr in raw_poly(3, 4, 3),
        gr in raw_poly(3, 4, 3),
        e1 in 1u32..3,
        e2 in 1u32..3,
    ) {
        let ctx = free_ctx(prime_of(pc), &["x", "y", "z"]);
        let (f, g) = (build(&fr, &ctx), build(&gr, &ctx));
        let sum_pow = f.add(&g).unwrap().frobenius_power(e1);
        let pow_sum = f.frobenius_power(e1).add(&g.frobenius_power(e1)).unwrap();
        prop_assert_eq!(sum_pow, pow_sum);
        prop_assert_eq!(
            f.frobenius_power(e1 + e2),
            f.frobenius_power(e1).frobenius_power(e2)
        );
    }

    #[test]
    fn degrees_of_products_add(
        pc in 0u8..3,
        fr in raw_poly(3, 4, 4),
        gr in raw_poly(3, 4, 4),
    ) {
        let ctx = free_ctx(prime_of(pc), &["x", "y", "z"]);
        let (f, g) = (build(&fr, &ctx), build(&gr, &ctx));
        prop_assume!(!f.is_zero() && !g.is_zero());
        let prod = f.mul(&g).unwrap();
        prop_assert_eq!(
            prod.degree_of().unwrap(),
            f.degree_of().unwrap() + g.degree_of().unwrap()
        );
    }

    #[test]
    fn printed_polynomials_parse_back_identically(
        pc in 0u8..3,
        raw in prop::collection::vec(
            (prop::collection::vec((0u64..10, 0u32..3), 2), 1i64..20),
            1..5,
        ),
    ) {
        let p = prime_of(pc);
        let ctx = free_ctx(p, &["x", "y"]);
        let mut f = Polynomial::zero(&ctx);
        for (exps, seed) in &raw {
            let mut m = Monomial::unit(2);
            for (i, (num, dlog)) in exps.iter().enumerate() {
                m.exps[i] = PExp::new(p, *num, *dlog);
            }
            let c = ParamFraction::from_scalar(ctx.field.from_int(*seed), &ctx.field, 0);
            f = f.add(&Polynomial::monomial(m, &ctx).mul_coef(&c)).unwrap();
        }
        let round = parse_poly(&f.print(), &ctx).unwrap();
        prop_assert_eq!(round, f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn division_reconstructs_the_dividend_exactly(
        pc in 0u8..2,
        g1 in raw_poly(3, 3, 3),
        g2 in raw_poly(3, 3, 3),
        fr in raw_poly(3, 4, 4),
    ) {
        let ctx = free_ctx(if pc == 0 { 2 } else { 3 }, &["x", "y", "z"]);
        let gens: Vec<Polynomial> = [&g1, &g2]
            .iter()
            .map(|r| build(r, &ctx))
            .filter(|g| !g.is_zero())
            .collect();
        prop_assume!(!gens.is_empty());
        let f = build(&fr, &ctx);
        // Against the raw generators and against the reduced basis alike,
        // f = sum q_i g_i + r must hold on the nose.
        let gb = buchberger(&gens, &ctx, &gbb(), false).unwrap();
        for divisors in [&gens, &gb.basis] {
            let out = divide(&f, divisors, &gbb()).unwrap();
            let mut acc = out.remainder.clone();
            for (q, d) in out.quotients.iter().zip(divisors) {
                acc = acc.add(&q.mul(d).unwrap()).unwrap();
            }
            prop_assert_eq!(acc, f.clone());
        }
    }

    #[test]
    fn reduced_bases_are_byte_identical_across_runs(
        pc in 0u8..2,
        g1 in raw_poly(3, 3, 3),
        g2 in raw_poly(3, 3, 3),
    ) {
        let ctx = free_ctx(if pc == 0 { 2 } else { 3 }, &["x", "y", "z"]);
        let gens: Vec<Polynomial> =
            [&g1, &g2].iter().map(|r| build(r, &ctx)).filter(|g| !g.is_zero()).collect();
        prop_assume!(!gens.is_empty());
        let a = buchberger(&gens, &ctx, &gbb(), false).unwrap();
        let b = buchberger(&gens, &ctx, &gbb(), false).unwrap();
        prop_assert!(ideal_equal(&a, &b));
        let print = |gb: &charp_core::groebner::GroebnerBasis| {
            gb.basis.iter().map(|f| f.print()).collect::<Vec<_>>().join("; ")
        };
        prop_assert_eq!(print(&a), print(&b));
    }

    #[test]
    fn colon_ideal_generators_multiply_into_the_ideal(
        pc in 0u8..2,
        g1 in raw_poly(2, 3, 3),
        g2 in raw_poly(2, 3, 3),
        fr in raw_poly(2, 2, 2),
    ) {
        let ctx = free_ctx(if pc == 0 { 2 } else { 3 }, &["x", "y"]);
        let gens: Vec<Polynomial> =
            [&g1, &g2].iter().map(|r| build(r, &ctx)).filter(|g| !g.is_zero()).collect();
        let f = build(&fr, &ctx);
        prop_assume!(!gens.is_empty() && !f.is_zero());
        let colon = colon_ideal(&gens, &f, &ctx, &gbb()).unwrap();
        let gb = buchberger(&gens, &ctx, &gbb(), false).unwrap();
        for g in &colon {
            prop_assert!(gb.contains(&g.mul(&f).unwrap(), &gbb()).unwrap());
        }
    }

    #[test]
    fn planted_combinations_certify_their_own_membership(
        pc in 0u8..2,
        g1 in raw_poly(3, 3, 3),
        g2 in raw_poly(3, 3, 3),
        h1 in raw_poly(3, 2, 2),
        h2 in raw_poly(3, 2, 2),
    ) {
        let ctx = free_ctx(if pc == 0 { 2 } else { 3 }, &["x", "y", "z"]);
        let gens = vec![build(&g1, &ctx), build(&g2, &ctx)];
        prop_assume!(gens.iter().all(|g| !g.is_zero()));
        let f = gens[0]
            .mul(&build(&h1, &ctx))
            .unwrap()
            .add(&gens[1].mul(&build(&h2, &ctx)).unwrap())
            .unwrap();
        let gb = buchberger(&gens, &ctx, &gbb(), true).unwrap();
        let cert = gb.membership_certificate(&f, &gbb()).unwrap().unwrap();
        let mut acc = Polynomial::zero(&ctx);
        for (b, g) in cert.iter().zip(&gens) {
            acc = acc.add(&b.mul(g).unwrap()).unwrap();
        }
        prop_assert_eq!(acc, f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bracket_powers_compose_as_ideals(
        g1 in raw_poly(3, 2, 1),
        g2 in raw_poly(3, 2, 1),
        e1 in 1u32..3,
        e2 in 1u32..2,
    ) {
        let ctx = fermat_ctx();
        let gens: Vec<Polynomial> =
            [&g1, &g2].iter().map(|r| build(r, &ctx)).filter(|g| !g.is_zero()).collect();
        prop_assume!(!gens.is_empty());
        let staged = bracket_power(&bracket_power(&gens, e1), e2);
        let direct = bracket_power(&gens, e1 + e2);
        prop_assert_eq!(&staged, &direct);
        let a = buchberger(&staged, &ctx, &gbb(), false).unwrap();
        let b = buchberger(&direct, &ctx, &gbb(), false).unwrap();
        prop_assert!(ideal_equal(&a, &b));
    }

    #[test]
    fn regular_rings_need_no_positive_closure_level(
        pc in 0u8..2,
        g1 in raw_poly(2, 2, 2),
        g2 in raw_poly(2, 2, 2),
        fr in raw_poly(2, 3, 3),
    ) {
        // Ideals of a polynomial ring are Frobenius closed, so the closure
        // test must agree with plain membership and never need e > 0.
        let ctx = free_ctx(if pc == 0 { 2 } else { 3 }, &["x", "y"]);
        let gens: Vec<Polynomial> =
            [&g1, &g2].iter().map(|r| build(r, &ctx)).filter(|g| !g.is_zero()).collect();
        let f = build(&fr, &ctx);
        prop_assume!(!gens.is_empty());
        let gb = buchberger(&gens, &ctx, &gbb(), false).unwrap();
        let member = gb.contains(&f, &gbb()).unwrap();
        let out = frobenius_closure_test(&f, &gens, &ctx, 1, &gbb()).unwrap();
        match out {
            FrobeniusClosureOutcome::InIdeal(ref cert) => {
                prop_assert!(member);
                prop_assert_eq!(cert.e, 0);
            }
            FrobeniusClosureOutcome::NotDetected { .. } => prop_assert!(!member),
            FrobeniusClosureOutcome::InClosure(_) => {
                return Err(TestCaseError::fail(
                    "positive closure level reported in a regular ring",
                ));
            }
        }
        // Monotonicity: a larger bound changes nothing about the outcome.
        let again = frobenius_closure_test(&f, &gens, &ctx, 2, &gbb()).unwrap();
        match (&out, &again) {
            (FrobeniusClosureOutcome::InIdeal(a), FrobeniusClosureOutcome::InIdeal(b)) => {
                prop_assert_eq!(a.e, b.e)
            }
            (
                FrobeniusClosureOutcome::NotDetected { .. },
                FrobeniusClosureOutcome::NotDetected { .. },
            ) => {}
            _ => return Err(TestCaseError::fail("outcome changed with a larger bound")),
        }
    }

    #[test]
    fn span_evaluation_is_additive_on_arbitrary_inputs(
        pc in 0u8..2,
        fr in raw_poly(2, 3, 2),
        gr in raw_poly(2, 3, 2),
    ) {
        let ctx = free_ctx(if pc == 0 { 2 } else { 3 }, &["x1", "x2"]);
        let d = DicksonSystem::new(&ctx).unwrap();
        let (f, g) = (build(&fr, &ctx), build(&gr, &ctx));
        let lhs = d.evaluate(&f.add(&g).unwrap()).unwrap();
        let rhs = d.evaluate(&f).unwrap().add(&d.evaluate(&g).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn power_identities_from_p_th_roots_reverify(
        pc in 0u8..2,
        mu_exps in prop::collection::vec(0u64..3, 3),
        wr in raw_poly(3, 2, 2),
    ) {
        // Both families live on the cubic cone x^3 + y^3 + z^3 = 0, where the
        // relation makes the two sides agree after a single Frobenius power.
        let p = if pc == 0 { 2 } else { 3 };
        let free = free_ctx(p, &["x", "y", "z"]);
        let rel = parse_poly("x^3 + y^3 + z^3", &free).unwrap();
        let ctx = free.with_relations(vec![rel]).unwrap();
        let mut m = Monomial::unit(3);
        for (i, e) in mu_exps.iter().enumerate() {
            m.exps[i] = PExp::int(*e);
        }
        let mu = Polynomial::monomial(m, &ctx);
        let w = build(&wr, &ctx);
        let (head, tail) = if p == 2 {
            // Squaring sends z^(3/2) and x^(3/2) + y^(3/2) to z^3 and
            // x^3 + y^3, which the relation identifies.
            (
                parse_poly("z^(3/2)", &ctx).unwrap(),
                parse_poly("x^(3/2) + y^(3/2)", &ctx).unwrap(),
            )
        } else {
            // Cubing sends 2x + 2y to 2x^3 + 2y^3, which the relation
            // identifies with z^3.
            (
                parse_poly("z", &ctx).unwrap(),
                parse_poly("2*x + 2*y", &ctx).unwrap(),
            )
        };
        let lhs = head.mul(&mu).unwrap().add(&w).unwrap();
        let rhs = tail.mul(&mu).unwrap().add(&w).unwrap();
        let cert = verify_power_identity(&lhs, &rhs, 1, true, &gbb()).unwrap();
        prop_assert!(cert.reduced.is_zero());
        prop_assert!(cert.reverify(&gbb()).unwrap());
    }
}

fn cochain_from(
    complex: &Arc<CechComplex>,
    degree: usize,
    raws: &[RawPoly],
    ctx: &Arc<RingContext>,
) -> Cochain {
    let n = complex.subsets(degree).len();
    let comps = (0..n).map(|i| build(&raws[i % raws.len()], ctx)).collect();
    complex.from_components(degree, 1, comps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cochain_calculus_holds_in_odd_characteristic(
        r1 in raw_poly(3, 2, 2),
        r2 in raw_poly(3, 2, 2),
        r3 in raw_poly(3, 2, 2),
        degree in 0usize..3,
    ) {
        // p = 3 exercises the sign bookkeeping that collapses at p = 2.
        let ctx = free_ctx(3, &["x", "y", "z"]);
        let elems = vec![
            parse_poly("x", &ctx).unwrap(),
            parse_poly("y", &ctx).unwrap(),
            parse_poly("z", &ctx).unwrap(),
        ];
        let complex = CechComplex::new(&ctx, elems, 1, &gbb()).unwrap();
        let raws = [r1.clone(), r2.clone(), r3.clone()];
        let c = cochain_from(&complex, degree, &raws, &ctx);
        if degree + 2 <= 3 {
            // The differential is only defined up to the top degree, so the
            // composite can be formed when the start sits two below it.
            let dd = complex.differential(&complex.differential(&c).unwrap()).unwrap();
            prop_assert!(complex.is_zero_cochain(&dd).unwrap());
        }
        let fd = complex
            .frobenius_on_cochain(&complex.differential(&c).unwrap())
            .unwrap();
        let df = complex
            .differential(&complex.frobenius_on_cochain(&c).unwrap())
            .unwrap();
        prop_assert!(complex.eq_cochain(&fd, &df).unwrap());
        // Refining the truncation must not change any operator output.
        let refined = complex.raise_truncation(&c, 3).unwrap();
        prop_assert!(complex.eq_cochain(&c, &refined).unwrap());
        let d_refined = complex.differential(&refined).unwrap();
        prop_assert!(complex
            .eq_cochain(&complex.differential(&c).unwrap(), &d_refined)
            .unwrap());
        let f_refined = complex.frobenius_on_cochain(&refined).unwrap();
        prop_assert!(complex
            .eq_cochain(&complex.frobenius_on_cochain(&c).unwrap(), &f_refined)
            .unwrap());
    }

    #[test]
    fn unit_complex_homotopy_splits_the_identity(
        r1 in raw_poly(3, 2, 2),
        r2 in raw_poly(3, 2, 2),
        r3 in raw_poly(3, 2, 2),
        degree in 0usize..3,
    ) {
        let ctx = free_ctx(3, &["x", "y", "z"]);
        let elems = vec![
            Polynomial::one(&ctx),
            parse_poly("x", &ctx).unwrap(),
            parse_poly("y", &ctx).unwrap(),
        ];
        let complex = CechComplex::new(&ctx, elems, 1, &gbb()).unwrap();
        let raws = [r1.clone(), r2.clone(), r3.clone()];
        let c = cochain_from(&complex, degree, &raws, &ctx);
        if degree == 0 {
            // The homotopy contracts boundaries of ring elements on the nose.
            let hd = complex
                .contracting_homotopy_with_unit(&complex.differential(&c).unwrap())
                .unwrap();
            prop_assert!(complex.eq_cochain(&hd, &c).unwrap());
        } else {
            let dh = complex
                .differential(&complex.contracting_homotopy_with_unit(&c).unwrap())
                .unwrap();
            let hd = complex
                .contracting_homotopy_with_unit(&complex.differential(&c).unwrap())
                .unwrap();
            prop_assert!(complex.eq_cochain(&complex.add(&dh, &hd).unwrap(), &c).unwrap());
        }
    }

    #[test]
    fn koszul_relations_give_classes_that_bound(
        sr in raw_poly(3, 2, 1),
        tr in raw_poly(3, 2, 1),
    ) {
        // Coefficients assembled from the trivial syzygies of (x, y, z)
        // satisfy the relation identically, and in a polynomial ring the
        // resulting class must bound below the top degree.
        let ctx = free_ctx(3, &["x", "y", "z"]);
        let (x1, x2, x3) = (
            parse_poly("x", &ctx).unwrap(),
            parse_poly("y", &ctx).unwrap(),
            parse_poly("z", &ctx).unwrap(),
        );
        let (s, t) = (build(&sr, &ctx), build(&tr, &ctx));
        let u = s.mul(&x2).unwrap().add(&t.mul(&x3).unwrap()).unwrap();
        let v = s.mul(&x1).unwrap().neg();
        let w = t.mul(&x1).unwrap().neg();
        let complex =
            CechComplex::new(&ctx, vec![x1, x2, x3], 1, &gbb()).unwrap();
        let class = class_from_relation(&complex, &u, &v, &w).unwrap();
        match complex
            .is_coboundary(&class.cochain, &SolveBudget::default(), &gbb())
            .unwrap()
        {
            CoboundaryOutcome::Found(xi) => {
                let dxi = complex.differential(&xi).unwrap();
                prop_assert!(complex.eq_cochain(&dxi, &class.cochain).unwrap());
            }
            CoboundaryOutcome::NotFound { .. } => {
                return Err(TestCaseError::fail("Koszul-trivial class did not bound"));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tower_normal_forms_are_idempotent_and_multiplicative(
        ar in raw_poly(2, 2, 2),
        br in raw_poly(2, 2, 2),
        ka in 0u64..4,
        kb in 0u64..4,
    ) {
        // A mixed tower over F_2[x, y]: one purely inseparable square root
        // and one Artin-Schreier step.
        let ctx = free_ctx(2, &["x", "y"]);
        let ext = PresentedExtension::trivial(&ctx, &gbb()).unwrap();
        let x = ExtElem::from_poly(parse_poly("x", &ctx).unwrap());
        let y = ExtElem::from_poly(parse_poly("y", &ctx).unwrap());
        let ext = ext.adjoin_root("t0", 2, &x).unwrap();
        let ext = ext.adjoin_artin_schreier("t1", &ext.one(), &y).unwrap();
        let t0 = ext.gen_named("t0").unwrap();
        let t1 = ext.gen_named("t1").unwrap();
        // pow rejects exponent zero, so the zero case falls back to the unit.
        let powed = |e: &ExtElem, k: u64| if k == 0 { ext.one() } else { e.pow(k).unwrap() };
        let a = ExtElem::from_poly(build(&ar, &ctx))
            .mul(&powed(&t0, ka))
            .unwrap();
        let b = ExtElem::from_poly(build(&br, &ctx))
            .mul(&powed(&t1, kb))
            .unwrap();
        let nf = |e: &ExtElem| ext.normal_form(e).unwrap();
        prop_assert!(ext.eq_mod(&nf(&nf(&a)), &nf(&a)).unwrap());
        prop_assert!(ext
            .eq_mod(&nf(&a.mul(&b).unwrap()), &nf(&nf(&a).mul(&nf(&b)).unwrap()))
            .unwrap());
        prop_assert!(ext
            .eq_mod(&nf(&a.add(&b).unwrap()), &nf(&a).add(&nf(&b)).unwrap())
            .unwrap());
    }

    #[test]
    fn witness_steps_stay_inside_the_solvable_catalogue(
        ar in raw_poly(3, 2, 1),
        br in raw_poly(3, 2, 2),
    ) {
        let ctx = fermat_ctx();
        let ext = PresentedExtension::trivial(&ctx, &gbb()).unwrap();
        let a = ExtElem::from_poly(build(&ar, &ctx));
        let b = ExtElem::from_poly(build(&br, &ctx));
        let wit = solvable_witness(&ext, "s", &a, &b).unwrap();
        prop_assert!(wit.report.solvable_tower);
        let a_vanishes = ext.is_zero(&a).unwrap();
        if a_vanishes {
            // T^p = b is a purely inseparable step; separability is lost
            // and the report must say so.
            prop_assert!(!wit.report.generically_separable);
        } else {
            prop_assert!(wit.report.generically_separable);
            let no_inseparable_steps = wit
                .report
                .steps
                .iter()
                .all(|(_, k)| !matches!(k, GaloisStepKind::InseparableRoot { .. }));
            prop_assert!(no_inseparable_steps);
        }
        // The defining trinomial relation holds on the adjoined root.
        let relation = wit
            .root
            .frobenius_power(1, 2)
            .unwrap()
            .add(&a.mul(&wit.root).unwrap())
            .unwrap()
            .sub(&b)
            .unwrap();
        prop_assert!(wit.ext.is_zero(&relation).unwrap());
    }
}

#[test]
fn parameter_coefficients_survive_a_print_parse_cycle() {
    let ctx = RingContext::new(
        FieldSpec::prime(3).unwrap(),
        vec!["x".into(), "y".into()],
        None,
        vec!["a".into(), "b".into()],
        OrderSpec::GrevLex,
    )
    .unwrap();
    for src in [
        "(a/(a + 1))*x^(4/3) + b*y",
        "(a*b + 2)*x^2*y + (1/(b^2 + a))*x",
        "2*a*x + b^3",
    ] {
        let f = parse_poly(src, &ctx).unwrap();
        let round = parse_poly(&f.print(), &ctx).unwrap();
        assert_eq!(round, f, "round trip failed for {src}");
    }
}

#[test]
fn additive_root_steps_classify_by_their_linear_coefficient() {
    let ctx = free_ctx(2, &["x", "y"]);
    let ext = PresentedExtension::trivial(&ctx, &gbb()).unwrap();
    let x = ExtElem::from_poly(parse_poly("x", &ctx).unwrap());
    let y = ExtElem::from_poly(parse_poly("y", &ctx).unwrap());
    // Nonzero linear coefficient: a separable Artin-Schreier step whose
    // formal derivative in the adjunction variable is that coefficient.
    let sep = ext
        .adjoin_additive_poly_root("u", 4, &[(2, ext.one()), (1, x.clone())], &y)
        .unwrap();
    let kinds: Vec<_> = sep.tower_report().steps.into_iter().map(|(_, k)| k).collect();
    assert!(matches!(kinds[0], GaloisStepKind::ArtinSchreier { degree: 4 }));
    assert!(sep.tower_report().generically_separable);
    // Zero linear coefficient: the relation is a p-th power in disguise and
    // the step must be recorded as inseparable.
    let insep = ext
        .adjoin_additive_poly_root("v", 4, &[(2, x)], &y)
        .unwrap();
    let kinds: Vec<_> = insep.tower_report().steps.into_iter().map(|(_, k)| k).collect();
    assert!(matches!(kinds[0], GaloisStepKind::InseparableRoot { degree: 4 }));
    assert!(!insep.tower_report().generically_separable);
}

#[test]
fn quotient_normal_forms_pick_one_representative_per_class() {
    let ctx = fermat_ctx();
    let qb = quotient_basis(&ctx, &gbb()).unwrap();
    // z^3 and x^3 + y^3 are the same element of the quotient; both sides
    // must reduce to the identical canonical form.
    let a = parse_poly("z^3 + x*y", &ctx).unwrap();
    let b = parse_poly("x^3 + y^3 + x*y", &ctx).unwrap();
    assert_eq!(
        qb.normal_form(&a, &gbb()).unwrap(),
        qb.normal_form(&b, &gbb()).unwrap()
    );
}
