mod support;

use std::sync::Arc;

use mouldkit::diffeo::context_of;
use mouldkit::prenormal::{
    cancellation_mould, cancellation_mould_b, dulac_iterate, explicit_simplified, linearize,
    resonance_profile, simplified_mould, simplified_mould_b, stage_contexts, trim_iterate,
    verify_prenormal, Selection,
};
use mouldkit::{
    mould_expand, Error, Exponent, Mould, PreparedDiffeo, Scalar, TruncatedPoly, TruncationContext,
    Word,
};
use support::*;

fn word(s: &str) -> Word {
    s.parse().unwrap()
}

fn one_dim_context(max_weight: u32) -> Arc<TruncationContext> {
    Arc::new(TruncationContext::new(mu_q(&[(2, 1)]), max_weight, &letters(&[&[1], &[2]])).unwrap())
}

#[test]
fn cancellation_values_for_mu_two() {
    let ctx = one_dim_context(3);
    let dem = cancellation_mould(&ctx, Selection::AllNonresonant).unwrap();
    // 1 / (1 - 2^{-1}) and 1 / (1 - 2^{-2}).
    assert_eq!(dem.get(&word("(1)")), Scalar::from_int(2));
    assert_eq!(dem.get(&word("(2)")), Scalar::ratio(4, 3));
    assert!(dem.get(&word("(1).(1)")).is_zero());
    let small = cancellation_mould_b(&ctx, Selection::AllNonresonant).unwrap();
    // -1/2 times 1 / (1 - 2^{-2}).
    assert_eq!(small.get(&word("(1).(1)")), Scalar::ratio(-2, 3));
    assert_eq!(small.get(&word("(1).(1).(1)")), Scalar::ratio(8, 21));
}

#[test]
fn resonant_letters_are_not_cancelled() {
    let ctx = Arc::new(
        TruncationContext::new(
            mu_q(&[(2, 1), (1, 2)]),
            3,
            &letters(&[&[1, 1], &[2, 0], &[-1, 2]]),
        )
        .unwrap(),
    );
    let dem = cancellation_mould(&ctx, Selection::AllNonresonant).unwrap();
    assert!(dem.get(&word("(1,1)")).is_zero());
    let sem = simplified_mould(&dem).unwrap();
    assert_eq!(sem.get(&Word::empty()), Scalar::one());
    assert_eq!(sem.get(&word("(1,1)")), Scalar::one());
    assert!(sem.get(&word("(2,0)")).is_zero());
    assert!(sem.get(&word("(-1,2)")).is_zero());
    for w in ctx.words() {
        assert_eq!(
            explicit_simplified(&ctx, w, Selection::AllNonresonant).unwrap(),
            sem.get(w),
            "{w}"
        );
    }
}

#[test]
fn d_and_b_generators_expand_to_the_same_field() {
    for f in saddle_corpus(31, 4, 5).iter().chain([quadratic(6)].iter()) {
        let p = f.substitution().unwrap();
        let (d_ctx, b_ctx) = stage_contexts(f.mu(), &p, f.max_weight()).unwrap();
        let d = p.log().unwrap();
        let b = p.raising_part();
        let big = mould_expand(
            &cancellation_mould(&d_ctx, Selection::AllNonresonant).unwrap(),
            &d,
        )
        .unwrap();
        let small = mould_expand(
            &cancellation_mould_b(&b_ctx, Selection::AllNonresonant).unwrap(),
            &b,
        )
        .unwrap();
        assert_eq!(big, small);
        let sem_d = mould_expand(
            &simplified_mould(&cancellation_mould(&d_ctx, Selection::Weight(1)).unwrap()).unwrap(),
            &d,
        );
        let sem_b = mould_expand(
            &simplified_mould_b(&cancellation_mould_b(&b_ctx, Selection::Weight(1)).unwrap())
                .unwrap(),
            &b,
        );
        assert_eq!(sem_d.unwrap(), sem_b.unwrap());
    }
}

#[test]
fn factorial_normalization_of_b_generator_breaks_at_length_three() {
    let f = quadratic(5);
    let p = f.substitution().unwrap();
    let (d_ctx, b_ctx) = stage_contexts(f.mu(), &p, f.max_weight()).unwrap();
    let d = p.log().unwrap();
    let b = p.raising_part();
    let reference = mould_expand(
        &cancellation_mould(&d_ctx, Selection::AllNonresonant).unwrap(),
        &d,
    )
    .unwrap();
    let good = cancellation_mould_b(&b_ctx, Selection::AllNonresonant).unwrap();
    let factorial = |len: usize| (1..=len as i64).product::<i64>();
    let variant = Mould::from_fn(&b_ctx, |w| {
        good.get(w).scale(w.len() as i64, factorial(w.len()))
    });
    let truncated = |m: &Mould, max_len: usize| {
        Mould::from_fn(&b_ctx, |w| {
            if w.len() <= max_len {
                m.get(w)
            } else {
                Scalar::zero()
            }
        })
    };
    // Up to length 2 the factors l and l! coincide.
    assert_eq!(truncated(&variant, 2), truncated(&good, 2));
    assert_eq!(mould_expand(&good, &b).unwrap(), reference);
    assert_ne!(mould_expand(&variant, &b).unwrap(), reference);
}

#[test]
fn nonresonant_paths_agree_with_linearization() {
    let mut r = rng(41);
    let cases = [
        quadratic(6),
        mouldkit::corpus::random_diffeo(&mut r, &mu_q(&[(2, 1), (3, 1)]), 5, 5, 3).unwrap(),
        mouldkit::corpus::random_diffeo(&mut r, &mu_q(&[(3, 1)]), 6, 6, 3).unwrap(),
    ];
    for f in &cases {
        let linear = PreparedDiffeo::linear(f.mu().clone(), f.degree())
            .unwrap()
            .map()
            .unwrap();
        let lin = linearize(f).unwrap();
        assert!(lin.check);
        for t in [trim_iterate(f).unwrap(), dulac_iterate(f).unwrap()] {
            assert_eq!(t.final_map().unwrap(), linear);
            assert!(t.universal_b.support().all(|(w, _)| w.is_empty()));
            assert_eq!(t.normalizer().unwrap().inverse().unwrap(), lin.normalizer);
        }
    }
}

#[test]
fn koenigs_closed_form_for_the_quadratic() {
    // log(1 + x) linearizes (1 + x)^2 - 1.
    let f = quadratic(8);
    let expected = TruncatedPoly::from_terms(
        1,
        8,
        (1..=8i64).map(|k| {
            (
                Exponent::new(vec![k as u32]),
                Scalar::ratio(if k % 2 == 1 { 1 } else { -1 }, k),
            )
        }),
    )
    .unwrap();
    assert_eq!(koenigs(&f), expected);
    assert_eq!(
        linearize(&f).unwrap().normalizer.images().remove(0),
        expected
    );
}

#[test]
fn resonant_multipliers_refuse_linearization() {
    let f = diffeo(mu_q(&[(2, 1), (1, 2)]), 4, &[(0, &[2, 1], Scalar::one())]);
    assert!(matches!(
        linearize(&f),
        Err(Error::SingularLinearization(_))
    ));
    let g = diffeo(mu_q(&[(1, 1)]), 4, &[(0, &[2], Scalar::one())]);
    assert!(matches!(
        linearize(&g),
        Err(Error::SingularLinearization(_))
    ));
}

#[test]
fn zero_h_is_stationary_at_once() {
    let f = PreparedDiffeo::linear(mu_q(&[(2, 1), (1, 2)]), 5).unwrap();
    for t in [trim_iterate(&f).unwrap(), dulac_iterate(&f).unwrap()] {
        assert!(t.stages.is_empty());
        assert!(t.final_operator.is_identity());
        assert!(verify_prenormal(&t, &f).passed());
    }
}

#[test]
fn resonant_term_survives_the_dulac_form() {
    let f = diffeo(
        mu_q(&[(2, 1), (1, 2)]),
        5,
        &[
            (0, &[2, 1], Scalar::one()),
            (0, &[2, 0], Scalar::from_int(3)),
            (1, &[0, 2], Scalar::ratio(1, 5)),
        ],
    );
    let t = dulac_iterate(&f).unwrap();
    let g = t.final_map().unwrap();
    assert_eq!(g[0].coeff(&Exponent::new(vec![2, 1])), Scalar::one());
    assert!(only_resonant_terms(&g, f.mu()));
    assert_eq!(g, classical_dulac(&f).map);
    assert!(verify_prenormal(&t, &f).passed());
}

#[test]
fn poincare_weights_strictly_increase() {
    for f in saddle_corpus(43, 5, 6) {
        let t = dulac_iterate(&f).unwrap();
        let mut last = 0;
        for (i, s) in t.stages.iter().enumerate() {
            let Selection::Weight(k) = s.selection else {
                panic!("weight selection expected")
            };
            assert!(k > last);
            last = k;
            let after = t
                .stages
                .get(i + 1)
                .map(|n| &n.operator)
                .unwrap_or(&t.final_operator);
            let profile = resonance_profile(f.mu(), &after.log().unwrap().letters()).unwrap();
            assert!(profile.degree.is_none_or(|d| d > k));
        }
    }
}

#[test]
fn resonance_profile_examples() {
    let two = resonance_profile(&mu_q(&[(2, 1)]), &letters(&[&[1], &[2], &[3]])).unwrap();
    assert_eq!(two.degree, Some(1));
    let one = resonance_profile(&mu_q(&[(1, 1)]), &letters(&[&[1], &[2]])).unwrap();
    assert_eq!(one.degree, None);
    let saddle = mu_q(&[(2, 1), (1, 2)]);
    let ls = letters(&[&[1, 1], &[-1, 2], &[2, 2], &[3, 0]]);
    let p = resonance_profile(&saddle, &ls).unwrap();
    let brute = ls
        .iter()
        .filter(|l| saddle.power(l.deg()).unwrap() != Scalar::one())
        .map(|l| l.weight())
        .min();
    assert_eq!(p.degree, brute);
    assert_eq!(p.degree, Some(1));
}

#[test]
fn every_corpus_trace_verifies() {
    for (name, f) in six_corpus() {
        for t in [trim_iterate(&f).unwrap(), dulac_iterate(&f).unwrap()] {
            let report = verify_prenormal(&t, &f);
            assert!(report.passed(), "{name} {}:\n{report}", t.procedure.name());
        }
    }
}

#[test]
fn reconstruction_through_one_plus_i() {
    for f in saddle_corpus(47, 4, 5) {
        let b = f.extract_b().unwrap();
        let ctx = context_of(f.mu(), &b, f.max_weight()).unwrap();
        let p = mould_expand(&Mould::one(&ctx).add(&Mould::id(&ctx)).unwrap(), &b).unwrap();
        let space = f.space();
        for (j, m) in space.monomials().iter().enumerate() {
            let phi = TruncatedPoly::monomial(f.nu(), f.degree(), m.clone(), Scalar::one());
            let direct = phi.substitute(&f.map().unwrap()).unwrap();
            assert_eq!(
                p.column(j).flin_apply(f.mu()).unwrap(),
                direct,
                "monomial {m}"
            );
        }
    }
}

#[test]
fn substitution_is_multiplicative() {
    let mut r = rng(53);
    for f in saddle_corpus(53, 3, 5) {
        let op = mouldkit::OperatorSeries::flin(f.space(), f.mu())
            .unwrap()
            .compose(&f.substitution().unwrap())
            .unwrap();
        for _ in 0..5 {
            let a = mouldkit::corpus::random_poly(&mut r, 2, 5, 3, 3);
            let b = mouldkit::corpus::random_poly(&mut r, 2, 5, 3, 3);
            let lhs = op.apply(&a.mul(&b).unwrap()).unwrap();
            let rhs = op.apply(&a).unwrap().mul(&op.apply(&b).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}
