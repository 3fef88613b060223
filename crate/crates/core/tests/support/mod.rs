//! Shared fixtures and independent oracles for the integration tests.
//!
//! The oracles here work on polynomial coefficients only. They never build
//! moulds or operator series.

#![allow(dead_code)]

use std::sync::Arc;

use mouldkit::corpus::random_diffeo;
use mouldkit::operator::Shift;
use mouldkit::poly::{compose_maps, identity_map};
use mouldkit::{
    Exponent, Letter, MultiplierVector, OperatorSeries, PolySpace, PreparedDiffeo, Scalar,
    TruncatedPoly, TruncationContext,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn mu(values: &[Scalar]) -> MultiplierVector {
    MultiplierVector::new(values.to_vec()).unwrap()
}

pub fn mu_q(values: &[(i64, i64)]) -> MultiplierVector {
    mu(&values
        .iter()
        .map(|&(p, q)| Scalar::ratio(p, q))
        .collect::<Vec<_>>())
}

pub fn letters(degrees: &[&[i32]]) -> Vec<Letter> {
    degrees
        .iter()
        .map(|d| Letter::new(d.to_vec()).unwrap())
        .collect()
}

/// One variable, letters (1) and (2), words up to weight 4.
pub fn two_letter_context() -> Arc<TruncationContext> {
    Arc::new(TruncationContext::new(mu_q(&[(2, 1)]), 4, &letters(&[&[1], &[2]])).unwrap())
}

/// `terms` as (component, exponent, coefficient) with 0-based components.
pub fn diffeo(
    mu: MultiplierVector,
    degree: u32,
    terms: &[(usize, &[u32], Scalar)],
) -> PreparedDiffeo {
    let nu = mu.dim();
    let mut h = vec![TruncatedPoly::zero(nu, degree); nu];
    for (i, e, c) in terms {
        h[*i].add_term(Exponent::new(e.to_vec()), c.clone());
    }
    PreparedDiffeo::new(mu, h, degree).unwrap()
}

/// `f = 2x + x^2`.
pub fn quadratic(degree: u32) -> PreparedDiffeo {
    diffeo(mu_q(&[(2, 1)]), degree, &[(0, &[2], Scalar::one())])
}

/// Random diffeomorphisms with multipliers `(2, 1/2)` and a few terms of
/// every degree up to `degree`.
pub fn saddle_corpus(seed: u64, count: usize, degree: u32) -> Vec<PreparedDiffeo> {
    let mut r = rng(seed);
    let m = mu_q(&[(2, 1), (1, 2)]);
    (0..count)
        .map(|_| random_diffeo(&mut r, &m, degree, degree, 4).unwrap())
        .collect()
}

/// Six diffeomorphisms covering nonresonant, fully resonant, saddle and
/// rotation multipliers, all truncated at degree 5.
pub fn six_corpus() -> Vec<(&'static str, PreparedDiffeo)> {
    let mut r = rng(20);
    let n = 5;
    let saddle = mu_q(&[(2, 1), (1, 2)]);
    let rotation = mu(&[Scalar::i(), -Scalar::i()]);
    vec![
        ("nu=1 mu=2 f=2x+x^2", quadratic(n)),
        (
            "nu=1 mu=1",
            diffeo(
                mu_q(&[(1, 1)]),
                n,
                &[(0, &[2], Scalar::one()), (0, &[3], Scalar::ratio(-1, 2))],
            ),
        ),
        (
            "nu=2 mu=(2,1/2) random",
            random_diffeo(&mut r, &saddle, n, n, 4).unwrap(),
        ),
        (
            "nu=2 mu=(2,1/2) resonant x1*x1x2",
            diffeo(
                saddle.clone(),
                n,
                &[
                    (0, &[2, 1], Scalar::one()),
                    (0, &[2, 0], Scalar::ratio(1, 3)),
                    (1, &[1, 1], Scalar::from_int(-2)),
                    (1, &[0, 3], Scalar::ratio(1, 2)),
                ],
            ),
        ),
        (
            "nu=2 mu=(2,3) random",
            random_diffeo(&mut r, &mu_q(&[(2, 1), (3, 1)]), n, n, 4).unwrap(),
        ),
        (
            "nu=2 mu=(i,-i) random",
            random_diffeo(&mut r, &rotation, n, n, 3).unwrap(),
        ),
    ]
}

/// A random operator on `space` whose parts all raise the degree.
pub fn random_raising<R: Rng>(r: &mut R, space: &Arc<PolySpace>, entries: usize) -> OperatorSeries {
    let monos = space.monomials();
    let mut op = OperatorSeries::zero(space);
    let mut placed = 0;
    while placed < entries {
        let j = r.gen_range(0..monos.len());
        let k = r.gen_range(0..monos.len());
        if monos[k].degree() <= monos[j].degree() {
            continue;
        }
        let shift: Vec<i32> = monos[k]
            .as_signed()
            .iter()
            .zip(monos[j].as_signed())
            .map(|(a, b)| a - b)
            .collect();
        op.add_entry(&Shift(shift), j, mouldkit::corpus::random_nonzero(r, 3));
        placed += 1;
    }
    op
}

fn derivative(p: &TruncatedPoly, i: usize) -> TruncatedPoly {
    let mut out = TruncatedPoly::zero(p.nu(), p.degree());
    for (m, c) in p.terms() {
        let e = m.as_slice()[i];
        if e > 0 {
            let mut lowered = m.as_slice().to_vec();
            lowered[i] -= 1;
            out.add_term(Exponent::new(lowered), c * &Scalar::from_int(e as i64));
        }
    }
    out
}

/// `sum_j X_j d/dx_j (phi)`.
fn lie_derivative(x: &[TruncatedPoly], phi: &TruncatedPoly) -> TruncatedPoly {
    let mut acc = TruncatedPoly::zero(phi.nu(), phi.degree());
    for (j, xj) in x.iter().enumerate() {
        acc = acc.add(&xj.mul(&derivative(phi, j)).unwrap()).unwrap();
    }
    acc
}

/// The time-`t` flow of a vector field of valuation at least 2, as the
/// Lie series `sum_n t^n L_X^n(x_i) / n!`.
pub fn flow(x: &[TruncatedPoly], t: i64) -> Vec<TruncatedPoly> {
    let nu = x.len();
    let degree = x[0].degree();
    identity_map(nu, degree)
        .into_iter()
        .map(|xi| {
            let mut acc = xi.clone();
            let mut term = xi;
            for n in 1..=degree as i64 {
                term = lie_derivative(x, &term).scale(&Scalar::ratio(t, n));
                acc = acc.add(&term).unwrap();
            }
            acc
        })
        .collect()
}

/// Result of the classical normalizer.
pub struct ClassicalNormalForm {
    /// The normalized jet.
    pub map: Vec<TruncatedPoly>,
    /// The homogeneous vector field solved at each degree, lowest first.
    pub fields: Vec<(u32, Vec<TruncatedPoly>)>,
}

/// Degree-by-degree Poincaré-Dulac normalization on map coefficients.
///
/// At degree `k` every nonresonant term `c x^m` of component `i` is removed
/// by the flow of `X_i = c / (mu^m - mu_i) x^m`, with `X` zero on resonant
/// terms; the map is replaced by `psi^{-1} ∘ g ∘ psi` for the time-1 flow
/// `psi` of `X`.
pub fn classical_dulac(f: &PreparedDiffeo) -> ClassicalNormalForm {
    let mu = f.mu();
    let nu = f.nu();
    let n = f.degree();
    let mut g = f.map().unwrap();
    let mut fields = Vec::new();
    for k in 2..=n {
        let mut x = vec![TruncatedPoly::zero(nu, n); nu];
        for (i, gi) in g.iter().enumerate() {
            let mu_i = &mu.as_slice()[i];
            for (m, c) in gi.homogeneous_part(k).terms() {
                let gap = mu.power(&m.as_signed()).unwrap() - mu_i.clone();
                if !gap.is_zero() {
                    x[i].add_term(m.clone(), c.checked_div(&gap).unwrap());
                }
            }
        }
        if x.iter().all(TruncatedPoly::is_zero) {
            continue;
        }
        let psi = flow(&x, 1);
        let psi_inv = flow(&x, -1);
        g = compose_maps(&psi_inv, &compose_maps(&g, &psi).unwrap()).unwrap();
        fields.push((k, x));
    }
    ClassicalNormalForm { map: g, fields }
}

/// True when every nonlinear term `c x^m` of component `i` has `mu^m = mu_i`.
pub fn only_resonant_terms(map: &[TruncatedPoly], mu: &MultiplierVector) -> bool {
    map.iter().enumerate().all(|(i, p)| {
        p.terms()
            .filter(|(m, _)| m.degree() >= 2)
            .all(|(m, _)| mu.power(&m.as_signed()).unwrap() == mu.as_slice()[i])
    })
}

/// `g ∘ f_lin = f_lin ∘ g` as jets.
pub fn commutes_with_linear_part(g: &[TruncatedPoly], mu: &MultiplierVector) -> bool {
    let nu = g.len();
    let degree = g[0].degree();
    let lin: Vec<TruncatedPoly> = (0..nu)
        .map(|i| TruncatedPoly::var(nu, degree, i).scale(&mu.as_slice()[i]))
        .collect();
    compose_maps(g, &lin).unwrap() == compose_maps(&lin, g).unwrap()
}

/// Koenigs recursion in one variable: the tangent-to-identity `t` with
/// `t ∘ f = mu t`, from `a_k (mu^k - mu) = -[x^k] sum_{j<k} a_j f^j`.
pub fn koenigs(f: &PreparedDiffeo) -> TruncatedPoly {
    assert_eq!(f.nu(), 1);
    let n = f.degree();
    let mu = f.mu().as_slice()[0].clone();
    let fmap = f.map().unwrap().remove(0);
    let powers: Vec<TruncatedPoly> = (0..=n).map(|j| fmap.pow(j)).collect();
    let mut a = vec![Scalar::zero(); n as usize + 1];
    a[1] = Scalar::one();
    for k in 2..=n {
        let xk = Exponent::new(vec![k]);
        let mut rhs = Scalar::zero();
        for j in 1..k {
            rhs += &(&a[j as usize] * &powers[j as usize].coeff(&xk));
        }
        let gap = mu.pow(k as i64).unwrap() - mu.clone();
        a[k as usize] = (-rhs).checked_div(&gap).unwrap();
    }
    TruncatedPoly::from_terms(
        1,
        n,
        a.into_iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| (Exponent::new(vec![k as u32]), c)),
    )
    .unwrap()
}
