//! Seeded random samples: scalars, moulds and prepared diffeomorphisms.

use std::sync::Arc;

use rand::Rng;

use crate::alphabet::TruncationContext;
use crate::diffeo::PreparedDiffeo;
use crate::error::Result;
use crate::mould::Mould;
use crate::poly::{Exponent, PolySpace, TruncatedPoly};
use crate::scalar::{MultiplierVector, Scalar};

/// `p/q` with `|p| <= bound` and `1 <= q <= bound`.
pub fn random_rational<R: Rng>(rng: &mut R, bound: i64) -> Scalar {
    Scalar::ratio(rng.gen_range(-bound..=bound), rng.gen_range(1..=bound))
}

/// A nonzero `p/q` with `|p| <= bound` and `1 <= q <= bound`.
pub fn random_nonzero<R: Rng>(rng: &mut R, bound: i64) -> Scalar {
    loop {
        let s = random_rational(rng, bound);
        if !s.is_zero() {
            return s;
        }
    }
}

/// A mould with small random rational values, and the given value on the
/// empty word.
pub fn random_mould<R: Rng>(rng: &mut R, ctx: &Arc<TruncationContext>, empty: Scalar) -> Mould {
    let mut m = Mould::zero(ctx);
    for w in ctx.words() {
        let v = if w.is_empty() {
            empty.clone()
        } else {
            random_rational(rng, 3)
        };
        m.set(w, v).expect("word in context");
    }
    m
}

/// A mould supported on words of length 1.
pub fn random_length1_mould<R: Rng>(rng: &mut R, ctx: &Arc<TruncationContext>) -> Mould {
    let mut m = Mould::zero(ctx);
    for w in ctx.words().iter().filter(|w| w.len() == 1) {
        m.set(w, random_rational(rng, 3)).expect("word in context");
    }
    m
}

/// `terms` random monomials of degree `2..=max_deg` with small rational
/// coefficients.
pub fn random_poly<R: Rng>(
    rng: &mut R,
    nu: usize,
    degree: u32,
    max_deg: u32,
    terms: usize,
) -> TruncatedPoly {
    let space = PolySpace::new(nu, max_deg.min(degree));
    let candidates: Vec<&Exponent> = space
        .monomials()
        .iter()
        .filter(|m| m.degree() >= 2)
        .collect();
    let mut p = TruncatedPoly::zero(nu, degree);
    if candidates.is_empty() {
        return p;
    }
    for _ in 0..terms {
        let m = candidates[rng.gen_range(0..candidates.len())].clone();
        p.add_term(m, random_nonzero(rng, 3));
    }
    p
}

/// A prepared diffeomorphism with `terms` random nonlinear terms per
/// component, all of degree at most `max_deg`.
pub fn random_diffeo<R: Rng>(
    rng: &mut R,
    mu: &MultiplierVector,
    degree: u32,
    max_deg: u32,
    terms: usize,
) -> Result<PreparedDiffeo> {
    let nu = mu.dim();
    let h = (0..nu)
        .map(|_| random_poly(rng, nu, degree, max_deg, terms))
        .collect();
    PreparedDiffeo::new(mu.clone(), h, degree)
}
