//! Diffeomorphisms in prepared form and their homogeneous components.

use std::sync::Arc;

use crate::alphabet::{Letter, TruncationContext};
use crate::error::{Error, Result};
use crate::mould::Mould;
use crate::operator::OperatorSeries;
use crate::poly::{PolySpace, TruncatedPoly};
use crate::scalar::{MultiplierVector, Scalar};

/// `f(x) = diag(mu) x + h(x)` with every `h_i` of valuation at least 2,
/// truncated at degree `N`.
#[derive(Clone, Debug)]
pub struct PreparedDiffeo {
    mu: MultiplierVector,
    h: Vec<TruncatedPoly>,
    space: Arc<PolySpace>,
}

impl PreparedDiffeo {
    pub fn new(mu: MultiplierVector, h: Vec<TruncatedPoly>, degree: u32) -> Result<Self> {
        let nu = mu.dim();
        if degree < 1 {
            return Err(Error::Precondition(
                "truncation degree must be at least 1".into(),
            ));
        }
        if h.len() != nu {
            return Err(Error::LengthMismatch {
                expected: nu,
                got: h.len(),
            });
        }
        for (i, hi) in h.iter().enumerate() {
            if hi.nu() != nu {
                return Err(Error::SpaceMismatch);
            }
            if let Some(v) = hi.valuation() {
                if v < 2 {
                    return Err(Error::Precondition(format!(
                        "component {} of h has a term of degree {v}; prepared form needs degree >= 2",
                        i + 1
                    )));
                }
            }
        }
        let h = h.iter().map(|p| p.retruncate(degree)).collect();
        Ok(PreparedDiffeo {
            mu,
            h,
            space: PolySpace::new(nu, degree),
        })
    }

    /// `f = f_lin`.
    pub fn linear(mu: MultiplierVector, degree: u32) -> Result<Self> {
        let h = vec![TruncatedPoly::zero(mu.dim(), degree); mu.dim()];
        PreparedDiffeo::new(mu, h, degree)
    }

    pub fn nu(&self) -> usize {
        self.mu.dim()
    }

    pub fn mu(&self) -> &MultiplierVector {
        &self.mu
    }

    pub fn degree(&self) -> u32 {
        self.space.degree()
    }

    pub fn h(&self) -> &[TruncatedPoly] {
        &self.h
    }

    pub fn space(&self) -> &Arc<PolySpace> {
        &self.space
    }

    /// Largest word weight that can act nontrivially: a product of parts
    /// of total weight `N` sends every nonconstant monomial past degree `N`.
    pub fn max_weight(&self) -> u32 {
        self.degree().saturating_sub(1)
    }

    /// The coordinates of `f`.
    pub fn map(&self) -> Result<Vec<TruncatedPoly>> {
        let nu = self.nu();
        (0..nu)
            .map(|i| {
                TruncatedPoly::var(nu, self.degree(), i)
                    .scale(&self.mu.as_slice()[i])
                    .add(&self.h[i])
            })
            .collect()
    }

    /// `Id + sum B_n`: the operator `phi -> phi ∘ (Id + eps)` with
    /// `eps(x) = h(f_lin^{-1} x)`, so that `phi ∘ f = F_lin(P phi)`.
    pub fn substitution(&self) -> Result<OperatorSeries> {
        let nu = self.nu();
        let g = (0..nu)
            .map(|i| {
                let eps = self.h[i].monomial_scale(&self.mu, -1)?;
                TruncatedPoly::var(nu, self.degree(), i).add(&eps)
            })
            .collect::<Result<Vec<_>>>()?;
        OperatorSeries::from_substitution(&self.space, &g)
    }

    /// `sum B_n`, the homogeneous components of the substitution operator.
    pub fn extract_b(&self) -> Result<OperatorSeries> {
        Ok(self.substitution()?.raising_part())
    }

    /// `sum D_m = log(Id + sum B_n)`.
    pub fn extract_d(&self) -> Result<OperatorSeries> {
        self.substitution()?.log()
    }
}

/// The truncation context generated by the part shifts of `parts`, with
/// words up to `max_weight`.
pub fn context_of(
    mu: &MultiplierVector,
    parts: &OperatorSeries,
    max_weight: u32,
) -> Result<Arc<TruncationContext>> {
    let letters: Vec<Letter> = parts
        .letters()
        .into_iter()
        .filter(|l| l.weight() <= max_weight)
        .collect();
    Ok(Arc::new(TruncationContext::new(
        mu.clone(),
        max_weight,
        &letters,
    )?))
}

/// The operator `C` with `Θ F Θ^{-1} = F_lin C`, where `F = F_lin P`.
pub fn conjugate(
    theta: &OperatorSeries,
    p: &OperatorSeries,
    mu: &MultiplierVector,
) -> Result<OperatorSeries> {
    let inv = theta.inverse().map_err(|_| Error::NotInvertible)?;
    theta.twist(mu)?.compose(p)?.compose(&inv)
}

/// The mould side of [`conjugate`]: `C = e^Δ(Θ) (1 + I) Θ^{-1}`.
pub fn conjugate_mould(theta: &Mould) -> Result<Mould> {
    let ctx = theta.ctx();
    let one_plus_id = Mould::one(ctx).add(&Mould::id(ctx))?;
    theta.edelta()?.mul(&one_plus_id)?.mul(&theta.inverse()?)
}

/// Scalar helper: `1 / (1 - mu^{-d})`.
pub(crate) fn cancel_factor(mu: &MultiplierVector, d: &[i32]) -> Result<Scalar> {
    let neg: Vec<i32> = d.iter().map(|c| -c).collect();
    (Scalar::one() - mu.power(&neg)?).inv()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::mould_expand;
    use crate::poly::Exponent;

    fn mu(v: &[(i64, i64)]) -> MultiplierVector {
        MultiplierVector::new(v.iter().map(|&(p, q)| Scalar::ratio(p, q)).collect()).unwrap()
    }

    fn quadratic_1d(n: u32) -> PreparedDiffeo {
        let h = TruncatedPoly::monomial(1, n, Exponent::new(vec![2]), Scalar::one());
        PreparedDiffeo::new(mu(&[(2, 1)]), vec![h], n).unwrap()
    }

    #[test]
    fn zero_h_gives_empty_series() {
        let f = PreparedDiffeo::linear(mu(&[(2, 1), (1, 2)]), 4).unwrap();
        assert!(f.extract_b().unwrap().is_zero());
        assert!(f.extract_d().unwrap().is_zero());
    }

    #[test]
    fn extract_b_binomial_oracle() {
        // eps = x^2/4, so (Id + sum B)(x^m) = (x + x^2/4)^m
        let n = 5;
        let f = quadratic_1d(n);
        let p = f.substitution().unwrap();
        let g = TruncatedPoly::from_terms(
            1,
            n,
            [
                (Exponent::new(vec![1]), Scalar::one()),
                (Exponent::new(vec![2]), Scalar::ratio(1, 4)),
            ],
        )
        .unwrap();
        for (j, m) in f.space().monomials().iter().enumerate() {
            let mut expect = TruncatedPoly::constant(1, n, Scalar::one());
            for _ in 0..m.as_slice()[0] {
                expect = expect.mul(&g).unwrap();
            }
            assert_eq!(p.column(j), expect);
        }
        let b1 = f.extract_b().unwrap();
        let x1 = f.space().index_of(&Exponent::new(vec![1])).unwrap();
        assert_eq!(b1.part(&[1]).unwrap().coeff(x1), Some(&Scalar::ratio(1, 4)));
        let x2 = f.space().index_of(&Exponent::new(vec![2])).unwrap();
        assert_eq!(b1.part(&[1]).unwrap().coeff(x2), Some(&Scalar::ratio(1, 2)));
    }

    #[test]
    fn reconstruction_and_roundtrip() {
        let n = 4;
        let x = TruncatedPoly::var(2, n, 0);
        let y = TruncatedPoly::var(2, n, 1);
        let h = vec![
            x.mul(&y).unwrap().scale(&Scalar::ratio(1, 3)),
            x.pow(2).sub(&y.pow(3)).unwrap(),
        ];
        let f = PreparedDiffeo::new(mu(&[(2, 1), (1, 2)]), h, n).unwrap();
        let p = f.substitution().unwrap();
        let fmap = f.map().unwrap();
        for (j, m) in f.space().monomials().iter().enumerate() {
            let phi = TruncatedPoly::monomial(2, n, m.clone(), Scalar::one());
            assert_eq!(
                phi.substitute(&fmap).unwrap(),
                p.column(j).flin_apply(f.mu()).unwrap()
            );
        }
        assert_eq!(p.to_map(f.mu()).unwrap(), fmap);
    }

    #[test]
    fn single_part_log_is_itself() {
        // N = 3: the only nonzero part has weight 2, its square vanishes
        let h = TruncatedPoly::monomial(1, 3, Exponent::new(vec![3]), Scalar::from_int(5));
        let f = PreparedDiffeo::new(mu(&[(3, 1)]), vec![h], 3).unwrap();
        assert_eq!(f.extract_d().unwrap(), f.extract_b().unwrap());
    }

    #[test]
    fn alphabet_bridge() {
        let f = quadratic_1d(6);
        let b = f.extract_b().unwrap();
        let ctx = context_of(f.mu(), &b, f.max_weight()).unwrap();
        let log_id = Mould::one(&ctx)
            .add(&Mould::id(&ctx))
            .unwrap()
            .log()
            .unwrap();
        assert_eq!(mould_expand(&log_id, &b).unwrap(), f.extract_d().unwrap());
    }

    #[test]
    fn conjugation_paths_agree() {
        let f = quadratic_1d(5);
        let b = f.extract_b().unwrap();
        let p = f.substitution().unwrap();
        let ctx = context_of(f.mu(), &b, f.max_weight()).unwrap();
        // theta^∅ = 1, so the operator is invertible
        let theta = Mould::from_fn(&ctx, |w| {
            Scalar::ratio(w.len() as i64 + 1, 1 + w.weight() as i64)
        });
        let c_op = conjugate(&mould_expand(&theta, &b).unwrap(), &p, f.mu()).unwrap();
        let c_mould = mould_expand(&conjugate_mould(&theta).unwrap(), &b).unwrap();
        assert_eq!(c_op, c_mould);
        assert_eq!(
            conjugate(&OperatorSeries::identity(f.space()), &p, f.mu()).unwrap(),
            p
        );
    }

    #[test]
    fn rejects_linear_terms_in_h() {
        let h = TruncatedPoly::var(1, 3, 0);
        assert!(PreparedDiffeo::new(mu(&[(2, 1)]), vec![h], 3).is_err());
    }
}
