//! Truncated polynomials in `nu` variables.
//!
//! Everything lives in `C[x] / m^{N+1}`: monomials of total degree above the
//! truncation degree are dropped as soon as they appear.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::alphabet::{fmt_vec, parse_vec};
use crate::error::{Error, Result};
use crate::scalar::{MultiplierVector, Scalar};

/// A monomial exponent `m` in `N^nu`.
///
/// Ordered by total degree, then with larger leading components first, so in
/// two variables `x^2 < xy < y^2`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(e: Vec<u32>) -> Self {
        Exponent(e)
    }

    pub fn zero(nu: usize) -> Self {
        Exponent(vec![0; nu])
    }

    /// The exponent of the coordinate `x_i` (0-based).
    pub fn unit(nu: usize, i: usize) -> Self {
        let mut e = vec![0; nu];
        e[i] = 1;
        Exponent(e)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `m + d`, or `None` when a component would become negative.
    pub fn shifted(&self, d: &[i32]) -> Option<Exponent> {
        self.0
            .iter()
            .zip(d)
            .map(|(&a, &b)| u32::try_from(a as i64 + b as i64).ok())
            .collect::<Option<Vec<_>>>()
            .map(Exponent)
    }

    /// `other - self` as a signed degree vector.
    pub fn shift_to(&self, other: &Exponent) -> Vec<i32> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| b as i32 - a as i32)
            .collect()
    }

    pub fn as_signed(&self) -> Vec<i32> {
        self.0.iter().map(|&a| a as i32).collect()
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_vec(&self.0))
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_vec(s)?
            .into_iter()
            .map(|c| u32::try_from(c).map_err(|_| Error::parse(s, "negative exponent")))
            .collect::<Result<Vec<_>>>()
            .map(Exponent)
    }
}

/// The monomial basis of `C[x_1..x_nu] / m^{N+1}`, in canonical order.
pub struct PolySpace {
    nu: usize,
    degree: u32,
    monomials: Vec<Exponent>,
    index: HashMap<Exponent, usize>,
}

impl PolySpace {
    pub fn new(nu: usize, degree: u32) -> Arc<Self> {
        let mut monomials = Vec::new();
        let mut cur = vec![0u32; nu];
        fill(&mut monomials, &mut cur, 0, degree);
        monomials.sort();
        let index = monomials
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        Arc::new(PolySpace {
            nu,
            degree,
            monomials,
            index,
        })
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn monomials(&self) -> &[Exponent] {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn index_of(&self, m: &Exponent) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Index of `monomial[i] + d`, if that is still a basis monomial.
    pub fn shift_index(&self, i: usize, d: &[i32]) -> Option<usize> {
        self.monomials[i].shifted(d).and_then(|m| self.index_of(&m))
    }

    pub fn same_as(&self, other: &PolySpace) -> bool {
        self.nu == other.nu && self.degree == other.degree
    }
}

impl fmt::Debug for PolySpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolySpace(nu={}, N={})", self.nu, self.degree)
    }
}

fn fill(out: &mut Vec<Exponent>, cur: &mut Vec<u32>, pos: usize, budget: u32) {
    if pos == cur.len() {
        out.push(Exponent(cur.clone()));
        return;
    }
    for e in 0..=budget {
        cur[pos] = e;
        fill(out, cur, pos + 1, budget - e);
    }
    cur[pos] = 0;
}

/// A polynomial truncated at total degree `N`, with no stored zero
/// coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedPoly {
    nu: usize,
    degree: u32,
    coeffs: BTreeMap<Exponent, Scalar>,
}

impl TruncatedPoly {
    pub fn zero(nu: usize, degree: u32) -> Self {
        TruncatedPoly {
            nu,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(nu: usize, degree: u32, c: Scalar) -> Self {
        TruncatedPoly::monomial(nu, degree, Exponent::zero(nu), c)
    }

    /// The coordinate function `x_i` (0-based).
    pub fn var(nu: usize, degree: u32, i: usize) -> Self {
        TruncatedPoly::monomial(nu, degree, Exponent::unit(nu, i), Scalar::one())
    }

    pub fn monomial(nu: usize, degree: u32, m: Exponent, c: Scalar) -> Self {
        let mut p = TruncatedPoly::zero(nu, degree);
        p.add_term(m, c);
        p
    }

    pub fn from_terms(
        nu: usize,
        degree: u32,
        terms: impl IntoIterator<Item = (Exponent, Scalar)>,
    ) -> Result<Self> {
        let mut p = TruncatedPoly::zero(nu, degree);
        for (m, c) in terms {
            if m.dim() != nu {
                return Err(Error::LengthMismatch {
                    expected: nu,
                    got: m.dim(),
                });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Adds `c x^m`, dropping it beyond the truncation.
    pub fn add_term(&mut self, m: Exponent, c: Scalar) {
        if c.is_zero() || m.degree() > self.degree {
            return;
        }
        match self.coeffs.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, m: &Exponent) -> Scalar {
        self.coeffs.get(m).cloned().unwrap_or_default()
    }

    /// Nonzero terms in canonical monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&Exponent::zero(self.nu))
    }

    /// Lowest total degree carrying a nonzero term.
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs.keys().map(Exponent::degree).min()
    }

    /// Keeps only the terms of total degree `k`.
    pub fn homogeneous_part(&self, k: u32) -> TruncatedPoly {
        let mut p = TruncatedPoly::zero(self.nu, self.degree);
        for (m, c) in self.terms().filter(|(m, _)| m.degree() == k) {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    fn check(&self, other: &TruncatedPoly) -> Result<()> {
        if self.nu != other.nu || self.degree != other.degree {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncatedPoly) -> Result<TruncatedPoly> {
        self.check(other)?;
        let mut p = self.clone();
        for (m, c) in other.terms() {
            p.add_term(m.clone(), c.clone());
        }
        Ok(p)
    }

    pub fn sub(&self, other: &TruncatedPoly) -> Result<TruncatedPoly> {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> TruncatedPoly {
        let mut p = TruncatedPoly::zero(self.nu, self.degree);
        for (m, v) in self.terms() {
            p.add_term(m.clone(), v * c);
        }
        p
    }

    pub fn mul(&self, other: &TruncatedPoly) -> Result<TruncatedPoly> {
        self.check(other)?;
        let mut p = TruncatedPoly::zero(self.nu, self.degree);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                if a.degree() + b.degree() <= self.degree {
                    p.add_term(a.add(b), ca * cb);
                }
            }
        }
        Ok(p)
    }

    pub fn pow(&self, k: u32) -> TruncatedPoly {
        let mut acc = TruncatedPoly::constant(self.nu, self.degree, Scalar::one());
        for _ in 0..k {
            acc = acc.mul(self).expect("same space");
        }
        acc
    }

    /// `phi ∘ g`, truncated. Every `g_i` must vanish at the origin.
    pub fn substitute(&self, g: &[TruncatedPoly]) -> Result<TruncatedPoly> {
        if g.len() != self.nu {
            return Err(Error::LengthMismatch {
                expected: self.nu,
                got: g.len(),
            });
        }
        for gi in g {
            if gi.nu != g[0].nu || gi.degree != self.degree {
                return Err(Error::SpaceMismatch);
            }
            if !gi.constant_term().is_zero() {
                return Err(Error::Precondition(
                    "substituted polynomials must vanish at the origin".into(),
                ));
            }
        }
        let nu_out = g.first().map_or(self.nu, |p| p.nu);
        let mut powers: Vec<Vec<TruncatedPoly>> = g
            .iter()
            .map(|gi| {
                vec![
                    TruncatedPoly::constant(nu_out, self.degree, Scalar::one()),
                    gi.clone(),
                ]
            })
            .collect();
        let mut out = TruncatedPoly::zero(nu_out, self.degree);
        for (m, c) in self.terms() {
            let mut term = TruncatedPoly::constant(nu_out, self.degree, c.clone());
            for (i, &e) in m.as_slice().iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&g[i])?;
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][e as usize])?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// `F_lin`: scales `x^m` by `mu^m`.
    pub fn flin_apply(&self, mu: &MultiplierVector) -> Result<TruncatedPoly> {
        self.monomial_scale(mu, 1)
    }

    /// `x^m -> mu^{sign m} x^m`.
    pub(crate) fn monomial_scale(&self, mu: &MultiplierVector, sign: i32) -> Result<TruncatedPoly> {
        let mut p = TruncatedPoly::zero(self.nu, self.degree);
        for (m, c) in self.terms() {
            let e: Vec<i32> = m.as_signed().iter().map(|a| a * sign).collect();
            p.add_term(m.clone(), c * &mu.power(&e)?);
        }
        Ok(p)
    }

    /// Moves to truncation degree `degree`, dropping terms above it.
    pub fn retruncate(&self, degree: u32) -> TruncatedPoly {
        let mut p = TruncatedPoly::zero(self.nu, degree);
        for (m, c) in self.terms() {
            p.add_term(m.clone(), c.clone());
        }
        p
    }
}

impl fmt::Debug for TruncatedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms().map(|(m, c)| format!("({c})x^{m}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// The identity map `(x_1, ..., x_nu)`.
pub fn identity_map(nu: usize, degree: u32) -> Vec<TruncatedPoly> {
    (0..nu).map(|i| TruncatedPoly::var(nu, degree, i)).collect()
}

/// `f ∘ g` for maps given by their coordinate polynomials.
pub fn compose_maps(f: &[TruncatedPoly], g: &[TruncatedPoly]) -> Result<Vec<TruncatedPoly>> {
    f.iter().map(|fi| fi.substitute(g)).collect()
}
