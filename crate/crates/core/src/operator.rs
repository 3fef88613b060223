//! Linear operators on the truncated polynomial algebra.
//!
//! An [`OperatorSeries`] is stored as its graded pieces: for every shift `d`
//! a [`HomOperator`] sending `x^m` to `c_m x^{m+d}`. Composition adds shifts,
//! so products, `exp`, `log` and conjugation stay graded and exact.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::alphabet::{Letter, TruncationContext};
use crate::error::{Error, Result};
use crate::mould::Mould;
use crate::poly::{Exponent, PolySpace, TruncatedPoly};
use crate::scalar::{MultiplierVector, Scalar};

/// The shift of a homogeneous operator, ordered by total degree and then
/// lexicographically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Shift(pub Vec<i32>);

impl Shift {
    pub fn weight(&self) -> i32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &Shift) -> Shift {
        Shift(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl Ord for Shift {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Shift {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Shift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::alphabet::fmt_vec(&self.0))
    }
}

/// `x^m -> c_m x^{m+shift}`, keyed by the index of `m` in the basis.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct HomOperator {
    action: BTreeMap<usize, Scalar>,
}

impl HomOperator {
    pub fn coeff(&self, input: usize) -> Option<&Scalar> {
        self.action.get(&input)
    }

    /// `(input index, coefficient)` pairs with nonzero coefficient.
    pub fn entries(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.action.iter().map(|(&i, c)| (i, c))
    }

    pub fn is_zero(&self) -> bool {
        self.action.is_empty()
    }

    fn add_entry(&mut self, input: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.action.entry(input) {
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
}

/// A linear endomorphism of the truncated algebra, split by shift.
#[derive(Clone)]
pub struct OperatorSeries {
    space: Arc<PolySpace>,
    parts: BTreeMap<Shift, HomOperator>,
}

impl PartialEq for OperatorSeries {
    fn eq(&self, other: &Self) -> bool {
        self.space.same_as(&other.space) && self.parts == other.parts
    }
}

impl OperatorSeries {
    pub fn zero(space: &Arc<PolySpace>) -> Self {
        OperatorSeries {
            space: Arc::clone(space),
            parts: BTreeMap::new(),
        }
    }

    pub fn identity(space: &Arc<PolySpace>) -> Self {
        OperatorSeries::diagonal(space, |_| Ok(Scalar::one())).expect("infallible")
    }

    /// `x^m -> d(m) x^m`.
    pub fn diagonal(
        space: &Arc<PolySpace>,
        d: impl Fn(&Exponent) -> Result<Scalar>,
    ) -> Result<Self> {
        let mut s = OperatorSeries::zero(space);
        for (i, m) in space.monomials().iter().enumerate() {
            s.add_entry(&Shift(vec![0; space.nu()]), i, d(m)?);
        }
        Ok(s)
    }

    /// `F_lin`: `x^m -> mu^m x^m`.
    pub fn flin(space: &Arc<PolySpace>, mu: &MultiplierVector) -> Result<Self> {
        OperatorSeries::diagonal(space, |m| mu.power(&m.as_signed()))
    }

    /// The operator whose column `j` is `cols[j]`, the image of the `j`-th
    /// basis monomial.
    pub fn from_columns(space: &Arc<PolySpace>, cols: &[TruncatedPoly]) -> Result<Self> {
        if cols.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                got: cols.len(),
            });
        }
        let mut s = OperatorSeries::zero(space);
        for (j, col) in cols.iter().enumerate() {
            if col.nu() != space.nu() || col.degree() != space.degree() {
                return Err(Error::SpaceMismatch);
            }
            let m = &space.monomials()[j];
            for (out, c) in col.terms() {
                s.add_entry(&Shift(m.shift_to(out)), j, c.clone());
            }
        }
        Ok(s)
    }

    /// The substitution operator `phi -> phi ∘ g`.
    pub fn from_substitution(space: &Arc<PolySpace>, g: &[TruncatedPoly]) -> Result<Self> {
        let nu = space.nu();
        if g.len() != nu {
            return Err(Error::LengthMismatch {
                expected: nu,
                got: g.len(),
            });
        }
        if g.iter().any(|p| !p.constant_term().is_zero()) {
            return Err(Error::Precondition(
                "substitution needs a map fixing the origin".into(),
            ));
        }
        let mut cols: Vec<TruncatedPoly> = Vec::with_capacity(space.len());
        for m in space.monomials() {
            let col = match m.as_slice().iter().position(|&e| e > 0) {
                None => TruncatedPoly::constant(nu, space.degree(), Scalar::one()),
                Some(i) => {
                    let mut prev = m.as_slice().to_vec();
                    prev[i] -= 1;
                    let k = space
                        .index_of(&Exponent::new(prev))
                        .expect("lower monomial");
                    cols[k].mul(&g[i])?
                }
            };
            cols.push(col);
        }
        OperatorSeries::from_columns(space, &cols)
    }

    pub fn space(&self) -> &Arc<PolySpace> {
        &self.space
    }

    pub fn parts(&self) -> impl Iterator<Item = (&Shift, &HomOperator)> {
        self.parts.iter()
    }

    pub fn part(&self, shift: &[i32]) -> Option<&HomOperator> {
        self.parts.get(&Shift(shift.to_vec()))
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// Shifts of the nonzero parts of positive weight, as letters.
    pub fn letters(&self) -> Vec<Letter> {
        self.parts
            .keys()
            .filter(|s| s.weight() >= 1)
            .map(|s| Letter::new(s.0.clone()).expect("positive weight"))
            .collect()
    }

    /// The sum of the parts of positive weight.
    pub fn raising_part(&self) -> OperatorSeries {
        self.filter_parts(|s| s.weight() >= 1)
    }

    /// The sum of the parts whose shift satisfies `keep`.
    pub fn filter_parts(&self, keep: impl Fn(&Shift) -> bool) -> OperatorSeries {
        OperatorSeries {
            space: Arc::clone(&self.space),
            parts: self
                .parts
                .iter()
                .filter(|(s, _)| keep(s))
                .map(|(s, h)| (s.clone(), h.clone()))
                .collect(),
        }
    }

    /// Every part raises the total degree.
    pub fn is_raising(&self) -> bool {
        self.parts.keys().all(|s| s.weight() >= 1)
    }

    pub fn is_identity(&self) -> bool {
        *self == OperatorSeries::identity(&self.space)
    }

    pub fn add_entry(&mut self, shift: &Shift, input: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let part = self.parts.entry(shift.clone()).or_default();
        part.add_entry(input, c);
        if part.is_zero() {
            self.parts.remove(shift);
        }
    }

    fn check(&self, other: &OperatorSeries) -> Result<()> {
        if self.space.same_as(&other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// The image of the `j`-th basis monomial.
    pub fn column(&self, j: usize) -> TruncatedPoly {
        let s = &self.space;
        let mut p = TruncatedPoly::zero(s.nu(), s.degree());
        for (shift, h) in &self.parts {
            if let Some(c) = h.coeff(j) {
                let out = s.monomials()[j].shifted(&shift.0).expect("valid output");
                p.add_term(out, c.clone());
            }
        }
        p
    }

    pub fn apply(&self, phi: &TruncatedPoly) -> Result<TruncatedPoly> {
        let s = &self.space;
        if phi.nu() != s.nu() || phi.degree() != s.degree() {
            return Err(Error::SpaceMismatch);
        }
        let mut out = TruncatedPoly::zero(s.nu(), s.degree());
        for (m, c) in phi.terms() {
            let j = s.index_of(m).expect("monomial in space");
            for (shift, h) in &self.parts {
                if let Some(v) = h.coeff(j) {
                    out.add_term(m.shifted(&shift.0).expect("valid output"), c * v);
                }
            }
        }
        Ok(out)
    }

    /// The images of the coordinate functions `x_1, ..., x_nu`.
    pub fn images(&self) -> Vec<TruncatedPoly> {
        let nu = self.space.nu();
        (0..nu)
            .map(|i| {
                let j = self
                    .space
                    .index_of(&Exponent::unit(nu, i))
                    .expect("degree at least 1");
                self.column(j)
            })
            .collect()
    }

    /// The map represented by the automorphism `F_lin . self`:
    /// `(F_lin(P x_1), ..., F_lin(P x_nu))`.
    pub fn to_map(&self, mu: &MultiplierVector) -> Result<Vec<TruncatedPoly>> {
        self.images().iter().map(|p| p.flin_apply(mu)).collect()
    }

    pub fn add(&self, other: &OperatorSeries) -> Result<OperatorSeries> {
        self.check(other)?;
        let mut s = self.clone();
        for (shift, h) in &other.parts {
            for (j, c) in h.entries() {
                s.add_entry(shift, j, c.clone());
            }
        }
        Ok(s)
    }

    pub fn sub(&self, other: &OperatorSeries) -> Result<OperatorSeries> {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> OperatorSeries {
        let mut s = OperatorSeries::zero(&self.space);
        for (shift, h) in &self.parts {
            for (j, v) in h.entries() {
                s.add_entry(shift, j, v * c);
            }
        }
        s
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &OperatorSeries) -> Result<OperatorSeries> {
        self.check(other)?;
        let space = &self.space;
        let pieces: Vec<(Shift, Vec<(usize, Scalar)>)> = other
            .parts
            .par_iter()
            .flat_map_iter(|(sb, hb)| {
                self.parts.iter().filter_map(move |(sa, ha)| {
                    let mut entries = Vec::new();
                    for (j, cb) in hb.entries() {
                        let mid = space.shift_index(j, &sb.0).expect("valid output");
                        if let Some(ca) = ha.coeff(mid) {
                            entries.push((j, ca * cb));
                        }
                    }
                    (!entries.is_empty()).then(|| (sa.add(sb), entries))
                })
            })
            .collect();
        let mut s = OperatorSeries::zero(space);
        for (shift, entries) in pieces {
            for (j, c) in entries {
                s.add_entry(&shift, j, c);
            }
        }
        Ok(s)
    }

    pub fn pow(&self, k: usize) -> OperatorSeries {
        let mut acc = OperatorSeries::identity(&self.space);
        for _ in 0..k {
            acc = acc.compose(self).expect("same space");
        }
        acc
    }

    /// `[self, other] = self other - other self`.
    pub fn bracket(&self, other: &OperatorSeries) -> Result<OperatorSeries> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    fn require_raising(&self, what: &str) -> Result<()> {
        if self.is_raising() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "{what} needs an operator raising the total degree"
            )))
        }
    }

    /// `sum_k X^k / k!` for degree-raising `X`; the sum stops once every
    /// term is truncated away.
    pub fn exp(&self) -> Result<OperatorSeries> {
        self.require_raising("exp")?;
        let mut acc = OperatorSeries::identity(&self.space);
        let mut term = OperatorSeries::identity(&self.space);
        for k in 1..=self.space.degree() as i64 {
            term = term.compose(self)?.scale(&Scalar::ratio(1, k));
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// `log(Id + X) = sum_k (-1)^{k+1} X^k / k` for degree-raising `X`.
    pub fn log(&self) -> Result<OperatorSeries> {
        let x = self.unipotent_part("log")?;
        let mut acc = OperatorSeries::zero(&self.space);
        let mut term = OperatorSeries::identity(&self.space);
        for k in 1..=self.space.degree() as i64 {
            term = term.compose(&x)?;
            if term.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&term.scale(&Scalar::ratio(sign, k)))?;
        }
        Ok(acc)
    }

    /// Inverse of `Id + X` for degree-raising `X`.
    pub fn inverse(&self) -> Result<OperatorSeries> {
        let x = self.unipotent_part("inverse")?;
        let minus_x = x.scale(&-Scalar::one());
        let mut acc = OperatorSeries::identity(&self.space);
        let mut term = OperatorSeries::identity(&self.space);
        for _ in 1..=self.space.degree() {
            term = term.compose(&minus_x)?;
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// `self - Id`, which must raise the degree.
    fn unipotent_part(&self, what: &str) -> Result<OperatorSeries> {
        let x = self.sub(&OperatorSeries::identity(&self.space))?;
        if !x.is_raising() {
            return Err(Error::Precondition(format!(
                "{what} needs Id plus a degree-raising operator"
            )));
        }
        Ok(x)
    }

    /// `F_lin^{-1} . self . F_lin`: the part of shift `d` is scaled by
    /// `mu^{-d}`.
    pub fn twist(&self, mu: &MultiplierVector) -> Result<OperatorSeries> {
        let mut s = OperatorSeries::zero(&self.space);
        for (shift, h) in &self.parts {
            let neg: Vec<i32> = shift.0.iter().map(|c| -c).collect();
            let f = mu.power(&neg)?;
            for (j, c) in h.entries() {
                s.add_entry(shift, j, c * &f);
            }
        }
        Ok(s)
    }

    /// Whether `self ∘ F_lin = F_lin ∘ self` on the whole truncated basis.
    pub fn commutes_with_flin(&self, mu: &MultiplierVector) -> Result<bool> {
        let flin = OperatorSeries::flin(&self.space, mu)?;
        Ok(self.compose(&flin)? == flin.compose(self)?)
    }

    /// Whether every nonzero part has a resonant shift.
    pub fn parts_resonant(&self, mu: &MultiplierVector) -> Result<bool> {
        for shift in self.parts.keys() {
            if !mu.is_resonant(&shift.0)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Debug for OperatorSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_map();
        for (shift, h) in &self.parts {
            let entries: Vec<String> = h
                .entries()
                .map(|(j, c)| format!("{}:{}", self.space.monomials()[j], c))
                .collect();
            d.entry(shift, &entries);
        }
        d.finish()
    }
}

/// `sum_w M^w B_w` with `B_w = B_{w_1} ∘ ... ∘ B_{w_r}`, where the `B_n` are
/// the positive-weight parts of `parts`.
///
/// Every nonzero positive-weight part must be a letter of the mould's
/// context; `parts` must not have a shift-zero component.
pub fn mould_expand(m: &Mould, parts: &OperatorSeries) -> Result<OperatorSeries> {
    let ctx: &TruncationContext = m.ctx();
    let space = parts.space();
    if ctx.nu() != space.nu() {
        return Err(Error::LengthMismatch {
            expected: ctx.nu(),
            got: space.nu(),
        });
    }
    let mut letters = Vec::new();
    for (shift, h) in parts.parts() {
        if shift.weight() < 1 {
            return Err(Error::Precondition(format!(
                "expansion parts must raise the degree; found shift {shift:?}"
            )));
        }
        let l = Letter::new(shift.0.clone())?;
        if !ctx.letters().contains(&l) {
            return Err(Error::Precondition(format!(
                "part of degree {l} is not a letter of the mould's alphabet"
            )));
        }
        letters.push((l, shift.clone(), h));
    }
    let max_weight = ctx.max_weight();
    let columns: Vec<Vec<(usize, Scalar)>> = (0..space.len())
        .into_par_iter()
        .map(|j| {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            let mut push = |out: usize, c: Scalar| {
                if !c.is_zero() {
                    *acc.entry(out).or_default() += &c;
                }
            };
            push(j, m.empty_value().clone());
            // Depth-first over words, growing them on the left: the
            // rightmost letter acts first.
            let mut stack: Vec<(Vec<Letter>, u32, usize, Scalar)> =
                vec![(Vec::new(), 0, j, Scalar::one())];
            while let Some((suffix, weight, at, coeff)) = stack.pop() {
                for (l, shift, h) in &letters {
                    let w = weight + l.weight();
                    if w > max_weight {
                        continue;
                    }
                    let Some(c) = h.coeff(at) else { continue };
                    let out = space.shift_index(at, &shift.0).expect("valid output");
                    let c = c * &coeff;
                    let mut word = Vec::with_capacity(suffix.len() + 1);
                    word.push(l.clone());
                    word.extend_from_slice(&suffix);
                    let idx = ctx.index_of_slice(&word).expect("word in context");
                    push(out, m.at(idx) * &c);
                    stack.push((word, w, out, c));
                }
            }
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
        })
        .collect();
    let mut s = OperatorSeries::zero(space);
    for (j, col) in columns.into_iter().enumerate() {
        let m = &space.monomials()[j];
        for (out, c) in col {
            let shift = Shift(m.shift_to(&space.monomials()[out]));
            s.add_entry(&shift, j, c);
        }
    }
    Ok(s)
}
