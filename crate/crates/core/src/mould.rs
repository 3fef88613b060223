//! The mould algebra on a truncated alphabet.
//!
//! A [`Mould`] is a dense table of scalars indexed by the words of a
//! [`TruncationContext`]. Product, composition, `Exp`, `Log` and the
//! `e^Delta` twist are all computed exactly, word by word.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::alphabet::{TruncationContext, Word};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone)]
pub struct Mould {
    ctx: Arc<TruncationContext>,
    values: Vec<Scalar>,
}

impl Mould {
    pub fn zero(ctx: &Arc<TruncationContext>) -> Self {
        Mould {
            ctx: Arc::clone(ctx),
            values: vec![Scalar::zero(); ctx.len()],
        }
    }

    /// `1^•`: 1 on the empty word, 0 elsewhere.
    pub fn one(ctx: &Arc<TruncationContext>) -> Self {
        Mould::from_fn(ctx, |w| {
            if w.is_empty() {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        })
    }

    /// `I^•`: 1 on every word of length 1, 0 elsewhere.
    pub fn id(ctx: &Arc<TruncationContext>) -> Self {
        Mould::from_fn(ctx, |w| {
            if w.len() == 1 {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        })
    }

    pub fn from_fn(ctx: &Arc<TruncationContext>, f: impl Fn(&Word) -> Scalar) -> Self {
        Mould {
            ctx: Arc::clone(ctx),
            values: ctx.words().iter().map(f).collect(),
        }
    }

    pub fn try_from_fn(
        ctx: &Arc<TruncationContext>,
        f: impl Fn(&Word) -> Result<Scalar>,
    ) -> Result<Self> {
        Ok(Mould {
            ctx: Arc::clone(ctx),
            values: ctx.words().iter().map(f).collect::<Result<_>>()?,
        })
    }

    /// Builds a mould from explicit entries; words outside the context are
    /// rejected.
    pub fn from_entries(
        ctx: &Arc<TruncationContext>,
        entries: impl IntoIterator<Item = (Word, Scalar)>,
    ) -> Result<Self> {
        let mut m = Mould::zero(ctx);
        for (w, v) in entries {
            let idx = ctx
                .index_of(&w)
                .ok_or_else(|| Error::Precondition(format!("word {w} is not in the context")))?;
            m.values[idx] = v;
        }
        Ok(m)
    }

    pub fn ctx(&self) -> &Arc<TruncationContext> {
        &self.ctx
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn at(&self, idx: usize) -> &Scalar {
        &self.values[idx]
    }

    /// `M^w`; zero for words outside the truncation.
    pub fn get(&self, w: &Word) -> Scalar {
        self.ctx
            .index_of(w)
            .map(|i| self.values[i].clone())
            .unwrap_or_default()
    }

    pub fn set(&mut self, w: &Word, v: Scalar) -> Result<()> {
        let idx = self
            .ctx
            .index_of(w)
            .ok_or_else(|| Error::Precondition(format!("word {w} is not in the context")))?;
        self.values[idx] = v;
        Ok(())
    }

    pub fn empty_value(&self) -> &Scalar {
        // the empty word is always first in canonical order
        &self.values[0]
    }

    /// Nonzero entries in canonical word order.
    pub fn support(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.ctx
            .words()
            .iter()
            .zip(&self.values)
            .filter(|(_, v)| !v.is_zero())
    }

    /// Whether the mould vanishes on every word of length different from 1.
    pub fn is_length1_supported(&self) -> bool {
        self.support().all(|(w, _)| w.len() == 1)
    }

    fn check_ctx(&self, other: &Mould) -> Result<()> {
        if self.ctx.same_as(&other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    fn with_values(&self, values: Vec<Scalar>) -> Mould {
        Mould {
            ctx: Arc::clone(&self.ctx),
            values,
        }
    }

    pub fn add(&self, other: &Mould) -> Result<Mould> {
        self.check_ctx(other)?;
        Ok(self.with_values(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Mould) -> Result<Mould> {
        self.check_ctx(other)?;
        Ok(self.with_values(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }

    pub fn neg(&self) -> Mould {
        self.with_values(self.values.iter().map(|v| -v).collect())
    }

    pub fn scale(&self, c: &Scalar) -> Mould {
        self.with_values(self.values.iter().map(|v| v * c).collect())
    }

    /// `(M.N)^a = sum_{a1 a2 = a} M^{a1} N^{a2}`, empty factors included.
    pub fn mul(&self, other: &Mould) -> Result<Mould> {
        self.check_ctx(other)?;
        let splits = self.ctx.splits();
        let values = (0..self.values.len())
            .into_par_iter()
            .map(|i| {
                splits[i]
                    .iter()
                    .filter(|(p, s)| !self.values[*p].is_zero() && !other.values[*s].is_zero())
                    .map(|&(p, s)| &self.values[p] * &other.values[s])
                    .sum()
            })
            .collect();
        Ok(self.with_values(values))
    }

    /// `M^{×n}`, with `M^{×0} = 1^•`.
    pub fn power(&self, n: usize) -> Mould {
        let mut acc = Mould::one(&self.ctx);
        for _ in 0..n {
            acc = acc.mul(self).expect("same context");
        }
        acc
    }

    /// Inverse for the mould product, by recursion on the word length.
    pub fn inverse(&self) -> Result<Mould> {
        let c = self.empty_value().inv().map_err(|_| Error::NotInvertible)?;
        let splits = self.ctx.splits();
        let mut inv = vec![Scalar::zero(); self.values.len()];
        inv[0] = c.clone();
        for i in 1..inv.len() {
            // splits[i][0] has the empty prefix; skip it
            let s: Scalar = splits[i][1..]
                .iter()
                .filter(|(p, q)| !self.values[*p].is_zero() && !inv[*q].is_zero())
                .map(|&(p, q)| &self.values[p] * &inv[q])
                .sum();
            inv[i] = -(&c * &s);
        }
        Ok(self.with_values(inv))
    }

    /// `(M∘N)^a = sum over cuts a = a^1...a^k of M^{||a^1||...||a^k||} N^{a^1}...N^{a^k}`,
    /// with `(M∘N)^∅ = M^∅`. Requires `N^∅ = 0`.
    pub fn compose(&self, other: &Mould) -> Result<Mould> {
        self.check_ctx(other)?;
        if !other.empty_value().is_zero() {
            return Err(Error::Precondition(
                "the inner mould of a composition must vanish on the empty word".into(),
            ));
        }
        let cuts = self.ctx.cuts();
        let mut values: Vec<Scalar> = (0..self.values.len())
            .into_par_iter()
            .map(|i| {
                let mut acc = Scalar::zero();
                'cut: for cut in &cuts[i] {
                    let outer = &self.values[cut.norms];
                    if outer.is_zero() {
                        continue;
                    }
                    let mut term = outer.clone();
                    for &b in &cut.blocks {
                        let v = &other.values[b];
                        if v.is_zero() {
                            continue 'cut;
                        }
                        term = &term * v;
                    }
                    acc += &term;
                }
                acc
            })
            .collect();
        values[0] = self.empty_value().clone();
        Ok(self.with_values(values))
    }

    /// `Exp M = sum_n M^{×n} / n!`. Requires `M^∅ = 0`.
    pub fn exp(&self) -> Result<Mould> {
        if !self.empty_value().is_zero() {
            return Err(Error::Precondition(
                "Exp needs a mould vanishing on the empty word".into(),
            ));
        }
        let mut acc = Mould::one(&self.ctx);
        let mut term = Mould::one(&self.ctx);
        for n in 1..=self.max_len() {
            term = term.mul(self)?.scale(&Scalar::ratio(1, n as i64));
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// `Log M = sum_{n>=1} (-1)^{n+1} (M - 1^•)^{×n} / n`. Requires `M^∅ = 1`.
    pub fn log(&self) -> Result<Mould> {
        if !self.empty_value().is_one() {
            return Err(Error::Precondition(
                "Log needs a mould equal to 1 on the empty word".into(),
            ));
        }
        let x = self.sub(&Mould::one(&self.ctx))?;
        let mut acc = Mould::zero(&self.ctx);
        let mut pow = Mould::one(&self.ctx);
        for n in 1..=self.max_len() {
            pow = pow.mul(&x)?;
            let sign = if n % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&pow.scale(&Scalar::ratio(sign, n as i64)))?;
        }
        Ok(acc)
    }

    /// `(e^Δ M)^n = mu^{-||n||} M^n`.
    pub fn edelta(&self) -> Result<Mould> {
        let nu = self.ctx.nu();
        let mu = self.ctx.mu();
        let values = self
            .ctx
            .words()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| {
                if v.is_zero() || w.is_empty() {
                    return Ok(v.clone());
                }
                let n: Vec<i32> = w.norm(nu).iter().map(|x| -x).collect();
                Ok(v * &mu.power(&n)?)
            })
            .collect::<Result<_>>()?;
        Ok(self.with_values(values))
    }

    fn max_len(&self) -> usize {
        self.ctx.words().iter().map(Word::len).max().unwrap_or(0)
    }

    fn require_length1(&self) -> Result<()> {
        if self.is_length1_supported() {
            Ok(())
        } else {
            Err(Error::Precondition(
                "mould must vanish off words of length 1".into(),
            ))
        }
    }

    /// `[Z]_{×r}` for a mould supported on length-1 words:
    /// `Z^{a1}...Z^{ar}` on words of length `r`, 0 elsewhere.
    pub fn length1_power(&self, r: usize) -> Result<Mould> {
        self.require_length1()?;
        Ok(self.length1_map(|len, prod| if len == r { prod } else { Scalar::zero() }))
    }

    /// `Exp Z = 1^• + [Z]_{×l(a)} / l(a)!` for length-1-supported `Z`.
    pub fn length1_exp(&self) -> Result<Mould> {
        self.require_length1()?;
        Ok(self.length1_map(|len, prod| prod.scale(1, factorial(len))))
    }

    /// `Log(1^• + Z) = (-1)^{l+1} [Z]_{×l} / l` for length-1-supported `Z`.
    pub fn length1_log(&self) -> Result<Mould> {
        self.require_length1()?;
        Ok(self.length1_map(|len, prod| {
            if len == 0 {
                Scalar::zero()
            } else {
                let sign = if len % 2 == 1 { 1 } else { -1 };
                prod.scale(sign, len as i64)
            }
        }))
    }

    fn length1_map(&self, f: impl Fn(usize, Scalar) -> Scalar) -> Mould {
        let letter_value = |l: &crate::alphabet::Letter| self.get(&Word::single(l.clone()));
        let values = self
            .ctx
            .words()
            .iter()
            .map(|w| {
                let prod: Scalar = w.letters().iter().map(letter_value).product();
                f(w.len(), prod)
            })
            .collect();
        self.with_values(values)
    }
}

pub(crate) fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

impl PartialEq for Mould {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same_as(&other.ctx) && self.values == other.values
    }
}

impl fmt::Debug for Mould {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.support()).finish()
    }
}
