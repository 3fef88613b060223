//! Continuous prenormal forms: simplification, trimming, the Poincaré-Dulac
//! procedure and formal linearization, together with the verifier.
//!
//! Every procedure works on the substitution operator `F = F_lin P` of a
//! prepared diffeomorphism and only ever stores `P`. A stage conjugates by
//! `exp(V)` with `V = sum G^m D_m`, where `G` is a cancellation mould on the
//! current D-letters:
//!
//! ```text
//! exp(V) F exp(-V) = F_lin . twist(exp V) . P . exp(-V)
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::alphabet::{Letter, TruncationContext, Word};
use crate::diffeo::{cancel_factor, conjugate, context_of, PreparedDiffeo};
use crate::error::{Error, Result};
use crate::mould::{factorial, Mould};
use crate::operator::{mould_expand, OperatorSeries};
use crate::scalar::{MultiplierVector, Scalar};

/// Which nonresonant letters a stage cancels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection {
    /// Every nonresonant letter (simplification).
    AllNonresonant,
    /// Only nonresonant letters of the given weight (Poincaré step).
    Weight(u32),
}

impl Selection {
    fn selects(self, mu: &MultiplierVector, d: &[i32]) -> Result<bool> {
        if let Selection::Weight(k) = self {
            if d.iter().sum::<i32>() != k as i32 {
                return Ok(false);
            }
        }
        Ok(!mu.is_resonant(d)?)
    }
}

/// `Dem` (or `Den`): `1 / (1 - mu^{-m})` on selected single letters `m`,
/// zero on every other word.
pub fn cancellation_mould(ctx: &Arc<TruncationContext>, sel: Selection) -> Result<Mould> {
    let mu = ctx.mu();
    Mould::try_from_fn(ctx, |w| {
        if w.len() != 1 {
            return Ok(Scalar::zero());
        }
        let d = w.letters()[0].deg();
        if sel.selects(mu, d)? {
            cancel_factor(mu, d)
        } else {
            Ok(Scalar::zero())
        }
    })
}

/// `dem` (or `den`) on B-words: `Dem^{||n||} (Log(1 + I))^n`, i.e.
/// `(-1)^{l+1} / l` times the cancellation factor of the norm.
pub fn cancellation_mould_b(ctx: &Arc<TruncationContext>, sel: Selection) -> Result<Mould> {
    let mu = ctx.mu();
    let nu = ctx.nu();
    Mould::try_from_fn(ctx, |w| {
        if w.is_empty() {
            return Ok(Scalar::zero());
        }
        let norm = w.norm(nu);
        if !sel.selects(mu, &norm)? {
            return Ok(Scalar::zero());
        }
        let l = w.len() as i64;
        let sign = if l % 2 == 1 { 1 } else { -1 };
        Ok(cancel_factor(mu, &norm)?.scale(sign, l))
    })
}

/// `Sem` (or `Poin`) from its generator: `e^Δ(Exp G) . Exp I . Exp(-G)`.
pub fn simplified_mould(generator: &Mould) -> Result<Mould> {
    let ctx = generator.ctx();
    generator
        .exp()?
        .edelta()?
        .mul(&Mould::id(ctx).exp()?)?
        .mul(&generator.neg().exp()?)
}

/// `sem` (or `poin`) from its B-side generator:
/// `e^Δ(Exp g) . (1 + I) . Exp(-g)`.
pub fn simplified_mould_b(generator: &Mould) -> Result<Mould> {
    let ctx = generator.ctx();
    generator
        .exp()?
        .edelta()?
        .mul(&Mould::one(ctx).add(&Mould::id(ctx))?)?
        .mul(&generator.neg().exp()?)
}

/// Closed formula for the value of [`simplified_mould`] on one word.
///
/// With `δ_i` the cancellation factor of the `i`-th letter (0 when it is
/// not selected), `d` the position of the last letter with `δ = 0` and `q`
/// one less than the position of the first such letter (or `l`):
///
/// ```text
/// G(w)  = sum_{j = d+1}^{l+1} (-1)^{l-j+1} δ_j...δ_l / ((j-1)! (l-j+1)!)
/// S(w)  = G(w) + sum_{i=1}^{min(q, l-1)} mu^{-||w_{<=i}||} δ_1...δ_i / i! G(w_{>i})
///              + [q = l] mu^{-||w||} δ_1...δ_l / l!
/// ```
pub fn explicit_simplified(ctx: &TruncationContext, w: &Word, sel: Selection) -> Result<Scalar> {
    let mu = ctx.mu();
    let nu = ctx.nu();
    let delta = w
        .letters()
        .iter()
        .map(|l| {
            if sel.selects(mu, l.deg())? {
                cancel_factor(mu, l.deg())
            } else {
                Ok(Scalar::zero())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let l = delta.len();
    let tail = |start: usize| -> Scalar {
        let sub = &delta[start..];
        let ll = sub.len();
        let d = sub.iter().rposition(Scalar::is_zero).map_or(0, |p| p + 1);
        let mut acc = Scalar::zero();
        for j in (d + 1).max(1)..=ll + 1 {
            let prod: Scalar = sub[j - 1..].iter().cloned().product();
            let sign = if (ll + 1 - j) % 2 == 0 { 1 } else { -1 };
            acc += prod.scale(sign, factorial(j - 1) * factorial(ll + 1 - j));
        }
        acc
    };
    let q = delta.iter().position(Scalar::is_zero).unwrap_or(l);
    let head = |i: usize| -> Result<Scalar> {
        let norm: Vec<i32> = w.letters()[..i].iter().fold(vec![0; nu], |acc, x| {
            acc.iter().zip(x.deg()).map(|(a, b)| a - b).collect()
        });
        let prod: Scalar = delta[..i].iter().cloned().product();
        Ok((prod * mu.power(&norm)?).scale(1, factorial(i)))
    };
    let mut total = tail(0);
    for i in 1..=q.min(l.saturating_sub(1)) {
        total += head(i)? * tail(i);
    }
    if l >= 1 && q == l {
        total += head(l)?;
    }
    Ok(total)
}

/// The degree of resonance and the nonresonant letters of each weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResonanceProfile {
    pub degree: Option<u32>,
    pub nonresonant: BTreeMap<u32, Vec<Letter>>,
}

pub fn resonance_profile(mu: &MultiplierVector, letters: &[Letter]) -> Result<ResonanceProfile> {
    let mut nonresonant: BTreeMap<u32, Vec<Letter>> = BTreeMap::new();
    for l in letters {
        if !mu.is_resonant(l.deg())? {
            nonresonant.entry(l.weight()).or_default().push(l.clone());
        }
    }
    Ok(ResonanceProfile {
        degree: nonresonant.keys().next().copied(),
        nonresonant,
    })
}

/// `Θ^{n_1...n_r} = prod_i (mu^{-(n_i + ... + n_r)} - 1)^{-1}`, the
/// linearizing mould on B-words.
pub fn linearization_mould(ctx: &Arc<TruncationContext>) -> Result<Mould> {
    let mu = ctx.mu();
    let nu = ctx.nu();
    Mould::try_from_fn(ctx, |w| {
        let mut acc = Scalar::one();
        let mut suffix = vec![0i32; nu];
        for l in w.letters().iter().rev() {
            for (s, c) in suffix.iter_mut().zip(l.deg()) {
                *s -= c;
            }
            let denom = mu.power(&suffix)? - Scalar::one();
            if denom.is_zero() {
                return Err(Error::SingularLinearization(w.to_string()));
            }
            acc = acc * denom.inv()?;
        }
        Ok(acc)
    })
}

/// Which procedure produced a trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Procedure {
    Trim,
    Dulac,
}

impl Procedure {
    pub fn name(self) -> &'static str {
        match self {
            Procedure::Trim => "trim",
            Procedure::Dulac => "dulac",
        }
    }

    /// File stems of the generator, D-side and B-side stage moulds.
    pub fn stage_mould_names(self) -> [&'static str; 3] {
        match self {
            Procedure::Trim => ["Dem", "Sem", "sem"],
            Procedure::Dulac => ["Den", "Poin", "poin"],
        }
    }

    /// File stems of the universal D-side and B-side moulds.
    pub fn universal_names(self) -> [&'static str; 2] {
        match self {
            Procedure::Trim => ["Trem", "trem"],
            Procedure::Dulac => ["Dulac", "dulac"],
        }
    }
}

/// One conjugation step `P -> twist(exp V) P exp(-V)`.
#[derive(Clone, Debug)]
pub struct Stage {
    pub index: usize,
    pub selection: Selection,
    pub b_ctx: Arc<TruncationContext>,
    pub d_ctx: Arc<TruncationContext>,
    /// `Dem` or `Den` on `d_ctx`.
    pub generator: Mould,
    /// `Sem` or `Poin` on `d_ctx`.
    pub simplified_d: Mould,
    /// `sem` or `poin` on `b_ctx`.
    pub simplified_b: Mould,
    /// `P` before the step.
    pub operator: OperatorSeries,
    /// The derivation `V`.
    pub vector_field: OperatorSeries,
}

impl Stage {
    /// `exp(V)`.
    pub fn normalizer(&self) -> Result<OperatorSeries> {
        self.vector_field.exp()
    }
}

#[derive(Clone, Debug)]
pub struct NormalizationTrace {
    pub procedure: Procedure,
    pub diffeo: PreparedDiffeo,
    pub stages: Vec<Stage>,
    /// `P` of the final form `F_lin P`.
    pub final_operator: OperatorSeries,
    /// `Trem` or `Dulac` on the D-alphabet of `f`.
    pub universal_d: Mould,
    /// `trem` or `dulac` on the B-alphabet of `f`.
    pub universal_b: Mould,
    pub stationary: bool,
}

impl NormalizationTrace {
    /// `Θ = exp(V_r) ... exp(V_1)`, so that `Θ F Θ^{-1}` is the final form.
    pub fn normalizer(&self) -> Result<OperatorSeries> {
        let mut acc = OperatorSeries::identity(self.diffeo.space());
        for s in &self.stages {
            acc = s.normalizer()?.compose(&acc)?;
        }
        Ok(acc)
    }

    /// The final form as a polynomial map.
    pub fn final_map(&self) -> Result<Vec<crate::poly::TruncatedPoly>> {
        self.final_operator.to_map(self.diffeo.mu())
    }
}

/// The D- and B-side contexts of an operator `P = Id + sum B`.
pub fn stage_contexts(
    mu: &MultiplierVector,
    p: &OperatorSeries,
    max_weight: u32,
) -> Result<(Arc<TruncationContext>, Arc<TruncationContext>)> {
    let d = p.log()?;
    Ok((
        context_of(mu, &d, max_weight)?,
        context_of(mu, &p.raising_part(), max_weight)?,
    ))
}

/// Runs one stage on `P` with the given selection.
pub fn run_stage(
    index: usize,
    mu: &MultiplierVector,
    p: &OperatorSeries,
    max_weight: u32,
    selection: Selection,
) -> Result<(Stage, OperatorSeries)> {
    let d = p.log()?;
    let d_ctx = context_of(mu, &d, max_weight)?;
    let b_ctx = context_of(mu, &p.raising_part(), max_weight)?;
    let generator = cancellation_mould(&d_ctx, selection)?;
    let simplified_d = simplified_mould(&generator)?;
    let simplified_b = simplified_mould_b(&cancellation_mould_b(&b_ctx, selection)?)?;
    let vector_field = mould_expand(&generator, &d)?;
    let next = step(mu, p, &vector_field)?;
    Ok((
        Stage {
            index,
            selection,
            b_ctx,
            d_ctx,
            generator,
            simplified_d,
            simplified_b,
            operator: p.clone(),
            vector_field,
        },
        next,
    ))
}

/// `twist(exp V) P exp(-V)`.
pub fn step(
    mu: &MultiplierVector,
    p: &OperatorSeries,
    v: &OperatorSeries,
) -> Result<OperatorSeries> {
    let e = v.exp()?;
    let e_inv = v.scale(&-Scalar::one()).exp()?;
    e.twist(mu)?.compose(p)?.compose(&e_inv)
}

fn nonresonant_letters(mu: &MultiplierVector, p: &OperatorSeries) -> Result<Vec<Letter>> {
    let mut out = Vec::new();
    for l in p.log()?.letters() {
        if !mu.is_resonant(l.deg())? {
            out.push(l);
        }
    }
    Ok(out)
}

fn iterate(f: &PreparedDiffeo, procedure: Procedure) -> Result<NormalizationTrace> {
    let mu = f.mu();
    let w = f.max_weight();
    let cap = f.degree() as usize;
    let mut p = f.substitution()?;
    let mut stages = Vec::new();
    loop {
        let remaining = nonresonant_letters(mu, &p)?;
        if remaining.is_empty() {
            break;
        }
        if stages.len() >= cap {
            let listed: Vec<String> = remaining
                .iter()
                .map(|l| format!("{l} (weight {})", l.weight()))
                .collect();
            return Err(Error::NotStationary {
                iterations: stages.len(),
                diagnostic: format!("nonresonant letters left: {}", listed.join(", ")),
            });
        }
        let selection = match procedure {
            Procedure::Trim => Selection::AllNonresonant,
            Procedure::Dulac => Selection::Weight(
                remaining
                    .iter()
                    .map(Letter::weight)
                    .min()
                    .expect("nonempty"),
            ),
        };
        let (stage, next) = run_stage(stages.len(), mu, &p, w, selection)?;
        stages.push(stage);
        p = next;
    }
    let (d_ctx, b_ctx) = stage_contexts(mu, &f.substitution()?, w)?;
    let (universal_d, universal_b) = match procedure {
        Procedure::Trim => universal_trim(&d_ctx, &b_ctx)?,
        Procedure::Dulac => universal_dulac(&d_ctx, &b_ctx)?,
    };
    Ok(NormalizationTrace {
        procedure,
        diffeo: f.clone(),
        stages,
        final_operator: p,
        universal_d,
        universal_b,
        stationary: true,
    })
}

/// Iterated simplification up to its stationary limit.
pub fn trim_iterate(f: &PreparedDiffeo) -> Result<NormalizationTrace> {
    iterate(f, Procedure::Trim)
}

/// The Poincaré procedure: each stage cancels the nonresonant letters of
/// the lowest weight present.
pub fn dulac_iterate(f: &PreparedDiffeo) -> Result<NormalizationTrace> {
    iterate(f, Procedure::Dulac)
}

/// The stationary limit of `x -> step(x)` starting at `start`, within
/// `cap` applications.
fn limstat(start: Mould, cap: usize, step: impl Fn(&Mould) -> Result<Mould>) -> Result<Mould> {
    let mut x = start;
    for _ in 0..=cap {
        let next = step(&x)?;
        if next == x {
            return Ok(x);
        }
        x = next;
    }
    Err(Error::NotStationary {
        iterations: cap,
        diagnostic: "universal mould iteration did not settle".into(),
    })
}

/// `Trem = Exp(limstat (Log Sem)^{∘r})` and `trem = 1 + limstat (sem - 1)^{∘r}`.
pub fn universal_trim(
    d_ctx: &Arc<TruncationContext>,
    b_ctx: &Arc<TruncationContext>,
) -> Result<(Mould, Mould)> {
    let log_sem =
        simplified_mould(&cancellation_mould(d_ctx, Selection::AllNonresonant)?)?.log()?;
    let cap = d_ctx.max_weight() as usize + 1;
    let big = limstat(log_sem.clone(), cap, |x| log_sem.compose(x))?.exp()?;
    let sem_minus = simplified_mould_b(&cancellation_mould_b(b_ctx, Selection::AllNonresonant)?)?
        .sub(&Mould::one(b_ctx))?;
    let cap = b_ctx.max_weight() as usize + 1;
    let small =
        limstat(sem_minus.clone(), cap, |x| sem_minus.compose(x))?.add(&Mould::one(b_ctx))?;
    Ok((big, small))
}

/// `Dulac = Exp(Log Poin_W ∘ ... ∘ Log Poin_1)` and
/// `dulac = 1 + (poin_W - 1) ∘ ... ∘ (poin_1 - 1)`, where stage `K` cancels
/// the nonresonant letters of weight `K`.
pub fn universal_dulac(
    d_ctx: &Arc<TruncationContext>,
    b_ctx: &Arc<TruncationContext>,
) -> Result<(Mould, Mould)> {
    let mut big = Mould::id(d_ctx);
    for k in 1..=d_ctx.max_weight() {
        let log_poin =
            simplified_mould(&cancellation_mould(d_ctx, Selection::Weight(k))?)?.log()?;
        big = log_poin.compose(&big)?;
    }
    let mut small = Mould::id(b_ctx);
    for k in 1..=b_ctx.max_weight() {
        let poin = simplified_mould_b(&cancellation_mould_b(b_ctx, Selection::Weight(k))?)?;
        small = poin.sub(&Mould::one(b_ctx))?.compose(&small)?;
    }
    Ok((big.exp()?, small.add(&Mould::one(b_ctx))?))
}

/// Result of [`linearize`].
#[derive(Clone, Debug)]
pub struct Linearization {
    /// The mould `Θ` on the B-alphabet of `f`.
    pub theta: Mould,
    /// `T = sum Θ^n B_n`, satisfying `T^{-1} F T = F_lin` when `check` holds.
    pub normalizer: OperatorSeries,
    /// `P'` with `T^{-1} F T = F_lin P'`.
    pub conjugated: OperatorSeries,
    pub check: bool,
}

/// Conjugates `F` by the expansion of the linearization mould and checks
/// that the result is `F_lin` exactly.
pub fn linearize(f: &PreparedDiffeo) -> Result<Linearization> {
    let b = f.extract_b()?;
    let ctx = context_of(f.mu(), &b, f.max_weight())?;
    let theta = linearization_mould(&ctx)?;
    let normalizer = mould_expand(&theta, &b)?;
    let conjugated = conjugate(&normalizer.inverse()?, &f.substitution()?, f.mu())?;
    let check = conjugated.is_identity();
    Ok(Linearization {
        theta,
        normalizer,
        conjugated,
        check,
    })
}

/// The moulds the command line can tabulate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedMould {
    Dem,
    DemB,
    Sem,
    SemB,
    Den,
    Poin,
    PoinB,
    Trem,
    TremB,
    Dulac,
    DulacB,
    LinearizationTheta,
}

impl NamedMould {
    pub const ALL: [NamedMould; 12] = [
        NamedMould::Dem,
        NamedMould::DemB,
        NamedMould::Sem,
        NamedMould::SemB,
        NamedMould::Den,
        NamedMould::Poin,
        NamedMould::PoinB,
        NamedMould::Trem,
        NamedMould::TremB,
        NamedMould::Dulac,
        NamedMould::DulacB,
        NamedMould::LinearizationTheta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedMould::Dem => "Dem",
            NamedMould::DemB => "dem",
            NamedMould::Sem => "Sem",
            NamedMould::SemB => "sem",
            NamedMould::Den => "Den",
            NamedMould::Poin => "Poin",
            NamedMould::PoinB => "poin",
            NamedMould::Trem => "Trem",
            NamedMould::TremB => "trem",
            NamedMould::Dulac => "Dulac",
            NamedMould::DulacB => "dulac",
            NamedMould::LinearizationTheta => "LinearizationTheta",
        }
    }

    /// Evaluates the mould on the alphabets of `f`, with words up to
    /// `max_weight`.
    pub fn compute(self, f: &PreparedDiffeo, max_weight: u32) -> Result<Mould> {
        let mu = f.mu();
        let p = f.substitution()?;
        let (d_ctx, b_ctx) = stage_contexts(mu, &p, max_weight)?;
        let poincare = || -> Result<Selection> {
            let k = resonance_profile(mu, &p.log()?.letters())?.degree;
            // with nothing to cancel, select an empty weight
            Ok(Selection::Weight(k.unwrap_or(0)))
        };
        match self {
            NamedMould::Dem => cancellation_mould(&d_ctx, Selection::AllNonresonant),
            NamedMould::DemB => cancellation_mould_b(&b_ctx, Selection::AllNonresonant),
            NamedMould::Sem => {
                simplified_mould(&cancellation_mould(&d_ctx, Selection::AllNonresonant)?)
            }
            NamedMould::SemB => {
                simplified_mould_b(&cancellation_mould_b(&b_ctx, Selection::AllNonresonant)?)
            }
            NamedMould::Den => cancellation_mould(&d_ctx, poincare()?),
            NamedMould::Poin => simplified_mould(&cancellation_mould(&d_ctx, poincare()?)?),
            NamedMould::PoinB => simplified_mould_b(&cancellation_mould_b(&b_ctx, poincare()?)?),
            NamedMould::Trem => Ok(universal_trim(&d_ctx, &b_ctx)?.0),
            NamedMould::TremB => Ok(universal_trim(&d_ctx, &b_ctx)?.1),
            NamedMould::Dulac => Ok(universal_dulac(&d_ctx, &b_ctx)?.0),
            NamedMould::DulacB => Ok(universal_dulac(&d_ctx, &b_ctx)?.1),
            NamedMould::LinearizationTheta => linearization_mould(&b_ctx),
        }
    }
}

impl FromStr for NamedMould {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        NamedMould::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = NamedMould::ALL.iter().map(|m| m.name()).collect();
                Error::parse(
                    s,
                    format!("unknown mould; expected one of {}", known.join(", ")),
                )
            })
    }
}

/// One named check of a [`Report`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of [`verify_prenormal`]; failures are entries, not errors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    /// Records the outcome of a fallible check; an error counts as a failure.
    pub fn record(&mut self, name: impl Into<String>, outcome: Result<bool>) {
        match outcome {
            Ok(ok) => self.push(name, ok, ""),
            Err(e) => self.push(name, false, e.to_string()),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                writeln!(f, "{tag} {}", c.name)?;
            } else {
                writeln!(f, "{tag} {}: {}", c.name, c.detail)?;
            }
        }
        let failed = self.failures().count();
        writeln!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

fn vanishes_off_resonance(m: &Mould) -> bool {
    (0..m.ctx().len()).all(|i| m.ctx().word_is_resonant(i) || m.at(i).is_zero())
}

/// Re-checks a trace against `f` without trusting any derived quantity:
/// chained conjugacy, the stage identities on both alphabets, commutation
/// with `F_lin`, resonant support of the universal moulds, and the
/// procedure-specific identities.
pub fn verify_prenormal(trace: &NormalizationTrace, f: &PreparedDiffeo) -> Report {
    let mut r = Report::default();
    let mu = f.mu();
    let p0 = match f.substitution() {
        Ok(p) => p,
        Err(e) => {
            r.push("initial operator", false, e.to_string());
            return r;
        }
    };
    let first = trace
        .stages
        .first()
        .map_or(&trace.final_operator, |s| &s.operator);
    r.push("initial operator", *first == p0, "");

    for (i, s) in trace.stages.iter().enumerate() {
        let next = trace
            .stages
            .get(i + 1)
            .map_or(&trace.final_operator, |t| &t.operator);
        r.record(
            format!("stage {i} conjugacy"),
            step(mu, &s.operator, &s.vector_field).map(|c| c == *next),
        );
        r.record(
            format!("stage {i} generator"),
            (|| {
                let d = s.operator.log()?;
                let b = s.operator.raising_part();
                let via_d = mould_expand(&s.generator, &d)?;
                let via_b = mould_expand(&cancellation_mould_b(&s.b_ctx, s.selection)?, &b)?;
                let expected = cancellation_mould(&s.d_ctx, s.selection)?;
                Ok(via_d == s.vector_field && via_b == s.vector_field && expected == s.generator)
            })(),
        );
        r.record(
            format!("stage {i} simplified form"),
            (|| {
                let d = s.operator.log()?;
                let b = s.operator.raising_part();
                Ok(mould_expand(&s.simplified_d, &d)? == *next
                    && mould_expand(&s.simplified_b, &b)? == *next)
            })(),
        );
        if let Selection::Weight(k) = s.selection {
            r.record(
                format!("stage {i} removes weight {k}"),
                nonresonant_letters(mu, next).map(|left| left.iter().all(|l| l.weight() > k)),
            );
        }
    }

    r.record(
        "chained conjugacy",
        trace
            .normalizer()
            .and_then(|theta| conjugate(&theta, &p0, mu))
            .map(|c| c == trace.final_operator),
    );
    r.record(
        "commutes with F_lin",
        trace
            .final_operator
            .commutes_with_flin(mu)
            .and_then(|a| Ok(a && trace.final_operator.parts_resonant(mu)?)),
    );
    r.push(
        "resonant support",
        vanishes_off_resonance(&trace.universal_d) && vanishes_off_resonance(&trace.universal_b),
        "",
    );
    r.record(
        "universal expansion",
        (|| {
            let d = p0.log()?;
            let b = p0.raising_part();
            Ok(
                mould_expand(&trace.universal_d, &d)? == trace.final_operator
                    && mould_expand(&trace.universal_b, &b)? == trace.final_operator,
            )
        })(),
    );
    if trace.procedure == Procedure::Trim {
        r.record(
            "fixed point (D-alphabet)",
            trem_fixed_point_d(&trace.universal_d),
        );
        r.record(
            "fixed point (B-alphabet)",
            trem_fixed_point_b(&trace.universal_b),
        );
    }
    if !trace.stationary {
        r.push("stationary", false, "trace was not stationary");
    }
    r
}

/// `Log Trem = Log Sem ∘ Log Trem = Log Trem ∘ Log Sem`.
pub fn trem_fixed_point_d(trem: &Mould) -> Result<bool> {
    let ctx = trem.ctx();
    let log_sem = simplified_mould(&cancellation_mould(ctx, Selection::AllNonresonant)?)?.log()?;
    let log_trem = trem.log()?;
    Ok(log_sem.compose(&log_trem)? == log_trem && log_trem.compose(&log_sem)? == log_trem)
}

/// `trem - 1 = (sem - 1) ∘ (trem - 1) = (trem - 1) ∘ (sem - 1)`.
pub fn trem_fixed_point_b(trem: &Mould) -> Result<bool> {
    let ctx = trem.ctx();
    let one = Mould::one(ctx);
    let sem =
        simplified_mould_b(&cancellation_mould_b(ctx, Selection::AllNonresonant)?)?.sub(&one)?;
    let t = trem.sub(&one)?;
    Ok(sem.compose(&t)? == t && t.compose(&sem)? == t)
}
