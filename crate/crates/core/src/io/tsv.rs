//! Tab-separated tables for moulds, jets, operators and letter listings.

use std::fmt::Write as _;
use std::sync::Arc;

use itertools::Itertools;

use crate::alphabet::{Letter, TruncationContext, Word};
use crate::error::{Error, Result};
use crate::mould::Mould;
use crate::operator::{OperatorSeries, Shift};
use crate::poly::{Exponent, PolySpace, TruncatedPoly};
use crate::scalar::{MultiplierVector, Scalar};

pub fn fmt_mu(mu: &MultiplierVector) -> String {
    format!("({})", mu.as_slice().iter().join(","))
}

/// Header line, column line, then one row per word in canonical order.
pub fn write_mould(m: &Mould, name: &str) -> String {
    let ctx = m.ctx();
    let mut out = format!(
        "# mould {name} nu={} mu={} maxWeight={}\nword\tvalue\n",
        ctx.nu(),
        fmt_mu(ctx.mu()),
        ctx.max_weight()
    );
    for (w, v) in ctx.words().iter().zip(m.values()) {
        writeln!(out, "{w}\t{v}").expect("write to string");
    }
    out
}

fn rows<'a>(text: &'a str, columns: &str, what: &str) -> Result<Vec<(usize, Vec<&'a str>)>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    match lines.next() {
        Some((_, l)) if l == columns => {}
        _ => {
            return Err(Error::parse(
                what,
                format!("missing column header `{columns}`"),
            ))
        }
    }
    let width = columns.split('\t').count();
    lines
        .map(|(i, l)| {
            let cells: Vec<&str> = l.split('\t').collect();
            if cells.len() != width {
                return Err(Error::parse(
                    l,
                    format!("{what}: line {} needs {width} columns", i + 1),
                ));
            }
            Ok((i + 1, cells))
        })
        .collect()
}

/// Reads a mould table into `ctx`; every listed word must belong to it.
pub fn parse_mould(text: &str, ctx: &Arc<TruncationContext>) -> Result<Mould> {
    let header = text
        .lines()
        .next()
        .ok_or_else(|| Error::parse("", "empty mould table"))?;
    let expected_tail = format!(
        "nu={} mu={} maxWeight={}",
        ctx.nu(),
        fmt_mu(ctx.mu()),
        ctx.max_weight()
    );
    if !header.starts_with("# mould ") || !header.ends_with(&expected_tail) {
        return Err(Error::parse(
            header,
            format!("expected a mould header ending in `{expected_tail}`"),
        ));
    }
    let entries = rows(text, "word\tvalue", "mould table")?
        .into_iter()
        .map(|(_, c)| Ok((c[0].parse::<Word>()?, c[1].parse::<Scalar>()?)))
        .collect::<Result<Vec<_>>>()?;
    Mould::from_entries(ctx, entries)
}

/// One row per nonzero coefficient: component (1-based), exponent,
/// coefficient; ordered by component, then monomial.
pub fn write_jet(map: &[TruncatedPoly]) -> String {
    let mut out = String::from("component\texponent\tcoefficient\n");
    for (i, p) in map.iter().enumerate() {
        for (m, c) in p.terms() {
            writeln!(out, "{}\t{m}\t{c}", i + 1).expect("write to string");
        }
    }
    out
}

pub fn parse_jet(text: &str, nu: usize, degree: u32) -> Result<Vec<TruncatedPoly>> {
    let mut map = vec![TruncatedPoly::zero(nu, degree); nu];
    for (line, c) in rows(text, "component\texponent\tcoefficient", "jet")? {
        let i: usize = c[0]
            .parse()
            .ok()
            .filter(|i| (1..=nu).contains(i))
            .ok_or_else(|| {
                Error::parse(c[0], format!("jet line {line}: component out of range"))
            })?;
        let m: Exponent = c[1].parse()?;
        if m.dim() != nu {
            return Err(Error::LengthMismatch {
                expected: nu,
                got: m.dim(),
            });
        }
        map[i - 1].add_term(m, c[2].parse()?);
    }
    Ok(map)
}

/// One row per nonzero matrix entry: shift, input exponent, coefficient.
pub fn write_operator(op: &OperatorSeries) -> String {
    let space = op.space();
    let mut out = String::from("shift\tinput\tcoefficient\n");
    for (shift, h) in op.parts() {
        let s = crate::alphabet::fmt_vec(&shift.0);
        for (j, c) in h.entries() {
            writeln!(out, "{s}\t{}\t{c}", space.monomials()[j]).expect("write to string");
        }
    }
    out
}

pub fn parse_operator(text: &str, space: &Arc<PolySpace>) -> Result<OperatorSeries> {
    let mut op = OperatorSeries::zero(space);
    for (line, c) in rows(text, "shift\tinput\tcoefficient", "operator")? {
        let shift = crate::alphabet::parse_vec(c[0])?;
        let m: Exponent = c[1].parse()?;
        let bad = || {
            Error::parse(
                c[1],
                format!("operator line {line}: monomial outside the truncation"),
            )
        };
        let j = space.index_of(&m).ok_or_else(bad)?;
        space.shift_index(j, &shift).ok_or_else(bad)?;
        op.add_entry(&Shift(shift), j, c[2].parse()?);
    }
    Ok(op)
}

/// Letters with their weight and resonance flag.
pub fn write_letters(letters: &[Letter], mu: &MultiplierVector) -> Result<String> {
    let mut out = String::from("letter\tweight\tresonant\n");
    for l in letters {
        writeln!(out, "{l}\t{}\t{}", l.weight(), mu.is_resonant(l.deg())?)
            .expect("write to string");
    }
    Ok(out)
}

pub fn parse_letters(text: &str) -> Result<Vec<Letter>> {
    rows(text, "letter\tweight\tresonant", "letter listing")?
        .into_iter()
        .map(|(_, c)| c[0].parse())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Arc<TruncationContext> {
        let mu = MultiplierVector::new(vec![Scalar::from_int(2), Scalar::complex((1, 2), (-1, 3))])
            .unwrap();
        let letters: Vec<Letter> = ["(1,0)", "(-1,2)"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        Arc::new(TruncationContext::new(mu, 3, &letters).unwrap())
    }

    #[test]
    fn mould_roundtrip() {
        let c = ctx();
        let m = Mould::from_fn(&c, |w| {
            Scalar::ratio(w.len() as i64 - 1, 1 + w.weight() as i64)
        });
        let text = write_mould(&m, "Test");
        assert!(text
            .starts_with("# mould Test nu=2 mu=(2,1/2-1/3i) maxWeight=3\nword\tvalue\n()\t-1\n"));
        assert_eq!(parse_mould(&text, &c).unwrap(), m);
        assert_eq!(write_mould(&parse_mould(&text, &c).unwrap(), "Test"), text);
    }

    #[test]
    fn jet_and_operator_roundtrip() {
        let x = TruncatedPoly::var(2, 3, 0);
        let y = TruncatedPoly::var(2, 3, 1);
        let map = vec![
            x.scale(&Scalar::from_int(2)).add(&y.pow(2)).unwrap(),
            y.add(&x.mul(&y).unwrap().scale(&Scalar::ratio(-1, 2)))
                .unwrap(),
        ];
        let text = write_jet(&map);
        assert_eq!(
            text,
            "component\texponent\tcoefficient\n1\t(1,0)\t2\n1\t(0,2)\t1\n2\t(0,1)\t1\n2\t(1,1)\t-1/2\n"
        );
        assert_eq!(parse_jet(&text, 2, 3).unwrap(), map);
        let space = PolySpace::new(2, 3);
        let op =
            OperatorSeries::from_substitution(&space, &[map[1].clone(), map[0].clone()]).unwrap();
        assert_eq!(parse_operator(&write_operator(&op), &space).unwrap(), op);
    }

    #[test]
    fn letters_roundtrip() {
        let c = ctx();
        let text = write_letters(c.letters(), c.mu()).unwrap();
        assert_eq!(parse_letters(&text).unwrap(), c.letters());
    }
}
