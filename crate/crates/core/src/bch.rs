//! Truncated Baker-Campbell-Hausdorff series for degree-raising operators.
//!
//! Only used to cross-check exact operator exponentials.

use crate::error::{Error, Result};
use crate::operator::OperatorSeries;
use crate::scalar::Scalar;

/// `A ⋆ B` up to brackets of the given order, so that
/// `exp(A) exp(B) = exp(A ⋆ B)` modulo longer brackets.
///
/// Order 4 includes the single fourth-order term `-[B,[A,[A,B]]]/24`.
pub fn bch_star(a: &OperatorSeries, b: &OperatorSeries, order: u32) -> Result<OperatorSeries> {
    if order == 0 || order > 4 {
        return Err(Error::Precondition(format!(
            "BCH order must be in 1..=4, got {order}"
        )));
    }
    let mut acc = a.add(b)?;
    if order >= 2 {
        let ab = a.bracket(b)?;
        acc = acc.add(&ab.scale(&Scalar::ratio(1, 2)))?;
        if order >= 3 {
            let a_ab = a.bracket(&ab)?;
            let b_ab = b.bracket(&ab)?;
            acc = acc
                .add(&a_ab.scale(&Scalar::ratio(1, 12)))?
                .sub(&b_ab.scale(&Scalar::ratio(1, 12)))?;
            if order == 4 {
                acc = acc.sub(&b.bracket(&a_ab)?.scale(&Scalar::ratio(1, 24)))?;
            }
        }
    }
    Ok(acc)
}

/// `sum_{m=0}^{depth} ad_A^m(B) / m!`, which equals `exp(A) B exp(-A)` once
/// `depth` reaches the truncation degree.
pub fn adjoint_series(
    a: &OperatorSeries,
    b: &OperatorSeries,
    depth: u32,
) -> Result<OperatorSeries> {
    let mut acc = b.clone();
    let mut term = b.clone();
    for m in 1..=depth as i64 {
        term = a.bracket(&term)?.scale(&Scalar::ratio(1, m));
        if term.is_zero() {
            break;
        }
        acc = acc.add(&term)?;
    }
    Ok(acc)
}
