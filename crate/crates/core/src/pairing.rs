//! Gödel pairing on ordinals.
//!
//! Pairs are ordered by their maximum, then lexicographically, and `pair`
//! returns the order type of the pairs strictly below `(a, b)`. With
//! `m = max(a, b)` this is `sq(m) + a` when `a < m` and `sq(m) + m + b`
//! otherwise, where `sq(m)` counts the pairs with both components below `m`.
//! `sq` obeys `sq(γ+1) = sq(γ) + γ + γ + 1` and is continuous at limits.
//!
//! Infinite arguments are supported below `ω^ω`.

use crate::ordinal::{Ordinal, OrdinalError};

/// Finite closed form of the pairing.
pub fn pair_finite(a: u64, b: u64) -> u64 {
    let m = a.max(b);
    if a < m {
        m * m + a
    } else {
        m * m + m + b
    }
}

pub fn unpair_finite(c: u64) -> (u64, u64) {
    let m = c.isqrt();
    let r = c - m * m;
    if r < m {
        (r, m)
    } else {
        (m, r - m)
    }
}

fn finite_exponent(x: &Ordinal) -> Result<u64, OrdinalError> {
    match x.leading_exponent() {
        None => Ok(0),
        Some(e) => e
            .as_finite()
            .ok_or_else(|| OrdinalError::UnsupportedRange(x.clone())),
    }
}

/// Order type of `{(a, b) : max(a, b) < m}` under the Gödel order.
pub fn square(m: &Ordinal) -> Result<Ordinal, OrdinalError> {
    finite_exponent(m)?;
    if let Some(n) = m.as_finite() {
        let sq = n
            .checked_mul(n)
            .ok_or_else(|| OrdinalError::UnsupportedRange(m.clone()))?;
        return Ok(Ordinal::finite(sq));
    }
    // Walk the blocks of m from the bottom: a block of length ω^k (k ≥ 1)
    // starting at β > 0 contributes ω^(lead(β)+k); starting at 0 it
    // contributes sq(ω^k) = ω^(2k-1). A finite run of c successor steps
    // above an infinite β contributes β·2·c + c.
    let mut acc = Ordinal::zero();
    let mut base = Ordinal::zero();
    for (exp, coeff) in m.terms() {
        let k = exp.as_finite().expect("checked above");
        if k == 0 {
            let two_c = coeff
                .checked_mul(2)
                .ok_or_else(|| OrdinalError::UnsupportedRange(m.clone()))?;
            acc = acc
                .add(&base.mul_finite(two_c))
                .add(&Ordinal::finite(coeff));
            base = base.add(&Ordinal::finite(coeff));
            continue;
        }
        let mut remaining = coeff;
        if base.is_zero() {
            acc = acc.add(&Ordinal::w_pow(Ordinal::finite(2 * k - 1)));
            base = Ordinal::w_pow(Ordinal::finite(k));
            remaining -= 1;
        }
        if remaining > 0 {
            let lead = base.leading_exponent().expect("nonzero").clone();
            acc = acc.add(&Ordinal::monomial(lead.add(&Ordinal::finite(k)), remaining));
            base = base.add(&Ordinal::monomial(exp.clone(), remaining));
        }
    }
    Ok(acc)
}

/// Gödel pairing. Errors for arguments at or above `ω^ω`.
pub fn pair(a: &Ordinal, b: &Ordinal) -> Result<Ordinal, OrdinalError> {
    if let (Some(x), Some(y)) = (a.as_finite(), b.as_finite()) {
        let m = x.max(y);
        if m.checked_mul(m).and_then(|s| s.checked_add(2 * m)).is_some() {
            return Ok(Ordinal::finite(pair_finite(x, y)));
        }
    }
    let m = a.max(b);
    let base = square(m)?;
    Ok(if a < m {
        base.add(a)
    } else {
        base.add(m).add(b)
    })
}

/// Inverse of [`pair`]. Errors for codes at or above `ω^ω`.
pub fn unpair(c: &Ordinal) -> Result<(Ordinal, Ordinal), OrdinalError> {
    if let Some(n) = c.as_finite() {
        let (a, b) = unpair_finite(n);
        return Ok((Ordinal::finite(a), Ordinal::finite(b)));
    }
    let deg = finite_exponent(c)?;
    let m = square_root(c, deg)?;
    let r = c
        .sub_left(&square(&m)?)
        .expect("square(m) <= c by construction");
    if r < m {
        Ok((r, m))
    } else {
        let b = r.sub_left(&m).expect("r >= m");
        Ok((m, b))
    }
}

/// Largest `m` with `square(m) <= c`, built digit by digit from the top
/// exponent down. `square(ω^k) = ω^(2k-1)` bounds the top exponent.
fn square_root(c: &Ordinal, deg: u64) -> Result<Ordinal, OrdinalError> {
    let top = deg.div_ceil(2) + 1;
    let mut prefix = Ordinal::zero();
    for k in (0..=top).rev() {
        let fits = |q: u64| -> Result<bool, OrdinalError> {
            let cand = prefix.add(&Ordinal::monomial(Ordinal::finite(k), q));
            Ok(square(&cand)? <= *c)
        };
        if !fits(1)? {
            continue;
        }
        let mut lo = 1u64;
        let mut hi = 2u64;
        while fits(hi)? {
            lo = hi;
            hi = hi
                .checked_mul(2)
                .ok_or_else(|| OrdinalError::UnsupportedRange(c.clone()))?;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if fits(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        prefix = prefix.add(&Ordinal::monomial(Ordinal::finite(k), lo));
    }
    Ok(prefix)
}
