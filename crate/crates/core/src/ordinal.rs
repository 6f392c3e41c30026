//! Ordinals below ε₀ in Cantor normal form.
//!
//! An [`Ordinal`] is a finite, strictly decreasing sequence of terms
//! `ω^e · c` with `c ≥ 1`. Exponents are themselves ordinals, so nesting is
//! finite and every value lies below ε₀. The empty sequence is 0 and the
//! natural number `n` is the single term `ω^0 · n`.
//!
//! Text form: `0`, `5`, `w*1`, `w^2*3+w*1+5`, `w^(w*1+1)*2`. Canonical text
//! always carries the coefficient of infinite terms and omits `^1`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinalError {
    #[error("ordinal {0} is outside the supported range (below w^w)")]
    UnsupportedRange(Ordinal),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<Term>,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Term {
    exp: Ordinal,
    coeff: u64,
}

fn checked(v: Option<u64>) -> u64 {
    v.expect("ordinal coefficient overflow")
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Ordinal::finite(1)
    }

    pub fn omega() -> Self {
        Ordinal::w_pow(Ordinal::one())
    }

    pub fn finite(n: u64) -> Self {
        if n == 0 {
            Ordinal::zero()
        } else {
            Ordinal {
                terms: vec![Term {
                    exp: Ordinal::zero(),
                    coeff: n,
                }],
            }
        }
    }

    /// `ω^exp`.
    pub fn w_pow(exp: Ordinal) -> Self {
        Ordinal::monomial(exp, 1)
    }

    /// `ω^exp · coeff`; zero when `coeff == 0`.
    pub fn monomial(exp: Ordinal, coeff: u64) -> Self {
        if coeff == 0 {
            Ordinal::zero()
        } else {
            Ordinal {
                terms: vec![Term { exp, coeff }],
            }
        }
    }

    /// Builds an ordinal from `(exponent, coefficient)` pairs, checking the
    /// CNF invariants.
    pub fn from_terms<I>(terms: I) -> Option<Self>
    where
        I: IntoIterator<Item = (Ordinal, u64)>,
    {
        let terms: Vec<Term> = terms
            .into_iter()
            .map(|(exp, coeff)| Term { exp, coeff })
            .collect();
        if terms.iter().any(|t| t.coeff == 0) {
            return None;
        }
        if terms.windows(2).any(|w| w[0].exp <= w[1].exp) {
            return None;
        }
        Some(Ordinal { terms })
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Ordinal, u64)> {
        self.terms.iter().map(|t| (&t.exp, t.coeff))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.as_finite().is_some()
    }

    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exp.is_zero() => Some(t.coeff),
            _ => None,
        }
    }

    /// Limit ordinals are the nonzero ordinals with no successor term.
    pub fn is_limit(&self) -> bool {
        self.terms.last().is_some_and(|t| !t.exp.is_zero())
    }

    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exp.is_zero())
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    /// The immediate predecessor, if `self` is a successor.
    pub fn pred(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().unwrap();
        if last.coeff == 1 {
            terms.pop();
        } else {
            last.coeff -= 1;
        }
        Some(Ordinal { terms })
    }

    /// Exponent of the leading term; `None` for zero.
    pub fn leading_exponent(&self) -> Option<&Ordinal> {
        self.terms.first().map(|t| &t.exp)
    }

    /// The finite tail `n` in `self = λ + n`.
    pub fn finite_part(&self) -> u64 {
        match self.terms.last() {
            Some(t) if t.exp.is_zero() => t.coeff,
            _ => 0,
        }
    }

    /// The largest limit (or zero) below or equal to `self`.
    pub fn limit_part(&self) -> Ordinal {
        let mut terms = self.terms.clone();
        if terms.last().is_some_and(|t| t.exp.is_zero()) {
            terms.pop();
        }
        Ordinal { terms }
    }

    fn infinite_terms(&self) -> &[Term] {
        match self.terms.last() {
            Some(t) if t.exp.is_zero() => &self.terms[..self.terms.len() - 1],
            _ => &self.terms,
        }
    }

    /// Whether both lie in the same block `[λ, λ + ω)`, i.e. have the same
    /// limit part.
    pub fn same_segment(&self, other: &Ordinal) -> bool {
        self.infinite_terms() == other.infinite_terms()
    }

    /// The least limit ordinal strictly greater than `self`.
    pub fn next_limit(&self) -> Ordinal {
        self.limit_part().add(&Ordinal::omega())
    }

    pub fn add(&self, rhs: &Ordinal) -> Ordinal {
        let Some(head) = rhs.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .take_while(|t| t.exp > head.exp)
            .cloned()
            .collect();
        match self.terms.get(terms.len()) {
            Some(t) if t.exp == head.exp => {
                terms.push(Term {
                    exp: head.exp.clone(),
                    coeff: checked(t.coeff.checked_add(head.coeff)),
                });
                terms.extend(rhs.terms[1..].iter().cloned());
            }
            _ => terms.extend(rhs.terms.iter().cloned()),
        }
        Ordinal { terms }
    }

    pub fn mul(&self, rhs: &Ordinal) -> Ordinal {
        let Some(lead) = self.terms.first() else {
            return Ordinal::zero();
        };
        let mut acc = Ordinal::zero();
        for t in &rhs.terms {
            let part = if t.exp.is_zero() {
                let mut terms = self.terms.clone();
                terms[0].coeff = checked(lead.coeff.checked_mul(t.coeff));
                Ordinal { terms }
            } else {
                Ordinal::monomial(lead.exp.add(&t.exp), t.coeff)
            };
            acc = acc.add(&part);
        }
        acc
    }

    pub fn mul_finite(&self, n: u64) -> Ordinal {
        self.mul(&Ordinal::finite(n))
    }

    /// The unique `r` with `lower + r = self`, if `lower <= self`.
    pub fn sub_left(&self, lower: &Ordinal) -> Option<Ordinal> {
        if lower > self {
            return None;
        }
        for (i, (a, b)) in self.terms.iter().zip(&lower.terms).enumerate() {
            if a == b {
                continue;
            }
            let mut terms = Vec::with_capacity(self.terms.len() - i);
            if a.exp == b.exp {
                terms.push(Term {
                    exp: a.exp.clone(),
                    coeff: a.coeff - b.coeff,
                });
                terms.extend(self.terms[i + 1..].iter().cloned());
            } else {
                terms.extend(self.terms[i..].iter().cloned());
            }
            return Some(Ordinal { terms });
        }
        Some(Ordinal {
            terms: self.terms[lower.terms.len()..].to_vec(),
        })
    }

    /// Text rendering; identical to `Display`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<Ordinal, OrdinalError> {
        let mut p = TextParser {
            bytes: text.as_bytes(),
            pos: 0,
        };
        let value = p.ordinal()?;
        if p.pos != p.bytes.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(value)
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a.exp.cmp(&b.exp).then(a.coeff.cmp(&b.coeff));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::finite(n)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if t.exp.is_zero() {
                write!(f, "{}", t.coeff)?;
                continue;
            }
            f.write_str("w")?;
            match t.exp.as_finite() {
                Some(1) => {}
                Some(k) => write!(f, "^{k}")?,
                None => write!(f, "^({})", t.exp)?,
            }
            write!(f, "*{}", t.coeff)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ordinal::from_text(s)
    }
}

struct TextParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl TextParser<'_> {
    fn error(&self, msg: &str) -> OrdinalError {
        OrdinalError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<u64, OrdinalError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a natural number"));
        }
        let digits = &self.bytes[start..self.pos];
        if digits.len() > 1 && digits[0] == b'0' {
            return Err(OrdinalError::Parse {
                pos: start,
                msg: "leading zero".into(),
            });
        }
        std::str::from_utf8(digits)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(OrdinalError::Parse {
                pos: start,
                msg: "number too large".into(),
            })
    }

    fn ordinal(&mut self) -> Result<Ordinal, OrdinalError> {
        if self.peek() == Some(b'0') {
            let save = self.pos;
            self.pos += 1;
            if !self.peek().is_some_and(|b| b.is_ascii_digit()) {
                return Ok(Ordinal::zero());
            }
            self.pos = save;
        }
        let mut terms: Vec<Term> = Vec::new();
        loop {
            let start = self.pos;
            let term = self.term()?;
            if let Some(prev) = terms.last() {
                if prev.exp <= term.exp {
                    return Err(OrdinalError::Parse {
                        pos: start,
                        msg: "terms must have strictly decreasing exponents".into(),
                    });
                }
            }
            terms.push(term);
            if !self.eat(b'+') {
                break;
            }
        }
        Ok(Ordinal { terms })
    }

    fn term(&mut self) -> Result<Term, OrdinalError> {
        if self.peek().is_some_and(|b| b.is_ascii_digit()) {
            let n = self.nat()?;
            if n == 0 {
                return Err(self.error("zero term inside a sum"));
            }
            return Ok(Term {
                exp: Ordinal::zero(),
                coeff: n,
            });
        }
        if !self.eat(b'w') {
            return Err(self.error("expected 'w' or a natural number"));
        }
        let exp = if self.eat(b'^') {
            if self.eat(b'(') {
                let e = self.ordinal()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                e
            } else {
                Ordinal::finite(self.nat()?)
            }
        } else {
            Ordinal::one()
        };
        if exp.is_zero() {
            return Err(self.error("exponent 0 must be written as a natural number"));
        }
        let coeff = if self.eat(b'*') {
            let at = self.pos;
            let n = self.nat()?;
            if n == 0 {
                self.pos = at;
                return Err(self.error("coefficient must be positive"));
            }
            n
        } else {
            1
        };
        Ok(Term { exp, coeff })
    }
}
