//! Hereditarily finite sets.
//!
//! A [`SetValue`] stores its elements in canonical order: descending under the
//! recursive order in which two sets are compared by their descending element
//! lists, lexicographically. Structural equality is extensional equality.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("set literal error at byte {pos}: {msg}")]
pub struct SetParseError {
    pub pos: usize,
    pub msg: String,
}

const MAX_LITERAL_DEPTH: usize = 256;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SetValue {
    children: Arc<[SetValue]>,
}

impl SetValue {
    pub fn empty() -> Self {
        SetValue::default()
    }

    /// Builds a set from arbitrary elements; duplicates are dropped.
    pub fn from_elements<I: IntoIterator<Item = SetValue>>(elems: I) -> Self {
        let mut v: Vec<SetValue> = elems.into_iter().collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v.dedup();
        SetValue { children: v.into() }
    }

    pub fn singleton(x: SetValue) -> Self {
        SetValue {
            children: vec![x].into(),
        }
    }

    /// Elements in canonical (descending) order.
    pub fn elements(&self) -> &[SetValue] {
        &self.children
    }

    /// Elements in ascending canonical order.
    pub fn ascending(&self) -> impl Iterator<Item = &SetValue> {
        self.children.iter().rev()
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn contains(&self, x: &SetValue) -> bool {
        self.children.binary_search_by(|c| x.cmp(c)).is_ok()
    }

    /// Canonical-least element.
    pub fn least(&self) -> Option<&SetValue> {
        self.children.last()
    }

    /// Canonical-greatest element.
    pub fn greatest(&self) -> Option<&SetValue> {
        self.children.first()
    }

    pub fn rank(&self) -> usize {
        self.children.iter().map(|c| c.rank() + 1).max().unwrap_or(0)
    }

    pub fn union(&self) -> SetValue {
        SetValue::from_elements(self.children.iter().flat_map(|c| c.children.iter().cloned()))
    }

    pub fn insert(&self, x: SetValue) -> SetValue {
        SetValue::from_elements(self.children.iter().cloned().chain([x]))
    }

    pub fn remove(&self, x: &SetValue) -> SetValue {
        SetValue::from_elements(self.children.iter().filter(|c| *c != x).cloned())
    }

    pub fn is_subset(&self, other: &SetValue) -> bool {
        self.children.iter().all(|c| other.contains(c))
    }

    /// `tc({self})` in breadth-first order from `self`, visiting elements in
    /// ascending canonical order.
    pub fn closure_bfs(&self) -> Vec<SetValue> {
        let mut seen: HashSet<SetValue> = HashSet::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::from([self.clone()]);
        seen.insert(self.clone());
        while let Some(x) = queue.pop_front() {
            for c in x.ascending() {
                if seen.insert(c.clone()) {
                    queue.push_back(c.clone());
                }
            }
            out.push(x);
        }
        out
    }

    /// The von Neumann natural `n = {0, …, n-1}`.
    pub fn natural(n: usize) -> SetValue {
        let mut acc = SetValue::empty();
        for _ in 0..n {
            acc = acc.insert(acc.clone());
        }
        acc
    }

    pub fn as_natural(&self) -> Option<usize> {
        let n = self.len();
        (*self == SetValue::natural(n)).then_some(n)
    }

    /// Kuratowski pair `{{a}, {a, b}}`.
    pub fn kpair(a: SetValue, b: SetValue) -> SetValue {
        let left = SetValue::singleton(a.clone());
        let right = SetValue::from_elements([a, b]);
        SetValue::from_elements([left, right])
    }

    pub fn as_kpair(&self) -> Option<(SetValue, SetValue)> {
        match self.elements() {
            [only] => match only.elements() {
                [a] => Some((a.clone(), a.clone())),
                _ => None,
            },
            [p, q] => {
                let (single, double) = if p.len() == 1 { (p, q) } else { (q, p) };
                let [a] = single.elements() else { return None };
                if double.len() != 2 || !double.contains(a) {
                    return None;
                }
                let b = double.elements().iter().find(|e| *e != a)?;
                Some((a.clone(), b.clone()))
            }
            _ => None,
        }
    }

    pub fn to_literal(&self) -> String {
        self.to_string()
    }

    pub fn from_literal(text: &str) -> Result<SetValue, SetParseError> {
        let mut p = LiteralParser {
            bytes: text.as_bytes(),
            pos: 0,
        };
        p.skip_ws();
        let v = p.set(0)?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(v)
    }
}

impl fmt::Display for SetValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            fmt::Display::fmt(c, f)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for SetValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for SetValue {
    type Err = SetParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SetValue::from_literal(s)
    }
}

struct LiteralParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl LiteralParser<'_> {
    fn error(&self, msg: &str) -> SetParseError {
        SetParseError {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.bytes.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn set(&mut self, depth: usize) -> Result<SetValue, SetParseError> {
        if depth > MAX_LITERAL_DEPTH {
            return Err(self.error("nesting too deep"));
        }
        if self.bytes.get(self.pos) != Some(&b'{') {
            return Err(self.error("expected '{'"));
        }
        self.pos += 1;
        self.skip_ws();
        let mut elems = Vec::new();
        if self.bytes.get(self.pos) == Some(&b'}') {
            self.pos += 1;
            return Ok(SetValue::empty());
        }
        loop {
            elems.push(self.set(depth + 1)?);
            self.skip_ws();
            match self.bytes.get(self.pos) {
                Some(b',') => {
                    self.pos += 1;
                    self.skip_ws();
                }
                Some(b'}') => {
                    self.pos += 1;
                    return Ok(SetValue::from_elements(elems));
                }
                _ => return Err(self.error("expected ',' or '}'")),
            }
        }
    }
}
