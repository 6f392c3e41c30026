use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};
use std::ops::Bound;

use crate::ordinal::Ordinal;
use crate::setcode::Code;

/// An ordinal-indexed binary tape stored as the positions where the content
/// changes, each mapped to the bit from there on. Cells below the first
/// breakpoint hold 0, so the tape is a finite union of half-open intervals
/// `[a, b)` of ones.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Tape {
    flips: BTreeMap<Ordinal, bool>,
    /// XOR of the breakpoint hashes, kept up to date on every change so that
    /// hashing a tape costs nothing.
    fingerprint: u64,
}

impl Hash for Tape {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.fingerprint.hash(state);
    }
}

fn flip_hash(p: &Ordinal, bit: bool) -> u64 {
    let mut h = DefaultHasher::new();
    p.hash(&mut h);
    bit.hash(&mut h);
    h.finish()
}

/// A maximal block `[from, to)` of cells with the same bit, as reported by
/// [`Tape::diff`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TapeDelta {
    pub from: Ordinal,
    pub to: Ordinal,
    pub bit: bool,
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    pub fn from_code(code: &Code) -> Self {
        let mut t = Tape::new();
        for p in code.elements() {
            t.write(p, true);
        }
        t
    }

    pub fn read(&self, p: &Ordinal) -> bool {
        self.flips.range(..=p).next_back().is_some_and(|(_, &b)| b)
    }

    pub fn write(&mut self, p: &Ordinal, bit: bool) {
        self.set_range(p, &p.succ(), bit);
    }

    /// Sets every cell in `[from, to)` to `bit`.
    pub fn set_range(&mut self, from: &Ordinal, to: &Ordinal, bit: bool) {
        if from >= to {
            return;
        }
        let before = self.flips.range(..from).next_back().is_some_and(|(_, &b)| b);
        let at_end = self.read(to);
        let doomed: Vec<Ordinal> = self.flips.range(from..=to).map(|(p, _)| p.clone()).collect();
        for f in doomed {
            if let Some(b) = self.flips.remove(&f) {
                self.fingerprint ^= flip_hash(&f, b);
            }
        }
        if before != bit {
            self.insert_flip(from.clone(), bit);
        }
        if bit != at_end {
            self.insert_flip(to.clone(), at_end);
        }
    }

    fn insert_flip(&mut self, p: Ordinal, bit: bool) {
        self.fingerprint ^= flip_hash(&p, bit);
        self.flips.insert(p, bit);
    }

    pub fn is_blank(&self) -> bool {
        self.flips.is_empty()
    }

    /// Positions where the content changes.
    pub fn breakpoints(&self) -> impl Iterator<Item = &Ordinal> {
        self.flips.keys()
    }

    /// Blocks of ones as `(from, to)`; `to` is `None` if the ones never end.
    pub fn one_blocks(&self) -> Vec<(Ordinal, Option<Ordinal>)> {
        let v: Vec<&Ordinal> = self.flips.keys().collect();
        v.chunks(2)
            .map(|c| (c[0].clone(), c.get(1).map(|o| (*o).clone())))
            .collect()
    }

    /// The set of 1-positions, if it is finite.
    pub fn to_code(&self) -> Option<Code> {
        let mut out = BTreeSet::new();
        for (from, to) in self.one_blocks() {
            let len = to?.sub_left(&from)?.as_finite()?;
            let mut p = from;
            for _ in 0..len {
                let next = p.succ();
                out.insert(p);
                p = next;
            }
        }
        Some(Code::new(out))
    }

    /// Pointwise minimum.
    pub fn and(&self, other: &Tape) -> Tape {
        let points: BTreeSet<&Ordinal> = self.flips.keys().chain(other.flips.keys()).collect();
        let mut out = Tape::new();
        let mut current = false;
        for p in points {
            let v = self.read(p) && other.read(p);
            if v != current {
                out.insert_flip(p.clone(), v);
                current = v;
            }
        }
        out
    }

    /// Blocks where `new` differs from `old`, with `new`'s bit.
    pub fn diff(old: &Tape, new: &Tape) -> Vec<TapeDelta> {
        let points: BTreeSet<&Ordinal> = old.flips.keys().chain(new.flips.keys()).collect();
        let points: Vec<&Ordinal> = points.into_iter().collect();
        let mut out = Vec::new();
        for (i, p) in points.iter().enumerate() {
            let (a, b) = (old.read(p), new.read(p));
            if a == b {
                continue;
            }
            let Some(end) = points.get(i + 1) else {
                // both tapes are constant from here on
                continue;
            };
            match out.last_mut() {
                Some(TapeDelta { to, bit, .. }) if *to == **p && *bit == b => *to = (*end).clone(),
                _ => out.push(TapeDelta {
                    from: (*p).clone(),
                    to: (*end).clone(),
                    bit: b,
                }),
            }
        }
        out
    }

    /// Largest finite offset `k` such that `base + k` is a breakpoint, for
    /// breakpoints in `[base, base + ω)`.
    pub fn max_offset_in_segment(&self, base: &Ordinal) -> Option<u64> {
        let end = base.add(&Ordinal::omega());
        self.flips
            .range(base..&end)
            .next_back()
            .map(|(p, _)| offset_in(base, p))
    }

    /// The content of `[base + from, base + ω)`: the bit at `base + from`
    /// and the offsets, relative to `from`, of later breakpoints.
    pub fn segment_tail(&self, base: &Ordinal, from: u64) -> (bool, Vec<u64>) {
        let (bit, rest) = self.tail(base, from);
        (bit, rest.collect())
    }

    fn tail<'a>(&'a self, base: &'a Ordinal, from: u64) -> (bool, impl Iterator<Item = u64> + 'a) {
        let start = base.add(&Ordinal::finite(from));
        let bit = self.read(&start);
        let rest = self
            .flips
            .range((Bound::Excluded(start), Bound::Unbounded))
            .take_while(|(p, _)| p.same_segment(base))
            .map(move |(p, _)| offset_in(base, p) - from);
        (bit, rest)
    }

    /// Whether `[base + from, base + ω)` on this tape has the same content,
    /// cell for cell, as `[base + other_from, base + ω)` on `other`.
    pub fn same_tail(&self, other: &Tape, base: &Ordinal, from: u64, other_from: u64) -> bool {
        let (a, rest_a) = self.tail(base, from);
        let (b, rest_b) = other.tail(base, other_from);
        a == b && rest_a.eq(rest_b)
    }
}

// `base` is a limit (or 0) and `p` lies in `[base, base + ω)`
fn offset_in(base: &Ordinal, p: &Ordinal) -> u64 {
    debug_assert!(p.same_segment(base));
    p.finite_part()
}
