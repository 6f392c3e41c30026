//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::HashMap;

use otmlab::ordinal::Ordinal;
use otmlab::problems::Problem;
use otmlab::vm::{Action, Move, Program};
use otmlab::SetValue;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn o(s: &str) -> Ordinal {
    s.parse().unwrap()
}

pub fn s(t: &str) -> SetValue {
    t.parse().unwrap()
}

// ---------------------------------------------------------------------------
// Ordinals below ω^12 evaluated by transfinite recursion on the right
// argument: successor steps one at a time, limits as suprema of a
// fundamental sequence.

pub const NAIVE_EXPS: usize = 12;

/// Coefficient of ω^i at index i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Naive(pub [u32; NAIVE_EXPS]);

impl Naive {
    pub const ZERO: Naive = Naive([0; NAIVE_EXPS]);

    pub fn from_ordinal(a: &Ordinal) -> Option<Naive> {
        let mut c = [0u32; NAIVE_EXPS];
        for (e, k) in a.terms() {
            let e = e.as_finite()? as usize;
            if e >= NAIVE_EXPS {
                return None;
            }
            c[e] = u32::try_from(k).ok()?;
        }
        Some(Naive(c))
    }

    pub fn to_ordinal(self) -> Ordinal {
        let terms = (0..NAIVE_EXPS)
            .rev()
            .filter(|&i| self.0[i] > 0)
            .map(|i| (Ordinal::finite(i as u64), self.0[i] as u64));
        Ordinal::from_terms(terms).unwrap()
    }

    fn is_zero(self) -> bool {
        self == Naive::ZERO
    }

    fn succ(mut self) -> Naive {
        self.0[0] += 1;
        self
    }

    fn pred(self) -> Option<Naive> {
        let mut p = self;
        if p.0[0] == 0 {
            return None;
        }
        p.0[0] -= 1;
        Some(p)
    }

    /// n-th member of the standard fundamental sequence of a limit.
    fn fundamental(self, n: u32) -> Naive {
        let e = (1..NAIVE_EXPS).find(|&i| self.0[i] > 0).expect("a limit");
        let mut f = self;
        f.0[e] -= 1;
        f.0[e - 1] = n;
        f
    }
}

/// Supremum of a strictly increasing sequence given two of its members whose
/// leading coordinates agree. The highest coordinate that moved grows without
/// bound, so the supremum adds one at the next coordinate up.
fn sup(lo: Naive, hi: Naive) -> Naive {
    let Some(d) = (0..NAIVE_EXPS).rev().find(|&i| lo.0[i] != hi.0[i]) else {
        return hi;
    };
    let mut r = hi;
    for i in 0..=d {
        r.0[i] = 0;
    }
    r.0[d + 1] += 1;
    r
}

const SAMPLES: (u32, u32) = (2, 3);

#[derive(Default)]
pub struct NaiveEval {
    add_memo: HashMap<(Naive, Naive), Naive>,
    mul_memo: HashMap<(Naive, Naive), Naive>,
}

impl NaiveEval {
    pub fn add(&mut self, a: Naive, b: Naive) -> Naive {
        if b.is_zero() {
            return a;
        }
        if let Some(&r) = self.add_memo.get(&(a, b)) {
            return r;
        }
        let r = match b.pred() {
            Some(p) => self.add(a, p).succ(),
            None => {
                let lo = self.add(a, b.fundamental(SAMPLES.0));
                let hi = self.add(a, b.fundamental(SAMPLES.1));
                sup(lo, hi)
            }
        };
        self.add_memo.insert((a, b), r);
        r
    }

    pub fn mul(&mut self, a: Naive, b: Naive) -> Naive {
        if b.is_zero() || a.is_zero() {
            return Naive::ZERO;
        }
        if let Some(&r) = self.mul_memo.get(&(a, b)) {
            return r;
        }
        let r = match b.pred() {
            Some(p) => {
                let ab = self.mul(a, p);
                self.add(ab, a)
            }
            None => {
                let lo = self.mul(a, b.fundamental(SAMPLES.0));
                let hi = self.mul(a, b.fundamental(SAMPLES.1));
                sup(lo, hi)
            }
        };
        self.mul_memo.insert((a, b), r);
        r
    }
}

/// Every ordinal `ω²·a + ω·b + c` with coefficients below `k`.
pub fn ordinals_below_w3(k: u64) -> Vec<Ordinal> {
    let mut v = Vec::new();
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                let x = Ordinal::monomial(Ordinal::finite(2), a)
                    .add(&Ordinal::monomial(Ordinal::one(), b))
                    .add(&Ordinal::finite(c));
                v.push(x);
            }
        }
    }
    v
}

// ---------------------------------------------------------------------------
// Gödel order on pairs of naturals, by sorting.

/// All pairs with both components below `bound`, in Gödel order: by maximum,
/// then lexicographically.
pub fn godel_order(bound: u64) -> Vec<(u64, u64)> {
    let mut v: Vec<(u64, u64)> = (0..bound).flat_map(|a| (0..bound).map(move |b| (a, b))).collect();
    v.sort_by_key(|&(a, b)| (a.max(b), a, b));
    v
}

/// The Gödel order comparison key for ordinal pairs.
pub fn godel_key(a: &Ordinal, b: &Ordinal) -> (Ordinal, Ordinal, Ordinal) {
    ((a.max(b)).clone(), a.clone(), b.clone())
}

// ---------------------------------------------------------------------------
// Liminf of a simulated finite prefix, with plain vectors as tapes.

pub struct PrefixLiminf {
    pub state: u32,
    /// `None` when the head drifts off to the right (liminf = ω).
    pub heads: [Option<u64>; 3],
    /// Settled values of the leading cells of each tape.
    pub cells: [Vec<bool>; 3],
}

/// Runs `steps` successor steps from the start configuration and reads off
/// the liminf over the last tenth of the prefix, which is far longer than
/// any period the detectors certify. A head drifts if everything it visits
/// late lies beyond everything it visited mid-run. Cells are reported only
/// below the late positions of drifting heads, where they no longer change.
/// Returns `None` if the run halts, gets stuck or calls a miracle.
pub fn prefix_liminf(prog: &Program, input_cells: &[u64], steps: usize) -> Option<PrefixLiminf> {
    let width = steps + input_cells.iter().max().map_or(0, |&m| m as usize) + 2;
    let mut tapes = [vec![false; width], vec![false; width], vec![false; width]];
    for &c in input_cells {
        tapes[0][c as usize] = true;
    }
    let mut heads = [0usize; 3];
    let mut state = Program::START;
    let (mid_from, mid_to, late) = (steps / 2, steps * 6 / 10, steps * 9 / 10);
    let mut min_state = u32::MAX;
    let mut head_min_late = [usize::MAX; 3];
    let mut head_max_mid = [0usize; 3];
    let mut settled: [Vec<bool>; 3] = Default::default();
    for t in 0..steps {
        if t == late {
            settled = tapes.clone();
        }
        if state == prog.halt() {
            return None;
        }
        let read = [tapes[0][heads[0]], tapes[1][heads[1]], tapes[2][heads[2]]];
        let Action::Step { write, moves, next } = prog.lookup(state, read)? else {
            return None;
        };
        for i in 0..3 {
            tapes[i][heads[i]] = write[i];
            if t >= late && !write[i] {
                settled[i][heads[i]] = false;
            }
            heads[i] = match moves[i] {
                Move::Stay => heads[i],
                Move::Right => heads[i] + 1,
                Move::Left => heads[i].saturating_sub(1),
            };
        }
        state = next;
        if t >= late {
            min_state = min_state.min(state);
            for i in 0..3 {
                head_min_late[i] = head_min_late[i].min(heads[i]);
            }
        } else if (mid_from..mid_to).contains(&t) {
            for i in 0..3 {
                head_max_mid[i] = head_max_mid[i].max(heads[i]);
            }
        }
    }
    let drifting: [bool; 3] = std::array::from_fn(|i| head_min_late[i] > head_max_mid[i]);
    let heads = std::array::from_fn(|i| (!drifting[i]).then_some(head_min_late[i] as u64));
    let reach = (0..3)
        .filter(|&i| drifting[i])
        .map(|i| head_max_mid[i])
        .min()
        .unwrap_or(width);
    let cells = settled.map(|mut v| {
        v.truncate(reach);
        v
    });
    Some(PrefixLiminf {
        state: min_state,
        heads,
        cells,
    })
}

// ---------------------------------------------------------------------------
// Solution enumeration straight from the definitions.

pub fn transitive_closure_size(x: &SetValue) -> usize {
    let mut seen: Vec<SetValue> = Vec::new();
    let mut stack: Vec<SetValue> = x.elements().to_vec();
    while let Some(y) = stack.pop() {
        if !seen.contains(&y) {
            stack.extend(y.elements().iter().cloned());
            seen.push(y);
        }
    }
    seen.len()
}

fn kpair(a: &SetValue, b: &SetValue) -> SetValue {
    SetValue::from_elements([
        SetValue::from_elements([a.clone()]),
        SetValue::from_elements([a.clone(), b.clone()]),
    ])
}

fn product(choices: &[Vec<SetValue>]) -> Vec<Vec<SetValue>> {
    let mut out = vec![Vec::new()];
    for options in choices {
        let mut next = Vec::new();
        for prefix in &out {
            for c in options {
                let mut p = prefix.clone();
                p.push(c.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn permutations(items: &[SetValue]) -> Vec<Vec<SetValue>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let first = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, first.clone());
            out.push(p);
        }
    }
    out
}

fn von_neumann(n: usize) -> SetValue {
    let mut v = SetValue::empty();
    for _ in 0..n {
        let mut elems = v.elements().to_vec();
        elems.push(v.clone());
        v = SetValue::from_elements(elems);
    }
    v
}

/// Reads `(X, R)` as a finite partial order, straight from the axioms.
fn brute_poset(x: &SetValue) -> Option<(Vec<SetValue>, Vec<(SetValue, SetValue)>)> {
    let pair_parts = |p: &SetValue| -> Option<(SetValue, SetValue)> {
        let candidates: Vec<&SetValue> = p.elements().iter().collect();
        for a_set in &candidates {
            for b_set in &candidates {
                for a in a_set.elements() {
                    for b in b_set.elements().iter().chain(a_set.elements()) {
                        if kpair(a, b) == *p {
                            return Some((a.clone(), b.clone()));
                        }
                    }
                }
            }
        }
        None
    };
    let (carrier, rel) = pair_parts(x)?;
    if carrier.is_empty() {
        return None;
    }
    let items: Vec<SetValue> = carrier.elements().to_vec();
    let mut pairs = Vec::new();
    for p in rel.elements() {
        let (a, b) = pair_parts(p)?;
        if !items.contains(&a) || !items.contains(&b) {
            return None;
        }
        pairs.push((a, b));
    }
    let le = |a: &SetValue, b: &SetValue| pairs.iter().any(|(p, q)| p == a && q == b);
    for a in &items {
        if !le(a, a) {
            return None;
        }
        for b in &items {
            if a != b && le(a, b) && le(b, a) {
                return None;
            }
            for c in &items {
                if le(a, b) && le(b, c) && !le(a, c) {
                    return None;
                }
            }
        }
    }
    Some((items, pairs))
}

/// All solutions of `x`, or `None` when `x` is outside the problem's domain.
pub fn all_solutions(p: Problem, x: &SetValue) -> Option<Vec<SetValue>> {
    let empty = SetValue::empty();
    match p {
        Problem::Ac => {
            let nonempty: Vec<SetValue> = x.elements().iter().filter(|z| !z.is_empty()).cloned().collect();
            let choices: Vec<Vec<SetValue>> = nonempty.iter().map(|z| z.elements().to_vec()).collect();
            Some(
                product(&choices)
                    .into_iter()
                    .map(|pick| {
                        let mut f: Vec<SetValue> = nonempty.iter().zip(&pick).map(|(z, v)| kpair(z, v)).collect();
                        f.push(kpair(&empty, &empty));
                        SetValue::from_elements(f)
                    })
                    .collect(),
            )
        }
        Problem::AcPrime => {
            let elems = x.elements();
            if elems.iter().any(|z| z.is_empty()) {
                return None;
            }
            for (i, a) in elems.iter().enumerate() {
                for b in &elems[i + 1..] {
                    if a.elements().iter().any(|e| b.contains(e)) {
                        return None;
                    }
                }
            }
            let choices: Vec<Vec<SetValue>> = elems.iter().map(|z| z.elements().to_vec()).collect();
            Some(product(&choices).into_iter().map(SetValue::from_elements).collect())
        }
        Problem::Wo => Some(
            permutations(x.elements())
                .into_iter()
                .map(|order| {
                    SetValue::from_elements(
                        order
                            .iter()
                            .enumerate()
                            .map(|(i, e)| kpair(&von_neumann(i), e)),
                    )
                })
                .collect(),
        ),
        Problem::Zl => {
            let (items, pairs) = brute_poset(x)?;
            Some(
                items
                    .iter()
                    .filter(|a| !items.iter().any(|b| b != *a && pairs.contains(&((*a).clone(), b.clone()))))
                    .cloned()
                    .collect(),
            )
        }
    }
}

/// Near misses of a solution: one element dropped, added or swapped.
pub fn perturbations(y: &SetValue, pool: &[SetValue]) -> Vec<SetValue> {
    let mut out = Vec::new();
    for e in y.elements() {
        out.push(y.remove(e));
        for q in pool.iter().take(6) {
            out.push(y.remove(e).insert(q.clone()));
        }
    }
    for q in pool {
        out.push(y.insert(q.clone()));
        out.push(q.clone());
    }
    out
}

/// Random hereditarily finite set of rank at most `rank`.
pub fn random_set<R: Rng>(rng: &mut R, rank: usize) -> SetValue {
    if rank == 0 {
        return SetValue::empty();
    }
    let n = rng.random_range(0..4);
    SetValue::from_elements((0..n).map(|_| {
        let r = rng.random_range(0..rank);
        random_set(rng, r)
    }))
}

/// Source text of a random valid program: distinct rule keys, one halt
/// state, and rules for every state below it.
pub fn random_program_text<R: Rng>(rng: &mut R) -> String {
    let states = rng.random_range(1..6u32);
    let halt = states;
    let mut lines = vec![format!("#halt {halt}")];
    for q in 0..states {
        if rng.random_bool(0.2) {
            lines.push(format!("{q} * -> MIRACLE {}", rng.random_range(0..=halt)));
            continue;
        }
        let before = lines.len();
        for key in 0..8u32 {
            // every state gets at least one rule
            if !rng.random_bool(0.4) && !(key == 7 && lines.len() == before) {
                continue;
            }
            let bit = |i: u32| (key >> i) & 1;
            let w: Vec<u32> = (0..3).map(|_| rng.random_range(0..2)).collect();
            let m: Vec<&str> = (0..3).map(|_| ["S", "L", "R"][rng.random_range(0..3)]).collect();
            lines.push(format!(
                "{q} {} {} {} -> {} {} {} {} {} {} {}",
                bit(0),
                bit(1),
                bit(2),
                w[0],
                w[1],
                w[2],
                m[0],
                m[1],
                m[2],
                rng.random_range(0..=halt)
            ));
        }
    }
    lines.shuffle(rng);
    lines.join("\n") + "\n"
}

/// Deletes, replaces or inserts a few random bytes.
pub fn mutate<R: Rng>(rng: &mut R, text: &str) -> Vec<u8> {
    let mut b = text.as_bytes().to_vec();
    for _ in 0..rng.random_range(1..4) {
        let i = rng.random_range(0..=b.len());
        match rng.random_range(0..3) {
            0 if i < b.len() => {
                b.remove(i);
            }
            1 if i < b.len() => b[i] = rng.random(),
            _ => b.insert(i, b" -0123456789*#\n;RLSx"[rng.random_range(0..20)]),
        }
    }
    b
}
