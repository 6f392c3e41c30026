use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, VecDeque};
use std::hash::{Hash, Hasher};

use crate::oracle::CodeOracle;
use crate::ordinal::Ordinal;
use crate::setcode::Code;

use super::program::{Action, Bits, Move, Program, State, MIRACLE};
use super::tape::Tape;
use super::trace::{TraceEvent, TraceRecord};

/// Execution budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fuel {
    /// Successor steps allowed between two limit stages.
    pub max_steps_per_segment: u64,
    pub max_limit_jumps: u32,
    /// How many recent configurations the limit detectors compare against.
    pub window: usize,
}

impl Default for Fuel {
    fn default() -> Self {
        Fuel {
            max_steps_per_segment: 100_000,
            max_limit_jumps: 64,
            window: 64,
        }
    }
}

/// A machine snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub time: Ordinal,
    pub state: State,
    /// Scratch, output and miracle head positions.
    pub heads: [Ordinal; 3],
    pub tapes: [Tape; 3],
}

impl Configuration {
    /// Start configuration: `input` on the scratch tape, everything else
    /// blank, all heads at 0.
    pub fn initial(input: &Code) -> Self {
        Configuration {
            time: Ordinal::zero(),
            state: Program::START,
            heads: Default::default(),
            tapes: [Tape::from_code(input), Tape::new(), Tape::new()],
        }
    }

    pub fn read(&self) -> Bits {
        std::array::from_fn(|i| self.tapes[i].read(&self.heads[i]))
    }

    /// 1-positions of the output tape, if finite.
    pub fn output(&self) -> Option<Code> {
        self.tapes[super::program::OUTPUT].to_code()
    }

    fn machine_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.state.hash(&mut h);
        self.heads.hash(&mut h);
        self.tapes.hash(&mut h);
        h.finish()
    }
}

/// What a single transition did besides writing and moving.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepInfo {
    /// A head was sent to cell 0 by a left move from 0 or a limit cell.
    pub reset: [bool; 3],
    pub miracle: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepError {
    Halted,
    /// No rule for the current state and read triple.
    Stuck { state: State, read: Bits },
    MissingOracle,
    /// The oracle had no value for the miracle tape content, or the content
    /// was not a finite set.
    MiracleUndefined,
}

/// Left from a successor cell goes to its predecessor; from 0 or a limit
/// cell the head is reset to 0.
pub fn move_left(p: &Ordinal) -> (Ordinal, bool) {
    match p.pred() {
        Some(q) => (q, false),
        None => (Ordinal::zero(), true),
    }
}

/// One successor step.
pub fn step(
    cfg: &Configuration,
    prog: &Program,
    oracle: Option<&dyn CodeOracle>,
) -> Result<(Configuration, StepInfo), StepError> {
    let mut next = cfg.clone();
    let info = advance(&mut next, prog, oracle, &mut Undo::default())?;
    Ok((next, info))
}

/// How to turn the configuration after a step back into the one before it,
/// as far as the tapes are concerned.
#[derive(Debug, Default)]
struct Undo {
    /// `(tape, cell, bit before, bit after)` for every cell that changed.
    writes: Vec<(usize, Ordinal, bool, bool)>,
    /// The miracle tape before a miracle call replaced it.
    replaced: Option<Tape>,
}

fn advance(
    cfg: &mut Configuration,
    prog: &Program,
    oracle: Option<&dyn CodeOracle>,
    undo: &mut Undo,
) -> Result<StepInfo, StepError> {
    if cfg.state == prog.halt() {
        return Err(StepError::Halted);
    }
    let read = cfg.read();
    let action = prog.lookup(cfg.state, read).ok_or(StepError::Stuck {
        state: cfg.state,
        read,
    })?;
    let mut info = StepInfo::default();
    match action {
        Action::Step { write, moves, next: q } => {
            for i in 0..3 {
                if write[i] != read[i] {
                    cfg.tapes[i].write(&cfg.heads[i], write[i]);
                    undo.writes.push((i, cfg.heads[i].clone(), read[i], write[i]));
                }
                match moves[i] {
                    Move::Stay => {}
                    Move::Right => cfg.heads[i] = cfg.heads[i].succ(),
                    Move::Left => {
                        let (p, reset) = move_left(&cfg.heads[i]);
                        info.reset[i] = reset;
                        cfg.heads[i] = p;
                    }
                }
            }
            cfg.state = q;
        }
        Action::Miracle { next: q } => {
            let oracle = oracle.ok_or(StepError::MissingOracle)?;
            let x = cfg.tapes[MIRACLE].to_code().ok_or(StepError::MiracleUndefined)?;
            let y = oracle.query(&x).ok_or(StepError::MiracleUndefined)?;
            undo.replaced = Some(std::mem::replace(&mut cfg.tapes[MIRACLE], Tape::from_code(&y)));
            cfg.heads[MIRACLE] = Ordinal::zero();
            cfg.state = q;
            info.miracle = true;
        }
    }
    cfg.time = cfg.time.succ();
    Ok(info)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Halted(Configuration),
    /// More limit stages were needed than the budget allows.
    FuelExhausted,
    /// A segment ran out of successor steps without halting or a certified
    /// limit pattern.
    UndetectedLimitPattern,
    MiracleUndefined,
    MissingOracle,
    Stuck { state: State, read: Bits },
    /// A certified limit would leave tape content outside the interval
    /// representation.
    UnrepresentableTape(String),
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Halted(_) => "halted",
            Outcome::FuelExhausted => "fuel-exhausted",
            Outcome::UndetectedLimitPattern => "undetected-limit-pattern",
            Outcome::MiracleUndefined => "miracle-undefined",
            Outcome::MissingOracle => "missing-oracle",
            Outcome::Stuck { .. } => "missing-rule",
            Outcome::UnrepresentableTape(_) => "unrepresentable-tape",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub outcome: Outcome,
    pub trace: Vec<TraceRecord>,
    pub steps: u64,
    pub limit_jumps: u32,
    pub oracle_calls: usize,
}

impl RunResult {
    /// The output code of a halted run with finite output.
    pub fn output(&self) -> Option<Code> {
        match &self.outcome {
            Outcome::Halted(cfg) => cfg.output(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub fuel: Fuel,
    pub trace: bool,
}

/// One configuration of the recent history. Tapes are not stored; they are
/// recovered from the current tapes by undoing later steps.
struct Entry {
    state: State,
    heads: [Ordinal; 3],
    /// The transition that produced this configuration.
    info: StepInfo,
    undo: Undo,
    hash: u64,
}

impl Entry {
    fn of(cfg: &Configuration, info: StepInfo, undo: Undo) -> Self {
        Entry {
            state: cfg.state,
            heads: cfg.heads.clone(),
            info,
            undo,
            hash: cfg.machine_hash(),
        }
    }
}

/// Recent history of a segment; the last entry is the current configuration.
struct History<'a> {
    entries: &'a [Entry],
    cur: &'a Configuration,
}

impl History<'_> {
    fn last(&self) -> usize {
        self.entries.len() - 1
    }

    /// Tape `h` as it was at entry `k`.
    fn tape_at(&self, h: usize, k: usize) -> Tape {
        let mut tape = self.cur.tapes[h].clone();
        for e in self.entries[k + 1..].iter().rev() {
            if h == MIRACLE {
                if let Some(old) = &e.undo.replaced {
                    tape = old.clone();
                }
            }
            for (i, p, before, _) in e.undo.writes.iter().rev() {
                if *i == h {
                    tape.write(p, *before);
                }
            }
        }
        tape
    }

    fn replaced_since(&self, h: usize, k: usize) -> bool {
        h == MIRACLE && self.entries[k + 1..].iter().any(|e| e.undo.replaced.is_some())
    }

    fn writes_since(&self, h: usize, k: usize) -> impl Iterator<Item = (&Ordinal, bool, bool)> {
        self.entries[k + 1..]
            .iter()
            .flat_map(|e| &e.undo.writes)
            .filter(move |w| w.0 == h)
            .map(|(_, p, before, after)| (p, *before, *after))
    }

    /// Cells of tape `h` written after entry `k`, with their bits at `k`.
    fn first_writes(&self, h: usize, k: usize) -> BTreeMap<&Ordinal, bool> {
        let mut first = BTreeMap::new();
        for (p, before, _) in self.writes_since(h, k) {
            first.entry(p).or_insert(before);
        }
        first
    }

    /// Whether tape `h` at entry `k` equals the current tape.
    fn unchanged_since(&self, h: usize, k: usize) -> bool {
        if self.replaced_since(h, k) {
            return self.tape_at(h, k) == self.cur.tapes[h];
        }
        self.first_writes(h, k)
            .into_iter()
            .all(|(p, b)| self.cur.tapes[h].read(p) == b)
    }

    /// Cellwise minimum of tape `h` over entries `k..=last`, given that it
    /// is the same at both ends.
    fn liminf_tape(&self, h: usize, k: usize) -> Tape {
        if self.replaced_since(h, k) {
            let mut acc = self.cur.tapes[h].clone();
            for i in k..self.last() {
                let t = self.tape_at(h, i);
                if t != acc {
                    acc = acc.and(&t);
                }
            }
            return acc;
        }
        // every value a cell takes during the period is its value at either
        // end or one side of a write
        let mut acc = self.cur.tapes[h].clone();
        for (p, before, after) in self.writes_since(h, k) {
            if !(before && after) {
                acc.write(p, false);
            }
        }
        acc
    }

    fn min_state(&self, k: usize) -> State {
        self.entries[k..].iter().map(|e| e.state).min().expect("nonempty")
    }

    fn min_head(&self, h: usize, k: usize) -> Ordinal {
        self.entries[k..].iter().map(|e| e.heads[h].clone()).min().expect("nonempty")
    }
}

enum Detected {
    Limit(Configuration),
    Unrepresentable(String),
}

/// Runs `prog` on `input`, taking certified limit stages when the recent
/// history is provably periodic.
pub fn run(prog: &Program, input: &Code, oracle: Option<&dyn CodeOracle>, opts: &RunOptions) -> RunResult {
    drive(prog, input, oracle, opts, false).0
}

/// Runs until the first certified limit stage and returns the
/// configuration there, or the outcome if the run ends before any limit.
pub fn run_to_first_limit(
    prog: &Program,
    input: &Code,
    oracle: Option<&dyn CodeOracle>,
    fuel: Fuel,
) -> Result<Configuration, Outcome> {
    let opts = RunOptions { fuel, trace: false };
    match drive(prog, input, oracle, &opts, true) {
        (_, Some(cfg)) => Ok(cfg),
        (r, None) => Err(r.outcome),
    }
}

fn drive(
    prog: &Program,
    input: &Code,
    oracle: Option<&dyn CodeOracle>,
    opts: &RunOptions,
    stop_at_limit: bool,
) -> (RunResult, Option<Configuration>) {
    let mut result = RunResult {
        outcome: Outcome::FuelExhausted,
        trace: Vec::new(),
        steps: 0,
        limit_jumps: 0,
        oracle_calls: 0,
    };
    if prog.uses_miracle() && oracle.is_none() {
        result.outcome = Outcome::MissingOracle;
        return (result, None);
    }
    let fuel = opts.fuel;
    let cadence = (fuel.window as u64 / 8).max(1);
    let mut cfg = Configuration::initial(input);
    'segment: loop {
        let mut history: VecDeque<Entry> = VecDeque::with_capacity(fuel.window + 2);
        history.push_back(Entry::of(&cfg, StepInfo::default(), Undo::default()));
        let mut segment_steps = 0u64;
        loop {
            if cfg.state == prog.halt() {
                if opts.trace {
                    result.trace.push(TraceRecord::transition(TraceEvent::Halt, &cfg, &cfg));
                }
                result.outcome = Outcome::Halted(cfg);
                return (result, None);
            }
            if segment_steps == fuel.max_steps_per_segment {
                result.outcome = Outcome::UndetectedLimitPattern;
                return (result, None);
            }
            let before = opts.trace.then(|| cfg.clone());
            let mut undo = Undo::default();
            let info = match advance(&mut cfg, prog, oracle, &mut undo) {
                Ok(v) => v,
                Err(e) => {
                    result.outcome = match e {
                        StepError::Halted => unreachable!("halt checked above"),
                        StepError::Stuck { state, read } => Outcome::Stuck { state, read },
                        StepError::MissingOracle => Outcome::MissingOracle,
                        StepError::MiracleUndefined => Outcome::MiracleUndefined,
                    };
                    return (result, None);
                }
            };
            segment_steps += 1;
            result.steps += 1;
            if info.miracle {
                result.oracle_calls += 1;
            }
            if let Some(before) = before {
                let event = if info.miracle { TraceEvent::MiracleCall } else { TraceEvent::Step };
                result.trace.push(TraceRecord::transition(event, &before, &cfg));
            }
            history.push_back(Entry::of(&cfg, info, undo));
            while history.len() > fuel.window + 1 {
                history.pop_front();
            }
            // A pattern that is periodic within the window stays periodic, so
            // looking only every few steps finds the same limit.
            if !segment_steps.is_multiple_of(cadence) {
                continue;
            }
            let hist = History {
                entries: history.make_contiguous(),
                cur: &cfg,
            };
            let detected = detect_repetition(&hist).or_else(|| detect_march(&hist));
            match detected {
                None => {}
                Some(Detected::Unrepresentable(msg)) => {
                    result.outcome = Outcome::UnrepresentableTape(msg);
                    return (result, None);
                }
                Some(Detected::Limit(limit)) => {
                    if stop_at_limit {
                        return (result, Some(limit));
                    }
                    if result.limit_jumps == fuel.max_limit_jumps {
                        result.outcome = Outcome::FuelExhausted;
                        return (result, None);
                    }
                    result.limit_jumps += 1;
                    if opts.trace {
                        result.trace.push(TraceRecord::transition(TraceEvent::LimitJump, &cfg, &limit));
                    }
                    cfg = limit;
                    continue 'segment;
                }
            }
        }
    }
}

/// Detector D1: the current configuration repeats an earlier one, so the
/// run is periodic from there on. The limit takes componentwise minima over
/// one period.
fn detect_repetition(hist: &History) -> Option<Detected> {
    let j = hist.last();
    let cur = &hist.entries[j];
    let k = (0..j).rev().find(|&k| {
        let e = &hist.entries[k];
        e.hash == cur.hash
            && e.state == cur.state
            && e.heads == cur.heads
            && (0..3).all(|h| hist.unchanged_since(h, k))
    })?;
    Some(Detected::Limit(Configuration {
        time: hist.cur.time.next_limit(),
        state: hist.min_state(k),
        heads: std::array::from_fn(|h| hist.min_head(h, k)),
        tapes: std::array::from_fn(|h| hist.liminf_tape(h, k)),
    }))
}

/// Detector D2: over some period every head either returns to its position
/// with its tape unchanged, or advances by a fixed finite stride while the
/// content at and around it, relative to the head, is the same at both ends
/// of the period. Marching heads go to the next limit cell; the cells they
/// leave behind settle to the one-period block written behind the head.
fn detect_march(hist: &History) -> Option<Detected> {
    let j = hist.last();
    let cur = hist.cur;
    'period: for k in (0..j).rev() {
        let old = &hist.entries[k];
        if old.state != cur.state {
            continue;
        }
        let mut strides: [Option<u64>; 3] = [None; 3];
        for h in 0..3 {
            if old.heads[h] == cur.heads[h] {
                continue;
            }
            let Some(s) = cur.heads[h].sub_left(&old.heads[h]).and_then(|d| d.as_finite()) else {
                continue 'period;
            };
            if s == 0 || !cur.heads[h].same_segment(&old.heads[h]) {
                continue 'period;
            }
            strides[h] = Some(s);
        }
        if strides.iter().all(Option::is_none) {
            continue;
        }
        let transitions = &hist.entries[k + 1..=j];
        for (h, stride) in strides.iter().enumerate() {
            let moved = stride.is_some() && transitions.iter().any(|e| e.info.reset[h] || (h == MIRACLE && e.info.miracle));
            if moved || (stride.is_none() && !hist.unchanged_since(h, k)) {
                continue 'period;
            }
        }
        // (head, lowest offset visited, stride)
        let mut settled: Vec<(usize, u64, u64)> = Vec::new();
        for (h, stride) in strides.iter().enumerate() {
            let Some(s) = *stride else { continue };
            let base = old.heads[h].limit_part();
            let start = old.heads[h].finite_part() as i128;
            let mut reach: i128 = 0;
            for e in &hist.entries[k..=j] {
                let p = &e.heads[h];
                if !p.same_segment(&old.heads[h]) {
                    continue 'period;
                }
                reach = reach.min(p.finite_part() as i128 - start);
            }
            // everything from the lowest cell visited onwards must look the
            // same relative to the head at both ends of the period
            let from = (start + reach) as u64;
            // cells up to `hi` are read through the writes of the period;
            // beyond it the old tape is the current one
            debug_assert!(!hist.replaced_since(h, k));
            let first = hist.first_writes(h, k);
            let old_read = |p: &Ordinal| first.get(p).copied().unwrap_or_else(|| cur.tapes[h].read(p));
            let touched = first.keys().filter(|p| p.same_segment(&base)).map(|p| p.finite_part()).max();
            let hi = touched.unwrap_or(0).max(cur.heads[h].finite_part()) + 1;
            let near_match = (from..=hi).all(|x| {
                old_read(&base.add(&Ordinal::finite(x))) == cur.tapes[h].read(&base.add(&Ordinal::finite(x + s)))
            });
            if !near_match || !cur.tapes[h].same_tail(&cur.tapes[h], &base, hi + 1, hi + 1 + s) {
                continue 'period;
            }
            settled.push((h, from, s));
        }
        // the block finished during the period repeats all the way up
        let mut settled_cells = Vec::with_capacity(settled.len());
        for (h, from, s) in settled {
            let base = old.heads[h].limit_part();
            let (bit, behind) = cur.tapes[h].segment_tail(&base, from);
            if behind.first().is_some_and(|&off| off < s) {
                return Some(Detected::Unrepresentable(format!(
                    "head {h} leaves a non-constant periodic block behind it"
                )));
            }
            settled_cells.push((h, base.add(&Ordinal::finite(from)), base.add(&Ordinal::omega()), bit));
        }
        let mut tapes: [Tape; 3] = std::array::from_fn(|h| {
            if strides[h].is_some() {
                cur.tapes[h].clone()
            } else {
                hist.liminf_tape(h, k)
            }
        });
        let mut heads: [Ordinal; 3] = std::array::from_fn(|h| hist.min_head(h, k));
        for (h, from, limit, bit) in settled_cells {
            tapes[h].set_range(&from, &limit, bit);
            heads[h] = limit;
        }
        return Some(Detected::Limit(Configuration {
            time: cur.time.next_limit(),
            state: hist.min_state(k),
            heads,
            tapes,
        }));
    }
    None
}
