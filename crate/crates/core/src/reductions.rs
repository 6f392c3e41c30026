//! Reductions between choice problems.
//!
//! A [`GwWitness`] is a pair of oracle-free transformers `(Q, P)`: `Q` turns
//! a code of an instance `x` into a code of some `y`, the oracle is applied
//! once to give a code of `F(y)`, and `P` turns that into a code of a
//! solution for `x`. A [`RelativeProcedure`] instead calls the oracle as
//! often as it likes.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::oracle::{CanonOracle, CodeOracle, CountingOracle};
use crate::problems::{as_function, function_from, Canonification, Poset, Problem};
use crate::programs;
use crate::set::SetValue;
use crate::setcode::{decode, encode, encode_canonical, seeded_enumeration, Code, CodeError};
use crate::vm::{run, Fuel, Outcome, Program, RunOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("{0} is not in the domain of {1}")]
    Precondition(SetValue, Problem),
    #[error("cannot compose: {0} does not match {1}")]
    ProblemMismatch(Problem, Problem),
    #[error("different codes of the oracle answer gave different results: {0} and {1}")]
    MismatchAcrossEncodings(SetValue, SetValue),
    #[error("the oracle has no value on {0}")]
    OracleUndefined(Code),
    #[error("{transformer} needs an oracle")]
    MissingOracle { transformer: String },
    #[error("a reduction witness may not query an oracle ({0})")]
    OracleInWitness(String),
    #[error("{transformer} did not halt with a finite output: {outcome}")]
    Machine { transformer: String, outcome: String },
    #[error("invalid code: {0}")]
    Code(#[from] CodeError),
    #[error("the oracle answer {0} is not usable here")]
    BadOracleAnswer(SetValue),
}

/// How a transformer is realised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// A transition table run on the vm.
    Machine,
    /// A host function on decoded sets.
    Host,
    /// One transformer after another.
    Composed,
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::Machine => "machine",
            Form::Host => "host",
            Form::Composed => "composed",
        })
    }
}

/// A deterministic map from codes to codes, possibly querying an oracle.
pub trait CodeTransformer: Send + Sync {
    fn name(&self) -> String;
    fn form(&self) -> Form;
    fn uses_oracle(&self) -> bool;
    fn apply(&self, c: &Code, oracle: Option<&dyn CodeOracle>) -> Result<Code, ReductionError>;
}

/// Runs a program; the output tape is the result.
pub struct MachineTransformer {
    pub name: String,
    pub program: Program,
    pub fuel: Fuel,
}

impl MachineTransformer {
    pub fn new(name: impl Into<String>, program: Program) -> Self {
        MachineTransformer {
            name: name.into(),
            program,
            fuel: Fuel::default(),
        }
    }

    /// The bundled copy program: the identity on codes.
    pub fn copy() -> Self {
        Self::new("copy", programs::bundled("copy").expect("bundled"))
    }
}

impl CodeTransformer for MachineTransformer {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn form(&self) -> Form {
        Form::Machine
    }

    fn uses_oracle(&self) -> bool {
        self.program.uses_miracle()
    }

    fn apply(&self, c: &Code, oracle: Option<&dyn CodeOracle>) -> Result<Code, ReductionError> {
        let opts = RunOptions {
            fuel: self.fuel,
            trace: false,
        };
        let result = run(&self.program, c, oracle, &opts);
        match (&result.outcome, result.output()) {
            (Outcome::Halted(_), Some(out)) => Ok(out),
            (Outcome::MissingOracle, _) => Err(ReductionError::MissingOracle {
                transformer: self.name.clone(),
            }),
            (outcome, _) => Err(ReductionError::Machine {
                transformer: self.name.clone(),
                outcome: outcome.name().to_string(),
            }),
        }
    }
}

/// Decodes, applies a set function and encodes the result canonically.
pub struct HostTransformer {
    pub name: &'static str,
    pub f: fn(&SetValue) -> SetValue,
}

impl CodeTransformer for HostTransformer {
    fn name(&self) -> String {
        self.name.to_string()
    }

    fn form(&self) -> Form {
        Form::Host
    }

    fn uses_oracle(&self) -> bool {
        false
    }

    fn apply(&self, c: &Code, _oracle: Option<&dyn CodeOracle>) -> Result<Code, ReductionError> {
        Ok(encode_canonical(&(self.f)(&decode(c)?)))
    }
}

/// A host procedure with oracle access.
pub struct RelativeHostTransformer {
    pub name: &'static str,
    pub f: fn(&Code, &dyn CodeOracle) -> Result<Code, ReductionError>,
}

impl CodeTransformer for RelativeHostTransformer {
    fn name(&self) -> String {
        self.name.to_string()
    }

    fn form(&self) -> Form {
        Form::Host
    }

    fn uses_oracle(&self) -> bool {
        true
    }

    fn apply(&self, c: &Code, oracle: Option<&dyn CodeOracle>) -> Result<Code, ReductionError> {
        let oracle = oracle.ok_or_else(|| ReductionError::MissingOracle {
            transformer: self.name.to_string(),
        })?;
        (self.f)(c, oracle)
    }
}

/// `first`, then `second`.
pub struct Composed {
    pub first: Arc<dyn CodeTransformer>,
    pub second: Arc<dyn CodeTransformer>,
}

impl CodeTransformer for Composed {
    fn name(&self) -> String {
        format!("{} ; {}", self.first.name(), self.second.name())
    }

    fn form(&self) -> Form {
        Form::Composed
    }

    fn uses_oracle(&self) -> bool {
        self.first.uses_oracle() || self.second.uses_oracle()
    }

    fn apply(&self, c: &Code, oracle: Option<&dyn CodeOracle>) -> Result<Code, ReductionError> {
        let mid = self.first.apply(c, oracle)?;
        self.second.apply(&mid, oracle)
    }
}

pub fn then(first: Arc<dyn CodeTransformer>, second: Arc<dyn CodeTransformer>) -> Arc<dyn CodeTransformer> {
    Arc::new(Composed { first, second })
}

fn host(name: &'static str, f: fn(&SetValue) -> SetValue) -> Arc<dyn CodeTransformer> {
    Arc::new(HostTransformer { name, f })
}

/// Witness for `source ≤gW target`.
#[derive(Clone)]
pub struct GwWitness {
    pub name: String,
    pub source: Problem,
    pub target: Problem,
    /// Runs before the oracle (`Q`).
    pub pre: Arc<dyn CodeTransformer>,
    /// Runs after the oracle (`P`).
    pub post: Arc<dyn CodeTransformer>,
}

impl fmt::Debug for GwWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GwWitness")
            .field("name", &self.name)
            .field("source", &self.source)
            .field("target", &self.target)
            .field("pre", &self.pre.name())
            .field("post", &self.post.name())
            .finish()
    }
}

impl GwWitness {
    pub fn new(
        name: impl Into<String>,
        source: Problem,
        target: Problem,
        pre: Arc<dyn CodeTransformer>,
        post: Arc<dyn CodeTransformer>,
    ) -> Result<Self, ReductionError> {
        for t in [&pre, &post] {
            if t.uses_oracle() {
                return Err(ReductionError::OracleInWitness(t.name()));
            }
        }
        Ok(GwWitness {
            name: name.into(),
            source,
            target,
            pre,
            post,
        })
    }

    /// `problem ≤gW problem` with both sides the machine copy program.
    pub fn identity(problem: Problem) -> Self {
        let copy: Arc<dyn CodeTransformer> = Arc::new(MachineTransformer::copy());
        GwWitness::new(format!("identity_{}", problem.id()), problem, problem, copy.clone(), copy)
            .expect("copy is oracle-free")
    }
}

/// The result of one `[P, F, Q](x)` evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GwRun {
    pub y: SetValue,
    pub z: SetValue,
    /// Oracle answers presented to `P`, one per code of `F(y)`.
    pub oracle_calls: usize,
}

/// Evaluates `[P, F, Q](x)`: `Q` on the canonical code of `x`, then `F` on
/// the set `y` it codes, then `P` on the canonical code of `F(y)` and on one
/// re-encoding per seed. All runs of `P` must agree.
pub fn run_gw(w: &GwWitness, canon: Canonification, x: &SetValue, seeds: &[u64]) -> Result<GwRun, ReductionError> {
    if !w.source.in_domain(x) {
        return Err(ReductionError::Precondition(x.clone(), w.source));
    }
    let c = encode_canonical(x);
    let c1 = w.pre.apply(&c, None)?;
    let y = decode(&c1)?;
    let mut oracles = vec![CanonOracle::new(canon)];
    oracles.extend(seeds.iter().map(|&s| CanonOracle::reencoding(canon, s)));
    let mut z: Option<SetValue> = None;
    for g in &oracles {
        let c2 = g.query(&c1).ok_or_else(|| ReductionError::OracleUndefined(c1.clone()))?;
        let zi = decode(&w.post.apply(&c2, None)?)?;
        match &z {
            None => z = Some(zi),
            Some(z0) if *z0 != zi => return Err(ReductionError::MismatchAcrossEncodings(z0.clone(), zi)),
            Some(_) => {}
        }
    }
    Ok(GwRun {
        y,
        z: z.expect("at least the canonical code"),
        oracle_calls: oracles.len(),
    })
}

/// `w1: C1 ≤gW C2` and `w2: C2 ≤gW C3` give `C1 ≤gW C3`: first `Q1` then
/// `Q2` before the oracle, first `P2` then `P1` after it.
pub fn compose(w1: &GwWitness, w2: &GwWitness) -> Result<GwWitness, ReductionError> {
    if w1.target != w2.source {
        return Err(ReductionError::ProblemMismatch(w1.target, w2.source));
    }
    GwWitness::new(
        format!("{}+{}", w1.name, w2.name),
        w1.source,
        w2.target,
        then(w1.pre.clone(), w2.pre.clone()),
        then(w2.post.clone(), w1.post.clone()),
    )
}

/// Solves `source` with free access to an oracle for `target`.
#[derive(Clone)]
pub struct RelativeProcedure {
    pub name: String,
    pub source: Problem,
    pub target: Problem,
    pub transformer: Arc<dyn CodeTransformer>,
    /// Oracle calls the procedure must make on an instance, if fixed.
    pub expected_calls: Option<fn(&SetValue) -> usize>,
}

impl fmt::Debug for RelativeProcedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RelativeProcedure")
            .field("name", &self.name)
            .field("source", &self.source)
            .field("target", &self.target)
            .field("transformer", &self.transformer.name())
            .finish()
    }
}

/// Runs `t` on `c` with miracle calls answered by `g`; returns the output
/// code and the number of oracle calls.
pub fn run_relative(t: &dyn CodeTransformer, g: &dyn CodeOracle, c: &Code) -> Result<(Code, usize), ReductionError> {
    let counting = CountingOracle::new(g);
    let out = t.apply(c, Some(&counting))?;
    Ok((out, counting.calls()))
}

fn tag(n: usize, v: SetValue) -> SetValue {
    SetValue::kpair(SetValue::natural(n), v)
}

// wo_from_ac: choose from x, remove the choice, repeat.
fn wo_by_choice(c: &Code, g: &dyn CodeOracle) -> Result<Code, ReductionError> {
    let mut rest = decode(c)?;
    let mut order = Vec::new();
    while !rest.is_empty() {
        let family = SetValue::singleton(rest.clone());
        let answer = g
            .query(&encode_canonical(&family))
            .ok_or_else(|| ReductionError::OracleUndefined(encode_canonical(&family)))?;
        let f = decode(&answer)?;
        let chosen = as_function(&f)
            .and_then(|m| m.get(&rest).cloned())
            .filter(|e| rest.contains(e))
            .ok_or(ReductionError::BadOracleAnswer(f))?;
        rest = rest.remove(&chosen);
        order.push(chosen);
    }
    let bijection = function_from(order.into_iter().enumerate().map(|(i, e)| (SetValue::natural(i), e)));
    Ok(encode_canonical(&bijection))
}

// zl_from_wo, Q: y = {(0, e) : e ∈ X} ∪ {(1, (X, R))}
fn tag_carrier(x: &SetValue) -> SetValue {
    let Some(p) = Poset::from_set(x) else { return SetValue::empty() };
    let tagged = p.carrier.elements().iter().map(|e| tag(0, e.clone()));
    SetValue::from_elements(tagged.chain([tag(1, x.clone())]))
}

// zl_from_wo, P: read the well-order of X off the bijection and climb
fn greedy_ascent(f: &SetValue) -> SetValue {
    let Some(map) = as_function(f) else { return SetValue::empty() };
    let mut by_index: Vec<(usize, SetValue)> = map.into_iter().filter_map(|(k, v)| Some((k.as_natural()?, v))).collect();
    by_index.sort();
    let mut order = Vec::new();
    let mut poset = None;
    for (_, v) in by_index {
        match v.as_kpair() {
            Some((t, e)) if t == SetValue::natural(0) => order.push(e),
            Some((t, p)) if t == SetValue::natural(1) => poset = Poset::from_set(&p),
            _ => {}
        }
    }
    let (Some(poset), Some(first)) = (poset, order.first()) else {
        return SetValue::empty();
    };
    let mut top = first.clone();
    while let Some(next) = order.iter().find(|e| poset.lt(&top, e)) {
        top = next.clone();
    }
    top
}

// acp_from_ac, P: the chosen points, without the value at ∅
fn choice_range(f: &SetValue) -> SetValue {
    let Some(map) = as_function(f) else { return SetValue::empty() };
    SetValue::from_elements(map.into_iter().filter(|(k, _)| !k.is_empty()).map(|(_, v)| v))
}

// ac_from_acp, Q: {{z} × z : z ∈ x, z ≠ ∅}
fn disjointify(x: &SetValue) -> SetValue {
    SetValue::from_elements(x.elements().iter().filter(|z| !z.is_empty()).map(|z| {
        SetValue::from_elements(z.elements().iter().map(|e| SetValue::kpair(z.clone(), e.clone())))
    }))
}

// ac_from_acp and ac_from_zl, P: a choice function on the nonempty
// elements, extended by ∅ ↦ ∅
fn add_empty_choice(r: &SetValue) -> SetValue {
    r.insert(SetValue::kpair(SetValue::empty(), SetValue::empty()))
}

// ac_from_zl, Q: choice functions on initial segments of the nonempty
// elements of x (in canonical order), ordered by inclusion
fn partial_choices(x: &SetValue) -> SetValue {
    let domain: Vec<&SetValue> = x.ascending().filter(|z| !z.is_empty()).collect();
    let mut levels: Vec<Vec<Vec<(SetValue, SetValue)>>> = vec![vec![Vec::new()]];
    for z in &domain {
        let next = levels
            .last()
            .expect("nonempty")
            .iter()
            .flat_map(|g| {
                z.ascending().map(move |e| {
                    let mut h = g.clone();
                    h.push(((*z).clone(), e.clone()));
                    h
                })
            })
            .collect();
        levels.push(next);
    }
    let funcs: Vec<Vec<(SetValue, SetValue)>> = levels.into_iter().flatten().collect();
    let sets: Vec<SetValue> = funcs.iter().map(|g| function_from(g.iter().cloned())).collect();
    let mut relation = Vec::new();
    for (g, gs) in funcs.iter().zip(&sets) {
        for (h, hs) in funcs.iter().zip(&sets) {
            if g.len() <= h.len() && h[..g.len()] == g[..] {
                relation.push(SetValue::kpair(gs.clone(), hs.clone()));
            }
        }
    }
    SetValue::kpair(SetValue::from_elements(sets), SetValue::from_elements(relation))
}

fn identity_set(y: &SetValue) -> SetValue {
    y.clone()
}

/// Names accepted by [`witness_by_name`].
pub const WITNESS_NAMES: [&str; 5] = ["wo_from_ac", "zl_from_wo", "acp_from_ac", "ac_from_acp", "ac_from_zl"];

pub fn wo_from_ac() -> RelativeProcedure {
    RelativeProcedure {
        name: "wo_from_ac".into(),
        source: Problem::Wo,
        target: Problem::Ac,
        transformer: Arc::new(RelativeHostTransformer {
            name: "choose_and_remove",
            f: wo_by_choice,
        }),
        expected_calls: Some(SetValue::len),
    }
}

pub fn zl_from_wo() -> GwWitness {
    let pre = then(host("tag_carrier", tag_carrier), Arc::new(MachineTransformer::copy()));
    GwWitness::new("zl_from_wo", Problem::Zl, Problem::Wo, pre, host("greedy_ascent", greedy_ascent))
        .expect("oracle-free")
}

pub fn acp_from_ac() -> GwWitness {
    GwWitness::new(
        "acp_from_ac",
        Problem::AcPrime,
        Problem::Ac,
        Arc::new(MachineTransformer::copy()),
        host("choice_range", choice_range),
    )
    .expect("oracle-free")
}

pub fn ac_from_acp() -> GwWitness {
    GwWitness::new(
        "ac_from_acp",
        Problem::Ac,
        Problem::AcPrime,
        host("disjointify", disjointify),
        host("add_empty_choice", add_empty_choice),
    )
    .expect("oracle-free")
}

pub fn ac_from_zl() -> GwWitness {
    GwWitness::new(
        "ac_from_zl",
        Problem::Ac,
        Problem::Zl,
        host("partial_choices", partial_choices),
        host("add_empty_choice", add_empty_choice),
    )
    .expect("oracle-free")
}

/// `ac_from_acp` with a post-processing step that hands back the oracle's
/// answer unchanged. It is not a valid witness.
pub fn sabotaged() -> GwWitness {
    GwWitness::new(
        "sabotaged_ac_from_acp",
        Problem::Ac,
        Problem::AcPrime,
        host("disjointify", disjointify),
        host("identity", identity_set),
    )
    .expect("oracle-free")
}

/// A reduction of either kind.
#[derive(Debug, Clone)]
pub enum Reduction {
    Gw(GwWitness),
    Relative(RelativeProcedure),
}

impl Reduction {
    pub fn name(&self) -> &str {
        match self {
            Reduction::Gw(w) => &w.name,
            Reduction::Relative(r) => &r.name,
        }
    }

    pub fn source(&self) -> Problem {
        match self {
            Reduction::Gw(w) => w.source,
            Reduction::Relative(r) => r.source,
        }
    }

    pub fn target(&self) -> Problem {
        match self {
            Reduction::Gw(w) => w.target,
            Reduction::Relative(r) => r.target,
        }
    }

    /// Runs on one instance with the oracle built from `canon`. The result
    /// is the solution and the oracle call count.
    pub fn solve(&self, canon: Canonification, x: &SetValue, seeds: &[u64]) -> Result<(SetValue, usize), ReductionError> {
        match self {
            Reduction::Gw(w) => run_gw(w, canon, x, seeds).map(|r| (r.z, r.oracle_calls)),
            Reduction::Relative(r) => {
                if !r.source.in_domain(x) {
                    return Err(ReductionError::Precondition(x.clone(), r.source));
                }
                let (out, calls) = run_relative(r.transformer.as_ref(), &CanonOracle::new(canon), &encode_canonical(x))?;
                Ok((decode(&out)?, calls))
            }
        }
    }
}

pub fn witness_by_name(name: &str) -> Option<Reduction> {
    Some(match name {
        "wo_from_ac" => Reduction::Relative(wo_from_ac()),
        "zl_from_wo" => Reduction::Gw(zl_from_wo()),
        "acp_from_ac" => Reduction::Gw(acp_from_ac()),
        "ac_from_acp" => Reduction::Gw(ac_from_acp()),
        "ac_from_zl" => Reduction::Gw(ac_from_zl()),
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One instance of a suite run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceReport {
    pub instance: String,
    pub verdict: Verdict,
    /// Oracle calls per run; the largest count if runs differ.
    pub oracle_calls: usize,
    /// What went wrong, one line per failing run.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteHeader {
    pub witness: String,
    pub source: String,
    pub target: String,
    pub seeds: Vec<u64>,
    pub canonifications: Vec<String>,
    pub instances: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub header: SuiteHeader,
    pub entries: Vec<InstanceReport>,
}

impl SuiteReport {
    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| e.verdict == Verdict::Fail).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    /// Header line, then one line per instance.
    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("serializable");
        out.push('\n');
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e).expect("serializable"));
            out.push('\n');
        }
        out
    }
}

/// Runs the reduction on every instance with the canonical and the
/// adversarial canonification of the target problem.
///
/// A `[P, F, Q]` run feeds `P` the canonical code of `F(y)` and one
/// re-encoding per seed. A relative procedure is run once per oracle, with
/// the canonical oracle on the canonical code of `x` and, for each seed, a
/// re-encoding oracle on a re-encoded `x`. Instances are independent and
/// are checked in parallel; entries keep the input order.
pub fn verify_suite(r: &Reduction, instances: &[SetValue], seeds: &[u64]) -> SuiteReport {
    let canons = [Canonification::canonical(r.target()), Canonification::adversarial(r.target())];
    let entries = instances
        .par_iter()
        .map(|x| verify_instance(r, &canons, x, seeds))
        .collect();
    SuiteReport {
        header: SuiteHeader {
            witness: r.name().to_string(),
            source: r.source().id().to_string(),
            target: r.target().id().to_string(),
            seeds: seeds.to_vec(),
            canonifications: canons.iter().map(|c| c.label().to_string()).collect(),
            instances: instances.len(),
        },
        entries,
    }
}

fn verify_instance(r: &Reduction, canons: &[Canonification], x: &SetValue, seeds: &[u64]) -> InstanceReport {
    let mut trace = Vec::new();
    let mut calls = 0;
    let source = r.source();
    let mut record = |label: String, outcome: Result<(SetValue, usize), ReductionError>, expected: Option<usize>| match outcome {
        Err(e) => trace.push(format!("{label}: {e}")),
        Ok((z, n)) => {
            calls = calls.max(n);
            if !source.check(x, &z) {
                trace.push(format!("{label}: {z} does not solve {source}"));
            }
            if let Some(k) = expected.filter(|&k| k != n) {
                trace.push(format!("{label}: {n} oracle calls, expected {k}"));
            }
        }
    };
    for &canon in canons {
        match r {
            Reduction::Gw(w) => record(canon.label().to_string(), run_gw(w, canon, x, seeds).map(|g| (g.z, g.oracle_calls)), None),
            Reduction::Relative(p) => {
                let expected = p.expected_calls.map(|f| f(x));
                let mut runs = vec![(None, encode_canonical(x))];
                runs.extend(seeds.iter().map(|&s| (Some(s), encode(x, &seeded_enumeration(x, s)).expect("valid"))));
                for (seed, c) in runs {
                    let g = match seed {
                        None => CanonOracle::new(canon),
                        Some(s) => CanonOracle::reencoding(canon, s),
                    };
                    let outcome = run_relative(p.transformer.as_ref(), &g, &c)
                        .and_then(|(out, n)| Ok((decode(&out)?, n)));
                    let label = match seed {
                        None => canon.label().to_string(),
                        Some(s) => format!("{} seed {s}", canon.label()),
                    };
                    record(label, outcome, expected);
                }
            }
        }
    }
    InstanceReport {
        instance: x.to_literal(),
        verdict: if trace.is_empty() { Verdict::Pass } else { Verdict::Fail },
        oracle_calls: calls,
        trace,
    }
}
