//! Sets of ordinals as codes for hereditarily finite sets.
//!
//! Given an enumeration `f` of `tc({x})` with `x` at index 0, the code of `x`
//! is the membership graph `{ pair(i, j) : f[i] ∈ f[j] }`. Decoding unpairs
//! every element into an edge, checks the graph is well-founded and
//! extensional, and returns the Mostowski collapse of node 0.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ordinal::{Ordinal, OrdinalError};
use crate::pairing::{pair_finite, unpair};
use crate::set::SetValue;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("invalid enumeration: {0}")]
    InvalidEnumeration(String),
    #[error("ill-founded code: membership cycle through node {0}")]
    IllFounded(Ordinal),
    #[error("non-extensional code: nodes {0} and {1} have the same elements")]
    NonExtensional(Ordinal, Ordinal),
    #[error("unsupported range: {0}")]
    UnsupportedRange(Ordinal),
    #[error("code literal error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

impl From<OrdinalError> for CodeError {
    fn from(e: OrdinalError) -> Self {
        match e {
            OrdinalError::UnsupportedRange(o) => CodeError::UnsupportedRange(o),
            OrdinalError::Parse { pos, msg } => CodeError::Parse { pos, msg },
        }
    }
}

/// A well-ordering of `tc({x})` listing `x` first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    items: Vec<SetValue>,
}

impl Enumeration {
    /// Checks that `items` lists `tc({items[0]})` without repetition.
    pub fn new(items: Vec<SetValue>) -> Result<Self, CodeError> {
        let Some(root) = items.first() else {
            return Err(CodeError::InvalidEnumeration("empty enumeration".into()));
        };
        let closure: HashSet<SetValue> = root.closure_bfs().into_iter().collect();
        let mut seen = HashSet::with_capacity(items.len());
        for item in &items {
            if !seen.insert(item) {
                return Err(CodeError::InvalidEnumeration(format!("{item} listed twice")));
            }
            if !closure.contains(item) {
                return Err(CodeError::InvalidEnumeration(format!(
                    "{item} is not in the transitive closure"
                )));
            }
        }
        if seen.len() != closure.len() {
            return Err(CodeError::InvalidEnumeration(format!(
                "{} of {} closure members listed",
                seen.len(),
                closure.len()
            )));
        }
        Ok(Enumeration { items })
    }

    pub fn root(&self) -> &SetValue {
        &self.items[0]
    }

    pub fn items(&self) -> &[SetValue] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A finite set of ordinals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Code(BTreeSet<Ordinal>);

impl Code {
    pub fn new(elems: BTreeSet<Ordinal>) -> Self {
        Code(elems)
    }

    pub fn empty() -> Self {
        Code::default()
    }

    pub fn elements(&self) -> &BTreeSet<Ordinal> {
        &self.0
    }

    pub fn into_elements(self) -> BTreeSet<Ordinal> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, o: &Ordinal) -> bool {
        self.0.contains(o)
    }

    /// Membership edges `(member, container)`.
    pub fn edges(&self) -> Result<Vec<(Ordinal, Ordinal)>, CodeError> {
        self.0.iter().map(|c| Ok(unpair(c)?)).collect()
    }

    pub fn from_edges<I>(edges: I) -> Code
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Code(
            edges
                .into_iter()
                .map(|(i, j)| Ordinal::finite(pair_finite(i as u64, j as u64)))
                .collect(),
        )
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<Code, CodeError> {
        let t = text.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or(CodeError::Parse {
                pos: 0,
                msg: "expected a bracketed list".into(),
            })?;
        let offset = text.len() - text.trim_start().len() + 1;
        let mut out = BTreeSet::new();
        if inner.trim().is_empty() {
            return Ok(Code(out));
        }
        let mut start = 0;
        for piece in inner.split(',') {
            let lead = piece.len() - piece.trim_start().len();
            let o = Ordinal::from_text(piece.trim()).map_err(|e| match e {
                OrdinalError::Parse { pos, msg } => CodeError::Parse {
                    pos: offset + start + lead + pos,
                    msg,
                },
                other => other.into(),
            })?;
            out.insert(o);
            start += piece.len() + 1;
        }
        Ok(Code(out))
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, o) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{o}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for Code {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Code::from_text(s)
    }
}

impl FromIterator<Ordinal> for Code {
    fn from_iter<I: IntoIterator<Item = Ordinal>>(iter: I) -> Self {
        Code(iter.into_iter().collect())
    }
}

/// Code of `x` under the enumeration `f`.
pub fn encode(x: &SetValue, f: &Enumeration) -> Result<Code, CodeError> {
    if f.root() != x {
        return Err(CodeError::InvalidEnumeration(format!(
            "root {} is not {x}",
            f.root()
        )));
    }
    let index: HashMap<&SetValue, usize> = f.items.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let edges = f.items.iter().enumerate().flat_map(|(j, v)| {
        let index = &index;
        v.elements().iter().map(move |c| (index[c], j))
    });
    Ok(Code::from_edges(edges))
}

pub fn canonical_enumeration(x: &SetValue) -> Enumeration {
    Enumeration {
        items: x.closure_bfs(),
    }
}

pub fn encode_canonical(x: &SetValue) -> Code {
    encode(x, &canonical_enumeration(x)).expect("canonical enumeration is valid")
}

/// Enumeration of `tc({x})` whose non-root slots are a seeded shuffle of the
/// canonical ones.
pub fn seeded_enumeration(x: &SetValue, seed: u64) -> Enumeration {
    let mut items = x.closure_bfs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    items[1..].shuffle(&mut rng);
    Enumeration { items }
}

/// Same set, different code.
pub fn reencode(c: &Code, seed: u64) -> Result<Code, CodeError> {
    let x = decode(c)?;
    encode(&x, &seeded_enumeration(&x, seed))
}

/// Decodes a code into the set it represents.
pub fn decode(c: &Code) -> Result<SetValue, CodeError> {
    let mut children: BTreeMap<Ordinal, Vec<Ordinal>> = BTreeMap::new();
    children.insert(Ordinal::zero(), Vec::new());
    for (member, container) in c.edges()? {
        children.entry(member.clone()).or_default();
        children.entry(container).or_default().push(member);
    }
    let ids: HashMap<&Ordinal, usize> = children.keys().enumerate().map(|(i, k)| (k, i)).collect();
    let labels: Vec<&Ordinal> = children.keys().collect();
    let graph: Vec<Vec<usize>> = children
        .values()
        .map(|cs| {
            let mut v: Vec<usize> = cs.iter().map(|m| ids[m]).collect();
            v.sort_unstable();
            v
        })
        .collect();

    let mut seen_sets: HashMap<&[usize], usize> = HashMap::new();
    for (i, cs) in graph.iter().enumerate() {
        if let Some(&j) = seen_sets.get(cs.as_slice()) {
            return Err(CodeError::NonExtensional(labels[j].clone(), labels[i].clone()));
        }
        seen_sets.insert(cs, i);
    }

    let order = topological_order(&graph).map_err(|i| CodeError::IllFounded(labels[i].clone()))?;
    let mut values: Vec<Option<SetValue>> = vec![None; graph.len()];
    for i in order {
        let v = SetValue::from_elements(
            graph[i]
                .iter()
                .map(|&m| values[m].clone().expect("members collapse first")),
        );
        values[i] = Some(v);
    }
    Ok(values[0].take().expect("node 0 present"))
}

/// Members-before-containers order, or a node on a cycle.
fn topological_order(graph: &[Vec<usize>]) -> Result<Vec<usize>, usize> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut mark = vec![Mark::New; graph.len()];
    let mut order = Vec::with_capacity(graph.len());
    for start in 0..graph.len() {
        if mark[start] != Mark::New {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        mark[start] = Mark::Active;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if let Some(&m) = graph[node].get(*next) {
                *next += 1;
                match mark[m] {
                    Mark::Active => return Err(m),
                    Mark::New => {
                        mark[m] = Mark::Active;
                        stack.push((m, 0));
                    }
                    Mark::Done => {}
                }
            } else {
                mark[node] = Mark::Done;
                order.push(node);
                stack.pop();
            }
        }
    }
    Ok(order)
}

/// `rep(c, x)`: `c` codes `x`.
pub fn check_rep(c: &Code, x: &SetValue) -> bool {
    decode(c).is_ok_and(|d| d == *x)
}
