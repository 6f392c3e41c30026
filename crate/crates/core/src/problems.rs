//! Choice principles as construction problems on hereditarily finite sets.
//!
//! Ordered pairs are Kuratowski pairs, functions are sets of pairs and the
//! ordinal of a well-ordering is a von Neumann natural.
//!
//! - `AC`: a function `f` on `x ∪ {∅}` with `f(∅) = ∅` and `f(z) ∈ z` for
//!   nonempty `z ∈ x`.
//! - `AC'`: for `x` with nonempty, pairwise disjoint elements, a set `r ⊆ ⋃x`
//!   meeting every element in exactly one point.
//! - `WO`: a bijection from a natural `n` onto `x`.
//! - `ZL`: for a nonempty finite poset `(X, R)`, an `R`-maximal element.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::set::SetValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Problem {
    Ac,
    AcPrime,
    Wo,
    Zl,
}

impl Problem {
    pub const ALL: [Problem; 4] = [Problem::Ac, Problem::AcPrime, Problem::Wo, Problem::Zl];

    /// CLI identifier.
    pub fn id(self) -> &'static str {
        match self {
            Problem::Ac => "ac",
            Problem::AcPrime => "acp",
            Problem::Wo => "wo",
            Problem::Zl => "zl",
        }
    }

    pub fn in_domain(self, x: &SetValue) -> bool {
        match self {
            Problem::Ac | Problem::Wo => true,
            Problem::AcPrime => is_disjoint_family(x),
            Problem::Zl => Poset::from_set(x).is_some(),
        }
    }

    /// Whether `y` solves the instance `x`.
    pub fn check(self, x: &SetValue, y: &SetValue) -> bool {
        match self {
            Problem::Ac => check_ac(x, y),
            Problem::AcPrime => self.in_domain(x) && check_transversal(x, y),
            Problem::Wo => check_wo(x, y),
            Problem::Zl => Poset::from_set(x).is_some_and(|p| p.is_maximal(y)),
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Problem::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| format!("unknown problem '{s}' (expected ac, acp, wo or zl)"))
    }
}

fn is_disjoint_family(x: &SetValue) -> bool {
    let elems = x.elements();
    if elems.iter().any(SetValue::is_empty) {
        return false;
    }
    let mut owner: HashMap<&SetValue, usize> = HashMap::new();
    for (i, z) in elems.iter().enumerate() {
        for e in z.elements() {
            if owner.insert(e, i).is_some() {
                return false;
            }
        }
    }
    true
}

/// Reads a set of Kuratowski pairs as a function, rejecting non-pairs and
/// conflicting values.
pub fn as_function(y: &SetValue) -> Option<BTreeMap<SetValue, SetValue>> {
    let mut map = BTreeMap::new();
    for p in y.elements() {
        let (k, v) = p.as_kpair()?;
        if map.insert(k, v).is_some() {
            return None;
        }
    }
    Some(map)
}

pub fn function_from<I>(pairs: I) -> SetValue
where
    I: IntoIterator<Item = (SetValue, SetValue)>,
{
    SetValue::from_elements(pairs.into_iter().map(|(a, b)| SetValue::kpair(a, b)))
}

fn check_ac(x: &SetValue, y: &SetValue) -> bool {
    let Some(f) = as_function(y) else { return false };
    let empty = SetValue::empty();
    let domain = x.insert(empty.clone());
    if f.len() != domain.len() || !domain.elements().iter().all(|z| f.contains_key(z)) {
        return false;
    }
    if f[&empty] != empty {
        return false;
    }
    x.elements()
        .iter()
        .filter(|z| !z.is_empty())
        .all(|z| z.contains(&f[z]))
}

fn check_transversal(x: &SetValue, y: &SetValue) -> bool {
    if !y.is_subset(&x.union()) {
        return false;
    }
    x.elements()
        .iter()
        .all(|z| y.elements().iter().filter(|e| z.contains(e)).count() == 1)
}

fn check_wo(x: &SetValue, y: &SetValue) -> bool {
    let Some(f) = as_function(y) else { return false };
    let n = f.len();
    if n != x.len() {
        return false;
    }
    let keys_ok = (0..n).all(|i| f.contains_key(&SetValue::natural(i)));
    let range = SetValue::from_elements(f.values().cloned());
    keys_ok && range.len() == n && range == *x
}

/// A finite partial order decoded from a Kuratowski pair `(X, R)`.
#[derive(Debug, Clone)]
pub struct Poset {
    pub carrier: SetValue,
    pub relation: SetValue,
    /// `le[i][j]` for carrier elements in canonical ascending order.
    le: Vec<Vec<bool>>,
    index: HashMap<SetValue, usize>,
    items: Vec<SetValue>,
}

impl Poset {
    /// Accepts `(X, R)` with `X` nonempty and `R ⊆ X × X` a partial order.
    pub fn from_set(x: &SetValue) -> Option<Poset> {
        let (carrier, relation) = x.as_kpair()?;
        if carrier.is_empty() {
            return None;
        }
        let items: Vec<SetValue> = carrier.ascending().cloned().collect();
        let index: HashMap<SetValue, usize> = items.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let n = items.len();
        let mut le = vec![vec![false; n]; n];
        for p in relation.elements() {
            let (a, b) = p.as_kpair()?;
            let (&i, &j) = (index.get(&a)?, index.get(&b)?);
            le[i][j] = true;
        }
        let reflexive = (0..n).all(|i| le[i][i]);
        let antisymmetric = (0..n).all(|i| (0..n).all(|j| i == j || !(le[i][j] && le[j][i])));
        let transitive =
            (0..n).all(|i| (0..n).all(|j| !le[i][j] || (0..n).all(|k| !le[j][k] || le[i][k])));
        (reflexive && antisymmetric && transitive).then_some(Poset {
            carrier,
            relation,
            le,
            index,
            items,
        })
    }

    pub fn to_set(&self) -> SetValue {
        SetValue::kpair(self.carrier.clone(), self.relation.clone())
    }

    /// Elements in canonical ascending order.
    pub fn items(&self) -> &[SetValue] {
        &self.items
    }

    pub fn le(&self, a: &SetValue, b: &SetValue) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&i), Some(&j)) => self.le[i][j],
            _ => false,
        }
    }

    pub fn lt(&self, a: &SetValue, b: &SetValue) -> bool {
        a != b && self.le(a, b)
    }

    pub fn is_maximal(&self, y: &SetValue) -> bool {
        let Some(&i) = self.index.get(y) else { return false };
        (0..self.items.len()).all(|j| j == i || !self.le[i][j])
    }

    pub fn maximal_elements(&self) -> impl Iterator<Item = &SetValue> {
        self.items.iter().filter(|y| self.is_maximal(y))
    }

    /// Builds `(X, R)` from a carrier and a relation given as index pairs
    /// into `carrier.ascending()`; reflexive pairs are added.
    pub fn build(carrier: &SetValue, strict: &[(usize, usize)]) -> SetValue {
        let items: Vec<SetValue> = carrier.ascending().cloned().collect();
        let mut pairs: Vec<SetValue> = items.iter().map(|a| SetValue::kpair(a.clone(), a.clone())).collect();
        pairs.extend(
            strict
                .iter()
                .map(|&(i, j)| SetValue::kpair(items[i].clone(), items[j].clone())),
        );
        SetValue::kpair(carrier.clone(), SetValue::from_elements(pairs))
    }
}

/// Which solution a canonification picks when several exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChoicePolicy {
    /// Canonical-least choices.
    Least,
    /// Canonical-greatest choices.
    Greatest,
}

/// A total deterministic witness function for a problem: a solution on the
/// domain, `∅` elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Canonification {
    pub problem: Problem,
    pub policy: ChoicePolicy,
}

impl Canonification {
    pub fn canonical(problem: Problem) -> Self {
        Canonification {
            problem,
            policy: ChoicePolicy::Least,
        }
    }

    pub fn adversarial(problem: Problem) -> Self {
        Canonification {
            problem,
            policy: ChoicePolicy::Greatest,
        }
    }

    pub fn label(&self) -> &'static str {
        match self.policy {
            ChoicePolicy::Least => "canonical",
            ChoicePolicy::Greatest => "adversarial",
        }
    }

    fn pick<'a>(&self, z: &'a SetValue) -> Option<&'a SetValue> {
        match self.policy {
            ChoicePolicy::Least => z.least(),
            ChoicePolicy::Greatest => z.greatest(),
        }
    }

    pub fn apply(&self, x: &SetValue) -> SetValue {
        if !self.problem.in_domain(x) {
            return SetValue::empty();
        }
        match self.problem {
            Problem::Ac => {
                let empty = SetValue::empty();
                let chosen = x
                    .elements()
                    .iter()
                    .filter(|z| !z.is_empty())
                    .map(|z| (z.clone(), self.pick(z).expect("nonempty").clone()));
                function_from(chosen.chain([(empty.clone(), empty)]))
            }
            Problem::AcPrime => {
                SetValue::from_elements(x.elements().iter().map(|z| self.pick(z).expect("nonempty").clone()))
            }
            Problem::Wo => {
                let order: Vec<&SetValue> = match self.policy {
                    ChoicePolicy::Least => x.ascending().collect(),
                    ChoicePolicy::Greatest => x.elements().iter().collect(),
                };
                function_from(
                    order
                        .into_iter()
                        .enumerate()
                        .map(|(i, e)| (SetValue::natural(i), e.clone())),
                )
            }
            Problem::Zl => {
                let poset = Poset::from_set(x).expect("in domain");
                let mut maximal = poset.maximal_elements();
                let pick = match self.policy {
                    ChoicePolicy::Least => maximal.next(),
                    ChoicePolicy::Greatest => maximal.last(),
                };
                pick.expect("finite nonempty posets have maximal elements").clone()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: &str) -> SetValue {
        t.parse().unwrap()
    }

    fn kp(a: &SetValue, b: &SetValue) -> SetValue {
        SetValue::kpair(a.clone(), b.clone())
    }

    #[test]
    fn domain_examples() {
        assert!(Problem::AcPrime.in_domain(&s("{{{}}}")));
        assert!(!Problem::AcPrime.in_domain(&s("{{{}},{{},{{}}}}")));
        assert!(!Problem::AcPrime.in_domain(&s("{{}}")));
        let a = SetValue::empty();
        let one_point = kp(&SetValue::singleton(a.clone()), &SetValue::singleton(kp(&a, &a)));
        assert!(Problem::Zl.in_domain(&one_point));
        assert!(!Problem::Zl.in_domain(&s("{{}}")));
        // missing reflexive pair
        let bad = kp(&SetValue::singleton(a.clone()), &SetValue::empty());
        assert!(!Problem::Zl.in_domain(&bad));
        // empty carrier
        assert!(!Problem::Zl.in_domain(&kp(&SetValue::empty(), &SetValue::empty())));
    }

    #[test]
    fn check_examples() {
        let e = SetValue::empty();
        let one = s("{{}}");
        let y = function_from([(e.clone(), e.clone()), (one.clone(), e.clone())]);
        assert!(Problem::Ac.check(&s("{{{}}}"), &y));
        assert!(!Problem::Ac.check(&s("{{{}},{}}"), &function_from([(one.clone(), e.clone())])));

        let x = s("{{},{{}}}");
        let wo = function_from([(SetValue::natural(0), e.clone()), (SetValue::natural(1), one.clone())]);
        assert!(Problem::Wo.check(&x, &wo));
        let not_injective = function_from([(SetValue::natural(0), e.clone()), (SetValue::natural(1), e.clone())]);
        assert!(!Problem::Wo.check(&x, &not_injective));

        let carrier = s("{{},{{}}}");
        let antichain = Poset::build(&carrier, &[]);
        assert!(Problem::Zl.check(&antichain, &e));
        assert!(Problem::Zl.check(&antichain, &one));
        assert!(!Problem::Zl.check(&antichain, &s("{{{}}}")));
        let chain = Poset::build(&carrier, &[(0, 1)]);
        assert!(!Problem::Zl.check(&chain, &e));
        assert!(Problem::Zl.check(&chain, &one));

        assert!(Problem::AcPrime.check(&s("{{{}},{{{}}}}"), &s("{{},{{}}}")));
        assert!(!Problem::AcPrime.check(&s("{{{}},{{{}}}}"), &s("{{}}")));
    }

    #[test]
    fn canonify_examples() {
        assert_eq!(Canonification::canonical(Problem::Wo).apply(&SetValue::empty()), SetValue::empty());
        let e = SetValue::empty();
        let two = s("{{},{{}}}");
        let expected = function_from([(e.clone(), e.clone()), (two.clone(), e.clone())]);
        assert_eq!(Canonification::canonical(Problem::Ac).apply(&s("{{{},{{}}}}")), expected);
        assert_eq!(Canonification::canonical(Problem::Zl).apply(&s("{{}}")), SetValue::empty());
        let adv = Canonification::adversarial(Problem::Ac).apply(&s("{{{},{{}}}}"));
        assert_eq!(adv, function_from([(e.clone(), e.clone()), (two, s("{{}}"))]));
    }

    #[test]
    fn parse_problem_ids() {
        for p in Problem::ALL {
            assert_eq!(p.id().parse::<Problem>().unwrap(), p);
        }
        assert!("xx".parse::<Problem>().is_err());
    }
}
