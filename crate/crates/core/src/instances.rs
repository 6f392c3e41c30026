//! Deterministic instance suites for the choice problems.

use crate::problems::{Poset, Problem};
use crate::set::SetValue;

/// All sets of rank at most `max_rank`, in ascending canonical order.
pub fn sets_up_to_rank(max_rank: usize) -> Vec<SetValue> {
    let mut level = vec![SetValue::empty()];
    for _ in 0..max_rank {
        assert!(level.len() <= 16, "rank bound too large to enumerate");
        level = subsets(&level, level.len())
            .into_iter()
            .map(SetValue::from_elements)
            .collect();
    }
    level.sort();
    level
}

/// Subsets of `pool` with at most `max_len` elements, by size and then
/// lexicographically by pool index.
fn subsets<T: Clone>(pool: &[T], max_len: usize) -> Vec<Vec<T>> {
    fn go<T: Clone>(pool: &[T], start: usize, len: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            cur.push(pool[i].clone());
            go(pool, i + 1, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for len in 0..=max_len.min(pool.len()) {
        go(pool, 0, len, &mut Vec::new(), &mut out);
    }
    out
}

/// Strict partial orders on `n` points, as index pairs `(i, j)` meaning
/// `i < j` in the order.
fn strict_orders(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1 << pairs.len()) {
        let mut lt = vec![vec![false; n]; n];
        for (b, &(i, j)) in pairs.iter().enumerate() {
            lt[i][j] = mask >> b & 1 == 1;
        }
        let asym = (0..n).all(|i| (0..n).all(|j| !(lt[i][j] && lt[j][i])));
        let trans = (0..n).all(|i| (0..n).all(|j| !lt[i][j] || (0..n).all(|k| !lt[j][k] || lt[i][k])));
        if asym && trans {
            out.push(pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &p)| p).collect());
        }
    }
    out
}

/// Bounds for an instance suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteSpec {
    /// Rank bound for the elements of an instance (for ZL, of the carrier).
    pub max_rank: usize,
    /// Bound on the number of elements (for ZL, on the carrier size).
    pub max_carrier: usize,
    /// Keep only the first `limit` instances.
    pub limit: Option<usize>,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        SuiteSpec {
            max_rank: 2,
            max_carrier: 4,
            limit: None,
        }
    }
}

/// Every in-domain instance of `problem` within `spec`, in a fixed order.
pub fn generate(problem: Problem, spec: &SuiteSpec) -> Vec<SetValue> {
    let pool = sets_up_to_rank(spec.max_rank);
    let cap = spec.limit.unwrap_or(usize::MAX);
    let mut out = Vec::new();
    match problem {
        Problem::Ac | Problem::Wo | Problem::AcPrime => {
            for s in subsets(&pool, spec.max_carrier) {
                let x = SetValue::from_elements(s);
                if problem.in_domain(&x) {
                    out.push(x);
                }
                if out.len() >= cap {
                    break;
                }
            }
        }
        Problem::Zl => {
            let orders: Vec<Vec<Vec<(usize, usize)>>> = (0..=spec.max_carrier).map(strict_orders).collect();
            'outer: for s in subsets(&pool, spec.max_carrier) {
                if s.is_empty() {
                    continue;
                }
                let carrier = SetValue::from_elements(s);
                for strict in &orders[carrier.len()] {
                    out.push(Poset::build(&carrier, strict));
                    if out.len() >= cap {
                        break 'outer;
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_levels() {
        assert_eq!(sets_up_to_rank(0).len(), 1);
        assert_eq!(sets_up_to_rank(1).len(), 2);
        assert_eq!(sets_up_to_rank(2).len(), 4);
        assert_eq!(sets_up_to_rank(3).len(), 16);
        assert!(sets_up_to_rank(3).iter().all(|x| x.rank() <= 3));
    }

    #[test]
    fn poset_counts() {
        // labelled posets on 0..4 points
        let counts: Vec<usize> = (0..5).map(|n| strict_orders(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 3, 19, 219]);
    }

    #[test]
    fn suite_sizes() {
        let spec = SuiteSpec::default();
        assert_eq!(generate(Problem::Ac, &spec).len(), 16);
        assert_eq!(generate(Problem::Wo, &spec).len(), 16);
        assert_eq!(generate(Problem::AcPrime, &spec).len(), 5);
        assert_eq!(generate(Problem::Zl, &spec).len(), 4 + 6 * 3 + 4 * 19 + 219);
        let capped = SuiteSpec { limit: Some(7), ..spec };
        assert_eq!(generate(Problem::Zl, &capped).len(), 7);
        for p in Problem::ALL {
            assert!(generate(p, &spec).iter().all(|x| p.in_domain(x)));
        }
    }
}
