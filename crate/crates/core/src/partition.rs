//! Integer partitions, the refinement order on them, and the vanishing
//! threshold function `r`.
//!
//! A partition of `d` indexes the stratum of degree-`d` polynomials whose
//! irreducible factors have the given degrees. Partitions with at least two
//! parts index the reducible strata.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{arg, Error, Result};

/// A multiset of positive integers, stored as a non-increasing list.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Builds a partition from parts in any order. Zero parts and empty input
    /// are rejected.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return arg("a partition needs at least one part");
        }
        if parts.contains(&0) {
            return arg("partition parts must be positive");
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { parts })
    }

    /// The one-part partition `(d)`.
    pub fn singleton(d: usize) -> Result<Self> {
        Self::new(vec![d])
    }

    /// The partition `1 + 1 + ... + 1` of `d`.
    pub fn all_ones(d: usize) -> Result<Self> {
        Self::new(vec![1; d])
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// The total `d` being partitioned.
    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of parts, `|λ|`.
    pub fn size(&self) -> usize {
        self.parts.len()
    }

    pub fn is_singleton(&self) -> bool {
        self.parts.len() == 1
    }

    /// Multiplicity `m_j` of the part `j`.
    pub fn multiplicity(&self, j: usize) -> usize {
        self.parts.iter().filter(|&&p| p == j).count()
    }

    /// All nonzero multiplicities, keyed by part size.
    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for &p in &self.parts {
            *out.entry(p).or_insert(0) += 1;
        }
        out
    }

    pub fn largest_part(&self) -> usize {
        self.parts[0]
    }

    /// Canonical ordering key: number of parts first, then the part list.
    fn order_key(&self) -> (usize, &[usize]) {
        (self.parts.len(), &self.parts)
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for p in &self.parts {
            if !first {
                f.write_str("+")?;
            }
            write!(f, "{p}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split('+')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Argument(format!("bad partition part {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// All partitions of `d` with at least `min_parts` parts, in canonical order
/// (by number of parts, then lexicographically on the non-increasing parts).
pub fn enumerate_partitions(d: usize, min_parts: usize) -> Result<Vec<Partition>> {
    if d == 0 {
        return arg("enumerate_partitions needs d >= 1");
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(d);
    collect_partitions(d, d, &mut current, &mut out);
    let mut parts: Vec<Partition> = out
        .into_iter()
        .filter(|p: &Vec<usize>| p.len() >= min_parts)
        .map(|parts| Partition { parts })
        .collect();
    parts.sort();
    Ok(parts)
}

/// Partitions of `d` with at least two parts.
pub fn reducible_partitions(d: usize) -> Result<Vec<Partition>> {
    enumerate_partitions(d, 2)
}

fn collect_partitions(
    remaining: usize,
    max_part: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if remaining == 0 {
        out.push(current.clone());
        return;
    }
    for part in (1..=max_part.min(remaining)).rev() {
        current.push(part);
        collect_partitions(remaining - part, part, current, out);
        current.pop();
    }
}

/// Whether `finer` refines `coarser`: every part of `coarser` can be split so
/// that the pieces, taken together, are exactly the parts of `finer`.
pub fn refines(finer: &Partition, coarser: &Partition) -> Result<bool> {
    if finer.total() != coarser.total() {
        return arg(format!(
            "refines: {finer} and {coarser} partition different totals"
        ));
    }
    if finer.size() < coarser.size() {
        return Ok(false);
    }
    let mut memo = HashMap::new();
    Ok(fill_bins(
        finer.parts(),
        0,
        coarser.parts().to_vec(),
        &mut memo,
    ))
}

// Places finer parts (largest first) into bins sized by the coarser parts.
fn fill_bins(
    pieces: &[usize],
    index: usize,
    mut bins: Vec<usize>,
    memo: &mut HashMap<(usize, Vec<usize>), bool>,
) -> bool {
    if index == pieces.len() {
        return bins.iter().all(|&b| b == 0);
    }
    bins.sort_unstable();
    let key = (index, bins.clone());
    if let Some(&known) = memo.get(&key) {
        return known;
    }
    let piece = pieces[index];
    let mut found = false;
    let mut last_tried = None;
    for i in 0..bins.len() {
        if bins[i] < piece || last_tried == Some(bins[i]) {
            continue;
        }
        last_tried = Some(bins[i]);
        let mut next = bins.clone();
        next[i] -= piece;
        if fill_bins(pieces, index + 1, next, memo) {
            found = true;
            break;
        }
    }
    memo.insert(key, found);
    found
}

/// `r(1), ..., r(d_max)` from the recursion `r(1) = 2`,
/// `r(d) = 1 + min { r(λ) : λ ⊢ d, |λ| ≥ 2 }` with `r(λ) = Σ_j m_j(λ) r(j)`.
///
/// The inner minimum is an unbounded knapsack over parts `1..d`, so no
/// partitions are materialized. Index 0 of the returned table is unused.
pub fn r_table(d_max: usize) -> Vec<u64> {
    let mut r = vec![0u64; d_max + 1];
    if d_max >= 1 {
        r[1] = 2;
    }
    for d in 2..=d_max {
        r[d] = 1 + min_split_cost(d, &r).0;
    }
    r
}

// Minimum of Σ r(part) over multisets of parts < d summing to d, together with
// the number of multisets attaining it.
fn min_split_cost(d: usize, r: &[u64]) -> (u64, u64) {
    let mut best = vec![(u64::MAX, 0u64); d + 1];
    best[0] = (0, 1);
    for part in 1..d {
        for total in part..=d {
            let (prev_cost, prev_count) = best[total - part];
            if prev_cost == u64::MAX {
                continue;
            }
            let cost = prev_cost + r[part];
            let entry = &mut best[total];
            if cost < entry.0 {
                *entry = (cost, prev_count);
            } else if cost == entry.0 {
                entry.1 += prev_count;
            }
        }
    }
    best[d]
}

/// `r(d)` for `d ≥ 1`.
pub fn r_of_degree(d: usize) -> Result<u64> {
    if d == 0 {
        return arg("r is defined for d >= 1");
    }
    Ok(r_table(d)[d])
}

/// `r(λ) = Σ_j m_j(λ) r(j)` for a partition with at least two parts.
pub fn r_of_partition(lambda: &Partition) -> Result<u64> {
    if lambda.is_singleton() {
        return arg(format!(
            "r(λ) is only defined for non-singleton partitions, got ({lambda})"
        ));
    }
    let table = r_table(lambda.largest_part());
    Ok(lambda.parts().iter().map(|&j| table[j]).sum())
}

/// The minimum inside the `r(d)` recursion and how many partitions attain it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RMinimum {
    pub d: usize,
    pub minimum: u64,
    pub minimizer_count: u64,
    pub attained_by_all_ones: bool,
}

/// Inspects the minimizers of `r(λ)` over non-singleton `λ ⊢ d`, `d ≥ 2`.
pub fn r_minimum(d: usize) -> Result<RMinimum> {
    if d < 2 {
        return arg("the r recursion minimum needs d >= 2");
    }
    let table = r_table(d);
    let (minimum, minimizer_count) = min_split_cost(d, &table);
    Ok(RMinimum {
        d,
        minimum,
        minimizer_count,
        attained_by_all_ones: table[1] * d as u64 == minimum,
    })
}

/// `C(n, k)` for machine-sized arguments.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn counts_and_min_parts() {
        assert_eq!(enumerate_partitions(4, 0).unwrap().len(), 5);
        let reducible = enumerate_partitions(4, 2).unwrap();
        let mut expected = vec![p("1+3"), p("2+2"), p("1+1+2"), p("1+1+1+1")];
        expected.sort();
        assert_eq!(reducible, expected);
        assert!(enumerate_partitions(1, 2).unwrap().is_empty());
        assert!(enumerate_partitions(0, 0).is_err());
    }

    #[test]
    fn canonical_order_is_graded_then_lex() {
        let all = enumerate_partitions(4, 0).unwrap();
        let rendered: Vec<String> = all.iter().map(|p| p.to_string()).collect();
        assert_eq!(rendered, ["4", "2+2", "3+1", "2+1+1", "1+1+1+1"]);
    }

    #[test]
    fn multiplicities() {
        let l = p("1+1+2");
        assert_eq!(l.parts(), &[2, 1, 1]);
        assert_eq!(l.multiplicity(1), 2);
        assert_eq!(l.size(), 3);
        assert_eq!(l.total(), 4);
        assert!(Partition::new(vec![2, 0]).is_err());
        assert!("2+x".parse::<Partition>().is_err());
    }

    #[test]
    fn refinement_examples() {
        assert!(refines(&p("1+1+2"), &p("2+2")).unwrap());
        assert!(!refines(&p("1+3"), &p("2+2")).unwrap());
        assert!(!refines(&p("2+2"), &p("1+3")).unwrap());
        assert!(refines(&p("2+1+1"), &p("3+1")).unwrap());
        let l = p("3+2+1");
        assert!(refines(&l, &l).unwrap());
        assert!(!refines(&p("2+2"), &p("3+1")).unwrap());
        assert!(refines(&p("2+2"), &p("3+2")).is_err());
    }

    #[test]
    fn r_examples() {
        assert_eq!(r_of_degree(1).unwrap(), 2);
        assert_eq!(r_of_degree(3).unwrap(), 7);
        assert_eq!(r_of_partition(&p("1+1+2")).unwrap(), 9);
        assert!(r_of_partition(&p("4")).is_err());
        assert!(r_of_degree(0).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(8, 3), 56);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(15, 12), 455);
    }
}
