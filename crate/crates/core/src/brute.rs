//! Exhaustive enumeration over small prime fields.
//!
//! Polynomials are dense coefficient vectors over the monomials of degree
//! `≤ d`, listed in graded-lex order (total degree first, then the exponent
//! of the first variable, and so on). A polynomial of degree `≤ j` is coded
//! as `Σ c_i p^i` over the first `C(j+n, n)` monomials, so codes do not
//! depend on the ambient degree cap. The sieve never factors anything: it
//! marks every product of lower-degree normalized polynomials and counts the
//! survivors.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::census::{irr_count, stratum_count};
use crate::error::{arg, Error, Result};
use crate::partition::{binomial, enumerate_partitions, Partition};

/// Default cap on `p^C(d+n, n)`, the size of the sieve's state space.
pub const DEFAULT_STATE_CAP: u64 = 1 << 24;

const SUPPORTED_PRIMES: [u64; 3] = [2, 3, 5];

/// Monomials of degree `≤ d` in `n` variables, in graded-lex order.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    n: usize,
    d: usize,
    exponents: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl MonomialBasis {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n == 0 {
            return arg("a monomial basis needs n >= 1");
        }
        let mut exponents = Vec::new();
        for total in 0..=d {
            let mut block = Vec::new();
            compositions(total as u32, n, &mut Vec::with_capacity(n), &mut block);
            block.sort();
            exponents.extend(block);
        }
        let index = exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        Ok(Self {
            n,
            d,
            exponents,
            index,
        })
    }

    pub fn degree_cap(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self, i: usize) -> &[u32] {
        &self.exponents[i]
    }

    pub fn degree_of(&self, i: usize) -> usize {
        self.exponents[i].iter().sum::<u32>() as usize
    }

    pub fn index_of(&self, exps: &[u32]) -> Option<usize> {
        self.index.get(exps).copied()
    }

    /// Number of monomials of degree `≤ j`.
    pub fn prefix_len(&self, j: usize) -> usize {
        binomial(j + self.n, self.n) as usize
    }
}

fn compositions(total: u32, slots: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if slots == 1 {
        current.push(total);
        out.push(current.clone());
        current.pop();
        return;
    }
    for first in 0..=total {
        current.push(first);
        compositions(total - first, slots - 1, current, out);
        current.pop();
    }
}

fn check_prime(p: u64) -> Result<()> {
    if SUPPORTED_PRIMES.contains(&p) {
        Ok(())
    } else {
        arg(format!("brute-force enumeration supports p in {{2, 3, 5}}, got {p}"))
    }
}

fn inverse_mod(c: u64, p: u64) -> u64 {
    let mut acc = 1;
    for _ in 0..p - 2 {
        acc = acc * c % p;
    }
    acc
}

/// A polynomial over `F_p` of degree at most `d` in `n` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FFPolynomial {
    p: u64,
    n: usize,
    d: usize,
    coeffs: Vec<u64>,
}

impl FFPolynomial {
    pub fn new(p: u64, n: usize, d: usize, coeffs: Vec<u64>) -> Result<Self> {
        check_prime(p)?;
        let expected = binomial(d + n, n) as usize;
        if coeffs.len() != expected {
            return arg(format!(
                "expected {expected} coefficients for degree <= {d} in {n} variables, got {}",
                coeffs.len()
            ));
        }
        if let Some(c) = coeffs.iter().find(|&&c| c >= p) {
            return arg(format!("coefficient {c} is not reduced mod {p}"));
        }
        Ok(Self { p, n, d, coeffs })
    }

    /// Builds a polynomial from `(exponents, coefficient)` terms; coefficients
    /// are reduced mod `p`.
    pub fn from_terms(p: u64, n: usize, d: usize, terms: &[(Vec<u32>, u64)]) -> Result<Self> {
        let basis = MonomialBasis::new(n, d)?;
        let mut coeffs = vec![0; basis.len()];
        for (exps, c) in terms {
            let i = basis.index_of(exps).ok_or_else(|| {
                Error::Argument(format!("monomial {exps:?} is not of degree <= {d} in {n} variables"))
            })?;
            coeffs[i] = (coeffs[i] + c) % p;
        }
        Self::new(p, n, d, coeffs)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Degree cap of the coefficient vector.
    pub fn cap(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn leading_index(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }

    /// Exact total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let i = self.leading_index()?;
        Some(prefix_degree(self.n, i))
    }

    pub fn is_normalized(&self) -> bool {
        self.leading_index().is_some_and(|i| self.coeffs[i] == 1)
    }

    /// Scales so the graded-lex-largest nonzero monomial has coefficient 1.
    pub fn normalize(&self) -> Result<Self> {
        let i = self
            .leading_index()
            .ok_or_else(|| Error::Argument("the zero polynomial has no normal form".into()))?;
        Ok(self.scale(inverse_mod(self.coeffs[i], self.p)))
    }

    pub fn scale(&self, c: u64) -> Self {
        let c = c % self.p;
        Self {
            coeffs: self.coeffs.iter().map(|&x| x * c % self.p).collect(),
            ..self.clone()
        }
    }

    /// Product, with degree cap the sum of the operand caps.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.p != other.p || self.n != other.n {
            return arg("cannot multiply polynomials over different fields or variable sets");
        }
        let a = MonomialBasis::new(self.n, self.d)?;
        let b = MonomialBasis::new(self.n, other.d)?;
        let out = MonomialBasis::new(self.n, self.d + other.d)?;
        let mut coeffs = vec![0; out.len()];
        for (i, &x) in self.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in other.coeffs.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                let exps: Vec<u32> = a
                    .exponents(i)
                    .iter()
                    .zip(b.exponents(j))
                    .map(|(u, v)| u + v)
                    .collect();
                let k = out.index_of(&exps).expect("product degree within cap");
                coeffs[k] = (coeffs[k] + x * y) % self.p;
            }
        }
        Self::new(self.p, self.n, self.d + other.d, coeffs)
    }

    /// `Σ c_i p^i` over all coefficients (trailing zeros do not contribute).
    pub fn code(&self) -> u128 {
        self.coeffs
            .iter()
            .rev()
            .fold(0u128, |acc, &c| acc * self.p as u128 + c as u128)
    }
}

// Total degree of the monomial at graded-lex position `i`.
fn prefix_degree(n: usize, i: usize) -> usize {
    let mut j = 0;
    while binomial(j + n, n) as usize <= i {
        j += 1;
    }
    j
}

impl fmt::Display for FFPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let basis = MonomialBasis::new(self.n, self.d).map_err(|_| fmt::Error)?;
        let names: Vec<String> = if self.n <= 3 {
            ["x", "y", "z"][..self.n].iter().map(|s| s.to_string()).collect()
        } else {
            (1..=self.n).map(|i| format!("x{i}")).collect()
        };
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            let c = self.coeffs[i];
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let mono: Vec<String> = basis
                .exponents(i)
                .iter()
                .zip(&names)
                .filter(|(e, _)| **e > 0)
                .map(|(e, v)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
                .collect();
            match (c, mono.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (1, false) => write!(f, "{}", mono.join("*"))?,
                _ => write!(f, "{c}*{}", mono.join("*"))?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn check_budget(d: usize, n: usize, p: u64, cap: u64) -> Result<usize> {
    check_prime(p)?;
    if d == 0 || n == 0 {
        return arg("enumeration needs d >= 1 and n >= 1");
    }
    let b = binomial(d + n, n);
    let states = BigInt::from(p).pow(b as u32);
    if b > 64 || states > BigInt::from(cap) {
        return Err(Error::BudgetExceeded {
            states: states.to_string(),
            cap,
        });
    }
    Ok(b as usize)
}

/// Normalized coefficient vectors of exact degree `j`, of length
/// `prefix_len(j)`, in increasing code order.
fn normalized_vectors(basis: &MonomialBasis, j: usize, p: u64) -> Vec<Vec<u8>> {
    let low = basis.prefix_len(j - 1);
    let high = basis.prefix_len(j);
    let mut out = Vec::new();
    for lead in low..high {
        let count = (p as u128).pow(lead as u32);
        for lower in 0..count {
            let mut v = vec![0u8; high];
            let mut rest = lower;
            for slot in v.iter_mut().take(lead) {
                *slot = (rest % p as u128) as u8;
                rest /= p as u128;
            }
            v[lead] = 1;
            out.push(v);
        }
    }
    out
}

pub fn enumerate_normalized(d: usize, n: usize, p: u64) -> Result<Vec<FFPolynomial>> {
    enumerate_normalized_with_cap(d, n, p, DEFAULT_STATE_CAP)
}

/// All normalized polynomials of exact degree `d`, in increasing code order.
pub fn enumerate_normalized_with_cap(
    d: usize,
    n: usize,
    p: u64,
    cap: u64,
) -> Result<Vec<FFPolynomial>> {
    check_budget(d, n, p, cap)?;
    let basis = MonomialBasis::new(n, d)?;
    Ok(normalized_vectors(&basis, d, p)
        .into_iter()
        .map(|v| FFPolynomial {
            p,
            n,
            d,
            coeffs: v.into_iter().map(u64::from).collect(),
        })
        .collect())
}

// Products of coefficient vectors in the prefix-closed basis, via an index table.
struct Multiplier {
    p: u64,
    /// `table[i][j]`: index of monomial `i · j`, or `usize::MAX` past the cap.
    table: Vec<Vec<usize>>,
}

impl Multiplier {
    fn new(basis: &MonomialBasis, p: u64) -> Self {
        let table = (0..basis.len())
            .map(|i| {
                (0..basis.len())
                    .map(|j| {
                        let exps: Vec<u32> = basis
                            .exponents(i)
                            .iter()
                            .zip(basis.exponents(j))
                            .map(|(u, v)| u + v)
                            .collect();
                        basis.index_of(&exps).unwrap_or(usize::MAX)
                    })
                    .collect()
            })
            .collect();
        Self { p, table }
    }

    fn mul(&self, a: &[u8], b: &[u8], out_len: usize) -> Vec<u8> {
        let mut acc = vec![0u64; out_len];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                let k = self.table[i][j];
                acc[k] += x as u64 * y as u64;
            }
        }
        acc.into_iter().map(|c| (c % self.p) as u8).collect()
    }

    fn normalize(&self, v: &mut [u8]) {
        if let Some(i) = v.iter().rposition(|&c| c != 0) {
            if v[i] != 1 {
                let inv = inverse_mod(v[i] as u64, self.p);
                for c in v.iter_mut() {
                    *c = (*c as u64 * inv % self.p) as u8;
                }
            }
        }
    }

    fn code(&self, v: &[u8]) -> usize {
        v.iter()
            .rev()
            .fold(0usize, |acc, &c| acc * self.p as usize + c as usize)
    }
}

struct Bitset(Vec<u64>);

impl Bitset {
    fn new(len: usize) -> Self {
        Self(vec![0; len.div_ceil(64)])
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    /// Sets bit `i`, returning whether it was already set.
    fn set(&mut self, i: usize) -> bool {
        let was = self.get(i);
        self.0[i / 64] |= 1 << (i % 64);
        was
    }

    fn union(&mut self, other: &Self) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }
}

/// Irreducible count and factorization census for one `(d, n, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SieveResult {
    pub d: usize,
    pub n: usize,
    pub p: u64,
    pub total: u64,
    pub irreducible: u64,
    /// Every partition of `d` in canonical order, the singleton included.
    pub census: Vec<(Partition, u64)>,
}

impl SieveResult {
    pub fn count(&self, lambda: &Partition) -> Option<u64> {
        self.census
            .iter()
            .find(|(l, _)| l == lambda)
            .map(|(_, c)| *c)
    }
}

pub fn irr_sieve(d: usize, n: usize, p: u64) -> Result<SieveResult> {
    irr_sieve_with_cap(d, n, p, DEFAULT_STATE_CAP)
}

pub fn irr_sieve_with_cap(d: usize, n: usize, p: u64, cap: u64) -> Result<SieveResult> {
    check_budget(d, n, p, cap)?;
    let basis = MonomialBasis::new(n, d)?;
    let mult = Multiplier::new(&basis, p);

    // normalized[j], irreducible[j] for 1 ≤ j ≤ d (index 0 unused).
    let mut normalized: Vec<Vec<Vec<u8>>> = vec![Vec::new()];
    let mut irreducible: Vec<Vec<Vec<u8>>> = vec![Vec::new()];
    let mut final_marks = Bitset::new(0);
    for j in 1..=d {
        let len = basis.prefix_len(j);
        let states = (p as usize).pow(len as u32);
        let splits: Vec<usize> = (1..=j / 2).collect();
        let marks = splits
            .par_iter()
            .map(|&a| {
                let mut local = Bitset::new(states);
                for f in &normalized[a] {
                    for g in &normalized[j - a] {
                        let mut h = mult.mul(f, g, len);
                        mult.normalize(&mut h);
                        local.set(mult.code(&h));
                    }
                }
                local
            })
            .reduce(
                || Bitset::new(states),
                |mut acc, b| {
                    acc.union(&b);
                    acc
                },
            );
        let all = normalized_vectors(&basis, j, p);
        let irr: Vec<Vec<u8>> = all
            .iter()
            .filter(|v| !marks.get(mult.code(v)))
            .cloned()
            .collect();
        normalized.push(all);
        irreducible.push(irr);
        if j == d {
            final_marks = marks;
        }
    }

    let total = normalized[d].len() as u64;
    let irr_count = irreducible[d].len() as u64;
    let len = basis.prefix_len(d);
    let states = (p as usize).pow(len as u32);
    let mut seen = Bitset::new(states);
    let mut census = Vec::new();
    for lambda in enumerate_partitions(d, 1)? {
        if lambda.is_singleton() {
            census.push((lambda, irr_count));
            continue;
        }
        let mut count = 0u64;
        let mut failure = None;
        for_each_factor_multiset(&lambda, &irreducible, |factors| {
            if failure.is_some() {
                return;
            }
            let mut prod = vec![0u8; len];
            prod[0] = 1;
            for f in factors {
                prod = mult.mul(&prod, f, len);
            }
            mult.normalize(&mut prod);
            let code = mult.code(&prod);
            if !final_marks.get(code) {
                failure = Some(format!(
                    "product for {lambda} was not marked reducible by the sieve"
                ));
            } else if seen.set(code) {
                failure = Some(format!(
                    "two factor multisets (one of type {lambda}) give the same product"
                ));
            }
            count += 1;
        });
        if let Some(msg) = failure {
            return Err(Error::Consistency(msg));
        }
        census.push((lambda, count));
    }
    let reducible: u64 = census
        .iter()
        .filter(|(l, _)| !l.is_singleton())
        .map(|(_, c)| c)
        .sum();
    if reducible + irr_count != total {
        return Err(Error::Consistency(format!(
            "census of ({d}, {n}, {p}) sums to {} but {total} polynomials were enumerated",
            reducible + irr_count
        )));
    }
    Ok(SieveResult {
        d,
        n,
        p,
        total,
        irreducible: irr_count,
        census,
    })
}

// Calls `visit` once per multiset of irreducibles of type `lambda`.
fn for_each_factor_multiset<F: FnMut(&[&[u8]])>(
    lambda: &Partition,
    irreducible: &[Vec<Vec<u8>>],
    mut visit: F,
) {
    let groups: Vec<(usize, usize)> = lambda.multiplicities().into_iter().collect();
    let mut chosen: Vec<&[u8]> = Vec::with_capacity(lambda.size());
    fn rec<'a, F: FnMut(&[&[u8]])>(
        groups: &[(usize, usize)],
        irreducible: &'a [Vec<Vec<u8>>],
        group: usize,
        remaining: usize,
        start: usize,
        chosen: &mut Vec<&'a [u8]>,
        visit: &mut F,
    ) {
        if group == groups.len() {
            visit(chosen);
            return;
        }
        let (part, _) = groups[group];
        if remaining == 0 {
            let next = groups.get(group + 1).map_or(0, |g| g.1);
            rec(groups, irreducible, group + 1, next, 0, chosen, visit);
            return;
        }
        let pool = &irreducible[part];
        for i in start..pool.len() {
            chosen.push(&pool[i]);
            rec(groups, irreducible, group, remaining - 1, i, chosen, visit);
            chosen.pop();
        }
    }
    let first = groups.first().map_or(0, |g| g.1);
    rec(&groups, irreducible, 0, first, 0, &mut chosen, &mut visit);
}

/// One brute-force count against the exact count polynomial at `q = p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub d: usize,
    pub n: usize,
    pub p: u64,
    /// `"irreducible"` or a partition.
    pub quantity: String,
    pub brute: u64,
    #[serde(serialize_with = "crate::json::display")]
    pub formula: BigInt,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossValidation {
    pub comparisons: Vec<Comparison>,
    pub passed: bool,
}

pub fn cross_validate(params: &[(usize, usize, u64)]) -> Result<CrossValidation> {
    let results = params
        .par_iter()
        .map(|&(d, n, p)| irr_sieve(d, n, p))
        .collect::<Result<Vec<_>>>()?;
    compare_with_counts(&results)
}

/// Compares finished sieve results with the exact counts at `q = p`.
pub fn compare_with_counts(results: &[SieveResult]) -> Result<CrossValidation> {
    let mut comparisons = Vec::new();
    for r in results {
        let q = r.p as i64;
        let expected = irr_count(r.d, r.n)?.eval_integer(q)?;
        comparisons.push(Comparison {
            d: r.d,
            n: r.n,
            p: r.p,
            quantity: "irreducible".into(),
            brute: r.irreducible,
            passed: expected == BigInt::from(r.irreducible),
            formula: expected,
        });
        for (lambda, count) in &r.census {
            let expected = stratum_count(lambda, r.n)?.eval_integer(q)?;
            comparisons.push(Comparison {
                d: r.d,
                n: r.n,
                p: r.p,
                quantity: lambda.to_string(),
                brute: *count,
                passed: expected == BigInt::from(*count),
                formula: expected,
            });
        }
    }
    Ok(CrossValidation {
        passed: comparisons.iter().all(|c| c.passed),
        comparisons,
    })
}

/// CSV with columns `p,n,d,partition,count`, one row per census entry.
pub fn census_csv(results: &[SieveResult]) -> String {
    let mut out = String::from("p,n,d,partition,count\n");
    for r in results {
        for (lambda, count) in &r.census {
            out.push_str(&format!("{},{},{},{},{}\n", r.p, r.n, r.d, lambda, count));
        }
    }
    out
}

/// Census as a map keyed by partition string, for tests and reports.
pub fn census_map(result: &SieveResult) -> BTreeMap<String, u64> {
    result
        .census
        .iter()
        .map(|(l, c)| (l.to_string(), *c))
        .collect()
}
