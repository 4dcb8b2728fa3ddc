//! The stratification spectral sequence of `Red_d` in the stable limit.
//!
//! Column `p` of the `E_1` page collects the strata `T_λ` with `|λ| = d - p`;
//! the entry in column `p` and total degree `k` is `⊕ H^k_c(T_λ)`. The
//! differential `d_r` goes from `(p, k)` to `(p + r, k + 1)`, and the sequence
//! degenerates at `E_(d-1)`. Differentials are never inferred: whatever is
//! known about them comes in as [`DifferentialRule`]s, and anything not covered
//! widens the result into an interval.

mod audit;
mod bounds;

pub use audit::{vanishing_audit, DegreeAudit, StratumAudit, VanishingAudit};
pub use bounds::{
    bounds_report, dim_bound_check, stratum_dimension, BoundsReport, DimBoundReport, DimBoundRow,
};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graded::{StableRegistry, SymConvention};
use crate::partition::{reducible_partitions, Partition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DifferentialKind {
    KnownInjective,
    KnownZero,
}

/// Declared knowledge about `d_page` out of column `column` for source total
/// degrees from `min_degree` through `max_degree` (unbounded when `None`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DifferentialRule {
    pub page: usize,
    pub column: usize,
    pub min_degree: usize,
    pub max_degree: Option<usize>,
    pub kind: DifferentialKind,
    pub provenance: String,
}

impl DifferentialRule {
    fn covers(&self, page: usize, column: usize, degree: usize) -> bool {
        self.page == page
            && self.column == column
            && degree >= self.min_degree
            && self.max_degree.is_none_or(|m| degree <= m)
    }
}

/// The differential rules established by hand for `d ≤ 4`.
pub fn shipped_rules(d: usize) -> Vec<DifferentialRule> {
    match d {
        3 => vec![DifferentialRule {
            page: 1,
            column: 0,
            min_degree: 0,
            max_degree: None,
            kind: DifferentialKind::KnownInjective,
            provenance: "d=3: δ from H_c(T_{1+1+1}) to H_c(T_{1+2}) factors the isomorphism \
                         Sym^2 Irr_1 → Irr_2 (tensor identity) through the S_3 ⊂ S_2×S_1 \
                         transfer, hence is injective in every degree"
                .into(),
        }],
        4 => vec![
            DifferentialRule {
                page: 1,
                column: 0,
                min_degree: 8,
                max_degree: Some(10),
                kind: DifferentialKind::KnownInjective,
                provenance: "d=4: the transfer argument of d=3 applied to column p=0 → p=1 \
                             (asserted by analogy, not re-derived here)"
                    .into(),
            },
            DifferentialRule {
                page: 1,
                column: 1,
                min_degree: 9,
                max_degree: Some(9),
                kind: DifferentialKind::KnownZero,
                provenance: "d=4: E_1^{1,8} is the image of an injective d_1, so d_1 out of it \
                             vanishes (d∘d = 0)"
                    .into(),
            },
        ],
        _ => Vec::new(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E1Entry {
    pub degree: usize,
    pub partition: Partition,
    #[serde(serialize_with = "crate::json::display")]
    pub dim: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E1Column {
    pub p: usize,
    /// Ordered by degree, then by the canonical partition order.
    pub entries: Vec<E1Entry>,
}

impl E1Column {
    pub fn dim(&self, degree: usize) -> BigInt {
        self.entries
            .iter()
            .filter(|e| e.degree == degree)
            .map(|e| &e.dim)
            .sum()
    }

    pub fn partitions(&self) -> Vec<&Partition> {
        let mut out: Vec<&Partition> = Vec::new();
        for e in &self.entries {
            if !out.contains(&&e.partition) {
                out.push(&e.partition);
            }
        }
        out
    }
}

/// Stratum dimensions on the `E_1` page for total degrees `0..=max_total_degree`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E1Window {
    pub d: usize,
    pub max_total_degree: usize,
    pub convention: SymConvention,
    pub columns: Vec<E1Column>,
    pub rules: Vec<DifferentialRule>,
}

impl E1Window {
    pub fn dim(&self, p: usize, degree: usize) -> BigInt {
        self.columns
            .get(p)
            .map(|c| c.dim(degree))
            .unwrap_or_default()
    }

    /// Entries with a nonzero dimension.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, &E1Entry)> {
        self.columns
            .iter()
            .flat_map(|c| c.entries.iter().map(move |e| (c.p, e)))
            .filter(|(_, e)| !e.dim.is_zero())
    }
}

/// Builds the stable `E_1` window for `2 ≤ d ≤ 4`, annotated with the shipped
/// rules for `d`.
pub fn e1_window(d: usize, max_total_degree: usize, conv: SymConvention) -> Result<E1Window> {
    if d < 2 {
        return Err(Error::Argument(
            "the spectral sequence of Red_d is empty for d < 2".into(),
        ));
    }
    if d > 4 {
        return Err(Error::Unsupported(format!(
            "E_1 windows need stable series of every part; d = {d} > 4 would need P_4 and beyond"
        )));
    }
    let registry = StableRegistry::new(max_total_degree, conv)?;
    let mut by_column: BTreeMap<usize, Vec<(Partition, crate::graded::GradedDims)>> =
        BTreeMap::new();
    for lambda in reducible_partitions(d)? {
        let series = registry.stratum_series(&lambda)?;
        by_column
            .entry(d - lambda.size())
            .or_default()
            .push((lambda, series));
    }
    let columns = (0..=d - 2)
        .map(|p| -> Result<E1Column> {
            let strata = by_column.remove(&p).unwrap_or_default();
            let mut entries = Vec::new();
            for degree in 0..=max_total_degree {
                for (lambda, series) in &strata {
                    entries.push(E1Entry {
                        degree,
                        partition: lambda.clone(),
                        dim: series.dim(degree)?.clone(),
                    });
                }
            }
            Ok(E1Column { p, entries })
        })
        .collect::<Result<_>>()?;
    Ok(E1Window {
        d,
        max_total_degree,
        convention: conv,
        columns,
        rules: shipped_rules(d),
    })
}

/// A closed interval of nonnegative integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimRange {
    pub lower: BigInt,
    pub upper: BigInt,
}

impl DimRange {
    pub fn exact(v: BigInt) -> Self {
        Self {
            lower: v.clone(),
            upper: v,
        }
    }

    fn zero() -> Self {
        Self::exact(BigInt::zero())
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn value(&self) -> Option<&BigInt> {
        self.is_exact().then_some(&self.lower)
    }

    fn add(&self, other: &Self) -> Self {
        Self {
            lower: &self.lower + &other.lower,
            upper: &self.upper + &other.upper,
        }
    }
}

/// Exact values serialize as a decimal string, intervals as `[lower, upper]`.
impl Serialize for DimRange {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_exact() {
            s.collect_str(&self.lower)
        } else {
            [self.lower.to_string(), self.upper.to_string()].serialize(s)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankSource {
    /// Source or target vanishes.
    Trivial,
    Rule,
    /// Not covered by any rule.
    Unknown,
}

/// One differential on the page where it acts, with its rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DifferentialRecord {
    pub page: usize,
    pub from: (usize, usize),
    pub to: (usize, usize),
    /// Whether the target lies inside the window.
    pub in_window: bool,
    pub rank: DimRange,
    pub source: RankSource,
}

/// Stable Betti numbers `b_i(d)` for `i ≤ max_degree`, resolved from an
/// `E_1` window and a set of differential rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiWindow {
    pub d: usize,
    pub max_degree: usize,
    pub convention: SymConvention,
    pub window: E1Window,
    pub rules: Vec<DifferentialRule>,
    pub differentials: Vec<DifferentialRecord>,
    /// `E_∞` dimensions keyed by `(p, total degree)`.
    pub e_infinity: BTreeMap<(usize, usize), DimRange>,
    /// `b_i(d)` for `i = 0..=max_degree`.
    pub betti: Vec<DimRange>,
}

impl BettiWindow {
    pub fn betti(&self, i: usize) -> Option<&DimRange> {
        self.betti.get(i)
    }

    pub fn is_exact(&self) -> bool {
        self.betti.iter().all(DimRange::is_exact)
    }

    /// Differentials inside the window with nonzero source and target that
    /// no rule covered.
    pub fn uncovered(&self) -> Vec<&DifferentialRecord> {
        self.differentials
            .iter()
            .filter(|r| r.in_window && r.source == RankSource::Unknown)
            .collect()
    }
}

impl Serialize for BettiWindow {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(8))?;
        map.serialize_entry("d", &self.d)?;
        map.serialize_entry("max_degree", &self.max_degree)?;
        map.serialize_entry("convention", &self.convention)?;
        map.serialize_entry("columns", &self.window.columns)?;
        map.serialize_entry("rules", &self.rules)?;
        map.serialize_entry("differentials", &self.differentials)?;
        let betti: Vec<(String, &DimRange)> = self
            .betti
            .iter()
            .enumerate()
            .map(|(i, b)| (i.to_string(), b))
            .collect();
        map.serialize_entry("betti", &OrderedBetti(&betti))?;
        map.serialize_entry("exact", &self.is_exact())?;
        map.end()
    }
}

struct OrderedBetti<'a>(&'a [(String, &'a DimRange)]);

impl Serialize for OrderedBetti<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

fn rule_for<'a>(
    rules: &'a [DifferentialRule],
    page: usize,
    column: usize,
    degree: usize,
) -> Result<Option<&'a DifferentialRule>> {
    let mut matching = rules.iter().filter(|r| r.covers(page, column, degree));
    let first = matching.next();
    if let Some(first) = first {
        if matching.any(|r| r.kind != first.kind) {
            return Err(Error::RuleContradiction(format!(
                "d_{page} out of (p={column}, degree {degree}) declared both injective and zero"
            )));
        }
    }
    Ok(first)
}

/// Runs the spectral sequence of `Red_d` on the stable window and reads off
/// `b_i(d) = dim H^(i-1)_c(Red_d)` through the connecting isomorphism.
pub fn stable_betti_window(
    d: usize,
    max_degree: usize,
    conv: SymConvention,
    rules: &[DifferentialRule],
) -> Result<BettiWindow> {
    if !(2..=4).contains(&d) {
        return Err(Error::Unsupported(format!(
            "stable Betti windows are available for d in 2..=4, got d = {d}"
        )));
    }
    let window = e1_window(d, max_degree, conv)?;
    let last_column = d - 2;
    let mut dims: BTreeMap<(usize, usize), DimRange> = BTreeMap::new();
    for p in 0..=last_column {
        for k in 0..=max_degree {
            dims.insert((p, k), DimRange::exact(window.dim(p, k)));
        }
    }

    let mut differentials = Vec::new();
    for page in 1..=last_column {
        let mut ranks: BTreeMap<(usize, usize), (DimRange, bool)> = BTreeMap::new();
        for p in 0..=last_column.saturating_sub(page) {
            if p + page > last_column {
                continue;
            }
            for k in 0..=max_degree {
                let src = &dims[&(p, k)];
                let target = dims.get(&(p + page, k + 1));
                let rule = rule_for(rules, page, p, k)?;
                let (rank, source, injective) = if src.upper.is_zero()
                    || target.is_some_and(|t| t.upper.is_zero())
                {
                    (DimRange::zero(), RankSource::Trivial, false)
                } else if let Some(rule) = rule {
                    match rule.kind {
                        DifferentialKind::KnownZero => (DimRange::zero(), RankSource::Rule, false),
                        DifferentialKind::KnownInjective => {
                            if let Some(t) = target {
                                if src.lower > t.upper {
                                    return Err(Error::RuleContradiction(format!(
                                        "d_{page} from (p={p}, degree {k}) cannot be injective: \
                                         source dimension {} exceeds target dimension {}",
                                        src.lower, t.upper
                                    )));
                                }
                            }
                            let upper = match target {
                                Some(t) => (&src.upper).min(&t.upper).clone(),
                                None => src.upper.clone(),
                            };
                            (
                                DimRange {
                                    lower: src.lower.clone(),
                                    upper,
                                },
                                RankSource::Rule,
                                true,
                            )
                        }
                    }
                } else {
                    let upper = match target {
                        Some(t) => (&src.upper).min(&t.upper).clone(),
                        None => src.upper.clone(),
                    };
                    (
                        DimRange {
                            lower: BigInt::zero(),
                            upper,
                        },
                        RankSource::Unknown,
                        false,
                    )
                };
                if source != RankSource::Trivial {
                    differentials.push(DifferentialRecord {
                        page,
                        from: (p, k),
                        to: (p + page, k + 1),
                        in_window: target.is_some(),
                        rank: rank.clone(),
                        source,
                    });
                }
                ranks.insert((p, k), (rank, injective));
            }
        }

        let mut next = BTreeMap::new();
        for (&(p, k), dim) in &dims {
            let (out, out_injective) = ranks
                .get(&(p, k))
                .cloned()
                .unwrap_or((DimRange::zero(), false));
            let incoming = if p >= page && k >= 1 {
                ranks.get(&(p - page, k - 1)).map(|r| r.0.clone())
            } else {
                None
            }
            .unwrap_or_else(DimRange::zero);
            if &out.lower + &incoming.lower > dim.upper {
                return Err(Error::RuleContradiction(format!(
                    "page {page}: at (p={p}, degree {k}) the image of the incoming differential \
                     (rank >= {}) cannot fit in the kernel of the outgoing one (rank >= {}) \
                     inside a space of dimension <= {}",
                    incoming.lower, out.lower, dim.upper
                )));
            }
            let updated = if out_injective {
                DimRange::zero()
            } else {
                let lower = &dim.lower - &out.upper - &incoming.upper;
                DimRange {
                    lower: if lower.is_negative() { BigInt::zero() } else { lower },
                    upper: &dim.upper - &out.lower - &incoming.lower,
                }
            };
            next.insert((p, k), updated);
        }
        dims = next;
    }

    let mut betti = vec![DimRange::zero()];
    for i in 1..=max_degree {
        let k = i - 1;
        let total = (0..=last_column)
            .map(|p| dims[&(p, k)].clone())
            .fold(DimRange::zero(), |acc, r| acc.add(&r));
        betti.push(total);
    }

    Ok(BettiWindow {
        d,
        max_degree,
        convention: conv,
        window,
        rules: rules.to_vec(),
        differentials,
        e_infinity: dims,
        betti,
    })
}

/// A degree where the two symmetric-power conventions give different Betti
/// numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConventionDivergence {
    pub degree: usize,
    pub koszul: DimRange,
    pub naive: DimRange,
}

/// Betti windows under both conventions and every degree where they differ.
#[derive(Clone, Debug, Serialize)]
pub struct BettiReport {
    pub requested: BettiWindow,
    pub divergences: Vec<ConventionDivergence>,
    pub flagged: bool,
}

pub fn betti_report(
    d: usize,
    max_degree: usize,
    conv: SymConvention,
    rules: &[DifferentialRule],
) -> Result<BettiReport> {
    let koszul = stable_betti_window(d, max_degree, SymConvention::Koszul, rules)?;
    let naive = stable_betti_window(d, max_degree, SymConvention::Naive, rules)?;
    let divergences: Vec<ConventionDivergence> = koszul
        .betti
        .iter()
        .zip(&naive.betti)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(degree, (a, b))| ConventionDivergence {
            degree,
            koszul: a.clone(),
            naive: b.clone(),
        })
        .collect();
    let requested = match conv {
        SymConvention::Koszul => koszul,
        SymConvention::Naive => naive,
    };
    Ok(BettiReport {
        flagged: !divergences.is_empty(),
        divergences,
        requested,
    })
}

/// Markdown grid laid out like a hand-drawn `E_1` page: rows are `q`
/// (descending), columns are `p`, cells are `dim E_1^{p,q} = dim H^{p+q}_c`.
pub fn render_e1_markdown(window: &E1Window) -> String {
    let last_column = window.d - 2;
    let max = window.max_total_degree;
    let lowest_q = window
        .nonzero_entries()
        .map(|(p, e)| e.degree - p)
        .min()
        .unwrap_or(0);
    let mut out = String::new();
    out.push_str(&format!(
        "E_1 window, d = {}, total degree <= {}, convention {}\n\n",
        window.d, max, window.convention
    ));
    out.push_str("| q \\ p |");
    for p in 0..=last_column {
        out.push_str(&format!(" {p} |"));
    }
    out.push('\n');
    out.push_str("|---|");
    for _ in 0..=last_column {
        out.push_str("---|");
    }
    out.push('\n');
    for q in (lowest_q..=max).rev() {
        out.push_str(&format!("| {q} |"));
        for p in 0..=last_column {
            if p + q > max {
                out.push_str("  |");
            } else {
                out.push_str(&format!(" {} |", window.dim(p, p + q)));
            }
        }
        out.push('\n');
    }
    out.push('\n');
    for (p, e) in window.nonzero_entries() {
        out.push_str(&format!(
            "- p={p}, degree {}: H_c(T_{{{}}}) has dimension {}\n",
            e.degree, e.partition, e.dim
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn d4_window_columns() {
        let w = e1_window(4, 10, SymConvention::Naive).unwrap();
        assert_eq!(w.columns.len(), 3);
        let col0: Vec<_> = (0..=10).map(|k| w.dim(0, k)).collect();
        assert_eq!(col0[8], b(1));
        assert_eq!(col0[10], b(1));
        assert_eq!(col0.iter().filter(|x| !x.is_zero()).count(), 2);
        assert_eq!(w.dim(1, 9), b(1));
        assert_eq!((0..=10).filter(|&k| !w.dim(1, k).is_zero()).count(), 1);
        let col2 = &w.columns[2];
        let at10: Vec<_> = col2.entries.iter().filter(|e| e.degree == 10).collect();
        assert_eq!(at10.len(), 2);
        for e in at10 {
            let expected = if e.partition.to_string() == "2+2" { 1 } else { 0 };
            assert_eq!(e.dim, b(expected), "{}", e.partition);
        }
        assert_eq!(w.dim(2, 10), b(1));
    }

    #[test]
    fn window_indexing_invariants() {
        for d in 2..=4 {
            for conv in SymConvention::ALL {
                let w = e1_window(d, 12, conv).unwrap();
                assert_eq!(w.columns.len(), d - 1);
                for c in &w.columns {
                    assert!(c.p <= d - 2);
                    for e in &c.entries {
                        assert_eq!(e.partition.size(), d - c.p);
                        assert_eq!(e.partition.total(), d);
                    }
                }
            }
        }
        assert!(matches!(
            e1_window(5, 10, SymConvention::Naive),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn d4_betti_naive_with_rules() {
        let w = stable_betti_window(4, 11, SymConvention::Naive, &shipped_rules(4)).unwrap();
        assert!(w.is_exact());
        assert!(w.uncovered().is_empty());
        for i in 0..11 {
            assert_eq!(w.betti(i).unwrap().value(), Some(&b(0)), "b_{i}");
        }
        assert_eq!(w.betti(11).unwrap().value(), Some(&b(1)));
    }

    #[test]
    fn d4_betti_koszul_diverges() {
        let report = betti_report(4, 11, SymConvention::Koszul, &shipped_rules(4)).unwrap();
        assert!(report.flagged);
        assert_eq!(report.divergences.len(), 1);
        let div = &report.divergences[0];
        assert_eq!(div.degree, 11);
        assert_eq!(div.koszul.value(), Some(&b(0)));
        assert_eq!(div.naive.value(), Some(&b(1)));
        assert_eq!(report.requested.betti(11).unwrap().value(), Some(&b(0)));
    }

    #[test]
    fn missing_rules_give_intervals() {
        let w = stable_betti_window(4, 11, SymConvention::Naive, &[]).unwrap();
        assert!(!w.is_exact());
        assert!(!w.uncovered().is_empty());
        let b9 = w.betti(9).unwrap();
        assert_eq!((b9.lower.clone(), b9.upper.clone()), (b(0), b(1)));
        // d = 3 with no rules: every degree with both columns nonzero is open.
        let w3 = stable_betti_window(3, 12, SymConvention::Naive, &[]).unwrap();
        assert!(!w3.is_exact());
    }

    #[test]
    fn contradictory_rules_are_errors() {
        // Declaring the d=3 differential in the other direction impossible:
        // injective from a column where it cannot fit.
        let mut rules = shipped_rules(4);
        rules.push(DifferentialRule {
            page: 1,
            column: 1,
            min_degree: 9,
            max_degree: Some(9),
            kind: DifferentialKind::KnownInjective,
            provenance: "conflicting".into(),
        });
        assert!(matches!(
            stable_betti_window(4, 11, SymConvention::Naive, &rules),
            Err(Error::RuleContradiction(_))
        ));
        // Injective into a smaller target.
        let rules = vec![DifferentialRule {
            page: 1,
            column: 1,
            min_degree: 9,
            max_degree: Some(9),
            kind: DifferentialKind::KnownInjective,
            provenance: "test".into(),
        }];
        assert!(matches!(
            stable_betti_window(4, 11, SymConvention::Koszul, &rules),
            Ok(_)
        ));
        let rules = vec![
            DifferentialRule {
                page: 1,
                column: 0,
                min_degree: 8,
                max_degree: Some(8),
                kind: DifferentialKind::KnownInjective,
                provenance: "test".into(),
            },
            DifferentialRule {
                page: 1,
                column: 1,
                min_degree: 9,
                max_degree: Some(9),
                kind: DifferentialKind::KnownInjective,
                provenance: "test".into(),
            },
        ];
        assert!(matches!(
            stable_betti_window(4, 11, SymConvention::Naive, &rules),
            Err(Error::RuleContradiction(_))
        ));
    }

    #[test]
    fn markdown_grid_mirrors_layout() {
        let w = e1_window(4, 10, SymConvention::Naive).unwrap();
        let md = render_e1_markdown(&w);
        assert!(md.contains("| 8 | 1 | 1 | 1 |"), "{md}");
        assert!(md.contains("| 10 | 1 |  |  |"), "{md}");
        assert!(md.contains("| 9 | 0 | 0 |  |"), "{md}");
    }
}
