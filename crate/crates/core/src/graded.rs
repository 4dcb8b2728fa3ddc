//! Dimension series of graded vector spaces and the operations on them that
//! model compactly supported cohomology of products and symmetric powers.
//!
//! `H*_c(Sym^m Y; Q)` is the `S_m`-invariant part of `H*_c(Y; Q)^{⊗m}`.
//! Whether transpositions of odd-degree classes act with a sign is a choice
//! of convention here: [`SymConvention::Koszul`] applies the sign (odd classes
//! become exterior), [`SymConvention::Naive`] ignores it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::{RationalFormSeries, TruncatedSeries};
use crate::census::binomial_big;
use crate::error::{Error, Result};
use crate::partition::Partition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SymConvention {
    #[default]
    Koszul,
    Naive,
}

impl SymConvention {
    pub const ALL: [SymConvention; 2] = [SymConvention::Koszul, SymConvention::Naive];

    fn exterior_in_degree(self, degree: usize) -> bool {
        self == SymConvention::Koszul && degree % 2 == 1
    }
}

impl fmt::Display for SymConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymConvention::Koszul => "koszul",
            SymConvention::Naive => "naive",
        })
    }
}

impl FromStr for SymConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "koszul" => Ok(SymConvention::Koszul),
            "naive" => Ok(SymConvention::Naive),
            other => Err(Error::Argument(format!(
                "unknown convention {other:?} (expected koszul or naive)"
            ))),
        }
    }
}

/// A dimension series: nonnegative integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedDims(TruncatedSeries);

impl GradedDims {
    pub fn new(series: TruncatedSeries) -> Result<Self> {
        series.ensure_nonnegative()?;
        Ok(Self(series))
    }

    pub fn from_form(form: &RationalFormSeries, trunc: usize) -> Self {
        Self(form.expand(trunc))
    }

    pub fn zero(trunc: usize) -> Self {
        Self(TruncatedSeries::zero(trunc))
    }

    pub fn unit(trunc: usize) -> Self {
        Self(TruncatedSeries::one(trunc))
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.0
    }

    pub fn into_series(self) -> TruncatedSeries {
        self.0
    }

    pub fn trunc(&self) -> usize {
        self.0.trunc()
    }

    pub fn dim(&self, degree: usize) -> Result<&BigInt> {
        self.0.coeff(degree)
    }

    pub fn lowest_degree(&self) -> Option<usize> {
        self.0.lowest_degree()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self(self.0.mul(&other.0))
    }

    pub fn suspend(&self, by: usize) -> Self {
        Self(self.0.shift(by as i64).expect("nonnegative shift"))
    }

    pub fn truncate(&self, trunc: usize) -> Result<Self> {
        Ok(Self(self.0.truncate(trunc)?))
    }

    /// Truncates down to `trunc` when the series is known further.
    pub fn cap(&self, trunc: usize) -> Self {
        if self.trunc() > trunc {
            Self(self.0.truncate(trunc).expect("lower truncation"))
        } else {
            self.clone()
        }
    }

    pub fn tagged(&self, convention: SymConvention) -> TaggedSeries<'_> {
        TaggedSeries {
            convention,
            series: &self.0,
        }
    }
}

/// A series emitted together with the convention that produced it.
#[derive(Serialize)]
pub struct TaggedSeries<'a> {
    pub convention: SymConvention,
    #[serde(flatten)]
    pub series: &'a TruncatedSeries,
}

/// Dimension series of the `m`-th symmetric power: the `z^m` coefficient of
/// `∏_k (1 - z t^k)^(-a_k)`, with the odd-`k` factors replaced by
/// `(1 + z t^k)^(a_k)` under the Koszul convention.
pub fn sym_m(v: &GradedDims, m: usize, conv: SymConvention) -> GradedDims {
    let trunc = v.trunc();
    // acc[i][s]: coefficient of z^i t^s
    let mut acc = vec![vec![BigInt::zero(); trunc + 1]; m + 1];
    acc[0][0] = BigInt::from(1);
    for (k, a) in v.series().coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let a = a.to_usize().expect("dimension fits in usize");
        let exterior = conv.exterior_in_degree(k);
        let max_j = if exterior { a.min(m) } else { m };
        let factor: Vec<BigInt> = (0..=max_j)
            .map(|j| {
                if exterior {
                    binomial_big(a, j)
                } else {
                    binomial_big(a + j - 1, j)
                }
            })
            .collect();
        let mut next = vec![vec![BigInt::zero(); trunc + 1]; m + 1];
        for (i, row) in acc.iter().enumerate() {
            for (s, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (j, f) in factor.iter().enumerate() {
                    let (zi, ts) = (i + j, s + k * j);
                    if zi > m || ts > trunc {
                        break;
                    }
                    next[zi][ts] += c * f;
                }
            }
        }
        acc = next;
    }
    GradedDims(TruncatedSeries::new(acc.swap_remove(m), trunc))
}

/// Counts monomials of length `m` and degree `degree` in the free
/// (graded-)commutative algebra with `a_k` generators in each degree `k`, by
/// explicit enumeration of exponent vectors. Under the Koszul convention odd
/// generators appear at most once.
pub fn invariant_dim_oracle(
    v: &GradedDims,
    m: usize,
    degree: usize,
    conv: SymConvention,
) -> Result<BigInt> {
    v.dim(degree)?;
    let mut generators = Vec::new();
    for k in 0..=degree {
        let count = v
            .dim(k)?
            .to_usize()
            .ok_or_else(|| Error::Argument(format!("dimension in degree {k} too large to enumerate")))?;
        for _ in 0..count {
            generators.push(k);
        }
    }
    let mut count = BigInt::zero();
    count_monomials(&generators, 0, m, degree, conv, &mut count);
    Ok(count)
}

fn count_monomials(
    generators: &[usize],
    index: usize,
    length: usize,
    degree: usize,
    conv: SymConvention,
    count: &mut BigInt,
) {
    if length == 0 {
        if degree == 0 {
            *count += 1;
        }
        return;
    }
    if index == generators.len() {
        return;
    }
    let g = generators[index];
    // Generators are sorted by degree, so every remaining factor has degree >= g.
    if g * length > degree {
        return;
    }
    let max_exp = if conv.exterior_in_degree(g) { 1 } else { length };
    for e in 0..=max_exp {
        if g * e > degree {
            break;
        }
        count_monomials(generators, index + 1, length - e, degree - g * e, conv, count);
    }
}

/// `target_k - source_(k - shift)`: the cokernel dimensions of a map
/// `source → target` of degree `shift` that the caller asserts is injective.
pub fn cokernel_subtract(
    target: &GradedDims,
    source: &GradedDims,
    shift_of_source: i64,
) -> Result<GradedDims> {
    let source_reach = source.trunc() as i64 + shift_of_source;
    if source_reach < 0 {
        return Err(Error::Argument(format!(
            "source truncation {} shifted by {shift_of_source} covers no degrees",
            source.trunc()
        )));
    }
    let trunc = target.trunc().min(source_reach as usize);
    let mut out = Vec::with_capacity(trunc + 1);
    for k in 0..=trunc {
        let src_deg = k as i64 - shift_of_source;
        let t = target.dim(k)?;
        let value = if src_deg < 0 {
            t.clone()
        } else {
            t - source.dim(src_deg as usize)?
        };
        if value.is_negative() {
            return Err(Error::InjectivityViolation {
                target_degree: k,
                source_degree: src_deg,
                value: value.to_string(),
            });
        }
        out.push(value);
    }
    Ok(GradedDims(TruncatedSeries::new(out, trunc)))
}

/// The closed forms printed for the first three stable series.
pub fn printed_closed_form(d: usize) -> Option<RationalFormSeries> {
    let form = match d {
        1 => RationalFormSeries::new(2, vec![2]),
        2 => RationalFormSeries::new(5, vec![2, 4]),
        3 => RationalFormSeries::new(10, vec![2, 6]),
        _ => return None,
    };
    form.ok()
}

/// Closed form of the series actually produced by the pipeline for `d`.
/// For `d = 3` the cokernel difference simplifies to
/// `t^10 / ((1-t^2)^2 (1-t^6))`.
pub fn pipeline_closed_form(d: usize) -> Option<RationalFormSeries> {
    match d {
        3 => RationalFormSeries::new(10, vec![2, 2, 6]).ok(),
        _ => printed_closed_form(d),
    }
}

/// Stable series `P_d(t)` of `Irr_d` for `d ∈ {1, 2, 3}` through degree
/// `trunc`.
pub fn stable_irr_series(d: usize, trunc: usize, conv: SymConvention) -> Result<GradedDims> {
    let p1 = GradedDims::from_form(&printed_closed_form(1).expect("d=1 form"), trunc);
    match d {
        1 => Ok(p1),
        2 => Ok(sym_m(&p1, 2, conv).suspend(1).cap(trunc)),
        3 => {
            let p2 = stable_irr_series(2, trunc, conv)?;
            let red = cokernel_subtract(&p2.tensor(&p1), &sym_m(&p1, 3, conv), 1)?;
            Ok(red.suspend(1).cap(trunc))
        }
        _ => Err(Error::Unsupported(format!(
            "stable series of Irr_d is registered only for d <= 3 (got d = {d}); \
             d = 4 is available as a Betti window"
        ))),
    }
}

/// Stable series of `Irr_j` for `j ≤ 3`, plus caller-supplied series for
/// larger `j`.
#[derive(Clone, Debug)]
pub struct StableRegistry {
    trunc: usize,
    conv: SymConvention,
    series: BTreeMap<usize, GradedDims>,
}

impl StableRegistry {
    pub fn new(trunc: usize, conv: SymConvention) -> Result<Self> {
        let series = (1..=3)
            .map(|d| Ok((d, stable_irr_series(d, trunc, conv)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            trunc,
            conv,
            series,
        })
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn convention(&self) -> SymConvention {
        self.conv
    }

    /// Registers (or replaces) the series for `Irr_j`.
    pub fn supply(&mut self, j: usize, series: GradedDims) {
        self.series.insert(j, series);
    }

    pub fn get(&self, j: usize) -> Result<&GradedDims> {
        self.series.get(&j).ok_or_else(|| {
            Error::Unsupported(format!(
                "no stable series for Irr_{j}; only parts <= 3 are registered unless supplied"
            ))
        })
    }

    /// `⊗_j Sym^(m_j)(P_j)` for the stratum `T_λ`.
    pub fn stratum_series(&self, lambda: &Partition) -> Result<GradedDims> {
        let mut acc = GradedDims::unit(self.trunc);
        for (j, m) in lambda.multiplicities() {
            acc = acc.tensor(&sym_m(self.get(j)?, m, self.conv));
        }
        Ok(acc.cap(self.trunc))
    }
}

/// Stable series of the stratum `T_λ` through degree `trunc`. All parts must
/// be at most 3.
pub fn stable_stratum_series(
    lambda: &Partition,
    trunc: usize,
    conv: SymConvention,
) -> Result<GradedDims> {
    if lambda.largest_part() > 3 {
        return Err(Error::Unsupported(format!(
            "stratum {lambda} has a part larger than 3; supply its stable series via StableRegistry"
        )));
    }
    StableRegistry::new(trunc, conv)?.stratum_series(lambda)
}

/// Computed stable series compared with a reference closed form.
#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormComparison {
    pub d: usize,
    pub convention: SymConvention,
    pub computed: TruncatedSeries,
    pub computed_form: Option<String>,
    pub reference_form: String,
    pub reference: TruncatedSeries,
    /// First degree where the two disagree; `None` if they agree through the
    /// truncation.
    pub first_deviation: Option<usize>,
}

pub fn compare_with_printed(
    d: usize,
    trunc: usize,
    conv: SymConvention,
) -> Result<ClosedFormComparison> {
    let computed = stable_irr_series(d, trunc, conv)?.into_series();
    let form = printed_closed_form(d)
        .ok_or_else(|| Error::Unsupported(format!("no printed closed form for d = {d}")))?;
    let reference = form.expand(trunc);
    Ok(ClosedFormComparison {
        d,
        convention: conv,
        first_deviation: computed.first_difference(&reference),
        computed_form: pipeline_closed_form(d).map(|f| f.to_string()),
        reference_form: form.to_string(),
        computed,
        reference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(c: &[i64], t: usize) -> GradedDims {
        GradedDims::new(TruncatedSeries::from_i64s(c, t)).unwrap()
    }

    fn p1(t: usize) -> GradedDims {
        stable_irr_series(1, t, SymConvention::Koszul).unwrap()
    }

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn sym_zero_and_one() {
        let v = p1(10);
        for conv in SymConvention::ALL {
            assert_eq!(sym_m(&v, 0, conv), GradedDims::unit(10));
            assert_eq!(sym_m(&v, 1, conv), v);
        }
    }

    #[test]
    fn sym_examples() {
        assert_eq!(sym_m(&p1(8), 2, SymConvention::Koszul).dim(8).unwrap(), &b(2));
        let mut odd = vec![0; 11];
        odd[5] = 1;
        let odd = dims(&odd, 10);
        assert!(sym_m(&odd, 2, SymConvention::Koszul).series().is_zero());
        let naive = sym_m(&odd, 2, SymConvention::Naive);
        assert_eq!(naive.dim(10).unwrap(), &b(1));
        assert_eq!(naive.lowest_degree(), Some(10));
    }

    #[test]
    fn oracle_examples() {
        for conv in SymConvention::ALL {
            assert_eq!(invariant_dim_oracle(&p1(12), 3, 12, conv).unwrap(), b(3));
            for k in 0..=12 {
                assert_eq!(
                    &invariant_dim_oracle(&p1(12), 1, k, conv).unwrap(),
                    p1(12).dim(k).unwrap()
                );
            }
        }
        let p2 = stable_irr_series(2, 10, SymConvention::Koszul).unwrap();
        assert_eq!(
            invariant_dim_oracle(&p2, 2, 10, SymConvention::Koszul).unwrap(),
            b(0)
        );
        assert_eq!(
            invariant_dim_oracle(&p2, 2, 10, SymConvention::Naive).unwrap(),
            b(1)
        );
        assert!(invariant_dim_oracle(&p2, 2, 11, SymConvention::Naive).is_err());
    }

    #[test]
    fn registry_series() {
        for conv in SymConvention::ALL {
            assert_eq!(
                stable_irr_series(1, 8, conv).unwrap(),
                dims(&[0, 0, 1, 0, 1, 0, 1, 0, 1], 8)
            );
            assert_eq!(
                stable_irr_series(2, 11, conv).unwrap(),
                dims(&[0, 0, 0, 0, 0, 1, 0, 1, 0, 2, 0, 2], 11)
            );
            let p3 = stable_irr_series(3, 14, conv).unwrap();
            assert_eq!(p3.trunc(), 14);
            assert_eq!(p3.lowest_degree(), Some(10));
            assert_eq!(p3.series().coeffs()[10..], [1, 0, 2, 0, 3].map(BigInt::from));
        }
        assert!(matches!(
            stable_irr_series(4, 10, SymConvention::Naive),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn stratum_examples() {
        let l = |s: &str| s.parse::<Partition>().unwrap();
        assert_eq!(
            stable_stratum_series(&l("1+1+1+1"), 10, SymConvention::Naive).unwrap(),
            dims(&[0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1], 10)
        );
        let naive = stable_stratum_series(&l("2+2"), 10, SymConvention::Naive).unwrap();
        let koszul = stable_stratum_series(&l("2+2"), 10, SymConvention::Koszul).unwrap();
        assert_eq!(naive.dim(10).unwrap(), &b(1));
        assert_eq!(koszul.dim(10).unwrap(), &b(0));
        let t12 = stable_stratum_series(&l("1+2"), 9, SymConvention::Koszul).unwrap();
        assert_eq!(t12.lowest_degree(), Some(7));
        assert_eq!(t12.dim(7).unwrap(), &b(1));
        assert_eq!(t12.dim(9).unwrap(), &b(2));
        assert!(matches!(
            stable_stratum_series(&l("4+1"), 10, SymConvention::Naive),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn cokernel_examples() {
        let t = 20;
        let p1 = p1(t);
        let p2 = stable_irr_series(2, t, SymConvention::Koszul).unwrap();
        let target = p2.tensor(&p1).cap(t);
        let source = sym_m(&p1, 3, SymConvention::Koszul);
        let red = cokernel_subtract(&target, &source, 1).unwrap();
        assert_eq!(red.lowest_degree(), Some(9));
        assert_eq!(cokernel_subtract(&p2, &GradedDims::zero(t), 3).unwrap(), p2);
        assert_eq!(
            cokernel_subtract(&source, &target, -1).unwrap_err(),
            Error::InjectivityViolation {
                target_degree: 8,
                source_degree: 9,
                value: "-1".into()
            }
        );
    }

    #[test]
    fn printed_comparison_flags_t12() {
        let c = compare_with_printed(3, 30, SymConvention::Naive).unwrap();
        assert_eq!(c.first_deviation, Some(12));
        assert_eq!(c.reference_form, "t^10/((1-t^2)(1-t^6))");
        assert_eq!(c.computed_form.as_deref(), Some("t^10/((1-t^2)(1-t^2)(1-t^6))"));
        for d in [1, 2] {
            assert_eq!(compare_with_printed(d, 40, SymConvention::Koszul).unwrap().first_deviation, None);
        }
    }

    #[test]
    fn conventions_parse() {
        assert_eq!("naive".parse::<SymConvention>().unwrap(), SymConvention::Naive);
        assert!("signed".parse::<SymConvention>().is_err());
        assert_eq!(SymConvention::default(), SymConvention::Koszul);
    }
}
