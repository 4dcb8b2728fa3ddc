//! Explicit stability and vanishing thresholds, and stratum dimensions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::census::binomial_big;
use crate::error::{arg, Result};
use crate::partition::{reducible_partitions, Partition};

/// Largest number of `i` values listed in [`BoundsReport::low_range_homology`].
const LISTED_RANKS: usize = 64;

/// The explicit thresholds for `(d, n)`. A threshold is `None` when its
/// hypotheses do not hold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub d: usize,
    pub n: usize,
    /// `dim_C Poly_{d,n} = C(d+n, n) - 1`.
    #[serde(serialize_with = "crate::json::display")]
    pub poly_dimension: BigInt,
    /// `H^i_c(Irr) ≅ H^i_c(Poly)` for `0 ≤ i ≤ low_stability_max` (needs `n > 1`).
    #[serde(serialize_with = "display_opt")]
    pub low_stability_max: Option<BigInt>,
    /// Stable homology rank for `i = 0..` inside the low range (capped listing).
    pub low_range_homology: Vec<u8>,
    /// Stabilization in `n` holds for `i <` this bound (needs `d, n > 1`).
    #[serde(serialize_with = "display_opt")]
    pub high_stability_bound: Option<BigRational>,
    /// Largest integer `i` satisfying the strict high-stability inequality.
    #[serde(serialize_with = "display_opt")]
    pub high_stability_max: Option<BigInt>,
    /// `H^i_c(Red) = 0` for `i ≥` this threshold (needs `n > 1`).
    #[serde(serialize_with = "display_opt")]
    pub red_vanishing_from: Option<BigInt>,
    /// `H^k_c(Irr) = 0` for `k ≤` this degree (needs `d, n > 1`).
    pub irr_vanishing_through: Option<usize>,
}

impl BoundsReport {
    /// `1` for even `i`, `0` for odd `i`, inside the low stability range.
    pub fn homology_rank(&self, i: usize) -> Option<u8> {
        let max = self.low_stability_max.as_ref()?;
        (BigInt::from(i) <= *max).then_some(u8::from(i % 2 == 0))
    }

    /// Whether `i` lies strictly below the high stability bound.
    pub fn in_high_range(&self, i: i64) -> Option<bool> {
        self.high_stability_bound
            .as_ref()
            .map(|b| BigRational::from_integer(BigInt::from(i)) < *b)
    }
}

fn display_opt<T: std::fmt::Display, S: serde::Serializer>(
    v: &Option<T>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

pub fn bounds_report(d: usize, n: usize) -> Result<BoundsReport> {
    if d == 0 || n == 0 {
        return arg("bounds_report needs d >= 1 and n >= 1");
    }
    let two = BigInt::from(2);
    let nb = BigInt::from(n);
    let low_stability_max =
        (n > 1).then(|| &two * (binomial_big(d + n - 1, n - 1) - &nb - BigInt::one()));
    let low_range_homology = match &low_stability_max {
        Some(max) if !max.is_negative() => {
            let count = if *max >= BigInt::from(LISTED_RANKS) {
                LISTED_RANKS
            } else {
                usize::try_from(max).unwrap_or(0) + 1
            };
            (0..count).map(|i| u8::from(i % 2 == 0)).collect()
        }
        _ => Vec::new(),
    };
    let high_stability_bound = (d > 1 && n > 1).then(|| {
        BigRational::new(BigInt::from(2 * n), BigInt::from(d - 1))
            - BigRational::from_integer(BigInt::from((d - 2) * d.saturating_sub(3) / 2))
            - BigRational::one()
    });
    let high_stability_max = high_stability_bound.as_ref().map(|b| {
        let (num, den) = (b.numer(), b.denom());
        num.div_ceil(den) - BigInt::one()
    });
    let red_vanishing_from = (n > 1)
        .then(|| &two * (binomial_big(d + n - 1, n) + &nb) - BigInt::one());
    Ok(BoundsReport {
        d,
        n,
        poly_dimension: binomial_big(d + n, n) - BigInt::one(),
        low_stability_max,
        low_range_homology,
        high_stability_bound,
        high_stability_max,
        red_vanishing_from,
        irr_vanishing_through: (d > 1 && n > 1).then_some(2 * d),
    })
}

/// `dim_C T_{λ,n} = Σ_j m_j(λ) [C(j+n, n) - 1]`.
pub fn stratum_dimension(lambda: &Partition, n: usize) -> Result<BigInt> {
    if n == 0 {
        return arg("stratum_dimension needs n >= 1");
    }
    Ok(lambda
        .parts()
        .iter()
        .map(|&j| binomial_big(j + n, n) - BigInt::one())
        .sum())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimBoundRow {
    pub partition: Partition,
    #[serde(serialize_with = "crate::json::display")]
    pub dimension: BigInt,
    pub within_bound: bool,
    pub equality: bool,
}

/// Stratum dimensions of every reducible stratum against
/// `C(d+n-1, n) + n - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimBoundReport {
    pub d: usize,
    pub n: usize,
    #[serde(serialize_with = "crate::json::display")]
    pub bound: BigInt,
    pub rows: Vec<DimBoundRow>,
    pub holds: bool,
    pub equality_at: Vec<Partition>,
}

pub fn dim_bound_check(d: usize, n: usize) -> Result<DimBoundReport> {
    if d == 0 || n == 0 {
        return arg("dim_bound_check needs d >= 1 and n >= 1");
    }
    let bound = binomial_big(d + n - 1, n) + BigInt::from(n) - BigInt::one();
    let rows = reducible_partitions(d)?
        .into_iter()
        .map(|partition| -> Result<DimBoundRow> {
            let dimension = stratum_dimension(&partition, n)?;
            Ok(DimBoundRow {
                within_bound: dimension <= bound,
                equality: dimension == bound,
                partition,
                dimension,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DimBoundReport {
        d,
        n,
        holds: rows.iter().all(|r| r.within_bound),
        equality_at: rows
            .iter()
            .filter(|r| r.equality)
            .map(|r| r.partition.clone())
            .collect(),
        bound,
        rows,
    })
}
