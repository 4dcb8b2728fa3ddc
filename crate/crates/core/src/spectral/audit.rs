//! Vanishing audit: stable stratum series start no lower than `r(λ)`, and the
//! `E_1` page alone forces `b_k(d) = 0` for `k ≤ 2d`.
//!
//! For parts `j ≥ 4` no stable series is available. In their place the audit
//! supplies the zero series known only through `L_j`, the degree below which
//! every `E_1` entry of `Red_j` vanishes; that much is forced without knowing
//! any differential.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded::{GradedDims, StableRegistry, SymConvention};
use crate::partition::{r_of_partition, r_table, reducible_partitions, Partition};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumAudit {
    pub partition: Partition,
    pub r: u64,
    /// Lowest nonzero degree, `None` when the series vanishes as far as known.
    pub lowest_degree: Option<usize>,
    /// Degree through which the stratum series is exact.
    pub known_through: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeAudit {
    pub d: usize,
    pub r_d: u64,
    pub strata: Vec<StratumAudit>,
    /// `H^k_c(Red_d) = 0` for `k <` this degree, read off the `E_1` page.
    pub red_vanishes_below: usize,
    /// `b_k(d) = 0` for `k ≤` this degree.
    pub betti_zero_through: usize,
    pub claim_2d_holds: bool,
    pub claim_r_holds: bool,
    /// First nonzero `b_k(d)` when the stable series of `Irr_d` is registered.
    pub first_nonzero_betti: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VanishingAudit {
    pub d_max: usize,
    pub convention: SymConvention,
    pub working_trunc: usize,
    pub degrees: Vec<DegreeAudit>,
    pub violations: Vec<String>,
    pub passed: bool,
}

pub fn vanishing_audit(d_max: usize, conv: SymConvention) -> Result<VanishingAudit> {
    if !(2..=6).contains(&d_max) {
        return Err(Error::Argument(format!(
            "vanishing_audit covers 2 <= d <= d_max <= 6, got d_max = {d_max}"
        )));
    }
    let working_trunc = 3 * d_max + 2;
    let r = r_table(d_max.max(3));
    let mut registry = StableRegistry::new(working_trunc, conv)?;
    let mut degrees = Vec::new();
    let mut violations = Vec::new();

    for base in 1..=3 {
        let series = registry.get(base)?;
        let low = valuation(series);
        if (low as u64) < r[base] {
            violations.push(format!(
                "P_{base} starts in degree {low}, below r({base}) = {}",
                r[base]
            ));
        }
    }

    for d in 2..=d_max {
        let mut strata = Vec::new();
        let mut red_vanishes_below = usize::MAX;
        for lambda in reducible_partitions(d)? {
            let series = registry.stratum_series(&lambda)?;
            let r_lambda = r_of_partition(&lambda)?;
            let lowest_degree = series.lowest_degree();
            let known_through = series.trunc();
            let ok = match lowest_degree {
                Some(low) => low as u64 >= r_lambda,
                None => known_through as u64 + 1 >= r_lambda,
            };
            if !ok {
                violations.push(format!(
                    "d={d}: stratum {lambda} has lowest degree {} below r = {r_lambda}",
                    describe(lowest_degree, known_through)
                ));
            }
            red_vanishes_below = red_vanishes_below.min(valuation(&series));
            strata.push(StratumAudit {
                partition: lambda,
                r: r_lambda,
                lowest_degree,
                known_through,
                ok,
            });
        }
        let betti_zero_through = red_vanishes_below;
        let claim_2d_holds = betti_zero_through >= 2 * d;
        let claim_r_holds = betti_zero_through as u64 + 1 >= r[d];
        if !claim_2d_holds {
            violations.push(format!(
                "d={d}: E_1 only forces b_k = 0 for k <= {betti_zero_through}, short of 2d = {}",
                2 * d
            ));
        }
        if !claim_r_holds {
            violations.push(format!(
                "d={d}: E_1 only forces b_k = 0 for k <= {betti_zero_through}, short of r(d) - 1 = {}",
                r[d] - 1
            ));
        }
        let first_nonzero_betti = if d <= 3 {
            let irr = registry.get(d)?;
            let first = irr.lowest_degree();
            if let Some(first) = first {
                if first <= betti_zero_through {
                    violations.push(format!(
                        "d={d}: stable series has b_{first} != 0 inside the forced zero range"
                    ));
                }
            }
            first
        } else {
            registry.supply(d, GradedDims::zero(betti_zero_through.min(working_trunc)));
            None
        };
        degrees.push(DegreeAudit {
            d,
            r_d: r[d],
            strata,
            red_vanishes_below,
            betti_zero_through,
            claim_2d_holds,
            claim_r_holds,
            first_nonzero_betti,
        });
    }

    Ok(VanishingAudit {
        d_max,
        convention: conv,
        working_trunc,
        passed: violations.is_empty(),
        degrees,
        violations,
    })
}

// Least degree that may be nonzero.
fn valuation(series: &GradedDims) -> usize {
    series.lowest_degree().unwrap_or(series.trunc() + 1)
}

fn describe(lowest: Option<usize>, known_through: usize) -> String {
    match lowest {
        Some(d) => d.to_string(),
        None => format!("> {known_through} (unknown past truncation)"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn audit_to_six() {
        for conv in SymConvention::ALL {
            let audit = vanishing_audit(6, conv).unwrap();
            assert!(audit.passed, "{:?}", audit.violations);
            let through: Vec<usize> = audit.degrees.iter().map(|d| d.betti_zero_through).collect();
            assert_eq!(through, [4, 6, 8, 10, 12]);
            assert_eq!(audit.degrees[1].first_nonzero_betti, Some(10));
        }
    }

    #[test]
    fn d2_report() {
        let audit = vanishing_audit(2, SymConvention::Naive).unwrap();
        let d2 = &audit.degrees[0];
        assert_eq!(d2.strata.len(), 1);
        assert_eq!(d2.strata[0].lowest_degree, Some(4));
        assert_eq!(d2.strata[0].r, 4);
        assert_eq!(d2.betti_zero_through, 4);
        assert!(vanishing_audit(7, SymConvention::Naive).is_err());
    }
}
