use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use super::TruncatedSeries;
use crate::error::{arg, Result};

/// The series `t^shift / ∏_i (1 - t^(k_i))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalFormSeries {
    pub shift: usize,
    pub denominator_exponents: Vec<usize>,
}

impl RationalFormSeries {
    pub fn new(shift: usize, mut denominator_exponents: Vec<usize>) -> Result<Self> {
        if denominator_exponents.contains(&0) {
            return arg("denominator factors 1 - t^0 vanish");
        }
        denominator_exponents.sort_unstable();
        Ok(Self {
            shift,
            denominator_exponents,
        })
    }

    /// Coefficients through degree `trunc`.
    pub fn expand(&self, trunc: usize) -> TruncatedSeries {
        let mut coeffs = vec![BigInt::from(0); trunc + 1];
        if self.shift <= trunc {
            coeffs[self.shift] = BigInt::one();
        }
        // Dividing by (1 - t^k) is the running sum c_i += c_(i-k).
        for &k in &self.denominator_exponents {
            for i in k..=trunc {
                let prev = coeffs[i - k].clone();
                coeffs[i] += prev;
            }
        }
        TruncatedSeries::new(coeffs, trunc)
    }
}

impl fmt::Display for RationalFormSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.shift {
            0 => f.write_str("1")?,
            1 => f.write_str("t")?,
            a => write!(f, "t^{a}")?,
        }
        if self.denominator_exponents.is_empty() {
            return Ok(());
        }
        f.write_str("/(")?;
        for &k in &self.denominator_exponents {
            if k == 1 {
                f.write_str("(1-t)")?;
            } else {
                write!(f, "(1-t^{k})")?;
            }
        }
        f.write_str(")")
    }
}

/// Expands a rational form through degree `trunc`.
pub fn expand_rational_form(form: &RationalFormSeries, trunc: usize) -> TruncatedSeries {
    form.expand(trunc)
}
