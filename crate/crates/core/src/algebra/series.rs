use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A power series in `t` with integer coefficients, known exactly through
/// degree `trunc` and unknown above it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries {
    coeffs: Vec<BigInt>,
}

impl TruncatedSeries {
    /// Coefficients for degrees `0..=trunc`; missing entries are zero and
    /// entries past `trunc` are dropped.
    pub fn new(mut coeffs: Vec<BigInt>, trunc: usize) -> Self {
        coeffs.resize(trunc + 1, BigInt::zero());
        Self { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64], trunc: usize) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect(), trunc)
    }

    pub fn zero(trunc: usize) -> Self {
        Self::new(Vec::new(), trunc)
    }

    pub fn one(trunc: usize) -> Self {
        Self::new(vec![BigInt::one()], trunc)
    }

    /// `c · t^degree`, or zero if `degree > trunc`.
    pub fn monomial(degree: usize, c: BigInt, trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        if degree <= trunc {
            s.coeffs[degree] = c;
        }
        s
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `t^degree`; reading past the truncation is an error.
    pub fn coeff(&self, degree: usize) -> Result<&BigInt> {
        self.coeffs.get(degree).ok_or(Error::BeyondTruncation {
            degree,
            trunc: self.trunc(),
        })
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Restricts to a lower truncation order.
    pub fn truncate(&self, trunc: usize) -> Result<Self> {
        if trunc > self.trunc() {
            return Err(Error::BeyondTruncation {
                degree: trunc,
                trunc: self.trunc(),
            });
        }
        Ok(Self {
            coeffs: self.coeffs[..=trunc].to_vec(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Least degree with nonzero coefficient, `None` if the series vanishes
    /// through its truncation.
    pub fn lowest_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    // Lowest degree that may be nonzero.
    fn valuation_bound(&self) -> usize {
        self.lowest_degree().unwrap_or(self.trunc() + 1)
    }

    pub fn add(&self, other: &Self) -> Self {
        let trunc = self.trunc().min(other.trunc());
        Self {
            coeffs: (0..=trunc)
                .map(|k| &self.coeffs[k] + &other.coeffs[k])
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let trunc = self.trunc().min(other.trunc());
        Self {
            coeffs: (0..=trunc)
                .map(|k| &self.coeffs[k] - &other.coeffs[k])
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Cauchy product (tensor product of graded dimensions).
    ///
    /// The result is exact through `min(trunc_a + low_b, trunc_b + low_a)`,
    /// where `low` is the least possibly-nonzero degree. This is never below
    /// the smaller operand truncation.
    pub fn mul(&self, other: &Self) -> Self {
        let trunc = (self.trunc() + other.valuation_bound())
            .min(other.trunc() + self.valuation_bound());
        let mut coeffs = vec![BigInt::zero(); trunc + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i > trunc {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(trunc - i + 1) {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        Self { coeffs }
    }

    /// Suspension: `(shift(V, k))_i = V_(i-k)`. Negative shifts desuspend and
    /// fail if a nonzero coefficient would land below degree 0.
    pub fn shift(&self, by: i64) -> Result<Self> {
        if by >= 0 {
            let by = by as usize;
            let mut coeffs = vec![BigInt::zero(); by];
            coeffs.extend(self.coeffs.iter().cloned());
            return Ok(Self { coeffs });
        }
        let drop = by.unsigned_abs() as usize;
        if drop > self.trunc() {
            return Err(Error::Argument(format!(
                "cannot desuspend by {drop} a series truncated at {}",
                self.trunc()
            )));
        }
        if let Some(k) = self.coeffs[..drop].iter().position(|c| !c.is_zero()) {
            return Err(Error::Argument(format!(
                "desuspension by {drop} would move the nonzero degree-{k} coefficient below 0"
            )));
        }
        Ok(Self {
            coeffs: self.coeffs[drop..].to_vec(),
        })
    }

    /// Fails with the first degree carrying a negative coefficient.
    pub fn ensure_nonnegative(&self) -> Result<()> {
        match self.coeffs.iter().position(|c| c.is_negative()) {
            Some(degree) => Err(Error::NegativeDimension {
                degree,
                value: self.coeffs[degree].to_string(),
            }),
            None => Ok(()),
        }
    }

    /// Pointwise difference of dimension series; a negative result is an
    /// error rather than a value.
    pub fn dim_sub(&self, other: &Self) -> Result<Self> {
        let diff = self.sub(other);
        diff.ensure_nonnegative()?;
        Ok(diff)
    }

    /// First degree (within both truncations) where the series differ.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        let trunc = self.trunc().min(other.trunc());
        (0..=trunc).find(|&k| self.coeffs[k] != other.coeffs[k])
    }
}

#[derive(Serialize)]
struct SeriesRepr {
    trunc: usize,
    coeffs: Vec<String>,
}

/// Serialized as `{ "trunc": T, "coeffs": ["c_0", ..., "c_T"] }`.
impl Serialize for TruncatedSeries {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            trunc: self.trunc(),
            coeffs: self.coeffs.iter().map(ToString::to_string).collect(),
        }
        .serialize(serializer)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            if !mag.is_one() || k == 0 {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => f.write_str("t")?,
                _ => write!(f, "t^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(t^{})", self.trunc() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: &[i64], t: usize) -> TruncatedSeries {
        TruncatedSeries::from_i64s(c, t)
    }

    #[test]
    fn reads_past_truncation_fail() {
        let a = s(&[0, 0, 1], 4);
        assert_eq!(a.coeff(4).unwrap(), &BigInt::zero());
        assert_eq!(
            a.coeff(5),
            Err(Error::BeyondTruncation { degree: 5, trunc: 4 })
        );
    }

    #[test]
    fn shift_examples() {
        let a = s(&[0, 0, 1, 0, 1], 4);
        let shifted = a.shift(4).unwrap();
        assert_eq!(shifted, s(&[0, 0, 0, 0, 0, 0, 1, 0, 1], 8));
        assert_eq!(shifted.shift(-4).unwrap(), a);
        assert!(a.shift(-3).is_err());
        assert!(a.shift(-5).is_err());
    }

    #[test]
    fn add_takes_min_truncation() {
        let a = s(&[1, 1, 1], 2);
        let b = s(&[1], 5);
        assert_eq!(a.add(&b), s(&[2, 1, 1], 2));
        assert_eq!(b.sub(&a).trunc(), 2);
    }

    #[test]
    fn mul_precision_tracks_valuations() {
        // t^2 + ... known to 10, times t^3 + ... known to 4: exact to 4 + 2 = 6.
        let a = s(&[0, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1], 10);
        let b = s(&[0, 0, 0, 1], 4);
        let p = a.mul(&b);
        assert_eq!(p.trunc(), 6);
        assert_eq!(p, s(&[0, 0, 0, 0, 0, 1], 6));
        // A series vanishing through its truncation still bounds the product.
        let z = TruncatedSeries::zero(8);
        let zp = z.mul(&a);
        assert_eq!(zp.trunc(), 10);
        assert!(zp.is_zero());
    }

    #[test]
    fn lowest_degree_and_dim_sub() {
        assert_eq!(s(&[0, 0, 0, 2], 5).lowest_degree(), Some(3));
        assert_eq!(TruncatedSeries::zero(3).lowest_degree(), None);
        let err = s(&[1, 1], 1).dim_sub(&s(&[0, 2], 1)).unwrap_err();
        assert_eq!(
            err,
            Error::NegativeDimension { degree: 1, value: "-1".into() }
        );
    }

    #[test]
    fn display_and_json() {
        let a = s(&[0, 0, 1, 0, -2], 5);
        assert_eq!(a.to_string(), "t^2 - 2t^4 + O(t^6)");
        assert_eq!(
            serde_json::to_string(&s(&[1, 0, 3], 2)).unwrap(),
            r#"{"trunc":2,"coeffs":["1","0","3"]}"#
        );
    }
}
