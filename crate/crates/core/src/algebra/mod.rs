//! Exact arithmetic: rational polynomials in `q`, truncated integer series
//! in `t`, and closed rational forms.

mod qpoly;
mod rational_form;
mod series;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use qpoly::QPolynomial;
pub use rational_form::{expand_rational_form, RationalFormSeries};
pub use series::TruncatedSeries;

/// The multiset coefficient `P (P+1) ... (P+m-1) / m!` of a polynomial.
pub fn multiset_binomial(p: &QPolynomial, m: usize) -> QPolynomial {
    let mut acc = QPolynomial::one();
    let mut factorial = BigInt::one();
    for i in 0..m {
        acc = &acc * &(p + &QPolynomial::from_integer(i as i64));
        factorial *= i + 1;
    }
    acc.scale(&BigRational::new(BigInt::one(), factorial))
}

/// The multiset coefficient `C(x + m - 1, m)` of an integer (any sign).
pub fn multiset_binomial_int(x: &BigInt, m: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..m {
        num *= x + BigInt::from(i);
        den *= i + 1;
    }
    debug_assert!((&num % &den).is_zero());
    num / den
}
