//! Exact counts over `F_q` from the factorization-type stratification.
//!
//! Every normalized polynomial of exact degree `d` factors uniquely, so the
//! point count of `Poly_{d,n}` is the sum of its strata, and each stratum is
//! a product of multiset coefficients of smaller irreducible counts. Solving
//! for the one-part stratum gives `|Irr_{d,n}(F_q)|` as a polynomial in `q`.
//! The same recursion over integers (evaluation at `q = 1`) gives the
//! compactly supported Euler characteristic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{multiset_binomial, multiset_binomial_int, QPolynomial};
use crate::error::{arg, Error, Result};
use crate::partition::{reducible_partitions, Partition};

/// `B(d, n) = C(d+n, n)`, the number of monomials of degree at most `d` in
/// `n` variables.
pub fn monomial_count(d: usize, n: usize) -> usize {
    crate::partition::binomial(d + n, n) as usize
}

pub fn binomial_big(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `(q^B(d,n) - q^B(d-1,n)) / (q - 1)`: normalized polynomials of exact
/// degree `d`, counted up to scalars.
pub fn poly_exact_count(d: usize, n: usize) -> Result<QPolynomial> {
    if d == 0 {
        return arg("poly_exact_count needs d >= 1");
    }
    if n == 0 {
        return arg("poly_exact_count needs n >= 1");
    }
    let one = BigRational::one();
    let top = QPolynomial::monomial(one.clone(), monomial_count(d, n));
    let bottom = QPolynomial::monomial(one, monomial_count(d - 1, n));
    let q_minus_one = QPolynomial::from_integer_coeffs(&[-1, 1]);
    (&top - &bottom).div_exact(&q_minus_one)
}

/// Memoized irreducible counts `|Irr_{j,n}|` for one `n`.
#[derive(Clone, Debug)]
pub struct CountContext {
    n: usize,
    // memo[j - 1] = irr_count(j, n)
    memo: Vec<QPolynomial>,
}

impl CountContext {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return arg("counting needs n >= 1");
        }
        Ok(Self {
            n,
            memo: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn irr_count(&mut self, d: usize) -> Result<&QPolynomial> {
        if d == 0 {
            return arg("irr_count needs d >= 1");
        }
        while self.memo.len() < d {
            let j = self.memo.len() + 1;
            let mut count = poly_exact_count(j, self.n)?;
            for lambda in reducible_partitions(j)? {
                count = &count - &self.stratum_from_memo(&lambda);
            }
            self.memo.push(count);
        }
        Ok(&self.memo[d - 1])
    }

    /// `∏_j multiset(|Irr_{j,n}|, m_j(λ))`.
    pub fn stratum_count(&mut self, lambda: &Partition) -> Result<QPolynomial> {
        self.irr_count(lambda.largest_part())?;
        Ok(self.stratum_from_memo(lambda))
    }

    fn stratum_from_memo(&self, lambda: &Partition) -> QPolynomial {
        lambda
            .multiplicities()
            .into_iter()
            .fold(QPolynomial::one(), |acc, (j, m)| {
                &acc * &multiset_binomial(&self.memo[j - 1], m)
            })
    }
}

pub fn irr_count(d: usize, n: usize) -> Result<QPolynomial> {
    Ok(CountContext::new(n)?.irr_count(d)?.clone())
}

pub fn stratum_count(lambda: &Partition, n: usize) -> Result<QPolynomial> {
    CountContext::new(n)?.stratum_count(lambda)
}

/// Möbius function by trial division.
pub fn mobius(mut e: usize) -> i64 {
    assert!(e >= 1);
    let mut sign = 1;
    let mut p = 2;
    while p * p <= e {
        if e % p == 0 {
            e /= p;
            if e % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if e > 1 {
        sign = -sign;
    }
    sign
}

/// One-variable irreducible count `(1/d) Σ_{e | d} μ(e) q^(d/e)`.
pub fn necklace_count(d: usize) -> Result<QPolynomial> {
    if d == 0 {
        return arg("necklace_count needs d >= 1");
    }
    let mut acc = QPolynomial::zero();
    for e in (1..=d).filter(|e| d % e == 0) {
        let mu = mobius(e);
        if mu != 0 {
            acc = &acc + &QPolynomial::monomial(BigRational::from_integer(mu.into()), d / e);
        }
    }
    Ok(acc.scale(&BigRational::new(BigInt::one(), BigInt::from(d))))
}

/// Compactly supported Euler characteristics of `Irr_{j,n}(C)` for one `n`.
#[derive(Clone, Debug)]
pub struct EulerContext {
    n: usize,
    memo: Vec<BigInt>,
}

impl EulerContext {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return arg("Euler characteristics need n >= 1");
        }
        Ok(Self {
            n,
            memo: Vec::new(),
        })
    }

    /// `χ_c(Irr_{d,n})` from `χ_c(Poly_{d,n}) = C(d+n-1, n-1)` by the same
    /// stratification recursion as the point counts.
    pub fn euler_char(&mut self, d: usize) -> Result<&BigInt> {
        if d == 0 {
            return arg("euler_char needs d >= 1");
        }
        while self.memo.len() < d {
            let j = self.memo.len() + 1;
            let mut chi = binomial_big(j + self.n - 1, self.n - 1);
            for lambda in reducible_partitions(j)? {
                let stratum = lambda
                    .multiplicities()
                    .into_iter()
                    .fold(BigInt::one(), |acc, (part, m)| {
                        acc * multiset_binomial_int(&self.memo[part - 1], m)
                    });
                chi -= stratum;
            }
            self.memo.push(chi);
        }
        Ok(&self.memo[d - 1])
    }
}

pub fn euler_char(d: usize, n: usize) -> Result<BigInt> {
    Ok(EulerContext::new(n)?.euler_char(d)?.clone())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerRow {
    pub d: usize,
    pub n: usize,
    #[serde(serialize_with = "crate::json::display")]
    pub chi: BigInt,
}

/// `χ_c(Irr_{d,n})` for all `1 ≤ d ≤ d_max`, `1 ≤ n ≤ n_max`, ordered by
/// `(d, n)`.
pub fn euler_table(d_max: usize, n_max: usize) -> Result<Vec<EulerRow>> {
    let per_n: Vec<Vec<BigInt>> = (1..=n_max)
        .into_par_iter()
        .map(|n| -> Result<Vec<BigInt>> {
            let mut ctx = EulerContext::new(n)?;
            (1..=d_max).map(|d| ctx.euler_char(d).cloned()).collect()
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(d_max * n_max);
    for d in 1..=d_max {
        for n in 1..=n_max {
            rows.push(EulerRow {
                d,
                n,
                chi: per_n[n - 1][d - 1].clone(),
            });
        }
    }
    Ok(rows)
}

pub fn is_prime(q: u64) -> bool {
    q >= 2 && (2..).take_while(|p| p * p <= q).all(|p| q % p != 0)
}

/// Decimal rendering rounded half away from zero to `places` digits, with
/// trailing zeros removed.
pub fn decimal_string(x: &BigRational, places: usize) -> String {
    let scale = BigInt::from(10).pow(places as u32);
    let scaled = x * BigRational::from_integer(scale.clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let rounded = if scaled.is_negative() {
        -((-scaled) + half).floor().to_integer()
    } else {
        (scaled + half).floor().to_integer()
    };
    let negative = rounded.is_negative();
    let digits = rounded.abs().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = digits.split_at(digits.len() - places);
    let frac_part = frac_part.trim_end_matches('0');
    let sign = if negative { "-" } else { "" };
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CarlitzRow {
    pub d: usize,
    #[serde(serialize_with = "crate::json::display")]
    pub ratio: BigRational,
    pub decimal: String,
}

/// The Carlitz limit `1 + 1/q + 1/q^2 + ... = q / (q - 1)`.
pub fn carlitz_limit(q: u64) -> BigRational {
    BigRational::new(q.into(), (q - 1).into())
}

/// Rows `|Irr_{d,n}(F_q)| / q^(B(d,n) - 1)` for `d = 1..=d_max`.
pub fn carlitz_table(q: u64, n: usize, d_max: usize) -> Result<Vec<CarlitzRow>> {
    if !is_prime(q) {
        return arg(format!("carlitz: q = {q} must be a prime"));
    }
    if n < 2 {
        return arg(
            "carlitz: the ratio limit only holds for n > 1 (in one variable almost no \
             polynomial is irreducible); pass n >= 2",
        );
    }
    let mut ctx = CountContext::new(n)?;
    let q_big = BigInt::from(q);
    let mut rows = Vec::with_capacity(d_max);
    for d in 1..=d_max {
        let count = ctx.irr_count(d)?.eval(&BigRational::from_integer(q_big.clone()));
        let denom = q_big.pow((monomial_count(d, n) - 1) as u32);
        let ratio = count / BigRational::from_integer(denom);
        rows.push(CarlitzRow {
            d,
            decimal: decimal_string(&ratio, 12),
            ratio,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HydeRow {
    pub n: usize,
    #[serde(serialize_with = "crate::json::display_vec")]
    pub coefficients: Vec<BigRational>,
}

/// Low-degree coefficients of `|Irr_{d,n}|` as `n` grows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HydeReport {
    pub d: usize,
    pub window: usize,
    pub n_max: usize,
    pub rows: Vec<HydeRow>,
    /// Least `n` whose window agrees with the next two rows.
    pub n0: Option<usize>,
    #[serde(serialize_with = "crate::json::display_opt_vec")]
    pub stabilized: Option<Vec<BigRational>>,
}

impl HydeReport {
    /// The stabilization point and coefficients, or an explicit not-found
    /// error.
    pub fn result(&self) -> Result<(usize, &[BigRational])> {
        match (self.n0, &self.stabilized) {
            (Some(n0), Some(c)) => Ok((n0, c)),
            _ => Err(Error::NotStabilized {
                d: self.d,
                window: self.window,
                n_max: self.n_max,
            }),
        }
    }
}

/// Tracks the coefficients of `q^0..=q^window` of `|Irr_{d,n}|` for
/// `n = d..=n_max` and reports the first `n` agreeing with the next two.
pub fn hyde_stabilization(d: usize, window: usize, n_max: usize) -> Result<HydeReport> {
    if d == 0 {
        return arg("hyde_stabilization needs d >= 1");
    }
    let rows: Vec<HydeRow> = (d..=n_max)
        .into_par_iter()
        .map(|n| -> Result<HydeRow> {
            let count = irr_count(d, n)?;
            Ok(HydeRow {
                n,
                coefficients: (0..=window).map(|k| count.coeff(k)).collect(),
            })
        })
        .collect::<Result<_>>()?;
    let hit = rows.windows(3).find(|w| {
        w[0].coefficients == w[1].coefficients && w[1].coefficients == w[2].coefficients
    });
    Ok(HydeReport {
        d,
        window,
        n_max,
        n0: hit.map(|w| w[0].n),
        stabilized: hit.map(|w| w[0].coefficients.clone()),
        rows,
    })
}
