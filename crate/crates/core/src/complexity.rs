//! Closed forms for the subword complexity `p(L)` and its growth
//! `p(L+1) - p(L)`, plus the language-count oracle.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::coding::Coding;
use crate::error::{Error, Result};
use crate::language::language;
use crate::words::Subshift;

/// `|p(k)|` for `k >= -1`.
pub(crate) fn ell(c: &Coding, k: i64) -> Result<BigInt> {
    c.block_len(k)
}

/// `|A_k|` as a signed integer.
pub(crate) fn alpha_size(c: &Coding, k: usize) -> Result<BigInt> {
    Ok(BigInt::from(c.tail_alphabet(k)?.len()))
}

/// `1_{A_k}(a_j)`.
pub(crate) fn ind(c: &Coding, k: usize, j: usize) -> Result<BigInt> {
    let letter = c.letter(j)?;
    Ok(BigInt::from(c.tail_alphabet(k)?.contains(letter) as u8))
}

/// Least `k` with `|p(k)| + 1 >= target`.
pub(crate) fn min_level(c: &Coding, target: &BigInt) -> Result<usize> {
    let mut size = BigInt::one();
    let mut k = 0;
    loop {
        size *= c.period(k)?;
        if &size >= target {
            return Ok(k);
        }
        k += 1;
    }
}

fn to_unsigned(v: BigInt) -> Result<BigUint> {
    v.to_biguint()
        .ok_or_else(|| Error::InvalidArgument(format!("negative count {v}")))
}

/// Exact `p(L)`.
pub fn complexity_formula(c: &Coding, len: &BigUint) -> Result<BigUint> {
    let l = BigInt::from(len.clone());
    let l0 = ell(c, 0)?;
    let a0 = alpha_size(c, 0)?;
    if l <= l0 {
        return to_unsigned((a0 - 1) * &l + 1);
    }
    if l == &l0 + 1 {
        return to_unsigned((a0 - 1) * &l + ind(c, 1, 0)?);
    }
    let k = min_level(c, &l)?;
    let ki = k as i64;
    let (lk, lk1, lk2) = (ell(c, ki)?, ell(c, ki - 1)?, ell(c, ki - 2)?);
    let value = if c.period(k)? == 2 {
        let head = (alpha_size(c, k + 1)? - 1) * &l
            + (alpha_size(c, k - 1)? - alpha_size(c, k + 1)?) * (&lk1 + 1);
        let tail = if l <= &lk - &lk2 {
            -&lk1 + &lk2 + &l
        } else {
            &lk1 + 1
        };
        head + ind(c, k, k - 1)? * tail
    } else {
        let head = (&lk1 + 1) + (alpha_size(c, k)? - 1) * &l;
        let tail = if l <= BigInt::from(2) * &lk1 - &lk2 + 1 {
            ind(c, k, k - 1)? * (&l - BigInt::from(2) * &lk1 + &lk2 - 1)
        } else if l <= &lk - &lk1 {
            BigInt::zero()
        } else {
            -(BigInt::one() - ind(c, k + 1, k)?) * (&l - &lk + &lk1)
        };
        head + tail
    };
    to_unsigned(value)
}

pub fn complexity(c: &Coding, len: u64) -> Result<BigUint> {
    complexity_formula(c, &BigUint::from(len))
}

/// Exact growth `p(L+1) - p(L)`.
pub fn growth_formula(c: &Coding, len: &BigUint) -> Result<BigUint> {
    let l = BigInt::from(len.clone());
    let l0 = ell(c, 0)?;
    if l < l0 {
        return to_unsigned(alpha_size(c, 0)? - 1);
    }
    if l == l0 {
        return to_unsigned(alpha_size(c, 1)? - 1);
    }
    // Least k >= 1 with L <= |p(k)|.
    let k = min_level(c, &(&l + 1))?;
    let ki = k as i64;
    let (lk, lk1, lk2) = (ell(c, ki)?, ell(c, ki - 1)?, ell(c, ki - 2)?);
    let mut value = alpha_size(c, k)? - 1;
    if l >= &lk - &lk1 {
        value -= alpha_size(c, k)? - alpha_size(c, k + 1)?;
    }
    if l <= BigInt::from(2) * &lk1 - &lk2 {
        value += ind(c, k, k - 1)?;
    }
    to_unsigned(value)
}

pub fn growth(c: &Coding, len: u64) -> Result<BigUint> {
    growth_formula(c, &BigUint::from(len))
}

/// `p(|p(k)| + 1)`.
pub fn checkpoint_complexity(c: &Coding, k: usize) -> Result<BigUint> {
    let ki = k as i64;
    let value =
        (alpha_size(c, k)? - 1) * (ell(c, ki)? + 1) + ind(c, k + 1, k)? * (ell(c, ki - 1)? + 1);
    to_unsigned(value)
}

/// The two-branch form valid once `k >= N_ev + 1`.
pub fn eventual_complexity(c: &Coding, len: &BigUint) -> Result<BigUint> {
    let l = BigInt::from(len.clone());
    let k = min_level(c, &l)?;
    let min = c.eventual_index() + 1;
    if k < min || l < ell(c, k as i64 - 1)? + 2 {
        return Err(Error::LevelOutOfRange { level: k, min });
    }
    let ki = k as i64;
    let (lk1, lk2) = (ell(c, ki - 1)?, ell(c, ki - 2)?);
    let aev = BigInt::from(c.eventual_alphabet().len());
    let value = if l <= BigInt::from(2) * &lk1 - &lk2 + 1 {
        aev * &l - &lk1 + &lk2
    } else {
        (aev - 1) * &l + &lk1 + 1
    };
    to_unsigned(value)
}

/// Extremes of `p(L)/L` over `|p(k-1)| + 2 <= L <= |p(k)| + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientExtrema {
    pub k: usize,
    pub max_value: BigRational,
    pub argmax_len: BigUint,
    pub min_value: BigRational,
    pub min_lower_bound: BigRational,
}

pub fn quotient_extrema(c: &Coding, k: usize) -> Result<QuotientExtrema> {
    let min = c.eventual_index() + 1;
    if k < min {
        return Err(Error::LevelOutOfRange { level: k, min });
    }
    let ki = k as i64;
    let (lk, lk1, lk2) = (ell(c, ki)?, ell(c, ki - 1)?, ell(c, ki - 2)?);
    let aev = BigRational::from_integer(BigInt::from(c.eventual_alphabet().len()));
    let ratio = |n: u64, d: u64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let nk = c.period(k)?;
    let nk1 = c.period(k - 1)?;
    let max_value = &aev - ratio(nk1 - 1, 2 * nk1 - 1);
    let argmax = BigInt::from(2) * &lk1 - &lk2 + 1;
    let lower_a = &aev - ratio(nk - 1, nk);
    let lower_b = &aev - ratio(nk1 - 1, nk1);
    let min_lower_bound = lower_a.min(lower_b);
    // The minimum sits at one of the two ends of the range.
    let quotient = |l: &BigInt| -> Result<BigRational> {
        let p = complexity_formula(c, &to_unsigned(l.clone())?)?;
        Ok(BigRational::new(BigInt::from(p), l.clone()))
    };
    let min_value = quotient(&(&lk1 + 2))?.min(quotient(&(&lk + 1))?);
    Ok(QuotientExtrema {
        k,
        max_value,
        argmax_len: to_unsigned(argmax)?,
        min_value,
        min_lower_bound,
    })
}

/// `|language(L)|`.
pub fn complexity_oracle(sub: &Subshift, len: usize) -> Result<usize> {
    Ok(language(sub, len)?.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplexityRecord {
    #[serde(rename = "L")]
    pub len: u64,
    pub formula: String,
    pub oracle: Option<usize>,
    pub growth: String,
}

impl ComplexityRecord {
    pub fn matches(&self) -> bool {
        self.oracle.is_none_or(|o| o.to_string() == self.formula)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplexityProfile {
    pub records: Vec<ComplexityRecord>,
}

impl ComplexityProfile {
    /// Formula and growth for `0 <= L <= max_len`, with oracle counts when asked.
    pub fn build(sub: &Subshift, max_len: u64, with_oracle: bool) -> Result<Self> {
        let c = sub.coding();
        let records = (0..=max_len)
            .into_par_iter()
            .map(|len| {
                let oracle = if with_oracle {
                    let l = len
                        .to_usize()
                        .ok_or_else(|| Error::Overflow(format!("length {len}")))?;
                    Some(complexity_oracle(sub, l)?)
                } else {
                    None
                };
                Ok(ComplexityRecord {
                    len,
                    formula: complexity(c, len)?.to_string(),
                    oracle,
                    growth: growth(c, len)?.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ComplexityProfile { records })
    }

    pub fn mismatches(&self) -> Vec<u64> {
        self.records
            .iter()
            .filter(|r| !r.matches())
            .map(|r| r.len)
            .collect()
    }
}
