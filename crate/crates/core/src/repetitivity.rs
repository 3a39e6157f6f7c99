//! The repetitivity function `R(L)`: closed form, containment oracle and
//! alpha-repetitivity verdicts.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::coding::{eventual_period, Coding, Periodicity};
use crate::complexity::ell;
use crate::error::{Error, Result};
use crate::language::language;
use crate::words::Subshift;

/// Lower end of the range covered by the closed form: `|p(m_1)| - |p(m_1 - 1)| + 1`.
pub fn formula_start(c: &Coding) -> Result<BigInt> {
    let m1 = c.m(1)? as i64;
    Ok(ell(c, m1)? - ell(c, m1 - 1)? + 1)
}

/// `R(L)` for `L >= |p(m_1)| - |p(m_1 - 1)| + 1`.
pub fn repetitivity_formula(c: &Coding, len: &BigUint) -> Result<BigUint> {
    let l = BigInt::from(len.clone());
    let start = formula_start(c)?;
    if l < start {
        return Err(Error::OutOfTheoremRange {
            len: l.to_string(),
            min: start.to_string(),
        });
    }
    let mut i = 1;
    loop {
        let ms = c.m_sequence(i + 1)?;
        let (mi, mnext) = (ms[i] as i64, ms[i + 1] as i64);
        let upper = ell(c, mnext)? - ell(c, mnext - 1)?;
        if l <= upper {
            let kappa = c.kappa(ms[i])? as i64;
            let before: BigInt = ell(c, kappa - 1)?;
            let base: BigInt = BigInt::from(2u32) * before + 1 + &l;
            let lm = ell(c, mi)?;
            let value = if l <= &lm + 1 {
                base - lm + ell(c, mi - 1)?
            } else {
                base
            };
            return Ok(value.to_biguint().expect("repetitivity is positive"));
        }
        i += 1;
    }
}

pub fn repetitivity(c: &Coding, len: u64) -> Result<BigUint> {
    repetitivity_formula(c, &BigUint::from(len))
}

/// The two lower bounds at the jump points of level `i >= 1`:
/// `(|p(m_i)| - |p(m_i-1)| + 1, 2(|p(kappa(m_i)-1)| + 1))` and
/// `(|p(m_i)| + 2, 2(|p(kappa(m_i)-1)| + 1) + |p(m_i)| + 1)`.
pub fn jump_lower_bounds(c: &Coding, i: usize) -> Result<[(BigInt, BigInt); 2]> {
    if i == 0 {
        return Err(Error::LevelOutOfRange { level: 0, min: 1 });
    }
    let mi = c.m(i)?;
    let kappa = c.kappa(mi)? as i64;
    let mi = mi as i64;
    let lm = ell(c, mi)?;
    let before: BigInt = ell(c, kappa - 1)?;
    let twice: BigInt = BigInt::from(2u32) * (before + 1);
    Ok([
        (&lm - ell(c, mi - 1)? + 1, twice.clone()),
        (&lm + 2, twice + &lm + 1),
    ])
}

/// Least `L~` such that every factor of length `L~` contains every factor
/// of length `L`.
///
/// For each text `p(k) a p(k)` the minimal window `e(s) - s` starting at
/// `s` that covers all length-`L` factors is found with two pointers; a
/// candidate `L~` works when every start `s <= |text| - L~` has a covering
/// window of length at most `L~`.
pub fn repetitivity_oracle(sub: &Subshift, len: usize) -> Result<usize> {
    if len == 0 {
        return Ok(0);
    }
    let c = sub.coding();
    let words = language(sub, len)?;
    let index: HashMap<&[u8], u32> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w, i as u32))
        .collect();
    let needed = words.len();
    let mut k = crate::language::governing_level(sub, len)?;
    loop {
        let block = sub.block(k)?;
        let texts: Vec<Vec<u8>> = c
            .tail_alphabet(k + 1)?
            .iter()
            .map(|a| {
                let mut t = Vec::with_capacity(2 * block.len() + 1);
                t.extend_from_slice(&block);
                t.push(a.0);
                t.extend_from_slice(&block);
                t
            })
            .collect();
        let prefix_max: Vec<Vec<usize>> = texts
            .par_iter()
            .map(|t| cover_prefix_max(t, len, &index, needed))
            .collect();
        let limit = block.len() + 1;
        for target in len..=limit {
            let ok = texts.iter().zip(&prefix_max).all(|(t, pm)| {
                let last = t.len() - target;
                pm[last] <= target
            });
            if ok {
                return Ok(target);
            }
        }
        k += 1;
    }
}

/// `pm[t] = max_{s <= t} (e(s) - s)`, with `usize::MAX` for starts that
/// never see every factor.
fn cover_prefix_max(
    text: &[u8],
    len: usize,
    index: &HashMap<&[u8], u32>,
    needed: usize,
) -> Vec<usize> {
    let ids: Vec<u32> = text.windows(len).map(|w| index[w]).collect();
    let mut counts = vec![0u32; needed];
    let mut distinct = 0;
    let mut end = 0; // ids[s..end] is the current window
    let mut out = Vec::with_capacity(text.len() + 1);
    let mut running = 0usize;
    for s in 0..=text.len() {
        let span = if s < ids.len() {
            while distinct < needed && end < ids.len() {
                let id = ids[end] as usize;
                if counts[id] == 0 {
                    distinct += 1;
                }
                counts[id] += 1;
                end += 1;
            }
            let span = if distinct == needed {
                end - 1 + len - s
            } else {
                usize::MAX
            };
            let id = ids[s] as usize;
            counts[id] -= 1;
            if counts[id] == 0 {
                distinct -= 1;
            }
            span
        } else {
            usize::MAX
        };
        running = running.max(span);
        out.push(running);
    }
    out
}

/// Direct definition: scan `L~` upward and test every pair of words.
pub fn repetitivity_naive(sub: &Subshift, len: usize) -> Result<usize> {
    let short = language(sub, len)?;
    let mut target = len.max(1);
    loop {
        let long = language(sub, target)?;
        let all = long.iter().all(|w| {
            short
                .iter()
                .all(|u| u.is_empty() || w.windows(u.len()).any(|x| x == u))
        });
        if all {
            return Ok(target);
        }
        target += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepetitivityRecord {
    #[serde(rename = "L")]
    pub len: u64,
    pub formula: Option<String>,
    pub oracle: Option<usize>,
}

/// Records for `1 <= L <= max_len`; the formula column is empty below its range.
pub fn repetitivity_profile(
    sub: &Subshift,
    max_len: u64,
    with_oracle: bool,
) -> Result<Vec<RepetitivityRecord>> {
    (1..=max_len)
        .into_par_iter()
        .map(|len| {
            let formula = match repetitivity(sub.coding(), len) {
                Ok(v) => Some(v.to_string()),
                Err(Error::OutOfTheoremRange { .. }) => None,
                Err(e) => return Err(e),
            };
            let oracle = if with_oracle || formula.is_none() {
                let l = len
                    .to_usize()
                    .ok_or_else(|| Error::Overflow(format!("length {len}")))?;
                Some(repetitivity_oracle(sub, l)?)
            } else {
                None
            };
            Ok(RepetitivityRecord {
                len,
                formula,
                oracle,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    Exact,
    HorizonEstimate,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::Exact => "exact",
            VerdictKind::HorizonEstimate => "horizon-estimate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Satisfied,
    Violated,
    Inconclusive,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Satisfied => "satisfied",
            Decision::Violated => "violated",
            Decision::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Constant,
    Increasing,
    Decreasing,
    Mixed,
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trend::Constant => "constant",
            Trend::Increasing => "increasing",
            Trend::Decreasing => "decreasing",
            Trend::Mixed => "mixed",
        })
    }
}

/// Shape of a finite sample.
pub fn trend(samples: &[f64]) -> Trend {
    let tol = 1e-9;
    let scale = samples.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let steps: Vec<f64> = samples.windows(2).map(|w| w[1] - w[0]).collect();
    if steps.iter().all(|d| d.abs() <= tol * scale) {
        Trend::Constant
    } else if steps.iter().all(|&d| d > 0.0) {
        Trend::Increasing
    } else if steps.iter().all(|&d| d < 0.0) {
        Trend::Decreasing
    } else {
        Trend::Mixed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaVerdict {
    pub alpha: String,
    pub kind: VerdictKind,
    pub verdict: Decision,
    /// `ln(n_0 ... n_{kappa(m_i)-1}) - alpha ln(n_0 ... n_{m_i})` for `i >= 0`.
    pub witness: Vec<f64>,
    /// `kappa(m_i) - m_i`.
    pub gaps: Vec<usize>,
    /// `n_{m_i+1} ... n_{kappa(m_i)-1}` in decimal.
    pub products: Vec<String>,
    /// Eventual period of `(gaps, products, m_{i+1} - m_i)` in `i` (exact verdicts).
    pub period: Option<PeriodJson>,
    pub trend: Trend,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PeriodJson {
    pub start: usize,
    pub period: usize,
}

impl From<Periodicity> for PeriodJson {
    fn from(p: Periodicity) -> Self {
        PeriodJson {
            start: p.start,
            period: p.period,
        }
    }
}

/// Parses `1`, `3/2` or `1.5` into an exact rational.
pub fn parse_alpha(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("bad alpha `{text}`"));
    let value = if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        BigRational::new(n, d)
    } else if let Some((whole, frac)) = text.split_once('.') {
        let digits = format!("{whole}{frac}");
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        BigRational::new(n, BigInt::from(10u32).pow(frac.len() as u32))
    } else {
        BigRational::from_integer(text.parse().map_err(|_| bad())?)
    };
    if value < BigRational::one() {
        return Err(Error::InvalidArgument(format!("alpha {text} is below 1")));
    }
    Ok(value)
}

fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn rational_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Alpha-repetitivity from the sequence `s_{kappa(m_i)} / s_{m_i+1}^alpha`.
///
/// Eventually periodic codings get an exact answer: over one period of the
/// `m`-sequence the log-ratio moves by `(1 - alpha)` times a positive amount,
/// so only `alpha = 1` keeps it bounded. Generator codings only get the
/// sampled witness and its trend.
pub fn alpha_verdict(c: &Coding, alpha: &BigRational, horizon: usize) -> Result<AlphaVerdict> {
    let count = match c.settle_index() {
        // Enough samples to see the m-structure repeat at least twice.
        Some(settle) => horizon.max(3 * settle + 4),
        None => horizon,
    };
    let (pairs, _) = c.m_kappa_pairs(count + 1)?;
    if pairs.len() < 2 {
        return Err(Error::HorizonExceeded {
            index: c.horizon().unwrap_or(0),
            horizon: c.horizon().unwrap_or(0),
        });
    }
    let a = rational_f64(alpha);
    let mut witness = Vec::new();
    let mut gaps = Vec::new();
    let mut products = Vec::new();
    let mut steps = Vec::new();
    let mut log_prefix = vec![0.0f64];
    let log_s = |j: usize, log_prefix: &mut Vec<f64>| -> Result<f64> {
        while log_prefix.len() <= j {
            let n = c.period(log_prefix.len() - 1)? as f64;
            let last = *log_prefix.last().unwrap();
            log_prefix.push(last + n.ln());
        }
        Ok(log_prefix[j])
    };
    for (idx, &(m, kappa)) in pairs.iter().enumerate() {
        witness.push(log_s(kappa, &mut log_prefix)? - a * log_s(m + 1, &mut log_prefix)?);
        gaps.push(kappa - m);
        products.push(c.period_product(m + 1, kappa)?);
        if let Some(&(next, _)) = pairs.get(idx + 1) {
            steps.push(next - m);
        }
    }
    let shown = horizon.min(pairs.len());
    let tr = trend(&witness[1.min(witness.len() - 1)..shown.max(2).min(witness.len())]);
    let alpha_text = rational_string(alpha);
    if c.is_periodic() {
        let keyed: Vec<(usize, BigUint, usize)> = steps
            .iter()
            .enumerate()
            .map(|(i, &s)| (gaps[i], products[i].clone(), s))
            .collect();
        let period = eventual_period(&keyed).ok_or_else(|| {
            Error::InvalidArgument("m-sequence did not settle within the sampled range".into())
        })?;
        let verdict = if alpha == &BigRational::one() {
            Decision::Satisfied
        } else {
            Decision::Violated
        };
        Ok(AlphaVerdict {
            alpha: alpha_text,
            kind: VerdictKind::Exact,
            verdict,
            witness: witness[..shown].to_vec(),
            gaps: gaps[..shown].to_vec(),
            products: products[..shown].iter().map(BigUint::to_string).collect(),
            period: Some(period.into()),
            trend: tr,
            samples: shown,
        })
    } else {
        Ok(AlphaVerdict {
            alpha: alpha_text,
            kind: VerdictKind::HorizonEstimate,
            verdict: Decision::Inconclusive,
            witness: witness[..shown].to_vec(),
            gaps: gaps[..shown].to_vec(),
            products: products[..shown].iter().map(BigUint::to_string).collect(),
            period: None,
            trend: tr,
            samples: shown,
        })
    }
}
