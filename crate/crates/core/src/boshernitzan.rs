//! Boshernitzan condition: product characterization, the three-letter and
//! power-of-two criteria, and empirical minimal cylinder frequencies.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::coding::{eventual_period, Coding};
use crate::error::{Error, Result};
use crate::language::{governing_level, language};
use crate::repetitivity::{trend, Decision, PeriodJson, Trend, VerdictKind};
use crate::words::Subshift;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoshWitness {
    pub index: usize,
    pub m: usize,
    /// `n_{m_i+1} ... n_{kappa(m_i - 1) - 1}`.
    #[serde(serialize_with = "as_decimal")]
    pub product: BigUint,
}

fn as_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Products for `i = 1..=count`, stopping early (flagged) at a generator horizon.
pub fn bosh_products(c: &Coding, count: usize) -> Result<(Vec<BoshWitness>, bool)> {
    let mut out = Vec::with_capacity(count);
    for i in 1..=count {
        let step = c.m(i).and_then(|m| Ok((m, c.kappa(m - 1)?)));
        let (m, kappa) = match step {
            Ok(v) => v,
            Err(e) if e.is_resource_limit() && !c.is_periodic() => return Ok((out, true)),
            Err(e) => return Err(e),
        };
        out.push(BoshWitness {
            index: i,
            m,
            product: c.period_product(m + 1, kappa)?,
        });
    }
    Ok((out, false))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionCheck {
    pub verdict: Decision,
    pub values: Vec<String>,
    pub trend: Trend,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoshVerdict {
    pub kind: VerdictKind,
    pub verdict: Decision,
    pub products: Vec<BoshWitness>,
    pub period: Option<PeriodJson>,
    pub trend: Trend,
    /// Three eventual letters: `liminf n_{m_i+1} < infinity`.
    pub liminf_check: Option<CriterionCheck>,
    /// Power-of-two periods: widths of the windows of the expanded letter
    /// sequence that complete the tail alphabet, one per coding index.
    pub window_check: Option<CriterionCheck>,
    pub horizon_reached: bool,
}

fn log_trend(values: &[BigUint]) -> Trend {
    let logs: Vec<f64> = values
        .iter()
        .map(|v| v.to_f64().unwrap_or(f64::MAX).ln())
        .collect();
    trend(&logs)
}

fn strings(values: &[BigUint]) -> Vec<String> {
    values.iter().map(BigUint::to_string).collect()
}

/// Three-valued verdict for the Boshernitzan condition.
///
/// Eventually periodic codings are always decided (bounded products). For
/// generators only two eventual letters give a proof (empty products past
/// the eventual index); otherwise the sampled products come with a trend.
pub fn bosh_verdict(c: &Coding, horizon: usize) -> Result<BoshVerdict> {
    let sample = match c.settle_index() {
        Some(settle) => horizon.max(3 * settle + 6),
        None => horizon,
    };
    let (witnesses, horizon_reached) = bosh_products(c, sample)?;
    let products: Vec<BigUint> = witnesses.iter().map(|w| w.product.clone()).collect();
    let shown = horizon.min(witnesses.len());
    let ev = c.eventual_alphabet().len();

    let (kind, verdict, period) = if c.is_periodic() {
        let steps: Vec<(BigUint, usize)> = witnesses
            .windows(2)
            .map(|w| (w[0].product.clone(), w[1].m - w[0].m))
            .collect();
        let period = eventual_period(&steps).ok_or_else(|| {
            Error::InvalidArgument("products did not settle within the sampled range".into())
        })?;
        (VerdictKind::Exact, Decision::Satisfied, Some(period.into()))
    } else if ev <= 2 {
        (VerdictKind::Exact, Decision::Satisfied, None)
    } else {
        (VerdictKind::HorizonEstimate, Decision::Inconclusive, None)
    };

    let liminf_check = if ev == 3 {
        let values: Vec<BigUint> = witnesses
            .iter()
            .map(|w| c.period(w.m + 1).map(BigUint::from))
            .take_while(|v| !matches!(v, Err(e) if e.is_resource_limit()))
            .collect::<Result<_>>()?;
        let verdict = if c.is_periodic() {
            Decision::Satisfied
        } else {
            Decision::Inconclusive
        };
        let n = shown.min(values.len());
        Some(CriterionCheck {
            verdict,
            trend: log_trend(&values[..n]),
            values: strings(&values[..n]),
        })
    } else {
        None
    };

    let window_check = power_of_two_windows(c, horizon)?.map(|values| {
        let verdict = if c.is_periodic() || ev <= 2 {
            Decision::Satisfied
        } else {
            Decision::Inconclusive
        };
        let big: Vec<BigUint> = values.iter().map(|&v| BigUint::from(v)).collect();
        CriterionCheck {
            verdict,
            trend: log_trend(&big),
            values: strings(&big),
        }
    });

    Ok(BoshVerdict {
        kind,
        verdict,
        trend: log_trend(&products[..shown]),
        products: witnesses[..shown].to_vec(),
        period,
        liminf_check,
        window_check,
        horizon_reached,
    })
}

/// For codings whose periods are all powers of two: the width of the window
/// of the expanded letter sequence (`a_k` repeated `log2 n_k` times) running
/// from the last copy of `a_k` to the first copy of `a_{kappa(k-1)}`, that is
/// `2 + sum_{j=k+1}^{kappa(k-1)-1} log2 n_j`, for `k = max(N_ev, 1) ..` with
/// `count` entries. Bounded along a subsequence exactly when the product
/// criterion holds. `None` when some period is not a power of two.
pub fn power_of_two_windows(c: &Coding, count: usize) -> Result<Option<Vec<u64>>> {
    let start = c.eventual_index();
    let checked = match c.settle_index() {
        Some(settle) => settle,
        None => start + count,
    };
    match c.powers_of_two(checked) {
        Ok(true) => {}
        Ok(false) => return Ok(None),
        Err(e) if e.is_resource_limit() => {}
        Err(e) => return Err(e),
    }
    let first = start.max(1);
    let mut out = Vec::with_capacity(count);
    for k in first..first + count {
        let step = (|| -> Result<u64> {
            let end = c.kappa(k - 1)?;
            let mut width = 2u64;
            for j in k + 1..end {
                width += u64::from(c.period(j)?.trailing_zeros());
            }
            Ok(width)
        })();
        match step {
            Ok(w) => out.push(w),
            Err(e) if e.is_resource_limit() && !c.is_periodic() => break,
            Err(e) => return Err(e),
        }
    }
    Ok(Some(out))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtaEstimate {
    #[serde(rename = "L")]
    pub len: usize,
    /// Smallest occurrence count over all length-`L` factors.
    pub min_count: u64,
    /// Number of windows in the prefix, `M - L + 1`.
    pub windows: u64,
    #[serde(serialize_with = "rational_str")]
    pub min_frequency: BigRational,
    pub argmin: String,
    #[serde(rename = "M")]
    pub prefix: usize,
}

fn rational_str<S: serde::Serializer>(
    v: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", v.numer(), v.denom()))
}

impl EtaEstimate {
    pub fn frequency(&self) -> f64 {
        self.min_count as f64 / self.windows as f64
    }
}

/// Smallest prefix length accepted by [`estimate_eta`] for this `L`.
pub fn min_eta_prefix(sub: &Subshift, len: usize) -> Result<usize> {
    let k = governing_level(sub, len)?;
    Ok(10 * (sub.block_len_within_budget(k)? + 1))
}

const CHUNK: usize = 1 << 16;

/// Minimal empirical frequency of a length-`len` factor in `word_prefix(prefix)`.
pub fn estimate_eta(sub: &Subshift, len: usize, prefix: usize) -> Result<EtaEstimate> {
    if len == 0 {
        return Ok(EtaEstimate {
            len,
            min_count: 1,
            windows: 1,
            min_frequency: BigRational::from_integer(1.into()),
            argmin: String::new(),
            prefix,
        });
    }
    let needed = min_eta_prefix(sub, len)?;
    if prefix < needed {
        return Err(Error::PrefixTooShort {
            prefix,
            reason: format!("need at least {needed} for length {len}"),
        });
    }
    let words = language(sub, len)?;
    let index: HashMap<&[u8], usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let text = sub.word_prefix(prefix)?;
    let windows = text.len() - len + 1;
    // Chunk c owns the windows starting in [c*CHUNK, (c+1)*CHUNK); it reads
    // len - 1 letters past its end.
    let counts = (0..windows.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let from = chunk * CHUNK;
            let to = (from + CHUNK).min(windows);
            let mut local = vec![0u64; words.len()];
            for w in text[from..to + len - 1].windows(len) {
                local[index[w]] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; words.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let (argmin, &min_count) = counts
        .iter()
        .enumerate()
        .min_by_key(|&(i, c)| (*c, i))
        .expect("language is nonempty");
    if min_count == 0 {
        return Err(Error::PrefixTooShort {
            prefix,
            reason: format!("factor {} does not occur", sub.render(&words.words[argmin])),
        });
    }
    Ok(EtaEstimate {
        len,
        min_count,
        windows: windows as u64,
        min_frequency: BigRational::new(min_count.into(), (windows as u64).into()),
        argmin: sub.render(&words.words[argmin]),
        prefix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_coding;
    use crate::letters::LetterSet;
    use crate::presets::{grigorchuk, preset};

    fn coding(spec: &str) -> Coding {
        parse_coding(spec).unwrap().normalize().unwrap()
    }

    #[test]
    fn grigorchuk_products_are_two() {
        let (w, hit) = bosh_products(&grigorchuk(), 10).unwrap();
        assert!(!hit);
        assert!(w.iter().all(|w| w.product == 2u32.into()));
        let v = bosh_verdict(&grigorchuk(), 10).unwrap();
        assert_eq!(v.verdict, Decision::Satisfied);
        assert_eq!(v.kind, VerdictKind::Exact);
        let lim = v.liminf_check.unwrap();
        assert_eq!(lim.verdict, Decision::Satisfied);
        assert!(lim.values.iter().all(|s| s == "2"));
        assert!(v.window_check.unwrap().values.iter().all(|s| s == "3"));
    }

    /// Scans the expanded sequence from the last copy of `a_k` until the tail
    /// alphabet `A_k` is complete.
    fn window_oracle(c: &Coding, k: usize) -> u64 {
        let target = c.tail_alphabet(k).unwrap();
        let mut seen = LetterSet::default();
        seen.insert(c.letter(k).unwrap());
        let mut width = 1;
        let mut j = k + 1;
        while seen.len() < target.len() {
            seen.insert(c.letter(j).unwrap());
            width += if seen.len() == target.len() {
                1
            } else {
                u64::from(c.period(j).unwrap().trailing_zeros())
            };
            j += 1;
        }
        width
    }

    #[test]
    fn power_of_two_windows_match_a_direct_scan() {
        for spec in [
            "a:2 | x:2 y:2 z:2",
            "a:2 | x:4 y:8 z:2 y:4 x:16",
            "b:4 | x:8 y:2",
            "| x:2 y:4 z:2 w:8",
        ] {
            let c = coding(spec);
            let widths = power_of_two_windows(&c, 12).unwrap().unwrap();
            let first = c.eventual_index().max(1);
            for (i, &w) in widths.iter().enumerate() {
                assert_eq!(w, window_oracle(&c, first + i), "{spec} k={}", first + i);
            }
        }
        let tower = coding("| @tower(2,2)");
        assert!(power_of_two_windows(&tower, 5)
            .unwrap()
            .unwrap()
            .iter()
            .all(|&w| w == 2));
        assert!(power_of_two_windows(&coding("a:2 | x:3 y:2"), 4)
            .unwrap()
            .is_none());
    }

    #[test]
    fn two_letters_give_empty_products() {
        let c = coding("a:3 | x:2 y:3");
        let (w, _) = bosh_products(&c, 6).unwrap();
        assert!(w.iter().skip(1).all(|w| w.product == 1u32.into()));
        assert_eq!(bosh_verdict(&c, 6).unwrap().verdict, Decision::Satisfied);
    }

    #[test]
    fn liu_qu_products_increase() {
        let c = preset("liuqu", None).unwrap();
        let v = bosh_verdict(&c, 8).unwrap();
        assert_eq!(v.verdict, Decision::Inconclusive);
        assert_eq!(v.products.len(), 8);
        assert!(v.products.windows(2).all(|w| w[0].product < w[1].product));
        assert_eq!(v.trend, Trend::Increasing);
    }

    #[test]
    fn eta_grigorchuk_letters() {
        let s = Subshift::new(grigorchuk());
        let e = estimate_eta(&s, 1, 1 << 16).unwrap();
        assert_eq!(e.argmin, "z");
        assert!((e.frequency() - 1.0 / 14.0).abs() < 0.1 / 14.0);
        assert_eq!(estimate_eta(&s, 0, 10).unwrap().frequency(), 1.0);
        assert!(matches!(
            estimate_eta(&s, 4, 20),
            Err(Error::PrefixTooShort { .. })
        ));
    }

    #[test]
    fn eta_chunks_match_serial_count() {
        let s = Subshift::new(grigorchuk());
        let prefix = 3 * CHUNK + 17;
        let e = estimate_eta(&s, 5, prefix).unwrap();
        let text = s.word_prefix(prefix).unwrap();
        let words = language(&s, 5).unwrap();
        let min = words
            .iter()
            .map(|u| text.windows(5).filter(|w| *w == u).count() as u64)
            .min()
            .unwrap();
        assert_eq!(e.min_count, min);
        assert_eq!(e.windows, (prefix - 4) as u64);
    }
}
