//! Coding sequences `(a_k)`, `(n_k)` and the combinatorial data derived from
//! them: tail alphabets, the eventual alphabet, the covering index `kappa`
//! and the sequence `m_i` of positions where `kappa` grows.
//!
//! A coding is either eventually periodic (exact answers) or driven by a
//! named generator that is materialized up to a finite horizon. Generator
//! answers fail with [`Error::HorizonExceeded`] once a scan would need an
//! entry past that horizon.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use crate::error::{Error, Result};
use crate::letters::{Alphabet, Letter, LetterSet};

/// Default number of generated entries materialized for generator tails.
pub const DEFAULT_GENERATOR_HORIZON: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodingEntry {
    pub letter: Letter,
    pub period: u64,
}

/// Named rules producing non-periodic coding tails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorRule {
    /// Letters `(ab) c (ab)^2 d (ab)^3 c (ab)^4 d ...`; periods cycle through
    /// the given list.
    LiuQu { periods: Vec<u64> },
    /// Letters alternate `a b a b ...` with `n_j = base^(exponent^j)`. Only the
    /// entries whose period fits in a `u64` are materialized.
    Tower { base: u64, exponent: u32 },
}

impl GeneratorRule {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorRule::LiuQu { .. } => "liuqu",
            GeneratorRule::Tower { .. } => "tower",
        }
    }

    /// Letters the rule emits, each of them infinitely often.
    pub fn letter_names(&self) -> &'static [&'static str] {
        match self {
            GeneratorRule::LiuQu { .. } => &["a", "b", "c", "d"],
            GeneratorRule::Tower { .. } => &["a", "b"],
        }
    }

    fn args(&self) -> String {
        match self {
            GeneratorRule::LiuQu { periods } => periods
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(","),
            GeneratorRule::Tower { base, exponent } => format!("{base},{exponent}"),
        }
    }

    /// First `count` entries as (index into `letter_names`, period).
    fn generate(&self, count: usize) -> Vec<(usize, u64)> {
        match self {
            GeneratorRule::LiuQu { periods } => {
                let mut out = Vec::with_capacity(count);
                let mut run = 1usize;
                'outer: loop {
                    for _ in 0..run {
                        for letter in [0, 1] {
                            if out.len() == count {
                                break 'outer;
                            }
                            out.push(letter);
                        }
                    }
                    if out.len() == count {
                        break;
                    }
                    out.push(if run % 2 == 1 { 2 } else { 3 });
                    run += 1;
                }
                out.into_iter()
                    .enumerate()
                    .map(|(j, l)| (l, periods[j % periods.len()]))
                    .collect()
            }
            GeneratorRule::Tower { base, exponent } => {
                let mut out = Vec::new();
                let mut power: Option<u32> = Some(1);
                while out.len() < count {
                    let Some(e) = power else { break };
                    let Some(n) = base.checked_pow(e) else { break };
                    out.push((out.len() % 2, n));
                    power = e.checked_mul(*exponent);
                }
                out
            }
        }
    }
}

impl fmt::Display for GeneratorRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}({})", self.name(), self.args())
    }
}

/// A generator tail materialized up to its horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedTail {
    rule: GeneratorRule,
    entries: Vec<CodingEntry>,
    letters: LetterSet,
}

impl GeneratedTail {
    /// Materializes `horizon` entries of `rule`, interning its letters.
    pub fn new(rule: GeneratorRule, horizon: usize, alphabet: &mut Alphabet) -> Result<Self> {
        let ids = rule
            .letter_names()
            .iter()
            .map(|name| alphabet.intern(name))
            .collect::<Result<Vec<_>>>()?;
        if let GeneratorRule::LiuQu { periods } = &rule {
            if periods.is_empty() {
                return Err(Error::InvalidArgument(
                    "liuqu needs at least one period".into(),
                ));
            }
        }
        let entries = rule
            .generate(horizon)
            .into_iter()
            .map(|(l, period)| CodingEntry {
                letter: ids[l],
                period,
            })
            .collect();
        Ok(GeneratedTail {
            rule,
            entries,
            letters: ids.into_iter().collect(),
        })
    }

    pub fn rule(&self) -> &GeneratorRule {
        &self.rule
    }

    pub fn entries(&self) -> &[CodingEntry] {
        &self.entries
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tail {
    Periodic(Vec<CodingEntry>),
    Generator(GeneratedTail),
}

/// Syntactically valid coding data that may still repeat letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawCoding {
    pub alphabet: Alphabet,
    pub preperiod: Vec<CodingEntry>,
    pub tail: Tail,
}

impl RawCoding {
    pub fn new(alphabet: Alphabet, preperiod: Vec<CodingEntry>, tail: Tail) -> Self {
        RawCoding {
            alphabet,
            preperiod,
            tail,
        }
    }

    /// Merges repeated letters by multiplying their periods and rejects
    /// codings whose eventual alphabet is a single letter.
    ///
    /// A periodic tail whose last and first entries share a letter is
    /// rotated: the entries before the wrapping run move into the preperiod
    /// and the tail restarts at that run.
    pub fn normalize(self) -> Result<Coding> {
        let RawCoding {
            alphabet,
            preperiod,
            tail,
        } = self;
        check_periods(&preperiod, 0)?;
        let mut pre = merge_runs(&preperiod);
        let tail = match tail {
            Tail::Periodic(entries) => {
                if entries.is_empty() {
                    if pre.is_empty() {
                        return Err(Error::EmptyCoding);
                    }
                    return Err(Error::Parse("periodic tail is empty".into()));
                }
                check_periods(&entries, preperiod.len())?;
                let first = entries[0].letter;
                if entries.iter().all(|e| e.letter == first) {
                    return Err(Error::AllLettersEqual(alphabet.name(first).to_string()));
                }
                // Start of the run that wraps around the end of the cycle.
                let wrap = if entries[entries.len() - 1].letter == first {
                    let mut j = entries.len() - 1;
                    while entries[j - 1].letter == first {
                        j -= 1;
                    }
                    j
                } else {
                    0
                };
                let mut rotated: Vec<CodingEntry> = entries[wrap..].to_vec();
                rotated.extend_from_slice(&entries[..wrap]);
                pre.extend_from_slice(&entries[..wrap]);
                pre = merge_runs(&pre);
                let mut cycle = merge_runs(&rotated);
                if let Some(last) = pre.last_mut() {
                    if last.letter == cycle[0].letter {
                        // The preperiod runs into the tail: absorb one tail entry.
                        last.period = mul_period(last.period, cycle[0].period)?;
                        cycle.rotate_left(1);
                    }
                }
                Tail::Periodic(cycle)
            }
            Tail::Generator(mut generated) => {
                if generated.entries.is_empty() && pre.is_empty() {
                    return Err(Error::EmptyCoding);
                }
                check_periods(&generated.entries, preperiod.len())?;
                let mut entries = merge_runs(&generated.entries);
                if let (Some(last), Some(first)) = (pre.last_mut(), entries.first()) {
                    if last.letter == first.letter {
                        last.period = mul_period(last.period, first.period)?;
                        entries.remove(0);
                    }
                }
                if generated.letters.len() < 2 {
                    let name = generated
                        .letters
                        .iter()
                        .next()
                        .map(|l| alphabet.name(l).to_string())
                        .unwrap_or_default();
                    return Err(Error::AllLettersEqual(name));
                }
                generated.entries = entries;
                Tail::Generator(generated)
            }
        };
        let coding = Coding {
            alphabet,
            preperiod: pre,
            tail,
        };
        Ok(coding)
    }
}

fn check_periods(entries: &[CodingEntry], offset: usize) -> Result<()> {
    for (i, e) in entries.iter().enumerate() {
        if e.period < 2 {
            return Err(Error::InvalidPeriod {
                index: offset + i,
                period: e.period,
            });
        }
    }
    Ok(())
}

fn mul_period(a: u64, b: u64) -> Result<u64> {
    a.checked_mul(b)
        .ok_or_else(|| Error::Overflow(format!("merged period {a}*{b}")))
}

fn merge_runs(entries: &[CodingEntry]) -> Vec<CodingEntry> {
    let mut out: Vec<CodingEntry> = Vec::with_capacity(entries.len());
    for e in entries {
        match out.last_mut() {
            Some(last) if last.letter == e.letter => {
                // Periods beyond u64 are unrepresentable anyway; saturate.
                last.period = last.period.saturating_mul(e.period);
            }
            _ => out.push(*e),
        }
    }
    out
}

/// A normalized coding: consecutive letters differ and at least two
/// letters recur forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coding {
    alphabet: Alphabet,
    preperiod: Vec<CodingEntry>,
    tail: Tail,
}

impl Coding {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn preperiod(&self) -> &[CodingEntry] {
        &self.preperiod
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.tail, Tail::Periodic(_))
    }

    pub fn to_raw(&self) -> RawCoding {
        RawCoding {
            alphabet: self.alphabet.clone(),
            preperiod: self.preperiod.clone(),
            tail: self.tail.clone(),
        }
    }

    /// Number of entries that can be inspected, `None` for periodic tails.
    pub fn horizon(&self) -> Option<usize> {
        match &self.tail {
            Tail::Periodic(_) => None,
            Tail::Generator(g) => Some(self.preperiod.len() + g.entries.len()),
        }
    }

    /// Length of the periodic cycle, if any.
    pub fn tail_len(&self) -> Option<usize> {
        match &self.tail {
            Tail::Periodic(cycle) => Some(cycle.len()),
            Tail::Generator(_) => None,
        }
    }

    pub fn entry(&self, k: usize) -> Result<CodingEntry> {
        if let Some(e) = self.preperiod.get(k) {
            return Ok(*e);
        }
        let j = k - self.preperiod.len();
        match &self.tail {
            Tail::Periodic(cycle) => Ok(cycle[j % cycle.len()]),
            Tail::Generator(g) => g.entries.get(j).copied().ok_or(Error::HorizonExceeded {
                index: k,
                horizon: self.preperiod.len() + g.entries.len(),
            }),
        }
    }

    pub fn letter(&self, k: usize) -> Result<Letter> {
        Ok(self.entry(k)?.letter)
    }

    pub fn period(&self, k: usize) -> Result<u64> {
        Ok(self.entry(k)?.period)
    }

    /// `A_ev`: the letters occurring infinitely often.
    pub fn eventual_alphabet(&self) -> LetterSet {
        match &self.tail {
            Tail::Periodic(cycle) => cycle.iter().map(|e| e.letter).collect(),
            Tail::Generator(g) => g.letters,
        }
    }

    /// `A_k = {a_j : j >= k}`.
    pub fn tail_alphabet(&self, k: usize) -> Result<LetterSet> {
        if let Some(h) = self.horizon() {
            if k >= h {
                return Err(Error::HorizonExceeded {
                    index: k,
                    horizon: h,
                });
            }
        }
        let from_pre = self
            .preperiod
            .iter()
            .skip(k)
            .map(|e| e.letter)
            .collect::<LetterSet>();
        Ok(from_pre.union(&self.eventual_alphabet()))
    }

    /// `N_ev`: the least index from which the tail alphabet is `A_ev`.
    pub fn eventual_index(&self) -> usize {
        let ev = self.eventual_alphabet();
        let mut suffix = ev;
        let mut n = self.preperiod.len();
        for (k, e) in self.preperiod.iter().enumerate().rev() {
            suffix.insert(e.letter);
            if suffix != ev {
                break;
            }
            n = k;
        }
        n
    }

    /// Indicator `1_{A_k}(letter)`.
    pub fn in_tail_alphabet(&self, k: usize, letter: Letter) -> Result<bool> {
        Ok(self.tail_alphabet(k)?.contains(letter))
    }

    /// `kappa(k) = min { j > k : {a_{k+1}, ..., a_j} = A_{k+1} }`.
    pub fn kappa(&self, k: usize) -> Result<usize> {
        let target = self.tail_alphabet(k + 1)?;
        let mut seen = LetterSet::empty();
        let mut j = k + 1;
        loop {
            seen.insert(self.letter(j)?);
            if seen == target {
                return Ok(j);
            }
            j += 1;
        }
    }

    /// `m_0, ..., m_count`: `m_0 = 0` and `m_{i+1}` is the next index at
    /// which `kappa` strictly increases.
    pub fn m_sequence(&self, count: usize) -> Result<Vec<usize>> {
        let mut ms = vec![0];
        let mut current = self.kappa(0)?;
        let mut k = 0;
        while ms.len() <= count {
            k += 1;
            let next = self.kappa(k)?;
            if next > current {
                ms.push(k);
            }
            current = next;
        }
        Ok(ms)
    }

    pub fn m(&self, i: usize) -> Result<usize> {
        Ok(self.m_sequence(i)?[i])
    }

    /// Up to `count` pairs `(m_i, kappa(m_i))`, stopping early at a generator
    /// horizon. The flag reports whether the horizon cut the list short.
    pub fn m_kappa_pairs(&self, count: usize) -> Result<(Vec<(usize, usize)>, bool)> {
        let horizon_hit = |e: &Error| matches!(e, Error::HorizonExceeded { .. });
        let mut out = Vec::new();
        let mut current = match self.kappa(0) {
            Ok(v) => v,
            Err(e) if horizon_hit(&e) => return Ok((out, true)),
            Err(e) => return Err(e),
        };
        out.push((0, current));
        let mut k = 0;
        while out.len() < count {
            k += 1;
            match self.kappa(k) {
                Ok(next) => {
                    if next > current {
                        out.push((k, next));
                    }
                    current = next;
                }
                Err(e) if horizon_hit(&e) => return Ok((out, true)),
                Err(e) => return Err(e),
            }
        }
        Ok((out, false))
    }

    /// `n_from * ... * n_{to-1}` (empty product is one).
    pub fn period_product(&self, from: usize, to: usize) -> Result<BigUint> {
        let mut acc = BigUint::one();
        for j in from..to {
            acc *= self.period(j)?;
        }
        Ok(acc)
    }

    /// `|p(k)| + 1 = n_0 * ... * n_k`.
    pub fn block_size(&self, k: usize) -> Result<BigUint> {
        self.period_product(0, k + 1)
    }

    /// `|p(k)|` for `k >= -1`, with `|p(-1)| = 0`.
    pub fn block_len(&self, k: i64) -> Result<BigInt> {
        if k < -1 {
            return Err(Error::InvalidArgument(format!("block level {k} below -1")));
        }
        if k == -1 {
            return Ok(BigInt::from(0));
        }
        Ok(BigInt::from(self.block_size(k as usize)?) - 1)
    }

    /// Block lengths `|p(-1)|, |p(0)|, ..., |p(upto)|`; index `j` holds `|p(j-1)|`.
    pub fn block_lens(&self, upto: usize) -> Result<Vec<BigInt>> {
        let mut out = Vec::with_capacity(upto + 2);
        let mut size = BigInt::one();
        out.push(BigInt::from(0));
        for k in 0..=upto {
            size *= self.period(k)?;
            out.push(&size - 1);
        }
        Ok(out)
    }

    /// Entries after which every derived sequence is periodic in the index
    /// (periodic tails only): preperiod plus one cycle.
    pub fn settle_index(&self) -> Option<usize> {
        self.tail_len().map(|t| self.preperiod.len() + t)
    }

    /// True when every period is a power of two.
    pub fn powers_of_two(&self, upto: usize) -> Result<bool> {
        for k in 0..upto {
            if !self.period(k)?.is_power_of_two() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for Coding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let render = |entries: &[CodingEntry]| {
            entries
                .iter()
                .map(|e| format!("{}:{}", self.alphabet.name(e.letter), e.period))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let pre = render(&self.preperiod);
        let tail = match &self.tail {
            Tail::Periodic(cycle) => render(cycle),
            Tail::Generator(g) => g.rule.to_string(),
        };
        match (pre.is_empty(), tail.is_empty()) {
            (true, _) => write!(f, "| {tail}"),
            _ => write!(f, "{pre} | {tail}"),
        }
    }
}

/// Smallest eventual period of a finite sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Periodicity {
    pub start: usize,
    pub period: usize,
}

/// Finds the smallest period `p` (and for it the smallest start `s`) with
/// `seq[i] == seq[i + p]` for all `s <= i < len - p`, requiring at least two
/// full repetitions after `s`.
pub fn eventual_period<T: PartialEq>(seq: &[T]) -> Option<Periodicity> {
    let n = seq.len();
    for period in 1..=n / 2 {
        // Scan backwards for the last mismatch.
        let mut start = n - period;
        while start > 0 && seq[start - 1] == seq[start - 1 + period] {
            start -= 1;
        }
        if n - start >= 2 * period {
            return Some(Periodicity { start, period });
        }
    }
    None
}
