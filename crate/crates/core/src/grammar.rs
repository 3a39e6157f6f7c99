//! Text form of codings: `entries "|" entries` or `entries "|" "@" name ["(" args ")"]`,
//! where `entries` is a whitespace-separated list of `letter:period`.

use crate::coding::{
    CodingEntry, GeneratedTail, GeneratorRule, RawCoding, Tail, DEFAULT_GENERATOR_HORIZON,
};
use crate::error::{Error, Result};
use crate::letters::Alphabet;

/// Parses a coding, materializing generator tails to the default horizon.
pub fn parse_coding(spec: &str) -> Result<RawCoding> {
    parse_coding_with(spec, DEFAULT_GENERATOR_HORIZON)
}

pub fn parse_coding_with(spec: &str, horizon: usize) -> Result<RawCoding> {
    let (pre, tail) = spec
        .split_once('|')
        .ok_or_else(|| Error::Parse("missing `|` between preperiod and tail".into()))?;
    if tail.contains('|') {
        return Err(Error::Parse("more than one `|`".into()));
    }
    let mut alphabet = Alphabet::new();
    let preperiod = parse_entries(pre, &mut alphabet)?;
    let tail = tail.trim();
    let tail = if let Some(generator) = tail.strip_prefix('@') {
        let rule = parse_generator(generator)?;
        Tail::Generator(GeneratedTail::new(rule, horizon, &mut alphabet)?)
    } else {
        let entries = parse_entries(tail, &mut alphabet)?;
        if entries.is_empty() && preperiod.is_empty() {
            return Err(Error::EmptyCoding);
        }
        Tail::Periodic(entries)
    };
    Ok(RawCoding::new(alphabet, preperiod, tail))
}

fn parse_entries(text: &str, alphabet: &mut Alphabet) -> Result<Vec<CodingEntry>> {
    text.split_whitespace()
        .map(|token| {
            let (name, period) = token
                .rsplit_once(':')
                .ok_or_else(|| Error::Parse(format!("entry `{token}` is not `letter:period`")))?;
            if name.is_empty() || name.contains(['@', '(', ')', ',', ':']) {
                return Err(Error::Parse(format!("bad letter name in `{token}`")));
            }
            let period = period
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad period in `{token}`")))?;
            Ok(CodingEntry {
                letter: alphabet.intern(name)?,
                period,
            })
        })
        .collect()
}

/// Parses `name` or `name(arg, ...)` after the `@`.
pub fn parse_generator(text: &str) -> Result<GeneratorRule> {
    let text = text.trim();
    let (name, args) = match text.split_once('(') {
        Some((name, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unclosed argument list in `@{text}`")))?;
            (name.trim(), parse_u64_list(inner)?)
        }
        None => (text, Vec::new()),
    };
    match name {
        "liuqu" => {
            let periods = if args.is_empty() { vec![2] } else { args };
            Ok(GeneratorRule::LiuQu { periods })
        }
        "tower" => match args.as_slice() {
            [base, exponent] if *base >= 2 && *exponent >= 1 => Ok(GeneratorRule::Tower {
                base: *base,
                exponent: u32::try_from(*exponent)
                    .map_err(|_| Error::Parse("tower exponent too large".into()))?,
            }),
            _ => Err(Error::Parse(
                "tower takes (base >= 2, exponent >= 1)".into(),
            )),
        },
        other => Err(Error::UnknownRule(other.to_string())),
    }
}

pub(crate) fn parse_u64_list(text: &str) -> Result<Vec<u64>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("expected an integer, found `{}`", s.trim())))
        })
        .collect()
}
