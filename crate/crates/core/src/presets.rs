//! Named codings.

use crate::coding::{Coding, DEFAULT_GENERATOR_HORIZON};
use crate::error::{Error, Result};
use crate::grammar::{parse_coding_with, parse_u64_list};

pub struct Preset {
    pub name: &'static str,
    pub usage: &'static str,
    pub description: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "grigorchuk",
        usage: "grigorchuk",
        description: "a:2 | x:2 y:2 z:2",
    },
    Preset {
        name: "l-grigorchuk",
        usage: "l-grigorchuk(l1,l2,...)",
        description: "a:2 | x:2^l1 y:2^l2 z:2^l3 ... with the exponents cycled",
    },
    Preset {
        name: "liuqu",
        usage: "liuqu",
        description: "| @liuqu: (ab) c (ab)^2 d (ab)^3 c ... with periods from --periods",
    },
];

/// Expands a preset to its coding spec string.
pub fn preset_spec(preset: &str, periods: Option<&[u64]>) -> Result<String> {
    let preset = preset.trim();
    let (name, args) = match preset.split_once('(') {
        Some((name, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unclosed argument list in `{preset}`")))?;
            (name.trim(), Some(parse_u64_list(inner)?))
        }
        None => (preset, None),
    };
    match (name, args) {
        ("grigorchuk", None) => Ok("a:2 | x:2 y:2 z:2".into()),
        ("l-grigorchuk", Some(ls)) if !ls.is_empty() => {
            if let Some(l) = ls.iter().find(|&&l| l == 0 || l > 63) {
                return Err(Error::InvalidArgument(format!(
                    "l-grigorchuk exponent {l} outside 1..=63"
                )));
            }
            let len = lcm(3, ls.len());
            let tail = (0..len)
                .map(|j| format!("{}:{}", ["x", "y", "z"][j % 3], 1u64 << ls[j % ls.len()]))
                .collect::<Vec<_>>()
                .join(" ");
            Ok(format!("a:2 | {tail}"))
        }
        ("liuqu", None) => {
            let periods = periods.unwrap_or(&[2]);
            let args = periods
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(",");
            Ok(format!("| @liuqu({args})"))
        }
        _ => Err(Error::UnknownRule(preset.to_string())),
    }
}

pub fn preset(preset: &str, periods: Option<&[u64]>) -> Result<Coding> {
    preset_with(preset, periods, DEFAULT_GENERATOR_HORIZON)
}

pub fn preset_with(preset: &str, periods: Option<&[u64]>, horizon: usize) -> Result<Coding> {
    parse_coding_with(&preset_spec(preset, periods)?, horizon)?.normalize()
}

/// The standard Grigorchuk coding.
pub fn grigorchuk() -> Coding {
    preset("grigorchuk", None).expect("grigorchuk preset is valid")
}

fn lcm(a: usize, b: usize) -> usize {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}
