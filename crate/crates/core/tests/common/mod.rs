//! Seeded random codings shared by the integration tests.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toeplitz_core::grammar::parse_coding;
use toeplitz_core::Coding;

const LETTERS: [&str; 5] = ["a", "b", "c", "d", "e"];

/// One random eventually periodic coding spec: alphabet of 2 to 5 letters,
/// periods in {2, 3, 4}, preperiod of at most 3 entries, tail of 2 to 4.
/// Neighbouring entries (cyclically in the tail, and across the junction)
/// use different letters so that no runs get merged.
pub fn random_spec(rng: &mut ChaCha8Rng) -> String {
    let size = rng.gen_range(2..=5);
    let letters = &LETTERS[..size];
    // Two letters cannot alternate around an odd cycle.
    let tail_len = if size == 2 {
        2 * rng.gen_range(1..=2)
    } else {
        rng.gen_range(2..=4)
    };
    let tail: Vec<&str> = loop {
        let t: Vec<&str> = (0..tail_len)
            .map(|_| *letters.choose(rng).unwrap())
            .collect();
        let cyclic_ok = (0..tail_len).all(|i| t[i] != t[(i + 1) % tail_len]);
        if cyclic_ok {
            break t;
        }
    };
    let pre_len = rng.gen_range(0..=3);
    let mut pre: Vec<&str> = Vec::new();
    for i in 0..pre_len {
        // Build backwards from the tail so each entry differs from its successor.
        let next = if i == 0 { tail[0] } else { pre[0] };
        let choice = loop {
            let l = *letters.choose(rng).unwrap();
            if l != next {
                break l;
            }
        };
        pre.insert(0, choice);
    }
    let entry = |l: &str, rng: &mut ChaCha8Rng| format!("{l}:{}", rng.gen_range(2..=4));
    let pre: Vec<String> = pre.iter().map(|l| entry(l, rng)).collect();
    let tail: Vec<String> = tail.iter().map(|l| entry(l, rng)).collect();
    format!("{} | {}", pre.join(" "), tail.join(" "))
}

pub fn battery(seed: u64, count: usize) -> Vec<(String, Coding)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let spec = random_spec(&mut rng);
            let coding = parse_coding(&spec)
                .and_then(|raw| raw.normalize())
                .unwrap_or_else(|e| panic!("{spec}: {e}"));
            (spec, coding)
        })
        .collect()
}

pub const BATTERY_SEED: u64 = 0x5EED_7031;
pub const BATTERY_SIZE: usize = 60;
