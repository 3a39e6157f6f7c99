//! Exact length-`L` factor sets, enumerated from the words `p(k) a p(k)`.

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::letters::{Letter, LetterSet};
use crate::words::Subshift;

/// Factors of one length, sorted lexicographically by letter id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageSet {
    pub length: usize,
    pub words: Vec<Vec<u8>>,
}

impl LanguageSet {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &[u8]) -> bool {
        self.index_of(word).is_some()
    }

    pub fn index_of(&self, word: &[u8]) -> Option<usize> {
        self.words.binary_search_by(|w| w.as_slice().cmp(word)).ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u8]> {
        self.words.iter().map(Vec::as_slice)
    }

    /// All distinct length-`length` windows of `text`.
    pub fn factors_of(text: &[u8], length: usize) -> LanguageSet {
        let mut words: Vec<Vec<u8>> = if length == 0 {
            vec![Vec::new()]
        } else {
            text.windows(length).map(<[u8]>::to_vec).collect()
        };
        words.sort_unstable();
        words.dedup();
        LanguageSet { length, words }
    }

    /// True if every length-`length - 1` factor of every word is in `shorter`.
    pub fn is_factorial_over(&self, shorter: &LanguageSet) -> bool {
        self.length == shorter.length + 1
            && self
                .words
                .iter()
                .all(|w| shorter.contains(&w[1..]) && shorter.contains(&w[..w.len() - 1]))
    }
}

/// The level `k` whose words `p(k) a p(k)` carry every factor of length `len`:
/// the least `k` with `|p(k)| + 1 >= len`.
pub fn governing_level(sub: &Subshift, len: usize) -> Result<usize> {
    sub.level_for(&BigUint::from(len.max(1)))
}

/// The exact set of length-`len` factors.
pub fn language(sub: &Subshift, len: usize) -> Result<LanguageSet> {
    if len == 0 {
        return Ok(LanguageSet {
            length: 0,
            words: vec![Vec::new()],
        });
    }
    let k = governing_level(sub, len)?;
    let block = sub.block(k)?;
    let letters: Vec<Letter> = sub.coding().tail_alphabet(k + 1)?.iter().collect();
    let mut words: Vec<Vec<u8>> = letters
        .par_iter()
        .flat_map_iter(|a| {
            let mut text = Vec::with_capacity(2 * block.len() + 1);
            text.extend_from_slice(&block);
            text.push(a.0);
            text.extend_from_slice(&block);
            let mut local: Vec<Vec<u8>> = text.windows(len).map(<[u8]>::to_vec).collect();
            local.sort_unstable();
            local.dedup();
            local
        })
        .collect();
    words.par_sort_unstable();
    words.dedup();
    Ok(LanguageSet { length: len, words })
}

/// Letters `b` with `u b` a factor.
pub fn right_extensions(sub: &Subshift, u: &[u8]) -> Result<LetterSet> {
    if !language(sub, u.len())?.contains(u) {
        return Err(Error::WordNotInLanguage);
    }
    Ok(right_extensions_in(&language(sub, u.len() + 1)?, u))
}

/// Right extensions of `u` read off a precomputed `language(|u| + 1)`.
pub fn right_extensions_in(longer: &LanguageSet, u: &[u8]) -> LetterSet {
    let start = longer.words.partition_point(|w| &w[..u.len()] < u);
    longer.words[start..]
        .iter()
        .take_while(|w| &w[..u.len()] == u)
        .map(|w| Letter(w[u.len()]))
        .collect()
}

/// Prefix length that provably contains every factor of length `len`:
/// `|p(kappa(k))|` for the governing `k`.
pub fn covering_prefix_len(sub: &Subshift, len: usize) -> Result<usize> {
    let k = governing_level(sub, len)?;
    let kappa = sub.coding().kappa(k)?;
    sub.block_len_within_budget(kappa)
}
