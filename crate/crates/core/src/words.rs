//! Blocks `p(k)`, prefixes of the one-sided word whose blocks all sit at the
//! origin, and the undetermined-part arithmetic of the approximants.

use std::ops::Deref;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::coding::Coding;
use crate::error::{Error, Result};

/// Default cap on materialized symbols.
pub const DEFAULT_BUDGET: usize = 1 << 24;

/// A coding together with a symbol budget and a memo of the largest block built.
#[derive(Debug)]
pub struct Subshift {
    coding: Coding,
    budget: usize,
    cache: RwLock<Cached>,
}

#[derive(Debug, Clone)]
struct Cached {
    level: usize,
    symbols: Arc<Vec<u8>>,
}

/// The block `p(k)`, sharing storage with longer cached blocks.
#[derive(Debug, Clone)]
pub struct Block {
    pub k: usize,
    data: Arc<Vec<u8>>,
    len: usize,
}

impl Deref for Block {
    type Target = [u8];
    fn deref(&self) -> &[u8] {
        &self.data[..self.len]
    }
}

impl Clone for Subshift {
    fn clone(&self) -> Self {
        Subshift {
            coding: self.coding.clone(),
            budget: self.budget,
            cache: RwLock::new(self.cache.read().unwrap().clone()),
        }
    }
}

impl Subshift {
    pub fn new(coding: Coding) -> Self {
        Self::with_budget(coding, DEFAULT_BUDGET)
    }

    pub fn with_budget(coding: Coding, budget: usize) -> Self {
        let first = coding.entry(0).expect("normalized codings have entry 0");
        let p0 = vec![first.letter.0; (first.period - 1).min(budget as u64) as usize];
        let level0_fits = first.period - 1 <= budget as u64;
        let cached = if level0_fits {
            Cached {
                level: 0,
                symbols: Arc::new(p0),
            }
        } else {
            Cached {
                level: usize::MAX,
                symbols: Arc::new(Vec::new()),
            }
        };
        Subshift {
            coding,
            budget,
            cache: RwLock::new(cached),
        }
    }

    pub fn coding(&self) -> &Coding {
        &self.coding
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// `|p(k)|` when it fits in the budget.
    pub fn block_len_within_budget(&self, k: usize) -> Result<usize> {
        let size = self.coding.block_size(k)?;
        let len = size - 1u32;
        match len.to_usize() {
            Some(n) if n <= self.budget => Ok(n),
            _ => Err(Error::BudgetExceeded {
                requested: len.to_string(),
                budget: self.budget,
            }),
        }
    }

    /// The block `p(k)`.
    pub fn block(&self, k: usize) -> Result<Block> {
        let len = self.block_len_within_budget(k)?;
        {
            let cache = self.cache.read().unwrap();
            if cache.level != usize::MAX && cache.level >= k {
                return Ok(Block {
                    k,
                    data: Arc::clone(&cache.symbols),
                    len,
                });
            }
        }
        let mut cache = self.cache.write().unwrap();
        if cache.level == usize::MAX || cache.level < k {
            let mut level = cache.level;
            let mut symbols: Vec<u8> = cache.symbols.as_ref().clone();
            if level == usize::MAX {
                unreachable!("level 0 exceeds budget but level {k} fits");
            }
            while level < k {
                level += 1;
                let entry = self.coding.entry(level)?;
                let unit = symbols.len() + 1;
                let mut next = Vec::with_capacity(unit * entry.period as usize - 1);
                for _ in 0..entry.period - 1 {
                    next.extend_from_slice(&symbols);
                    next.push(entry.letter.0);
                }
                next.extend_from_slice(&symbols);
                symbols = next;
            }
            *cache = Cached {
                level,
                symbols: Arc::new(symbols),
            };
        }
        Ok(Block {
            k,
            data: Arc::clone(&cache.symbols),
            len,
        })
    }

    /// Least `k` with `|p(k)| + 1 >= target`, scanning cumulative products.
    pub fn level_for(&self, target: &BigUint) -> Result<usize> {
        let mut size = BigUint::from(1u32);
        let mut k = 0;
        loop {
            size *= self.coding.period(k)?;
            if &size >= target {
                return Ok(k);
            }
            k += 1;
        }
    }

    /// The first `len` letters of the one-sided limit word.
    pub fn word_prefix(&self, len: usize) -> Result<Vec<u8>> {
        if len == 0 {
            return Ok(Vec::new());
        }
        if len > self.budget {
            return Err(Error::BudgetExceeded {
                requested: len.to_string(),
                budget: self.budget,
            });
        }
        let k = self.level_for(&BigUint::from(len + 1))?;
        let block = self.block(k)?;
        Ok(block[..len].to_vec())
    }

    /// Renders a letter-id word with the coding's letter names.
    pub fn render(&self, word: &[u8]) -> String {
        self.coding.alphabet().render(word)
    }
}

/// `U_k = modulus * Z + offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndeterminedPart {
    pub modulus: BigUint,
    pub offset: BigUint,
}

/// Undetermined positions of the `k`-th approximant for shifts `r_0, ..., r_k`.
pub fn undetermined_part(coding: &Coding, k: usize, r: &[u64]) -> Result<UndeterminedPart> {
    if r.len() != k + 1 {
        return Err(Error::InvalidArgument(format!(
            "expected {} shifts for level {k}, got {}",
            k + 1,
            r.len()
        )));
    }
    let mut modulus = BigUint::from(1u32);
    let mut offset = BigUint::zero();
    for (j, &rj) in r.iter().enumerate() {
        let n = coding.period(j)?;
        if rj >= n {
            return Err(Error::InvalidShift {
                index: j,
                value: rj,
                period: n,
            });
        }
        offset += &modulus * rj;
        modulus *= n;
    }
    offset %= &modulus;
    Ok(UndeterminedPart { modulus, offset })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_coding;
    use crate::presets::grigorchuk;

    fn subshift(spec: &str) -> Subshift {
        Subshift::new(parse_coding(spec).unwrap().normalize().unwrap())
    }

    #[test]
    fn grigorchuk_blocks() {
        let s = Subshift::new(grigorchuk());
        let text = |k| s.render(&s.block(k).unwrap());
        assert_eq!(text(0), "a");
        assert_eq!(text(1), "axa");
        assert_eq!(text(2), "axayaxa");
        for k in 0..12 {
            assert_eq!(s.block(k).unwrap().len() + 1, 1 << (k + 1));
        }
    }

    #[test]
    fn grigorchuk_prefixes() {
        let s = Subshift::new(grigorchuk());
        assert_eq!(s.render(&s.word_prefix(8).unwrap()), "axayaxaz");
        assert!(s.word_prefix(0).unwrap().is_empty());
        let p16 = s.word_prefix(16).unwrap();
        assert_eq!(s.render(&p16[15..16]), "x");
        assert_eq!(s.render(&p16[..15]), s.render(&s.block(3).unwrap()));
    }

    #[test]
    fn first_block_is_a_power_of_the_first_letter() {
        let s = subshift("b:4 | x:2 y:3");
        assert_eq!(s.render(&s.block(0).unwrap()), "bbb");
        assert_eq!(s.render(&s.block(1).unwrap()), "bbbxbbb");
    }

    #[test]
    fn budget_is_enforced() {
        let s = Subshift::with_budget(grigorchuk(), 100);
        assert!(s.block(5).is_ok());
        assert!(matches!(s.block(6), Err(Error::BudgetExceeded { .. })));
        assert!(matches!(
            s.word_prefix(101),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn undetermined_parts() {
        let c = parse_coding("| x:2 y:2").unwrap().normalize().unwrap();
        let u = undetermined_part(&c, 1, &[0, 0]).unwrap();
        assert_eq!((u.modulus, u.offset), (4u32.into(), 0u32.into()));
        let u = undetermined_part(&c, 1, &[1, 1]).unwrap();
        assert_eq!((u.modulus, u.offset), (4u32.into(), 3u32.into()));

        let c = parse_coding("| x:2 y:3 x:2 y:2")
            .unwrap()
            .normalize()
            .unwrap();
        let u = undetermined_part(&c, 2, &[1, 2, 0]).unwrap();
        assert_eq!((u.modulus, u.offset), (12u32.into(), 5u32.into()));
        assert!(matches!(
            undetermined_part(&c, 1, &[1, 3]),
            Err(Error::InvalidShift { index: 1, .. })
        ));
    }
}
