//! Interned letters and small letter sets.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ALPHABET: usize = 255;

/// Index of a letter within its coding's alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter(pub u8);

impl Letter {
    pub fn id(self) -> usize {
        self.0 as usize
    }
}

/// Letter names in interning order. Ids are positions in this list.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut alphabet = Self::new();
        for name in names {
            alphabet.intern(name.as_ref())?;
        }
        Ok(alphabet)
    }

    /// Returns the letter for `name`, adding it if unseen.
    pub fn intern(&mut self, name: &str) -> Result<Letter> {
        if let Some(letter) = self.lookup(name) {
            return Ok(letter);
        }
        if self.names.len() >= MAX_ALPHABET {
            return Err(Error::AlphabetTooLarge { max: MAX_ALPHABET });
        }
        self.names.push(name.to_string());
        Ok(Letter((self.names.len() - 1) as u8))
    }

    pub fn lookup(&self, name: &str) -> Option<Letter> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| Letter(i as u8))
    }

    pub fn name(&self, letter: Letter) -> &str {
        &self.names[letter.id()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// True when every name is a single character, so words can be printed unseparated.
    pub fn single_char_names(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }

    /// Renders a word of letter ids with the alphabet's names.
    pub fn render(&self, word: &[u8]) -> String {
        let sep = if self.single_char_names() { "" } else { " " };
        word.iter()
            .map(|&id| self.names[id as usize].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Inverse of [`Alphabet::render`].
    pub fn parse_word(&self, text: &str) -> Result<Vec<u8>> {
        let lookup = |name: &str| {
            self.lookup(name)
                .map(|l| l.0)
                .ok_or_else(|| Error::Parse(format!("unknown letter `{name}`")))
        };
        if self.single_char_names() && !text.contains(char::is_whitespace) {
            text.chars().map(|c| lookup(&c.to_string())).collect()
        } else {
            text.split_whitespace().map(lookup).collect()
        }
    }
}

/// Bit set over the (at most 256) letters of an alphabet.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct LetterSet([u64; 4]);

impl LetterSet {
    pub const fn empty() -> Self {
        LetterSet([0; 4])
    }

    pub fn insert(&mut self, letter: Letter) -> bool {
        let (w, b) = (letter.id() / 64, letter.id() % 64);
        let fresh = self.0[w] & (1 << b) == 0;
        self.0[w] |= 1 << b;
        fresh
    }

    pub fn contains(&self, letter: Letter) -> bool {
        let (w, b) = (letter.id() / 64, letter.id() % 64);
        self.0[w] & (1 << b) != 0
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0 == [0; 4]
    }

    pub fn union(&self, other: &LetterSet) -> LetterSet {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0.iter()) {
            *a |= *b;
        }
        out
    }

    pub fn is_subset(&self, other: &LetterSet) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..256usize).filter_map(move |i| {
            let letter = Letter(i as u8);
            self.contains(letter).then_some(letter)
        })
    }
}

impl FromIterator<Letter> for LetterSet {
    fn from_iter<T: IntoIterator<Item = Letter>>(iter: T) -> Self {
        let mut set = LetterSet::empty();
        for letter in iter {
            set.insert(letter);
        }
        set
    }
}

impl fmt::Debug for LetterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|l| l.0)).finish()
    }
}
