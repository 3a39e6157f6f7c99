//! Simple Toeplitz subshifts: blocks, factor languages, complexity,
//! de Bruijn graphs, repetitivity, the Boshernitzan condition and
//! Jacobi cocycles, each with a closed form and a brute-force oracle.

pub mod boshernitzan;
pub mod cli;
pub mod coding;
pub mod complexity;
pub mod debruijn;
pub mod error;
pub mod grammar;
pub mod language;
pub mod letters;
pub mod presets;
pub mod repetitivity;
pub mod spectral;
pub mod words;

pub use coding::{Coding, CodingEntry, RawCoding};
pub use error::{Error, Result};
pub use letters::{Alphabet, Letter, LetterSet};
pub use words::Subshift;
