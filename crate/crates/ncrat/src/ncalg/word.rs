//! Words: the monomial basis of the free algebra.

use std::cmp::Ordering;
use std::fmt;

/// A word in the free semigroup on `x_1, ..., x_g`: a finite sequence of
/// variable indices in `1..=g`. The empty sequence is the empty word.
///
/// Words order by length first, then lexicographically by letter index,
/// which is the canonical ordering used for coefficient maps and for the
/// Fock space basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<usize>,
}

impl Word {
    /// The empty word.
    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    /// Single-letter word `x_j` with a 1-based index.
    pub fn letter(j: usize) -> Self {
        assert!(j >= 1, "variable indices are 1-based");
        Word { letters: vec![j] }
    }

    /// Builds a word from 1-based letters, validating them against `g`.
    pub fn from_letters(letters: &[usize], g: usize) -> Option<Self> {
        if letters.iter().all(|&j| j >= 1 && j <= g) {
            Some(Word { letters: letters.to_vec() })
        } else {
            None
        }
    }

    /// Letters of the word, 1-based.
    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    /// Length `|w|`.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Reverses the letter order: the involution `w -> w^T`.
    pub fn transpose(&self) -> Self {
        let mut letters = self.letters.clone();
        letters.reverse();
        Word { letters }
    }

    /// Concatenation `self * other`.
    pub fn concat(&self, other: &Word) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    /// Largest letter index appearing in the word (0 for the empty word).
    pub fn max_letter(&self) -> usize {
        self.letters.iter().copied().max().unwrap_or(0)
    }

    /// All words of exactly length `len` over `g` letters, in lexicographic
    /// order.
    pub fn all_of_length(g: usize, len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..len {
            let mut next = Vec::with_capacity(out.len() * g);
            for w in &out {
                for j in 1..=g {
                    let mut letters = w.letters.clone();
                    letters.push(j);
                    next.push(Word { letters });
                }
            }
            out = next;
        }
        out
    }

    /// All words of length at most `max_len`, ordered by (length, lex).
    pub fn all_up_to_length(g: usize, max_len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        for len in 0..=max_len {
            out.extend(Word::all_of_length(g, len));
        }
        out
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for &j in &self.letters {
            if !first {
                write!(f, "*")?;
            }
            write!(f, "x{}", j)?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn transpose_reverses() {
        let w = Word::from_letters(&[1, 2, 2], 2).unwrap();
        assert_eq!(w.transpose().letters(), &[2, 2, 1]);
    }

    #[test]
    fn ordering_is_graded() {
        let long = Word::from_letters(&[1, 1], 2).unwrap();
        let short = Word::letter(2);
        assert!(short < long);
        assert!(Word::empty() < short);
    }

    #[test]
    fn rejects_out_of_range_letters() {
        assert!(Word::from_letters(&[1, 3], 2).is_none());
        assert!(Word::from_letters(&[0], 2).is_none());
    }

    #[test]
    fn counts_words() {
        assert_eq!(Word::all_up_to_length(2, 3).len(), 1 + 2 + 4 + 8);
    }

    proptest! {
        #[test]
        fn transpose_is_involutive(letters in proptest::collection::vec(1usize..=3, 0..8)) {
            let w = Word::from_letters(&letters, 3).unwrap();
            prop_assert_eq!(w.transpose().transpose(), w);
        }
    }
}
