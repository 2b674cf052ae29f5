//! Operator words over the four dichotomic observables `A₀, A₁, B₀, B₁`.
//!
//! Letters are Hermitian involutions and Alice's letters commute with Bob's,
//! so every product reduces to a canonical word: an alternating A-block
//! followed by an alternating B-block.

use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub party: Party,
    pub setting: u8,
}

impl Letter {
    pub const fn a(setting: u8) -> Self {
        Self {
            party: Party::A,
            setting,
        }
    }

    pub const fn b(setting: u8) -> Self {
        Self {
            party: Party::B,
            setting,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.party {
            Party::A => 'A',
            Party::B => 'B',
        };
        write!(f, "{p}{}", self.setting)
    }
}

/// A canonical word. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Same as [`Word::is_identity`].
    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    fn block(&self, party: Party) -> impl Iterator<Item = u8> + '_ {
        self.letters
            .iter()
            .filter(move |l| l.party == party)
            .map(|l| l.setting)
    }

    pub fn a_len(&self) -> usize {
        self.block(Party::A).count()
    }

    pub fn b_len(&self) -> usize {
        self.len() - self.a_len()
    }

    /// Canonical product `self · other`.
    pub fn mul(&self, other: &Word) -> Word {
        reduce(self.letters.iter().chain(&other.letters).copied())
    }

    /// Basis ordering: shorter words first; among equal lengths, words whose
    /// blocks are more balanced come first (so every `AₓB_y` precedes `A₀A₁`),
    /// then longer A-blocks, then settings lexicographically.
    fn order_key(&self) -> (usize, usize, std::cmp::Reverse<usize>, Vec<u8>, Vec<u8>) {
        let (la, lb) = (self.a_len(), self.b_len());
        (
            self.len(),
            la.max(lb),
            std::cmp::Reverse(la),
            self.block(Party::A).collect(),
            self.block(Party::B).collect(),
        )
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Reduces a raw letter sequence: A letters are moved before B letters
/// (stable within each party) and equal adjacent letters cancel.
pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
    let mut a_block: Vec<Letter> = Vec::new();
    let mut b_block: Vec<Letter> = Vec::new();
    for letter in raw {
        let block = match letter.party {
            Party::A => &mut a_block,
            Party::B => &mut b_block,
        };
        if block.last() == Some(&letter) {
            block.pop();
        } else {
            block.push(letter);
        }
    }
    a_block.extend(b_block);
    Word { letters: a_block }
}

/// Letters are Hermitian, so the adjoint is the reversed word.
pub fn adjoint(w: &Word) -> Word {
    reduce(w.letters.iter().rev().copied())
}

/// Representative of the class `{w, adjoint(w)}` (the smaller of the two).
pub fn class_representative(w: &Word) -> Word {
    let rev = adjoint(w);
    if rev < *w {
        rev
    } else {
        w.clone()
    }
}

/// The two alternating single-party blocks of a given length (one for length 0).
fn alternating_blocks(party: Party, len: usize) -> Vec<Vec<Letter>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    (0..2u8)
        .map(|start| {
            (0..len)
                .map(|i| Letter {
                    party,
                    setting: (start + i as u8) % 2,
                })
                .collect()
        })
        .collect()
}

/// All canonical words with at most `max_len` letters, in basis order.
pub fn words_up_to(max_len: usize) -> Vec<Word> {
    let mut words = Vec::new();
    for total in 0..=max_len {
        for la in 0..=total {
            for a in alternating_blocks(Party::A, la) {
                for b in alternating_blocks(Party::B, total - la) {
                    let mut letters = a.clone();
                    letters.extend(b);
                    words.push(Word { letters });
                }
            }
        }
    }
    words.sort();
    words
}

/// Parses words such as `A0A1B0`; `1` or the empty string is the identity.
/// The result is reduced.
pub fn parse_word(s: &str) -> Option<Word> {
    let s = s.trim();
    if s.is_empty() || s == "1" {
        return Some(Word::identity());
    }
    let bytes = s.as_bytes();
    if bytes.len() % 2 == 1 {
        return None;
    }
    let mut letters = Vec::with_capacity(bytes.len() / 2);
    for pair in bytes.chunks(2) {
        let party = match pair[0] {
            b'A' | b'a' => Party::A,
            b'B' | b'b' => Party::B,
            _ => return None,
        };
        let setting = match pair[1] {
            b'0' => 0,
            b'1' => 1,
            _ => return None,
        };
        letters.push(Letter { party, setting });
    }
    Some(reduce(letters))
}
