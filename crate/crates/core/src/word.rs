//! Words over a presentation alphabet.
//!
//! A letter is a nonzero `i32`: letter `k+1` is generator `k`, letter
//! `-(k+1)` is its inverse. Words are kept freely reduced at all times.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<i32>,
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    /// Builds a word from raw letters, freely reducing as it goes.
    pub fn from_letters(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut out: Vec<i32> = Vec::new();
        for l in letters {
            assert!(l != 0, "letter 0 is not a generator");
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    pub fn generator(index: usize) -> Self {
        Word { letters: vec![index as i32 + 1] }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| -l).collect() }
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn pow(&self, n: u32) -> Word {
        let mut ls = Vec::with_capacity(self.letters.len() * n as usize);
        for _ in 0..n {
            ls.extend_from_slice(&self.letters);
        }
        Word::from_letters(ls)
    }

    /// `[a, b] = a b a^-1 b^-1`.
    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.concat(b).concat(&a.inverse()).concat(&b.inverse())
    }

    /// `^a b = a b a^-1`.
    pub fn conjugate(a: &Word, b: &Word) -> Word {
        a.concat(b).concat(&a.inverse())
    }

    /// Removes cancelling prefix/suffix pairs; relators are scanned in this form.
    pub fn cyclically_reduced(&self) -> Word {
        let mut ls = self.letters.clone();
        while ls.len() >= 2 && *ls.first().unwrap() == -*ls.last().unwrap() {
            ls.pop();
            ls.remove(0);
        }
        Word { letters: ls }
    }

    /// Largest generator index referenced, if any.
    pub fn max_generator(&self) -> Option<usize> {
        self.letters.iter().map(|l| l.unsigned_abs() as usize - 1).max()
    }

    /// Renders the word using the given generator names and `'` for inverses.
    pub fn display(&self, names: &[String]) -> String {
        if self.letters.is_empty() {
            return "1".to_string();
        }
        let mut out = String::new();
        for &l in &self.letters {
            let idx = l.unsigned_abs() as usize - 1;
            out.push_str(&names[idx]);
            if l < 0 {
                out.push('\'');
            }
        }
        out
    }
}

/// Parses a word in single-letter generator names.
///
/// Grammar: a word is a sequence of items; an item is a letter, a letter
/// followed by `'` (inverse), an uppercase letter (inverse of the lowercase
/// generator), or a parenthesised word; any item may carry `^n` with a
/// possibly negative integer exponent.
pub fn parse_word(src: &str, names: &[String]) -> Result<Word> {
    let gen_of = |c: char| -> Result<usize> {
        names
            .iter()
            .position(|n| n.len() == 1 && n.chars().next() == Some(c))
            .ok_or_else(|| Error::InvalidInput(format!("unknown generator '{c}'")))
    };
    let chars: Vec<char> = src.chars().filter(|c| !c.is_whitespace() && *c != '*' && *c != '.').collect();
    let mut pos = 0usize;

    fn parse_int(chars: &[char], pos: &mut usize) -> Result<i64> {
        let mut s = String::new();
        if *pos < chars.len() && (chars[*pos] == '-' || chars[*pos] == '+') {
            s.push(chars[*pos]);
            *pos += 1;
        }
        while *pos < chars.len() && chars[*pos].is_ascii_digit() {
            s.push(chars[*pos]);
            *pos += 1;
        }
        s.parse::<i64>()
            .map_err(|_| Error::InvalidInput("expected integer exponent after '^'".into()))
    }

    fn parse_seq(
        chars: &[char],
        pos: &mut usize,
        depth: usize,
        gen_of: &dyn Fn(char) -> Result<usize>,
    ) -> Result<Vec<i32>> {
        let mut out: Vec<i32> = Vec::new();
        while *pos < chars.len() {
            let c = chars[*pos];
            let item: Vec<i32> = if c == '(' {
                *pos += 1;
                let inner = parse_seq(chars, pos, depth + 1, gen_of)?;
                if *pos >= chars.len() || chars[*pos] != ')' {
                    return Err(Error::InvalidInput("unbalanced parentheses".into()));
                }
                *pos += 1;
                inner
            } else if c == ')' {
                if depth == 0 {
                    return Err(Error::InvalidInput("unbalanced parentheses".into()));
                }
                break;
            } else if c.is_ascii_alphabetic() {
                *pos += 1;
                let (base, mut invert) = if c.is_ascii_uppercase() {
                    (c.to_ascii_lowercase(), true)
                } else {
                    (c, false)
                };
                if *pos < chars.len() && chars[*pos] == '\'' {
                    *pos += 1;
                    invert = !invert;
                }
                let g = gen_of(base)? as i32 + 1;
                vec![if invert { -g } else { g }]
            } else {
                return Err(Error::InvalidInput(format!("unexpected character '{c}' in word")));
            };
            let mut exp: i64 = 1;
            if *pos < chars.len() && chars[*pos] == '^' {
                *pos += 1;
                exp = parse_int(chars, pos)?;
            }
            let piece: Vec<i32> = if exp >= 0 {
                item.clone()
            } else {
                item.iter().rev().map(|l| -l).collect()
            };
            for _ in 0..exp.unsigned_abs() {
                out.extend_from_slice(&piece);
            }
        }
        Ok(out)
    }

    let letters = parse_seq(&chars, &mut pos, 0, &gen_of)?;
    if pos != chars.len() {
        return Err(Error::InvalidInput("trailing characters in word".into()));
    }
    Ok(Word::from_letters(letters))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(s: &str) -> Vec<String> {
        s.chars().map(|c| c.to_string()).collect()
    }

    #[test]
    fn free_reduction() {
        let w = Word::from_letters([1, -1, 2, 2, -2]);
        assert_eq!(w.letters(), &[2]);
        let w = Word::from_letters([1, 2, -2, -1]);
        assert!(w.is_empty());
    }

    #[test]
    fn inverse_and_concat() {
        let w = Word::from_letters([1, 2, -3]);
        assert_eq!(w.inverse().letters(), &[3, -2, -1]);
        assert!(w.concat(&w.inverse()).is_empty());
    }

    #[test]
    fn cyclic_reduction() {
        let w = Word::from_letters([1, 2, 3, -1]);
        // not freely reducible, but cyclically conjugate to [2, 3]
        assert_eq!(w.cyclically_reduced().letters(), &[2, 3]);
    }

    #[test]
    fn parse_powers_and_inverses() {
        let ns = names("ab");
        assert_eq!(parse_word("a^3", &ns).unwrap().letters(), &[1, 1, 1]);
        assert_eq!(parse_word("(ab)^2", &ns).unwrap().letters(), &[1, 2, 1, 2]);
        assert_eq!(parse_word("aB", &ns).unwrap().letters(), &[1, -2]);
        assert_eq!(parse_word("b'a", &ns).unwrap().letters(), &[-2, 1]);
        assert_eq!(parse_word("a^-2", &ns).unwrap().letters(), &[-1, -1]);
        assert_eq!(parse_word("(ab')^-1", &ns).unwrap().letters(), &[2, -1]);
        assert!(parse_word("c", &ns).is_err());
        assert!(parse_word("(ab", &ns).is_err());
    }

    #[test]
    fn commutator_word() {
        let a = Word::generator(0);
        let b = Word::generator(1);
        assert_eq!(Word::commutator(&a, &b).letters(), &[1, 2, -1, -2]);
        assert_eq!(Word::conjugate(&a, &b).letters(), &[1, 2, -1]);
    }
}
