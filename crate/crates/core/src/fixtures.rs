//! Closed-form word families: the `ℓ` loops, the commutator sequence that fails to
//! stabilize, the shifted sequences `L_i`, the earring substitution, and the nine level-1
//! free generators.

use crate::error::{Error, Result};
use crate::word::{reduce, Letter, Word};

fn power(a: Letter, e: i64) -> Vec<Letter> {
    let l = if e >= 0 { a } else { a.inverse() };
    vec![l; e.unsigned_abs() as usize]
}

/// `ℓ(k) = x^{2^{k-1}} y⁻ x^{2-2^k} y⁻ x^{2^{k-1}}`, a loop at every level `n >= k`.
pub fn ell(k: usize) -> Result<Word> {
    if k == 0 || k > 40 {
        return Err(Error::OutOfRange(format!("ell index {k} must be in 1..=40")));
    }
    let half = 1i64 << (k - 1);
    let mut letters = power(Letter::X, half);
    letters.push(Letter::Y_INV);
    letters.extend(power(Letter::X, 2 - 2 * half));
    letters.push(Letter::Y_INV);
    letters.extend(power(Letter::X, half));
    Ok(Word::new(letters))
}

/// `ℓ(k)` checked against the level it is used at.
pub fn ell_at(k: usize, n: usize) -> Result<Word> {
    if k > n {
        return Err(Error::OutOfRange(format!("ell({k}) is not defined at level {n}")));
    }
    ell(k)
}

/// `[n,k] = ℓ(n) ℓ(k) ℓ(n)⁻¹ ℓ(k)⁻¹`.
pub fn commutator(n: usize, k: usize) -> Result<Word> {
    let a = ell(n)?;
    let b = ell(k)?;
    let mut letters = a.letters().to_vec();
    letters.extend_from_slice(b.letters());
    letters.extend_from_slice(a.invert()?.letters());
    letters.extend_from_slice(b.invert()?.letters());
    Ok(Word::new(letters))
}

/// The level-`n` word `[n,n-1][n,n-2]⋯[n,1]`, empty at level 1.
pub fn he1_word(n: usize) -> Result<Word> {
    if n == 0 {
        return Err(Error::OutOfRange("levels start at 1".into()));
    }
    let mut letters = Vec::new();
    for k in (1..n).rev() {
        letters.extend_from_slice(commutator(n, k)?.letters());
    }
    Ok(Word::new(letters))
}

/// The reduced words `g_n` of the commutator sequence, levels `1..=depth`.
pub fn he1_prefix(depth: usize) -> Result<Vec<Word>> {
    (1..=depth).map(|n| he1_word(n).map(|w| reduce(&w))).collect()
}

/// Level-`n` term of `L_i`: empty below level `i`, then `ℓ(n-i+1)`.
pub fn l_term(i: usize, n: usize) -> Result<Word> {
    if i == 0 || n == 0 {
        return Err(Error::OutOfRange("L_i and levels are indexed from 1".into()));
    }
    if n < i {
        Ok(Word::empty())
    } else {
        ell(n - i + 1)
    }
}

pub fn l_prefix(i: usize, depth: usize) -> Result<Vec<Word>> {
    (1..=depth).map(|n| l_term(i, n)).collect()
}

/// A letter of the earring alphabet: `α_{n,i}` or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Alpha {
    pub i: usize,
    pub inverse: bool,
}

/// The substitution `α_{n,i} ↦ ℓ(n+1-i)` applied to a word over `α_{n,1..=n}`.
pub fn he3_substitute(n: usize, word: &[Alpha]) -> Result<Word> {
    let mut letters = Vec::new();
    for a in word {
        if a.i == 0 || a.i > n {
            return Err(Error::OutOfRange(format!("alpha index {} not in 1..={n}", a.i)));
        }
        let l = ell(n + 1 - a.i)?;
        let l = if a.inverse { l.invert()? } else { l };
        letters.extend_from_slice(l.letters());
    }
    Ok(Word::new(letters))
}

/// Drops every `α_n`: the image of the substitution under one projection step.
pub fn he3_forget_last(n: usize, word: &[Alpha]) -> Vec<Alpha> {
    word.iter().copied().filter(|a| a.i != n).collect()
}

/// The nine free generators of the level-1 loops, named `A1, B1, C1, A2, …, C3`.
pub fn standard_generators() -> [(&'static str, Word); 9] {
    const TABLE: [(&str, &str); 9] = [
        ("A1", "XyyX"),
        ("B1", "YxyX"),
        ("C1", "yXyX"),
        ("A2", "xyyyyX"),
        ("B2", "xyxxyX"),
        ("C2", "xyXXyX"),
        ("A3", "xxxyyX"),
        ("B3", "xxyxyX"),
        ("C3", "xxYXyX"),
    ];
    TABLE.map(|(name, text)| (name, crate::word::w(text)))
}

/// The three generators used at every deeper level, after substitution into `{x, y}`.
pub fn local_generators() -> [Word; 3] {
    let g = standard_generators();
    [g[0].1.clone(), g[1].1.clone(), g[2].1.clone()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_loop;
    use crate::word::w;

    #[test]
    fn ell_words() {
        assert_eq!(ell(1).unwrap(), w("xYYx"));
        assert_eq!(ell(2).unwrap(), w("xxYXXYxx"));
        assert_eq!(ell(3).unwrap().len(), 16);
        assert!(ell(0).is_err());
        assert!(ell_at(3, 2).is_err());
    }

    #[test]
    fn generator_table() {
        let g = standard_generators();
        assert_eq!(g[0].1, w("XyyX"));
        assert_eq!(g[4].1, w("xyxxyX"));
        for (name, word) in &g {
            assert!(is_loop(word, 1).unwrap(), "{name}");
            assert_eq!(word.chi().rem_euclid(4), 0);
            assert_eq!(word.psi(), 0);
        }
    }

    #[test]
    fn l_sequences() {
        let l2 = l_prefix(2, 4).unwrap();
        assert_eq!(l2[0], Word::empty());
        assert_eq!(l2[1], ell(1).unwrap());
        assert_eq!(l2[3], ell(3).unwrap());
    }

    #[test]
    fn he1_words() {
        assert_eq!(he1_word(1).unwrap(), Word::empty());
        let w2 = he1_word(2).unwrap();
        assert_eq!(w2.len(), 2 * (8 + 4));
        let a = [Alpha { i: 1, inverse: false }, Alpha { i: 2, inverse: true }];
        let s = he3_substitute(2, &a).unwrap();
        assert_eq!(s.len(), 8 + 4);
    }
}
