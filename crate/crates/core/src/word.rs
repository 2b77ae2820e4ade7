//! Letters over `{x, y}`, words (optionally ending inside an edge), and free-group reduction.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Base {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "y")]
    Y,
}

impl Base {
    pub fn as_char(self) -> char {
        match self {
            Base::X => 'x',
            Base::Y => 'y',
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// One of `x⁺, x⁻, y⁺, y⁻`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawLetter", into = "RawLetter")]
pub struct Letter {
    pub base: Base,
    exp: i8,
}

#[derive(Serialize, Deserialize)]
struct RawLetter {
    base: Base,
    exp: i8,
}

impl TryFrom<RawLetter> for Letter {
    type Error = Error;

    fn try_from(raw: RawLetter) -> Result<Self> {
        match raw.exp {
            1 | -1 => Ok(Letter::new(raw.base, raw.exp)),
            e => Err(Error::MalformedToken {
                token: format!("exp {e}"),
                offset: 0,
            }),
        }
    }
}

impl From<Letter> for RawLetter {
    fn from(l: Letter) -> Self {
        RawLetter {
            base: l.base,
            exp: l.exp,
        }
    }
}

impl Letter {
    pub const X: Letter = Letter { base: Base::X, exp: 1 };
    pub const X_INV: Letter = Letter { base: Base::X, exp: -1 };
    pub const Y: Letter = Letter { base: Base::Y, exp: 1 };
    pub const Y_INV: Letter = Letter { base: Base::Y, exp: -1 };
    pub const ALL: [Letter; 4] = [Letter::X, Letter::X_INV, Letter::Y, Letter::Y_INV];

    pub fn new(base: Base, exp: i8) -> Letter {
        assert!(exp == 1 || exp == -1, "exponent must be +1 or -1");
        Letter { base, exp }
    }

    pub fn exp(self) -> i8 {
        self.exp
    }

    pub fn inverse(self) -> Letter {
        Letter {
            base: self.base,
            exp: -self.exp,
        }
    }

    pub fn is_inverse_of(self, other: Letter) -> bool {
        self.base == other.base && self.exp == -other.exp
    }

    pub fn as_char(self) -> char {
        match (self.base, self.exp > 0) {
            (Base::X, true) => 'x',
            (Base::X, false) => 'X',
            (Base::Y, true) => 'y',
            (Base::Y, false) => 'Y',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'x' => Some(Letter::X),
            'X' => Some(Letter::X_INV),
            'y' => Some(Letter::Y),
            'Y' => Some(Letter::Y_INV),
            _ => None,
        }
    }

    /// Contribution to the exponent sum.
    pub fn chi(self) -> i64 {
        self.exp as i64
    }

    /// 1 for `y`, 0 for `x`.
    pub fn psi(self) -> u8 {
        (self.base == Base::Y) as u8
    }

    pub fn verbose(self) -> String {
        format!("{}^{}1", self.base, if self.exp > 0 { '+' } else { '-' })
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A finite edge-path word. When `partial` is set, the last letter is pending:
/// the path stops inside that edge.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawWord")]
pub struct Word {
    letters: Vec<Letter>,
    partial: bool,
}

#[derive(Deserialize)]
struct RawWord {
    letters: Vec<Letter>,
    #[serde(default)]
    partial: bool,
}

impl TryFrom<RawWord> for Word {
    type Error = Error;

    fn try_from(raw: RawWord) -> Result<Self> {
        Word::with_partial(raw.letters, raw.partial)
    }
}

impl Word {
    pub fn empty() -> Word {
        Word::default()
    }

    pub fn new(letters: Vec<Letter>) -> Word {
        Word {
            letters,
            partial: false,
        }
    }

    pub fn with_partial(letters: Vec<Letter>, partial: bool) -> Result<Word> {
        if partial && letters.is_empty() {
            return Err(Error::EmptyPartial);
        }
        Ok(Word { letters, partial })
    }

    /// `full` followed by the pending letter `last`.
    pub fn partial_from(full: &[Letter], last: Letter) -> Word {
        let mut letters = full.to_vec();
        letters.push(last);
        Word {
            letters,
            partial: true,
        }
    }

    /// All letters, including a pending one.
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_partial(&self) -> bool {
        self.partial
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Total number of letters, including a pending one.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    /// Letters actually traversed (the pending letter excluded).
    pub fn full_letters(&self) -> &[Letter] {
        if self.partial {
            &self.letters[..self.letters.len() - 1]
        } else {
            &self.letters
        }
    }

    pub fn pending(&self) -> Option<Letter> {
        if self.partial {
            self.letters.last().copied()
        } else {
            None
        }
    }

    /// The same letters with the pending marker removed.
    pub fn to_full(&self) -> Word {
        Word::new(self.letters.clone())
    }

    pub fn without_pending(&self) -> Word {
        Word::new(self.full_letters().to_vec())
    }

    pub fn require_full(&self, op: &'static str) -> Result<()> {
        if self.partial {
            Err(Error::PartialNotAllowed { op })
        } else {
            Ok(())
        }
    }

    pub fn chi(&self) -> i64 {
        chi(&self.letters)
    }

    pub fn psi(&self) -> u8 {
        psi(&self.letters)
    }

    pub fn reduce(&self) -> Word {
        reduce(self)
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|p| !p[0].is_inverse_of(p[1]))
    }

    pub fn invert(&self) -> Result<Word> {
        invert(self)
    }

    /// Concatenation of two full words.
    pub fn concat(&self, other: &Word) -> Result<Word> {
        self.require_full("concat")?;
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word::with_partial(letters, other.partial)
    }

    pub fn format_verbose(&self) -> String {
        let mut parts: Vec<String> = self.letters.iter().map(|l| l.verbose()).collect();
        if self.partial {
            let last = parts.len() - 1;
            parts[last] = format!("/{}", parts[last]);
        }
        parts.join(" ")
    }
}

impl From<Vec<Letter>> for Word {
    fn from(letters: Vec<Letter>) -> Self {
        Word::new(letters)
    }
}

pub fn chi(letters: &[Letter]) -> i64 {
    letters.iter().map(|l| l.chi()).sum()
}

pub fn psi(letters: &[Letter]) -> u8 {
    (letters.iter().filter(|l| l.base == Base::Y).count() % 2) as u8
}

pub fn reduce_letters(letters: &[Letter]) -> Vec<Letter> {
    let mut stack: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        match stack.last() {
            Some(&top) if top.is_inverse_of(l) => {
                stack.pop();
            }
            _ => stack.push(l),
        }
    }
    stack
}

/// Free reduction; a trailing `z/z⁻¹` becomes `/z`.
pub fn reduce(w: &Word) -> Word {
    let mut stack = reduce_letters(w.full_letters());
    match w.pending() {
        None => Word::new(stack),
        Some(p) => match stack.last() {
            Some(&top) if top.is_inverse_of(p) => {
                stack.pop();
                Word::partial_from(&stack, top)
            }
            _ => Word::partial_from(&stack, p),
        },
    }
}

pub fn invert(w: &Word) -> Result<Word> {
    w.require_full("invert")?;
    Ok(Word::new(
        w.letters.iter().rev().map(|l| l.inverse()).collect(),
    ))
}

pub fn parse_word(text: &str) -> Result<Word> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed == "e" || trimmed == "()" {
        return Ok(Word::empty());
    }
    let chars: Vec<(usize, char)> = trimmed.char_indices().collect();
    let mut letters = Vec::new();
    let mut slash_at: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < chars.len() {
        let (offset, c) = chars[i];
        if c.is_whitespace() || c == '.' || c == ',' {
            i += 1;
            continue;
        }
        if c == '/' {
            if slash_at.is_some() {
                return Err(Error::MisplacedSlash { offset });
            }
            slash_at = Some((offset, letters.len()));
            i += 1;
            continue;
        }
        let base = match c {
            'x' | 'X' => Base::X,
            'y' | 'Y' => Base::Y,
            _ => {
                return Err(Error::MalformedToken {
                    token: c.to_string(),
                    offset,
                })
            }
        };
        let mut exp: i8 = if c.is_ascii_uppercase() { -1 } else { 1 };
        i += 1;
        if i < chars.len() && chars[i].1 == '^' {
            // verbose exponent: ^+1, ^-1, ^1, ^{-1}
            let start = i;
            i += 1;
            let mut token = String::new();
            while i < chars.len() && matches!(chars[i].1, '+' | '-' | '1' | '{' | '}') {
                token.push(chars[i].1);
                i += 1;
            }
            let cleaned: String = token.chars().filter(|c| *c != '{' && *c != '}').collect();
            let parsed = match cleaned.as_str() {
                "+1" | "1" => 1,
                "-1" => -1,
                _ => {
                    return Err(Error::MalformedToken {
                        token: format!("{c}^{token}"),
                        offset: chars[start].0,
                    })
                }
            };
            if c.is_ascii_uppercase() {
                return Err(Error::MalformedToken {
                    token: format!("{c}^{token}"),
                    offset,
                });
            }
            exp = parsed;
        }
        letters.push(Letter::new(base, exp));
    }
    match slash_at {
        None => Ok(Word::new(letters)),
        Some((offset, pos)) => {
            if letters.is_empty() || pos + 1 != letters.len() {
                return Err(Error::MisplacedSlash { offset });
            }
            Word::with_partial(letters, true)
        }
    }
}

pub fn format_word(w: &Word) -> String {
    let mut s = String::with_capacity(w.len() + 1);
    for (i, l) in w.letters.iter().enumerate() {
        if w.partial && i + 1 == w.letters.len() {
            s.push('/');
        }
        s.push(l.as_char());
    }
    s
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "e")
        } else {
            write!(f, "{}", format_word(self))
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_word(s)
    }
}

/// Shorthand used heavily in tests: panics on malformed input.
pub fn w(text: &str) -> Word {
    parse_word(text).unwrap_or_else(|e| panic!("bad word {text:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(&w("xX")), Word::empty());
        assert_eq!(reduce(&w("xy/Y")), w("x/y"));
        assert_eq!(reduce(&w("xxYXXYxx")), w("xxYXXYxx"));
        assert_eq!(reduce(&w("xyYX/x")), w("/x"));
        assert_eq!(reduce(&w("x/X")), w("/x"));
    }

    #[test]
    fn chi_psi_examples() {
        assert_eq!(Word::empty().chi(), 0);
        assert_eq!(w("xy").chi(), 2);
        assert_eq!(w("xYYx").chi(), 0);
        assert_eq!(w("yY").psi(), 0);
        assert_eq!(w("XyyX").psi(), 0);
    }

    #[test]
    fn invert_examples() {
        assert_eq!(w("xY").invert().unwrap(), w("yX"));
        assert_eq!(Word::empty().invert().unwrap(), Word::empty());
        assert!(w("x/y").invert().is_err());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(w("xYYx").letters(), &[Letter::X, Letter::Y_INV, Letter::Y_INV, Letter::X]);
        let p = w("xy/Y");
        assert!(p.is_partial());
        assert_eq!(p.pending(), Some(Letter::Y_INV));
        assert_eq!(w(""), Word::empty());
        assert_eq!(w("x^+1 y^-1"), w("xY"));
        assert_eq!(w("x^+1 /y^-1"), w("x/Y"));
        assert!(matches!(parse_word("x/yy"), Err(Error::MisplacedSlash { .. })));
        assert!(matches!(parse_word("/"), Err(Error::MisplacedSlash { .. })));
        assert!(matches!(parse_word("xz"), Err(Error::MalformedToken { offset: 1, .. })));
        assert!(matches!(parse_word("x^2"), Err(Error::MalformedToken { .. })));
    }

    #[test]
    fn format_round_trip() {
        for text in ["", "x", "xYyX", "xy/Y", "/x"] {
            let word = w(text);
            assert_eq!(parse_word(&format_word(&word)).unwrap(), word);
            assert_eq!(parse_word(&word.format_verbose()).unwrap(), word);
        }
    }

    #[test]
    fn json_shape() {
        let json = serde_json::to_string(&w("x/Y")).unwrap();
        assert_eq!(
            json,
            r#"{"letters":[{"base":"x","exp":1},{"base":"y","exp":-1}],"partial":true}"#
        );
        let back: Word = serde_json::from_str(&json).unwrap();
        assert_eq!(back, w("x/Y"));
        assert!(serde_json::from_str::<Word>(r#"{"letters":[],"partial":true}"#).is_err());
        assert!(serde_json::from_str::<Word>(r#"{"letters":[{"base":"x","exp":2}]}"#).is_err());
    }
}
