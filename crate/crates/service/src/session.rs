//! One game in progress: the current vertex-moment and the word played to reach it.

use std::time::{SystemTime, UNIX_EPOCH};

use menger_core::graph::{base_vertex, is_loop, Sym};
use menger_core::hanoi::{self, HanoiState};
use menger_core::projection::project_chain;
use menger_core::word::{format_word, parse_word, Letter, Word};
use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::error::ApiError;

pub const MAX_DISKS: usize = 12;

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub id: Uuid,
    pub disks: usize,
    pub state: HanoiState,
    /// The letters played so far, in text form (`""` before the first move).
    #[serde(with = "word_text")]
    pub history: Word,
    pub created_ms: u64,
    pub updated_ms: u64,
}

mod word_text {
    use menger_core::word::{format_word, parse_word, Word};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(w: &Word, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_word(w))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Word, D::Error> {
        let text = String::deserialize(d)?;
        parse_word(&text).map_err(de::Error::custom)
    }
}

/// A legal continuation with what the board shows for it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoveOption {
    pub letter: String,
    /// `x` when the set-down disk shows the same color as the one lifted next, else `y`.
    pub label: String,
    /// `1` forward along the shortest solution, `-1` backward.
    pub progress: i8,
    pub placed: usize,
    pub placed_face: Sym,
    pub picked: usize,
    /// The disk that advances the solution from the board the move passes through.
    pub leading_disk: Option<usize>,
    pub picks_leading: bool,
    pub state: HanoiState,
}

impl Session {
    pub fn new(disks: usize) -> Result<Session, ApiError> {
        if !(1..=MAX_DISKS).contains(&disks) {
            return Err(ApiError::bad_request(
                "OUT_OF_RANGE",
                format!("disks must lie in 1..={MAX_DISKS}, got {disks}"),
            ));
        }
        let t = now_ms();
        Ok(Session {
            id: Uuid::new_v4(),
            disks,
            state: hanoi::vertex_to_state(&base_vertex(disks - 1)),
            history: Word::empty(),
            created_ms: t,
            updated_ms: t,
        })
    }

    /// The graph level whose vertices are this game's states.
    pub fn level(&self) -> usize {
        self.disks - 1
    }

    pub fn options(&self) -> Result<Vec<MoveOption>, ApiError> {
        let stage = self.state.dyadic_stage().map_err(ApiError::internal)?;
        let moves = hanoi::legal_moves(&self.state).map_err(ApiError::internal)?;
        Ok(moves
            .into_iter()
            .map(|m| {
                let board = if m.letter.exp() > 0 {
                    stage.clone()
                } else {
                    stage.step(-1)
                };
                let leading = hanoi::leading_disk(&board);
                MoveOption {
                    letter: m.letter.to_string(),
                    label: m.letter.base.to_string(),
                    progress: m.letter.exp(),
                    placed: m.placed,
                    placed_face: m.placed_face,
                    picked: m.picked,
                    leading_disk: leading,
                    picks_leading: leading == Some(m.picked),
                    state: m.state,
                }
            })
            .collect())
    }

    pub fn apply(&mut self, letter: Letter) -> Result<(), ApiError> {
        self.state = hanoi::apply_move(&self.state, letter).map_err(ApiError::internal)?;
        self.history = self
            .history
            .concat(&Word::new(vec![letter]))
            .map_err(ApiError::internal)?;
        self.updated_ms = now_ms();
        Ok(())
    }

    /// Drops the last letter and restores the state it left.
    pub fn undo(&mut self) -> Result<Letter, ApiError> {
        let letters = self.history.letters();
        let Some((&last, rest)) = letters.split_last() else {
            return Err(ApiError::conflict("NOTHING_TO_UNDO", "no moves to undo".into()));
        };
        let rest = Word::new(rest.to_vec());
        self.state = self.replay(&rest)?;
        self.history = rest;
        self.updated_ms = now_ms();
        Ok(last)
    }

    fn replay(&self, w: &Word) -> Result<HanoiState, ApiError> {
        let base = hanoi::vertex_to_state(&base_vertex(self.level()));
        hanoi::play(&base, w).map_err(ApiError::internal)
    }

    /// Whether playing the history from the starting state reproduces the current state.
    pub fn is_consistent(&self) -> bool {
        matches!(self.replay(&self.history), Ok(s) if s == self.state)
    }

    pub fn word(&self) -> WordView {
        WordView {
            word: format_word(&self.history),
            length: self.history.len(),
            reduced: format_word(&self.history.reduce()),
            level: self.level(),
            is_loop: is_loop(&self.history, self.level()).unwrap_or(false),
        }
    }

    /// The play as seen by an observer who watches only the `to` largest disks.
    pub fn projection(&self, to: usize) -> Result<ProjectionView, ApiError> {
        if !(1..=self.disks).contains(&to) {
            return Err(ApiError::bad_request(
                "OUT_OF_RANGE",
                format!("to must lie in 1..={}, got {to}", self.disks),
            ));
        }
        let w = project_chain(&self.history, self.level(), to - 1, false)
            .map_err(ApiError::internal)?;
        Ok(ProjectionView {
            to,
            level: to - 1,
            word: format_word(&w),
            partial: w.is_partial(),
        })
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            id: self.id,
            disks: self.disks,
            level: self.level(),
            state: self.state.clone(),
            history: format_word(&self.history),
            moves_played: self.history.len(),
            created_ms: self.created_ms,
            updated_ms: self.updated_ms,
        }
    }
}

pub fn parse_letter(text: &str) -> Result<Letter, ApiError> {
    let w = parse_word(text).map_err(|e| ApiError::bad_request("BAD_LETTER", e.to_string()))?;
    match (w.letters(), w.is_partial()) {
        ([a], false) => Ok(*a),
        _ => Err(ApiError::bad_request(
            "BAD_LETTER",
            format!("expected one of x, X, y, Y, got {text:?}"),
        )),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: Uuid,
    pub disks: usize,
    pub level: usize,
    pub state: HanoiState,
    pub history: String,
    pub moves_played: usize,
    pub created_ms: u64,
    pub updated_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordView {
    pub word: String,
    pub length: usize,
    pub reduced: String,
    pub level: usize,
    pub is_loop: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionView {
    pub to: usize,
    pub level: usize,
    pub word: String,
    pub partial: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apply_then_undo_restores() {
        let mut s = Session::new(3).unwrap();
        let start = s.state.clone();
        s.apply(Letter::Y).unwrap();
        assert_ne!(s.state, start);
        assert_eq!(s.undo().unwrap(), Letter::Y);
        assert_eq!(s.state, start);
        assert!(s.undo().is_err());
    }

    #[test]
    fn letters_parse_strictly() {
        assert_eq!(parse_letter("X").unwrap(), Letter::X_INV);
        assert!(parse_letter("xy").is_err());
        assert!(parse_letter("/x").is_err());
        assert!(parse_letter("z").is_err());
    }
}
