//! The Towers of Hanoi variant whose state graph is `X_n`: `n+1` two-sided disks whose
//! placements stay within the classical shortest solution.

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Sym, Vertex};
use crate::stage::DyadicStage;
use crate::word::{Base, Letter, Word};

/// Disk `i` (1 = largest) at stage `t`: the peg it occupies, for `i = 1..=n+1`.
pub fn peg_positions(t: &DyadicStage) -> Vec<u8> {
    let l = t.level() as usize;
    let mut pegs = Vec::with_capacity(l);
    let mut prev_bit: i64 = 0;
    let mut prev_peg: i64 = 0;
    for i in 1..=l {
        let bit = t.bit(i) as i64;
        let peg = if i == 1 {
            (-bit).rem_euclid(3)
        } else {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            (prev_peg + sign * (bit - prev_bit)).rem_euclid(3)
        };
        pegs.push(peg as u8);
        prev_bit = bit;
        prev_peg = peg;
    }
    pegs
}

/// Inverts [`peg_positions`]; `None` when the placement lies outside the shortest solution.
pub fn stage_of_positions(pegs: &[u8]) -> Option<DyadicStage> {
    if pegs.is_empty() || pegs.iter().any(|&p| p > 2) {
        return None;
    }
    let mut bits = String::with_capacity(pegs.len());
    let mut prev_bit: i64 = 0;
    for i in 1..=pegs.len() {
        let p = pegs[i - 1] as i64;
        let bit = if i == 1 {
            (-p).rem_euclid(3)
        } else {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            (prev_bit + sign * (p - pegs[i - 2] as i64)).rem_euclid(3)
        };
        if bit > 1 {
            return None;
        }
        bits.push(if bit == 1 { '1' } else { '0' });
        prev_bit = bit;
    }
    DyadicStage::from_bits(&bits).ok()
}

/// Cyclic direction in which disk `i` advances the solution: `+1` or `-1` mod 3.
pub fn natural_direction(disk: usize) -> i8 {
    if disk % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Transition {
    pub disk: usize,
    pub from: u8,
    pub to: u8,
}

/// The forward move that produces stage `t` from its predecessor.
pub fn transition_disk(t: &DyadicStage) -> Result<Transition> {
    if t.is_zero() {
        return Err(Error::StageZero);
    }
    let d = t.bit_length();
    let to = peg_positions(t)[d - 1];
    let from = (to as i64 - natural_direction(d) as i64).rem_euclid(3) as u8;
    Ok(Transition { disk: d, from, to })
}

/// The classical shortest solution for `n+1` disks, one transition per nonzero stage.
pub fn shortest_solution(n: usize) -> Vec<Transition> {
    let bits = n as u32 + 1;
    (1..(1u64 << bits))
        .map(|k| transition_disk(&DyadicStage::from_u64(k, bits)).unwrap())
        .collect()
}

/// Whether `disk` has no smaller disk above it.
pub fn is_top(pegs: &[u8], disk: usize) -> bool {
    pegs[disk..].iter().all(|&p| p != pegs[disk - 1])
}

/// The disk moved by the local solution rule at a board stage: the largest disk that
/// can legally move one peg in its natural direction. `None` at the final stage.
pub fn leading_disk(t: &DyadicStage) -> Option<usize> {
    let pegs = peg_positions(t);
    let last = DyadicStage::from_u64((1u64 << t.level()) - 1, t.level());
    if *t == last {
        return None;
    }
    (1..=pegs.len()).find(|&d| {
        if !is_top(&pegs, d) {
            return false;
        }
        let target = (pegs[d - 1] as i64 + natural_direction(d) as i64).rem_euclid(3) as u8;
        // every smaller disk must avoid the target peg
        pegs[d..].iter().all(|&p| p != target)
    })
}

/// Which disk the player holds at a vertex-moment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hand {
    Disk(usize),
    /// Stage 0: the largest disk lifts the whole stack, so no disk is on the board.
    AllOff,
}

impl Hand {
    pub fn disk(self) -> usize {
        match self {
            Hand::Disk(d) => d,
            Hand::AllOff => 1,
        }
    }
}

impl Serialize for Hand {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Hand::Disk(d) => s.serialize_u64(*d as u64),
            Hand::AllOff => s.serialize_str("ALL_OFF"),
        }
    }
}

impl<'de> Deserialize<'de> for Hand {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Hand, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) if n >= 1 => Ok(Hand::Disk(n)),
            Raw::Text(t) if t == "ALL_OFF" => Ok(Hand::AllOff),
            _ => Err(de::Error::custom("hand must be a disk number or \"ALL_OFF\"")),
        }
    }
}

/// The game at a moment when one disk is in the player's hand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HanoiState {
    /// Binary digits of the stage, without the leading dot.
    pub stage: String,
    pub pegs: Vec<u8>,
    /// Upward-facing colors, `_` for the disk in hand.
    pub faces: String,
    pub hand: Hand,
}

impl HanoiState {
    pub fn n_disks(&self) -> usize {
        self.pegs.len()
    }

    pub fn dyadic_stage(&self) -> Result<DyadicStage> {
        DyadicStage::from_bits(&self.stage)
    }

    fn face_syms(&self) -> Result<Vec<Sym>> {
        crate::graph::parse_colors(&self.faces)
            .ok_or_else(|| Error::InvalidState(format!("bad faces {:?}", self.faces)))
    }
}

impl fmt::Display for HanoiState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hand = match self.hand {
            Hand::Disk(d) => format!("disk {d}"),
            Hand::AllOff => "all off".into(),
        };
        write!(f, "stage .{} pegs {:?} faces {} hand {}", self.stage, self.pegs, self.faces, hand)
    }
}

fn state_at(stage: DyadicStage, faces: &[Sym]) -> HanoiState {
    let hand = if stage.is_zero() {
        Hand::AllOff
    } else {
        Hand::Disk(stage.bit_length())
    };
    HanoiState {
        stage: stage.bits(),
        pegs: peg_positions(&stage),
        faces: crate::graph::format_colors(faces),
        hand,
    }
}

pub fn vertex_to_state(v: &Vertex) -> HanoiState {
    state_at(v.stage().clone(), v.colors())
}

pub fn state_to_vertex(s: &HanoiState) -> Result<Vertex> {
    let stage = s.dyadic_stage()?;
    if s.pegs.len() != stage.level() as usize {
        return Err(Error::InvalidState("peg list and stage disagree in length".into()));
    }
    match stage_of_positions(&s.pegs) {
        Some(t) if t == stage => {}
        Some(_) => return Err(Error::InvalidState("pegs do not match the stage".into())),
        None => return Err(Error::NotAllowable),
    }
    let expected_hand = if stage.is_zero() {
        Hand::AllOff
    } else {
        Hand::Disk(stage.bit_length())
    };
    if s.hand != expected_hand {
        return Err(Error::InvalidState("hand does not match the stage".into()));
    }
    Vertex::new(stage, s.face_syms()?)
        .map_err(|e| Error::InvalidState(e.to_string()))
}

/// All disks on the board: the situation along the edge from `v` labeled `a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoardState {
    pub stage: String,
    pub pegs: Vec<u8>,
    pub faces: String,
    /// The two disks that may be lifted next, with the label they determine.
    pub movable: [usize; 2],
    pub label: Base,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Move {
    pub letter: Letter,
    /// Disk placed on the board (1 = largest; disk 1 carries the stack at stage 0).
    pub placed: usize,
    pub placed_face: Sym,
    /// Disk picked up next.
    pub picked: usize,
    pub state: HanoiState,
}

/// The four continuations from a vertex-moment, derived from the game rules: put the held
/// disk down at one of its two permitted spots (forward or backward along the solution)
/// with either face up, then lift the disk that the next stage frees.
pub fn legal_moves(s: &HanoiState) -> Result<Vec<Move>> {
    let stage = s.dyadic_stage()?;
    let faces = s.face_syms()?;
    if faces.len() != stage.level() as usize {
        return Err(Error::InvalidState("faces and stage disagree in length".into()));
    }
    let held = stage.bit_length();
    if faces[held - 1] != Sym::Box {
        return Err(Error::InvalidState("the held disk must show '_'".into()));
    }
    let mut out = Vec::with_capacity(4);
    if faces.len() == 1 {
        // one disk: both directions lead to the other stage, and no second disk
        // exists to compare colors with, so all four letters share one successor
        let next = stage.step(1);
        for a in Letter::ALL {
            out.push(Move {
                letter: a,
                placed: 1,
                placed_face: Sym::A,
                picked: 1,
                state: state_at(next.clone(), &faces),
            });
        }
        return Ok(out);
    }
    for exp in [1i8, -1] {
        // the board stage while all disks rest: the held disk lands at its spot there
        let board = if exp > 0 { stage.clone() } else { stage.step(-1) };
        let next = stage.step(exp);
        let picked = next.bit_length();
        let pegs = peg_positions(&board);
        debug_assert!(is_top(&pegs, held) || held == 1);
        debug_assert!(is_top(&pegs, picked) || picked == 1);
        let picked_face = faces[picked - 1];
        for placed_face in [Sym::A, Sym::B] {
            let base = if placed_face == picked_face {
                Base::X
            } else {
                Base::Y
            };
            let mut new_faces = faces.clone();
            new_faces[held - 1] = placed_face;
            new_faces[picked - 1] = Sym::Box;
            out.push(Move {
                letter: Letter::new(base, exp),
                placed: held,
                placed_face,
                picked,
                state: state_at(next.clone(), &new_faces),
            });
        }
    }
    Ok(out)
}

pub fn apply_move(s: &HanoiState, letter: Letter) -> Result<HanoiState> {
    legal_moves(s)?
        .into_iter()
        .find(|m| m.letter == letter)
        .map(|m| m.state)
        .ok_or_else(|| Error::InvalidState("no move with that letter".into()))
}

pub fn play(s: &HanoiState, w: &Word) -> Result<HanoiState> {
    let mut cur = s.clone();
    for &a in w.full_letters() {
        cur = apply_move(&cur, a)?;
    }
    Ok(cur)
}

/// The board between two adjacent vertex-moments.
pub fn board_between(v: &Vertex, a: Letter) -> BoardState {
    let s = crate::graph::neighbor(v, a);
    let (lower, upper) = if a.exp() > 0 { (v, &s) } else { (&s, v) };
    let faces = crate::graph::edge_colors(lower, upper)
        .unwrap_or_else(|| lower.colors().to_vec());
    BoardState {
        stage: lower.stage().bits(),
        pegs: peg_positions(lower.stage()),
        faces: crate::graph::format_colors(&faces),
        movable: [lower.box_pos(), upper.box_pos()],
        label: a.base,
    }
}

/// Per-disk count of turn-overs while playing `w` from `start`: a disk is turned when it
/// is set down with the other face up than when it was lifted. The disk held at the start
/// is taken to show white.
pub fn flips_along(start: &HanoiState, w: &Word) -> Result<Vec<u32>> {
    let n = start.n_disks();
    let mut flips = vec![0u32; n];
    let mut faces = start.face_syms()?;
    let mut held = start.hand.disk();
    let mut held_face = Sym::A;
    let mut cur = start.clone();
    for &a in w.full_letters() {
        let mv = legal_moves(&cur)?
            .into_iter()
            .find(|m| m.letter == a)
            .expect("four moves always exist");
        if n > 1 {
            if mv.placed_face != held_face {
                flips[held - 1] += 1;
            }
            faces[held - 1] = mv.placed_face;
            held_face = faces[mv.picked - 1];
            faces[mv.picked - 1] = Sym::Box;
            held = mv.picked;
        }
        cur = mv.state;
    }
    Ok(flips)
}
