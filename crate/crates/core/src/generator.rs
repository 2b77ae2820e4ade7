//! Random generic elements: a level-1 word over the nine free generators, then level by
//! level the lift of the previous word decorated with local loops and backtracks, with
//! planted stabilization deadlines `K(n)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixtures::{local_generators, standard_generators};
use crate::graph::{base_vertex, edge_colors, is_loop, letter_between, neighbor, Sym, Vertex};
use crate::projection::project_chain;
use crate::sequences::CoherentSequence;
use crate::word::{reduce, reduce_letters, Letter, Word};

/// One letter over a generator alphabet: generator index and whether it is inverted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenLetter {
    pub index: usize,
    pub inverse: bool,
}

/// Inserting `z z⁻¹` at position `p` (1-based; `p = len+1` appends).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Insertion {
    pub position: usize,
    pub letter: Letter,
}

/// Choices made while extending one level.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelChoice {
    /// `W_1..W_k` over `{A1, B1, C1}`.
    pub w: Vec<Vec<GenLetter>>,
    /// Insertion sequence for each reduced block.
    pub insertions: Vec<Vec<Insertion>>,
    /// Whether the deadline forced a redraw with nonempty `W_i`.
    pub redrawn: bool,
}

/// Everything needed to replay a generated element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorChoice {
    pub seed: u64,
    pub g1: Vec<GenLetter>,
    pub g1_insertions: Vec<Insertion>,
    /// Choices for levels `2..=N`.
    pub levels: Vec<LevelChoice>,
    /// `K(1..=N)`.
    pub deadlines: Vec<usize>,
    /// Levels whose deadline could not be met with the allowed sizes.
    #[serde(default)]
    pub missed: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub depth: usize,
    pub max_g1_letters: usize,
    pub max_g1_insertions: usize,
    /// Chance that a `W_i` is nonempty when nothing forces it.
    pub w_probability: f64,
    pub max_w_len: usize,
    /// Optional insertions spread over the blocks of each level.
    pub max_level_insertions: usize,
    /// Mean of `K(n) - n - 1`.
    pub deadline_mean_extra: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            depth: 6,
            max_g1_letters: 8,
            max_g1_insertions: 4,
            w_probability: 0.1,
            max_w_len: 2,
            max_level_insertions: 2,
            deadline_mean_extra: 2.0,
        }
    }
}

fn lift_vertex(v: &Vertex) -> Vertex {
    let mut colors = v.colors().to_vec();
    colors.push(Sym::A);
    Vertex::new(v.stage().refine(1), colors).expect("lift keeps the box")
}

/// The pairs `(u_i, v_i)`: edge `b_i` of the level-`n` path becomes the two halves of its
/// subdivision between the `A` copies of its endpoints.
pub fn lift_pairs(w: &Word, n: usize) -> Result<Vec<(Letter, Letter)>> {
    if n == 0 {
        return Err(Error::AmbiguousLevelZero);
    }
    w.require_full("lift")?;
    let mut out = Vec::with_capacity(w.len());
    let mut v = base_vertex(n);
    for &b in w.letters() {
        let next = neighbor(&v, b);
        let (lower, upper) = if b.exp() > 0 { (&v, &next) } else { (&next, &v) };
        let colors = edge_colors(lower, upper).ok_or_else(|| Error::NotAdjacent {
            a: v.to_string(),
            b: next.to_string(),
        })?;
        let mut mid_colors = colors;
        mid_colors.push(Sym::Box);
        let mid = Vertex::new(lower.stage().refine(1).step(1), mid_colors)?;
        let (from, to) = (lift_vertex(&v), lift_vertex(&next));
        out.push((letter_between(&from, &mid)?, letter_between(&mid, &to)?));
        v = next;
    }
    Ok(out)
}

/// The lift `u_1 v_1 ⋯ u_{k-1} v_{k-1}` of a level-`n` loop.
pub fn lift_loop(w: &Word, n: usize) -> Result<Word> {
    if !is_loop(w, n)? {
        return Err(Error::NotALoop {
            word: w.to_string(),
            level: n,
        });
    }
    Ok(Word::new(
        lift_pairs(w, n)?.into_iter().flat_map(|(u, v)| [u, v]).collect(),
    ))
}

fn substitute(gens: &[Word], word: &[GenLetter]) -> Result<Vec<Letter>> {
    let mut out = Vec::new();
    for g in word {
        let base = gens.get(g.index).ok_or_else(|| {
            Error::ConstraintViolation(format!("generator index {} out of range", g.index))
        })?;
        let w = if g.inverse { base.invert()? } else { base.clone() };
        out.extend_from_slice(w.letters());
    }
    Ok(out)
}

fn is_gen_reduced(word: &[GenLetter]) -> bool {
    word.windows(2)
        .all(|p| !(p[0].index == p[1].index && p[0].inverse != p[1].inverse))
}

fn insert_pair(letters: &mut Vec<Letter>, ins: Insertion) -> Result<()> {
    if ins.position == 0 || ins.position > letters.len() + 1 {
        return Err(Error::ConstraintViolation(format!(
            "insertion position {} outside 1..={}",
            ins.position,
            letters.len() + 1
        )));
    }
    let at = ins.position - 1;
    letters.splice(at..at, [ins.letter, ins.letter.inverse()]);
    Ok(())
}

/// Whether `left · body · right` splits into consecutive pairs of opposite exponent.
fn paired(left: Option<Letter>, body: &[Letter], right: Option<Letter>) -> bool {
    let all: Vec<Letter> = left.into_iter().chain(body.iter().copied()).chain(right).collect();
    all.len() % 2 == 0 && all.chunks(2).all(|p| p[0].exp() != p[1].exp())
}

/// Level 1 from a word over the nine generators and an insertion sequence.
pub fn level_one(g1: &[GenLetter], insertions: &[Insertion]) -> Result<Word> {
    if !is_gen_reduced(g1) {
        return Err(Error::ConstraintViolation(
            "g1 must be reduced over the generator alphabet".into(),
        ));
    }
    let gens: Vec<Word> = standard_generators().into_iter().map(|(_, w)| w).collect();
    let mut letters = reduce_letters(&substitute(&gens, g1)?);
    let r = letters.len();
    for (i, ins) in insertions.iter().enumerate() {
        if ins.position > r + 1 + 2 * i {
            return Err(Error::ConstraintViolation(format!(
                "insertion {} at {} exceeds r+1+2(i-1) = {}",
                i + 1,
                ins.position,
                r + 1 + 2 * i
            )));
        }
        insert_pair(&mut letters, *ins)?;
    }
    Ok(Word::new(letters))
}

/// The reduced blocks `(v_{i-1} W_i u_i)'` and the letters they must pair up with.
struct Blocks {
    reduced: Vec<Vec<Letter>>,
    left: Vec<Option<Letter>>,
    right: Vec<Option<Letter>>,
}

fn blocks(pairs: &[(Letter, Letter)], w: &[Vec<GenLetter>]) -> Result<Blocks> {
    let k = pairs.len() + 1;
    if w.len() != k {
        return Err(Error::ConstraintViolation(format!(
            "expected {k} words W_i, got {}",
            w.len()
        )));
    }
    let gens = local_generators().to_vec();
    let mut out = Blocks {
        reduced: Vec::with_capacity(k),
        left: Vec::with_capacity(k),
        right: Vec::with_capacity(k),
    };
    for i in 0..k {
        if !is_gen_reduced(&w[i]) {
            return Err(Error::ConstraintViolation(format!(
                "W_{} must be reduced over {{A1, B1, C1}}",
                i + 1
            )));
        }
        let v = if i > 0 { Some(pairs[i - 1].1) } else { None };
        let u = pairs.get(i).map(|p| p.0);
        let mut letters: Vec<Letter> = v.into_iter().collect();
        letters.extend(substitute(&gens, &w[i])?);
        letters.extend(u);
        out.reduced.push(reduce_letters(&letters));
        out.left.push(v.map(Letter::inverse));
        out.right.push(u.map(Letter::inverse));
    }
    Ok(out)
}

/// `ω_{n+1}` from the loop `ω_n` and the level's choices.
pub fn extend_level(omega: &Word, n: usize, choice: &LevelChoice) -> Result<Word> {
    let pairs = lift_pairs(omega, n)?;
    if !is_loop(omega, n)? {
        return Err(Error::NotALoop {
            word: omega.to_string(),
            level: n,
        });
    }
    let b = blocks(&pairs, &choice.w)?;
    if choice.insertions.len() != b.reduced.len() {
        return Err(Error::ConstraintViolation(format!(
            "expected {} insertion sequences, got {}",
            b.reduced.len(),
            choice.insertions.len()
        )));
    }
    let mut out = Vec::new();
    for i in 0..b.reduced.len() {
        let mut letters = b.reduced[i].clone();
        if letters.is_empty() && choice.insertions[i].is_empty() {
            return Err(Error::ConstraintViolation(format!(
                "block {} reduces to the empty word and needs an insertion",
                i + 1
            )));
        }
        for ins in &choice.insertions[i] {
            insert_pair(&mut letters, *ins)?;
        }
        if !paired(b.left[i], &letters, b.right[i]) {
            return Err(Error::ConstraintViolation(format!(
                "block {} breaks the opposite-exponent pairing",
                i + 1
            )));
        }
        out.extend(letters);
    }
    Ok(Word::new(out))
}

fn random_gen_word(rng: &mut ChaCha8Rng, count: usize, len: usize) -> Vec<GenLetter> {
    let mut out: Vec<GenLetter> = Vec::with_capacity(len);
    while out.len() < len {
        let g = GenLetter {
            index: rng.gen_range(0..count),
            inverse: rng.gen_bool(0.5),
        };
        if out
            .last()
            .is_some_and(|p| p.index == g.index && p.inverse != g.inverse)
        {
            continue;
        }
        out.push(g);
    }
    out
}

fn random_letter(rng: &mut ChaCha8Rng) -> Letter {
    Letter::ALL[rng.gen_range(0..4)]
}

/// `K(n) = n + 1 + G` with `G` geometric on `0, 1, 2, …`.
fn random_deadline(rng: &mut ChaCha8Rng, n: usize, mean_extra: f64) -> usize {
    let p = 1.0 / (1.0 + mean_extra.max(0.0));
    let mut extra = 0;
    while extra < 64 && !rng.gen_bool(p) {
        extra += 1;
    }
    n + 1 + extra
}

/// A random insertion keeping the block paired with its neighbours, if one exists.
fn random_insertion(
    rng: &mut ChaCha8Rng,
    letters: &[Letter],
    left: Option<Letter>,
    right: Option<Letter>,
) -> Option<Insertion> {
    let mut candidates = Vec::new();
    for position in 1..=letters.len() + 1 {
        for z in Letter::ALL {
            let mut trial = letters.to_vec();
            trial.splice(position - 1..position - 1, [z, z.inverse()]);
            if paired(left, &trial, right) {
                candidates.push(Insertion { position, letter: z });
            }
        }
    }
    if candidates.is_empty() {
        None
    } else {
        Some(candidates[rng.gen_range(0..candidates.len())])
    }
}

fn random_level_choice(
    rng: &mut ChaCha8Rng,
    pairs: &[(Letter, Letter)],
    params: &GeneratorParams,
    forced: bool,
) -> Result<LevelChoice> {
    let k = pairs.len() + 1;
    let mut w = Vec::with_capacity(k);
    for i in 0..k {
        let backtrack = i > 0 && i < k - 1 && pairs[i - 1].1 == pairs[i].0.inverse();
        let len = if forced && backtrack {
            rng.gen_range(1..=params.max_w_len.max(1))
        } else if params.max_w_len > 0 && rng.gen_bool(params.w_probability.clamp(0.0, 1.0)) {
            rng.gen_range(1..=params.max_w_len)
        } else {
            0
        };
        w.push(random_gen_word(rng, 3, len));
    }
    let b = blocks(pairs, &w)?;
    let mut counts: Vec<usize> = b.reduced.iter().map(|r| usize::from(r.is_empty())).collect();
    for _ in 0..rng.gen_range(0..=params.max_level_insertions) {
        counts[rng.gen_range(0..k)] += 1;
    }
    let mut insertions = Vec::with_capacity(k);
    for i in 0..k {
        let mut letters = b.reduced[i].clone();
        let mut seq = Vec::with_capacity(counts[i]);
        for _ in 0..counts[i] {
            match random_insertion(rng, &letters, b.left[i], b.right[i]) {
                Some(ins) => {
                    insert_pair(&mut letters, ins)?;
                    seq.push(ins);
                }
                None => break,
            }
        }
        insertions.push(seq);
    }
    Ok(LevelChoice {
        w,
        insertions,
        redrawn: forced,
    })
}

/// A generated element with its replay record.
#[derive(Clone, Debug)]
pub struct Generated {
    pub sequence: CoherentSequence,
    pub choice: GeneratorChoice,
}

impl Generated {
    pub fn deadline(&self, n: usize) -> usize {
        self.choice.deadlines[n - 1]
    }

    /// The reduced words `g_n`.
    pub fn reduced(&self) -> Vec<Word> {
        self.sequence.words().iter().map(reduce).collect()
    }
}

const REDRAWS: usize = 64;

/// A random element of depth `params.depth`, reproducible from `seed`.
pub fn random_element(seed: u64, params: &GeneratorParams) -> Result<Generated> {
    if params.depth == 0 {
        return Err(Error::OutOfRange("depth must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g1_len = rng.gen_range(0..=params.max_g1_letters);
    let g1 = random_gen_word(&mut rng, 9, g1_len);
    let gens: Vec<Word> = standard_generators().into_iter().map(|(_, w)| w).collect();
    let r = reduce_letters(&substitute(&gens, &g1)?).len();
    let s = rng.gen_range(0..=params.max_g1_insertions);
    let g1_insertions: Vec<Insertion> = (0..s)
        .map(|i| Insertion {
            position: rng.gen_range(1..=r + 1 + 2 * i),
            letter: random_letter(&mut rng),
        })
        .collect();
    let mut words = vec![level_one(&g1, &g1_insertions)?];
    let mut deadlines = vec![random_deadline(&mut rng, 1, params.deadline_mean_extra)];
    let mut levels = Vec::new();
    let mut missed = Vec::new();
    for n in 1..params.depth {
        let omega = &words[n - 1];
        let pairs = lift_pairs(omega, n)?;
        let due: Vec<usize> = (1..=n).filter(|&m| deadlines[m - 1] == n + 1).collect();
        let stabilized = |next: &Word| {
            let g = reduce(next);
            due.iter().all(|&m| {
                project_chain(&g, n + 1, m, false).is_ok_and(|p| p == words[m - 1])
            })
        };
        let mut choice = random_level_choice(&mut rng, &pairs, params, false)?;
        let mut next = extend_level(omega, n, &choice)?;
        let mut attempts = 0;
        while !stabilized(&next) {
            if attempts == REDRAWS || params.max_w_len == 0 {
                missed.extend(due.iter().copied());
                break;
            }
            attempts += 1;
            choice = random_level_choice(&mut rng, &pairs, params, true)?;
            next = extend_level(omega, n, &choice)?;
        }
        words.push(next);
        levels.push(choice);
        deadlines.push(random_deadline(&mut rng, n + 1, params.deadline_mean_extra));
    }
    let sequence = CoherentSequence::certified(words, format!("generator seed={seed}"));
    Ok(Generated {
        sequence,
        choice: GeneratorChoice {
            seed,
            g1,
            g1_insertions,
            levels,
            deadlines,
            missed,
        },
    })
}

/// Rebuilds the words from a replay record.
pub fn replay(choice: &GeneratorChoice) -> Result<Vec<Word>> {
    let mut words = vec![level_one(&choice.g1, &choice.g1_insertions)?];
    for (i, c) in choice.levels.iter().enumerate() {
        let next = extend_level(&words[i], i + 1, c)?;
        words.push(next);
    }
    Ok(words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::{decompose, project};
    use crate::word::w;

    #[test]
    fn lift_projects_back() {
        for (word, n) in [("xYYx", 1), ("xYYx", 2), ("XyyX", 1), ("", 3)] {
            let l = lift_loop(&w(word), n).unwrap();
            assert_eq!(project(&l, n), w(word));
            assert!(is_loop(&l, n + 1).unwrap());
        }
    }

    #[test]
    fn lift_matches_block_recipe() {
        let b = w("xxYXXYxx");
        let pairs = lift_pairs(&b, 2).unwrap();
        let lift = lift_loop(&b, 2).unwrap();
        let d = decompose(&lift, 2).unwrap();
        for (i, (u, v)) in pairs.iter().enumerate() {
            assert_eq!(u.chi(), b.letters()[i].chi());
            assert_eq!(v.chi(), b.letters()[i].chi());
            assert_eq!(v.psi(), d.next_colors[i]);
        }
    }

    #[test]
    fn non_loop_rejected() {
        assert!(matches!(lift_loop(&w("xy"), 1), Err(Error::NotALoop { .. })));
    }

    #[test]
    fn empty_choices_give_the_lift() {
        let omega = w("xYYx");
        let k = omega.len() + 1;
        let c = LevelChoice {
            w: vec![Vec::new(); k],
            insertions: vec![Vec::new(); k],
            redrawn: false,
        };
        assert_eq!(extend_level(&omega, 1, &c).unwrap(), lift_loop(&omega, 1).unwrap());
    }

    #[test]
    fn empty_block_needs_insertion() {
        let c = LevelChoice {
            w: vec![Vec::new()],
            insertions: vec![Vec::new()],
            redrawn: false,
        };
        assert!(matches!(
            extend_level(&Word::empty(), 1, &c),
            Err(Error::ConstraintViolation(_))
        ));
    }

    #[test]
    fn bad_level_one_position() {
        let ins = [Insertion {
            position: 2,
            letter: Letter::X,
        }];
        assert!(level_one(&[], &ins).is_err());
        assert_eq!(
            level_one(&[], &[Insertion { position: 1, letter: Letter::Y }]).unwrap(),
            w("yY")
        );
    }

    #[test]
    fn deterministic_and_replayable() {
        let p = GeneratorParams::default();
        let a = random_element(7, &p).unwrap();
        let b = random_element(7, &p).unwrap();
        assert_eq!(a.sequence, b.sequence);
        assert_eq!(replay(&a.choice).unwrap(), a.sequence.words());
    }
}
