//! The combinatorial bonding function: words at level `n+1` projected to level `n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stage::bit_length_of_sum;
use crate::word::{reduce, Base, Letter, Word};

/// All intermediate values of one projection step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockDecomposition {
    /// Target level `n` (the word lives at level `n+1`).
    pub level: usize,
    pub blocks: Vec<Word>,
    /// `ε_i`, exponent of the last letter of block `i`.
    pub eps: Vec<i8>,
    /// `d_i`, starting with `d_1 = 1`.
    pub disks: Vec<usize>,
    /// `ψ` of each block.
    pub psi: Vec<u8>,
    /// `color_i(d_i)`.
    pub colors: Vec<u8>,
    /// `color_i(d_{i+1})` for `i < k`.
    pub next_colors: Vec<u8>,
    /// `color_k(d)` for `d = 1..=n+1`.
    pub final_colors: Vec<u8>,
    pub output: Word,
}

impl BlockDecomposition {
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// One row per block: `i, block, d_i, psi, color, eps, b_i`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,block,d,psi,color,eps,b\n");
        for i in 0..self.blocks.len() {
            let b = self
                .output
                .letters()
                .get(i)
                .map(|l| l.to_string())
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{:+},{}\n",
                i + 1,
                self.blocks[i],
                self.disks[i],
                self.psi[i],
                if self.colors[i] == 0 { 'A' } else { 'B' },
                self.eps[i],
                b
            ));
        }
        out
    }
}

/// Cuts `letters` inside every pair `(a_{2j-1} a_{2j})` with nonzero exponent sum and
/// evaluates the block formulas with stages of `n+1` digits. An odd trailing letter
/// closes the final block.
pub fn decompose_letters(letters: &[Letter], n: usize) -> BlockDecomposition {
    let mut blocks: Vec<Vec<Letter>> = vec![Vec::new()];
    let mut j = 0;
    while j < letters.len() {
        let a = letters[j];
        blocks.last_mut().unwrap().push(a);
        if j + 1 < letters.len() {
            let b = letters[j + 1];
            if a.exp() == b.exp() {
                blocks.push(Vec::new());
            }
            blocks.last_mut().unwrap().push(b);
        }
        j += 2;
    }
    let k = blocks.len();
    let bits = n as u32 + 1;
    let eps: Vec<i8> = blocks
        .iter()
        .map(|b| b.last().map(|l| l.exp()).unwrap_or(0))
        .collect();
    let mut disks = Vec::with_capacity(k);
    let mut sum: i64 = 0;
    for (i, e) in eps.iter().enumerate() {
        disks.push(if i == 0 {
            1
        } else {
            bit_length_of_sum(sum, bits)
        });
        sum += *e as i64;
    }
    let psi: Vec<u8> = blocks.iter().map(|b| crate::word::psi(b)).collect();
    let mut col = vec![0u8; n + 2];
    let mut colors = Vec::with_capacity(k);
    let mut next_colors = Vec::with_capacity(k.saturating_sub(1));
    let mut output = Vec::with_capacity(k.saturating_sub(1));
    for i in 0..k {
        col[disks[i]] ^= psi[i];
        colors.push(col[disks[i]]);
        if i + 1 < k {
            let next = col[disks[i + 1]];
            next_colors.push(next);
            let base = if col[disks[i]] == next { Base::X } else { Base::Y };
            output.push(Letter::new(base, eps[i]));
        }
    }
    BlockDecomposition {
        level: n,
        blocks: blocks.into_iter().map(Word::new).collect(),
        eps,
        disks,
        psi,
        colors,
        next_colors,
        final_colors: col[1..].to_vec(),
        output: Word::new(output),
    }
}

/// Block decomposition of a vertex-to-vertex word at level `n+1`.
pub fn decompose(w: &Word, n: usize) -> Result<BlockDecomposition> {
    w.require_full("decompose")?;
    if w.len() % 2 == 1 {
        return Err(Error::OddLength {
            op: "decompose",
            len: w.len(),
        });
    }
    Ok(decompose_letters(w.letters(), n))
}

fn project_full(letters: &[Letter], n: usize) -> Word {
    if letters.len() % 2 == 0 {
        return decompose_letters(letters, n).output;
    }
    let mut doubled = letters.to_vec();
    doubled.push(*letters.last().unwrap());
    let out = decompose_letters(&doubled, n).output;
    let (last, init) = out.letters().split_last().expect("a doubled letter always cuts");
    Word::partial_from(init, *last)
}

/// Projects a word at level `n+1` to level `n`; total on words ending anywhere.
pub fn project(w: &Word, n: usize) -> Word {
    if !w.is_partial() {
        return project_full(w.letters(), n);
    }
    if w.len() % 2 == 0 {
        project_full(w.full_letters(), n)
    } else {
        project_full(w.letters(), n)
    }
}

pub fn project_reduced(w: &Word, n: usize) -> Word {
    reduce(&project(w, n))
}

/// Projects from level `from` down to level `to`, optionally reducing after each step.
pub fn project_chain(w: &Word, from: usize, to: usize, reduce_each: bool) -> Result<Word> {
    if to > from {
        return Err(Error::LevelMismatch {
            expected: from,
            got: to,
        });
    }
    let mut cur = w.clone();
    for level in (to..from).rev() {
        cur = project(&cur, level);
        if reduce_each {
            cur = reduce(&cur);
        }
    }
    Ok(cur)
}

/// The unreduced projections of `w` at every level `to..=from`, indexed from `to`.
pub fn chain_levels(w: &Word, from: usize, to: usize) -> Vec<Word> {
    let mut out = vec![w.clone()];
    let mut cur = w.clone();
    for level in (to..from).rev() {
        cur = project(&cur, level);
        out.push(cur.clone());
    }
    out.reverse();
    out
}
