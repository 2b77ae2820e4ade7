//! Dynamic word length: exact weights `|ω_n|`, bounds for the limit norm, and the
//! pseudo-metric `ρ` on certified sequences.

use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::projection::{chain_levels, decompose_letters, project};
use crate::sequences::{cap, complete, equivalence_class, CoherentSequence, Derived};
use crate::word::Word;

/// A word with its weights `ρ_1, …, ρ_{p+1}` around the `p` full letters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightedWord {
    pub level: usize,
    pub word: Word,
    pub weights: Vec<Dyadic>,
}

impl WeightedWord {
    pub fn length(&self) -> Dyadic {
        self.weights.iter().cloned().sum()
    }

    /// `ρ_p + ρ_{p+1}`, the slack of the norm bound.
    pub fn tail(&self) -> Dyadic {
        let k = self.weights.len();
        let mut t = self.weights[k - 1].clone();
        if k >= 2 {
            t = t + &self.weights[k - 2];
        }
        t
    }

    /// `ρ_1 a_1 ρ_2 a_2 …` with weights as fractions.
    pub fn display(&self) -> String {
        let mut out = String::new();
        let letters = self.word.full_letters();
        for (i, wt) in self.weights.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push('(');
            out.push_str(&wt.to_fraction());
            out.push(')');
            if let Some(l) = letters.get(i) {
                out.push(' ');
                out.push(l.as_char());
            }
        }
        out
    }
}

/// Level 1: `(1/2) a_1 (1/4) a_2 … (1/2^p) a_p (1/2^{p+1})`.
pub fn weigh_level1(w: &Word) -> WeightedWord {
    let p = w.full_letters().len();
    WeightedWord {
        level: 1,
        word: w.clone(),
        weights: (1..=p as u32 + 1).map(Dyadic::pow2_inv).collect(),
    }
}

/// Weights of `child` (level `n+1`) from those of its projection `parent` (level `n`).
/// Block `i` of the child spends `ρ_i` by halving; what the block has left after its last
/// letter is added to the first weight of the next block, and the last block's rest is lost.
pub fn weigh_refine(parent: &WeightedWord, child: &Word) -> Result<WeightedWord> {
    let n = parent.level;
    let full = child.full_letters();
    let d = decompose_letters(full, n);
    if project(child, n) != parent.word || d.blocks.len() != parent.weights.len() {
        return Err(Error::NotCoherent {
            level: n,
            expected: parent.word.to_string(),
            got: project(child, n).to_string(),
        });
    }
    let mut weights = Vec::with_capacity(full.len() + 1);
    let mut carry = Dyadic::zero();
    for (i, (block, rho)) in d.blocks.iter().zip(&parent.weights).enumerate() {
        let m = block.len() as u32;
        if i == 0 {
            for j in 1..=m + 1 {
                weights.push(rho.halve(j));
            }
            carry = rho.halve(m + 1);
        } else {
            for j in 1..=m {
                let wt = rho.halve(j);
                weights.push(if j == 1 { wt + &carry } else { wt });
            }
            carry = rho.halve(m);
        }
    }
    Ok(WeightedWord {
        level: n + 1,
        word: child.clone(),
        weights,
    })
}

/// Weights of every level of a coherent prefix.
pub fn weigh_sequence(words: &[Word]) -> Result<Vec<WeightedWord>> {
    let mut out: Vec<WeightedWord> = Vec::with_capacity(words.len());
    for (i, w) in words.iter().enumerate() {
        let ww = match out.last() {
            None => weigh_level1(w),
            Some(prev) => weigh_refine(prev, w).map_err(|_| {
                Error::NotCoherent {
                    level: i,
                    expected: prev.word.to_string(),
                    got: project(w, i).to_string(),
                }
            })?,
        };
        out.push(ww);
    }
    Ok(out)
}

/// Weights of a single level-`n` word, through its chain of projections.
pub fn weigh_word(w: &Word, n: usize) -> Result<WeightedWord> {
    if n == 0 {
        return Err(Error::OutOfRange("levels start at 1".into()));
    }
    let mut chain = chain_levels(w, n, 1);
    chain.truncate(n);
    let mut levels = weigh_sequence(&chain)?;
    Ok(levels.pop().expect("at least one level"))
}

/// A closed interval of dyadic rationals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Interval {
    pub fn point(x: Dyadic) -> Interval {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Dyadic {
        self.hi.clone() - &self.lo
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_f64(&self, x: f64, slack: f64) -> bool {
        self.lo.to_f64() - slack <= x && x <= self.hi.to_f64() + slack
    }

    pub fn midpoint(&self) -> Dyadic {
        (self.lo.clone() + &self.hi).halve(1)
    }

    fn add(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone() + &o.lo,
            hi: self.hi.clone() + &o.hi,
        }
    }

    fn sub(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone() - &o.hi,
            hi: self.hi.clone() - &o.lo,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormBounds {
    pub interval: Interval,
    /// Level the bound was read from.
    pub level: usize,
    /// `|ω_n|` at that level.
    pub length: Dyadic,
}

/// `|ω_N| − ρ_p − ρ_{p+1} ≤ ‖ω‖ ≤ |ω_N|` at the deepest stored level. A sequence that is
/// empty at every level has norm exactly zero.
pub fn norm_bounds(seq: &CoherentSequence) -> Result<NormBounds> {
    norm_bounds_at(seq, seq.depth())
}

pub fn norm_bounds_at(seq: &CoherentSequence, level: usize) -> Result<NormBounds> {
    if level == 0 || level > seq.depth() {
        return Err(Error::OutOfRange(format!(
            "level {level} outside stored depth {}",
            seq.depth()
        )));
    }
    let words = &seq.words()[..level];
    let weighted = weigh_sequence(words)?;
    let top = weighted.last().expect("level >= 1");
    let length = top.length();
    let interval = if words.iter().all(|w| w.is_empty()) {
        Interval::point(Dyadic::zero())
    } else {
        Interval {
            lo: length.clone() - &top.tail(),
            hi: length.clone(),
        }
    };
    Ok(NormBounds {
        interval,
        level,
        length,
    })
}

fn derived_norm(d: &Derived) -> Result<Option<NormBounds>> {
    let level = d.stable_depth();
    if level == 0 {
        return Ok(None);
    }
    norm_bounds_at(&d.sequence, level).map(Some)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoStatus {
    /// The sequences are equivalent, so the distance is exactly zero.
    ExactZero,
    /// The interval is no wider than the requested tolerance.
    Converged,
    /// The stored depth does not pin the distance down to the tolerance.
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RhoResult {
    pub status: RhoStatus,
    pub interval: Option<Interval>,
    /// Level the completions and cap were read at.
    pub level: usize,
}

impl RhoResult {
    pub fn estimate(&self) -> Option<f64> {
        self.interval.as_ref().map(|i| i.midpoint().to_f64())
    }

    pub fn width(&self) -> Option<f64> {
        self.interval.as_ref().map(|i| i.width().to_f64())
    }
}

/// The interval for `‖ā‖ + ‖b̄‖ − 2‖ā ⩀ b̄‖` read at the deepest level where completions and
/// cap are all stable, with no shortcut for equivalent pairs.
pub fn rho_bounds(a: &CoherentSequence, b: &CoherentSequence) -> Result<Option<(Interval, usize)>> {
    let depth = a.depth().min(b.depth());
    combine(&complete(&a.truncate(depth)), &complete(&b.truncate(depth)))
}

fn combine(ca: &Derived, cb: &Derived) -> Result<Option<(Interval, usize)>> {
    let c = cap(&ca.sequence, &cb.sequence);
    let (Some(na), Some(nb), Some(nc)) = (derived_norm(ca)?, derived_norm(cb)?, derived_norm(&c)?)
    else {
        return Ok(None);
    };
    let level = na.level.min(nb.level).min(nc.level);
    let ia = norm_bounds_at(&ca.sequence, level)?.interval;
    let ib = norm_bounds_at(&cb.sequence, level)?.interval;
    let cap_words = &c.sequence.words()[..level];
    let interval = if cap_words == &ca.sequence.words()[..level] {
        ib.sub(&ia)
    } else if cap_words == &cb.sequence.words()[..level] {
        ia.sub(&ib)
    } else {
        let ic = norm_bounds_at(&c.sequence, level)?.interval;
        ia.add(&ib).sub(&ic.add(&ic))
    };
    Ok(Some((
        Interval {
            lo: interval.lo.max(Dyadic::zero()),
            hi: interval.hi,
        },
        level,
    )))
}

/// `ρ(a, b) = ‖ā‖ + ‖b̄‖ − 2‖ā ⩀ b̄‖` on completions, as an interval. Equivalent pairs are
/// reported as exactly zero.
pub fn rho(a: &CoherentSequence, b: &CoherentSequence, tol: f64) -> Result<RhoResult> {
    let depth = a.depth().min(b.depth());
    let (a, b) = (a.truncate(depth), b.truncate(depth));
    let ca = complete(&a);
    let cb = complete(&b);
    if ca.sequence.words() == cb.sequence.words() {
        return Ok(RhoResult {
            status: RhoStatus::ExactZero,
            interval: Some(Interval::point(Dyadic::zero())),
            level: ca.stable_depth().min(cb.stable_depth()),
        });
    }
    if depth >= 3 && equivalence_class(&a).contains(&b) {
        return Ok(RhoResult {
            status: RhoStatus::ExactZero,
            interval: Some(Interval::point(Dyadic::zero())),
            level: depth,
        });
    }
    let Some((interval, level)) = combine(&ca, &cb)? else {
        return Ok(RhoResult {
            status: RhoStatus::Indeterminate,
            interval: None,
            level: 0,
        });
    };
    let status = if interval.width().to_f64() <= tol {
        RhoStatus::Converged
    } else {
        RhoStatus::Indeterminate
    };
    Ok(RhoResult {
        status,
        interval: Some(interval),
        level,
    })
}
