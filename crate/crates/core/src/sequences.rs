//! Coherent word sequences `(ω_1, …, ω_N)`: finite prefixes of points of the inverse limit,
//! with stabilization certificates, the group operation, equivalence, completion and the
//! stable initial match.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::is_loop;
use crate::projection::{chain_levels, project, project_reduced};
use crate::word::{reduce, Letter, Word};

/// Number of deepest levels that must agree before a tail property is accepted.
pub const TAIL_WINDOW: usize = 3;

/// A prefix `ω_1..ω_N` with `project(ω_{n+1}) = ω_n` expected at every stored level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoherentSequence {
    words: Vec<Word>,
    certificates: BTreeMap<usize, usize>,
    pub provenance: String,
}

impl CoherentSequence {
    /// Stores the words without computing certificates.
    pub fn new(words: Vec<Word>, provenance: impl Into<String>) -> CoherentSequence {
        CoherentSequence {
            words,
            certificates: BTreeMap::new(),
            provenance: provenance.into(),
        }
    }

    /// Stores the words and certifies every level that has a witness.
    pub fn certified(words: Vec<Word>, provenance: impl Into<String>) -> CoherentSequence {
        let mut s = CoherentSequence::new(words, provenance);
        s.certificates = find_certificates(&s.words);
        s
    }

    pub fn empty(depth: usize) -> CoherentSequence {
        CoherentSequence::certified(vec![Word::empty(); depth], "empty")
    }

    pub fn depth(&self) -> usize {
        self.words.len()
    }

    /// `ω_n`, levels counted from 1.
    pub fn word(&self, n: usize) -> &Word {
        &self.words[n - 1]
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn certificates(&self) -> &BTreeMap<usize, usize> {
        &self.certificates
    }

    pub fn certificate(&self, n: usize) -> Option<usize> {
        self.certificates.get(&n).copied()
    }

    pub fn set_certificates(&mut self, c: BTreeMap<usize, usize>) {
        self.certificates = c;
    }

    pub fn uncertified_levels(&self) -> Vec<usize> {
        (1..=self.depth())
            .filter(|n| !self.certificates.contains_key(n))
            .collect()
    }

    /// The first `depth` levels; certificates pointing deeper are dropped.
    pub fn truncate(&self, depth: usize) -> CoherentSequence {
        let depth = depth.min(self.depth());
        CoherentSequence {
            words: self.words[..depth].to_vec(),
            certificates: self
                .certificates
                .iter()
                .filter(|&(_, &k)| k <= depth)
                .map(|(&n, &k)| (n, k))
                .collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Termwise inverse; a group element's inverse needs no restabilization.
    pub fn invert(&self) -> Result<CoherentSequence> {
        let words = self.words.iter().map(|w| w.invert()).collect::<Result<Vec<_>>>()?;
        let mut s = CoherentSequence::new(words, format!("inverse of {}", self.provenance));
        s.certificates = self.certificates.clone();
        Ok(s)
    }

    pub fn is_full(&self) -> bool {
        self.words.iter().all(|w| !w.is_partial())
    }

    pub fn to_file(&self) -> SequenceFile {
        SequenceFile {
            levels: self
                .words
                .iter()
                .enumerate()
                .map(|(i, w)| LevelWord {
                    n: i + 1,
                    word: w.to_string(),
                })
                .collect(),
            certificates: self
                .certificates
                .iter()
                .map(|(n, k)| (n.to_string(), *k))
                .collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn from_file(f: &SequenceFile) -> Result<CoherentSequence> {
        let mut words = Vec::with_capacity(f.levels.len());
        for (i, l) in f.levels.iter().enumerate() {
            if l.n != i + 1 {
                return Err(Error::Sequence(format!(
                    "levels must run 1, 2, 3, … without gaps; found {} at position {}",
                    l.n,
                    i + 1
                )));
            }
            words.push(l.word.parse::<Word>()?);
        }
        let mut certificates = BTreeMap::new();
        for (n, &k) in &f.certificates {
            let n: usize = n
                .parse()
                .map_err(|_| Error::Sequence(format!("bad certificate level {n:?}")))?;
            certificates.insert(n, k);
        }
        Ok(CoherentSequence {
            words,
            certificates,
            provenance: f.provenance.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("sequence files always serialize")
    }

    pub fn from_json(text: &str) -> Result<CoherentSequence> {
        CoherentSequence::from_file(&serde_json::from_str(text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelWord {
    pub n: usize,
    pub word: String,
}

/// On-disk form of a sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceFile {
    pub levels: Vec<LevelWord>,
    #[serde(default)]
    pub certificates: BTreeMap<String, usize>,
    #[serde(default)]
    pub provenance: String,
}

/// `chain[k][n-1]` = the unreduced projection of `reduce(ω_k)` to level `n`, `n <= k`.
fn reduced_chains(words: &[Word]) -> Vec<Vec<Word>> {
    (1..=words.len())
        .map(|k| chain_levels(&reduce(&words[k - 1]), k, 1))
        .collect()
}

/// For each level `n`, the smallest `k > n` with `chain(reduce(ω_k)) = ω_n`.
fn find_certificates(words: &[Word]) -> BTreeMap<usize, usize> {
    let chains = reduced_chains(words);
    let mut out = BTreeMap::new();
    for n in 1..=words.len() {
        if let Some(k) = (n + 1..=words.len()).find(|&k| chains[k - 1][n - 1] == words[n - 1]) {
            out.insert(n, k);
        }
    }
    out
}

/// Whether the sequence should consist of based loops or arbitrary paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Loops,
    Paths,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub depth: usize,
    /// First level `n` with `project(ω_{n+1}) ≠ ω_n`.
    pub first_incoherent: Option<usize>,
    /// Levels whose word is not a loop (only checked for loop sequences).
    pub non_loops: Vec<usize>,
    /// Stored certificates that fail verification.
    pub bad_certificates: Vec<usize>,
    /// Certified levels where a deeper level breaks the agreement.
    pub impermanent: Vec<usize>,
    pub uncertified: Vec<usize>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.first_incoherent.is_none()
            && self.non_loops.is_empty()
            && self.bad_certificates.is_empty()
            && self.impermanent.is_empty()
    }
}

pub fn first_incoherent(words: &[Word]) -> Option<usize> {
    (1..words.len()).find(|&n| project(&words[n], n) != words[n - 1])
}

pub fn validate(seq: &CoherentSequence, kind: Membership) -> ValidationReport {
    let words = seq.words();
    let non_loops = match kind {
        Membership::Loops => (1..=words.len())
            .filter(|&n| !matches!(is_loop(&words[n - 1], n), Ok(true)))
            .collect(),
        Membership::Paths => Vec::new(),
    };
    let chains = reduced_chains(words);
    let mut bad = Vec::new();
    let mut impermanent = Vec::new();
    for (&n, &k) in seq.certificates() {
        if n == 0 || n > words.len() || k <= n || k > words.len() {
            bad.push(n);
            continue;
        }
        if chains[k - 1][n - 1] != words[n - 1] {
            bad.push(n);
        } else if (k..=words.len()).any(|j| chains[j - 1][n - 1] != words[n - 1]) {
            impermanent.push(n);
        }
    }
    ValidationReport {
        depth: words.len(),
        first_incoherent: first_incoherent(words),
        non_loops,
        bad_certificates: bad,
        impermanent,
        uncertified: seq.uncertified_levels(),
    }
}

/// First level `n` with `reduce(project(g_{n+1})) ≠ g_n`, for a prefix of reduced words.
pub fn first_incoherent_reduced(g: &[Word]) -> Option<usize> {
    (1..g.len()).find(|&n| project_reduced(&g[n], n) != g[n - 1] || !g[n - 1].is_reduced())
}

/// The stabilization of a reduced prefix `g_1..g_N`: each level takes the unreduced chain
/// projection of `g_N`. Level `n` is certified at the smallest `k` with `n < k < N` from
/// which the chain projections of `g_k, …, g_N` all agree.
pub fn stabilize_prefix(g: &[Word], provenance: impl Into<String>) -> CoherentSequence {
    let depth = g.len();
    let chains: Vec<Vec<Word>> = (1..=depth).map(|k| chain_levels(&g[k - 1], k, 1)).collect();
    let mut words = Vec::with_capacity(depth);
    let mut certificates = BTreeMap::new();
    for n in 1..=depth {
        let top = chains[depth - 1][n - 1].clone();
        let mut k = depth;
        while k > n + 1 && chains[k - 2][n - 1] == top {
            k -= 1;
        }
        if k < depth {
            certificates.insert(n, k);
        }
        words.push(top);
    }
    let mut s = CoherentSequence::new(words, provenance);
    s.certificates = certificates;
    s
}

/// Termwise concatenation, reduction and restabilization.
pub fn star(a: &CoherentSequence, b: &CoherentSequence) -> Result<CoherentSequence> {
    let depth = a.depth().min(b.depth());
    let mut g = Vec::with_capacity(depth);
    for n in 1..=depth {
        g.push(reduce(&a.word(n).concat(b.word(n))?));
    }
    Ok(stabilize_prefix(
        &g,
        format!("({}) * ({})", a.provenance, b.provenance),
    ))
}

/// Levels at which both sequences carry a certificate.
pub fn commonly_certified(a: &CoherentSequence, b: &CoherentSequence) -> Vec<usize> {
    (1..=a.depth().min(b.depth()))
        .filter(|n| a.certificate(*n).is_some() && b.certificate(*n).is_some())
        .collect()
}

fn demote(w: &Word) -> Option<Word> {
    let (last, init) = w.letters().split_last()?;
    Some(Word::partial_from(init, *last))
}

fn chain_down(top: Word, depth: usize, provenance: String) -> CoherentSequence {
    CoherentSequence::new(chain_levels(&top, depth, 1), provenance)
}

/// The class of a sequence under `≐`, as far as the stored depth shows it.
#[derive(Clone, Debug)]
pub struct EquivalenceClass {
    /// The terminating member, when one exists.
    pub representative: Option<CoherentSequence>,
    /// All members, the representative first.
    pub members: Vec<CoherentSequence>,
}

impl EquivalenceClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn is_terminating(&self) -> bool {
        self.representative.is_some()
    }

    pub fn contains(&self, s: &CoherentSequence) -> bool {
        self.members.iter().any(|m| m.words() == s.words())
    }
}

/// The levels a tail property is checked on: the deepest `TAIL_WINDOW`, at least level 1.
fn tail(depth: usize) -> std::ops::RangeInclusive<usize> {
    depth.saturating_sub(TAIL_WINDOW - 1).max(1)..=depth
}

fn terminating_on_tail(s: &CoherentSequence) -> bool {
    s.depth() >= TAIL_WINDOW && tail(s.depth()).all(|n| !s.word(n).is_partial())
}

/// Members of the class of a terminating sequence: itself, the one that never picks up the
/// last disk, and the ones that set it down with one more letter.
fn class_of_terminating(rep: &CoherentSequence) -> EquivalenceClass {
    let depth = rep.depth();
    let top = rep.word(depth);
    let mut members = vec![rep.clone()];
    if let Some(d) = demote(top) {
        let m = chain_down(d, depth, format!("held back from {}", rep.provenance));
        let ok = tail(depth).all(|n| demote(rep.word(n)).as_ref() == Some(m.word(n)));
        if ok {
            members.push(m);
        }
    }
    for z in Letter::ALL {
        let m = chain_down(
            Word::partial_from(top.letters(), z),
            depth,
            format!("set down from {}", rep.provenance),
        );
        let ok = tail(depth).all(|n| {
            let w = m.word(n);
            w.is_partial() && w.full_letters() == rep.word(n).letters()
        });
        if ok && !members.iter().any(|x| x.words() == m.words()) {
            members.push(m);
        }
    }
    EquivalenceClass {
        representative: Some(rep.clone()),
        members,
    }
}

/// Classifies a sequence under `≐`. Terminating type is judged on the deepest
/// `TAIL_WINDOW` levels.
pub fn equivalence_class(seq: &CoherentSequence) -> EquivalenceClass {
    let depth = seq.depth();
    if depth == 0 {
        return EquivalenceClass {
            representative: None,
            members: vec![seq.clone()],
        };
    }
    if terminating_on_tail(seq) {
        return class_of_terminating(seq);
    }
    let top = seq.word(depth);
    if top.is_partial() {
        for cand in [top.to_full(), top.without_pending()] {
            let rep = chain_down(cand, depth, format!("terminating form of {}", seq.provenance));
            if !terminating_on_tail(&rep) {
                continue;
            }
            let class = class_of_terminating(&rep);
            if class.contains(seq) {
                return class;
            }
        }
    }
    EquivalenceClass {
        representative: None,
        members: vec![seq.clone()],
    }
}

/// A derived sequence whose levels rest on "sufficiently large k": `stable[n-1]` records
/// whether two consecutive depths gave the same word.
#[derive(Clone, Debug)]
pub struct Derived {
    pub sequence: CoherentSequence,
    pub stable: Vec<bool>,
}

impl Derived {
    pub fn unstable_levels(&self) -> Vec<usize> {
        (1..=self.stable.len()).filter(|&n| !self.stable[n - 1]).collect()
    }

    /// The deepest level from which every shallower level is stable.
    pub fn stable_depth(&self) -> usize {
        self.stable.iter().take_while(|&&s| s).count()
    }
}

/// `η_k` of the completion: `ω_k`'s letters with `a_i a_i⁻¹` inserted after each position
/// where the path stops one step short of a vertex over level `n` and turns back. A full
/// word that ends at such a position counts as turning back.
pub fn completion_word(w: &Word, n: usize, k: usize) -> Word {
    let full = w.full_letters();
    let modulus = 1i64 << (k - n).min(62);
    let is_zero = |c: i64| c.rem_euclid(modulus) == 0;
    let is_unit = |c: i64| {
        let r = c.rem_euclid(modulus);
        r == 1 || r == modulus - 1
    };
    let mut out = Vec::with_capacity(full.len() + 8);
    let mut prev: i64 = 0;
    for (i, &a) in full.iter().enumerate() {
        let cur = prev + a.chi();
        out.push(a);
        let next = full
            .get(i + 1)
            .copied()
            .or(if i + 1 == full.len() { w.pending() } else { None })
            .map(|b| cur + b.chi());
        let turns_back = next.is_none_or(|c| !is_zero(c));
        if is_unit(cur) && !is_zero(prev) && turns_back {
            out.push(a);
            out.push(a.inverse());
        }
        prev = cur;
    }
    Word::new(out)
}

/// The completion, evaluated from the two deepest stored levels. Level `n` needs `k > n+1`,
/// so the result has depth `N-2`; a level is stable when depths `N-1` and `N` agree.
pub fn complete(seq: &CoherentSequence) -> Derived {
    let depth = seq.depth();
    let out_depth = depth.saturating_sub(2);
    let mut words = Vec::with_capacity(out_depth);
    let mut stable = Vec::with_capacity(out_depth);
    for n in 1..=out_depth {
        let at = |k: usize| {
            let mut cur = completion_word(seq.word(k), n, k);
            for level in (n..k).rev() {
                cur = project(&cur, level);
            }
            cur
        };
        let top = at(depth);
        stable.push(depth - 1 > n + 1 && at(depth - 1) == top);
        words.push(top);
    }
    Derived {
        sequence: CoherentSequence::new(words, format!("completion of {}", seq.provenance)),
        stable,
    }
}

/// `ω ∩ ξ`: the longest common initial run of letters, pending letters included, with a
/// slash before the last letter when the shorter word has one there.
pub fn intersect(a: &Word, b: &Word) -> Word {
    let la = a.letters();
    let lb = b.letters();
    let common = la.iter().zip(lb).take_while(|(p, q)| p == q).count();
    let shorter_partial = match la.len().cmp(&lb.len()) {
        std::cmp::Ordering::Less => a.is_partial(),
        std::cmp::Ordering::Greater => b.is_partial(),
        std::cmp::Ordering::Equal => a.is_partial() || b.is_partial(),
    };
    let shorter_len = la.len().min(lb.len());
    if common > 0 && common == shorter_len && shorter_partial {
        Word::partial_from(&la[..common - 1], la[common - 1])
    } else {
        Word::new(la[..common].to_vec())
    }
}

/// The stable initial match, from the two deepest stored levels; depth `N-1`.
pub fn cap(a: &CoherentSequence, b: &CoherentSequence) -> Derived {
    let depth = a.depth().min(b.depth());
    let out_depth = depth.saturating_sub(1);
    let chain_from = |k: usize| chain_levels(&intersect(a.word(k), b.word(k)), k, 1);
    let top = chain_from(depth);
    let below = if depth >= 2 { chain_from(depth - 1) } else { Vec::new() };
    let mut words = Vec::with_capacity(out_depth);
    let mut stable = Vec::with_capacity(out_depth);
    for n in 1..=out_depth {
        words.push(top[n - 1].clone());
        stable.push(depth - 1 > n && below[n - 1] == top[n - 1]);
    }
    Derived {
        sequence: CoherentSequence::new(
            words,
            format!("cap of {} and {}", a.provenance, b.provenance),
        ),
        stable,
    }
}
