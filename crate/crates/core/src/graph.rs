//! The graph levels `X_n`: vertices `(t, w)`, neighbors, edge labels, tracing and export.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::projection;
use crate::stage::DyadicStage;
use crate::word::{Base, Letter, Word};

/// Default bound on the level accepted by [`enumerate_level`].
pub const DEFAULT_LEVEL_CAP: usize = 10;

/// A color-word symbol: white `A`, black `B`, or the box marking the disk in hand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    A,
    B,
    Box,
}

impl Serialize for Sym {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_char(self.as_char())
    }
}

impl Sym {
    pub fn flip(self) -> Sym {
        match self {
            Sym::A => Sym::B,
            Sym::B => Sym::A,
            Sym::Box => Sym::Box,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sym::A => 'A',
            Sym::B => 'B',
            Sym::Box => '_',
        }
    }

    pub fn from_char(c: char) -> Option<Sym> {
        match c {
            'A' => Some(Sym::A),
            'B' => Some(Sym::B),
            '_' | '□' => Some(Sym::Box),
            _ => None,
        }
    }

    /// 0 for `A`, 1 for `B`.
    pub fn bit(self) -> Option<u8> {
        match self {
            Sym::A => Some(0),
            Sym::B => Some(1),
            Sym::Box => None,
        }
    }
}

pub fn format_colors(colors: &[Sym]) -> String {
    colors.iter().map(|s| s.as_char()).collect()
}

pub fn parse_colors(text: &str) -> Option<Vec<Sym>> {
    text.chars().map(Sym::from_char).collect()
}

/// A vertex `(t, w)` of `X_n`: stage with `n+1` binary digits and a color word of
/// length `n+1` carrying the box at position `d(t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    stage: DyadicStage,
    colors: Vec<Sym>,
}

impl Vertex {
    pub fn new(stage: DyadicStage, colors: Vec<Sym>) -> Result<Vertex> {
        let v = Vertex { stage, colors };
        v.check()?;
        Ok(v)
    }

    fn check(&self) -> Result<()> {
        let fail = |reason: String| {
            Err(Error::InvalidVertex {
                vertex: self.to_string(),
                reason,
            })
        };
        if self.colors.is_empty() {
            return fail("empty color word".into());
        }
        if self.stage.level() as usize != self.colors.len() {
            return fail(format!(
                "stage has {} digits but the color word has length {}",
                self.stage.level(),
                self.colors.len()
            ));
        }
        let boxes: Vec<usize> = (1..=self.colors.len())
            .filter(|&i| self.colors[i - 1] == Sym::Box)
            .collect();
        if boxes != [self.stage.bit_length()] {
            return fail(format!(
                "the box must sit exactly at position d(t) = {}",
                self.stage.bit_length()
            ));
        }
        Ok(())
    }

    pub fn stage(&self) -> &DyadicStage {
        &self.stage
    }

    pub fn colors(&self) -> &[Sym] {
        &self.colors
    }

    /// The graph level `n`.
    pub fn level(&self) -> usize {
        self.colors.len() - 1
    }

    /// Position of the box (1-based), i.e. `d(t)`.
    pub fn box_pos(&self) -> usize {
        self.stage.bit_length()
    }

    /// Symbol at 1-based position `i`.
    pub fn color(&self, i: usize) -> Sym {
        self.colors[i - 1]
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.stage, format_colors(&self.colors))
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Vertex> {
        let bad = || Error::MalformedVertex(s.to_string());
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let (stage, colors) = inner.split_once(',').ok_or_else(bad)?;
        let stage = DyadicStage::from_bits(stage.trim()).map_err(|_| bad())?;
        let colors = parse_colors(colors.trim()).ok_or_else(bad)?;
        Vertex::new(stage, colors)
    }
}

impl Serialize for Vertex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Vertex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Vertex, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// The base vertex `x_n = (.0…0, □A…A)`.
pub fn base_vertex(n: usize) -> Vertex {
    let mut colors = vec![Sym::A; n + 1];
    colors[0] = Sym::Box;
    Vertex {
        stage: DyadicStage::zero(n as u32 + 1),
        colors,
    }
}

/// The endpoint of the edge leaving `v` with label `a`.
pub fn neighbor(v: &Vertex, a: Letter) -> Vertex {
    let s = v.stage.step(a.exp());
    let dt = v.box_pos();
    let ds = s.bit_length();
    let mut colors = v.colors.clone();
    if ds != dt {
        colors.swap(dt - 1, ds - 1);
        if a.base == Base::Y {
            colors[dt - 1] = colors[dt - 1].flip();
        }
    }
    Vertex { stage: s, colors }
}

pub fn neighbors(v: &Vertex) -> [(Letter, Vertex); 4] {
    Letter::ALL.map(|a| (a, neighbor(v, a)))
}

/// `w ∩ v` for two vertex color words: the color word of the edge they span, if any.
pub fn edge_colors(a: &Vertex, b: &Vertex) -> Option<Vec<Sym>> {
    if a.colors.len() != b.colors.len() {
        return None;
    }
    a.colors
        .iter()
        .zip(&b.colors)
        .map(|(&p, &q)| match (p, q) {
            (Sym::Box, Sym::Box) => None,
            (Sym::Box, c) | (c, Sym::Box) => Some(c),
            (c, d) if c == d => Some(c),
            _ => None,
        })
        .collect()
}

/// Orders two vertices as `(lower, upper)` if their stages differ by one step.
fn ordered<'a>(v: &'a Vertex, s: &'a Vertex) -> Option<(&'a Vertex, &'a Vertex)> {
    if v.stage.level() != s.stage.level() {
        return None;
    }
    if v.stage.step(1) == s.stage {
        Some((v, s))
    } else if s.stage.step(1) == v.stage {
        Some((s, v))
    } else {
        None
    }
}

pub fn adjacent(v: &Vertex, s: &Vertex) -> bool {
    match ordered(v, s) {
        None => false,
        Some(_) if v.level() == 0 => true,
        Some(_) => edge_colors(v, s).is_some(),
    }
}

/// The base letter of the edge spanned by two adjacent vertices.
pub fn label_between(v: &Vertex, s: &Vertex) -> Result<Base> {
    let not_adjacent = || Error::NotAdjacent {
        a: v.to_string(),
        b: s.to_string(),
    };
    let (lower, upper) = ordered(v, s).ok_or_else(not_adjacent)?;
    if v.level() == 0 {
        return Err(Error::AmbiguousLevelZero);
    }
    let c = edge_colors(lower, upper).ok_or_else(not_adjacent)?;
    let same = c[lower.box_pos() - 1] == c[upper.box_pos() - 1];
    Ok(if same { Base::X } else { Base::Y })
}

/// The directed label of the edge from `v` to `s`.
pub fn letter_between(v: &Vertex, s: &Vertex) -> Result<Letter> {
    let base = label_between(v, s)?;
    let exp = if v.stage.step(1) == s.stage { 1 } else { -1 };
    Ok(Letter::new(base, exp))
}

/// Where a traced word ends: at `vertex`, or inside the edge leaving it with `pending`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEnd {
    pub vertex: Vertex,
    pub pending: Option<Letter>,
}

impl fmt::Display for TraceEnd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pending {
            None => write!(f, "{}", self.vertex),
            Some(p) => write!(f, "{} /{}", self.vertex, p),
        }
    }
}

pub fn trace(start: &Vertex, w: &Word) -> TraceEnd {
    let mut v = start.clone();
    for &a in w.full_letters() {
        v = neighbor(&v, a);
    }
    TraceEnd {
        vertex: v,
        pending: w.pending(),
    }
}

/// Every vertex visited by the full letters of `w`, starting with `start`.
pub fn trace_path(start: &Vertex, w: &Word) -> Vec<Vertex> {
    let mut path = Vec::with_capacity(w.len() + 1);
    path.push(start.clone());
    for &a in w.full_letters() {
        let next = neighbor(path.last().unwrap(), a);
        path.push(next);
    }
    path
}

/// Loop test via the exponent-sum and color criteria, without walking the graph.
pub fn is_loop(w: &Word, n: usize) -> Result<bool> {
    w.require_full("is_loop")?;
    let chi = w.chi();
    if n == 0 {
        return Ok(chi.rem_euclid(2) == 0);
    }
    if chi.rem_euclid(1i64 << (n + 1).min(62)) != 0 || (n + 1 > 62 && chi != 0) {
        return Ok(false);
    }
    let dec = projection::decompose_letters(w.letters(), n - 1);
    Ok(dec.final_colors.iter().all(|&c| c == 0))
}

/// Loop test by tracing from the base vertex.
pub fn is_loop_by_trace(w: &Word, n: usize) -> Result<bool> {
    w.require_full("is_loop")?;
    let base = base_vertex(n);
    Ok(trace(&base, w).vertex == base)
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    /// Positive letter leading from `from` to `to`.
    pub letter: Letter,
}

/// An explicitly materialized level graph.
#[derive(Clone, Debug, Serialize)]
pub struct LevelGraph {
    pub level: usize,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<GraphEdge>,
    #[serde(skip)]
    pub index: HashMap<Vertex, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelSummary {
    pub level: usize,
    pub vertices: u64,
    pub edges: u64,
}

/// All vertices of `X_n` in stage-major order.
pub fn all_vertices(n: usize) -> Vec<Vertex> {
    let bits = n as u32 + 1;
    let mut out = Vec::with_capacity(1 << (2 * n + 1));
    for t in 0..(1u64 << bits) {
        let stage = DyadicStage::from_u64(t, bits);
        let d = stage.bit_length();
        for c in 0..(1u64 << n) {
            let mut colors = Vec::with_capacity(n + 1);
            let mut k = 0;
            for pos in 1..=n + 1 {
                if pos == d {
                    colors.push(Sym::Box);
                } else {
                    colors.push(if (c >> k) & 1 == 1 { Sym::B } else { Sym::A });
                    k += 1;
                }
            }
            out.push(Vertex {
                stage: stage.clone(),
                colors,
            });
        }
    }
    out
}

/// Materializes `X_n` from the neighbor function. Each edge is listed once, from its
/// lower endpoint along its positive letter.
pub fn enumerate_level(n: usize, cap: usize) -> Result<LevelGraph> {
    if n > cap {
        return Err(Error::LevelCap { level: n, cap });
    }
    let vertices = all_vertices(n);
    let index: HashMap<Vertex, usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), i))
        .collect();
    let mut edges = Vec::with_capacity(2 * vertices.len());
    for (i, v) in vertices.iter().enumerate() {
        for a in [Letter::X, Letter::Y] {
            let to = index[&neighbor(v, a)];
            edges.push(GraphEdge {
                from: i,
                to,
                letter: a,
            });
        }
    }
    Ok(LevelGraph {
        level: n,
        vertices,
        edges,
        index,
    })
}

impl LevelGraph {
    pub fn summary(&self) -> LevelSummary {
        LevelSummary {
            level: self.level,
            vertices: self.vertices.len() as u64,
            edges: self.edges.len() as u64,
        }
    }

    /// Number of distinct geometric edges, told apart by endpoints and `w ∩ v`.
    pub fn distinct_edge_count(&self) -> usize {
        if self.level == 0 {
            let mut keys: Vec<(usize, usize, Letter)> =
                self.edges.iter().map(|e| (e.from, e.to, e.letter)).collect();
            keys.sort();
            keys.dedup();
            return keys.len();
        }
        let mut keys: Vec<(usize, usize, Vec<Sym>)> = self
            .edges
            .iter()
            .filter_map(|e| {
                let c = edge_colors(&self.vertices[e.from], &self.vertices[e.to])?;
                Some((e.from.min(e.to), e.from.max(e.to), c))
            })
            .collect();
        keys.sort();
        keys.dedup();
        keys.len()
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph X{} {{\n", self.level);
        for v in &self.vertices {
            out.push_str(&format!("  \"{v}\";\n"));
        }
        for e in &self.edges {
            let style = if e.letter.base == Base::X { "solid" } else { "dotted" };
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label={}, style={}];\n",
                self.vertices[e.from], self.vertices[e.to], e.letter.base, style
            ));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "level": self.level,
            "vertices": self.vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| serde_json::json!({
                "from": self.vertices[e.from].to_string(),
                "to": self.vertices[e.to].to_string(),
                "label": e.letter.base,
            })).collect::<Vec<_>>(),
        })
    }
}
