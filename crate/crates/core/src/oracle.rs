//! An independent construction of `X_n` by repeated doubling of vertex stars, starting
//! from the two-vertex, four-edge graph `X_0`. Used to cross-check the neighbor formula
//! and the combinatorial projection.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{self, Sym, Vertex};
use crate::stage::DyadicStage;
use crate::word::{Base, Letter, Word};

/// Highest level the oracle will build.
pub const ORACLE_CAP: usize = 6;

/// An edge, identified by its lower stage and the full color word of its interior.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OracleEdge {
    pub lower: usize,
    pub upper: usize,
    pub lower_stage: DyadicStage,
    pub colors: Vec<Sym>,
    pub label: Base,
}

#[derive(Clone, Debug)]
pub struct OracleGraph {
    pub level: usize,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<OracleEdge>,
    index: HashMap<Vertex, usize>,
    /// Edges incident to each vertex.
    incident: Vec<Vec<usize>>,
}

/// A point of the subdivision `X_n*`: a vertex or the midpoint of an edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StarPoint {
    Vertex(Vertex),
    Midpoint {
        lower_stage: DyadicStage,
        colors: Vec<Sym>,
    },
}

fn label_of(colors: &[Sym], lower: &Vertex, upper: &Vertex, level: usize) -> Base {
    if level == 0 {
        // at level 0 the two edges over each arc are told apart by color alone
        return if colors[0] == Sym::A { Base::X } else { Base::Y };
    }
    if colors[lower.box_pos() - 1] == colors[upper.box_pos() - 1] {
        Base::X
    } else {
        Base::Y
    }
}

impl OracleGraph {
    fn from_parts(level: usize, vertices: Vec<Vertex>, raw: Vec<(usize, usize, DyadicStage, Vec<Sym>)>) -> OracleGraph {
        let index: HashMap<Vertex, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let mut incident = vec![Vec::new(); vertices.len()];
        let mut edges = Vec::with_capacity(raw.len());
        for (lower, upper, lower_stage, colors) in raw {
            let label = label_of(&colors, &vertices[lower], &vertices[upper], level);
            incident[lower].push(edges.len());
            incident[upper].push(edges.len());
            edges.push(OracleEdge {
                lower,
                upper,
                lower_stage,
                colors,
                label,
            });
        }
        OracleGraph {
            level,
            vertices,
            edges,
            index,
            incident,
        }
    }

    /// `X_0`: vertices `.0` and `.1`, joined by an `A` and a `B` edge over each half circle.
    pub fn base() -> OracleGraph {
        let v0 = Vertex::new(DyadicStage::from_u64(0, 1), vec![Sym::Box]).unwrap();
        let v1 = Vertex::new(DyadicStage::from_u64(1, 1), vec![Sym::Box]).unwrap();
        let mut raw = Vec::new();
        for c in [Sym::A, Sym::B] {
            raw.push((0, 1, v0.stage().clone(), vec![c]));
            raw.push((1, 0, v1.stage().clone(), vec![c]));
        }
        OracleGraph::from_parts(0, vec![v0, v1], raw)
    }

    /// Subdivides every edge and replaces each vertex star by a copy of `X_0*`.
    pub fn double(&self) -> OracleGraph {
        let mut vertices = Vec::with_capacity(4 * self.vertices.len());
        // two copies of each old vertex, stage extended by 0, colors by A or B
        let mut copies = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            let stage = v.stage().refine(1);
            let mut pair = [0usize; 2];
            for (j, c) in [Sym::A, Sym::B].into_iter().enumerate() {
                let mut colors = v.colors().to_vec();
                colors.push(c);
                pair[j] = vertices.len();
                vertices.push(Vertex::new(stage.clone(), colors).expect("copy keeps the box"));
            }
            copies.push(pair);
        }
        let mut raw = Vec::with_capacity(4 * self.edges.len());
        for e in &self.edges {
            let mid_stage = e.lower_stage.refine(1).step(1);
            let mut mid_colors = e.colors.clone();
            mid_colors.push(Sym::Box);
            let m = vertices.len();
            vertices.push(Vertex::new(mid_stage.clone(), mid_colors).expect("midpoint box is last"));
            for (end, is_lower) in [(e.lower, true), (e.upper, false)] {
                for (j, c) in [Sym::A, Sym::B].into_iter().enumerate() {
                    let mut colors = e.colors.clone();
                    colors.push(c);
                    let copy = copies[end][j];
                    if is_lower {
                        raw.push((copy, m, e.lower_stage.refine(1), colors));
                    } else {
                        raw.push((m, copy, mid_stage.clone(), colors));
                    }
                }
            }
        }
        OracleGraph::from_parts(self.level + 1, vertices, raw)
    }

    pub fn vertex_index(&self, v: &Vertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// The edge leaving vertex `i` along letter `a`, with the vertex it leads to.
    pub fn step(&self, i: usize, a: Letter) -> Option<(usize, usize)> {
        self.incident[i].iter().copied().find_map(|ei| {
            let e = &self.edges[ei];
            if e.label != a.base {
                return None;
            }
            let forward = a.exp() > 0;
            if forward && e.lower == i {
                Some((ei, e.upper))
            } else if !forward && e.upper == i {
                Some((ei, e.lower))
            } else {
                None
            }
        })
    }

    pub fn degree(&self, i: usize) -> usize {
        self.incident[i].len()
    }
}

/// Builds `X_n` by doubling `n` times.
pub fn oracle_build(n: usize) -> Result<OracleGraph> {
    if n > ORACLE_CAP {
        return Err(Error::LevelCap {
            level: n,
            cap: ORACLE_CAP,
        });
    }
    let mut g = OracleGraph::base();
    for _ in 0..n {
        g = g.double();
    }
    Ok(g)
}

/// Checks that the identity on vertex names is a graph isomorphism between the oracle and
/// the neighbor-generated graph, edge labels and directions included. Returns the vertex
/// map from oracle indices to indices of `graph::all_vertices(n)`.
pub fn verify_isomorphism(g: &OracleGraph) -> Result<Vec<usize>> {
    let n = g.level;
    let formula = graph::enumerate_level(n, ORACLE_CAP)?;
    let fail = |msg: String| Err(Error::InvalidState(msg));
    if formula.vertices.len() != g.vertices.len() {
        return fail(format!(
            "vertex counts differ: {} vs {}",
            g.vertices.len(),
            formula.vertices.len()
        ));
    }
    let mut map = Vec::with_capacity(g.vertices.len());
    let mut seen = vec![false; g.vertices.len()];
    for v in &g.vertices {
        let Some(&j) = formula.index.get(v) else {
            return fail(format!("oracle vertex {v} is not a formula vertex"));
        };
        if std::mem::replace(&mut seen[j], true) {
            return fail(format!("vertex {v} built twice"));
        }
        map.push(j);
    }
    // every formula edge, keyed by endpoints and label, must be matched exactly once
    let mut want: HashMap<(usize, usize, Base), usize> = HashMap::new();
    for e in &formula.edges {
        *want.entry((e.from, e.to, e.letter.base)).or_default() += 1;
    }
    if formula.edges.len() != g.edges.len() {
        return fail(format!(
            "edge counts differ: {} vs {}",
            g.edges.len(),
            formula.edges.len()
        ));
    }
    for e in &g.edges {
        let key = (map[e.lower], map[e.upper], e.label);
        match want.get_mut(&key) {
            Some(c) if *c > 0 => *c -= 1,
            _ => {
                return fail(format!(
                    "oracle edge {} -> {} ({}) has no formula counterpart",
                    g.vertices[e.lower], g.vertices[e.upper], e.label
                ))
            }
        }
        if n > 0 {
            let lo = &g.vertices[e.lower];
            let hi = &g.vertices[e.upper];
            if graph::edge_colors(lo, hi).as_deref() != Some(&e.colors[..]) {
                return fail(format!("edge colors disagree between {lo} and {hi}"));
            }
        }
    }
    Ok(map)
}

/// `f_n` on a vertex of `X_{n+1}`: forget the last symbol. The image is a vertex of `X_n`
/// when the last stage digit is 0 and an edge midpoint otherwise.
pub fn bond_vertex(v: &Vertex) -> StarPoint {
    let n1 = v.level();
    assert!(n1 >= 1, "f_n needs a vertex of level at least 1");
    let stage = v.stage().truncate();
    let colors = v.colors()[..n1].to_vec();
    if v.stage().bit(n1 + 1) == 0 {
        StarPoint::Vertex(Vertex::new(stage, colors).expect("copy projects to a vertex"))
    } else {
        StarPoint::Midpoint {
            lower_stage: stage,
            colors,
        }
    }
}

/// The edge of `X_n` whose half an edge of `X_{n+1}` maps onto.
pub fn bond_edge(e: &OracleEdge) -> (DyadicStage, Vec<Sym>) {
    let n1 = e.colors.len() - 1;
    (e.lower_stage.truncate(), e.colors[..n1].to_vec())
}

/// The preimage of one edge of `X_n` in `X_{n+1}`: its vertices and edges.
#[derive(Clone, Debug)]
pub struct Preimage {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

pub fn preimage_of_edge(upper: &OracleGraph, lower_stage: &DyadicStage, colors: &[Sym]) -> Preimage {
    let mut edges = Vec::new();
    let mut vertices = Vec::new();
    for (i, e) in upper.edges.iter().enumerate() {
        let (s, c) = bond_edge(e);
        if &s == lower_stage && c == colors {
            edges.push(i);
            for v in [e.lower, e.upper] {
                if !vertices.contains(&v) {
                    vertices.push(v);
                }
            }
        }
    }
    Preimage { vertices, edges }
}

/// Whether a preimage is a figure-X: one center of degree 4 mapping to the midpoint, and
/// four leaves mapping to the two endpoints in pairs.
pub fn is_figure_x(upper: &OracleGraph, p: &Preimage, lower_ends: (&Vertex, &Vertex)) -> bool {
    if p.vertices.len() != 5 || p.edges.len() != 4 {
        return false;
    }
    let deg = |v: usize| {
        p.edges
            .iter()
            .filter(|&&e| upper.edges[e].lower == v || upper.edges[e].upper == v)
            .count()
    };
    let centers: Vec<usize> = p.vertices.iter().copied().filter(|&v| deg(v) == 4).collect();
    if centers.len() != 1 {
        return false;
    }
    if !matches!(bond_vertex(&upper.vertices[centers[0]]), StarPoint::Midpoint { .. }) {
        return false;
    }
    let mut at_lo = 0;
    let mut at_hi = 0;
    for &v in &p.vertices {
        if v == centers[0] {
            continue;
        }
        if deg(v) != 1 {
            return false;
        }
        match bond_vertex(&upper.vertices[v]) {
            StarPoint::Vertex(w) if &w == lower_ends.0 => at_lo += 1,
            StarPoint::Vertex(w) if &w == lower_ends.1 => at_hi += 1,
            _ => return false,
        }
    }
    at_lo == 2 && at_hi == 2
}

/// Projects a word at level `n+1` geometrically: trace it through the oracle graph of level
/// `n+1`, push each traversed edge down by `f_n`, and read off the edges of `X_n` that the
/// image path crosses from one end to the other. A path ending at a midpoint yields a
/// partial word. Needs `n >= 1` so that level-`n` labels are determined by colors.
pub fn geometric_project(upper: &OracleGraph, lower: &OracleGraph, w: &Word) -> Result<Word> {
    if lower.level + 1 != upper.level {
        return Err(Error::LevelMismatch {
            expected: upper.level - 1,
            got: lower.level,
        });
    }
    if lower.level == 0 {
        return Err(Error::AmbiguousLevelZero);
    }
    let mut edge_at: HashMap<(DyadicStage, Vec<Sym>), usize> = HashMap::new();
    for (i, e) in lower.edges.iter().enumerate() {
        edge_at.insert((e.lower_stage.clone(), e.colors.clone()), i);
    }
    let start = upper
        .vertex_index(&graph::base_vertex(upper.level))
        .expect("base vertex exists");
    let mut cur = start;
    // the X_n vertex the image path last stood on, and the edge it has entered, if any
    let mut last_vertex = match bond_vertex(&upper.vertices[cur]) {
        StarPoint::Vertex(v) => lower.vertex_index(&v).unwrap(),
        StarPoint::Midpoint { .. } => unreachable!("base vertex is a copy"),
    };
    let mut inside: Option<usize> = None;
    let mut out = Vec::new();
    let full = w.to_full();
    for &a in full.letters() {
        let (ei, next) = upper
            .step(cur, a)
            .ok_or_else(|| Error::InvalidState(format!("no {a} edge at {}", upper.vertices[cur])))?;
        let key = bond_edge(&upper.edges[ei]);
        let le = edge_at[&key];
        match bond_vertex(&upper.vertices[next]) {
            StarPoint::Midpoint { .. } => inside = Some(le),
            StarPoint::Vertex(v) => {
                let nv = lower.vertex_index(&v).unwrap();
                let e = &lower.edges[inside.take().expect("a vertex follows a midpoint")];
                if nv != last_vertex {
                    let exp = if e.lower == last_vertex { 1 } else { -1 };
                    out.push(Letter::new(e.label, exp));
                }
                last_vertex = nv;
            }
        }
        cur = next;
    }
    if let Some(le) = inside {
        let e = &lower.edges[le];
        let exp = if e.lower == last_vertex { 1 } else { -1 };
        return Ok(Word::partial_from(&out, Letter::new(e.label, exp)));
    }
    Ok(Word::new(out))
}

/// Traces a word from the base vertex through the oracle graph.
pub fn oracle_trace(g: &OracleGraph, w: &Word) -> Result<Vertex> {
    let mut cur = g
        .vertex_index(&graph::base_vertex(g.level))
        .expect("base vertex exists");
    for &a in w.full_letters() {
        cur = g
            .step(cur, a)
            .ok_or_else(|| Error::InvalidState(format!("no {a} edge at {}", g.vertices[cur])))?
            .1;
    }
    Ok(g.vertices[cur].clone())
}
