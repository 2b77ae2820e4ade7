//! Word calculus for the fundamental group of the Menger curve.
//!
//! The curve is the inverse limit of finite 4-valent graphs `X_n`. Edge-paths in `X_n`
//! based at a fixed vertex are words over `x⁺, x⁻, y⁺, y⁻`; the bonding maps become a
//! combinatorial projection on words. On top of that sit coherent word sequences (the
//! group elements), a dynamic word length, and an R-tree pseudo-metric. Every graph level
//! doubles as the state graph of a Towers of Hanoi variant with two-sided disks.

pub mod dyadic;
pub mod error;
pub mod fixtures;
pub mod generator;
pub mod graph;
pub mod hanoi;
pub mod metric;
pub mod oracle;
pub mod projection;
pub mod sequences;
pub mod stage;
pub mod word;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use graph::{base_vertex, neighbor, trace, Sym, Vertex};
pub use stage::DyadicStage;
pub use word::{parse_word, Base, Letter, Word};
