#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use menger_core::graph::{base_vertex, neighbor, Vertex};
use menger_core::word::{Letter, Word};
use rand::Rng;

pub fn random_letters<R: Rng>(rng: &mut R, len: usize) -> Vec<Letter> {
    (0..len).map(|_| Letter::ALL[rng.gen_range(0..4)]).collect()
}

/// Random closed walks at one level: a random walk, then the way home along a BFS tree.
pub struct LoopSampler {
    pub level: usize,
    home: HashMap<Vertex, Letter>,
}

impl LoopSampler {
    pub fn new(level: usize) -> LoopSampler {
        let base = base_vertex(level);
        let mut home = HashMap::new();
        let mut seen = HashMap::from([(base.clone(), ())]);
        let mut queue = VecDeque::from([base]);
        while let Some(v) = queue.pop_front() {
            for a in Letter::ALL {
                let u = neighbor(&v, a);
                if seen.insert(u.clone(), ()).is_none() {
                    home.insert(u.clone(), a.inverse());
                    queue.push_back(u);
                }
            }
        }
        LoopSampler { level, home }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R, max_walk: usize) -> Word {
        let len = rng.gen_range(0..=max_walk);
        let mut letters = random_letters(rng, len);
        let mut v = base_vertex(self.level);
        for &a in &letters {
            v = neighbor(&v, a);
        }
        while let Some(&a) = self.home.get(&v) {
            letters.push(a);
            v = neighbor(&v, a);
        }
        Word::new(letters)
    }
}
