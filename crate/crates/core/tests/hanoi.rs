use std::collections::{HashMap, VecDeque};

use menger_core::fixtures::ell;
use menger_core::graph::{all_vertices, base_vertex, neighbor};
use menger_core::hanoi::{
    legal_moves, peg_positions, play, shortest_solution, stage_of_positions, state_to_vertex,
    vertex_to_state, flips_along,
};
use menger_core::stage::DyadicStage;
use menger_core::Error;

#[test]
fn sample_positions() {
    let t = DyadicStage::from_bits("101000").unwrap();
    assert_eq!(peg_positions(&t), vec![2, 1, 0, 2, 2, 2]);
}

#[test]
fn allowable_count() {
    for n in 0..=12usize {
        let disks = n + 1;
        let total = 3usize.pow(disks as u32);
        let mut count = 0;
        let mut pegs = vec![0u8; disks];
        for code in 0..total {
            let mut c = code;
            for p in pegs.iter_mut() {
                *p = (c % 3) as u8;
                c /= 3;
            }
            if let Some(t) = stage_of_positions(&pegs) {
                assert_eq!(peg_positions(&t), pegs);
                count += 1;
            }
        }
        assert_eq!(count, 1usize << disks, "n = {n}");
    }
}

/// Classical Hanoi: disk 1 is the largest; a disk moves if nothing smaller sits on it and
/// nothing smaller sits on the target peg.
fn bfs_path(disks: usize, from: &[u8], to: &[u8]) -> Vec<Vec<u8>> {
    let mut prev: HashMap<Vec<u8>, Vec<u8>> = HashMap::new();
    let mut queue = VecDeque::from([from.to_vec()]);
    prev.insert(from.to_vec(), from.to_vec());
    while let Some(s) = queue.pop_front() {
        if s == to {
            break;
        }
        for d in 0..disks {
            if s[d + 1..].iter().any(|&p| p == s[d]) {
                continue;
            }
            for target in 0..3u8 {
                if target == s[d] || s[d + 1..].iter().any(|&p| p == target) {
                    continue;
                }
                let mut t = s.clone();
                t[d] = target;
                if !prev.contains_key(&t) {
                    prev.insert(t.clone(), s.clone());
                    queue.push_back(t);
                }
            }
        }
    }
    let mut path = vec![to.to_vec()];
    while path.last().unwrap() != from {
        path.push(prev[path.last().unwrap()].clone());
    }
    path.reverse();
    path
}

#[test]
fn formula_solution_is_the_shortest_path() {
    for disks in 1..=5usize {
        let bits = disks as u32;
        let stages: Vec<Vec<u8>> = (0..1u64 << bits)
            .map(|k| peg_positions(&DyadicStage::from_u64(k, bits)))
            .collect();
        let path = bfs_path(disks, &stages[0], stages.last().unwrap());
        assert_eq!(path.len() - 1, (1 << disks) - 1);
        assert_eq!(path, stages, "{disks} disks");
        let moves = shortest_solution(disks - 1);
        assert_eq!(moves.len(), (1 << disks) - 1);
        for (k, m) in moves.iter().enumerate() {
            assert_eq!(stages[k][m.disk - 1], m.from);
            assert_eq!(stages[k + 1][m.disk - 1], m.to);
        }
    }
}

#[test]
fn moves_are_the_graph_neighbors() {
    for n in 1..=4 {
        for v in all_vertices(n) {
            let s = vertex_to_state(&v);
            assert_eq!(state_to_vertex(&s).unwrap(), v);
            let moves = legal_moves(&s).unwrap();
            assert_eq!(moves.len(), 4);
            for m in moves {
                assert_eq!(state_to_vertex(&m.state).unwrap(), neighbor(&v, m.letter));
            }
        }
    }
}

#[test]
fn non_allowable_rejected() {
    let mut s = vertex_to_state(&base_vertex(1));
    s.pegs = vec![1, 0];
    assert!(matches!(state_to_vertex(&s), Err(Error::NotAllowable)));
}

#[test]
fn ell_turns_one_disk_twice() {
    for n in 1..=6usize {
        let start = vertex_to_state(&base_vertex(n));
        for k in 1..=n {
            let w = ell(k).unwrap();
            let flips = flips_along(&start, &w).unwrap();
            let disk = n + 2 - k;
            for (i, &f) in flips.iter().enumerate() {
                assert_eq!(f, if i + 1 == disk { 2 } else { 0 }, "ell({k}) at level {n}: {flips:?}");
            }
            assert_eq!(play(&start, &w).unwrap().pegs, start.pegs);
        }
    }
}
