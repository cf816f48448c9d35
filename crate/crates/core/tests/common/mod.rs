//! Random instances and fixture loading shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use unistrat::arena::{Arena, ArenaBuilder, Player, Pos, Strategy};
use unistrat::formula::Formula;
use unistrat::ltlgame::parity::ParityGame;
use unistrat::transducer::{Transducer, TransducerBuilder};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(rel: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/fixtures");
    p.push(rel);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

pub fn fixtures_in(dir: &str, ext: &str) -> Vec<(String, String)> {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/fixtures");
    p.push(dir);
    let mut names: Vec<PathBuf> = std::fs::read_dir(&p)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|f| f.extension().is_some_and(|x| x == ext))
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|f| {
            (
                f.file_stem().unwrap().to_string_lossy().into_owned(),
                std::fs::read_to_string(&f).unwrap(),
            )
        })
        .collect()
}

/// An alternating arena without dead ends, labels over `p` and `q`.
pub fn random_arena(r: &mut ChaCha8Rng, max_positions: usize) -> Arena {
    let n = r.gen_range(2..=max_positions);
    let mut owners: Vec<Player> = (0..n)
        .map(|_| if r.gen_bool(0.5) { Player::P1 } else { Player::P2 })
        .collect();
    owners[0] = Player::P1;
    owners[1] = Player::P2;
    let mut b = ArenaBuilder::new("rnd");
    for (i, &o) in owners.iter().enumerate() {
        let mut labels = Vec::new();
        for p in ["p", "q"] {
            if r.gen_bool(0.4) {
                labels.push(p);
            }
        }
        b.add_position(format!("v{i}"), o, labels).unwrap();
    }
    for i in 0..n {
        let others: Vec<usize> = (0..n).filter(|&j| owners[j] != owners[i]).collect();
        let k = r.gen_range(1..=others.len().min(3));
        for &j in others.choose_multiple(r, k) {
            b.add_edge(i, j);
        }
    }
    b.set_initial(0);
    b.build().unwrap()
}

/// A transducer over the positions of an `n`-position arena.
pub fn random_transducer(r: &mut ChaCha8Rng, n: usize, max_states: usize) -> Transducer {
    let states = r.gen_range(1..=max_states);
    let mut b = TransducerBuilder::new("rnd", n, n);
    for q in 0..states {
        b.add_state(format!("q{q}"), r.gen_bool(0.6));
    }
    b.set_accepting(r.gen_range(0..states), true);
    b.set_initial(0);
    let transitions = r.gen_range(states..=3 * states + n);
    for _ in 0..transitions {
        let from = r.gen_range(0..states);
        let to = r.gen_range(0..states);
        let input = if r.gen_bool(0.85) { Some(r.gen_range(0..n)) } else { None };
        let output = if r.gen_bool(0.85) || input.is_none() {
            Some(r.gen_range(0..n))
        } else {
            None
        };
        b.add_transition(from, input, output, to);
    }
    // Keep most instances nonempty on length-preserving pairs.
    for v in 0..n {
        if r.gen_bool(0.5) {
            b.add_transition(0, Some(v), Some(v), 0);
        }
    }
    b.build()
}

/// A finite-memory strategy for `player` with up to `mem` memory states.
pub fn random_strategy(r: &mut ChaCha8Rng, arena: &Arena, player: Player, mem: usize) -> Strategy {
    let m = r.gen_range(1..=mem);
    let names: Vec<String> = (0..m).map(|i| format!("m{i}")).collect();
    let mut s = Strategy::new(player, names, 0);
    for k in 0..m {
        for v in arena.positions() {
            s.set_update(k, v, r.gen_range(0..m));
            if arena.owner(v) == player {
                let w = *arena.successors(v).choose(r).unwrap();
                s.set_choice(k, v, w);
            }
        }
    }
    s
}

/// A random formula of the given size over `atoms`, optionally with `[R]`.
pub fn random_formula(r: &mut ChaCha8Rng, size: usize, atoms: &[&str], with_r: bool) -> Formula {
    if size <= 1 {
        return if r.gen_bool(0.1) {
            Formula::tt()
        } else {
            Formula::atom(*atoms.choose(r).unwrap())
        };
    }
    let unary = if with_r { 3 } else { 2 };
    let kinds = if size >= 3 { unary + 2 } else { unary };
    let k = r.gen_range(0..kinds);
    if k >= unary {
        let left = r.gen_range(1..=size - 2);
        let a = random_formula(r, left, atoms, with_r);
        let b = random_formula(r, size - 1 - left, atoms, with_r);
        return if k == unary { a.and(b) } else { a.until(b) };
    }
    let a = random_formula(r, size - 1, atoms, with_r);
    match k {
        0 => a.not(),
        1 => a.next(),
        _ => a.r(),
    }
}

pub fn random_letter(r: &mut ChaCha8Rng, atoms: &[&str]) -> BTreeSet<String> {
    atoms.iter().filter(|_| r.gen_bool(0.5)).map(|a| a.to_string()).collect()
}

/// A parity game without dead ends.
pub fn random_parity_game(r: &mut ChaCha8Rng, max_nodes: usize) -> ParityGame {
    let n = r.gen_range(1..=max_nodes);
    let owner = (0..n).map(|_| r.gen_range(0..2u8)).collect();
    let priority = (0..n).map(|_| r.gen_range(0..5u32)).collect();
    let succ = (0..n)
        .map(|_| {
            let k = r.gen_range(1..=n.min(3));
            let mut s: Vec<usize> = (0..n).collect::<Vec<_>>().choose_multiple(r, k).copied().collect();
            s.sort();
            s
        })
        .collect();
    ParityGame {
        owner,
        succ,
        priority,
        initial: 0,
    }
}

/// All lassos `stem · cycle^ω` of the arena with `|stem|, |cycle| ≤ bound`.
pub fn lassos(arena: &Arena, bound: usize) -> Vec<(Vec<Pos>, Vec<Pos>)> {
    let mut out = Vec::new();
    for len in 1..=bound {
        for stem in arena.enumerate_plays(len) {
            let last = *stem.last().unwrap();
            // Cycles starting at a successor of `last` and returning to it.
            let mut stack: Vec<Vec<Pos>> = arena.successors(last).iter().map(|&w| vec![w]).collect();
            while let Some(c) = stack.pop() {
                let end = *c.last().unwrap();
                if arena.is_edge(end, c[0]) {
                    out.push((stem.clone(), c.clone()));
                }
                if c.len() < bound {
                    for &w in arena.successors(end) {
                        let mut c2 = c.clone();
                        c2.push(w);
                        stack.push(c2);
                    }
                }
            }
        }
    }
    out
}
