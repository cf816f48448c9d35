//! Direct checks of observation-based and non-interfering strategies on
//! bounded plays, without transducers or formulas.

use std::collections::BTreeMap;

use crate::arena::{Arena, Player, Pos, Strategy};
use crate::encoders::impinfo::ImpInfo;
use crate::encoders::nonint::{NiArena, NiSys};

/// Plays of length at most `max_len` consistent with `sigma`.
fn consistent_plays(arena: &Arena, sigma: &Strategy, max_len: usize) -> Vec<Vec<Pos>> {
    let mut out = Vec::new();
    let mut frontier = vec![vec![arena.initial()]];
    while let Some(p) = frontier.pop() {
        if p.len() < max_len {
            let last = *p.last().unwrap();
            let forced = sigma.next_move(arena, &p);
            for &w in arena.successors(last) {
                if forced.is_none_or(|f| f == w) {
                    let mut q = p.clone();
                    q.push(w);
                    frontier.push(q);
                }
            }
        }
        out.push(p);
    }
    out
}

/// Whether a Player 1 strategy on the encoded game picks the same action after
/// any two consistent plays with equal observations, up to length `max_len`.
pub fn observation_based_direct(raw: &ImpInfo, arena: &Arena, sigma: &Strategy, max_len: usize) -> bool {
    let class_of: BTreeMap<&str, &str> = raw
        .states
        .iter()
        .zip(&raw.obs)
        .map(|(s, c)| (s.as_str(), c.as_str()))
        .collect();
    // A Player 2 position `v.a` is observed as the action `a`.
    let observe = |v: Pos| -> String {
        match arena.owner(v) {
            Player::P1 => format!("o:{}", class_of[arena.id(v)]),
            Player::P2 => format!("a:{}", arena.id(v).rsplit_once('.').unwrap().1),
        }
    };
    let mut seen: BTreeMap<Vec<String>, String> = BTreeMap::new();
    for p in consistent_plays(arena, sigma, max_len) {
        let last = *p.last().unwrap();
        if arena.owner(last) != Player::P1 {
            continue;
        }
        let Some(next) = sigma.next_move(arena, &p) else { continue };
        let action = observe(next);
        let key: Vec<String> = p.iter().map(|&v| observe(v)).collect();
        if seen.entry(key).or_insert_with(|| action.clone()) != &action {
            return false;
        }
    }
    true
}

/// Whether all consistent plays up to length `max_len` with the same sequence
/// of low inputs end with the same output.
pub fn noninterference_direct(sys: &NiSys, g: &NiArena, sigma: &Strategy, max_len: usize) -> bool {
    let arena = &g.arena;
    let mut low: Vec<Option<usize>> = vec![None; arena.len()];
    for (&(letter, _), &v) in &g.p1 {
        low[v] = letter.map(|l| sys.low_part(l));
    }
    let mut out_of: Vec<usize> = vec![0; arena.len()];
    for (&(_, s), &v) in &g.p1 {
        out_of[v] = s;
    }
    for (&(s, _), &v) in &g.p2 {
        out_of[v] = s;
    }
    let mut seen: BTreeMap<Vec<usize>, u32> = BTreeMap::new();
    for p in consistent_plays(arena, sigma, max_len) {
        let key: Vec<usize> = p.iter().filter_map(|&v| low[v]).collect();
        let o = sys.output[out_of[*p.last().unwrap()]];
        if *seen.entry(key).or_insert(o) != o {
            return false;
        }
    }
    true
}
