//! LTL games on arenas: tableau automata, determinization, product parity
//! games and strategy extraction.

pub mod dpa;
pub mod graph;
pub mod nba;
pub mod parity;

use std::collections::{BTreeSet, HashMap, VecDeque};

pub use dpa::{determinize, Parity};
pub use nba::{ltl_to_nba, Buchi, Guard};
pub use parity::{solve_parity, ParityGame, ParitySolution};

use crate::arena::{Arena, Player, Pos, Strategy};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::formula::Formula;

/// Bit set of the automaton atoms present in a label set.
pub fn letter_of(atoms: &[String], labels: &BTreeSet<String>) -> u64 {
    let mut l = 0;
    for (i, a) in atoms.iter().enumerate() {
        if labels.contains(a) {
            l |= 1 << i;
        }
    }
    l
}

/// Distinct letters occurring in the arena, in increasing order.
pub fn arena_letters(arena: &Arena, atoms: &[String]) -> Vec<u64> {
    let set: BTreeSet<u64> = arena
        .positions()
        .map(|v| letter_of(atoms, arena.labels(v)))
        .collect();
    set.into_iter().collect()
}

/// Product of an arena with a parity automaton. Node `(v, d)` means the play
/// has just entered `v` and the automaton has read its label.
pub struct ProductGame {
    pub game: ParityGame,
    pub nodes: Vec<(Pos, usize)>,
}

pub fn build_product_game(
    arena: &Arena,
    dpa: &Parity,
    protagonist: Player,
    cap: usize,
) -> Result<ProductGame> {
    let letter = |v: Pos| -> Result<u64> {
        let l = letter_of(&dpa.atoms, arena.labels(v));
        if dpa.letter_index(l).is_none() {
            let labels: Vec<&str> = arena.labels(v).iter().map(String::as_str).collect();
            return Err(Error::UnlabeledLetter(labels.join(",")));
        }
        Ok(l)
    };
    let mut nodes: Vec<(Pos, usize)> = Vec::new();
    let mut index: HashMap<(Pos, usize), usize> = HashMap::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    let v0 = arena.initial();
    let d0 = dpa.step(dpa.initial, letter(v0)?).unwrap();
    index.insert((v0, d0), 0);
    nodes.push((v0, d0));
    succ.push(Vec::new());
    queue.push_back(0);
    while let Some(x) = queue.pop_front() {
        let (v, d) = nodes[x];
        for &w in arena.successors(v) {
            let e = dpa.step(d, letter(w)?).unwrap();
            let y = match index.get(&(w, e)) {
                Some(&y) => y,
                None => {
                    let y = nodes.len();
                    if y >= cap {
                        return Err(Error::CapExceeded {
                            what: "product nodes",
                            reached: y + 1,
                            cap,
                            stage: None,
                        });
                    }
                    index.insert((w, e), y);
                    nodes.push((w, e));
                    succ.push(Vec::new());
                    queue.push_back(y);
                    y
                }
            };
            succ[x].push(y);
        }
    }
    let game = ParityGame {
        owner: nodes
            .iter()
            .map(|&(v, _)| if arena.owner(v) == protagonist { 0 } else { 1 })
            .collect(),
        priority: nodes.iter().map(|&(_, d)| dpa.priority[d]).collect(),
        succ,
        initial: 0,
    };
    Ok(ProductGame { game, nodes })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LtlGameStats {
    pub nba_states: usize,
    pub dpa_states: usize,
    pub product_nodes: usize,
}

#[derive(Clone, Debug)]
pub struct LtlGameResult {
    pub strategy: Option<Strategy>,
    pub stats: LtlGameStats,
}

/// Decides whether `protagonist` can force `psi` on every play, returning a
/// finite-memory winning strategy whose memory is the parity automaton state.
pub fn solve_ltl_game(arena: &Arena, psi: &Formula, protagonist: Player, caps: &Caps) -> Result<LtlGameResult> {
    let nba = ltl_to_nba(psi, caps.max_nba_states)?;
    let letters = arena_letters(arena, &nba.atoms);
    let dpa = determinize(&nba, &letters, caps.max_dpa_states)?;
    let product = build_product_game(arena, &dpa, protagonist, caps.max_product)?;
    let stats = LtlGameStats {
        nba_states: nba.len(),
        dpa_states: dpa.len(),
        product_nodes: product.nodes.len(),
    };
    let sol = solve_parity(&product.game);
    if sol.winner[product.game.initial] != 0 {
        return Ok(LtlGameResult { strategy: None, stats });
    }
    let memory: Vec<String> = (0..dpa.len()).map(|d| format!("d{d}")).collect();
    let mut sigma = Strategy::new(protagonist, memory, dpa.initial);
    let letter = |v: Pos| letter_of(&dpa.atoms, arena.labels(v));
    let v0 = arena.initial();
    sigma.set_update(dpa.initial, v0, product.nodes[0].1);
    for (x, &(v, d)) in product.nodes.iter().enumerate() {
        for &w in arena.successors(v) {
            sigma.set_update(d, w, dpa.step(d, letter(w)).unwrap());
        }
        if arena.owner(v) == protagonist && sol.winner[x] == 0 {
            if let Some(y) = sol.strategy[x] {
                sigma.set_choice(d, v, product.nodes[y].0);
            }
        }
    }
    Ok(LtlGameResult {
        strategy: Some(sigma),
        stats,
    })
}

/// For every position `v`, whether all infinite traces from `v` satisfy `psi`.
pub fn universal_sat(arena: &Arena, psi: &Formula, caps: &Caps) -> Result<Vec<bool>> {
    let nba = ltl_to_nba(&psi.clone().not(), caps.max_nba_states)?;
    let k = nba.len();
    let n = arena.len();
    if n.saturating_mul(k.max(1)) > caps.max_product {
        return Err(Error::CapExceeded {
            what: "product nodes",
            reached: n * k,
            cap: caps.max_product,
            stage: None,
        });
    }
    let id = |v: Pos, s: usize| v * k + s;
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n * k];
    for v in arena.positions() {
        let l = letter_of(&nba.atoms, arena.labels(v));
        for s in 0..k {
            for t in nba.post(s, l) {
                for &w in arena.successors(v) {
                    succ[id(v, s)].push(id(w, t));
                }
            }
        }
    }
    let accepting: Vec<bool> = (0..n * k).map(|x| nba.accepting[x % k]).collect();
    let bad = graph::nonempty_nodes(&succ, &accepting);
    Ok(arena
        .positions()
        .map(|v| !nba.initial.iter().any(|&s| bad[id(v, s)]))
        .collect())
}

/// Whether every infinite trace starting at `v` satisfies `psi`.
pub fn position_models_ltl(arena: &Arena, v: Pos, psi: &Formula, caps: &Caps) -> Result<bool> {
    Ok(universal_sat(arena, psi, caps)?[v])
}
