//! Parity games (min-even) solved by enumerating positional strategies.

use super::universal::components;
use crate::ltlgame::parity::ParityGame;

/// Winner (0 or 1) of every node, or `None` if Player 0 has more than `limit`
/// positional strategies.
pub fn parity_bruteforce(game: &ParityGame, limit: usize) -> Option<Vec<u8>> {
    let n = game.len();
    let mine: Vec<usize> = (0..n).filter(|&v| game.owner[v] == 0).collect();
    let mut count = 1usize;
    for &v in &mine {
        count = count.checked_mul(game.succ[v].len().max(1))?;
        if count > limit {
            return None;
        }
    }
    let mut wins = vec![false; n];
    let mut choice = vec![0usize; mine.len()];
    loop {
        let mut succ = game.succ.clone();
        for (i, &v) in mine.iter().enumerate() {
            if let Some(&w) = game.succ[v].get(choice[i]) {
                succ[v] = vec![w];
            }
        }
        let lose = opponent_wins(game, &succ);
        for v in 0..n {
            wins[v] |= !lose[v];
        }
        let mut i = 0;
        loop {
            if i == mine.len() {
                return Some(wins.iter().map(|&w| if w { 0 } else { 1 }).collect());
            }
            choice[i] += 1;
            if choice[i] < game.succ[mine[i]].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Nodes from which some path reaches a cycle whose least priority is odd.
/// Dead ends count as lost for their owner.
fn opponent_wins(game: &ParityGame, succ: &[Vec<usize>]) -> Vec<bool> {
    let n = game.len();
    let mut bad = vec![false; n];
    for v in 0..n {
        if succ[v].is_empty() {
            bad[v] = game.owner[v] == 0;
        }
    }
    let mut odd: Vec<u32> = game.priority.iter().copied().filter(|p| p % 2 == 1).collect();
    odd.sort();
    odd.dedup();
    for p in odd {
        let sub: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                if game.priority[v] < p {
                    Vec::new()
                } else {
                    succ[v].iter().copied().filter(|&w| game.priority[w] >= p).collect()
                }
            })
            .collect();
        let comp = components(&sub);
        for v in 0..n {
            if game.priority[v] == p && sub[v].iter().any(|&w| comp[w] == comp[v]) {
                bad[v] = true;
            }
        }
    }
    // Backward reachability of bad nodes, skipping Player 1 dead ends.
    let mut pred = vec![Vec::new(); n];
    for v in 0..n {
        for &w in &succ[v] {
            pred[w].push(v);
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| bad[v]).collect();
    while let Some(w) = stack.pop() {
        for &v in &pred[w] {
            if !bad[v] {
                bad[v] = true;
                stack.push(v);
            }
        }
    }
    bad
}
