//! Parity games (min-even) and Zielonka's recursive algorithm.

use std::fmt::Write as _;

/// Player 0 wins a play iff the least priority occurring infinitely often is even.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityGame {
    pub owner: Vec<u8>,
    pub succ: Vec<Vec<usize>>,
    pub priority: Vec<u32>,
    pub initial: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParitySolution {
    pub winner: Vec<u8>,
    /// For every node owned by its winner, a successor that keeps the play winning.
    pub strategy: Vec<Option<usize>>,
}

impl ParityGame {
    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "parity nodes={} initial={}", self.len(), self.initial);
        for v in 0..self.len() {
            let succ: Vec<String> = self.succ[v].iter().map(|w| w.to_string()).collect();
            let _ = writeln!(
                out,
                "node {v} owner={} priority={} succ={}",
                self.owner[v],
                self.priority[v],
                succ.join(",")
            );
        }
        out
    }
}

struct Solver<'a> {
    game: &'a ParityGame,
    pred: Vec<Vec<usize>>,
    strategy: Vec<Option<usize>>,
}

impl Solver<'_> {
    /// Attractor of `target` for player `alpha` inside `inside`; records
    /// attractor moves for `alpha` nodes outside `target`.
    fn attractor(&mut self, inside: &[bool], target: &[usize], alpha: u8) -> Vec<bool> {
        let g = self.game;
        let n = g.len();
        let mut in_attr = vec![false; n];
        let mut rank = vec![usize::MAX; n];
        let mut count: Vec<usize> = vec![0; n];
        let mut queue = std::collections::VecDeque::new();
        for &t in target {
            if inside[t] && !in_attr[t] {
                in_attr[t] = true;
                rank[t] = 0;
                queue.push_back(t);
            }
        }
        let mut added = Vec::new();
        while let Some(u) = queue.pop_front() {
            for &w in &self.pred[u] {
                if !inside[w] || in_attr[w] {
                    continue;
                }
                let attract = if g.owner[w] == alpha {
                    true
                } else {
                    if count[w] == 0 {
                        count[w] = g.succ[w].iter().filter(|&&x| inside[x]).count();
                    }
                    count[w] -= 1;
                    count[w] == 0
                };
                if attract {
                    in_attr[w] = true;
                    rank[w] = rank[u] + 1;
                    queue.push_back(w);
                    added.push(w);
                }
            }
        }
        for w in added {
            if g.owner[w] == alpha {
                self.strategy[w] = g.succ[w]
                    .iter()
                    .copied()
                    .find(|&x| inside[x] && in_attr[x] && rank[x] < rank[w]);
            }
        }
        in_attr
    }

    /// Returns the winner of every node inside the subgame.
    fn solve(&mut self, inside: &[bool]) -> Vec<u8> {
        let g = self.game;
        let n = g.len();
        let mut winner = vec![u8::MAX; n];
        let nodes: Vec<usize> = (0..n).filter(|&v| inside[v]).collect();
        if nodes.is_empty() {
            return winner;
        }
        let p = nodes.iter().map(|&v| g.priority[v]).min().unwrap();
        let alpha = (p % 2) as u8;
        let top: Vec<usize> = nodes.iter().copied().filter(|&v| g.priority[v] == p).collect();
        let a = self.attractor(inside, &top, alpha);
        let rest: Vec<bool> = (0..n).map(|v| inside[v] && !a[v]).collect();
        let sub = self.solve(&rest);
        let opponent_wins_somewhere = nodes.iter().any(|&v| rest[v] && sub[v] == 1 - alpha);
        if !opponent_wins_somewhere {
            for &v in &nodes {
                winner[v] = alpha;
            }
            for &v in &top {
                if g.owner[v] == alpha {
                    self.strategy[v] = g.succ[v].iter().copied().find(|&x| inside[x]);
                }
            }
            return winner;
        }
        let lost: Vec<usize> = nodes
            .iter()
            .copied()
            .filter(|&v| rest[v] && sub[v] == 1 - alpha)
            .collect();
        let b = self.attractor(inside, &lost, 1 - alpha);
        let rest2: Vec<bool> = (0..n).map(|v| inside[v] && !b[v]).collect();
        let sub2 = self.solve(&rest2);
        for &v in &nodes {
            winner[v] = if b[v] { 1 - alpha } else { sub2[v] };
        }
        winner
    }
}

/// Solves the game; the strategy of each player is positional and winning on its region.
pub fn solve_parity(game: &ParityGame) -> ParitySolution {
    let n = game.len();
    let mut pred = vec![Vec::new(); n];
    for v in 0..n {
        for &w in &game.succ[v] {
            pred[w].push(v);
        }
    }
    let mut solver = Solver {
        game,
        pred,
        strategy: vec![None; n],
    };
    let winner = solver.solve(&vec![true; n]);
    let mut strategy = solver.strategy;
    for v in 0..n {
        if game.owner[v] != winner[v] {
            strategy[v] = None;
        }
    }
    ParitySolution { winner, strategy }
}
