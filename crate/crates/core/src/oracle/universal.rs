//! "ψ holds on every infinite path from v" on a finite labelled graph, by a
//! tableau of maximal truth assignments to the temporal subformulas of ψ and
//! a search for a self-fulfilling strongly connected component.

use std::collections::{BTreeSet, HashMap};

use crate::formula::Formula;

#[derive(Clone, Copy)]
enum Node {
    True,
    Atom(usize),
    Not(usize),
    And(usize, usize),
    Next(usize, usize),
    Until(usize, usize, usize),
}

struct Closure {
    nodes: Vec<Node>,
    atoms: Vec<String>,
    temporal: usize,
}

fn closure(phi: &Formula) -> Closure {
    fn go(f: &Formula, c: &mut Closure, memo: &mut HashMap<Formula, usize>) -> usize {
        if let Some(&i) = memo.get(f) {
            return i;
        }
        let node = match f {
            Formula::True => Node::True,
            Formula::Atom(p) => {
                let k = match c.atoms.iter().position(|a| a == p) {
                    Some(k) => k,
                    None => {
                        c.atoms.push(p.clone());
                        c.atoms.len() - 1
                    }
                };
                Node::Atom(k)
            }
            Formula::Not(a) => Node::Not(go(a, c, memo)),
            Formula::And(a, b) => {
                let x = go(a, c, memo);
                Node::And(x, go(b, c, memo))
            }
            Formula::Next(a) => {
                let x = go(a, c, memo);
                c.temporal += 1;
                Node::Next(x, c.temporal - 1)
            }
            Formula::Until(a, b) => {
                let x = go(a, c, memo);
                let y = go(b, c, memo);
                c.temporal += 1;
                Node::Until(x, y, c.temporal - 1)
            }
            Formula::R(_) => panic!("universal check needs an LTL formula"),
        };
        c.nodes.push(node);
        memo.insert(f.clone(), c.nodes.len() - 1);
        c.nodes.len() - 1
    }
    let mut c = Closure {
        nodes: Vec::new(),
        atoms: Vec::new(),
        temporal: 0,
    };
    go(phi, &mut c, &mut HashMap::new());
    c
}

impl Closure {
    fn values(&self, props: &[bool], bits: u64) -> Vec<bool> {
        let mut v = vec![false; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            v[i] = match *n {
                Node::True => true,
                Node::Atom(k) => props[k],
                Node::Not(a) => !v[a],
                Node::And(a, b) => v[a] && v[b],
                Node::Next(_, t) | Node::Until(_, _, t) => bits >> t & 1 == 1,
            };
        }
        v
    }

    fn locally_consistent(&self, v: &[bool]) -> bool {
        self.nodes.iter().enumerate().all(|(i, n)| match *n {
            Node::Until(a, b, _) => {
                if v[i] {
                    v[a] || v[b]
                } else {
                    !v[b]
                }
            }
            _ => true,
        })
    }

    fn step_ok(&self, v: &[bool], w: &[bool]) -> bool {
        self.nodes.iter().enumerate().all(|(i, n)| match *n {
            Node::Next(a, _) => v[i] == w[a],
            Node::Until(a, b, _) => {
                if v[i] && !v[b] {
                    w[i]
                } else if !v[i] && v[a] {
                    !w[i]
                } else {
                    true
                }
            }
            _ => true,
        })
    }
}

/// Kosaraju's algorithm; returns the component index of every node.
pub(crate) fn components(succ: &[Vec<usize>]) -> Vec<usize> {
    let n = succ.len();
    let mut pred = vec![Vec::new(); n];
    for (u, ws) in succ.iter().enumerate() {
        for &w in ws {
            pred[w].push(u);
        }
    }
    let mut seen = vec![false; n];
    let mut finish = Vec::with_capacity(n);
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![(s, 0usize)];
        while let Some(&mut (u, ref mut i)) = stack.last_mut() {
            if *i < succ[u].len() {
                let w = succ[u][*i];
                *i += 1;
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w, 0));
                }
            } else {
                finish.push(u);
                stack.pop();
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut c = 0;
    for &s in finish.iter().rev() {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = c;
        while let Some(u) = stack.pop() {
            for &w in &pred[u] {
                if comp[w] == usize::MAX {
                    comp[w] = c;
                    stack.push(w);
                }
            }
        }
        c += 1;
    }
    comp
}

/// For each graph node, whether every infinite path from it satisfies `psi`.
/// `None` when the tableau would need more than `2^max_temporal` assignments per node.
pub fn holds_on_all_paths(
    succ: &[Vec<usize>],
    labels: &[&BTreeSet<String>],
    psi: &Formula,
    max_temporal: usize,
) -> Option<Vec<bool>> {
    let c = closure(psi);
    if c.temporal > max_temporal {
        return None;
    }
    let root = c.nodes.len() - 1;
    let n = succ.len();
    // Tableau nodes (v, bits) that are locally consistent.
    let mut tab: Vec<(usize, Vec<bool>)> = Vec::new();
    let mut of_node: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        let props: Vec<bool> = c.atoms.iter().map(|a| labels[v].contains(a)).collect();
        for bits in 0..(1u64 << c.temporal) {
            let vals = c.values(&props, bits);
            if c.locally_consistent(&vals) {
                of_node[v].push(tab.len());
                tab.push((v, vals));
            }
        }
    }
    let mut tsucc: Vec<Vec<usize>> = vec![Vec::new(); tab.len()];
    for (x, (v, vals)) in tab.iter().enumerate() {
        for &w in &succ[*v] {
            for &y in &of_node[w] {
                if c.step_ok(vals, &tab[y].1) {
                    tsucc[x].push(y);
                }
            }
        }
    }
    let comp = components(&tsucc);
    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut nontrivial = vec![false; ncomp];
    for (x, ys) in tsucc.iter().enumerate() {
        if ys.iter().any(|&y| comp[y] == comp[x]) {
            nontrivial[comp[x]] = true;
        }
    }
    let untils: Vec<(usize, usize)> = c
        .nodes
        .iter()
        .enumerate()
        .filter_map(|(i, nd)| match *nd {
            Node::Until(_, b, _) => Some((i, b)),
            _ => None,
        })
        .collect();
    let mut fulfilled = vec![vec![false; untils.len()]; ncomp];
    for (vals, &k) in tab.iter().map(|t| &t.1).zip(&comp) {
        for (j, &(u, b)) in untils.iter().enumerate() {
            if !vals[u] || vals[b] {
                fulfilled[k][j] = true;
            }
        }
    }
    let good: Vec<bool> = (0..ncomp)
        .map(|k| nontrivial[k] && fulfilled[k].iter().all(|&f| f))
        .collect();
    // Nodes from which a good component is reachable.
    let mut pred = vec![Vec::new(); tab.len()];
    for (x, ys) in tsucc.iter().enumerate() {
        for &y in ys {
            pred[y].push(x);
        }
    }
    let mut live = vec![false; tab.len()];
    let mut stack: Vec<usize> = (0..tab.len()).filter(|&x| good[comp[x]]).collect();
    for &x in &stack {
        live[x] = true;
    }
    while let Some(y) = stack.pop() {
        for &x in &pred[y] {
            if !live[x] {
                live[x] = true;
                stack.push(x);
            }
        }
    }
    Some(
        (0..n)
            .map(|v| !of_node[v].iter().any(|&x| live[x] && !tab[x].1[root]))
            .collect(),
    )
}
