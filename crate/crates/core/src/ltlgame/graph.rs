//! Explicit-graph routines for Büchi emptiness.

use std::collections::VecDeque;

/// Strongly connected components (iterative Tarjan). Returns the component
/// index of every node; components are numbered in reverse topological order.
pub fn scc(succ: &[Vec<usize>]) -> Vec<usize> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut ncomp = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&(v, i)) = call.last() {
            if i < succ[v].len() {
                let w = succ[v][i];
                call.last_mut().unwrap().1 += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

/// Nodes lying on a cycle through an accepting node.
pub fn accepting_cycle_nodes(succ: &[Vec<usize>], accepting: &[bool]) -> Vec<bool> {
    let comp = scc(succ);
    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut nontrivial = vec![false; ncomp];
    let mut has_acc = vec![false; ncomp];
    for v in 0..succ.len() {
        if accepting[v] {
            has_acc[comp[v]] = true;
        }
        for &w in &succ[v] {
            if comp[w] == comp[v] {
                nontrivial[comp[v]] = true;
            }
        }
    }
    (0..succ.len())
        .map(|v| nontrivial[comp[v]] && has_acc[comp[v]])
        .collect()
}

/// Nodes from which some accepting cycle is reachable.
pub fn nonempty_nodes(succ: &[Vec<usize>], accepting: &[bool]) -> Vec<bool> {
    let mut good = accepting_cycle_nodes(succ, accepting);
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); succ.len()];
    for (v, ws) in succ.iter().enumerate() {
        for &w in ws {
            pred[w].push(v);
        }
    }
    let mut stack: Vec<usize> = (0..succ.len()).filter(|&v| good[v]).collect();
    while let Some(w) = stack.pop() {
        for &v in &pred[w] {
            if !good[v] {
                good[v] = true;
                stack.push(v);
            }
        }
    }
    good
}

pub fn has_accepting_lasso(succ: &[Vec<usize>], accepting: &[bool], roots: &[usize]) -> bool {
    let good = nonempty_nodes(succ, accepting);
    roots.iter().any(|&r| good[r])
}

/// A short accepting lasso: BFS-shortest stem from the roots to an accepting
/// node on an accepting cycle, then the BFS-shortest cycle back to it.
/// The stem ends with the accepting node; the cycle starts after it and ends
/// with it.
pub fn shortest_accepting_lasso(
    succ: &[Vec<usize>],
    accepting: &[bool],
    roots: &[usize],
) -> Option<(Vec<usize>, Vec<usize>)> {
    let on_cycle = accepting_cycle_nodes(succ, accepting);
    let comp = scc(succ);
    let n = succ.len();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &r in roots {
        if !seen[r] {
            seen[r] = true;
            queue.push_back(r);
        }
    }
    let mut target = None;
    while let Some(v) = queue.pop_front() {
        if accepting[v] && on_cycle[v] {
            target = Some(v);
            break;
        }
        for &w in &succ[v] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    let a = target?;
    let mut stem = vec![a];
    let mut x = a;
    while parent[x] != usize::MAX {
        x = parent[x];
        stem.push(x);
    }
    stem.reverse();
    // Shortest cycle a → … → a inside the component of a.
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &w in &succ[a] {
        if comp[w] == comp[a] && !seen[w] {
            seen[w] = true;
            parent[w] = a;
            queue.push_back(w);
        }
    }
    while let Some(v) = queue.pop_front() {
        if v == a {
            break;
        }
        for &w in &succ[v] {
            if comp[w] == comp[a] && !seen[w] {
                seen[w] = true;
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut cycle = vec![a];
    let mut x = parent[a];
    while x != a {
        cycle.push(x);
        x = parent[x];
    }
    cycle.reverse();
    Some((stem, cycle))
}
