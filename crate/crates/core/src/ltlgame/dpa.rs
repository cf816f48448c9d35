//! Determinization of Büchi automata into min-even parity automata with
//! Safra trees in the compact, age-ordered naming style.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use super::nba::Buchi;
use crate::error::{Error, Result};

/// Deterministic parity automaton over an explicit list of letters.
/// Priorities are state based (the priority of the transition that entered
/// the state); a run is accepting iff the least priority seen infinitely
/// often is even.
#[derive(Clone, Debug)]
pub struct Parity {
    pub atoms: Vec<String>,
    pub letters: Vec<u64>,
    letter_index: HashMap<u64, usize>,
    pub initial: usize,
    pub trans: Vec<Vec<usize>>,
    pub priority: Vec<u32>,
    pub state_names: Vec<String>,
}

impl Parity {
    pub fn len(&self) -> usize {
        self.trans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trans.is_empty()
    }

    pub fn letter_index(&self, letter: u64) -> Option<usize> {
        self.letter_index.get(&letter).copied()
    }

    pub fn step(&self, d: usize, letter: u64) -> Option<usize> {
        self.letter_index(letter).map(|li| self.trans[d][li])
    }

    pub fn accepts_lasso(&self, stem: &[u64], cycle: &[u64]) -> Option<bool> {
        let mut d = self.initial;
        for &l in stem {
            d = self.step(d, l)?;
        }
        // Iterate the cycle until the state at the cycle start repeats.
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut prios: Vec<u32> = Vec::new();
        let mut round = 0;
        loop {
            if let Some(&r) = seen.get(&d) {
                let m = prios[r * cycle.len()..].iter().copied().min()?;
                return Some(m % 2 == 0);
            }
            seen.insert(d, round);
            for &l in cycle {
                d = self.step(d, l)?;
                prios.push(self.priority[d]);
            }
            round += 1;
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "dpa states={} letters={} initial={}",
            self.len(),
            self.letters.len(),
            self.initial
        );
        for d in 0..self.len() {
            let _ = writeln!(out, "state {d} priority={} {}", self.priority[d], self.state_names[d]);
            for (li, &e) in self.trans[d].iter().enumerate() {
                let _ = writeln!(out, "trans {d} {} {e}", letter_text(&self.atoms, self.letters[li]));
            }
        }
        out
    }
}

pub(crate) fn letter_text(atoms: &[String], letter: u64) -> String {
    let set: Vec<&str> = atoms
        .iter()
        .enumerate()
        .filter(|(i, _)| letter >> i & 1 == 1)
        .map(|(_, a)| a.as_str())
        .collect();
    format!("{{{}}}", set.join(","))
}

#[derive(Clone, Debug)]
struct Node {
    name: u32,
    label: Vec<u32>,
    children: Vec<Node>,
}

/// Pre-order serialization: (name, label, number of children).
type Tree = Vec<(u32, Vec<u32>, u32)>;

fn flatten(n: &Node, out: &mut Tree) {
    out.push((n.name, n.label.clone(), n.children.len() as u32));
    for c in &n.children {
        flatten(c, out);
    }
}

fn unflatten(t: &Tree, i: &mut usize) -> Node {
    let (name, label, k) = t[*i].clone();
    *i += 1;
    let children = (0..k).map(|_| unflatten(t, i)).collect();
    Node {
        name,
        label,
        children,
    }
}

struct Ctx<'a> {
    post: &'a [Vec<Vec<u32>>],
    accepting: &'a [bool],
    letter: usize,
    fresh: u32,
    removed: Vec<u32>,
    green: Vec<u32>,
}

impl Ctx<'_> {
    fn spawn(&mut self, n: &mut Node) {
        for c in &mut n.children {
            self.spawn(c);
        }
        let acc: Vec<u32> = n
            .label
            .iter()
            .copied()
            .filter(|&s| self.accepting[s as usize])
            .collect();
        if !acc.is_empty() {
            n.children.push(Node {
                name: self.fresh,
                label: acc,
                children: Vec::new(),
            });
            self.fresh += 1;
        }
    }

    fn update(&self, n: &mut Node) {
        let mut set = BTreeSet::new();
        for &s in &n.label {
            set.extend(self.post[s as usize][self.letter].iter().copied());
        }
        n.label = set.into_iter().collect();
        for c in &mut n.children {
            self.update(c);
        }
    }

    fn prune(n: &mut Node, forbidden: &BTreeSet<u32>) {
        n.label.retain(|s| !forbidden.contains(s));
        let mut acc = forbidden.clone();
        for c in &mut n.children {
            Self::prune(c, &acc);
            acc.extend(c.label.iter().copied());
        }
    }

    fn collect_names(n: &Node, out: &mut Vec<u32>) {
        out.push(n.name);
        for c in &n.children {
            Self::collect_names(c, out);
        }
    }

    fn remove_empty(&mut self, n: &mut Node) {
        let mut kept = Vec::new();
        for mut c in std::mem::take(&mut n.children) {
            if c.label.is_empty() {
                Self::collect_names(&c, &mut self.removed);
            } else {
                self.remove_empty(&mut c);
                kept.push(c);
            }
        }
        n.children = kept;
    }

    fn merge(&mut self, n: &mut Node) {
        if n.children.is_empty() {
            return;
        }
        let union: BTreeSet<u32> = n.children.iter().flat_map(|c| c.label.iter().copied()).collect();
        if union.len() == n.label.len() {
            for c in &n.children {
                Self::collect_names(c, &mut self.removed);
            }
            n.children.clear();
            self.green.push(n.name);
        } else {
            for c in &mut n.children {
                self.merge(c);
            }
        }
    }
}

fn rename(n: &mut Node, map: &HashMap<u32, u32>) {
    n.name = map[&n.name];
    for c in &mut n.children {
        rename(c, map);
    }
}

/// Determinizes over the given letters. Each letter is a bit set over `nba.atoms`.
pub fn determinize(nba: &Buchi, letters: &[u64], cap: usize) -> Result<Parity> {
    let n = nba.len();
    let post: Vec<Vec<Vec<u32>>> = (0..n)
        .map(|s| {
            letters
                .iter()
                .map(|&l| {
                    let set: BTreeSet<u32> = nba.post(s, l).map(|t| t as u32).collect();
                    set.into_iter().collect()
                })
                .collect()
        })
        .collect();
    let none_priority = 2 * (2 * n as u32 + 2) + 1;

    let mut states: Vec<(Option<Tree>, u32)> = Vec::new();
    let mut index: HashMap<(Option<Tree>, u32), usize> = HashMap::new();
    let mut trans: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();

    let init_tree: Option<Tree> = if nba.initial.is_empty() {
        None
    } else {
        let mut label: Vec<u32> = nba.initial.iter().map(|&s| s as u32).collect();
        label.sort_unstable();
        label.dedup();
        Some(vec![(1, label, 0)])
    };
    let init_key = (init_tree, if nba.initial.is_empty() { 1 } else { none_priority });
    index.insert(init_key.clone(), 0);
    states.push(init_key);
    trans.push(Vec::new());
    queue.push_back(0);

    while let Some(d) = queue.pop_front() {
        let tree = states[d].0.clone();
        let mut row = Vec::with_capacity(letters.len());
        for li in 0..letters.len() {
            let key = match &tree {
                None => (None, 1),
                Some(t) => {
                    let mut root = unflatten(t, &mut 0);
                    let fresh = t.iter().map(|x| x.0).max().unwrap_or(0) + 1;
                    let mut ctx = Ctx {
                        post: &post,
                        accepting: &nba.accepting,
                        letter: li,
                        fresh,
                        removed: Vec::new(),
                        green: Vec::new(),
                    };
                    ctx.spawn(&mut root);
                    ctx.update(&mut root);
                    Ctx::prune(&mut root, &BTreeSet::new());
                    if root.label.is_empty() {
                        (None, 1)
                    } else {
                        ctx.remove_empty(&mut root);
                        ctx.merge(&mut root);
                        let r = ctx.removed.iter().copied().min();
                        let g = ctx.green.iter().copied().min();
                        let prio = match (r, g) {
                            (Some(r), Some(g)) if r < g => 2 * r - 1,
                            (Some(r), None) => 2 * r - 1,
                            (_, Some(g)) => 2 * g,
                            (None, None) => none_priority,
                        };
                        let mut names = Vec::new();
                        Ctx::collect_names(&root, &mut names);
                        names.sort_unstable();
                        let map: HashMap<u32, u32> =
                            names.iter().enumerate().map(|(i, &x)| (x, i as u32 + 1)).collect();
                        rename(&mut root, &map);
                        let mut flat = Vec::new();
                        flatten(&root, &mut flat);
                        (Some(flat), prio)
                    }
                }
            };
            let e = match index.get(&key) {
                Some(&e) => e,
                None => {
                    let e = states.len();
                    if e >= cap {
                        return Err(Error::CapExceeded {
                            what: "DPA states",
                            reached: e + 1,
                            cap,
                            stage: None,
                        });
                    }
                    index.insert(key.clone(), e);
                    states.push(key);
                    trans.push(Vec::new());
                    queue.push_back(e);
                    e
                }
            };
            row.push(e);
        }
        trans[d] = row;
    }

    let state_names = states
        .iter()
        .map(|(t, _)| match t {
            None => "sink".to_string(),
            Some(t) => t
                .iter()
                .map(|(name, label, k)| {
                    let l: Vec<String> = label.iter().map(|s| s.to_string()).collect();
                    format!("{name}:{{{}}}/{k}", l.join(","))
                })
                .collect::<Vec<_>>()
                .join(" "),
        })
        .collect();
    Ok(Parity {
        atoms: nba.atoms.clone(),
        letters: letters.to_vec(),
        letter_index: letters.iter().enumerate().map(|(i, &l)| (l, i)).collect(),
        initial: 0,
        trans,
        priority: states.iter().map(|s| s.1).collect(),
        state_names,
    })
}

/// Every letter over `atoms` bits.
pub fn all_letters(atoms: usize) -> Vec<u64> {
    (0..1u64 << atoms).collect()
}
