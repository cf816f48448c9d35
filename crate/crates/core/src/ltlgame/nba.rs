//! LTL to Büchi automata by tableau expansion of formulas in negation normal form.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::formula::Formula;

/// Letters are bit sets over [`Buchi::atoms`]; a guard requires the `pos`
/// bits and forbids the `neg` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Guard {
    pub pos: u64,
    pub neg: u64,
}

impl Guard {
    pub fn matches(self, letter: u64) -> bool {
        letter & self.pos == self.pos && letter & self.neg == 0
    }
}

/// A nondeterministic Büchi automaton with state-based acceptance. A run
/// in state `s` reads the current letter and moves along a matching guard.
#[derive(Clone, Debug)]
pub struct Buchi {
    pub atoms: Vec<String>,
    pub state_names: Vec<String>,
    pub initial: Vec<usize>,
    pub accepting: Vec<bool>,
    pub trans: Vec<Vec<(Guard, usize)>>,
}

impl Buchi {
    pub fn len(&self) -> usize {
        self.state_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state_names.is_empty()
    }

    /// Letter of a set of propositions; names outside the alphabet are ignored.
    pub fn letter<'a>(&self, props: impl IntoIterator<Item = &'a String>) -> u64 {
        let mut l = 0;
        for p in props {
            if let Ok(i) = self.atoms.binary_search(p) {
                l |= 1 << i;
            }
        }
        l
    }

    pub fn post(&self, s: usize, letter: u64) -> impl Iterator<Item = usize> + '_ {
        self.trans[s]
            .iter()
            .filter(move |(g, _)| g.matches(letter))
            .map(|&(_, t)| t)
    }

    /// Membership of the ultimately periodic word `stem · cycle^ω`.
    pub fn accepts_lasso(&self, stem: &[u64], cycle: &[u64]) -> bool {
        assert!(!cycle.is_empty());
        // Nodes (state, offset into stem+cycle); offsets wrap back to the cycle start.
        let total = stem.len() + cycle.len();
        let letter = |i: usize| if i < stem.len() { stem[i] } else { cycle[i - stem.len()] };
        let next_off = |i: usize| if i + 1 == total { stem.len() } else { i + 1 };
        let n = self.len() * total;
        let id = |s: usize, i: usize| s * total + i;
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for s in 0..self.len() {
            for i in 0..total {
                for t in self.post(s, letter(i)) {
                    succ[id(s, i)].push(id(t, next_off(i)));
                }
            }
        }
        let accepting: Vec<bool> = (0..n).map(|x| self.accepting[x / total]).collect();
        let roots: Vec<usize> = self.initial.iter().map(|&s| id(s, 0)).collect();
        super::graph::has_accepting_lasso(&succ, &accepting, &roots)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "nba states={} atoms={}", self.len(), self.atoms.join(","));
        for (s, name) in self.state_names.iter().enumerate() {
            let _ = writeln!(
                out,
                "state {s} {}{}{}",
                name,
                if self.initial.contains(&s) { " init" } else { "" },
                if self.accepting[s] { " accept" } else { "" }
            );
        }
        for (s, ts) in self.trans.iter().enumerate() {
            for (g, t) in ts {
                let _ = writeln!(out, "trans {s} {} {t}", self.guard_text(*g));
            }
        }
        out
    }

    pub fn guard_text(&self, g: Guard) -> String {
        let mut lits = Vec::new();
        for (i, a) in self.atoms.iter().enumerate() {
            if g.pos >> i & 1 == 1 {
                lits.push(a.clone());
            }
            if g.neg >> i & 1 == 1 {
                lits.push(format!("!{a}"));
            }
        }
        if lits.is_empty() {
            "true".into()
        } else {
            lits.join("&")
        }
    }
}

type Id = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum N {
    True,
    False,
    Lit(usize, bool),
    And(Id, Id),
    Or(Id, Id),
    Next(Id),
    Until(Id, Id),
    Release(Id, Id),
}

struct Nnf {
    nodes: Vec<N>,
    index: HashMap<N, Id>,
}

impl Nnf {
    fn intern(&mut self, n: N) -> Id {
        if let Some(&i) = self.index.get(&n) {
            return i;
        }
        self.nodes.push(n);
        self.index.insert(n, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn tt(&mut self) -> Id {
        self.intern(N::True)
    }

    fn ff(&mut self) -> Id {
        self.intern(N::False)
    }

    fn and(&mut self, a: Id, b: Id) -> Id {
        match (self.nodes[a], self.nodes[b]) {
            (N::False, _) | (_, N::False) => self.ff(),
            (N::True, _) => b,
            (_, N::True) => a,
            _ if a == b => a,
            _ => self.intern(N::And(a.min(b), a.max(b))),
        }
    }

    fn or(&mut self, a: Id, b: Id) -> Id {
        match (self.nodes[a], self.nodes[b]) {
            (N::True, _) | (_, N::True) => self.tt(),
            (N::False, _) => b,
            (_, N::False) => a,
            _ if a == b => a,
            _ => self.intern(N::Or(a.min(b), a.max(b))),
        }
    }

    fn build(&mut self, f: &Formula, neg: bool, atoms: &[String]) -> Result<Id> {
        Ok(match f {
            Formula::True => {
                if neg {
                    self.ff()
                } else {
                    self.tt()
                }
            }
            Formula::Atom(p) => {
                let i = atoms.binary_search(p).expect("atom collected");
                self.intern(N::Lit(i, !neg))
            }
            Formula::Not(a) => self.build(a, !neg, atoms)?,
            Formula::And(a, b) => {
                let x = self.build(a, neg, atoms)?;
                let y = self.build(b, neg, atoms)?;
                if neg {
                    self.or(x, y)
                } else {
                    self.and(x, y)
                }
            }
            Formula::Next(a) => {
                let x = self.build(a, neg, atoms)?;
                match self.nodes[x] {
                    N::True | N::False => x,
                    _ => self.intern(N::Next(x)),
                }
            }
            Formula::Until(a, b) => {
                let x = self.build(a, neg, atoms)?;
                let y = self.build(b, neg, atoms)?;
                if neg {
                    // ¬(a U b) = ¬a R ¬b
                    match self.nodes[y] {
                        N::False => self.ff(),
                        N::True => y,
                        _ => self.intern(N::Release(x, y)),
                    }
                } else {
                    match self.nodes[y] {
                        N::True => y,
                        N::False => self.ff(),
                        _ => self.intern(N::Until(x, y)),
                    }
                }
            }
            Formula::R(_) => return Err(Error::NotLtl(f.r_depth())),
        })
    }

    fn text(&self, i: Id, atoms: &[String]) -> String {
        match self.nodes[i] {
            N::True => "true".into(),
            N::False => "false".into(),
            N::Lit(a, true) => atoms[a].clone(),
            N::Lit(a, false) => format!("!{}", atoms[a]),
            N::And(a, b) => format!("({} & {})", self.text(a, atoms), self.text(b, atoms)),
            N::Or(a, b) => format!("({} | {})", self.text(a, atoms), self.text(b, atoms)),
            N::Next(a) => format!("X {}", self.text(a, atoms)),
            N::Until(a, b) => format!("({} U {})", self.text(a, atoms), self.text(b, atoms)),
            N::Release(a, b) => format!("({} R {})", self.text(a, atoms), self.text(b, atoms)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Term {
    pos: u64,
    neg: u64,
    next: BTreeSet<Id>,
    postponed: BTreeSet<Id>,
}

/// Expands a set of obligations into one-step terms.
fn expand(nnf: &Nnf, state: &BTreeSet<Id>) -> Vec<Term> {
    let mut out = BTreeSet::new();
    let start = Term {
        pos: 0,
        neg: 0,
        next: BTreeSet::new(),
        postponed: BTreeSet::new(),
    };
    let todo: Vec<Id> = state.iter().copied().collect();
    let mut stack = vec![(todo, BTreeSet::<Id>::new(), start)];
    'branch: while let Some((mut todo, mut done, mut term)) = stack.pop() {
        while let Some(f) = todo.pop() {
            if !done.insert(f) {
                continue;
            }
            match nnf.nodes[f] {
                N::True => {}
                N::False => continue 'branch,
                N::Lit(a, true) => {
                    if term.neg >> a & 1 == 1 {
                        continue 'branch;
                    }
                    term.pos |= 1 << a;
                }
                N::Lit(a, false) => {
                    if term.pos >> a & 1 == 1 {
                        continue 'branch;
                    }
                    term.neg |= 1 << a;
                }
                N::And(a, b) => {
                    todo.push(a);
                    todo.push(b);
                }
                N::Or(a, b) => {
                    let mut alt = todo.clone();
                    alt.push(b);
                    stack.push((alt, done.clone(), term.clone()));
                    todo.push(a);
                }
                N::Next(a) => {
                    term.next.insert(a);
                }
                N::Until(a, b) => {
                    let mut alt = todo.clone();
                    alt.push(a);
                    let mut alt_term = term.clone();
                    alt_term.next.insert(f);
                    alt_term.postponed.insert(f);
                    stack.push((alt, done.clone(), alt_term));
                    todo.push(b);
                }
                N::Release(a, b) => {
                    let mut alt = todo.clone();
                    alt.push(b);
                    let mut alt_term = term.clone();
                    alt_term.next.insert(f);
                    stack.push((alt, done.clone(), alt_term));
                    todo.push(a);
                    todo.push(b);
                }
            }
        }
        out.insert(term);
    }
    out.into_iter().collect()
}

/// Translates an LTL formula into a Büchi automaton over its atoms.
pub fn ltl_to_nba(psi: &Formula, cap: usize) -> Result<Buchi> {
    if psi.r_depth() > 0 {
        return Err(Error::NotLtl(psi.r_depth()));
    }
    let atoms: Vec<String> = psi.atoms().into_iter().collect();
    if atoms.len() > 64 {
        return Err(Error::CapExceeded {
            what: "automaton propositions",
            reached: atoms.len(),
            cap: 64,
            stage: None,
        });
    }
    let mut nnf = Nnf {
        nodes: Vec::new(),
        index: HashMap::new(),
    };
    let root = nnf.build(psi, false, &atoms)?;
    let untils: Vec<Id> = (0..nnf.nodes.len())
        .filter(|&i| matches!(nnf.nodes[i], N::Until(..)))
        .collect();
    let k = untils.len();

    // Generalized automaton over obligation sets, degeneralized with a counter.
    let mut sets: Vec<BTreeSet<Id>> = Vec::new();
    let mut set_index: HashMap<BTreeSet<Id>, usize> = HashMap::new();
    let mut expansions: Vec<Vec<Term>> = Vec::new();
    let mut states: Vec<(usize, usize)> = Vec::new();
    let mut state_index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut trans: Vec<Vec<(Guard, usize)>> = Vec::new();
    let mut queue = VecDeque::new();

    let root_set: BTreeSet<Id> = match nnf.nodes[root] {
        N::True => BTreeSet::new(),
        _ => [root].into_iter().collect(),
    };
    let mut intern_set = |s: BTreeSet<Id>, sets: &mut Vec<BTreeSet<Id>>, expansions: &mut Vec<Vec<Term>>| -> usize {
        if let Some(&i) = set_index.get(&s) {
            return i;
        }
        let i = sets.len();
        expansions.push(expand(&nnf, &s));
        set_index.insert(s.clone(), i);
        sets.push(s);
        i
    };
    let root_is_false = matches!(nnf.nodes[root], N::False);
    let s0 = intern_set(root_set, &mut sets, &mut expansions);
    let mut initial = Vec::new();
    if !root_is_false {
        states.push((s0, 0));
        state_index.insert((s0, 0), 0);
        trans.push(Vec::new());
        queue.push_back(0);
        initial.push(0);
    }
    while let Some(x) = queue.pop_front() {
        let (set, counter) = states[x];
        let base = if counter == k { 0 } else { counter };
        let terms = expansions[set].clone();
        let mut edges = BTreeSet::new();
        for term in terms {
            let mut j = base;
            while j < k && !term.postponed.contains(&untils[j]) {
                j += 1;
            }
            let target_set = intern_set(term.next.clone(), &mut sets, &mut expansions);
            let key = (target_set, j);
            let y = match state_index.get(&key) {
                Some(&y) => y,
                None => {
                    let y = states.len();
                    if y >= cap {
                        return Err(Error::CapExceeded {
                            what: "NBA states",
                            reached: y + 1,
                            cap,
                            stage: None,
                        });
                    }
                    states.push(key);
                    state_index.insert(key, y);
                    trans.push(Vec::new());
                    queue.push_back(y);
                    y
                }
            };
            edges.insert((
                Guard {
                    pos: term.pos,
                    neg: term.neg,
                },
                y,
            ));
        }
        trans[x] = edges.into_iter().collect();
    }
    let state_names = states
        .iter()
        .map(|&(set, c)| {
            let fs: Vec<String> = sets[set].iter().map(|&f| nnf.text(f, &atoms)).collect();
            format!("{{{}}}/{}", fs.join(", "), c)
        })
        .collect();
    let accepting = states.iter().map(|&(_, c)| c == k).collect();
    Ok(Buchi {
        atoms,
        state_names,
        initial,
        accepting,
        trans,
    })
}
