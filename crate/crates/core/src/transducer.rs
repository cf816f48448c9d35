//! Finite state transducers over position alphabets.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::arena::{split_list, strip_comment, Arena, Player, Pos};
use crate::error::{Error, Result};

/// Alphabet letter: a position index of some arena.
pub type Sym = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: usize,
    pub input: Option<Sym>,
    pub output: Option<Sym>,
    pub to: usize,
}

/// A nondeterministic two-tape automaton with ε moves on either tape.
#[derive(Clone, Debug)]
pub struct Transducer {
    name: String,
    states: Vec<String>,
    initial: usize,
    accepting: Vec<bool>,
    trans: Vec<Transition>,
    out: Vec<Vec<usize>>,
    by_input: Vec<HashMap<Option<Sym>, Vec<usize>>>,
    input_size: usize,
    output_size: usize,
}

#[derive(Debug)]
pub struct TransducerBuilder {
    name: String,
    states: Vec<String>,
    accepting: Vec<bool>,
    initial: usize,
    trans: Vec<Transition>,
    seen: HashSet<Transition>,
    input_size: usize,
    output_size: usize,
}

impl TransducerBuilder {
    pub fn new(name: impl Into<String>, input_size: usize, output_size: usize) -> Self {
        TransducerBuilder {
            name: name.into(),
            states: Vec::new(),
            accepting: Vec::new(),
            initial: 0,
            trans: Vec::new(),
            seen: HashSet::new(),
            input_size,
            output_size,
        }
    }

    pub fn add_state(&mut self, name: impl Into<String>, accepting: bool) -> usize {
        self.states.push(name.into());
        self.accepting.push(accepting);
        self.states.len() - 1
    }

    pub fn set_initial(&mut self, q: usize) {
        self.initial = q;
    }

    pub fn set_accepting(&mut self, q: usize, acc: bool) {
        self.accepting[q] = acc;
    }

    pub fn add_transition(&mut self, from: usize, input: Option<Sym>, output: Option<Sym>, to: usize) {
        debug_assert!(input.map_or(true, |a| a < self.input_size));
        debug_assert!(output.map_or(true, |b| b < self.output_size));
        let t = Transition {
            from,
            input,
            output,
            to,
        };
        if self.seen.insert(t) {
            self.trans.push(t);
        }
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn build(self) -> Transducer {
        assert!(!self.states.is_empty(), "transducer without states");
        let n = self.states.len();
        let mut out = vec![Vec::new(); n];
        let mut by_input: Vec<HashMap<Option<Sym>, Vec<usize>>> = vec![HashMap::new(); n];
        for (i, t) in self.trans.iter().enumerate() {
            out[t.from].push(i);
            by_input[t.from].entry(t.input).or_default().push(i);
        }
        Transducer {
            name: self.name,
            states: self.states,
            initial: self.initial,
            accepting: self.accepting,
            trans: self.trans,
            out,
            by_input,
            input_size: self.input_size,
            output_size: self.output_size,
        }
    }
}

impl Transducer {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn transition_count(&self) -> usize {
        self.trans.len()
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.trans
    }

    /// Transitions leaving `q`.
    pub fn outgoing(&self, q: usize) -> impl Iterator<Item = &Transition> {
        self.out[q].iter().map(move |&i| &self.trans[i])
    }

    /// Transitions leaving `q` that read exactly `input` (`None` for ε).
    pub fn reading(&self, q: usize, input: Option<Sym>) -> impl Iterator<Item = &Transition> {
        self.by_input[q]
            .get(&input)
            .into_iter()
            .flatten()
            .map(move |&i| &self.trans[i])
    }

    /// The identity relation on words over `0..n`.
    pub fn identity(n: usize) -> Transducer {
        let mut b = TransducerBuilder::new("id", n, n);
        let q = b.add_state("q", true);
        for v in 0..n {
            b.add_transition(q, Some(v), Some(v), q);
        }
        b.build()
    }

    /// Equal-length pairs of words over `0..n`.
    pub fn equal_length(n: usize) -> Transducer {
        let mut b = TransducerBuilder::new("len", n, n);
        let q = b.add_state("q", true);
        for u in 0..n {
            for v in 0..n {
                b.add_transition(q, Some(u), Some(v), q);
            }
        }
        b.build()
    }

    /// Whether the pair of words belongs to the recognized relation.
    pub fn recognizes(&self, w: &[Sym], w2: &[Sym]) -> bool {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert((self.initial, 0usize, 0usize));
        queue.push_back((self.initial, 0usize, 0usize));
        while let Some((q, i, j)) = queue.pop_front() {
            if i == w.len() && j == w2.len() && self.accepting[q] {
                return true;
            }
            for t in self.outgoing(q) {
                let i2 = match t.input {
                    None => i,
                    Some(a) if i < w.len() && w[i] == a => i + 1,
                    Some(_) => continue,
                };
                let j2 = match t.output {
                    None => j,
                    Some(b) if j < w2.len() && w2[j] == b => j + 1,
                    Some(_) => continue,
                };
                if seen.insert((t.to, i2, j2)) {
                    queue.push_back((t.to, i2, j2));
                }
            }
        }
        false
    }

    /// Relational composition: pairs (u, w) with (u, x) in `self` and (x, w) in `other`.
    pub fn compose(&self, other: &Transducer) -> Result<Transducer> {
        if self.output_size != other.input_size {
            return Err(Error::AlphabetMismatch(format!(
                "output alphabet of {} has {} letters, input alphabet of {} has {}",
                self.name, self.output_size, other.name, other.input_size
            )));
        }
        let mut b = TransducerBuilder::new(
            format!("{}.{}", self.name, other.name),
            self.input_size,
            other.output_size,
        );
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut intern = |b: &mut TransducerBuilder, q1: usize, q2: usize, queue: &mut VecDeque<(usize, usize)>| {
            *index.entry((q1, q2)).or_insert_with(|| {
                queue.push_back((q1, q2));
                b.add_state(
                    format!("{},{}", self.states[q1], other.states[q2]),
                    self.accepting[q1] && other.accepting[q2],
                )
            })
        };
        let start = intern(&mut b, self.initial, other.initial, &mut queue);
        b.set_initial(start);
        while let Some((q1, q2)) = queue.pop_front() {
            let src = intern(&mut b, q1, q2, &mut queue);
            for t1 in self.outgoing(q1) {
                match t1.output {
                    None => {
                        let dst = intern(&mut b, t1.to, q2, &mut queue);
                        b.add_transition(src, t1.input, None, dst);
                    }
                    Some(x) => {
                        for t2 in other.reading(q2, Some(x)) {
                            let dst = intern(&mut b, t1.to, t2.to, &mut queue);
                            b.add_transition(src, t1.input, t2.output, dst);
                        }
                    }
                }
            }
            for t2 in other.reading(q2, None) {
                let dst = intern(&mut b, q1, t2.to, &mut queue);
                b.add_transition(src, None, t2.output, dst);
            }
        }
        Ok(b.build())
    }

    /// Drops states that are unreachable or cannot reach an accepting state.
    pub fn trim(&self) -> Transducer {
        let n = self.states.len();
        let mut fwd = vec![false; n];
        fwd[self.initial] = true;
        let mut stack = vec![self.initial];
        while let Some(q) = stack.pop() {
            for t in self.outgoing(q) {
                if !fwd[t.to] {
                    fwd[t.to] = true;
                    stack.push(t.to);
                }
            }
        }
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for t in &self.trans {
            rev[t.to].push(t.from);
        }
        let mut bwd = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&q| self.accepting[q]).collect();
        for &q in &stack {
            bwd[q] = true;
        }
        while let Some(q) = stack.pop() {
            for &p in &rev[q] {
                if !bwd[p] {
                    bwd[p] = true;
                    stack.push(p);
                }
            }
        }
        let keep: Vec<bool> = (0..n)
            .map(|q| q == self.initial || (fwd[q] && bwd[q]))
            .collect();
        let mut b = TransducerBuilder::new(self.name.clone(), self.input_size, self.output_size);
        let mut map = vec![usize::MAX; n];
        for q in 0..n {
            if keep[q] {
                map[q] = b.add_state(self.states[q].clone(), self.accepting[q]);
            }
        }
        b.set_initial(map[self.initial]);
        for t in &self.trans {
            if keep[t.from] && keep[t.to] {
                b.add_transition(map[t.from], t.input, t.output, map[t.to]);
            }
        }
        b.build()
    }

    /// Intersects the relation with pairs of plays of `arena` (both tapes are
    /// read through a prefix automaton of the arena).
    pub fn restrict_to_plays(&self, arena: &Arena) -> Transducer {
        assert_eq!(self.input_size, arena.len());
        assert_eq!(self.output_size, arena.len());
        let step = |prefix: Option<Pos>, v: Pos| -> bool {
            match prefix {
                None => v == arena.initial(),
                Some(u) => arena.is_edge(u, v),
            }
        };
        let name_of = |p: Option<Pos>| p.map_or("^", |v| arena.id(v));
        let mut b = TransducerBuilder::new(self.name.clone(), self.input_size, self.output_size);
        let mut index: HashMap<(Option<Pos>, usize, Option<Pos>), usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut intern = |b: &mut TransducerBuilder,
                          key: (Option<Pos>, usize, Option<Pos>),
                          queue: &mut VecDeque<(Option<Pos>, usize, Option<Pos>)>| {
            *index.entry(key).or_insert_with(|| {
                queue.push_back(key);
                let (ip, q, op) = key;
                b.add_state(
                    format!("{}[{}|{}]", self.states[q], name_of(ip), name_of(op)),
                    self.accepting[q] && ip.is_some() && op.is_some(),
                )
            })
        };
        let start = intern(&mut b, (None, self.initial, None), &mut queue);
        b.set_initial(start);
        while let Some(key @ (ip, q, op)) = queue.pop_front() {
            let src = intern(&mut b, key, &mut queue);
            for t in self.outgoing(q) {
                let ip2 = match t.input {
                    None => ip,
                    Some(v) if step(ip, v) => Some(v),
                    Some(_) => continue,
                };
                let op2 = match t.output {
                    None => op,
                    Some(v) if step(op, v) => Some(v),
                    Some(_) => continue,
                };
                let dst = intern(&mut b, (ip2, t.to, op2), &mut queue);
                b.add_transition(src, t.input, t.output, dst);
            }
        }
        b.build().trim()
    }

    pub fn parse(text: &str, arena: &Arena) -> Result<Transducer> {
        let mut name = None;
        let mut states: Vec<(String, bool, bool)> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut trans = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            match words[0] {
                "fst" => name = Some(words.get(1).copied().unwrap_or("fst").to_string()),
                "state" => {
                    let id = words
                        .get(1)
                        .ok_or_else(|| Error::parse(line_no, "`state` needs an identifier"))?;
                    let mut init = false;
                    let mut acc = false;
                    for w in &words[2..] {
                        match *w {
                            "init" => init = true,
                            "accept" => acc = true,
                            other => return Err(Error::parse(line_no, format!("unexpected `{other}`"))),
                        }
                    }
                    if index.insert(id.to_string(), states.len()).is_some() {
                        return Err(Error::parse(line_no, format!("duplicate state `{id}`")));
                    }
                    states.push((id.to_string(), init, acc));
                }
                "trans" => {
                    if words.len() != 5 {
                        return Err(Error::parse(line_no, "expected `trans <q> <in|-> <out|-> <q'>`"));
                    }
                    trans.push((line_no, words[1..].iter().map(|s| s.to_string()).collect::<Vec<_>>()));
                }
                other => return Err(Error::parse(line_no, format!("unknown directive `{other}`"))),
            }
        }
        let name = name.ok_or_else(|| Error::parse(1, "missing `fst` header"))?;
        if states.is_empty() {
            return Err(Error::parse(1, "transducer has no states"));
        }
        let mut b = TransducerBuilder::new(name, arena.len(), arena.len());
        let mut inits = Vec::new();
        for (id, init, acc) in &states {
            let q = b.add_state(id.clone(), *acc);
            if *init {
                inits.push(q);
            }
        }
        match inits.as_slice() {
            [q] => b.set_initial(*q),
            [] => return Err(Error::parse(1, "no initial state")),
            _ => return Err(Error::parse(1, "more than one initial state")),
        }
        let sym = |line_no: usize, s: &str| -> Result<Option<Sym>> {
            if s == "-" {
                Ok(None)
            } else {
                arena
                    .position(s)
                    .map(Some)
                    .ok_or_else(|| Error::parse(line_no, format!("unknown position `{s}`")))
            }
        };
        let state = |line_no: usize, s: &str| -> Result<usize> {
            index
                .get(s)
                .copied()
                .ok_or_else(|| Error::parse(line_no, format!("unknown state `{s}`")))
        };
        for (line_no, w) in trans {
            let from = state(line_no, &w[0])?;
            let to = state(line_no, &w[3])?;
            b.add_transition(from, sym(line_no, &w[1])?, sym(line_no, &w[2])?, to);
        }
        Ok(b.build())
    }

    /// Text form, with letters named after positions of the given arenas.
    pub fn to_text(&self, input: &Arena, output: &Arena) -> String {
        let mut out = format!("fst {}\n", self.name);
        for (q, s) in self.states.iter().enumerate() {
            out.push_str("state ");
            out.push_str(s);
            if q == self.initial {
                out.push_str(" init");
            }
            if self.accepting[q] {
                out.push_str(" accept");
            }
            out.push('\n');
        }
        for t in &self.trans {
            out.push_str(&format!(
                "trans {} {} {} {}\n",
                self.states[t.from],
                t.input.map_or("-", |v| input.id(v)),
                t.output.map_or("-", |v| output.id(v)),
                self.states[t.to]
            ));
        }
        out
    }

    /// Renames states to `q0, q1, …` so that the text form is unambiguous.
    pub fn with_plain_state_names(&self) -> Transducer {
        let mut t = self.clone();
        t.states = (0..t.states.len()).map(|i| format!("q{i}")).collect();
        t
    }
}

/// The observation-equivalence relation on plays: position-wise related by
/// `obs_classes` on Player 1 positions. A Player 2 position is compared through
/// the classes of its predecessors and, when `by_action`, its label set.
pub fn build_observation_equivalence(
    arena: &Arena,
    obs_classes: &[Vec<Pos>],
    by_action: bool,
) -> Result<Transducer> {
    let mut class = vec![usize::MAX; arena.len()];
    for (c, members) in obs_classes.iter().enumerate() {
        for &v in members {
            if arena.owner(v) != Player::P1 {
                return Err(Error::Encoder(format!(
                    "observation class contains Player 2 position {}",
                    arena.id(v)
                )));
            }
            if class[v] != usize::MAX {
                return Err(Error::Encoder(format!(
                    "position {} occurs in two observation classes",
                    arena.id(v)
                )));
            }
            class[v] = c;
        }
    }
    for v in arena.positions() {
        if arena.owner(v) == Player::P1 && class[v] == usize::MAX {
            return Err(Error::Encoder(format!(
                "Player 1 position {} is in no observation class",
                arena.id(v)
            )));
        }
    }
    let mut preds: Vec<Vec<Pos>> = vec![Vec::new(); arena.len()];
    for u in arena.positions() {
        for &v in arena.successors(u) {
            preds[v].push(u);
        }
    }
    let related = |u: Pos, v: Pos| -> bool {
        if arena.owner(u) != arena.owner(v) {
            return false;
        }
        if u == v {
            return true;
        }
        match arena.owner(u) {
            Player::P1 => class[u] == class[v],
            Player::P2 => {
                (!by_action || arena.labels(u) == arena.labels(v))
                    && preds[u]
                        .iter()
                        .any(|&a| preds[v].iter().any(|&b| class[a] == class[b]))
            }
        }
    };
    let mut b = TransducerBuilder::new("obs", arena.len(), arena.len());
    let q = b.add_state("q", true);
    for u in arena.positions() {
        for v in arena.positions() {
            if related(u, v) {
                b.add_transition(q, Some(u), Some(v), q);
            }
        }
    }
    Ok(b.build().restrict_to_plays(arena))
}

/// The relation `h(ρ) = h(ρ')` on plays for a letter-to-letter-or-ε morphism `h`.
pub fn build_morphism_equivalence(arena: &Arena, h: &[Option<String>]) -> Result<Transducer> {
    if h.len() != arena.len() {
        return Err(Error::Encoder(format!(
            "morphism defined on {} positions, arena has {}",
            h.len(),
            arena.len()
        )));
    }
    let mut b = TransducerBuilder::new("morph", arena.len(), arena.len());
    let q = b.add_state("q", true);
    for u in arena.positions() {
        match &h[u] {
            None => {
                b.add_transition(q, Some(u), None, q);
                b.add_transition(q, None, Some(u), q);
            }
            Some(o) => {
                for v in arena.positions() {
                    if h[v].as_ref() == Some(o) {
                        b.add_transition(q, Some(u), Some(v), q);
                    }
                }
            }
        }
    }
    Ok(b.build().restrict_to_plays(arena))
}

/// Parses a list of observation classes `a,b;c;d,e` against position names.
pub fn parse_classes(text: &str, arena: &Arena) -> Result<Vec<Vec<Pos>>> {
    text.split(';')
        .filter(|c| !c.trim().is_empty())
        .map(|c| {
            split_list(c)
                .map(|id| arena.position(id).ok_or_else(|| Error::UnknownPosition(id.into())))
                .collect()
        })
        .collect()
}
