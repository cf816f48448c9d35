//! Game arenas, plays and finite-memory strategies.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

pub type Pos = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    P1,
    P2,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::P1 => Player::P2,
            Player::P2 => Player::P1,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Player::P1 => 1,
            Player::P2 => 2,
        }
    }

    pub fn from_number(n: &str) -> Option<Player> {
        match n {
            "1" => Some(Player::P1),
            "2" => Some(Player::P2),
            _ => None,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// A finite labeled game graph. Positions are indexed in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arena {
    name: String,
    ids: Vec<String>,
    owner: Vec<Player>,
    labels: Vec<BTreeSet<String>>,
    succ: Vec<Vec<Pos>>,
    initial: Pos,
    index: HashMap<String, Pos>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    NonAlternating { src: String, dst: String },
    DeadEnd { pos: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NonAlternating { src, dst } => {
                write!(f, "non-alternating edge {src} -> {dst}")
            }
            Diagnostic::DeadEnd { pos } => write!(f, "dead end at {pos}"),
        }
    }
}

/// Incremental construction of an [`Arena`].
#[derive(Debug, Default)]
pub struct ArenaBuilder {
    name: String,
    ids: Vec<String>,
    owner: Vec<Player>,
    labels: Vec<BTreeSet<String>>,
    succ: Vec<Vec<Pos>>,
    initial: Option<Pos>,
    index: HashMap<String, Pos>,
}

impl ArenaBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        ArenaBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn add_position<I, S>(&mut self, id: impl Into<String>, owner: Player, labels: I) -> Result<Pos>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let id = id.into();
        if self.index.contains_key(&id) {
            return Err(Error::Duplicate(id));
        }
        let p = self.ids.len();
        self.index.insert(id.clone(), p);
        self.ids.push(id);
        self.owner.push(owner);
        self.labels.push(labels.into_iter().map(Into::into).collect());
        self.succ.push(Vec::new());
        Ok(p)
    }

    pub fn position(&self, id: &str) -> Option<Pos> {
        self.index.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn add_label(&mut self, p: Pos, label: impl Into<String>) {
        self.labels[p].insert(label.into());
    }

    pub fn add_edge(&mut self, src: Pos, dst: Pos) {
        if !self.succ[src].contains(&dst) {
            self.succ[src].push(dst);
        }
    }

    pub fn set_initial(&mut self, p: Pos) {
        self.initial = Some(p);
    }

    pub fn build(mut self) -> Result<Arena> {
        let initial = self
            .initial
            .ok_or_else(|| Error::InvalidArena("no initial position".into()))?;
        for s in &mut self.succ {
            s.sort_unstable();
        }
        Ok(Arena {
            name: self.name,
            ids: self.ids,
            owner: self.owner,
            labels: self.labels,
            succ: self.succ,
            initial,
            index: self.index,
        })
    }
}

impl Arena {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn positions(&self) -> std::ops::Range<Pos> {
        0..self.ids.len()
    }

    pub fn id(&self, p: Pos) -> &str {
        &self.ids[p]
    }

    pub fn position(&self, id: &str) -> Option<Pos> {
        self.index.get(id).copied()
    }

    pub fn owner(&self, p: Pos) -> Player {
        self.owner[p]
    }

    pub fn labels(&self, p: Pos) -> &BTreeSet<String> {
        &self.labels[p]
    }

    /// Successors in increasing index order.
    pub fn successors(&self, p: Pos) -> &[Pos] {
        &self.succ[p]
    }

    pub fn is_edge(&self, src: Pos, dst: Pos) -> bool {
        self.succ[src].binary_search(&dst).is_ok()
    }

    pub fn initial(&self) -> Pos {
        self.initial
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    /// All propositions occurring in some label.
    pub fn propositions(&self) -> BTreeSet<String> {
        self.labels.iter().flatten().cloned().collect()
    }

    /// Copy of this arena with one extra label added at the given positions.
    pub fn with_label(&self, label: &str, at: impl IntoIterator<Item = Pos>) -> Arena {
        let mut a = self.clone();
        for p in at {
            a.labels[p].insert(label.to_string());
        }
        a
    }

    pub fn rename(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for p in self.positions() {
            if self.succ[p].is_empty() {
                out.push(Diagnostic::DeadEnd {
                    pos: self.ids[p].clone(),
                });
            }
            for &q in &self.succ[p] {
                if self.owner[p] == self.owner[q] {
                    out.push(Diagnostic::NonAlternating {
                        src: self.ids[p].clone(),
                        dst: self.ids[q].clone(),
                    });
                }
            }
        }
        out
    }

    /// Fails with the first diagnostic if the arena is not well formed.
    pub fn ensure_valid(&self) -> Result<()> {
        let diags = self.validate();
        if diags.is_empty() {
            Ok(())
        } else {
            let msg: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
            Err(Error::InvalidArena(msg.join("; ")))
        }
    }

    pub fn is_play(&self, play: &[Pos]) -> bool {
        !play.is_empty()
            && play[0] == self.initial
            && play.windows(2).all(|w| self.is_edge(w[0], w[1]))
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(p) = stack.pop() {
            for &q in &self.succ[p] {
                if !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
        seen
    }

    /// Every play with exactly `length` positions, in lexicographic index order.
    pub fn enumerate_plays(&self, length: usize) -> Vec<Vec<Pos>> {
        let mut out = Vec::new();
        if length == 0 {
            return out;
        }
        let mut cur = vec![self.initial];
        self.extend_plays(&mut cur, length, &mut out);
        out
    }

    fn extend_plays(&self, cur: &mut Vec<Pos>, length: usize, out: &mut Vec<Vec<Pos>>) {
        if cur.len() == length {
            out.push(cur.clone());
            return;
        }
        let last = *cur.last().unwrap();
        for &q in &self.succ[last] {
            cur.push(q);
            self.extend_plays(cur, length, out);
            cur.pop();
        }
    }

    pub fn ids_of(&self, play: &[Pos]) -> Vec<&str> {
        play.iter().map(|&p| self.id(p)).collect()
    }

    pub fn parse(text: &str) -> Result<Arena> {
        let mut b: Option<ArenaBuilder> = None;
        let mut edges = Vec::new();
        let mut init = None;
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let head = words.next().unwrap();
            match head {
                "arena" => {
                    if b.is_some() {
                        return Err(Error::parse(line_no, "duplicate `arena` header"));
                    }
                    b = Some(ArenaBuilder::new(words.next().unwrap_or("arena")));
                }
                "pos" => {
                    let b = b
                        .as_mut()
                        .ok_or_else(|| Error::parse(line_no, "missing `arena` header"))?;
                    let id = words
                        .next()
                        .ok_or_else(|| Error::parse(line_no, "`pos` needs an identifier"))?;
                    let mut owner = None;
                    let mut labels = Vec::new();
                    for w in words {
                        if let Some(o) = w.strip_prefix("owner=") {
                            owner = Some(Player::from_number(o).ok_or_else(|| {
                                Error::parse(line_no, format!("bad owner `{o}`"))
                            })?);
                        } else if let Some(l) = w.strip_prefix("labels=") {
                            labels.extend(split_list(l).map(str::to_string));
                        } else {
                            return Err(Error::parse(line_no, format!("unexpected `{w}`")));
                        }
                    }
                    let owner = owner.ok_or_else(|| Error::parse(line_no, "missing owner="))?;
                    b.add_position(id, owner, labels)
                        .map_err(|e| Error::parse(line_no, e.to_string()))?;
                }
                "edge" => {
                    let (s, d) = match (words.next(), words.next(), words.next()) {
                        (Some(s), Some(d), None) => (s.to_string(), d.to_string()),
                        _ => return Err(Error::parse(line_no, "expected `edge <src> <dst>`")),
                    };
                    edges.push((line_no, s, d));
                }
                "init" => {
                    let id = words
                        .next()
                        .ok_or_else(|| Error::parse(line_no, "`init` needs an identifier"))?;
                    init = Some((line_no, id.to_string()));
                }
                other => return Err(Error::parse(line_no, format!("unknown directive `{other}`"))),
            }
        }
        let mut b = b.ok_or_else(|| Error::parse(1, "missing `arena` header"))?;
        for (line_no, s, d) in edges {
            let sp = b
                .position(&s)
                .ok_or_else(|| Error::parse(line_no, format!("unknown position `{s}`")))?;
            let dp = b
                .position(&d)
                .ok_or_else(|| Error::parse(line_no, format!("unknown position `{d}`")))?;
            b.add_edge(sp, dp);
        }
        let (line_no, id) = init.ok_or_else(|| Error::parse(1, "missing `init`"))?;
        let ip = b
            .position(&id)
            .ok_or_else(|| Error::parse(line_no, format!("unknown position `{id}`")))?;
        b.set_initial(ip);
        b.build()
    }
}

impl fmt::Display for Arena {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "arena {}", self.name)?;
        for p in self.positions() {
            let labels: Vec<&str> = self.labels[p].iter().map(String::as_str).collect();
            writeln!(
                f,
                "pos {} owner={} labels={}",
                self.ids[p],
                self.owner[p],
                labels.join(",")
            )?;
        }
        for p in self.positions() {
            for &q in &self.succ[p] {
                writeln!(f, "edge {} {}", self.ids[p], self.ids[q])?;
            }
        }
        writeln!(f, "init {}", self.ids[self.initial])
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        // `#` is also legal inside generated atom names, so only a leading or
        // whitespace-preceded `#` starts a comment.
        Some(0) => "",
        Some(_) => {
            let mut cut = line.len();
            let bytes = line.as_bytes();
            for i in 0..bytes.len() {
                if bytes[i] == b'#' && (i == 0 || bytes[i - 1].is_ascii_whitespace()) {
                    cut = i;
                    break;
                }
            }
            line[..cut].trim()
        }
        None => line.trim(),
    }
}

pub(crate) fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty())
}

/// A finite-memory strategy. Memory is updated when a position is entered,
/// starting with the initial position; the choice at an owned position uses
/// the memory reached after entering it. Missing update entries keep the
/// memory unchanged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    player: Player,
    memory: Vec<String>,
    initial: usize,
    update: HashMap<(usize, Pos), usize>,
    choice: HashMap<(usize, Pos), Pos>,
}

impl Strategy {
    pub fn new(player: Player, memory: Vec<String>, initial: usize) -> Self {
        assert!(initial < memory.len());
        Strategy {
            player,
            memory,
            initial,
            update: HashMap::new(),
            choice: HashMap::new(),
        }
    }

    /// Memoryless strategy from a position → successor map.
    pub fn positional(player: Player, choices: impl IntoIterator<Item = (Pos, Pos)>) -> Self {
        let mut s = Strategy::new(player, vec!["m0".into()], 0);
        for (v, w) in choices {
            s.set_choice(0, v, w);
        }
        s
    }

    /// The strategy of a player with nothing to choose, or that leaves every
    /// owned position to its lowest successor.
    pub fn first_successor(player: Player, arena: &Arena) -> Self {
        Strategy::positional(
            player,
            arena
                .positions()
                .filter(|&v| arena.owner(v) == player)
                .map(|v| (v, arena.successors(v)[0])),
        )
    }

    pub fn player(&self) -> Player {
        self.player
    }

    pub fn memory_size(&self) -> usize {
        self.memory.len()
    }

    pub fn memory_name(&self, m: usize) -> &str {
        &self.memory[m]
    }

    pub fn initial_memory(&self) -> usize {
        self.initial
    }

    pub fn set_update(&mut self, m: usize, v: Pos, m2: usize) {
        if m2 == m {
            self.update.remove(&(m, v));
        } else {
            self.update.insert((m, v), m2);
        }
    }

    pub fn set_choice(&mut self, m: usize, v: Pos, w: Pos) {
        self.choice.insert((m, v), w);
    }

    pub fn update(&self, m: usize, v: Pos) -> usize {
        self.update.get(&(m, v)).copied().unwrap_or(m)
    }

    pub fn choice(&self, m: usize, v: Pos) -> Option<Pos> {
        self.choice.get(&(m, v)).copied()
    }

    /// Memory after reading a whole play prefix.
    pub fn memory_after(&self, prefix: &[Pos]) -> usize {
        prefix.iter().fold(self.initial, |m, &v| self.update(m, v))
    }

    /// The move prescribed after `prefix`, if its last position is owned by the player.
    pub fn next_move(&self, arena: &Arena, prefix: &[Pos]) -> Option<Pos> {
        let last = *prefix.last()?;
        if arena.owner(last) != self.player {
            return None;
        }
        self.choice(self.memory_after(prefix), last)
    }

    /// Whether a finite play agrees with the strategy at every owned step.
    pub fn is_consistent(&self, arena: &Arena, play: &[Pos]) -> bool {
        let mut m = self.initial;
        for (i, &v) in play.iter().enumerate() {
            m = self.update(m, v);
            if i + 1 < play.len() && arena.owner(v) == self.player {
                if self.choice(m, v) != Some(play[i + 1]) {
                    return false;
                }
            }
        }
        true
    }

    /// Checks the strategy against the arena on every reachable (memory, position) pair.
    pub fn validate(&self, arena: &Arena) -> Result<()> {
        outcome_arena(arena, self).map(|_| ())
    }

    pub fn parse(text: &str, arena: &Arena) -> Result<Strategy> {
        let mut s: Option<Strategy> = None;
        let mut mem_index: HashMap<String, usize> = HashMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            match words[0] {
                "strategy" => {
                    let mut player = None;
                    let mut memory = Vec::new();
                    let mut init = None;
                    for w in &words[1..] {
                        if let Some(p) = w.strip_prefix("player=") {
                            player = Player::from_number(p);
                        } else if let Some(m) = w.strip_prefix("memory=") {
                            memory = split_list(m).map(str::to_string).collect();
                        } else if let Some(m) = w.strip_prefix("init=") {
                            init = Some(m.to_string());
                        } else {
                            return Err(Error::parse(line_no, format!("unexpected `{w}`")));
                        }
                    }
                    let player = player.ok_or_else(|| Error::parse(line_no, "missing player="))?;
                    if memory.is_empty() {
                        memory.push("m0".into());
                    }
                    for (i, m) in memory.iter().enumerate() {
                        if mem_index.insert(m.clone(), i).is_some() {
                            return Err(Error::parse(line_no, format!("duplicate memory `{m}`")));
                        }
                    }
                    let init = match init {
                        Some(m) => *mem_index
                            .get(&m)
                            .ok_or_else(|| Error::parse(line_no, format!("unknown memory `{m}`")))?,
                        None => 0,
                    };
                    s = Some(Strategy::new(player, memory, init));
                }
                kw @ ("upd" | "choose") => {
                    let s = s
                        .as_mut()
                        .ok_or_else(|| Error::parse(line_no, "missing `strategy` header"))?;
                    if words.len() != 5 || words[3] != "->" {
                        return Err(Error::parse(line_no, format!("expected `{kw} <m> <pos> -> <x>`")));
                    }
                    let m = *mem_index
                        .get(words[1])
                        .ok_or_else(|| Error::parse(line_no, format!("unknown memory `{}`", words[1])))?;
                    let v = arena
                        .position(words[2])
                        .ok_or_else(|| Error::parse(line_no, format!("unknown position `{}`", words[2])))?;
                    if kw == "upd" {
                        let m2 = *mem_index.get(words[4]).ok_or_else(|| {
                            Error::parse(line_no, format!("unknown memory `{}`", words[4]))
                        })?;
                        s.set_update(m, v, m2);
                    } else {
                        let w = arena.position(words[4]).ok_or_else(|| {
                            Error::parse(line_no, format!("unknown position `{}`", words[4]))
                        })?;
                        if !arena.is_edge(v, w) {
                            return Err(Error::parse(
                                line_no,
                                format!("{} is not a successor of {}", words[4], words[2]),
                            ));
                        }
                        s.set_choice(m, v, w);
                    }
                }
                other => return Err(Error::parse(line_no, format!("unknown directive `{other}`"))),
            }
        }
        s.ok_or_else(|| Error::parse(1, "missing `strategy` header"))
    }

    /// Text form; entries sorted by memory index then position index.
    pub fn to_text(&self, arena: &Arena) -> String {
        let mut out = format!(
            "strategy player={} memory={} init={}\n",
            self.player,
            self.memory.join(","),
            self.memory[self.initial]
        );
        let mut upd: Vec<_> = self.update.iter().collect();
        upd.sort();
        for (&(m, v), &m2) in upd {
            out.push_str(&format!(
                "upd {} {} -> {}\n",
                self.memory[m],
                arena.id(v),
                self.memory[m2]
            ));
        }
        let mut ch: Vec<_> = self.choice.iter().collect();
        ch.sort();
        for (&(m, v), &w) in ch {
            out.push_str(&format!(
                "choose {} {} -> {}\n",
                self.memory[m],
                arena.id(v),
                arena.id(w)
            ));
        }
        out
    }
}

/// The product of an arena with a strategy: its plays, projected by `down`,
/// are exactly the outcomes of the strategy.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub arena: Arena,
    pub down: Vec<Pos>,
    pub memory: Vec<usize>,
}

pub fn outcome_arena(arena: &Arena, sigma: &Strategy) -> Result<Outcome> {
    let mut b = ArenaBuilder::new(format!("{}-outcome", arena.name()));
    let mut index: HashMap<(Pos, usize), Pos> = HashMap::new();
    let mut down = Vec::new();
    let mut memory = Vec::new();
    let mut queue = std::collections::VecDeque::new();

    let mut intern = |b: &mut ArenaBuilder,
                      v: Pos,
                      m: usize,
                      down: &mut Vec<Pos>,
                      memory: &mut Vec<usize>,
                      queue: &mut std::collections::VecDeque<Pos>|
     -> Pos {
        if let Some(&p) = index.get(&(v, m)) {
            return p;
        }
        let mut name = format!("{}/{}", arena.id(v), sigma.memory_name(m));
        while b.position(&name).is_some() {
            name.push('\'');
        }
        let p = b
            .add_position(name, arena.owner(v), arena.labels(v).iter().cloned())
            .expect("fresh name");
        index.insert((v, m), p);
        down.push(v);
        memory.push(m);
        queue.push_back(p);
        p
    };

    let v0 = arena.initial();
    let m0 = sigma.update(sigma.initial_memory(), v0);
    let start = intern(&mut b, v0, m0, &mut down, &mut memory, &mut queue);
    b.set_initial(start);
    while let Some(p) = queue.pop_front() {
        let (v, m) = (down[p], memory[p]);
        let targets: Vec<Pos> = if arena.owner(v) == sigma.player() {
            match sigma.choice(m, v) {
                Some(w) if arena.is_edge(v, w) => vec![w],
                Some(w) => {
                    return Err(Error::InvalidStrategy(format!(
                        "choice {} at {} is not a successor",
                        arena.id(w),
                        arena.id(v)
                    )))
                }
                None => {
                    return Err(Error::PartialStrategy {
                        memory: sigma.memory_name(m).to_string(),
                        position: arena.id(v).to_string(),
                    })
                }
            }
        } else {
            arena.successors(v).to_vec()
        };
        for w in targets {
            let m2 = sigma.update(m, w);
            let q = intern(&mut b, w, m2, &mut down, &mut memory, &mut queue);
            b.add_edge(p, q);
        }
    }
    Ok(Outcome {
        arena: b.build()?,
        down,
        memory,
    })
}
