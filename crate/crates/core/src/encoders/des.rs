//! Diagnosability and prognosability of discrete-event systems.
//!
//! Input format:
//!
//! ```text
//! des toy
//! state s0 init
//! state s1 faulty
//! event f
//! event o obs
//! trans s0 f s1
//! ```
//!
//! The system is simulated by Player 2 on positions `<event>@<state>`
//! (`eps@<init>` initially). Every move into `b@s'` passes through a Player 1
//! position `to:b@s'` with the labels of its target and no observation, which
//! keeps the arena alternating without changing any verdict: a play ending
//! in `to:b@s'` is observationally equal to its prefix before it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{check_ident, header, Encoded};
use crate::arena::{Arena, ArenaBuilder, Player, Pos, Strategy};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::synthesizer::{FusInstance, Mode};
use crate::transducer::build_morphism_equivalence;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Des {
    pub name: String,
    pub states: Vec<String>,
    pub initial: usize,
    pub faulty: BTreeSet<usize>,
    pub events: Vec<String>,
    pub observable: BTreeSet<usize>,
    /// `(state, event, state)`.
    pub trans: Vec<(usize, usize, usize)>,
}

impl Des {
    pub fn parse(text: &str) -> Result<Des> {
        let (name, lines) = header(text, "des")?;
        let mut states = Vec::new();
        let mut sidx: BTreeMap<String, usize> = BTreeMap::new();
        let mut events = Vec::new();
        let mut eidx: BTreeMap<String, usize> = BTreeMap::new();
        let mut faulty = BTreeSet::new();
        let mut observable = BTreeSet::new();
        let mut initial = None;
        let mut raw = Vec::new();
        for (line, words) in lines {
            let perr = |m: String| Error::Parse { line, message: m };
            match words[0] {
                "state" => {
                    let id = *words.get(1).ok_or_else(|| perr("`state` needs a name".into()))?;
                    check_ident("state", id)?;
                    let s = states.len();
                    if sidx.insert(id.to_string(), s).is_some() {
                        return Err(Error::Duplicate(id.into()));
                    }
                    states.push(id.to_string());
                    for w in &words[2..] {
                        match *w {
                            "faulty" => {
                                faulty.insert(s);
                            }
                            "init" => {
                                if initial.replace(s).is_some() {
                                    return Err(perr("more than one initial state".into()));
                                }
                            }
                            other => return Err(perr(format!("unexpected `{other}`"))),
                        }
                    }
                }
                "event" => {
                    let id = *words.get(1).ok_or_else(|| perr("`event` needs a name".into()))?;
                    check_ident("event", id)?;
                    if id == "eps" {
                        return Err(perr("event name `eps` is reserved".into()));
                    }
                    let e = events.len();
                    if eidx.insert(id.to_string(), e).is_some() {
                        return Err(Error::Duplicate(id.into()));
                    }
                    events.push(id.to_string());
                    match words.get(2) {
                        None => {}
                        Some(&"obs") => {
                            observable.insert(e);
                        }
                        Some(w) => return Err(perr(format!("unexpected `{w}`"))),
                    }
                }
                "trans" => {
                    if words.len() != 4 {
                        return Err(perr("expected `trans <s> <event> <s'>`".into()));
                    }
                    raw.push((line, words[1].to_string(), words[2].to_string(), words[3].to_string()));
                }
                other => return Err(perr(format!("unknown directive `{other}`"))),
            }
        }
        let mut trans = Vec::new();
        for (line, a, e, b) in raw {
            let get = |m: &BTreeMap<String, usize>, k: &str, what: &str| {
                m.get(k).copied().ok_or_else(|| Error::Parse {
                    line,
                    message: format!("unknown {what} `{k}`"),
                })
            };
            trans.push((get(&sidx, &a, "state")?, get(&eidx, &e, "event")?, get(&sidx, &b, "state")?));
        }
        trans.sort();
        trans.dedup();
        let initial = initial.ok_or_else(|| Error::Parse {
            line: 1,
            message: "no initial state".into(),
        })?;
        Ok(Des {
            name,
            states,
            initial,
            faulty,
            events,
            observable,
            trans,
        })
    }

    fn check(&self) -> Result<()> {
        for &(s, _, t) in &self.trans {
            if self.faulty.contains(&s) && !self.faulty.contains(&t) {
                return Err(Error::Encoder(format!(
                    "fault is not persistent: {} -> {}",
                    self.states[s], self.states[t]
                )));
            }
        }
        let mut seen = vec![false; self.states.len()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(s) = stack.pop() {
            let mut any = false;
            for &(a, _, b) in &self.trans {
                if a == s {
                    any = true;
                    if !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
            if !any {
                return Err(Error::Encoder(format!(
                    "reachable state {} has no outgoing transition",
                    self.states[s]
                )));
            }
        }
        Ok(())
    }
}

/// Arena of the system and the observation of each position.
pub struct DesArena {
    pub arena: Arena,
    pub observation: Vec<Option<String>>,
    /// `(event or None for the start, state)` of each Player 2 position.
    pub real: BTreeMap<Pos, (Option<usize>, usize)>,
}

pub fn build_des_arena(des: &Des) -> Result<DesArena> {
    des.check()?;
    let labels = |s: usize| -> Vec<&str> {
        if des.faulty.contains(&s) {
            vec!["pf"]
        } else {
            vec![]
        }
    };
    let mut b = ArenaBuilder::new(des.name.clone());
    let mut real: BTreeMap<(Option<usize>, usize), Pos> = BTreeMap::new();
    let mut observation = Vec::new();
    let v0 = b.add_position(format!("eps@{}", des.states[des.initial]), Player::P2, labels(des.initial))?;
    observation.push(None);
    real.insert((None, des.initial), v0);
    let mut queue = VecDeque::new();
    queue.push_back((None, des.initial));
    let mut edges = Vec::new();
    let mut dummy: BTreeMap<Pos, Pos> = BTreeMap::new();
    while let Some(key @ (_, s)) = queue.pop_front() {
        let from = real[&key];
        for &(_, e, t) in des.trans.iter().filter(|(a, _, _)| *a == s) {
            let k2 = (Some(e), t);
            let target = match real.get(&k2) {
                Some(&x) => x,
                None => {
                    let id = format!("{}@{}", des.events[e], des.states[t]);
                    let x = b.add_position(id.clone(), Player::P2, labels(t))?;
                    observation.push(des.observable.contains(&e).then(|| des.events[e].clone()));
                    let d = b.add_position(format!("to:{id}"), Player::P1, labels(t))?;
                    observation.push(None);
                    b.add_edge(d, x);
                    dummy.insert(x, d);
                    real.insert(k2, x);
                    queue.push_back(k2);
                    x
                }
            };
            edges.push((from, target));
        }
    }
    for (u, x) in edges {
        b.add_edge(u, dummy[&x]);
    }
    b.set_initial(v0);
    let arena = b.build()?;
    if let Some(d) = arena.validate().into_iter().next() {
        return Err(Error::Encoder(format!("encoded arena: {d}")));
    }
    Ok(DesArena {
        arena,
        observation,
        real: real.into_iter().map(|(k, v)| (v, k)).collect(),
    })
}

fn encode(des: &Des, phi: Formula) -> Result<Encoded> {
    let g = build_des_arena(des)?;
    let t = build_morphism_equivalence(&g.arena, &g.observation)?;
    let sigma = Strategy::first_successor(Player::P1, &g.arena);
    Ok(Encoded {
        instance: FusInstance::new_prerestricted(g.arena, t, phi, Player::P1)?,
        mode: Mode::Full,
        strategy: Some(sigma),
    })
}

/// `F pf -> F [R] pf` under equality of observed events.
pub fn encode_diagnosability(des: &Des) -> Result<Encoded> {
    encode(des, Formula::parse("F pf -> F [R] pf")?)
}

/// `(!pf) W (!pf & [R] X pf)` under equality of observed events.
pub fn encode_prognosability(des: &Des) -> Result<Encoded> {
    encode(des, Formula::parse("(!pf) W (!pf & [R] X pf)")?)
}
