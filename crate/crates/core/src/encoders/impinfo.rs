//! Imperfect-information games and opacity.
//!
//! Input format:
//!
//! ```text
//! impinfo toy
//! state v0 init obs=o1
//! state v1 obs=o1 secret
//! action v0 a v1
//! ```
//!
//! A state without `obs=` is alone in its class. Player 1 positions keep the
//! state names and carry `p1`; choosing action `a` at `v` moves to the Player 2
//! position `v.a`, labelled `pa`.

use std::collections::{BTreeMap, BTreeSet};

use super::{check_ident, header, Encoded};
use crate::arena::{Arena, ArenaBuilder, Player, Pos, Strategy};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::synthesizer::{FusInstance, Mode};
use crate::transducer::{build_observation_equivalence, Transducer, TransducerBuilder};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImpInfo {
    pub name: String,
    pub states: Vec<String>,
    pub initial: usize,
    /// Observation class of each state.
    pub obs: Vec<String>,
    pub secret: BTreeSet<usize>,
    /// `(state, action, target)`.
    pub actions: Vec<(usize, String, usize)>,
}

impl ImpInfo {
    pub fn parse(text: &str) -> Result<ImpInfo> {
        let (name, lines) = header(text, "impinfo")?;
        let mut states: Vec<String> = Vec::new();
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let mut obs = Vec::new();
        let mut secret = BTreeSet::new();
        let mut initial = None;
        let mut raw_actions = Vec::new();
        let mut raw_secrets = Vec::new();
        for (line, words) in lines {
            let perr = |m: String| Error::Parse { line, message: m };
            match words[0] {
                "state" => {
                    let id = *words.get(1).ok_or_else(|| perr("`state` needs a name".into()))?;
                    check_ident("state", id)?;
                    if index.insert(id.to_string(), states.len()).is_some() {
                        return Err(Error::Duplicate(id.into()));
                    }
                    let mut class = id.to_string();
                    for w in &words[2..] {
                        if *w == "init" {
                            if initial.is_some() {
                                return Err(perr("more than one initial state".into()));
                            }
                            initial = Some(states.len());
                        } else if *w == "secret" {
                            secret.insert(states.len());
                        } else if let Some(c) = w.strip_prefix("obs=") {
                            class = c.to_string();
                        } else {
                            return Err(perr(format!("unexpected `{w}`")));
                        }
                    }
                    states.push(id.to_string());
                    obs.push(class);
                }
                "secret" => {
                    for w in &words[1..] {
                        raw_secrets.push((line, w.to_string()));
                    }
                }
                "action" => {
                    if words.len() != 4 {
                        return Err(perr("expected `action <state> <action> <state>`".into()));
                    }
                    check_ident("action", words[2])?;
                    raw_actions.push((line, words[2].to_string(), words[1].to_string(), words[3].to_string()));
                }
                other => return Err(perr(format!("unknown directive `{other}`"))),
            }
        }
        let lookup = |line: usize, s: &str| {
            index.get(s).copied().ok_or_else(|| Error::Parse {
                line,
                message: format!("unknown state `{s}`"),
            })
        };
        let mut actions = Vec::new();
        for (line, a, from, to) in raw_actions {
            actions.push((lookup(line, &from)?, a, lookup(line, &to)?));
        }
        for (line, s) in raw_secrets {
            secret.insert(lookup(line, &s)?);
        }
        actions.sort();
        actions.dedup();
        let initial = initial.ok_or_else(|| Error::Parse {
            line: 1,
            message: "no initial state".into(),
        })?;
        Ok(ImpInfo {
            name,
            states,
            initial,
            obs,
            secret,
            actions,
        })
    }

    /// Sorted action names.
    pub fn action_names(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.actions.iter().map(|(_, a, _)| a).collect();
        set.into_iter().cloned().collect()
    }

    fn available(&self, s: usize) -> BTreeSet<&str> {
        self.actions
            .iter()
            .filter(|(f, _, _)| *f == s)
            .map(|(_, a, _)| a.as_str())
            .collect()
    }
}

/// The arena of the game and the observation classes of its Player 1 positions.
pub struct ImpArena {
    pub arena: Arena,
    pub classes: Vec<Vec<Pos>>,
}

pub fn build_imp_arena(raw: &ImpInfo, secret_label: bool) -> Result<ImpArena> {
    for a in raw.action_names() {
        if a == "1" || a == "S" {
            return Err(Error::Encoder(format!("action name `{a}` clashes with p1/pS")));
        }
    }
    for s in 0..raw.states.len() {
        for t in 0..raw.states.len() {
            if raw.obs[s] == raw.obs[t] && raw.available(s) != raw.available(t) {
                return Err(Error::Encoder(format!(
                    "indistinguishable states {} and {} offer different actions",
                    raw.states[s], raw.states[t]
                )));
            }
        }
    }
    let mut b = ArenaBuilder::new(raw.name.clone());
    let mut pos = Vec::new();
    for (s, id) in raw.states.iter().enumerate() {
        let mut labels = vec!["p1".to_string()];
        if secret_label && raw.secret.contains(&s) {
            labels.push("pS".into());
        }
        pos.push(b.add_position(id.clone(), Player::P1, labels)?);
    }
    let mut mid: BTreeMap<(usize, &str), Pos> = BTreeMap::new();
    for (s, a, t) in &raw.actions {
        let m = match mid.get(&(*s, a.as_str())) {
            Some(&m) => m,
            None => {
                let m = b.add_position(format!("{}.{}", raw.states[*s], a), Player::P2, [format!("p{a}")])?;
                b.add_edge(pos[*s], m);
                mid.insert((*s, a.as_str()), m);
                m
            }
        };
        b.add_edge(m, pos[*t]);
    }
    b.set_initial(pos[raw.initial]);
    let arena = b.build()?;
    for d in arena.validate() {
        return Err(Error::Encoder(format!("encoded arena: {d}")));
    }
    let mut by_class: BTreeMap<&str, Vec<Pos>> = BTreeMap::new();
    for (s, c) in raw.obs.iter().enumerate() {
        by_class.entry(c.as_str()).or_default().push(pos[s]);
    }
    Ok(ImpArena {
        arena,
        classes: by_class.into_values().collect(),
    })
}

/// `G(p1 -> ([R] X pa | [R] X pb | ...))` over the given actions.
pub fn same_act(actions: &[String]) -> Formula {
    Formula::atom("p1")
        .implies(Formula::any(actions.iter().map(|a| Formula::atom(format!("p{a}")).next().r())))
        .always()
}

/// `G([R] pa | [R] pb | ...)`, for the relation shifted by one step.
pub fn same_act_shifted(actions: &[String]) -> Formula {
    Formula::any(actions.iter().map(|a| Formula::atom(format!("p{a}")).r())).always()
}

/// Observation-based strategies as strictly-uniform ones for SameAct.
pub fn encode_imperfect_info(raw: &ImpInfo) -> Result<Encoded> {
    let g = build_imp_arena(raw, false)?;
    let t = build_observation_equivalence(&g.arena, &g.classes, true)?;
    let phi = same_act(&raw.action_names());
    Ok(Encoded {
        instance: FusInstance::new_prerestricted(g.arena, t, phi, Player::P1)?,
        mode: Mode::Strict,
        strategy: None,
    })
}

/// Variant relating `ρ` ending in a Player 1 position to the one-step
/// extensions of its equivalent plays, with SameAct'.
pub fn encode_imperfect_info_shifted(raw: &ImpInfo) -> Result<Encoded> {
    let g = build_imp_arena(raw, false)?;
    let t = shifted_equivalence(&g.arena, &g.classes)?;
    let phi = same_act_shifted(&raw.action_names());
    Ok(Encoded {
        instance: FusInstance::new_prerestricted(g.arena, t, phi, Player::P1)?,
        mode: Mode::Strict,
        strategy: None,
    })
}

fn shifted_equivalence(arena: &Arena, classes: &[Vec<Pos>]) -> Result<Transducer> {
    let eq = build_observation_equivalence(arena, classes, true)?;
    // Read the pairs accepted by the (single-state before restriction)
    // equivalence at length i, then emit one more output position.
    let mut related = BTreeSet::new();
    for tr in eq.transitions() {
        if let (Some(u), Some(v)) = (tr.input, tr.output) {
            related.insert((u, v));
        }
    }
    let mut b = TransducerBuilder::new("obs_shift", arena.len(), arena.len());
    let q = b.add_state("q", false);
    let after = b.add_state("p1", false);
    let done = b.add_state("f", true);
    for &(u, v) in &related {
        b.add_transition(q, Some(u), Some(v), q);
        if arena.owner(u) == Player::P1 {
            b.add_transition(q, Some(u), Some(v), after);
        }
    }
    for w in arena.positions() {
        if arena.owner(w) == Player::P2 {
            b.add_transition(after, None, Some(w), done);
        }
    }
    Ok(b.build().restrict_to_plays(arena))
}

/// Opacity: instance A asks Player 1 for `F [R] pS` (strict), instance B asks
/// Player 2 for `G ![R] pS` (full).
pub fn encode_opacity(raw: &ImpInfo) -> Result<(Encoded, Encoded)> {
    let g = build_imp_arena(raw, true)?;
    let t = build_observation_equivalence(&g.arena, &g.classes, true)?;
    let ps = Formula::atom("pS");
    let a = FusInstance::new_prerestricted(g.arena.clone(), t.clone(), ps.clone().r().eventually(), Player::P1)?;
    let b = FusInstance::new_prerestricted(g.arena, t, ps.r().not().always(), Player::P2)?;
    let trivial = Strategy::first_successor(Player::P2, &b.arena);
    Ok((
        Encoded {
            instance: a,
            mode: Mode::Strict,
            strategy: None,
        },
        Encoded {
            instance: b,
            mode: Mode::Full,
            strategy: Some(trivial),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = "impinfo toy\nstate v0 init\nstate l obs=o\nstate r obs=o\nstate w\n\
                       action v0 a l\naction v0 a r\naction l a w\naction l b w\naction r a w\naction r b w\n\
                       action w a w\n";

    #[test]
    fn same_act_text() {
        let f = same_act(&["a".into(), "b".into()]);
        assert_eq!(f.to_string(), "G(p1 -> ([R] X pa | [R] X pb))");
    }

    #[test]
    fn arena_shape() {
        let raw = ImpInfo::parse(TOY).unwrap();
        let e = encode_imperfect_info(&raw).unwrap();
        let g = &e.instance.arena;
        assert!(g.validate().is_empty());
        let la = g.position("l.a").unwrap();
        assert_eq!(g.owner(la), Player::P2);
        assert!(g.labels(la).contains("pa"));
        assert_eq!(e.mode, Mode::Strict);
    }

    #[test]
    fn availability_violation() {
        let bad = "impinfo bad\nstate v0 init\nstate l obs=o\nstate r obs=o\naction v0 a l\naction v0 a r\n\
                   action l a l\naction r b r\n";
        assert!(matches!(
            encode_imperfect_info(&ImpInfo::parse(bad).unwrap()),
            Err(Error::Encoder(_))
        ));
    }
}
