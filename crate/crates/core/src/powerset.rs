//! Knowledge arenas: positions summarize the transducer configurations
//! reachable while reading the history, and the positions last written by
//! those runs.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::arena::{Arena, ArenaBuilder, Pos};
use crate::error::{Error, Result};
use crate::transducer::{Transducer, TransducerBuilder};

/// `(v, S, Last)`. `v = None` is the artificial position before the initial one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PowerPosition {
    pub v: Option<Pos>,
    /// Sorted transducer states.
    pub states: Vec<usize>,
    /// `last[i]` is the sorted set of positions last written on runs reaching `states[i]`.
    pub last: Vec<Vec<Pos>>,
}

impl PowerPosition {
    pub fn before_start(t: &Transducer) -> PowerPosition {
        PowerPosition {
            v: None,
            states: vec![t.initial()],
            last: vec![Vec::new()],
        }
    }

    /// Union of `Last(q)` over accepting states `q ∈ S`.
    pub fn info_set(&self, t: &Transducer) -> Vec<Pos> {
        let mut out = BTreeSet::new();
        for (q, last) in self.states.iter().zip(&self.last) {
            if t.is_accepting(*q) {
                out.extend(last.iter().copied());
            }
        }
        out.into_iter().collect()
    }

    pub fn last_of(&self, q: usize) -> Option<&[Pos]> {
        self.states
            .binary_search(&q)
            .ok()
            .map(|i| self.last[i].as_slice())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Tag {
    Written(Pos),
    Inherit(usize),
}

/// Successor power position after reading `next_v`: runs from every state in
/// `current.states` that read `next_v` and write any output word.
pub fn power_step(
    arena: &Arena,
    current: &PowerPosition,
    next_v: Pos,
    t: &Transducer,
) -> Result<PowerPosition> {
    let ok = match current.v {
        None => next_v == arena.initial(),
        Some(v) => arena.is_edge(v, next_v),
    };
    if !ok {
        let from = current.v.map_or("the start", |v| arena.id(v));
        return Err(Error::NotASuccessor(arena.id(next_v).into(), from.into()));
    }
    Ok(step_unchecked(current, next_v, t))
}

fn step_unchecked(current: &PowerPosition, next_v: Pos, t: &Transducer) -> PowerPosition {
    // Configurations: (state, letter consumed yet, last write or origin state).
    let mut seen: HashSet<(usize, bool, Tag)> = HashSet::new();
    let mut stack = Vec::new();
    for (i, &q) in current.states.iter().enumerate() {
        let c = (q, false, Tag::Inherit(i));
        seen.insert(c);
        stack.push(c);
    }
    while let Some((q, read, tag)) = stack.pop() {
        for tr in t.outgoing(q) {
            let read2 = match tr.input {
                None => read,
                Some(a) if !read && a == next_v => true,
                Some(_) => continue,
            };
            let tag2 = tr.output.map_or(tag, Tag::Written);
            let c = (tr.to, read2, tag2);
            if seen.insert(c) {
                stack.push(c);
            }
        }
    }
    let mut acc: std::collections::BTreeMap<usize, BTreeSet<Pos>> = Default::default();
    for &(q, read, tag) in &seen {
        if !read {
            continue;
        }
        let entry = acc.entry(q).or_default();
        match tag {
            Tag::Written(v) => {
                entry.insert(v);
            }
            Tag::Inherit(i) => entry.extend(current.last[i].iter().copied()),
        }
    }
    PowerPosition {
        v: Some(next_v),
        states: acc.keys().copied().collect(),
        last: acc.into_values().map(|s| s.into_iter().collect()).collect(),
    }
}

/// How positions of a power arena are named.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Naming {
    /// `<v>|S={..}|I={..}`.
    Descriptive,
    /// `<v>.<index>`; keeps names short across repeated constructions.
    Compact,
}

/// The reachable part of the knowledge arena together with its projection.
#[derive(Clone, Debug)]
pub struct PowerArena {
    pub arena: Arena,
    pub nodes: Vec<PowerPosition>,
    pub down: Vec<Pos>,
    info: Vec<Vec<Pos>>,
}

impl PowerArena {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn info_set(&self, x: usize) -> &[Pos] {
        &self.info[x]
    }

    /// The unique power successor of `x` above position `v`.
    pub fn successor(&self, x: usize, v: Pos) -> Option<usize> {
        self.arena
            .successors(x)
            .iter()
            .copied()
            .find(|&y| self.down[y] == v)
    }

    /// Image of a play under the play bijection.
    pub fn lift_play(&self, play: &[Pos]) -> Option<Vec<usize>> {
        let (&first, rest) = play.split_first()?;
        if self.down[self.arena.initial()] != first {
            return None;
        }
        let mut out = vec![self.arena.initial()];
        for &v in rest {
            let next = self.successor(*out.last().unwrap(), v)?;
            out.push(next);
        }
        Some(out)
    }

    pub fn down_play(&self, play: &[usize]) -> Vec<Pos> {
        play.iter().map(|&x| self.down[x]).collect()
    }

    /// Copy with the power-arena labels replaced by `arena`'s (used after marking).
    pub fn with_arena(&self, arena: Arena) -> PowerArena {
        PowerArena {
            arena,
            nodes: self.nodes.clone(),
            down: self.down.clone(),
            info: self.info.clone(),
        }
    }
}

pub fn build_power_arena(arena: &Arena, t: &Transducer, cap: usize) -> Result<PowerArena> {
    build_power_arena_named(arena, t, cap, Naming::Descriptive)
}

pub fn build_power_arena_named(
    arena: &Arena,
    t: &Transducer,
    cap: usize,
    naming: Naming,
) -> Result<PowerArena> {
    let mut nodes: Vec<PowerPosition> = Vec::new();
    let mut index: HashMap<PowerPosition, usize> = HashMap::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();

    let start = step_unchecked(&PowerPosition::before_start(t), arena.initial(), t);
    index.insert(start.clone(), 0);
    nodes.push(start);
    succ.push(Vec::new());
    queue.push_back(0);
    while let Some(x) = queue.pop_front() {
        let v = nodes[x].v.unwrap();
        for &w in arena.successors(v) {
            let y_node = step_unchecked(&nodes[x], w, t);
            let y = match index.get(&y_node) {
                Some(&y) => y,
                None => {
                    let y = nodes.len();
                    if y >= cap {
                        return Err(Error::CapExceeded {
                            what: "power positions",
                            reached: y + 1,
                            cap,
                            stage: None,
                        });
                    }
                    index.insert(y_node.clone(), y);
                    nodes.push(y_node);
                    succ.push(Vec::new());
                    queue.push_back(y);
                    y
                }
            };
            succ[x].push(y);
        }
    }

    let info: Vec<Vec<Pos>> = nodes.iter().map(|n| n.info_set(t)).collect();
    let down: Vec<Pos> = nodes.iter().map(|n| n.v.unwrap()).collect();
    let mut b = ArenaBuilder::new(format!("{}^", arena.name()));
    for (x, node) in nodes.iter().enumerate() {
        let v = down[x];
        let base = match naming {
            Naming::Compact => format!("{}.{}", arena.id(v), x),
            Naming::Descriptive => {
                let s: Vec<&str> = node.states.iter().map(|&q| t.state_name(q)).collect();
                let i: Vec<&str> = info[x].iter().map(|&u| arena.id(u)).collect();
                format!("{}|S={{{}}}|I={{{}}}", arena.id(v), s.join(","), i.join(","))
            }
        };
        let mut name = base.clone();
        let mut k = 2;
        while b.position(&name).is_some() {
            name = format!("{base}~{k}");
            k += 1;
        }
        b.add_position(name, arena.owner(v), arena.labels(v).iter().cloned())?;
    }
    for (x, ys) in succ.iter().enumerate() {
        for &y in ys {
            b.add_edge(x, y);
        }
    }
    b.set_initial(0);
    Ok(PowerArena {
        arena: b.build()?,
        nodes,
        down,
        info,
    })
}

/// Information set of a finite play, by direct search over configurations
/// `(transducer state, input read, last output position)` with the output
/// tape checked against the arena.
pub fn info_set_bruteforce(arena: &Arena, t: &Transducer, rho: &[Pos]) -> Result<BTreeSet<Pos>> {
    if !arena.is_play(rho) {
        return Err(Error::NotAPlay(arena.ids_of(rho).join(" ")));
    }
    let mut seen: HashSet<(usize, usize, Option<Pos>)> = HashSet::new();
    let mut stack = vec![(t.initial(), 0usize, None::<Pos>)];
    seen.insert(stack[0]);
    let mut out = BTreeSet::new();
    while let Some((q, i, last)) = stack.pop() {
        if i == rho.len() && t.is_accepting(q) {
            if let Some(u) = last {
                out.insert(u);
            }
        }
        for tr in t.outgoing(q) {
            let i2 = match tr.input {
                None => i,
                Some(a) if i < rho.len() && rho[i] == a => i + 1,
                Some(_) => continue,
            };
            let last2 = match tr.output {
                None => last,
                Some(b) => {
                    let ok = match last {
                        None => b == arena.initial(),
                        Some(u) => arena.is_edge(u, b),
                    };
                    if !ok {
                        continue;
                    }
                    Some(b)
                }
            };
            let c = (tr.to, i2, last2);
            if seen.insert(c) {
                stack.push(c);
            }
        }
    }
    Ok(out)
}

/// Transports a relation on base plays to plays of an upper arena that
/// projects deterministically onto the base (`down`), as `T↓ ∘ t ∘ T↑`.
pub fn lift_through(t: &Transducer, upper: &Arena, down: &[Pos]) -> Result<Transducer> {
    let n = upper.len();
    let base = t.input_size();
    // T↓ reads upper positions and writes their projections; T↑ the reverse.
    // State 0 is the start, state 1 + h means "last read h".
    let mut dn = TransducerBuilder::new("down", n, base);
    let mut up = TransducerBuilder::new("up", base, n);
    for b in [&mut dn, &mut up] {
        b.add_state("^", false);
        for h in 0..n {
            b.add_state(upper.id(h).to_string(), true);
        }
        b.set_initial(0);
    }
    let h0 = upper.initial();
    dn.add_transition(0, Some(h0), Some(down[h0]), 1 + h0);
    up.add_transition(0, Some(down[h0]), Some(h0), 1 + h0);
    for h in 0..n {
        for &h2 in upper.successors(h) {
            dn.add_transition(1 + h, Some(h2), Some(down[h2]), 1 + h2);
            up.add_transition(1 + h, Some(down[h2]), Some(h2), 1 + h2);
        }
    }
    let lifted = dn.build().compose(t)?.compose(&up.build())?;
    Ok(lifted.trim())
}

/// The lifted relation on plays of the power arena.
pub fn lift_transducer(t: &Transducer, power: &PowerArena) -> Result<Transducer> {
    lift_through(t, &power.arena, &power.down)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transducer::Transducer;

    fn g0() -> Arena {
        Arena::parse("arena G0\npos v0 owner=1 labels=p\npos v1 owner=2 labels=\nedge v0 v1\nedge v1 v0\ninit v0\n")
            .unwrap()
    }

    fn branching() -> Arena {
        Arena::parse(
            "arena B\npos v0 owner=1 labels=\npos a owner=2 labels=p\npos b owner=2 labels=\n\
             pos da owner=1 labels=p\npos db owner=1 labels=\n\
             edge v0 a\nedge v0 b\nedge a da\nedge da a\nedge b db\nedge db b\ninit v0\n",
        )
        .unwrap()
    }

    #[test]
    fn identity_on_g0() {
        let g = g0();
        let t = Transducer::identity(2).restrict_to_plays(&g);
        let p = build_power_arena(&g, &t, 1000).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.info_set(0), &[0]);
        assert_eq!(p.info_set(1), &[1]);
        assert!(p.arena.id(0).starts_with("v0|S={"));
        assert!(p.arena.id(0).ends_with("|I={v0}"));
        let first = power_step(&g, &PowerPosition::before_start(&t), 0, &t).unwrap();
        assert_eq!(first.info_set(&t), vec![0]);
        assert!(power_step(&g, &first, 0, &t).is_err());
    }

    #[test]
    fn length_relation_merges_branches() {
        let g = branching();
        let t = Transducer::equal_length(g.len()).restrict_to_plays(&g);
        let p = build_power_arena(&g, &t, 1000).unwrap();
        let pa = p.lift_play(&[0, 1]).unwrap();
        let pb = p.lift_play(&[0, 2]).unwrap();
        assert_eq!(p.info_set(pa[1]), &[1, 2]);
        assert_eq!(p.info_set(pb[1]), &[1, 2]);
        // Without restriction the state summaries coincide as well.
        let raw = Transducer::equal_length(g.len());
        let p = build_power_arena(&g, &raw, 1000).unwrap();
        let pa = p.lift_play(&[0, 1]).unwrap();
        let pb = p.lift_play(&[0, 2]).unwrap();
        assert_eq!(p.nodes[pa[1]].states, p.nodes[pb[1]].states);
    }

    #[test]
    fn epsilon_output_loop_inherits() {
        let g = g0();
        // s0 copies v0, then s1 reads everything silently or loops writing nothing.
        let mut b = TransducerBuilder::new("e", 2, 2);
        let s0 = b.add_state("s0", false);
        let s1 = b.add_state("s1", true);
        b.add_transition(s0, Some(0), Some(0), s1);
        b.add_transition(s1, Some(1), None, s1);
        b.add_transition(s1, Some(0), None, s1);
        b.add_transition(s1, None, None, s1);
        let t = b.build();
        let p = build_power_arena(&g, &t, 1000).unwrap();
        for x in 0..p.len() {
            assert_eq!(p.info_set(x), &[0]);
        }
        let play = [0, 1, 0, 1];
        for k in 1..=play.len() {
            let x = *p.lift_play(&play[..k]).unwrap().last().unwrap();
            let bf: Vec<Pos> = info_set_bruteforce(&g, &t, &play[..k]).unwrap().into_iter().collect();
            assert_eq!(p.info_set(x), bf.as_slice());
        }
    }

    #[test]
    fn empty_relation_has_empty_info() {
        let g = g0();
        let mut b = TransducerBuilder::new("none", 2, 2);
        b.add_state("q", false);
        let t = b.build();
        assert!(info_set_bruteforce(&g, &t, &[0, 1]).unwrap().is_empty());
        let p = build_power_arena(&g, &t, 10).unwrap();
        assert!(p.info_set(0).is_empty());
    }

    #[test]
    fn cap_is_enforced() {
        let g = branching();
        let t = Transducer::identity(g.len()).restrict_to_plays(&g);
        assert!(matches!(
            build_power_arena(&g, &t, 2),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn identity_lifts_to_identity() {
        let g = branching();
        let t = Transducer::identity(g.len()).restrict_to_plays(&g);
        let p = build_power_arena_named(&g, &t, 1000, Naming::Compact).unwrap();
        let lt = lift_transducer(&t, &p).unwrap();
        let plays: Vec<Vec<usize>> = (1..=4).flat_map(|k| p.arena.enumerate_plays(k)).collect();
        for a in &plays {
            for b in &plays {
                assert_eq!(lt.recognizes(a, b), a == b);
            }
        }
    }
}
