//! Direct evaluation of formulas with `[R]` on lasso-shaped plays.
//!
//! For an `[R] ψ` with LTL body, the set of endpoints of plays related to a
//! prefix is computed by a search over transducer configurations; the body is
//! then checked on every continuation from those endpoints inside the universe.

use std::collections::{BTreeSet, HashMap};

use super::lasso::{lasso_eval_all, Letter};
use super::universal::holds_on_all_paths;
use crate::arena::{Arena, Pos, Strategy};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::transducer::Transducer;

#[derive(Clone, Copy, Debug)]
pub enum Universe<'a> {
    AllPlays,
    Outcome(&'a Strategy),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    True,
    False,
    Inconclusive,
}

impl From<bool> for OracleVerdict {
    fn from(b: bool) -> Self {
        if b {
            OracleVerdict::True
        } else {
            OracleVerdict::False
        }
    }
}

/// Output side of a configuration: last emitted position and the strategy
/// memory after it (0 for the universe of all plays).
type Out = Option<(Pos, usize)>;

struct Search<'a> {
    arena: &'a Arena,
    t: &'a Transducer,
    universe: Universe<'a>,
}

impl Search<'_> {
    fn can_emit(&self, last: Out, w: Pos) -> Option<(Pos, usize)> {
        match (last, self.universe) {
            (None, Universe::AllPlays) => (w == self.arena.initial()).then_some((w, 0)),
            (Some((u, _)), Universe::AllPlays) => self.arena.is_edge(u, w).then_some((w, 0)),
            (None, Universe::Outcome(s)) => {
                (w == self.arena.initial()).then(|| (w, s.update(s.initial_memory(), w)))
            }
            (Some((u, m)), Universe::Outcome(s)) => {
                if !self.arena.is_edge(u, w) {
                    return None;
                }
                if self.arena.owner(u) == s.player() && s.choice(m, u) != Some(w) {
                    return None;
                }
                Some((w, s.update(m, w)))
            }
        }
    }

    /// Closure under moves that read nothing.
    fn close(&self, set: &mut BTreeSet<(usize, Out)>) {
        let mut stack: Vec<(usize, Out)> = set.iter().copied().collect();
        while let Some((q, last)) = stack.pop() {
            for tr in self.t.reading(q, None) {
                let next = match tr.output {
                    None => Some(last),
                    Some(w) => self.can_emit(last, w).map(Some),
                };
                if let Some(l2) = next {
                    if set.insert((tr.to, l2)) {
                        stack.push((tr.to, l2));
                    }
                }
            }
        }
    }

    fn read(&self, set: &BTreeSet<(usize, Out)>, v: Pos) -> BTreeSet<(usize, Out)> {
        let mut out = BTreeSet::new();
        for &(q, last) in set {
            for tr in self.t.reading(q, Some(v)) {
                let next = match tr.output {
                    None => Some(last),
                    Some(w) => self.can_emit(last, w).map(Some),
                };
                if let Some(l2) = next {
                    out.insert((tr.to, l2));
                }
            }
        }
        self.close(&mut out);
        out
    }
}

/// Evaluates `phi` at index `i` of the play `stem · cycle^ω`.
#[allow(clippy::too_many_arguments)]
pub fn bounded_semantics(
    arena: &Arena,
    t: &Transducer,
    universe: Universe<'_>,
    stem: &[Pos],
    cycle: &[Pos],
    i: usize,
    phi: &Formula,
    horizon: usize,
) -> Result<OracleVerdict> {
    let play: Vec<Pos> = stem.iter().chain(cycle).chain(cycle.first()).copied().collect();
    if cycle.is_empty() || !arena.is_play(&play) {
        return Err(Error::NotAPlay("malformed lasso".into()));
    }
    if phi.r_depth() > 1 {
        return Ok(OracleVerdict::Inconclusive);
    }
    let at = |j: usize| -> Pos {
        if j < stem.len() {
            stem[j]
        } else {
            cycle[(j - stem.len()) % cycle.len()]
        }
    };
    let lasso_index = |j: usize| -> usize {
        if j < stem.len() {
            j
        } else {
            stem.len() + (j - stem.len()) % cycle.len()
        }
    };

    // Configuration sets along the play until (lasso index, set) repeats.
    let search = Search { arena, t, universe };
    let mut start = BTreeSet::new();
    start.insert((t.initial(), None));
    search.close(&mut start);
    let mut sets = Vec::new();
    let mut seen: HashMap<(usize, BTreeSet<(usize, Out)>), usize> = HashMap::new();
    let mut cur = start;
    let (loop_start, period) = loop {
        cur = search.read(&cur, at(sets.len()));
        let key = (lasso_index(sets.len()), cur.clone());
        if let Some(&j1) = seen.get(&key) {
            break (j1, sets.len() - j1);
        }
        if sets.len() >= horizon {
            return Ok(OracleVerdict::Inconclusive);
        }
        seen.insert(key, sets.len());
        sets.push(cur.clone());
    };

    // Continuation graph of the universe: nodes (position, memory).
    let mem = match universe {
        Universe::AllPlays => 1,
        Universe::Outcome(s) => s.memory_size(),
    };
    let node = |v: Pos, m: usize| v * mem + m;
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); arena.len() * mem];
    let mut labels: Vec<&BTreeSet<String>> = Vec::with_capacity(arena.len() * mem);
    for v in arena.positions() {
        for m in 0..mem {
            labels.push(arena.labels(v));
            for &w in arena.successors(v) {
                if let Some((_, m2)) = search.can_emit(Some((v, m)), w) {
                    succ[node(v, m)].push(node(w, m2));
                }
            }
        }
    }

    let mut subs: Vec<Formula> = phi.depth1_r_subformulas();
    subs.sort();
    let mut holds: Vec<Vec<bool>> = Vec::new();
    for sub in &subs {
        let Formula::R(psi) = sub else { unreachable!() };
        match holds_on_all_paths(&succ, &labels, psi, 20) {
            Some(h) => holds.push(h),
            None => return Ok(OracleVerdict::Inconclusive),
        }
    }

    // Word over the unrolled lasso, with `@o<k>` marking the k-th `[R]` subformula.
    let word: Vec<Letter> = (0..sets.len())
        .map(|j| {
            let mut l: Letter = arena.labels(at(j)).clone();
            for (k, h) in holds.iter().enumerate() {
                let ok = sets[j]
                    .iter()
                    .filter(|(q, _)| t.is_accepting(*q))
                    .all(|&(_, last)| last.is_none_or(|(u, m)| h[node(u, m)]));
                if ok {
                    l.insert(format!("@o{k}"));
                }
            }
            l
        })
        .collect();
    let mut psi = phi.clone();
    for (k, sub) in subs.iter().enumerate() {
        psi = psi.substitute(sub, &format!("@o{k}"))?;
    }
    let values = lasso_eval_all(&word[..loop_start], &word[loop_start..loop_start + period], &psi);
    let idx = if i < loop_start {
        i
    } else {
        loop_start + (i - loop_start) % period
    };
    Ok(values[idx].into())
}
