//! Elimination of innermost `[R]` subformulas: each `[R] ψ` becomes a fresh
//! proposition that holds at a knowledge position iff `ψ` holds universally
//! at every position of its information set.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::arena::Arena;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::ltlgame::universal_sat;
use crate::powerset::{build_power_arena_named, lift_transducer, Naming, PowerArena};
use crate::transducer::Transducer;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkingReport {
    /// Fresh proposition and the `[R] ψ` subformula it replaces.
    pub atoms: Vec<(String, Formula)>,
    /// For each atom, the marked power positions in increasing order.
    pub marked: Vec<Vec<usize>>,
}

impl MarkingReport {
    pub fn to_text(&self, power: &Arena) -> String {
        let mut out = String::new();
        for ((name, f), marked) in self.atoms.iter().zip(&self.marked) {
            let psi = match f {
                Formula::R(inner) => inner.to_string(),
                other => other.to_string(),
            };
            let _ = writeln!(out, "atom {name} := [R] {psi}");
            let ids: Vec<&str> = marked.iter().map(|&x| power.id(x)).collect();
            let _ = writeln!(out, "marked {name} {}", ids.join(" "));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Elimination {
    /// Knowledge arena relabeled with the fresh propositions.
    pub power: PowerArena,
    /// The relation transported to plays of the knowledge arena, when requested.
    pub transducer: Option<Transducer>,
    pub formula: Formula,
    pub report: MarkingReport,
}

/// One elimination round, lifting the transducer for the next round.
pub fn eliminate_r(arena: &Arena, t: &Transducer, phi: &Formula, config: &Config) -> Result<Elimination> {
    eliminate_r_with(arena, t, phi, config, true)
}

pub fn eliminate_r_with(
    arena: &Arena,
    t: &Transducer,
    phi: &Formula,
    config: &Config,
    lift: bool,
) -> Result<Elimination> {
    let power = build_power_arena_named(arena, t, config.caps.max_power_positions, Naming::Compact)?;
    let subs = phi.depth1_r_subformulas();

    let mut used: BTreeSet<String> = arena.propositions();
    used.extend(phi.atoms());
    let mut names = Vec::new();
    let mut k = 0;
    for sub in &subs {
        let psi = match sub {
            Formula::R(inner) => &**inner,
            _ => unreachable!(),
        };
        let mut name = Formula::fresh_atom_name(k, psi);
        while used.contains(&name) {
            k += 1;
            name = Formula::fresh_atom_name(k, psi);
        }
        k += 1;
        used.insert(name.clone());
        names.push(name);
    }

    let sats = satisfaction_sets(arena, &subs, config)?;
    let mut marked_arena = power.arena.clone();
    let mut marked = Vec::new();
    for (name, sat) in names.iter().zip(&sats) {
        let xs: Vec<usize> = (0..power.len())
            .filter(|&x| power.info_set(x).iter().all(|&u| sat[u]))
            .collect();
        marked_arena = marked_arena.with_label(name, xs.iter().copied());
        marked.push(xs);
    }

    let mut formula = phi.clone();
    for (name, sub) in names.iter().zip(&subs) {
        formula = formula.substitute(sub, name)?;
    }
    let transducer = if lift { Some(lift_transducer(t, &power)?) } else { None };
    Ok(Elimination {
        power: power.with_arena(marked_arena),
        transducer,
        formula,
        report: MarkingReport {
            atoms: names.into_iter().zip(subs).collect(),
            marked,
        },
    })
}

/// Universal satisfaction of each `ψ` (for `[R] ψ` in `subs`) at every position.
fn satisfaction_sets(arena: &Arena, subs: &[Formula], config: &Config) -> Result<Vec<Vec<bool>>> {
    let inner = |f: &Formula| -> Formula {
        match f {
            Formula::R(a) => (**a).clone(),
            _ => unreachable!(),
        }
    };
    let jobs = config.jobs.max(1).min(subs.len().max(1));
    if jobs <= 1 {
        return subs
            .iter()
            .map(|s| universal_sat(arena, &inner(s), &config.caps))
            .collect();
    }
    let caps = config.caps;
    let mut results: Vec<Option<Result<Vec<bool>>>> = vec![None; subs.len()];
    std::thread::scope(|scope| {
        let chunk = subs.len().div_ceil(jobs);
        let handles: Vec<_> = subs
            .chunks(chunk)
            .enumerate()
            .map(|(c, part)| {
                scope.spawn(move || {
                    let out: Vec<Result<Vec<bool>>> = part
                        .iter()
                        .map(|s| universal_sat(arena, &inner(s), &caps))
                        .collect();
                    (c * chunk, out)
                })
            })
            .collect();
        for h in handles {
            let (start, out) = h.join().expect("marking worker panicked");
            for (i, r) in out.into_iter().enumerate() {
                results[start + i] = Some(r);
            }
        }
    });
    results
        .into_iter()
        .map(|r| r.unwrap_or_else(|| Err(Error::Encoder("missing marking result".into()))))
        .collect()
}
