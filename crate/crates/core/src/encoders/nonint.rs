//! Non-interference of transition systems with high and low Boolean inputs.
//!
//! Input format:
//!
//! ```text
//! nisys toy
//! in h high
//! in l
//! out o
//! init s0
//! trans s0 h,l s1      # valuation: true inputs, `-` for none
//! output s1 o
//! ```
//!
//! Player 1 positions are `<letter>@<state>` (`eps@<init>` initially) and
//! Player 2 positions `<state>@{<letter>|...}`, one per nonempty set of allowed
//! input letters. A letter is written as its true inputs joined by `+`, or `-`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{check_ident, header, Encoded};
use crate::arena::{Arena, ArenaBuilder, Player, Pos, Strategy};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::synthesizer::{FusInstance, Mode};
use crate::transducer::build_morphism_equivalence;

/// At most this many input letters (so at most `2^12 - 1` allowed sets per state).
const MAX_LETTERS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiSys {
    pub name: String,
    pub inputs: Vec<String>,
    pub high: BTreeSet<String>,
    pub outputs: Vec<String>,
    pub states: Vec<String>,
    pub initial: usize,
    /// `delta[s][letter]`, a letter being a bit mask over `inputs`.
    pub delta: Vec<Vec<usize>>,
    /// Bit mask over `outputs`.
    pub output: Vec<u32>,
}

impl NiSys {
    pub fn parse(text: &str) -> Result<NiSys> {
        let (name, lines) = header(text, "nisys")?;
        let mut inputs = Vec::new();
        let mut high = BTreeSet::new();
        let mut outputs = Vec::new();
        let mut states: Vec<String> = Vec::new();
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let mut state = |s: &str, states: &mut Vec<String>| -> Result<usize> {
            check_ident("state", s)?;
            Ok(*index.entry(s.to_string()).or_insert_with(|| {
                states.push(s.to_string());
                states.len() - 1
            }))
        };
        let mut initial = None;
        let mut trans = Vec::new();
        let mut outs = Vec::new();
        for (line, words) in lines {
            let perr = |m: String| Error::Parse { line, message: m };
            match words[0] {
                "in" => {
                    let v = *words.get(1).ok_or_else(|| perr("`in` needs a name".into()))?;
                    check_ident("input", v)?;
                    match words.get(2) {
                        None => {}
                        Some(&"high") => {
                            high.insert(v.to_string());
                        }
                        Some(w) => return Err(perr(format!("unexpected `{w}`"))),
                    }
                    inputs.push(v.to_string());
                }
                "out" => {
                    let v = *words.get(1).ok_or_else(|| perr("`out` needs a name".into()))?;
                    check_ident("output", v)?;
                    outputs.push(v.to_string());
                }
                "init" => {
                    let s = *words.get(1).ok_or_else(|| perr("`init` needs a state".into()))?;
                    initial = Some(state(s, &mut states)?);
                }
                "trans" => {
                    if words.len() != 4 {
                        return Err(perr("expected `trans <s> <valuation> <s'>`".into()));
                    }
                    let a = state(words[1], &mut states)?;
                    let b = state(words[3], &mut states)?;
                    trans.push((line, a, words[2].to_string(), b));
                }
                "output" => {
                    if words.len() != 3 {
                        return Err(perr("expected `output <s> <valuation>`".into()));
                    }
                    let s = state(words[1], &mut states)?;
                    outs.push((line, s, words[2].to_string()));
                }
                other => return Err(perr(format!("unknown directive `{other}`"))),
            }
        }
        let initial = initial.ok_or_else(|| Error::Parse {
            line: 1,
            message: "missing `init`".into(),
        })?;
        let letters = 1usize << inputs.len();
        if letters > MAX_LETTERS {
            return Err(Error::Encoder(format!(
                "{} inputs give {letters} letters; at most {MAX_LETTERS} are supported",
                inputs.len()
            )));
        }
        let mask = |line: usize, val: &str, vars: &[String]| -> Result<u32> {
            let mut m = 0;
            if val == "-" {
                return Ok(0);
            }
            for v in val.split(',') {
                let i = vars.iter().position(|x| x == v).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("unknown variable `{v}`"),
                })?;
                m |= 1 << i;
            }
            Ok(m)
        };
        let mut delta = vec![vec![usize::MAX; letters]; states.len()];
        for (line, a, val, b) in trans {
            let l = mask(line, &val, &inputs)? as usize;
            if delta[a][l] != usize::MAX && delta[a][l] != b {
                return Err(Error::Parse {
                    line,
                    message: format!("second transition from {} on {val}", states[a]),
                });
            }
            delta[a][l] = b;
        }
        let mut output = vec![0; states.len()];
        for (line, s, val) in outs {
            output[s] = mask(line, &val, &outputs)?;
        }
        Ok(NiSys {
            name,
            inputs,
            high,
            outputs,
            states,
            initial,
            delta,
            output,
        })
    }

    pub fn letter_count(&self) -> usize {
        1 << self.inputs.len()
    }

    pub fn letter_text(&self, l: usize) -> String {
        let vars: Vec<&str> = (0..self.inputs.len())
            .filter(|i| l >> i & 1 == 1)
            .map(|i| self.inputs[i].as_str())
            .collect();
        if vars.is_empty() {
            "-".into()
        } else {
            vars.join("+")
        }
    }

    /// The letter with high inputs cleared.
    pub fn low_part(&self, l: usize) -> usize {
        let mut m = l;
        for (i, v) in self.inputs.iter().enumerate() {
            if self.high.contains(v) {
                m &= !(1 << i);
            }
        }
        m
    }

    pub fn output_label(&self, s: usize) -> String {
        let mut out = "po".to_string();
        for (i, o) in self.outputs.iter().enumerate() {
            if self.output[s] >> i & 1 == 1 {
                out.push('_');
                out.push_str(o);
            }
        }
        out
    }

    fn check_complete(&self) -> Result<()> {
        for (s, row) in self.delta.iter().enumerate() {
            for (l, &t) in row.iter().enumerate() {
                if t == usize::MAX {
                    return Err(Error::Encoder(format!(
                        "system is not complete: no transition from {} on {}",
                        self.states[s],
                        self.letter_text(l)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Layout of the encoded arena.
pub struct NiArena {
    pub arena: Arena,
    /// Player 1 position of each reached `(letter, state)`; letter `None` is ε.
    pub p1: BTreeMap<(Option<usize>, usize), Pos>,
    /// Player 2 position of each reached `(state, allowed set mask)`.
    pub p2: BTreeMap<(usize, u32), Pos>,
}

pub fn build_ni_arena(sys: &NiSys) -> Result<NiArena> {
    sys.check_complete()?;
    let n_letters = sys.letter_count();
    let full: u32 = (1u32 << n_letters) - 1;
    let set_text = |a: u32| -> String {
        let ls: Vec<String> = (0..n_letters)
            .filter(|l| a >> l & 1 == 1)
            .map(|l| sys.letter_text(l))
            .collect();
        format!("{{{}}}", ls.join("|"))
    };
    let mut b = ArenaBuilder::new(sys.name.clone());
    let mut p1: BTreeMap<(Option<usize>, usize), Pos> = BTreeMap::new();
    let mut p2: BTreeMap<(usize, u32), Pos> = BTreeMap::new();
    let mut edges = Vec::new();
    let mut queue = VecDeque::new();
    let v0 = b.add_position(
        format!("eps@{}", sys.states[sys.initial]),
        Player::P1,
        [sys.output_label(sys.initial)],
    )?;
    p1.insert((None, sys.initial), v0);
    queue.push_back((None, sys.initial));
    let mut done_states = BTreeSet::new();
    while let Some((letter, s)) = queue.pop_front() {
        let from = p1[&(letter, s)];
        if done_states.insert(s) {
            for a in 1..=full {
                let x = b.add_position(format!("{}@{}", sys.states[s], set_text(a)), Player::P2, [sys.output_label(s)])?;
                p2.insert((s, a), x);
                for l in 0..n_letters {
                    if a >> l & 1 == 1 {
                        let t = sys.delta[s][l];
                        let key = (Some(l), t);
                        if !p1.contains_key(&key) {
                            let y = b.add_position(
                                format!("{}@{}", sys.letter_text(l), sys.states[t]),
                                Player::P1,
                                [sys.output_label(t)],
                            )?;
                            p1.insert(key, y);
                            queue.push_back(key);
                        }
                        edges.push((x, p1[&key]));
                    }
                }
            }
        }
        for a in 1..=full {
            edges.push((from, p2[&(s, a)]));
        }
    }
    for (u, w) in edges {
        b.add_edge(u, w);
    }
    b.set_initial(v0);
    let arena = b.build()?;
    if let Some(d) = arena.validate().into_iter().next() {
        return Err(Error::Encoder(format!("encoded arena: {d}")));
    }
    Ok(NiArena { arena, p1, p2 })
}

/// `G ∧_o (p_o -> [R] p_o)` over the output labels occurring in the arena.
pub fn same_output(arena: &Arena) -> Formula {
    let labels: BTreeSet<String> = arena.propositions();
    Formula::all(labels.into_iter().map(|o| Formula::atom(o.clone()).implies(Formula::atom(o).r()))).always()
}

/// A controller as a positional Player 1 strategy: at `(a, s)` it allows the
/// letters for which `allow(s, letter)` holds (falling back to all letters).
pub fn controller(sys: &NiSys, g: &NiArena, allow: impl Fn(usize, usize) -> bool) -> Strategy {
    let full: u32 = (1u32 << sys.letter_count()) - 1;
    let mut choices = Vec::new();
    for (&(_, s), &v) in &g.p1 {
        let mut a = 0u32;
        for l in 0..sys.letter_count() {
            if allow(s, l) {
                a |= 1 << l;
            }
        }
        if a == 0 {
            a = full;
        }
        choices.push((v, g.p2[&(s, a)]));
    }
    Strategy::positional(Player::P1, choices)
}

/// Strict uniformity for SameOutput under low-equivalence; the strategy is the
/// trivial one allowing every input.
pub fn encode_noninterference(sys: &NiSys) -> Result<Encoded> {
    let g = build_ni_arena(sys)?;
    let h: Vec<Option<String>> = g
        .arena
        .positions()
        .map(|v| {
            g.p1.iter()
                .find(|(_, &x)| x == v)
                .and_then(|(&(letter, _), _)| letter.map(|l| sys.letter_text(sys.low_part(l))))
        })
        .collect();
    let t = build_morphism_equivalence(&g.arena, &h)?;
    let phi = same_output(&g.arena);
    let trivial = controller(sys, &g, |_, _| true);
    Ok(Encoded {
        instance: FusInstance::new_prerestricted(g.arena, t, phi, Player::P1)?,
        mode: Mode::Strict,
        strategy: Some(trivial),
    })
}
