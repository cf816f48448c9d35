//! Fully-uniform strategy synthesis and uniformity checking of given strategies.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::arena::{outcome_arena, Arena, Player, Pos, Strategy};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::ltlgame::{self, graph, letter_of, ltl_to_nba, solve_ltl_game, LtlGameStats};
use crate::marker::{eliminate_r_with, Elimination};
use crate::powerset::{lift_through, PowerArena};
use crate::transducer::Transducer;

/// An arena, a relation on its plays, a formula and the player who must
/// enforce it.
#[derive(Clone, Debug)]
pub struct FusInstance {
    pub arena: Arena,
    /// The relation intersected with pairs of plays.
    pub transducer: Transducer,
    pub phi: Formula,
    pub protagonist: Player,
}

impl FusInstance {
    /// Validates the arena and restricts the relation to plays.
    pub fn new(arena: Arena, transducer: &Transducer, phi: Formula, protagonist: Player) -> Result<Self> {
        arena.ensure_valid()?;
        check_alphabet(&arena, transducer)?;
        let transducer = transducer.restrict_to_plays(&arena);
        Ok(FusInstance {
            arena,
            transducer,
            phi,
            protagonist,
        })
    }

    /// Like [`FusInstance::new`] for a transducer already known to relate plays only.
    pub fn new_prerestricted(arena: Arena, transducer: Transducer, phi: Formula, protagonist: Player) -> Result<Self> {
        arena.ensure_valid()?;
        check_alphabet(&arena, &transducer)?;
        Ok(FusInstance {
            arena,
            transducer,
            phi,
            protagonist,
        })
    }

    /// `|G| + |T| + |φ|`.
    pub fn size(&self) -> usize {
        self.arena.len() + self.transducer.state_count() + self.phi.size()
    }
}

fn check_alphabet(arena: &Arena, t: &Transducer) -> Result<()> {
    if t.input_size() != arena.len() || t.output_size() != arena.len() {
        return Err(Error::AlphabetMismatch(format!(
            "transducer alphabets ({}, {}) differ from the {} arena positions",
            t.input_size(),
            t.output_size(),
            arena.len()
        )));
    }
    Ok(())
}

/// Sizes entering iteration `k` of the elimination loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IterationStats {
    pub k: usize,
    pub arena_size: usize,
    /// `None` when the transducer of this level was not needed and not built.
    pub transducer_size: Option<usize>,
    pub r_depth: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Exists,
    NotExists,
}

#[derive(Clone, Debug)]
pub struct SynthesisResult {
    pub verdict: Verdict,
    /// Strategy on the original arena, present iff the verdict is `Exists`.
    pub strategy: Option<Strategy>,
    pub trace: Vec<IterationStats>,
    pub game: LtlGameStats,
}

impl SynthesisResult {
    /// Flat `key=value` lines.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let verdict = match self.verdict {
            Verdict::Exists => "exists",
            Verdict::NotExists => "not_exists",
        };
        out.push_str(&format!("verdict={verdict}\n"));
        out.push_str(&format!("iterations={}\n", self.trace.len().saturating_sub(1)));
        for s in &self.trace {
            out.push_str(&format!("level{}.arena={}\n", s.k, s.arena_size));
            if let Some(t) = s.transducer_size {
                out.push_str(&format!("level{}.transducer={}\n", s.k, t));
            }
            out.push_str(&format!("level{}.r_depth={}\n", s.k, s.r_depth));
        }
        out.push_str(&format!("nba_states={}\n", self.game.nba_states));
        out.push_str(&format!("dpa_states={}\n", self.game.dpa_states));
        out.push_str(&format!("product_nodes={}\n", self.game.product_nodes));
        out
    }
}

impl fmt::Display for SynthesisResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict {
            Verdict::Exists => writeln!(f, "a fully-uniform strategy exists")?,
            Verdict::NotExists => writeln!(f, "no fully-uniform strategy exists")?,
        }
        for s in &self.trace {
            write!(f, "  level {}: |G|={}", s.k, s.arena_size)?;
            match s.transducer_size {
                Some(t) => write!(f, " |T|={t}")?,
                None => write!(f, " |T|=-")?,
            }
            writeln!(f, " R-depth={}", s.r_depth)?;
        }
        writeln!(
            f,
            "  LTL game: {} NBA states, {} DPA states, {} product nodes",
            self.game.nba_states, self.game.dpa_states, self.game.product_nodes
        )
    }
}

/// Knowledge arenas built by successive eliminations; `levels[0]` sits over
/// the original arena.
#[derive(Clone, Debug, Default)]
pub struct Chain {
    pub levels: Vec<PowerArena>,
}

impl Chain {
    pub fn top<'a>(&'a self, base: &'a Arena) -> &'a Arena {
        self.levels.last().map_or(base, |p| &p.arena)
    }

    /// Original position under a position of level `level` (0 = original arena).
    pub fn project_from(&self, level: usize, mut y: usize) -> Pos {
        for l in (0..level).rev() {
            y = self.levels[l].down[y];
        }
        y
    }

    pub fn project(&self, y: usize) -> Pos {
        self.project_from(self.levels.len(), y)
    }

    /// Successor of top-level `y` (or the initial position when `None`) over original position `v`.
    pub fn step(&self, base: &Arena, y: Option<usize>, v: Pos) -> Option<usize> {
        let n = self.levels.len();
        match y {
            None => {
                if v != base.initial() {
                    return None;
                }
                Some(self.top(base).initial())
            }
            Some(y) => {
                let mut ys = vec![0; n + 1];
                ys[n] = y;
                for l in (0..n).rev() {
                    ys[l] = self.levels[l].down[ys[l + 1]];
                }
                if !base.is_edge(ys[0], v) {
                    return None;
                }
                let mut x = v;
                for l in 0..n {
                    x = self.levels[l].successor(ys[l + 1], x)?;
                }
                Some(x)
            }
        }
    }
}

struct Reduced {
    chain: Chain,
    formula: Formula,
    trace: Vec<IterationStats>,
    /// Input of the last elimination round: (arena level, transducer, marked atoms).
    last_round: Option<(usize, Transducer, Elimination)>,
}

fn reduce(arena: &Arena, t: &Transducer, phi: &Formula, config: &Config) -> Result<Reduced> {
    let mut chain = Chain::default();
    let mut level_t = Some(t.clone());
    let mut formula = phi.clone();
    let mut trace = vec![IterationStats {
        k: 0,
        arena_size: arena.len(),
        transducer_size: Some(t.state_count()),
        r_depth: phi.r_depth(),
    }];
    let mut last_round = None;
    let mut k = 0;
    while formula.r_depth() > 0 {
        let current = chain.top(arena).clone();
        let tk = level_t.take().expect("transducer lifted for every non-final round");
        let lift = formula.r_depth() > 1;
        let e = eliminate_r_with(&current, &tk, &formula, config, lift).map_err(|e| {
            e.at_stage(format!(
                "elimination round {k} (|G|={}, |T|={})",
                current.len(),
                tk.state_count()
            ))
        })?;
        debug_assert_eq!(e.formula.r_depth() + 1, formula.r_depth());
        formula = e.formula.clone();
        level_t = e.transducer.clone();
        chain.levels.push(e.power.clone());
        k += 1;
        trace.push(IterationStats {
            k,
            arena_size: e.power.len(),
            transducer_size: level_t.as_ref().map(Transducer::state_count),
            r_depth: formula.r_depth(),
        });
        last_round = Some((k - 1, tk, e));
    }
    Ok(Reduced {
        chain,
        formula,
        trace,
        last_round,
    })
}

/// Decides whether the protagonist has a fully-uniform strategy and returns one.
pub fn synthesize_fully_uniform(inst: &FusInstance, config: &Config) -> Result<SynthesisResult> {
    let r = reduce(&inst.arena, &inst.transducer, &inst.phi, config)?;
    let top = r.chain.top(&inst.arena);
    let game = solve_ltl_game(top, &r.formula, inst.protagonist, &config.caps)
        .map_err(|e| e.at_stage(format!("LTL game on the level-{} arena (|G|={})", r.chain.levels.len(), top.len())))?;
    let strategy = match game.strategy {
        Some(s) => Some(pullback_strategy(&s, &r.chain, &inst.arena)?),
        None => None,
    };
    Ok(SynthesisResult {
        verdict: if strategy.is_some() {
            Verdict::Exists
        } else {
            Verdict::NotExists
        },
        strategy,
        trace: r.trace,
        game: game.stats,
    })
}

/// Strictly-uniform synthesis is not offered.
pub fn synthesize_strictly_uniform(_inst: &FusInstance, _config: &Config) -> Result<SynthesisResult> {
    Err(Error::StrictSynthesisUnsupported)
}

/// Transfers a strategy on the top arena of `chain` to the original arena.
/// Memory pairs the current top-level position with the given strategy's memory.
pub fn pullback_strategy(product_strategy: &Strategy, chain: &Chain, base: &Arena) -> Result<Strategy> {
    if chain.levels.is_empty() {
        return Ok(product_strategy.clone());
    }
    let top = chain.top(base);
    let player = product_strategy.player();
    let mut mems: Vec<(Option<usize>, usize)> = vec![(None, product_strategy.initial_memory())];
    let mut index: HashMap<(Option<usize>, usize), usize> = HashMap::new();
    index.insert(mems[0], 0);
    let mut updates = Vec::new();
    let mut choices = Vec::new();
    let mut queue = VecDeque::new();
    queue.push_back(0);
    while let Some(i) = queue.pop_front() {
        let (y, m) = mems[i];
        let nexts: Vec<usize> = match y {
            None => vec![top.initial()],
            Some(y) => {
                let v = chain.project(y);
                if base.owner(v) == player {
                    let y2 = product_strategy.choice(m, y).ok_or_else(|| Error::PartialStrategy {
                        memory: product_strategy.memory_name(m).to_string(),
                        position: top.id(y).to_string(),
                    })?;
                    choices.push((i, v, chain.project(y2)));
                    vec![y2]
                } else {
                    top.successors(y).to_vec()
                }
            }
        };
        for y2 in nexts {
            let key = (Some(y2), product_strategy.update(m, y2));
            let j = *index.entry(key).or_insert_with(|| {
                mems.push(key);
                queue.push_back(mems.len() - 1);
                mems.len() - 1
            });
            updates.push((i, chain.project(y2), j));
        }
    }
    let names = mems
        .iter()
        .enumerate()
        .map(|(i, _)| format!("m{i}"))
        .collect();
    let mut s = Strategy::new(player, names, 0);
    for (i, v, j) in updates {
        s.set_update(i, v, j);
    }
    for (i, v, w) in choices {
        s.set_choice(i, v, w);
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Strict,
    Full,
}

/// A related play that ends in a position where the body of an `[R]` fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub atom: String,
    pub subformula: Formula,
    /// Index into the counterexample play.
    pub index: usize,
    /// Related finite play (original positions).
    pub related: Vec<Pos>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    /// Original positions; the play is `stem · cycle^ω`.
    pub stem: Vec<Pos>,
    pub cycle: Vec<Pos>,
    /// The plain LTL formula the play violates on the top-level arena.
    pub violated: Formula,
    pub witnesses: Vec<Witness>,
}

impl Counterexample {
    pub fn to_text(&self, arena: &Arena) -> String {
        let mut out = format!(
            "counterexample: {} ( {} )^w\nviolated: {}\n",
            arena.ids_of(&self.stem).join(" "),
            arena.ids_of(&self.cycle).join(" "),
            self.violated
        );
        for w in &self.witnesses {
            out.push_str(&format!(
                "witness: at index {} `{}` fails ({}); related play: {}\n",
                w.index,
                w.subformula,
                w.atom,
                arena.ids_of(&w.related).join(" ")
            ));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
}

/// Checks whether `sigma` is strictly- or fully-uniform for the instance.
pub fn check_uniform(inst: &FusInstance, sigma: &Strategy, mode: Mode, config: &Config) -> Result<CheckResult> {
    match mode {
        Mode::Full => check_on(&inst.arena, &inst.transducer, &inst.phi, sigma, config),
        Mode::Strict => {
            let out = outcome_arena(&inst.arena, sigma)?;
            let t_a = lift_through(&inst.transducer, &out.arena, &out.down)?;
            let trivial = Strategy::first_successor(sigma.player(), &out.arena);
            let r = check_on(&out.arena, &t_a, &inst.phi, &trivial, config)?;
            let map = |p: &[Pos]| p.iter().map(|&x| out.down[x]).collect::<Vec<_>>();
            Ok(CheckResult {
                passed: r.passed,
                counterexample: r.counterexample.map(|c| Counterexample {
                    stem: map(&c.stem),
                    cycle: map(&c.cycle),
                    violated: c.violated,
                    witnesses: c
                        .witnesses
                        .into_iter()
                        .map(|w| Witness {
                            related: map(&w.related),
                            ..w
                        })
                        .collect(),
                }),
            })
        }
    }
}

fn check_on(arena: &Arena, t: &Transducer, phi: &Formula, sigma: &Strategy, config: &Config) -> Result<CheckResult> {
    let r = reduce(arena, t, phi, config)?;
    let top = r.chain.top(arena);

    // Outcomes of sigma on the top-level arena: nodes (top position, memory).
    let mut nodes: Vec<(usize, usize)> = Vec::new();
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    let y0 = top.initial();
    let m0 = sigma.update(sigma.initial_memory(), arena.initial());
    index.insert((y0, m0), 0);
    nodes.push((y0, m0));
    succ.push(Vec::new());
    queue.push_back(0);
    while let Some(x) = queue.pop_front() {
        let (y, m) = nodes[x];
        let v = r.chain.project(y);
        let targets: Vec<usize> = if arena.owner(v) == sigma.player() {
            let w = sigma.choice(m, v).ok_or_else(|| Error::PartialStrategy {
                memory: sigma.memory_name(m).to_string(),
                position: arena.id(v).to_string(),
            })?;
            let y2 = r
                .chain
                .step(arena, Some(y), w)
                .ok_or_else(|| Error::NotASuccessor(arena.id(w).into(), arena.id(v).into()))?;
            vec![y2]
        } else {
            top.successors(y).to_vec()
        };
        for y2 in targets {
            let key = (y2, sigma.update(m, r.chain.project(y2)));
            let z = match index.get(&key) {
                Some(&z) => z,
                None => {
                    let z = nodes.len();
                    if z >= config.caps.max_product {
                        return Err(Error::CapExceeded {
                            what: "outcome product nodes",
                            reached: z + 1,
                            cap: config.caps.max_product,
                            stage: Some("uniformity check".into()),
                        });
                    }
                    index.insert(key, z);
                    nodes.push(key);
                    succ.push(Vec::new());
                    queue.push_back(z);
                    z
                }
            };
            succ[x].push(z);
        }
    }

    let nba = ltl_to_nba(&r.formula.clone().not(), config.caps.max_nba_states)?;
    let k = nba.len();
    if nodes.len().saturating_mul(k.max(1)) > config.caps.max_product {
        return Err(Error::CapExceeded {
            what: "check product nodes",
            reached: nodes.len() * k,
            cap: config.caps.max_product,
            stage: Some("uniformity check".into()),
        });
    }
    let id = |x: usize, s: usize| x * k + s;
    let mut psucc: Vec<Vec<usize>> = vec![Vec::new(); nodes.len() * k];
    for (x, &(y, _)) in nodes.iter().enumerate() {
        let l = letter_of(&nba.atoms, top.labels(y));
        for s in 0..k {
            for s2 in nba.post(s, l) {
                for &z in &succ[x] {
                    psucc[id(x, s)].push(id(z, s2));
                }
            }
        }
    }
    let accepting: Vec<bool> = (0..nodes.len() * k).map(|i| nba.accepting[i % k]).collect();
    let roots: Vec<usize> = nba.initial.iter().map(|&s| id(0, s)).collect();
    let Some((stem, cycle)) = graph::shortest_accepting_lasso(&psucc, &accepting, &roots) else {
        return Ok(CheckResult {
            passed: true,
            counterexample: None,
        });
    };
    // The lasso ends where it loops; shift so that the cycle is entered after the stem.
    let top_of = |i: usize| nodes[i / k].0;
    let stem_top: Vec<usize> = stem[..stem.len() - 1].iter().map(|&i| top_of(i)).collect();
    let mut cycle_top: Vec<usize> = vec![top_of(*stem.last().unwrap())];
    cycle_top.extend(cycle[..cycle.len() - 1].iter().map(|&i| top_of(i)));
    let mut cex = Counterexample {
        stem: stem_top.iter().map(|&y| r.chain.project(y)).collect(),
        cycle: cycle_top.iter().map(|&y| r.chain.project(y)).collect(),
        violated: r.formula.clone(),
        witnesses: Vec::new(),
    };
    if let Some((level, tk, e)) = &r.last_round {
        cex.witnesses = find_witnesses(arena, &r.chain, *level, tk, e, &r.formula, &stem_top, &cycle_top, config)?;
    }
    Ok(CheckResult {
        passed: false,
        counterexample: Some(cex),
    })
}

/// Blames an index of the violating lasso where some fresh atom is false:
/// the first index at which making every false atom true removes the
/// violation, or the first index with a false atom when no single index does.
/// For each false atom there, returns a related play ending where `ψ` fails.
#[allow(clippy::too_many_arguments)]
fn find_witnesses(
    base: &Arena,
    chain: &Chain,
    level: usize,
    tk: &Transducer,
    e: &Elimination,
    violated: &Formula,
    stem: &[usize],
    cycle: &[usize],
    config: &Config,
) -> Result<Vec<Witness>> {
    let top = chain.top(base);
    let level_arena = chain_level_arena(base, chain, level);
    let nba = ltl_to_nba(&violated.clone().not(), config.caps.max_nba_states)?;
    let atoms = &e.report.atoms;
    let word: Vec<&std::collections::BTreeSet<String>> = stem.iter().chain(cycle).map(|&y| top.labels(y)).collect();
    // Position of the level-(k+1) arena at each lasso index.
    let above: Vec<usize> = stem
        .iter()
        .chain(cycle)
        .map(|&y| project_to(chain, chain.levels.len(), level + 1, y))
        .collect();
    let is_false = |i: usize, name: &str| !e.power.arena.labels(above[i]).contains(name);
    let candidates: Vec<usize> = (0..word.len())
        .filter(|&i| atoms.iter().any(|(n, _)| is_false(i, n)))
        .collect();
    let Some(&first) = candidates.first() else {
        return Ok(Vec::new());
    };
    // Letters with the false atoms at `flip` (indices, except `keep`) set to true;
    // an index in the cycle stands for all its repetitions.
    let letters = |flip: &[usize], keep: Option<(usize, &str)>| -> Vec<u64> {
        word.iter()
            .enumerate()
            .map(|(i, labels)| {
                let mut l = letter_of(&nba.atoms, labels);
                if flip.contains(&i) {
                    for (n, _) in atoms {
                        if keep == Some((i, n.as_str())) {
                            continue;
                        }
                        if let Ok(b) = nba.atoms.binary_search(n) {
                            l |= 1 << b;
                        }
                    }
                }
                l
            })
            .collect()
    };
    let violates = |w: Vec<u64>| nba.accepts_lasso(&w[..stem.len()], &w[stem.len()..]);
    // A single index if one suffices, else the shortest run of candidates.
    let flipped: Vec<usize> = match candidates.iter().find(|&&i| !violates(letters(&[i], None))) {
        Some(&i) => vec![i],
        None => {
            let k = (1..=candidates.len())
                .find(|&k| !violates(letters(&candidates[..k], None)))
                .unwrap_or(1);
            candidates[..k].to_vec()
        }
    };
    let blamed = flipped
        .iter()
        .copied()
        .find(|&i| {
            let rest: Vec<usize> = flipped.iter().copied().filter(|&j| j != i).collect();
            violates(letters(&rest, None))
        })
        .or(flipped.last().copied())
        .unwrap_or(first);
    // Atoms at the blamed index whose own value matters.
    let essential: Vec<&String> = atoms
        .iter()
        .map(|(n, _)| n)
        .filter(|n| is_false(blamed, n) && violates(letters(&flipped, Some((blamed, n.as_str())))))
        .collect();

    // Base prefix up to the blamed index, lifted to level k.
    let prefix_len = blamed + 1;
    let full: Vec<usize> = stem.iter().chain(cycle.iter().cycle()).take(prefix_len.max(1)).copied().collect();
    let prefix_level: Vec<usize> = full.iter().map(|&y| project_to(chain, chain.levels.len(), level, y)).collect();
    let mut out = Vec::new();
    for (name, sub) in atoms {
        if !is_false(blamed, name) || !(essential.is_empty() || essential.contains(&name)) {
            continue;
        }
        let psi = match sub {
            Formula::R(inner) => (**inner).clone(),
            _ => continue,
        };
        let sat = ltlgame::universal_sat(&level_arena, &psi, &config.caps)?;
        if let Some(related) = related_play_to(&level_arena, tk, &prefix_level, |u| !sat[u]) {
            out.push(Witness {
                atom: name.clone(),
                subformula: sub.clone(),
                index: blamed,
                related: related.iter().map(|&u| chain.project_from(level, u)).collect(),
            });
        }
    }
    Ok(out)
}

fn chain_level_arena(base: &Arena, chain: &Chain, level: usize) -> Arena {
    if level == 0 {
        base.clone()
    } else {
        chain.levels[level - 1].arena.clone()
    }
}

/// Projects a position of level `from` down to level `to` (`to ≤ from`).
fn project_to(chain: &Chain, from: usize, to: usize, mut y: usize) -> usize {
    for l in (to..from).rev() {
        y = chain.levels[l].down[y];
    }
    y
}

/// A play related to `rho` by `t` whose last position satisfies `target`.
fn related_play_to(arena: &Arena, t: &Transducer, rho: &[Pos], target: impl Fn(Pos) -> bool) -> Option<Vec<Pos>> {
    type Conf = (usize, usize, Option<Pos>);
    let start: Conf = (t.initial(), 0, None);
    let mut parent: HashMap<Conf, (Conf, Option<Pos>)> = HashMap::new();
    let mut seen: HashSet<Conf> = HashSet::new();
    seen.insert(start);
    let mut queue = VecDeque::new();
    queue.push_back(start);
    while let Some(c @ (q, i, last)) = queue.pop_front() {
        if i == rho.len() && t.is_accepting(q) {
            if let Some(u) = last {
                if target(u) {
                    let mut play = Vec::new();
                    let mut cur = c;
                    while let Some(&(prev, out)) = parent.get(&cur) {
                        if let Some(o) = out {
                            play.push(o);
                        }
                        cur = prev;
                    }
                    play.reverse();
                    return Some(play);
                }
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
            let c2 = (tr.to, i2, last2);
            if seen.insert(c2) {
                parent.insert(c2, (c, tr.output));
                queue.push_back(c2);
            }
        }
    }
    None
}
