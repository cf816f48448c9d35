//! Acceptance criteria, one test each. Every test prints a single
//! `PASS`/`FAIL` line with its measurements.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::*;
use unistrat::arena::{Arena, Player, Pos};
use unistrat::config::Config;
use unistrat::encoders::dlgame::build_dependence_game;
use unistrat::encoders::{
    encode_diagnosability, encode_imperfect_info, encode_prognosability, positional_strategies, Des, DlInput,
    ImpInfo,
};
use unistrat::formula::Formula;
use unistrat::ltlgame::dpa::{all_letters, determinize};
use unistrat::ltlgame::letter_of;
use unistrat::ltlgame::nba::ltl_to_nba;
use unistrat::ltlgame::parity::solve_parity;
use unistrat::marker::eliminate_r;
use unistrat::oracle::{
    bounded_semantics, dl_eval, lasso_eval, lasso_eval_all, observation_based_direct, parity_bruteforce,
    twin_plant_diagnosable, Letter, OracleVerdict, Universe,
};
use unistrat::powerset::{build_power_arena, info_set_bruteforce, lift_transducer};
use unistrat::synthesizer::{check_uniform, synthesize_fully_uniform, FusInstance, Mode, Verdict};
use unistrat::transducer::Transducer;

fn report(n: u32, name: &str, ok: bool, detail: String, took: Duration, limit: Duration) {
    let ok = ok && took < limit;
    println!(
        "[{}] criterion {n} {name}: {detail} ({:.2}s, limit {}s)",
        if ok { "PASS" } else { "FAIL" },
        took.as_secs_f64(),
        limit.as_secs()
    );
    assert!(ok, "criterion {n} failed: {detail}");
}

fn plays_up_to(arena: &Arena, len: usize) -> Vec<Vec<Pos>> {
    (1..=len).flat_map(|k| arena.enumerate_plays(k)).collect()
}

/// The 50 random instances shared by the first two criteria.
fn random_instances() -> Vec<(Arena, Transducer, FusInstance)> {
    (0..50u64)
        .map(|seed| {
            let mut r = rng(1000 + seed);
            let g = random_arena(&mut r, 8);
            let t = random_transducer(&mut r, g.len(), 5);
            let inst = FusInstance::new(g.clone(), &t, Formula::tt(), Player::P1).unwrap();
            (g, t, inst)
        })
        .collect()
}

#[test]
fn criterion_01_information_sets() {
    let start = Instant::now();
    let mut plays = 0;
    let mut bad = 0;
    for (g, t, inst) in random_instances() {
        let power = build_power_arena(&g, &inst.transducer, 1_000_000).unwrap();
        for rho in plays_up_to(&g, 6) {
            plays += 1;
            let x = *power.lift_play(&rho).unwrap().last().unwrap();
            let local: BTreeSet<Pos> = power.info_set(x).iter().copied().collect();
            if local != info_set_bruteforce(&g, &t, &rho).unwrap() {
                bad += 1;
            }
        }
    }
    report(
        1,
        "information sets",
        bad == 0,
        format!("50 instances, {plays} plays, {bad} mismatches"),
        start.elapsed(),
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_02_transducer_lift() {
    let start = Instant::now();
    let mut pairs = 0;
    let mut bad = 0;
    for (g, t, inst) in random_instances() {
        let power = build_power_arena(&g, &inst.transducer, 1_000_000).unwrap();
        let lifted = lift_transducer(&inst.transducer, &power).unwrap();
        let plays = plays_up_to(&g, 4);
        let lifts: Vec<Vec<usize>> = plays.iter().map(|p| power.lift_play(p).unwrap()).collect();
        for (a, la) in plays.iter().zip(&lifts) {
            for (b, lb) in plays.iter().zip(&lifts) {
                pairs += 1;
                if lifted.recognizes(la, lb) != t.recognizes(a, b) {
                    bad += 1;
                }
            }
        }
    }
    report(
        2,
        "transducer lift",
        bad == 0,
        format!("{pairs} play pairs, {bad} mismatches"),
        start.elapsed(),
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_03_ltl_backend() {
    let start = Instant::now();
    let atoms = ["p", "q"];
    let mut r = rng(3);
    let (mut cases, mut nba_bad, mut dpa_bad) = (0, 0, 0);
    while cases < 300 {
        let size = 1 + cases % 6;
        let phi = random_formula(&mut r, size, &atoms, false);
        let nba = ltl_to_nba(&phi, 1 << 16).unwrap();
        let dpa = determinize(&nba, &all_letters(nba.atoms.len()), 1 << 16).unwrap();
        for _ in 0..4 {
            let stem: Vec<Letter> = (0..r_len(&mut r)).map(|_| random_letter(&mut r, &atoms)).collect();
            let cycle: Vec<Letter> = (0..r_len(&mut r)).map(|_| random_letter(&mut r, &atoms)).collect();
            let expect = lasso_eval(&stem, &cycle, &phi);
            let bits = |w: &[Letter]| -> Vec<u64> { w.iter().map(|l| letter_of(&nba.atoms, l)).collect() };
            let by_nba = nba.accepts_lasso(&bits(&stem), &bits(&cycle));
            if by_nba != expect {
                nba_bad += 1;
            }
            if dpa.accepts_lasso(&bits(&stem), &bits(&cycle)) != Some(by_nba) {
                dpa_bad += 1;
            }
            cases += 1;
        }
    }
    let mut games = 0;
    let mut parity_bad = 0;
    for _ in 0..250 {
        let g = random_parity_game(&mut r, 8);
        if let Some(brute) = parity_bruteforce(&g, 1 << 14) {
            games += 1;
            if solve_parity(&g).winner != brute {
                parity_bad += 1;
            }
        }
    }
    report(
        3,
        "LTL backend",
        nba_bad == 0 && dpa_bad == 0 && parity_bad == 0 && games >= 200,
        format!(
            "{cases} lassos: {nba_bad} NBA and {dpa_bad} DPA mismatches; {games} parity games: {parity_bad} mismatches"
        ),
        start.elapsed(),
        Duration::from_secs(120),
    );
}

fn r_len(r: &mut rand_chacha::ChaCha8Rng) -> usize {
    use rand::Rng;
    r.gen_range(1..=4)
}

/// Depth-one fixtures: (arena, transducer, formulas).
fn depth_one_fixtures() -> Vec<(String, Arena, Transducer, Vec<Formula>)> {
    let formulas = [
        "G [R] (p | X p)",
        "F [R] X p",
        "G (p -> [R] F p)",
        "[R] G F p",
        "X X <R> p",
        "G ([R] p | [R] !p)",
        "F G [R] (p U q)",
        "[R] X q -> G F p",
    ];
    let pairs = [
        ("g0", "g0_id"),
        ("branch", "branch_obs"),
        ("branch", "branch_prefix"),
        ("diamond", "diamond_swap"),
        ("diamond", "diamond_all"),
    ];
    pairs
        .iter()
        .map(|(a, t)| {
            let g = Arena::parse(&fixture(&format!("games/{a}.arena"))).unwrap();
            let t = Transducer::parse(&fixture(&format!("games/{t}.fst")), &g).unwrap();
            let fs = formulas.iter().map(|f| Formula::parse(f).unwrap()).collect();
            (format!("{a}/{}", t.name()), g, t, fs)
        })
        .collect()
}

#[test]
fn criterion_04_r_elimination_transfer() {
    let start = Instant::now();
    let config = Config::default();
    let (mut conclusive, mut inconclusive, mut bad) = (0, 0, 0);
    for (_, g, t, formulas) in depth_one_fixtures() {
        let t = t.restrict_to_plays(&g);
        for phi in &formulas {
            let e = eliminate_r(&g, &t, phi, &config).unwrap();
            for (stem, cycle) in lassos(&g, 3) {
                let n = stem.len() + cycle.len();
                let marked = marked_values(&e.power, &stem, &cycle, &e.formula, n);
                for (i, &m) in marked.iter().enumerate() {
                    match bounded_semantics(&g, &t, Universe::AllPlays, &stem, &cycle, i, phi, 64).unwrap() {
                        OracleVerdict::Inconclusive => inconclusive += 1,
                        v => {
                            conclusive += 1;
                            if (v == OracleVerdict::True) != m {
                                bad += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    report(
        4,
        "R-elimination transfer",
        bad == 0 && conclusive > 0,
        format!("{conclusive} conclusive comparisons ({inconclusive} inconclusive skipped), {bad} mismatches"),
        start.elapsed(),
        Duration::from_secs(60),
    );
}

/// Truth values of `phi` at the first `n` indices of the lifted lasso on the marked arena.
fn marked_values(
    power: &unistrat::powerset::PowerArena,
    stem: &[Pos],
    cycle: &[Pos],
    phi: &Formula,
    n: usize,
) -> Vec<bool> {
    let at = |j: usize| if j < stem.len() { stem[j] } else { cycle[(j - stem.len()) % cycle.len()] };
    let idx = |j: usize| if j < stem.len() { j } else { stem.len() + (j - stem.len()) % cycle.len() };
    let mut xs = vec![power.arena.initial()];
    let mut seen = std::collections::HashMap::new();
    seen.insert((0usize, xs[0]), 0usize);
    let (j1, j2) = loop {
        let j = xs.len();
        let x = power.successor(*xs.last().unwrap(), at(j)).unwrap();
        if let Some(&j1) = seen.get(&(idx(j), x)) {
            break (j1, j);
        }
        seen.insert((idx(j), x), j);
        xs.push(x);
    };
    let word: Vec<Letter> = xs.iter().map(|&x| power.arena.labels(x).clone()).collect();
    let values = lasso_eval_all(&word[..j1], &word[j1..j2], phi);
    (0..n)
        .map(|i| values[if i < j1 { i } else { j1 + (i - j1) % (j2 - j1) }])
        .collect()
}

#[test]
fn criterion_05_diagnosability() {
    let start = Instant::now();
    let config = Config::default();
    let mut names = Vec::new();
    let mut bad = Vec::new();
    for (name, text) in fixtures_in("des", "des") {
        let des = Des::parse(&text).unwrap();
        let e = encode_diagnosability(&des).unwrap();
        let res = synthesize_fully_uniform(&e.instance, &config).unwrap();
        let expect = twin_plant_diagnosable(&des);
        if (res.verdict == Verdict::Exists) != expect {
            bad.push(name.clone());
        }
        names.push(format!("{name}={}", if expect { "diag" } else { "not" }));
    }
    let required = names.iter().any(|n| n == "confusable=not") && names.iter().any(|n| n == "signature=diag");
    report(
        5,
        "diagnosability vs twin plant",
        bad.is_empty() && names.len() >= 10 && required,
        format!("{} systems [{}], mismatches {:?}", names.len(), names.join(" "), bad),
        start.elapsed(),
        Duration::from_secs(60),
    );
}

/// Numbers of winning and of winning strictly-uniform Player 1 strategies.
fn dependence_game_counts(text: &str) -> (usize, usize, usize, bool) {
    let config = Config::default();
    let input = DlInput::parse(text).unwrap();
    let game = build_dependence_game(&input).unwrap();
    let inst = &game.encoded.instance;
    let winning_inst = FusInstance::new_prerestricted(
        inst.arena.clone(),
        inst.transducer.clone(),
        Formula::parse("F win1").unwrap(),
        Player::P1,
    )
    .unwrap();
    let strategies = positional_strategies(&inst.arena, Player::P1, 1 << 12).unwrap();
    let mut winning = 0;
    let mut uniform = 0;
    for s in &strategies {
        if check_uniform(&winning_inst, s, Mode::Full, &config).unwrap().passed {
            winning += 1;
            if check_uniform(inst, s, Mode::Strict, &config).unwrap().passed {
                uniform += 1;
            }
        }
    }
    (strategies.len(), winning, uniform, dl_eval(&input))
}

#[test]
fn criterion_06_dependence_game() {
    let start = Instant::now();
    let (n3, w3, u3, t3) = dependence_game_counts(&fixture("dl/fig1_m3.dl"));
    let (n2, w2, u2, t2) = dependence_game_counts(&fixture("dl/fig1_m2.dl"));
    report(
        6,
        "dependence game for forall x0 forall x1 (x0 = x1 | dep(x0, x1))",
        w3 > 0 && u3 == 0 && !t3 && u2 > 0 && t2,
        format!(
            "|M|=3: {n3} strategies, {w3} winning, {u3} uniform winning, team semantics {t3}; \
             |M|=2: {n2} strategies, {w2} winning, {u2} uniform winning, team semantics {t2}"
        ),
        start.elapsed(),
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_07_observation_based_strategies() {
    let start = Instant::now();
    let config = Config::default();
    let mut total = 0;
    let mut uniform = 0;
    let mut bad = Vec::new();
    let fixtures = fixtures_in("impinfo", "imp");
    for (name, text) in &fixtures {
        let raw = ImpInfo::parse(text).unwrap();
        let e = encode_imperfect_info(&raw).unwrap();
        let g = &e.instance.arena;
        for s in positional_strategies(g, Player::P1, 64).unwrap() {
            total += 1;
            let by_check = check_uniform(&e.instance, &s, Mode::Strict, &config).unwrap().passed;
            uniform += by_check as usize;
            if by_check != observation_based_direct(&raw, g, &s, 6) {
                bad.push(name.clone());
            }
        }
    }
    report(
        7,
        "observation-based strategies",
        bad.is_empty() && fixtures.len() >= 5,
        format!(
            "{} games, {total} strategies ({uniform} observation-based), mismatches in {:?}",
            fixtures.len(),
            bad
        ),
        start.elapsed(),
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_08_self_consistency() {
    let start = Instant::now();
    let config = Config::default();
    let mut instances: Vec<(String, FusInstance)> = Vec::new();
    for (name, g, t, formulas) in depth_one_fixtures() {
        for (k, phi) in formulas.into_iter().enumerate() {
            for p in [Player::P1, Player::P2] {
                instances.push((format!("{name}#{k}/{p}"), FusInstance::new(g.clone(), &t, phi.clone(), p).unwrap()));
            }
        }
    }
    for (name, text) in fixtures_in("des", "des") {
        let des = Des::parse(&text).unwrap();
        instances.push((format!("diag/{name}"), encode_diagnosability(&des).unwrap().instance));
        instances.push((format!("prog/{name}"), encode_prognosability(&des).unwrap().instance));
    }
    for (name, text) in fixtures_in("impinfo", "imp") {
        let raw = ImpInfo::parse(&text).unwrap();
        instances.push((format!("imp/{name}"), encode_imperfect_info(&raw).unwrap().instance));
    }
    for (name, text) in fixtures_in("dl", "dl") {
        let input = DlInput::parse(&text).unwrap();
        instances.push((format!("dl/{name}"), build_dependence_game(&input).unwrap().encoded.instance));
    }
    let g = Arena::parse(&fixture("games/branch.arena")).unwrap();
    let t = Transducer::equal_length(g.len());
    instances.push(("depth2".into(), FusInstance::new(g, &t, depth_two_formula(), Player::P1).unwrap()));

    let mut synthesized = 0;
    let mut failures = Vec::new();
    for (name, inst) in &instances {
        let res = synthesize_fully_uniform(inst, &config).unwrap();
        if let Some(s) = &res.strategy {
            synthesized += 1;
            if !check_uniform(inst, s, Mode::Full, &config).unwrap().passed {
                failures.push(name.clone());
            }
        }
    }
    report(
        8,
        "self-consistency",
        failures.is_empty() && synthesized > 0,
        format!(
            "{} instances, {synthesized} strategies synthesized, failed own check: {:?}",
            instances.len(),
            failures
        ),
        start.elapsed(),
        Duration::from_secs(120),
    );
}

fn depth_two_formula() -> Formula {
    Formula::parse("G (p -> [R] (q | X [R] F p))").unwrap()
}

#[test]
fn criterion_09_growth_trace() {
    let start = Instant::now();
    let g = Arena::parse(&fixture("games/branch.arena")).unwrap();
    let t = Transducer::equal_length(g.len());
    let inst = FusInstance::new(g, &t, depth_two_formula(), Player::P1).unwrap();
    let res = synthesize_fully_uniform(&inst, &Config::default()).unwrap();
    let depths: Vec<usize> = res.trace.iter().map(|s| s.r_depth).collect();
    let ok_depths = depths == vec![2, 1, 0];
    let (g1, g2) = (res.trace[1].arena_size as f64, res.trace[2].arena_size as f64);
    let t1 = res.trace[1].transducer_size.unwrap_or(0) as f64;
    // |G_2| <= |G_1| * 2^|T_1| * 2^(|T_1| |G_1|) + 1, compared in log scale.
    let ok_bound = g2 <= 1.0 || (g2 - 1.0).log2() <= g1.log2() + t1 + t1 * g1;
    report(
        9,
        "growth trace",
        ok_depths && ok_bound,
        format!(
            "R-depths {depths:?}, |G_1|={g1}, |T_1|={t1}, |G_2|={g2}, bound holds: {ok_bound}, verdict {:?}",
            res.verdict
        ),
        start.elapsed(),
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_10_complexity_note() {
    println!(
        "[INFO] criterion 10 complexity: the n-EXPTIME and doubly-exponential bounds are not measured; \
         only the size caps and the per-iteration trace of criterion 9 stand for them"
    );
}


