mod common;

use common::*;
use unistrat::arena::{outcome_arena, Player, Pos};
use unistrat::config::Config;
use unistrat::encoders::dlgame::build_dependence_game;
use unistrat::encoders::impinfo::same_act;
use unistrat::encoders::nonint::{build_ni_arena, controller};
use unistrat::encoders::{
    encode_diagnosability, encode_imperfect_info, encode_imperfect_info_shifted, encode_noninterference,
    encode_opacity, encode_prognosability, positional_strategies, Des, DlInput, Encoded, ImpInfo, NiSys,
};
use unistrat::oracle::{
    bounded_semantics, dl_eval, noninterference_direct, observation_based_direct, OracleVerdict, Universe,
};
use unistrat::synthesizer::{check_uniform, Mode};

fn assert_well_formed(e: &Encoded) {
    let inst = &e.instance;
    assert!(inst.arena.validate().is_empty(), "{}", inst.arena.name());
    let plays: Vec<Vec<Pos>> = (1..=3).flat_map(|k| inst.arena.enumerate_plays(k)).collect();
    for a in &plays {
        for b in &plays {
            if inst.transducer.recognizes(a, b) {
                assert!(inst.arena.is_play(a) && inst.arena.is_play(b));
            }
        }
    }
    if let Some(s) = &e.strategy {
        s.validate(&inst.arena).unwrap();
    }
}

#[test]
fn encoders_produce_valid_instances() {
    for (_, text) in fixtures_in("impinfo", "imp") {
        let raw = ImpInfo::parse(&text).unwrap();
        assert_well_formed(&encode_imperfect_info(&raw).unwrap());
        assert_well_formed(&encode_imperfect_info_shifted(&raw).unwrap());
        let (a, b) = encode_opacity(&raw).unwrap();
        assert_well_formed(&a);
        assert_well_formed(&b);
    }
    for (_, text) in fixtures_in("des", "des") {
        let des = Des::parse(&text).unwrap();
        assert_well_formed(&encode_diagnosability(&des).unwrap());
        assert_well_formed(&encode_prognosability(&des).unwrap());
    }
    for (_, text) in fixtures_in("nisys", "ni") {
        assert_well_formed(&encode_noninterference(&NiSys::parse(&text).unwrap()).unwrap());
    }
    for (_, text) in fixtures_in("dl", "dl") {
        let input = DlInput::parse(&text).unwrap();
        assert_well_formed(&build_dependence_game(&input).unwrap().encoded);
    }
}

#[test]
fn same_act_for_two_actions() {
    let raw = ImpInfo::parse(&fixture("impinfo/toy.imp")).unwrap();
    let e = encode_imperfect_info(&raw).unwrap();
    assert_eq!(e.instance.phi.to_string(), "G(p1 -> ([R] X pa | [R] X pb))");
    assert_eq!(e.instance.phi, same_act(&["a".into(), "b".into()]));
}

/// Strict SameAct checks against direct comparison of actions after
/// indistinguishable plays, for both relation variants.
fn observation_round_trip(dir: &str, bound: usize) -> usize {
    let config = Config::default();
    let mut checked = 0;
    for (name, text) in fixtures_in(dir, "imp") {
        let raw = ImpInfo::parse(&text).unwrap();
        let plain = encode_imperfect_info(&raw).unwrap();
        let shifted = encode_imperfect_info_shifted(&raw).unwrap();
        for s in positional_strategies(&plain.instance.arena, Player::P1, 64).unwrap() {
            let direct = observation_based_direct(&raw, &plain.instance.arena, &s, bound);
            let a = check_uniform(&plain.instance, &s, Mode::Strict, &config).unwrap().passed;
            let b = check_uniform(&shifted.instance, &s, Mode::Strict, &config).unwrap().passed;
            assert_eq!(a, direct, "{name}: {}", s.to_text(&plain.instance.arena));
            assert_eq!(b, direct, "{name} (shifted): {}", s.to_text(&plain.instance.arena));
            checked += 1;
        }
    }
    checked
}

#[test]
fn observation_based_strategies_round_trip() {
    assert!(observation_round_trip("impinfo", 6) > 20);
}

#[test]
fn long_observation_histories() {
    assert_eq!(observation_round_trip("impinfo_long", 8), 4);
}

#[test]
fn dependence_logic_truth_is_uniform_winning() {
    let config = Config::default();
    let fixtures = fixtures_in("dl", "dl");
    assert!(fixtures.len() >= 5);
    for (name, text) in fixtures {
        let input = DlInput::parse(&text).unwrap();
        let game = build_dependence_game(&input).unwrap();
        let inst = &game.encoded.instance;
        let exists = positional_strategies(&inst.arena, Player::P1, 1 << 12)
            .unwrap()
            .iter()
            .any(|s| check_uniform(inst, s, Mode::Strict, &config).unwrap().passed);
        assert_eq!(exists, dl_eval(&input), "{name}");
    }
}

#[test]
fn noninterference_round_trip() {
    let config = Config::default();
    let fixtures = fixtures_in("nisys", "ni");
    assert!(fixtures.len() >= 5);
    for (name, text) in fixtures {
        let sys = NiSys::parse(&text).unwrap();
        let g = build_ni_arena(&sys).unwrap();
        let e = encode_noninterference(&sys).unwrap();
        let high_mask: usize = (0..sys.inputs.len())
            .filter(|&i| sys.high.contains(&sys.inputs[i]))
            .map(|i| 1 << i)
            .sum();
        let controllers = [
            ("all", controller(&sys, &g, |_, _| true)),
            ("low only", controller(&sys, &g, |_, l| l & high_mask == 0)),
            ("high on", controller(&sys, &g, |_, l| l & high_mask != 0)),
        ];
        for (label, sigma) in controllers {
            let passed = check_uniform(&e.instance, &sigma, Mode::Strict, &config).unwrap().passed;
            assert_eq!(passed, noninterference_direct(&sys, &g, &sigma, 8), "{name} / {label}");
        }
    }
}

#[test]
fn noninterference_verdicts() {
    let config = Config::default();
    let verdict = |f: &str| {
        let e = encode_noninterference(&NiSys::parse(&fixture(f)).unwrap()).unwrap();
        check_uniform(&e.instance, e.strategy.as_ref().unwrap(), Mode::Strict, &config).unwrap().passed
    };
    assert!(!verdict("nisys/flip.ni"));
    assert!(!verdict("nisys/leak_direct.ni"));
    assert!(verdict("nisys/low_only.ni"));
    assert!(verdict("nisys/constant.ni"));
}

#[test]
fn opacity_check_matches_bounded_semantics() {
    let config = Config::default();
    for (name, text) in fixtures_in("impinfo", "imp") {
        let raw = ImpInfo::parse(&text).unwrap();
        let (_, b) = encode_opacity(&raw).unwrap();
        let inst = &b.instance;
        let sigma = b.strategy.unwrap();
        let res = check_uniform(inst, &sigma, Mode::Full, &config).unwrap();
        let eval = |stem: &[usize], cycle: &[usize]| {
            bounded_semantics(&inst.arena, &inst.transducer, Universe::AllPlays, stem, cycle, 0, &inst.phi, 64).unwrap()
        };
        match res.counterexample {
            Some(c) => assert_eq!(eval(&c.stem, &c.cycle), OracleVerdict::False, "{name}"),
            None => {
                let out = outcome_arena(&inst.arena, &sigma).unwrap();
                for (stem, cycle) in lassos(&out.arena, 4) {
                    let s: Vec<usize> = stem.iter().map(|&x| out.down[x]).collect();
                    let c: Vec<usize> = cycle.iter().map(|&x| out.down[x]).collect();
                    assert_ne!(eval(&s, &c), OracleVerdict::False, "{name}");
                }
            }
        }
    }
}

#[test]
fn prognosis_of_a_warned_fault() {
    // An observable warning precedes the fault, and nothing else emits it.
    let warned = "des warned\nstate s0 init\nstate w\nstate sf faulty\nstate n\n\
                  event u\nevent v\nevent f\nevent warn obs\nevent a obs\n\
                  trans s0 u w\ntrans w warn w2\ntrans s0 v n\ntrans n a n\n";
    assert!(Des::parse(warned).is_err());
    let warned = "des warned\nstate s0 init\nstate w\nstate w2\nstate sf faulty\nstate n\n\
                  event u\nevent v\nevent f\nevent warn obs\nevent a obs\n\
                  trans s0 u w\ntrans w warn w2\ntrans w2 f sf\ntrans sf a sf\ntrans s0 v n\ntrans n a n\n";
    let config = Config::default();
    let e = encode_prognosability(&Des::parse(warned).unwrap()).unwrap();
    assert!(check_uniform(&e.instance, e.strategy.as_ref().unwrap(), Mode::Full, &config).unwrap().passed);
    // Without the warning the fault cannot be announced.
    let e = encode_prognosability(&Des::parse(&fixture("des/confusable.des")).unwrap()).unwrap();
    assert!(!check_uniform(&e.instance, e.strategy.as_ref().unwrap(), Mode::Full, &config).unwrap().passed);
}

