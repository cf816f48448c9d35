mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use unistrat::arena::{Player, Pos};
use unistrat::formula::Formula;
use unistrat::powerset::build_power_arena;
use unistrat::synthesizer::FusInstance;
use unistrat::transducer::Transducer;

/// Transducer states and last written positions over runs reading `rho`,
/// by search over `(state, input read, last output)` configurations.
fn runs(g: &unistrat::arena::Arena, t: &Transducer, rho: &[Pos]) -> BTreeSet<(usize, Option<Pos>)> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![(t.initial(), 0usize, None::<Pos>)];
    seen.insert(stack[0]);
    let mut out = BTreeSet::new();
    while let Some((q, i, last)) = stack.pop() {
        if i == rho.len() {
            out.insert((q, last));
        }
        for tr in t.transitions().iter().filter(|tr| tr.from == q) {
            let i2 = match tr.input {
                None => i,
                Some(a) if i < rho.len() && rho[i] == a => i + 1,
                Some(_) => continue,
            };
            let last2 = match (tr.output, last) {
                (None, l) => l,
                (Some(b), None) if b == g.initial() => Some(b),
                (Some(b), Some(u)) if g.is_edge(u, b) => Some(b),
                _ => continue,
            };
            if seen.insert((tr.to, i2, last2)) {
                stack.push((tr.to, i2, last2));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn states_and_last_maps(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_arena(&mut r, 6);
        let t = random_transducer(&mut r, g.len(), 4);
        let inst = FusInstance::new(g.clone(), &t, Formula::tt(), Player::P1).unwrap();
        let t = &inst.transducer;
        let power = build_power_arena(&g, t, 100_000).unwrap();
        for k in 1..=6 {
            for rho in g.enumerate_plays(k) {
                let x = *power.lift_play(&rho).unwrap().last().unwrap();
                let node = &power.nodes[x];
                let confs = runs(&g, t, &rho);
                let states: BTreeSet<usize> = confs.iter().map(|c| c.0).collect();
                prop_assert_eq!(node.states.iter().copied().collect::<BTreeSet<_>>(), states);
                for &q in &node.states {
                    let last: BTreeSet<Pos> = confs.iter().filter(|c| c.0 == q).filter_map(|c| c.1).collect();
                    prop_assert_eq!(node.last_of(q).unwrap().iter().copied().collect::<BTreeSet<_>>(), last);
                }
            }
        }
    }

    #[test]
    fn play_bijection_and_labels(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_arena(&mut r, 6);
        let t = random_transducer(&mut r, g.len(), 3);
        let t = t.restrict_to_plays(&g);
        let power = build_power_arena(&g, &t, 100_000).unwrap();
        for x in power.arena.positions() {
            prop_assert_eq!(power.arena.owner(x), g.owner(power.down[x]));
            prop_assert_eq!(power.arena.labels(x), g.labels(power.down[x]));
        }
        for k in 1..=8 {
            for rho in g.enumerate_plays(k) {
                let lifted = power.lift_play(&rho).unwrap();
                prop_assert_eq!(power.down_play(&lifted), rho);
            }
            for hat in power.arena.enumerate_plays(k) {
                prop_assert_eq!(power.lift_play(&power.down_play(&hat)).unwrap(), hat);
            }
        }
    }
}
