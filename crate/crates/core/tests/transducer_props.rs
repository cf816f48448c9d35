mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use unistrat::arena::{Arena, Player, Pos};
use unistrat::transducer::build_observation_equivalence;

fn words(n: usize, max: usize) -> Vec<Vec<Pos>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &layer {
            for v in 0..n {
                let mut w2: Vec<Pos> = w.clone();
                w2.push(v);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Random observation classes over the Player 1 positions.
fn random_classes(r: &mut rand_chacha::ChaCha8Rng, g: &Arena) -> Vec<Vec<Pos>> {
    let mut classes: Vec<Vec<Pos>> = Vec::new();
    for v in g.positions().filter(|&v| g.owner(v) == Player::P1) {
        if !classes.is_empty() && r.gen_bool(0.5) {
            let k = r.gen_range(0..classes.len());
            classes[k].push(v);
        } else {
            classes.push(vec![v]);
        }
    }
    classes
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn restriction_relates_plays_only(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_arena(&mut r, 4);
        let t = random_transducer(&mut r, g.len(), 3);
        let rt = t.restrict_to_plays(&g);
        let ws = words(g.len(), 3);
        for a in &ws {
            for b in &ws {
                let expect = g.is_play(a) && g.is_play(b) && t.recognizes(a, b);
                prop_assert_eq!(rt.recognizes(a, b), expect);
            }
        }
    }

    #[test]
    fn observation_equivalence_is_an_equivalence(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_arena(&mut r, 6);
        let classes = random_classes(&mut r, &g);
        let t = build_observation_equivalence(&g, &classes, true).unwrap();
        let plays: Vec<Vec<Pos>> = (1..=4).flat_map(|k| g.enumerate_plays(k)).collect();
        let rel = |a: &Vec<Pos>, b: &Vec<Pos>| t.recognizes(a, b);
        for a in &plays {
            prop_assert!(rel(a, a));
            for b in &plays {
                prop_assert_eq!(rel(a, b), rel(b, a));
                if rel(a, b) {
                    for c in &plays {
                        if rel(b, c) {
                            prop_assert!(rel(a, c));
                        }
                    }
                }
            }
        }
    }
}
