//! Evaluation of LTL formulas on ultimately periodic words.

use std::collections::BTreeSet;

use crate::formula::Formula;

pub type Letter = BTreeSet<String>;

fn next_of(stem: usize, total: usize, i: usize) -> usize {
    if i + 1 < total {
        i + 1
    } else {
        stem
    }
}

/// Truth of `phi` at position 0 of `stem · cycle^ω`, by fixpoint iteration
/// over the `|stem| + |cycle|` distinct positions. `[R]` is not allowed.
pub fn lasso_eval(stem: &[Letter], cycle: &[Letter], phi: &Formula) -> bool {
    lasso_eval_all(stem, cycle, phi)[0]
}

/// Truth of `phi` at every distinct position of the lasso.
pub fn lasso_eval_all(stem: &[Letter], cycle: &[Letter], phi: &Formula) -> Vec<bool> {
    assert!(!cycle.is_empty(), "lasso needs a nonempty cycle");
    let word: Vec<&Letter> = stem.iter().chain(cycle).collect();
    let n = word.len();
    let s = stem.len();
    fn go(f: &Formula, word: &[&Letter], s: usize) -> Vec<bool> {
        let n = word.len();
        match f {
            Formula::True => vec![true; n],
            Formula::Atom(p) => word.iter().map(|l| l.contains(p)).collect(),
            Formula::Not(a) => go(a, word, s).into_iter().map(|b| !b).collect(),
            Formula::And(a, b) => {
                let (x, y) = (go(a, word, s), go(b, word, s));
                x.iter().zip(&y).map(|(p, q)| *p && *q).collect()
            }
            Formula::Next(a) => {
                let x = go(a, word, s);
                (0..n).map(|i| x[next_of(s, n, i)]).collect()
            }
            Formula::Until(a, b) => {
                let (x, y) = (go(a, word, s), go(b, word, s));
                let mut u = vec![false; n];
                loop {
                    let mut changed = false;
                    for i in (0..n).rev() {
                        let v = y[i] || (x[i] && u[next_of(s, n, i)]);
                        if v != u[i] {
                            u[i] = v;
                            changed = true;
                        }
                    }
                    if !changed {
                        return u;
                    }
                }
            }
            Formula::R(_) => panic!("lasso evaluation needs an LTL formula"),
        }
    }
    let _ = n;
    go(phi, &word, s)
}

/// Second evaluator: direct recursion on the semantics over unrolled positions.
pub fn lasso_eval_recursive(stem: &[Letter], cycle: &[Letter], phi: &Formula) -> bool {
    fn norm(s: usize, c: usize, i: usize) -> usize {
        if i < s {
            i
        } else {
            s + (i - s) % c
        }
    }
    fn at(f: &Formula, stem: &[Letter], cycle: &[Letter], i: usize) -> bool {
        let (s, c) = (stem.len(), cycle.len());
        let k = norm(s, c, i);
        let letter = if k < s { &stem[k] } else { &cycle[k - s] };
        match f {
            Formula::True => true,
            Formula::Atom(p) => letter.contains(p),
            Formula::Not(a) => !at(a, stem, cycle, i),
            Formula::And(a, b) => at(a, stem, cycle, i) && at(b, stem, cycle, i),
            Formula::Next(a) => at(a, stem, cycle, i + 1),
            Formula::Until(a, b) => {
                // Positions repeat after |stem| + |cycle| steps.
                for j in k..k + s + c {
                    if at(b, stem, cycle, j) {
                        return true;
                    }
                    if !at(a, stem, cycle, j) {
                        return false;
                    }
                }
                false
            }
            Formula::R(_) => panic!("lasso evaluation needs an LTL formula"),
        }
    }
    at(phi, stem, cycle, 0)
}
