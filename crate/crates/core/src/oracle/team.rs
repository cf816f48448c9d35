//! Team semantics for dependence logic.

use std::collections::BTreeSet;

use crate::encoders::dlgame::{eval_term, Assignment, DlFormula, DlInput, Model};

type Team = BTreeSet<Assignment>;

/// Whether the model satisfies the sentence, evaluated on the team `{∅}`.
pub fn dl_eval(input: &DlInput) -> bool {
    let team: Team = [Vec::new()].into_iter().collect();
    sat(&input.model, &input.sentence, &team)
}

fn literal(model: &Model, f: &DlFormula, s: &Assignment) -> bool {
    match f {
        DlFormula::Eq(a, b, neg) => (eval_term(a, s) == eval_term(b, s)) != *neg,
        DlFormula::Rel(r, ts, neg) => {
            let args: Vec<String> = ts.iter().map(|t| eval_term(t, s)).collect();
            model.holds(r, &args) != *neg
        }
        _ => unreachable!(),
    }
}

fn sat(model: &Model, f: &DlFormula, team: &Team) -> bool {
    match f {
        DlFormula::Eq(..) | DlFormula::Rel(..) => team.iter().all(|s| literal(model, f, s)),
        DlFormula::Dep(_, true) => team.is_empty(),
        DlFormula::Dep(ts, false) => {
            let (args, last) = ts.split_at(ts.len() - 1);
            team.iter().all(|s| {
                team.iter().all(|s2| {
                    args.iter().any(|t| eval_term(t, s) != eval_term(t, s2))
                        || eval_term(&last[0], s) == eval_term(&last[0], s2)
                })
            })
        }
        DlFormula::And(a, b) => sat(model, a, team) && sat(model, b, team),
        DlFormula::Or(a, b) => {
            let members: Vec<&Assignment> = team.iter().collect();
            (0u64..1 << members.len()).any(|mask| {
                let (mut x, mut y) = (Team::new(), Team::new());
                for (i, s) in members.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        x.insert((*s).clone());
                    } else {
                        y.insert((*s).clone());
                    }
                }
                sat(model, a, &x) && sat(model, b, &y)
            })
        }
        DlFormula::Forall(x, b) => {
            let t: Team = team
                .iter()
                .flat_map(|s| model.domain.iter().map(move |d| extend(s, x, d)))
                .collect();
            sat(model, b, &t)
        }
        DlFormula::Exists(x, b) => {
            let members: Vec<&Assignment> = team.iter().collect();
            let k = model.domain.len();
            let mut choice = vec![0usize; members.len()];
            loop {
                let t: Team = members
                    .iter()
                    .zip(&choice)
                    .map(|(s, &c)| extend(s, x, &model.domain[c]))
                    .collect();
                if sat(model, b, &t) {
                    return true;
                }
                // Next function from the team to the domain.
                let mut i = 0;
                loop {
                    if i == choice.len() {
                        return false;
                    }
                    choice[i] += 1;
                    if choice[i] < k {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
            }
        }
    }
}

fn extend(s: &Assignment, x: &str, d: &str) -> Assignment {
    let mut s2 = s.clone();
    s2.push((x.to_string(), d.to_string()));
    s2
}
