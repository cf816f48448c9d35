//! Twin-plant test of diagnosability.

use std::collections::{BTreeMap, VecDeque};

use super::universal::components;
use crate::encoders::Des;

/// Whether every faulty run is eventually told apart from all fault-free runs
/// with the same observations.
///
/// Nodes are pairs `(s1, s2)` with `s2` fault-free; either component moves alone
/// on an unobservable event, or both move on the same observable one. The
/// system is not diagnosable iff some reachable cycle has `s1` faulty and
/// moves the first component.
pub fn twin_plant_diagnosable(des: &Des) -> bool {
    let obs = |e: usize| des.observable.contains(&e);
    let ok2 = |s: usize| !des.faulty.contains(&s);
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut nodes = Vec::new();
    // (target, first component moved)
    let mut edges: Vec<Vec<(usize, bool)>> = Vec::new();
    let start = (des.initial, des.initial);
    index.insert(start, 0);
    nodes.push(start);
    edges.push(Vec::new());
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        let (s1, s2) = nodes[n];
        let mut out = Vec::new();
        for &(a, e, b) in &des.trans {
            if a == s1 && !obs(e) {
                out.push(((b, s2), true));
            }
            if a == s2 && !obs(e) && ok2(b) {
                out.push(((s1, b), false));
            }
            if a == s1 && obs(e) {
                for &(a2, e2, b2) in &des.trans {
                    if a2 == s2 && e2 == e && ok2(b2) {
                        out.push(((b, b2), true));
                    }
                }
            }
        }
        for (key, moved) in out {
            let m = *index.entry(key).or_insert_with(|| {
                nodes.push(key);
                edges.push(Vec::new());
                queue.push_back(nodes.len() - 1);
                nodes.len() - 1
            });
            edges[n].push((m, moved));
        }
    }
    let succ: Vec<Vec<usize>> = edges.iter().map(|es| es.iter().map(|e| e.0).collect()).collect();
    let comp = components(&succ);
    !(0..nodes.len()).any(|n| {
        des.faulty.contains(&nodes[n].0) && edges[n].iter().any(|&(m, moved)| moved && comp[m] == comp[n])
    })
}
