//! Builders that turn classic frameworks into uniform-strategy instances:
//! imperfect information, opacity, non-interference, diagnosis, prognosis
//! and Dependence Logic evaluation games.

pub mod des;
pub mod dlgame;
pub mod impinfo;
pub mod nonint;

use crate::arena::{Arena, Player, Strategy};
use crate::error::{Error, Result};
use crate::synthesizer::{FusInstance, Mode};

pub use des::{encode_diagnosability, encode_prognosability, Des};
pub use dlgame::{encode_dependence_game, DlFormula, DlInput, Model};
pub use impinfo::{encode_imperfect_info, encode_imperfect_info_shifted, encode_opacity, ImpInfo};
pub use nonint::{encode_noninterference, NiSys};

/// An encoded instance together with the uniformity notion that the
/// framework calls for and, when there is a canonical one, a strategy to check.
#[derive(Clone, Debug)]
pub struct Encoded {
    pub instance: FusInstance,
    pub mode: Mode,
    pub strategy: Option<Strategy>,
}

/// Every positional strategy of `player`, ranging over positions that are
/// reachable and have more than one successor. Fails beyond `limit` strategies.
pub fn positional_strategies(arena: &Arena, player: Player, limit: usize) -> Result<Vec<Strategy>> {
    let reach = arena.reachable();
    let choice_points: Vec<_> = arena
        .positions()
        .filter(|&v| reach[v] && arena.owner(v) == player && arena.successors(v).len() > 1)
        .collect();
    let mut total: usize = 1;
    for &v in &choice_points {
        total = total.saturating_mul(arena.successors(v).len());
        if total > limit {
            return Err(Error::Encoder(format!(
                "more than {limit} positional strategies for Player {player}"
            )));
        }
    }
    let base = Strategy::first_successor(player, arena);
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; choice_points.len()];
    loop {
        let mut s = base.clone();
        for (&v, &d) in choice_points.iter().zip(&digits) {
            s.set_choice(0, v, arena.successors(v)[d]);
        }
        out.push(s);
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Ok(out);
            }
            digits[i] += 1;
            if digits[i] < arena.successors(choice_points[i]).len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

pub(crate) fn check_ident(what: &str, s: &str) -> Result<()> {
    if s.is_empty() || !s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(Error::Encoder(format!("{what} `{s}` must be alphanumeric")));
    }
    Ok(())
}

pub(crate) fn header<'a>(text: &'a str, keyword: &str) -> Result<(String, Vec<(usize, Vec<&'a str>)>)> {
    let mut name = None;
    let mut lines = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        if name.is_none() {
            if words[0] != keyword {
                return Err(Error::Parse {
                    line: n + 1,
                    message: format!("expected `{keyword}` header"),
                });
            }
            name = Some(words.get(1).copied().unwrap_or(keyword).to_string());
            continue;
        }
        lines.push((n + 1, words));
    }
    let name = name.ok_or_else(|| Error::Parse {
        line: 1,
        message: format!("missing `{keyword}` header"),
    })?;
    Ok((name, lines))
}
