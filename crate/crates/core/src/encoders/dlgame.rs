//! Evaluation games of Dependence Logic sentences.
//!
//! Input format:
//!
//! ```text
//! sentence forall x0 forall x1 (x0 = x1 | dep(x0, x1))
//! dom 0,1,2
//! rel R 0,1          # one tuple of relation R per line
//! ```
//!
//! Sentences are in negation normal form: `!` applies to `t = t`, `R(..)` and
//! `dep(..)` only. `&` binds tighter than `|`; a quantifier scopes over the
//! next atom, parenthesized formula or quantifier.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::Encoded;
use crate::arena::{ArenaBuilder, Player, Pos};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::synthesizer::{FusInstance, Mode};
use crate::transducer::TransducerBuilder;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Const(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DlFormula {
    Eq(Term, Term, bool),
    Rel(String, Vec<Term>, bool),
    Dep(Vec<Term>, bool),
    Or(Box<DlFormula>, Box<DlFormula>),
    And(Box<DlFormula>, Box<DlFormula>),
    Exists(String, Box<DlFormula>),
    Forall(String, Box<DlFormula>),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) | Term::Const(x) => write!(f, "{x}"),
        }
    }
}

fn terms(ts: &[Term]) -> String {
    ts.iter().map(Term::to_string).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for DlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let neg = |n: &bool| if *n { "!" } else { "" };
        match self {
            DlFormula::Eq(a, b, n) if *n => write!(f, "!({a} = {b})"),
            DlFormula::Eq(a, b, _) => write!(f, "{a} = {b}"),
            DlFormula::Rel(r, ts, n) => write!(f, "{}{r}({})", neg(n), terms(ts)),
            DlFormula::Dep(ts, n) => write!(f, "{}dep({})", neg(n), terms(ts)),
            DlFormula::Or(a, b) => write!(f, "({a} | {b})"),
            DlFormula::And(a, b) => write!(f, "({a} & {b})"),
            DlFormula::Exists(x, b) => write!(f, "exists {x} {b}"),
            DlFormula::Forall(x, b) => write!(f, "forall {x} {b}"),
        }
    }
}

impl DlFormula {
    /// Number of symbols, counting an atom as one and its negation as two.
    pub fn len(&self) -> usize {
        match self {
            DlFormula::Eq(_, _, n) | DlFormula::Rel(_, _, n) | DlFormula::Dep(_, n) => 1 + *n as usize,
            DlFormula::Or(a, b) | DlFormula::And(a, b) => a.len() + 1 + b.len(),
            DlFormula::Exists(_, b) | DlFormula::Forall(_, b) => 2 + b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn free_vars(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<String>| {
            if let Term::Var(x) = t {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
        };
        match self {
            DlFormula::Eq(a, b, _) => {
                term(a, bound);
                term(b, bound);
            }
            DlFormula::Rel(_, ts, _) | DlFormula::Dep(ts, _) => ts.iter().for_each(|t| term(t, bound)),
            DlFormula::Or(a, b) | DlFormula::And(a, b) => {
                a.free_vars(bound, out);
                b.free_vars(bound, out);
            }
            DlFormula::Exists(x, b) | DlFormula::Forall(x, b) => {
                bound.push(x.clone());
                b.free_vars(bound, out);
                bound.pop();
            }
        }
    }
}

/// A finite first-order model.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Model {
    pub domain: Vec<String>,
    pub relations: BTreeMap<String, BTreeSet<Vec<String>>>,
}

impl Model {
    pub fn holds(&self, rel: &str, args: &[String]) -> bool {
        self.relations.get(rel).is_some_and(|r| r.contains(args))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DlInput {
    pub sentence: DlFormula,
    pub model: Model,
}

impl DlInput {
    pub fn parse(text: &str) -> Result<DlInput> {
        let mut sentence = None;
        let mut model = Model::default();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let l = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if l.is_empty() {
                continue;
            }
            let (head, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
            let rest = rest.trim();
            match head {
                "sentence" => sentence = Some(rest.to_string()),
                "dom" => {
                    for v in rest.split(',').map(str::trim).filter(|v| !v.is_empty()) {
                        super::check_ident("domain element", v)?;
                        if v == "d" {
                            return Err(Error::Encoder("domain element `d` clashes with the label pd".into()));
                        }
                        if model.domain.iter().any(|x| x == v) {
                            return Err(Error::Duplicate(v.into()));
                        }
                        model.domain.push(v.to_string());
                    }
                }
                "rel" => {
                    let (r, tuple) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                    let tuple: Vec<String> = tuple
                        .split(',')
                        .map(str::trim)
                        .filter(|v| !v.is_empty())
                        .map(str::to_string)
                        .collect();
                    model.relations.entry(r.to_string()).or_default().insert(tuple);
                }
                other => {
                    return Err(Error::Parse {
                        line,
                        message: format!("unknown directive `{other}`"),
                    })
                }
            }
        }
        if model.domain.is_empty() {
            return Err(Error::Parse {
                line: 1,
                message: "empty or missing `dom`".into(),
            });
        }
        for tuples in model.relations.values() {
            for t in tuples {
                if let Some(v) = t.iter().find(|v| !model.domain.contains(v)) {
                    return Err(Error::Encoder(format!("relation tuple uses `{v}` outside the domain")));
                }
            }
        }
        let text = sentence.ok_or_else(|| Error::Parse {
            line: 1,
            message: "missing `sentence`".into(),
        })?;
        let sentence = parse_sentence(&text, &model)?;
        Ok(DlInput { sentence, model })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Eq,
    Not,
    And,
    Or,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            ' ' | '\t' => {}
            '(' => out.push((col, Tok::LParen)),
            ')' => out.push((col, Tok::RParen)),
            ',' => out.push((col, Tok::Comma)),
            '=' => out.push((col, Tok::Eq)),
            '!' => out.push((col, Tok::Not)),
            '&' => out.push((col, Tok::And)),
            '|' => out.push((col, Tok::Or)),
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let start = i;
                while i + 1 < chars.len() && (chars[i + 1].is_ascii_alphanumeric() || chars[i + 1] == '_') {
                    i += 1;
                }
                out.push((col, Tok::Ident(chars[start..=i].iter().collect())));
            }
            other => {
                return Err(Error::Syntax {
                    column: col,
                    message: format!("unexpected `{other}`"),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

struct DlParser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    model: &'a Model,
    bound: Vec<String>,
}

impl DlParser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let column = self.toks.get(self.pos).map_or(usize::MAX, |t| t.0);
        Err(Error::Syntax {
            column,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.err(format!("expected {t:?}"))
        }
    }

    fn or(&mut self) -> Result<DlFormula> {
        let mut f = self.and()?;
        while self.eat(&Tok::Or) {
            f = DlFormula::Or(Box::new(f), Box::new(self.and()?));
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<DlFormula> {
        let mut f = self.unary()?;
        while self.eat(&Tok::And) {
            f = DlFormula::And(Box::new(f), Box::new(self.unary()?));
        }
        Ok(f)
    }

    fn term(&mut self) -> Result<Term> {
        match self.peek().cloned() {
            Some(Tok::Ident(x)) => {
                self.pos += 1;
                if self.bound.contains(&x) {
                    Ok(Term::Var(x))
                } else if self.model.domain.contains(&x) {
                    Ok(Term::Const(x))
                } else {
                    Err(Error::Encoder(format!("free variable `{x}`")))
                }
            }
            _ => self.err("expected a term"),
        }
    }

    fn args(&mut self) -> Result<Vec<Term>> {
        self.expect(Tok::LParen)?;
        let mut ts = vec![self.term()?];
        while self.eat(&Tok::Comma) {
            ts.push(self.term()?);
        }
        self.expect(Tok::RParen)?;
        Ok(ts)
    }

    fn atom(&mut self, neg: bool) -> Result<DlFormula> {
        match self.peek().cloned() {
            Some(Tok::Ident(x)) if x == "dep" => {
                self.pos += 1;
                Ok(DlFormula::Dep(self.args()?, neg))
            }
            Some(Tok::Ident(x)) if self.toks.get(self.pos + 1).map(|t| &t.1) == Some(&Tok::LParen) => {
                self.pos += 1;
                Ok(DlFormula::Rel(x, self.args()?, neg))
            }
            Some(Tok::Ident(_)) => {
                let a = self.term()?;
                self.expect(Tok::Eq)?;
                let b = self.term()?;
                Ok(DlFormula::Eq(a, b, neg))
            }
            _ => self.err("expected an atomic formula"),
        }
    }

    fn unary(&mut self) -> Result<DlFormula> {
        match self.peek().cloned() {
            Some(Tok::Ident(q)) if q == "forall" || q == "exists" => {
                self.pos += 1;
                let x = match self.peek().cloned() {
                    Some(Tok::Ident(x)) => x,
                    _ => return self.err("expected a variable"),
                };
                self.pos += 1;
                self.bound.push(x.clone());
                let body = self.unary()?;
                self.bound.pop();
                Ok(if q == "forall" {
                    DlFormula::Forall(x, Box::new(body))
                } else {
                    DlFormula::Exists(x, Box::new(body))
                })
            }
            Some(Tok::Not) => {
                self.pos += 1;
                if self.eat(&Tok::LParen) {
                    let f = self.atom(true)?;
                    self.expect(Tok::RParen)?;
                    Ok(f)
                } else if matches!(self.peek(), Some(Tok::Ident(_))) {
                    let f = self.atom(true)?;
                    if matches!(f, DlFormula::Eq(..)) {
                        return self.err("write a negated equality as `!(a = b)`");
                    }
                    Ok(f)
                } else {
                    Err(Error::Encoder("sentence is not in negation normal form".into()))
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.or()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            _ => self.atom(false),
        }
    }
}

pub fn parse_sentence(text: &str, model: &Model) -> Result<DlFormula> {
    let mut p = DlParser {
        toks: lex(text)?,
        pos: 0,
        model,
        bound: Vec::new(),
    };
    let f = p.or()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    let mut free = BTreeSet::new();
    f.free_vars(&mut Vec::new(), &mut free);
    if let Some(x) = free.into_iter().next() {
        return Err(Error::Encoder(format!("free variable `{x}`")));
    }
    Ok(f)
}

pub type Assignment = Vec<(String, String)>;

pub(crate) fn eval_term(t: &Term, s: &Assignment) -> String {
    match t {
        Term::Const(c) => c.clone(),
        Term::Var(x) => s
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, v)| v.clone())
            .expect("variable bound by parsing"),
    }
}

/// Subformulas in pre-order with their symbol index `n` (starting at 1).
fn occurrences(f: &DlFormula) -> Vec<(&DlFormula, usize)> {
    fn go<'a>(f: &'a DlFormula, n: usize, out: &mut Vec<(&'a DlFormula, usize)>) {
        out.push((f, n));
        match f {
            DlFormula::Or(a, b) | DlFormula::And(a, b) => {
                go(a, n, out);
                go(b, n + 1 + a.len(), out);
            }
            DlFormula::Exists(_, b) | DlFormula::Forall(_, b) => go(b, n + 2, out),
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(f, 1, &mut out);
    out
}

/// Game position `(occurrence k, assignment)` plus its identifier.
pub struct GamePosition {
    pub occurrence: usize,
    pub assignment: Assignment,
    pub pos: Pos,
}

/// The evaluation game with uniformity relation and AgreeOnLast objective.
pub struct DlGame {
    pub encoded: Encoded,
    pub positions: Vec<GamePosition>,
}

/// Checker inputs for strategies of Player 1 in the evaluation game.
pub fn encode_dependence_game(input: &DlInput) -> Result<Encoded> {
    build_dependence_game(input).map(|g| g.encoded)
}

pub fn build_dependence_game(input: &DlInput) -> Result<DlGame> {
    let occ = occurrences(&input.sentence);
    // Map each occurrence node (by address) to its index.
    let index_of = |f: &DlFormula| occ.iter().position(|(g, _)| std::ptr::eq(*g, f)).unwrap();
    let m = &input.model;
    let mut b = ArenaBuilder::new("dlgame");
    let mut game: Vec<GamePosition> = Vec::new();
    let mut key: BTreeMap<(usize, Assignment), Pos> = BTreeMap::new();
    let mut edges: Vec<(Pos, Pos)> = Vec::new();
    let mut owner_of: Vec<Player> = Vec::new();

    let id_of = |k: usize, n: usize, s: &Assignment| -> String {
        let vals: Vec<String> = s.iter().map(|(x, v)| format!("{x}={v}")).collect();
        format!("f{k}@{n}[{}]", vals.join(";"))
    };

    let mut stack: Vec<(usize, Assignment)> = vec![(0, Vec::new())];
    let mut order: Vec<(usize, Assignment)> = Vec::new();
    while let Some((k, s)) = stack.pop() {
        if key.contains_key(&(k, s.clone())) {
            continue;
        }
        let (f, n) = occ[k];
        let (owner, labels): (Player, Vec<String>) = match f {
            DlFormula::Or(..) | DlFormula::Exists(..) => (Player::P1, vec![]),
            DlFormula::And(..) | DlFormula::Forall(..) => (Player::P2, vec![]),
            DlFormula::Dep(ts, false) => {
                let last = eval_term(ts.last().unwrap(), &s);
                (Player::P1, vec![format!("p{last}"), "pd".into(), "win1".into()])
            }
            DlFormula::Dep(_, true) => (Player::P1, vec![]),
            DlFormula::Eq(a, c, neg) => {
                let win = (eval_term(a, &s) == eval_term(c, &s)) != *neg;
                (Player::P1, if win { vec!["win1".into()] } else { vec![] })
            }
            DlFormula::Rel(r, ts, neg) => {
                let args: Vec<String> = ts.iter().map(|t| eval_term(t, &s)).collect();
                let win = m.holds(r, &args) != *neg;
                (Player::P1, if win { vec!["win1".into()] } else { vec![] })
            }
        };
        let p = b.add_position(id_of(k, n, &s), owner, labels)?;
        owner_of.push(owner);
        key.insert((k, s.clone()), p);
        game.push(GamePosition {
            occurrence: k,
            assignment: s.clone(),
            pos: p,
        });
        order.push((k, s.clone()));
        match f {
            DlFormula::Or(a, c) | DlFormula::And(a, c) => {
                stack.push((index_of(c), s.clone()));
                stack.push((index_of(a), s.clone()));
            }
            DlFormula::Exists(x, body) | DlFormula::Forall(x, body) => {
                for v in m.domain.iter().rev() {
                    let mut s2 = s.clone();
                    s2.push((x.clone(), v.clone()));
                    stack.push((index_of(body), s2));
                }
            }
            _ => {}
        }
    }
    for (k, s) in &order {
        let p = key[&(*k, s.clone())];
        let (f, _) = occ[*k];
        let children: Vec<Pos> = match f {
            DlFormula::Or(a, c) | DlFormula::And(a, c) => {
                vec![key[&(index_of(a), s.clone())], key[&(index_of(c), s.clone())]]
            }
            DlFormula::Exists(x, body) | DlFormula::Forall(x, body) => m
                .domain
                .iter()
                .map(|v| {
                    let mut s2 = s.clone();
                    s2.push((x.clone(), v.clone()));
                    key[&(index_of(body), s2)]
                })
                .collect(),
            _ => vec![p],
        };
        for c in children {
            edges.push((p, c));
        }
    }
    // Same-owner edges (including terminal self-loops) go through a
    // label-free position of the other player.
    let names: Vec<String> = game.iter().map(|g| id_of(g.occurrence, occ[g.occurrence].1, &g.assignment)).collect();
    for (u, w) in edges {
        if owner_of[u] == owner_of[w] {
            let d = b.add_position(format!("~{}>{}", names[u], names[w]), owner_of[u].opponent(), Vec::<String>::new())?;
            b.add_edge(u, d);
            b.add_edge(d, w);
        } else {
            b.add_edge(u, w);
        }
    }
    b.set_initial(0);
    let arena = b.build()?;
    if let Some(d) = arena.validate().into_iter().next() {
        return Err(Error::Encoder(format!("encoded arena: {d}")));
    }

    // Identity, or any pair of plays ending in dependence positions of the same
    // occurrence whose assignments agree on all but the last term.
    let dep_key = |g: &GamePosition| -> Option<(usize, Vec<String>)> {
        match occ[g.occurrence].0 {
            DlFormula::Dep(ts, false) => Some((
                g.occurrence,
                ts[..ts.len() - 1].iter().map(|t| eval_term(t, &g.assignment)).collect(),
            )),
            _ => None,
        }
    };
    let mut tb = TransducerBuilder::new("agree", arena.len(), arena.len());
    let start = tb.add_state("start", false);
    let id = tb.add_state("id", true);
    let pre = tb.add_state("pre", false);
    let fin = tb.add_state("end", true);
    for v in arena.positions() {
        tb.add_transition(start, Some(v), Some(v), id);
        tb.add_transition(id, Some(v), Some(v), id);
        for q in [start, pre] {
            tb.add_transition(q, Some(v), None, pre);
            tb.add_transition(q, None, Some(v), pre);
        }
    }
    for g in &game {
        for g2 in &game {
            if let (Some(a), Some(c)) = (dep_key(g), dep_key(g2)) {
                if a == c {
                    for q in [start, pre] {
                        tb.add_transition(q, Some(g.pos), Some(g2.pos), fin);
                    }
                }
            }
        }
    }
    let t = tb.build().restrict_to_plays(&arena);
    let phi = agree_on_last(&m.domain).and(Formula::atom("win1").eventually());
    Ok(DlGame {
        encoded: Encoded {
            instance: FusInstance::new_prerestricted(arena, t, phi, Player::P1)?,
            mode: Mode::Strict,
            strategy: None,
        },
        positions: game,
    })
}

/// `G(pd -> ([R] pa | [R] pb | ...))` over the domain.
pub fn agree_on_last(domain: &[String]) -> Formula {
    Formula::atom("pd")
        .implies(Formula::any(domain.iter().map(|a| Formula::atom(format!("p{a}")).r())))
        .always()
}
