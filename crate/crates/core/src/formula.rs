//! Formulas of LTL extended with the `[R]` modality.

use std::collections::BTreeSet;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Core syntax. Derived connectives are expanded at construction time.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    R(Box<Formula>),
}

use Formula::*;

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Atom(name.into())
    }

    pub fn tt() -> Formula {
        True
    }

    pub fn ff() -> Formula {
        Not(Box::new(True))
    }

    pub fn not(self) -> Formula {
        Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Formula {
        And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        self.not().and(other.not()).not()
    }

    pub fn implies(self, other: Formula) -> Formula {
        self.and(other.not()).not()
    }

    pub fn next(self) -> Formula {
        Next(Box::new(self))
    }

    pub fn until(self, other: Formula) -> Formula {
        Until(Box::new(self), Box::new(other))
    }

    pub fn eventually(self) -> Formula {
        True.until(self)
    }

    pub fn always(self) -> Formula {
        self.not().eventually().not()
    }

    pub fn weak_until(self, other: Formula) -> Formula {
        self.clone().until(other).or(self.always())
    }

    pub fn r(self) -> Formula {
        R(Box::new(self))
    }

    pub fn diamond_r(self) -> Formula {
        self.not().r().not()
    }

    /// Conjunction of a nonempty list, left-nested.
    pub fn all(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::and).unwrap_or(True)
    }

    /// Disjunction of a list, left-nested; `false` when empty.
    pub fn any(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or_else(Formula::ff)
    }

    pub fn parse(text: &str) -> Result<Formula> {
        Parser::new(text)?.parse_all()
    }

    /// Maximum nesting of `[R]`.
    pub fn r_depth(&self) -> usize {
        match self {
            True | Atom(_) => 0,
            Not(a) | Next(a) => a.r_depth(),
            And(a, b) | Until(a, b) => a.r_depth().max(b.r_depth()),
            R(a) => 1 + a.r_depth(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            True | Atom(_) => 1,
            Not(a) | Next(a) | R(a) => 1 + a.size(),
            And(a, b) | Until(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Distinct subformulas in pre-order of first occurrence, starting with `self`.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out: Vec<&Formula> = Vec::new();
        self.walk(&mut |f| {
            if !out.contains(&f) {
                out.push(f);
            }
        });
        out
    }

    fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Formula)) {
        visit(self);
        match self {
            True | Atom(_) => {}
            Not(a) | Next(a) | R(a) => a.walk(visit),
            And(a, b) | Until(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Atom(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    /// Subformulas `[R] ψ` with ψ plain LTL, without duplicates, in first-occurrence order.
    pub fn depth1_r_subformulas(&self) -> Vec<Formula> {
        let mut out: Vec<Formula> = Vec::new();
        self.walk(&mut |f| {
            if let R(inner) = f {
                if inner.r_depth() == 0 && !out.contains(f) {
                    out.push(f.clone());
                }
            }
        });
        out
    }

    /// Replaces every occurrence of `target` by the atom `atom`.
    pub fn substitute(&self, target: &Formula, atom: &str) -> Result<Formula> {
        if self.atoms().contains(atom) {
            return Err(Error::NameCollision(atom.to_string()));
        }
        Ok(self.replace(target, atom))
    }

    fn replace(&self, target: &Formula, atom: &str) -> Formula {
        if self == target {
            return Atom(atom.to_string());
        }
        match self {
            True | Atom(_) => self.clone(),
            Not(a) => Not(Box::new(a.replace(target, atom))),
            Next(a) => Next(Box::new(a.replace(target, atom))),
            R(a) => R(Box::new(a.replace(target, atom))),
            And(a, b) => And(Box::new(a.replace(target, atom)), Box::new(b.replace(target, atom))),
            Until(a, b) => Until(Box::new(a.replace(target, atom)), Box::new(b.replace(target, atom))),
        }
    }

    /// Deterministic fresh proposition name standing for `[R] psi`.
    pub fn fresh_atom_name(k: usize, psi: &Formula) -> String {
        let digest = Sha256::digest(psi.to_string().as_bytes());
        let hex: String = digest.iter().take(4).map(|b| format!("{b:02x}")).collect();
        format!("@R{k}#{hex}")
    }
}

fn not_of(f: &Formula) -> Option<&Formula> {
    match f {
        Not(a) => Some(a),
        _ => None,
    }
}

fn as_or(f: &Formula) -> Option<(&Formula, &Formula)> {
    let inner = not_of(f)?;
    if let And(a, b) = inner {
        Some((not_of(a)?, not_of(b)?))
    } else {
        None
    }
}

fn as_implies(f: &Formula) -> Option<(&Formula, &Formula)> {
    let inner = not_of(f)?;
    if let And(a, b) = inner {
        Some((a, not_of(b)?))
    } else {
        None
    }
}

fn as_eventually(f: &Formula) -> Option<&Formula> {
    match f {
        Until(a, b) if **a == True => Some(b),
        _ => None,
    }
}

fn as_always(f: &Formula) -> Option<&Formula> {
    not_of(as_eventually(not_of(f)?)?)
}

fn as_weak_until(f: &Formula) -> Option<(&Formula, &Formula)> {
    let (l, r) = as_or(f)?;
    if let Until(a, b) = l {
        if as_always(r) == Some(&**a) {
            return Some((a, b));
        }
    }
    None
}

fn as_diamond_r(f: &Formula) -> Option<&Formula> {
    match not_of(f)? {
        R(a) => not_of(a),
        _ => None,
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Formula::ff() {
            return write!(f, "false");
        }
        if let Some((a, b)) = as_weak_until(self) {
            return write!(f, "({a} W {b})");
        }
        if let Some((a, b)) = as_or(self) {
            return write!(f, "({a} | {b})");
        }
        if let Some((a, b)) = as_implies(self) {
            return write!(f, "({a} -> {b})");
        }
        if let Some(a) = as_always(self) {
            return unary(f, "G", a);
        }
        if let Some(a) = as_diamond_r(self) {
            return unary(f, "<R>", a);
        }
        if let Some(a) = as_eventually(self) {
            return unary(f, "F", a);
        }
        match self {
            True => write!(f, "true"),
            Atom(p) => write!(f, "{p}"),
            Not(a) => write!(f, "!{a}"),
            And(a, b) => write!(f, "({a} & {b})"),
            Next(a) => unary(f, "X", a),
            Until(a, b) => write!(f, "({a} U {b})"),
            R(a) => unary(f, "[R]", a),
        }
    }
}

fn unary(f: &mut fmt::Formatter<'_>, op: &str, a: &Formula) -> fmt::Result {
    let inner = a.to_string();
    if inner.starts_with('(') {
        write!(f, "{op}{inner}")
    } else {
        write!(f, "{op} {inner}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Bang,
    Amp,
    Bar,
    Arrow,
    BoxR,
    DiamondR,
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '@'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '@' || c == '#'
}

impl Parser {
    fn new(text: &str) -> Result<Parser> {
        let chars: Vec<char> = text.chars().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            let (tok, width) = if rest.starts_with("[R]") {
                (Tok::BoxR, 3)
            } else if rest.starts_with("<R>") {
                (Tok::DiamondR, 3)
            } else if rest.starts_with("->") {
                (Tok::Arrow, 2)
            } else {
                match c {
                    '(' => (Tok::LParen, 1),
                    ')' => (Tok::RParen, 1),
                    '!' => (Tok::Bang, 1),
                    '&' => (Tok::Amp, 1),
                    '|' => (Tok::Bar, 1),
                    c if is_ident_start(c) => {
                        let mut j = i;
                        while j < chars.len() && is_ident_char(chars[j]) {
                            j += 1;
                        }
                        (Tok::Ident(chars[i..j].iter().collect()), j - i)
                    }
                    other => {
                        return Err(Error::Syntax {
                            column: col,
                            message: format!("unknown token `{other}`"),
                        })
                    }
                }
            };
            toks.push((col, tok));
            i += width;
        }
        Ok(Parser {
            toks,
            pos: 0,
            len: chars.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map(|(c, _)| *c).unwrap_or(self.len + 1)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            column: self.column(),
            message: message.into(),
        })
    }

    fn peek_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn parse_all(mut self) -> Result<Formula> {
        let f = self.parse_until()?;
        if self.pos != self.toks.len() {
            return self.err("unexpected trailing input");
        }
        Ok(f)
    }

    fn parse_until(&mut self) -> Result<Formula> {
        let lhs = self.parse_implies()?;
        if self.peek_keyword("U") {
            self.pos += 1;
            let rhs = self.parse_implies()?;
            return Ok(lhs.until(rhs));
        }
        if self.peek_keyword("W") {
            self.pos += 1;
            let rhs = self.parse_implies()?;
            return Ok(lhs.weak_until(rhs));
        }
        Ok(lhs)
    }

    fn parse_implies(&mut self) -> Result<Formula> {
        let lhs = self.parse_or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.parse_implies()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn parse_or(&mut self) -> Result<Formula> {
        let mut lhs = self.parse_and()?;
        while self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            lhs = lhs.or(self.parse_and()?);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Formula> {
        let mut lhs = self.parse_unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            lhs = lhs.and(self.parse_unary()?);
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Formula> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return self.err("unexpected end of formula"),
        };
        match tok {
            Tok::Bang => {
                self.pos += 1;
                Ok(self.parse_unary()?.not())
            }
            Tok::BoxR => {
                self.pos += 1;
                Ok(self.parse_unary()?.r())
            }
            Tok::DiamondR => {
                self.pos += 1;
                Ok(self.parse_unary()?.diamond_r())
            }
            Tok::LParen => {
                self.pos += 1;
                let f = self.parse_until()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(f)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                match name.as_str() {
                    "X" => Ok(self.parse_unary()?.next()),
                    "F" => Ok(self.parse_unary()?.eventually()),
                    "G" => Ok(self.parse_unary()?.always()),
                    "true" => Ok(True),
                    "false" => Ok(Formula::ff()),
                    "U" | "W" => {
                        self.pos -= 1;
                        self.err(format!("unexpected `{name}`"))
                    }
                    _ => Ok(Atom(name)),
                }
            }
            other => self.err(format!("unexpected {other:?}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Formula {
        Formula::parse(s).unwrap()
    }

    #[test]
    fn same_act_text_round_trips() {
        let s = "G(p1 -> ([R] X pa | [R] X pb))";
        let f = p(s);
        assert_eq!(f.to_string(), s);
        assert_eq!(f.r_depth(), 1);
    }

    #[test]
    fn prognose_shape() {
        let f = p("(!pf) W (!pf & [R] X pf)");
        let pf = Formula::atom("pf");
        let expected = pf
            .clone()
            .not()
            .weak_until(pf.clone().not().and(pf.next().r()));
        assert_eq!(f, expected);
        assert_eq!(p(&f.to_string()), f);
    }

    #[test]
    fn atoms_and_depth() {
        assert_eq!(p("p"), Formula::atom("p"));
        assert_eq!(p("F p").r_depth(), 0);
        assert_eq!(p("[R] X [R] q").r_depth(), 2);
        assert_eq!(p("G(pd -> ([R] p0 | [R] p1))").r_depth(), 1);
    }

    #[test]
    fn diamond_is_not_box_not() {
        assert_eq!(p("<R> q"), p("![R]!q"));
    }

    #[test]
    fn depth1_subformulas() {
        assert_eq!(p("[R] X [R] q").depth1_r_subformulas(), vec![p("[R] q")]);
        assert!(p("F p").depth1_r_subformulas().is_empty());
        assert_eq!(p("[R] p & [R] p").depth1_r_subformulas().len(), 1);
    }

    #[test]
    fn substitution() {
        let f = p("[R] X [R] q");
        let g = f.substitute(&p("[R] q"), "p_Rq").unwrap();
        assert_eq!(g, p("[R] X p_Rq"));
        assert_eq!(p("F p").substitute(&p("[R] q"), "x").unwrap(), p("F p"));
        assert_eq!(
            p("[R] p & X [R] p").substitute(&p("[R] p"), "x").unwrap(),
            p("x & X x")
        );
        assert_eq!(
            p("p & [R] q").substitute(&p("[R] q"), "p"),
            Err(Error::NameCollision("p".into()))
        );
    }

    #[test]
    fn fresh_names_parse_as_atoms() {
        let n = Formula::fresh_atom_name(0, &p("X q"));
        assert!(n.starts_with("@R0#"));
        assert_eq!(p(&format!("F {n}")), Formula::atom(n).eventually());
    }

    #[test]
    fn precedence() {
        assert_eq!(p("a & b | c"), p("(a & b) | c"));
        assert_eq!(p("a | b -> c"), p("(a | b) -> c"));
        assert_eq!(p("a -> b -> c"), p("a -> (b -> c)"));
        assert_eq!(p("a & b U c"), p("(a & b) U c"));
        assert_eq!(p("!X a"), p("!(X a)"));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(Formula::parse("a &"), Err(Error::Syntax { .. })));
        assert!(matches!(
            Formula::parse("a $ b"),
            Err(Error::Syntax { column: 3, .. })
        ));
        assert!(Formula::parse("(a").is_err());
        assert!(Formula::parse("a U b U c").is_err());
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(True),
            prop::sample::select(vec!["a", "b", "c", "@R1#ff"]).prop_map(Formula::atom),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                inner.clone().prop_map(Formula::next),
                inner.clone().prop_map(Formula::r),
                inner.clone().prop_map(Formula::always),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.until(b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.weak_until(b)),
                (inner.clone(), inner).prop_map(|(a, b)| a.implies(b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in arb_formula()) {
            prop_assert_eq!(Formula::parse(&f.to_string()).unwrap(), f);
        }

        #[test]
        fn eliminating_depth1_lowers_depth(f in arb_formula()) {
            prop_assume!(f.r_depth() >= 1);
            let mut g = f.clone();
            for (k, sub) in f.depth1_r_subformulas().iter().enumerate() {
                let name = Formula::fresh_atom_name(k, sub);
                g = g.substitute(sub, &name).unwrap();
            }
            prop_assert_eq!(g.r_depth(), f.r_depth() - 1);
        }

        #[test]
        fn subformulas_closed(f in arb_formula()) {
            let subs = f.subformulas();
            prop_assert_eq!(subs[0], &f);
            for s in &subs {
                match s {
                    Not(a) | Next(a) | R(a) => prop_assert!(subs.contains(&&**a)),
                    And(a, b) | Until(a, b) => {
                        prop_assert!(subs.contains(&&**a));
                        prop_assert!(subs.contains(&&**b));
                    }
                    _ => {}
                }
            }
        }
    }
}
