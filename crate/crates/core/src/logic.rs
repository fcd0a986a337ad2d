//! First-order epistemic formulas: syntax, parsing, classification and the
//! standard translation into first-order logic over histories.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Predicate names with their arities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Signature {
    pub predicates: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new<I, S>(preds: I) -> Self
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        Signature {
            predicates: preds.into_iter().map(|(n, k)| (n.into(), k)).collect(),
        }
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.predicates.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.predicates.iter().map(|(n, &k)| (n.as_str(), k))
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }

    /// Rejects names that are not identifiers or that use the `^` reserved
    /// for history predicates.
    pub fn validate(&self) -> Result<()> {
        for name in self.predicates.keys() {
            if !is_ident(name) || name.contains('^') || KEYWORDS.contains(&name.as_str()) {
                return Err(Error::Input(format!("invalid predicate name `{name}`")));
            }
        }
        Ok(())
    }
}

const KEYWORDS: [&str; 4] = ["true", "false", "forall", "exists"];

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '^'
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_ident_char) && !s.starts_with('\'')
}

/// First-order epistemic formulas. `Or`, `Implies`, `Iff`, `Exists`,
/// `True` and `False` are kept as written rather than desugared.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(String, Vec<String>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    Know(String, Box<Formula>),
}

impl Formula {
    pub fn atom<S: AsRef<str>>(pred: &str, args: &[S]) -> Formula {
        Formula::Atom(pred.to_string(), args.iter().map(|a| a.as_ref().to_string()).collect())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(x: &str, f: Formula) -> Formula {
        Formula::Forall(x.to_string(), Box::new(f))
    }

    pub fn exists(x: &str, f: Formula) -> Formula {
        Formula::Exists(x.to_string(), Box::new(f))
    }

    pub fn know(agent: &str, f: Formula) -> Formula {
        Formula::Know(agent.to_string(), Box::new(f))
    }

    /// Conjunction of a list; `True` when empty.
    pub fn conj(parts: Vec<Formula>) -> Formula {
        parts.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    pub fn parse(text: &str, signature: &Signature) -> Result<Formula> {
        parse_formula(text, signature)
    }

    pub fn classify(&self) -> Classification {
        let mut free = Vec::new();
        self.collect_free(&mut Vec::new(), &mut free);
        let modal = self.any(&|f| matches!(f, Formula::Know(..)));
        let quantifier_free = !self.any(&|f| matches!(f, Formula::Forall(..) | Formula::Exists(..)));
        Classification {
            closed: free.is_empty(),
            free_vars: free,
            modal,
            quantifier_free,
        }
    }

    pub fn free_vars(&self) -> Vec<String> {
        let mut free = Vec::new();
        self.collect_free(&mut Vec::new(), &mut free);
        free
    }

    pub fn is_modal(&self) -> bool {
        self.any(&|f| matches!(f, Formula::Know(..)))
    }

    /// Nesting depth of knowledge operators.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(..) => 0,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.modal_depth(),
            Formula::Know(_, a) => 1 + a.modal_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.modal_depth().max(b.modal_depth())
            }
        }
    }

    /// Every variable occurring in the formula, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom(_, args) => out.extend(args.iter().cloned()),
            Formula::Forall(x, _) | Formula::Exists(x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    /// Predicate names used in atoms.
    pub fn predicates(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(p, _) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    /// Checks atoms against a signature.
    pub fn check(&self, signature: &Signature) -> Result<()> {
        let mut err = None;
        self.visit(&mut |f| {
            if let (None, Formula::Atom(p, args)) = (&err, f) {
                match signature.arity(p) {
                    None => err = Some(Error::UnknownPredicate(p.clone())),
                    Some(k) if k != args.len() => {
                        err = Some(Error::Arity {
                            name: p.clone(),
                            expected: k,
                            found: args.len(),
                        })
                    }
                    _ => {}
                }
            }
        });
        err.map_or(Ok(()), Err)
    }

    fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(..) => vec![],
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) | Formula::Know(_, a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => vec![a, b],
        }
    }

    fn visit<F: FnMut(&Formula)>(&self, f: &mut F) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    fn any(&self, pred: &dyn Fn(&Formula) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any(pred))
    }

    fn collect_free(&self, bound: &mut Vec<String>, free: &mut Vec<String>) {
        match self {
            Formula::Atom(_, args) => {
                for a in args {
                    if !bound.contains(a) && !free.contains(a) {
                        free.push(a.clone());
                    }
                }
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                bound.push(x.clone());
                a.collect_free(bound, free);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound, free);
                }
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Forall(..) | Formula::Exists(..) | Formula::Know(..) => 0,
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(..) => 5,
            Formula::True | Formula::False | Formula::Atom(..) => 6,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        let paren = self.prec() < ctx;
        if paren {
            write!(f, "(")?;
        }
        let bin = |f: &mut fmt::Formatter<'_>, a: &Formula, op: &str, b: &Formula, l: u8, r: u8| {
            a.write(f, l)?;
            write!(f, " {op} ")?;
            b.write(f, r)
        };
        match self {
            Formula::True => write!(f, "true")?,
            Formula::False => write!(f, "false")?,
            Formula::Atom(p, args) => write!(f, "{p}({})", args.join(","))?,
            Formula::Not(a) => {
                write!(f, "!")?;
                a.write(f, 5)?
            }
            Formula::And(a, b) => bin(f, a, "&", b, 4, 5)?,
            Formula::Or(a, b) => bin(f, a, "|", b, 3, 4)?,
            Formula::Implies(a, b) => bin(f, a, "->", b, 3, 2)?,
            Formula::Iff(a, b) => bin(f, a, "<->", b, 1, 2)?,
            Formula::Forall(x, a) => {
                write!(f, "forall {x}. ")?;
                a.write(f, 0)?
            }
            Formula::Exists(x, a) => {
                write!(f, "exists {x}. ")?;
                a.write(f, 0)?
            }
            Formula::Know(ag, a) => {
                write!(f, "K[{ag}] ")?;
                a.write(f, 0)?
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

/// Syntactic fragment information for a formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    /// Free variables in order of first occurrence.
    pub free_vars: Vec<String>,
    pub modal: bool,
    pub quantifier_free: bool,
    pub closed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Not,
    And,
    Or,
    Implies,
    Iff,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            '!' | '¬' => Some(Tok::Not),
            '&' | '∧' => Some(Tok::And),
            '|' | '∨' => Some(Tok::Or),
            '→' => Some(Tok::Implies),
            '↔' => Some(Tok::Iff),
            _ => None,
        };
        if let Some(t) = single {
            out.push((start, t));
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push((start, Tok::Implies));
            i += 2;
        } else if c == '<' && chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') {
            out.push((start, Tok::Iff));
            i += 3;
        } else if is_ident_char(c) && c != '\'' {
            let mut s = String::new();
            while i < chars.len() && is_ident_char(chars[i]) {
                s.push(chars[i]);
                i += 1;
            }
            out.push((start, Tok::Ident(s)));
        } else {
            return Err(Error::Parse {
                pos: start,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    signature: &'a Signature,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn at(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |&(p, _)| p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.at(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn iff(&mut self) -> Result<Formula> {
        let mut left = self.implies()?;
        while self.peek() == Some(&Tok::Iff) {
            self.pos += 1;
            let right = self.implies()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn implies(&mut self) -> Result<Formula> {
        let left = self.or()?;
        if self.peek() == Some(&Tok::Implies) {
            self.pos += 1;
            let right = self.implies()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut left = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            let right = self.and()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut left = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Ident(s)) if s == "forall" || s == "exists" => {
                let universal = s == "forall";
                self.pos += 1;
                let x = self.ident("a variable")?;
                self.expect(Tok::Dot, "`.` after quantified variable")?;
                let body = self.iff()?;
                Ok(if universal {
                    Formula::forall(&x, body)
                } else {
                    Formula::exists(&x, body)
                })
            }
            Some(Tok::Ident(s)) if s == "K" && self.toks.get(self.pos + 1).map(|t| &t.1) == Some(&Tok::LBracket) => {
                self.pos += 2;
                let agent = self.ident("an agent")?;
                self.expect(Tok::RBracket, "`]`")?;
                let body = self.iff()?;
                Ok(Formula::know(&agent, body))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(s)) if s == "true" => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(Tok::Ident(s)) if s == "false" => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let mut args = Vec::new();
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    if self.peek() != Some(&Tok::RParen) {
                        args.push(self.ident("a variable")?);
                        while self.peek() == Some(&Tok::Comma) {
                            self.pos += 1;
                            args.push(self.ident("a variable")?);
                        }
                    }
                    self.expect(Tok::RParen, "`)` closing the argument list")?;
                }
                match self.signature.arity(&name) {
                    None => Err(Error::UnknownPredicate(name)),
                    Some(k) if k != args.len() => Err(Error::Arity {
                        name,
                        expected: k,
                        found: args.len(),
                    }),
                    Some(_) => Ok(Formula::Atom(name, args)),
                }
            }
            Some(_) => self.err("expected a formula"),
            None => self.err("unexpected end of formula"),
        }
    }
}

/// Parses a formula. Precedence from tightest: `!`, `&`, `|`, `->` (right
/// associative), `<->`; quantifiers and `K[a]` extend as far right as
/// possible.
pub fn parse_formula(text: &str, signature: &Signature) -> Result<Formula> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count(),
        signature,
    };
    let f = p.iff()?;
    if p.pos < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(f)
}

/// Names of the predicates of the history structure.
pub mod history_names {
    /// Copy of base predicate `P`, with the history as extra first argument.
    pub fn hat(pred: &str) -> String {
        format!("^{pred}")
    }

    /// Accessibility between histories for an agent.
    pub fn ep(agent: &str) -> String {
        format!("ep^{agent}")
    }

    /// Histories starting from a world.
    pub fn from(world: &str) -> String {
        format!("from^{world}")
    }

    /// Relates a history to the elements of its domain.
    pub const DOM: &str = "dom^";

    /// Relates the copies of one domain element in histories accessible
    /// from one another.
    pub const SAME: &str = "same^";
}

/// The signature of the history structure: `ep^a` per agent, `^P` of
/// arity k+1 per base predicate, `from^w` per world, `dom^` and `same^`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HistorySignature {
    pub base: Signature,
    pub agents: Vec<String>,
    pub worlds: Vec<String>,
}

impl HistorySignature {
    pub fn signature(&self) -> Signature {
        let mut preds = BTreeMap::new();
        for a in &self.agents {
            preds.insert(history_names::ep(a), 2);
        }
        for (p, k) in self.base.iter() {
            preds.insert(history_names::hat(p), k + 1);
        }
        for w in &self.worlds {
            preds.insert(history_names::from(w), 1);
        }
        preds.insert(history_names::DOM.to_string(), 2);
        preds.insert(history_names::SAME.to_string(), 2);
        Signature { predicates: preds }
    }
}

/// Translates an epistemic formula into first-order logic over the history
/// structure, with `y` standing for the current history. Fresh history
/// variables are primed copies of `y`. Under `K`, object variables free in
/// the body move to the copies of their values in the accessible history.
pub fn standard_translation(phi: &Formula, y: &str) -> Result<Formula> {
    let mut avoid = phi.all_vars();
    if avoid.contains(y) {
        return Err(Error::Capture(y.to_string()));
    }
    avoid.insert(y.to_string());
    Ok(translate(phi, y, &BTreeMap::new(), &mut avoid))
}

fn dom(y: &str, x: &str) -> Formula {
    Formula::atom(history_names::DOM, &[y, x])
}

fn fresh(base: &str, avoid: &mut BTreeSet<String>) -> String {
    let mut v = format!("{base}'");
    while avoid.contains(&v) {
        v.push('\'');
    }
    avoid.insert(v.clone());
    v
}

fn translate(phi: &Formula, y: &str, names: &BTreeMap<String, String>, avoid: &mut BTreeSet<String>) -> Formula {
    let name = |x: &String| names.get(x).cloned().unwrap_or_else(|| x.clone());
    let t = |f: &Formula, avoid: &mut BTreeSet<String>| Box::new(translate(f, y, names, avoid));
    match phi {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Atom(p, args) => {
            let args: Vec<String> = args.iter().map(name).collect();
            let mut hat_args = vec![y.to_string()];
            hat_args.extend(args.iter().cloned());
            let mut parts = vec![Formula::Atom(history_names::hat(p), hat_args)];
            parts.extend(args.iter().map(|x| dom(y, x)));
            Formula::conj(parts)
        }
        Formula::Not(a) => Formula::Not(t(a, avoid)),
        Formula::And(a, b) => Formula::And(t(a, avoid), t(b, avoid)),
        Formula::Or(a, b) => Formula::Or(t(a, avoid), t(b, avoid)),
        Formula::Implies(a, b) => Formula::Implies(t(a, avoid), t(b, avoid)),
        Formula::Iff(a, b) => Formula::Iff(t(a, avoid), t(b, avoid)),
        Formula::Forall(x, a) | Formula::Exists(x, a) => {
            let mut inner = names.clone();
            inner.remove(x);
            let body = translate(a, y, &inner, avoid);
            if matches!(phi, Formula::Forall(..)) {
                Formula::forall(x, Formula::implies(dom(y, x), body))
            } else {
                Formula::exists(x, Formula::and(dom(y, x), body))
            }
        }
        Formula::Know(agent, a) => {
            let y2 = fresh(y, avoid);
            let mut inner = names.clone();
            let mut moved = Vec::new();
            for x in a.free_vars() {
                let x2 = fresh(&x, avoid);
                moved.push((name(&x), x2.clone()));
                inner.insert(x, x2);
            }
            let mut body = translate(a, &y2, &inner, avoid);
            for (x, x2) in moved.into_iter().rev() {
                let same = Formula::atom(history_names::SAME, &[x.as_str(), x2.as_str()]);
                body = Formula::forall(&x2, Formula::implies(Formula::and(same, dom(&y2, &x2)), body));
            }
            Formula::forall(
                &y2,
                Formula::implies(Formula::atom(&history_names::ep(agent), &[y, y2.as_str()]), body),
            )
        }
    }
}
