//! Regular expressions over an [`Alphabet`]: letters, `|`, concatenation
//! (juxtaposition or `·`), `*`, `+`, `?`, parentheses, `ε` and `∅`.

use super::{Alphabet, Automaton, Label, StateId, Sym};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Regex {
    Empty,
    Epsilon,
    Letter(Sym),
    Concat(Vec<Regex>),
    Alt(Vec<Regex>),
    Star(Box<Regex>),
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    text: &'a str,
    pos: usize,
    alphabet: &'a Alphabet,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn alt(&mut self) -> Result<Regex> {
        let mut branches = vec![self.concat()?];
        while self.peek() == Some('|') {
            self.pos += 1;
            branches.push(self.concat()?);
        }
        Ok(if branches.len() == 1 {
            branches.pop().unwrap()
        } else {
            Regex::Alt(branches)
        })
    }

    fn concat(&mut self) -> Result<Regex> {
        let mut parts = Vec::new();
        loop {
            match self.peek() {
                None | Some('|') | Some(')') => break,
                Some('·') => {
                    self.pos += 1;
                    if parts.is_empty() {
                        return Err(self.err("`·` without left operand"));
                    }
                }
                _ => parts.push(self.repeat()?),
            }
        }
        Ok(match parts.len() {
            0 => Regex::Epsilon,
            1 => parts.pop().unwrap(),
            _ => Regex::Concat(parts),
        })
    }

    fn repeat(&mut self) -> Result<Regex> {
        let mut r = self.atom()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    r = Regex::Star(Box::new(r));
                }
                Some('+') => {
                    self.pos += 1;
                    r = Regex::Concat(vec![r.clone(), Regex::Star(Box::new(r))]);
                }
                Some('?') => {
                    self.pos += 1;
                    r = Regex::Alt(vec![r, Regex::Epsilon]);
                }
                _ => return Ok(r),
            }
        }
    }

    fn atom(&mut self) -> Result<Regex> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let r = self.alt()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(r)
            }
            Some('ε') => {
                self.pos += 1;
                Ok(Regex::Epsilon)
            }
            Some('∅') => {
                self.pos += 1;
                Ok(Regex::Empty)
            }
            Some(c @ ('*' | '+' | '?')) => Err(self.err(format!("`{c}` without operand"))),
            Some(_) => self.letter(),
            None => Err(self.err("unexpected end of pattern")),
        }
    }

    fn letter(&mut self) -> Result<Regex> {
        let start = self.chars[self.pos].0;
        let rest = &self.text[start..];
        let mut best: Option<(Sym, usize)> = None;
        for l in self.alphabet.letters() {
            if rest.starts_with(l.as_str()) && best.is_none_or(|(_, n)| l.len() > n) {
                best = Some((self.alphabet.symbol(l).unwrap(), l.len()));
            }
        }
        match best {
            Some((sym, bytes)) => {
                let end = start + bytes;
                while self.pos < self.chars.len() && self.chars[self.pos].0 < end {
                    self.pos += 1;
                }
                Ok(Regex::Letter(sym))
            }
            None => Err(Error::UnknownLetter(rest.chars().next().unwrap().to_string())),
        }
    }
}

/// ε-NFA used as an intermediate representation.
#[derive(Default)]
struct EpsNfa {
    eps: Vec<Vec<usize>>,
    sym: Vec<Vec<(Sym, usize)>>,
}

impl EpsNfa {
    fn state(&mut self) -> usize {
        self.eps.push(vec![]);
        self.sym.push(vec![]);
        self.eps.len() - 1
    }

    /// Thompson construction; returns (entry, exit).
    fn build(&mut self, r: &Regex) -> (usize, usize) {
        let s = self.state();
        let t = self.state();
        match r {
            Regex::Empty => {}
            Regex::Epsilon => self.eps[s].push(t),
            Regex::Letter(a) => self.sym[s].push((*a, t)),
            Regex::Concat(parts) => {
                let mut cur = s;
                for p in parts {
                    let (ps, pt) = self.build(p);
                    self.eps[cur].push(ps);
                    cur = pt;
                }
                self.eps[cur].push(t);
            }
            Regex::Alt(branches) => {
                for b in branches {
                    let (bs, bt) = self.build(b);
                    self.eps[s].push(bs);
                    self.eps[bt].push(t);
                }
            }
            Regex::Star(inner) => {
                let (is, it) = self.build(inner);
                self.eps[s].push(is);
                self.eps[s].push(t);
                self.eps[it].push(is);
                self.eps[it].push(t);
            }
        }
        (s, t)
    }

    fn closure(&self, s: usize) -> Vec<usize> {
        let mut seen = vec![false; self.eps.len()];
        let mut stack = vec![s];
        seen[s] = true;
        let mut out = vec![];
        while let Some(x) = stack.pop() {
            out.push(x);
            for &y in &self.eps[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        out
    }
}

impl Automaton {
    /// Compiles a regular expression into a 1-track automaton.
    pub fn from_regex(pattern: &str, alphabet: &Alphabet) -> Result<Automaton> {
        let mut p = Parser {
            chars: pattern.char_indices().collect(),
            text: pattern,
            pos: 0,
            alphabet,
        };
        let r = p.alt()?;
        if p.peek().is_some() {
            return Err(p.err("unexpected `)`"));
        }
        let mut nfa = EpsNfa::default();
        let (start, end) = nfa.build(&r);
        let n = nfa.eps.len();
        let closures: Vec<Vec<usize>> = (0..n).map(|s| nfa.closure(s)).collect();
        let mut trans: Vec<Vec<(Label, StateId)>> = vec![vec![]; n];
        let mut accepting = vec![false; n];
        for s in 0..n {
            for &c in &closures[s] {
                if c == end {
                    accepting[s] = true;
                }
                for &(a, t) in &nfa.sym[c] {
                    trans[s].push((a as Label, t as StateId));
                }
            }
        }
        let a = Automaton::assemble(1, alphabet.clone(), vec![start as StateId], accepting, trans);
        Ok(a.trim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn lang(p: &str, n: usize) -> Vec<String> {
        Automaton::from_regex(p, &ab())
            .unwrap()
            .enumerate_strings(n)
            .into_iter()
            .map(|mut t| t.remove(0))
            .collect()
    }

    #[test]
    fn star_of_letter() {
        assert_eq!(lang("a*", 3), ["", "a", "aa", "aaa"]);
    }

    #[test]
    fn finite_language() {
        assert_eq!(lang("(a|b)b", 5), ["ab", "bb"]);
        assert_eq!(lang("a·b", 5), ["ab"]);
    }

    #[test]
    fn double_star_equals_star() {
        let al = ab();
        let a = Automaton::from_regex("a**", &al).unwrap();
        let b = Automaton::from_regex("a*", &al).unwrap();
        assert!(a.equivalent(&b).unwrap());
        assert!(Automaton::from_regex("(a*)*", &al).unwrap().equivalent(&b).unwrap());
        assert!(!Automaton::from_regex("a+", &al).unwrap().equivalent(&b).unwrap());
    }

    #[test]
    fn epsilon_and_empty() {
        assert_eq!(lang("ε", 3), [""]);
        assert_eq!(lang("()", 3), [""]);
        assert!(lang("∅", 3).is_empty());
        assert_eq!(lang("a?b", 3), ["b", "ab"]);
    }

    #[test]
    fn parse_errors_carry_position() {
        let al = ab();
        match Automaton::from_regex("(ab", &al) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(Automaton::from_regex("ab)", &al), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(Automaton::from_regex("*a", &al), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(Automaton::from_regex("ac", &al), Err(Error::UnknownLetter(c)) if c == "c"));
    }

    #[test]
    fn multi_char_letters() {
        let al = Alphabet::new(["U0", "U1", "CP"]).unwrap();
        let a = Automaton::from_regex("(U0|U1)*CP", &al).unwrap();
        assert!(a.accepts_str(&["U0·U1·CP"]).unwrap());
        assert!(!a.accepts_str(&["CP·U0"]).unwrap());
    }
}
