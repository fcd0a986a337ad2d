//! Structures whose elements are words `h` and `h#u`, where `h` is accepted
//! by a deterministic prefix automaton and `u` belongs to a domain language.
//! Accepting prefix states carry a class that selects the relations holding
//! among the elements sharing that prefix.

use std::collections::HashSet;

use crate::automata::{explore, Alphabet, Automaton, Codec, StateId, Sym, PAD_SYM};
use crate::error::{Error, Result};

pub(crate) const SEPARATOR: &str = "#";

pub(crate) struct Prefixes {
    pub alphabet: Alphabet,
    pub initial: usize,
    /// Deterministic transitions over prefix letters.
    pub trans: Vec<Vec<(Sym, usize)>>,
    pub class: Vec<Option<usize>>,
    pub cap: usize,
}

impl Prefixes {
    /// Combined alphabet: base letters, the separator, then `extra`, which
    /// must be disjoint from both.
    pub fn alphabet(base: &Alphabet, extra: &[String]) -> Result<Alphabet> {
        for l in extra {
            if base.symbol(l).is_some() || l == SEPARATOR {
                return Err(Error::Input(format!("letter `{l}` clashes with the domain alphabet")));
            }
        }
        if base.symbol(SEPARATOR).is_some() {
            return Err(Error::Input(format!("`{SEPARATOR}` is reserved")));
        }
        let letters = base
            .letters()
            .iter()
            .cloned()
            .chain(std::iter::once(SEPARATOR.to_string()))
            .chain(extra.iter().cloned());
        Alphabet::new(letters)
    }

    fn sep(&self) -> Sym {
        self.alphabet.symbol(SEPARATOR).expect("separator letter")
    }

    fn lift(&self, a: &Automaton) -> Result<Automaton> {
        a.with_alphabet(&self.alphabet)
    }

    /// Prefixes and `h#u` for every accepted prefix `h` and domain word `u`.
    pub fn universe(&self, domain: &Automaton) -> Result<Automaton> {
        let dom = self.lift(domain)?;
        let codec = Codec::new(&self.alphabet, 1)?;
        let sep = codec.encode(&[self.sep()]);
        explore(1, &self.alphabet, vec![Elem::Pre(self.initial)], self.cap, |s, out| match *s {
            Elem::Pre(q) => {
                for &(l, n) in &self.trans[q] {
                    out.push((codec.encode(&[l]), Elem::Pre(n)));
                }
                if self.class[q].is_none() {
                    return Ok(false);
                }
                out.extend(dom.initial().iter().map(|&i| (sep, Elem::Copy(0, i))));
                Ok(true)
            }
            Elem::Copy(_, st) => {
                out.extend(dom.out(st).iter().map(|&(l, t)| (l, Elem::Copy(0, t))));
                Ok(dom.is_accepting(st))
            }
        })
    }

    /// Tuples `(h, h#u_1, …, h#u_k)` with `(u_1..u_k)` accepted by the
    /// automaton of the class of `h`.
    pub fn with_prefix(&self, k: usize, per_class: &[Automaton]) -> Result<Automaton> {
        let autos = per_class.iter().map(|a| self.lift(a)).collect::<Result<Vec<_>>>()?;
        let inner = Codec::new(&self.alphabet, k)?;
        let outer = Codec::new(&self.alphabet, k + 1)?;
        let mut entry = vec![PAD_SYM];
        entry.extend(std::iter::repeat_n(self.sep(), k));
        let entry = outer.encode(&entry);
        explore(k + 1, &self.alphabet, vec![Elem::Pre(self.initial)], self.cap, |s, out| match *s {
            Elem::Pre(q) => {
                for &(l, n) in &self.trans[q] {
                    out.push((outer.encode(&vec![l; k + 1]), Elem::Pre(n)));
                }
                let Some(c) = self.class[q] else { return Ok(false) };
                if k == 0 {
                    return autos[c].accepts(&[]);
                }
                out.extend(autos[c].initial().iter().map(|&i| (entry, Elem::Copy(c, i))));
                Ok(false)
            }
            Elem::Copy(c, st) => {
                for &(l, t) in autos[c].out(st) {
                    let mut col = vec![PAD_SYM];
                    col.extend(inner.decode(l));
                    out.push((outer.encode(&col), Elem::Copy(c, t)));
                }
                Ok(autos[c].is_accepting(st))
            }
        })
    }

    /// Accepted prefixes beginning with `first`.
    pub fn starting_with(&self, first: Sym) -> Result<Automaton> {
        let codec = Codec::new(&self.alphabet, 1)?;
        explore(1, &self.alphabet, vec![None], self.cap, |s: &Option<usize>, out| match *s {
            None => {
                for &(l, n) in &self.trans[self.initial] {
                    if l == first {
                        out.push((codec.encode(&[l]), Some(n)));
                    }
                }
                Ok(false)
            }
            Some(q) => {
                for &(l, n) in &self.trans[q] {
                    out.push((codec.encode(&[l]), Some(n)));
                }
                Ok(self.class[q].is_some())
            }
        })
    }

    /// Pairs of accepted prefixes of equal length related letterwise by
    /// `pairs`.
    pub fn letterwise(&self, pairs: &HashSet<(Sym, Sym)>) -> Result<Automaton> {
        let codec = Codec::new(&self.alphabet, 2)?;
        let init = (self.initial, self.initial);
        explore(2, &self.alphabet, vec![init], self.cap, |&(p, q), out| {
            for &(l1, n1) in &self.trans[p] {
                for &(l2, n2) in &self.trans[q] {
                    if pairs.contains(&(l1, l2)) {
                        out.push((codec.encode(&[l1, l2]), (n1, n2)));
                    }
                }
            }
            Ok(self.class[p].is_some() && self.class[q].is_some())
        })
    }
    /// Pairs `(h#u, h'#u)` of copies of the same domain word `u` under
    /// accepted prefixes related letterwise by `pairs`.
    pub fn same_element(&self, domain: &Automaton, pairs: &HashSet<(Sym, Sym)>) -> Result<Automaton> {
        let dom = self.lift(domain)?;
        let codec = Codec::new(&self.alphabet, 2)?;
        let one = Codec::new(&self.alphabet, 1)?;
        let sep = codec.encode(&[self.sep(), self.sep()]);
        let init = Same::Pre(self.initial, self.initial);
        explore(2, &self.alphabet, vec![init], self.cap, |s, out| match *s {
            Same::Pre(p, q) => {
                for &(l1, n1) in &self.trans[p] {
                    for &(l2, n2) in &self.trans[q] {
                        if pairs.contains(&(l1, l2)) {
                            out.push((codec.encode(&[l1, l2]), Same::Pre(n1, n2)));
                        }
                    }
                }
                if self.class[p].is_some() && self.class[q].is_some() {
                    out.extend(dom.initial().iter().map(|&i| (sep, Same::Copy(i))));
                }
                Ok(false)
            }
            Same::Copy(st) => {
                for &(l, t) in dom.out(st) {
                    let x = one.decode(l)[0];
                    out.push((codec.encode(&[x, x]), Same::Copy(t)));
                }
                Ok(dom.is_accepting(st))
            }
        })
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Same {
    Pre(usize, usize),
    Copy(StateId),
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Elem {
    Pre(usize),
    Copy(usize, StateId),
}
