//! Automatic presentations and first-order model checking over them.
//!
//! Formulas are compiled bottom-up into automata whose tracks carry the free
//! variables of each subformula: atoms by track substitution, negation by
//! difference with a power of the domain, conjunction and disjunction by
//! product and union, existential quantification by projection, and
//! universal quantification as `¬∃¬`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::automata::{Alphabet, Automaton, AutomatonSpec, Word, DEFAULT_STATE_CAP};
use crate::error::{Error, Result};
use crate::logic::{Formula, Signature};

/// A relational structure given by a domain automaton and one k-track
/// automaton per predicate of arity k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomaticPresentation {
    pub signature: Signature,
    pub alphabet: Alphabet,
    pub domain: Automaton,
    pub relations: BTreeMap<String, Automaton>,
}

/// A violated presentation invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    EmptyDomain,
    /// The relation accepts a tuple with a component outside the domain.
    OutsideDomain { relation: String, witness: Vec<String> },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::EmptyDomain => write!(f, "domain language is empty"),
            Diagnostic::OutsideDomain { relation, witness } => {
                write!(f, "relation `{relation}` accepts ({}) outside the domain", witness.join(", "))
            }
        }
    }
}

impl AutomaticPresentation {
    /// Assembles a presentation, checking that every predicate of the
    /// signature has an automaton with the right number of tracks.
    pub fn new(
        signature: Signature,
        alphabet: Alphabet,
        domain: Automaton,
        relations: BTreeMap<String, Automaton>,
    ) -> Result<Self> {
        if domain.tracks() != 1 {
            return Err(Error::TrackMismatch(domain.tracks(), 1));
        }
        if *domain.alphabet() != alphabet {
            return Err(Error::AlphabetMismatch);
        }
        for (name, k) in signature.iter() {
            let rel = relations
                .get(name)
                .ok_or_else(|| Error::Input(format!("no interpretation for `{name}`")))?;
            if rel.tracks() != k {
                return Err(Error::TrackMismatch(rel.tracks(), k));
            }
            if *rel.alphabet() != alphabet {
                return Err(Error::AlphabetMismatch);
            }
        }
        if let Some(extra) = relations.keys().find(|n| signature.arity(n).is_none()) {
            return Err(Error::UnknownPredicate(extra.clone()));
        }
        Ok(AutomaticPresentation {
            signature,
            alphabet,
            domain,
            relations,
        })
    }

    pub fn relation(&self, name: &str) -> Result<&Automaton> {
        self.relations
            .get(name)
            .ok_or_else(|| Error::UnknownPredicate(name.to_string()))
    }

    /// Checks that the domain is nonempty and that every relation only
    /// relates domain words. An empty result means the presentation is valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.domain.is_empty() {
            out.push(Diagnostic::EmptyDomain);
        }
        for (name, rel) in &self.relations {
            let power = match Automaton::domain_power(&self.domain, rel.tracks()) {
                Ok(p) => p,
                Err(_) => continue,
            };
            if let Ok(outside) = rel.minus(&power) {
                if let Some(w) = outside.shortest_witness() {
                    out.push(Diagnostic::OutsideDomain {
                        relation: name.clone(),
                        witness: w.iter().map(|x| self.alphabet.format_word(x)).collect(),
                    });
                }
            }
        }
        out
    }

    pub fn compile(&self, phi: &Formula, vars: &[String]) -> Result<Automaton> {
        Compiler::new(self, CompileOptions::default())?.compile(phi, vars)
    }

    pub fn check_sentence(&self, phi: &Formula) -> Result<bool> {
        Compiler::new(self, CompileOptions::default())?.check_sentence(phi)
    }

    /// The relation `{(d_1..d_k) | φ[x_i := d_i]}` over the given variables.
    pub fn defined_relation(&self, phi: &Formula, vars: &[String]) -> Result<Automaton> {
        self.compile(phi, vars)
    }

    /// Naive evaluation of a non-modal sentence by enumerating a finite
    /// domain. Only membership tests on the relation automata are used.
    pub fn brute_force_check(&self, phi: &Formula) -> Result<bool> {
        if !phi.free_vars().is_empty() {
            return Err(Error::Input(format!("`{phi}` is not closed")));
        }
        self.brute_force_eval(phi, &HashMap::new())
    }

    /// Naive evaluation under an assignment of domain words.
    pub fn brute_force_eval(&self, phi: &Formula, assignment: &HashMap<String, Word>) -> Result<bool> {
        if phi.is_modal() {
            return Err(Error::Fragment("modal formula in a first-order check".into()));
        }
        let elements = self.finite_domain()?;
        let mut env = assignment.clone();
        naive(self, phi, &elements, &mut env)
    }

    /// All domain words, when the domain language is finite.
    pub fn finite_domain(&self) -> Result<Vec<Word>> {
        if !self.domain.is_finite() {
            return Err(Error::InfiniteDomain);
        }
        let bound = self.domain.trim().num_states();
        Ok(self
            .domain
            .enumerate_upto(bound)
            .into_iter()
            .map(|mut t| t.remove(0))
            .collect())
    }
}

fn naive(
    p: &AutomaticPresentation,
    phi: &Formula,
    elements: &[Word],
    env: &mut HashMap<String, Word>,
) -> Result<bool> {
    Ok(match phi {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(name, args) => {
            let tuple = args
                .iter()
                .map(|a| {
                    env.get(a)
                        .cloned()
                        .ok_or_else(|| Error::Input(format!("unassigned variable `{a}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            p.relation(name)?.accepts(&tuple)?
        }
        Formula::Not(a) => !naive(p, a, elements, env)?,
        Formula::And(a, b) => naive(p, a, elements, env)? && naive(p, b, elements, env)?,
        Formula::Or(a, b) => naive(p, a, elements, env)? || naive(p, b, elements, env)?,
        Formula::Implies(a, b) => !naive(p, a, elements, env)? || naive(p, b, elements, env)?,
        Formula::Iff(a, b) => naive(p, a, elements, env)? == naive(p, b, elements, env)?,
        Formula::Forall(x, a) | Formula::Exists(x, a) => {
            let universal = matches!(phi, Formula::Forall(..));
            let saved = env.get(x).cloned();
            let mut result = universal;
            for e in elements {
                env.insert(x.clone(), e.clone());
                if naive(p, a, elements, env)? != universal {
                    result = !universal;
                    break;
                }
            }
            match saved {
                Some(v) => env.insert(x.clone(), v),
                None => env.remove(x),
            };
            result
        }
        Formula::Know(..) => return Err(Error::Fragment("modal formula in a first-order check".into())),
    })
}

/// Resource settings for formula compilation.
#[derive(Clone, Copy, Debug)]
pub struct CompileOptions {
    /// Bound on the states of any intermediate construction.
    pub state_cap: usize,
    /// Intermediate automata larger than this are minimized.
    pub minimize_threshold: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            state_cap: DEFAULT_STATE_CAP,
            minimize_threshold: 5_000,
        }
    }
}

/// Compiles formulas over one presentation, caching powers of the domain.
pub struct Compiler<'a> {
    presentation: &'a AutomaticPresentation,
    domain: Automaton,
    powers: RefCell<HashMap<usize, Automaton>>,
    options: CompileOptions,
}

impl<'a> Compiler<'a> {
    pub fn new(presentation: &'a AutomaticPresentation, options: CompileOptions) -> Result<Self> {
        let domain = presentation.domain.minimize_capped(options.state_cap)?;
        Ok(Compiler {
            presentation,
            domain,
            powers: RefCell::new(HashMap::new()),
            options,
        })
    }

    fn power(&self, k: usize) -> Result<Automaton> {
        if let Some(p) = self.powers.borrow().get(&k) {
            return Ok(p.clone());
        }
        let p = Automaton::domain_power(&self.domain, k)?;
        self.powers.borrow_mut().insert(k, p.clone());
        Ok(p)
    }

    fn shrink(&self, a: Automaton) -> Result<Automaton> {
        if a.num_states() > self.options.minimize_threshold {
            a.minimize_capped(self.options.state_cap)
        } else {
            Ok(a)
        }
    }

    /// Reorders and extends tracks from `from` to `to` (a superset).
    fn align(&self, a: &Automaton, from: &[String], to: &[String]) -> Result<Automaton> {
        if from == to {
            return Ok(a.clone());
        }
        let sigma: Vec<usize> = from
            .iter()
            .map(|v| to.iter().position(|w| w == v).expect("aligned variables are a superset"))
            .collect();
        a.substitute_tracks_capped(&sigma, to.len(), &self.domain, self.options.state_cap)
    }

    fn complement(&self, a: &Automaton) -> Result<Automaton> {
        self.power(a.tracks())?.minus_capped(a, self.options.state_cap)
    }

    fn binary(&self, a: &Formula, b: &Formula) -> Result<(Automaton, Automaton, Vec<String>)> {
        let (fa, va) = self.rec(a)?;
        let (fb, vb) = self.rec(b)?;
        let mut vars = va.clone();
        for v in &vb {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        Ok((self.align(&fa, &va, &vars)?, self.align(&fb, &vb, &vars)?, vars))
    }

    /// Compiles `phi` over its own free variables (first-occurrence order).
    fn rec(&self, phi: &Formula) -> Result<(Automaton, Vec<String>)> {
        let cap = self.options.state_cap;
        let (a, vars) = match phi {
            Formula::True => (self.power(0)?, vec![]),
            Formula::False => (Automaton::empty(&self.presentation.alphabet, 0), vec![]),
            Formula::Atom(name, args) => {
                let rel = self.presentation.relation(name)?;
                if rel.tracks() != args.len() {
                    return Err(Error::Arity {
                        name: name.clone(),
                        expected: rel.tracks(),
                        found: args.len(),
                    });
                }
                let mut vars: Vec<String> = Vec::new();
                for x in args {
                    if !vars.contains(x) {
                        vars.push(x.clone());
                    }
                }
                let sigma: Vec<usize> = args.iter().map(|x| vars.iter().position(|v| v == x).unwrap()).collect();
                (rel.substitute_tracks_capped(&sigma, vars.len(), &self.domain, cap)?, vars)
            }
            Formula::Not(a) => {
                let (fa, va) = self.rec(a)?;
                (self.complement(&fa)?, va)
            }
            Formula::And(a, b) => {
                let (fa, fb, vars) = self.binary(a, b)?;
                (fa.intersect_capped(&fb, cap)?, vars)
            }
            Formula::Or(a, b) => {
                let (fa, fb, vars) = self.binary(a, b)?;
                (fa.union(&fb)?, vars)
            }
            Formula::Implies(a, b) => {
                let (fa, fb, vars) = self.binary(a, b)?;
                (self.complement(&fa.minus_capped(&fb, cap)?)?, vars)
            }
            Formula::Iff(a, b) => {
                let (fa, fb, vars) = self.binary(a, b)?;
                let diff = fa.minus_capped(&fb, cap)?.union(&fb.minus_capped(&fa, cap)?)?;
                (self.complement(&diff)?, vars)
            }
            Formula::Exists(x, body) => {
                let (fb, mut vb) = self.rec(body)?;
                match vb.iter().position(|v| v == x) {
                    // the domain is nonempty, so a vacuous quantifier is dropped
                    None => (fb, vb),
                    Some(i) => {
                        vb.remove(i);
                        (fb.project(i)?, vb)
                    }
                }
            }
            Formula::Forall(x, body) => {
                let (fb, mut vb) = self.rec(body)?;
                match vb.iter().position(|v| v == x) {
                    None => (fb, vb),
                    Some(i) => {
                        let witness = self.complement(&fb)?.project(i)?;
                        vb.remove(i);
                        (self.complement(&witness)?, vb)
                    }
                }
            }
            Formula::Know(..) => {
                return Err(Error::Fragment(format!(
                    "`{phi}` is modal; only first-order formulas compile over a presentation"
                )))
            }
        };
        Ok((self.shrink(a)?, vars))
    }

    /// Automaton of the satisfying assignments, track i carrying `vars[i]`.
    pub fn compile(&self, phi: &Formula, vars: &[String]) -> Result<Automaton> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::Input(format!("variable `{v}` listed twice")));
            }
        }
        if let Some(v) = phi.free_vars().into_iter().find(|v| !vars.contains(v)) {
            return Err(Error::Input(format!("free variable `{v}` not among the tracks")));
        }
        let (a, own) = self.rec(phi)?;
        self.align(&a, &own, vars)
    }

    pub fn check_sentence(&self, phi: &Formula) -> Result<bool> {
        if let Some(v) = phi.free_vars().first() {
            return Err(Error::Input(format!("`{phi}` has free variable `{v}`")));
        }
        let (a, _) = self.rec(phi)?;
        a.accepts(&[])
    }
}

/// Serialized presentation; automata may be given as regular expressions
/// where one track is expected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationJson {
    pub signature: Signature,
    pub alphabet: Vec<String>,
    pub domain: AutomatonSpec,
    pub relations: BTreeMap<String, AutomatonSpec>,
}

impl PresentationJson {
    pub fn to_presentation(&self) -> Result<AutomaticPresentation> {
        self.signature.validate()?;
        let alphabet = Alphabet::new(self.alphabet.iter().cloned())?;
        let domain = self.domain.resolve(&alphabet, 1)?;
        let mut relations = BTreeMap::new();
        for (name, spec) in &self.relations {
            let k = self
                .signature
                .arity(name)
                .ok_or_else(|| Error::UnknownPredicate(name.clone()))?;
            relations.insert(name.clone(), spec.resolve(&alphabet, k)?);
        }
        AutomaticPresentation::new(self.signature.clone(), alphabet, domain, relations)
    }
}

impl From<&AutomaticPresentation> for PresentationJson {
    fn from(p: &AutomaticPresentation) -> Self {
        PresentationJson {
            signature: p.signature.clone(),
            alphabet: p.alphabet.letters().to_vec(),
            domain: (&p.domain).into(),
            relations: p.relations.iter().map(|(n, a)| (n.clone(), a.into())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn graph() -> AutomaticPresentation {
        let al = Alphabet::new(["0", "1", "2"]).unwrap();
        let dom = Automaton::from_regex("0|1|2", &al).unwrap();
        let mut rels = BTreeMap::new();
        rels.insert(
            "edge".to_string(),
            Automaton::from_str_tuples(&al, &[vec!["0", "1"], vec!["1", "2"]]).unwrap(),
        );
        rels.insert("i".to_string(), Automaton::from_regex("0", &al).unwrap());
        rels.insert("f".to_string(), Automaton::from_regex("2", &al).unwrap());
        let sig = Signature::new([("edge", 2), ("i", 1), ("f", 1)]);
        AutomaticPresentation::new(sig, al, dom, rels).unwrap()
    }

    fn f(p: &AutomaticPresentation, s: &str) -> Formula {
        parse_formula(s, &p.signature).unwrap()
    }

    fn unary(a: &Automaton) -> Vec<String> {
        a.enumerate_strings(4).into_iter().map(|mut t| t.remove(0)).collect()
    }

    #[test]
    fn graph_validates() {
        assert!(graph().validate().is_empty());
    }

    #[test]
    fn diagnostics_name_relation_and_witness() {
        let mut p = graph();
        let al = Alphabet::new(["0", "1", "2", "3"]).unwrap();
        p.alphabet = al.clone();
        p.domain = p.domain.with_alphabet(&al).unwrap();
        for r in p.relations.values_mut() {
            *r = r.with_alphabet(&al).unwrap();
        }
        let extra = Automaton::from_str_tuples(&al, &[vec!["3", "1"]]).unwrap();
        let edge = p.relations["edge"].union(&extra).unwrap();
        p.relations.insert("edge".into(), edge);
        assert_eq!(
            p.validate(),
            vec![Diagnostic::OutsideDomain {
                relation: "edge".into(),
                witness: vec!["3".into(), "1".into()]
            }]
        );
        p.domain = Automaton::empty(&al, 1);
        assert!(p.validate().contains(&Diagnostic::EmptyDomain));
    }

    #[test]
    fn compile_sources() {
        let p = graph();
        let a = p.compile(&f(&p, "exists y. edge(x,y)"), &["x".into()]).unwrap();
        assert_eq!(unary(&a), ["0", "1"]);
        let t = p.compile(&Formula::True, &["x".into()]).unwrap();
        assert!(t.equivalent(&p.domain).unwrap());
        let c = p.compile(&f(&p, "i(x) & !i(x)"), &["x".into()]).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn compile_tracks_follow_vars() {
        let p = graph();
        let a = p.compile(&f(&p, "edge(x,y)"), &["y".into(), "x".into()]).unwrap();
        assert!(a.accepts_str(&["1", "0"]).unwrap());
        assert!(!a.accepts_str(&["0", "1"]).unwrap());
        let extended = p.compile(&f(&p, "i(x)"), &["x".into(), "z".into()]).unwrap();
        assert_eq!(extended.enumerate_upto(2).len(), 3);
        assert!(p.compile(&f(&p, "i(x)"), &["z".into()]).is_err());
    }

    #[test]
    fn sentences() {
        let p = graph();
        assert!(p.check_sentence(&f(&p, "exists x. exists y. edge(x,y)")).unwrap());
        assert!(!p.check_sentence(&f(&p, "forall x. exists y. edge(x,y)")).unwrap());
        assert!(p.check_sentence(&f(&p, "!false")).unwrap());
        assert!(p.check_sentence(&f(&p, "exists x. exists y. (i(x) & edge(x,y) & !f(y))")).unwrap());
        assert!(p.check_sentence(&f(&p, "edge(x,x)")).is_err());
        assert!(matches!(
            p.check_sentence(&f(&p, "K[a] true")),
            Err(Error::Fragment(_))
        ));
    }

    #[test]
    fn transitive_step_relation() {
        let p = graph();
        let phi = f(&p, "edge(x1,x2) | exists y. (edge(x1,y) & edge(y,x2))");
        let r = p.defined_relation(&phi, &["x1".into(), "x2".into()]).unwrap();
        let got = r.enumerate_strings(2);
        assert_eq!(
            got,
            vec![
                vec!["0".to_string(), "1".to_string()],
                vec!["0".into(), "2".into()],
                vec!["1".into(), "2".into()]
            ]
        );
    }

    #[test]
    fn brute_force_basics() {
        let p = graph();
        assert!(p.brute_force_check(&f(&p, "exists x. true")).unwrap());
        let mut q = p.clone();
        q.relations.insert("i".into(), Automaton::empty(&p.alphabet, 1));
        assert!(!q.brute_force_check(&f(&q, "forall x. i(x)")).unwrap());
        let mut inf = p.clone();
        inf.domain = Automaton::from_regex("(0|1|2)*", &p.alphabet).unwrap();
        assert!(matches!(inf.brute_force_check(&Formula::True), Err(Error::InfiniteDomain)));
    }

    #[test]
    fn double_negation_and_quantifier_swap() {
        let p = graph();
        let a = p.compile(&f(&p, "exists y. edge(x,y)"), &["x".into()]).unwrap();
        let b = p.compile(&f(&p, "!!exists y. edge(x,y)"), &["x".into()]).unwrap();
        assert!(a.equivalent(&b).unwrap());
        let c = p.compile(&f(&p, "exists x. exists y. edge(x,y) & f(y)"), &[]).unwrap();
        let d = p.compile(&f(&p, "exists y. exists x. edge(x,y) & f(y)"), &[]).unwrap();
        assert!(c.equivalent(&d).unwrap());
    }

    #[test]
    fn shadowed_variables() {
        let p = graph();
        // inner x is bound; outer x stays free
        let a = p
            .compile(&f(&p, "i(x) & exists x. f(x)"), &["x".into()])
            .unwrap();
        assert_eq!(unary(&a), ["0"]);
    }

    #[test]
    fn json_round_trip() {
        let p = graph();
        let j = PresentationJson::from(&p);
        let text = serde_json::to_string(&j).unwrap();
        let back: PresentationJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_presentation().unwrap(), p);
        let short = r#"{"signature":{"P":1},"alphabet":["a","b"],"domain":"(a|b)*","relations":{"P":"a*"}}"#;
        let q: PresentationJson = serde_json::from_str(short).unwrap();
        let q = q.to_presentation().unwrap();
        assert!(q.check_sentence(&parse_formula("exists x. P(x)", &q.signature).unwrap()).unwrap());
    }
}
