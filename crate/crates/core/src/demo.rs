//! Ready-made planning instances: building a target language from regular
//! generators, and the configuration graph of a Turing machine.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::automata::{Alphabet, Automaton, Sym};
use crate::epistemic::{ActionModel, EpistemicModel, Native, NativeOp, Relation};
use crate::error::{Error, Result};
use crate::logic::{parse_formula, Formula, Signature};

/// A model, an action model and a goal.
#[derive(Clone, Debug)]
pub struct Instance {
    pub model: EpistemicModel,
    pub action: ActionModel,
    pub goal: Formula,
}

fn single_world(
    alphabet: Alphabet,
    domain: Automaton,
    signature: Signature,
    interp: BTreeMap<String, Automaton>,
) -> Result<EpistemicModel> {
    let refl: Relation = [(0, 0)].into_iter().collect();
    EpistemicModel::new(
        vec!["a".into()],
        vec!["s".into()],
        [("a".to_string(), refl)].into_iter().collect(),
        alphabet,
        domain,
        signature,
        vec![interp],
    )
}

const REGEX_SYNTAX: &str = "|*+?()·ε∅";

/// Letters of a set of single-character regular expressions.
pub fn regex_letters<'a>(patterns: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let set: BTreeSet<char> = patterns
        .into_iter()
        .flat_map(|p| p.chars())
        .filter(|c| !c.is_whitespace() && !REGEX_SYNTAX.contains(*c))
        .collect();
    set.into_iter().map(String::from).collect()
}

/// One world `s` over `Σ*` with `C` empty, `L` the target and `L0..` the
/// generators. Events `U{i}` add generator `i` to `C`, `CP` complements `C`,
/// and with `concat` the events `concat{i}` append generator `i` to `C`.
/// The goal states that `C` and `L` coincide.
pub fn build_language_demo(
    generators: &[&str],
    target: &str,
    concat: bool,
    alphabet: Option<Vec<String>>,
) -> Result<Instance> {
    let letters = alphabet.unwrap_or_else(|| {
        let l = regex_letters(generators.iter().copied().chain([target]));
        if l.is_empty() {
            vec!["a".into()]
        } else {
            l
        }
    });
    let al = Alphabet::new(letters)?;
    let domain = Automaton::universal(&al, 1);
    let mut preds = vec![("C".to_string(), 1), ("L".to_string(), 1)];
    preds.extend((0..generators.len()).map(|i| (format!("L{i}"), 1)));
    let sig = Signature::new(preds);
    let mut interp = BTreeMap::new();
    interp.insert("C".to_string(), Automaton::empty(&al, 1));
    interp.insert("L".to_string(), Automaton::from_regex(target, &al)?);
    for (i, g) in generators.iter().enumerate() {
        interp.insert(format!("L{i}"), Automaton::from_regex(g, &al)?);
    }
    let model = single_world(al.clone(), domain, sig.clone(), interp)?;

    let mut events: Vec<String> = (0..generators.len()).map(|i| format!("U{i}")).collect();
    events.push("CP".into());
    if concat {
        events.extend((0..generators.len()).map(|i| format!("concat{i}")));
    }
    let mut action = ActionModel::reflexive(&model.agents, events.into_iter().map(|e| (e, Formula::True)).collect());
    for i in 0..generators.len() {
        action.post[i].insert("C".into(), parse_formula(&format!("C(x1) | L{i}(x1)"), &sig)?);
    }
    let cp = generators.len();
    action.post[cp].insert("C".into(), parse_formula("!C(x1)", &sig)?);
    if concat {
        for (i, g) in generators.iter().enumerate() {
            action
                .native
                .insert((cp + 1 + i, "C".into()), Native::new(NativeOp::ConcatRight, g, &al)?);
        }
    }
    let goal = parse_formula("forall x. (C(x) <-> L(x))", &sig)?;
    Ok(Instance { model, action, goal })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
}

/// A deterministic single-tape Turing machine. `delta` maps `"q,a"` to the
/// next state, written symbol and head move.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TmDescription {
    pub states: Vec<String>,
    pub input: Vec<String>,
    pub tape: Vec<String>,
    pub blank: String,
    pub delta: BTreeMap<String, (String, String, Move)>,
    pub initial: String,
    pub accepting: Vec<String>,
}

struct Tm {
    tape: Vec<Sym>,
    blank: Sym,
    states: Vec<Sym>,
    delta: BTreeMap<(Sym, Sym), (Sym, Sym, Move)>,
}

impl TmDescription {
    fn compile(&self, al: &Alphabet) -> Result<Tm> {
        let sym = |l: &str| al.symbol(l).ok_or_else(|| Error::UnknownLetter(l.to_string()));
        let in_states = |q: &str| {
            if self.states.iter().any(|s| s == q) {
                sym(q)
            } else {
                Err(Error::Input(format!("unknown state `{q}`")))
            }
        };
        let on_tape = |a: &str| {
            if self.tape.iter().any(|s| s == a) {
                sym(a)
            } else {
                Err(Error::Input(format!("`{a}` is not a tape symbol")))
            }
        };
        if self.input.contains(&self.blank) {
            return Err(Error::Input("the blank is an input symbol".into()));
        }
        on_tape(&self.blank)?;
        for a in &self.input {
            on_tape(a)?;
        }
        in_states(&self.initial)?;
        for q in &self.accepting {
            in_states(q)?;
        }
        let mut delta = BTreeMap::new();
        for (key, (q2, b, mv)) in &self.delta {
            let (q, a) = key
                .split_once(',')
                .ok_or_else(|| Error::Input(format!("transition key `{key}` is not `state,symbol`")))?;
            delta.insert((in_states(q.trim())?, on_tape(a.trim())?), (in_states(q2)?, on_tape(b)?, *mv));
        }
        Ok(Tm {
            tape: self.tape.iter().map(|a| sym(a)).collect::<Result<_>>()?,
            blank: sym(&self.blank)?,
            states: self.states.iter().map(|q| sym(q)).collect::<Result<_>>()?,
            delta,
        })
    }

    fn alphabet(&self) -> Result<Alphabet> {
        for l in self.tape.iter().chain(&self.states) {
            if l == "#" {
                return Err(Error::Input("`#` is reserved".into()));
            }
        }
        if let Some(q) = self.states.iter().find(|q| self.tape.contains(q)) {
            return Err(Error::Input(format!("`{q}` is both a state and a tape symbol")));
        }
        Alphabet::new(self.tape.iter().chain(&self.states).cloned())
    }
}

fn alt(letters: &[Sym], al: &Alphabet) -> String {
    let parts: Vec<&str> = letters.iter().map(|&s| al.letter(s)).collect();
    format!("({})", parts.join("|"))
}

/// A window rewrite `top → bottom` inside a shared prefix of tape symbols,
/// optionally followed by a shared suffix.
struct Rule {
    top: Vec<Sym>,
    bottom: Vec<Sym>,
    suffix: bool,
}

fn trim_blanks(mut w: Vec<Sym>, blank: Sym) -> Vec<Sym> {
    while w.last() == Some(&blank) {
        w.pop();
    }
    w
}

fn step_rules(tm: &Tm) -> Vec<Rule> {
    let mut rules = Vec::new();
    for (&(q, a), &(q2, b, mv)) in &tm.delta {
        match mv {
            Move::R => {
                rules.push(Rule { top: vec![q, a], bottom: vec![b, q2], suffix: true });
                if a == tm.blank {
                    rules.push(Rule { top: vec![q], bottom: vec![b, q2], suffix: false });
                }
            }
            Move::L => {
                for &x in &tm.tape {
                    rules.push(Rule { top: vec![x, q, a], bottom: vec![q2, x, b], suffix: true });
                    let mut end = vec![q2];
                    end.extend(trim_blanks(vec![x, b], tm.blank));
                    rules.push(Rule { top: vec![x, q, a], bottom: end.clone(), suffix: false });
                    if a == tm.blank {
                        rules.push(Rule { top: vec![x, q], bottom: end, suffix: false });
                    }
                }
            }
        }
    }
    rules
}

/// The one-step relation on configuration encodings.
fn step_relation(tm: &Tm, al: &Alphabet, domain: &Automaton) -> Result<Automaton> {
    const PREFIX: u32 = 0;
    const SUFFIX: u32 = 1;
    const END: u32 = 2;
    let mut trans: Vec<(u32, Vec<Sym>, u32)> = Vec::new();
    for &g in &tm.tape {
        trans.push((PREFIX, vec![g, g], PREFIX));
        trans.push((SUFFIX, vec![g, g], SUFFIX));
    }
    let mut next = 3;
    for rule in step_rules(tm) {
        let len = rule.top.len().max(rule.bottom.len());
        let mut from = PREFIX;
        for i in 0..len {
            let col = vec![rule.top.get(i).copied().unwrap_or(0), rule.bottom.get(i).copied().unwrap_or(0)];
            let to = if i + 1 < len {
                next += 1;
                next - 1
            } else if rule.suffix {
                SUFFIX
            } else {
                END
            };
            trans.push((from, col, to));
            from = to;
        }
    }
    let raw = Automaton::from_parts(2, al.clone(), next as usize, vec![PREFIX], vec![SUFFIX, END], trans)?;
    raw.intersect(&Automaton::domain_power(domain, 2)?)?.minimize()
}

/// The configuration graph of `tm` as a single world with `p` the step
/// relation, `i` the initial and `f` the accepting configurations. The only
/// event composes `p` with itself, and the goal asks for an initial
/// configuration related to an accepting one.
pub fn build_tm_config_graph(desc: &TmDescription) -> Result<Instance> {
    let al = desc.alphabet()?;
    let tm = desc.compile(&al)?;
    let tape = alt(&tm.tape, &al);
    let non_blank: Vec<Sym> = tm.tape.iter().copied().filter(|&g| g != tm.blank).collect();
    let tail = if non_blank.is_empty() {
        String::new()
    } else {
        format!("({tape}*{})?", alt(&non_blank, &al))
    };
    let config = |states: &[Sym]| {
        if states.is_empty() {
            Ok(Automaton::empty(&al, 1))
        } else {
            Automaton::from_regex(&format!("{tape}*{}{tail}", alt(states, &al)), &al)
        }
    };
    let domain = config(&tm.states)?;
    let accepting: Vec<Sym> = desc.accepting.iter().map(|q| al.symbol(q).unwrap()).collect();
    let input: Vec<Sym> = desc.input.iter().map(|a| al.symbol(a).unwrap()).collect();
    let initial = if input.is_empty() {
        desc.initial.clone()
    } else {
        format!("{}{}*", desc.initial, alt(&input, &al))
    };
    let sig = Signature::new([("p", 2), ("i", 1), ("f", 1)]);
    let mut interp = BTreeMap::new();
    interp.insert("p".to_string(), step_relation(&tm, &al, &domain)?);
    interp.insert("i".to_string(), Automaton::from_regex(&initial, &al)?);
    interp.insert("f".to_string(), config(&accepting)?);
    let model = single_world(al, domain, sig.clone(), interp)?;
    let mut action = ActionModel::reflexive(&model.agents, vec![("tc".into(), Formula::True)]);
    action.post[0].insert(
        "p".into(),
        parse_formula("p(x1,x2) | exists y. (p(x1,y) & p(y,x2))", &sig)?,
    );
    let goal = parse_formula("exists x. exists y. (i(x) & p(x,y) & f(y))", &sig)?;
    Ok(Instance { model, action, goal })
}
