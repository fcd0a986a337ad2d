#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use epp::automata::{Alphabet, Automaton, Sym, Word};
use epp::demo::{Instance, Move, TmDescription};
use epp::epistemic::{iterate_update_traced, post_vars, ActionModel, EpistemicModel, Relation};
use epp::logic::{Formula, Signature};
use epp::presentation::AutomaticPresentation;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ab() -> Alphabet {
    Alphabet::new(["a", "b"]).unwrap()
}

pub fn re(p: &str) -> Automaton {
    Automaton::from_regex(p, &ab()).unwrap()
}

/// All words over the alphabet of length at most `n`, shortest first.
pub fn words_upto(al: &Alphabet, n: usize) -> Vec<Word> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Word> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for s in 1..=al.len() as Sym {
                let mut v = w.clone();
                v.push(s);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn random_elements(rng: &mut TestRng, al: &Alphabet, max: usize) -> Vec<Word> {
    let mut pool = words_upto(al, 3);
    pool.shuffle(rng);
    let n = rng.gen_range(1..=max.min(pool.len()));
    pool.truncate(n);
    pool.sort();
    pool
}

pub fn random_signature(rng: &mut TestRng, names: &[&str], max_arity: usize) -> Signature {
    let n = rng.gen_range(1..=names.len());
    Signature::new(names[..n].iter().map(|p| (p.to_string(), rng.gen_range(0..=max_arity))))
}

fn tuples(elems: &[Word], k: usize) -> Vec<Vec<Word>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                elems.iter().map(move |e| {
                    let mut t = t.clone();
                    t.push(e.clone());
                    t
                })
            })
            .collect();
    }
    out
}

pub fn random_relation(rng: &mut TestRng, al: &Alphabet, elems: &[Word], k: usize) -> Automaton {
    let density: f64 = rng.gen_range(0.05..0.6);
    let chosen: Vec<Vec<Word>> = tuples(elems, k).into_iter().filter(|_| rng.gen_bool(density)).collect();
    Automaton::from_tuples(al, k, chosen.iter().map(|t| t.as_slice())).unwrap()
}

pub fn random_interpretation(
    rng: &mut TestRng,
    al: &Alphabet,
    sig: &Signature,
    elems: &[Word],
) -> BTreeMap<String, Automaton> {
    sig.iter()
        .map(|(p, k)| (p.to_string(), random_relation(rng, al, elems, k)))
        .collect()
}

pub fn finite_domain(al: &Alphabet, elems: &[Word]) -> Automaton {
    Automaton::from_tuples(al, 1, elems.iter().map(std::slice::from_ref)).unwrap()
}

/// A presentation of a random structure with at most `max_elems` elements.
pub fn random_presentation(rng: &mut TestRng, max_elems: usize) -> AutomaticPresentation {
    let al = ab();
    let elems = random_elements(rng, &al, max_elems);
    let sig = random_signature(rng, &["P", "Q", "R"], 3);
    let rels = random_interpretation(rng, &al, &sig, &elems);
    AutomaticPresentation::new(sig, al.clone(), finite_domain(&al, &elems), rels).unwrap()
}

const VARS: [&str; 3] = ["x", "y", "z"];

fn leaf(rng: &mut TestRng, sig: &Signature, scope: &[String]) -> Formula {
    let usable: Vec<(&str, usize)> = sig.iter().filter(|&(_, k)| k == 0 || !scope.is_empty()).collect();
    if usable.is_empty() || rng.gen_bool(0.1) {
        return if rng.gen_bool(0.5) { Formula::True } else { Formula::False };
    }
    let (p, k) = usable[rng.gen_range(0..usable.len())];
    let args: Vec<String> = (0..k).map(|_| scope[rng.gen_range(0..scope.len())].clone()).collect();
    Formula::atom(p, &args)
}

/// A random formula whose free variables lie in `scope`, with at most
/// `quantifiers` nested quantifiers and `modal` nested knowledge operators.
pub fn random_formula(
    rng: &mut TestRng,
    sig: &Signature,
    agents: &[String],
    scope: &[String],
    quantifiers: usize,
    modal: usize,
    size: usize,
) -> Formula {
    if size == 0 {
        return leaf(rng, sig, scope);
    }
    let sub = |rng: &mut TestRng, scope: &[String], q: usize, m: usize, s: usize| {
        random_formula(rng, sig, agents, scope, q, m, s)
    };
    match rng.gen_range(0..10) {
        0 => leaf(rng, sig, scope),
        1 => Formula::not(sub(rng, scope, quantifiers, modal, size - 1)),
        2..=5 => {
            let left = rng.gen_range(0..size);
            let a = sub(rng, scope, quantifiers, modal, left);
            let b = sub(rng, scope, quantifiers, modal, size - 1 - left);
            match rng.gen_range(0..4) {
                0 => Formula::and(a, b),
                1 => Formula::or(a, b),
                2 => Formula::implies(a, b),
                _ => Formula::iff(a, b),
            }
        }
        6..=7 if quantifiers > 0 => {
            let x = VARS[rng.gen_range(0..VARS.len())];
            let mut inner = scope.to_vec();
            if !inner.iter().any(|v| v == x) {
                inner.push(x.to_string());
            }
            let body = sub(rng, &inner, quantifiers - 1, modal, size - 1);
            if rng.gen_bool(0.5) {
                Formula::exists(x, body)
            } else {
                Formula::forall(x, body)
            }
        }
        8..=9 if modal > 0 && !agents.is_empty() => {
            let a = &agents[rng.gen_range(0..agents.len())];
            Formula::know(a, sub(rng, scope, quantifiers, modal - 1, size - 1))
        }
        _ => leaf(rng, sig, scope),
    }
}

pub fn random_access(rng: &mut TestRng, agents: &[String], n: usize, p: f64) -> BTreeMap<String, Relation> {
    agents
        .iter()
        .map(|a| {
            let rel = (0..n)
                .flat_map(|x| (0..n).map(move |y| (x, y)))
                .filter(|_| rng.gen_bool(p))
                .collect();
            (a.clone(), rel)
        })
        .collect()
}

/// A model with at most three worlds and two agents over a finite domain.
pub fn random_epistemic_model(rng: &mut TestRng, max_elems: usize) -> EpistemicModel {
    let al = ab();
    let elems = random_elements(rng, &al, max_elems);
    let sig = random_signature(rng, &["P", "Q"], 2);
    let n = rng.gen_range(1..=3);
    let agents: Vec<String> = ["a", "b"][..rng.gen_range(1..=2)].iter().map(|s| s.to_string()).collect();
    let access = random_access(rng, &agents, n, 0.4);
    let interps = (0..n).map(|_| random_interpretation(rng, &al, &sig, &elems)).collect();
    EpistemicModel::new(
        agents,
        (0..n).map(|i| format!("w{i}")).collect(),
        access,
        al.clone(),
        finite_domain(&al, &elems),
        sig,
        interps,
    )
    .unwrap()
}

/// Direct recursive evaluation over worlds and a finite list of elements.
pub fn naive_foel(
    m: &EpistemicModel,
    w: usize,
    phi: &Formula,
    elems: &[Word],
    env: &mut HashMap<String, Word>,
) -> bool {
    match phi {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(p, args) => {
            let t: Vec<Word> = args.iter().map(|a| env[a].clone()).collect();
            m.interpretations[w][p].accepts(&t).unwrap()
        }
        Formula::Not(a) => !naive_foel(m, w, a, elems, env),
        Formula::And(a, b) => naive_foel(m, w, a, elems, env) && naive_foel(m, w, b, elems, env),
        Formula::Or(a, b) => naive_foel(m, w, a, elems, env) || naive_foel(m, w, b, elems, env),
        Formula::Implies(a, b) => !naive_foel(m, w, a, elems, env) || naive_foel(m, w, b, elems, env),
        Formula::Iff(a, b) => naive_foel(m, w, a, elems, env) == naive_foel(m, w, b, elems, env),
        Formula::Exists(x, a) | Formula::Forall(x, a) => {
            let universal = matches!(phi, Formula::Forall(..));
            let saved = env.get(x).cloned();
            let mut result = universal;
            for e in elems {
                env.insert(x.clone(), e.clone());
                if naive_foel(m, w, a, elems, env) != universal {
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
        Formula::Know(agent, a) => m
            .relation(agent)
            .iter()
            .filter(|&&(x, _)| x == w)
            .all(|&(_, v)| naive_foel(m, v, a, elems, env)),
    }
}

/// The language demo over `a*` and `b*`: `C` starts empty, `U0`/`U1` add a
/// generator, `CP` complements.
pub fn flang(target: &str) -> Instance {
    epp::demo::build_language_demo(&["a*", "b*"], target, false, None).unwrap()
}

pub const MIXED: &str = "(a|b)*(ab|ba)(a|b)*";

/// Number of sets reachable from `∅` under `X ∪ a*`, `X ∪ b*` and
/// complement, computed over the four atoms `{ε}`, `a+`, `b+` and the
/// words using both letters.
pub fn flang_closure_size() -> usize {
    const ALL: u8 = 0b1111;
    let a_star = 0b0011;
    let b_star = 0b0101;
    let mut seen = BTreeSet::from([0u8]);
    let mut stack = vec![0u8];
    while let Some(x) = stack.pop() {
        for y in [x | a_star, x | b_star, ALL & !x] {
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen.len()
}

/// The action model reduced to one event, with reflexive access.
pub fn single_event(a: &ActionModel, e: usize) -> ActionModel {
    ActionModel {
        events: vec![a.events[e].clone()],
        access: a.access.keys().map(|ag| (ag.clone(), [(0, 0)].into_iter().collect())).collect(),
        pre: vec![a.pre[e].clone()],
        post: vec![a.post[e].clone()],
        native: a
            .native
            .iter()
            .filter(|((i, _), _)| *i == e)
            .map(|((_, p), n)| ((0, p.clone()), n.clone()))
            .collect(),
    }
}

/// Event sequences from world 0, up to `n` events, after which `C` and `L`
/// are equal languages; found by updating and comparing automata.
pub fn language_solutions(inst: &Instance, n: usize) -> BTreeSet<Vec<String>> {
    let mut out = BTreeSet::new();
    for depth in 0..=n {
        let (m, hist) = iterate_update_traced(&inst.model, &inst.action, depth).unwrap();
        for (i, (w, events)) in hist.iter().enumerate() {
            let c = &m.interpretations[i]["C"];
            if *w == 0 && c.equivalent(&m.interpretations[i]["L"]).unwrap() {
                out.insert(events.iter().map(|&e| inst.action.events[e].clone()).collect());
            }
        }
    }
    out
}

/// Random quantifier-free action model over a signature.
pub fn random_qf_action(rng: &mut TestRng, sig: &Signature, agents: &[String]) -> ActionModel {
    let n = rng.gen_range(1..=3);
    let mut a = ActionModel::reflexive(agents, (0..n).map(|i| (format!("e{i}"), Formula::True)).collect());
    a.access = random_access(rng, agents, n, 0.5);
    for e in 0..n {
        if rng.gen_bool(0.4) {
            a.pre[e] = random_formula(rng, sig, &[], &[], 1, 0, 2);
        }
        for (p, k) in sig.iter() {
            if rng.gen_bool(0.7) {
                a.post[e].insert(p.to_string(), random_formula(rng, sig, &[], &post_vars(k), 0, 0, 3));
            }
        }
    }
    a
}

/// Regular interpretations over `{a,b}*` for predicates of arity one or two.
pub fn random_regular_relation(rng: &mut TestRng, k: usize) -> Automaton {
    let al = ab();
    match k {
        0 => {
            if rng.gen_bool(0.5) {
                Automaton::epsilon(&al, 0)
            } else {
                Automaton::empty(&al, 0)
            }
        }
        1 => {
            let pool = ["a*", "b*", "(a|b)*a", "a(a|b)*", "(ab)*", "ε", "∅", "(a|b)(a|b)", "b+a?"];
            re(pool[rng.gen_range(0..pool.len())])
        }
        _ => {
            let letters: [Sym; 2] = [1, 2];
            let mut trans = Vec::new();
            let kind = rng.gen_range(0..4);
            for &x in &letters {
                for &y in &letters {
                    match kind {
                        0 if x == y => trans.push((0, vec![x, y], 0)),
                        1 => trans.push((0, vec![x, y], 0)),
                        2 => {
                            if x == y {
                                trans.push((0, vec![x, y], 0));
                            }
                        }
                        3 if x != y => trans.push((0, vec![x, y], 0)),
                        _ => {}
                    }
                }
            }
            if kind == 2 {
                for &y in &letters {
                    trans.push((0, vec![0, y], 1));
                    trans.push((1, vec![0, y], 1));
                }
            }
            Automaton::from_parts(2, al, 2, vec![0], vec![0, 1], trans).unwrap()
        }
    }
}

/// A model over the infinite domain `{a,b}*` with two predicates.
pub fn random_regular_model(rng: &mut TestRng, worlds: usize) -> EpistemicModel {
    let al = ab();
    let sig = Signature::new([("P", rng.gen_range(1..=2)), ("Q", rng.gen_range(1..=2))]);
    let agents = vec!["a".to_string()];
    let access = random_access(rng, &agents, worlds, 0.5);
    let interps = (0..worlds)
        .map(|_| {
            sig.iter()
                .map(|(p, k)| (p.to_string(), random_regular_relation(rng, k)))
                .collect()
        })
        .collect();
    EpistemicModel::new(
        agents,
        (0..worlds).map(|i| format!("w{i}")).collect(),
        access,
        al.clone(),
        Automaton::universal(&al, 1),
        sig,
        interps,
    )
    .unwrap()
}

/// One step of a deterministic machine on a configuration `u q v`, with
/// trailing blanks dropped.
pub fn tm_step(tm: &TmDescription, c: &[String]) -> Option<Vec<String>> {
    let h = c.iter().position(|x| tm.states.contains(x))?;
    let (u, q, v) = (&c[..h], &c[h], &c[h + 1..]);
    let a = v.first().unwrap_or(&tm.blank);
    let (q2, b, mv) = tm.delta.get(&format!("{q},{a}"))?;
    let rest = if v.is_empty() { &[][..] } else { &v[1..] };
    let (left, mut right) = match mv {
        Move::R => {
            let mut l = u.to_vec();
            l.push(b.clone());
            (l, rest.to_vec())
        }
        Move::L => {
            let (x, l) = u.split_last()?;
            let mut r = vec![x.clone(), b.clone()];
            r.extend_from_slice(rest);
            (l.to_vec(), r)
        }
    };
    while right.last() == Some(&tm.blank) {
        right.pop();
    }
    Some(left.into_iter().chain([q2.clone()]).chain(right).collect())
}

pub fn tm(json: &str) -> TmDescription {
    serde_json::from_str(json).unwrap()
}

/// Accepts after one step.
pub const ONE_STEP_TM: &str = r#"{"states":["q0","qacc"],"input":["a"],"tape":["a","⊔"],"blank":"⊔",
    "delta":{"q0,a":["qacc","a","R"]},"initial":"q0","accepting":["qacc"]}"#;

/// Runs right forever and never accepts.
pub const LOOPING_TM: &str = r#"{"states":["q0","qacc"],"input":["a"],"tape":["a","⊔"],"blank":"⊔",
    "delta":{"q0,a":["q0","a","R"],"q0,⊔":["q0","a","R"]},"initial":"q0","accepting":["qacc"]}"#;

/// Marks its input going right, unmarks it going left, and halts at the
/// left end without accepting.
pub const SWEEP_TM: &str = r#"{"states":["q0","q1","qacc"],"input":["a"],"tape":["a","b","⊔"],"blank":"⊔",
    "delta":{"q0,a":["q0","b","R"],"q0,⊔":["q1","⊔","L"],"q1,b":["q1","a","L"]},
    "initial":"q0","accepting":["qacc"]}"#;

pub fn words_of(al: &Alphabet, w: &Word) -> Vec<String> {
    w.iter().map(|&s| al.letter(s).to_string()).collect()
}
