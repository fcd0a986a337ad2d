//! Planning over the histories of an epistemic model.
//!
//! With quantifier-free post-conditions, histories fall into finitely many
//! classes of equal interpretations. The classes form a deterministic
//! automaton over world and event letters, from which the history structure
//! is automatically presented; a goal then compiles, through the standard
//! translation, into an automaton of solutions. For other non-modal action
//! models a breadth-first search over updated models semi-decides planning.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::automata::{Alphabet, Automaton, Sym, DEFAULT_STATE_CAP};
use crate::epistemic::{fresh_var, satisfying_worlds, ActionModel, EpistemicModel, Relation};
use crate::error::{Error, Result};
use crate::logic::{history_names, standard_translation, Formula, HistorySignature};
use crate::prefix::Prefixes;
use crate::presentation::{AutomaticPresentation, CompileOptions};

pub const DEFAULT_CLASS_CAP: usize = 10_000;

/// An interpretation shared by a class of histories. Predicates are kept as
/// minimal automata, so equal languages give equal values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InterpClass {
    pub id: u64,
    pub predicates: BTreeMap<String, Automaton>,
}

impl InterpClass {
    pub fn new(predicates: &BTreeMap<String, Automaton>) -> Result<Self> {
        let minimal = predicates
            .iter()
            .map(|(p, a)| Ok((p.clone(), a.minimize()?)))
            .collect::<Result<_>>()?;
        Ok(Self::from_minimal(minimal))
    }

    fn from_minimal(predicates: BTreeMap<String, Automaton>) -> Self {
        let mut h = DefaultHasher::new();
        predicates.hash(&mut h);
        InterpClass {
            id: h.finish(),
            predicates,
        }
    }

    fn structure(&self, m: &EpistemicModel) -> Result<AutomaticPresentation> {
        AutomaticPresentation::new(
            m.signature.clone(),
            m.alphabet.clone(),
            m.domain.clone(),
            self.predicates.clone(),
        )
    }
}

/// The class after event `e`, `None` when its precondition fails.
pub fn apply_event_to_class(
    m: &EpistemicModel,
    a: &ActionModel,
    class: &InterpClass,
    e: usize,
) -> Result<Option<InterpClass>> {
    a.require_non_modal()?;
    let next = a.apply(&class.structure(m)?, e, CompileOptions::default())?;
    Ok(next.map(InterpClass::from_minimal))
}

/// Deterministic automaton whose state after a history is its class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassAutomaton {
    pub worlds: Vec<String>,
    pub events: Vec<String>,
    pub classes: Vec<InterpClass>,
    /// Class of each world.
    pub initial: Vec<usize>,
    /// `delta[c][e]`, `None` when `e` is not applicable in class `c`.
    pub delta: Vec<Vec<Option<usize>>>,
}

impl ClassAutomaton {
    pub fn run(&self, world: usize, events: &[usize]) -> Option<usize> {
        events
            .iter()
            .try_fold(self.initial[world], |c, &e| self.delta[c][e])
    }

    /// World letters followed by event letters.
    pub fn letters(&self) -> Result<Alphabet> {
        Alphabet::new(self.worlds.iter().chain(&self.events).cloned())
    }

    /// Histories whose class satisfies `finality`.
    pub fn to_automaton(&self, finality: impl Fn(usize) -> bool) -> Result<Automaton> {
        let al = self.letters()?;
        let w = self.worlds.len();
        let mut trans = vec![(0..w).map(|i| (vec![i as Sym + 1], self.initial[i] as u32 + 1)).collect::<Vec<_>>()];
        for row in &self.delta {
            trans.push(
                row.iter()
                    .enumerate()
                    .filter_map(|(e, t)| t.map(|t| (vec![(w + e) as Sym + 1], t as u32 + 1)))
                    .collect(),
            );
        }
        let accepting = (0..self.classes.len())
            .filter(|&c| finality(c))
            .map(|c| c as u32 + 1)
            .collect();
        let flat = trans
            .into_iter()
            .enumerate()
            .flat_map(|(s, ts)| ts.into_iter().map(move |(l, t)| (s as u32, l, t)))
            .collect();
        Automaton::from_parts(1, al, self.classes.len() + 1, vec![0], accepting, flat)
    }

    /// All histories.
    pub fn histories(&self) -> Result<Automaton> {
        self.to_automaton(|_| true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Quotient {
    Complete(ClassAutomaton),
    /// More than the cap of classes were found.
    CapExceeded { classes: usize },
}

/// Closes the classes of the worlds under all events.
pub fn class_quotient(m: &EpistemicModel, a: &ActionModel, cap: usize) -> Result<Quotient> {
    a.check(&m.signature, &m.agents)?;
    a.require_non_modal()?;
    let mut classes: Vec<InterpClass> = Vec::new();
    let mut index: HashMap<InterpClass, usize> = HashMap::new();
    let mut intern = |c: InterpClass, classes: &mut Vec<InterpClass>| {
        *index.entry(c.clone()).or_insert_with(|| {
            classes.push(c);
            classes.len() - 1
        })
    };
    let mut initial = Vec::new();
    for w in 0..m.worlds.len() {
        let c = InterpClass::new(&m.interpretations[w])?;
        initial.push(intern(c, &mut classes));
    }
    let mut delta = Vec::new();
    let mut i = 0;
    while i < classes.len() {
        if classes.len() > cap {
            return Ok(Quotient::CapExceeded { classes: classes.len() });
        }
        let mut row = Vec::with_capacity(a.events.len());
        for e in 0..a.events.len() {
            let next = apply_event_to_class(m, a, &classes[i], e)?;
            row.push(next.map(|c| intern(c, &mut classes)));
        }
        delta.push(row);
        i += 1;
    }
    if classes.len() > cap {
        return Ok(Quotient::CapExceeded { classes: classes.len() });
    }
    Ok(Quotient::Complete(ClassAutomaton {
        worlds: m.worlds.clone(),
        events: a.events.clone(),
        classes,
        initial,
        delta,
    }))
}

/// The automatic presentation of the history structure together with the
/// class automaton it was built from.
#[derive(Clone, Debug)]
pub struct HistoryPresentation {
    pub presentation: AutomaticPresentation,
    pub classes: ClassAutomaton,
}

impl HistoryPresentation {
    /// Encodes a history `w e1 … en` as an element.
    pub fn encode(&self, world: usize, events: &[usize]) -> Vec<Sym> {
        let al = &self.presentation.alphabet;
        std::iter::once(&self.classes.worlds[world])
            .chain(events.iter().map(|&e| &self.classes.events[e]))
            .map(|l| al.symbol(l).unwrap())
            .collect()
    }
}

pub fn history_presentation(m: &EpistemicModel, a: &ActionModel, cap: usize) -> Result<HistoryPresentation> {
    let classes = match class_quotient(m, a, cap)? {
        Quotient::Complete(c) => c,
        Quotient::CapExceeded { .. } => return Err(Error::ClassCap(cap)),
    };
    let extra: Vec<String> = m.worlds.iter().chain(&a.events).cloned().collect();
    let alphabet = Prefixes::alphabet(&m.alphabet, &extra)?;
    let sym = |l: &String| alphabet.symbol(l).unwrap();
    let world_syms: Vec<Sym> = m.worlds.iter().map(sym).collect();
    let event_syms: Vec<Sym> = a.events.iter().map(sym).collect();
    let mut trans = vec![world_syms
        .iter()
        .zip(&classes.initial)
        .map(|(&s, &c)| (s, c + 1))
        .collect::<Vec<_>>()];
    for row in &classes.delta {
        trans.push(
            row.iter()
                .zip(&event_syms)
                .filter_map(|(t, &s)| t.map(|t| (s, t + 1)))
                .collect(),
        );
    }
    let mut class = vec![None];
    class.extend((0..classes.classes.len()).map(Some));
    let prefixes = Prefixes {
        alphabet: alphabet.clone(),
        initial: 0,
        trans,
        class,
        cap: DEFAULT_STATE_CAP,
    };
    let mut relations = BTreeMap::new();
    let mut accessible = HashSet::new();
    for agent in &m.agents {
        let mut pairs: HashSet<(Sym, Sym)> = HashSet::new();
        pairs.extend(m.relation(agent).iter().map(|&(x, y)| (world_syms[x], world_syms[y])));
        pairs.extend(a.relation(agent).iter().map(|&(x, y)| (event_syms[x], event_syms[y])));
        relations.insert(history_names::ep(agent), prefixes.letterwise(&pairs)?);
        accessible.extend(pairs);
    }
    for (p, k) in m.signature.iter() {
        let per_class: Vec<Automaton> = classes.classes.iter().map(|c| c.predicates[p].clone()).collect();
        relations.insert(history_names::hat(p), prefixes.with_prefix(k, &per_class)?);
    }
    for (w, name) in m.worlds.iter().enumerate() {
        relations.insert(history_names::from(name), prefixes.starting_with(world_syms[w])?);
    }
    let doms = vec![m.domain.clone(); classes.classes.len()];
    relations.insert(history_names::DOM.to_string(), prefixes.with_prefix(1, &doms)?);
    relations.insert(history_names::SAME.to_string(), prefixes.same_element(&m.domain, &accessible)?);
    let signature = HistorySignature {
        base: m.signature.clone(),
        agents: m.agents.clone(),
        worlds: m.worlds.clone(),
    }
    .signature();
    let presentation = AutomaticPresentation::new(signature, alphabet, prefixes.universe(&m.domain)?, relations)?;
    Ok(HistoryPresentation { presentation, classes })
}

/// Rejects action models outside the decidable fragment.
fn require_decidable(a: &ActionModel) -> Result<()> {
    a.require_non_modal()?;
    if !a.posts_quantifier_free() {
        return Err(Error::Fragment(
            "post-conditions with quantifiers are only supported by breadth-first search".into(),
        ));
    }
    if a.has_native() {
        return Err(Error::Fragment(
            "native updates are only supported by breadth-first search".into(),
        ));
    }
    Ok(())
}

/// Histories from `world` satisfying `goal`, over world and event letters.
pub fn solution_automaton(m: &EpistemicModel, world: usize, a: &ActionModel, goal: &Formula) -> Result<Automaton> {
    Ok(solve(m, world, a, goal)?.0)
}

fn solve(m: &EpistemicModel, world: usize, a: &ActionModel, goal: &Formula) -> Result<(Automaton, usize)> {
    a.check(&m.signature, &m.agents)?;
    require_decidable(a)?;
    goal.check(&m.signature)?;
    if let Some(v) = goal.free_vars().first() {
        return Err(Error::Input(format!("goal has free variable `{v}`")));
    }
    let hp = history_presentation(m, a, DEFAULT_CLASS_CAP)?;
    let y = fresh_var("y", goal);
    let query = Formula::and(
        standard_translation(goal, &y)?,
        Formula::atom(&history_names::from(&m.worlds[world]), &[y.as_str()]),
    );
    let raw = hp.presentation.compile(&query, &[y])?;
    let hist = hp.classes.histories()?;
    let solutions = raw.with_alphabet(hist.alphabet())?.intersect(&hist)?.minimize()?;
    Ok((solutions, hp.classes.classes.len()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

/// Outcome of a planning query. `depth` is the plan length for a positive
/// answer and the search bound for an unknown one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanResult {
    pub answer: Answer,
    pub plan: Vec<String>,
    pub depth: Option<usize>,
    pub classes: usize,
    pub stats: BTreeMap<String, u64>,
}

/// Decides planning from `world`; a positive answer carries the
/// length-lexicographically least plan.
pub fn decide_plan(m: &EpistemicModel, world: usize, a: &ActionModel, goal: &Formula) -> Result<PlanResult> {
    let start = Clock::start();
    let (solutions, classes) = solve(m, world, a, goal)?;
    let mut stats = BTreeMap::new();
    stats.insert("solution_states".to_string(), solutions.num_states() as u64);
    let witness = solutions.shortest_witness();
    stats.insert("millis".to_string(), start.millis());
    Ok(match witness {
        Some(w) => {
            let al = solutions.alphabet();
            let plan: Vec<String> = w[0][1..].iter().map(|&s| al.letter(s).to_string()).collect();
            PlanResult {
                answer: Answer::Yes,
                depth: Some(plan.len()),
                plan,
                classes,
                stats,
            }
        }
        None => PlanResult {
            answer: Answer::No,
            plan: vec![],
            depth: None,
            classes,
            stats,
        },
    })
}

/// Wall-clock timing; absent on targets without a clock.
struct Clock(#[cfg(not(target_arch = "wasm32"))] std::time::Instant);

impl Clock {
    fn start() -> Self {
        Clock(
            #[cfg(not(target_arch = "wasm32"))]
            std::time::Instant::now(),
        )
    }

    fn millis(&self) -> u64 {
        #[cfg(not(target_arch = "wasm32"))]
        return self.0.elapsed().as_millis() as u64;
        #[cfg(target_arch = "wasm32")]
        0
    }
}

/// Interpretations seen during search, with memoized updates.
struct Interps<'a> {
    m: &'a EpistemicModel,
    a: &'a ActionModel,
    all: Vec<InterpClass>,
    index: HashMap<InterpClass, usize>,
    updates: HashMap<(usize, usize), Option<usize>>,
    truth: HashMap<usize, bool>,
}

impl<'a> Interps<'a> {
    fn intern(&mut self, c: InterpClass) -> usize {
        if let Some(&i) = self.index.get(&c) {
            return i;
        }
        self.all.push(c.clone());
        self.index.insert(c, self.all.len() - 1);
        self.all.len() - 1
    }

    fn update(&mut self, i: usize, e: usize) -> Result<Option<usize>> {
        if let Some(&r) = self.updates.get(&(i, e)) {
            return Ok(r);
        }
        let next = apply_event_to_class(self.m, self.a, &self.all[i], e)?;
        let r = next.map(|c| self.intern(c));
        self.updates.insert((i, e), r);
        Ok(r)
    }

    fn holds(&mut self, i: usize, goal: &Formula) -> Result<bool> {
        if let Some(&b) = self.truth.get(&i) {
            return Ok(b);
        }
        let b = self.all[i].structure(self.m)?.check_sentence(goal)?;
        self.truth.insert(i, b);
        Ok(b)
    }
}

/// Searches histories from `world` of length up to `max_depth` in
/// length-lexicographic order. Never answers no.
pub fn bfs_plan(
    m: &EpistemicModel,
    world: usize,
    a: &ActionModel,
    goal: &Formula,
    max_depth: usize,
) -> Result<PlanResult> {
    let start = Clock::start();
    a.check(&m.signature, &m.agents)?;
    a.require_non_modal()?;
    goal.check(&m.signature)?;
    if let Some(v) = goal.free_vars().first() {
        return Err(Error::Input(format!("goal has free variable `{v}`")));
    }
    let keep = m.reachable(world);
    let sub = m.restrict(&keep);
    let mut interps = Interps {
        m: &sub,
        a,
        all: vec![],
        index: HashMap::new(),
        updates: HashMap::new(),
        truth: HashMap::new(),
    };
    let found = if goal.is_modal() {
        let at = keep.iter().position(|&w| w == world).unwrap();
        search_layers(&sub, at, a, goal, max_depth, &mut interps)?
    } else {
        search_classes(&sub, keep.iter().position(|&w| w == world).unwrap(), goal, max_depth, &mut interps)?
    };
    let mut stats = BTreeMap::new();
    stats.insert("millis".to_string(), start.millis());
    stats.insert("updates".to_string(), interps.updates.len() as u64);
    let classes = interps.all.len();
    Ok(match found {
        Some(events) => PlanResult {
            answer: Answer::Yes,
            depth: Some(events.len()),
            plan: events.iter().map(|&e| a.events[e].clone()).collect(),
            classes,
            stats,
        },
        None => PlanResult {
            answer: Answer::Unknown,
            plan: vec![],
            depth: Some(max_depth),
            classes,
            stats,
        },
    })
}

/// For non-modal goals truth and successors depend on the interpretation
/// only, so each one is visited once along its least history.
fn search_classes(
    m: &EpistemicModel,
    world: usize,
    goal: &Formula,
    max_depth: usize,
    interps: &mut Interps,
) -> Result<Option<Vec<usize>>> {
    let first = InterpClass::new(&m.interpretations[world])?;
    let root = interps.intern(first);
    let mut seen = HashSet::from([root]);
    let mut layer = vec![(root, Vec::new())];
    for depth in 0..=max_depth {
        for (i, events) in &layer {
            if interps.holds(*i, goal)? {
                return Ok(Some(events.clone()));
            }
        }
        if depth == max_depth {
            break;
        }
        let mut next = Vec::new();
        for (i, events) in &layer {
            for e in 0..interps.a.events.len() {
                if let Some(j) = interps.update(*i, e)? {
                    if seen.insert(j) {
                        let mut h = events.clone();
                        h.push(e);
                        next.push((j, h));
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    Ok(None)
}

struct Layer {
    /// Origin world, events and interpretation of each history.
    hist: Vec<(usize, Vec<usize>, usize)>,
    access: BTreeMap<String, Relation>,
}

fn search_layers(
    m: &EpistemicModel,
    world: usize,
    a: &ActionModel,
    goal: &Formula,
    max_depth: usize,
    interps: &mut Interps,
) -> Result<Option<Vec<usize>>> {
    let mut hist = Vec::new();
    for w in 0..m.worlds.len() {
        let c = InterpClass::new(&m.interpretations[w])?;
        hist.push((w, vec![], interps.intern(c)));
    }
    let mut layer = Layer {
        hist,
        access: m.access.clone(),
    };
    for depth in 0..=max_depth {
        let model = EpistemicModel {
            agents: m.agents.clone(),
            worlds: (0..layer.hist.len()).map(|i| format!("h{i}")).collect(),
            access: layer.access.clone(),
            alphabet: m.alphabet.clone(),
            domain: m.domain.clone(),
            signature: m.signature.clone(),
            interpretations: layer.hist.iter().map(|h| interps.all[h.2].predicates.clone()).collect(),
        };
        let truth = satisfying_worlds(&model, goal)?;
        if let Some(i) = (0..layer.hist.len()).find(|&i| layer.hist[i].0 == world && truth[i]) {
            return Ok(Some(layer.hist[i].1.clone()));
        }
        if depth == max_depth {
            break;
        }
        let mut next = Vec::new();
        let mut index = HashMap::new();
        for (i, (w, events, c)) in layer.hist.iter().enumerate() {
            for e in 0..a.events.len() {
                if let Some(d) = interps.update(*c, e)? {
                    let mut h = events.clone();
                    h.push(e);
                    index.insert((i, e), next.len());
                    next.push((*w, h, d));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        let mut access = BTreeMap::new();
        for agent in &m.agents {
            let q = a.relation(agent);
            let mut rel = Relation::new();
            for &(x, y) in layer.access.get(agent).into_iter().flatten() {
                for &(e, f) in &q {
                    if let (Some(&u), Some(&v)) = (index.get(&(x, e)), index.get(&(y, f))) {
                        rel.insert((u, v));
                    }
                }
            }
            access.insert(agent.clone(), rel);
        }
        layer = Layer { hist: next, access };
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epistemic::{iterate_update_traced, Native, NativeOp};
    use crate::logic::{parse_formula, Signature};

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn re(p: &str) -> Automaton {
        Automaton::from_regex(p, &ab()).unwrap()
    }

    fn lang(target: &str) -> (EpistemicModel, ActionModel, Formula) {
        let sig = Signature::new([("C", 1), ("L", 1), ("L0", 1), ("L1", 1)]);
        let interp = [("C", re("∅")), ("L", re(target)), ("L0", re("a*")), ("L1", re("b*"))]
            .into_iter()
            .map(|(n, a)| (n.to_string(), a))
            .collect();
        let m = EpistemicModel::new(
            vec!["a".into()],
            vec!["s".into()],
            [("a".to_string(), [(0, 0)].into_iter().collect())].into_iter().collect(),
            ab(),
            re("(a|b)*"),
            sig.clone(),
            vec![interp],
        )
        .unwrap();
        let mut a = ActionModel::reflexive(
            &m.agents,
            ["U0", "U1", "CP"].iter().map(|e| (e.to_string(), Formula::True)).collect(),
        );
        a.post[0].insert("C".into(), parse_formula("C(x1) | L0(x1)", &sig).unwrap());
        a.post[1].insert("C".into(), parse_formula("C(x1) | L1(x1)", &sig).unwrap());
        a.post[2].insert("C".into(), parse_formula("!C(x1)", &sig).unwrap());
        let goal = parse_formula("forall x. (C(x) <-> L(x))", &sig).unwrap();
        (m, a, goal)
    }

    const MIXED: &str = "(a|b)*(ab|ba)(a|b)*";

    #[test]
    fn class_update() {
        let (m, a, _) = lang(MIXED);
        let c0 = InterpClass::new(&m.interpretations[0]).unwrap();
        let c1 = apply_event_to_class(&m, &a, &c0, 0).unwrap().unwrap();
        assert!(c1.predicates["C"].equivalent(&re("a*")).unwrap());
        let twice = apply_event_to_class(&m, &a, &c0, 2)
            .and_then(|c| apply_event_to_class(&m, &a, &c.unwrap(), 2))
            .unwrap()
            .unwrap();
        assert_eq!(twice, c0);
        let mut blocked = a.clone();
        blocked.pre[0] = Formula::False;
        assert_eq!(apply_event_to_class(&m, &blocked, &c0, 0).unwrap(), None);
    }

    #[test]
    fn quotient_is_coherent() {
        let (m, a, _) = lang(MIXED);
        let Quotient::Complete(ca) = class_quotient(&m, &a, DEFAULT_CLASS_CAP).unwrap() else {
            panic!("quotient should be finite")
        };
        for n in 0..=3 {
            let (mn, hist) = iterate_update_traced(&m, &a, n).unwrap();
            for (i, (w, events)) in hist.iter().enumerate() {
                let c = ca.run(*w, events).unwrap();
                for (p, aut) in &mn.interpretations[i] {
                    assert!(aut.equivalent(&ca.classes[c].predicates[p]).unwrap());
                }
            }
        }
        let only_first = ca.to_automaton(|c| c == ca.initial[0]).unwrap();
        assert!(only_first.accepts_str(&["s"]).unwrap());
        assert!(only_first.accepts_str(&["s·CP·CP"]).unwrap());
        assert!(!only_first.accepts_str(&["s·CP"]).unwrap());
    }

    #[test]
    fn identity_actions_keep_initial_classes() {
        let (m, _, _) = lang(MIXED);
        let a = ActionModel::reflexive(&m.agents, vec![("skip".into(), Formula::True)]);
        let Quotient::Complete(ca) = class_quotient(&m, &a, 10).unwrap() else { panic!() };
        assert_eq!(ca.classes.len(), 1);
    }

    #[test]
    fn cap_is_reported() {
        let (m, mut a, _) = lang(MIXED);
        a.native.insert((0, "C".into()), Native::new(NativeOp::ConcatRight, "a", &ab()).unwrap());
        assert!(matches!(class_quotient(&m, &a, 5).unwrap(), Quotient::CapExceeded { .. }));
    }

    #[test]
    fn history_structure() {
        let (m, a, _) = lang(MIXED);
        let hp = history_presentation(&m, &a, DEFAULT_CLASS_CAP).unwrap();
        let p = &hp.presentation;
        assert!(p.validate().is_empty());
        let dom = p.relation("dom^").unwrap();
        assert!(dom.accepts_str(&["s·U0", "s·U0·#·a·a"]).unwrap());
        assert!(!dom.accepts_str(&["s·U0", "s·U1·#·a·a"]).unwrap());
        let c = p.relation("^C").unwrap();
        assert!(c.accepts_str(&["s·U0", "s·U0·#·a"]).unwrap());
        assert!(!c.accepts_str(&["s·U0", "s·U0·#·b"]).unwrap());
        let ep = p.relation("ep^a").unwrap();
        let pairs = ep.enumerate_strings(4);
        assert_eq!(pairs.len(), 1 + 3 + 9 + 27);
        assert!(pairs.iter().all(|p| p[0] == p[1]));
        assert!(!ep.accepts_str(&["s·U0", "s·U1"]).unwrap());
    }

    #[test]
    fn decide_running_example() {
        let (m, a, goal) = lang(MIXED);
        let r = decide_plan(&m, 0, &a, &goal).unwrap();
        assert_eq!(r.answer, Answer::Yes);
        assert_eq!(r.plan, ["U0", "U1", "CP"]);
        let b = bfs_plan(&m, 0, &a, &goal, 6).unwrap();
        assert_eq!(b.plan, r.plan);
        let sol = solution_automaton(&m, 0, &a, &goal).unwrap();
        assert!(sol.accepts_str(&["s·U1·U0·CP"]).unwrap());
        assert!(sol.accepts_str(&["s·U0·U1·CP"]).unwrap());
        assert!(!sol.accepts_str(&["s·U0·CP"]).unwrap());
    }

    #[test]
    fn decide_negative() {
        let (m, a, goal) = lang("a*b");
        assert_eq!(decide_plan(&m, 0, &a, &goal).unwrap().answer, Answer::No);
        assert_eq!(bfs_plan(&m, 0, &a, &goal, 10).unwrap().answer, Answer::Unknown);
    }

    #[test]
    fn trivial_goals() {
        let (m, a, _) = lang(MIXED);
        let yes = decide_plan(&m, 0, &a, &Formula::True).unwrap();
        assert_eq!((yes.answer, yes.plan.len()), (Answer::Yes, 0));
        assert!(solution_automaton(&m, 0, &a, &Formula::False).unwrap().is_empty());
        let all = solution_automaton(&m, 0, &a, &Formula::True).unwrap();
        let Quotient::Complete(ca) = class_quotient(&m, &a, 100).unwrap() else { panic!() };
        assert!(all.equivalent(&ca.histories().unwrap()).unwrap());
    }

    #[test]
    fn modal_goal_search() {
        let (m, a, goal) = lang(MIXED);
        let known = Formula::know("a", goal);
        let d = decide_plan(&m, 0, &a, &known).unwrap();
        let b = bfs_plan(&m, 0, &a, &known, 4).unwrap();
        assert_eq!(d.plan, ["U0", "U1", "CP"]);
        assert_eq!(b.plan, d.plan);
    }

    #[test]
    fn fragment_errors() {
        let (m, mut a, goal) = lang(MIXED);
        a.post[0].insert("C".into(), parse_formula("exists y. L0(y)", &m.signature).unwrap());
        assert!(matches!(decide_plan(&m, 0, &a, &goal), Err(Error::Fragment(_))));
        let json = serde_json::to_string(&bfs_plan(&m, 0, &a, &goal, 2).unwrap()).unwrap();
        assert!(json.contains("\"answer\":\"unknown\""));
    }
}
