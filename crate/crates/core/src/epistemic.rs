//! First-order epistemic models with automatic interpretations, action
//! models, product update and evaluation of epistemic formulas.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::automata::{Alphabet, Automaton, AutomatonSpec, Sym, Word};
use crate::error::{Error, Result};
use crate::logic::{history_names, parse_formula, standard_translation, Formula, HistorySignature, Signature};
use crate::prefix::{Prefixes, SEPARATOR};
use crate::presentation::{AutomaticPresentation, CompileOptions, Compiler, Diagnostic};

/// Pairs of indices into a list of worlds or events.
pub type Relation = BTreeSet<(usize, usize)>;

/// Finitely many worlds over one shared automatic domain, each world
/// interpreting every predicate of the signature by an automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpistemicModel {
    pub agents: Vec<String>,
    pub worlds: Vec<String>,
    pub access: BTreeMap<String, Relation>,
    pub alphabet: Alphabet,
    pub domain: Automaton,
    pub signature: Signature,
    pub interpretations: Vec<BTreeMap<String, Automaton>>,
}

fn check_relation(rel: &Relation, size: usize) -> Result<()> {
    match rel.iter().find(|&&(a, b)| a >= size || b >= size) {
        Some(&(a, b)) => Err(Error::Input(format!("pair ({a}, {b}) out of range"))),
        None => Ok(()),
    }
}

fn distinct(names: &[String], what: &str) -> Result<()> {
    let set: BTreeSet<&String> = names.iter().collect();
    if set.len() != names.len() {
        return Err(Error::Input(format!("duplicate {what} name")));
    }
    Ok(())
}

impl EpistemicModel {
    pub fn new(
        agents: Vec<String>,
        worlds: Vec<String>,
        access: BTreeMap<String, Relation>,
        alphabet: Alphabet,
        domain: Automaton,
        signature: Signature,
        interpretations: Vec<BTreeMap<String, Automaton>>,
    ) -> Result<Self> {
        if worlds.is_empty() {
            return Err(Error::EmptyModel);
        }
        distinct(&worlds, "world")?;
        distinct(&agents, "agent")?;
        if interpretations.len() != worlds.len() {
            return Err(Error::Input("one interpretation per world expected".into()));
        }
        for (agent, rel) in &access {
            if !agents.contains(agent) {
                return Err(Error::Input(format!("unknown agent `{agent}`")));
            }
            check_relation(rel, worlds.len())?;
        }
        let m = EpistemicModel {
            agents,
            worlds,
            access,
            alphabet,
            domain,
            signature,
            interpretations,
        };
        for w in 0..m.worlds.len() {
            m.presentation(w)?;
        }
        Ok(m)
    }

    pub fn world_index(&self, name: &str) -> Result<usize> {
        self.worlds
            .iter()
            .position(|w| w == name)
            .ok_or_else(|| Error::Input(format!("unknown world `{name}`")))
    }

    pub fn relation(&self, agent: &str) -> Relation {
        self.access.get(agent).cloned().unwrap_or_default()
    }

    /// The first-order structure of a world.
    pub fn presentation(&self, world: usize) -> Result<AutomaticPresentation> {
        AutomaticPresentation::new(
            self.signature.clone(),
            self.alphabet.clone(),
            self.domain.clone(),
            self.interpretations[world].clone(),
        )
    }

    /// Diagnostics of every world's presentation, tagged by world name.
    pub fn validate(&self) -> Vec<(String, Diagnostic)> {
        let mut out = Vec::new();
        for (i, w) in self.worlds.iter().enumerate() {
            if let Ok(p) = self.presentation(i) {
                out.extend(p.validate().into_iter().map(|d| (w.clone(), d)));
            }
        }
        out
    }

    /// Worlds reachable from `world` through any agent, in index order.
    pub fn reachable(&self, world: usize) -> Vec<usize> {
        let mut seen = vec![false; self.worlds.len()];
        seen[world] = true;
        let mut stack = vec![world];
        while let Some(v) = stack.pop() {
            for rel in self.access.values() {
                for &(a, b) in rel {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        (0..self.worlds.len()).filter(|&i| seen[i]).collect()
    }

    /// The submodel on the given worlds (sorted, distinct indices).
    pub fn restrict(&self, keep: &[usize]) -> EpistemicModel {
        let index = |w: usize| keep.iter().position(|&k| k == w);
        let access = self
            .access
            .iter()
            .map(|(a, rel)| {
                let r = rel
                    .iter()
                    .filter_map(|&(x, y)| Some((index(x)?, index(y)?)))
                    .collect();
                (a.clone(), r)
            })
            .collect();
        EpistemicModel {
            agents: self.agents.clone(),
            worlds: keep.iter().map(|&w| self.worlds[w].clone()).collect(),
            access,
            alphabet: self.alphabet.clone(),
            domain: self.domain.clone(),
            signature: self.signature.clone(),
            interpretations: keep.iter().map(|&w| self.interpretations[w].clone()).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NativeOp {
    ConcatRight,
    ConcatLeft,
}

/// A built-in update of a unary predicate by concatenation with a fixed
/// regular language, outside the first-order post-condition fragment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Native {
    pub op: NativeOp,
    pub with: String,
    pub language: Automaton,
}

impl Native {
    pub fn new(op: NativeOp, with: &str, alphabet: &Alphabet) -> Result<Self> {
        Ok(Native {
            op,
            with: with.to_string(),
            language: Automaton::from_regex(with, alphabet)?,
        })
    }

    fn apply(&self, current: &Automaton) -> Result<Automaton> {
        match self.op {
            NativeOp::ConcatRight => current.concat(&self.language),
            NativeOp::ConcatLeft => self.language.concat(current),
        }
    }
}

/// Events with preconditions and post-conditions. A predicate without an
/// explicit post-condition keeps its interpretation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionModel {
    pub events: Vec<String>,
    pub access: BTreeMap<String, Relation>,
    pub pre: Vec<Formula>,
    pub post: Vec<BTreeMap<String, Formula>>,
    pub native: BTreeMap<(usize, String), Native>,
}

/// Designated variables `x1..xk` of post-conditions.
pub fn post_vars(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("x{i}")).collect()
}

impl ActionModel {
    /// Events with the given preconditions, no post-conditions and reflexive
    /// access for every agent.
    pub fn reflexive(agents: &[String], events: Vec<(String, Formula)>) -> Self {
        let n = events.len();
        let refl: Relation = (0..n).map(|i| (i, i)).collect();
        let (names, pre) = events.into_iter().unzip();
        ActionModel {
            events: names,
            access: agents.iter().map(|a| (a.clone(), refl.clone())).collect(),
            pre,
            post: vec![BTreeMap::new(); n],
            native: BTreeMap::new(),
        }
    }

    pub fn event_index(&self, name: &str) -> Result<usize> {
        self.events
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| Error::Input(format!("unknown event `{name}`")))
    }

    pub fn relation(&self, agent: &str) -> Relation {
        self.access.get(agent).cloned().unwrap_or_default()
    }

    /// Well-formedness against a model's signature and agents.
    pub fn check(&self, signature: &Signature, agents: &[String]) -> Result<()> {
        let n = self.events.len();
        if n == 0 {
            return Err(Error::Input("action model has no events".into()));
        }
        distinct(&self.events, "event")?;
        if self.pre.len() != n || self.post.len() != n {
            return Err(Error::Input("one precondition and post-condition map per event expected".into()));
        }
        for (agent, rel) in &self.access {
            if !agents.contains(agent) {
                return Err(Error::Input(format!("unknown agent `{agent}`")));
            }
            check_relation(rel, n)?;
        }
        for (e, pre) in self.pre.iter().enumerate() {
            pre.check(signature)?;
            if let Some(v) = pre.free_vars().first() {
                return Err(Error::Input(format!(
                    "precondition of `{}` has free variable `{v}`",
                    self.events[e]
                )));
            }
        }
        for (e, posts) in self.post.iter().enumerate() {
            for (p, phi) in posts {
                let k = signature.arity(p).ok_or_else(|| Error::UnknownPredicate(p.clone()))?;
                phi.check(signature)?;
                let allowed = post_vars(k);
                if let Some(v) = phi.free_vars().into_iter().find(|v| !allowed.contains(v)) {
                    return Err(Error::Input(format!(
                        "post-condition of `{p}` at `{}` has free variable `{v}`",
                        self.events[e]
                    )));
                }
            }
        }
        for (e, p) in self.native.keys() {
            if *e >= n {
                return Err(Error::Input(format!("native update on unknown event {e}")));
            }
            match signature.arity(p) {
                Some(1) => {}
                Some(_) => return Err(Error::Input(format!("native update of non-unary `{p}`"))),
                None => return Err(Error::UnknownPredicate(p.clone())),
            }
        }
        Ok(())
    }

    /// The post-condition of `pred` at event `e`, identity when absent.
    pub fn post_formula(&self, e: usize, pred: &str, arity: usize) -> Formula {
        self.post[e]
            .get(pred)
            .cloned()
            .unwrap_or_else(|| Formula::atom(pred, &post_vars(arity)))
    }

    pub fn has_native(&self) -> bool {
        !self.native.is_empty()
    }

    /// Rejects modal preconditions and post-conditions.
    pub fn require_non_modal(&self) -> Result<()> {
        for (e, pre) in self.pre.iter().enumerate() {
            if pre.is_modal() {
                return Err(Error::Fragment(format!("precondition of `{}` is modal", self.events[e])));
            }
        }
        for (e, posts) in self.post.iter().enumerate() {
            if let Some((p, _)) = posts.iter().find(|(_, f)| f.is_modal()) {
                return Err(Error::Fragment(format!(
                    "post-condition of `{p}` at `{}` is modal",
                    self.events[e]
                )));
            }
        }
        Ok(())
    }

    pub fn posts_quantifier_free(&self) -> bool {
        self.post
            .iter()
            .all(|posts| posts.values().all(|f| f.classify().quantifier_free))
    }

    /// Interpretation after `e` in a structure, `None` when the
    /// precondition fails. Every resulting automaton is minimal.
    pub fn apply(
        &self,
        structure: &AutomaticPresentation,
        e: usize,
        options: CompileOptions,
    ) -> Result<Option<BTreeMap<String, Automaton>>> {
        let compiler = Compiler::new(structure, options)?;
        if !compiler.check_sentence(&self.pre[e])? {
            return Ok(None);
        }
        let mut out = BTreeMap::new();
        for (p, k) in structure.signature.iter() {
            let current = structure.relation(p)?;
            let next = if let Some(native) = self.native.get(&(e, p.to_string())) {
                native
                    .apply(current)?
                    .intersect_capped(&structure.domain, options.state_cap)?
            } else {
                match self.post[e].get(p) {
                    None => current.clone(),
                    Some(phi) => compiler.compile(phi, &post_vars(k))?,
                }
            };
            out.insert(p.to_string(), next.minimize_capped(options.state_cap)?);
        }
        Ok(Some(out))
    }
}

/// Product update, also returning the (world, event) pair behind each new
/// world.
pub fn product_update_traced(
    m: &EpistemicModel,
    a: &ActionModel,
) -> Result<(EpistemicModel, Vec<(usize, usize)>)> {
    a.check(&m.signature, &m.agents)?;
    a.require_non_modal()?;
    let options = CompileOptions::default();
    let mut pairs = Vec::new();
    let mut interps = Vec::new();
    for w in 0..m.worlds.len() {
        let structure = m.presentation(w)?;
        for e in 0..a.events.len() {
            if let Some(i) = a.apply(&structure, e, options)? {
                pairs.push((w, e));
                interps.push(i);
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::EmptyModel);
    }
    let index: BTreeMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut access = BTreeMap::new();
    for agent in &m.agents {
        let r = m.relation(agent);
        let q = a.relation(agent);
        let mut rel = Relation::new();
        for &(w1, w2) in &r {
            for &(e1, e2) in &q {
                if let (Some(&x), Some(&y)) = (index.get(&(w1, e1)), index.get(&(w2, e2))) {
                    rel.insert((x, y));
                }
            }
        }
        access.insert(agent.clone(), rel);
    }
    let worlds = pairs
        .iter()
        .map(|&(w, e)| format!("{}·{}", m.worlds[w], a.events[e]))
        .collect();
    let updated = EpistemicModel {
        agents: m.agents.clone(),
        worlds,
        access,
        alphabet: m.alphabet.clone(),
        domain: m.domain.clone(),
        signature: m.signature.clone(),
        interpretations: interps,
    };
    Ok((updated, pairs))
}

pub fn product_update(m: &EpistemicModel, a: &ActionModel) -> Result<EpistemicModel> {
    product_update_traced(m, a).map(|(u, _)| u)
}

pub fn iterate_update(m: &EpistemicModel, a: &ActionModel, n: usize) -> Result<EpistemicModel> {
    let mut cur = m.clone();
    for _ in 0..n {
        cur = product_update(&cur, a)?;
    }
    Ok(cur)
}

/// `n`-fold update, also returning each world's history as its original
/// world and event sequence.
pub fn iterate_update_traced(
    m: &EpistemicModel,
    a: &ActionModel,
    n: usize,
) -> Result<(EpistemicModel, Vec<(usize, Vec<usize>)>)> {
    let mut cur = m.clone();
    let mut hist: Vec<(usize, Vec<usize>)> = (0..m.worlds.len()).map(|w| (w, vec![])).collect();
    for _ in 0..n {
        let (next, pairs) = product_update_traced(&cur, a)?;
        hist = pairs
            .iter()
            .map(|&(w, e)| {
                let (origin, mut events) = hist[w].clone();
                events.push(e);
                (origin, events)
            })
            .collect();
        cur = next;
    }
    Ok((cur, hist))
}

/// Letters naming `n` worlds, avoiding the domain alphabet.
pub fn world_letters(n: usize, alphabet: &Alphabet) -> Vec<String> {
    let mut prefix = "w".to_string();
    loop {
        let letters: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
        if letters.iter().all(|l| alphabet.symbol(l).is_none() && l != SEPARATOR) {
            return letters;
        }
        prefix.insert(0, '@');
    }
}

/// The history structure of `m` restricted to histories of length zero:
/// elements are world letters `w` and words `w#u` for domain words `u`.
pub fn model_presentation(m: &EpistemicModel, letters: &[String]) -> Result<AutomaticPresentation> {
    if letters.len() != m.worlds.len() {
        return Err(Error::Input("one letter per world expected".into()));
    }
    let alphabet = Prefixes::alphabet(&m.alphabet, letters)?;
    let syms: Vec<Sym> = letters.iter().map(|l| alphabet.symbol(l).unwrap()).collect();
    let n = m.worlds.len();
    let mut trans = vec![syms.iter().enumerate().map(|(i, &s)| (s, i + 1)).collect()];
    trans.extend(std::iter::repeat_n(Vec::new(), n));
    let mut class = vec![None];
    class.extend((0..n).map(Some));
    let prefixes = Prefixes {
        alphabet: alphabet.clone(),
        initial: 0,
        trans,
        class,
        cap: crate::automata::DEFAULT_STATE_CAP,
    };
    let mut relations = BTreeMap::new();
    let mut accessible = HashSet::new();
    for agent in &m.agents {
        let pairs: HashSet<(Sym, Sym)> = m.relation(agent).iter().map(|&(a, b)| (syms[a], syms[b])).collect();
        relations.insert(history_names::ep(agent), prefixes.letterwise(&pairs)?);
        accessible.extend(pairs);
    }
    for (p, k) in m.signature.iter() {
        let per_world: Vec<Automaton> = m.interpretations.iter().map(|i| i[p].clone()).collect();
        relations.insert(history_names::hat(p), prefixes.with_prefix(k, &per_world)?);
    }
    for (w, name) in m.worlds.iter().enumerate() {
        relations.insert(history_names::from(name), prefixes.starting_with(syms[w])?);
    }
    let doms = vec![m.domain.clone(); n];
    relations.insert(history_names::DOM.to_string(), prefixes.with_prefix(1, &doms)?);
    relations.insert(history_names::SAME.to_string(), prefixes.same_element(&m.domain, &accessible)?);
    let signature = HistorySignature {
        base: m.signature.clone(),
        agents: m.agents.clone(),
        worlds: m.worlds.clone(),
    }
    .signature();
    AutomaticPresentation::new(signature, alphabet, prefixes.universe(&m.domain)?, relations)
}

/// A variable named after `base` that does not occur in `phi`.
pub(crate) fn fresh_var(base: &str, phi: &Formula) -> String {
    let used = phi.all_vars();
    let mut y = base.to_string();
    while used.contains(&y) {
        y.push('\'');
    }
    y
}

/// Whether `m, world ⊨ φ` under an assignment of domain words to the free
/// variables of `φ`.
pub fn eval_foel(
    m: &EpistemicModel,
    world: usize,
    phi: &Formula,
    assignment: &BTreeMap<String, Word>,
) -> Result<bool> {
    phi.check(&m.signature)?;
    let free = phi.free_vars();
    let mut values = Vec::new();
    for v in &free {
        let word = assignment
            .get(v)
            .ok_or_else(|| Error::Input(format!("no value for `{v}`")))?;
        if !m.domain.accepts(std::slice::from_ref(word))? {
            return Err(Error::Input(format!(
                "`{}` is not a domain word",
                m.alphabet.format_word(word)
            )));
        }
        values.push(word.clone());
    }
    let keep = m.reachable(world);
    let sub = m.restrict(&keep);
    let at = keep.iter().position(|&w| w == world).unwrap();
    let letters = world_letters(sub.worlds.len(), &m.alphabet);
    let structure = model_presentation(&sub, &letters)?;
    let y = fresh_var("y", phi);
    let st = standard_translation(phi, &y)?;
    let mut vars = vec![y];
    vars.extend(free);
    let relation = structure.compile(&st, &vars)?;
    let w = structure.alphabet.symbol(&letters[at]).unwrap();
    let sep = structure.alphabet.symbol(SEPARATOR).unwrap();
    let mut tuple = vec![vec![w]];
    for d in values {
        // domain letters keep their symbols in the combined alphabet
        let mut word = vec![w, sep];
        word.extend(d);
        tuple.push(word);
    }
    relation.accepts(&tuple)
}

/// For a closed formula, the worlds where it holds.
pub fn satisfying_worlds(m: &EpistemicModel, phi: &Formula) -> Result<Vec<bool>> {
    phi.check(&m.signature)?;
    if let Some(v) = phi.free_vars().first() {
        return Err(Error::Input(format!("`{phi}` has free variable `{v}`")));
    }
    let letters = world_letters(m.worlds.len(), &m.alphabet);
    let structure = model_presentation(m, &letters)?;
    let y = fresh_var("y", phi);
    let relation = structure.compile(&standard_translation(phi, &y)?, &[y])?;
    letters
        .iter()
        .map(|l| relation.accepts(&[vec![structure.alphabet.symbol(l).unwrap()]]))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelJson {
    pub agents: Vec<String>,
    pub worlds: Vec<String>,
    pub access: BTreeMap<String, Vec<(String, String)>>,
    pub alphabet: Vec<String>,
    pub domain: AutomatonSpec,
    pub signature: Signature,
    #[serde(default)]
    pub interpretations: BTreeMap<String, BTreeMap<String, AutomatonSpec>>,
}

fn named_pairs(rel: &Relation, names: &[String]) -> Vec<(String, String)> {
    rel.iter().map(|&(a, b)| (names[a].clone(), names[b].clone())).collect()
}

fn indexed_pairs(pairs: &[(String, String)], names: &[String]) -> Result<Relation> {
    let idx = |n: &String| {
        names
            .iter()
            .position(|x| x == n)
            .ok_or_else(|| Error::Input(format!("unknown name `{n}`")))
    };
    pairs.iter().map(|(a, b)| Ok((idx(a)?, idx(b)?))).collect()
}

impl ModelJson {
    /// Missing interpretations are empty.
    pub fn to_model(&self) -> Result<EpistemicModel> {
        self.signature.validate()?;
        let alphabet = Alphabet::new(self.alphabet.iter().cloned())?;
        let domain = self.domain.resolve(&alphabet, 1)?;
        if let Some(w) = self.interpretations.keys().find(|w| !self.worlds.contains(w)) {
            return Err(Error::Input(format!("interpretation for unknown world `{w}`")));
        }
        let mut interps = Vec::new();
        for w in &self.worlds {
            let given = self.interpretations.get(w);
            let mut map = BTreeMap::new();
            for (p, k) in self.signature.iter() {
                let a = match given.and_then(|g| g.get(p)) {
                    Some(spec) => spec.resolve(&alphabet, k)?,
                    None => Automaton::empty(&alphabet, k),
                };
                map.insert(p.to_string(), a);
            }
            if let Some(p) = given.and_then(|g| g.keys().find(|p| self.signature.arity(p).is_none())) {
                return Err(Error::UnknownPredicate(p.clone()));
            }
            interps.push(map);
        }
        let access = self
            .access
            .iter()
            .map(|(a, pairs)| Ok((a.clone(), indexed_pairs(pairs, &self.worlds)?)))
            .collect::<Result<_>>()?;
        EpistemicModel::new(
            self.agents.clone(),
            self.worlds.clone(),
            access,
            alphabet,
            domain,
            self.signature.clone(),
            interps,
        )
    }
}

impl From<&EpistemicModel> for ModelJson {
    fn from(m: &EpistemicModel) -> Self {
        ModelJson {
            agents: m.agents.clone(),
            worlds: m.worlds.clone(),
            access: m
                .access
                .iter()
                .map(|(a, r)| (a.clone(), named_pairs(r, &m.worlds)))
                .collect(),
            alphabet: m.alphabet.letters().to_vec(),
            domain: (&m.domain).into(),
            signature: m.signature.clone(),
            interpretations: m
                .worlds
                .iter()
                .zip(&m.interpretations)
                .map(|(w, i)| (w.clone(), i.iter().map(|(p, a)| (p.clone(), a.into())).collect()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NativeJson {
    pub op: NativeOp,
    pub with: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionJson {
    pub events: Vec<String>,
    pub access: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    pub pre: BTreeMap<String, String>,
    #[serde(default)]
    pub post: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub native: BTreeMap<String, BTreeMap<String, NativeJson>>,
}

impl ActionJson {
    /// Resolves formulas and native languages against a model. Missing
    /// preconditions are `true`.
    pub fn to_action(&self, model: &EpistemicModel) -> Result<ActionModel> {
        let sig = &model.signature;
        let event = |e: &String| {
            self.events
                .iter()
                .position(|x| x == e)
                .ok_or_else(|| Error::Input(format!("unknown event `{e}`")))
        };
        let mut pre = vec![Formula::True; self.events.len()];
        for (e, text) in &self.pre {
            pre[event(e)?] = parse_formula(text, sig)?;
        }
        let mut post = vec![BTreeMap::new(); self.events.len()];
        for (e, posts) in &self.post {
            let i = event(e)?;
            for (p, text) in posts {
                post[i].insert(p.clone(), parse_formula(text, sig)?);
            }
        }
        let mut native = BTreeMap::new();
        for (e, natives) in &self.native {
            let i = event(e)?;
            for (p, n) in natives {
                native.insert((i, p.clone()), Native::new(n.op, &n.with, &model.alphabet)?);
            }
        }
        let access = self
            .access
            .iter()
            .map(|(a, pairs)| Ok((a.clone(), indexed_pairs(pairs, &self.events)?)))
            .collect::<Result<_>>()?;
        let a = ActionModel {
            events: self.events.clone(),
            access,
            pre,
            post,
            native,
        };
        a.check(sig, &model.agents)?;
        Ok(a)
    }
}

impl From<&ActionModel> for ActionJson {
    fn from(a: &ActionModel) -> Self {
        let mut native: BTreeMap<String, BTreeMap<String, NativeJson>> = BTreeMap::new();
        for ((e, p), n) in &a.native {
            native.entry(a.events[*e].clone()).or_default().insert(
                p.clone(),
                NativeJson {
                    op: n.op,
                    with: n.with.clone(),
                },
            );
        }
        ActionJson {
            events: a.events.clone(),
            access: a
                .access
                .iter()
                .map(|(ag, r)| (ag.clone(), named_pairs(r, &a.events)))
                .collect(),
            pre: a
                .events
                .iter()
                .zip(&a.pre)
                .map(|(e, f)| (e.clone(), f.to_string()))
                .collect(),
            post: a
                .events
                .iter()
                .zip(&a.post)
                .filter(|(_, p)| !p.is_empty())
                .map(|(e, p)| (e.clone(), p.iter().map(|(n, f)| (n.clone(), f.to_string())).collect()))
                .collect(),
            native,
        }
    }
}
