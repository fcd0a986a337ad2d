//! Finite automata over k-track padded alphabets.
//!
//! A k-track automaton reads the *convolution* of a k-tuple of words: the
//! words are written one above the other, shorter ones padded at the end with
//! the reserved symbol `_`, and the automaton consumes one column per step.
//! Every automaton built by this module accepts only valid convolutions (on
//! each track, once the pad appears it continues until the end, and no column
//! is entirely pad).

mod json;
mod ops;
mod regex;

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

pub use json::{AutomatonJson, AutomatonSpec};
pub use ops::Connective;

/// Index of a state inside an [`Automaton`].
pub type StateId = u32;
/// A symbol of a track: `0` is the pad, letters are numbered from `1`.
pub type Sym = u16;
/// A word over an alphabet, as letter symbols (never containing the pad).
pub type Word = Vec<Sym>;
/// A column of a convolution, encoded in mixed radix `letters + 1`.
pub type Label = u64;

/// The reserved pad symbol.
pub const PAD: &str = "_";
pub(crate) const PAD_SYM: Sym = 0;

/// Default bound on the number of states produced by a single construction.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

struct AlphabetInner {
    letters: Vec<String>,
    index: HashMap<String, Sym>,
}

/// A finite ordered set of letters. The order fixes the order of labels and
/// therefore canonical forms and witnesses.
#[derive(Clone)]
pub struct Alphabet {
    inner: Arc<AlphabetInner>,
}

impl Alphabet {
    pub fn new<I, S>(letters: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let letters: Vec<String> = letters.into_iter().map(Into::into).collect();
        let mut index = HashMap::new();
        for (i, l) in letters.iter().enumerate() {
            if l.is_empty() {
                return Err(Error::Input("empty letter in alphabet".into()));
            }
            if l == PAD {
                return Err(Error::Input("the pad symbol `_` cannot be a letter".into()));
            }
            if l.contains('·') {
                return Err(Error::Input(format!("letter `{l}` contains the separator `·`")));
            }
            if index.insert(l.clone(), (i + 1) as Sym).is_some() {
                return Err(Error::Input(format!("duplicate letter `{l}`")));
            }
        }
        if letters.len() >= Sym::MAX as usize {
            return Err(Error::Input("alphabet too large".into()));
        }
        Ok(Alphabet {
            inner: Arc::new(AlphabetInner { letters, index }),
        })
    }

    pub fn letters(&self) -> &[String] {
        &self.inner.letters
    }

    pub fn len(&self) -> usize {
        self.inner.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.letters.is_empty()
    }

    /// Symbol of a letter, if it belongs to the alphabet.
    pub fn symbol(&self, letter: &str) -> Option<Sym> {
        self.inner.index.get(letter).copied()
    }

    /// Letter of a symbol; the pad symbol prints as `_`.
    pub fn letter(&self, sym: Sym) -> &str {
        if sym == PAD_SYM {
            PAD
        } else {
            &self.inner.letters[sym as usize - 1]
        }
    }

    pub(crate) fn base(&self) -> u64 {
        self.len() as u64 + 1
    }

    /// Alphabet containing the letters of `self` followed by the new letters
    /// of `other`.
    pub fn union(&self, other: &Alphabet) -> Alphabet {
        let mut letters = self.letters().to_vec();
        for l in other.letters() {
            if self.symbol(l).is_none() {
                letters.push(l.clone());
            }
        }
        Alphabet::new(letters).expect("union of valid alphabets")
    }

    fn single_char(&self) -> bool {
        self.letters().iter().all(|l| l.chars().count() == 1)
    }

    /// Splits text into letters by greedy longest match. `·` may be used to
    /// separate letters and is otherwise ignored.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut out = Vec::new();
        let mut rest = text;
        let max_len = self.letters().iter().map(|l| l.len()).max().unwrap_or(0);
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix('·') {
                rest = r;
                continue;
            }
            let mut found = None;
            let mut len = max_len.min(rest.len());
            while len > 0 {
                if rest.is_char_boundary(len) {
                    if let Some(s) = self.symbol(&rest[..len]) {
                        found = Some((s, len));
                        break;
                    }
                }
                len -= 1;
            }
            match found {
                Some((s, len)) => {
                    out.push(s);
                    rest = &rest[len..];
                }
                None => {
                    let c = rest.chars().next().unwrap();
                    return Err(Error::UnknownLetter(c.to_string()));
                }
            }
        }
        Ok(out)
    }

    /// Inverse of [`Alphabet::parse_word`]; letters are joined with `·`
    /// when some letter is longer than one character.
    pub fn format_word(&self, word: &[Sym]) -> String {
        let sep = if self.single_char() { "" } else { "·" };
        word.iter()
            .map(|&s| self.letter(s))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.letters == other.inner.letters
    }
}

impl Eq for Alphabet {}

impl Hash for Alphabet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.inner.letters.hash(state)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.letters()).finish()
    }
}

/// Mixed-radix encoding of k-track columns. Track 0 is the most significant
/// digit, so numeric order on labels is lexicographic order on columns.
#[derive(Clone, Debug)]
pub(crate) struct Codec {
    base: u64,
    pow: Vec<u64>,
}

impl Codec {
    pub(crate) fn new(alphabet: &Alphabet, tracks: usize) -> Result<Self> {
        let base = alphabet.base();
        let mut pow = vec![1u64; tracks];
        for i in (0..tracks.saturating_sub(1)).rev() {
            pow[i] = pow[i + 1]
                .checked_mul(base)
                .ok_or_else(|| Error::Input(format!("{tracks} tracks exceed label width")))?;
        }
        if tracks > 0 {
            pow[0]
                .checked_mul(base)
                .ok_or_else(|| Error::Input(format!("{tracks} tracks exceed label width")))?;
        }
        Ok(Codec { base, pow })
    }

    pub(crate) fn tracks(&self) -> usize {
        self.pow.len()
    }

    /// Number of distinct labels including the forbidden all-pad label 0.
    pub(crate) fn label_count(&self) -> u64 {
        if self.pow.is_empty() {
            1
        } else {
            self.pow[0] * self.base
        }
    }

    pub(crate) fn sym(&self, label: Label, track: usize) -> Sym {
        ((label / self.pow[track]) % self.base) as Sym
    }

    pub(crate) fn encode(&self, syms: &[Sym]) -> Label {
        syms.iter()
            .zip(&self.pow)
            .map(|(&s, &p)| s as u64 * p)
            .sum()
    }

    pub(crate) fn decode(&self, label: Label) -> Vec<Sym> {
        (0..self.tracks()).map(|t| self.sym(label, t)).collect()
    }
}

/// A nondeterministic finite automaton over k-track columns.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Automaton {
    tracks: usize,
    alphabet: Alphabet,
    initial: Vec<StateId>,
    accepting: Vec<bool>,
    /// Per state, outgoing transitions sorted by label.
    transitions: Vec<Vec<(Label, StateId)>>,
    deterministic: bool,
}

impl fmt::Debug for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Automaton")
            .field("tracks", &self.tracks)
            .field("alphabet", &self.alphabet)
            .field("states", &self.num_states())
            .field("initial", &self.initial)
            .field("deterministic", &self.deterministic)
            .finish()
    }
}

impl Automaton {
    /// Builds an automaton from explicit parts. Labels are columns of
    /// symbols with `0` as the pad.
    pub fn from_parts(
        tracks: usize,
        alphabet: Alphabet,
        num_states: usize,
        initial: Vec<StateId>,
        accepting: Vec<StateId>,
        transitions: Vec<(StateId, Vec<Sym>, StateId)>,
    ) -> Result<Self> {
        let codec = Codec::new(&alphabet, tracks)?;
        let check = |s: StateId| {
            if (s as usize) < num_states {
                Ok(())
            } else {
                Err(Error::Input(format!("state {s} out of range")))
            }
        };
        let mut acc = vec![false; num_states];
        for &s in &accepting {
            check(s)?;
            acc[s as usize] = true;
        }
        for &s in &initial {
            check(s)?;
        }
        let mut trans = vec![Vec::new(); num_states];
        for (src, syms, dst) in transitions {
            check(src)?;
            check(dst)?;
            if syms.len() != tracks {
                return Err(Error::TrackMismatch(syms.len(), tracks));
            }
            if syms.iter().any(|&s| s as usize > alphabet.len()) {
                return Err(Error::Input("symbol out of range".into()));
            }
            if syms.iter().all(|&s| s == PAD_SYM) {
                return Err(Error::Input("the all-pad column cannot label a transition".into()));
            }
            trans[src as usize].push((codec.encode(&syms), dst));
        }
        let mut initial = initial;
        initial.sort_unstable();
        initial.dedup();
        Ok(Self::assemble(tracks, alphabet, initial, acc, trans))
    }

    pub(crate) fn assemble(
        tracks: usize,
        alphabet: Alphabet,
        initial: Vec<StateId>,
        accepting: Vec<bool>,
        mut transitions: Vec<Vec<(Label, StateId)>>,
    ) -> Self {
        let mut deterministic = initial.len() <= 1;
        for t in transitions.iter_mut() {
            t.sort_unstable();
            t.dedup();
            if deterministic && t.windows(2).any(|w| w[0].0 == w[1].0) {
                deterministic = false;
            }
        }
        Automaton {
            tracks,
            alphabet,
            initial,
            accepting,
            transitions,
            deterministic,
        }
    }

    /// The empty language over `tracks` tracks.
    pub fn empty(alphabet: &Alphabet, tracks: usize) -> Self {
        Self::assemble(tracks, alphabet.clone(), vec![], vec![], vec![])
    }

    /// The language containing only the tuple of empty words.
    pub fn epsilon(alphabet: &Alphabet, tracks: usize) -> Self {
        Self::assemble(tracks, alphabet.clone(), vec![0], vec![true], vec![vec![]])
    }

    /// All valid convolutions of `tracks` words over the alphabet.
    pub fn universal(alphabet: &Alphabet, tracks: usize) -> Self {
        let sigma_star = Self::sigma_star(alphabet);
        ops::domain_power(&sigma_star, tracks, DEFAULT_STATE_CAP)
            .expect("universal automaton has at most 2^k states")
    }

    pub(crate) fn sigma_star(alphabet: &Alphabet) -> Self {
        let loops = (1..=alphabet.len() as Label).map(|l| (l, 0)).collect();
        Self::assemble(1, alphabet.clone(), vec![0], vec![true], vec![loops])
    }

    /// A finite set of tuples, each given as parsed words.
    pub fn from_tuples<'a, I>(alphabet: &Alphabet, tracks: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [Word]>,
    {
        let codec = Codec::new(alphabet, tracks)?;
        let mut trans: Vec<Vec<(Label, StateId)>> = vec![vec![]];
        let mut accepting = vec![false];
        let mut trie: HashMap<(StateId, Label), StateId> = HashMap::new();
        for tuple in tuples {
            if tuple.len() != tracks {
                return Err(Error::TrackMismatch(tuple.len(), tracks));
            }
            let mut state = 0;
            for label in convolve(&codec, tuple) {
                state = *trie.entry((state, label)).or_insert_with(|| {
                    trans.push(vec![]);
                    accepting.push(false);
                    let id = (trans.len() - 1) as StateId;
                    trans[state as usize].push((label, id));
                    id
                });
            }
            accepting[state as usize] = true;
        }
        Ok(Self::assemble(tracks, alphabet.clone(), vec![0], accepting, trans).trim())
    }

    /// Parses each component with [`Alphabet::parse_word`] and builds the
    /// finite relation.
    pub fn from_str_tuples(alphabet: &Alphabet, tuples: &[Vec<&str>]) -> Result<Self> {
        let tracks = tuples.first().map_or(1, |t| t.len());
        let parsed: Vec<Vec<Word>> = tuples
            .iter()
            .map(|t| t.iter().map(|w| alphabet.parse_word(w)).collect())
            .collect::<Result<_>>()?;
        Self::from_tuples(alphabet, tracks, parsed.iter().map(|v| v.as_slice()))
    }

    pub fn tracks(&self) -> usize {
        self.tracks
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn is_accepting(&self, state: StateId) -> bool {
        self.accepting[state as usize]
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.iter().map(Vec::len).sum()
    }

    pub(crate) fn codec(&self) -> Codec {
        Codec::new(&self.alphabet, self.tracks).expect("codec validated at construction")
    }

    pub(crate) fn out(&self, state: StateId) -> &[(Label, StateId)] {
        &self.transitions[state as usize]
    }

    /// Transitions as `(source, column, target)` triples.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, Vec<Sym>, StateId)> + '_ {
        let codec = self.codec();
        self.transitions.iter().enumerate().flat_map(move |(s, ts)| {
            let codec = codec.clone();
            ts.iter()
                .map(move |&(l, t)| (s as StateId, codec.decode(l), t))
        })
    }

    fn check_tuple(&self, words: &[Word]) -> Result<()> {
        if words.len() != self.tracks {
            return Err(Error::TrackMismatch(words.len(), self.tracks));
        }
        for w in words {
            if w.iter().any(|&s| s == PAD_SYM || s as usize > self.alphabet.len()) {
                return Err(Error::UnknownLetter("<symbol out of range>".into()));
            }
        }
        Ok(())
    }

    /// Membership of a tuple of words.
    pub fn accepts(&self, words: &[Word]) -> Result<bool> {
        self.check_tuple(words)?;
        let codec = self.codec();
        let mut current: Vec<StateId> = self.initial.clone();
        for label in convolve(&codec, words) {
            let mut next = Vec::new();
            for &s in &current {
                next.extend(step(self.out(s), label));
            }
            next.sort_unstable();
            next.dedup();
            if next.is_empty() {
                return Ok(false);
            }
            current = next;
        }
        Ok(current.iter().any(|&s| self.is_accepting(s)))
    }

    /// Membership of a tuple given as text, parsed with the alphabet.
    pub fn accepts_str(&self, words: &[&str]) -> Result<bool> {
        let parsed = words
            .iter()
            .map(|w| self.alphabet.parse_word(w))
            .collect::<Result<Vec<_>>>()?;
        self.accepts(&parsed)
    }

    pub fn is_empty(&self) -> bool {
        self.shortest_witness().is_none()
    }

    /// The length-lexicographically least accepted tuple, if any.
    pub fn shortest_witness(&self) -> Option<Vec<Word>> {
        let codec = self.codec();
        let mut seen: HashMap<Vec<StateId>, usize> = HashMap::new();
        let mut nodes: Vec<(Vec<StateId>, Option<(usize, Label)>)> = Vec::new();
        let start = self.initial.clone();
        if start.is_empty() {
            return None;
        }
        seen.insert(start.clone(), 0);
        nodes.push((start, None));
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let set = nodes[i].0.clone();
            if set.iter().any(|&s| self.is_accepting(s)) {
                let mut labels = Vec::new();
                let mut cur = i;
                while let Some((p, l)) = nodes[cur].1 {
                    labels.push(l);
                    cur = p;
                }
                labels.reverse();
                return Some(deconvolve(&codec, &labels));
            }
            for (label, succ) in subset_successors(self, &set) {
                if !seen.contains_key(&succ) {
                    seen.insert(succ.clone(), nodes.len());
                    nodes.push((succ, Some((i, label))));
                    queue.push_back(nodes.len() - 1);
                }
            }
        }
        None
    }

    /// All accepted tuples whose convolution has length at most `max_len`,
    /// in length-lexicographic order.
    pub fn enumerate_upto(&self, max_len: usize) -> Vec<Vec<Word>> {
        let codec = self.codec();
        let mut found: Vec<Vec<Label>> = Vec::new();
        let mut layer: Vec<(Vec<StateId>, Vec<Label>)> = Vec::new();
        if !self.initial.is_empty() {
            layer.push((self.initial.clone(), vec![]));
        }
        for depth in 0..=max_len {
            let mut next = Vec::new();
            for (set, path) in &layer {
                if set.iter().any(|&s| self.is_accepting(s)) {
                    found.push(path.clone());
                }
                if depth < max_len {
                    for (label, succ) in subset_successors(self, set) {
                        let mut p = path.clone();
                        p.push(label);
                        next.push((succ, p));
                    }
                }
            }
            layer = next;
        }
        found.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        found.iter().map(|p| deconvolve(&codec, p)).collect()
    }

    /// [`Automaton::enumerate_upto`] with words rendered as text.
    pub fn enumerate_strings(&self, max_len: usize) -> Vec<Vec<String>> {
        self.enumerate_upto(max_len)
            .iter()
            .map(|t| t.iter().map(|w| self.alphabet.format_word(w)).collect())
            .collect()
    }

    /// Whether the language has no cycles through useful states.
    pub fn is_finite(&self) -> bool {
        let t = self.trim();
        let n = t.num_states();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut color = vec![0u8; n];
        for start in 0..n {
            if color[start] != 0 {
                continue;
            }
            let mut stack = vec![(start as StateId, 0usize)];
            color[start] = 1;
            while let Some(&mut (s, ref mut i)) = stack.last_mut() {
                let out = t.out(s);
                if *i < out.len() {
                    let next = out[*i].1;
                    *i += 1;
                    match color[next as usize] {
                        0 => {
                            color[next as usize] = 1;
                            stack.push((next, 0));
                        }
                        1 => return false,
                        _ => {}
                    }
                } else {
                    color[s as usize] = 2;
                    stack.pop();
                }
            }
        }
        true
    }

    /// Removes states that are unreachable or cannot reach acceptance.
    pub fn trim(&self) -> Automaton {
        let n = self.num_states();
        let mut fwd = vec![false; n];
        let mut stack: Vec<StateId> = self.initial.clone();
        for &s in &stack {
            fwd[s as usize] = true;
        }
        while let Some(s) = stack.pop() {
            for &(_, t) in self.out(s) {
                if !fwd[t as usize] {
                    fwd[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        let mut rev: Vec<Vec<StateId>> = vec![vec![]; n];
        for (s, ts) in self.transitions.iter().enumerate() {
            for &(_, t) in ts {
                rev[t as usize].push(s as StateId);
            }
        }
        let mut bwd = vec![false; n];
        let mut stack: Vec<StateId> = (0..n as StateId).filter(|&s| self.is_accepting(s)).collect();
        for &s in &stack {
            bwd[s as usize] = true;
        }
        while let Some(s) = stack.pop() {
            for &p in &rev[s as usize] {
                if !bwd[p as usize] {
                    bwd[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        let mut map = vec![None; n];
        let mut count = 0;
        for s in 0..n {
            if fwd[s] && bwd[s] {
                map[s] = Some(count as StateId);
                count += 1;
            }
        }
        let mut accepting = vec![false; count];
        let mut trans = vec![Vec::new(); count];
        for s in 0..n {
            if let Some(ns) = map[s] {
                accepting[ns as usize] = self.accepting[s];
                trans[ns as usize] = self.transitions[s]
                    .iter()
                    .filter_map(|&(l, t)| map[t as usize].map(|nt| (l, nt)))
                    .collect();
            }
        }
        let initial = self.initial.iter().filter_map(|&s| map[s as usize]).collect();
        Self::assemble(self.tracks, self.alphabet.clone(), initial, accepting, trans)
    }

    /// Re-expresses the automaton over another alphabet, matching letters by
    /// name. Transitions using letters absent from `target` are dropped.
    pub fn with_alphabet(&self, target: &Alphabet) -> Result<Automaton> {
        if *target == self.alphabet {
            return Ok(self.clone());
        }
        let from = self.codec();
        let to = Codec::new(target, self.tracks)?;
        let map: Vec<Option<Sym>> = std::iter::once(Some(PAD_SYM))
            .chain(self.alphabet.letters().iter().map(|l| target.symbol(l)))
            .collect();
        let trans = self
            .transitions
            .iter()
            .map(|ts| {
                ts.iter()
                    .filter_map(|&(l, t)| {
                        let syms: Option<Vec<Sym>> =
                            from.decode(l).iter().map(|&s| map[s as usize]).collect();
                        syms.map(|s| (to.encode(&s), t))
                    })
                    .collect()
            })
            .collect();
        Ok(Self::assemble(
            self.tracks,
            target.clone(),
            self.initial.clone(),
            self.accepting.clone(),
            trans,
        ))
    }
}

pub(crate) fn step(out: &[(Label, StateId)], label: Label) -> impl Iterator<Item = StateId> + '_ {
    let start = out.partition_point(|&(l, _)| l < label);
    out[start..]
        .iter()
        .take_while(move |&&(l, _)| l == label)
        .map(|&(_, t)| t)
}

/// Successor subsets of a state set, grouped by label in ascending order.
pub(crate) fn subset_successors(a: &Automaton, set: &[StateId]) -> Vec<(Label, Vec<StateId>)> {
    let mut all: Vec<(Label, StateId)> = set.iter().flat_map(|&s| a.out(s).iter().copied()).collect();
    all.sort_unstable();
    all.dedup();
    let mut out: Vec<(Label, Vec<StateId>)> = Vec::new();
    for (l, t) in all {
        match out.last_mut() {
            Some((last, ts)) if *last == l => ts.push(t),
            _ => out.push((l, vec![t])),
        }
    }
    out
}

pub(crate) fn convolve(codec: &Codec, words: &[Word]) -> Vec<Label> {
    let len = words.iter().map(Vec::len).max().unwrap_or(0);
    (0..len)
        .map(|i| {
            let col: Vec<Sym> = words
                .iter()
                .map(|w| w.get(i).copied().unwrap_or(PAD_SYM))
                .collect();
            codec.encode(&col)
        })
        .collect()
}

pub(crate) fn deconvolve(codec: &Codec, labels: &[Label]) -> Vec<Word> {
    (0..codec.tracks())
        .map(|t| {
            labels
                .iter()
                .map(|&l| codec.sym(l, t))
                .filter(|&s| s != PAD_SYM)
                .collect()
        })
        .collect()
}

/// Worklist construction of an automaton whose states are values of `S`.
/// `expand` pushes the outgoing transitions of a state and reports whether it
/// accepts.
pub(crate) fn explore<S, F>(
    tracks: usize,
    alphabet: &Alphabet,
    init: Vec<S>,
    cap: usize,
    mut expand: F,
) -> Result<Automaton>
where
    S: Clone + Eq + Hash,
    F: FnMut(&S, &mut Vec<(Label, S)>) -> Result<bool>,
{
    let mut ids: HashMap<S, StateId> = HashMap::new();
    let mut states: Vec<S> = Vec::new();
    let mut initial = Vec::new();
    for s in init {
        let id = *ids.entry(s.clone()).or_insert_with(|| {
            states.push(s);
            (states.len() - 1) as StateId
        });
        initial.push(id);
    }
    initial.sort_unstable();
    initial.dedup();
    let mut accepting = Vec::new();
    let mut trans = Vec::new();
    let mut buf = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let s = states[i].clone();
        buf.clear();
        let acc = expand(&s, &mut buf)?;
        let mut out = Vec::with_capacity(buf.len());
        for (label, t) in buf.drain(..) {
            let id = match ids.get(&t) {
                Some(&id) => id,
                None => {
                    if states.len() >= cap {
                        return Err(Error::StateCap(cap));
                    }
                    states.push(t.clone());
                    let id = (states.len() - 1) as StateId;
                    ids.insert(t, id);
                    id
                }
            };
            out.push((label, id));
        }
        accepting.push(acc);
        trans.push(out);
        i += 1;
    }
    Ok(Automaton::assemble(tracks, alphabet.clone(), initial, accepting, trans))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn alphabet_rejects_pad_and_duplicates() {
        assert!(Alphabet::new(["a", "_"]).is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new([""]).is_err());
    }

    #[test]
    fn multi_char_letters_round_trip() {
        let al = Alphabet::new(["s", "U0", "U1", "a"]).unwrap();
        let w = al.parse_word("s·U0·U1·a").unwrap();
        assert_eq!(w, vec![1, 2, 3, 4]);
        assert_eq!(al.format_word(&w), "s·U0·U1·a");
        assert_eq!(al.parse_word("sU0a").unwrap(), vec![1, 2, 4]);
        assert!(matches!(al.parse_word("sx"), Err(Error::UnknownLetter(_))));
    }

    #[test]
    fn codec_orders_pad_first() {
        let c = Codec::new(&ab(), 2).unwrap();
        assert_eq!(c.encode(&[1, 2]), 5);
        assert_eq!(c.decode(5), vec![1, 2]);
        assert!(c.encode(&[0, 2]) < c.encode(&[1, 0]));
        assert_eq!(c.label_count(), 9);
    }

    #[test]
    fn finite_tuples_and_membership() {
        let al = ab();
        let r = Automaton::from_str_tuples(&al, &[vec!["ab", "ab"], vec!["a", ""]]).unwrap();
        assert!(r.accepts_str(&["ab", "ab"]).unwrap());
        assert!(r.accepts_str(&["a", ""]).unwrap());
        assert!(!r.accepts_str(&["ab", "a"]).unwrap());
        assert!(r.is_finite());
        assert_eq!(r.enumerate_strings(5).len(), 2);
    }

    #[test]
    fn foreign_letters_are_errors() {
        let r = Automaton::universal(&ab(), 1);
        assert!(matches!(r.accepts_str(&["ac"]), Err(Error::UnknownLetter(_))));
        assert!(matches!(r.accepts(&[vec![], vec![]]), Err(Error::TrackMismatch(2, 1))));
    }

    #[test]
    fn universal_two_tracks_is_valid_convolutions() {
        let u = Automaton::universal(&ab(), 2);
        // pairs of words with max length <= 1: (e,e) (e,a) (e,b) (a,e) ... 1 + 8
        assert_eq!(u.enumerate_upto(1).len(), 9);
        assert!(u.accepts_str(&["ab", ""]).unwrap());
        assert!(!u.is_finite());
    }

    #[test]
    fn from_parts_rejects_all_pad_columns() {
        let r = Automaton::from_parts(2, ab(), 1, vec![0], vec![0], vec![(0, vec![0, 0], 0)]);
        assert!(r.is_err());
    }

    #[test]
    fn zero_tracks() {
        let t = Automaton::epsilon(&ab(), 0);
        assert!(t.accepts(&[]).unwrap());
        assert!(!Automaton::empty(&ab(), 0).accepts(&[]).unwrap());
        assert_eq!(Automaton::universal(&ab(), 0).enumerate_upto(3), vec![Vec::<Word>::new()]);
    }
}
