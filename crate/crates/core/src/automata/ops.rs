use std::borrow::Cow;
use std::collections::{HashMap, VecDeque};

use super::{explore, step, subset_successors, Alphabet, Automaton, Codec, Label, StateId, Sym, PAD_SYM};
use super::DEFAULT_STATE_CAP;
use crate::error::{Error, Result};

/// Binary Boolean connectives on languages.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connective {
    And,
    Or,
    Minus,
}

impl Automaton {
    fn check_compatible(&self, other: &Automaton) -> Result<()> {
        if self.tracks != other.tracks {
            return Err(Error::TrackMismatch(self.tracks, other.tracks));
        }
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        Ok(())
    }

    pub fn determinize(&self) -> Result<Automaton> {
        self.determinize_capped(DEFAULT_STATE_CAP)
    }

    /// Subset construction; the result is deterministic and partial (missing
    /// transitions reject).
    pub fn determinize_capped(&self, cap: usize) -> Result<Automaton> {
        if self.deterministic {
            return Ok(self.clone());
        }
        let init = if self.initial.is_empty() {
            vec![]
        } else {
            vec![self.initial.clone()]
        };
        explore(self.tracks, &self.alphabet, init, cap, |set: &Vec<StateId>, out| {
            out.extend(subset_successors(self, set));
            Ok(set.iter().any(|&s| self.is_accepting(s)))
        })
    }

    pub fn minimize(&self) -> Result<Automaton> {
        self.minimize_capped(DEFAULT_STATE_CAP)
    }

    /// The trimmed minimal deterministic automaton, states numbered in
    /// breadth-first order with labels visited in ascending order. Two
    /// automata have equal minimal forms iff their languages are equal.
    pub fn minimize_capped(&self, cap: usize) -> Result<Automaton> {
        let dfa = self.determinize_capped(cap)?.trim();
        let n = dfa.num_states();
        if n == 0 {
            return Ok(Automaton::empty(&self.alphabet, self.tracks));
        }
        let mut block: Vec<u32> = dfa.accepting.iter().map(|&a| a as u32).collect();
        let mut count = {
            let mut b = block.clone();
            b.sort_unstable();
            b.dedup();
            b.len()
        };
        loop {
            let mut sigs: HashMap<(u32, Vec<(Label, u32)>), u32> = HashMap::new();
            let mut next = vec![0u32; n];
            for s in 0..n {
                let sig = (
                    block[s],
                    dfa.transitions[s]
                        .iter()
                        .map(|&(l, t)| (l, block[t as usize]))
                        .collect(),
                );
                let len = sigs.len() as u32;
                next[s] = *sigs.entry(sig).or_insert(len);
            }
            let new_count = sigs.len();
            block = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        let mut trans = vec![Vec::new(); count];
        let mut accepting = vec![false; count];
        for s in 0..n {
            let b = block[s] as usize;
            accepting[b] = dfa.accepting[s];
            trans[b] = dfa.transitions[s]
                .iter()
                .map(|&(l, t)| (l, block[t as usize]))
                .collect();
        }
        let initial = vec![block[dfa.initial[0] as usize]];
        let quotient = Automaton::assemble(self.tracks, self.alphabet.clone(), initial, accepting, trans);
        Ok(quotient.bfs_renumber())
    }

    /// Renumbers reachable states in breadth-first order from the initial
    /// states, following labels in ascending order.
    fn bfs_renumber(&self) -> Automaton {
        let n = self.num_states();
        let mut map: Vec<Option<StateId>> = vec![None; n];
        let mut order = Vec::new();
        let mut queue: VecDeque<StateId> = VecDeque::new();
        for &s in &self.initial {
            if map[s as usize].is_none() {
                map[s as usize] = Some(order.len() as StateId);
                order.push(s);
                queue.push_back(s);
            }
        }
        while let Some(s) = queue.pop_front() {
            for &(_, t) in self.out(s) {
                if map[t as usize].is_none() {
                    map[t as usize] = Some(order.len() as StateId);
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        let trans = order
            .iter()
            .map(|&s| {
                self.out(s)
                    .iter()
                    .map(|&(l, t)| (l, map[t as usize].unwrap()))
                    .collect()
            })
            .collect();
        let accepting = order.iter().map(|&s| self.is_accepting(s)).collect();
        let initial = self.initial.iter().map(|&s| map[s as usize].unwrap()).collect();
        Automaton::assemble(self.tracks, self.alphabet.clone(), initial, accepting, trans)
    }

    pub fn canonicalize(&self) -> Result<Automaton> {
        self.canonicalize_capped(DEFAULT_STATE_CAP)
    }

    /// The minimal complete DFA over all non-pad columns, with a sink where
    /// needed, numbered in breadth-first order.
    pub fn canonicalize_capped(&self, cap: usize) -> Result<Automaton> {
        let min = self.minimize_capped(cap)?;
        let codec = self.codec();
        let n = min.num_states();
        let sink = n as StateId;
        let labels: Vec<Label> = (1..codec.label_count()).collect();
        let mut trans: Vec<Vec<(Label, StateId)>> = Vec::with_capacity(n + 1);
        for s in 0..n {
            let out = min.out(s as StateId);
            let mut full = Vec::with_capacity(labels.len());
            let mut j = 0;
            for &l in &labels {
                if j < out.len() && out[j].0 == l {
                    full.push(out[j]);
                    j += 1;
                } else {
                    full.push((l, sink));
                }
            }
            trans.push(full);
        }
        trans.push(labels.iter().map(|&l| (l, sink)).collect());
        let mut accepting = min.accepting.clone();
        accepting.push(false);
        let initial = if n == 0 { vec![sink] } else { min.initial.clone() };
        Ok(Automaton::assemble(self.tracks, self.alphabet.clone(), initial, accepting, trans).bfs_renumber())
    }

    pub fn intersect(&self, other: &Automaton) -> Result<Automaton> {
        self.intersect_capped(other, DEFAULT_STATE_CAP)
    }

    pub(crate) fn intersect_capped(&self, other: &Automaton, cap: usize) -> Result<Automaton> {
        self.check_compatible(other)?;
        let init: Vec<(StateId, StateId)> = self
            .initial
            .iter()
            .flat_map(|&p| other.initial.iter().map(move |&q| (p, q)))
            .collect();
        explore(self.tracks, &self.alphabet, init, cap, |&(p, q), out| {
            for &(l, p2) in self.out(p) {
                for q2 in step(other.out(q), l) {
                    out.push((l, (p2, q2)));
                }
            }
            Ok(self.is_accepting(p) && other.is_accepting(q))
        })
        .map(|a| a.trim())
    }

    /// Disjoint union of the two automata.
    pub fn union(&self, other: &Automaton) -> Result<Automaton> {
        self.check_compatible(other)?;
        let offset = self.num_states() as StateId;
        let mut trans = self.transitions.clone();
        trans.extend(
            other
                .transitions
                .iter()
                .map(|ts| ts.iter().map(|&(l, t)| (l, t + offset)).collect()),
        );
        let mut accepting = self.accepting.clone();
        accepting.extend(&other.accepting);
        let mut initial = self.initial.clone();
        initial.extend(other.initial.iter().map(|&s| s + offset));
        Ok(Automaton::assemble(self.tracks, self.alphabet.clone(), initial, accepting, trans))
    }

    pub fn minus(&self, other: &Automaton) -> Result<Automaton> {
        self.minus_capped(other, DEFAULT_STATE_CAP)
    }

    /// `L(self) \ L(other)`: product of `self` with the on-the-fly subset
    /// construction of `other`.
    pub fn minus_capped(&self, other: &Automaton, cap: usize) -> Result<Automaton> {
        self.check_compatible(other)?;
        let init: Vec<(StateId, Vec<StateId>)> =
            self.initial.iter().map(|&p| (p, other.initial.clone())).collect();
        explore(self.tracks, &self.alphabet, init, cap, |(p, set), out| {
            for &(l, p2) in self.out(*p) {
                let mut succ: Vec<StateId> = set.iter().flat_map(|&q| step(other.out(q), l)).collect();
                succ.sort_unstable();
                succ.dedup();
                out.push((l, (p2, succ)));
            }
            Ok(self.is_accepting(*p) && !set.iter().any(|&q| other.is_accepting(q)))
        })
        .map(|a| a.trim())
    }

    pub fn boolean_combine(&self, other: &Automaton, conn: Connective) -> Result<Automaton> {
        match conn {
            Connective::And => self.intersect(other),
            Connective::Or => self.union(other),
            Connective::Minus => self.minus(other),
        }
    }

    pub fn complement(&self) -> Result<Automaton> {
        self.complement_capped(DEFAULT_STATE_CAP)
    }

    /// Valid convolutions of `tracks` words not accepted by `self`.
    pub fn complement_capped(&self, cap: usize) -> Result<Automaton> {
        Automaton::universal(&self.alphabet, self.tracks).minus_capped(self, cap)
    }

    pub fn equivalent(&self, other: &Automaton) -> Result<bool> {
        self.check_compatible(other)?;
        Ok(self.minus(other)?.is_empty() && other.minus(self)?.is_empty())
    }

    /// Valid convolutions of `k` words of the 1-track language `universe`.
    pub fn domain_power(universe: &Automaton, k: usize) -> Result<Automaton> {
        if universe.tracks != 1 {
            return Err(Error::TrackMismatch(universe.tracks, 1));
        }
        domain_power(&universe.determinize()?, k, DEFAULT_STATE_CAP)
    }

    pub fn substitute_tracks(&self, sigma: &[usize], tracks: usize, universe: &Automaton) -> Result<Automaton> {
        self.substitute_tracks_capped(sigma, tracks, universe, DEFAULT_STATE_CAP)
    }

    /// Tuples `(e_0, …, e_{tracks-1})` of universe words such that
    /// `(e_{sigma[0]}, …, e_{sigma[k'-1]})` is accepted by `self`. Indices are
    /// zero-based.
    pub fn substitute_tracks_capped(
        &self,
        sigma: &[usize],
        tracks: usize,
        universe: &Automaton,
        cap: usize,
    ) -> Result<Automaton> {
        if sigma.len() != self.tracks {
            return Err(Error::TrackMismatch(sigma.len(), self.tracks));
        }
        if let Some(&bad) = sigma.iter().find(|&&t| t >= tracks) {
            return Err(Error::TrackOutOfRange { index: bad, tracks });
        }
        if universe.tracks != 1 {
            return Err(Error::TrackMismatch(universe.tracks, 1));
        }
        if universe.alphabet != self.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        let uni: Cow<Automaton> = if universe.deterministic {
            Cow::Borrowed(universe)
        } else {
            Cow::Owned(universe.determinize_capped(cap)?)
        };
        let uni = uni.as_ref();
        if self.tracks == 0 {
            return if self.initial.iter().any(|&s| self.is_accepting(s)) {
                domain_power(uni, tracks, cap)
            } else {
                Ok(Automaton::empty(&self.alphabet, tracks))
            };
        }
        let inner = self.codec();
        let outer = Codec::new(&self.alphabet, tracks)?;
        let mut image = vec![false; tracks];
        for &t in sigma {
            image[t] = true;
        }
        type St = (Option<StateId>, Vec<Option<StateId>>);
        let u_init: Vec<Option<StateId>> = vec![uni.initial.first().copied(); tracks];
        if uni.initial.is_empty() {
            return Ok(Automaton::empty(&self.alphabet, tracks));
        }
        let init: Vec<St> = self.initial.iter().map(|&q| (Some(q), u_init.clone())).collect();
        explore(tracks, &self.alphabet, init, cap, |(qa, us): &St, out| {
            let mut fixed: Vec<Option<Sym>> = vec![None; tracks];
            let emit = |fixed: &[Option<Sym>], next_a: Option<StateId>, out: &mut Vec<(Label, St)>| {
                let options: Vec<Vec<(Sym, Option<StateId>)>> = (0..tracks)
                    .map(|t| {
                        let opts = track_options(uni, us[t]);
                        match fixed[t] {
                            Some(sym) => opts.into_iter().filter(|&(s, _)| s == sym).collect(),
                            None => opts,
                        }
                    })
                    .collect();
                cartesian(&options, |syms, states| {
                    if syms.iter().all(|&s| s == PAD_SYM) {
                        return;
                    }
                    out.push((outer.encode(syms), (next_a, states.to_vec())));
                });
            };
            match qa {
                Some(q) => {
                    for &(l, q2) in self.out(*q) {
                        fixed.iter_mut().for_each(|f| *f = None);
                        let mut ok = true;
                        for (j, &t) in sigma.iter().enumerate() {
                            let s = inner.sym(l, j);
                            match fixed[t] {
                                Some(prev) if prev != s => {
                                    ok = false;
                                    break;
                                }
                                _ => fixed[t] = Some(s),
                            }
                        }
                        if ok {
                            emit(&fixed, Some(q2), out);
                        }
                    }
                    if self.is_accepting(*q) {
                        for (t, f) in fixed.iter_mut().enumerate() {
                            *f = if image[t] { Some(PAD_SYM) } else { None };
                        }
                        emit(&fixed, None, out);
                    }
                }
                None => {
                    for (t, f) in fixed.iter_mut().enumerate() {
                        *f = if image[t] { Some(PAD_SYM) } else { None };
                    }
                    emit(&fixed, None, out);
                }
            }
            let a_done = qa.is_none_or(|q| self.is_accepting(q));
            Ok(a_done && us.iter().all(|u| u.is_none_or(|u| uni.is_accepting(u))))
        })
        .map(|a| a.trim())
    }

    /// Inserts a new track at `position` ranging over `universe`; existing
    /// tracks are also restricted to `universe`.
    pub fn cylindrify(&self, position: usize, universe: &Automaton) -> Result<Automaton> {
        if position > self.tracks {
            return Err(Error::TrackOutOfRange {
                index: position,
                tracks: self.tracks + 1,
            });
        }
        let sigma: Vec<usize> = (0..self.tracks)
            .map(|j| if j < position { j } else { j + 1 })
            .collect();
        self.substitute_tracks(&sigma, self.tracks + 1, universe)
    }

    /// Existential projection of track `position`. Columns that become all
    /// pad are absorbed into acceptance so the result reads valid
    /// convolutions only.
    pub fn project(&self, position: usize) -> Result<Automaton> {
        if position >= self.tracks {
            return Err(Error::TrackOutOfRange {
                index: position,
                tracks: self.tracks,
            });
        }
        let from = self.codec();
        let to = Codec::new(&self.alphabet, self.tracks - 1)?;
        let n = self.num_states();
        let mut pad_succ: Vec<Vec<StateId>> = vec![vec![]; n];
        let mut trans: Vec<Vec<(Label, StateId)>> = vec![vec![]; n];
        for s in 0..n {
            for &(l, t) in &self.transitions[s] {
                let syms: Vec<Sym> = (0..self.tracks)
                    .filter(|&j| j != position)
                    .map(|j| from.sym(l, j))
                    .collect();
                if syms.iter().all(|&x| x == PAD_SYM) {
                    pad_succ[s].push(t);
                } else {
                    trans[s].push((to.encode(&syms), t));
                }
            }
        }
        // states that reach acceptance through pad-only columns
        let mut accepting = self.accepting.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for s in 0..n {
                if !accepting[s] && pad_succ[s].iter().any(|&t| accepting[t as usize]) {
                    accepting[s] = true;
                    changed = true;
                }
            }
        }
        let out = Automaton::assemble(
            self.tracks - 1,
            self.alphabet.clone(),
            self.initial.clone(),
            accepting,
            trans,
        );
        Ok(out.trim())
    }

    /// Concatenation of two 1-track languages.
    pub fn concat(&self, other: &Automaton) -> Result<Automaton> {
        self.check_compatible(other)?;
        if self.tracks != 1 {
            return Err(Error::TrackMismatch(self.tracks, 1));
        }
        let offset = self.num_states() as StateId;
        let b_init_out: Vec<(Label, StateId)> = other
            .initial
            .iter()
            .flat_map(|&q| other.out(q).iter().map(|&(l, t)| (l, t + offset)))
            .collect();
        let b_eps = other.initial.iter().any(|&q| other.is_accepting(q));
        let mut trans = self.transitions.clone();
        for (s, ts) in trans.iter_mut().enumerate() {
            if self.accepting[s] {
                ts.extend(&b_init_out);
            }
        }
        trans.extend(
            other
                .transitions
                .iter()
                .map(|ts| ts.iter().map(|&(l, t)| (l, t + offset)).collect()),
        );
        let mut accepting: Vec<bool> = self.accepting.iter().map(|&a| a && b_eps).collect();
        accepting.extend(&other.accepting);
        Ok(Automaton::assemble(1, self.alphabet.clone(), self.initial.clone(), accepting, trans).trim())
    }

    /// Intersection with the valid convolutions; used on untrusted input.
    pub fn restrict_valid(&self) -> Result<Automaton> {
        let codec = self.codec();
        let k = self.tracks;
        let init: Vec<(StateId, u64)> = self.initial.iter().map(|&q| (q, 0u64)).collect();
        explore(k, &self.alphabet, init, DEFAULT_STATE_CAP, |&(q, mask), out| {
            'next: for &(l, t) in self.out(q) {
                let mut m = mask;
                for j in 0..k {
                    let s = codec.sym(l, j);
                    if s == PAD_SYM {
                        m |= 1 << j;
                    } else if mask & (1 << j) != 0 {
                        continue 'next;
                    }
                }
                out.push((l, (t, m)));
            }
            Ok(self.is_accepting(q))
        })
        .map(|a| a.trim())
    }
}

/// Options for one track reading a word of the deterministic 1-track
/// `universe`: pad once finished (allowed from accepting states), or a
/// letter.
fn track_options(universe: &Automaton, state: Option<StateId>) -> Vec<(Sym, Option<StateId>)> {
    match state {
        None => vec![(PAD_SYM, None)],
        Some(q) => {
            let mut v = Vec::with_capacity(universe.out(q).len() + 1);
            if universe.is_accepting(q) {
                v.push((PAD_SYM, None));
            }
            v.extend(universe.out(q).iter().map(|&(l, t)| (l as Sym, Some(t))));
            v
        }
    }
}

fn cartesian<F>(options: &[Vec<(Sym, Option<StateId>)>], mut f: F)
where
    F: FnMut(&[Sym], &[Option<StateId>]),
{
    if options.iter().any(Vec::is_empty) {
        return;
    }
    let k = options.len();
    let mut idx = vec![0usize; k];
    let mut syms = vec![0 as Sym; k];
    let mut states = vec![None; k];
    loop {
        for t in 0..k {
            let (s, q) = options[t][idx[t]];
            syms[t] = s;
            states[t] = q;
        }
        f(&syms, &states);
        let mut t = k;
        loop {
            if t == 0 {
                return;
            }
            t -= 1;
            idx[t] += 1;
            if idx[t] < options[t].len() {
                break;
            }
            idx[t] = 0;
        }
    }
}

/// `universe` must be deterministic.
pub(crate) fn domain_power(universe: &Automaton, k: usize, cap: usize) -> Result<Automaton> {
    debug_assert!(universe.deterministic);
    let alphabet: &Alphabet = &universe.alphabet;
    let Some(&init) = universe.initial.first() else {
        return Ok(Automaton::empty(alphabet, k));
    };
    let codec = Codec::new(alphabet, k)?;
    explore(k, alphabet, vec![vec![Some(init); k]], cap, |us: &Vec<Option<StateId>>, out| {
        let options: Vec<_> = us.iter().map(|&u| track_options(universe, u)).collect();
        cartesian(&options, |syms, states| {
            if syms.iter().any(|&s| s != PAD_SYM) {
                out.push((codec.encode(syms), states.to_vec()));
            }
        });
        Ok(us.iter().all(|u| u.is_none_or(|u| universe.is_accepting(u))))
    })
}
