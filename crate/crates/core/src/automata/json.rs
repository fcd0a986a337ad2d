use serde::{Deserialize, Serialize};

use super::{Alphabet, Automaton, StateId, Sym, PAD, PAD_SYM};
use crate::error::{Error, Result};

/// Serialized automaton. Columns list one letter per track, `_` for pad.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonJson {
    pub tracks: usize,
    pub alphabet: Vec<String>,
    pub states: usize,
    pub initial: Vec<StateId>,
    pub accepting: Vec<StateId>,
    pub transitions: Vec<(StateId, Vec<String>, StateId)>,
}

/// Either a full automaton or a regular expression (1-track only).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutomatonSpec {
    Regex(String),
    Automaton(AutomatonJson),
}

impl Automaton {
    pub fn to_json(&self) -> AutomatonJson {
        AutomatonJson {
            tracks: self.tracks,
            alphabet: self.alphabet.letters().to_vec(),
            states: self.num_states(),
            initial: self.initial.clone(),
            accepting: (0..self.num_states() as StateId)
                .filter(|&s| self.is_accepting(s))
                .collect(),
            transitions: self
                .transitions()
                .map(|(s, col, t)| {
                    (
                        s,
                        col.iter().map(|&x| self.alphabet.letter(x).to_string()).collect(),
                        t,
                    )
                })
                .collect(),
        }
    }
}

impl AutomatonJson {
    /// Rebuilds the automaton. Inputs accepting invalid convolutions are
    /// rejected.
    pub fn to_automaton(&self) -> Result<Automaton> {
        let alphabet = Alphabet::new(self.alphabet.iter().cloned())?;
        let transitions = self
            .transitions
            .iter()
            .map(|(s, col, t)| {
                let syms = col
                    .iter()
                    .map(|l| {
                        if l == PAD {
                            Ok(PAD_SYM)
                        } else {
                            alphabet.symbol(l).ok_or_else(|| Error::UnknownLetter(l.clone()))
                        }
                    })
                    .collect::<Result<Vec<Sym>>>()?;
                Ok((*s, syms, *t))
            })
            .collect::<Result<Vec<_>>>()?;
        let a = Automaton::from_parts(
            self.tracks,
            alphabet,
            self.states,
            self.initial.clone(),
            self.accepting.clone(),
            transitions,
        )?;
        if !a.minus(&a.restrict_valid()?)?.is_empty() {
            return Err(Error::Input("automaton accepts invalid convolutions".into()));
        }
        Ok(a)
    }
}

impl AutomatonSpec {
    /// Resolves against a context alphabet and expected track count.
    pub fn resolve(&self, alphabet: &Alphabet, tracks: usize) -> Result<Automaton> {
        match self {
            AutomatonSpec::Regex(p) => {
                if tracks != 1 {
                    return Err(Error::TrackMismatch(1, tracks));
                }
                Automaton::from_regex(p, alphabet)
            }
            AutomatonSpec::Automaton(j) => {
                let a = j.to_automaton()?;
                if a.tracks() != tracks {
                    return Err(Error::TrackMismatch(a.tracks(), tracks));
                }
                if let Some(l) = a.alphabet().letters().iter().find(|l| alphabet.symbol(l).is_none()) {
                    return Err(Error::UnknownLetter(l.clone()));
                }
                a.with_alphabet(alphabet)
            }
        }
    }
}

impl From<&Automaton> for AutomatonSpec {
    fn from(a: &Automaton) -> Self {
        AutomatonSpec::Automaton(a.to_json())
    }
}
