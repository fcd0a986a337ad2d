//! Browser bindings. Every function takes plain strings and returns a JSON
//! document; failures are reported as `{"error": "..."}`.

use epp::automata::{Alphabet, Automaton};
use epp::demo::build_language_demo;
use epp::logic::parse_formula;
use epp::planner::{bfs_plan, decide_plan};
use epp::presentation::PresentationJson;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn respond(result: epp::Result<Value>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn split(list: &str) -> Vec<&str> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

/// Plans the construction of `target` from comma-separated generators.
/// Without concatenation the decision procedure answers; with it, search
/// up to `max_depth` events.
#[wasm_bindgen]
pub fn plan_language(generators: &str, target: &str, concat: bool, max_depth: u32) -> String {
    respond((|| {
        let inst = build_language_demo(&split(generators), target, concat, None)?;
        let result = if concat {
            bfs_plan(&inst.model, 0, &inst.action, &inst.goal, max_depth as usize)?
        } else {
            decide_plan(&inst.model, 0, &inst.action, &inst.goal)?
        };
        Ok(json!({
            "events": inst.action.events,
            "result": result,
        }))
    })())
}

/// Checks a sentence on a presentation, or lists up to `limit` satisfying
/// tuples of a formula with free variables.
#[wasm_bindgen]
pub fn check_formula(presentation: &str, formula: &str, limit: u32) -> String {
    respond((|| {
        let spec: PresentationJson =
            serde_json::from_str(presentation).map_err(|e| epp::Error::Input(e.to_string()))?;
        let p = spec.to_presentation()?;
        let phi = parse_formula(formula, &p.signature)?;
        let vars = phi.free_vars();
        if vars.is_empty() {
            return Ok(json!({ "formula": phi.to_string(), "holds": p.check_sentence(&phi)? }));
        }
        let rel = p.defined_relation(&phi, &vars)?;
        let tuples = first_tuples(&rel, limit as usize);
        Ok(json!({
            "formula": phi.to_string(),
            "vars": vars,
            "states": rel.num_states(),
            "finite": rel.is_finite(),
            "tuples": tuples,
        }))
    })())
}

fn first_tuples(a: &Automaton, limit: usize) -> Vec<Vec<String>> {
    let bound = if a.is_finite() { a.trim().num_states() } else { 8 };
    let mut out = Vec::new();
    for len in 0..=bound {
        out = a.enumerate_strings(len);
        if out.len() >= limit {
            break;
        }
    }
    out.truncate(limit);
    out
}

/// Compiles a regular expression over comma-separated letters and lists its
/// words up to `max_len`.
#[wasm_bindgen]
pub fn enumerate_regex(pattern: &str, letters: &str, max_len: u32) -> String {
    respond((|| {
        let al = Alphabet::new(split(letters))?;
        let a = Automaton::from_regex(pattern, &al)?;
        let dfa = a.minimize()?;
        let words: Vec<String> = a
            .enumerate_strings(max_len as usize)
            .into_iter()
            .map(|mut t| t.remove(0))
            .collect();
        Ok(json!({
            "states": dfa.num_states(),
            "finite": a.is_finite(),
            "words": words,
            "automaton": dfa.to_json(),
        }))
    })())
}
