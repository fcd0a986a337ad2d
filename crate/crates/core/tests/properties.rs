mod common;

use std::collections::{BTreeMap, HashMap};

use common::*;
use epp::automata::{Automaton, Word};
use epp::epistemic::{eval_foel, post_vars, product_update_traced, ActionModel};
use epp::logic::Formula;
use epp::planner::{bfs_plan, decide_plan, Answer};
use proptest::prelude::*;
use rand::Rng;

fn assignments(vars: &[String], elems: &[Word]) -> Vec<Vec<Word>> {
    let mut out = vec![vec![]];
    for _ in vars {
        out = out
            .into_iter()
            .flat_map(|t: Vec<Word>| {
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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn defined_relations_match_brute_force(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let p = random_presentation(&mut rng, 6);
        let scope: Vec<String> = ["x", "y"][..rng.gen_range(1..=2)].iter().map(|s| s.to_string()).collect();
        let phi = random_formula(&mut rng, &p.signature, &[], &scope, 2, 0, 5);
        let vars = phi.free_vars();
        let rel = p.defined_relation(&phi, &vars).unwrap();
        let elems = p.finite_domain().unwrap();
        for t in assignments(&vars, &elems) {
            let env: HashMap<String, Word> = vars.iter().cloned().zip(t.iter().cloned()).collect();
            prop_assert_eq!(rel.accepts(&t).unwrap(), p.brute_force_eval(&phi, &env).unwrap(), "{}", phi);
        }
        prop_assert!(rel.minus(&Automaton::domain_power(&p.domain, vars.len()).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn double_negation_and_duality(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let p = random_presentation(&mut rng, 8);
        let x = vec!["x".to_string()];
        let phi = random_formula(&mut rng, &p.signature, &[], &x, 2, 0, 4);
        let vars = vec!["x".to_string()];
        let a = p.compile(&phi, &vars).unwrap();
        let b = p.compile(&Formula::not(Formula::not(phi.clone())), &vars).unwrap();
        prop_assert_eq!(a.minimize().unwrap(), b.minimize().unwrap());
        let all = p.check_sentence(&Formula::forall("x", phi.clone())).unwrap();
        let dual = p.check_sentence(&Formula::not(Formula::exists("x", Formula::not(phi)))).unwrap();
        prop_assert_eq!(all, dual);
    }

    #[test]
    fn minimal_automata_are_canonical(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let al = ab();
        let elems = random_elements(&mut rng, &al, 10);
        let a = random_relation(&mut rng, &al, &elems, 2);
        let b = random_relation(&mut rng, &al, &elems, 2);
        let ab = a.union(&b).unwrap().minimize().unwrap();
        let ba = b.union(&a).unwrap().minimize().unwrap();
        prop_assert_eq!(&ab, &ba);
        let back = ab.minus(&b).unwrap().union(&b).unwrap().minimize().unwrap();
        prop_assert_eq!(&back, &ab);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn translation_matches_naive_evaluation(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let m = random_epistemic_model(&mut rng, 5);
        let elems = m.presentation(0).unwrap().finite_domain().unwrap();
        let scope: Vec<String> = if rng.gen_bool(0.5) { vec!["x".into()] } else { vec![] };
        let size = rng.gen_range(1..=6);
        let phi = random_formula(&mut rng, &m.signature, &m.agents, &scope, 2, 2, size);
        let mut env = HashMap::new();
        let mut assignment = BTreeMap::new();
        if let Some(v) = scope.first() {
            let e = elems[rng.gen_range(0..elems.len())].clone();
            env.insert(v.clone(), e.clone());
            assignment.insert(v.clone(), e);
        }
        for w in 0..m.worlds.len() {
            let fast = eval_foel(&m, w, &phi, &assignment).unwrap();
            prop_assert_eq!(fast, naive_foel(&m, w, &phi, &elems, &mut env), "world {}: {}", w, phi);
        }
    }
}

/// A random action with first-order pre- and post-conditions.
fn random_fo_action(rng: &mut TestRng, m: &epp::epistemic::EpistemicModel) -> ActionModel {
    let n = rng.gen_range(1..=3);
    let mut a = ActionModel::reflexive(&m.agents, (0..n).map(|i| (format!("e{i}"), Formula::True)).collect());
    a.access = random_access(rng, &m.agents, n, 0.5);
    for e in 0..n {
        a.pre[e] = random_formula(rng, &m.signature, &[], &[], 2, 0, 3);
        for (p, k) in m.signature.iter() {
            if rng.gen_bool(0.7) {
                a.post[e].insert(p.to_string(), random_formula(rng, &m.signature, &[], &post_vars(k), 1, 0, 3));
            }
        }
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn product_update_matches_definition(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let m = random_epistemic_model(&mut rng, 5);
        let elems = m.presentation(0).unwrap().finite_domain().unwrap();
        let a = random_fo_action(&mut rng, &m);
        let mut expected = Vec::new();
        for w in 0..m.worlds.len() {
            for e in 0..a.events.len() {
                if naive_foel(&m, w, &a.pre[e], &elems, &mut HashMap::new()) {
                    expected.push((w, e));
                }
            }
        }
        let updated = match product_update_traced(&m, &a) {
            Ok((u, pairs)) => {
                prop_assert_eq!(&pairs, &expected);
                u
            }
            Err(epp::Error::EmptyModel) => {
                prop_assert!(expected.is_empty());
                return Ok(());
            }
            Err(e) => panic!("{e}"),
        };
        for agent in &m.agents {
            let r = updated.relation(agent);
            for (i, &(w, e)) in expected.iter().enumerate() {
                for (j, &(v, f)) in expected.iter().enumerate() {
                    let want = m.relation(agent).contains(&(w, v)) && a.relation(agent).contains(&(e, f));
                    prop_assert_eq!(r.contains(&(i, j)), want);
                }
            }
        }
        for (i, &(w, e)) in expected.iter().enumerate() {
            for (p, k) in m.signature.iter() {
                let post = a.post_formula(e, p, k);
                let vars = post_vars(k);
                for t in assignments(&vars, &elems) {
                    let mut env: HashMap<String, Word> = vars.iter().cloned().zip(t.iter().cloned()).collect();
                    let want = naive_foel(&m, w, &post, &elems, &mut env);
                    prop_assert_eq!(updated.interpretations[i][p].accepts(&t).unwrap(), want, "{} after {}", p, e);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn decision_agrees_with_search(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let worlds = rng.gen_range(1..=2);
        let m = random_regular_model(&mut rng, worlds);
        let a = random_qf_action(&mut rng, &m.signature, &m.agents);
        let modal = rng.gen_bool(0.3);
        let goal = random_formula(&mut rng, &m.signature, &m.agents, &[], 2, modal as usize, 4);
        let depth = if modal { 3 } else { 5 };
        let d = decide_plan(&m, 0, &a, &goal).unwrap();
        let b = bfs_plan(&m, 0, &a, &goal, depth).unwrap();
        match b.answer {
            Answer::Yes => {
                prop_assert_eq!(d.answer, Answer::Yes);
                prop_assert_eq!(d.plan.len(), b.plan.len(), "{}", goal);
            }
            Answer::Unknown => prop_assert!(d.answer == Answer::No || d.plan.len() > depth, "{}", goal),
            Answer::No => unreachable!("search never answers no"),
        }
    }
}
