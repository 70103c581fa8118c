//! Module-level invariants at moderate scale: translation facts on random
//! models, truncation and monotonicity of forcing, generator validity, and
//! the worked micro-examples that pin small definitional corners.

use std::collections::BTreeMap;

use kripke_core::krank::{a_n, SearchBudget};
use kripke_core::localize::{self, is_pem1};
use kripke_core::testkit::{self, suites, GenParams};
use kripke_core::translate::{check_chain_membership, pem_instance, realize_chain};
use kripke_core::{
    classical_truth, forces, validate_model, Formula, KripkeModel, RawFact, RawModel, Signature,
};

#[test]
fn friedman_facts_hold_on_random_models() {
    let out = suites::friedman_facts_suite(101, 500);
    assert!(out.passed(), "{:?}", out.failures.first());
}

#[test]
fn truncation_preserves_cone_forcing() {
    let out = suites::truncate_suite(103, 150);
    assert!(out.passed(), "{:?}", out.failures.first());
}

#[test]
fn forcing_is_monotone() {
    let out = suites::monotonicity_suite(107, 300);
    assert!(out.passed(), "{:?}", out.failures.first());
}

#[test]
fn generators_stay_valid_at_scale() {
    for first_order in [false, true] {
        for seed in 0..5_000u64 {
            let params = GenParams { seed, first_order, ..GenParams::default() };
            let m = testkit::random_model(&params);
            let report = validate_model(&m.to_raw());
            assert!(report.is_valid(), "seed {seed}: {report}");
        }
    }
    let single = testkit::random_model(&GenParams { max_nodes: 1, ..GenParams::default() });
    assert_eq!(single.node_count(), 1);
}

#[test]
fn a2_has_seven_distinct_subformulas() {
    assert_eq!(a_n(2).subformulas().len(), 7);
}

#[test]
fn leaves_agree_with_their_classical_structure() {
    for seed in 0..80u64 {
        for first_order in [false, true] {
            let params = GenParams { seed, first_order, ..GenParams::default() };
            let m = testkit::random_model(&params);
            let mut rng = params.rng();
            for leaf in m.leaves().collect::<Vec<_>>() {
                let pool: Vec<String> =
                    m.domain_elems(leaf).map(|e| m.element_name(e).to_string()).collect();
                for _ in 0..5 {
                    let f = testkit::random_formula_with(&mut rng, &params, m.signature(), &pool);
                    assert_eq!(
                        forces(&m, leaf, &f).unwrap(),
                        classical_truth(&m, leaf, &f).unwrap(),
                        "seed {seed} leaf {} formula {f}",
                        m.node_name(leaf)
                    );
                }
            }
        }
    }
}

#[test]
fn atomic_sentences_agree_between_forcing_and_classical_truth() {
    for seed in 0..200u64 {
        let params = GenParams { seed, first_order: seed % 2 == 1, ..GenParams::default() };
        let m = testkit::random_model(&params);
        for node in m.nodes() {
            for fact in m.facts(node) {
                let f = if m.signature().is_first_order() {
                    Formula::rel(
                        m.pred_name(fact.pred),
                        fact.args
                            .iter()
                            .map(|&e| kripke_core::Term::param(m.element_name(e).to_string()))
                            .collect(),
                    )
                } else {
                    Formula::atom(m.pred_name(fact.pred))
                };
                assert!(forces(&m, node, &f).unwrap());
                assert!(classical_truth(&m, node, &f).unwrap());
            }
        }
    }
}

#[test]
fn restrict_prime_at_a_leaf_is_a_single_node() {
    let raw = RawModel {
        sig: Signature::propositional(["p"]).unwrap(),
        nodes: vec!["a".into(), "b".into()],
        edges: vec![("a".into(), "b".into())],
        domains: BTreeMap::new(),
        atoms: BTreeMap::from([(
            "b".to_string(),
            vec![RawFact { name: "p".into(), args: vec![] }],
        )]),
    };
    let m = KripkeModel::from_raw(&raw).unwrap();
    let leaf = m.node("b").unwrap();
    assert_eq!(m.restrict_prime(leaf).node_count(), 1);
}

#[test]
fn sentential_witness_on_pure_domain_growth() {
    // D grows {0} -> {0, 1} with no unstable facts over the root's domain:
    // the sentential witness must be the two-element cardinality instance,
    // and the certificate must verify through the double-negating step.
    let mut domains = BTreeMap::new();
    domains.insert("a".to_string(), vec!["0".to_string()]);
    domains.insert("b".to_string(), vec!["0".to_string(), "1".to_string()]);
    let mut atoms = BTreeMap::new();
    atoms.insert(
        "b".to_string(),
        vec![RawFact { name: "R".into(), args: vec!["1".into()] }],
    );
    let raw = RawModel {
        sig: Signature::first_order([("R", 1)], Vec::<String>::new()).unwrap(),
        nodes: vec!["a".into(), "b".into()],
        edges: vec![("a".into(), "b".into())],
        domains,
        atoms,
    };
    let m = KripkeModel::from_raw(&raw).unwrap();
    let a = m.node("a").unwrap();
    let cert = localize::localize_sentential(&m, a).unwrap();
    assert_eq!(cert.trace.len(), 1);
    let card = kripke_core::cardinality_sentence(2);
    assert_eq!(cert.trace[0].witness.body(), &card);
    assert!(cert.trace[0].witness.sentential());
    let report = localize::verify_localizer(&m, &cert, &localize::VerifyConfig::default()).unwrap();
    assert!(report.ok(), "{:?}", report.mismatches);
}

#[test]
fn two_step_chains_realize_through_either_route() {
    // Realizing [t1, t2] nests t2 innermost: (bot^{t2})^{t1}. The same
    // element of the iterated class can be reached as bot^{(t2^{t1})};
    // the two routes must agree at every node, which is exactly the
    // associativity of the translation.
    use kripke_core::friedman;
    for seed in 0..60u64 {
        let params = GenParams { seed, first_order: seed % 2 == 1, ..GenParams::default() };
        let m = testkit::random_model(&params);
        let atoms: Vec<Formula> = if m.signature().is_first_order() {
            vec![kripke_core::cardinality_sentence(2), a_n(0)]
        } else {
            vec![Formula::atom("p"), Formula::atom("q")]
        };
        let t1 = pem_instance(&atoms[0], false).unwrap();
        let t2 = pem_instance(&atoms[atoms.len() - 1], false).unwrap();
        let chain = realize_chain(Formula::Bot, vec![t1.clone(), t2.clone()]);
        let one_shot =
            friedman(&Formula::Bot, &friedman(t2.closed(), t1.closed()).unwrap()).unwrap();
        for node in m.nodes() {
            assert_eq!(
                forces(&m, node, chain.realized()).unwrap(),
                forces(&m, node, &one_shot).unwrap(),
                "seed {seed} node {}",
                m.node_name(node)
            );
        }
    }
}

#[test]
fn chain_membership_under_rank_one_gamma() {
    let budget = SearchBudget { max_nodes: 5 };
    let tau = pem_instance(&Formula::atom("p"), false).unwrap();
    let chain = realize_chain(Formula::Bot, vec![tau]);
    assert!(check_chain_membership(&chain, |s| is_pem1(s, budget)));

    let deep = pem_instance(&a_n(2), false).unwrap();
    let chain = realize_chain(Formula::Bot, vec![deep]);
    assert!(!check_chain_membership(&chain, |s| is_pem1(s, budget)));
}

#[test]
fn shrinking_preserves_validity_and_failure() {
    let raw = RawModel {
        sig: Signature::propositional(["p", "q"]).unwrap(),
        nodes: vec!["a".into(), "b".into(), "c".into()],
        edges: vec![("a".into(), "b".into()), ("b".into(), "c".into())],
        domains: BTreeMap::new(),
        atoms: BTreeMap::from([
            ("b".to_string(), vec![RawFact { name: "q".into(), args: vec![] }]),
            (
                "c".to_string(),
                vec![
                    RawFact { name: "p".into(), args: vec![] },
                    RawFact { name: "q".into(), args: vec![] },
                ],
            ),
        ]),
    };
    let m = KripkeModel::from_raw(&raw).unwrap();
    let pem = Formula::atom("p").or(Formula::atom("p").neg());
    let fails = |m: &KripkeModel| m.nodes().any(|n| !forces(m, n, &pem).unwrap());
    assert!(fails(&m));
    let small = testkit::shrink_model(&m, fails);
    assert!(fails(&small));
    assert!(validate_model(&small.to_raw()).is_valid());
    assert_eq!(small.node_count(), 2, "the two-node chain is the minimal failure");
    assert!(small.facts(small.nodes().next().unwrap()).count() <= 1);
}
