use std::collections::BTreeMap;

use proptest::prelude::*;

use htnact::acting::{classify_configuration, exec_all, ExecOptions, Status};
use htnact::constraints::{transitive_closure, Constraint, TaskRef};
use htnact::gen::{generate, GenConfig};
use htnact::io::{parse_domain, parse_problem, print_domain, print_problem, ProblemDocument};
use htnact::model::{apply_substitution, natural_cmp, Fresh, Label, Substitution, Task, Term};
use htnact::strategy::RandomStrategy;
use htnact::trace::{run, validate_trace, Outcome};
use htnact::verify::Instance;

fn term() -> impl Strategy<Value = Term> {
    prop_oneof![
        prop::sample::select(vec!["X", "Y", "Z"]).prop_map(Term::var),
        prop::sample::select(vec!["a", "b"]).prop_map(Term::constant),
    ]
}

fn substitution() -> impl Strategy<Value = Substitution> {
    prop::collection::btree_map(prop::sample::select(vec!["X", "Y", "Z"]).prop_map(String::from), term(), 0..3)
        .prop_map(|m: BTreeMap<String, Term>| Substitution(m))
}

fn task() -> impl Strategy<Value = Task> {
    prop::collection::vec(term(), 0..4).prop_map(|args| Task::new("t", args))
}

fn orderings() -> impl Strategy<Value = Vec<(u8, u8)>> {
    prop::collection::vec((0u8..6, 0u8..6), 0..10)
}

proptest! {
    #[test]
    fn composition_applies_in_sequence(t in task(), a in substitution(), b in substitution()) {
        let stepwise = apply_substitution(&apply_substitution(&t, &a), &b);
        prop_assert_eq!(stepwise, apply_substitution(&t, &a.compose(&b)));
    }

    #[test]
    fn closure_is_idempotent_and_keeps_every_edge(edges in orderings()) {
        let phi = edges
            .iter()
            .map(|(x, y)| Constraint::order(TaskRef::label(Label::new(x.to_string())), TaskRef::label(Label::new(y.to_string()))))
            .collect();
        let once = transitive_closure(&phi);
        prop_assert!(phi.is_subset(&once));
        prop_assert_eq!(transitive_closure(&once), once);
    }

    #[test]
    fn natural_order_is_total(mut v in prop::collection::vec("[a-c]{0,2}[0-9]{0,3}('[0-9])?", 1..12)) {
        v.sort_by(|a, b| natural_cmp(a, b));
        for w in v.windows(2) {
            prop_assert_ne!(natural_cmp(&w[0], &w[1]), std::cmp::Ordering::Greater);
            prop_assert_eq!(natural_cmp(&w[0], &w[1]), natural_cmp(&w[1], &w[0]).reverse());
        }
    }

    #[test]
    fn fresh_labels_are_distinct(bases in prop::collection::vec(prop::sample::select(vec!["1", "2", "A"]), 1..20)) {
        let mut gen = Fresh::new();
        let labels: Vec<_> = bases.iter().map(|b| gen.label(b)).collect();
        let distinct: std::collections::BTreeSet<_> = labels.iter().collect();
        prop_assert_eq!(distinct.len(), labels.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_domains_round_trip(seed in 0u64..10_000) {
        let p = generate(seed, &GenConfig::default());
        let text = print_domain(&p.domain);
        let back = parse_domain(&text).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(&back.domain, &p.domain);

        let doc = ProblemDocument {
            name: format!("p{seed}"),
            domain: p.domain.name.clone(),
            init: p.init.clone(),
            network: p.network.clone(),
            warnings: vec![],
        };
        let back = parse_problem(&print_problem(&doc)).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(back.init, doc.init);
        prop_assert_eq!(back.network, doc.network);
    }

    #[test]
    fn random_runs_are_valid_and_extendable(seed in 0u64..400, run_seed in 0u64..1_000) {
        let p = generate(seed, &GenConfig::default());
        let inst = Instance::from_problem(&p);
        let mut s = RandomStrategy::new(run_seed);
        let out = run(&inst.engine, inst.initial.clone(), &mut s, 300, ExecOptions::default()).unwrap();
        prop_assert_ne!(out.outcome, Outcome::Stalled);
        validate_trace(&inst.engine, &out.trace).map_err(TestCaseError::fail)?;
        for e in &out.trace.entries {
            let open = classify_configuration(&inst.engine, &e.config) == Status::Open;
            prop_assert_eq!(open, !exec_all(&inst.engine, &e.config, ExecOptions::default()).is_empty());
        }
    }
}
