use htnact::acting::{
    apply_action, classify_configuration, exec_all, exec_via_action, exec_via_replacement, extracted_literals,
    primary_tasks, Configuration, Engine, ExecOptions, Status, Step,
};
use htnact::io::{parse_domain, parse_problem};
use htnact::model::{Atom, Label, Literal, Substitution};

const LAB: &str = "
domain lab
constants a b

operator open
  add opened
end

operator close
  del opened
end

operator step
end

operator spoil
  add dirty
end

operator clean
  del dirty
end

operator pick(X)
  add held(X)
end

operator fail
  pre never
end

method broken job
  task 1 fail
  task 2 nop
  constraints:
    ord 1 2
end

method working job
  task 3 step
  task 4 nop
  constraints:
    ord 3 4
end
";

fn setup(problem: &str) -> (Engine, Configuration) {
    let domain = parse_domain(LAB).unwrap().domain;
    let p = parse_problem(problem).unwrap();
    let eng = Engine::new(domain, &p.init, &p.network);
    (eng, Configuration::initial(p.network, p.init))
}

fn labels(xs: &[&str]) -> std::collections::BTreeSet<Label> {
    xs.iter().map(|x| Label::from(*x)).collect()
}

fn act(eng: &Engine, cfg: &Configuration, l: &str) -> Configuration {
    apply_action(eng, cfg, &Label::from(l), &Substitution::new()).unwrap()
}

fn can_act(eng: &Engine, cfg: &Configuration, l: &str) -> bool {
    exec_via_action(eng, cfg, ExecOptions::default())
        .iter()
        .any(|(s, _)| matches!(s, Step::Action { label, .. } if label.as_str() == l))
}

fn lit(p: &str) -> Literal {
    Literal::pos(Atom::ground(p, &[]))
}

#[test]
fn orderings_and_negated_orderings_restrict_primary_tasks() {
    let (eng, cfg) = setup("problem p\ntask 1 step\ntask 2 step\ntask 3 step\nconstraints:\nord 1 2\nnot ord 3 1\n");
    assert_eq!(primary_tasks(&cfg.network, &eng.domain), labels(&["1"]));
    // Executing 1 realises both constraints on it.
    let after = act(&eng, &cfg, "1");
    assert_eq!(primary_tasks(&after.network, &eng.domain), labels(&["2", "3"]));
    assert!(after.network.formula.is_empty());
}

#[test]
fn before_constraint_guards_the_action() {
    let (eng, cfg) = setup("problem p\ntask 1 step\nconstraints:\nbefore opened 1\n");
    assert!(!can_act(&eng, &cfg, "1"));
    let (eng, cfg) = setup("problem p\ninit opened\ntask 1 step\nconstraints:\nbefore opened 1\n");
    assert!(can_act(&eng, &cfg, "1"));
    assert!(act(&eng, &cfg, "1").network.formula.is_empty());
}

#[test]
fn after_constraint_applies_to_the_next_action() {
    let (eng, cfg) = setup("problem p\ntask 1 step\ntask 2 step\nconstraints:\nord 1 2\nafter 1 opened\n");
    let cfg = act(&eng, &cfg, "1");
    assert!(extracted_literals(&Label::from("2"), &cfg.network).contains(&lit("opened")));
    assert!(!can_act(&eng, &cfg, "2"));
    assert_eq!(classify_configuration(&eng, &cfg), Status::Blocked);
}

#[test]
fn between_constraint_holds_on_every_intermediate_action() {
    let problem = "problem p\ntask 1 open\ntask 2 close\ntask 3 step\ntask 4 step\n\
                   constraints:\nord 1 2\nord 1 3\nord 3 4\nbetween 1 opened 4\n";
    let (eng, cfg) = setup(problem);
    assert!(extracted_literals(&Label::from("3"), &cfg.network).is_empty());
    let cfg = act(&eng, &cfg, "1");
    assert!(extracted_literals(&Label::from("3"), &cfg.network).contains(&lit("opened")));
    // Closing first would leave 3 and 4 unable to run; the constraint itself does not stop `close`.
    let closed = act(&eng, &cfg, "2");
    assert!(!can_act(&eng, &closed, "3"));
    let cfg = act(&eng, &act(&eng, &cfg, "3"), "4");
    assert!(cfg.network.formula.iter().all(|c| c.literal().is_none()));
}

#[test]
fn negated_between_is_discharged_once_the_literal_fails() {
    let problem = "problem p\ninit dirty\ntask 1 step\ntask 2 clean\ntask 3 step\n\
                   constraints:\nord 1 2\nord 2 3\nnot between 1 dirty 3\n";
    let (eng, cfg) = setup(problem);
    let cfg = act(&eng, &cfg, "1");
    let pending = |c: &Configuration| c.network.formula.iter().filter(|c| c.literal().is_some()).count();
    assert_eq!(pending(&cfg), 1, "still pending while dirty holds");
    let cfg = act(&eng, &cfg, "2");
    assert_eq!(pending(&cfg), 0);
    assert!(can_act(&eng, &cfg, "3"));
}

#[test]
fn negated_between_constrains_its_right_end_when_never_discharged() {
    let problem = "problem p\ninit dirty\ntask 1 step\ntask 2 spoil\ntask 3 step\n\
                   constraints:\nord 1 2\nord 2 3\nnot between 1 dirty 3\n";
    let (eng, cfg) = setup(problem);
    let cfg = act(&eng, &act(&eng, &cfg, "1"), "2");
    assert!(extracted_literals(&Label::from("3"), &cfg.network).contains(&lit("dirty").negated()));
    assert!(!can_act(&eng, &cfg, "3"));
}

#[test]
fn equality_restricts_bindings() {
    let (eng, cfg) = setup("problem p\ntask 1 pick(X)\nconstraints:\nbefore =(X,b) 1\n");
    let acts = exec_via_action(&eng, &cfg, ExecOptions { all_substitutions: true });
    let tasks: Vec<String> = acts.iter().map(|(s, _)| match s {
        Step::Action { task, .. } => task.to_string(),
        _ => unreachable!(),
    }).collect();
    assert_eq!(tasks, ["pick(b)"]);
}

#[test]
fn least_binding_is_the_default() {
    let (eng, cfg) = setup("problem p\ntask 1 pick(X)\n");
    assert_eq!(exec_via_action(&eng, &cfg, ExecOptions::default()).len(), 1);
    let all = exec_via_action(&eng, &cfg, ExecOptions { all_substitutions: true });
    assert_eq!(all.len(), 2);
    assert!(matches!(&all[0].0, Step::Action { task, .. } if task.to_string() == "pick(a)"));
}

#[test]
fn blocked_body_is_replaced_completely() {
    let (eng, cfg) = setup("problem p\ntask A job\n");
    let (step, cfg) = exec_all(&eng, &cfg, ExecOptions::default()).into_iter().next().unwrap();
    assert!(matches!(&step, Step::Reduction { method, .. } if method == "broken"));
    let options = exec_all(&eng, &cfg, ExecOptions::default());
    assert_eq!(options.len(), 1);
    let (step, cfg) = exec_via_replacement(&eng, &cfg).into_iter().next().unwrap();
    assert!(step.is_complete_replacement());
    assert!(!step.is_jump());
    assert_eq!(primary_tasks(&cfg.network, &eng.domain), labels(&["3"]));
    assert!(cfg.couples.iter().all(|c| c.alternatives.is_empty()));
}

#[test]
fn exhausted_blocked_body_blocks_the_configuration() {
    let (eng, cfg) = setup("problem p\ntask 1 fail\ntask 2 step\nconstraints:\nord 1 2\n");
    assert!(exec_all(&eng, &cfg, ExecOptions::default()).is_empty());
    assert_eq!(classify_configuration(&eng, &cfg), Status::Blocked);
}
