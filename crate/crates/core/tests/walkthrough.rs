use htnact::acting::{Configuration, Engine, ExecOptions};
use htnact::fixtures;
use htnact::strategy::ScriptedStrategy;
use htnact::trace::{run, validate_trace, Outcome};
use htnact::validate_domain;

#[test]
fn scripted_walkthrough() {
    let dom = fixtures::rover();
    let r = validate_domain(&dom);
    assert!(r.is_valid(), "{r}");
    let p = fixtures::rover_problem();
    let eng = Engine::new(dom, &p.init, &p.network);
    let cfg = Configuration::initial(p.network.clone(), p.init.clone());
    let mut s = ScriptedStrategy::new(fixtures::walkthrough_choices());
    let out = run(&eng, cfg, &mut s, 100, ExecOptions::default()).unwrap();
    assert_eq!(out.outcome, Outcome::Successful);
    let labels: Vec<String> = out.trace.action_labels().iter().map(|l| l.to_string()).collect();
    assert_eq!(labels, ["8", "9", "B", "1", "4", "5", "3"]);
    validate_trace(&eng, &out.trace).unwrap();

    let couples = |k: usize| -> Vec<(Vec<String>, usize)> {
        out.trace.entries[k]
            .config
            .couples
            .iter()
            .map(|c| (c.pursued.keys().map(|l| l.to_string()).collect(), c.alternatives.len()))
            .collect()
    };
    let v = |ls: &[&str], n: usize| (ls.iter().map(|s| s.to_string()).collect::<Vec<_>>(), n);
    // After the complete replacement to m4; couples are ordered top, 6, A.
    assert_eq!(
        couples(3),
        vec![v(&["7", "8", "9", "10", "B"], 0), v(&["8", "9", "10"], 0), v(&["7", "8", "9", "10"], 1)]
    );
    // After the partial replacement to m1.
    assert_eq!(couples(7), vec![v(&["1", "2", "3", "8", "9", "B"], 0), v(&["1", "2", "3", "8", "9"], 0)]);
}

#[test]
fn walkthrough_through_the_agent_loop() {
    use htnact::agent::{dtrace_to_trace, Agent, ScriptedEvents};
    use htnact::acting::Status;

    let p = fixtures::rover_problem();
    let mut eng = Engine::new(fixtures::rover(), &p.init, &p.network);
    let mut events = ScriptedEvents::from(&fixtures::walkthrough_scenario());
    let mut s = ScriptedStrategy::new(fixtures::walkthrough_choices());
    let mut agent = Agent::new(&mut eng, p.init.clone());
    let status = agent.run(&mut events, &mut s, 100).unwrap();
    assert_eq!(status, Status::Successful);
    let labels: Vec<String> = agent.trace.action_labels().iter().map(|l| l.to_string()).collect();
    assert_eq!(labels, ["8", "9", "B", "1", "4", "5", "3", "0"]);

    let t = dtrace_to_trace(&agent.trace);
    let observed = agent.observed.clone();
    let dtrace = agent.trace.clone();
    assert_eq!(t.entries[0].config.network.tasks, observed);
    assert_eq!(t.actions(), dtrace.actions());
    validate_trace(&eng, &t).unwrap();
}
