//! The three subcommands.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, Write};

use htnact::agent::{Agent, EventSource, InteractiveEvents, ScriptedEvents};
use htnact::export::{export_trace, Header};
use htnact::gen::{corpus, GenConfig};
use htnact::io::{parse_task_list, ProblemDocument};
use htnact::oracle::Oracle;
use htnact::strategy::{DefaultStrategy, RandomStrategy, ScriptedStrategy, Strategy};
use htnact::trace::{run, Outcome};
use htnact::verify::{self, Instance, Schedule, SuiteReport};
use htnact::{Configuration, Domain, Engine, ExecOptions, Status, TaskNetwork};

use crate::{load, ActArgs, PlanArgs, StrategyArgs, StrategyKind, Suite, VerifyArgs};

#[derive(Debug)]
pub enum Failure {
    /// Unreadable, malformed or invalid input, or a bad flag combination.
    Input(String),
}

impl Failure {
    pub const INPUT: u8 = 4;

    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => Self::INPUT,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "error: {m}"),
        }
    }
}

const SUCCESS: u8 = 0;
const BLOCKED: u8 = 2;
const BUDGET: u8 = 3;
const VERIFICATION_FAILED: u8 = 5;

/// Strategy kind and seed after defaulting: a seed alone selects `random`.
fn resolve(args: &StrategyArgs, default: StrategyKind) -> (StrategyKind, Option<u64>) {
    let kind = args.strategy.unwrap_or(if args.seed.is_some() { StrategyKind::Random } else { default });
    match kind {
        StrategyKind::Random => (kind, Some(args.seed.unwrap_or(0))),
        _ => (kind, args.seed),
    }
}

fn strategy(kind: StrategyKind, seed: Option<u64>) -> Result<Box<dyn Strategy>, Failure> {
    match kind {
        StrategyKind::Default => Ok(Box::new(DefaultStrategy)),
        StrategyKind::Random => Ok(Box::new(RandomStrategy::new(seed.unwrap_or(0)))),
        StrategyKind::Exhaustive => Err(Failure::Input("the exhaustive strategy is only available under verify".into())),
    }
}

fn strategy_name(kind: StrategyKind, scripted: bool) -> String {
    let base = match kind {
        StrategyKind::Default => "default",
        StrategyKind::Random => "random",
        StrategyKind::Exhaustive => "exhaustive",
    };
    if scripted && kind == StrategyKind::Default {
        "scripted".to_string()
    } else if scripted {
        format!("scripted+{base}")
    } else {
        base.to_string()
    }
}

fn write_output(path: Option<&std::path::Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Input(format!("stdout: {e}"))),
    }
}

pub fn act(a: &ActArgs) -> Result<u8, Failure> {
    let domain = load::domain(&a.domain)?;
    let problem = load::problem(&a.problem, &domain)?;
    let scenario = a.scenario.as_deref().map(|p| load::scenario(p, &domain)).transpose()?;
    let (kind, seed) = resolve(&a.strategy, StrategyKind::Default);
    let mut chosen = strategy(kind, seed)?;
    if let Some(path) = &a.choices {
        chosen = Box::new(ScriptedStrategy::with_fallback(load::choices(path)?, chosen));
    }

    let looped = scenario.is_some() || a.interactive;
    if looped && !problem.network.tasks.is_empty() {
        eprintln!("note: the tasks of {} are ignored; tasks come from observations", a.problem.display());
    }
    let (trace, outcome) = if looped {
        let mut events: Box<dyn EventSource> = match &scenario {
            Some(doc) => Box::new(ScriptedEvents::from(doc)),
            None => Box::new(InteractiveEvents::new(io::stdin().lock(), io::stderr())),
        };
        let mut eng = Engine::new(domain.clone(), &problem.init, &TaskNetwork::default());
        let mut agent = Agent::new(&mut eng, problem.init.clone());
        let status = agent
            .run(events.as_mut(), chosen.as_mut(), a.max_iterations)
            .map_err(|e| Failure::Input(e.to_string()))?;
        let outcome = match status {
            Status::Successful => Outcome::Successful,
            Status::Blocked => Outcome::Blocked,
            Status::Open => Outcome::Budget,
        };
        (agent.trace, outcome)
    } else {
        let eng = Engine::new(domain.clone(), &problem.init, &problem.network);
        let initial = Configuration::initial(problem.network.clone(), problem.init.clone());
        let r = run(&eng, initial, chosen.as_mut(), a.max_iterations, ExecOptions::default())
            .map_err(|e| Failure::Input(e.to_string()))?;
        (r.trace, r.outcome)
    };

    let header = Header {
        domain: domain.name.clone(),
        problem: problem.name.clone(),
        strategy: strategy_name(kind, a.choices.is_some()),
        seed,
        outcome: verify::outcome_name(outcome).into(),
    };
    write_output(a.out.as_deref(), &export_trace(&header, &trace))?;
    eprintln!("{}: {}", verify::outcome_name(outcome), verify::render_act(&trace.actions()));
    Ok(match outcome {
        Outcome::Successful => SUCCESS,
        Outcome::Blocked | Outcome::Stalled => BLOCKED,
        Outcome::Budget => BUDGET,
    })
}

pub fn plan(p: &PlanArgs) -> Result<u8, Failure> {
    if p.depth == 0 {
        return Err(Failure::Input("--depth must be at least 1".into()));
    }
    let domain = load::domain(&p.domain)?;
    let problem = load::problem(&p.problem, &domain)?;
    let eng = Engine::new(domain, &problem.init, &problem.network);
    let oracle = Oracle::new(&eng.domain, &eng.universe);
    let sols = oracle
        .solutions_bounded(&problem.network, &problem.init, p.depth)
        .map_err(|e| Failure::Input(e.to_string()))?;
    let mut out = String::new();
    for s in &sols {
        let line: Vec<String> = s.iter().map(|(l, t)| format!("{l}:{t}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    write_output(None, &out)?;
    eprintln!("{} solution(s) within depth {}", sols.len(), p.depth);
    Ok(SUCCESS)
}

struct Loaded {
    domain: Domain,
    problem: ProblemDocument,
}

fn instance(l: &Loaded) -> Instance {
    let eng = Engine::new(l.domain.clone(), &l.problem.init, &l.problem.network);
    Instance::new(l.problem.name.clone(), eng, Configuration::initial(l.problem.network.clone(), l.problem.init.clone()))
}

fn merge(suite: &str, reports: impl IntoIterator<Item = SuiteReport>) -> SuiteReport {
    let mut out = SuiteReport { suite: suite.into(), ..Default::default() };
    for r in reports {
        out.checked += r.checked;
        out.failures.extend(r.failures);
        out.witnesses.extend(r.witnesses);
    }
    out
}

fn dtrace_schedules(events: &BTreeMap<usize, Vec<htnact::Task>>, kind: StrategyKind, seed: Option<u64>) -> Vec<Schedule> {
    let one = |seed| Schedule { events: events.clone(), seed };
    match kind {
        StrategyKind::Default => vec![one(None)],
        StrategyKind::Random => vec![one(seed)],
        StrategyKind::Exhaustive => {
            let first = seed.unwrap_or(0);
            std::iter::once(one(None)).chain((first..first + 32).map(|s| one(Some(s)))).collect()
        }
    }
}

pub fn verify(v: &VerifyArgs) -> Result<u8, Failure> {
    let (kind, seed) = resolve(&v.strategy, StrategyKind::Exhaustive);
    let loaded = match (&v.domain, &v.problem) {
        (Some(d), Some(p)) => {
            let domain = load::domain(d)?;
            let problem = load::problem(p, &domain)?;
            Some(Loaded { domain, problem })
        }
        (None, None) if v.random.is_some() => None,
        _ => return Err(Failure::Input("give a domain and a problem, or --random".into())),
    };
    let scenario = match (&v.scenario, &loaded) {
        (Some(path), Some(l)) => Some(load::scenario(path, &l.domain)?),
        _ => None,
    };
    let instances: Vec<Instance> = match (&loaded, v.random) {
        (Some(l), _) => vec![instance(l)],
        (None, Some(n)) => corpus(seed.unwrap_or(0), n, &GenConfig::default()).iter().map(Instance::from_problem).collect(),
        (None, None) => unreachable!("checked above"),
    };

    let report = match v.suite {
        Suite::Extendability => verify::extendability(&instances),
        Suite::Equivalence => verify::equivalence(&instances),
        Suite::Elimination => verify::elimination(&instances, 20),
        Suite::ActingOnly => merge("acting-only", instances.iter().map(|i| verify::acting_only(i, v.depth))),
        Suite::Jumps => {
            let target = v.target.as_deref().map(parse_task_list).transpose().map_err(Failure::Input)?;
            merge("jumps", instances.iter().map(|i| verify::jumps(i, target.as_deref())))
        }
        Suite::DtraceSoundness => {
            let reports = instances.iter().map(|inst| {
                let schedules = match &scenario {
                    Some(doc) => dtrace_schedules(&doc.events, kind, seed),
                    None => {
                        let tasks: Vec<htnact::Task> = inst.initial.network.tasks.values().cloned().collect();
                        verify::random_schedules(&tasks, 60, 12, 0.2, seed.unwrap_or(0))
                    }
                };
                verify::dtrace_soundness(&inst.engine, &inst.initial.state, &schedules, v.max_iterations)
            });
            merge("dtrace-soundness", reports.collect::<Vec<_>>())
        }
    };
    print!("{report}");
    Ok(if report.passed() { SUCCESS } else { VERIFICATION_FAILED })
}
