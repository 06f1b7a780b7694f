//! Verification suites relating acting to HTN planning.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::acting::{classify_configuration, exec_all, Configuration, Engine, ExecOptions, Status, Step};
use crate::agent::{dtrace_to_trace, Agent, ScriptedEvents};
use crate::error::EngineError;
use crate::model::{Label, Substitution, Task};
use crate::oracle::{tasks_of, Oracle};
use crate::strategy::{DefaultStrategy, RandomStrategy, Strategy};
use crate::trace::{eliminate_complete_replacements, run, validate_trace, Outcome};

/// Kinds of replacement used somewhere along a trace.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Used {
    pub complete: bool,
    pub partial: bool,
    pub jump: bool,
}

impl Used {
    fn with(self, s: &Step) -> Used {
        match s {
            Step::Replacement { complete, jump, .. } => Used {
                complete: self.complete || *complete,
                partial: self.partial || !*complete,
                jump: self.jump || *jump,
            },
            _ => self,
        }
    }
}

pub type Act = Vec<(Label, Task)>;

/// Successful act sequences reachable from a configuration, with the replacements used to get there.
pub type Outcomes = BTreeSet<(Act, Used)>;

/// Exhaustive search over every trace (all substitutions), memoised per configuration.
pub struct Search<'e> {
    eng: &'e Engine,
    memo: HashMap<Configuration, Arc<Outcomes>>,
    pub nodes: usize,
    pub max_nodes: usize,
    /// Reachable configurations violating: nothing executable ⟺ successful or blocked.
    pub extendability_violations: Vec<String>,
}

impl<'e> Search<'e> {
    pub fn new(eng: &'e Engine, max_nodes: usize) -> Self {
        Search { eng, memo: HashMap::new(), nodes: 0, max_nodes, extendability_violations: vec![] }
    }

    fn key(cfg: &Configuration) -> Configuration {
        let mut k = cfg.clone();
        k.theta = Substitution::new();
        k
    }

    pub fn outcomes(&mut self, cfg: &Configuration) -> Result<Arc<Outcomes>, EngineError> {
        let key = Self::key(cfg);
        if let Some(r) = self.memo.get(&key) {
            return Ok(r.clone());
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(EngineError::Contract(format!("search exceeded {} configurations", self.max_nodes)));
        }
        let status = classify_configuration(self.eng, cfg);
        let options = exec_all(self.eng, cfg, ExecOptions { all_substitutions: true });
        if options.is_empty() != (status != Status::Open) {
            self.extendability_violations.push(format!(
                "{:?} with {} executions: {}",
                status,
                options.len(),
                cfg.network
            ));
        }
        let mut out = Outcomes::new();
        if status == Status::Successful {
            out.insert((vec![], Used::default()));
        }
        for (step, next) in options {
            let sub = self.outcomes(&next)?;
            for (act, used) in sub.iter() {
                let mut a = act.clone();
                if let Step::Action { label, task, .. } = &step {
                    a.insert(0, (label.clone(), task.clone()));
                }
                out.insert((a, used.with(&step)));
            }
        }
        let out = Arc::new(out);
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    pub fn configurations(&self) -> usize {
        self.memo.len()
    }
}

/// A problem instance to check.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub engine: Engine,
    pub initial: Configuration,
}

impl Instance {
    pub fn new(name: impl Into<String>, engine: Engine, initial: Configuration) -> Self {
        Instance { name: name.into(), engine, initial }
    }

    pub fn from_problem(p: &crate::gen::Problem) -> Self {
        let engine = Engine::new(p.domain.clone(), &p.init, &p.network);
        Instance::new(format!("seed {}", p.seed), engine, Configuration::initial(p.network.clone(), p.init.clone()))
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub suite: String,
    pub checked: usize,
    pub failures: Vec<String>,
    pub witnesses: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport { suite: suite.into(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "{verdict} {} ({} checked)", self.suite, self.checked)?;
        for w in &self.witnesses {
            writeln!(f, "  witness: {w}")?;
        }
        for x in &self.failures {
            writeln!(f, "  failure: {x}")?;
        }
        Ok(())
    }
}

pub fn render_act(act: &[(Label, Task)]) -> String {
    act.iter().map(|(l, _)| l.to_string()).collect::<Vec<_>>().join("·")
}

fn render_tasks(ts: &[Task]) -> String {
    ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ")
}

pub const DEFAULT_MAX_NODES: usize = 200_000;
const MAX_REDUCTIONS: usize = 64;

/// Partial-replacement-free acting agrees with `sol`, in both directions.
pub fn equivalence(instances: &[Instance]) -> SuiteReport {
    let mut r = SuiteReport::new("equivalence");
    for inst in instances {
        let mut search = Search::new(&inst.engine, DEFAULT_MAX_NODES);
        let outcomes = match search.outcomes(&inst.initial) {
            Ok(o) => o,
            Err(e) => {
                r.failures.push(format!("{}: {e}", inst.name));
                continue;
            }
        };
        let acting: BTreeSet<Vec<Task>> =
            outcomes.iter().filter(|(_, u)| !u.partial).map(|(a, _)| tasks_of(a)).collect();
        let oracle = Oracle::new(&inst.engine.domain, &inst.engine.universe);
        let sol: BTreeSet<Vec<Task>> = match oracle.solutions(&inst.initial.network, &inst.initial.state, MAX_REDUCTIONS) {
            Ok(s) => s.iter().map(tasks_of).collect(),
            Err(e) => {
                r.failures.push(format!("{}: {e}", inst.name));
                continue;
            }
        };
        r.checked += 1;
        for a in acting.difference(&sol) {
            r.failures.push(format!("{}: acting yields [{}] which is not a solution", inst.name, render_tasks(a)));
        }
        for s in sol.difference(&acting) {
            r.failures.push(format!("{}: solution [{}] is not reached by acting", inst.name, render_tasks(s)));
        }
    }
    r
}

/// Counts of what an equivalence run saw, for reporting coverage.
#[derive(Clone, Copy, Debug, Default)]
pub struct Coverage {
    pub instances: usize,
    pub with_solutions: usize,
    pub solutions: usize,
    pub with_complete_replacement: usize,
}

pub fn coverage(instances: &[Instance]) -> Coverage {
    let mut c = Coverage { instances: instances.len(), ..Default::default() };
    for inst in instances {
        let mut search = Search::new(&inst.engine, DEFAULT_MAX_NODES);
        if let Ok(o) = search.outcomes(&inst.initial) {
            let n = o.iter().filter(|(_, u)| !u.partial).count();
            if n > 0 {
                c.with_solutions += 1;
            }
            c.solutions += n;
            if o.iter().any(|(_, u)| u.complete) {
                c.with_complete_replacement += 1;
            }
        }
    }
    c
}

/// Every reachable configuration has an execution exactly when it is neither successful nor blocked.
pub fn extendability(instances: &[Instance]) -> SuiteReport {
    let mut r = SuiteReport::new("extendability");
    for inst in instances {
        let mut search = Search::new(&inst.engine, DEFAULT_MAX_NODES);
        match search.outcomes(&inst.initial) {
            Ok(_) => {
                r.checked += search.configurations();
                for v in search.extendability_violations {
                    r.failures.push(format!("{}: {v}", inst.name));
                }
            }
            Err(e) => r.failures.push(format!("{}: {e}", inst.name)),
        }
    }
    r
}

/// Random-strategy traces with complete replacements rewrite into valid, no longer traces with the same actions.
pub fn elimination(instances: &[Instance], runs_per_instance: u64) -> SuiteReport {
    let mut r = SuiteReport::new("complete-replacement elimination");
    for inst in instances {
        for seed in 0..runs_per_instance {
            let mut s = RandomStrategy::new(seed);
            let Ok(out) = run(&inst.engine, inst.initial.clone(), &mut s, 500, ExecOptions::default()) else {
                continue;
            };
            if out.trace.complete_replacement_free() {
                continue;
            }
            r.checked += 1;
            let name = format!("{} run {seed}", inst.name);
            match eliminate_complete_replacements(&inst.engine, &out.trace) {
                Ok(t) => {
                    if let Err(e) = validate_trace(&inst.engine, &t) {
                        r.failures.push(format!("{name}: rewritten trace invalid: {e}"));
                    } else if !t.complete_replacement_free() {
                        r.failures.push(format!("{name}: complete replacements remain"));
                    } else if t.actions() != out.trace.actions() {
                        r.failures.push(format!("{name}: actions changed"));
                    } else if t.len() > out.trace.len() {
                        r.failures.push(format!("{name}: rewritten trace is longer"));
                    }
                }
                Err(e) => r.failures.push(format!("{name}: {e}")),
            }
        }
    }
    r
}

/// Successful traces whose actions are not an HTN solution within `depth` reductions.
pub fn acting_only(inst: &Instance, depth: usize) -> SuiteReport {
    let mut r = SuiteReport::new("acting-only");
    let mut search = Search::new(&inst.engine, DEFAULT_MAX_NODES);
    let outcomes = match search.outcomes(&inst.initial) {
        Ok(o) => o,
        Err(e) => {
            r.failures.push(e.to_string());
            return r;
        }
    };
    let oracle = Oracle::new(&inst.engine.domain, &inst.engine.universe);
    let sol: BTreeSet<Vec<Task>> = match oracle.solutions_bounded(&inst.initial.network, &inst.initial.state, depth) {
        Ok(s) => s.iter().map(tasks_of).collect(),
        Err(e) => {
            r.failures.push(e.to_string());
            return r;
        }
    };
    let acts: BTreeSet<&Act> = outcomes.iter().map(|(a, _)| a).collect();
    r.checked = acts.len();
    for a in acts {
        if !sol.contains(&tasks_of(a)) {
            r.witnesses.push(render_act(a));
        }
    }
    if r.witnesses.is_empty() {
        r.failures.push("every successful trace yields an HTN solution".into());
    }
    r
}

/// Acts reachable without complete replacements only by jumping.
///
/// With a `target`, passes when that act is reachable and every complete-replacement-free
/// trace producing it jumps.
pub fn jumps(inst: &Instance, target: Option<&[Task]>) -> SuiteReport {
    let mut r = SuiteReport::new("jumps");
    let mut search = Search::new(&inst.engine, DEFAULT_MAX_NODES);
    let outcomes = match search.outcomes(&inst.initial) {
        Ok(o) => o,
        Err(e) => {
            r.failures.push(e.to_string());
            return r;
        }
    };
    let mut by_act: BTreeMap<Vec<Task>, (bool, bool, String)> = BTreeMap::new();
    for (a, u) in outcomes.iter().filter(|(_, u)| !u.complete) {
        let e = by_act.entry(tasks_of(a)).or_insert((false, false, render_act(a)));
        if u.jump {
            e.0 = true;
        } else {
            e.1 = true;
        }
    }
    r.checked = by_act.len();
    let needs_jump: Vec<(&Vec<Task>, &String)> =
        by_act.iter().filter(|(_, (j, nj, _))| *j && !*nj).map(|(t, (_, _, s))| (t, s)).collect();
    match target {
        Some(t) => match by_act.get(t) {
            None => r.failures.push(format!("[{}] is not reachable without complete replacements", render_tasks(t))),
            Some((_, true, _)) => r.failures.push(format!("[{}] is reachable without a jump", render_tasks(t))),
            Some((_, false, s)) => r.witnesses.push(s.clone()),
        },
        None => {
            r.witnesses.extend(needs_jump.iter().map(|(_, s)| (*s).clone()));
            if needs_jump.is_empty() {
                r.failures.push("no act requires a jump".into());
            }
        }
    }
    r
}

/// A random event schedule for the agent loop.
#[derive(Clone, Debug)]
pub struct Schedule {
    pub events: BTreeMap<usize, Vec<Task>>,
    /// Seed of the random strategy; `None` runs the default strategy.
    pub seed: Option<u64>,
}

impl Schedule {
    fn name(&self) -> String {
        self.seed.map_or("default".into(), |s| s.to_string())
    }
}

/// Each d-trace folds back into a valid trace of all observed tasks with the same actions.
pub fn dtrace_soundness(engine: &Engine, init: &crate::model::State, schedules: &[Schedule], max_iterations: usize) -> SuiteReport {
    let mut r = SuiteReport::new("dtrace-soundness");
    for sch in schedules {
        let mut eng = engine.clone();
        let mut events = ScriptedEvents::new(sch.events.clone());
        let mut strategy: Box<dyn Strategy> = match sch.seed {
            Some(seed) => Box::new(RandomStrategy::new(seed)),
            None => Box::new(DefaultStrategy),
        };
        let (dtrace, observed) = {
            let mut agent = Agent::new(&mut eng, init.clone());
            if let Err(e) = agent.run(&mut events, strategy.as_mut(), max_iterations) {
                r.failures.push(format!("schedule {}: {e}", sch.name()));
                continue;
            }
            (agent.trace.clone(), agent.observed.clone())
        };
        r.checked += 1;
        let t = dtrace_to_trace(&dtrace);
        let first = &t.entries[0].config;
        let expected = Configuration::initial(crate::constraints::TaskNetwork::new(observed.clone(), []), init.clone());
        if !first.same_as(&expected) {
            r.failures.push(format!("schedule {}: first configuration is not <T̄, true>", sch.name()));
        } else if let Err(e) = validate_trace(&eng, &t) {
            r.failures.push(format!("schedule {}: {e}", sch.name()));
        } else if t.actions() != dtrace.actions() {
            r.failures.push(format!("schedule {}: actions differ", sch.name()));
        }
    }
    r
}

/// Random schedules over `tasks`: each iteration below `horizon` observes up to two tasks with probability `rate`.
pub fn random_schedules(tasks: &[Task], count: usize, horizon: usize, rate: f64, first_seed: u64) -> Vec<Schedule> {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    (0..count as u64)
        .map(|i| {
            let seed = first_seed + i;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut events = BTreeMap::new();
            for k in 0..horizon {
                if k == 0 || rng.gen_bool(rate) {
                    let n = rng.gen_range(1..=2);
                    let ts: Vec<Task> = (0..n).map(|_| tasks.choose(&mut rng).unwrap().clone()).collect();
                    events.insert(k, ts);
                }
            }
            Schedule { events, seed: Some(seed) }
        })
        .collect()
}

/// Outcome of a single run, for summaries.
pub fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Successful => "successful",
        Outcome::Blocked => "blocked",
        Outcome::Budget => "budget",
        Outcome::Stalled => "stalled",
    }
}
