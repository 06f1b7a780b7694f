//! The sense-reason-act loop: interleaves observed tasks with execution steps.

use std::collections::{BTreeMap, VecDeque};
use std::io::{BufRead, Write};
use std::sync::mpsc::Receiver;

use crate::acting::{classify_configuration, exec_all, Configuration, Couple, Engine, ExecOptions, Status, Step};
use crate::constraints::TaskNetwork;
use crate::error::EngineError;
use crate::io::{parse_task_list, ScenarioDocument};
use crate::model::{Label, State, Task, NOP};
use crate::strategy::Strategy;
use crate::trace::Trace;

/// Supplies the tasks observed at each iteration.
pub trait EventSource {
    fn observe(&mut self, iteration: usize) -> Vec<Task>;

    /// No further tasks will ever arrive.
    fn exhausted(&self, _iteration: usize) -> bool {
        false
    }
}

/// Iteration-indexed task sets from a scenario.
#[derive(Clone, Debug, Default)]
pub struct ScriptedEvents {
    events: BTreeMap<usize, Vec<Task>>,
}

impl ScriptedEvents {
    pub fn new(events: BTreeMap<usize, Vec<Task>>) -> Self {
        ScriptedEvents { events }
    }
}

impl From<&ScenarioDocument> for ScriptedEvents {
    fn from(doc: &ScenarioDocument) -> Self {
        ScriptedEvents::new(doc.events.clone())
    }
}

impl EventSource for ScriptedEvents {
    fn observe(&mut self, iteration: usize) -> Vec<Task> {
        self.events.remove(&iteration).unwrap_or_default()
    }

    fn exhausted(&self, iteration: usize) -> bool {
        self.events.keys().all(|k| *k < iteration)
    }
}

/// Reads one line per iteration: a comma-separated task list, or nothing.
pub struct InteractiveEvents<R, W> {
    input: R,
    prompt: W,
    closed: bool,
}

impl<R: BufRead, W: Write> InteractiveEvents<R, W> {
    pub fn new(input: R, prompt: W) -> Self {
        InteractiveEvents { input, prompt, closed: false }
    }
}

impl<R: BufRead, W: Write> EventSource for InteractiveEvents<R, W> {
    fn observe(&mut self, iteration: usize) -> Vec<Task> {
        if self.closed {
            return vec![];
        }
        loop {
            let _ = write!(self.prompt, "[{iteration}]> ");
            let _ = self.prompt.flush();
            let mut line = String::new();
            match self.input.read_line(&mut line) {
                Ok(0) | Err(_) => {
                    self.closed = true;
                    return vec![];
                }
                Ok(_) => match parse_task_list(line.trim()) {
                    Ok(ts) => return ts,
                    Err(e) => {
                        let _ = writeln!(self.prompt, "error: {e}");
                    }
                },
            }
        }
    }

    fn exhausted(&self, _: usize) -> bool {
        self.closed
    }
}

/// Tasks handed over from another thread; everything sent before a sensing phase is seen by it.
pub struct ChannelEvents {
    rx: Receiver<Task>,
}

impl ChannelEvents {
    pub fn new(rx: Receiver<Task>) -> Self {
        ChannelEvents { rx }
    }
}

impl EventSource for ChannelEvents {
    fn observe(&mut self, _: usize) -> Vec<Task> {
        self.rx.try_iter().collect()
    }
}

/// Labels for observed tasks: A, B, …, Z, AA, AB, …
fn observation_name(k: usize) -> String {
    let mut k = k + 1;
    let mut s = VecDeque::new();
    while k > 0 {
        k -= 1;
        s.push_front((b'A' + (k % 26) as u8) as char);
        k /= 26;
    }
    s.into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IterationResult {
    /// An execution step was appended.
    Progressed,
    /// The d-trace is successful or blocked, or nothing was executable.
    Idle,
}

pub struct Agent<'e> {
    pub eng: &'e mut Engine,
    /// The d-trace.
    pub trace: Trace,
    /// Every task observed so far, including `0:nop`.
    pub observed: BTreeMap<Label, Task>,
    pub initial_state: State,
    pub iteration: usize,
    names: usize,
}

impl<'e> Agent<'e> {
    /// Starts from `⟨{0:nop}, true⟩`.
    pub fn new(eng: &'e mut Engine, state: State) -> Self {
        let zero = Label::from("0");
        let nop = Task::new(NOP, vec![]);
        let net = TaskNetwork::new([(zero.clone(), nop.clone())], []);
        let cfg = Configuration::initial(net, state.clone());
        Agent {
            eng,
            trace: Trace::new(cfg),
            observed: [(zero, nop)].into_iter().collect(),
            initial_state: state,
            iteration: 0,
            names: 0,
        }
    }

    pub fn status(&self) -> Status {
        classify_configuration(self.eng, self.trace.last())
    }

    /// Adds newly observed tasks as top-level tasks; returns their labels.
    pub fn observe(&mut self, tasks: Vec<Task>) -> Vec<Label> {
        if tasks.is_empty() {
            return vec![];
        }
        let mut cfg = self.trace.last().clone();
        let mut added = BTreeMap::new();
        for t in tasks {
            self.eng.extend_universe(&t);
            let l = cfg.fresh.label(&observation_name(self.names));
            self.names += 1;
            cfg.network.tasks.insert(l.clone(), t.clone());
            added.insert(l, t);
        }
        match cfg.couples.iter_mut().find(|c| c.origin.is_none()) {
            Some(top) => top.pursued.extend(added.clone()),
            None => {
                cfg.couples.insert(0, Couple { origin: None, pursued: added.clone(), alternatives: vec![] });
            }
        }
        self.observed.extend(added.clone());
        let labels = added.keys().cloned().collect();
        self.trace.push(Step::Observation { tasks: added }, cfg);
        labels
    }

    /// One loop iteration: sense, then execute one step unless the d-trace is successful or blocked.
    pub fn iterate(&mut self, events: &mut dyn EventSource, strategy: &mut dyn Strategy) -> Result<IterationResult, EngineError> {
        let tasks = events.observe(self.iteration);
        self.iteration += 1;
        self.observe(tasks);
        if self.status() != Status::Open {
            return Ok(IterationResult::Idle);
        }
        let mut options = exec_all(self.eng, self.trace.last(), ExecOptions::default());
        if options.is_empty() {
            return Ok(IterationResult::Idle);
        }
        let i = strategy.choose(self.trace.last(), &options)?;
        let (step, cfg) = options.swap_remove(i);
        self.trace.push(step, cfg);
        Ok(IterationResult::Progressed)
    }

    /// Iterates up to `max_iterations` times, stopping early once the d-trace is successful
    /// and the source has nothing more to deliver.
    pub fn run(
        &mut self,
        events: &mut dyn EventSource,
        strategy: &mut dyn Strategy,
        max_iterations: usize,
    ) -> Result<Status, EngineError> {
        for _ in 0..max_iterations {
            let r = self.iterate(events, strategy)?;
            if r == IterationResult::Idle && events.exhausted(self.iteration) {
                break;
            }
        }
        Ok(self.status())
    }
}

/// Folds every observation back into the earlier configurations, giving a trace of
/// `⟨T̄, true⟩` from the initial state whose actions are those of the d-trace.
pub fn dtrace_to_trace(dtrace: &Trace) -> Trace {
    let mut entries = dtrace.entries.clone();
    while let Some(k) = entries.iter().rposition(|e| matches!(e.step, Step::Observation { .. })) {
        let Step::Observation { tasks } = entries.remove(k).step else { unreachable!() };
        for e in &mut entries[..k] {
            let cfg = &mut e.config;
            cfg.network.tasks.extend(tasks.clone());
            for l in tasks.keys() {
                cfg.fresh.reserve_label(l);
            }
            match cfg.couples.iter_mut().find(|c| c.origin.is_none()) {
                Some(top) => top.pursued.extend(tasks.clone()),
                None => cfg.couples.insert(0, Couple { origin: None, pursued: tasks.clone(), alternatives: vec![] }),
            }
        }
    }
    Trace { entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn observation_names() {
        let v: Vec<String> = [0, 1, 25, 26, 27].iter().map(|k| observation_name(*k)).collect();
        assert_eq!(v, ["A", "B", "Z", "AA", "AB"]);
    }
}
