//! Execution traces: running a strategy, classifying, validating, and rewriting.

use std::fmt;

use std::collections::BTreeSet;

use crate::acting::{
    apply_reduction, classify_configuration, exec_all, exec_via_action, exec_via_replacement, primary_tasks, Configuration,
    Engine, ExecOptions, Status, Step,
};
use crate::constraints::canonical_form;
use crate::error::EngineError;
use crate::model::{Label, Subst, Task};
use crate::reduction::{relevant_method_bodies, Alternative};
use crate::strategy::Strategy;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub step: Step,
    pub config: Configuration,
}

/// `τ_1 · … · τ_k`; the first entry has step [`Step::Initial`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub entries: Vec<TraceEntry>,
}

impl Trace {
    pub fn new(initial: Configuration) -> Self {
        Trace { entries: vec![TraceEntry { step: Step::Initial, config: initial }] }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last(&self) -> &Configuration {
        &self.entries.last().expect("trace has an initial entry").config
    }

    pub fn push(&mut self, step: Step, config: Configuration) {
        self.entries.push(TraceEntry { step, config });
    }

    pub fn steps(&self) -> impl Iterator<Item = &Step> {
        self.entries.iter().map(|e| &e.step)
    }

    /// `act(T)`: executed actions, ground, in order.
    pub fn actions(&self) -> Vec<(Label, Task)> {
        self.steps()
            .filter_map(|s| match s {
                Step::Action { label, task, .. } => Some((label.clone(), task.clone())),
                _ => None,
            })
            .collect()
    }

    pub fn action_labels(&self) -> Vec<Label> {
        self.actions().into_iter().map(|(l, _)| l).collect()
    }

    pub fn action_tasks(&self) -> Vec<Task> {
        self.actions().into_iter().map(|(_, t)| t).collect()
    }

    pub fn status(&self, eng: &Engine) -> Status {
        classify_configuration(eng, self.last())
    }

    pub fn complete_replacement_free(&self) -> bool {
        !self.steps().any(Step::is_complete_replacement)
    }

    pub fn partial_replacement_free(&self) -> bool {
        !self.steps().any(Step::is_partial_replacement)
    }

    pub fn replacement_free(&self) -> bool {
        !self.steps().any(|s| matches!(s, Step::Replacement { .. }))
    }

    pub fn jump_free(&self) -> bool {
        !self.steps().any(Step::is_jump)
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Initial => f.write_str("initial"),
            Step::Observation { tasks } => {
                f.write_str("observe")?;
                for (l, t) in tasks {
                    write!(f, " {l}:{t}")?;
                }
                Ok(())
            }
            Step::Reduction { label, method, .. } => write!(f, "reduce {label} via {method}"),
            Step::Action { label, task, .. } => write!(f, "act {label}:{task}"),
            Step::Replacement { origin, method, complete, jump, .. } => {
                let o = origin.as_ref().map_or("top".to_string(), |l| l.to_string());
                let kind = if *complete { "complete" } else { "partial" };
                write!(f, "replace {o} by {method} ({kind}{})", if *jump { ", jump" } else { "" })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Successful,
    Blocked,
    /// The step budget ran out first.
    Budget,
    /// Neither successful nor blocked, yet nothing is executable.
    Stalled,
}

#[derive(Clone, Debug)]
pub struct Run {
    pub trace: Trace,
    pub outcome: Outcome,
}

/// Extends `initial` under `strategy` until the trace is successful or blocked, or `max_steps` steps were taken.
pub fn run(
    eng: &Engine,
    initial: Configuration,
    strategy: &mut dyn Strategy,
    max_steps: usize,
    opts: ExecOptions,
) -> Result<Run, EngineError> {
    let mut trace = Trace::new(initial);
    loop {
        match classify_configuration(eng, trace.last()) {
            Status::Successful => return Ok(Run { trace, outcome: Outcome::Successful }),
            Status::Blocked => return Ok(Run { trace, outcome: Outcome::Blocked }),
            Status::Open => {}
        }
        if trace.len() > max_steps {
            return Ok(Run { trace, outcome: Outcome::Budget });
        }
        let mut options = exec_all(eng, trace.last(), opts);
        if options.is_empty() {
            return Ok(Run { trace, outcome: Outcome::Stalled });
        }
        let i = strategy.choose(trace.last(), &options)?;
        let (step, cfg) = options.swap_remove(i);
        trace.push(step, cfg);
    }
}

/// Checks that every entry is one of the executions `exec` offers from its predecessor.
///
/// Reductions are accepted with any fresh labels and variables, not only those the run's generator would pick.
pub fn validate_trace(eng: &Engine, trace: &Trace) -> Result<(), String> {
    let opts = ExecOptions { all_substitutions: true };
    for (k, w) in trace.entries.windows(2).enumerate() {
        let ok = match &w[1].step {
            Step::Reduction { .. } => is_reduction(eng, &w[0].config, &w[1].step, &w[1].config),
            Step::Action { .. } => exec_via_action(eng, &w[0].config, opts)
                .into_iter()
                .any(|(s, c)| s == w[1].step && c.same_as(&w[1].config)),
            Step::Replacement { .. } => exec_via_replacement(eng, &w[0].config)
                .into_iter()
                .any(|(s, c)| s == w[1].step && c.same_as(&w[1].config)),
            Step::Initial | Step::Observation { .. } => false,
        };
        if !ok {
            return Err(format!("step {} ({}) is not an execution of its predecessor", k + 1, w[1].step));
        }
    }
    Ok(())
}

/// Every label and variable `cfg` already uses, including stored alternatives.
fn used_names(cfg: &Configuration) -> (BTreeSet<Label>, BTreeSet<String>) {
    let mut labels = cfg.network.all_labels();
    let mut vars = cfg.network.vars();
    for c in &cfg.couples {
        labels.extend(c.pursued.keys().cloned());
        for a in &c.alternatives {
            labels.extend(a.net.all_labels());
            a.net.collect_vars(&mut vars);
        }
    }
    (labels, vars)
}

fn is_reduction(eng: &Engine, prev: &Configuration, step: &Step, next: &Configuration) -> bool {
    let Step::Reduction { label, task, method, body } = step else { return false };
    if prev.network.tasks.get(label) != Some(task) || !primary_tasks(&prev.network, &eng.domain).contains(label) {
        return false;
    }
    let (labels, vars) = used_names(prev);
    if body.labels().iter().any(|l| labels.contains(l)) || body.vars().difference(&task.vars()).any(|v| vars.contains(v)) {
        return false;
    }
    let mut gen = prev.fresh.clone();
    let Ok(alts) = relevant_method_bodies(task, &eng.domain, &mut gen) else { return false };
    let canon = canonical_form(body);
    let Some(i) = alts.iter().position(|a| a.method == *method && canonical_form(&a.net) == canon) else {
        return false;
    };
    let Some(rest) = next.couple(&Some(label.clone())).map(|c| c.alternatives.clone()) else { return false };
    let expected_rest: Vec<(&String, String)> =
        alts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, a)| (&a.method, canonical_form(&a.net))).collect();
    let got_rest: Vec<(&String, String)> = rest.iter().map(|a| (&a.method, canonical_form(&a.net))).collect();
    if expected_rest != got_rest {
        return false;
    }
    let chosen = Alternative { method: method.clone(), net: body.clone() };
    apply_reduction(prev, label, &chosen, rest).is_ok_and(|c| c.same_as(next))
}

/// Re-executes `step` from `cfg` by its parameters, taking fresh names from `fresh_from`.
///
/// Actions match on the label and on the bindings of the variables `cfg` still has.
pub fn replay_step(
    eng: &Engine,
    cfg: &Configuration,
    step: &Step,
    fresh_from: &Configuration,
) -> Result<(Step, Configuration), EngineError> {
    let mut from = cfg.clone();
    from.fresh = fresh_from.fresh.clone();
    let found = exec_all(eng, &from, ExecOptions { all_substitutions: true }).into_iter().find(|(s, _)| {
        match (s, step) {
            (Step::Action { label: a, theta: x, .. }, Step::Action { label: b, theta: y, .. }) => {
                a == b && x.iter().all(|(v, t)| y.get(v).is_none_or(|u| u == t))
            }
            (Step::Reduction { label: a, method: x, .. }, Step::Reduction { label: b, method: y, .. }) => {
                a == b && x == y
            }
            (Step::Replacement { origin: a, method: x, .. }, Step::Replacement { origin: b, method: y, .. }) => {
                a == b && x == y
            }
            _ => false,
        }
    });
    found.ok_or_else(|| EngineError::Rewrite(format!("cannot replay '{step}'")))
}

/// The reduction `red` redone with `method` instead, reusing the body stored for it as an alternative
/// so that later steps keep their labels. The abandoned body becomes an alternative in its place.
fn fold_reduction(
    eng: &Engine,
    prev: &Configuration,
    red: &TraceEntry,
    method: &str,
) -> Result<(Step, Configuration), EngineError> {
    let Step::Reduction { label, task, method: old, body } = &red.step else {
        return Err(EngineError::Rewrite("expected a reduction".into()));
    };
    let stored = red.config.couple(&Some(label.clone())).map(|c| c.alternatives.clone()).unwrap_or_default();
    let chosen = stored
        .iter()
        .find(|a| a.method == method)
        .cloned()
        .ok_or_else(|| EngineError::Rewrite(format!("{method} is not an alternative for {label}")))?;
    let mut rest: Vec<Alternative> = stored.into_iter().filter(|a| a.method != method).collect();
    rest.push(Alternative { method: old.clone(), net: body.clone() });
    let rank = |m: &str| eng.domain.methods.iter().position(|d| d.name == m);
    rest.sort_by_key(|a| rank(&a.method));
    let mut cfg = apply_reduction(prev, label, &chosen, rest)?;
    cfg.fresh = red.config.fresh.clone();
    let step = Step::Reduction { label: label.clone(), task: task.clone(), method: method.to_string(), body: chosen.net };
    Ok((step, cfg))
}

/// Rewrites a trace into one free of complete replacements with the same actions and no more steps.
///
/// Each complete replacement of the couple for `n` by `d′` is folded into the reduction of `n`,
/// which then picks `d′` directly; the steps that expanded the abandoned body are dropped and the rest replayed.
pub fn eliminate_complete_replacements(eng: &Engine, trace: &Trace) -> Result<Trace, EngineError> {
    let mut cur = trace.clone();
    while let Some(m) = cur.entries.iter().position(|e| e.step.is_complete_replacement()) {
        let Step::Replacement { origin: Some(n), method: d_new, .. } = &cur.entries[m].step else {
            return Err(EngineError::Rewrite("complete replacement of the top-level couple".into()));
        };
        let i = cur.entries[..m]
            .iter()
            .rposition(|e| matches!(&e.step, Step::Reduction { label, .. } if label == n))
            .ok_or_else(|| EngineError::Rewrite(format!("no reduction of {n} precedes the replacement")))?;

        let mut out = Trace { entries: cur.entries[..i].to_vec() };
        let (s, c) = fold_reduction(eng, out.last(), &cur.entries[i], d_new)?;
        out.push(s, c);
        for k in i + 1..cur.entries.len() {
            if k == m {
                continue;
            }
            let step = &cur.entries[k].step;
            let skip = match step {
                Step::Reduction { label, .. } => k < m && !out.last().network.tasks.contains_key(label),
                Step::Replacement { origin, .. } => k < m && out.last().couple(origin).is_none(),
                _ => false,
            };
            if skip {
                continue;
            }
            let (s, c) = replay_step(eng, out.last(), step, &cur.entries[k - 1].config)?;
            out.push(s, c);
        }
        if out.len() >= cur.len() {
            return Err(EngineError::Rewrite("rewrite did not shorten the trace".into()));
        }
        cur = out;
    }
    Ok(cur)
}
