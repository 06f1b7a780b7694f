//! JSON export of traces and d-traces with a fixed field order.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::acting::{Configuration, Couple, Step};
use crate::io::constraint_text;
use crate::trace::Trace;

#[derive(Clone, Debug, Default, Serialize)]
pub struct Header {
    pub domain: String,
    pub problem: String,
    pub strategy: String,
    pub seed: Option<u64>,
    pub outcome: String,
}

#[derive(Serialize)]
struct Document<'a> {
    header: &'a Header,
    actions: Vec<String>,
    steps: Vec<StepRecord>,
}

#[derive(Serialize)]
struct StepRecord {
    index: usize,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    task: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    origin: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    complete: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    jump: Option<bool>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    observed: BTreeMap<String, String>,
    added: Vec<String>,
    deleted: Vec<String>,
    tasks: BTreeMap<String, String>,
    constraints: Vec<String>,
    couples: Vec<CoupleRecord>,
}

#[derive(Serialize)]
struct CoupleRecord {
    origin: String,
    pursued: Vec<String>,
    alternatives: Vec<String>,
}

fn couple_record(c: &Couple) -> CoupleRecord {
    CoupleRecord {
        origin: c.origin.as_ref().map_or("top".into(), |l| l.to_string()),
        pursued: c.pursued.keys().map(|l| l.to_string()).collect(),
        alternatives: c.alternatives.iter().map(|a| a.method.clone()).collect(),
    }
}

fn record(index: usize, step: &Step, prev: Option<&Configuration>, cfg: &Configuration) -> StepRecord {
    let (added, deleted) = match prev {
        Some(p) => (
            cfg.state.0.difference(&p.state.0).map(|a| a.to_string()).collect(),
            p.state.0.difference(&cfg.state.0).map(|a| a.to_string()).collect(),
        ),
        None => (cfg.state.atoms().map(|a| a.to_string()).collect(), vec![]),
    };
    let mut r = StepRecord {
        index,
        kind: "initial",
        label: None,
        task: None,
        method: None,
        origin: None,
        complete: None,
        jump: None,
        observed: BTreeMap::new(),
        added,
        deleted,
        tasks: cfg.network.tasks.iter().map(|(l, t)| (l.to_string(), t.to_string())).collect(),
        constraints: cfg.network.formula.iter().map(constraint_text).collect(),
        couples: cfg.couples.iter().map(couple_record).collect(),
    };
    match step {
        Step::Initial => {}
        Step::Observation { tasks } => {
            r.kind = "observation";
            r.observed = tasks.iter().map(|(l, t)| (l.to_string(), t.to_string())).collect();
        }
        Step::Reduction { label, task, method, .. } => {
            r.kind = "reduction";
            r.label = Some(label.to_string());
            r.task = Some(task.to_string());
            r.method = Some(method.clone());
        }
        Step::Action { label, task, .. } => {
            r.kind = "action";
            r.label = Some(label.to_string());
            r.task = Some(task.to_string());
        }
        Step::Replacement { origin, method, complete, jump, .. } => {
            r.kind = "replacement";
            r.origin = Some(origin.as_ref().map_or("top".into(), |l| l.to_string()));
            r.method = Some(method.clone());
            r.complete = Some(*complete);
            r.jump = Some(*jump);
        }
    }
    r
}

/// Pretty-printed JSON, newline-terminated.
pub fn export_trace(header: &Header, trace: &Trace) -> String {
    let steps = trace
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| record(i, &e.step, i.checked_sub(1).map(|j| &trace.entries[j].config), &e.config))
        .collect();
    let actions = trace.actions().iter().map(|(l, t)| format!("{l}:{t}")).collect();
    let doc = Document { header, actions, steps };
    let mut s = serde_json::to_string_pretty(&doc).expect("export document serialises");
    s.push('\n');
    s
}

/// Header-only document for an empty trace.
pub fn export_header(header: &Header) -> String {
    let doc = Document { header, actions: vec![], steps: vec![] };
    let mut s = serde_json::to_string_pretty(&doc).expect("export document serialises");
    s.push('\n');
    s
}
