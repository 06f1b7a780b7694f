//! Relevant method bodies and task reduction.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::constraints::{ConstraintBody, TaskNetwork, TaskRef};
use crate::error::EngineError;
use crate::model::{match_task, Domain, Fresh, Label, Subst, Substitution, Task, Term};

/// A fresh, instantiated method body together with the method it came from.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Alternative {
    pub method: String,
    pub net: TaskNetwork,
}

/// `rel(t, D)` in method declaration order, each body renamed apart through `gen`.
pub fn relevant_method_bodies(t: &Task, domain: &Domain, gen: &mut Fresh) -> Result<Vec<Alternative>, EngineError> {
    if domain.is_primitive(t) {
        return Err(EngineError::Contract(format!("{t} is primitive and has no methods")));
    }
    let mut out = Vec::new();
    for m in &domain.methods {
        if m.head.name != t.name || m.head.args.len() != t.args.len() {
            continue;
        }
        // Rename every method variable first so head variables never capture caller variables.
        let mut vars = m.head.vars();
        m.body.collect_vars(&mut vars);
        let mut rename = Substitution::new();
        for v in vars {
            let fresh = gen.var(&v);
            rename.bind(v, Term::Var(fresh));
        }
        let head = m.head.subst(&rename);
        let Some(theta) = match_task(t, &head) else { continue };
        let labels: std::collections::BTreeMap<Label, Label> =
            m.body.tasks.keys().map(|l| (l.clone(), gen.label(l.base()))).collect();
        let net = m
            .body
            .relabel(&|l: &Label| labels.get(l).cloned().unwrap_or_else(|| l.clone()))
            .subst(&rename)
            .subst(&theta);
        out.push(Alternative { method: m.name.clone(), net });
    }
    Ok(out)
}

/// Whether any method head matches `t`.
pub fn has_relevant_method(t: &Task, domain: &Domain) -> bool {
    domain.methods.iter().any(|m| {
        m.head.name == t.name && m.head.args.len() == t.args.len() && match_task(t, &m.head).is_some()
    })
}

/// `red(d, n, d′)`.
pub fn reduce(d: &TaskNetwork, n: &Label, sub: &TaskNetwork) -> Result<TaskNetwork, EngineError> {
    if !d.tasks.contains_key(n) {
        return Err(EngineError::Contract(format!("label {n} is not in the network")));
    }
    let new: BTreeSet<Label> = sub.labels();
    if let Some(clash) = new.iter().find(|l| *l != n && d.all_labels().contains(*l)) {
        return Err(EngineError::Contract(format!("label {clash} of the method body is not fresh")));
    }
    let left = |x: &TaskRef| -> TaskRef {
        match x {
            TaskRef::Label(l) if l == n => TaskRef::Last(new.clone()),
            other => swap_in_set(other, n, &new),
        }
    };
    let right = |x: &TaskRef| -> TaskRef {
        match x {
            TaskRef::Label(l) if l == n => TaskRef::First(new.clone()),
            other => swap_in_set(other, n, &new),
        }
    };
    let mut formula = sub.formula.clone();
    for c in &d.formula {
        let body = match &c.body {
            ConstraintBody::Order(x, y) => ConstraintBody::Order(left(x), right(y)),
            ConstraintBody::Before(l, x) => ConstraintBody::Before(l.clone(), right(x)),
            ConstraintBody::After(x, l) => ConstraintBody::After(left(x), l.clone()),
            ConstraintBody::Between(x, l, y) => ConstraintBody::Between(left(x), l.clone(), right(y)),
        };
        formula.insert(crate::constraints::Constraint { negated: c.negated, body });
    }
    let mut tasks = d.tasks.clone();
    tasks.remove(n);
    tasks.extend(sub.tasks.iter().map(|(l, t)| (l.clone(), t.clone())));
    Ok(TaskNetwork { tasks, formula })
}

fn swap_in_set(x: &TaskRef, n: &Label, new: &BTreeSet<Label>) -> TaskRef {
    let swap = |s: &BTreeSet<Label>| -> BTreeSet<Label> {
        if s.contains(n) {
            s.iter().filter(|l| *l != n).chain(new.iter()).cloned().collect()
        } else {
            s.clone()
        }
    };
    match x {
        TaskRef::Label(l) => TaskRef::Label(l.clone()),
        TaskRef::First(s) => TaskRef::First(swap(s)),
        TaskRef::Last(s) => TaskRef::Last(swap(s)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::Constraint;
    use crate::model::{Atom, Literal};

    fn l(s: &str) -> TaskRef {
        TaskRef::label(s)
    }

    fn d2() -> TaskNetwork {
        TaskNetwork::new(
            [
                (Label::from("6"), Task::new("navigate", vec![Term::var("L")])),
                (Label::from("7"), Task::ground("uploadData", &["loc1"])),
            ],
            [
                Constraint::before(Literal::pos(Atom::new("lander", vec![Term::var("L")])), l("6")),
                Constraint::before(Literal::pos(Atom::ground("didExp", &["loc1"])), l("6")),
                Constraint::order(l("6"), l("7")),
            ],
        )
    }

    #[test]
    fn reduce_transmit_with_m2() {
        let d = TaskNetwork::new(
            [
                (Label::from("A"), Task::ground("transmitData", &["loc1"])),
                (Label::from("B"), Task::ground("charge", &[])),
            ],
            [Constraint::order(l("A"), l("B"))],
        );
        let out = reduce(&d, &Label::from("A"), &d2()).unwrap();
        let labels: Vec<&str> = out.tasks.keys().map(|l| l.as_str()).collect();
        assert_eq!(labels, ["6", "7", "B"]);
        let mut expected = d2().formula;
        expected.insert(Constraint::order(TaskRef::last(["6", "7"]), l("B")));
        assert_eq!(out.formula, expected);
        assert_eq!(out.tasks.len(), d.tasks.len() - 1 + 2);
    }

    #[test]
    fn before_on_reduced_task_moves_to_first() {
        let p = Literal::pos(Atom::ground("p", &[]));
        let d = TaskNetwork::new(
            [(Label::from("A"), Task::ground("transmitData", &["loc1"]))],
            [Constraint::before(p.clone(), l("A"))],
        );
        let out = reduce(&d, &Label::from("A"), &d2()).unwrap();
        assert!(out.formula.contains(&Constraint::before(p, TaskRef::first(["6", "7"]))));
    }

    #[test]
    fn unrelated_formula_is_kept() {
        let d = TaskNetwork::new(
            [
                (Label::from("A"), Task::ground("transmitData", &["loc1"])),
                (Label::from("B"), Task::ground("charge", &[])),
                (Label::from("C"), Task::ground("charge", &[])),
            ],
            [Constraint::order(l("B"), l("C"))],
        );
        let out = reduce(&d, &Label::from("A"), &d2()).unwrap();
        let mut expected = d2().formula;
        expected.extend(d.formula.iter().cloned());
        assert_eq!(out.formula, expected);
    }

    #[test]
    fn missing_label_is_contract_error() {
        assert!(reduce(&d2(), &Label::from("Z"), &d2()).is_err());
    }
}
