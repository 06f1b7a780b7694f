//! Domain validation against the structural assumptions the semantics relies on.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::constraints::{transitive_closure, ConstraintBody, TaskRef};
use crate::model::{Domain, Label, Subst, Term, EQ};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Check {
    /// A method body must have more than one task.
    BodySize,
    /// Some body task follows all others and carries no after-constraint.
    TrailingTask,
    /// `φ*` contains `(n ≺ n′)` and `(n′ ≺ n)`.
    OrderingCycle,
    /// `φ*` contains `(n ≺ n′)` and `¬(n ≺ n′)`.
    NegatedOrderingConflict,
    /// Constraint mentions a label that is not a body task.
    DanglingLabel,
    /// Method head arguments must be distinct variables.
    HeadArguments,
    /// Task symbol with no operator and no method.
    UnknownTask,
    /// Symbol is both operator-backed and method-backed.
    SymbolKind,
    /// Symbol used with differing arities.
    Arity,
    /// Operator mentions a variable that is not a parameter.
    OperatorVariable,
    /// Negated ordering whose left side is a non-primitive task: it never keeps that task out of `primary`.
    NegatedOrderingOnNonPrimitive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub severity: Severity,
    pub check: Check,
    /// Offending method or operator.
    pub item: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev}: {:?} in {}: {}", self.check, self.item, self.detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    /// No error-level violations.
    pub fn is_valid(&self) -> bool {
        self.violations.iter().all(|v| v.severity == Severity::Warning)
    }

    pub fn has(&self, check: Check) -> bool {
        self.violations.iter().any(|v| v.check == check)
    }

    fn push(&mut self, severity: Severity, check: Check, item: &str, detail: String) {
        self.violations.push(Violation { severity, check, item: item.to_string(), detail });
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_domain(d: &Domain) -> Report {
    let mut r = Report::default();
    let heads: BTreeSet<&str> = d.methods.iter().map(|m| m.head.name.as_str()).collect();
    for h in &heads {
        if d.operators.contains_key(*h) {
            r.push(Severity::Error, Check::SymbolKind, h, "symbol has both an operator and methods".into());
        }
    }

    let mut task_arity: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut pred_arity: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let note = |map: &mut BTreeMap<String, (usize, String)>, r: &mut Report, name: &str, n: usize, item: &str| {
        match map.get(name) {
            Some((k, first)) if *k != n => r.push(
                Severity::Error,
                Check::Arity,
                item,
                format!("{name} used with arity {n}, but arity {k} in {first}"),
            ),
            Some(_) => {}
            None => {
                map.insert(name.to_string(), (n, item.to_string()));
            }
        }
    };

    for o in d.operators.values() {
        note(&mut task_arity, &mut r, &o.name, o.params.len(), &o.name);
        let params: BTreeSet<&String> = o.params.iter().collect();
        if params.len() != o.params.len() {
            r.push(Severity::Error, Check::OperatorVariable, &o.name, "repeated parameter".into());
        }
        let mut vars = BTreeSet::new();
        o.pre.collect_vars(&mut vars);
        o.add.collect_vars(&mut vars);
        o.del.collect_vars(&mut vars);
        for v in vars.iter().filter(|v| !params.contains(v)) {
            r.push(Severity::Error, Check::OperatorVariable, &o.name, format!("variable {v} is not a parameter"));
        }
        for a in o.pre.iter().map(|l| &l.atom).chain(&o.add).chain(&o.del) {
            if a.pred != EQ {
                note(&mut pred_arity, &mut r, &a.pred, a.args.len(), &o.name);
            }
        }
    }

    for m in &d.methods {
        let item = m.name.as_str();
        note(&mut task_arity, &mut r, &m.head.name, m.head.args.len(), item);
        let mut seen = BTreeSet::new();
        for a in &m.head.args {
            match a {
                Term::Var(v) if seen.insert(v.clone()) => {}
                _ => r.push(
                    Severity::Error,
                    Check::HeadArguments,
                    item,
                    format!("head {} must have distinct variable arguments", m.head),
                ),
            }
        }

        let body = &m.body;
        let labels = body.labels();
        if body.tasks.len() <= 1 {
            r.push(Severity::Error, Check::BodySize, item, format!("body has {} task(s)", body.tasks.len()));
        }
        for t in body.tasks.values() {
            note(&mut task_arity, &mut r, &t.name, t.args.len(), item);
            if d.kind(t).is_none() {
                r.push(Severity::Error, Check::UnknownTask, item, format!("no operator or method for {}", t.name));
            }
        }
        for c in &body.formula {
            for l in c.labels() {
                if !labels.contains(&l) {
                    r.push(Severity::Error, Check::DanglingLabel, item, format!("{c} mentions unknown label {l}"));
                }
            }
            if let Some(lit) = c.literal() {
                if lit.atom.pred != EQ {
                    note(&mut pred_arity, &mut r, &lit.atom.pred, lit.atom.args.len(), item);
                }
            }
            if let (true, ConstraintBody::Order(TaskRef::Label(n), _)) = (c.negated, &c.body) {
                if body.tasks.get(n).is_some_and(|t| !d.is_primitive(t)) {
                    r.push(
                        Severity::Warning,
                        Check::NegatedOrderingOnNonPrimitive,
                        item,
                        format!("{c}: non-primitive {n} stays primary"),
                    );
                }
            }
        }

        let star = transitive_closure(&body.formula);
        let mut before: BTreeSet<(Label, Label)> = BTreeSet::new();
        let mut not_before: BTreeSet<(Label, Label)> = BTreeSet::new();
        for c in &star {
            if let ConstraintBody::Order(x, y) = &c.body {
                for a in x.labels() {
                    for b in y.labels() {
                        if c.negated {
                            not_before.insert((a.clone(), b.clone()));
                        } else {
                            before.insert((a.clone(), b));
                        }
                    }
                }
            }
        }
        let mut cyc = BTreeSet::new();
        for (a, b) in &before {
            if (a == b || before.contains(&(b.clone(), a.clone()))) && cyc.insert(a.min(b).clone()) {
                r.push(Severity::Error, Check::OrderingCycle, item, format!("{a} and {b} are mutually ordered"));
            }
        }
        for p in not_before.intersection(&before) {
            r.push(
                Severity::Error,
                Check::NegatedOrderingConflict,
                item,
                format!("({} < {}) conflicts with its negation", p.0, p.1),
            );
        }

        let trailing = labels.iter().any(|n| {
            labels.iter().filter(|o| *o != n).all(|o| before.contains(&(o.clone(), n.clone())))
                && !body.formula.iter().any(|c| matches!(&c.body, ConstraintBody::After(x, _) if x.mentions(n)))
        });
        if !trailing && body.tasks.len() > 1 {
            r.push(
                Severity::Error,
                Check::TrailingTask,
                item,
                "no task is ordered after all others without an after-constraint".into(),
            );
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{Constraint, TaskNetwork};
    use crate::model::{Method, Operator, Task};

    fn dom(body: TaskNetwork) -> Domain {
        let mut d = Domain::new("t");
        d.operators.insert(
            "a".into(),
            Operator { name: "a".into(), params: vec![], pre: vec![], add: vec![], del: vec![] },
        );
        d.methods.push(Method { name: "m".into(), head: Task::new("top", vec![]), body });
        d
    }

    fn ord(a: &str, b: &str) -> Constraint {
        Constraint::order(TaskRef::label(a), TaskRef::label(b))
    }

    fn tasks(ls: &[&str]) -> Vec<(Label, Task)> {
        ls.iter().map(|l| (Label::from(*l), Task::new("a", vec![]))).collect()
    }

    #[test]
    fn cycle_reported() {
        let d = dom(TaskNetwork::new(tasks(&["1", "2", "3"]), [ord("1", "2"), ord("2", "3"), ord("3", "1")]));
        let r = validate_domain(&d);
        assert!(r.has(Check::OrderingCycle));
        assert!(!r.is_valid());
    }

    #[test]
    fn single_task_reported() {
        let d = dom(TaskNetwork::new(tasks(&["1"]), []));
        assert!(validate_domain(&d).has(Check::BodySize));
    }

    #[test]
    fn chain_has_trailing_task() {
        let d = dom(TaskNetwork::new(tasks(&["1", "2", "3"]), [ord("1", "2"), ord("2", "3")]));
        assert!(validate_domain(&d).is_empty());
        let d = dom(TaskNetwork::new(tasks(&["1", "2"]), []));
        assert!(validate_domain(&d).has(Check::TrailingTask));
    }

    #[test]
    fn negated_conflict_reported() {
        let d = dom(TaskNetwork::new(
            tasks(&["1", "2", "3"]),
            [ord("1", "2"), ord("2", "3"), ord("1", "3").negate()],
        ));
        assert!(validate_domain(&d).has(Check::NegatedOrderingConflict));
    }
}
