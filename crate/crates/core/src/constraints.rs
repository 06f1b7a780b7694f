//! Constraint formulas over labelled tasks, and task networks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{Label, Literal, State, Subst, Substitution, Task, Term, EQ};

/// A task label, or `first[L]` / `last[L]` over a label set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TaskRef {
    Label(Label),
    First(BTreeSet<Label>),
    Last(BTreeSet<Label>),
}

impl TaskRef {
    pub fn label(l: impl Into<Label>) -> Self {
        TaskRef::Label(l.into())
    }

    pub fn first<I: IntoIterator<Item = L>, L: Into<Label>>(ls: I) -> Self {
        TaskRef::First(ls.into_iter().map(Into::into).collect())
    }

    pub fn last<I: IntoIterator<Item = L>, L: Into<Label>>(ls: I) -> Self {
        TaskRef::Last(ls.into_iter().map(Into::into).collect())
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        match self {
            TaskRef::Label(l) => std::iter::once(l.clone()).collect(),
            TaskRef::First(s) | TaskRef::Last(s) => s.clone(),
        }
    }

    pub fn mentions(&self, n: &Label) -> bool {
        match self {
            TaskRef::Label(l) => l == n,
            TaskRef::First(s) | TaskRef::Last(s) => s.contains(n),
        }
    }

    /// `n` itself, or a `first[]` set containing `n`.
    pub fn is_or_first_of(&self, n: &Label) -> bool {
        match self {
            TaskRef::Label(l) => l == n,
            TaskRef::First(s) => s.contains(n),
            TaskRef::Last(_) => false,
        }
    }

    fn map_sets(&self, f: &dyn Fn(&BTreeSet<Label>) -> BTreeSet<Label>) -> TaskRef {
        match self {
            TaskRef::Label(l) => TaskRef::Label(l.clone()),
            TaskRef::First(s) => TaskRef::First(f(s)),
            TaskRef::Last(s) => TaskRef::Last(f(s)),
        }
    }

    fn relabel(&self, f: &dyn Fn(&Label) -> Label) -> TaskRef {
        match self {
            TaskRef::Label(l) => TaskRef::Label(f(l)),
            TaskRef::First(s) => TaskRef::First(s.iter().map(f).collect()),
            TaskRef::Last(s) => TaskRef::Last(s.iter().map(f).collect()),
        }
    }
}

impl fmt::Display for TaskRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |f: &mut fmt::Formatter<'_>, kw: &str, s: &BTreeSet<Label>| {
            write!(f, "{kw}[")?;
            for (i, l) in s.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{l}")?;
            }
            f.write_str("]")
        };
        match self {
            TaskRef::Label(l) => write!(f, "{l}"),
            TaskRef::First(s) => set(f, "first", s),
            TaskRef::Last(s) => set(f, "last", s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConstraintBody {
    /// `(x ≺ x′)`
    Order(TaskRef, TaskRef),
    /// `(l, x)`: `l` holds just before `x`.
    Before(Literal, TaskRef),
    /// `(x, l)`: `l` holds just after `x`.
    After(TaskRef, Literal),
    /// `(x, l, x′)`: `l` holds in every state between `x` and `x′`.
    Between(TaskRef, Literal, TaskRef),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Constraint {
    pub negated: bool,
    pub body: ConstraintBody,
}

impl Constraint {
    pub fn pos(body: ConstraintBody) -> Self {
        Constraint { negated: false, body }
    }

    pub fn neg(body: ConstraintBody) -> Self {
        Constraint { negated: true, body }
    }

    pub fn order(x: TaskRef, y: TaskRef) -> Self {
        Self::pos(ConstraintBody::Order(x, y))
    }

    pub fn before(l: Literal, x: TaskRef) -> Self {
        Self::pos(ConstraintBody::Before(l, x))
    }

    pub fn after(x: TaskRef, l: Literal) -> Self {
        Self::pos(ConstraintBody::After(x, l))
    }

    pub fn between(x: TaskRef, l: Literal, y: TaskRef) -> Self {
        Self::pos(ConstraintBody::Between(x, l, y))
    }

    pub fn negate(mut self) -> Self {
        self.negated = !self.negated;
        self
    }

    pub fn refs(&self) -> Vec<&TaskRef> {
        match &self.body {
            ConstraintBody::Order(x, y) | ConstraintBody::Between(x, _, y) => vec![x, y],
            ConstraintBody::Before(_, x) | ConstraintBody::After(x, _) => vec![x],
        }
    }

    pub fn literal(&self) -> Option<&Literal> {
        match &self.body {
            ConstraintBody::Order(..) => None,
            ConstraintBody::Before(l, _) | ConstraintBody::After(_, l) | ConstraintBody::Between(_, l, _) => Some(l),
        }
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.refs().into_iter().flat_map(|r| r.labels()).collect()
    }

    pub fn mentions(&self, n: &Label) -> bool {
        self.refs().iter().any(|r| r.mentions(n))
    }

    pub fn map_refs(&self, f: &dyn Fn(&TaskRef) -> TaskRef) -> Constraint {
        let body = match &self.body {
            ConstraintBody::Order(x, y) => ConstraintBody::Order(f(x), f(y)),
            ConstraintBody::Before(l, x) => ConstraintBody::Before(l.clone(), f(x)),
            ConstraintBody::After(x, l) => ConstraintBody::After(f(x), l.clone()),
            ConstraintBody::Between(x, l, y) => ConstraintBody::Between(f(x), l.clone(), f(y)),
        };
        Constraint { negated: self.negated, body }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        match &self.body {
            ConstraintBody::Order(x, y) => write!(f, "ord {x} {y}"),
            ConstraintBody::Before(l, x) => write!(f, "before {l} {x}"),
            ConstraintBody::After(x, l) => write!(f, "after {x} {l}"),
            ConstraintBody::Between(x, l, y) => write!(f, "between {x} {l} {y}"),
        }
    }
}

impl Subst for Constraint {
    fn subst(&self, theta: &Substitution) -> Self {
        let body = match &self.body {
            ConstraintBody::Order(..) => self.body.clone(),
            ConstraintBody::Before(l, x) => ConstraintBody::Before(l.subst(theta), x.clone()),
            ConstraintBody::After(x, l) => ConstraintBody::After(x.clone(), l.subst(theta)),
            ConstraintBody::Between(x, l, y) => ConstraintBody::Between(x.clone(), l.subst(theta), y.clone()),
        };
        Constraint { negated: self.negated, body }
    }
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        if let Some(l) = self.literal() {
            l.collect_vars(out);
        }
    }
    fn collect_consts(&self, out: &mut BTreeSet<String>) {
        if let Some(l) = self.literal() {
            l.collect_consts(out);
        }
    }
}

/// A conjunctive constraint formula, kept as a set.
pub type Formula = BTreeSet<Constraint>;

/// `φ*`: adds `(a ≺ c)` for every ordering chain of length two or more.
///
/// Set references contribute an edge from each label on the left to each label on the right.
pub fn transitive_closure(phi: &Formula) -> Formula {
    let mut succ: BTreeMap<Label, BTreeSet<Label>> = BTreeMap::new();
    for c in phi {
        if let (false, ConstraintBody::Order(x, y)) = (c.negated, &c.body) {
            for a in x.labels() {
                succ.entry(a).or_default().extend(y.labels());
            }
        }
    }
    let mut out = phi.clone();
    for start in succ.keys() {
        // Labels reachable in two or more steps.
        let mut seen: BTreeSet<Label> = BTreeSet::new();
        let mut stack: Vec<Label> = succ[start].iter().cloned().collect();
        while !stack.is_empty() {
            let mut next = Vec::new();
            for b in stack.drain(..) {
                if let Some(cs) = succ.get(&b) {
                    for c in cs {
                        if seen.insert(c.clone()) {
                            next.push(c.clone());
                        }
                    }
                }
            }
            stack = next;
        }
        for c in seen {
            out.insert(Constraint::order(TaskRef::Label(start.clone()), TaskRef::Label(c)));
        }
    }
    out
}

/// Replaces `n` by `ls` inside every `first[]`/`last[]` set.
pub fn rewrite_labels(phi: &Formula, n: &Label, ls: &BTreeSet<Label>) -> Formula {
    let swap = |s: &BTreeSet<Label>| -> BTreeSet<Label> {
        if s.contains(n) {
            s.iter().filter(|l| *l != n).cloned().chain(ls.iter().cloned()).collect()
        } else {
            s.clone()
        }
    };
    phi.iter().map(|c| c.map_refs(&|r| r.map_sets(&swap))).collect()
}

/// Replaces every label of `old` occurring inside a set by all of `new`.
pub fn rewrite_label_set(phi: &Formula, old: &BTreeSet<Label>, new: &BTreeSet<Label>) -> Formula {
    let swap = |s: &BTreeSet<Label>| -> BTreeSet<Label> {
        if s.iter().any(|l| old.contains(l)) {
            s.iter().filter(|l| !old.contains(*l)).cloned().chain(new.iter().cloned()).collect()
        } else {
            s.clone()
        }
    };
    phi.iter().map(|c| c.map_refs(&|r| r.map_sets(&swap))).collect()
}

/// Removes `n` from every `last[]` set.
pub fn drop_from_last(phi: &Formula, n: &Label) -> Formula {
    phi.iter()
        .map(|c| {
            c.map_refs(&|r| match r {
                TaskRef::Last(s) => TaskRef::Last(s.iter().filter(|l| *l != n).cloned().collect()),
                other => other.clone(),
            })
        })
        .collect()
}

/// Closed-world evaluation of a ground literal.
pub fn holds(l: &Literal, state: &State) -> bool {
    debug_assert!(l.is_ground(), "holds() on non-ground literal {l}");
    let truth = if l.atom.pred == EQ && l.atom.args.len() == 2 {
        l.atom.args[0] == l.atom.args[1]
    } else {
        state.contains(&l.atom)
    };
    truth == l.positive
}

/// `⟨S, φ⟩`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TaskNetwork {
    pub tasks: BTreeMap<Label, Task>,
    pub formula: Formula,
}

impl TaskNetwork {
    pub fn new(tasks: impl IntoIterator<Item = (Label, Task)>, formula: impl IntoIterator<Item = Constraint>) -> Self {
        TaskNetwork { tasks: tasks.into_iter().collect(), formula: formula.into_iter().collect() }
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.tasks.keys().cloned().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    /// Every label, including ones only mentioned by constraints.
    pub fn all_labels(&self) -> BTreeSet<Label> {
        let mut out = self.labels();
        for c in &self.formula {
            out.extend(c.labels());
        }
        out
    }

    pub fn relabel(&self, f: &dyn Fn(&Label) -> Label) -> TaskNetwork {
        TaskNetwork {
            tasks: self.tasks.iter().map(|(l, t)| (f(l), t.clone())).collect(),
            formula: self.formula.iter().map(|c| c.map_refs(&|r| r.relabel(f))).collect(),
        }
    }
}

impl fmt::Display for TaskNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<{")?;
        for (i, (l, t)) in self.tasks.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}:{t}")?;
        }
        f.write_str("}, {")?;
        for (i, c) in self.formula.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("}>")
    }
}

impl Subst for TaskNetwork {
    fn subst(&self, theta: &Substitution) -> Self {
        if theta.is_empty() {
            return self.clone();
        }
        TaskNetwork {
            tasks: self.tasks.iter().map(|(l, t)| (l.clone(), t.subst(theta))).collect(),
            formula: self.formula.iter().map(|c| c.subst(theta)).collect(),
        }
    }
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        self.tasks.values().for_each(|t| t.collect_vars(out));
        self.formula.iter().for_each(|c| c.collect_vars(out));
    }
    fn collect_consts(&self, out: &mut BTreeSet<String>) {
        self.tasks.values().for_each(|t| t.collect_consts(out));
        self.formula.iter().for_each(|c| c.collect_consts(out));
    }
}

/// Label- and variable-bijection-invariant form of a network, for comparisons in tests and memo tables.
pub fn canonical_form(d: &TaskNetwork) -> String {
    // Labels are renamed by the sorted rendering of their tasks; ties broken by the constraints they
    // participate in. Exact for the small networks this is used on.
    let mut order: Vec<(&Label, String)> = d.tasks.iter().map(|(l, t)| (l, t.to_string())).collect();
    let sig = |l: &Label| -> String {
        let mut v: Vec<String> = d
            .formula
            .iter()
            .filter(|c| c.mentions(l))
            .map(|c| {
                c.map_refs(&|r| r.relabel(&|x| if x == l { Label::from("@") } else { Label::from("_") }))
                    .to_string()
            })
            .collect();
        v.sort();
        v.join(";")
    };
    order.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| sig(a.0).cmp(&sig(b.0))));
    let map: BTreeMap<Label, Label> =
        order.iter().enumerate().map(|(i, (l, _))| ((*l).clone(), Label(format!("t{i}")))).collect();
    let renamed = d.relabel(&|l| map.get(l).cloned().unwrap_or_else(|| Label(format!("?{l}"))));
    let mut vars: Vec<String> = Vec::new();
    for t in renamed.tasks.values() {
        for a in &t.args {
            if let Term::Var(v) = a {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
        }
    }
    for v in renamed.vars() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let mut theta = Substitution::new();
    for (i, v) in vars.iter().enumerate() {
        theta.bind(v.clone(), Term::Var(format!("V{i}")));
    }
    renamed.subst(&theta).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Atom;

    fn l(s: &str) -> TaskRef {
        TaskRef::label(s)
    }

    #[test]
    fn closure_adds_chain() {
        let phi: Formula = [Constraint::order(l("1"), l("2")), Constraint::order(l("2"), l("3"))].into();
        let star = transitive_closure(&phi);
        assert!(star.contains(&Constraint::order(l("1"), l("3"))));
        assert_eq!(star.len(), 3);
        assert_eq!(transitive_closure(&star), star);
        assert!(transitive_closure(&Formula::new()).is_empty());
        let one: Formula = [Constraint::order(l("a"), l("b"))].into();
        assert_eq!(transitive_closure(&one), one);
    }

    #[test]
    fn rewrite_examples() {
        let lander = Literal::pos(Atom::new("lander", vec![Term::var("L")]));
        let phi: Formula = [Constraint::before(lander.clone(), TaskRef::first(["11", "12"]))].into();
        let old: BTreeSet<Label> = ["11", "12"].iter().map(|s| Label::from(*s)).collect();
        let new: BTreeSet<Label> = ["8", "9", "10"].iter().map(|s| Label::from(*s)).collect();
        let out = rewrite_label_set(&phi, &old, &new);
        assert!(out.contains(&Constraint::before(lander, TaskRef::first(["8", "9", "10"]))));
        assert_eq!(rewrite_labels(&phi, &Label::from("7"), &new), phi);

        let ord: Formula = [Constraint::order(TaskRef::last(["11", "12"]), l("7"))].into();
        let out = drop_from_last(&ord, &Label::from("11"));
        assert!(out.contains(&Constraint::order(TaskRef::last(["12"]), l("7"))));
    }

    #[test]
    fn holds_examples() {
        let i = State::new([Atom::ground("cali", &[]), Atom::ground("didExp", &["loc1"])]);
        assert!(holds(&Literal::pos(Atom::ground("cali", &[])), &i));
        assert!(holds(&Literal::neg(Atom::ground("lowCharge", &[])), &i));
        assert!(holds(&Literal::pos(Atom::ground("didExp", &["loc1"])), &i));
        assert!(holds(&Literal::pos(Atom::ground(EQ, &["a", "a"])), &i));
        assert!(holds(&Literal::neg(Atom::ground(EQ, &["a", "b"])), &i));
    }
}
