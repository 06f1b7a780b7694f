//! Terms, atoms, states, tasks, operators, methods and domains.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constraints::TaskNetwork;

/// Name of the reserved no-op primitive.
pub const NOP: &str = "nop";

/// Built-in binary equality predicate, interpreted as identity over constants.
pub const EQ: &str = "=";

/// A function-free term.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, Term::Const(_))
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(s) | Term::Const(s) => s,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, name: &str, args: &[Term]) -> fmt::Result {
    f.write_str(name)?;
    if !args.is_empty() {
        f.write_str("(")?;
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Atom { pred: pred.into(), args }
    }

    /// Ground atom over constants.
    pub fn ground(pred: &str, args: &[&str]) -> Self {
        Atom::new(pred, args.iter().map(|a| Term::constant(*a)).collect())
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_args(f, &self.pred, &self.args)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { positive: true, atom }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { positive: false, atom }
    }

    pub fn negated(&self) -> Self {
        Literal { positive: !self.positive, atom: self.atom.clone() }
    }

    pub fn is_ground(&self) -> bool {
        self.atom.is_ground()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("!")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// A closed-world set of ground atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct State(pub BTreeSet<Atom>);

impl State {
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Self {
        State(atoms.into_iter().collect())
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.0.contains(a)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.0.iter()
    }

    /// `(I \ del) ∪ add`.
    pub fn apply(&self, del: &[Atom], add: &[Atom]) -> State {
        let mut s = self.0.clone();
        for a in del {
            s.remove(a);
        }
        for a in add {
            s.insert(a.clone());
        }
        State(s)
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

/// A task symbol applied to terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Task {
    pub name: String,
    pub args: Vec<Term>,
}

impl Task {
    pub fn new(name: impl Into<String>, args: Vec<Term>) -> Self {
        Task { name: name.into(), args }
    }

    pub fn ground(name: &str, args: &[&str]) -> Self {
        Task::new(name, args.iter().map(|a| Term::constant(*a)).collect())
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_args(f, &self.name, &self.args)
    }
}

/// Task label. Ordered naturally, so `8 < 10 < B`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub String);

impl Label {
    pub fn new(s: impl Into<String>) -> Self {
        Label(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The label with any freshness suffix stripped.
    pub fn base(&self) -> &str {
        base_name(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_string())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        natural_cmp(&self.0, &other.0).then_with(|| self.0.cmp(&other.0))
    }
}

/// Compares digit runs numerically and everything else bytewise.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut x, mut y) = (a.as_bytes(), b.as_bytes());
    loop {
        match (x.first(), y.first()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(c), Some(d)) if c.is_ascii_digit() && d.is_ascii_digit() => {
                let i = x.iter().take_while(|c| c.is_ascii_digit()).count();
                let j = y.iter().take_while(|c| c.is_ascii_digit()).count();
                let (nx, ny) = (trim_zeros(&x[..i]), trim_zeros(&y[..j]));
                let ord = nx.len().cmp(&ny.len()).then_with(|| nx.cmp(ny));
                if ord != Ordering::Equal {
                    return ord;
                }
                x = &x[i..];
                y = &y[j..];
            }
            (Some(c), Some(d)) => {
                let (c_dig, d_dig) = (c.is_ascii_digit(), d.is_ascii_digit());
                let ord = d_dig.cmp(&c_dig).then_with(|| c.cmp(d));
                if ord != Ordering::Equal {
                    return ord;
                }
                x = &x[1..];
                y = &y[1..];
            }
        }
    }
}

fn trim_zeros(s: &[u8]) -> &[u8] {
    let k = s.iter().take_while(|c| **c == b'0').count();
    &s[k..]
}

fn base_name(s: &str) -> &str {
    match s.find('\'') {
        Some(i) => &s[..i],
        None => s,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LabelledTask {
    pub label: Label,
    pub task: Task,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TaskKind {
    Primitive,
    NonPrimitive,
}

/// A finite map from variable names to terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Substitution(pub BTreeMap<String, Term>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, var: impl Into<String>, t: Term) {
        self.0.insert(var.into(), t);
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.0.get(var)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.0.iter()
    }

    pub fn term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.0.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(_) => t.clone(),
        }
    }

    /// `self` followed by `other`: applying the result equals applying `self` then `other`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut out: BTreeMap<String, Term> =
            self.0.iter().map(|(k, v)| (k.clone(), other.term(v))).collect();
        for (k, v) in &other.0 {
            out.entry(k.clone()).or_insert_with(|| v.clone());
        }
        out.retain(|k, v| !matches!(v, Term::Var(w) if w == k));
        Substitution(out)
    }

    /// Rewrites bindings until no value mentions a bound variable.
    pub fn normalize(&self) -> Substitution {
        let mut cur = self.clone();
        for _ in 0..=self.0.len() {
            let next = Substitution(cur.0.iter().map(|(k, v)| (k.clone(), cur.term(v))).collect());
            if next == cur {
                break;
            }
            cur = next;
        }
        cur.0.retain(|k, v| !matches!(v, Term::Var(w) if w == k));
        cur
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}/{v}")?;
        }
        f.write_str("}")
    }
}

/// Values that carry terms.
pub trait Subst {
    fn subst(&self, theta: &Substitution) -> Self;
    fn collect_vars(&self, out: &mut BTreeSet<String>);
    fn collect_consts(&self, out: &mut BTreeSet<String>);

    fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }
}

/// `e·θ`.
pub fn apply_substitution<T: Subst>(e: &T, theta: &Substitution) -> T {
    e.subst(theta)
}

impl Subst for Term {
    fn subst(&self, theta: &Substitution) -> Self {
        theta.term(self)
    }
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        if let Term::Var(v) = self {
            out.insert(v.clone());
        }
    }
    fn collect_consts(&self, out: &mut BTreeSet<String>) {
        if let Term::Const(c) = self {
            out.insert(c.clone());
        }
    }
}

impl<T: Subst> Subst for Vec<T> {
    fn subst(&self, theta: &Substitution) -> Self {
        self.iter().map(|x| x.subst(theta)).collect()
    }
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        self.iter().for_each(|x| x.collect_vars(out));
    }
    fn collect_consts(&self, out: &mut BTreeSet<String>) {
        self.iter().for_each(|x| x.collect_consts(out));
    }
}

impl Subst for Atom {
    fn subst(&self, theta: &Substitution) -> Self {
        Atom { pred: self.pred.clone(), args: self.args.subst(theta) }
    }
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        self.args.collect_vars(out)
    }
    fn collect_consts(&self, out: &mut BTreeSet<String>) {
        self.args.collect_consts(out)
    }
}

impl Subst for Literal {
    fn subst(&self, theta: &Substitution) -> Self {
        Literal { positive: self.positive, atom: self.atom.subst(theta) }
    }
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        self.atom.collect_vars(out)
    }
    fn collect_consts(&self, out: &mut BTreeSet<String>) {
        self.atom.collect_consts(out)
    }
}

impl Subst for Task {
    fn subst(&self, theta: &Substitution) -> Self {
        Task { name: self.name.clone(), args: self.args.subst(theta) }
    }
    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        self.args.collect_vars(out)
    }
    fn collect_consts(&self, out: &mut BTreeSet<String>) {
        self.args.collect_consts(out)
    }
}

impl Subst for State {
    fn subst(&self, _theta: &Substitution) -> Self {
        self.clone()
    }
    fn collect_vars(&self, _out: &mut BTreeSet<String>) {}
    fn collect_consts(&self, out: &mut BTreeSet<String>) {
        self.0.iter().for_each(|a| a.collect_consts(out));
    }
}

/// Unique θ with `t = head·θ`, when `head` has distinct variable arguments.
pub fn match_task(t: &Task, head: &Task) -> Option<Substitution> {
    if t.name != head.name || t.args.len() != head.args.len() {
        return None;
    }
    let mut theta = Substitution::new();
    for (a, h) in t.args.iter().zip(&head.args) {
        match h {
            Term::Var(v) => match theta.get(v) {
                Some(prev) if prev != a => return None,
                _ => theta.bind(v.clone(), a.clone()),
            },
            Term::Const(_) if h == a => {}
            Term::Const(_) => return None,
        }
    }
    Some(theta)
}

/// A STRIPS-style operator for one primitive task symbol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operator {
    pub name: String,
    pub params: Vec<String>,
    pub pre: Vec<Literal>,
    pub add: Vec<Atom>,
    pub del: Vec<Atom>,
}

impl Operator {
    pub fn nop() -> Self {
        Operator { name: NOP.into(), params: vec![], pre: vec![], add: vec![], del: vec![] }
    }

    fn binding(&self, t: &Task) -> Substitution {
        let mut theta = Substitution::new();
        for (p, a) in self.params.iter().zip(&t.args) {
            theta.bind(p.clone(), a.clone());
        }
        theta
    }

    pub fn pre_of(&self, t: &Task) -> Vec<Literal> {
        self.pre.subst(&self.binding(t))
    }

    pub fn add_of(&self, t: &Task) -> Vec<Atom> {
        self.add.subst(&self.binding(t))
    }

    pub fn del_of(&self, t: &Task) -> Vec<Atom> {
        self.del.subst(&self.binding(t))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Method {
    pub name: String,
    pub head: Task,
    pub body: TaskNetwork,
}

/// `⟨Op, Me⟩`, with method declaration order kept.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    pub name: String,
    pub operators: BTreeMap<String, Operator>,
    pub methods: Vec<Method>,
    pub constants: BTreeSet<String>,
}

impl Domain {
    pub fn new(name: impl Into<String>) -> Self {
        let mut d = Domain { name: name.into(), ..Default::default() };
        d.operators.insert(NOP.into(), Operator::nop());
        d
    }

    pub fn operator(&self, t: &Task) -> Option<&Operator> {
        self.operators.get(&t.name).filter(|o| o.params.len() == t.args.len())
    }

    pub fn is_primitive(&self, t: &Task) -> bool {
        self.operators.contains_key(&t.name)
    }

    pub fn kind(&self, t: &Task) -> Option<TaskKind> {
        if self.operators.contains_key(&t.name) {
            Some(TaskKind::Primitive)
        } else if self.methods.iter().any(|m| m.head.name == t.name) {
            Some(TaskKind::NonPrimitive)
        } else {
            None
        }
    }

    pub fn method(&self, name: &str) -> Option<&Method> {
        self.methods.iter().find(|m| m.name == name)
    }

    /// Declared constants plus every constant mentioned by operators and methods.
    pub fn all_constants(&self) -> BTreeSet<String> {
        let mut out = self.constants.clone();
        for o in self.operators.values() {
            o.pre.collect_consts(&mut out);
            o.add.collect_consts(&mut out);
            o.del.collect_consts(&mut out);
        }
        for m in &self.methods {
            m.head.collect_consts(&mut out);
            m.body.collect_consts(&mut out);
        }
        out
    }
}

/// Run-local supply of fresh labels and variables.
///
/// The first use of a base name yields the bare name; later uses append `'k`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fresh {
    labels: BTreeMap<String, u32>,
    vars: BTreeMap<String, u32>,
}

impl Fresh {
    pub fn new() -> Self {
        Self::default()
    }

    fn next(map: &mut BTreeMap<String, u32>, name: &str) -> String {
        let base = base_name(name);
        let n = map.entry(base.to_string()).or_insert(0);
        let out = if *n == 0 { base.to_string() } else { format!("{base}'{n}") };
        *n += 1;
        out
    }

    fn reserve(map: &mut BTreeMap<String, u32>, name: &str) {
        let base = base_name(name);
        let k: u32 = match name.find('\'') {
            Some(i) => name[i + 1..].parse::<u32>().map(|k| k + 1).unwrap_or(1),
            None => 1,
        };
        let n = map.entry(base.to_string()).or_insert(0);
        *n = (*n).max(k);
    }

    pub fn label(&mut self, base: &str) -> Label {
        Label(Self::next(&mut self.labels, base))
    }

    pub fn var(&mut self, base: &str) -> String {
        Self::next(&mut self.vars, base)
    }

    pub fn reserve_label(&mut self, l: &Label) {
        Self::reserve(&mut self.labels, &l.0);
    }

    pub fn reserve_var(&mut self, v: &str) {
        Self::reserve(&mut self.vars, v);
    }

    /// Marks every label and variable of `d` as used.
    pub fn reserve_network(&mut self, d: &TaskNetwork) {
        for l in d.labels() {
            self.reserve_label(&l);
        }
        for v in d.vars() {
            self.reserve_var(&v);
        }
    }
}

/// An isomorphic copy of `d` whose labels and variables are fresh.
pub fn fresh_rename(d: &TaskNetwork, gen: &mut Fresh) -> TaskNetwork {
    let labels: BTreeMap<Label, Label> = d.tasks.keys().map(|l| (l.clone(), gen.label(l.base()))).collect();
    let mut theta = Substitution::new();
    for v in d.vars() {
        let nv = gen.var(base_name(&v));
        theta.bind(v, Term::Var(nv));
    }
    d.relabel(&|l: &Label| labels.get(l).cloned().unwrap_or_else(|| l.clone())).subst(&theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_order() {
        let mut v: Vec<Label> = ["B", "10", "8", "A", "9", "0", "8'1"].iter().map(|s| Label::from(*s)).collect();
        v.sort();
        let s: Vec<&str> = v.iter().map(|l| l.as_str()).collect();
        assert_eq!(s, ["0", "8", "8'1", "9", "10", "A", "B"]);
    }

    #[test]
    fn substitution_examples() {
        let t = Task::new("transmitData", vec![Term::var("X")]);
        let mut th = Substitution::new();
        th.bind("X", Term::constant("loc1"));
        assert_eq!(t.subst(&th), Task::ground("transmitData", &["loc1"]));
        let g = Task::ground("transmitData", &["loc1"]);
        assert_eq!(g.subst(&Substitution::new()), g);
        let p = Atom::new("p", vec![Term::var("X"), Term::var("Y")]);
        let mut th = Substitution::new();
        th.bind("X", Term::constant("a"));
        assert_eq!(p.subst(&th), Atom::new("p", vec![Term::constant("a"), Term::var("Y")]));
    }

    #[test]
    fn match_examples() {
        let head = Task::new("transmitData", vec![Term::var("X")]);
        let th = match_task(&Task::ground("transmitData", &["loc1"]), &head).unwrap();
        assert_eq!(th.get("X"), Some(&Term::constant("loc1")));
        assert!(match_task(&Task::ground("navigate", &["lan1"]), &head).is_none());
        let nav = Task::new("navigate", vec![Term::var("L")]);
        let th = match_task(&Task::new("navigate", vec![Term::var("L0")]), &nav).unwrap();
        assert_eq!(th.get("L"), Some(&Term::var("L0")));
    }

    #[test]
    fn compose_and_normalize() {
        let mut a = Substitution::new();
        a.bind("X", Term::var("Y"));
        let mut b = Substitution::new();
        b.bind("Y", Term::constant("c"));
        let c = a.compose(&b);
        let t = Term::var("X");
        assert_eq!(t.subst(&c), t.subst(&a).subst(&b));
        let mut chain = Substitution::new();
        chain.bind("X", Term::var("Y"));
        chain.bind("Y", Term::constant("c"));
        assert_eq!(chain.normalize().get("X"), Some(&Term::constant("c")));
    }

    #[test]
    fn fresh_names() {
        let mut g = Fresh::new();
        assert_eq!(g.label("8").as_str(), "8");
        assert_eq!(g.label("8").as_str(), "8'1");
        g.reserve_label(&Label::from("A"));
        assert_eq!(g.label("A").as_str(), "A'1");
        assert_eq!(g.var("L"), "L");
        assert_eq!(g.var("L'3"), "L'1");
    }
}
