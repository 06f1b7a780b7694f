//! Operational semantics: execution via reduction, action and replacement.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::constraints::{drop_from_last, holds, rewrite_label_set, Constraint, ConstraintBody, Formula, TaskNetwork, TaskRef};
use crate::error::EngineError;
use crate::model::{Atom, Domain, Fresh, Label, Literal, State, Subst, Substitution, Task, Term, EQ};
use crate::reduction::{has_relevant_method, reduce, relevant_method_bodies, Alternative};

/// `⟨n̄, S, D⟩`: the tasks pursued for the reduction of `origin` and its untried bodies.
/// The top-level couple has no origin.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Couple {
    pub origin: Option<Label>,
    pub pursued: BTreeMap<Label, Task>,
    pub alternatives: Vec<Alternative>,
}

impl Couple {
    pub fn labels(&self) -> BTreeSet<Label> {
        self.pursued.keys().cloned().collect()
    }

    fn subst(&self, theta: &Substitution) -> Couple {
        Couple {
            origin: self.origin.clone(),
            pursued: self.pursued.iter().map(|(l, t)| (l.clone(), t.subst(theta))).collect(),
            alternatives: self
                .alternatives
                .iter()
                .map(|a| Alternative { method: a.method.clone(), net: a.net.subst(theta) })
                .collect(),
        }
    }
}

/// `R`, kept sorted by origin.
pub type Couples = Vec<Couple>;

fn sort_couples(r: &mut Couples) {
    r.sort_by(|a, b| a.origin.cmp(&b.origin));
}

/// `⟨d, I, R⟩` plus the accumulated substitution and the run's fresh-name supply.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub network: TaskNetwork,
    pub state: State,
    pub couples: Couples,
    pub theta: Substitution,
    pub fresh: Fresh,
}

impl Configuration {
    /// `⟨d, I, {⟨S_d, ∅⟩}⟩`.
    pub fn initial(network: TaskNetwork, state: State) -> Self {
        let mut fresh = Fresh::new();
        fresh.reserve_network(&network);
        let top = Couple { origin: None, pursued: network.tasks.clone(), alternatives: vec![] };
        Configuration { network, state, couples: vec![top], theta: Substitution::new(), fresh }
    }

    /// Equality ignoring the fresh-name supply.
    pub fn same_as(&self, other: &Configuration) -> bool {
        self.network == other.network
            && self.state == other.state
            && self.couples == other.couples
            && self.theta == other.theta
    }

    pub fn couple(&self, origin: &Option<Label>) -> Option<&Couple> {
        self.couples.iter().find(|c| &c.origin == origin)
    }
}

/// Domain plus the finite constant universe used for grounding.
#[derive(Clone, Debug)]
pub struct Engine {
    pub domain: Domain,
    pub universe: BTreeSet<String>,
}

impl Engine {
    /// Universe = constants of the domain, the initial state and the initial network.
    pub fn new(domain: Domain, state: &State, network: &TaskNetwork) -> Self {
        let mut universe = domain.all_constants();
        state.collect_consts(&mut universe);
        network.collect_consts(&mut universe);
        Engine { domain, universe }
    }

    pub fn extend_universe<T: Subst>(&mut self, x: &T) {
        x.collect_consts(&mut self.universe);
    }
}

/// What one execution step did.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    Initial,
    Observation { tasks: BTreeMap<Label, Task> },
    Reduction { label: Label, task: Task, method: String, body: TaskNetwork },
    Action { label: Label, task: Task, theta: Substitution },
    Replacement { origin: Option<Label>, method: String, body: TaskNetwork, complete: bool, jump: bool },
}

impl Step {
    pub fn is_complete_replacement(&self) -> bool {
        matches!(self, Step::Replacement { complete: true, .. })
    }

    pub fn is_partial_replacement(&self) -> bool {
        matches!(self, Step::Replacement { complete: false, .. })
    }

    pub fn is_jump(&self) -> bool {
        matches!(self, Step::Replacement { jump: true, .. })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExecOptions {
    /// Offer every ground substitution for an action instead of the least one.
    pub all_substitutions: bool,
}

/// `primary(d) = S \ (S1 ∪ S2)`.
pub fn primary_tasks(d: &TaskNetwork, domain: &Domain) -> BTreeSet<Label> {
    let mut excluded: BTreeSet<Label> = BTreeSet::new();
    for c in &d.formula {
        if let ConstraintBody::Order(x, y) = &c.body {
            if !c.negated {
                excluded.extend(y.labels());
            } else {
                let n = match x {
                    TaskRef::Label(n) => Some(n),
                    TaskRef::Last(s) if s.len() == 1 => s.iter().next(),
                    _ => None,
                };
                if let Some(n) = n {
                    if d.tasks.get(n).is_some_and(|t| domain.is_primitive(t)) {
                        excluded.insert(n.clone());
                    }
                }
            }
        }
    }
    d.tasks.keys().filter(|l| !excluded.contains(*l)).cloned().collect()
}

fn executed_ref(x: &TaskRef, live: &BTreeMap<Label, Task>) -> bool {
    match x {
        TaskRef::Label(m) => !live.contains_key(m),
        TaskRef::Last(s) => s.is_empty(),
        TaskRef::First(_) => false,
    }
}

/// `bef(n, d)`.
pub fn relevant_constraints(n: &Label, d: &TaskNetwork) -> Formula {
    d.formula
        .iter()
        .filter(|c| match &c.body {
            ConstraintBody::Before(_, x) => x.is_or_first_of(n),
            ConstraintBody::After(x, _) => executed_ref(x, &d.tasks),
            ConstraintBody::Between(x, _, y) => {
                executed_ref(x, &d.tasks) && (!c.negated || y.is_or_first_of(n))
            }
            ConstraintBody::Order(..) => false,
        })
        .cloned()
        .collect()
}

/// `bef_l(n, d)`.
pub fn extracted_literals(n: &Label, d: &TaskNetwork) -> BTreeSet<Literal> {
    relevant_constraints(n, d)
        .iter()
        .filter_map(|c| c.literal().map(|l| if c.negated { l.negated() } else { l.clone() }))
        .collect()
}

/// `Φ(n, d, Op)`.
pub fn applicability_formula(n: &Label, d: &TaskNetwork, domain: &Domain) -> Result<Vec<Literal>, EngineError> {
    let t = d.tasks.get(n).ok_or_else(|| EngineError::Contract(format!("label {n} is not in the network")))?;
    let op = domain
        .operator(t)
        .ok_or_else(|| EngineError::Contract(format!("{t} has no operator")))?;
    let mut phi = op.pre_of(t);
    phi.extend(extracted_literals(n, d));
    Ok(phi)
}

/// Every ground θ over the universe (restricted to the variables of `t` and `lits`) with `I ⊨ lits·θ`,
/// in increasing order.
pub fn ground_solutions(lits: &[Literal], t: &Task, state: &State, universe: &BTreeSet<String>) -> Vec<Substitution> {
    let mut vars = t.vars();
    lits.iter().for_each(|l| l.collect_vars(&mut vars));
    let mut positives: Vec<&Literal> = lits.iter().filter(|l| l.positive && l.atom.pred != EQ).collect();
    positives.sort();
    let mut out = BTreeSet::new();
    match_positives(&positives, state, Substitution::new(), &mut |theta| {
        let rest: Vec<&String> = vars.iter().filter(|v| theta.get(v).is_none()).collect();
        enumerate(&rest, universe, theta.clone(), &mut |full| {
            if lits.iter().all(|l| holds(&l.subst(full), state)) {
                out.insert(full.clone());
            }
        });
    });
    out.into_iter().collect()
}

fn match_positives(lits: &[&Literal], state: &State, theta: Substitution, k: &mut dyn FnMut(&Substitution)) {
    let Some((first, rest)) = lits.split_first() else {
        k(&theta);
        return;
    };
    let pattern = first.atom.subst(&theta);
    for a in state.atoms() {
        if let Some(th) = unify(&pattern, a, &theta) {
            match_positives(rest, state, th, k);
        }
    }
}

fn unify(pattern: &Atom, ground: &Atom, theta: &Substitution) -> Option<Substitution> {
    if pattern.pred != ground.pred || pattern.args.len() != ground.args.len() {
        return None;
    }
    let mut th = theta.clone();
    for (p, g) in pattern.args.iter().zip(&ground.args) {
        match th.term(p) {
            Term::Var(v) => th.bind(v, g.clone()),
            c if &c == g => {}
            _ => return None,
        }
    }
    Some(th)
}

fn enumerate(vars: &[&String], universe: &BTreeSet<String>, theta: Substitution, k: &mut dyn FnMut(&Substitution)) {
    let Some((v, rest)) = vars.split_first() else {
        k(&theta);
        return;
    };
    for c in universe {
        let mut th = theta.clone();
        th.bind((*v).clone(), Term::Const(c.clone()));
        enumerate(rest, universe, th, k);
    }
}

/// All θ making primitive `n` applicable, least first.
pub fn applicable_substitutions(
    eng: &Engine,
    n: &Label,
    d: &TaskNetwork,
    state: &State,
) -> Result<Vec<Substitution>, EngineError> {
    let phi = applicability_formula(n, d, &eng.domain)?;
    Ok(ground_solutions(&phi, &d.tasks[n], state, &eng.universe))
}

/// The least θ with `I ⊨ Φ(n, d, Op)θ`, if any.
pub fn is_applicable(eng: &Engine, n: &Label, d: &TaskNetwork, state: &State) -> Result<Option<Substitution>, EngineError> {
    Ok(applicable_substitutions(eng, n, d, state)?.into_iter().next())
}

/// `fin(n, d) = C1 ∪ C2`.
pub fn realised_constraints(n: &Label, d: &TaskNetwork) -> Formula {
    let single = TaskRef::Last(std::iter::once(n.clone()).collect());
    let mut out: Formula = d
        .formula
        .iter()
        .filter(|c| match (&c.body, c.negated) {
            (ConstraintBody::Order(x, _), false) => *x == TaskRef::Label(n.clone()) || *x == single,
            (ConstraintBody::Order(_, y), true) => y.is_or_first_of(n),
            _ => false,
        })
        .cloned()
        .collect();
    out.extend(
        relevant_constraints(n, d)
            .into_iter()
            .filter(|c| !matches!(&c.body, ConstraintBody::Between(_, _, y) if !y.is_or_first_of(n))),
    );
    out
}

/// `res(n, I, d, θ, R, Op)`.
pub fn action_result(
    eng: &Engine,
    n: &Label,
    state: &State,
    d: &TaskNetwork,
    theta: &Substitution,
    couples: &Couples,
) -> Result<(TaskNetwork, State, Couples), EngineError> {
    let t = d.tasks.get(n).ok_or_else(|| EngineError::Contract(format!("label {n} is not in the network")))?;
    let op = eng.domain.operator(t).ok_or_else(|| EngineError::Contract(format!("{t} has no operator")))?;
    let tg = t.subst(theta);
    let next_state = state.apply(&op.del_of(&tg), &op.add_of(&tg));

    let fin = realised_constraints(n, d);
    let kept: Formula = d.formula.difference(&fin).cloned().collect();
    let mut formula: Formula = drop_from_last(&kept, n)
        .into_iter()
        .filter(|c| !matches!(&c.body, ConstraintBody::Between(_, _, y) if y.mentions(n)))
        .collect();
    let mut tasks = d.tasks.clone();
    tasks.remove(n);

    formula = formula.iter().map(|c| c.subst(theta)).collect();
    // A negated between is discharged by the first state after its left end in which ¬l holds.
    formula.retain(|c| match (&c.body, c.negated) {
        (ConstraintBody::Between(x, l, _), true) => {
            !(executed_ref(x, &tasks) && l.is_ground() && holds(&l.negated(), &next_state))
        }
        _ => true,
    });
    let net = TaskNetwork { tasks, formula }.subst(theta);
    let r = couples.iter().map(|c| c.subst(theta)).collect();
    Ok((net, next_state, r))
}

/// One configuration per applicable primary action (and per θ when requested).
pub fn exec_via_action(eng: &Engine, cfg: &Configuration, opts: ExecOptions) -> Vec<(Step, Configuration)> {
    let mut out = Vec::new();
    for n in primary_tasks(&cfg.network, &eng.domain) {
        let t = &cfg.network.tasks[&n];
        if !eng.domain.is_primitive(t) {
            continue;
        }
        let Ok(thetas) = applicable_substitutions(eng, &n, &cfg.network, &cfg.state) else { continue };
        let take = if opts.all_substitutions { thetas.len() } else { thetas.len().min(1) };
        for theta in thetas.into_iter().take(take) {
            if let Ok(c) = apply_action(eng, cfg, &n, &theta) {
                out.push((Step::Action { label: n.clone(), task: t.subst(&theta), theta }, c));
            }
        }
    }
    out
}

pub fn apply_action(eng: &Engine, cfg: &Configuration, n: &Label, theta: &Substitution) -> Result<Configuration, EngineError> {
    let (network, state, couples) = action_result(eng, n, &cfg.state, &cfg.network, theta, &cfg.couples)?;
    Ok(Configuration { network, state, couples, theta: cfg.theta.compose(theta), fresh: cfg.fresh.clone() })
}

/// One configuration per primary non-primitive task and relevant body.
pub fn exec_via_reduction(eng: &Engine, cfg: &Configuration) -> Vec<(Step, Configuration)> {
    let mut out = Vec::new();
    for n in primary_tasks(&cfg.network, &eng.domain) {
        let t = &cfg.network.tasks[&n];
        if eng.domain.is_primitive(t) {
            continue;
        }
        let mut fresh = cfg.fresh.clone();
        let Ok(alts) = relevant_method_bodies(t, &eng.domain, &mut fresh) else { continue };
        for i in 0..alts.len() {
            let rest: Vec<Alternative> =
                alts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, a)| a.clone()).collect();
            if let Ok(mut c) = apply_reduction(cfg, &n, &alts[i], rest) {
                c.fresh = fresh.clone();
                let step = Step::Reduction {
                    label: n.clone(),
                    task: t.clone(),
                    method: alts[i].method.clone(),
                    body: alts[i].net.clone(),
                };
                out.push((step, c));
            }
        }
    }
    out
}

/// Reduces `n` with `chosen`, recording `rest` as its untried alternatives.
pub fn apply_reduction(
    cfg: &Configuration,
    n: &Label,
    chosen: &Alternative,
    rest: Vec<Alternative>,
) -> Result<Configuration, EngineError> {
    let network = reduce(&cfg.network, n, &chosen.net)?;
    let mut couples: Couples = cfg
        .couples
        .iter()
        .map(|c| {
            let mut c = c.clone();
            if c.pursued.remove(n).is_some() {
                c.pursued.extend(chosen.net.tasks.iter().map(|(l, t)| (l.clone(), t.clone())));
            }
            c
        })
        .collect();
    couples.push(Couple { origin: Some(n.clone()), pursued: chosen.net.tasks.clone(), alternatives: rest });
    sort_couples(&mut couples);
    let mut fresh = cfg.fresh.clone();
    fresh.reserve_network(&chosen.net);
    Ok(Configuration { network, state: cfg.state.clone(), couples, theta: cfg.theta.clone(), fresh })
}

/// `blocked(S, d, I, D)`.
pub fn is_blocked(eng: &Engine, s: &BTreeSet<Label>, d: &TaskNetwork, state: &State) -> Result<bool, EngineError> {
    let primary = primary_tasks(d, &eng.domain);
    let live: Vec<&Label> = s.iter().filter(|l| primary.contains(*l)).collect();
    if live.is_empty() {
        return Err(EngineError::Contract("S has no primary task".into()));
    }
    for n in live {
        let t = &d.tasks[n];
        if eng.domain.is_primitive(t) {
            if is_applicable(eng, n, d, state)?.is_some() {
                return Ok(false);
            }
        } else if has_relevant_method(t, &eng.domain) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `rep(S, d_new, d)`.
pub fn replace(s: &BTreeSet<Label>, d_new: &TaskNetwork, d: &TaskNetwork) -> TaskNetwork {
    let live: BTreeSet<Label> = s.iter().filter(|l| d.tasks.contains_key(*l)).cloned().collect();
    let psi = rewrite_label_set(&d.formula, &live, &d_new.labels());
    let mut formula: Formula = psi.into_iter().filter(|c| !s.iter().any(|l| c.mentions(l))).collect();
    formula.extend(d_new.formula.iter().cloned());
    let mut tasks: BTreeMap<Label, Task> =
        d.tasks.iter().filter(|(l, _)| !live.contains(*l)).map(|(l, t)| (l.clone(), t.clone())).collect();
    tasks.extend(d_new.tasks.iter().map(|(l, t)| (l.clone(), t.clone())));
    TaskNetwork { tasks, formula }
}

/// `upd(S′, S, d_new, R)` where `S` is the pursued set of the couple with the given origin.
pub fn update_couples(
    s_prime: &BTreeSet<Label>,
    origin: &Option<Label>,
    chosen: &Alternative,
    couples: &Couples,
) -> Result<Couples, EngineError> {
    let owner = couples
        .iter()
        .find(|c| &c.origin == origin)
        .ok_or_else(|| EngineError::Contract("couple not found".into()))?;
    let s = owner.labels();
    if !s_prime.is_subset(&s) {
        return Err(EngineError::Contract("S′ is not a subset of S".into()));
    }
    let mut out: Couples = Vec::new();
    for c in couples {
        let mut c = c.clone();
        if &c.origin == origin {
            c.alternatives.retain(|a| a != chosen);
        }
        if c.labels().is_superset(&s) {
            c.pursued.retain(|l, _| !s_prime.contains(l));
            c.pursued.extend(chosen.net.tasks.iter().map(|(l, t)| (l.clone(), t.clone())));
        }
        if !c.pursued.keys().any(|l| s_prime.contains(l)) {
            out.push(c);
        }
    }
    sort_couples(&mut out);
    Ok(out)
}

/// Origins of the couples in `smallest(R)`.
pub fn smallest_replaceable(couples: &Couples) -> Vec<Option<Label>> {
    couples
        .iter()
        .filter(|c| !c.alternatives.is_empty())
        .filter(|c| {
            let s = c.labels();
            couples.iter().filter(|o| o.origin != c.origin).all(|o| {
                let so = o.labels();
                so.is_superset(&s) || (so.is_subset(&s) && so != s && o.alternatives.is_empty()) || so.is_disjoint(&s)
            })
        })
        .map(|c| c.origin.clone())
        .collect()
}

/// One configuration per blocked replaceable couple and alternative.
pub fn exec_via_replacement(eng: &Engine, cfg: &Configuration) -> Vec<(Step, Configuration)> {
    let primary = primary_tasks(&cfg.network, &eng.domain);
    let smallest = smallest_replaceable(&cfg.couples);
    let mut out = Vec::new();
    for c in &cfg.couples {
        if c.alternatives.is_empty() {
            continue;
        }
        let s = c.labels();
        if s.is_disjoint(&primary) || !is_blocked(eng, &s, &cfg.network, &cfg.state).unwrap_or(false) {
            continue;
        }
        let complete = s.iter().all(|l| cfg.network.tasks.contains_key(l));
        let jump = !smallest.contains(&c.origin);
        for alt in &c.alternatives {
            if let Ok(next) = apply_replacement(cfg, &c.origin, alt) {
                let step = Step::Replacement {
                    origin: c.origin.clone(),
                    method: alt.method.clone(),
                    body: alt.net.clone(),
                    complete,
                    jump,
                };
                out.push((step, next));
            }
        }
    }
    out
}

/// `⟨rep(S, d_new, d), I, upd(S ∩ S_d, S, d_new, R)⟩` for the couple with the given origin.
pub fn apply_replacement(cfg: &Configuration, origin: &Option<Label>, alt: &Alternative) -> Result<Configuration, EngineError> {
    let c = cfg.couple(origin).ok_or_else(|| EngineError::Contract("couple not found".into()))?;
    if !c.alternatives.contains(alt) {
        return Err(EngineError::Contract(format!("{} is not an untried alternative", alt.method)));
    }
    let s = c.labels();
    let s_prime: BTreeSet<Label> = s.iter().filter(|l| cfg.network.tasks.contains_key(*l)).cloned().collect();
    let network = replace(&s, &alt.net, &cfg.network);
    let couples = update_couples(&s_prime, origin, alt, &cfg.couples)?;
    Ok(Configuration { network, state: cfg.state.clone(), couples, theta: cfg.theta.clone(), fresh: cfg.fresh.clone() })
}

/// `exec(d, I, R, D)`: actions, then reductions, then replacements.
pub fn exec_all(eng: &Engine, cfg: &Configuration, opts: ExecOptions) -> Vec<(Step, Configuration)> {
    let mut out = exec_via_action(eng, cfg, opts);
    out.extend(exec_via_reduction(eng, cfg));
    out.extend(exec_via_replacement(eng, cfg));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Successful,
    Blocked,
    Open,
}

/// Successful if no tasks remain; blocked if every couple meeting `primary` is blocked and exhausted.
pub fn classify_configuration(eng: &Engine, cfg: &Configuration) -> Status {
    if cfg.network.tasks.is_empty() {
        return Status::Successful;
    }
    let primary = primary_tasks(&cfg.network, &eng.domain);
    let all_stuck = cfg.couples.iter().all(|c| {
        let s = c.labels();
        s.is_disjoint(&primary)
            || (c.alternatives.is_empty() && is_blocked(eng, &s, &cfg.network, &cfg.state).unwrap_or(false))
    });
    if all_stuck {
        Status::Blocked
    } else {
        Status::Open
    }
}

/// Constraints whose refs are all live or are allowed ghosts (executed left ends).
pub fn constraint_refs_ok(d: &TaskNetwork) -> bool {
    d.formula.iter().all(|c: &Constraint| {
        let right_live = |y: &TaskRef| y.labels().iter().any(|l| d.tasks.contains_key(l));
        match &c.body {
            ConstraintBody::Order(_, y) | ConstraintBody::Before(_, y) | ConstraintBody::Between(_, _, y) => right_live(y),
            ConstraintBody::After(..) => true,
        }
    })
}
