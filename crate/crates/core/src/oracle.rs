//! Brute-force HTN planning: all ground action sequences obtainable by reduction and linearisation.

use std::collections::{BTreeMap, BTreeSet};

use crate::constraints::{holds, Constraint, ConstraintBody, TaskNetwork, TaskRef};
use crate::error::EngineError;
use crate::model::{Domain, Fresh, Label, State, Subst, Substitution, Task, Term};
use crate::reduction::{reduce, relevant_method_bodies};

/// A labelled ground action sequence.
pub type Solution = Vec<(Label, Task)>;

pub fn tasks_of(s: &Solution) -> Vec<Task> {
    s.iter().map(|(_, t)| t.clone()).collect()
}

pub struct Oracle<'a> {
    pub domain: &'a Domain,
    pub universe: &'a BTreeSet<String>,
}

impl<'a> Oracle<'a> {
    pub fn new(domain: &'a Domain, universe: &'a BTreeSet<String>) -> Self {
        Oracle { domain, universe }
    }

    fn is_primitive_network(&self, d: &TaskNetwork) -> bool {
        d.tasks.values().all(|t| self.domain.is_primitive(t))
    }

    /// `comp(d, I, D)` for a primitive network: every grounding and admissible ordering.
    pub fn completions(&self, d: &TaskNetwork, state: &State) -> Result<BTreeSet<Solution>, EngineError> {
        if !self.is_primitive_network(d) {
            return Err(EngineError::Contract("completions of a network with non-primitive tasks".into()));
        }
        let vars: Vec<String> = d.vars().into_iter().collect();
        let mut out = BTreeSet::new();
        let mut ground = |theta: &Substitution| {
            let g = d.subst(theta);
            Linearise::new(self.domain, &g, state).run(&mut out);
        };
        for_each_grounding(&vars, self.universe, Substitution::new(), &mut ground);
        Ok(out)
    }

    /// Networks reachable with at most `depth` reductions (in any order) that are primitive.
    pub fn primitive_networks_bounded(&self, d: &TaskNetwork, depth: usize) -> Result<Vec<TaskNetwork>, EngineError> {
        let mut gen = Fresh::new();
        gen.reserve_network(d);
        let mut seen: BTreeSet<String> = BTreeSet::new();
        let mut out = Vec::new();
        let mut frontier = vec![(d.clone(), gen)];
        for level in 0..=depth {
            let mut next = Vec::new();
            for (net, gen) in frontier {
                if !seen.insert(net.to_string()) {
                    continue;
                }
                if self.is_primitive_network(&net) {
                    out.push(net);
                    continue;
                }
                if level == depth {
                    continue;
                }
                for (l, t) in net.tasks.iter().filter(|(_, t)| !self.domain.is_primitive(t)) {
                    let mut g = gen.clone();
                    for alt in relevant_method_bodies(t, self.domain, &mut g)? {
                        let mut g2 = g.clone();
                        g2.reserve_network(&alt.net);
                        next.push((reduce(&net, l, &alt.net)?, g2));
                    }
                }
            }
            frontier = next;
        }
        Ok(out)
    }

    /// Every network obtained by reducing the least non-primitive task until none is left.
    ///
    /// `max_reductions` guards against recursive domains.
    pub fn primitive_networks(&self, d: &TaskNetwork, max_reductions: usize) -> Result<Vec<TaskNetwork>, EngineError> {
        let mut gen = Fresh::new();
        gen.reserve_network(d);
        let mut out = Vec::new();
        let mut stack = vec![(d.clone(), gen, 0usize)];
        while let Some((net, gen, k)) = stack.pop() {
            let Some((l, t)) = net.tasks.iter().find(|(_, t)| !self.domain.is_primitive(t)) else {
                out.push(net);
                continue;
            };
            if k == max_reductions {
                return Err(EngineError::Contract(format!("more than {max_reductions} reductions needed")));
            }
            let mut g = gen.clone();
            for alt in relevant_method_bodies(t, self.domain, &mut g)? {
                let mut g2 = g.clone();
                g2.reserve_network(&alt.net);
                stack.push((reduce(&net, l, &alt.net)?, g2, k + 1));
            }
        }
        out.reverse();
        Ok(out)
    }

    /// `sol(d, I, D)` restricted to networks within `depth` reductions.
    pub fn solutions_bounded(&self, d: &TaskNetwork, state: &State, depth: usize) -> Result<BTreeSet<Solution>, EngineError> {
        let mut out = BTreeSet::new();
        for net in self.primitive_networks_bounded(d, depth)? {
            out.extend(self.completions(&net, state)?);
        }
        Ok(out)
    }

    /// `sol(d, I, D)` for non-recursive domains.
    pub fn solutions(&self, d: &TaskNetwork, state: &State, max_reductions: usize) -> Result<BTreeSet<Solution>, EngineError> {
        let mut out = BTreeSet::new();
        for net in self.primitive_networks(d, max_reductions)? {
            out.extend(self.completions(&net, state)?);
        }
        Ok(out)
    }
}

fn for_each_grounding(vars: &[String], universe: &BTreeSet<String>, theta: Substitution, k: &mut dyn FnMut(&Substitution)) {
    let Some((v, rest)) = vars.split_first() else {
        k(&theta);
        return;
    };
    for c in universe {
        let mut th = theta.clone();
        th.bind(v.clone(), Term::Const(c.clone()));
        for_each_grounding(rest, universe, th, k);
    }
}

/// Depth-first enumeration of the executable orderings of a ground primitive network.
struct Linearise<'a> {
    domain: &'a Domain,
    d: &'a TaskNetwork,
    labels: Vec<Label>,
    /// Positive orderings as label edges.
    preds: BTreeMap<Label, BTreeSet<Label>>,
    states: Vec<State>,
    order: Vec<Label>,
}

impl<'a> Linearise<'a> {
    fn new(domain: &'a Domain, d: &'a TaskNetwork, state: &State) -> Self {
        let mut preds: BTreeMap<Label, BTreeSet<Label>> = BTreeMap::new();
        for c in &d.formula {
            if let (false, ConstraintBody::Order(x, y)) = (c.negated, &c.body) {
                for b in y.labels() {
                    preds.entry(b).or_default().extend(x.labels().into_iter().filter(|a| d.tasks.contains_key(a)));
                }
            }
        }
        Linearise {
            domain,
            d,
            labels: d.tasks.keys().cloned().collect(),
            preds,
            states: vec![state.clone()],
            order: Vec::new(),
        }
    }

    fn run(&mut self, out: &mut BTreeSet<Solution>) {
        if self.order.len() == self.labels.len() {
            let pos: BTreeMap<&Label, usize> = self.order.iter().enumerate().map(|(i, l)| (l, i)).collect();
            if self.d.formula.iter().all(|c| satisfied(c, &pos, &self.states)) {
                out.insert(self.order.iter().map(|l| (l.clone(), self.d.tasks[l].clone())).collect());
            }
            return;
        }
        for l in self.labels.clone() {
            if self.order.contains(&l) {
                continue;
            }
            if self.preds.get(&l).is_some_and(|ps| ps.iter().any(|p| !self.order.contains(p))) {
                continue;
            }
            let t = &self.d.tasks[&l];
            let Some(op) = self.domain.operator(t) else { continue };
            let cur = self.states.last().expect("initial state");
            if !op.pre_of(t).iter().all(|lit| holds(lit, cur)) {
                continue;
            }
            let next = cur.apply(&op.del_of(t), &op.add_of(t));
            self.order.push(l);
            self.states.push(next);
            self.run(out);
            self.states.pop();
            self.order.pop();
        }
    }
}

fn min_pos(x: &TaskRef, pos: &BTreeMap<&Label, usize>) -> Option<usize> {
    x.labels().iter().filter_map(|l| pos.get(l).copied()).min()
}

fn max_pos(x: &TaskRef, pos: &BTreeMap<&Label, usize>) -> Option<usize> {
    x.labels().iter().filter_map(|l| pos.get(l).copied()).max()
}

/// Positional truth of a constraint; `states[i]` is the state before the action at position `i`.
///
/// References to no placed task make the constraint vacuously true.
fn satisfied(c: &Constraint, pos: &BTreeMap<&Label, usize>, states: &[State]) -> bool {
    let truth = match &c.body {
        ConstraintBody::Order(x, y) => match (max_pos(x, pos), min_pos(y, pos)) {
            (Some(a), Some(b)) => a < b,
            _ => true,
        },
        ConstraintBody::Before(l, x) => match min_pos(x, pos) {
            Some(i) => holds(l, &states[i]),
            None => true,
        },
        ConstraintBody::After(x, l) => match max_pos(x, pos) {
            Some(i) => holds(l, &states[i + 1]),
            None => true,
        },
        ConstraintBody::Between(x, l, y) => match (max_pos(x, pos), min_pos(y, pos)) {
            (Some(a), Some(b)) => (a + 1..=b).all(|k| holds(l, &states[k])),
            _ => true,
        },
    };
    truth != c.negated
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn rover_oracle_solutions(depth: usize) -> BTreeSet<Solution> {
        let dom = fixtures::rover();
        let p = fixtures::rover_problem();
        let mut u = dom.all_constants();
        p.init.collect_consts(&mut u);
        Oracle::new(&dom, &u).solutions_bounded(&p.network, &p.init, depth).unwrap()
    }

    #[test]
    fn rover_only_solution_goes_through_m1() {
        // monitor and move each need a charged battery and drain it, so m2 cannot coexist with B.
        let sols = rover_oracle_solutions(3);
        let tasks: Vec<Vec<String>> = sols.iter().map(|s| s.iter().map(|(_, t)| t.to_string()).collect()).collect();
        assert_eq!(tasks, vec![vec!["monitor", "estabConn", "extData(loc1)", "sendExtData(loc1)", "breakConn"]]);
        let labels: Vec<&str> = sols.iter().next().unwrap().iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels, ["B", "1", "4", "5", "3"]);
    }

    #[test]
    fn between_interval_is_inclusive_of_right_end() {
        let l = crate::model::Literal::pos(crate::model::Atom::ground("p", &[]));
        let c = Constraint::between(TaskRef::label("a"), l, TaskRef::label("b"));
        let a = Label::from("a");
        let b = Label::from("b");
        let pos: BTreeMap<&Label, usize> = [(&a, 0), (&b, 1)].into_iter().collect();
        let p = State::new([crate::model::Atom::ground("p", &[])]);
        let e = State::default();
        assert!(satisfied(&c, &pos, &[e.clone(), p.clone(), e.clone()]));
        assert!(!satisfied(&c, &pos, &[p.clone(), e.clone(), p]));
    }
}
