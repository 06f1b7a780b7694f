//! Seeded random domains and problems for property tests and verification suites.
//!
//! Domains are layered so reduction depth is bounded: methods for a level-`k` symbol only
//! mention primitives and symbols of lower levels. Every body ends with a `nop` ordered
//! after all other body tasks, and every problem network likewise.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraints::{Constraint, TaskNetwork, TaskRef};
use crate::model::{Atom, Domain, Label, Literal, Method, Operator, State, Task, Term, NOP};
use crate::validate::validate_domain;

#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    pub max_methods_per_task: usize,
    /// Including the trailing `nop`.
    pub max_tasks_per_body: usize,
    pub max_depth: usize,
    pub max_constants: usize,
    pub max_predicates: usize,
    pub max_operators: usize,
    /// Upper bound on actions in any full expansion of the problem.
    pub max_expansion: usize,
    /// Probability of each optional state constraint.
    pub constraint_rate: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_methods_per_task: 3,
            max_tasks_per_body: 4,
            max_depth: 3,
            max_constants: 6,
            max_predicates: 6,
            max_operators: 4,
            max_expansion: 8,
            constraint_rate: 0.35,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub seed: u64,
    pub domain: Domain,
    pub init: State,
    pub network: TaskNetwork,
}

struct Sig {
    name: String,
    arity: usize,
}

struct Builder<'a> {
    rng: ChaCha8Rng,
    cfg: &'a GenConfig,
    consts: Vec<String>,
    preds: Vec<Sig>,
    /// Body labels are numbered across the whole domain.
    next_label: usize,
}

impl Builder<'_> {
    fn term(&mut self, vars: &[String]) -> Term {
        if !vars.is_empty() && self.rng.gen_bool(0.7) {
            Term::var(vars.choose(&mut self.rng).unwrap().clone())
        } else {
            Term::constant(self.consts.choose(&mut self.rng).unwrap().clone())
        }
    }

    fn atom(&mut self, vars: &[String]) -> Atom {
        let i = self.rng.gen_range(0..self.preds.len());
        let (name, arity) = (self.preds[i].name.clone(), self.preds[i].arity);
        let args = (0..arity).map(|_| self.term(vars)).collect();
        Atom::new(name, args)
    }

    fn literal(&mut self, vars: &[String]) -> Literal {
        let a = self.atom(vars);
        if self.rng.gen_bool(0.35) {
            Literal::neg(a)
        } else {
            Literal::pos(a)
        }
    }

    fn operator(&mut self, name: String) -> Operator {
        let params: Vec<String> = (0..self.rng.gen_range(0..=1)).map(|i| format!("P{i}")).collect();
        let pre = (0..self.rng.gen_range(0..=2)).map(|_| self.literal(&params)).collect();
        let add = (0..self.rng.gen_range(0..=2)).map(|_| self.atom(&params)).collect();
        let del = (0..self.rng.gen_range(0..=1)).map(|_| self.atom(&params)).collect();
        Operator { name, params, pre, add, del }
    }

    fn ground_atom(&mut self) -> Atom {
        self.atom(&[])
    }

    /// A body over `pool` (task symbol, arity), with a trailing nop ordered after everything.
    fn body(&mut self, pool: &[(String, usize, bool)], head_vars: &[String], domain: &Domain) -> TaskNetwork {
        let n = self.rng.gen_range(1..self.cfg.max_tasks_per_body);
        let local = [head_vars.to_vec(), vec!["Y".to_string()]].concat();
        let mut tasks: Vec<(Label, Task)> = Vec::new();
        for _ in 0..n {
            let (name, arity, _) = pool.choose(&mut self.rng).unwrap().clone();
            let args = (0..arity).map(|_| self.term(&local)).collect();
            self.next_label += 1;
            tasks.push((Label::new(self.next_label.to_string()), Task::new(name, args)));
        }
        self.next_label += 1;
        let trailing = Label::new(self.next_label.to_string());
        let mut formula = BTreeSet::new();
        // A random linear extension; each consecutive pair is ordered with some probability.
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut self.rng);
        for w in perm.windows(2) {
            if self.rng.gen_bool(0.5) {
                formula.insert(Constraint::order(TaskRef::Label(tasks[w[0]].0.clone()), TaskRef::Label(tasks[w[1]].0.clone())));
            }
        }
        for (l, _) in &tasks {
            formula.insert(Constraint::order(TaskRef::Label(l.clone()), TaskRef::Label(trailing.clone())));
        }
        for (i, (l, _)) in tasks.iter().enumerate() {
            if self.rng.gen_bool(self.cfg.constraint_rate) {
                let lit = self.literal(&local);
                let c = Constraint::before(lit, TaskRef::Label(l.clone()));
                formula.insert(if self.rng.gen_bool(0.2) { c.negate() } else { c });
            }
            if self.rng.gen_bool(self.cfg.constraint_rate * 0.5) {
                let lit = self.literal(&local);
                let c = Constraint::after(TaskRef::Label(l.clone()), lit);
                formula.insert(if self.rng.gen_bool(0.2) { c.negate() } else { c });
            }
            // Between is kept positive: a negated between has no agreed reading on empty intervals.
            let later: Vec<usize> = perm.iter().skip_while(|j| **j != i).skip(1).copied().collect();
            if !later.is_empty() && self.rng.gen_bool(self.cfg.constraint_rate * 0.5) {
                let j = *later.choose(&mut self.rng).unwrap();
                let lit = self.literal(&local);
                formula.insert(Constraint::between(TaskRef::Label(l.clone()), lit, TaskRef::Label(tasks[j].0.clone())));
            }
        }
        // Occasionally a negated ordering between two primitive, unordered body tasks.
        if n >= 2 && self.rng.gen_bool(self.cfg.constraint_rate * 0.5) {
            let (a, b) = (perm[n - 1], perm[0]);
            let prim = domain.is_primitive(&tasks[a].1);
            let ordered = formula.iter().any(|c| c.mentions(&tasks[a].0) && c.mentions(&tasks[b].0));
            if prim && !ordered {
                formula.insert(Constraint::order(TaskRef::Label(tasks[a].0.clone()), TaskRef::Label(tasks[b].0.clone())).negate());
            }
        }
        tasks.push((trailing, Task::new(NOP, vec![])));
        TaskNetwork::new(tasks, formula)
    }
}

/// Most actions any full expansion of `name` can yield.
fn expansion(domain: &Domain, name: &str, depth: usize) -> usize {
    if domain.operators.contains_key(name) {
        return 1;
    }
    if depth == 0 {
        return usize::MAX / 4;
    }
    domain
        .methods
        .iter()
        .filter(|m| m.head.name == name)
        .map(|m| m.body.tasks.values().map(|t| expansion(domain, &t.name, depth - 1)).sum::<usize>())
        .max()
        .unwrap_or(0)
}

/// Generates one valid problem; retries internally until the domain validates and the expansion bound holds.
pub fn generate(seed: u64, cfg: &GenConfig) -> Problem {
    for attempt in 0u64.. {
        if let Some(p) = try_generate(seed, attempt, cfg) {
            return p;
        }
    }
    unreachable!()
}

fn try_generate(seed: u64, attempt: u64, cfg: &GenConfig) -> Option<Problem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ attempt);
    let nconst = rng.gen_range(1..=cfg.max_constants.min(3));
    let npred = rng.gen_range(2..=cfg.max_predicates.min(4));
    let consts = (0..nconst).map(|i| format!("c{i}")).collect();
    let preds = (0..npred).map(|i| Sig { name: format!("p{i}"), arity: rng.gen_range(0..=1) }).collect();
    let mut b = Builder { rng, cfg, consts, preds, next_label: 0 };

    let mut domain = Domain::new(format!("random-{seed}"));
    let nops = b.rng.gen_range(2..=cfg.max_operators);
    let mut pool: Vec<(String, usize, bool)> = Vec::new();
    for i in 0..nops {
        let op = b.operator(format!("a{i}"));
        pool.push((op.name.clone(), op.params.len(), true));
        domain.operators.insert(op.name.clone(), op);
    }
    let depth = b.rng.gen_range(1..=cfg.max_depth);
    let mut top_pool = pool.clone();
    for level in 1..=depth {
        let nsym = b.rng.gen_range(1..=2);
        let mut new = Vec::new();
        for k in 0..nsym {
            let name = format!("t{level}{}", (b'a' + k as u8) as char);
            let arity = b.rng.gen_range(0..=1);
            let head_vars: Vec<String> = (0..arity).map(|i| format!("X{i}")).collect();
            let nm = b.rng.gen_range(1..=cfg.max_methods_per_task);
            for j in 0..nm {
                let body = b.body(&top_pool, &head_vars, &domain);
                domain.methods.push(Method {
                    name: format!("m{level}{}{j}", (b'a' + k as u8) as char),
                    head: Task::new(name.clone(), head_vars.iter().map(|v| Term::var(v.clone())).collect()),
                    body,
                });
            }
            new.push((name, arity, false));
        }
        top_pool.extend(new);
    }
    domain.constants = b.consts.iter().cloned().collect();

    let report = validate_domain(&domain);
    if !report.is_empty() {
        return None;
    }

    let ntop = b.rng.gen_range(1..=2);
    let mut tasks = Vec::new();
    let mut formula = BTreeSet::new();
    let nonprim: Vec<(String, usize, bool)> = top_pool.iter().filter(|p| !p.2).cloned().collect();
    for i in 0..ntop {
        let src = if b.rng.gen_bool(0.8) { &nonprim } else { &pool };
        let (name, arity, _) = src.choose(&mut b.rng).unwrap().clone();
        let args = (0..arity).map(|_| b.term(&[])).collect();
        tasks.push((Label::new(((b'A' + i as u8) as char).to_string()), Task::new(name, args)));
    }
    if ntop == 2 && b.rng.gen_bool(0.5) {
        formula.insert(Constraint::order(TaskRef::label("A"), TaskRef::label("B")));
    }
    for (l, _) in &tasks {
        formula.insert(Constraint::order(TaskRef::Label(l.clone()), TaskRef::label("Z")));
    }
    tasks.push((Label::from("Z"), Task::new(NOP, vec![])));
    let total: usize = tasks.iter().map(|(_, t)| expansion(&domain, &t.name, cfg.max_depth)).sum();
    if total > cfg.max_expansion {
        return None;
    }
    let mut init = BTreeSet::new();
    for _ in 0..b.rng.gen_range(0..=4) {
        init.insert(b.ground_atom());
    }
    Some(Problem { seed, domain, init: State(init), network: TaskNetwork::new(tasks, formula) })
}

/// `count` problems from consecutive seeds starting at `first_seed`.
pub fn corpus(first_seed: u64, count: usize, cfg: &GenConfig) -> Vec<Problem> {
    (0..count as u64).map(|i| generate(first_seed + i, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_domains_validate_and_respect_bounds() {
        let cfg = GenConfig::default();
        for p in corpus(0, 40, &cfg) {
            assert!(validate_domain(&p.domain).is_empty());
            let heads: BTreeSet<&str> = p.domain.methods.iter().map(|m| m.head.name.as_str()).collect();
            for h in heads {
                assert!(p.domain.methods.iter().filter(|m| m.head.name == h).count() <= cfg.max_methods_per_task);
            }
            assert!(p.domain.methods.iter().all(|m| m.body.tasks.len() <= cfg.max_tasks_per_body));
            assert!(p.domain.all_constants().len() <= cfg.max_constants);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = GenConfig::default();
        let a = generate(7, &cfg);
        let b = generate(7, &cfg);
        assert_eq!(a.domain, b.domain);
        assert_eq!(a.init, b.init);
        assert_eq!(a.network, b.network);
    }
}
