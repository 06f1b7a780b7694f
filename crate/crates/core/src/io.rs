//! Line-oriented text formats: `.htn` domains, `.prob` problems, `.evt` scenarios and `.choices` scripts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::constraints::{Constraint, ConstraintBody, TaskNetwork, TaskRef};
use crate::model::{Atom, Domain, Label, Literal, Method, Operator, State, Task, Term, NOP};
use crate::strategy::Directive;

/// 1-based line and column.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub span: Span,
    pub warning: bool,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.warning { "warning" } else { "error" };
        write!(f, "{}: {kind}: {}", self.span, self.message)
    }
}

/// Parse failure: at least one error-level diagnostic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
pub struct DomainDocument {
    pub domain: Domain,
    /// Declaration span of every operator and method, by name.
    pub spans: BTreeMap<String, Span>,
    pub warnings: Vec<Diagnostic>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemDocument {
    pub name: String,
    pub domain: String,
    pub init: State,
    pub network: TaskNetwork,
    pub warnings: Vec<Diagnostic>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScenarioDocument {
    /// Tasks observed at each iteration.
    pub events: BTreeMap<usize, Vec<Task>>,
    pub spans: BTreeMap<usize, Span>,
}

impl ScenarioDocument {
    /// Reports task symbols the domain does not know.
    pub fn check(&self, domain: &Domain) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for (i, ts) in &self.events {
            for t in ts {
                if domain.kind(t).is_none() {
                    out.push(Diagnostic {
                        span: self.spans.get(i).copied().unwrap_or_default(),
                        warning: false,
                        message: format!("unknown task symbol {}", t.name),
                    });
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Lexing

#[derive(Clone, Debug)]
struct Tok {
    text: String,
    col: usize,
}

/// Splits on whitespace outside `()` and `[]`. Unbalanced brackets are reported.
fn tokens(line: &str, lno: usize, diags: &mut Vec<Diagnostic>) -> Vec<Tok> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    let mut depth: i32 = 0;
    for (col, ch) in line.chars().enumerate() {
        if ch == '#' && depth == 0 {
            break;
        }
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            diags.push(err(lno, col + 1, format!("unbalanced '{ch}'")));
            depth = 0;
        }
        if ch.is_whitespace() && depth == 0 {
            if !cur.is_empty() {
                out.push(Tok { text: std::mem::take(&mut cur), col: start + 1 });
            }
        } else {
            if cur.is_empty() {
                start = col;
            }
            cur.push(ch);
        }
    }
    if depth != 0 {
        diags.push(err(lno, start + 1, "unclosed bracket".into()));
    }
    if !cur.is_empty() {
        out.push(Tok { text: cur, col: start + 1 });
    }
    out
}

fn err(line: usize, col: usize, message: String) -> Diagnostic {
    Diagnostic { span: Span { line, col }, warning: false, message }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '\'' | '='))
}

fn term(s: &str) -> Option<Term> {
    if !is_ident(s) || s.contains('=') {
        return None;
    }
    if s.chars().next().is_some_and(|c| c.is_uppercase() || c == '_') {
        Some(Term::var(s))
    } else {
        Some(Term::constant(s))
    }
}

/// `name` or `name(a, b)`.
fn compound(s: &str) -> Result<(String, Vec<Term>), String> {
    let (name, rest) = match s.find('(') {
        Some(i) => (&s[..i], Some(&s[i..])),
        None => (s, None),
    };
    if !is_ident(name) || (name.contains('=') && name != "=") {
        return Err(format!("bad symbol '{name}'"));
    }
    let mut args = Vec::new();
    if let Some(rest) = rest {
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| format!("malformed argument list in '{s}'"))?;
        if !inner.trim().is_empty() {
            for a in inner.split(',') {
                let a = a.trim();
                args.push(term(a).ok_or_else(|| format!("bad term '{a}'"))?);
            }
        }
    }
    Ok((name.to_string(), args))
}

fn task(s: &str) -> Result<Task, String> {
    let (name, args) = compound(s)?;
    if name == "=" {
        return Err("'=' is not a task".into());
    }
    Ok(Task::new(name, args))
}

fn atom(s: &str) -> Result<Atom, String> {
    let (pred, args) = compound(s)?;
    if pred == "=" && args.len() != 2 {
        return Err("'=' takes two arguments".into());
    }
    Ok(Atom::new(pred, args))
}

fn literal(s: &str) -> Result<Literal, String> {
    match s.strip_prefix('!') {
        Some(r) => Ok(Literal::neg(atom(r)?)),
        None => Ok(Literal::pos(atom(s)?)),
    }
}

fn task_ref(s: &str) -> Result<TaskRef, String> {
    for (kw, first) in [("first[", true), ("last[", false)] {
        if let Some(r) = s.strip_prefix(kw) {
            let inner = r.strip_suffix(']').ok_or_else(|| format!("malformed set '{s}'"))?;
            let mut set = BTreeSet::new();
            for l in inner.split(',').map(str::trim).filter(|l| !l.is_empty()) {
                if !is_ident(l) {
                    return Err(format!("bad label '{l}'"));
                }
                set.insert(Label::new(l));
            }
            return Ok(if first { TaskRef::First(set) } else { TaskRef::Last(set) });
        }
    }
    if is_ident(s) && !s.contains('=') {
        Ok(TaskRef::Label(Label::new(s)))
    } else {
        Err(format!("bad task reference '{s}'"))
    }
}

fn constraint(toks: &[Tok]) -> Result<Constraint, (usize, String)> {
    let first_col = toks.first().map_or(1, |t| t.col);
    if let Some(t) = toks.iter().find(|t| matches!(t.text.as_str(), "or" | "|" | "||" | "\\/")) {
        return Err((t.col, "disjunctive formulas are not supported; constraints are conjunctive".into()));
    }
    let (negated, rest) = match toks.first() {
        Some(t) if t.text == "not" => (true, &toks[1..]),
        _ => (false, toks),
    };
    let Some((kw, args)) = rest.split_first() else {
        return Err((first_col, "empty constraint".into()));
    };
    let at = |i: usize| args.get(i).map_or(kw.col, |t| t.col);
    let r = |i: usize| task_ref(&args[i].text).map_err(|e| (at(i), e));
    let l = |i: usize| literal(&args[i].text).map_err(|e| (at(i), e));
    let want = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err((kw.col, format!("'{}' takes {n} arguments, got {}", kw.text, args.len())))
        }
    };
    let body = match kw.text.as_str() {
        "ord" => {
            want(2)?;
            ConstraintBody::Order(r(0)?, r(1)?)
        }
        "before" => {
            want(2)?;
            ConstraintBody::Before(l(0)?, r(1)?)
        }
        "after" => {
            want(2)?;
            ConstraintBody::After(r(0)?, l(1)?)
        }
        "between" => {
            want(3)?;
            ConstraintBody::Between(r(0)?, l(1)?, r(2)?)
        }
        other => return Err((kw.col, format!("unknown constraint '{other}'"))),
    };
    Ok(Constraint { negated, body })
}

// ---------------------------------------------------------------------------
// Domains

enum Block {
    None,
    Operator(Operator, Span),
    Method { name: String, head: Task, tasks: Vec<(Label, Task)>, formula: Vec<Constraint>, in_constraints: bool, span: Span },
}

pub fn parse_domain(text: &str) -> Result<DomainDocument, ParseError> {
    let mut diags = Vec::new();
    let mut domain: Option<Domain> = None;
    let mut spans = BTreeMap::new();
    let mut block = Block::None;

    for (i, line) in text.lines().enumerate() {
        let lno = i + 1;
        let toks = tokens(line, lno, &mut diags);
        let Some(head) = toks.first() else { continue };
        let kw = head.text.as_str();
        let args = &toks[1..];

        match &mut block {
            Block::None => match kw {
                "domain" => match args {
                    [n] if is_ident(&n.text) => {
                        if domain.is_some() {
                            diags.push(err(lno, head.col, "duplicate domain declaration".into()));
                        }
                        domain = Some(Domain::new(n.text.clone()));
                    }
                    _ => diags.push(err(lno, head.col, "expected 'domain NAME'".into())),
                },
                "constants" => match &mut domain {
                    Some(d) => {
                        for a in args {
                            match term(&a.text) {
                                Some(Term::Const(c)) => {
                                    d.constants.insert(c);
                                }
                                _ => diags.push(err(lno, a.col, format!("'{}' is not a constant", a.text))),
                            }
                        }
                    }
                    None => diags.push(err(lno, head.col, "constants before domain declaration".into())),
                },
                "operator" => {
                    let sig = args.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ");
                    match task(&sig) {
                        Ok(t) if args.len() == 1 => {
                            let mut params = Vec::new();
                            for a in &t.args {
                                match a {
                                    Term::Var(v) => params.push(v.clone()),
                                    Term::Const(c) => {
                                        diags.push(err(lno, args[0].col, format!("operator parameter {c} is not a variable")))
                                    }
                                }
                            }
                            let span = Span { line: lno, col: head.col };
                            block = Block::Operator(
                                Operator { name: t.name, params, pre: vec![], add: vec![], del: vec![] },
                                span,
                            );
                        }
                        Ok(_) => diags.push(err(lno, head.col, "expected 'operator name(Params)'".into())),
                        Err(e) => diags.push(err(lno, args.first().map_or(head.col, |a| a.col), e)),
                    }
                }
                "method" => match args {
                    [n, h] if is_ident(&n.text) => match task(&h.text) {
                        Ok(t) => {
                            block = Block::Method {
                                name: n.text.clone(),
                                head: t,
                                tasks: vec![],
                                formula: vec![],
                                in_constraints: false,
                                span: Span { line: lno, col: head.col },
                            }
                        }
                        Err(e) => diags.push(err(lno, h.col, e)),
                    },
                    _ => diags.push(err(lno, head.col, "expected 'method NAME head(Args)'".into())),
                },
                other => diags.push(err(lno, head.col, format!("unexpected '{other}' at top level"))),
            },
            Block::Operator(op, span) => match kw {
                "pre" => {
                    for a in args {
                        match literal(&a.text) {
                            Ok(l) => op.pre.push(l),
                            Err(e) => diags.push(err(lno, a.col, e)),
                        }
                    }
                }
                "add" | "del" => {
                    for a in args {
                        match atom(&a.text) {
                            Ok(x) if x.pred == "=" => diags.push(err(lno, a.col, "'=' cannot be an effect".into())),
                            Ok(x) if kw == "add" => op.add.push(x),
                            Ok(x) => op.del.push(x),
                            Err(e) => diags.push(err(lno, a.col, e)),
                        }
                    }
                }
                "end" => {
                    let op = std::mem::replace(op, Operator::nop());
                    let span = *span;
                    block = Block::None;
                    match &mut domain {
                        Some(d) => {
                            if spans.contains_key(&op.name) && op.name != NOP {
                                diags.push(err(span.line, span.col, format!("duplicate declaration of {}", op.name)));
                            }
                            spans.insert(op.name.clone(), span);
                            d.operators.insert(op.name.clone(), op);
                        }
                        None => diags.push(err(span.line, span.col, "operator before domain declaration".into())),
                    }
                }
                other => diags.push(err(lno, head.col, format!("unexpected '{other}' in operator"))),
            },
            Block::Method { name, head: mhead, tasks, formula, in_constraints, span } => match kw {
                "task" if !*in_constraints => {
                    let sig = args.iter().skip(1).map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ");
                    match (args.first(), task(&sig)) {
                        (Some(l), Ok(t)) if args.len() == 2 && is_ident(&l.text) && !l.text.contains('=') => {
                            let label = Label::new(l.text.clone());
                            if tasks.iter().any(|(x, _)| *x == label) {
                                diags.push(err(lno, l.col, format!("duplicate label {label}")));
                            }
                            tasks.push((label, t));
                        }
                        (_, Err(e)) if args.len() == 2 => diags.push(err(lno, args[1].col, e)),
                        _ => diags.push(err(lno, head.col, "expected 'task LABEL name(Args)'".into())),
                    }
                }
                "constraints:" => *in_constraints = true,
                "end" => {
                    let m = Method {
                        name: std::mem::take(name),
                        head: mhead.clone(),
                        body: TaskNetwork::new(std::mem::take(tasks), std::mem::take(formula)),
                    };
                    let span = *span;
                    block = Block::None;
                    match &mut domain {
                        Some(d) => {
                            if spans.contains_key(&m.name) {
                                diags.push(err(span.line, span.col, format!("duplicate declaration of {}", m.name)));
                            }
                            spans.insert(m.name.clone(), span);
                            d.methods.push(m);
                        }
                        None => diags.push(err(span.line, span.col, "method before domain declaration".into())),
                    }
                }
                _ if *in_constraints => match constraint(&toks) {
                    Ok(c) => formula.push(c),
                    Err((col, e)) => diags.push(err(lno, col, e)),
                },
                other => diags.push(err(lno, head.col, format!("unexpected '{other}' in method"))),
            },
        }
    }

    if !matches!(block, Block::None) {
        let line = text.lines().count().max(1);
        diags.push(err(line, 1, "missing 'end'".into()));
    }
    let Some(domain) = domain else {
        diags.push(err(1, 1, "no domain declared".into()));
        return Err(ParseError { diagnostics: diags });
    };
    if diags.iter().any(|d| !d.warning) {
        return Err(ParseError { diagnostics: diags });
    }
    Ok(DomainDocument { domain, spans, warnings: diags })
}

/// Canonical text of a domain; `parse_domain` of the output reproduces it.
pub fn print_domain(d: &Domain) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "domain {}", d.name);
    if !d.constants.is_empty() {
        let cs: Vec<&str> = d.constants.iter().map(String::as_str).collect();
        let _ = writeln!(s, "constants {}", cs.join(" "));
    }
    for o in d.operators.values().filter(|o| **o != Operator::nop()) {
        let params: Vec<Term> = o.params.iter().map(|p| Term::var(p.clone())).collect();
        let _ = writeln!(s, "\noperator {}", no_spaces(&Task::new(o.name.clone(), params).to_string()));
        line_of(&mut s, "  ", "pre", o.pre.iter().map(|l| l.to_string()));
        line_of(&mut s, "  ", "add", o.add.iter().map(|a| a.to_string()));
        line_of(&mut s, "  ", "del", o.del.iter().map(|a| a.to_string()));
        s.push_str("end\n");
    }
    for m in &d.methods {
        let _ = writeln!(s, "\nmethod {} {}", m.name, no_spaces(&m.head.to_string()));
        for (l, t) in &m.body.tasks {
            let _ = writeln!(s, "  task {l} {}", no_spaces(&t.to_string()));
        }
        print_formula(&mut s, "  ", &m.body.formula.iter().cloned().collect::<Vec<_>>());
        s.push_str("end\n");
    }
    s
}

fn print_formula(s: &mut String, indent: &str, f: &[Constraint]) {
    if !f.is_empty() {
        let _ = writeln!(s, "{indent}constraints:");
        for c in f {
            let _ = writeln!(s, "{indent}  {}", constraint_text(c));
        }
    }
}

/// A constraint in the concrete syntax, without spaces inside terms.
pub fn constraint_text(c: &Constraint) -> String {
    let lit = |l: &Literal| no_spaces(&l.to_string());
    let body = match &c.body {
        ConstraintBody::Order(x, y) => format!("ord {x} {y}"),
        ConstraintBody::Before(l, x) => format!("before {} {x}", lit(l)),
        ConstraintBody::After(x, l) => format!("after {x} {}", lit(l)),
        ConstraintBody::Between(x, l, y) => format!("between {x} {} {y}", lit(l)),
    };
    if c.negated {
        format!("not {body}")
    } else {
        body
    }
}

fn no_spaces(s: &str) -> String {
    s.replace(", ", ",")
}

fn line_of(s: &mut String, indent: &str, kw: &str, items: impl Iterator<Item = String>) {
    let items: Vec<String> = items.map(|i| no_spaces(&i)).collect();
    if !items.is_empty() {
        let _ = writeln!(s, "{indent}{kw} {}", items.join(" "));
    }
}

// ---------------------------------------------------------------------------
// Problems

pub fn parse_problem(text: &str) -> Result<ProblemDocument, ParseError> {
    let mut diags = Vec::new();
    let mut name = None;
    let mut domain = None;
    let mut init = BTreeSet::new();
    let mut tasks: Vec<(Label, Task)> = Vec::new();
    let mut formula = Vec::new();
    let mut in_constraints = false;

    for (i, line) in text.lines().enumerate() {
        let lno = i + 1;
        let toks = tokens(line, lno, &mut diags);
        let Some(head) = toks.first() else { continue };
        let args = &toks[1..];
        if in_constraints {
            match constraint(&toks) {
                Ok(c) => formula.push(c),
                Err((col, e)) => diags.push(err(lno, col, e)),
            }
            continue;
        }
        match head.text.as_str() {
            "problem" | "domain" => match args {
                [n] if is_ident(&n.text) => {
                    let slot = if head.text == "problem" { &mut name } else { &mut domain };
                    *slot = Some(n.text.clone());
                }
                _ => diags.push(err(lno, head.col, format!("expected '{} NAME'", head.text))),
            },
            "init" => {
                for a in args {
                    match atom(&a.text) {
                        Ok(x) if x.is_ground() && x.pred != "=" => {
                            init.insert(x);
                        }
                        Ok(_) => diags.push(err(lno, a.col, format!("initial atom {} must be ground", a.text))),
                        Err(e) => diags.push(err(lno, a.col, e)),
                    }
                }
            }
            "task" => match args {
                [l, t] if is_ident(&l.text) && !l.text.contains('=') => match task(&t.text) {
                    Ok(t) => {
                        let label = Label::new(l.text.clone());
                        if tasks.iter().any(|(x, _)| *x == label) {
                            diags.push(err(lno, l.col, format!("duplicate label {label}")));
                        }
                        tasks.push((label, t));
                    }
                    Err(e) => diags.push(err(lno, t.col, e)),
                },
                _ => diags.push(err(lno, head.col, "expected 'task LABEL name(Args)'".into())),
            },
            "constraints:" => in_constraints = true,
            other => diags.push(err(lno, head.col, format!("unexpected '{other}'"))),
        }
    }
    let Some(name) = name else {
        diags.push(err(1, 1, "no problem declared".into()));
        return Err(ParseError { diagnostics: diags });
    };
    if diags.iter().any(|d| !d.warning) {
        return Err(ParseError { diagnostics: diags });
    }
    Ok(ProblemDocument {
        name,
        domain: domain.unwrap_or_default(),
        init: State(init),
        network: TaskNetwork::new(tasks, formula),
        warnings: diags,
    })
}

pub fn print_problem(p: &ProblemDocument) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "problem {}", p.name);
    if !p.domain.is_empty() {
        let _ = writeln!(s, "domain {}", p.domain);
    }
    line_of(&mut s, "", "init", p.init.atoms().map(|a| a.to_string()));
    for (l, t) in &p.network.tasks {
        let _ = writeln!(s, "task {l} {}", no_spaces(&t.to_string()));
    }
    print_formula(&mut s, "", &p.network.formula.iter().cloned().collect::<Vec<_>>());
    s
}

// ---------------------------------------------------------------------------
// Scenarios

/// Splits `a(x, y), b` at top-level commas.
fn split_tasks(s: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut start = 0;
    for (i, ch) in s.chars().enumerate() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch == ',' && depth == 0 {
            out.push((start, std::mem::take(&mut cur)));
            start = i + 1;
        } else {
            cur.push(ch);
        }
    }
    out.push((start, cur));
    out.into_iter()
        .map(|(i, t)| {
            let lead = t.chars().take_while(|c| c.is_whitespace()).count();
            (i + lead, t.trim().to_string())
        })
        .filter(|(_, t)| !t.is_empty())
        .collect()
}

/// Parses a comma-separated task list such as `transmitData(loc1), monitor`.
pub fn parse_task_list(s: &str) -> Result<Vec<Task>, String> {
    split_tasks(s).into_iter().map(|(_, t)| task(&t.replace(' ', ""))).collect()
}

pub fn parse_scenario(text: &str) -> Result<ScenarioDocument, ParseError> {
    let mut diags = Vec::new();
    let mut doc = ScenarioDocument::default();
    for (i, line) in text.lines().enumerate() {
        let lno = i + 1;
        let body: String = line.chars().take_while(|c| *c != '#').collect();
        if body.trim().is_empty() {
            continue;
        }
        let Some((idx, rest)) = body.split_once(':') else {
            diags.push(err(lno, 1, "expected 'ITERATION: task, ...'".into()));
            continue;
        };
        let Ok(k) = idx.trim().parse::<usize>() else {
            diags.push(err(lno, 1, format!("bad iteration index '{}'", idx.trim())));
            continue;
        };
        let off = idx.chars().count() + 2;
        let entry = doc.events.entry(k).or_default();
        doc.spans.entry(k).or_insert(Span { line: lno, col: 1 });
        for (col, t) in split_tasks(rest) {
            match task(&t.replace(' ', "")) {
                Ok(t) => entry.push(t),
                Err(e) => diags.push(err(lno, off + col, e)),
            }
        }
    }
    if diags.is_empty() {
        Ok(doc)
    } else {
        Err(ParseError { diagnostics: diags })
    }
}

pub fn print_scenario(doc: &ScenarioDocument) -> String {
    let mut s = String::new();
    for (k, ts) in &doc.events {
        let ts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
        let _ = writeln!(s, "{k}: {}", ts.join(", "));
    }
    s
}

// ---------------------------------------------------------------------------
// Strategy scripts

/// One directive per line: `act L`, `reduce L METHOD`, `replace ORIGIN METHOD` (`top` for the top couple).
pub fn parse_choices(text: &str) -> Result<Vec<Directive>, ParseError> {
    let mut diags = Vec::new();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lno = i + 1;
        let toks = tokens(line, lno, &mut diags);
        let words: Vec<&str> = toks.iter().map(|t| t.text.as_str()).collect();
        match words.as_slice() {
            [] => {}
            ["act", l] => out.push(Directive::Act(Label::new(*l))),
            ["reduce", l, m] => out.push(Directive::Reduce(Label::new(*l), m.to_string())),
            ["replace", o, m] => {
                let origin = if *o == "top" { None } else { Some(Label::new(*o)) };
                out.push(Directive::Replace(origin, m.to_string()))
            }
            _ => diags.push(err(lno, toks[0].col, format!("unknown directive '{}'", line.trim()))),
        }
    }
    if diags.is_empty() {
        Ok(out)
    } else {
        Err(ParseError { diagnostics: diags })
    }
}

pub fn print_choices(ds: &[Directive]) -> String {
    ds.iter().map(|d| format!("{d}\n")).collect()
}
