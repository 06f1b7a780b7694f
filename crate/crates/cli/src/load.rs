//! Reading and checking input files.

use std::fs;
use std::path::Path;

use htnact::io::{parse_choices, parse_domain, parse_problem, parse_scenario, Diagnostic, ProblemDocument, ScenarioDocument};
use htnact::strategy::Directive;
use htnact::{validate_domain, Domain};

use crate::commands::Failure;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn located(path: &Path, ds: &[Diagnostic]) -> String {
    ds.iter().map(|d| format!("{}:{d}", path.display())).collect::<Vec<_>>().join("\n")
}

fn warn(path: &Path, ds: &[Diagnostic]) {
    if !ds.is_empty() {
        eprintln!("{}", located(path, ds));
    }
}

/// Parses and validates a domain; validation errors stop the command.
pub fn domain(path: &Path) -> Result<Domain, Failure> {
    let doc = parse_domain(&read(path)?).map_err(|e| Failure::Input(located(path, &e.diagnostics)))?;
    warn(path, &doc.warnings);
    let report = validate_domain(&doc.domain);
    if !report.is_valid() {
        return Err(Failure::Input(format!("{}: invalid domain\n{}", path.display(), report.to_string().trim_end())));
    }
    if !report.is_empty() {
        eprint!("{report}");
    }
    Ok(doc.domain)
}

pub fn problem(path: &Path, domain: &Domain) -> Result<ProblemDocument, Failure> {
    let doc = parse_problem(&read(path)?).map_err(|e| Failure::Input(located(path, &e.diagnostics)))?;
    warn(path, &doc.warnings);
    if doc.domain != domain.name {
        eprintln!("{}: warning: problem is for domain {}, not {}", path.display(), doc.domain, domain.name);
    }
    if let Some((_, t)) = doc.network.tasks.iter().find(|(_, t)| domain.kind(t).is_none()) {
        return Err(Failure::Input(format!("{}: unknown task symbol {}", path.display(), t.name)));
    }
    Ok(doc)
}

pub fn scenario(path: &Path, domain: &Domain) -> Result<ScenarioDocument, Failure> {
    let doc = parse_scenario(&read(path)?).map_err(|e| Failure::Input(located(path, &e.diagnostics)))?;
    let errors = doc.check(domain);
    if !errors.is_empty() {
        return Err(Failure::Input(located(path, &errors)));
    }
    Ok(doc)
}

pub fn choices(path: &Path) -> Result<Vec<Directive>, Failure> {
    parse_choices(&read(path)?).map_err(|e| Failure::Input(located(path, &e.diagnostics)))
}
