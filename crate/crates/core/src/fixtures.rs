//! Bundled rover fixtures.

use crate::io::{parse_choices, parse_domain, parse_problem, parse_scenario, ProblemDocument, ScenarioDocument};
use crate::model::Domain;
use crate::strategy::Directive;

pub const ROVER_HTN: &str = include_str!("../fixtures/rover.htn");
pub const ROVER_JUMP_HTN: &str = include_str!("../fixtures/rover-jump.htn");
pub const ROVER_PROB: &str = include_str!("../fixtures/rover.prob");
pub const ROVER_JUMP_PROB: &str = include_str!("../fixtures/rover-jump.prob");
pub const ROVER_CALI_PROB: &str = include_str!("../fixtures/rover-cali.prob");
pub const WALKTHROUGH_EVT: &str = include_str!("../fixtures/walkthrough.evt");
pub const WALKTHROUGH_CHOICES: &str = include_str!("../fixtures/walkthrough.choices");

pub fn rover() -> Domain {
    parse_domain(ROVER_HTN).expect("bundled rover.htn parses").domain
}

pub fn rover_jump() -> Domain {
    parse_domain(ROVER_JUMP_HTN).expect("bundled rover-jump.htn parses").domain
}

/// Transmit and monitor, instruments not calibrated.
pub fn rover_problem() -> ProblemDocument {
    parse_problem(ROVER_PROB).expect("bundled rover.prob parses")
}

pub fn rover_jump_problem() -> ProblemDocument {
    parse_problem(ROVER_JUMP_PROB).expect("bundled rover-jump.prob parses")
}

pub fn rover_cali_problem() -> ProblemDocument {
    parse_problem(ROVER_CALI_PROB).expect("bundled rover-cali.prob parses")
}

pub fn walkthrough_scenario() -> ScenarioDocument {
    parse_scenario(WALKTHROUGH_EVT).expect("bundled walkthrough.evt parses")
}

pub fn walkthrough_choices() -> Vec<Directive> {
    parse_choices(WALKTHROUGH_CHOICES).expect("bundled walkthrough.choices parses")
}
