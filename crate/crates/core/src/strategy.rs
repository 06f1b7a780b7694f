//! Choosing among the configurations `exec` offers.

use std::collections::VecDeque;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::acting::{Configuration, Step};
use crate::error::EngineError;
use crate::model::Label;

pub trait Strategy {
    /// Index into `options`, which is never empty.
    fn choose(&mut self, cfg: &Configuration, options: &[(Step, Configuration)]) -> Result<usize, EngineError>;
}

/// Act on the least applicable primary action, else reduce the least primary task with its first
/// relevant body, else replace, preferring non-jumps.
#[derive(Clone, Copy, Debug, Default)]
pub struct DefaultStrategy;

impl Strategy for DefaultStrategy {
    fn choose(&mut self, _: &Configuration, options: &[(Step, Configuration)]) -> Result<usize, EngineError> {
        let pick = |f: &dyn Fn(&Step) -> bool| options.iter().position(|(s, _)| f(s));
        pick(&|s| matches!(s, Step::Action { .. }))
            .or_else(|| pick(&|s| matches!(s, Step::Reduction { .. })))
            .or_else(|| pick(&|s| matches!(s, Step::Replacement { jump: false, .. })))
            .or_else(|| (!options.is_empty()).then_some(0))
            .ok_or_else(|| EngineError::Contract("no options to choose from".into()))
    }
}

/// Uniform choice from a seeded ChaCha stream.
#[derive(Clone, Debug)]
pub struct RandomStrategy {
    rng: ChaCha8Rng,
}

impl RandomStrategy {
    pub fn new(seed: u64) -> Self {
        RandomStrategy { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl Strategy for RandomStrategy {
    fn choose(&mut self, _: &Configuration, options: &[(Step, Configuration)]) -> Result<usize, EngineError> {
        if options.is_empty() {
            return Err(EngineError::Contract("no options to choose from".into()));
        }
        Ok(self.rng.gen_range(0..options.len()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Directive {
    Act(Label),
    Reduce(Label, String),
    /// Replacement on the couple with this origin (`None` for the top couple).
    Replace(Option<Label>, String),
}

impl Directive {
    pub fn matches(&self, step: &Step) -> bool {
        match (self, step) {
            (Directive::Act(l), Step::Action { label, .. }) => l == label,
            (Directive::Reduce(l, m), Step::Reduction { label, method, .. }) => l == label && m == method,
            (Directive::Replace(o, m), Step::Replacement { origin, method, .. }) => o == origin && m == method,
            _ => false,
        }
    }
}

impl fmt::Display for Directive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Directive::Act(l) => write!(f, "act {l}"),
            Directive::Reduce(l, m) => write!(f, "reduce {l} {m}"),
            Directive::Replace(Some(o), m) => write!(f, "replace {o} {m}"),
            Directive::Replace(None, m) => write!(f, "replace top {m}"),
        }
    }
}

/// Follows a directive list strictly, then hands over to a fallback ([`DefaultStrategy`] unless set).
pub struct ScriptedStrategy {
    script: VecDeque<Directive>,
    fallback: Box<dyn Strategy>,
}

impl ScriptedStrategy {
    pub fn new(script: impl IntoIterator<Item = Directive>) -> Self {
        Self::with_fallback(script, Box::new(DefaultStrategy))
    }

    pub fn with_fallback(script: impl IntoIterator<Item = Directive>, fallback: Box<dyn Strategy>) -> Self {
        ScriptedStrategy { script: script.into_iter().collect(), fallback }
    }

    pub fn remaining(&self) -> usize {
        self.script.len()
    }
}

impl Strategy for ScriptedStrategy {
    fn choose(&mut self, cfg: &Configuration, options: &[(Step, Configuration)]) -> Result<usize, EngineError> {
        let Some(d) = self.script.front() else {
            return self.fallback.choose(cfg, options);
        };
        let i = options
            .iter()
            .position(|(s, _)| d.matches(s))
            .ok_or_else(|| EngineError::Strategy(format!("directive '{d}' matches no available execution")))?;
        self.script.pop_front();
        Ok(i)
    }
}
