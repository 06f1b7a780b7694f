//! Inputs shared by the engine benchmarks.

use htnact::fixtures;
use htnact::gen::{corpus, GenConfig};
use htnact::verify::Instance;
use htnact::{Configuration, Engine};

/// Rover with instruments not calibrated.
pub fn rover() -> Instance {
    let p = fixtures::rover_problem();
    let eng = Engine::new(fixtures::rover(), &p.init, &p.network);
    Instance::new("rover", eng, Configuration::initial(p.network.clone(), p.init.clone()))
}

/// The first `n` generated problems.
pub fn random(n: usize) -> Vec<Instance> {
    corpus(0, n, &GenConfig::default()).iter().map(Instance::from_problem).collect()
}
