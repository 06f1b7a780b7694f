//! Hierarchical task networks with state constraints: acting by reduction, action and replacement,
//! a bounded planning oracle, and an observe-act agent loop.

pub mod acting;
pub mod agent;
pub mod constraints;
pub mod error;
pub mod export;
pub mod fixtures;
pub mod gen;
pub mod io;
pub mod model;
pub mod oracle;
pub mod reduction;
pub mod strategy;
pub mod trace;
pub mod validate;
pub mod verify;

pub use acting::{Configuration, Couple, Engine, ExecOptions, Status, Step};
pub use constraints::{Constraint, ConstraintBody, Formula, TaskNetwork, TaskRef};
pub use error::EngineError;
pub use model::{Atom, Domain, Label, Literal, Method, Operator, State, Substitution, Task, Term};
pub use reduction::Alternative;
pub use validate::{validate_domain, Report};
