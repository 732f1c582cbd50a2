//! Scenario runner for `extriloc`: reads a JSON scenario, runs the selected
//! suites and writes a JSON report, or exports DOT graphs.

pub mod dot;
pub mod run;
pub mod scenario;

use std::fmt;

pub use run::{run_scenario, Report, RunOptions, Status, SuiteResult};
pub use scenario::{Scenario, Suite};

use extriloc::relative::RelStructure;

/// A run that did not produce a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// Unreadable or invalid scenario.
    Parse(String),
    /// A referenced object lies outside the shift window.
    Window(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Window(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Parse(s) => write!(f, "invalid scenario: {s}"),
            Failure::Window(s) => write!(f, "{s}"),
        }
    }
}

impl std::error::Error for Failure {}

/// Reads a scenario from a path, falling back to a bundled scenario of that
/// name when no such file exists.
pub fn load_scenario(path: &str) -> Result<Scenario, Failure> {
    match std::fs::read_to_string(path) {
        Ok(text) => Scenario::from_json(&text),
        Err(e) => match scenario::bundled(path) {
            Some(text) => Scenario::from_json(text),
            None => Err(Failure::Parse(format!("{path}: {e}"))),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DotKind {
    ArQuiver,
    SnGraph,
}

pub fn export_dot(sc: &Scenario, what: DotKind) -> Result<String, Failure> {
    let be = sc.build_backend()?;
    match what {
        DotKind::ArQuiver => Ok(dot::ar_quiver(&be)),
        DotKind::SnGraph => {
            let cp = sc.cotorsion_pair(&be)?;
            let mut subs = sc.subcategories(&be, cp.as_ref())?;
            if subs.len() != 1 {
                return Err(Failure::Parse("sn_graph needs a single subcategory".into()));
            }
            let (_, n) = subs.remove(0);
            let rs = RelStructure::new(&be, n, sc.seed).map_err(scenario::lift)?;
            dot::sn_graph(&rs).map_err(scenario::lift)
        }
    }
}
