//! Scenario files: what to build and which suites to run.

use serde::{Deserialize, Serialize};

use extriloc::backend::{Backend, BackendDescriptor, IndecLabel};
use extriloc::heart::CotorsionPair;
use extriloc::quiver::Dynkin;
use extriloc::subcat::{DegreeSet, Subcat, SubcatSpec};
use extriloc::Error;

use crate::Failure;

pub const SCHEMA: u32 = 1;

/// Extra shift degrees the derived engine keeps beyond the window, so cones
/// and shifts of window objects stay representable.
pub const HEADROOM: i32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_schema")]
    pub schema: u32,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
    pub backend: BackendSpec,
    #[serde(default)]
    pub subcat: Option<SubcatEntry>,
    #[serde(default)]
    pub cotorsion: Option<CotorsionSpec>,
    #[serde(default)]
    pub suites: Vec<Suite>,
    #[serde(default)]
    pub budgets: Budgets,
}

fn default_schema() -> u32 {
    SCHEMA
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackendSpec {
    StableNakayama {
        n: usize,
        #[serde(default = "default_p")]
        p: u32,
    },
    Derived {
        /// Dynkin type such as `A3`, `D4`, `E6`.
        quiver: String,
        /// Optional orientation, 0-based vertex pairs.
        #[serde(default)]
        arrows: Option<Vec<(usize, usize)>>,
        #[serde(default = "default_p")]
        p: u32,
        window: i32,
    },
}

fn default_p() -> u32 {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubcatEntry {
    pub kind: SubcatKind,
    #[serde(default)]
    pub labels: Vec<String>,
    #[serde(default)]
    pub degrees: Option<DegreeSet>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubcatKind {
    Explicit,
    ShiftOrbit,
    HomologyVanishing,
    RightPerp,
    Zero,
    All,
    /// Every subset of the working-window indecomposables, one run each.
    AllSubsets,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CotorsionSpec {
    TStructure { cut: i32 },
    Rigid { labels: Vec<String> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    AxiomsMs,
    AxiomsMr,
    Relative,
    Classify,
    Verdier,
    Abelian,
    Heart,
    Sakai,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::AxiomsMs,
        Suite::AxiomsMr,
        Suite::Relative,
        Suite::Classify,
        Suite::Verdier,
        Suite::Abelian,
        Suite::Heart,
        Suite::Sakai,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::AxiomsMs => "axioms_ms",
            Suite::AxiomsMr => "axioms_mr",
            Suite::Relative => "relative",
            Suite::Classify => "classify",
            Suite::Verdier => "verdier",
            Suite::Abelian => "abelian",
            Suite::Heart => "heart",
            Suite::Sakai => "sakai",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    #[serde(default = "default_depth")]
    pub roof_depth: usize,
    /// Sample count for seeded suites; `0` asks for exhaustive enumeration.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_depth() -> usize {
    4
}

fn default_samples() -> usize {
    100
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { roof_depth: default_depth(), samples: default_samples() }
    }
}

/// Scenarios shipped with the tool, addressable by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("stable_n4_exhaustive", include_str!("../scenarios/stable_n4_exhaustive.json")),
    ("a2_tstructure_abelian", include_str!("../scenarios/a2_tstructure_abelian.json")),
    ("a2_verdier", include_str!("../scenarios/a2_verdier.json")),
    ("a3_rigid_heart", include_str!("../scenarios/a3_rigid_heart.json")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn parse_dynkin(s: &str) -> Option<Dynkin> {
    let s = s.trim();
    let n: usize = s.get(1..)?.parse().ok()?;
    match s.chars().next()? {
        'A' | 'a' => Some(Dynkin::A(n)),
        'D' | 'd' => Some(Dynkin::D(n)),
        'E' | 'e' => Some(Dynkin::E(n)),
        _ => None,
    }
}

pub(crate) fn lift(e: Error) -> Failure {
    match e {
        Error::WindowExceeded { .. } => Failure::Window(e.to_string()),
        e => Failure::Parse(e.to_string()),
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, Failure> {
        let sc: Scenario = serde_json::from_str(text).map_err(|e| Failure::Parse(e.to_string()))?;
        if sc.schema != SCHEMA {
            return Err(Failure::Parse(format!("unsupported schema {}", sc.schema)));
        }
        if sc.subcat.is_none() && sc.cotorsion.is_none() {
            return Err(Failure::Parse("scenario needs a subcat or a cotorsion pair".into()));
        }
        Ok(sc)
    }

    pub fn window(&self) -> Option<i32> {
        match &self.backend {
            BackendSpec::Derived { window, .. } => Some(*window),
            BackendSpec::StableNakayama { .. } => None,
        }
    }

    pub fn set_window(&mut self, w: i32) {
        if let BackendSpec::Derived { window, .. } = &mut self.backend {
            *window = w;
        }
    }

    pub fn descriptor(&self) -> Result<BackendDescriptor, Failure> {
        Ok(match &self.backend {
            BackendSpec::StableNakayama { n, p } => BackendDescriptor::StableNakayama { n: *n, p: *p },
            BackendSpec::Derived { quiver, arrows, p, window } => BackendDescriptor::DerivedDynkin {
                quiver: parse_dynkin(quiver).ok_or_else(|| Failure::Parse(format!("unknown quiver {quiver:?}")))?,
                arrows: arrows.clone(),
                p: *p,
                w: *window,
            },
        })
    }

    pub fn build_backend(&self) -> Result<Backend, Failure> {
        Backend::with_headroom(self.descriptor()?, HEADROOM).map_err(lift)
    }

    pub fn cotorsion_pair(&self, be: &Backend) -> Result<Option<CotorsionPair>, Failure> {
        match &self.cotorsion {
            None => Ok(None),
            Some(CotorsionSpec::TStructure { cut }) => CotorsionPair::t_structure(be, *cut).map(Some).map_err(lift),
            Some(CotorsionSpec::Rigid { labels }) => {
                let names: Vec<&str> = labels.iter().map(String::as_str).collect();
                CotorsionPair::rigid(be, &names).map(Some).map_err(lift)
            }
        }
    }

    /// The subcategories to analyse, each with a display name. A missing
    /// `subcat` means the kernel of the cotorsion pair.
    pub fn subcategories(&self, be: &Backend, cp: Option<&CotorsionPair>) -> Result<Vec<(String, Subcat)>, Failure> {
        let Some(entry) = &self.subcat else {
            let cp = cp.expect("checked at parse time");
            return Ok(vec![("kernel".into(), cp.kernel(be).map_err(lift)?)]);
        };
        let labels = || -> Result<Vec<IndecLabel>, Failure> {
            entry.labels.iter().map(|s| be.parse_label(s).map(|a| be.label(a).clone()).map_err(lift)).collect()
        };
        let one = |spec: SubcatSpec| -> Result<Vec<(String, Subcat)>, Failure> {
            let n = Subcat::new(be, spec).map_err(lift)?;
            Ok(vec![(describe(be, &n), n)])
        };
        match entry.kind {
            SubcatKind::Explicit => one(SubcatSpec::Explicit(labels()?)),
            SubcatKind::ShiftOrbit => one(SubcatSpec::ShiftOrbit(labels()?)),
            SubcatKind::RightPerp => one(SubcatSpec::RightPerp(labels()?)),
            SubcatKind::HomologyVanishing => {
                let d = entry.degrees.clone().ok_or_else(|| Failure::Parse("homology_vanishing needs degrees".into()))?;
                one(SubcatSpec::HomologyVanishing(d))
            }
            SubcatKind::Zero => Ok(vec![("0".into(), Subcat::zero(be))]),
            SubcatKind::All => Ok(vec![("all".into(), Subcat::all(be))]),
            SubcatKind::AllSubsets => {
                let work = be.work_labels();
                if work.len() > 12 {
                    return Err(Failure::Parse(format!("all_subsets over {} indecomposables is too large", work.len())));
                }
                let mut out = Vec::new();
                for mask in 0u32..1 << work.len() {
                    let ls: Vec<IndecLabel> =
                        (0..work.len()).filter(|i| mask >> i & 1 == 1).map(|i| be.label(work[i]).clone()).collect();
                    let n = Subcat::new(be, SubcatSpec::Explicit(ls)).map_err(lift)?;
                    out.push((describe(be, &n), n));
                }
                Ok(out)
            }
        }
    }
}

/// `{a, b, ...}` on working-window members.
pub fn describe(be: &Backend, n: &Subcat) -> String {
    let names: Vec<String> = n.work_members(be).into_iter().map(|a| be.name(a)).collect();
    format!("{{{}}}", names.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenarios_parse() {
        for (name, text) in BUNDLED {
            let sc = Scenario::from_json(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            let be = sc.build_backend().unwrap();
            let cp = sc.cotorsion_pair(&be).unwrap();
            assert!(!sc.subcategories(&be, cp.as_ref()).unwrap().is_empty());
        }
    }

    #[test]
    fn all_subsets_of_stable_n4() {
        let sc = Scenario::from_json(bundled("stable_n4_exhaustive").unwrap()).unwrap();
        let be = sc.build_backend().unwrap();
        let subs = sc.subcategories(&be, None).unwrap();
        assert_eq!(subs.len(), 8);
        assert_eq!(subs[0].0, "{}");
    }

    #[test]
    fn rejects_unknown_keys_and_labels() {
        assert!(Scenario::from_json(r#"{"backend":{"kind":"stable_nakayama","n":4},"subcat":{"kind":"zero"},"extra":1}"#).is_err());
        let sc = Scenario::from_json(
            r#"{"backend":{"kind":"derived","quiver":"A2","window":1},"subcat":{"kind":"explicit","labels":["Q7"]}}"#,
        )
        .unwrap();
        let be = sc.build_backend().unwrap();
        assert!(matches!(sc.subcategories(&be, None), Err(Failure::Parse(_))));
    }

    #[test]
    fn dynkin_names() {
        assert_eq!(parse_dynkin("A3"), Some(Dynkin::A(3)));
        assert_eq!(parse_dynkin("e6"), Some(Dynkin::E(6)));
        assert_eq!(parse_dynkin("B2"), None);
    }
}
