//! Executes the suites of a scenario and assembles the report.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use extriloc::backend::{Backend, Obj};
use extriloc::heart::{check_cohomological, compare_relative_structures, heart_equivalence_check, CotorsionPair};
use extriloc::instances::{random_morphism, random_object, random_target, Sampling};
use extriloc::localization::{AxiomReport, Classification, LocBudget, Verdict, CONE_BUDGET};
use extriloc::relative::{window_ext_classes, RelStructure};
use extriloc::subcat::Subcat;
use extriloc::Error;

use crate::scenario::{Scenario, Suite};
use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    WindowExceeded,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub subcat: String,
    pub status: Status,
    pub instances: usize,
    pub failures: Vec<String>,
    pub details: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub version: &'static str,
    pub scenario: Scenario,
    pub seed: u64,
    pub window: Option<i32>,
    pub disclaimers: Vec<String>,
    pub results: Vec<SuiteResult>,
    /// Wall-clock time, present only when requested so that reports stay
    /// byte-identical across runs.
    pub timing_ms: Option<u64>,
}

impl Report {
    /// `0` on success, `3` if a suite left the window, `1` on any failure.
    pub fn exit_code(&self) -> i32 {
        if self.results.iter().any(|r| r.status == Status::WindowExceeded) {
            3
        } else if self.results.iter().any(|r| r.status == Status::Fail) {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the scenario's suite list.
    pub suites: Vec<Suite>,
    pub timing: bool,
}

/// Runs every requested suite on every subcategory of the scenario.
pub fn run_scenario(sc: &Scenario, opts: &RunOptions) -> Result<Report, Failure> {
    let start = Instant::now();
    let be = sc.build_backend()?;
    let cp = sc.cotorsion_pair(&be)?;
    let subs = sc.subcategories(&be, cp.as_ref())?;
    let suites = if opts.suites.is_empty() { sc.suites.clone() } else { opts.suites.clone() };
    let mut results = Vec::new();
    for (name, n) in subs {
        let mut ctx = Ctx::new(sc, &be, cp.as_ref(), name, n);
        for &suite in &suites {
            results.push(ctx.run(suite));
        }
    }
    let mut disclaimers = vec![
        "all quantifications range over the working window of the backend".to_string(),
        "functorial finiteness is window-certified only".to_string(),
    ];
    if sc.budgets.samples > 0 {
        disclaimers.push(format!("seeded suites use {} samples", sc.budgets.samples));
    }
    disclaimers.push(format!("localized hom spaces are computed to depth {}", sc.budgets.roof_depth));
    Ok(Report {
        schema: crate::scenario::SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        scenario: sc.clone(),
        seed: sc.seed,
        window: be.work_window(),
        disclaimers,
        results,
        timing_ms: opts.timing.then(|| start.elapsed().as_millis() as u64),
    })
}

struct Ctx<'a> {
    sc: &'a Scenario,
    be: &'a Backend,
    cp: Option<&'a CotorsionPair>,
    name: String,
    rs: std::result::Result<RelStructure<'a>, String>,
    verdict: Option<std::result::Result<Verdict, Error>>,
}

struct Outcome {
    instances: usize,
    failures: Vec<String>,
    details: Value,
}

enum SuiteError {
    Skip(String),
    Engine(Error),
}

impl From<Error> for SuiteError {
    fn from(e: Error) -> Self {
        SuiteError::Engine(e)
    }
}

impl<'a> Ctx<'a> {
    fn new(sc: &'a Scenario, be: &'a Backend, cp: Option<&'a CotorsionPair>, name: String, n: Subcat) -> Self {
        let rs = RelStructure::new(be, n, sc.seed).map_err(|e| e.to_string());
        Ctx { sc, be, cp, name, rs, verdict: None }
    }

    fn sampling(&self) -> Sampling {
        match self.sc.budgets.samples {
            0 => Sampling::Exhaustive,
            samples => Sampling::Seeded { samples, seed: self.sc.seed },
        }
    }

    fn budget(&self) -> LocBudget {
        LocBudget { depth: self.sc.budgets.roof_depth }
    }

    fn run(&mut self, suite: Suite) -> SuiteResult {
        let out = match suite {
            Suite::AxiomsMs => self.axioms(true),
            Suite::AxiomsMr => self.axioms(false),
            Suite::Relative => self.relative(),
            Suite::Classify => self.classify(),
            Suite::Verdier => self.verdier(),
            Suite::Abelian => self.abelian(),
            Suite::Heart => self.heart(),
            Suite::Sakai => self.sakai(),
        };
        let (status, instances, failures, details) = match out {
            Ok(o) => {
                let status = if o.failures.is_empty() { Status::Pass } else { Status::Fail };
                (status, o.instances, o.failures, o.details)
            }
            Err(SuiteError::Skip(why)) => (Status::Skipped, 0, Vec::new(), json!({ "reason": why })),
            Err(SuiteError::Engine(e @ Error::WindowExceeded { .. })) => {
                (Status::WindowExceeded, 0, vec![e.to_string()], Value::Null)
            }
            Err(SuiteError::Engine(e)) => (Status::Fail, 0, vec![e.to_string()], Value::Null),
        };
        SuiteResult { suite: suite.name(), subcat: self.name.clone(), status, instances, failures, details }
    }

    fn rs(&self) -> std::result::Result<&RelStructure<'a>, SuiteError> {
        self.rs.as_ref().map_err(|e| SuiteError::Skip(e.clone()))
    }

    fn verdict(&mut self) -> std::result::Result<Verdict, SuiteError> {
        if self.verdict.is_none() {
            let seed = self.sc.seed;
            let v = self.rs()?.theorem_a_classify(seed);
            self.verdict = Some(v);
        }
        match self.verdict.as_ref().expect("just set") {
            Ok(v) => Ok(v.clone()),
            Err(e) => Err(SuiteError::Engine(e.clone())),
        }
    }

    fn axioms(&self, ms: bool) -> std::result::Result<Outcome, SuiteError> {
        let rs = self.rs()?;
        let reports = if ms { rs.verify_ms(self.sampling())? } else { rs.verify_mr(self.sampling())? };
        Ok(axiom_outcome(&reports))
    }

    fn relative(&self) -> std::result::Result<Outcome, SuiteError> {
        let rs = self.rs()?;
        let be = self.be;
        let r = rs.classify_relative(self.sc.seed)?;
        let names = |v: &[usize]| v.iter().map(|&a| be.name(a)).collect::<Vec<_>>();
        Ok(Outcome {
            instances: r.conflations_checked,
            failures: Vec::new(),
            details: json!({
                "thick_in_rel": r.thick_in_rel,
                "biresolving": r.biresolving,
                "serre": r.serre,
                "conflations_checked": r.conflations_checked,
                "no_inflation": names(&r.no_inflation),
                "no_deflation": names(&r.no_deflation),
                "thick_failure": r.thick_failure,
                "serre_failure": r.serre_failure,
            }),
        })
    }

    fn classify(&mut self) -> std::result::Result<Outcome, SuiteError> {
        let v = self.verdict()?;
        let failures = v.violations.iter().map(|s| format!("THEOREM VIOLATION: {s}")).collect();
        Ok(Outcome {
            instances: v.cone_found + v.cone_refuted + v.cone_undecided,
            failures,
            details: serde_json::to_value(&v).expect("verdict serializes"),
        })
    }

    fn verdier(&mut self) -> std::result::Result<Outcome, SuiteError> {
        let be = self.be;
        let rs = self.rs()?;
        if !rs.n.is_thick_tri(be, self.sc.seed)? {
            return Err(SuiteError::Skip("subcategory is not thick".into()));
        }
        let mut failures = Vec::new();
        let mut instances = 0;
        let work = be.work_labels();
        for &a in &work {
            for &b in &work {
                for f in be.hom_basis(&Obj::ind(a), &Obj::ind(b)) {
                    instances += 1;
                    let (l, r, s) = (rs.in_l(&f)?, rs.in_r(&f)?, rs.in_sn(&f)?);
                    if !(l == s && r == s) {
                        failures.push(format!("{} → {}: L {l}, R {r}, S_N {s}", be.name(a), be.name(b)));
                    }
                }
            }
        }
        for e in window_ext_classes(be, self.sc.seed)? {
            instances += 1;
            if !rs.in_en(&e) {
                failures.push(format!("class {} → {} not in E_N", be.obj_name(e.c()), be.obj_name(e.a_shifted())));
            }
        }
        let mut table = Vec::new();
        let mut unstable = 0;
        for &b in &work {
            let chain = rs.loc_chain(&Obj::ind(b), self.budget());
            for &a in &work {
                let h = rs.loc_hom_along(&Obj::ind(a), &chain);
                unstable += usize::from(!h.stabilized);
                table.push(json!({ "a": be.name(a), "b": be.name(b), "dim": h.dim, "stabilized_at": h.stabilized_at }));
            }
        }
        Ok(Outcome { instances, failures, details: json!({ "unstabilized": unstable, "loc_hom": table }) })
    }

    fn abelian(&mut self) -> std::result::Result<Outcome, SuiteError> {
        let v = self.verdict()?;
        if v.classification != Classification::Abelian {
            return Err(SuiteError::Skip(format!("classification is {:?}", v.classification)));
        }
        let be = self.be;
        let rs = self.rs()?;
        let samples = self.sc.budgets.samples.max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(self.sc.seed);
        let mut failures = Vec::new();
        let mut factorized = 0;
        let mut triangles = Vec::new();
        let mut draws = 0;
        while factorized < samples && draws < 20 * samples {
            draws += 1;
            let x = random_object(be, &mut rng, 2);
            let Some(y) = random_target(be, &mut rng, &x, 2) else { continue };
            let f = random_morphism(be, &mut rng, &x, &y);
            factorized += 1;
            if let Err(e) = rs.mono_epi_factorize(&rs.q_morphism(&f), self.sc.seed ^ draws as u64) {
                failures.push(format!("mono-epi factorization of {}: {e}", be.obj_name(&x)));
            }
            if self.cp.is_some() {
                if let Ok(t) = be.cone(&f) {
                    triangles.push(t);
                }
            }
        }
        let mut details = json!({ "factorizations": factorized, "cone_budget": CONE_BUDGET });
        let mut instances = factorized;
        if let Some(cp) = self.cp {
            let c = check_cohomological(cp, be, &triangles);
            instances += c.triangles;
            failures.extend(c.failures.iter().map(|s| format!("not exact in the heart: {s}")));
            details["cohomological"] = json!({ "triangles": c.triangles, "exact": c.exact });
        }
        Ok(Outcome { instances, failures, details })
    }

    fn cotorsion(&self) -> std::result::Result<&'a CotorsionPair, SuiteError> {
        self.cp.ok_or_else(|| SuiteError::Skip("scenario has no cotorsion pair".into()))
    }

    fn heart(&self) -> std::result::Result<Outcome, SuiteError> {
        let cp = self.cotorsion()?;
        let rs = self.rs()?;
        let be = self.be;
        let check = cp.check(be);
        let mut failures: Vec<String> = check.ext_failures.iter().chain(&check.coverage_failures).cloned().collect();
        let objects: Vec<Obj> = be.work_labels().into_iter().map(Obj::ind).collect();
        let eq = heart_equivalence_check(cp, rs, &objects, self.budget());
        failures.extend(eq.mismatches.iter().cloned());
        Ok(Outcome {
            instances: check.pairs_checked + eq.compared,
            failures,
            details: json!({
                "cotorsion": check,
                "compared": eq.compared,
                "excluded": eq.excluded,
                "not_hit": eq.not_hit,
            }),
        })
    }

    fn sakai(&self) -> std::result::Result<Outcome, SuiteError> {
        let cp = self.cotorsion()?;
        let rs = self.rs()?;
        let r = compare_relative_structures(cp, rs, self.sc.seed)?;
        let failures = r
            .eh_mismatches
            .iter()
            .map(|s| format!("E_H vs E_N at {s}"))
            .chain(r.ejs_mismatches.iter().map(|s| format!("E^N vs E^L_N at {s}")))
            .collect();
        Ok(Outcome {
            instances: r.classes,
            failures,
            details: json!({ "classes": r.classes, "in_en": r.in_en, "in_el": r.in_el }),
        })
    }
}

fn axiom_outcome(reports: &[AxiomReport]) -> Outcome {
    let mut failures = Vec::new();
    for r in reports {
        failures.extend(r.failures.iter().map(|f| format!("{}: {f}", r.name)));
        if r.undecided > 0 {
            failures.push(format!("{}: {} undecided instances", r.name, r.undecided));
        }
    }
    let per: Vec<Value> = reports
        .iter()
        .map(|r| json!({ "name": r.name, "instances": r.instances, "passes": r.passes, "undecided": r.undecided }))
        .collect();
    Outcome { instances: reports.iter().map(|r| r.instances).sum(), failures, details: Value::Array(per) }
}
