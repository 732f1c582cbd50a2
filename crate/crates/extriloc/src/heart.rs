//! Cotorsion pairs `(U, V)` on a derived backend, the heart `H/[W]` and
//! the cohomological functor `H = LRπ`.
//!
//! Both supported pairs are resolved by approximations: the cone cover
//! of `X` is the cocone of a right `U`-approximation, the cocone cover the
//! cone of a right `U[-1]`-approximation. Heart objects are compared
//! through the avatar `Hom(T, -)`, a module over `End(T)`, where `T` is
//! `kQ[c]` for the truncation at `c` and the rigid object itself otherwise.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::backend::{Backend, IndecLabel, Morphism, Obj, Triangle};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::localization::LocBudget;
use crate::quiver::projective_rep;
use crate::relative::{window_ext_classes, ExtClass, RelStructure};
use crate::subcat::{hom_dim_labels, DegreeSet, Subcat, SubcatSpec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Recipe {
    /// `U = D^{≥c+1}`, `V = D^{≤c-1}` in shift degrees; heart in degree `c`.
    Truncation { cut: i32 },
    /// `U = add T[1]`, `V = T^⊥` for a rigid `T`.
    Rigid { t: Vec<IndecLabel> },
}

#[derive(Debug, Clone)]
pub struct CotorsionPair {
    pub recipe: Recipe,
    pub u: Subcat,
    pub v: Subcat,
    pub w: Subcat,
    /// `U[-1]`.
    pub u_down: Subcat,
    /// `V[1]`.
    pub v_up: Subcat,
    /// The object `T` of the avatar `Hom(T, -)`.
    pub t_av: Obj,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CotorsionCheck {
    pub valid: bool,
    pub pairs_checked: usize,
    pub objects_covered: usize,
    pub ext_failures: Vec<String>,
    pub coverage_failures: Vec<String>,
}

/// `H(X)` with the maps of its construction.
#[derive(Debug, Clone)]
pub struct HeartObject {
    pub source: Obj,
    pub rep: Obj,
    /// `α_X: X^- → X`.
    pub alpha: Morphism,
    /// `β: X^- → (X^-)^+`.
    pub beta: Morphism,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CohomReport {
    pub triangles: usize,
    pub exact: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ComparisonReport {
    pub classes: usize,
    pub in_en: usize,
    pub in_el: usize,
    pub eh_mismatches: Vec<String>,
    pub ejs_mismatches: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceRow {
    pub a: String,
    pub b: String,
    /// `None` when the colimit did not stabilize.
    pub loc: Option<usize>,
    /// `dim Hom_{H/[W]}(HA, HB)`; `None` if the heart objects left the window.
    pub heart: Option<usize>,
    /// `dim Hom_{End T}(Hom(T, A), Hom(T, B))`.
    pub module: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct EquivalenceReport {
    pub rows: Vec<EquivalenceRow>,
    pub compared: usize,
    pub mismatches: Vec<String>,
    pub excluded: Vec<String>,
    /// Heart indecomposables whose avatar differs from that of `H(X)`.
    pub not_hit: Vec<String>,
}

impl CotorsionPair {
    pub fn t_structure(be: &Backend, cut: i32) -> Result<Self> {
        let d = be.derived().ok_or_else(|| Error::Precondition("t-structures need a derived backend".into()))?;
        let u = Subcat::new(be, SubcatSpec::HomologyVanishing(DegreeSet::AtLeast(cut + 1)))?;
        let v = Subcat::new(be, SubcatSpec::HomologyVanishing(DegreeSet::AtMost(cut - 1)))?;
        let q = d.quiver();
        let mut t = Vec::new();
        for i in 0..q.n() {
            let dims = projective_rep(q, be.k(), &[i]).dims;
            let l = IndecLabel::Shifted { module: dims, degree: cut };
            t.push(be.find(&l).ok_or_else(|| Error::WindowExceeded { degree: cut, window: be.window().unwrap_or(0) })?);
        }
        Self::assemble(be, Recipe::Truncation { cut }, u, v, Obj(t))
    }

    /// `T` given by label names; rigidity `Hom(T, T[1]) = 0` is checked.
    pub fn rigid(be: &Backend, names: &[&str]) -> Result<Self> {
        let labels: Vec<IndecLabel> =
            names.iter().map(|s| be.parse_label(s).map(|a| be.label(a).clone())).collect::<Result<_>>()?;
        for a in &labels {
            for b in &labels {
                if hom_dim_labels(be, a, &be.shift_indec_label(b, 1)) != 0 {
                    return Err(Error::Precondition(format!("T is not rigid: Hom({a}, {b}[1]) ≠ 0")));
                }
            }
        }
        let shifted: Vec<IndecLabel> = labels.iter().map(|l| be.shift_indec_label(l, 1)).collect();
        let u = Subcat::new(be, SubcatSpec::Explicit(shifted))?;
        let v = Subcat::new(be, SubcatSpec::RightPerp(labels.clone()))?;
        let t = Obj(labels.iter().map(|l| be.find(l).expect("parsed label")).collect());
        Self::assemble(be, Recipe::Rigid { t: labels }, u, v, t)
    }

    fn assemble(be: &Backend, recipe: Recipe, u: Subcat, v: Subcat, t_av: Obj) -> Result<Self> {
        let w = Subcat::new(be, SubcatSpec::Intersection(Box::new(u.spec().clone()), Box::new(v.spec().clone())))?;
        let u_down = u.shifted(be, -1)?;
        let v_up = v.shifted(be, 1)?;
        Ok(CotorsionPair { recipe, u, v, w, u_down, v_up, t_av })
    }

    /// `add(U * V)`, the kernel of `H`.
    pub fn kernel_spec(&self) -> SubcatSpec {
        match &self.recipe {
            Recipe::Truncation { cut } => SubcatSpec::HomologyVanishing(DegreeSet::Except(BTreeSet::from([*cut]))),
            Recipe::Rigid { t } => SubcatSpec::RightPerp(t.clone()),
        }
    }

    pub fn kernel(&self, be: &Backend) -> Result<Subcat> {
        Subcat::new(be, self.kernel_spec())
    }

    /// `Hom(U, V[1]) = 0` on the working window and both covers for every
    /// working-window indecomposable.
    pub fn check(&self, be: &Backend) -> CotorsionCheck {
        let mut out = CotorsionCheck::default();
        let work = be.work_labels();
        for &a in work.iter().filter(|&&a| self.u.contains_index(a)) {
            for &b in work.iter().filter(|&&b| self.v.contains_index(b)) {
                out.pairs_checked += 1;
                let b1 = be.shift_indec_label(be.label(b), 1);
                if hom_dim_labels(be, be.label(a), &b1) != 0 {
                    out.ext_failures.push(format!("E({}, {}) ≠ 0", be.name(a), be.name(b)));
                }
            }
        }
        for &a in &work {
            let x = Obj::ind(a);
            let ok = match (self.cone_cover(be, &x), self.cocone_cover(be, &x)) {
                (Ok(_), Ok(_)) => true,
                (Err(e), _) | (_, Err(e)) => {
                    out.coverage_failures.push(format!("{}: {e}", be.name(a)));
                    false
                }
            };
            out.objects_covered += ok as usize;
        }
        out.valid = out.ext_failures.is_empty() && out.coverage_failures.is_empty();
        out
    }

    /// `V' → U' → X → V'[1]` with `U' ∈ U`, `V' ∈ V`.
    pub fn cone_cover(&self, be: &Backend, x: &Obj) -> Result<Triangle> {
        let u = minimal_right_approximation(&self.u, be, x)?;
        let t = be.cocone(&u)?;
        if !self.v.contains(t.a()) {
            return Err(Error::Invariant(format!("cocone {} of the U-approximation is not in V", be.obj_name(t.a()))));
        }
        Ok(t)
    }

    /// `U'[-1] → X → V' → U'` with `U' ∈ U`, `V' ∈ V`.
    pub fn cocone_cover(&self, be: &Backend, x: &Obj) -> Result<Triangle> {
        let a = minimal_right_approximation(&self.u_down, be, x)?;
        let t = be.cone(&a)?;
        if !self.v.contains(t.c()) {
            return Err(Error::Invariant(format!("cone {} of the U[-1]-approximation is not in V", be.obj_name(t.c()))));
        }
        Ok(t)
    }

    pub fn in_w(&self, x: &Obj) -> bool {
        self.w.contains(x)
    }

    /// `X ∈ W * V[1]`: the `U`-part of the cone cover lies in `V`.
    pub fn in_cplus(&self, be: &Backend, x: &Obj) -> Result<bool> {
        let t = self.cone_cover(be, x)?;
        Ok(self.v.contains(t.b()))
    }

    /// `X ∈ U[-1] * W`: the `V`-part of the cocone cover lies in `U`.
    pub fn in_cminus(&self, be: &Backend, x: &Obj) -> Result<bool> {
        let t = self.cocone_cover(be, x)?;
        Ok(self.u.contains(t.c()))
    }

    pub fn in_h(&self, be: &Backend, x: &Obj) -> Result<bool> {
        Ok(self.in_cplus(be, x)? && self.in_cminus(be, x)?)
    }

    /// `U_X[-1] → X →β X^+ → U_X`: cone cover `V' → U' →g' X`, then a
    /// right `U[-1]`-approximation `a` of `U'`, and the cone of `g' ∘ a`.
    pub fn reflection(&self, be: &Backend, x: &Obj) -> Result<Triangle> {
        let cc = self.cone_cover(be, x)?;
        let a = minimal_right_approximation(&self.u_down, be, cc.b())?;
        let comp = be.compose(&cc.g, &a)?;
        be.cone(&comp)
    }

    /// `X^- →α X → V_X[1] → X^-[1]`: cocone cover `X →c V'`, then a left
    /// `V[1]`-approximation `b` of `V'`, and the cocone of `b ∘ c`.
    pub fn coreflection(&self, be: &Backend, x: &Obj) -> Result<Triangle> {
        let cc = self.cocone_cover(be, x)?;
        let b = minimal_left_approximation(&self.v_up, be, cc.c())?;
        let comp = be.compose(&b, &cc.g)?;
        be.cocone(&comp)
    }

    /// `H(X) = (X^-)^+`.
    pub fn heart_object(&self, be: &Backend, x: &Obj) -> Result<HeartObject> {
        let co = self.coreflection(be, x)?;
        let re = self.reflection(be, co.a())?;
        Ok(HeartObject { source: x.clone(), rep: re.c().clone(), alpha: co.f, beta: re.g })
    }

    /// `H(f): H(A) → H(B)`, well defined modulo `[W]`.
    pub fn heart_mor(&self, be: &Backend, f: &Morphism) -> Result<Morphism> {
        let ha = self.heart_object(be, &f.dom)?;
        let hb = self.heart_object(be, &f.cod)?;
        self.heart_mor_between(be, f, &ha, &hb)
    }

    pub fn heart_mor_between(&self, be: &Backend, f: &Morphism, ha: &HeartObject, hb: &HeartObject) -> Result<Morphism> {
        let fa = be.compose(f, &ha.alpha)?;
        let f_minus =
            be.lift_through(&hb.alpha, &fa).ok_or_else(|| Error::Invariant("α_B is not a C^- approximation".into()))?;
        let target = be.compose(&hb.beta, &f_minus)?;
        be.extend_along(&ha.beta, &target).ok_or_else(|| Error::Invariant("β is not a C^+ approximation".into()))
    }

    pub fn heart_hom_dim(&self, be: &Backend, ha: &HeartObject, hb: &HeartObject) -> usize {
        self.w.quotient_dim(be, &ha.rep, &hb.rep)
    }

    // ---- the avatar Hom(T, -) -----------------------------------------------

    pub fn avatar_dim(&self, be: &Backend, x: &Obj) -> usize {
        be.hom_dim(&self.t_av, x)
    }

    /// Matrix of `Hom(T, f)`.
    pub fn avatar_map(&self, be: &Backend, f: &Morphism) -> Mat {
        be.post_matrix(f, &self.t_av)
    }

    /// `dim Hom_{End T}(Hom(T, A), Hom(T, B))`: linear maps commuting with
    /// precomposition by every basis endomorphism of `T`.
    pub fn module_hom_dim(&self, be: &Backend, a: &Obj, b: &Obj) -> usize {
        let (da, db) = (self.avatar_dim(be, a), self.avatar_dim(be, b));
        if da == 0 || db == 0 {
            return 0;
        }
        let k = be.k();
        let n = da * db;
        let mut rows = Vec::new();
        for e in be.hom_basis(&self.t_av, &self.t_av) {
            let ra = be.pre_matrix(&e, a);
            let rb = be.pre_matrix(&e, b);
            // φ ra - rb φ, with φ stored row-major (db × da).
            for i in 0..db {
                for c in 0..da {
                    let mut row = vec![0u32; n];
                    for j in 0..da {
                        row[i * da + j] = k.add(row[i * da + j], ra.get(j, c));
                    }
                    for l in 0..db {
                        row[l * da + c] = k.sub(row[l * da + c], rb.get(i, l));
                    }
                    rows.push(row);
                }
            }
        }
        if rows.is_empty() {
            return n;
        }
        n - Mat::from_rows(k, &rows).rank()
    }

    /// Sakai's `E_H`: `H(f)` monic and `H(g)` epic on the realization.
    pub fn in_eh(&self, be: &Backend, e: &ExtClass) -> Result<bool> {
        let t = be.realize(&e.h)?;
        let mono = self.avatar_map(be, &t.f).rank() == self.avatar_dim(be, t.a());
        let epi = self.avatar_map(be, &t.g).rank() == self.avatar_dim(be, t.c());
        Ok(mono && epi)
    }

    /// `h ∘ x = 0` for every `x: T[1] → C`.
    pub fn in_ejs(&self, be: &Backend, e: &ExtClass) -> Result<bool> {
        let t1 = be.shift_obj(&self.t_av, 1)?;
        Ok(be.hom_dim(&t1, e.c()) == 0 || be.post_matrix(&e.h, &t1).is_zero())
    }
}

/// Right `N`-approximation of `x` with redundant summands removed greedily.
pub fn minimal_right_approximation(n: &Subcat, be: &Backend, x: &Obj) -> Result<Morphism> {
    let approx = n.right_approximation(be, x);
    if approx.truncated {
        return Err(Error::WindowExceeded { degree: 0, window: be.window().unwrap_or(0) });
    }
    let relevant: Vec<(Obj, usize)> =
        n.members().into_iter().map(Obj::ind).map(|m| (be.hom_dim(&m, x), m)).filter(|(d, _)| *d > 0).map(|(d, m)| (m, d)).collect();
    let is_approx = |u: &Morphism| relevant.iter().all(|(m, d)| be.post_matrix(u, m).rank() == *d);
    let mut u = approx.map;
    let mut i = u.dom.len();
    while i > 0 {
        i -= 1;
        let keep: Vec<usize> = (0..u.dom.len()).filter(|&j| j != i).collect();
        let cand = be.compose(&u, &be.inclusion(&u.dom, &keep))?;
        if is_approx(&cand) {
            u = cand;
        }
    }
    Ok(u)
}

/// Left `N`-approximation of `x` with redundant summands removed greedily.
pub fn minimal_left_approximation(n: &Subcat, be: &Backend, x: &Obj) -> Result<Morphism> {
    let approx = n.left_approximation(be, x);
    if approx.truncated {
        return Err(Error::WindowExceeded { degree: 0, window: be.window().unwrap_or(0) });
    }
    let relevant: Vec<(Obj, usize)> =
        n.members().into_iter().map(Obj::ind).map(|m| (be.hom_dim(x, &m), m)).filter(|(d, _)| *d > 0).map(|(d, m)| (m, d)).collect();
    let is_approx = |v: &Morphism| relevant.iter().all(|(m, d)| be.pre_matrix(v, m).rank() == *d);
    let mut v = approx.map;
    let mut i = v.cod.len();
    while i > 0 {
        i -= 1;
        let keep: Vec<usize> = (0..v.cod.len()).filter(|&j| j != i).collect();
        let cand = be.compose(&be.projection(&v.cod, &keep), &v)?;
        if is_approx(&cand) {
            v = cand;
        }
    }
    Ok(v)
}

/// Exactness of `Hom(T, A) → Hom(T, B) → Hom(T, C)` on each triangle.
pub fn check_cohomological(cp: &CotorsionPair, be: &Backend, triangles: &[Triangle]) -> CohomReport {
    let mut out = CohomReport::default();
    for t in triangles {
        out.triangles += 1;
        let (ff, fg) = (cp.avatar_map(be, &t.f), cp.avatar_map(be, &t.g));
        let composite_zero = fg.mul(&ff).is_zero();
        if composite_zero && ff.rank() + fg.rank() == cp.avatar_dim(be, t.b()) {
            out.exact += 1;
        } else {
            out.failures.push(format!("{} → {} → {}", be.obj_name(t.a()), be.obj_name(t.b()), be.obj_name(t.c())));
        }
    }
    out
}

/// `E_H = E_N` and `E^N = E^L_N` on every window extension class.
pub fn compare_relative_structures(cp: &CotorsionPair, rs: &RelStructure, seed: u64) -> Result<ComparisonReport> {
    let be = rs.be;
    let mut out = ComparisonReport::default();
    for e in window_ext_classes(be, seed)? {
        out.classes += 1;
        let (en, el) = (rs.in_en(&e), rs.in_el(&e));
        out.in_en += en as usize;
        out.in_el += el as usize;
        let show = || format!("{} → {}", be.obj_name(e.c()), be.obj_name(e.a_shifted()));
        if cp.in_eh(be, &e)? != en {
            out.eh_mismatches.push(format!("{}: E_N says {en}", show()));
        }
        if cp.in_ejs(be, &e)? != el {
            out.ejs_mismatches.push(format!("{}: E^L_N says {el}", show()));
        }
    }
    Ok(out)
}

/// Hom tables of the localization, the heart and `mod End(T)` on the given
/// objects. Pairs whose colimit did not stabilize are excluded.
pub fn heart_equivalence_check(
    cp: &CotorsionPair,
    rs: &RelStructure,
    objects: &[Obj],
    budget: LocBudget,
) -> EquivalenceReport {
    let be = rs.be;
    let mut out = EquivalenceReport::default();
    let hearts: Vec<Option<HeartObject>> = objects.iter().map(|x| cp.heart_object(be, x).ok()).collect();
    for (x, h) in objects.iter().zip(&hearts) {
        if let (Ok(true), false, Some(h)) = (cp.in_h(be, x), cp.in_w(x), h) {
            if cp.avatar_dim(be, &h.rep) != cp.avatar_dim(be, x) {
                out.not_hit.push(be.obj_name(x));
            }
        }
    }
    for (b, hb) in objects.iter().zip(&hearts) {
        let chain = rs.loc_chain(b, budget);
        for (a, ha) in objects.iter().zip(&hearts) {
            let lh = rs.loc_hom_along(a, &chain);
            let module = cp.module_hom_dim(be, a, b);
            let heart = match (ha, hb) {
                (Some(ha), Some(hb)) => Some(cp.heart_hom_dim(be, ha, hb)),
                _ => None,
            };
            let loc = lh.stabilized.then_some(lh.dim);
            let pair = format!("({}, {})", be.obj_name(a), be.obj_name(b));
            match loc {
                None => out.excluded.push(pair.clone()),
                Some(l) => {
                    out.compared += 1;
                    if l != module || heart.is_some_and(|h| h != module) {
                        out.mismatches.push(format!("{pair}: loc {l}, heart {heart:?}, module {module}"));
                    }
                }
            }
            out.rows.push(EquivalenceRow { a: be.obj_name(a), b: be.obj_name(b), loc, heart, module });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::BackendDescriptor;
    use crate::quiver::Dynkin;

    fn derived(n: usize, w: i32) -> Backend {
        Backend::with_headroom(BackendDescriptor::DerivedDynkin { quiver: Dynkin::A(n), arrows: None, p: 2, w }, 2).unwrap()
    }

    fn obj(be: &Backend, s: &str) -> Obj {
        be.parse_obj(s).unwrap()
    }

    #[test]
    fn cotorsion_examples() {
        let be = derived(2, 1);
        let t = CotorsionPair::t_structure(&be, 0).unwrap();
        assert!(t.check(&be).valid);
        let r = CotorsionPair::rigid(&be, &["P1", "P2"]).unwrap();
        assert!(r.check(&be).valid);
        assert_eq!(t.kernel(&be).unwrap().members(), r.kernel(&be).unwrap().members());
    }

    #[test]
    fn heart_membership() {
        let be = derived(2, 1);
        let t = CotorsionPair::t_structure(&be, 0).unwrap();
        assert!(t.in_h(&be, &obj(&be, "S1")).unwrap());
        assert!(!t.in_h(&be, &obj(&be, "S1[1]")).unwrap());
        assert!(!t.in_h(&be, &obj(&be, "S2[-1]")).unwrap());
        let h = t.heart_object(&be, &obj(&be, "S1")).unwrap();
        assert!(h.rep.iso_class_eq(&obj(&be, "S1")));
        let h = t.heart_object(&be, &obj(&be, "S2[1]")).unwrap();
        assert_eq!(t.avatar_dim(&be, &h.rep), 0);
    }

    #[test]
    fn rigid_reflection_of_simple() {
        let be = derived(2, 1);
        let r = CotorsionPair::rigid(&be, &["P1", "P2"]).unwrap();
        let s1 = obj(&be, "S1");
        let cc = r.cocone_cover(&be, &s1).unwrap();
        assert!(r.v.contains(cc.c()));
        let h = r.heart_object(&be, &s1).unwrap();
        assert_eq!(r.avatar_dim(&be, &h.rep), 1);
    }

    #[test]
    fn heart_kills_kernel_morphisms() {
        let be = derived(2, 1);
        let t = CotorsionPair::t_structure(&be, 0).unwrap();
        let n = t.kernel(&be).unwrap();
        let labels = be.work_labels();
        for &a in &labels {
            for &b in &labels {
                for f in be.hom_basis(&Obj::ind(a), &Obj::ind(b)) {
                    let hf = t.heart_mor(&be, &f).unwrap();
                    assert_eq!(t.w.in_ideal(&be, &hf), n.in_ideal(&be, &f), "{}", be.obj_name(&f.dom));
                }
            }
        }
    }

    #[test]
    fn ar_triangle_is_exact_in_heart() {
        let be = derived(2, 1);
        let t = CotorsionPair::t_structure(&be, 0).unwrap();
        let h = be.hom_basis(&obj(&be, "S1"), &obj(&be, "S2[1]")).remove(0);
        let tri = be.realize(&h).unwrap();
        let rep = check_cohomological(&t, &be, std::slice::from_ref(&tri));
        assert_eq!(rep.exact, 1);
        assert!(t.in_eh(&be, &ExtClass::new(h)).unwrap());
    }

    #[test]
    fn module_homs_match_quiver_homs() {
        let be = derived(3, 0);
        let t = CotorsionPair::t_structure(&be, 0).unwrap();
        for a in be.work_labels() {
            for b in be.work_labels() {
                let (x, y) = (Obj::ind(a), Obj::ind(b));
                assert_eq!(t.module_hom_dim(&be, &x, &y), be.hom_dim(&x, &y));
            }
        }
    }

    #[test]
    fn relative_structures_agree() {
        let be = derived(2, 1);
        for cp in [CotorsionPair::t_structure(&be, 0).unwrap(), CotorsionPair::rigid(&be, &["P1", "P2"]).unwrap()] {
            let rs = RelStructure::new(&be, cp.kernel(&be).unwrap(), 0).unwrap();
            let r = compare_relative_structures(&cp, &rs, 0).unwrap();
            assert!(r.eh_mismatches.is_empty(), "{:?}", r.eh_mismatches);
            assert!(r.ejs_mismatches.is_empty(), "{:?}", r.ejs_mismatches);
        }
    }
}
