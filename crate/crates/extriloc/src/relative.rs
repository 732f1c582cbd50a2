//! The relative structure `(C, E_N, s_N)` and the morphism classes it
//! determines.
//!
//! An extension `h: C → A[1]` lies in `E^L_N` when `h ∘ x` factors through
//! `N[1]` for every `x: N_i → C`, and in `E^R_N` when `y[1] ∘ h` factors
//! through `N` for every `y: A → N_i`. Both conditions are linear in `x`
//! (resp. `y`), so it suffices to test a basis of each hom space.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::backend::{enumerate_affine, Backend, Morphism, Obj, Triangle};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::subcat::{ext_vectors, ExtClosure, Subcat};

/// An extension `δ ∈ E(C, A)` realized as `h: C → A[1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtClass {
    pub h: Morphism,
}

impl ExtClass {
    pub fn new(h: Morphism) -> Self {
        ExtClass { h }
    }

    pub fn c(&self) -> &Obj {
        &self.h.dom
    }

    pub fn a_shifted(&self) -> &Obj {
        &self.h.cod
    }
}

/// `s = r ∘ l` with `l ∈ L` and `r ∈ R_sp` (or `l ∈ L_sp`, `r ∈ R`).
#[derive(Debug, Clone)]
pub struct RlFactorization {
    pub l: Morphism,
    pub r: Morphism,
    /// Fillers tried before both memberships held.
    pub attempts: usize,
}

#[derive(Debug, Clone, Default)]
pub struct RelClassification {
    pub thick_in_rel: bool,
    pub biresolving: bool,
    pub serre: bool,
    pub conflations_checked: usize,
    /// Working-window labels with no inflation into `N` found.
    pub no_inflation: Vec<usize>,
    /// Working-window labels with no deflation from `N` found.
    pub no_deflation: Vec<usize>,
    pub thick_failure: Option<String>,
    pub serre_failure: Option<String>,
}

/// Cap on the affine families of fillers that are searched.
pub const FILLER_CAP: usize = 64;

/// A backend together with an extension-closed subcategory.
#[derive(Debug, Clone)]
pub struct RelStructure<'a> {
    pub be: &'a Backend,
    pub n: Subcat,
    /// `N[1]`.
    pub n_up: Subcat,
    pub closure: Option<ExtClosure>,
}

impl<'a> RelStructure<'a> {
    /// Checks extension-closure on the working window first.
    pub fn new(be: &'a Backend, n: Subcat, seed: u64) -> Result<Self> {
        let closure = n.is_extension_closed(be, seed)?;
        if let Some(ce) = &closure.counterexample {
            return Err(Error::Precondition(format!(
                "subcategory is not extension-closed: extension of {} by {} has middle term {}",
                be.name(ce.n2),
                be.name(ce.n1),
                be.obj_name(&ce.middle)
            )));
        }
        let mut rs = Self::unchecked(be, n)?;
        rs.closure = Some(closure);
        Ok(rs)
    }

    pub fn unchecked(be: &'a Backend, n: Subcat) -> Result<Self> {
        let n_up = n.shifted(be, 1)?;
        Ok(RelStructure { be, n, n_up, closure: None })
    }

    // ---- E_N ------------------------------------------------------------

    pub fn in_el(&self, e: &ExtClass) -> bool {
        let be = self.be;
        let (c, a1) = (e.c(), e.a_shifted());
        self.n.members().into_iter().all(|m| {
            let xm = Obj::ind(m);
            if be.hom_dim(&xm, c) == 0 {
                return true;
            }
            let post = be.post_matrix(&e.h, &xm);
            (0..post.cols).all(|j| self.n_up.in_ideal_coeffs(be, &xm, a1, &post.col(j)))
        })
    }

    pub fn in_er(&self, e: &ExtClass) -> bool {
        let be = self.be;
        let (c, a1) = (e.c(), e.a_shifted());
        self.n_up.members().into_iter().all(|m| {
            let xm = Obj::ind(m);
            if be.hom_dim(a1, &xm) == 0 {
                return true;
            }
            let pre = be.pre_matrix(&e.h, &xm);
            (0..pre.cols).all(|j| self.n.in_ideal_coeffs(be, c, &xm, &pre.col(j)))
        })
    }

    pub fn in_en(&self, e: &ExtClass) -> bool {
        self.in_el(e) && self.in_er(e)
    }

    pub fn is_rel_inflation(&self, f: &Morphism) -> Result<bool> {
        let t = self.be.cone(f)?;
        Ok(self.in_en(&ExtClass::new(t.h)))
    }

    pub fn is_rel_deflation(&self, g: &Morphism) -> Result<bool> {
        let t = self.be.cocone(g)?;
        Ok(self.in_en(&ExtClass::new(t.h)))
    }

    // ---- morphism classes ---------------------------------------------------

    /// `Cone(f) ∈ N` and the connecting map factors through `N[1]`.
    pub fn in_l(&self, f: &Morphism) -> Result<bool> {
        let t = self.be.cone(f)?;
        Ok(self.n.contains(t.c()) && self.n_up.in_ideal(self.be, &t.h))
    }

    /// `CoCone(g) ∈ N` and the connecting map factors through `N`.
    pub fn in_r(&self, g: &Morphism) -> Result<bool> {
        let t = self.be.cocone(g)?;
        Ok(self.n.contains(t.a()) && self.n.in_ideal(self.be, &t.h))
    }

    pub fn in_lsp(&self, f: &Morphism) -> Result<bool> {
        Ok(self.in_l(f)? && self.be.extend_along(f, &self.be.identity(&f.dom)).is_some())
    }

    pub fn in_rsp(&self, g: &Morphism) -> Result<bool> {
        Ok(self.in_r(g)? && self.be.lift_through(g, &self.be.identity(&g.cod)).is_some())
    }

    /// Both outer maps of the triangle `A → B →s C → A[1]` factor
    /// through `N`.
    pub fn in_sn(&self, s: &Morphism) -> Result<bool> {
        let t = self.be.cocone(s)?;
        Ok(self.n.in_ideal(self.be, &t.f) && self.n.in_ideal(self.be, &t.h))
    }

    /// `s = r ∘ l` with `l ∈ L`, `r ∈ R_sp`: factor the connecting map
    /// `h = h2 ∘ h1` through `N`, take the homotopy pullback `P` of `h` along
    /// `h2`; `r: P → C` is the pullback leg and `l` a filler of the square
    /// `(s, 0)`.
    pub fn rl_factorize(&self, s: &Morphism) -> Result<RlFactorization> {
        let be = self.be;
        let t = be.cocone(s)?;
        if !(self.n.in_ideal(be, &t.f) && self.n.in_ideal(be, &t.h)) {
            return Err(Error::Precondition("rl_factorize needs s in S_N".into()));
        }
        let w = self.n.factors_through(be, &t.h).ok_or_else(|| Error::Invariant("connecting map leaves [N]".into()))?;
        let pb = be.homotopy_pullback(&t.h, &w.g)?;
        let r = pb.b.clone();
        if !self.in_rsp(&r)? {
            return Err(Error::Invariant("pullback leg is not a split R-morphism".into()));
        }
        let target = be.vcat(s, &be.zero(&s.dom, &w.n0));
        let m = be.post_matrix(&pb.triangle.f, &s.dom);
        let mut attempts = 0;
        for v in fillers(be, &m, &target.coeffs)? {
            attempts += 1;
            let l = Morphism { dom: s.dom.clone(), cod: pb.b.dom.clone(), coeffs: v };
            if self.in_l(&l)? && be.compose(&r, &l)? == *s {
                return Ok(RlFactorization { l, r, attempts });
            }
        }
        Err(Error::Invariant(format!("no filler in L among {attempts}")))
    }

    /// `s = r ∘ l` with `l ∈ L_sp`, `r ∈ R`: factor `f = f2 ∘ f1` through
    /// `N`, take the homotopy pushout of `f` along `f1`; `l: B → E` is the
    /// pushout leg and `r` a filler of the square `(s, 0)`.
    pub fn dual_rl_factorize(&self, s: &Morphism) -> Result<RlFactorization> {
        let be = self.be;
        let t = be.cocone(s)?;
        if !(self.n.in_ideal(be, &t.f) && self.n.in_ideal(be, &t.h)) {
            return Err(Error::Precondition("dual_rl_factorize needs s in S_N".into()));
        }
        let w = self.n.factors_through(be, &t.f).ok_or_else(|| Error::Invariant("first map leaves [N]".into()))?;
        let po = be.homotopy_pushout(&t.f, &w.h)?;
        let l = po.a_prime.clone();
        if !self.in_lsp(&l)? {
            return Err(Error::Invariant("pushout leg is not a split L-morphism".into()));
        }
        let target = be.hcat(s, &be.zero(&w.n0, &s.cod));
        let m = be.pre_matrix(&po.triangle.g, &s.cod);
        let mut attempts = 0;
        for v in fillers(be, &m, &target.coeffs)? {
            attempts += 1;
            let r = Morphism { dom: l.cod.clone(), cod: s.cod.clone(), coeffs: v };
            if self.in_r(&r)? && be.compose(&r, &l)? == *s {
                return Ok(RlFactorization { l, r, attempts });
            }
        }
        Err(Error::Invariant(format!("no filler in R among {attempts}")))
    }

    // ---- classification -----------------------------------------------------

    /// Thick / biresolving / Serre checks inside `(C, E_N, s_N)`, over
    /// conflations realizing window extension classes.
    pub fn classify_relative(&self, seed: u64) -> Result<RelClassification> {
        let be = self.be;
        let mut out = RelClassification { thick_in_rel: true, biresolving: true, serre: true, ..Default::default() };
        for e in window_ext_classes(be, seed)? {
            if !self.in_en(&e) {
                continue;
            }
            let t = be.realize(&e.h)?;
            out.conflations_checked += 1;
            let ins = [self.n.contains(t.a()), self.n.contains(t.b()), self.n.contains(t.c())];
            let count = ins.iter().filter(|&&b| b).count();
            let show = |t: &Triangle| format!("{} → {} → {}", be.obj_name(t.a()), be.obj_name(t.b()), be.obj_name(t.c()));
            if count == 2 && out.thick_in_rel {
                out.thick_in_rel = false;
                out.thick_failure = Some(show(&t));
            }
            if ins[1] && !(ins[0] && ins[2]) && out.serre {
                out.serre = false;
                out.serre_failure = Some(show(&t));
            }
        }
        for a in be.work_labels() {
            let x = Obj::ind(a);
            if !self.has_inflation_into_n(&x)? {
                out.no_inflation.push(a);
            }
            if !self.has_deflation_from_n(&x)? {
                out.no_deflation.push(a);
            }
        }
        out.biresolving = out.no_inflation.is_empty() && out.no_deflation.is_empty();
        Ok(out)
    }

    fn has_inflation_into_n(&self, x: &Obj) -> Result<bool> {
        let be = self.be;
        let v = self.n.left_approximation(be, x).map;
        let mut candidates = vec![be.zero(x, &Obj::zero()), v.clone()];
        let m = v.cod.len();
        if m <= 10 {
            for mask in 1..(1u32 << m) - 1 {
                let idx: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
                candidates.push(be.compose(&be.projection(&v.cod, &idx), &v)?);
            }
        }
        for f in candidates {
            if let Ok(true) = self.is_rel_inflation(&f) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn has_deflation_from_n(&self, x: &Obj) -> Result<bool> {
        let be = self.be;
        let u = self.n.right_approximation(be, x).map;
        let mut candidates = vec![be.zero(&Obj::zero(), x), u.clone()];
        let m = u.dom.len();
        if m <= 10 {
            for mask in 1..(1u32 << m) - 1 {
                let idx: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
                candidates.push(be.compose(&u, &be.inclusion(&u.dom, &idx))?);
            }
        }
        for g in candidates {
            if let Ok(true) = self.is_rel_deflation(&g) {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Solutions of `m v = rhs`, particular solution first, capped at
/// [`FILLER_CAP`].
pub(crate) fn fillers(be: &Backend, m: &Mat, rhs: &[u32]) -> Result<Vec<Vec<u32>>> {
    let base = m.solve(rhs).ok_or_else(|| Error::Invariant("square has no filler".into()))?;
    let ker = m.kernel_basis();
    Ok(enumerate_affine(be.k(), &base, ker.basis(), FILLER_CAP))
}

/// Every nonzero class `h: C → A[1]` with `A, C` indecomposable in the
/// working window (sampled when a space is too large to enumerate).
pub fn window_ext_classes(be: &Backend, seed: u64) -> Result<Vec<ExtClass>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let work = be.work_labels();
    for &a in &work {
        let a1 = Obj::ind(be.shift_label(a, 1)?);
        for &c in &work {
            let xc = Obj::ind(c);
            let d = be.hom_dim(&xc, &a1);
            if d == 0 {
                continue;
            }
            for v in ext_vectors(be.k().p(), d, &mut rng) {
                out.push(ExtClass::new(be.from_vector(&xc, &a1, v)?));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{BackendDescriptor, IndecLabel};
    use crate::quiver::Dynkin;
    use crate::subcat::{DegreeSet, SubcatSpec};

    fn a2(w: i32) -> Backend {
        Backend::with_headroom(BackendDescriptor::DerivedDynkin { quiver: Dynkin::A(2), arrows: None, p: 2, w }, 2).unwrap()
    }

    fn orbit(be: &Backend) -> Subcat {
        let s2 = be.label(be.parse_label("S2").unwrap()).clone();
        Subcat::new(be, SubcatSpec::ShiftOrbit(vec![s2])).unwrap()
    }

    fn hv(be: &Backend) -> Subcat {
        Subcat::new(be, SubcatSpec::HomologyVanishing(DegreeSet::Except([0].into()))).unwrap()
    }

    fn one(be: &Backend, x: &str, y: &str) -> Morphism {
        be.hom_basis(&be.parse_obj(x).unwrap(), &be.parse_obj(y).unwrap()).remove(0)
    }

    #[test]
    fn lex_examples() {
        let be = a2(1);
        let h = one(&be, "S1", "S2[1]");
        let rs = RelStructure::new(&be, Subcat::explicit(&be, &["S2"]).unwrap(), 0).unwrap();
        assert!(rs.in_el(&ExtClass::new(h.clone())));
        let rs = RelStructure::new(&be, Subcat::explicit(&be, &["S1"]).unwrap(), 0).unwrap();
        assert!(!rs.in_el(&ExtClass::new(h.clone())));
        let zero = ExtClass::new(be.zero(&h.dom, &h.cod));
        assert!(rs.in_el(&zero) && rs.in_er(&zero));
    }

    #[test]
    fn inflation_examples() {
        let be = a2(1);
        let f = one(&be, "S2", "P1");
        let rs = RelStructure::new(&be, hv(&be), 0).unwrap();
        assert!(rs.is_rel_inflation(&f).unwrap());
        let x = be.parse_obj("S1").unwrap();
        let split = be.inclusion(&be.parse_obj("S1+S2").unwrap(), &[0]);
        assert_eq!(split.dom, x);
        assert!(rs.is_rel_inflation(&split).unwrap());
    }

    #[test]
    fn verdier_classes() {
        let be = a2(1);
        let rs = RelStructure::new(&be, orbit(&be), 0).unwrap();
        let g = one(&be, "P1", "S1");
        assert!(rs.in_r(&g).unwrap());
        assert!(rs.in_sn(&g).unwrap());
        assert!(!rs.in_l(&one(&be, "S2", "P1")).unwrap());
        assert!(rs.in_l(&be.identity(&be.parse_obj("P1").unwrap())).unwrap());
        let rs0 = RelStructure::new(&be, Subcat::zero(&be), 0).unwrap();
        assert!(!rs0.in_sn(&g).unwrap());
    }

    #[test]
    fn rl_factorization_recomposes() {
        let be = a2(1);
        let rs = RelStructure::new(&be, orbit(&be), 0).unwrap();
        let s = one(&be, "P1", "S1");
        let f = rs.rl_factorize(&s).unwrap();
        assert_eq!(be.compose(&f.r, &f.l).unwrap(), s);
        assert!(rs.in_l(&f.l).unwrap() && rs.in_rsp(&f.r).unwrap());
        let d = rs.dual_rl_factorize(&s).unwrap();
        assert_eq!(be.compose(&d.r, &d.l).unwrap(), s);
        assert!(rs.in_lsp(&d.l).unwrap() && rs.in_r(&d.r).unwrap());
        let id = be.identity(&be.parse_obj("S1").unwrap());
        let f = rs.rl_factorize(&id).unwrap();
        assert_eq!(be.compose(&f.r, &f.l).unwrap(), id);
    }

    #[test]
    fn classification_examples() {
        let be = a2(1);
        let c = RelStructure::new(&be, orbit(&be), 0).unwrap().classify_relative(0).unwrap();
        assert!(c.thick_in_rel && c.biresolving);
        let c = RelStructure::new(&be, hv(&be), 0).unwrap().classify_relative(0).unwrap();
        assert!(c.thick_in_rel && c.serre && !c.biresolving);
        let c = RelStructure::new(&be, Subcat::all(&be), 0).unwrap().classify_relative(0).unwrap();
        assert!(c.thick_in_rel && c.serre && c.biresolving);
    }

    #[test]
    fn not_closed_is_rejected() {
        let be = Backend::new(BackendDescriptor::StableNakayama { n: 4, p: 2 }).unwrap();
        let n = Subcat::new(&be, SubcatSpec::Explicit(vec![IndecLabel::Block(2)])).unwrap();
        assert!(matches!(RelStructure::new(&be, n, 0), Err(Error::Precondition(_))));
    }
}
