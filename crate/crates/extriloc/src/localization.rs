//! Localization of `C/[N]` at `S_N` by right fractions.
//!
//! A morphism `A → B` of the localization is a roof `(f, s)` with
//! `f: A → B'` and `s: B → B'` in `S_N`, read as `Q(s)^{-1} ∘ Q(f)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::backend::{Backend, Morphism, Obj};
use crate::error::{Error, Result};
use crate::instances::{indec_morphisms, random_morphism, random_object, random_sn, random_target, Sampling};
use crate::linalg::Mat;
use crate::relative::{fillers, window_ext_classes, ExtClass, RelClassification, RelStructure};
use crate::subcat::ConeWitness;

/// `Q(s)^{-1} ∘ Q(f)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roof {
    pub f: Morphism,
    pub s: Morphism,
}

impl Roof {
    pub fn source(&self) -> &Obj {
        &self.f.dom
    }

    pub fn target(&self) -> &Obj {
        &self.s.dom
    }

    pub fn apex(&self) -> &Obj {
        &self.f.cod
    }

    pub fn display(&self, be: &Backend) -> String {
        format!(
            "{} → {} ← {} [{:?} | {:?}]",
            be.obj_name(self.source()),
            be.obj_name(self.apex()),
            be.obj_name(self.target()),
            self.f.coeffs,
            self.s.coeffs
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Equal,
    Different,
    Undecided(String),
}

/// `t ∘ x ≡ x' ∘ s` modulo `[N]`, with `t ∈ S_N`.
#[derive(Debug, Clone)]
pub struct OreSquare {
    pub t: Morphism,
    pub x_prime: Morphism,
}

/// `s ∘ y' ≡ y ∘ t` modulo `[N]`, with `t ∈ S_N`.
#[derive(Debug, Clone)]
pub struct CoOreSquare {
    pub t: Morphism,
    pub y_prime: Morphism,
}

#[derive(Debug, Clone, Copy)]
pub struct LocBudget {
    pub depth: usize,
}

impl Default for LocBudget {
    fn default() -> Self {
        LocBudget { depth: 4 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LocStage {
    pub target: String,
    /// `dim Hom_{C/[N]}(A, Y)`.
    pub dim: usize,
    /// Rank of the induced map from the previous stage.
    pub transition_rank: Option<usize>,
}

/// `Hom(QA, QB)` as the colimit of `Hom_{C/[N]}(A, Y)` along a chain of
/// universal `L`-steps `B = Y_0 → Y_1 → ...`.
#[derive(Debug, Clone, Serialize)]
pub struct LocHomSpace {
    pub source: String,
    pub target: String,
    pub stages: Vec<LocStage>,
    /// Dimension of the last stage.
    pub dim: usize,
    pub stabilized: bool,
    pub stabilized_at: Option<usize>,
    pub errors: Vec<String>,
}

/// `B = Y_0 → Y_1 → ...` by universal `L`-steps.
#[derive(Debug, Clone)]
pub struct LocChain {
    pub start: Obj,
    pub steps: Vec<Morphism>,
    /// The last object admits no further step.
    pub terminal: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct MonoEpi {
    pub epi: Roof,
    pub mono: Roof,
    /// Fillers tried before the epimorphic one.
    pub attempts: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AxiomReport {
    pub name: String,
    pub instances: usize,
    pub passes: usize,
    pub failures: Vec<String>,
    pub undecided: usize,
}

impl AxiomReport {
    fn new(name: &str) -> Self {
        AxiomReport { name: name.into(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.undecided == 0
    }

    fn record(&mut self, outcome: Outcome) {
        self.instances += 1;
        match outcome {
            Outcome::Pass => self.passes += 1,
            Outcome::Fail(s) => self.failures.push(s),
            Outcome::Undecided => self.undecided += 1,
        }
    }
}

enum Outcome {
    Pass,
    Fail(String),
    Undecided,
}

impl From<Result<bool>> for Outcome {
    fn from(r: Result<bool>) -> Self {
        match r {
            Ok(true) => Outcome::Pass,
            Ok(false) => Outcome::Fail("check failed".into()),
            Err(e) => Outcome::Fail(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Extriangulated,
    Triangulated,
    Exact,
    Abelian,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub classification: Classification,
    pub window: Option<i32>,
    pub thick: bool,
    /// `None` when some target stayed undecided.
    pub cone_generating: Option<bool>,
    pub cone_found: usize,
    pub cone_refuted: usize,
    pub cone_undecided: usize,
    pub biresolving: bool,
    pub serre: bool,
    pub thick_in_rel: bool,
    pub conflations_checked: usize,
    pub evidence: Vec<String>,
    pub violations: Vec<String>,
}

/// Budget for the cone-generation search per target.
pub const CONE_BUDGET: usize = 256;

impl<'a> RelStructure<'a> {
    pub fn q_morphism(&self, f: &Morphism) -> Roof {
        Roof { f: f.clone(), s: self.be.identity(&f.cod) }
    }

    pub fn identity_roof(&self, x: &Obj) -> Roof {
        self.q_morphism(&self.be.identity(x))
    }

    /// `Q(s)^{-1}` as the roof `(id, s)`.
    pub fn inverse_roof(&self, s: &Morphism) -> Result<Roof> {
        if !self.in_sn(s)? {
            return Err(Error::Precondition("inverse_roof needs s in S_N".into()));
        }
        Ok(Roof { f: self.be.identity(&s.cod), s: s.clone() })
    }

    /// Completes `X ←x A →s B` to `X →t X' ←x' B`: factor `s = r ∘ l`,
    /// push `l` out along `x`, and precompose with a section of `r`.
    pub fn ore_square(&self, x: &Morphism, s: &Morphism) -> Result<OreSquare> {
        let be = self.be;
        if x.dom != s.dom {
            return Err(Error::Composition("ore_square: different domains".into()));
        }
        if *s == be.identity(&s.dom) {
            return Ok(OreSquare { t: be.identity(&x.cod), x_prime: x.clone() });
        }
        let rl = self.rl_factorize(s)?;
        let po = be.homotopy_pushout(&rl.l, x)?;
        let sigma = be
            .lift_through(&rl.r, &be.identity(&s.cod))
            .ok_or_else(|| Error::Invariant("R_sp leg has no section".into()))?;
        let t = po.f_prime;
        let x_prime = be.compose(&po.a_prime, &sigma)?;
        if !self.in_sn(&t)? {
            return Err(Error::Invariant("ore_square: t not in S_N".into()));
        }
        let d = be.sub(&be.compose(&t, x)?, &be.compose(&x_prime, s)?)?;
        if !self.n.in_ideal(be, &d) {
            return Err(Error::Invariant("ore_square: square does not commute mod N".into()));
        }
        Ok(OreSquare { t, x_prime })
    }

    /// Completes `X →y B ←s A` to `X ←t X' →y' A`: factor `s = r ∘ l`,
    /// pull `r` back along `y`, and postcompose with a retraction of `l`.
    pub fn co_ore_square(&self, y: &Morphism, s: &Morphism) -> Result<CoOreSquare> {
        let be = self.be;
        if y.cod != s.cod {
            return Err(Error::Composition("co_ore_square: different codomains".into()));
        }
        if *s == be.identity(&s.dom) {
            return Ok(CoOreSquare { t: be.identity(&y.dom), y_prime: y.clone() });
        }
        let rl = self.dual_rl_factorize(s)?;
        let pb = be.homotopy_pullback(&rl.r, y)?;
        let rho = be
            .extend_along(&rl.l, &be.identity(&s.dom))
            .ok_or_else(|| Error::Invariant("L_sp leg has no retraction".into()))?;
        let t = pb.g_prime;
        let y_prime = be.compose(&rho, &pb.b)?;
        if !self.in_sn(&t)? {
            return Err(Error::Invariant("co_ore_square: t not in S_N".into()));
        }
        let d = be.sub(&be.compose(s, &y_prime)?, &be.compose(y, &t)?)?;
        if !self.n.in_ideal(be, &d) {
            return Err(Error::Invariant("co_ore_square: square does not commute mod N".into()));
        }
        Ok(CoOreSquare { t, y_prime })
    }

    /// `β ∘ α`.
    pub fn roof_compose(&self, alpha: &Roof, beta: &Roof) -> Result<Roof> {
        let be = self.be;
        if alpha.target() != beta.source() {
            return Err(Error::Composition("roof_compose: endpoints differ".into()));
        }
        let sq = self.ore_square(&beta.f, &alpha.s)?;
        Ok(Roof { f: be.compose(&sq.x_prime, &alpha.f)?, s: be.compose(&sq.t, &beta.s)? })
    }

    /// Equality of localized morphisms. Both roofs are brought to a common
    /// denominator by one Ore square, after which equality is equality in
    /// `C/[N]`.
    pub fn roof_equal(&self, alpha: &Roof, beta: &Roof) -> Decision {
        let be = self.be;
        if alpha.source() != beta.source() || alpha.target() != beta.target() {
            return Decision::Undecided("roof_equal: endpoints differ".into());
        }
        let same = |x: &Morphism, y: &Morphism| match be.sub(x, y) {
            Ok(d) if self.n.in_ideal(be, &d) => Decision::Equal,
            Ok(_) => Decision::Different,
            Err(e) => Decision::Undecided(e.to_string()),
        };
        if alpha.s == beta.s {
            return same(&alpha.f, &beta.f);
        }
        let sq = match self.ore_square(&beta.s, &alpha.s) {
            Ok(sq) => sq,
            Err(e) => return Decision::Undecided(e.to_string()),
        };
        match (be.compose(&sq.x_prime, &alpha.f), be.compose(&sq.t, &beta.f)) {
            (Ok(x), Ok(y)) => same(&x, &y),
            (Err(e), _) | (_, Err(e)) => Decision::Undecided(e.to_string()),
        }
    }

    /// One universal `L`-step out of `y`: realize a map `M → Y[1]` whose
    /// blocks form a basis of `[N[1]](m, Y[1])` for every member `m`, then
    /// drop the summands of the new object lying in `N`. Returns `None`
    /// when every such ideal block vanishes.
    pub fn universal_step(&self, y: &Obj) -> Result<Option<Morphism>> {
        let be = self.be;
        let y1 = be.shift_obj(y, 1)?;
        let mut h: Option<Morphism> = None;
        for m in self.n.members() {
            let xm = Obj::ind(m);
            if be.hom_dim(&xm, &y1) == 0 {
                continue;
            }
            for v in self.n_up.ideal_subspace(be, &xm, &y1).basis() {
                let col = be.from_vector(&xm, &y1, v.clone())?;
                h = Some(match h {
                    None => col,
                    Some(acc) => be.hcat(&acc, &col),
                });
            }
        }
        let Some(h) = h else { return Ok(None) };
        let t = be.realize(&h)?;
        let keep: Vec<usize> = (0..t.b().len()).filter(|&i| !self.n.contains_index(t.b().0[i])).collect();
        let l = be.compose(&be.projection(t.b(), &keep), &t.f)?;
        Ok(Some(l))
    }

    /// The universal `L`-steps out of `b`, up to `budget.depth` of them.
    pub fn loc_chain(&self, b: &Obj, budget: LocBudget) -> LocChain {
        let be = self.be;
        let mut chain = LocChain { start: b.clone(), steps: Vec::new(), terminal: false, error: None };
        let mut y = b.clone();
        for depth in 1..=budget.depth {
            match self.universal_step(&y) {
                Ok(Some(l)) => {
                    y = l.cod.clone();
                    chain.steps.push(l);
                }
                Ok(None) => {
                    chain.terminal = true;
                    break;
                }
                Err(e) => {
                    chain.error = Some(format!("depth {depth} from {}: {e}", be.obj_name(&y)));
                    break;
                }
            }
        }
        chain
    }

    pub fn loc_hom(&self, a: &Obj, b: &Obj, budget: LocBudget) -> LocHomSpace {
        self.loc_hom_along(a, &self.loc_chain(b, budget))
    }

    /// Evaluates the colimit for the source `a` along a precomputed chain,
    /// stopping at the first isomorphic transition.
    pub fn loc_hom_along(&self, a: &Obj, chain: &LocChain) -> LocHomSpace {
        let be = self.be;
        let b = &chain.start;
        let mut out = LocHomSpace {
            source: be.obj_name(a),
            target: be.obj_name(b),
            stages: vec![LocStage { target: be.obj_name(b), dim: self.n.quotient_dim(be, a, b), transition_rank: None }],
            dim: 0,
            stabilized: false,
            stabilized_at: None,
            errors: Vec::new(),
        };
        for (i, l) in chain.steps.iter().enumerate() {
            let prev = out.stages.last().expect("nonempty").dim;
            let next = self.n.quotient_dim(be, a, &l.cod);
            let rank = self.induced_rank(a, l);
            out.stages.push(LocStage { target: be.obj_name(&l.cod), dim: next, transition_rank: Some(rank) });
            if rank == prev && rank == next {
                out.stabilized = true;
                out.stabilized_at = Some(i + 1);
                break;
            }
        }
        if !out.stabilized {
            if chain.terminal {
                out.stabilized = true;
                out.stabilized_at = Some(chain.steps.len());
            } else if let Some(e) = &chain.error {
                out.errors.push(e.clone());
            }
        }
        out.dim = out.stages.last().expect("nonempty").dim;
        out
    }

    /// Rank of `Hom_{C/[N]}(a, l.dom) → Hom_{C/[N]}(a, l.cod)`.
    fn induced_rank(&self, a: &Obj, l: &Morphism) -> usize {
        let be = self.be;
        let m = be.post_matrix(l, a);
        let ideal = self.n.ideal_subspace(be, a, &l.cod);
        let cols: Vec<Vec<u32>> = ideal.basis().to_vec();
        let im = Mat::from_cols(be.k(), m.rows, &cols);
        m.hstack(&im).rank() - ideal.dim()
    }

    pub fn is_zero_loc(&self, f: &Morphism) -> bool {
        self.n.in_ideal(self.be, f)
    }

    pub fn is_mono_loc(&self, g: &Morphism) -> Result<bool> {
        let t = self.be.cocone(g)?;
        Ok(self.n.in_ideal(self.be, &t.f))
    }

    pub fn is_epi_loc(&self, g: &Morphism) -> Result<bool> {
        let t = self.be.cocone(g)?;
        Ok(self.n.in_ideal(self.be, &t.h))
    }

    pub fn is_iso_loc(&self, g: &Morphism) -> Result<bool> {
        self.in_sn(g)
    }

    /// `α = (f, s)` as `mono ∘ epi`: with `B' → C → A[1]` the cone of `f`
    /// and `N'' →x C` a cone-generating witness, pull the cone map back
    /// along `x` to `b: P → B'` and lift `f` to `f': A → P` killing the
    /// other leg.
    pub fn mono_epi_factorize(&self, alpha: &Roof, seed: u64) -> Result<MonoEpi> {
        let be = self.be;
        let f = &alpha.f;
        let cone = be.cone(f)?;
        let witness = self.n.is_cone_generating(be, &[cone.c().clone()], CONE_BUDGET, seed).remove(0);
        let ConeWitness::Found(wt) = witness else {
            return Err(Error::Precondition(format!(
                "no cone-generating witness for {}: {witness:?}",
                be.obj_name(cone.c())
            )));
        };
        let pb = be.homotopy_pullback(&cone.g, &wt.g)?;
        let m = be.post_matrix(&pb.b, &f.dom).vstack(&be.post_matrix(&pb.g_prime, &f.dom));
        let mut rhs = f.coeffs.clone();
        rhs.extend(std::iter::repeat_n(0, be.hom_dim(&f.dom, &pb.g_prime.cod)));
        if !self.is_mono_loc(&pb.b)? {
            return Err(Error::Invariant("pullback leg is not a localized monomorphism".into()));
        }
        let mut attempts = 0;
        for v in fillers(be, &m, &rhs)? {
            attempts += 1;
            let fp = Morphism { dom: f.dom.clone(), cod: pb.b.dom.clone(), coeffs: v };
            if !self.is_epi_loc(&fp)? {
                continue;
            }
            let epi = self.q_morphism(&fp);
            let mono = Roof { f: pb.b.clone(), s: alpha.s.clone() };
            let comp = self.roof_compose(&epi, &mono)?;
            return match self.roof_equal(&comp, alpha) {
                Decision::Equal => Ok(MonoEpi { epi, mono, attempts }),
                d => Err(Error::Invariant(format!("mono ∘ epi differs from the input: {d:?}"))),
            };
        }
        Err(Error::Invariant(format!("no epimorphic filler among {attempts}")))
    }

    /// Solves for `b: B → B'` with `b ∘ f = f' ∘ a` and `g' ∘ b = c ∘ g`
    /// on the realizations of `h` and `h'`, returning the first solution
    /// in `S_N`. Requires `a[1] ∘ h = h' ∘ c`.
    pub fn mr3_witness(&self, h: &Morphism, hp: &Morphism, a: &Morphism, c: &Morphism) -> Result<Option<Morphism>> {
        let be = self.be;
        let lhs = be.compose(&be.shift(a, 1)?, h)?;
        if lhs != be.compose(hp, c)? {
            return Err(Error::Precondition("mr3: a_*δ differs from c^*δ'".into()));
        }
        let t = be.realize(h)?;
        let tp = be.realize(hp)?;
        let m = be.pre_matrix(&t.f, tp.b()).vstack(&be.post_matrix(&tp.g, t.b()));
        let mut rhs = be.compose(&tp.f, a)?.coeffs;
        rhs.extend(be.compose(c, &t.g)?.coeffs);
        for v in fillers(be, &m, &rhs)? {
            let b = Morphism { dom: t.b().clone(), cod: tp.b().clone(), coeffs: v };
            if self.in_sn(&b)? {
                return Ok(Some(b));
            }
        }
        Ok(None)
    }

    /// Witness that `f ∘ s ∘ f'` is `t ∘ (h ∘ g)` in `C/[N]` with `h ∘ g`
    /// an inflation and `t ∈ S_N`. Returns `(h ∘ g, t)`.
    pub fn mr4_witness(&self, f: &Morphism, s: &Morphism, fp: &Morphism) -> Result<(Morphism, Morphism)> {
        let be = self.be;
        let rl = self.rl_factorize(s)?;
        let g = be.compose(&rl.l, fp)?;
        let section = be
            .lift_through(&rl.r, &be.identity(&s.cod))
            .ok_or_else(|| Error::Invariant("R_sp leg has no section".into()))?;
        let po = be.homotopy_pushout(f, &section)?;
        let h = po.f_prime;
        let tp = po.a_prime;
        let t = be
            .extend_along(&tp, &be.identity(&f.cod))
            .ok_or_else(|| Error::Invariant("pushout leg has no retraction".into()))?;
        let hg = be.compose(&h, &g)?;
        if !self.is_rel_inflation(&hg)? {
            return Err(Error::Invariant("h ∘ g is not an inflation".into()));
        }
        if !self.in_sn(&t)? {
            return Err(Error::Invariant("t not in S_N".into()));
        }
        let lhs = be.compose(&t, &hg)?;
        let rhs = be.compose_all(&[f, s, fp])?;
        if !self.n.in_ideal(be, &be.sub(&lhs, &rhs)?) {
            return Err(Error::Invariant("t ∘ h ∘ g differs from f ∘ s ∘ f' mod N".into()));
        }
        Ok((hg, t))
    }

    // ---- axiom verification ----------------------------------------------

    pub fn verify_ms(&self, sampling: Sampling) -> Result<Vec<AxiomReport>> {
        let pool = Pool::build(self, sampling)?;
        let mut out = Vec::new();
        out.push(self.check_ms0(&pool)?);
        out.push(self.check_ms1(&pool));
        out.push(self.check_ms1_dual(&pool));
        out.push(self.check_ms2(&pool)?);
        out.push(self.check_ms2_dual(&pool)?);
        Ok(out)
    }

    pub fn verify_mr(&self, sampling: Sampling) -> Result<Vec<AxiomReport>> {
        let pool = Pool::build(self, sampling)?;
        let mut out = Vec::new();
        out.push(self.check_mr1(&pool)?);
        let ms = [
            self.check_ms0(&pool)?,
            self.check_ms1(&pool),
            self.check_ms1_dual(&pool),
            self.check_ms2(&pool)?,
            self.check_ms2_dual(&pool)?,
        ];
        let mut mr2 = AxiomReport::new("MR2");
        for r in ms {
            mr2.instances += r.instances;
            mr2.passes += r.passes;
            mr2.undecided += r.undecided;
            mr2.failures.extend(r.failures.into_iter().map(|f| format!("{}: {f}", r.name)));
        }
        out.push(mr2);
        out.push(self.check_mr3(&pool)?);
        out.push(self.check_mr4(&pool)?);
        Ok(out)
    }

    fn check_ms0(&self, pool: &Pool) -> Result<AxiomReport> {
        let be = self.be;
        let mut rep = AxiomReport::new("MS0");
        for x in be.work_labels() {
            let id = be.identity(&Obj::ind(x));
            rep.record(self.in_sn(&id).into());
        }
        for (i, s1) in pool.s.iter().enumerate() {
            for s2 in pool.s.iter().skip(i).take(pool.pair_cap) {
                let d = be.diag(s1, s2);
                let o: Outcome = self.in_sn(&d).into();
                rep.record(tag(o, || format!("sum of {} and {}", show(be, s1), show(be, s2))));
                if s2.dom == s1.cod {
                    let c = be.compose(s2, s1)?;
                    let o: Outcome = self.in_sn(&c).into();
                    rep.record(tag(o, || format!("composite {} then {}", show(be, s1), show(be, s2))));
                }
            }
        }
        Ok(rep)
    }

    fn check_ms1(&self, pool: &Pool) -> AxiomReport {
        let be = self.be;
        let mut rep = AxiomReport::new("MS1");
        for s in &pool.s {
            for x in pool.maps.iter().filter(|x| x.dom == s.dom) {
                let o = match self.ore_square(x, s) {
                    Ok(_) => Outcome::Pass,
                    Err(e) => Outcome::Fail(format!("x = {}, s = {}: {e}", show(be, x), show(be, s))),
                };
                rep.record(o);
            }
        }
        rep
    }

    fn check_ms1_dual(&self, pool: &Pool) -> AxiomReport {
        let be = self.be;
        let mut rep = AxiomReport::new("MS1-dual");
        for s in &pool.s {
            for y in pool.maps.iter().filter(|y| y.cod == s.cod) {
                let o = match self.co_ore_square(y, s) {
                    Ok(_) => Outcome::Pass,
                    Err(e) => Outcome::Fail(format!("y = {}, s = {}: {e}", show(be, y), show(be, s))),
                };
                rep.record(o);
            }
        }
        rep
    }

    /// `d ∘ s ≡ 0` with `s ∈ S_N` forces `t ∘ d ≡ 0` for some `t ∈ S_N`;
    /// candidates for `t` are the identity and the universal `L`-steps.
    fn check_ms2(&self, pool: &Pool) -> Result<AxiomReport> {
        let be = self.be;
        let mut rep = AxiomReport::new("MS2");
        for s in &pool.s {
            for d in pool.maps.iter().filter(|d| d.dom == s.cod) {
                if !self.n.in_ideal(be, &be.compose(d, s)?) {
                    continue;
                }
                let o = match self.annihilate_after(d) {
                    Ok(true) => Outcome::Pass,
                    Ok(false) => Outcome::Fail(format!("d = {}, s = {}", show(be, d), show(be, s))),
                    Err(_) => Outcome::Undecided,
                };
                rep.record(o);
            }
        }
        Ok(rep)
    }

    fn check_ms2_dual(&self, pool: &Pool) -> Result<AxiomReport> {
        let be = self.be;
        let mut rep = AxiomReport::new("MS2-dual");
        for s in &pool.s {
            for d in pool.maps.iter().filter(|d| d.cod == s.dom) {
                if !self.n.in_ideal(be, &be.compose(s, d)?) {
                    continue;
                }
                let o = if self.n.in_ideal(be, d) {
                    Outcome::Pass
                } else {
                    Outcome::Fail(format!("d = {}, s = {}", show(be, d), show(be, s)))
                };
                rep.record(o);
            }
        }
        Ok(rep)
    }

    fn annihilate_after(&self, d: &Morphism) -> Result<bool> {
        let be = self.be;
        let mut cur = d.clone();
        for _ in 0..3 {
            if self.n.in_ideal(be, &cur) {
                return Ok(true);
            }
            match self.universal_step(&cur.cod)? {
                Some(l) => cur = be.compose(&l, &cur)?,
                None => return Ok(false),
            }
        }
        Ok(self.n.in_ideal(be, &cur))
    }

    fn check_mr1(&self, pool: &Pool) -> Result<AxiomReport> {
        let be = self.be;
        let mut rep = AxiomReport::new("MR1");
        for f in &pool.maps {
            for g in pool.maps.iter().filter(|g| g.dom == f.cod) {
                let gf = be.compose(g, f)?;
                let m = [self.in_sn(f)?, self.in_sn(g)?, self.in_sn(&gf)?];
                if m.iter().filter(|&&b| b).count() == 2 {
                    rep.record(Outcome::Fail(format!("f = {}, g = {}: memberships {m:?}", show(be, f), show(be, g))));
                } else {
                    rep.record(Outcome::Pass);
                }
            }
        }
        Ok(rep)
    }

    fn check_mr3(&self, pool: &Pool) -> Result<AxiomReport> {
        let be = self.be;
        let mut rep = AxiomReport::new("MR3");
        let run = |rep: &mut AxiomReport, h: &Morphism, hp: &Morphism, a: &Morphism, c: &Morphism| {
            let o = match self.mr3_witness(h, hp, a, c) {
                Ok(Some(_)) => Outcome::Pass,
                Ok(None) => Outcome::Undecided,
                Err(e) => Outcome::Fail(format!("h = {}, h' = {}: {e}", show(be, h), show(be, hp))),
            };
            rep.record(o);
        };
        for e in &pool.classes {
            let a_obj = be.shift_obj(e.a_shifted(), -1)?;
            for a in pool.s.iter().filter(|a| a.dom == a_obj) {
                let Ok(a1) = be.shift(a, 1) else { continue };
                let hp = be.compose(&a1, &e.h)?;
                run(&mut rep, &e.h, &hp, a, &be.identity(e.c()));
            }
            for c in pool.s.iter().filter(|c| c.cod == *e.c()) {
                let h = be.compose(&e.h, c)?;
                if !self.in_en(&ExtClass::new(h.clone())) {
                    rep.record(Outcome::Fail(format!("c^* of an E_N class left E_N: {}", show(be, &h))));
                    continue;
                }
                let a = be.identity(&a_obj);
                run(&mut rep, &h, &e.h, &a, c);
            }
        }
        Ok(rep)
    }

    fn check_mr4(&self, pool: &Pool) -> Result<AxiomReport> {
        let be = self.be;
        let mut rep = AxiomReport::new("MR4");
        let infl: Vec<&Morphism> = pool.maps.iter().filter(|f| self.is_rel_inflation(f).unwrap_or(false)).collect();
        let mut count = 0;
        'outer: for fp in &infl {
            for s in pool.s.iter().filter(|s| s.dom == fp.cod) {
                for f in infl.iter().filter(|f| f.dom == s.cod) {
                    if count >= pool.triple_cap {
                        break 'outer;
                    }
                    count += 1;
                    let o = match self.mr4_witness(f, s, fp) {
                        Ok(_) => Outcome::Pass,
                        Err(e) => Outcome::Fail(format!(
                            "f = {}, s = {}, f' = {}: {e}",
                            show(be, f),
                            show(be, s),
                            show(be, fp)
                        )),
                    };
                    rep.record(o);
                }
            }
        }
        Ok(rep)
    }

    /// Triangulated if `N` is thick, abelian if `N` generates every
    /// window object by cones, exact if only the Serre property is seen,
    /// with the relative-side properties cross-checked.
    pub fn theorem_a_classify(&self, seed: u64) -> Result<Verdict> {
        let be = self.be;
        let thick = self.n.is_thick_tri(be, seed)?;
        let targets: Vec<Obj> = be.work_labels().into_iter().map(Obj::ind).collect();
        let ws = self.n.is_cone_generating(be, &targets, CONE_BUDGET, seed);
        let found = ws.iter().filter(|w| w.is_found()).count();
        let refuted = ws.iter().filter(|w| matches!(w, ConeWitness::Refuted)).count();
        let undecided = ws.len() - found - refuted;
        let cone_generating = if refuted > 0 {
            Some(false)
        } else if undecided == 0 {
            Some(true)
        } else {
            None
        };
        let rel: RelClassification = self.classify_relative(seed)?;
        let mut evidence = vec![
            format!("thick: {thick}"),
            format!("cone witnesses: {found} found, {refuted} refuted, {undecided} undecided"),
            format!("relative side over {} conflations: {rel:?}", rel.conflations_checked),
        ];
        let classification = if thick {
            Classification::Triangulated
        } else if cone_generating == Some(true) {
            Classification::Abelian
        } else if cone_generating.is_none() && rel.serre {
            evidence.push("Serre without a cone-generation decision".into());
            Classification::Exact
        } else {
            Classification::Extriangulated
        };
        let mut violations = Vec::new();
        if thick != rel.biresolving {
            violations.push(format!("THEOREM VIOLATION: thick = {thick} but biresolving = {}", rel.biresolving));
        }
        if cone_generating == Some(true) && !rel.serre {
            violations.push(format!(
                "THEOREM VIOLATION: cone-generating but not Serre ({})",
                rel.serre_failure.clone().unwrap_or_default()
            ));
        }
        if rel.serre && cone_generating == Some(false) {
            let bad: Vec<String> = ws
                .iter()
                .zip(&targets)
                .filter(|(w, _)| matches!(w, ConeWitness::Refuted))
                .map(|(_, x)| be.obj_name(x))
                .collect();
            violations.push(format!("THEOREM VIOLATION: Serre but not cone-generating at {}", bad.join(", ")));
        }
        if !rel.thick_in_rel {
            violations.push(format!(
                "THEOREM VIOLATION: N is not thick in the relative structure ({})",
                rel.thick_failure.clone().unwrap_or_default()
            ));
        }
        Ok(Verdict {
            classification,
            window: be.work_window(),
            thick,
            cone_generating,
            cone_found: found,
            cone_refuted: refuted,
            cone_undecided: undecided,
            biresolving: rel.biresolving,
            serre: rel.serre,
            thick_in_rel: rel.thick_in_rel,
            conflations_checked: rel.conflations_checked,
            evidence,
            violations,
        })
    }
}

fn tag(o: Outcome, ctx: impl FnOnce() -> String) -> Outcome {
    match o {
        Outcome::Fail(e) => Outcome::Fail(format!("{}: {e}", ctx())),
        o => o,
    }
}

fn show(be: &Backend, f: &Morphism) -> String {
    format!("{} → {} {:?}", be.obj_name(&f.dom), be.obj_name(&f.cod), f.coeffs)
}

/// Instances shared by the axiom checks.
struct Pool {
    maps: Vec<Morphism>,
    s: Vec<Morphism>,
    classes: Vec<ExtClass>,
    pair_cap: usize,
    triple_cap: usize,
}

impl Pool {
    fn build(rs: &RelStructure, sampling: Sampling) -> Result<Pool> {
        let be = rs.be;
        match sampling {
            Sampling::Exhaustive => {
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                let maps = indec_morphisms(be, &mut rng);
                let mut s = Vec::new();
                for m in &maps {
                    if rs.in_sn(m)? {
                        s.push(m.clone());
                    }
                }
                let classes = window_ext_classes(be, 0)?.into_iter().filter(|e| rs.in_en(e)).collect();
                Ok(Pool { maps, s, classes, pair_cap: usize::MAX, triple_cap: usize::MAX })
            }
            Sampling::Seeded { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut s = Vec::new();
                let mut scratch = Vec::new();
                while s.len() < samples {
                    match random_sn(rs, &mut rng, &mut scratch) {
                        Some(m) => s.push(m),
                        None => break,
                    }
                }
                let mut maps = Vec::new();
                // Maps out of and into each denominator so that the squares
                // of MS1 and MS2 have instances.
                for t in s.iter().take(samples) {
                    if let Some(y) = random_target(be, &mut rng, &t.dom, 2) {
                        maps.push(random_morphism(be, &mut rng, &t.dom, &y));
                    }
                    let x = random_object(be, &mut rng, 2);
                    if be.hom_dim(&x, &t.cod) > 0 {
                        maps.push(random_morphism(be, &mut rng, &x, &t.cod));
                    }
                    maps.push(be.zero(&t.cod, &t.dom));
                }
                let all = window_ext_classes(be, seed)?;
                let classes: Vec<ExtClass> = all.into_iter().filter(|e| rs.in_en(e)).take(samples).collect();
                Ok(Pool { maps, s, classes, pair_cap: 8, triple_cap: samples })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::BackendDescriptor;
    use crate::quiver::Dynkin;
    use crate::subcat::{DegreeSet, Subcat, SubcatSpec};

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
    fn ore_square_diagonal() {
        let be = a2(1);
        let rs = RelStructure::new(&be, orbit(&be), 0).unwrap();
        let g = one(&be, "P1", "S1");
        let x = be.vcat(&g, &g);
        let sq = rs.ore_square(&x, &g).unwrap();
        assert!(rs.in_sn(&sq.t).unwrap());
        let id = be.identity(&g.dom);
        let sq = rs.ore_square(&x, &id).unwrap();
        assert_eq!(sq.t, be.identity(&x.cod));
        assert_eq!(sq.x_prime, x);
        let co = rs.co_ore_square(&be.vcat(&g, &g), &be.diag(&g, &g)).unwrap();
        assert!(rs.in_sn(&co.t).unwrap());
    }

    #[test]
    fn inverse_roofs() {
        let be = a2(1);
        let rs = RelStructure::new(&be, orbit(&be), 0).unwrap();
        let s = one(&be, "P1", "S1");
        let inv = rs.inverse_roof(&s).unwrap();
        let q = rs.q_morphism(&s);
        let left = rs.roof_compose(&q, &inv).unwrap();
        assert_eq!(rs.roof_equal(&left, &rs.identity_roof(&s.dom)), Decision::Equal);
        let right = rs.roof_compose(&inv, &q).unwrap();
        assert_eq!(rs.roof_equal(&right, &rs.identity_roof(&s.cod)), Decision::Equal);
        let zero = rs.q_morphism(&be.zero(&s.dom, &s.cod));
        assert_eq!(rs.roof_equal(&q, &zero), Decision::Different);
    }

    #[test]
    fn loc_hom_examples() {
        let be = a2(1);
        let rs = RelStructure::new(&be, orbit(&be), 0).unwrap();
        let (s1, p1) = (be.parse_obj("S1").unwrap(), be.parse_obj("P1").unwrap());
        let h = rs.loc_hom(&s1, &p1, LocBudget::default());
        assert_eq!(h.dim, 1);
        assert!(h.stabilized && h.stabilized_at.unwrap() <= 2);
        let rs0 = RelStructure::new(&be, Subcat::zero(&be), 0).unwrap();
        assert_eq!(rs0.loc_hom(&p1, &s1, LocBudget::default()).dim, 1);
        let all = RelStructure::new(&be, Subcat::all(&be), 0).unwrap();
        assert_eq!(all.loc_hom(&p1, &p1, LocBudget::default()).dim, 0);
    }

    #[test]
    fn localized_predicates() {
        let be = a2(1);
        let rs = RelStructure::new(&be, hv(&be), 0).unwrap();
        let g = one(&be, "P1", "S1");
        assert!(!rs.is_mono_loc(&g).unwrap());
        assert!(rs.is_epi_loc(&g).unwrap());
        assert!(!rs.is_iso_loc(&g).unwrap());
        let id = be.identity(&g.dom);
        assert!(rs.is_mono_loc(&id).unwrap() && rs.is_epi_loc(&id).unwrap() && rs.is_iso_loc(&id).unwrap());
    }

    #[test]
    fn mono_epi_on_projective_cover() {
        let be = a2(1);
        let rs = RelStructure::new(&be, hv(&be), 0).unwrap();
        let alpha = rs.q_morphism(&one(&be, "P1", "S1"));
        let me = rs.mono_epi_factorize(&alpha, 0).unwrap();
        assert!(rs.is_epi_loc(&me.epi.f).unwrap());
        assert!(rs.is_mono_loc(&me.mono.f).unwrap());
    }

    #[test]
    fn classifier_examples() {
        let be = a2(1);
        let v = RelStructure::new(&be, orbit(&be), 0).unwrap().theorem_a_classify(0).unwrap();
        assert_eq!(v.classification, Classification::Triangulated);
        assert!(v.biresolving && v.violations.is_empty());
        let v = RelStructure::new(&be, hv(&be), 0).unwrap().theorem_a_classify(0).unwrap();
        assert_eq!(v.classification, Classification::Abelian);
        assert!(v.serre && v.violations.is_empty());
        // The zero subcategory is thick, so the quotient is C itself.
        let v = RelStructure::new(&be, Subcat::zero(&be), 0).unwrap().theorem_a_classify(0).unwrap();
        assert_eq!(v.classification, Classification::Triangulated);
        let s1 = Subcat::explicit(&be, &["S1"]).unwrap();
        let v = RelStructure::new(&be, s1, 0).unwrap().theorem_a_classify(0).unwrap();
        assert_eq!(v.classification, Classification::Extriangulated);
        assert!(v.violations.is_empty(), "{:?}", v.violations);
    }

    #[test]
    fn axioms_for_zero_subcategory() {
        let be = a2(1);
        let rs = RelStructure::new(&be, Subcat::zero(&be), 0).unwrap();
        for r in rs.verify_ms(Sampling::Exhaustive).unwrap().into_iter().chain(rs.verify_mr(Sampling::Exhaustive).unwrap()) {
            assert!(r.passed(), "{r:?}");
        }
    }
}
