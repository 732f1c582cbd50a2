//! Finite triangulated categories with explicit hom bases.
//!
//! A [`Backend`] fixes a finite list of indecomposable objects (its labels),
//! a basis of every hom space between them, and structure constants for
//! composition. Objects are ordered lists of labels ([`Obj`]) and a morphism
//! is a coordinate vector over the block basis of `Hom(X, Y)`. Shifts act on
//! labels and leave coordinates unchanged: each engine picks its bases so
//! that `[1]` maps basis vectors to basis vectors.
//!
//! Two engines are provided: the stable category of `k[x]/(x^n)` and the
//! bounded derived category of a Dynkin quiver, truncated to a shift window.

mod derived;
mod stable;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, Mat, PrimeField, Subspace};
use crate::quiver::{Dynkin, ModuleMap, Quiver};

pub use derived::Derived;
pub use stable::Stable;

/// Which category to build.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BackendDescriptor {
    /// Stable module category of `k[x]/(x^n)`, indecomposables `J_1..J_{n-1}`.
    StableNakayama { n: usize, p: u32 },
    /// `D^b(kQ)` restricted to shifts `|d| <= w`. `arrows` overrides the
    /// default orientation (0-based vertex pairs).
    DerivedDynkin { quiver: Dynkin, arrows: Option<Vec<(usize, usize)>>, p: u32, w: i32 },
}

/// Name of an indecomposable object.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IndecLabel {
    /// Jordan block `J_a` of the stable Nakayama category.
    Block(usize),
    /// Shifted indecomposable module `M[d]`, `M` given by its dimension vector.
    Shifted { module: Vec<usize>, degree: i32 },
}

/// A direct sum of indecomposables, in the listed order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Obj(pub Vec<usize>);

impl Obj {
    pub fn zero() -> Self {
        Obj(Vec::new())
    }

    pub fn ind(a: usize) -> Self {
        Obj(vec![a])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.0
    }

    pub fn sum(&self, other: &Obj) -> Obj {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Obj(v)
    }

    /// Sorted copy: the canonical representative of the isomorphism class.
    pub fn canonical(&self) -> Obj {
        let mut v = self.0.clone();
        v.sort();
        Obj(v)
    }

    pub fn iso_class_eq(&self, other: &Obj) -> bool {
        self.canonical() == other.canonical()
    }
}

/// A morphism `dom → cod` in block coordinates: for each codomain summand
/// `i` (outer) and domain summand `j` (inner), a coordinate vector in the
/// basis of `Hom(dom_j, cod_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub dom: Obj,
    pub cod: Obj,
    pub coeffs: Vec<u32>,
}

/// A distinguished triangle `A →f B →g C →h A[1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangle {
    pub f: Morphism,
    pub g: Morphism,
    pub h: Morphism,
}

impl Triangle {
    pub fn a(&self) -> &Obj {
        &self.f.dom
    }
    pub fn b(&self) -> &Obj {
        &self.f.cod
    }
    pub fn c(&self) -> &Obj {
        &self.g.cod
    }
}

/// Output of the homotopy pullback of `g: B → C` along `c: C' → C`.
#[derive(Debug, Clone)]
pub struct Pullback {
    pub b: Morphism,
    pub g_prime: Morphism,
    /// `E → B ⊕ C' → C → E[1]` with middle map `(g, -c)`.
    pub triangle: Triangle,
}

/// Output of the homotopy pushout of `f: A → B` along `a: A → A'`.
#[derive(Debug, Clone)]
pub struct Pushout {
    pub a_prime: Morphism,
    pub f_prime: Morphism,
    /// `A → B ⊕ A' → E → A[1]` with first map `(f; -a)`.
    pub triangle: Triangle,
}

/// The four triangles of an octahedron for `f: A → B`, `g: B → C`.
#[derive(Debug, Clone)]
pub struct Octahedron {
    pub on_f: Triangle,
    pub on_g: Triangle,
    pub on_gf: Triangle,
    /// `Cone(f) → Cone(gf) → Cone(g) → Cone(f)[1]`.
    pub connecting: Triangle,
}

#[derive(Debug, Clone)]
enum Engine {
    Stable(Stable),
    Derived(Box<Derived>),
}

/// A finite triangulated category with precomputed hom tables.
#[derive(Debug, Clone)]
pub struct Backend {
    pub descriptor: BackendDescriptor,
    k: PrimeField,
    labels: Vec<IndecLabel>,
    index: HashMap<IndecLabel, usize>,
    dims: Vec<Vec<usize>>,
    comp: HashMap<(usize, usize, usize), Vec<u32>>,
    engine: Engine,
    /// Shift bound used for quantification; `None` means every label.
    work: Option<i32>,
}

impl Backend {
    pub fn new(descriptor: BackendDescriptor) -> Result<Self> {
        let (k, engine) = match &descriptor {
            BackendDescriptor::StableNakayama { n, p } => {
                if *n < 2 {
                    return Err(Error::Domain("block bound n must be at least 2".into()));
                }
                let k = PrimeField::new(*p)?;
                (k, Engine::Stable(Stable::new(*n, k)))
            }
            BackendDescriptor::DerivedDynkin { quiver, arrows, p, w } => {
                if *w < 0 {
                    return Err(Error::Domain("shift window must be nonnegative".into()));
                }
                let k = PrimeField::new(*p)?;
                let q = match arrows {
                    Some(a) => Quiver::with_arrows(*quiver, a.clone())?,
                    None => Quiver::dynkin(*quiver)?,
                };
                (k, Engine::Derived(Box::new(Derived::new(q, k, *w))))
            }
        };
        let labels = match &engine {
            Engine::Stable(s) => s.labels(),
            Engine::Derived(d) => d.labels(),
        };
        let index = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        let mut be = Backend {
            descriptor,
            k,
            labels,
            index,
            dims: Vec::new(),
            comp: HashMap::new(),
            engine,
            work: None,
        };
        be.precompute();
        Ok(be)
    }

    /// Builds a derived backend with `extra` degrees of headroom on each
    /// side of the descriptor's window. Quantifications ([`Backend::work_labels`])
    /// stay inside the original window while cones and shifts may use the
    /// headroom. Stable backends are unaffected.
    pub fn with_headroom(descriptor: BackendDescriptor, extra: i32) -> Result<Self> {
        match &descriptor {
            BackendDescriptor::DerivedDynkin { quiver, arrows, p, w } => {
                let wide = BackendDescriptor::DerivedDynkin { quiver: *quiver, arrows: arrows.clone(), p: *p, w: w + extra };
                let mut be = Backend::new(wide)?;
                be.work = Some(*w);
                be.descriptor = descriptor;
                Ok(be)
            }
            BackendDescriptor::StableNakayama { .. } => Backend::new(descriptor),
        }
    }

    /// Shift bound for quantification (derived engine only).
    pub fn work_window(&self) -> Option<i32> {
        match &self.engine {
            Engine::Stable(_) => None,
            Engine::Derived(d) => Some(self.work.unwrap_or(d.window())),
        }
    }

    /// Degree of a derived label; `None` for stable labels.
    pub fn degree(&self, a: usize) -> Option<i32> {
        match &self.labels[a] {
            IndecLabel::Shifted { degree, .. } => Some(*degree),
            IndecLabel::Block(_) => None,
        }
    }

    /// Labels inside the working window.
    pub fn work_labels(&self) -> Vec<usize> {
        let w = self.work_window();
        (0..self.labels.len())
            .filter(|&a| match (w, self.degree(a)) {
                (Some(w), Some(d)) => d.abs() <= w,
                _ => true,
            })
            .collect()
    }

    pub fn in_work(&self, x: &Obj) -> bool {
        let w = self.work_window();
        x.0.iter().all(|&a| match (w, self.degree(a)) {
            (Some(w), Some(d)) => d.abs() <= w,
            _ => true,
        })
    }

    /// `l[n]` as a label, whether or not it lies in the window.
    pub fn shift_indec_label(&self, l: &IndecLabel, n: i32) -> IndecLabel {
        match l {
            IndecLabel::Block(b) => {
                let st = self.stable().expect("stable label");
                IndecLabel::Block(if n.rem_euclid(2) == 1 { st.n() - b } else { *b })
            }
            IndecLabel::Shifted { module, degree } => IndecLabel::Shifted { module: module.clone(), degree: degree + n },
        }
    }

    fn precompute(&mut self) {
        let n = self.labels.len();
        let mut dims = vec![vec![0; n]; n];
        for (a, row) in dims.iter_mut().enumerate() {
            for (b, d) in row.iter_mut().enumerate() {
                *d = match &self.engine {
                    Engine::Stable(s) => s.hom_dim(&self.labels[a], &self.labels[b]),
                    Engine::Derived(e) => e.hom_dim(&self.labels[a], &self.labels[b]),
                };
            }
        }
        let mut comp = HashMap::new();
        for a in 0..n {
            for b in 0..n {
                if dims[a][b] == 0 {
                    continue;
                }
                for c in 0..n {
                    if dims[b][c] == 0 || dims[a][c] == 0 {
                        continue;
                    }
                    let (la, lb, lc) = (&self.labels[a], &self.labels[b], &self.labels[c]);
                    let t = match &self.engine {
                        Engine::Stable(s) => s.structure_constants(la, lb, lc),
                        Engine::Derived(e) => e.structure_constants(la, lb, lc),
                    };
                    comp.insert((a, b, c), t);
                }
            }
        }
        self.dims = dims;
        self.comp = comp;
    }

    pub fn k(&self) -> PrimeField {
        self.k
    }

    pub fn labels(&self) -> &[IndecLabel] {
        &self.labels
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, a: usize) -> &IndecLabel {
        &self.labels[a]
    }

    pub fn find(&self, l: &IndecLabel) -> Option<usize> {
        self.index.get(l).copied()
    }

    /// Shift window of the derived engine; `None` for the stable engine.
    pub fn window(&self) -> Option<i32> {
        match &self.engine {
            Engine::Stable(_) => None,
            Engine::Derived(d) => Some(d.window()),
        }
    }

    pub fn stable(&self) -> Option<&Stable> {
        match &self.engine {
            Engine::Stable(s) => Some(s),
            Engine::Derived(_) => None,
        }
    }

    pub fn derived(&self) -> Option<&Derived> {
        match &self.engine {
            Engine::Stable(_) => None,
            Engine::Derived(d) => Some(d),
        }
    }

    /// Human-readable name such as `J2`, `S1[1]` or `P1`.
    pub fn name(&self, a: usize) -> String {
        match (&self.engine, &self.labels[a]) {
            (Engine::Stable(_), IndecLabel::Block(b)) => format!("J{b}"),
            (Engine::Derived(d), IndecLabel::Shifted { module, degree }) => {
                let m = d.module_name(module);
                if *degree == 0 {
                    m
                } else {
                    format!("{m}[{degree}]")
                }
            }
            _ => unreachable!("label kinds match engines"),
        }
    }

    pub fn obj_name(&self, x: &Obj) -> String {
        if x.is_empty() {
            return "0".into();
        }
        x.0.iter().map(|&a| self.name(a)).collect::<Vec<_>>().join("+")
    }

    /// Parses names produced by [`Backend::name`]; modules may also be given
    /// as dimension vectors such as `011` or `0,1,1`.
    pub fn parse_label(&self, s: &str) -> Result<usize> {
        let s = s.trim();
        let bad = || Error::Parse(format!("unknown label {s:?}"));
        let (base, degree) = match s.find('[') {
            Some(i) if s.ends_with(']') => {
                let d: i32 = s[i + 1..s.len() - 1].trim().parse().map_err(|_| bad())?;
                (&s[..i], d)
            }
            Some(_) => return Err(bad()),
            None => (s, 0),
        };
        let label = match &self.engine {
            Engine::Stable(st) => {
                let a: usize = base.strip_prefix('J').ok_or_else(bad)?.parse().map_err(|_| bad())?;
                let a = if degree.rem_euclid(2) == 1 { st.n() - a.min(st.n()) } else { a };
                IndecLabel::Block(a)
            }
            Engine::Derived(d) => {
                let module = d.parse_module(base).ok_or_else(bad)?;
                IndecLabel::Shifted { module, degree }
            }
        };
        if let IndecLabel::Shifted { degree, .. } = &label {
            let w = self.window().unwrap_or(0);
            if degree.abs() > w {
                return Err(Error::WindowExceeded { degree: *degree, window: w });
            }
        }
        self.find(&label).ok_or_else(bad)
    }

    pub fn parse_obj(&self, s: &str) -> Result<Obj> {
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(Obj::zero());
        }
        s.split('+').map(|t| self.parse_label(t)).collect::<Result<Vec<_>>>().map(Obj)
    }

    pub fn all_indecs(&self) -> Vec<Obj> {
        (0..self.labels.len()).map(Obj::ind).collect()
    }

    // ---- hom spaces -------------------------------------------------------

    pub fn hom_dim_ind(&self, a: usize, b: usize) -> usize {
        self.dims[a][b]
    }

    /// Cumulative offsets of the blocks of `Hom(x, y)`, codomain-major.
    fn layout(&self, x: &Obj, y: &Obj) -> Vec<usize> {
        let mut off = Vec::with_capacity(x.len() * y.len() + 1);
        let mut acc = 0;
        for &b in &y.0 {
            for &a in &x.0 {
                off.push(acc);
                acc += self.dims[a][b];
            }
        }
        off.push(acc);
        off
    }

    pub fn hom_dim(&self, x: &Obj, y: &Obj) -> usize {
        y.0.iter().map(|&b| x.0.iter().map(|&a| self.dims[a][b]).sum::<usize>()).sum()
    }

    /// Coordinates of the `(i, j)` block (`cod_i ← dom_j`).
    pub fn block<'a>(&self, f: &'a Morphism, i: usize, j: usize) -> &'a [u32] {
        let off = self.layout(&f.dom, &f.cod);
        let idx = i * f.dom.len() + j;
        &f.coeffs[off[idx]..off[idx + 1]]
    }

    pub fn zero(&self, x: &Obj, y: &Obj) -> Morphism {
        Morphism { dom: x.clone(), cod: y.clone(), coeffs: vec![0; self.hom_dim(x, y)] }
    }

    pub fn from_vector(&self, x: &Obj, y: &Obj, v: Vec<u32>) -> Result<Morphism> {
        if v.len() != self.hom_dim(x, y) {
            return Err(Error::Dimension("coordinate vector length".into()));
        }
        Ok(Morphism { dom: x.clone(), cod: y.clone(), coeffs: v })
    }

    /// Morphism with the given blocks (`None` means zero).
    pub fn from_blocks(
        &self,
        x: &Obj,
        y: &Obj,
        mut block: impl FnMut(usize, usize) -> Option<Vec<u32>>,
    ) -> Morphism {
        let mut coeffs = Vec::with_capacity(self.hom_dim(x, y));
        for (i, &b) in y.0.iter().enumerate() {
            for (j, &a) in x.0.iter().enumerate() {
                let d = self.dims[a][b];
                match block(i, j) {
                    Some(v) => {
                        assert_eq!(v.len(), d, "block length");
                        coeffs.extend(v);
                    }
                    None => coeffs.extend(std::iter::repeat_n(0, d)),
                }
            }
        }
        Morphism { dom: x.clone(), cod: y.clone(), coeffs }
    }

    pub fn identity(&self, x: &Obj) -> Morphism {
        self.from_blocks(x, x, |i, j| {
            (i == j).then(|| {
                let mut v = vec![0; self.dims[x.0[i]][x.0[i]]];
                v[self.identity_index(x.0[i])] = 1;
                v
            })
        })
    }

    fn identity_index(&self, a: usize) -> usize {
        match &self.engine {
            Engine::Stable(_) => 0,
            Engine::Derived(d) => d.identity_index(&self.labels[a]),
        }
    }

    /// The standard basis of `Hom(x, y)`.
    pub fn hom_basis(&self, x: &Obj, y: &Obj) -> Vec<Morphism> {
        let d = self.hom_dim(x, y);
        (0..d)
            .map(|i| {
                let mut v = vec![0; d];
                v[i] = 1;
                Morphism { dom: x.clone(), cod: y.clone(), coeffs: v }
            })
            .collect()
    }

    pub fn add(&self, f: &Morphism, g: &Morphism) -> Result<Morphism> {
        if f.dom != g.dom || f.cod != g.cod {
            return Err(Error::Dimension("sum of morphisms with different ends".into()));
        }
        let coeffs = f.coeffs.iter().zip(&g.coeffs).map(|(a, b)| self.k.add(*a, *b)).collect();
        Ok(Morphism { dom: f.dom.clone(), cod: f.cod.clone(), coeffs })
    }

    pub fn sub(&self, f: &Morphism, g: &Morphism) -> Result<Morphism> {
        self.add(f, &self.neg(g))
    }

    pub fn scale(&self, f: &Morphism, c: u32) -> Morphism {
        let coeffs = f.coeffs.iter().map(|a| self.k.mul(*a, c % self.k.p())).collect();
        Morphism { dom: f.dom.clone(), cod: f.cod.clone(), coeffs }
    }

    pub fn neg(&self, f: &Morphism) -> Morphism {
        self.scale(f, self.k.p() - 1)
    }

    pub fn is_zero(&self, f: &Morphism) -> bool {
        f.coeffs.iter().all(|&c| c == 0)
    }

    /// `g ∘ f`.
    pub fn compose(&self, g: &Morphism, f: &Morphism) -> Result<Morphism> {
        if f.cod != g.dom {
            return Err(Error::Composition(format!(
                "{} → {} then {} → {}",
                self.obj_name(&f.dom),
                self.obj_name(&f.cod),
                self.obj_name(&g.dom),
                self.obj_name(&g.cod)
            )));
        }
        let (x, y, z) = (&f.dom, &f.cod, &g.cod);
        let lf = self.layout(x, y);
        let lg = self.layout(y, z);
        let lh = self.layout(x, z);
        let mut out = vec![0u32; *lh.last().unwrap()];
        let k = self.k;
        for (i, &c) in z.0.iter().enumerate() {
            for (j, &a) in x.0.iter().enumerate() {
                let dac = self.dims[a][c];
                if dac == 0 {
                    continue;
                }
                let o = lh[i * x.len() + j];
                for (l, &b) in y.0.iter().enumerate() {
                    let (dab, dbc) = (self.dims[a][b], self.dims[b][c]);
                    if dab == 0 || dbc == 0 {
                        continue;
                    }
                    let fo = lf[l * x.len() + j];
                    let go = lg[i * y.len() + l];
                    let t = &self.comp[&(a, b, c)];
                    for u in 0..dbc {
                        let gu = g.coeffs[go + u];
                        if gu == 0 {
                            continue;
                        }
                        for v in 0..dab {
                            let fv = f.coeffs[fo + v];
                            if fv == 0 {
                                continue;
                            }
                            let base = (u * dab + v) * dac;
                            axpy(k, &mut out[o..o + dac], k.mul(gu, fv), &t[base..base + dac]);
                        }
                    }
                }
            }
        }
        Ok(Morphism { dom: x.clone(), cod: z.clone(), coeffs: out })
    }

    pub fn compose_all(&self, maps: &[&Morphism]) -> Result<Morphism> {
        let mut it = maps.iter().rev();
        let mut acc = (*it.next().expect("nonempty chain")).clone();
        for m in it {
            acc = self.compose(m, &acc)?;
        }
        Ok(acc)
    }

    /// Matrix of `φ ↦ h ∘ φ` from `Hom(x, h.dom)` to `Hom(x, h.cod)`.
    pub fn post_matrix(&self, h: &Morphism, x: &Obj) -> Mat {
        let basis = self.hom_basis(x, &h.dom);
        let cols: Vec<Vec<u32>> =
            basis.iter().map(|b| self.compose(h, b).expect("composable").coeffs).collect();
        Mat::from_cols(self.k, self.hom_dim(x, &h.cod), &cols)
    }

    /// Matrix of `ψ ↦ ψ ∘ f` from `Hom(f.cod, z)` to `Hom(f.dom, z)`.
    pub fn pre_matrix(&self, f: &Morphism, z: &Obj) -> Mat {
        let basis = self.hom_basis(&f.cod, z);
        let cols: Vec<Vec<u32>> =
            basis.iter().map(|b| self.compose(b, f).expect("composable").coeffs).collect();
        Mat::from_cols(self.k, self.hom_dim(&f.dom, z), &cols)
    }

    /// Some `φ: target.dom → h.dom` with `h ∘ φ = target`.
    pub fn lift_through(&self, h: &Morphism, target: &Morphism) -> Option<Morphism> {
        assert_eq!(h.cod, target.cod, "lift_through codomain");
        let m = self.post_matrix(h, &target.dom);
        let v = m.solve(&target.coeffs)?;
        Some(Morphism { dom: target.dom.clone(), cod: h.dom.clone(), coeffs: v })
    }

    /// Some `ψ: f.cod → target.cod` with `ψ ∘ f = target`.
    pub fn extend_along(&self, f: &Morphism, target: &Morphism) -> Option<Morphism> {
        assert_eq!(f.dom, target.dom, "extend_along domain");
        let m = self.pre_matrix(f, &target.cod);
        let v = m.solve(&target.coeffs)?;
        Some(Morphism { dom: f.cod.clone(), cod: target.cod.clone(), coeffs: v })
    }

    /// Image of `φ ↦ h ∘ φ` on `Hom(x, h.dom)`, a subspace of `Hom(x, h.cod)`.
    pub fn post_image(&self, h: &Morphism, x: &Obj) -> Subspace {
        self.post_matrix(h, x).image()
    }

    pub fn is_iso(&self, f: &Morphism) -> bool {
        self.inverse(f).is_some()
    }

    pub fn inverse(&self, f: &Morphism) -> Option<Morphism> {
        if !f.dom.iso_class_eq(&f.cod) {
            return None;
        }
        let g = self.lift_through(f, &self.identity(&f.cod))?;
        (self.compose(&g, f).ok()? == self.identity(&f.dom)).then_some(g)
    }

    // ---- direct sums ------------------------------------------------------

    /// `(f1 f2): x1 ⊕ x2 → y`.
    pub fn hcat(&self, f1: &Morphism, f2: &Morphism) -> Morphism {
        assert_eq!(f1.cod, f2.cod, "hcat codomains");
        let n1 = f1.dom.len();
        let x = f1.dom.sum(&f2.dom);
        self.from_blocks(&x, &f1.cod, |i, j| {
            Some(if j < n1 { self.block(f1, i, j).to_vec() } else { self.block(f2, i, j - n1).to_vec() })
        })
    }

    /// `(f1; f2): x → y1 ⊕ y2`.
    pub fn vcat(&self, f1: &Morphism, f2: &Morphism) -> Morphism {
        assert_eq!(f1.dom, f2.dom, "vcat domains");
        let n1 = f1.cod.len();
        let y = f1.cod.sum(&f2.cod);
        self.from_blocks(&f1.dom, &y, |i, j| {
            Some(if i < n1 { self.block(f1, i, j).to_vec() } else { self.block(f2, i - n1, j).to_vec() })
        })
    }

    /// `f1 ⊕ f2`.
    pub fn diag(&self, f1: &Morphism, f2: &Morphism) -> Morphism {
        let (m1, n1) = (f1.cod.len(), f1.dom.len());
        let x = f1.dom.sum(&f2.dom);
        let y = f1.cod.sum(&f2.cod);
        self.from_blocks(&x, &y, |i, j| match (i < m1, j < n1) {
            (true, true) => Some(self.block(f1, i, j).to_vec()),
            (false, false) => Some(self.block(f2, i - m1, j - n1).to_vec()),
            _ => None,
        })
    }

    /// Inclusion of the summands `idx` of `x` (in that order).
    pub fn inclusion(&self, x: &Obj, idx: &[usize]) -> Morphism {
        let sub = Obj(idx.iter().map(|&i| x.0[i]).collect());
        let id = self.identity(&sub);
        self.from_blocks(&sub, x, |i, j| (idx[j] == i).then(|| self.block(&id, j, j).to_vec()))
    }

    /// Projection onto the summands `idx` of `x`.
    pub fn projection(&self, x: &Obj, idx: &[usize]) -> Morphism {
        let sub = Obj(idx.iter().map(|&i| x.0[i]).collect());
        let id = self.identity(&sub);
        self.from_blocks(x, &sub, |i, j| (idx[i] == j).then(|| self.block(&id, i, i).to_vec()))
    }

    /// Restriction to selected domain and codomain summands.
    pub fn restrict(&self, f: &Morphism, dom_idx: &[usize], cod_idx: &[usize]) -> Morphism {
        let x = Obj(dom_idx.iter().map(|&j| f.dom.0[j]).collect());
        let y = Obj(cod_idx.iter().map(|&i| f.cod.0[i]).collect());
        self.from_blocks(&x, &y, |i, j| Some(self.block(f, cod_idx[i], dom_idx[j]).to_vec()))
    }

    /// A pair of mutually inverse isomorphisms when `x ≅ y`.
    pub fn iso_witness(&self, x: &Obj, y: &Obj) -> Option<(Morphism, Morphism)> {
        if !x.iso_class_eq(y) {
            return None;
        }
        let mut used = vec![false; y.len()];
        let mut perm = Vec::with_capacity(x.len());
        for &a in &x.0 {
            let i = (0..y.len()).find(|&i| !used[i] && y.0[i] == a)?;
            used[i] = true;
            perm.push(i);
        }
        let ident = |a: usize| {
            let mut v = vec![0; self.dims[a][a]];
            v[self.identity_index(a)] = 1;
            v
        };
        let u = self.from_blocks(x, y, |i, j| (perm[j] == i).then(|| ident(x.0[j])));
        let v = self.from_blocks(y, x, |i, j| (perm[i] == j).then(|| ident(x.0[i])));
        Some((u, v))
    }

    // ---- shift ------------------------------------------------------------

    pub fn shift_label(&self, a: usize, n: i32) -> Result<usize> {
        let l = match &self.labels[a] {
            IndecLabel::Block(b) => {
                let st = self.stable().expect("stable label");
                IndecLabel::Block(if n.rem_euclid(2) == 1 { st.n() - b } else { *b })
            }
            IndecLabel::Shifted { module, degree } => {
                let d = degree + n;
                let w = self.window().expect("derived label");
                if d.abs() > w {
                    return Err(Error::WindowExceeded { degree: d, window: w });
                }
                IndecLabel::Shifted { module: module.clone(), degree: d }
            }
        };
        Ok(self.index[&l])
    }

    pub fn shift_obj(&self, x: &Obj, n: i32) -> Result<Obj> {
        x.0.iter().map(|&a| self.shift_label(a, n)).collect::<Result<Vec<_>>>().map(Obj)
    }

    /// `f[n]`; coordinates are unchanged by construction of the bases.
    pub fn shift(&self, f: &Morphism, n: i32) -> Result<Morphism> {
        Ok(Morphism {
            dom: self.shift_obj(&f.dom, n)?,
            cod: self.shift_obj(&f.cod, n)?,
            coeffs: f.coeffs.clone(),
        })
    }

    // ---- triangles --------------------------------------------------------

    /// Completes `f` to a distinguished triangle `(f, g, h)` with `C = Cone(f)`
    /// in canonical (sorted) form.
    pub fn cone(&self, f: &Morphism) -> Result<Triangle> {
        let a1 = self.shift_obj(&f.dom, 1)?;
        let (c, g, h) = match &self.engine {
            Engine::Stable(s) => s.cone(self, f)?,
            Engine::Derived(d) => d.cone(self, f)?,
        };
        debug_assert_eq!(g.cod, c);
        debug_assert_eq!(h.cod, a1);
        Ok(Triangle { f: f.clone(), g, h })
    }

    /// Triangle `(f, g, h)` with the given `g` in the middle position and
    /// `A = CoCone(g)`, obtained by rotating the cone triangle of `g` back.
    pub fn cocone(&self, g: &Morphism) -> Result<Triangle> {
        let t = self.cone(g)?;
        let f = self.neg(&self.shift(&t.h, -1)?);
        let a = f.dom.clone();
        let a1 = self.shift_obj(&a, 1)?;
        // For both engines D[-1][1] is literally D.
        debug_assert_eq!(a1, t.g.cod);
        Ok(Triangle { f, g: g.clone(), h: t.g })
    }

    /// Triangle `A → B → C →h A[1]` realizing `h`, with `A = h.cod[-1]`.
    pub fn realize(&self, h: &Morphism) -> Result<Triangle> {
        let u = self.neg(&self.shift(h, -1)?);
        match self.cone(&u) {
            Ok(t) => self.rotate(&t),
            Err(e @ Error::WindowExceeded { .. }) => {
                let t = self.cocone(h).map_err(|_| e)?;
                self.rotate_back(&t)
            }
            Err(e) => Err(e),
        }
    }

    /// `(f, g, h) ↦ (g, h, -f[1])`.
    pub fn rotate(&self, t: &Triangle) -> Result<Triangle> {
        let f1 = self.neg(&self.shift(&t.f, 1)?);
        Ok(Triangle { f: t.g.clone(), g: t.h.clone(), h: f1 })
    }

    /// `(f, g, h) ↦ (-h[-1], f, g)`.
    pub fn rotate_back(&self, t: &Triangle) -> Result<Triangle> {
        let h = self.neg(&self.shift(&t.h, -1)?);
        Ok(Triangle { f: h, g: t.f.clone(), h: t.g.clone() })
    }

    /// Checks the composites `gf`, `hg`, `f[1]h` vanish.
    pub fn triangle_composites_vanish(&self, t: &Triangle) -> Result<bool> {
        let gf = self.compose(&t.g, &t.f)?;
        let hg = self.compose(&t.h, &t.g)?;
        let f1h = self.compose(&self.shift(&t.f, 1)?, &t.h)?;
        Ok(self.is_zero(&gf) && self.is_zero(&hg) && self.is_zero(&f1h))
    }

    /// Exactness of `Hom(W, A) → Hom(W, B) → Hom(W, C) → Hom(W, A[1])` at
    /// `B` and `C`, by ranks.
    pub fn les_exact_at(&self, t: &Triangle, w: &Obj) -> bool {
        let mf = self.post_matrix(&t.f, w);
        let mg = self.post_matrix(&t.g, w);
        let mh = self.post_matrix(&t.h, w);
        let ker_g = mg.cols - mg.rank();
        let ker_h = mh.cols - mh.rank();
        mf.rank() == ker_g && mg.rank() == ker_h
    }

    /// Homotopy pullback of `g: B → C` along `c: C' → C`.
    pub fn homotopy_pullback(&self, g: &Morphism, c: &Morphism) -> Result<Pullback> {
        if g.cod != c.cod {
            return Err(Error::Composition("pullback: different codomains".into()));
        }
        let gc = self.hcat(g, &self.neg(c));
        let t = self.cocone(&gc)?;
        let nb = g.dom.len();
        let all: Vec<usize> = (0..t.f.cod.len()).collect();
        let b = self.compose(&self.projection(&t.f.cod, &all[..nb]), &t.f)?;
        let g_prime = self.compose(&self.projection(&t.f.cod, &all[nb..]), &t.f)?;
        Ok(Pullback { b, g_prime, triangle: t })
    }

    /// Filler `z: D → E` for a commutative square `g ∘ y = c ∘ x`.
    pub fn pullback_filler(&self, pb: &Pullback, y: &Morphism, x: &Morphism) -> Option<Morphism> {
        let yx = self.vcat(y, x);
        self.lift_through(&pb.triangle.f, &yx)
    }

    /// Homotopy pushout of `f: A → B` along `a: A → A'`.
    pub fn homotopy_pushout(&self, f: &Morphism, a: &Morphism) -> Result<Pushout> {
        if f.dom != a.dom {
            return Err(Error::Composition("pushout: different domains".into()));
        }
        let fa = self.vcat(f, &self.neg(a));
        let t = self.cone(&fa)?;
        let nb = f.cod.len();
        let all: Vec<usize> = (0..t.g.dom.len()).collect();
        let f_prime = self.compose(&t.g, &self.inclusion(&t.g.dom, &all[nb..]))?;
        let a_prime = self.compose(&t.g, &self.inclusion(&t.g.dom, &all[..nb]))?;
        Ok(Pushout { a_prime, f_prime, triangle: t })
    }

    /// Filler `z: E → D` for a commutative square `y ∘ f = x ∘ a`.
    pub fn pushout_filler(&self, po: &Pushout, y: &Morphism, x: &Morphism) -> Option<Morphism> {
        let yx = self.hcat(y, x);
        self.extend_along(&po.triangle.g, &yx)
    }

    /// Octahedron for composable `f: A → B`, `g: B → C`. The connecting
    /// triangle is the cone triangle of the induced `u: Cone(f) → Cone(gf)`
    /// transported to `Cone(g)` along an isomorphism found by linear solve.
    pub fn octahedron(&self, f: &Morphism, g: &Morphism) -> Result<Octahedron> {
        let gf = self.compose(g, f)?;
        let on_f = self.cone(f)?;
        let on_g = self.cone(g)?;
        let on_gf = self.cone(&gf)?;
        let inv = |m: &str| Error::Invariant(format!("octahedron: {m}"));
        // u: C' → B' with u g_f = g_gf g and h_gf u = h_f.
        let (cf, cgf, cg) = (on_f.c().clone(), on_gf.c().clone(), on_g.c().clone());
        let lhs1 = self.pre_matrix(&on_f.g, &cgf);
        let rhs1 = self.compose(&on_gf.g, g)?;
        let lhs2 = self.post_matrix(&on_gf.h, &cf);
        let sys = lhs1.vstack(&lhs2);
        let mut rhs = rhs1.coeffs.clone();
        rhs.extend_from_slice(&on_f.h.coeffs);
        let particular = sys.solve(&rhs).ok_or_else(|| inv("no u"))?;
        let kernel = sys.kernel_basis();
        let f1 = self.shift(f, 1)?;
        let g_f1 = self.shift(&on_f.g, 1)?;
        // Try u = particular + kernel combinations until the transported
        // connecting triangle exists.
        let candidates = enumerate_affine(self.k, &particular, kernel.basis(), 256);
        for uv in candidates {
            let u = Morphism { dom: cf.clone(), cod: cgf.clone(), coeffs: uv };
            let tu = self.cone(&u)?;
            if !tu.c().iso_class_eq(&cg) {
                continue;
            }
            // θ: Cone(u) → Cone(g) with θ v' g_gf = g_g,
            // h_g θ v' = f[1] h_gf and g_f[1] h_g θ = h'.
            let v1 = &tu.g;
            let a1 = self.pre_matrix(&self.compose(v1, &on_gf.g)?, &cg);
            let post_hg = self.post_matrix(&on_g.h, tu.c());
            let a2 = self.pre_matrix(v1, &on_g.h.cod).mul(&post_hg);
            let b2 = self.compose(&f1, &on_gf.h)?;
            let w = self.compose(&g_f1, &on_g.h)?;
            let a3 = self.post_matrix(&w, tu.c());
            let m = a1.vstack(&a2).vstack(&a3);
            let mut r = on_g.g.coeffs.clone();
            r.extend_from_slice(&b2.coeffs);
            r.extend_from_slice(&tu.h.coeffs);
            let Some(th0) = m.solve(&r) else { continue };
            let thk = m.kernel_basis();
            for thv in enumerate_affine(self.k, &th0, thk.basis(), 64) {
                let theta = Morphism { dom: tu.c().clone(), cod: cg.clone(), coeffs: thv };
                let Some(theta_inv) = self.inverse(&theta) else { continue };
                let v = self.compose(&theta, &tu.g)?;
                let wv = self.compose(&tu.h, &theta_inv)?;
                let connecting = Triangle { f: u, g: v, h: wv };
                return Ok(Octahedron { on_f, on_g, on_gf, connecting });
            }
        }
        Err(inv("no connecting triangle found"))
    }
}

/// `base + Σ c_i v_i`, enumerated over all coefficient choices up to `cap`
/// elements (deterministic order, `base` first).
pub fn enumerate_affine(k: PrimeField, base: &[u32], dirs: &[Vec<u32>], cap: usize) -> Vec<Vec<u32>> {
    let mut out = vec![base.to_vec()];
    let mut coeffs = vec![0u32; dirs.len()];
    while out.len() < cap {
        let mut i = 0;
        loop {
            if i == dirs.len() {
                return out;
            }
            coeffs[i] += 1;
            if coeffs[i] == k.p() {
                coeffs[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
        let mut v = base.to_vec();
        for (c, d) in coeffs.iter().zip(dirs) {
            axpy(k, &mut v, *c, d);
        }
        out.push(v);
    }
    out
}

impl fmt::Display for IndecLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndecLabel::Block(a) => write!(f, "J{a}"),
            IndecLabel::Shifted { module, degree } => {
                let m: String = module.iter().map(|d| d.to_string()).collect();
                write!(f, "M{m}[{degree}]")
            }
        }
    }
}

/// Module-level avatar of a morphism between degree-0 parts; used by the
/// heart oracles. Returns `H^0(f)` as a map of representations.
pub fn h0_map(be: &Backend, f: &Morphism) -> Option<ModuleMap> {
    be.derived().map(|d| d.h0_map(be, f))
}
