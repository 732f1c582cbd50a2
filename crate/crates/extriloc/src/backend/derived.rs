//! `D^b(kQ)` for a Dynkin quiver `Q`, as the homotopy category of bounded
//! complexes of projectives.
//!
//! A projective `⊕ P_v` in one degree is a list of vertices and a map between
//! such lists is a path-coefficient matrix (see [`crate::quiver`]). The
//! canonical model of `M[d]` is the minimal presentation `P1 → P0` of `M`
//! placed in degrees `-d-1, -d`, with differential `(-1)^d δ`, so that the
//! model of `M[d+1]` is the literal shift of the model of `M[d]`.
//!
//! Cones are mapping cones. They are brought back to canonical form by
//! Gaussian elimination of invertible differential entries followed by
//! decomposing homology: a minimal complex over a hereditary algebra is
//! isomorphic to the sum of the canonical models of its shifted homology.

use std::collections::{BTreeMap, HashMap};

use crate::backend::{Backend, IndecLabel, Morphism, Obj};
use crate::error::{Error, Result};
use crate::linalg::{Mat, PrimeField, Subspace};
use crate::quiver::{
    image_spaces, kernel, projective_map, projective_presentation, projective_rep, quotient, Catalog,
    ModuleMap, Presentation, Quiver, Rep,
};

/// Bounded complex of projectives.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct Cx {
    terms: BTreeMap<i32, Vec<usize>>,
    /// `diffs[d]: terms[d] → terms[d+1]`.
    diffs: BTreeMap<i32, Mat>,
}

/// Degreewise path-coefficient matrices of a chain map.
type Chain = BTreeMap<i32, Mat>;

impl Cx {
    fn term(&self, d: i32) -> &[usize] {
        self.terms.get(&d).map_or(&[], |v| v.as_slice())
    }

    fn diff(&self, k: PrimeField, d: i32) -> Mat {
        self.diffs
            .get(&d)
            .cloned()
            .unwrap_or_else(|| Mat::zeros(k, self.term(d + 1).len(), self.term(d).len()))
    }

    fn degrees(&self) -> Vec<i32> {
        self.terms.iter().filter(|(_, v)| !v.is_empty()).map(|(d, _)| *d).collect()
    }

    /// `X[s]`: terms move down by `s`, differential picks up `(-1)^s`.
    fn shifted(&self, s: i32) -> Cx {
        let sign = s.rem_euclid(2) == 1;
        Cx {
            terms: self.terms.iter().map(|(d, v)| (d - s, v.clone())).collect(),
            diffs: self.diffs.iter().map(|(d, m)| (d - s, if sign { m.neg() } else { m.clone() })).collect(),
        }
    }

    fn is_chain_complex(&self, k: PrimeField) -> bool {
        self.degrees().iter().all(|&d| self.diff(k, d + 1).mul(&self.diff(k, d)).is_zero())
    }
}

fn shift_chain(c: &Chain, s: i32) -> Chain {
    c.iter().map(|(d, m)| (d - s, m.clone())).collect()
}

fn chain_comp(k: PrimeField, c: &Chain, src: &Cx, tgt: &Cx, d: i32) -> Mat {
    c.get(&d).cloned().unwrap_or_else(|| Mat::zeros(k, tgt.term(d).len(), src.term(d).len()))
}

fn chain_compose(k: PrimeField, g: &Chain, f: &Chain, x: &Cx, y: &Cx, z: &Cx) -> Chain {
    let mut degs: Vec<i32> = x.degrees();
    degs.extend(z.degrees());
    degs.sort();
    degs.dedup();
    degs.into_iter()
        .map(|d| (d, chain_comp(k, g, y, z, d).mul(&chain_comp(k, f, x, y, d))))
        .collect()
}

/// Coordinates of the allowed entries of chain maps `src → tgt`.
#[derive(Debug, Clone)]
struct Layout {
    entries: Vec<(i32, usize, usize)>,
}

impl Layout {
    fn new(q: &Quiver, src: &Cx, tgt: &Cx) -> Self {
        let mut entries = Vec::new();
        for d in src.degrees() {
            let (s, t) = (src.term(d), tgt.term(d));
            for (ti, &w) in t.iter().enumerate() {
                for (si, &v) in s.iter().enumerate() {
                    if q.reaches(w, v) {
                        entries.push((d, ti, si));
                    }
                }
            }
        }
        Layout { entries }
    }

    fn to_chain(&self, k: PrimeField, src: &Cx, tgt: &Cx, v: &[u32]) -> Chain {
        let mut c: Chain = BTreeMap::new();
        for (&(d, t, s), &x) in self.entries.iter().zip(v) {
            let m = c.entry(d).or_insert_with(|| Mat::zeros(k, tgt.term(d).len(), src.term(d).len()));
            m.set(t, s, x);
        }
        c
    }

    fn from_chain(&self, c: &Chain) -> Vec<u32> {
        self.entries.iter().map(|&(d, t, s)| c.get(&d).map_or(0, |m| m.get(t, s))).collect()
    }
}

/// Chain-map space `src → tgt` modulo null-homotopic maps.
#[derive(Debug, Clone)]
struct HomData {
    src: Cx,
    tgt: Cx,
    layout: Layout,
    /// Representatives of a basis of the homotopy classes.
    reps: Vec<Vec<u32>>,
    /// Left inverse of `[reps | null-homotopic basis]`.
    left_inv: Mat,
}

impl HomData {
    fn compute(q: &Quiver, k: PrimeField, src: &Cx, tgt: &Cx, prefer: Option<Vec<u32>>) -> Self {
        let layout = Layout::new(q, src, tgt);
        let nv = layout.entries.len();
        let index: HashMap<(i32, usize, usize), usize> =
            layout.entries.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        // Chain condition d_tgt φ^d − φ^{d+1} d_src = 0.
        let mut rows = Vec::new();
        let mut degs = src.degrees();
        degs.extend(tgt.degrees());
        degs.sort();
        degs.dedup();
        for &d in &degs {
            let dt = tgt.diff(k, d);
            let ds = src.diff(k, d);
            for i in 0..tgt.term(d + 1).len() {
                for j in 0..src.term(d).len() {
                    let mut row = vec![0u32; nv];
                    for l in 0..tgt.term(d).len() {
                        if let Some(&x) = index.get(&(d, l, j)) {
                            row[x] = k.add(row[x], dt.get(i, l));
                        }
                    }
                    for l in 0..src.term(d + 1).len() {
                        if let Some(&x) = index.get(&(d + 1, i, l)) {
                            row[x] = k.sub(row[x], ds.get(l, j));
                        }
                    }
                    if row.iter().any(|&c| c != 0) {
                        rows.push(row);
                    }
                }
            }
        }
        let z = if rows.is_empty() { Subspace::full(k, nv) } else { Mat::from_rows(k, &rows).kernel_basis() };
        // Null-homotopic maps d_tgt H + H d_src, H^d: src^d → tgt^{d-1}.
        let mut null_vecs = Vec::new();
        for &d in &degs {
            let (s, t) = (src.term(d), tgt.term(d - 1));
            for (ti, &w) in t.iter().enumerate() {
                for (si, &v) in s.iter().enumerate() {
                    if !q.reaches(w, v) {
                        continue;
                    }
                    let mut h: Chain = BTreeMap::new();
                    let mut hm = Mat::zeros(k, t.len(), s.len());
                    hm.set(ti, si, 1);
                    h.insert(d, hm);
                    let mut phi: Chain = BTreeMap::new();
                    // (d_tgt H)^d = d_tgt^{d-1} H^d
                    phi.insert(d, tgt.diff(k, d - 1).mul(&h[&d]));
                    // (H d_src)^{d-1} = H^d d_src^{d-1}
                    phi.insert(d - 1, h[&d].mul(&src.diff(k, d - 1)));
                    null_vecs.push(layout.from_chain(&phi));
                }
            }
        }
        let null = Subspace::span(k, nv, null_vecs);
        let mut span = null.clone();
        let mut reps = Vec::new();
        let mut candidates: Vec<Vec<u32>> = prefer.into_iter().collect();
        candidates.extend(z.basis().iter().cloned());
        for v in candidates {
            if !span.contains(&v) {
                let mut more = span.basis().to_vec();
                more.push(v.clone());
                span = Subspace::span(k, nv, more);
                reps.push(v);
            }
        }
        let mut cols = reps.clone();
        cols.extend(null.basis().iter().cloned());
        let left_inv = left_inverse(k, nv, &cols);
        HomData { src: src.clone(), tgt: tgt.clone(), layout, reps, left_inv }
    }

    fn dim(&self) -> usize {
        self.reps.len()
    }

    fn rep_chain(&self, k: PrimeField, u: usize) -> Chain {
        self.layout.to_chain(k, &self.src, &self.tgt, &self.reps[u])
    }

    fn coordinates(&self, c: &Chain) -> Vec<u32> {
        let v = self.layout.from_chain(c);
        let all = self.left_inv.apply(&v);
        all[..self.reps.len()].to_vec()
    }
}

/// Left inverse of the matrix with the given (independent) columns.
fn left_inverse(k: PrimeField, rows: usize, cols: &[Vec<u32>]) -> Mat {
    let r = cols.len();
    if r == 0 {
        return Mat::zeros(k, 0, rows);
    }
    let m = Mat::from_cols(k, rows, cols);
    let (_, pivots) = m.transpose().rref();
    assert_eq!(pivots.len(), r, "columns must be independent");
    let mut sq = Mat::zeros(k, r, r);
    for (i, &pr) in pivots.iter().enumerate() {
        for j in 0..r {
            sq.set(i, j, m.get(pr, j));
        }
    }
    let inv = sq.inverse().expect("independent rows");
    let mut out = Mat::zeros(k, r, rows);
    for (i, &pr) in pivots.iter().enumerate() {
        for j in 0..r {
            out.set(j, pr, inv.get(j, i));
        }
    }
    out
}

/// Engine for the derived category of a Dynkin quiver.
#[derive(Debug, Clone)]
pub struct Derived {
    q: Quiver,
    k: PrimeField,
    w: i32,
    catalog: Catalog,
    pres: Vec<Presentation>,
    /// `(m, n, offset)` with `offset ∈ {0, 1}`.
    homs: HashMap<(usize, usize, i32), HomData>,
    /// Module maps for the degree-0 basis representatives.
    h0: HashMap<(usize, usize), Vec<ModuleMap>>,
}

impl Derived {
    pub(crate) fn new(q: Quiver, k: PrimeField, w: i32) -> Self {
        let catalog = Catalog::new(q.clone(), k);
        let pres: Vec<Presentation> =
            catalog.indecs.iter().map(|m| projective_presentation(&q, k, m)).collect();
        let mut me = Derived { q, k, w, catalog, pres, homs: HashMap::new(), h0: HashMap::new() };
        let nm = me.catalog.indecs.len();
        for m in 0..nm {
            for n in 0..nm {
                for off in 0..=1 {
                    let src = me.model(m, 0);
                    let tgt = me.model(n, off);
                    let prefer = (m == n && off == 0).then(|| {
                        let id: Chain = src.terms.iter().map(|(d, v)| (*d, Mat::identity(k, v.len()))).collect();
                        Layout::new(&me.q, &src, &tgt).from_chain(&id)
                    });
                    let hd = HomData::compute(&me.q, k, &src, &tgt, prefer);
                    me.homs.insert((m, n, off), hd);
                }
                let maps = (0..me.homs[&(m, n, 0)].dim()).map(|u| me.h0_basis_map(m, n, u)).collect();
                me.h0.insert((m, n), maps);
            }
        }
        me
    }

    pub fn quiver(&self) -> &Quiver {
        &self.q
    }

    pub fn field(&self) -> PrimeField {
        self.k
    }

    pub fn window(&self) -> i32 {
        self.w
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn presentation(&self, m: usize) -> &Presentation {
        &self.pres[m]
    }

    /// Labels ordered by degree, then by catalog order of the module.
    pub(crate) fn labels(&self) -> Vec<IndecLabel> {
        let mut out = Vec::new();
        for d in -self.w..=self.w {
            for m in &self.catalog.indecs {
                out.push(IndecLabel::Shifted { module: m.dims.clone(), degree: d });
            }
        }
        out
    }

    fn module_index(&self, l: &IndecLabel) -> (usize, i32) {
        match l {
            IndecLabel::Shifted { module, degree } => {
                (self.catalog.index_of(module).expect("catalog module"), *degree)
            }
            IndecLabel::Block(_) => unreachable!("derived engine label"),
        }
    }

    /// Module index and degree of a backend label.
    pub fn label_parts(&self, be: &Backend, a: usize) -> (usize, i32) {
        self.module_index(be.label(a))
    }

    pub fn module_name(&self, dims: &[usize]) -> String {
        let n = self.q.n();
        let unit = |v: usize| (0..n).map(|i| usize::from(i == v)).collect::<Vec<_>>();
        for v in 0..n {
            if dims == unit(v).as_slice() {
                return format!("S{}", v + 1);
            }
        }
        for v in 0..n {
            if projective_rep(&self.q, self.k, &[v]).dims == dims {
                return format!("P{}", v + 1);
            }
        }
        for v in 0..n {
            if crate::quiver::injective_rep(&self.q, self.k, &[v]).dims == dims {
                return format!("I{}", v + 1);
            }
        }
        format!("M{}", dims.iter().map(|d| d.to_string()).collect::<String>())
    }

    pub fn parse_module(&self, s: &str) -> Option<Vec<usize>> {
        let n = self.q.n();
        let s = s.trim();
        let vertex = |t: &str| t.parse::<usize>().ok().filter(|&v| (1..=n).contains(&v)).map(|v| v - 1);
        let dims = if let Some(t) = s.strip_prefix('S') {
            let v = vertex(t)?;
            (0..n).map(|i| usize::from(i == v)).collect()
        } else if let Some(t) = s.strip_prefix('P') {
            projective_rep(&self.q, self.k, &[vertex(t)?]).dims
        } else if let Some(t) = s.strip_prefix('I') {
            crate::quiver::injective_rep(&self.q, self.k, &[vertex(t)?]).dims
        } else {
            let t = s.strip_prefix('M').unwrap_or(s);
            let parts: Vec<usize> = if t.contains(',') {
                t.split(',').map(|x| x.trim().parse().ok()).collect::<Option<_>>()?
            } else {
                t.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect::<Option<_>>()?
            };
            parts
        };
        self.catalog.index_of(&dims).map(|_| dims)
    }

    /// Canonical model of `M_m[d]`.
    fn model(&self, m: usize, d: i32) -> Cx {
        let p = &self.pres[m];
        let mut c = Cx::default();
        c.terms.insert(0, p.p0.clone());
        if !p.p1.is_empty() {
            c.terms.insert(-1, p.p1.clone());
            c.diffs.insert(-1, p.delta.clone());
        }
        c.shifted(d)
    }

    pub(crate) fn hom_dim(&self, a: &IndecLabel, b: &IndecLabel) -> usize {
        let (m, d) = self.module_index(a);
        let (n, e) = self.module_index(b);
        match e - d {
            off @ 0..=1 => self.homs[&(m, n, off)].dim(),
            _ => 0,
        }
    }

    pub(crate) fn identity_index(&self, _a: &IndecLabel) -> usize {
        0
    }

    /// Basis representative `u` of `Hom(M_m[d], M_n[e])` as a chain map
    /// between canonical models.
    fn basis_chain(&self, m: usize, d: i32, n: usize, e: i32, u: usize) -> Chain {
        shift_chain(&self.homs[&(m, n, e - d)].rep_chain(self.k, u), d)
    }

    /// Coordinates of a chain map `M_m[d] → M_n[e]` between canonical models.
    fn coordinates(&self, m: usize, d: i32, n: usize, e: i32, c: &Chain) -> Vec<u32> {
        match e - d {
            off @ 0..=1 => self.homs[&(m, n, off)].coordinates(&shift_chain(c, -d)),
            _ => Vec::new(),
        }
    }

    pub(crate) fn structure_constants(&self, a: &IndecLabel, b: &IndecLabel, c: &IndecLabel) -> Vec<u32> {
        let k = self.k;
        let (m, d) = self.module_index(a);
        let (n, e) = self.module_index(b);
        let (l, f) = self.module_index(c);
        let (x, y, z) = (self.model(m, d), self.model(n, e), self.model(l, f));
        let dab = self.homs[&(m, n, e - d)].dim();
        let dbc = self.homs[&(n, l, f - e)].dim();
        let dac = self.homs[&(m, l, f - d)].dim();
        let mut t = vec![0u32; dbc * dab * dac];
        for u in 0..dbc {
            let g = self.basis_chain(n, e, l, f, u);
            for v in 0..dab {
                let fch = self.basis_chain(m, d, n, e, v);
                let comp = chain_compose(k, &g, &fch, &x, &y, &z);
                let co = self.coordinates(m, d, l, f, &comp);
                let base = (u * dab + v) * dac;
                t[base..base + dac].copy_from_slice(&co);
            }
        }
        t
    }

    /// Direct-sum complex of the canonical models of the summands of `x`,
    /// with the positions of each summand in each degree.
    fn assemble(&self, be: &Backend, x: &Obj) -> (Cx, Vec<BTreeMap<i32, Vec<usize>>>) {
        let k = self.k;
        let models: Vec<Cx> = x
            .0
            .iter()
            .map(|&a| {
                let (m, d) = self.module_index(be.label(a));
                self.model(m, d)
            })
            .collect();
        let mut cx = Cx::default();
        let mut pos = Vec::new();
        for md in &models {
            let mut p = BTreeMap::new();
            for (d, v) in &md.terms {
                let t = cx.terms.entry(*d).or_default();
                p.insert(*d, (t.len()..t.len() + v.len()).collect::<Vec<_>>());
                t.extend_from_slice(v);
            }
            pos.push(p);
        }
        for (md, p) in models.iter().zip(&pos) {
            for (d, m) in &md.diffs {
                let rows = cx.term(d + 1).len();
                let cols = cx.term(*d).len();
                let big = cx.diffs.entry(*d).or_insert_with(|| Mat::zeros(k, rows, cols));
                for (i, &r) in p[&(d + 1)].iter().enumerate() {
                    for (j, &c) in p[d].iter().enumerate() {
                        big.set(r, c, m.get(i, j));
                    }
                }
            }
        }
        (cx, pos)
    }

    /// Chain map between assembled complexes realizing `f`.
    fn realize(&self, be: &Backend, f: &Morphism, x: &(Cx, Vec<BTreeMap<i32, Vec<usize>>>), y: &(Cx, Vec<BTreeMap<i32, Vec<usize>>>)) -> Chain {
        let k = self.k;
        let mut out: Chain = BTreeMap::new();
        for d in x.0.degrees() {
            out.insert(d, Mat::zeros(k, y.0.term(d).len(), x.0.term(d).len()));
        }
        for (i, &b) in f.cod.0.iter().enumerate() {
            let (n, e) = self.module_index(be.label(b));
            for (j, &a) in f.dom.0.iter().enumerate() {
                let (m, d) = self.module_index(be.label(a));
                for (u, &c) in be.block(f, i, j).iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let ch = self.basis_chain(m, d, n, e, u);
                    for (deg, mm) in ch {
                        let (Some(rp), Some(cp)) = (y.1[i].get(&deg), x.1[j].get(&deg)) else { continue };
                        let big = out.get_mut(&deg).expect("degree present");
                        for (r, &rr) in rp.iter().enumerate() {
                            for (s, &cc) in cp.iter().enumerate() {
                                let cur = big.get(rr, cc);
                                big.set(rr, cc, k.add(cur, k.mul(c, mm.get(r, s))));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Block of a chain map between assembled complexes, as a chain map
    /// between the canonical models of summand `j` of the source and `i` of
    /// the target.
    fn extract(
        &self,
        c: &Chain,
        src: &(Cx, Vec<BTreeMap<i32, Vec<usize>>>),
        tgt: &(Cx, Vec<BTreeMap<i32, Vec<usize>>>),
        i: usize,
        j: usize,
    ) -> Chain {
        let mut out = BTreeMap::new();
        for (d, cp) in &src.1[j] {
            let Some(rp) = tgt.1[i].get(d) else { continue };
            let Some(big) = c.get(d) else { continue };
            let mut m = Mat::zeros(self.k, rp.len(), cp.len());
            for (r, &rr) in rp.iter().enumerate() {
                for (s, &cc) in cp.iter().enumerate() {
                    m.set(r, s, big.get(rr, cc));
                }
            }
            out.insert(*d, m);
        }
        out
    }

    fn coordinatize(
        &self,
        be: &Backend,
        c: &Chain,
        x: &Obj,
        y: &Obj,
        xs: &(Cx, Vec<BTreeMap<i32, Vec<usize>>>),
        ys: &(Cx, Vec<BTreeMap<i32, Vec<usize>>>),
    ) -> Morphism {
        be.from_blocks(x, y, |i, j| {
            let (m, d) = self.module_index(be.label(x.0[j]));
            let (n, e) = self.module_index(be.label(y.0[i]));
            if !(0..=1).contains(&(e - d)) {
                return None;
            }
            Some(self.coordinates(m, d, n, e, &self.extract(c, xs, ys, i, j)))
        })
    }

    pub(crate) fn cone(&self, be: &Backend, f: &Morphism) -> Result<(Obj, Morphism, Morphism)> {
        let k = self.k;
        let xa = self.assemble(be, &f.dom);
        let ya = self.assemble(be, &f.cod);
        let phi = self.realize(be, f, &xa, &ya);
        let (x, y) = (&xa.0, &ya.0);
        // Cone^d = X^{d+1} ⊕ Y^d.
        let mut degs: Vec<i32> = x.degrees().iter().map(|d| d - 1).collect();
        degs.extend(y.degrees());
        degs.sort();
        degs.dedup();
        let mut cone = Cx::default();
        for &d in &degs {
            let mut t = x.term(d + 1).to_vec();
            t.extend_from_slice(y.term(d));
            cone.terms.insert(d, t);
        }
        for &d in &degs {
            let (x1, y0) = (x.term(d + 1).len(), y.term(d).len());
            let (x2, y1) = (x.term(d + 2).len(), y.term(d + 1).len());
            let mut m = Mat::zeros(k, x2 + y1, x1 + y0);
            m.set_block(0, 0, &x.diff(k, d + 1).neg());
            m.set_block(x2, 0, &chain_comp(k, &phi, x, y, d + 1));
            m.set_block(x2, x1, &y.diff(k, d));
            cone.diffs.insert(d, m);
        }
        debug_assert!(cone.is_chain_complex(k));
        let mut g_chain: Chain = BTreeMap::new();
        for d in y.degrees() {
            let x1 = x.term(d + 1).len();
            let mut m = Mat::zeros(k, cone.term(d).len(), y.term(d).len());
            for i in 0..y.term(d).len() {
                m.set(x1 + i, i, 1);
            }
            g_chain.insert(d, m);
        }
        let x_shift = x.shifted(1);
        let mut h_chain: Chain = BTreeMap::new();
        for d in x_shift.degrees() {
            let n = x_shift.term(d).len();
            let mut m = Mat::zeros(k, n, cone.term(d).len());
            for i in 0..n {
                m.set(i, i, 1);
            }
            h_chain.insert(d, m);
        }
        let (minimal, incl, proj) = minimize(&self.q, k, &cone);
        let (c_obj, u, v) = self.split_minimal(be, &minimal)?;
        let ca = self.assemble(be, &c_obj);
        debug_assert_eq!(ca.0.terms.iter().filter(|(_, t)| !t.is_empty()).count(), minimal.degrees().len());
        let g_min = chain_compose(k, &proj, &g_chain, y, &cone, &minimal);
        let g_can = chain_compose(k, &v, &g_min, y, &minimal, &ca.0);
        let u_big = chain_compose(k, &incl, &u, &ca.0, &minimal, &cone);
        let h_can = chain_compose(k, &h_chain, &u_big, &ca.0, &cone, &x_shift);
        let x1_obj = be.shift_obj(&f.dom, 1)?;
        let x1a = self.assemble(be, &x1_obj);
        debug_assert_eq!(x1a.0.terms, x_shift.terms);
        let g = self.coordinatize(be, &g_can, &f.cod, &c_obj, &ya, &ca);
        let h = self.coordinatize(be, &h_can, &c_obj, &x1_obj, &ca, &x1a);
        Ok((c_obj, g, h))
    }

    /// Isomorphism between a minimal complex and the sum of the canonical
    /// models of its shifted homology: returns the object, `u: ⊕E → X` and
    /// its inverse.
    fn split_minimal(&self, be: &Backend, x: &Cx) -> Result<(Obj, Chain, Chain)> {
        let (q, k) = (&self.q, self.k);
        struct Piece {
            label: usize,
            psi0: Mat,
            psi1: Option<Mat>,
            deg: i32,
        }
        let mut pieces = Vec::new();
        for deg in x.degrees() {
            let vk = x.term(deg);
            let dk = projective_map(q, k, vk, x.term(deg + 1), &x.diff(k, deg));
            let z = kernel(q, k, &dk);
            let dprev = projective_map(q, k, x.term(deg - 1), vk, &x.diff(k, deg - 1));
            let bsp = image_spaces(&dprev);
            let b_in_z: Vec<Subspace> = (0..q.n())
                .map(|v| {
                    let vecs = bsp[v]
                        .basis()
                        .iter()
                        .map(|b| z.maps[v].solve(b).expect("boundaries are cycles"))
                        .collect();
                    Subspace::span(k, z.source.dims[v], vecs)
                })
                .collect();
            let (hproj, sections) = quotient(q, k, &z.source, &b_in_z);
            let h = &hproj.target;
            if h.is_zero() {
                continue;
            }
            let label_deg = -deg;
            if label_deg.abs() > self.w {
                return Err(Error::WindowExceeded { degree: label_deg, window: self.w });
            }
            for part in self.catalog.decompose(h).parts {
                let m = self.catalog.index_of(&part.label).expect("catalog");
                let pres = &self.pres[m];
                let mut psi0 = Mat::zeros(k, vk.len(), pres.p0.len());
                for (s, &vs) in pres.p0.iter().enumerate() {
                    let present: Vec<usize> = (0..pres.p0.len()).filter(|&t| q.reaches(pres.p0[t], vs)).collect();
                    let pos = present.iter().position(|&t| t == s).unwrap();
                    let mut e = vec![0u32; present.len()];
                    e[pos] = 1;
                    let mv = pres.augmentation.maps[vs].apply(&e);
                    let hv = part.incl.maps[vs].apply(&mv);
                    let zv = sections[vs].apply(&hv);
                    let xv = z.maps[vs].apply(&zv);
                    let rows: Vec<usize> = (0..vk.len()).filter(|&t| q.reaches(vk[t], vs)).collect();
                    for (r, &t) in rows.iter().enumerate() {
                        psi0.set(t, s, xv[r]);
                    }
                }
                let psi1 = if pres.p1.is_empty() {
                    None
                } else {
                    let mut target = psi0.mul(&pres.delta);
                    if deg.rem_euclid(2) == 1 {
                        target = target.neg();
                    }
                    let vprev = x.term(deg - 1);
                    let mut psi1 = Mat::zeros(k, vprev.len(), pres.p1.len());
                    for (t, &wt) in pres.p1.iter().enumerate() {
                        let rows_k: Vec<usize> = (0..vk.len()).filter(|&r| q.reaches(vk[r], wt)).collect();
                        let yv: Vec<u32> = rows_k.iter().map(|&r| target.get(r, t)).collect();
                        let xv = dprev.maps[wt]
                            .solve(&yv)
                            .ok_or_else(|| Error::Invariant("homology lift failed".into()))?;
                        let rows_p: Vec<usize> = (0..vprev.len()).filter(|&r| q.reaches(vprev[r], wt)).collect();
                        for (r, &rr) in rows_p.iter().enumerate() {
                            psi1.set(rr, t, xv[r]);
                        }
                    }
                    Some(psi1)
                };
                let label = be
                    .find(&IndecLabel::Shifted { module: part.label.clone(), degree: label_deg })
                    .expect("label in window");
                pieces.push(Piece { label, psi0, psi1, deg });
            }
        }
        pieces.sort_by_key(|p| p.label);
        let c_obj = Obj(pieces.iter().map(|p| p.label).collect());
        let (ca, pos) = self.assemble(be, &c_obj);
        let mut u: Chain = BTreeMap::new();
        for d in x.degrees() {
            u.insert(d, Mat::zeros(k, x.term(d).len(), ca.term(d).len()));
        }
        for (j, p) in pieces.iter().enumerate() {
            let m0 = u.get_mut(&p.deg).expect("degree");
            for (c, &cc) in pos[j][&p.deg].iter().enumerate() {
                for r in 0..p.psi0.rows {
                    m0.set(r, cc, p.psi0.get(r, c));
                }
            }
            if let Some(psi1) = &p.psi1 {
                let m1 = u.get_mut(&(p.deg - 1)).expect("degree");
                for (c, &cc) in pos[j][&(p.deg - 1)].iter().enumerate() {
                    for r in 0..psi1.rows {
                        m1.set(r, cc, psi1.get(r, c));
                    }
                }
            }
        }
        let mut v: Chain = BTreeMap::new();
        for (d, m) in &u {
            let inv = m
                .inverse()
                .ok_or_else(|| Error::Invariant("homology splitting is not an isomorphism".into()))?;
            v.insert(*d, inv);
        }
        Ok((c_obj, u, v))
    }

    fn h0_basis_map(&self, m: usize, n: usize, u: usize) -> ModuleMap {
        let (q, k) = (&self.q, self.k);
        let hd = &self.homs[&(m, n, 0)];
        let ch = hd.rep_chain(k, u);
        let (pm, pn) = (&self.pres[m], &self.pres[n]);
        let phi0 = ch.get(&0).cloned().unwrap_or_else(|| Mat::zeros(k, pn.p0.len(), pm.p0.len()));
        let phi = projective_map(q, k, &pm.p0, &pn.p0, &phi0);
        let top = pn.augmentation.compose(&phi).expect("composable");
        let maps = (0..q.n())
            .map(|v| {
                let pi = &pm.augmentation.maps[v];
                // Right inverse of the surjection π_v.
                let mut r = Mat::zeros(k, pi.cols, pi.rows);
                for i in 0..pi.rows {
                    let mut e = vec![0u32; pi.rows];
                    e[i] = 1;
                    let x = pi.solve(&e).expect("augmentation is onto");
                    for (j, val) in x.into_iter().enumerate() {
                        r.set(j, i, val);
                    }
                }
                top.maps[v].mul(&r)
            })
            .collect();
        ModuleMap {
            source: self.catalog.indecs[m].clone(),
            target: self.catalog.indecs[n].clone(),
            maps,
        }
    }

    /// `H^0` of an object: the sum of its degree-0 summands, as a module.
    pub fn h0_rep(&self, be: &Backend, x: &Obj) -> (Rep, Vec<usize>) {
        let mut rep = Rep::zero(&self.q, self.k);
        let mut idx = Vec::new();
        for (j, &a) in x.0.iter().enumerate() {
            let (m, d) = self.module_index(be.label(a));
            if d == 0 {
                rep = rep.direct_sum(&self.catalog.indecs[m]);
                idx.push(j);
            }
        }
        (rep, idx)
    }

    /// `H^0(f)` as a map of modules.
    pub fn h0_map(&self, be: &Backend, f: &Morphism) -> ModuleMap {
        let k = self.k;
        let (src, js) = self.h0_rep(be, &f.dom);
        let (tgt, is) = self.h0_rep(be, &f.cod);
        let mut maps: Vec<Mat> = (0..self.q.n()).map(|v| Mat::zeros(k, tgt.dims[v], src.dims[v])).collect();
        let mut row_off = vec![0usize; self.q.n()];
        for &i in &is {
            let (n, _) = self.module_index(be.label(f.cod.0[i]));
            let mut col_off = vec![0usize; self.q.n()];
            for &j in &js {
                let (m, _) = self.module_index(be.label(f.dom.0[j]));
                let coords = be.block(f, i, j);
                for (u, &c) in coords.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let bm = &self.h0[&(m, n)][u];
                    for v in 0..self.q.n() {
                        for r in 0..bm.maps[v].rows {
                            for s in 0..bm.maps[v].cols {
                                let (rr, ss) = (row_off[v] + r, col_off[v] + s);
                                let cur = maps[v].get(rr, ss);
                                maps[v].set(rr, ss, k.add(cur, k.mul(c, bm.maps[v].get(r, s))));
                            }
                        }
                    }
                }
                for v in 0..self.q.n() {
                    col_off[v] += self.catalog.indecs[m].dims[v];
                }
            }
            for v in 0..self.q.n() {
                row_off[v] += self.catalog.indecs[n].dims[v];
            }
        }
        ModuleMap { source: src, target: tgt, maps }
    }
}

/// Removes contractible summands `P_v → P_v` by Gaussian elimination.
/// Returns the minimal complex with an inclusion into and a projection from
/// the original, mutually inverse up to homotopy.
fn minimize(q: &Quiver, k: PrimeField, c: &Cx) -> (Cx, Chain, Chain) {
    let ident = |x: &Cx| -> Chain { x.terms.iter().map(|(d, v)| (*d, Mat::identity(k, v.len()))).collect() };
    let mut cur = c.clone();
    let mut incl = ident(c);
    let mut proj = ident(c);
    loop {
        let mut found = None;
        'search: for d in cur.degrees() {
            let m = cur.diff(k, d);
            let (src, tgt) = (cur.term(d), cur.term(d + 1));
            for s in 0..src.len() {
                for t in 0..tgt.len() {
                    if src[s] == tgt[t] && m.get(t, s) != 0 {
                        found = Some((d, s, t));
                        break 'search;
                    }
                }
            }
        }
        let Some((d, s, t)) = found else { break };
        let (next, i_step, p_step) = eliminate(k, &cur, d, s, t);
        incl = chain_compose(k, &incl, &i_step, &next, &cur, c);
        proj = chain_compose(k, &p_step, &proj, c, &cur, &next);
        cur = next;
    }
    let _ = q;
    (cur, incl, proj)
}

fn drop_index(v: &[usize], i: usize) -> Vec<usize> {
    v.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| *x).collect()
}

fn eliminate(k: PrimeField, x: &Cx, d: i32, s: usize, t: usize) -> (Cx, Chain, Chain) {
    let dk = x.diff(k, d);
    let c_inv = k.inv(dk.get(t, s));
    let (nk, nk1) = (x.term(d).len(), x.term(d + 1).len());
    let keep_s: Vec<usize> = (0..nk).filter(|&j| j != s).collect();
    let keep_t: Vec<usize> = (0..nk1).filter(|&i| i != t).collect();
    let mut y = x.clone();
    y.terms.insert(d, drop_index(x.term(d), s));
    y.terms.insert(d + 1, drop_index(x.term(d + 1), t));
    let pick = |m: &Mat, rows: &[usize], cols: &[usize]| {
        let mut o = Mat::zeros(k, rows.len(), cols.len());
        for (a, &r) in rows.iter().enumerate() {
            for (b, &cc) in cols.iter().enumerate() {
                o.set(a, b, m.get(r, cc));
            }
        }
        o
    };
    let all = |n: usize| (0..n).collect::<Vec<_>>();
    // New differentials.
    let dprev = x.diff(k, d - 1);
    y.diffs.insert(d - 1, pick(&dprev, &keep_s, &all(dprev.cols)));
    let beta = pick(&dk, &[t], &keep_s);
    let gamma = pick(&dk, &keep_t, &[s]);
    let delta = pick(&dk, &keep_t, &keep_s);
    let corr = gamma.mul(&beta).scale(c_inv);
    y.diffs.insert(d, delta.sub(&corr));
    let dnext = x.diff(k, d + 1);
    y.diffs.insert(d + 1, pick(&dnext, &all(dnext.rows), &keep_t));
    // Inclusion i: Y → X.
    let mut i_chain: Chain = BTreeMap::new();
    let mut p_chain: Chain = BTreeMap::new();
    let mut degs = x.degrees();
    degs.extend([d, d + 1]);
    degs.sort();
    degs.dedup();
    for e in degs {
        let (nx, ny) = (x.term(e).len(), y.term(e).len());
        if e == d {
            let mut i = Mat::zeros(k, nx, ny);
            for (b, &j) in keep_s.iter().enumerate() {
                i.set(j, b, 1);
                i.set(s, b, k.neg(k.mul(c_inv, beta.get(0, b))));
            }
            let mut p = Mat::zeros(k, ny, nx);
            for (b, &j) in keep_s.iter().enumerate() {
                p.set(b, j, 1);
            }
            i_chain.insert(e, i);
            p_chain.insert(e, p);
        } else if e == d + 1 {
            let mut i = Mat::zeros(k, nx, ny);
            let mut p = Mat::zeros(k, ny, nx);
            for (a, &r) in keep_t.iter().enumerate() {
                i.set(r, a, 1);
                p.set(a, r, 1);
                p.set(a, t, k.neg(k.mul(gamma.get(a, 0), c_inv)));
            }
            i_chain.insert(e, i);
            p_chain.insert(e, p);
        } else {
            i_chain.insert(e, Mat::identity(k, nx));
            p_chain.insert(e, Mat::identity(k, nx));
        }
    }
    (y, i_chain, p_chain)
}
