//! Representations of Dynkin quivers over `F_p`.
//!
//! Vertices are numbered from 0 internally and printed from 1. Projective
//! modules are handled through the path category: because a Dynkin quiver is
//! a tree, there is at most one path between two vertices, so a morphism
//! `⊕ P_v → ⊕ P_w` is just a scalar matrix whose `(t, s)` entry may be nonzero
//! only when a path `w_t ⇝ v_s` exists.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat, PrimeField, Subspace};

/// Dynkin type of a quiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dynkin {
    A(usize),
    D(usize),
    E(usize),
}

impl Dynkin {
    pub fn rank(self) -> usize {
        match self {
            Dynkin::A(n) | Dynkin::D(n) | Dynkin::E(n) => n,
        }
    }

    /// Number of positive roots, i.e. of indecomposable representations.
    pub fn positive_roots(self) -> usize {
        match self {
            Dynkin::A(n) => n * (n + 1) / 2,
            Dynkin::D(n) => n * (n - 1),
            Dynkin::E(6) => 36,
            Dynkin::E(7) => 63,
            Dynkin::E(8) => 120,
            Dynkin::E(_) => unreachable!("validated at construction"),
        }
    }
}

impl fmt::Display for Dynkin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dynkin::A(n) => write!(f, "A{n}"),
            Dynkin::D(n) => write!(f, "D{n}"),
            Dynkin::E(n) => write!(f, "E{n}"),
        }
    }
}

/// An oriented Dynkin diagram.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quiver {
    kind: Dynkin,
    arrows: Vec<(usize, usize)>,
    reach: Vec<Vec<bool>>,
    paths: Vec<Vec<Option<Vec<usize>>>>,
}

impl Quiver {
    /// Default orientation: a chain `1 → 2 → … → n-1` (`→ n` for `A_n`),
    /// with the extra arrow `n-2 → n` for `D_n` and `3 → n` for `E_n`.
    pub fn dynkin(kind: Dynkin) -> Result<Self> {
        let arrows = match kind {
            Dynkin::A(n) if n >= 1 => (0..n - 1).map(|i| (i, i + 1)).collect(),
            Dynkin::D(n) if n >= 4 => {
                let mut a: Vec<_> = (0..n - 2).map(|i| (i, i + 1)).collect();
                a.push((n - 3, n - 1));
                a
            }
            Dynkin::E(n) if (6..=8).contains(&n) => {
                let mut a: Vec<_> = (0..n - 2).map(|i| (i, i + 1)).collect();
                a.push((2, n - 1));
                a
            }
            _ => return Err(Error::Domain(format!("no Dynkin diagram {kind}"))),
        };
        Quiver::with_arrows(kind, arrows)
    }

    /// A quiver with explicit arrows; the underlying graph must be the
    /// Dynkin diagram `kind`.
    pub fn with_arrows(kind: Dynkin, arrows: Vec<(usize, usize)>) -> Result<Self> {
        let n = kind.rank();
        validate_shape(kind, n, &arrows)?;
        let mut paths = vec![vec![None; n]; n];
        for (u, row) in paths.iter_mut().enumerate() {
            row[u] = Some(Vec::new());
            let mut stack = vec![u];
            while let Some(x) = stack.pop() {
                for (ai, &(s, t)) in arrows.iter().enumerate() {
                    if s == x && row[t].is_none() {
                        let mut pth: Vec<usize> = row[x].clone().unwrap();
                        pth.push(ai);
                        row[t] = Some(pth);
                        stack.push(t);
                    }
                }
            }
        }
        let reach = paths.iter().map(|r| r.iter().map(Option::is_some).collect()).collect();
        Ok(Quiver { kind, arrows, reach, paths })
    }

    pub fn kind(&self) -> Dynkin {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.kind.rank()
    }

    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }

    /// Whether a directed path `u ⇝ v` exists (trivial paths included).
    pub fn reaches(&self, u: usize, v: usize) -> bool {
        self.reach[u][v]
    }

    /// Arrow indices along the unique path `u ⇝ v`.
    pub fn path(&self, u: usize, v: usize) -> Option<&[usize]> {
        self.paths[u][v].as_deref()
    }

    pub fn opposite(&self) -> Quiver {
        let arrows = self.arrows.iter().map(|&(s, t)| (t, s)).collect();
        Quiver::with_arrows(self.kind, arrows).expect("opposite of a Dynkin quiver")
    }
}

fn validate_shape(kind: Dynkin, n: usize, arrows: &[(usize, usize)]) -> Result<()> {
    let bad = |m: &str| Err(Error::Domain(format!("arrows do not form {kind}: {m}")));
    if arrows.len() + 1 != n || arrows.iter().any(|&(s, t)| s >= n || t >= n || s == t) {
        return bad("wrong arrow count or endpoints");
    }
    let mut adj = vec![Vec::new(); n];
    for &(s, t) in arrows {
        adj[s].push(t);
        adj[t].push(s);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return bad("not connected");
    }
    let branch: Vec<usize> = (0..n).filter(|&v| adj[v].len() >= 3).collect();
    if adj.iter().any(|a| a.len() > 3) || branch.len() > 1 {
        return bad("degree");
    }
    let mut legs = Vec::new();
    if let Some(&b) = branch.first() {
        for &start in &adj[b] {
            let (mut prev, mut cur, mut len) = (b, start, 1);
            while let Some(&next) = adj[cur].iter().find(|&&y| y != prev) {
                prev = cur;
                cur = next;
                len += 1;
            }
            legs.push(len);
        }
        legs.sort();
    }
    let ok = match kind {
        Dynkin::A(_) => branch.is_empty(),
        Dynkin::D(m) => legs == vec![1, 1, m - 3] || (m == 4 && legs == vec![1, 1, 1]),
        Dynkin::E(m) => legs == vec![1, 2, m - 4],
    };
    if ok {
        Ok(())
    } else {
        bad("branch lengths")
    }
}

/// A finite-dimensional representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rep {
    pub dims: Vec<usize>,
    /// One matrix per arrow `s → t`, of shape `dims[t] × dims[s]`.
    pub maps: Vec<Mat>,
}

impl Rep {
    pub fn new(q: &Quiver, dims: Vec<usize>, maps: Vec<Mat>) -> Result<Self> {
        if dims.len() != q.n() || maps.len() != q.arrows().len() {
            return Err(Error::Dimension("representation shape".into()));
        }
        for (m, &(s, t)) in maps.iter().zip(q.arrows()) {
            if m.rows != dims[t] || m.cols != dims[s] {
                return Err(Error::Dimension(format!("arrow {}→{} map shape", s + 1, t + 1)));
            }
        }
        Ok(Rep { dims, maps })
    }

    pub fn zero(q: &Quiver, k: PrimeField) -> Self {
        let dims = vec![0; q.n()];
        let maps = q.arrows().iter().map(|_| Mat::zeros(k, 0, 0)).collect();
        Rep { dims, maps }
    }

    pub fn simple(q: &Quiver, k: PrimeField, v: usize) -> Self {
        let mut dims = vec![0; q.n()];
        dims[v] = 1;
        let maps = q.arrows().iter().map(|&(s, t)| Mat::zeros(k, dims[t], dims[s])).collect();
        Rep { dims, maps }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    /// Linear map along the unique path `u ⇝ v`.
    pub fn path_map(&self, q: &Quiver, k: PrimeField, u: usize, v: usize) -> Mat {
        let mut m = Mat::identity(k, self.dims[u]);
        for &a in q.path(u, v).expect("path exists") {
            m = self.maps[a].mul(&m);
        }
        m
    }

    pub fn direct_sum(&self, other: &Rep) -> Rep {
        let dims = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let maps = self
            .maps
            .iter()
            .zip(&other.maps)
            .map(|(a, b)| {
                let mut m = Mat::zeros(a.k, a.rows + b.rows, a.cols + b.cols);
                m.set_block(0, 0, a);
                m.set_block(a.rows, a.cols, b);
                m
            })
            .collect();
        Rep { dims, maps }
    }

    /// Vector-space dual, a representation of the opposite quiver.
    pub fn dual(&self) -> Rep {
        Rep { dims: self.dims.clone(), maps: self.maps.iter().map(Mat::transpose).collect() }
    }
}

/// A homomorphism of representations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModuleMap {
    pub source: Rep,
    pub target: Rep,
    /// One matrix per vertex, of shape `target.dims[v] × source.dims[v]`.
    pub maps: Vec<Mat>,
}

impl ModuleMap {
    pub fn new(q: &Quiver, source: Rep, target: Rep, maps: Vec<Mat>) -> Result<Self> {
        let f = ModuleMap { source, target, maps };
        if !f.commutes(q) {
            return Err(Error::Domain("vertex maps do not commute with arrows".into()));
        }
        Ok(f)
    }

    pub fn commutes(&self, q: &Quiver) -> bool {
        q.arrows().iter().enumerate().all(|(a, &(s, t))| {
            self.target.maps[a].mul(&self.maps[s]) == self.maps[t].mul(&self.source.maps[a])
        })
    }

    pub fn identity(k: PrimeField, m: &Rep) -> Self {
        let maps = m.dims.iter().map(|&d| Mat::identity(k, d)).collect();
        ModuleMap { source: m.clone(), target: m.clone(), maps }
    }

    pub fn zero(k: PrimeField, source: &Rep, target: &Rep) -> Self {
        let maps =
            source.dims.iter().zip(&target.dims).map(|(&s, &t)| Mat::zeros(k, t, s)).collect();
        ModuleMap { source: source.clone(), target: target.clone(), maps }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ModuleMap) -> Result<ModuleMap> {
        if other.target.dims != self.source.dims {
            return Err(Error::Composition("module maps not composable".into()));
        }
        let maps = self.maps.iter().zip(&other.maps).map(|(a, b)| a.mul(b)).collect();
        Ok(ModuleMap { source: other.source.clone(), target: self.target.clone(), maps })
    }

    pub fn add(&self, other: &ModuleMap) -> ModuleMap {
        let maps = self.maps.iter().zip(&other.maps).map(|(a, b)| a.add(b)).collect();
        ModuleMap { source: self.source.clone(), target: self.target.clone(), maps }
    }

    pub fn scale(&self, c: u32) -> ModuleMap {
        let maps = self.maps.iter().map(|a| a.scale(c)).collect();
        ModuleMap { source: self.source.clone(), target: self.target.clone(), maps }
    }

    pub fn is_zero(&self) -> bool {
        self.maps.iter().all(Mat::is_zero)
    }

    pub fn is_iso(&self) -> bool {
        self.maps.iter().all(|m| m.rows == m.cols && m.inverse().is_some())
    }

    /// Flattened coordinates (vertex by vertex, row-major).
    pub fn to_vector(&self) -> Vec<u32> {
        self.maps.iter().flat_map(|m| m.data().to_vec()).collect()
    }

    pub fn rank(&self) -> usize {
        self.maps.iter().map(Mat::rank).sum()
    }
}

/// Basis of `Hom(M, N)` from the linear commutation constraints.
pub fn rep_hom_basis(q: &Quiver, k: PrimeField, m: &Rep, n: &Rep) -> Vec<ModuleMap> {
    let offsets: Vec<usize> = m
        .dims
        .iter()
        .zip(&n.dims)
        .scan(0, |acc, (a, b)| {
            let o = *acc;
            *acc += a * b;
            Some(o)
        })
        .collect();
    let unknowns: usize = m.dims.iter().zip(&n.dims).map(|(a, b)| a * b).sum();
    let var = |v: usize, i: usize, j: usize| offsets[v] + i * m.dims[v] + j;
    let mut rows = Vec::new();
    for (a, &(s, t)) in q.arrows().iter().enumerate() {
        // N_a φ_s − φ_t M_a = 0, entry (i, j) with i < n_t, j < m_s.
        for i in 0..n.dims[t] {
            for j in 0..m.dims[s] {
                let mut row = vec![0u32; unknowns];
                for l in 0..n.dims[s] {
                    let c = n.maps[a].get(i, l);
                    if c != 0 {
                        let x = var(s, l, j);
                        row[x] = k.add(row[x], c);
                    }
                }
                for l in 0..m.dims[t] {
                    let c = m.maps[a].get(l, j);
                    if c != 0 {
                        let x = var(t, i, l);
                        row[x] = k.sub(row[x], c);
                    }
                }
                rows.push(row);
            }
        }
    }
    let basis = if rows.is_empty() {
        Subspace::full(k, unknowns)
    } else {
        Mat::from_rows(k, &rows).kernel_basis()
    };
    basis
        .basis()
        .iter()
        .map(|v| {
            let maps = (0..q.n())
                .map(|x| {
                    let d = &v[offsets[x]..offsets[x] + m.dims[x] * n.dims[x]];
                    Mat::from_data(k, n.dims[x], m.dims[x], d.to_vec())
                })
                .collect();
            ModuleMap { source: m.clone(), target: n.clone(), maps }
        })
        .collect()
}

/// The representation `⊕_s P_{v_s}`. At vertex `j` its basis is the list of
/// summands `s` with a path `v_s ⇝ j`, in order.
pub fn projective_rep(q: &Quiver, k: PrimeField, vertices: &[usize]) -> Rep {
    let present = |j: usize| -> Vec<usize> {
        (0..vertices.len()).filter(|&s| q.reaches(vertices[s], j)).collect()
    };
    path_rep(q, k, present)
}

/// The representation `⊕_s I_{v_s}`. At vertex `j` its basis is the list of
/// summands `s` with a path `j ⇝ v_s`, in order.
pub fn injective_rep(q: &Quiver, k: PrimeField, vertices: &[usize]) -> Rep {
    let present = |j: usize| -> Vec<usize> {
        (0..vertices.len()).filter(|&s| q.reaches(j, vertices[s])).collect()
    };
    path_rep(q, k, present)
}

fn path_rep(q: &Quiver, k: PrimeField, present: impl Fn(usize) -> Vec<usize>) -> Rep {
    let idx: Vec<Vec<usize>> = (0..q.n()).map(&present).collect();
    let dims = idx.iter().map(Vec::len).collect();
    let maps = q
        .arrows()
        .iter()
        .map(|&(s, t)| {
            let mut m = Mat::zeros(k, idx[t].len(), idx[s].len());
            for (c, x) in idx[s].iter().enumerate() {
                if let Some(r) = idx[t].iter().position(|y| y == x) {
                    m.set(r, c, 1);
                }
            }
            m
        })
        .collect();
    Rep { dims, maps }
}

/// Module map `⊕ P_{src} → ⊕ P_{tgt}` given by a path-coefficient matrix
/// (`tgt.len() × src.len()`).
pub fn projective_map(q: &Quiver, k: PrimeField, src: &[usize], tgt: &[usize], a: &Mat) -> ModuleMap {
    let s_rep = projective_rep(q, k, src);
    let t_rep = projective_rep(q, k, tgt);
    let maps = (0..q.n())
        .map(|j| {
            let cols: Vec<usize> = (0..src.len()).filter(|&s| q.reaches(src[s], j)).collect();
            let rows: Vec<usize> = (0..tgt.len()).filter(|&t| q.reaches(tgt[t], j)).collect();
            let mut m = Mat::zeros(k, rows.len(), cols.len());
            for (r, &t) in rows.iter().enumerate() {
                for (c, &s) in cols.iter().enumerate() {
                    m.set(r, c, a.get(t, s));
                }
            }
            m
        })
        .collect();
    ModuleMap { source: s_rep, target: t_rep, maps }
}

/// Module map `⊕ I_{src} → ⊕ I_{tgt}` obtained by applying the Nakayama
/// functor to the projective map with coefficient matrix `a`.
pub fn injective_map(q: &Quiver, k: PrimeField, src: &[usize], tgt: &[usize], a: &Mat) -> ModuleMap {
    let s_rep = injective_rep(q, k, src);
    let t_rep = injective_rep(q, k, tgt);
    let maps = (0..q.n())
        .map(|j| {
            let cols: Vec<usize> = (0..src.len()).filter(|&s| q.reaches(j, src[s])).collect();
            let rows: Vec<usize> = (0..tgt.len()).filter(|&t| q.reaches(j, tgt[t])).collect();
            let mut m = Mat::zeros(k, rows.len(), cols.len());
            for (r, &t) in rows.iter().enumerate() {
                for (c, &s) in cols.iter().enumerate() {
                    m.set(r, c, a.get(t, s));
                }
            }
            m
        })
        .collect();
    ModuleMap { source: s_rep, target: t_rep, maps }
}

/// Subrepresentation spanned vertexwise by the given subspaces, which must be
/// closed under the arrows. Returns the subrepresentation and its inclusion.
pub fn subrep(q: &Quiver, k: PrimeField, m: &Rep, spaces: &[Subspace]) -> Result<ModuleMap> {
    let bases: Vec<Mat> =
        spaces.iter().zip(&m.dims).map(|(s, &d)| Mat::from_cols(k, d, s.basis())).collect();
    let dims: Vec<usize> = spaces.iter().map(Subspace::dim).collect();
    let mut maps = Vec::new();
    for (a, &(s, t)) in q.arrows().iter().enumerate() {
        let img = m.maps[a].mul(&bases[s]);
        let mut x = Mat::zeros(k, dims[t], dims[s]);
        for c in 0..dims[s] {
            let col = bases[t]
                .solve(&img.col(c))
                .ok_or_else(|| Error::Invariant("subspaces not closed under arrows".into()))?;
            for (r, v) in col.into_iter().enumerate() {
                x.set(r, c, v);
            }
        }
        maps.push(x);
    }
    let sub = Rep { dims, maps };
    Ok(ModuleMap { source: sub, target: m.clone(), maps: bases })
}

/// Quotient `M / U` for a subrepresentation given by vertexwise subspaces.
/// Returns the projection `M → M/U` and a vertexwise linear section.
pub fn quotient(q: &Quiver, k: PrimeField, m: &Rep, spaces: &[Subspace]) -> (ModuleMap, Vec<Mat>) {
    let mut sections = Vec::new();
    let mut projs = Vec::new();
    for (v, s) in spaces.iter().enumerate() {
        let units = s.complement_units();
        let d = m.dims[v];
        let mut sec = Mat::zeros(k, d, units.len());
        for (c, &u) in units.iter().enumerate() {
            sec.set(u, c, 1);
        }
        // Basis of M_v: the subspace basis followed by the complement units.
        let mut cols: Vec<Vec<u32>> = s.basis().to_vec();
        cols.extend((0..units.len()).map(|c| sec.col(c)));
        let change = Mat::from_cols(k, d, &cols).inverse().expect("complement basis");
        projs.push(change.block(s.dim(), d, 0, d));
        sections.push(sec);
    }
    let dims: Vec<usize> = projs.iter().map(|p| p.rows).collect();
    let maps = q
        .arrows()
        .iter()
        .enumerate()
        .map(|(a, &(s, t))| projs[t].mul(&m.maps[a]).mul(&sections[s]))
        .collect();
    let quo = Rep { dims, maps };
    (ModuleMap { source: m.clone(), target: quo, maps: projs }, sections)
}

/// Kernel of a module map, as a subrepresentation with its inclusion.
pub fn kernel(q: &Quiver, k: PrimeField, f: &ModuleMap) -> ModuleMap {
    let spaces: Vec<Subspace> = f.maps.iter().map(Mat::kernel_basis).collect();
    subrep(q, k, &f.source, &spaces).expect("kernels are subrepresentations")
}

/// Image of a module map as vertexwise subspaces of the target.
pub fn image_spaces(f: &ModuleMap) -> Vec<Subspace> {
    f.maps.iter().map(Mat::image).collect()
}

/// Radical `Σ im(arrows)` of a representation, vertexwise.
pub fn radical_spaces(q: &Quiver, k: PrimeField, m: &Rep) -> Vec<Subspace> {
    (0..q.n())
        .map(|v| {
            let mut vecs = Vec::new();
            for (a, &(_, t)) in q.arrows().iter().enumerate() {
                if t == v {
                    let mm = &m.maps[a];
                    vecs.extend((0..mm.cols).map(|c| mm.col(c)));
                }
            }
            Subspace::span(k, m.dims[v], vecs)
        })
        .collect()
}

/// Projective cover `⊕ P_v → M` given by generators: returns the vertex list
/// and the list of generator vectors (one per summand, living in `M_v`).
fn top_generators(q: &Quiver, k: PrimeField, m: &Rep) -> (Vec<usize>, Vec<Vec<u32>>) {
    let rad = radical_spaces(q, k, m);
    let mut verts = Vec::new();
    let mut gens = Vec::new();
    for v in 0..q.n() {
        for u in rad[v].complement_units() {
            let mut g = vec![0; m.dims[v]];
            g[u] = 1;
            verts.push(v);
            gens.push(g);
        }
    }
    (verts, gens)
}

fn cover_map(q: &Quiver, k: PrimeField, m: &Rep, verts: &[usize], gens: &[Vec<u32>]) -> ModuleMap {
    let p = projective_rep(q, k, verts);
    let maps = (0..q.n())
        .map(|j| {
            let cols: Vec<Vec<u32>> = (0..verts.len())
                .filter(|&s| q.reaches(verts[s], j))
                .map(|s| m.path_map(q, k, verts[s], j).apply(&gens[s]))
                .collect();
            Mat::from_cols(k, m.dims[j], &cols)
        })
        .collect();
    ModuleMap { source: p, target: m.clone(), maps }
}

/// Minimal projective presentation `P1 → P0 → M → 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub p0: Vec<usize>,
    pub p1: Vec<usize>,
    /// Path-coefficient matrix of `P1 → P0` (`p0.len() × p1.len()`).
    pub delta: Mat,
    /// The augmentation `P0 → M`.
    pub augmentation: ModuleMap,
}

pub fn projective_presentation(q: &Quiver, k: PrimeField, m: &Rep) -> Presentation {
    let (p0, gens) = top_generators(q, k, m);
    let pi = cover_map(q, k, m, &p0, &gens);
    let ker = kernel(q, k, &pi);
    let (p1, kgens) = top_generators(q, k, &ker.source);
    let mut delta = Mat::zeros(k, p0.len(), p1.len());
    for (t, (&w, g)) in p1.iter().zip(&kgens).enumerate() {
        // Coordinates in (P0)_w, whose basis is the summands reaching w.
        let x = ker.maps[w].apply(g);
        let present: Vec<usize> = (0..p0.len()).filter(|&s| q.reaches(p0[s], w)).collect();
        for (r, &s) in present.iter().enumerate() {
            delta.set(s, t, x[r]);
        }
    }
    Presentation { p0, p1, delta, augmentation: pi }
}

/// `Ext¹(M, N)` as the cokernel of `Hom(P0, N) → Hom(P1, N)`.
#[derive(Debug, Clone)]
pub struct Ext1Space {
    pub presentation: Presentation,
    /// Ambient coordinates of `Hom(P1, N) = ⊕_t N_{w_t}`.
    pub ambient_dim: usize,
    /// Image of the restriction map.
    pub image: Subspace,
    /// Representatives of a basis of the cokernel.
    pub basis: Vec<Vec<u32>>,
}

impl Ext1Space {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn rep_ext1_basis(q: &Quiver, k: PrimeField, m: &Rep, n: &Rep) -> Ext1Space {
    ext1_with_presentation(q, k, projective_presentation(q, k, m), n)
}

/// `Ext¹` computed from any (not necessarily minimal) presentation.
pub fn ext1_with_presentation(q: &Quiver, k: PrimeField, pres: Presentation, n: &Rep) -> Ext1Space {
    let off0: Vec<usize> = offsets(pres.p0.iter().map(|&v| n.dims[v]));
    let off1: Vec<usize> = offsets(pres.p1.iter().map(|&w| n.dims[w]));
    let d0: usize = pres.p0.iter().map(|&v| n.dims[v]).sum();
    let d1: usize = pres.p1.iter().map(|&w| n.dims[w]).sum();
    let mut res = Mat::zeros(k, d1, d0);
    for (t, &w) in pres.p1.iter().enumerate() {
        for (s, &v) in pres.p0.iter().enumerate() {
            let c = pres.delta.get(s, t);
            if c == 0 {
                continue;
            }
            let pm = n.path_map(q, k, v, w).scale(c);
            for i in 0..pm.rows {
                for j in 0..pm.cols {
                    let cur = res.get(off1[t] + i, off0[s] + j);
                    res.set(off1[t] + i, off0[s] + j, k.add(cur, pm.get(i, j)));
                }
            }
        }
    }
    let image = res.image();
    let basis = image
        .complement_units()
        .into_iter()
        .map(|u| {
            let mut e = vec![0; d1];
            e[u] = 1;
            e
        })
        .collect();
    Ext1Space { presentation: pres, ambient_dim: d1, image, basis }
}

fn offsets(sizes: impl Iterator<Item = usize>) -> Vec<usize> {
    sizes
        .scan(0, |acc, d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect()
}

/// Auslander–Reiten translate `τM = ker(ν P1 → ν P0)`.
pub fn rep_tau(q: &Quiver, k: PrimeField, m: &Rep) -> Result<Rep> {
    let pres = projective_presentation(q, k, m);
    let proj_dims: Vec<Vec<usize>> =
        (0..q.n()).map(|v| projective_rep(q, k, &[v]).dims).collect();
    let cat = Catalog::new(q.clone(), k);
    for part in cat.decompose(m).parts {
        if proj_dims.contains(&part.label) {
            return Err(Error::Domain("τ of a module with a projective summand".into()));
        }
    }
    let nu = injective_map(q, k, &pres.p1, &pres.p0, &pres.delta);
    Ok(kernel(q, k, &nu).source)
}

/// Inverse translate, through vector-space duality and the opposite quiver.
pub fn rep_tau_inverse(q: &Quiver, k: PrimeField, m: &Rep) -> Result<Rep> {
    let qo = q.opposite();
    Ok(rep_tau(&qo, k, &m.dual())?.dual())
}

/// Nakayama functor on a projective module.
pub fn rep_nakayama(q: &Quiver, k: PrimeField, p: &Rep) -> Result<Rep> {
    let pres = projective_presentation(q, k, p);
    if !pres.p1.is_empty() {
        return Err(Error::Domain("ν applied to a non-projective module".into()));
    }
    Ok(injective_rep(q, k, &pres.p0))
}

/// One indecomposable summand of a decomposition.
#[derive(Debug, Clone)]
pub struct Part {
    /// Dimension vector of the summand (its canonical label).
    pub label: Vec<usize>,
    /// Canonical indecomposable → M.
    pub incl: ModuleMap,
    /// M → canonical indecomposable.
    pub proj: ModuleMap,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub parts: Vec<Part>,
}

impl Decomposition {
    /// Labels with multiplicities.
    pub fn multiplicities(&self) -> BTreeMap<Vec<usize>, usize> {
        let mut m = BTreeMap::new();
        for p in &self.parts {
            *m.entry(p.label.clone()).or_insert(0) += 1;
        }
        m
    }
}

/// The indecomposables of a Dynkin quiver, with canonical representatives.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub quiver: Quiver,
    pub k: PrimeField,
    pub indecs: Vec<Rep>,
    by_dims: BTreeMap<Vec<usize>, usize>,
}

impl Catalog {
    /// Knits the preprojective component: every indecomposable of a Dynkin
    /// quiver is `τ^{-r} P_v` for some vertex `v` and `r ≥ 0`.
    pub fn new(quiver: Quiver, k: PrimeField) -> Self {
        let q = &quiver;
        let qo = q.opposite();
        let mut indecs: Vec<Rep> = Vec::new();
        let mut by_dims = BTreeMap::new();
        let mut frontier: Vec<Rep> = (0..q.n()).map(|v| projective_rep(q, k, &[v])).collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for m in frontier {
                if by_dims.contains_key(&m.dims) {
                    continue;
                }
                by_dims.insert(m.dims.clone(), indecs.len());
                indecs.push(m.clone());
                // τ^{-1} through the opposite quiver; injectives map to zero.
                let d = m.dual();
                let pres = projective_presentation(&qo, k, &d);
                let nu = injective_map(&qo, k, &pres.p1, &pres.p0, &pres.delta);
                let t = kernel(&qo, k, &nu).source.dual();
                if !t.is_zero() {
                    next.push(t);
                }
            }
            frontier = next;
        }
        Catalog { quiver, k, indecs, by_dims }
    }

    pub fn index_of(&self, dims: &[usize]) -> Option<usize> {
        self.by_dims.get(dims).copied()
    }

    pub fn get(&self, dims: &[usize]) -> Option<&Rep> {
        self.index_of(dims).map(|i| &self.indecs[i])
    }

    /// Splits `M` into indecomposables with an explicit isomorphism.
    pub fn decompose(&self, m: &Rep) -> Decomposition {
        let (q, k) = (&self.quiver, self.k);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut raw = Vec::new();
        split(q, k, &ModuleMap::identity(k, m), &ModuleMap::identity(k, m), &mut rng, &mut raw);
        let mut parts = Vec::new();
        for (incl, proj) in raw {
            let s = &incl.source;
            let can = self.get(&s.dims).expect("indecomposable dimension vector is a root").clone();
            let u = rep_hom_basis(q, k, s, &can).into_iter().next().expect("iso exists");
            let v = rep_hom_basis(q, k, &can, s).into_iter().next().expect("iso exists");
            // v ∘ u is a nonzero scalar on a brick.
            let vu = v.compose(&u).expect("composable");
            let c = vu.maps.iter().find(|mm| mm.rows > 0).map(|mm| mm.get(0, 0)).unwrap();
            let v = v.scale(k.inv(c));
            parts.push(Part {
                label: can.dims.clone(),
                incl: incl.compose(&v).expect("composable"),
                proj: u.compose(&proj).expect("composable"),
            });
        }
        parts.sort_by(|a, b| a.label.cmp(&b.label));
        Decomposition { parts }
    }
}

/// Recursive Fitting splitting. `incl: S → M`, `proj: M → S` with
/// `proj ∘ incl = id_S`.
fn split(
    q: &Quiver,
    k: PrimeField,
    incl: &ModuleMap,
    proj: &ModuleMap,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<(ModuleMap, ModuleMap)>,
) {
    let s = &incl.source;
    if s.is_zero() {
        return;
    }
    let end = rep_hom_basis(q, k, s, s);
    if end.len() == 1 {
        out.push((incl.clone(), proj.clone()));
        return;
    }
    let n = s.total_dim() as u32;
    let power = |phi: &ModuleMap| -> ModuleMap {
        let mut acc = ModuleMap::identity(k, s);
        for _ in 0..n {
            acc = phi.compose(&acc).expect("endomorphism");
        }
        acc
    };
    let mut candidates: Vec<ModuleMap> = end.clone();
    for i in 0..end.len() {
        for j in i + 1..end.len() {
            candidates.push(end[i].add(&end[j]));
        }
    }
    let mut tries = 0;
    let fitting = loop {
        let phi = if let Some(c) = candidates.pop() {
            c
        } else {
            tries += 1;
            assert!(tries < 10_000, "non-local endomorphism ring without splitting element");
            end.iter().fold(ModuleMap::zero(k, s, s), |acc, b| acc.add(&b.scale(rng.gen_range(0..k.p()))))
        };
        let psi = power(&phi);
        if !psi.is_zero() && !psi.is_iso() {
            break psi;
        }
    };
    let img = subrep(q, k, s, &image_spaces(&fitting)).expect("image is a subrep");
    let ker = kernel(q, k, &fitting);
    // Basis change M = im ⊕ ker, vertexwise.
    let mut p_img = Vec::new();
    let mut p_ker = Vec::new();
    for v in 0..q.n() {
        let b = img.maps[v].hstack(&ker.maps[v]);
        let inv = b.inverse().expect("Fitting decomposition");
        let di = img.maps[v].cols;
        p_img.push(inv.block(0, di, 0, b.rows));
        p_ker.push(inv.block(di, b.rows, 0, b.rows));
    }
    let pi = ModuleMap { source: s.clone(), target: img.source.clone(), maps: p_img };
    let pk = ModuleMap { source: s.clone(), target: ker.source.clone(), maps: p_ker };
    for (i, p) in [(img, pi), (ker, pk)] {
        let new_incl = incl.compose(&i).expect("composable");
        let new_proj = p.compose(proj).expect("composable");
        split(q, k, &new_incl, &new_proj, rng, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> (Quiver, PrimeField) {
        (Quiver::dynkin(Dynkin::A(2)).unwrap(), PrimeField::new(2).unwrap())
    }

    #[test]
    fn projectives_of_a2() {
        let (q, k) = a2();
        assert_eq!(projective_rep(&q, k, &[0]).dims, vec![1, 1]);
        assert_eq!(projective_rep(&q, k, &[1]).dims, vec![0, 1]);
        assert_eq!(injective_rep(&q, k, &[0]).dims, vec![1, 0]);
        assert_eq!(injective_rep(&q, k, &[1]).dims, vec![1, 1]);
    }

    #[test]
    fn hom_dimensions_a2() {
        let (q, k) = a2();
        let p1 = projective_rep(&q, k, &[0]);
        let s1 = Rep::simple(&q, k, 0);
        assert_eq!(rep_hom_basis(&q, k, &p1, &s1).len(), 1);
        assert_eq!(rep_hom_basis(&q, k, &s1, &p1).len(), 0);
        let ids = rep_hom_basis(&q, k, &p1, &p1);
        assert_eq!(ids.len(), 1);
        assert!(ids[0].is_iso());
    }

    #[test]
    fn ext_dimensions_a2() {
        let (q, k) = a2();
        let p1 = projective_rep(&q, k, &[0]);
        let s1 = Rep::simple(&q, k, 0);
        let s2 = Rep::simple(&q, k, 1);
        assert_eq!(rep_ext1_basis(&q, k, &s1, &s2).dim(), 1);
        assert_eq!(rep_ext1_basis(&q, k, &s1, &p1).dim(), 0);
        assert_eq!(rep_ext1_basis(&q, k, &p1, &s2).dim(), 0);
    }

    #[test]
    fn presentation_of_s1() {
        let (q, k) = a2();
        let pres = projective_presentation(&q, k, &Rep::simple(&q, k, 0));
        assert_eq!(pres.p0, vec![0]);
        assert_eq!(pres.p1, vec![1]);
        assert_eq!(pres.delta.get(0, 0), 1);
    }

    #[test]
    fn translates_a2() {
        let (q, k) = a2();
        let s1 = Rep::simple(&q, k, 0);
        assert_eq!(rep_tau(&q, k, &s1).unwrap().dims, vec![0, 1]);
        let p1 = projective_rep(&q, k, &[0]);
        assert_eq!(rep_nakayama(&q, k, &p1).unwrap().dims, vec![1, 0]);
        assert!(rep_tau(&q, k, &p1).is_err());
        assert!(rep_nakayama(&q, k, &s1).is_err());
    }

    #[test]
    fn catalog_sizes() {
        let k = PrimeField::new(3).unwrap();
        for (kind, count) in [
            (Dynkin::A(1), 1),
            (Dynkin::A(2), 3),
            (Dynkin::A(3), 6),
            (Dynkin::A(4), 10),
            (Dynkin::D(4), 12),
            (Dynkin::D(5), 20),
            (Dynkin::E(6), 36),
        ] {
            let cat = Catalog::new(Quiver::dynkin(kind).unwrap(), k);
            assert_eq!(cat.indecs.len(), count, "{kind}");
            assert_eq!(kind.positive_roots(), count);
        }
    }

    #[test]
    fn decompose_split_and_witness() {
        let (q, k) = a2();
        let cat = Catalog::new(q.clone(), k);
        let m = Rep::new(&q, vec![1, 1], vec![Mat::zeros(k, 1, 1)]).unwrap();
        let d = cat.decompose(&m);
        let labels: Vec<_> = d.parts.iter().map(|p| p.label.clone()).collect();
        assert_eq!(labels, vec![vec![0, 1], vec![1, 0]]);
        let mut total = ModuleMap::zero(k, &m, &m);
        for p in &d.parts {
            assert_eq!(p.proj.compose(&p.incl).unwrap(), ModuleMap::identity(k, &p.incl.source));
            total = total.add(&p.incl.compose(&p.proj).unwrap());
        }
        assert_eq!(total, ModuleMap::identity(k, &m));
        let p1 = projective_rep(&q, k, &[0]);
        assert_eq!(cat.decompose(&p1).parts.len(), 1);
        let s1 = Rep::simple(&q, k, 0);
        let ss = s1.direct_sum(&s1);
        assert_eq!(cat.decompose(&ss).multiplicities().get(&vec![1, 0]), Some(&2));
    }

    #[test]
    fn custom_orientation_validated() {
        assert!(Quiver::with_arrows(Dynkin::A(3), vec![(1, 0), (1, 2)]).is_ok());
        assert!(Quiver::with_arrows(Dynkin::D(4), vec![(0, 1), (1, 2)]).is_err());
        assert!(Quiver::with_arrows(Dynkin::D(4), vec![(0, 3), (1, 3), (2, 3)]).is_ok());
        assert!(Quiver::with_arrows(Dynkin::A(4), vec![(0, 3), (1, 3), (2, 3)]).is_err());
    }
}
