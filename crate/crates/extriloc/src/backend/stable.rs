//! Stable module category of `A = k[x]/(x^n)`.
//!
//! `J_a = k[x]/(x^a)` has basis `1, x, …, x^{a-1}`. A module map `J_a → J_b`
//! is determined by the image `w` of `1`, which must satisfy `x^a w = 0`; it
//! factors through a projective exactly when `w ∈ x^{n-a} J_b`. The stable
//! hom space therefore has the monomial basis `x^k` with
//! `max(0, b-a) <= k < min(b, n-a)`.
//!
//! Cones follow the standard construction in a Frobenius category: the
//! pushout of `f: X → Y` along the injective hull `X → I(X) = ⊕ J_n`.

use crate::backend::{Backend, IndecLabel, Morphism, Obj};
use crate::error::{Error, Result};
use crate::linalg::{Mat, PrimeField, Subspace};

#[derive(Debug, Clone)]
pub struct Stable {
    n: usize,
    k: PrimeField,
}

impl Stable {
    pub(crate) fn new(n: usize, k: PrimeField) -> Self {
        Stable { n, k }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub(crate) fn labels(&self) -> Vec<IndecLabel> {
        (1..self.n).map(IndecLabel::Block).collect()
    }

    /// Exponent range of the monomial basis of `Hom(J_a, J_b)`.
    pub fn exponents(&self, a: usize, b: usize) -> std::ops::Range<usize> {
        let lo = b.saturating_sub(a);
        let hi = b.min(self.n - a);
        lo..hi.max(lo)
    }

    pub(crate) fn hom_dim(&self, a: &IndecLabel, b: &IndecLabel) -> usize {
        self.exponents(block(a), block(b)).len()
    }

    pub(crate) fn structure_constants(&self, a: &IndecLabel, b: &IndecLabel, c: &IndecLabel) -> Vec<u32> {
        let (a, b, c) = (block(a), block(b), block(c));
        let (eab, ebc, eac) = (self.exponents(a, b), self.exponents(b, c), self.exponents(a, c));
        let (dab, dac) = (eab.len(), eac.len());
        let mut t = vec![0u32; ebc.len() * dab * dac];
        for (u, l) in ebc.clone().enumerate() {
            for (v, kk) in eab.clone().enumerate() {
                let e = kk + l;
                if eac.contains(&e) {
                    t[(u * dab + v) * dac + (e - eac.start)] = 1;
                }
            }
        }
        t
    }

    /// Module map `J_a → J_b` (a `b × a` matrix) for stable coordinates.
    fn module_map(&self, a: usize, b: usize, coords: &[u32]) -> Mat {
        let mut m = Mat::zeros(self.k, b, a);
        for (c, e) in coords.iter().zip(self.exponents(a, b)) {
            for t in 0..a {
                if t + e < b {
                    let cur = m.get(t + e, t);
                    m.set(t + e, t, self.k.add(cur, *c));
                }
            }
        }
        m
    }

    /// Stable coordinates of the module map `J_a → J_b` sending `1 ↦ w`.
    fn coords_of_image(&self, a: usize, b: usize, w: &[u32]) -> Vec<u32> {
        self.exponents(a, b).map(|e| w[e]).collect()
    }

    /// Jordan chains `g, Tg, …, T^{L-1} g` of a nilpotent operator.
    fn jordan_chains(&self, t: &Mat) -> Vec<(usize, Vec<Vec<u32>>)> {
        let m = t.rows;
        let k = self.k;
        let mut kernels = vec![Subspace::zero(k, m)];
        let mut pw = Mat::identity(k, m);
        while kernels.last().unwrap().dim() < m {
            pw = t.mul(&pw);
            kernels.push(pw.kernel_basis());
            assert!(kernels.len() <= m + 1, "operator is not nilpotent");
        }
        let top = kernels.len() - 1;
        let mut chains: Vec<(usize, Vec<Vec<u32>>)> = Vec::new();
        for j in (1..=top).rev() {
            let mut vecs: Vec<Vec<u32>> = kernels[j - 1].basis().to_vec();
            for (len, ch) in &chains {
                vecs.push(ch[len - j].clone());
            }
            let mut cur = Subspace::span(k, m, vecs);
            for v in kernels[j].basis() {
                if cur.contains(v) {
                    continue;
                }
                let mut ch = vec![v.clone()];
                for _ in 1..j {
                    let next = t.apply(ch.last().unwrap());
                    ch.push(next);
                }
                let mut more = cur.basis().to_vec();
                more.push(v.clone());
                cur = Subspace::span(k, m, more);
                chains.push((j, ch));
            }
        }
        chains.sort_by_key(|(len, _)| *len);
        chains
    }

    pub(crate) fn cone(&self, be: &Backend, f: &Morphism) -> Result<(Obj, Morphism, Morphism)> {
        let (k, n) = (self.k, self.n);
        let xs: Vec<usize> = f.dom.0.iter().map(|&l| block(be.label(l))).collect();
        let ys: Vec<usize> = f.cod.0.iter().map(|&l| block(be.label(l))).collect();
        let off_x = prefix(&xs);
        let off_y = prefix(&ys);
        let dim_x: usize = xs.iter().sum();
        let dim_y: usize = ys.iter().sum();
        let big = dim_y + n * xs.len();
        // (f, -ι): X → Y ⊕ I(X); the pushout is its cokernel.
        let mut fm = Mat::zeros(k, big, dim_x);
        for (i, &b) in ys.iter().enumerate() {
            for (j, &a) in xs.iter().enumerate() {
                let mm = self.module_map(a, b, be.block(f, i, j));
                fm.set_block(off_y[i], off_x[j], &mm);
            }
        }
        for (j, &a) in xs.iter().enumerate() {
            for t in 0..a {
                fm.set(dim_y + n * j + t + n - a, off_x[j] + t, k.neg(1));
            }
        }
        let mut shift_op = Mat::zeros(k, big, big);
        let mut starts: Vec<(usize, usize)> = off_y.iter().zip(&ys).map(|(&o, &b)| (o, b)).collect();
        starts.extend((0..xs.len()).map(|j| (dim_y + n * j, n)));
        for (o, len) in starts {
            for t in 0..len.saturating_sub(1) {
                shift_op.set(o + t + 1, o + t, 1);
            }
        }
        let img = fm.image();
        let units = img.complement_units();
        let dq = units.len();
        let mut section = Mat::zeros(k, big, dq);
        for (c, &u) in units.iter().enumerate() {
            section.set(u, c, 1);
        }
        let mut cols: Vec<Vec<u32>> = img.basis().to_vec();
        cols.extend((0..dq).map(|c| section.col(c)));
        let change = Mat::from_cols(k, big, &cols).inverse().ok_or_else(|| {
            Error::Invariant("complement basis of the pushout is singular".into())
        })?;
        let proj = change.block(img.dim(), big, 0, big);
        let op = proj.mul(&shift_op).mul(&section);
        let chains = self.jordan_chains(&op);
        let jb_cols: Vec<Vec<u32>> = chains.iter().flat_map(|(_, ch)| ch.iter().cloned()).collect();
        let jb = Mat::from_cols(k, dq, &jb_cols);
        let jb_inv = jb.inverse().ok_or_else(|| Error::Invariant("Jordan basis singular".into()))?;
        let mut kept = Vec::new();
        let mut pos = 0;
        for (len, _) in &chains {
            if *len < n {
                kept.push((*len, pos));
            }
            pos += len;
        }
        let c_obj = Obj(kept.iter().map(|(len, _)| be.find(&IndecLabel::Block(*len)).unwrap()).collect());
        // g: Y → C, via the generators of the summands of Y.
        let coords_y: Vec<Vec<u32>> = (0..ys.len())
            .map(|i| {
                let mut e = vec![0u32; big];
                e[off_y[i]] = 1;
                jb_inv.apply(&proj.apply(&e))
            })
            .collect();
        let g = be.from_blocks(&f.cod, &c_obj, |ci, yi| {
            let (len, p0) = kept[ci];
            let w = &coords_y[yi][p0..p0 + len];
            Some(self.coords_of_image(ys[yi], len, w))
        });
        // h: C → X[1] = ⊕ J_{n-a}, induced by the projection onto I(X)/X.
        let x1 = be.shift_obj(&f.dom, 1)?;
        let h = be.from_blocks(&c_obj, &x1, |xj, ci| {
            let (len, p0) = kept[ci];
            let lift = section.apply(&jb.col(p0));
            let a = xs[xj];
            let w: Vec<u32> = (0..n - a).map(|t| lift[dim_y + n * xj + t]).collect();
            Some(self.coords_of_image(len, n - a, &w))
        });
        Ok((c_obj, g, h))
    }
}

fn block(l: &IndecLabel) -> usize {
    match l {
        IndecLabel::Block(a) => *a,
        IndecLabel::Shifted { .. } => unreachable!("stable engine label"),
    }
}

fn prefix(v: &[usize]) -> Vec<usize> {
    let mut acc = 0;
    v.iter()
        .map(|&d| {
            let o = acc;
            acc += d;
            o
        })
        .collect()
}
