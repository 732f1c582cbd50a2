//! Test data: morphism pools, random objects and random members of `S_N`.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::backend::{Backend, Morphism, Obj};
use crate::relative::RelStructure;
use crate::subcat::ext_vectors;

/// How axiom instances are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Every morphism between working-window indecomposables.
    Exhaustive,
    Seeded { samples: usize, seed: u64 },
}

/// Per-pair cap on the exhaustive enumeration of a hom space.
pub const PAIR_CAP: u64 = 64;

/// All morphisms (including zero) between working-window indecomposables,
/// sampled per pair when a hom space has more than [`PAIR_CAP`] elements.
pub fn indec_morphisms(be: &Backend, rng: &mut ChaCha8Rng) -> Vec<Morphism> {
    let p = be.k().p() as u64;
    let mut out = Vec::new();
    let work = be.work_labels();
    for &a in &work {
        for &b in &work {
            let (x, y) = (Obj::ind(a), Obj::ind(b));
            let d = be.hom_dim(&x, &y);
            if d == 0 {
                continue;
            }
            let total = p.checked_pow(d as u32).unwrap_or(u64::MAX);
            out.push(be.zero(&x, &y));
            if total <= PAIR_CAP {
                for v in ext_vectors(p as u32, d, rng) {
                    out.push(be.from_vector(&x, &y, v).expect("length"));
                }
            } else {
                for _ in 0..PAIR_CAP {
                    out.push(random_morphism(be, rng, &x, &y));
                }
            }
        }
    }
    out
}

pub fn random_morphism(be: &Backend, rng: &mut ChaCha8Rng, x: &Obj, y: &Obj) -> Morphism {
    let p = be.k().p();
    let v = (0..be.hom_dim(x, y)).map(|_| rng.gen_range(0..p)).collect();
    be.from_vector(x, y, v).expect("length")
}

/// A sum of `1..=max` working-window indecomposables.
pub fn random_object(be: &Backend, rng: &mut ChaCha8Rng, max: usize) -> Obj {
    let work = be.work_labels();
    let n = rng.gen_range(1..=max);
    Obj((0..n).map(|_| *work.choose(rng).expect("nonempty window")).collect())
}

/// Random object `y` with `Hom(x, y) ≠ 0`, when one is found quickly.
pub fn random_target(be: &Backend, rng: &mut ChaCha8Rng, x: &Obj, max: usize) -> Option<Obj> {
    (0..32).map(|_| random_object(be, rng, max)).find(|y| be.hom_dim(x, y) > 0)
}

/// Draws a morphism of `S_N`, mixing four sources: random maps that
/// happen to lie in `S_N`, split maps `X → X ⊕ N0` and `X ⊕ N0 → X`,
/// deflations of `E_N`-conflations whose first term lies in `N`, and
/// composites of two earlier draws.
pub fn random_sn(rs: &RelStructure, rng: &mut ChaCha8Rng, pool: &mut Vec<Morphism>) -> Option<Morphism> {
    let be = rs.be;
    let members = rs.n.work_members(be);
    for _ in 0..64 {
        let kind = rng.gen_range(0..5);
        let cand = match kind {
            0 => {
                let x = random_object(be, rng, 2);
                let Some(y) = random_target(be, rng, &x, 2) else { continue };
                random_morphism(be, rng, &x, &y)
            }
            1 | 2 if !members.is_empty() => {
                let x = random_object(be, rng, 2);
                let m = Obj::ind(*members.choose(rng).expect("nonempty"));
                let xm = x.sum(&m);
                let phi_out = random_morphism(be, rng, &x, &m);
                let phi_in = random_morphism(be, rng, &m, &x);
                let id = be.identity(&x);
                if kind == 1 {
                    be.vcat(&id, &phi_out)
                } else {
                    debug_assert_eq!(be.hcat(&id, &phi_in).dom, xm);
                    be.hcat(&id, &phi_in)
                }
            }
            3 if !members.is_empty() => {
                let a = Obj::ind(*members.choose(rng).expect("nonempty"));
                let Ok(a1) = be.shift_obj(&a, 1) else { continue };
                let c = random_object(be, rng, 1);
                if be.hom_dim(&c, &a1) == 0 {
                    continue;
                }
                let h = random_morphism(be, rng, &c, &a1);
                let Ok(t) = be.realize(&h) else { continue };
                t.g
            }
            4 if pool.len() >= 2 => {
                let f = pool.choose(rng).expect("nonempty").clone();
                let Some(g) = pool.iter().filter(|g| g.dom == f.cod).collect::<Vec<_>>().choose(rng).map(|g| (*g).clone())
                else {
                    continue;
                };
                match be.compose(&g, &f) {
                    Ok(m) => m,
                    Err(_) => continue,
                }
            }
            _ => continue,
        };
        if cand.dom.is_empty() && cand.cod.is_empty() {
            continue;
        }
        if !be.in_work(&cand.dom) || !be.in_work(&cand.cod) {
            continue;
        }
        if let Ok(true) = rs.in_sn(&cand) {
            pool.push(cand.clone());
            return Some(cand);
        }
    }
    None
}
