//! Graphviz exports.

use std::fmt::Write;

use extriloc::backend::{Backend, Obj};
use extriloc::linalg::Subspace;
use extriloc::relative::RelStructure;
use extriloc::Result;

/// Number of irreducible maps `a → b`, as `dim Hom(a, b) - dim rad²(a, b)`.
/// The categories here have no loops in their AR quivers, so `rad(a, a)` is
/// spanned by composites through other indecomposables.
pub fn irreducible_count(be: &Backend, a: usize, b: usize) -> usize {
    if a == b {
        return 0;
    }
    let (xa, xb) = (Obj::ind(a), Obj::ind(b));
    let d = be.hom_dim(&xa, &xb);
    if d == 0 {
        return 0;
    }
    let mut cols: Vec<Vec<u32>> = Vec::new();
    for c in 0..be.num_labels() {
        if c == a || c == b {
            continue;
        }
        let xc = Obj::ind(c);
        if be.hom_dim(&xa, &xc) == 0 || be.hom_dim(&xc, &xb) == 0 {
            continue;
        }
        for g in be.hom_basis(&xc, &xb) {
            let m = be.post_matrix(&g, &xa);
            for f in be.hom_basis(&xa, &xc) {
                cols.push(m.apply(&f.coeffs));
            }
        }
    }
    d - Subspace::span(be.k(), d, cols).dim()
}

fn header(out: &mut String, name: &str, be: &Backend) {
    writeln!(out, "digraph {name} {{").unwrap();
    for a in be.work_labels() {
        writeln!(out, "  \"{}\";", be.name(a)).unwrap();
    }
}

/// The AR quiver restricted to the working window.
pub fn ar_quiver(be: &Backend) -> String {
    let mut out = String::new();
    header(&mut out, "ar_quiver", be);
    let work = be.work_labels();
    for &a in &work {
        for &b in &work {
            for _ in 0..irreducible_count(be, a, b) {
                writeln!(out, "  \"{}\" -> \"{}\";", be.name(a), be.name(b)).unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

/// One edge per basis morphism between window indecomposables that lies in
/// `S_N`, labelled by its basis index.
pub fn sn_graph(rs: &RelStructure) -> Result<String> {
    let be = rs.be;
    let mut out = String::new();
    header(&mut out, "sn_graph", be);
    let work = be.work_labels();
    for &a in &work {
        for &b in &work {
            for (i, f) in be.hom_basis(&Obj::ind(a), &Obj::ind(b)).into_iter().enumerate() {
                if rs.in_sn(&f)? {
                    writeln!(out, "  \"{}\" -> \"{}\" [label=\"{i}\"];", be.name(a), be.name(b)).unwrap();
                }
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}
