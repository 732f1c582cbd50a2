use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use extriloc::backend::{Backend, BackendDescriptor, Obj};
use extriloc::heart::CotorsionPair;
use extriloc::instances::{random_morphism, random_object, random_sn, random_target};
use extriloc::localization::{Decision, LocBudget};
use extriloc::quiver::Dynkin;
use extriloc::relative::RelStructure;
use extriloc::subcat::{Subcat, SubcatSpec};

struct Fixtures {
    stable: Backend,
    a2: Backend,
    a3: Backend,
}

fn fixtures() -> &'static Fixtures {
    static F: OnceLock<Fixtures> = OnceLock::new();
    F.get_or_init(|| {
        let d = |n, w| {
            Backend::with_headroom(BackendDescriptor::DerivedDynkin { quiver: Dynkin::A(n), arrows: None, p: 2, w }, 2)
                .unwrap()
        };
        Fixtures {
            stable: Backend::new(BackendDescriptor::StableNakayama { n: 4, p: 2 }).unwrap(),
            a2: d(2, 2),
            a3: d(3, 1),
        }
    })
}

/// Extension-closed subcategories covering the four kinds of verdict.
fn structure(which: usize) -> (RelStructure<'static>, Option<CotorsionPair>) {
    let f = fixtures();
    match which % 5 {
        0 => (RelStructure::unchecked(&f.stable, Subcat::all(&f.stable)).unwrap(), None),
        1 => {
            let s2 = f.a2.label(f.a2.parse_label("S2").unwrap()).clone();
            (RelStructure::unchecked(&f.a2, Subcat::new(&f.a2, SubcatSpec::ShiftOrbit(vec![s2])).unwrap()).unwrap(), None)
        }
        2 => {
            let cp = CotorsionPair::t_structure(&f.a2, 0).unwrap();
            (RelStructure::unchecked(&f.a2, cp.kernel(&f.a2).unwrap()).unwrap(), Some(cp))
        }
        3 => {
            let cp = CotorsionPair::rigid(&f.a3, &["111", "011", "010"]).unwrap();
            (RelStructure::unchecked(&f.a3, cp.kernel(&f.a3).unwrap()).unwrap(), Some(cp))
        }
        _ => (RelStructure::unchecked(&f.a2, Subcat::explicit(&f.a2, &["S1"]).unwrap()).unwrap(), None),
    }
}

fn composable(be: &Backend, rng: &mut ChaCha8Rng) -> Option<(extriloc::backend::Morphism, extriloc::backend::Morphism)> {
    let x = random_object(be, rng, 2);
    let y = random_target(be, rng, &x, 2)?;
    let z = random_target(be, rng, &y, 2)?;
    Some((random_morphism(be, rng, &x, &y), random_morphism(be, rng, &y, &z)))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn q_is_a_functor(which in 0usize..5, seed in any::<u64>()) {
        let (rs, _) = structure(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Some((f, g)) = composable(rs.be, &mut rng) {
            let both = rs.roof_compose(&rs.q_morphism(&f), &rs.q_morphism(&g)).unwrap();
            let direct = rs.q_morphism(&rs.be.compose(&g, &f).unwrap());
            prop_assert_eq!(rs.roof_equal(&both, &direct), Decision::Equal);
            let id = rs.identity_roof(&f.dom);
            prop_assert_eq!(rs.roof_equal(&rs.roof_compose(&id, &rs.q_morphism(&f)).unwrap(), &rs.q_morphism(&f)), Decision::Equal);
        }
    }

    #[test]
    fn inverse_roofs_invert(which in 0usize..5, seed in any::<u64>()) {
        let (rs, _) = structure(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pool = Vec::new();
        if let Some(s) = random_sn(&rs, &mut rng, &mut pool) {
            let inv = rs.inverse_roof(&s).unwrap();
            let left = rs.roof_compose(&rs.q_morphism(&s), &inv).unwrap();
            let right = rs.roof_compose(&inv, &rs.q_morphism(&s)).unwrap();
            prop_assert_eq!(rs.roof_equal(&left, &rs.identity_roof(&s.dom)), Decision::Equal);
            prop_assert_eq!(rs.roof_equal(&right, &rs.identity_roof(&s.cod)), Decision::Equal);
        }
    }

    #[test]
    fn only_members_of_n_become_zero(which in 0usize..5, pick in any::<prop::sample::Index>()) {
        let (rs, _) = structure(which);
        let work = rs.be.work_labels();
        let x = Obj::ind(work[pick.index(work.len())]);
        let h = rs.loc_hom(&x, &x, LocBudget::default());
        prop_assume!(h.stabilized);
        prop_assert_eq!(h.dim == 0, rs.n.contains(&x));
    }

    #[test]
    fn thick_subcategories_give_verdier_quotients(seed in any::<u64>()) {
        let (rs, _) = structure(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_object(rs.be, &mut rng, 2);
        if let Some(y) = random_target(rs.be, &mut rng, &x, 2) {
            let f = random_morphism(rs.be, &mut rng, &x, &y);
            let s = rs.in_sn(&f).unwrap();
            prop_assert_eq!(rs.in_l(&f).unwrap(), s);
            prop_assert_eq!(rs.in_r(&f).unwrap(), s);
            prop_assert_eq!(rs.is_iso_loc(&f).unwrap(), s);
        }
    }

    #[test]
    fn heart_functor_kills_exactly_n(which in 2usize..4, seed in any::<u64>()) {
        let (rs, cp) = structure(which);
        let cp = cp.unwrap();
        let be = rs.be;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_object(be, &mut rng, 1);
        if let Some(y) = random_target(be, &mut rng, &x, 1) {
            let f = random_morphism(be, &mut rng, &x, &y);
            let hf = cp.heart_mor(be, &f).unwrap();
            prop_assert_eq!(cp.w.in_ideal(be, &hf), rs.n.in_ideal(be, &f));
        }
    }
}
