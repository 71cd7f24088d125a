use dehnlab::area::{
    area_closed, area_exact_z2, area_lower_zr, area_open, area_oracle, area_upper_dc,
    general_upper, sort_filling_upper, AreaOptions, OracleConfig,
};
use dehnlab::combing::{staircase, GeodesicCombing};
use dehnlab::presentation::AbelianPresentation;
use dehnlab::words::Word;
use proptest::prelude::*;

fn group(name: &str) -> AbelianPresentation {
    AbelianPresentation::builtin(name).unwrap()
}

/// A random word on `r` generators.
fn word(r: i16, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((1..=r, any::<bool>()), 0..=max_len).prop_map(|v| {
        let signed: Vec<i16> = v
            .into_iter()
            .map(|(g, pos)| if pos { g } else { -g })
            .collect();
        Word::from_signed(&signed).unwrap()
    })
}

/// A random closed word on `ℤ^r`: a walk followed by the staircase home.
fn closed(r: i16, max_len: usize) -> impl Strategy<Value = Word> {
    word(r, max_len).prop_map(move |w| {
        let mut v = vec![0i64; r as usize];
        for l in w.letters() {
            v[l.generator().unwrap() - 1] += l.sign();
        }
        w.concat(&staircase(&v).inverse())
    })
}

fn rotate(w: &Word, k: usize) -> Word {
    let l = w.letters();
    if l.is_empty() {
        return w.clone();
    }
    let k = k % l.len();
    let mut v = l[k..].to_vec();
    v.extend_from_slice(&l[..k]);
    Word::new(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn winding_matches_oracle(w in closed(2, 6)) {
        let p = group("z2");
        let o = area_oracle(&p, &w, &OracleConfig::default()).unwrap();
        prop_assert_eq!(o.value(), Some(area_exact_z2(&w).unwrap()));
    }

    #[test]
    fn area_is_a_conjugacy_and_inversion_invariant(w in closed(2, 10), k in 0usize..40) {
        let a = area_exact_z2(&w).unwrap();
        prop_assert_eq!(area_exact_z2(&rotate(&w, k)).unwrap(), a);
        prop_assert_eq!(area_exact_z2(&w.inverse()).unwrap(), a);
        prop_assert_eq!(area_exact_z2(&w.free_reduce().unwrap()).unwrap(), a);
    }

    #[test]
    fn area_is_subadditive(u in closed(2, 8), v in closed(2, 8)) {
        let uv = u.concat(&v);
        prop_assert!(
            area_exact_z2(&uv).unwrap() <= area_exact_z2(&u).unwrap() + area_exact_z2(&v).unwrap()
        );
    }

    #[test]
    fn bounds_sandwich_the_area_on_zr(w in closed(3, 6)) {
        let p = group("z3");
        let lo = area_lower_zr(&w, 3).unwrap();
        let hi = sort_filling_upper(w.letters(), 3);
        let a = area_closed(&p, &w, &AreaOptions::default()).unwrap();
        prop_assert!(lo <= a.lower && a.lower <= a.upper && a.upper <= hi);
        prop_assert!(a.exact);
        let z2 = group("z2");
        let w2 = Word::new(w.letters().iter().copied().filter(|l| l.generator() != Some(3)).collect()).unwrap();
        let exact = area_exact_z2(&w2).unwrap();
        prop_assert!(area_lower_zr(&w2, 2).unwrap() <= exact);
        prop_assert!(exact <= general_upper(&z2, &w2).unwrap());
    }

    #[test]
    fn bounds_sandwich_the_area_with_torsion(
        (name, w) in prop::sample::select(vec![("zxz2", 2), ("z10", 1), ("z/3", 1)])
            .prop_flat_map(|(name, r)| (Just(name), word(r, 8)))
    ) {
        let p = group(name);
        let back = GeodesicCombing::default_for(&p);
        let end = p.element_of(&w).unwrap();
        let w = w.concat(&back.comb_to(&end).inverse());
        let a = area_closed(&p, &w, &AreaOptions::default()).unwrap();
        let hi = general_upper(&p, &w).unwrap();
        prop_assert!(a.lower <= a.upper && a.upper <= hi);
        if w.free_reduce().unwrap().is_empty() {
            prop_assert_eq!(a.upper, 0);
        }
    }

    #[test]
    fn halving_bounds_the_open_area(w in word(2, 24), leaf in 1usize..6) {
        let p = group("z2");
        let c = GeodesicCombing::default_for(&p);
        let opts = AreaOptions::default();
        let a = area_open(&p, &c, &w, &opts).unwrap();
        prop_assert!(a.exact);
        prop_assert!(a.lower <= area_upper_dc(&p, &c, &w, leaf, &opts).unwrap());
    }
}

#[test]
fn known_areas() {
    let p = group("z2");
    for (w, a) in [
        ("", 0),
        ("a1 A1", 0),
        ("a1 a2 A1 A2", 1),
        ("a1 a1 a2 a2 A1 A1 A2 A2", 4),
        ("a1 a2 A1 A2 A1 A2 a1 a2", 2),
    ] {
        let w: Word = w.parse().unwrap();
        assert_eq!(area_exact_z2(&w).unwrap(), a, "{w}");
        assert_eq!(
            area_oracle(&p, &w, &OracleConfig::default())
                .unwrap()
                .value(),
            Some(a),
            "{w}"
        );
    }
    let open: Word = "a1 a2".parse().unwrap();
    assert!(area_closed(&p, &open, &AreaOptions::default()).is_err());
}
