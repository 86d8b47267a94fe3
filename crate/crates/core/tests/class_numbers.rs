use echeight::class_forms::{
    enumerate_reduced, hurwitz_by_enumeration, hurwitz_h, hurwitz_upper_bound, hurwitz_via_hecke, Discriminant,
    QuadraticForm,
};
use proptest::prelude::*;
use rug::{Integer, Rational};

fn valid(d: u64) -> Option<Discriminant> {
    Discriminant::new(d).ok()
}

#[test]
fn hecke_agrees_up_to_5000() {
    let mut checked = 0;
    for d in (1..=5000).filter_map(valid) {
        let h = hurwitz_h(d);
        assert_eq!(h, hurwitz_via_hecke(d), "D = {}", d.value());
        assert_eq!(h, hurwitz_by_enumeration(d), "D = {}", d.value());
        assert!(h.to_f64() <= hurwitz_upper_bound(d), "D = {}", d.value());
        checked += 1;
    }
    assert_eq!(checked, 2500);
}

#[test]
fn known_values() {
    // Classical class numbers h(-D) of fundamental discriminants.
    for (d, h) in [(3u64, Rational::from((1, 3))), (4, Rational::from((1, 2))), (7, 1.into()), (8, 1.into()),
                   (15, 2.into()), (20, 2.into()), (23, 3.into()), (47, 5.into()), (71, 7.into()), (88, 2.into()),
                   (163, 1.into()), (199, 9.into())] {
        assert_eq!(hurwitz_h(valid(d).unwrap()), h, "D = {d}");
    }
    // Non-fundamental: H(-12) = 4/3, H(-16) = 3/2, H(-27) = 4/3.
    assert_eq!(hurwitz_h(valid(12).unwrap()), Rational::from((4, 3)));
    assert_eq!(hurwitz_h(valid(16).unwrap()), Rational::from((3, 2)));
    assert_eq!(hurwitz_h(valid(27).unwrap()), Rational::from((4, 3)));
}

/// Apply `(X, Y) -> (pX + qY, rX + sY)`.
fn act(f: &QuadraticForm, m: [i64; 4]) -> QuadraticForm {
    let [p, q, r, s] = m.map(Integer::from);
    let (a, b, c) = (f.a(), f.b(), f.c());
    let na = f.eval(&p, &r);
    let nc = f.eval(&q, &s);
    let nb = Integer::from(a * 2u32) * &p * &q + Integer::from(b * (Integer::from(&p * &s) + Integer::from(&q * &r)))
        + Integer::from(c * 2u32) * &r * &s;
    QuadraticForm::new(na, nb, nc).unwrap()
}

fn sl2() -> impl Strategy<Value = [i64; 4]> {
    // Products of the generators T^k and S.
    prop::collection::vec((-4i64..=4, any::<bool>()), 1..6).prop_map(|steps| {
        let mut m = [1i64, 0, 0, 1];
        for (k, swap) in steps {
            m = [m[0], m[0] * k + m[1], m[2], m[2] * k + m[3]];
            if swap {
                m = [m[1], -m[0], m[3], -m[2]];
            }
        }
        m
    })
}

proptest! {
    #[test]
    fn reduction_is_canonical(d in 3u64..20_000, idx in 0usize..64, m in sl2()) {
        prop_assume!(d % 4 == 0 || d % 4 == 3);
        let disc = Discriminant::new(d).unwrap();
        let forms = enumerate_reduced(disc);
        let f = &forms[idx % forms.len()];
        prop_assert!(f.is_reduced());
        let g = act(f, m);
        prop_assert_eq!(g.discriminant(), Integer::from(-(d as i64)));
        let r = g.reduce();
        prop_assert!(r.is_reduced());
        prop_assert_eq!(&r, f);
        prop_assert_eq!(r.reduce(), r.clone());
        prop_assert!(g.equivalent(f).unwrap());
    }

    #[test]
    fn distinct_reduced_forms_are_inequivalent(d in 3u64..5_000) {
        prop_assume!(d % 4 == 0 || d % 4 == 3);
        let forms = enumerate_reduced(Discriminant::new(d).unwrap());
        for (i, f) in forms.iter().enumerate() {
            for g in &forms[i + 1..] {
                prop_assert!(!f.equivalent(g).unwrap());
            }
        }
    }

    #[test]
    fn counting_matches_enumeration(d in 5_000u64..200_000) {
        prop_assume!(d % 4 == 0 || d % 4 == 3);
        let disc = Discriminant::new(d).unwrap();
        prop_assert_eq!(hurwitz_h(disc), hurwitz_by_enumeration(disc));
    }
}
