use num_complex::Complex64;
use proptest::prelude::*;
use sp4_higgs::numfield::{rat, FieldElem, Rational};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=9).prop_map(|(n, d)| rat(n, d))
}

fn elem() -> impl Strategy<Value = FieldElem> {
    prop::array::uniform8(small_rational()).prop_map(FieldElem::from_coeffs)
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-9 * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in elem(), b in elem(), c in elem()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, FieldElem::zero());
    }

    #[test]
    fn inverse_is_two_sided(a in elem()) {
        prop_assume!(!a.is_zero());
        let inv = a.try_inv().unwrap();
        prop_assert!((&a * &inv).is_one());
        prop_assert!((&inv * &a).is_one());
    }

    #[test]
    fn galois_maps_are_automorphisms(a in elem(), b in elem()) {
        for f in [FieldElem::conj, FieldElem::sigma2, FieldElem::sigma3] {
            prop_assert_eq!(f(&(&a * &b)), &f(&a) * &f(&b));
            prop_assert_eq!(f(&(&a + &b)), &f(&a) + &f(&b));
            prop_assert_eq!(f(&f(&a)), a.clone());
        }
    }

    #[test]
    fn embedding_is_a_homomorphism(a in elem(), b in elem()) {
        prop_assert!(close((&a * &b).numeric(), a.numeric() * b.numeric()));
        prop_assert!(close((&a + &b).numeric(), a.numeric() + b.numeric()));
        prop_assert!(close(a.conj().numeric(), a.numeric().conj()));
    }

    #[test]
    fn json_roundtrip(a in elem()) {
        let s = serde_json::to_string(&a).unwrap();
        let back: FieldElem = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn real_and_imaginary_parts(a in elem()) {
        let recomposed = &a.real_part() + &(&FieldElem::i() * &a.imag_part());
        prop_assert_eq!(recomposed, a.clone());
        prop_assert!(a.real_part().is_real() && a.imag_part().is_real());
    }
}

#[test]
fn radicals_square_correctly() {
    let two = FieldElem::from_int(2);
    assert_eq!(&FieldElem::sqrt2() * &FieldElem::sqrt2(), two);
    assert_eq!(&FieldElem::sqrt3() * &FieldElem::sqrt3(), FieldElem::from_int(3));
    assert_eq!(&FieldElem::sqrt2() * &FieldElem::sqrt3(), FieldElem::sqrt6());
    assert_eq!(&FieldElem::i() * &FieldElem::i(), FieldElem::from_int(-1));
}

#[test]
fn denested_radicals_match_numerics() {
    // u = -2√6 - 6√2 and v = √6 - √2.
    let (u, v) = sp4_higgs::numfield::embed_u_v();
    let s2 = 2f64.sqrt();
    let s6 = 6f64.sqrt();
    assert!(close(u.numeric(), Complex64::new(-2.0 * s6 - 6.0 * s2, 0.0)));
    assert!(close(v.numeric(), Complex64::new(s6 - s2, 0.0)));
    // (-2√6 - 6√2)(√6 - √2) = -12 + 4√3 - 12√3 + 12 = -8√3.
    assert_eq!(&u * &v, &FieldElem::from_int(-8) * &FieldElem::sqrt3());
}

#[test]
fn powi_handles_negative_exponents() {
    let x = FieldElem::from_frac(3, 2);
    assert_eq!(x.powi(-2).unwrap(), FieldElem::from_frac(4, 9));
    assert!(FieldElem::zero().powi(-1).is_err());
}
