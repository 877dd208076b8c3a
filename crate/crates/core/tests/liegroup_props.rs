use proptest::prelude::*;
use sp4_higgs::liegroup::{self, SL2AlgElem, SL2Elem};
use sp4_higgs::matalg::{self, is_symplectic, SqMatrix};
use sp4_higgs::numfield::{rat, FieldElem};

fn nonzero() -> impl Strategy<Value = FieldElem> {
    (1i64..=12, 1i64..=12, any::<bool>())
        .prop_map(|(n, d, neg)| FieldElem::from_rational(rat(if neg { -n } else { n }, d)))
}

fn any_rational() -> impl Strategy<Value = FieldElem> {
    (-12i64..=12, 1i64..=12).prop_map(|(n, d)| FieldElem::from_rational(rat(n, d)))
}

/// Elements of SL(2,Q) with `d = (1 + bc)/a`.
fn sl2() -> impl Strategy<Value = SL2Elem> {
    (nonzero(), any_rational(), any_rational()).prop_map(|(a, b, c)| {
        let d = &(&FieldElem::one() + &(&b * &c)) / &a;
        SL2Elem::new(a, b, c, d).unwrap()
    })
}

/// Rational point `((1-t²)/(1+t²), 2t/(1+t²))` on the unit circle.
fn rotation() -> impl Strategy<Value = SL2Elem> {
    any_rational().prop_map(|t| {
        let one = FieldElem::one();
        let den = &one + &(&t * &t);
        let a = &(&one - &(&t * &t)) / &den;
        let c = &(&FieldElem::from_int(2) * &t) / &den;
        SL2Elem::rotation(a, c).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn representations_are_homomorphisms(g in sl2(), h in sl2()) {
        let gh = g.mul(&h);
        prop_assert_eq!(liegroup::rho1(&gh), &liegroup::rho1(&g) * &liegroup::rho1(&h));
        prop_assert_eq!(liegroup::rho13(&gh), &liegroup::rho13(&g) * &liegroup::rho13(&h));
        prop_assert_eq!(liegroup::phi(&gh), &liegroup::phi(&g) * &liegroup::phi(&h));
    }

    #[test]
    fn images_are_symplectic(g in sl2(), h in sl2()) {
        prop_assert!(is_symplectic(&liegroup::rho13(&g), &matalg::j13()));
        prop_assert!(is_symplectic(&liegroup::rho1(&g), &matalg::j0()));
        prop_assert!(is_symplectic(&liegroup::rho_p(&g, &h), &matalg::j12()));
        prop_assert!(is_symplectic(&liegroup::rho_delta(&g), &matalg::j13()));
        prop_assert!(is_symplectic(&liegroup::phi(&g), liegroup::transported_form()));
    }

    #[test]
    fn reducible_embeddings_agree(g in sl2()) {
        prop_assert_eq!(liegroup::rho_delta(&g), liegroup::rho_delta_via_perm(&g));
    }

    #[test]
    fn rotations_become_diagonal(g in rotation()) {
        // a + ic is the eigenvalue of the rotation on the line cut out by T₂.
        let [a, c] = [g.matrix().get(0, 0).clone(), g.matrix().get(1, 0).clone()];
        let l = &a + &(&FieldElem::i() * &c);
        prop_assert_eq!(liegroup::phi(&g), liegroup::torus_weights(&l).unwrap());
    }

    #[test]
    fn symmetric_directions_land_in_m(x in any_rational(), y in any_rational()) {
        let m = liegroup::phi_star(&SL2AlgElem::symmetric(x, y));
        let split = liegroup::cartan_split(&m).unwrap();
        prop_assert!(split.h_part.is_zero());
        prop_assert_eq!(split.m_part, m);
    }

    #[test]
    fn s_conjugation_normal_form(b in any_rational(), g in nonzero()) {
        prop_assert_eq!(
            liegroup::s_conjugate(&b, &g).unwrap(),
            liegroup::s_normal_form(&b, &g).unwrap()
        );
    }

    #[test]
    fn m_delta_roundtrip(a in any_rational(), b in any_rational()) {
        let x = liegroup::m_delta_from_real(&a, &b);
        let two = FieldElem::from_int(2);
        let ib = &FieldElem::i() * &b;
        prop_assert_eq!(
            liegroup::m_delta_membership(&x),
            Some((&two * &(&a + &ib), &two * &(&a - &ib)))
        );
    }
}

#[test]
fn differential_of_compact_direction_is_diagonal() {
    let x = SL2AlgElem::e().sub(&SL2AlgElem::f());
    let m = liegroup::phi_star(&x);
    assert!(m.is_diagonal());
    assert!(liegroup::cartan_split(&m).unwrap().m_part.is_zero());
}

#[test]
fn non_traceless_rejected() {
    assert!(SL2AlgElem::new(SqMatrix::identity(2)).is_err());
}

#[test]
fn orthogonal_blocks_lie_in_u2_image() {
    let a = SqMatrix::from_ints([[0, 1], [-1, 0]]);
    let z = SqMatrix::zero(2);
    assert!(liegroup::in_u2_image(&SqMatrix::from_blocks(&a, &z, &z, &a)));
    let d = SqMatrix::diag(&[FieldElem::from_int(2), FieldElem::one()]);
    assert!(!liegroup::in_u2_image(&SqMatrix::from_blocks(&d, &z, &z, &d)));
}

#[test]
fn frame_dependent_checks_fail_on_perturbed_frame() {
    let bad = sp4_higgs::verify::corrupted_frame();
    assert_ne!(bad.phi_star(&SL2AlgElem::h0()), liegroup::golden_h0());
}
