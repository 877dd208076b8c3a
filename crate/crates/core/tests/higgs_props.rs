//! Stability verdicts are cross-checked against an independent computation
//! on the associated rank-4 (or rank-2) Higgs bundle `E = V ⊕ V*`: for data
//! built from line bundles the candidate sub-Higgs bundles are sums of
//! summands closed under the Higgs field.

use proptest::prelude::*;
use sp4_higgs::higgs::{
    self, slots, CurveCtx, HiggsDatum, LineBundleClass, SecondInvariant, SectionSlot, Stability,
};
use sp4_higgs::moduli;
use sp4_higgs::{F2Vec, FieldElem};

/// Summand degrees and directed edges `a -> b` meaning the Higgs field maps
/// summand `a` nontrivially into summand `b ⊗ K`.
struct SplitHiggs {
    degrees: Vec<i64>,
    edges: Vec<(usize, usize)>,
}

impl SplitHiggs {
    fn invariant(&self, mask: u32) -> bool {
        self.edges
            .iter()
            .all(|&(a, b)| mask & (1 << a) == 0 || mask & (1 << b) != 0)
    }

    fn degree(&self, mask: u32) -> i64 {
        (0..self.degrees.len())
            .filter(|k| mask & (1 << k) != 0)
            .map(|k| self.degrees[k])
            .sum()
    }

    fn proper_masks(&self) -> impl Iterator<Item = u32> + '_ {
        let full = (1u32 << self.degrees.len()) - 1;
        (1..full).filter(move |&m| self.invariant(m))
    }

    fn semistable(&self) -> bool {
        self.proper_masks().all(|m| self.degree(m) <= 0)
    }

    fn polystable(&self) -> bool {
        let full = (1u32 << self.degrees.len()) - 1;
        self.semistable()
            && self
                .proper_masks()
                .filter(|&m| self.degree(m) == 0)
                .all(|m| self.invariant(full ^ m))
    }
}

/// Summands `N, N⁻¹K, N⁻¹, NK⁻¹`.
fn diagonal_oracle(ctx: &CurveCtx, datum: &HiggsDatum) -> SplitHiggs {
    let HiggsDatum::Diagonal {
        n,
        beta1,
        beta2,
        beta3,
    } = datum
    else {
        unreachable!()
    };
    let d = n.degree(ctx);
    let k = ctx.deg_k();
    let mut edges = vec![(0, 3), (1, 2)];
    if !beta1.is_zero() {
        edges.push((2, 0));
    }
    if !beta2.is_zero() {
        edges.push((3, 1));
    }
    if !beta3.is_zero() {
        edges.extend([(2, 1), (3, 0)]);
    }
    SplitHiggs {
        degrees: vec![d, k - d, -d, d - k],
        edges,
    }
}

fn ctx_strategy() -> impl Strategy<Value = (CurveCtx, F2Vec)> {
    (2i64..=4, any::<u64>()).prop_map(|(g, mask)| {
        let ctx = CurveCtx::new(g).unwrap();
        let t = F2Vec::from_mask(ctx.two_g(), mask & ((1 << (2 * g)) - 1));
        (ctx, t)
    })
}

fn unit_torsion(ctx: &CurveCtx, k: usize) -> F2Vec {
    F2Vec::unit(ctx.two_g(), k % ctx.two_g())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn diagonal_matches_oracle(
        (ctx, t) in ctx_strategy(),
        c_frac in 0.0f64..1.0,
        b in any::<[bool; 3]>(),
    ) {
        let c = (c_frac * (2 * ctx.genus() - 1) as f64) as i64;
        let datum = higgs::diagonal_with_c(&ctx, c, t, b[0], b[1], b[2]);
        prop_assume!(datum.is_ok());
        let datum = datum.unwrap();
        let oracle = diagonal_oracle(&ctx, &datum);
        let v = higgs::stability(&ctx, &datum).unwrap().verdict;
        prop_assert_eq!(v.is_semistable(), oracle.semistable(), "c={} b={:?}", c, b);
        prop_assert_eq!(v.is_polystable(), oracle.polystable(), "c={} b={:?}", c, b);
    }

    #[test]
    fn torsion_split_matches_oracle(
        (ctx, t1) in ctx_strategy(),
        mask in any::<u64>(),
        b in any::<[bool; 2]>(),
    ) {
        let t2 = F2Vec::from_mask(ctx.two_g(), mask & ((1 << ctx.two_g()) - 1));
        let k2 = slots::torsion_split(&ctx);
        let datum = HiggsDatum::TorsionSplit {
            l1_torsion: t1.clone(),
            l2_torsion: t2.clone(),
            beta1: SectionSlot::sample(&ctx, k2.clone(), b[0]).unwrap(),
            beta2: SectionSlot::sample(&ctx, k2, b[1]).unwrap(),
        };
        let half = ctx.genus() - 1;
        let mut edges = vec![(0, 2), (1, 3)];
        if b[0] { edges.push((2, 0)); }
        if b[1] { edges.push((3, 1)); }
        let oracle = SplitHiggs { degrees: vec![half, half, -half, -half], edges };
        let r = higgs::stability(&ctx, &datum).unwrap();
        prop_assert_eq!(r.verdict.is_semistable(), oracle.semistable());
        prop_assert_eq!(r.verdict.is_polystable(), oracle.polystable());
        prop_assert_eq!(r.verdict == Stability::Stable, t1 != t2);
        prop_assert_eq!(r.non_simple, t1 != t2);
    }

    #[test]
    fn sl2r_matches_oracle((ctx, t) in ctx_strategy(), d_off in 0i64..=8, b in any::<[bool; 2]>()) {
        let g = ctx.genus();
        let d = d_off - 4;
        prop_assume!(d.abs() <= g);
        let datum = higgs::sl2r_datum(&ctx, LineBundleClass::new(0, d, t), b[0], b[1]);
        prop_assume!(datum.is_ok());
        let datum = datum.unwrap();
        let HiggsDatum::Sl2r { beta, gamma, .. } = &datum else { unreachable!() };
        let mut edges = vec![];
        if !gamma.is_zero() { edges.push((0, 1)); }
        if !beta.is_zero() { edges.push((1, 0)); }
        let oracle = SplitHiggs { degrees: vec![d, -d], edges };
        let v = higgs::stability(&ctx, &datum).unwrap().verdict;
        prop_assert_eq!(v.is_semistable(), oracle.semistable(), "d={} b={:?}", d, b);
        prop_assert_eq!(v.is_polystable(), oracle.polystable(), "d={} b={:?}", d, b);
    }

    #[test]
    fn line_bundle_algebra((ctx, t) in ctx_strategy(), k in -6i64..=6, e in -5i64..=5, p in -3i64..=3) {
        let l = LineBundleClass::new(k, e, t);
        prop_assert!(l.tensor(&l.dual()).is_trivial());
        prop_assert_eq!(l.pow(p).degree(&ctx), p * l.degree(&ctx));
        prop_assert_eq!(l.pow(2).torsion, ctx.zero_torsion());
        let m = LineBundleClass::k_power(&ctx, 1);
        prop_assert_eq!(l.tensor(&m).degree(&ctx), l.degree(&ctx) + ctx.genus() - 1);
    }

    #[test]
    fn h0_obeys_riemann_roch((ctx, t) in ctx_strategy(), k in -6i64..=8, e in -4i64..=4) {
        let l = LineBundleClass::new(k, e, t);
        let serre = LineBundleClass::k_power(&ctx, 2).tensor(&l.dual());
        if let (Ok(a), Ok(b)) = (higgs::h0(&ctx, &l), higgs::h0(&ctx, &serre)) {
            prop_assert_eq!(a as i64 - b as i64, l.degree(&ctx) - ctx.genus() + 1);
        }
    }

    #[test]
    fn iso_normal_form_is_scale_invariant(
        (ctx, t) in ctx_strategy(),
        c_frac in 0.0f64..1.0,
        b in any::<[bool; 2]>(),
        num in 1i64..=9,
        den in 1i64..=9,
    ) {
        let c = 1 + (c_frac * (2 * ctx.genus() - 3) as f64) as i64;
        let datum = higgs::diagonal_with_c(&ctx, c, t, b[0], true, b[1]).unwrap();
        let nf = higgs::iso_normal_form(&ctx, &datum).unwrap();
        prop_assert_eq!(&higgs::iso_normal_form(&ctx, &nf).unwrap(), &nf);
        let scaled = higgs::scale_diagonal(&datum, &FieldElem::from_frac(num, den)).unwrap();
        prop_assert_eq!(higgs::iso_normal_form(&ctx, &scaled).unwrap(), nf);
    }

    #[test]
    fn datum_json_roundtrip((ctx, t) in ctx_strategy(), c in 0i64..=2, b in any::<[bool; 3]>()) {
        let datum = higgs::diagonal_with_c(&ctx, c, t, b[0], b[1], b[2]).unwrap();
        let text = serde_json::to_string(&datum).unwrap();
        prop_assert_eq!(serde_json::from_str::<HiggsDatum>(&text).unwrap(), datum);
    }

    #[test]
    fn cayley_degree_and_invariants((ctx, t) in ctx_strategy(), c_frac in 0.0f64..1.0, b3 in any::<bool>()) {
        let c = 1 + (c_frac * (2 * ctx.genus() - 3) as f64) as i64;
        let datum = higgs::diagonal_with_c(&ctx, c, t.clone(), false, true, b3).unwrap();
        prop_assert!(higgs::is_maximal(&ctx, &datum));
        let partner = higgs::cayley_partner(&ctx, &datum, &ctx.zero_torsion()).unwrap();
        let split_c = match partner.w {
            higgs::CayleyCase::SplitLine { c, .. } => Some(c),
            _ => None,
        };
        prop_assert_eq!(split_c, Some(c));
        let inv = higgs::sw_invariants(&ctx, &datum).unwrap();
        prop_assert_eq!(inv.toledo, ctx.deg_k());
        prop_assert_eq!(inv.second, SecondInvariant::C(c));
        prop_assert_eq!(moduli::classify(&ctx, &datum).unwrap(), moduli::ComponentLabel::ZeroSW { c });
        prop_assert_eq!(higgs::is_hitchin_minimum(&ctx, &datum).unwrap(), !b3);
    }

    #[test]
    fn pairs_of_maximal_sl2r_merge((ctx, t1) in ctx_strategy(), k in 0usize..8) {
        let t2 = unit_torsion(&ctx, k);
        let a = moduli::maximal_sl2r(&ctx, t1.clone()).unwrap();
        let b = moduli::maximal_sl2r(&ctx, t2.clone()).unwrap();
        let sum = higgs::direct_sum(&ctx, &a, &b);
        let is_torsion_split = matches!(sum, HiggsDatum::TorsionSplit { .. });
        prop_assert!(is_torsion_split);
        let wrapped = HiggsDatum::DirectSum { summands: vec![a.clone(), b.clone()] };
        prop_assert_eq!(
            higgs::stability(&ctx, &wrapped).unwrap().verdict,
            higgs::stability(&ctx, &sum).unwrap().verdict
        );
        let inv = higgs::sw_invariants(&ctx, &sum).unwrap();
        prop_assert_eq!(&inv.w1, &(&t1 + &t2));
        if !inv.w1.is_zero() {
            prop_assert_eq!(inv.second, SecondInvariant::W2(sp4_higgs::f2::cup(&t1, &t2).unwrap()));
        }
    }
}

#[test]
fn h0_special_cases() {
    let ctx = CurveCtx::new(3).unwrap();
    let tau = unit_torsion(&ctx, 0);
    let k = LineBundleClass::k_power(&ctx, 2);
    assert_eq!(higgs::h0(&ctx, &LineBundleClass::trivial(&ctx)), Ok(1));
    assert_eq!(higgs::h0(&ctx, &LineBundleClass::torsion_only(tau.clone())), Ok(0));
    assert_eq!(higgs::h0(&ctx, &k), Ok(3));
    assert_eq!(higgs::h0(&ctx, &k.tensor(&LineBundleClass::torsion_only(tau))), Ok(2));
    assert_eq!(higgs::h0(&ctx, &LineBundleClass::k_power(&ctx, 4)), Ok(6));
    assert!(matches!(
        higgs::h0(&ctx, &LineBundleClass::k_power(&ctx, 1)),
        Err(sp4_higgs::Error::RequiresExplicitH0 { .. })
    ));
}

#[test]
fn slot_override_must_agree_with_computable_h0() {
    let ctx = CurveCtx::new(2).unwrap();
    let k = LineBundleClass::k_power(&ctx, 2);
    let slot = SectionSlot::with_override(k.clone(), vec![FieldElem::one()]);
    assert!(matches!(
        slot.validate(&ctx, &k),
        Err(sp4_higgs::Error::SlotLength { expected: 2, got: 1, .. })
    ));
}

#[test]
fn vanishing_beta2_is_rejected_by_normal_form() {
    let ctx = CurveCtx::new(3).unwrap();
    let datum = higgs::diagonal_with_c(&ctx, 2, ctx.zero_torsion(), true, false, true).unwrap();
    assert!(matches!(
        higgs::iso_normal_form(&ctx, &datum),
        Err(sp4_higgs::Error::UnstableInput(_))
    ));
}

#[test]
fn irreducible_image_normal_form() {
    let ctx = CurveCtx::new(2).unwrap();
    let spin = LineBundleClass::k_power(&ctx, 1);
    for beta in [false, true] {
        let sl = higgs::sl2r_datum(&ctx, spin.clone(), beta, true).unwrap();
        let img = higgs::irr_embed(&ctx, &sl).unwrap();
        let nf = higgs::irr_normal_form(&ctx, &img).unwrap();
        assert_eq!(nf.beta1_is_zero, !beta);
        assert_eq!(nf.beta3.is_zero(), !beta);
        assert_eq!(nf.gamma_scale, FieldElem::one());
        assert_eq!(nf.n, spin.pow(3));
        assert_eq!(higgs::is_hitchin_minimum(&ctx, &img), Ok(!beta));
        assert!(matches!(
            moduli::classify(&ctx, &img).unwrap(),
            moduli::ComponentLabel::Hitchin { .. }
        ));
    }
}

#[test]
fn irreducible_embedding_rejects_unstable_input() {
    let ctx = CurveCtx::new(3).unwrap();
    let sl = higgs::sl2r_datum(&ctx, LineBundleClass::new(0, 1, ctx.zero_torsion()), true, false).unwrap();
    assert!(matches!(
        higgs::irr_embed(&ctx, &sl),
        Err(sp4_higgs::Error::NotPolystable(_))
    ));
}

#[test]
fn stability_reports_name_their_clause() {
    let ctx = CurveCtx::new(2).unwrap();
    let d = higgs::diagonal_with_c(&ctx, 1, ctx.zero_torsion(), true, false, false).unwrap();
    let r = higgs::stability(&ctx, &d).unwrap();
    assert_eq!(r.verdict, Stability::Unstable);
    assert_eq!(r.clause, "stability.diagonal.c-positive.beta2-zero");
    assert_eq!(
        serde_json::to_string(&r).unwrap(),
        r#"{"verdict":"Unstable","clause":"stability.diagonal.c-positive.beta2-zero"}"#
    );
}

#[test]
fn degree_zero_sl2r_with_one_section_is_semistable_only() {
    let ctx = CurveCtx::new(2).unwrap();
    let l = LineBundleClass::torsion_only(unit_torsion(&ctx, 1));
    for (b, c) in [(true, false), (false, true)] {
        let datum = higgs::sl2r_datum(&ctx, l.clone(), b, c).unwrap();
        let r = higgs::stability(&ctx, &datum).unwrap();
        assert_eq!(r.verdict, Stability::SemistableNotPoly);
        assert_eq!(r.clause, "stability.sl2r.deg-zero.one-zero");
    }
}
