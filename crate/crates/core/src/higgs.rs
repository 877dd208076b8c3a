//! Explicit Sp(4,R)- and SL(2,R)-Higgs data on a curve of genus `g ≥ 2`.
//!
//! Line bundles are tracked by their formal class: a half-integer power of
//! the canonical bundle `K` (relative to a fixed base square root), an extra
//! degree standing for a fixed generic line bundle, and a 2-torsion label in
//! F2^{2g}. Sections are abstract coefficient vectors whose length is the
//! dimension of the space of sections. Only the zero/nonzero pattern and
//! the scaling action enter the decisions below.

use std::borrow::Cow;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2::{self, F2Vec};
use crate::numfield::{FieldElem, Rational};

/// Curve data shared by every computation: the genus and the label of the
/// distinguished square root of `K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveCtx {
    genus: i64,
    spin_base: F2Vec,
}

impl CurveCtx {
    pub fn new(genus: i64) -> Result<Self> {
        if genus < 2 {
            return Err(Error::GenusTooSmall(genus));
        }
        Ok(CurveCtx {
            genus,
            spin_base: F2Vec::zeros(2 * genus as usize),
        })
    }

    /// Context whose base square root carries the label `spin_base`.
    pub fn with_spin_base(genus: i64, spin_base: F2Vec) -> Result<Self> {
        let mut ctx = Self::new(genus)?;
        spin_base.expect_len(ctx.two_g())?;
        ctx.spin_base = spin_base;
        Ok(ctx)
    }

    pub fn genus(&self) -> i64 {
        self.genus
    }

    pub fn spin_base(&self) -> &F2Vec {
        &self.spin_base
    }

    /// Length of torsion labels, `2g`.
    pub fn two_g(&self) -> usize {
        2 * self.genus as usize
    }

    /// `2g - 2`, the degree of `K`.
    pub fn deg_k(&self) -> i64 {
        2 * self.genus - 2
    }

    pub fn zero_torsion(&self) -> F2Vec {
        F2Vec::zeros(self.two_g())
    }

    fn check_torsion(&self, t: &F2Vec) -> Result<()> {
        t.expect_len(self.two_g())
    }
}

/// `K^{k/2} ⊗ M ⊗ τ`, where `K^{1/2}` is the base square root, `M` a fixed
/// generic bundle of degree `extra_degree` and `τ` a 2-torsion bundle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LineBundleClass {
    pub k_halves: i64,
    pub extra_degree: i64,
    pub torsion: F2Vec,
}

impl LineBundleClass {
    pub fn new(k_halves: i64, extra_degree: i64, torsion: F2Vec) -> Self {
        LineBundleClass {
            k_halves,
            extra_degree,
            torsion,
        }
    }

    pub fn trivial(ctx: &CurveCtx) -> Self {
        Self::new(0, 0, ctx.zero_torsion())
    }

    /// `K^{k/2}` for the base square root.
    pub fn k_power(ctx: &CurveCtx, k_halves: i64) -> Self {
        Self::new(k_halves, 0, ctx.zero_torsion())
    }

    /// The square root `K^{1/2} ⊗ τ`.
    pub fn spin(ctx: &CurveCtx, torsion: F2Vec) -> Self {
        Self::new(1, 0, torsion).check(ctx).expect("torsion of length 2g")
    }

    pub fn torsion_only(torsion: F2Vec) -> Self {
        Self::new(0, 0, torsion)
    }

    fn check(self, ctx: &CurveCtx) -> Result<Self> {
        ctx.check_torsion(&self.torsion)?;
        Ok(self)
    }

    pub fn degree(&self, ctx: &CurveCtx) -> i64 {
        self.extra_degree + self.k_halves * (ctx.genus - 1)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self::new(
            self.k_halves + other.k_halves,
            self.extra_degree + other.extra_degree,
            &self.torsion + &other.torsion,
        )
    }

    pub fn dual(&self) -> Self {
        Self::new(-self.k_halves, -self.extra_degree, self.torsion.clone())
    }

    pub fn pow(&self, n: i64) -> Self {
        let torsion = if n.rem_euclid(2) == 1 {
            self.torsion.clone()
        } else {
            F2Vec::zeros(self.torsion.len())
        };
        Self::new(self.k_halves * n, self.extra_degree * n, torsion)
    }

    /// True when the class is `K^{1/2} ⊗ τ` for some torsion `τ`.
    pub fn is_spin(&self) -> bool {
        self.k_halves == 1 && self.extra_degree == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.k_halves == 0 && self.extra_degree == 0 && self.torsion.is_zero()
    }
}

impl fmt::Display for LineBundleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.k_halves {
            0 => {}
            k if k % 2 == 0 => parts.push(format!("K^{}", k / 2)),
            k => parts.push(format!("K^({k}/2)")),
        }
        if self.extra_degree != 0 {
            parts.push(format!("M({})", self.extra_degree));
        }
        if !self.torsion.is_zero() {
            parts.push(format!("τ[{}]", self.torsion));
        }
        if parts.is_empty() {
            write!(f, "O")
        } else {
            write!(f, "{}", parts.join("⊗"))
        }
    }
}

/// Dimension of the space of holomorphic sections.
///
/// Outside `[0, 2g-2]` this is forced by degree. Inside that range only the
/// classes `O`, `τ`, `K` and `K⊗τ` are decided; anything else needs an
/// explicit value.
pub fn h0(ctx: &CurveCtx, bundle: &LineBundleClass) -> Result<usize> {
    ctx.check_torsion(&bundle.torsion)?;
    let g = ctx.genus;
    let d = bundle.degree(ctx);
    if d < 0 {
        return Ok(0);
    }
    if d > 2 * g - 2 {
        return Ok((d - g + 1) as usize);
    }
    if bundle.extra_degree == 0 {
        let twisted = !bundle.torsion.is_zero();
        match bundle.k_halves {
            0 => return Ok(usize::from(!twisted)),
            2 => return Ok(if twisted { g - 1 } else { g } as usize),
            _ => {}
        }
    }
    Err(Error::RequiresExplicitH0 {
        bundle: bundle.to_string(),
    })
}

/// `|d| ≤ 2g - 2`.
pub fn milnor_wood(ctx: &CurveCtx, d: i64) -> bool {
    d.abs() <= ctx.deg_k()
}

/// A section of a line bundle, recorded by its coordinates in a basis of
/// `H^0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionSlot {
    pub bundle: LineBundleClass,
    pub coeffs: Vec<FieldElem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h0_override: Option<usize>,
}

impl SectionSlot {
    pub fn new(bundle: LineBundleClass, coeffs: Vec<FieldElem>) -> Self {
        SectionSlot {
            bundle,
            coeffs,
            h0_override: None,
        }
    }

    /// Slot for a bundle whose `h0` is not decided by degree; the coefficient
    /// count is taken as the dimension.
    pub fn with_override(bundle: LineBundleClass, coeffs: Vec<FieldElem>) -> Self {
        let n = coeffs.len();
        SectionSlot {
            bundle,
            coeffs,
            h0_override: Some(n),
        }
    }

    pub fn zero(ctx: &CurveCtx, bundle: LineBundleClass) -> Result<Self> {
        let n = h0(ctx, &bundle)?;
        Ok(Self::new(bundle, vec![FieldElem::zero(); n]))
    }

    /// Section whose first coordinate is 1 and the rest 0.
    pub fn unit(ctx: &CurveCtx, bundle: LineBundleClass) -> Result<Self> {
        let mut s = Self::zero(ctx, bundle)?;
        if let Some(c) = s.coeffs.first_mut() {
            *c = FieldElem::one();
        }
        Ok(s)
    }

    /// Zero section, or the first basis section when `nonzero`. A bundle whose
    /// `h0` is not decided by degree gets a one-dimensional override.
    pub fn sample(ctx: &CurveCtx, bundle: LineBundleClass, nonzero: bool) -> Result<Self> {
        let (len, computable) = match h0(ctx, &bundle) {
            Ok(k) => (k, true),
            Err(Error::RequiresExplicitH0 { .. }) => (1, false),
            Err(e) => return Err(e),
        };
        let mut coeffs = vec![FieldElem::zero(); len];
        if nonzero {
            let first = coeffs.first_mut().ok_or_else(|| {
                Error::OutOfClassifiedRange(format!("{bundle} has no nonzero sections"))
            })?;
            *first = FieldElem::one();
        }
        Ok(if computable {
            Self::new(bundle, coeffs)
        } else {
            Self::with_override(bundle, coeffs)
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(FieldElem::is_zero)
    }

    pub fn scale(&self, s: &FieldElem) -> Self {
        SectionSlot {
            bundle: self.bundle.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            h0_override: self.h0_override,
        }
    }

    pub fn expected_len(&self, ctx: &CurveCtx) -> Result<usize> {
        match (h0(ctx, &self.bundle), self.h0_override) {
            (Ok(n), Some(o)) if o != n => Err(Error::SlotLength {
                bundle: self.bundle.to_string(),
                expected: n,
                got: o,
            }),
            (Ok(n), _) => Ok(n),
            (Err(Error::RequiresExplicitH0 { .. }), Some(n)) => Ok(n),
            (Err(e), _) => Err(e),
        }
    }

    pub fn validate(&self, ctx: &CurveCtx, expected_bundle: &LineBundleClass) -> Result<()> {
        if self.bundle != *expected_bundle {
            return Err(Error::OutOfClassifiedRange(format!(
                "section lives in {} but the shape requires {}",
                self.bundle, expected_bundle
            )));
        }
        let n = self.expected_len(ctx)?;
        if n != self.coeffs.len() {
            return Err(Error::SlotLength {
                bundle: self.bundle.to_string(),
                expected: n,
                got: self.coeffs.len(),
            });
        }
        Ok(())
    }
}

/// The explicit Higgs data handled by the library.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum HiggsDatum {
    /// `V = N ⊕ N⁻¹K`, `γ = (0 1; 1 0)`, `β = (β1 β3; β3 β2)` with
    /// `β1 ∈ H⁰(N²K)`, `β2 ∈ H⁰(N⁻²K³)`, `β3 ∈ H⁰(K²)`.
    Diagonal {
        n: LineBundleClass,
        beta1: SectionSlot,
        beta2: SectionSlot,
        beta3: SectionSlot,
    },
    /// `V = W ⊗ K^{1/2}` with `W` an O(2,C)-bundle coming from a connected
    /// double cover. `w2` is an input. `beta_scalar` records that `β` is a
    /// multiple of the orthogonal structure.
    CoverOrth {
        w1: F2Vec,
        #[serde(with = "f2::bit")]
        w2: bool,
        beta_present: bool,
        #[serde(default)]
        beta_scalar: bool,
    },
    /// `V = (L1 ⊕ L2) ⊗ K^{1/2}` with `L_i² = O`, diagonal `γ` and
    /// `β = diag(β1, β2)`, `β_i ∈ H⁰(K²)`.
    TorsionSplit {
        l1_torsion: F2Vec,
        l2_torsion: F2Vec,
        beta1: SectionSlot,
        beta2: SectionSlot,
    },
    /// SL(2,R)-Higgs bundle `(L, β̃, γ̃)` with `β̃ ∈ H⁰(L²K)`, `γ̃ ∈ H⁰(L⁻²K)`.
    Sl2r {
        l: LineBundleClass,
        beta: SectionSlot,
        gamma: SectionSlot,
    },
    /// Image of an SL(2,R)-Higgs bundle under the irreducible embedding:
    /// `V = L³ ⊕ L⁻¹`, `β = (0 3β̃; 3β̃ γ̃)`, `γ = (0 γ̃; γ̃ 4β̃)`.
    IrrImage {
        l: LineBundleClass,
        beta_tilde: SectionSlot,
        gamma_tilde: SectionSlot,
    },
    /// Direct sum, giving Sp(2n,R)-Higgs data.
    DirectSum { summands: Vec<HiggsDatum> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    StrictlyPolystable,
    SemistableNotPoly,
    Unstable,
}

impl Stability {
    pub fn is_polystable(self) -> bool {
        matches!(self, Stability::Stable | Stability::StrictlyPolystable)
    }

    pub fn is_semistable(self) -> bool {
        self != Stability::Unstable
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub verdict: Stability,
    pub clause: &'static str,
    /// Stable but with extra automorphisms.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub non_simple: bool,
}

fn report(verdict: Stability, clause: &'static str) -> StabilityReport {
    StabilityReport {
        verdict,
        clause,
        non_simple: false,
    }
}

/// Bundles carried by the `β` and `γ` slots of each shape.
pub mod slots {
    use super::*;

    pub fn diagonal(ctx: &CurveCtx, n: &LineBundleClass) -> [LineBundleClass; 3] {
        let k = LineBundleClass::k_power(ctx, 2);
        [
            n.pow(2).tensor(&k),
            n.pow(-2).tensor(&LineBundleClass::k_power(ctx, 6)),
            LineBundleClass::k_power(ctx, 4),
        ]
    }

    pub fn sl2r(ctx: &CurveCtx, l: &LineBundleClass) -> [LineBundleClass; 2] {
        let k = LineBundleClass::k_power(ctx, 2);
        [l.pow(2).tensor(&k), l.pow(-2).tensor(&k)]
    }

    pub fn torsion_split(ctx: &CurveCtx) -> LineBundleClass {
        LineBundleClass::k_power(ctx, 4)
    }
}

impl HiggsDatum {
    /// `n` for Sp(2n,R) data.
    pub fn rank(&self) -> usize {
        match self {
            HiggsDatum::Sl2r { .. } => 1,
            HiggsDatum::DirectSum { summands } => summands.iter().map(HiggsDatum::rank).sum(),
            _ => 2,
        }
    }

    /// Check torsion lengths and slot shapes.
    pub fn validate(&self, ctx: &CurveCtx) -> Result<()> {
        match self {
            HiggsDatum::Diagonal {
                n,
                beta1,
                beta2,
                beta3,
            } => {
                ctx.check_torsion(&n.torsion)?;
                let [b1, b2, b3] = slots::diagonal(ctx, n);
                beta1.validate(ctx, &b1)?;
                beta2.validate(ctx, &b2)?;
                beta3.validate(ctx, &b3)
            }
            HiggsDatum::CoverOrth { w1, .. } => ctx.check_torsion(w1),
            HiggsDatum::TorsionSplit {
                l1_torsion,
                l2_torsion,
                beta1,
                beta2,
            } => {
                ctx.check_torsion(l1_torsion)?;
                ctx.check_torsion(l2_torsion)?;
                let k2 = slots::torsion_split(ctx);
                beta1.validate(ctx, &k2)?;
                beta2.validate(ctx, &k2)
            }
            HiggsDatum::Sl2r { l, beta, gamma } => {
                ctx.check_torsion(&l.torsion)?;
                let [b, c] = slots::sl2r(ctx, l);
                beta.validate(ctx, &b)?;
                gamma.validate(ctx, &c)
            }
            HiggsDatum::IrrImage {
                l,
                beta_tilde,
                gamma_tilde,
            } => {
                ctx.check_torsion(&l.torsion)?;
                let [b, c] = slots::sl2r(ctx, l);
                beta_tilde.validate(ctx, &b)?;
                gamma_tilde.validate(ctx, &c)
            }
            HiggsDatum::DirectSum { summands } => {
                summands.iter().try_for_each(|s| s.validate(ctx))
            }
        }
    }

    /// Line-bundle summands of `V` when it splits.
    pub fn split_summands(&self, ctx: &CurveCtx) -> Option<Vec<LineBundleClass>> {
        let half = LineBundleClass::k_power(ctx, 1);
        match self {
            HiggsDatum::Diagonal { n, .. } => Some(vec![
                n.clone(),
                n.dual().tensor(&LineBundleClass::k_power(ctx, 2)),
            ]),
            HiggsDatum::TorsionSplit {
                l1_torsion,
                l2_torsion,
                ..
            } => Some(vec![
                LineBundleClass::torsion_only(l1_torsion.clone()).tensor(&half),
                LineBundleClass::torsion_only(l2_torsion.clone()).tensor(&half),
            ]),
            HiggsDatum::Sl2r { l, .. } => Some(vec![l.clone()]),
            HiggsDatum::IrrImage { l, .. } => Some(vec![l.pow(3), l.dual()]),
            HiggsDatum::CoverOrth { .. } => None,
            HiggsDatum::DirectSum { summands } => {
                let mut out = Vec::new();
                for s in summands {
                    out.extend(s.split_summands(ctx)?);
                }
                Some(out)
            }
        }
    }
}

/// Toledo invariant `deg V`.
pub fn toledo(ctx: &CurveCtx, datum: &HiggsDatum) -> i64 {
    match datum {
        HiggsDatum::CoverOrth { .. } => ctx.deg_k(),
        HiggsDatum::DirectSum { summands } => summands.iter().map(|s| toledo(ctx, s)).sum(),
        other => other
            .split_summands(ctx)
            .expect("split shape")
            .iter()
            .map(|b| b.degree(ctx))
            .sum(),
    }
}

/// Toledo invariant equals `n(g-1)`.
pub fn is_maximal(ctx: &CurveCtx, datum: &HiggsDatum) -> bool {
    toledo(ctx, datum) == datum.rank() as i64 * (ctx.genus - 1)
}

fn spin_sl2r(ctx: &CurveCtx, datum: &HiggsDatum) -> Option<(F2Vec, FieldElem, SectionSlot)> {
    match datum {
        HiggsDatum::Sl2r { l, beta, gamma } if l.is_spin() && gamma.coeffs.len() == 1 => {
            let gt = gamma.coeffs[0].clone();
            if gt.is_zero() || beta.coeffs.len() as i64 != 3 * ctx.genus - 3 {
                return None;
            }
            Some((l.torsion.clone(), gt, beta.clone()))
        }
        _ => None,
    }
}

/// Rewrite a sum of two maximal SL(2,R) pieces with `L_i = K^{1/2} ⊗ τ_i`
/// as the torsion-split shape, normalising `γ̃_i` to 1.
fn merge_pair(ctx: &CurveCtx, a: &HiggsDatum, b: &HiggsDatum) -> Option<HiggsDatum> {
    let (t1, g1, b1) = spin_sl2r(ctx, a)?;
    let (t2, g2, b2) = spin_sl2r(ctx, b)?;
    let k2 = slots::torsion_split(ctx);
    let rebase = |s: SectionSlot, g: &FieldElem| SectionSlot::new(k2.clone(), s.scale(g).coeffs);
    Some(HiggsDatum::TorsionSplit {
        l1_torsion: t1,
        l2_torsion: t2,
        beta1: rebase(b1, &g1),
        beta2: rebase(b2, &g2),
    })
}

fn flatten_into(d: HiggsDatum, out: &mut Vec<HiggsDatum>) {
    match d {
        HiggsDatum::DirectSum { summands } => {
            for s in summands {
                flatten_into(s, out);
            }
        }
        other => out.push(other),
    }
}

/// Direct sum of Higgs data. Nested sums are flattened, the empty sum is the
/// identity, and two maximal SL(2,R) pieces in square-root form become the
/// torsion-split Sp(4,R) shape.
pub fn direct_sum(ctx: &CurveCtx, a: &HiggsDatum, b: &HiggsDatum) -> HiggsDatum {
    let mut parts = Vec::new();
    flatten_into(a.clone(), &mut parts);
    flatten_into(b.clone(), &mut parts);
    match parts.len() {
        1 => parts.pop().expect("one summand"),
        2 => merge_pair(ctx, &parts[0], &parts[1])
            .unwrap_or(HiggsDatum::DirectSum { summands: parts }),
        _ => HiggsDatum::DirectSum { summands: parts },
    }
}

/// Canonical Sp(4,R) representative: unwraps singleton sums and merges
/// pairs of SL(2,R) pieces.
fn normalized<'a>(ctx: &CurveCtx, datum: &'a HiggsDatum) -> Cow<'a, HiggsDatum> {
    if let HiggsDatum::DirectSum { summands } = datum {
        let mut parts = Vec::new();
        for s in summands {
            flatten_into(s.clone(), &mut parts);
        }
        if parts.len() == 1 {
            return Cow::Owned(parts.pop().expect("one summand"));
        }
        if parts.len() == 2 {
            if let Some(m) = merge_pair(ctx, &parts[0], &parts[1]) {
                return Cow::Owned(m);
            }
        }
    }
    Cow::Borrowed(datum)
}

/// Stability of an SL(2,R)-Higgs bundle.
pub fn stability_sl2(ctx: &CurveCtx, datum: &HiggsDatum) -> Result<StabilityReport> {
    let HiggsDatum::Sl2r { l, beta, gamma } = datum else {
        return Err(Error::OutOfClassifiedRange(
            "SL(2,R) stability needs an sl2r datum".into(),
        ));
    };
    datum.validate(ctx)?;
    let d = l.degree(ctx);
    let g = ctx.genus;
    let (b, c) = (!beta.is_zero(), !gamma.is_zero());
    use Stability::*;
    Ok(if d > 0 {
        if d > g - 1 {
            report(Unstable, "stability.sl2r.deg-positive.above-bound")
        } else if c {
            report(Stable, "stability.sl2r.deg-positive.gamma-nonzero")
        } else {
            report(Unstable, "stability.sl2r.deg-positive.gamma-zero")
        }
    } else if d < 0 {
        if d < 1 - g {
            report(Unstable, "stability.sl2r.deg-negative.below-bound")
        } else if b {
            report(Stable, "stability.sl2r.deg-negative.beta-nonzero")
        } else {
            report(Unstable, "stability.sl2r.deg-negative.beta-zero")
        }
    } else {
        match (b, c) {
            (false, false) => report(StrictlyPolystable, "stability.sl2r.deg-zero.both-zero"),
            (true, true) => report(StrictlyPolystable, "stability.sl2r.deg-zero.both-nonzero"),
            _ => report(SemistableNotPoly, "stability.sl2r.deg-zero.one-zero"),
        }
    })
}

/// Stability of an Sp(4,R)-Higgs bundle in one of the classified shapes.
pub fn stability_sp4(ctx: &CurveCtx, datum: &HiggsDatum) -> Result<StabilityReport> {
    datum.validate(ctx)?;
    let datum = normalized(ctx, datum);
    let g = ctx.genus;
    use Stability::*;
    match datum.as_ref() {
        HiggsDatum::Diagonal {
            n, beta1, beta2, ..
        } => {
            let dn = n.degree(ctx);
            let (b1, b2) = (!beta1.is_zero(), !beta2.is_zero());
            if g - 1 < dn && dn <= 3 * g - 3 {
                Ok(if b2 {
                    report(Stable, "stability.diagonal.c-positive.beta2-nonzero")
                } else {
                    report(Unstable, "stability.diagonal.c-positive.beta2-zero")
                })
            } else if dn == g - 1 {
                Ok(match (b1, b2) {
                    (true, true) => report(Stable, "stability.diagonal.c-zero.both-nonzero"),
                    (true, false) => report(
                        SemistableNotPoly,
                        "stability.diagonal.c-zero.only-beta1-nonzero",
                    ),
                    (false, true) => report(
                        SemistableNotPoly,
                        "stability.diagonal.c-zero.only-beta2-nonzero",
                    ),
                    (false, false) => {
                        report(StrictlyPolystable, "stability.diagonal.c-zero.both-zero")
                    }
                })
            } else {
                Err(Error::OutOfClassifiedRange(format!(
                    "deg N = {dn} outside [g-1, 3g-3] = [{}, {}]",
                    g - 1,
                    3 * g - 3
                )))
            }
        }
        HiggsDatum::CoverOrth { w1, .. } => {
            if w1.is_zero() {
                Err(Error::OutOfClassifiedRange(
                    "a connected double cover needs w1 != 0".into(),
                ))
            } else {
                Ok(report(Stable, "stability.cover-orth.stable-orthogonal"))
            }
        }
        HiggsDatum::TorsionSplit {
            l1_torsion,
            l2_torsion,
            ..
        } => Ok(if l1_torsion == l2_torsion {
            report(StrictlyPolystable, "stability.torsion-split.equal-summands")
        } else {
            StabilityReport {
                verdict: Stable,
                clause: "stability.torsion-split.distinct-summands",
                non_simple: true,
            }
        }),
        HiggsDatum::IrrImage {
            l,
            beta_tilde,
            gamma_tilde,
        } => {
            let d = l.degree(ctx);
            if d < 0 || d > g - 1 {
                return Err(Error::DegreeOutOfRange {
                    deg: d,
                    lo: 0,
                    hi: g - 1,
                });
            }
            let (b, c) = (!beta_tilde.is_zero(), !gamma_tilde.is_zero());
            Ok(if d > 0 {
                if c {
                    report(Stable, "stability.irreducible-image.deg-positive.gamma-nonzero")
                } else {
                    report(Unstable, "stability.irreducible-image.deg-positive.gamma-zero")
                }
            } else {
                match (b, c) {
                    (false, false) => report(
                        StrictlyPolystable,
                        "stability.irreducible-image.deg-zero.both-zero",
                    ),
                    (true, true) => {
                        report(Stable, "stability.irreducible-image.deg-zero.both-nonzero")
                    }
                    _ => report(
                        SemistableNotPoly,
                        "stability.irreducible-image.deg-zero.one-zero",
                    ),
                }
            })
        }
        HiggsDatum::Sl2r { .. } => Err(Error::OutOfClassifiedRange(
            "an SL(2,R) datum alone is not Sp(4,R) data".into(),
        )),
        HiggsDatum::DirectSum { .. } => stability_sum(ctx, datum.as_ref()),
    }
}

/// Stability of any datum, dispatching on its shape.
pub fn stability(ctx: &CurveCtx, datum: &HiggsDatum) -> Result<StabilityReport> {
    match datum {
        HiggsDatum::Sl2r { .. } => stability_sl2(ctx, datum),
        _ => stability_sp4(ctx, datum),
    }
}

/// A direct sum is polystable when every summand is; any unstable or
/// non-polystable summand is inherited.
fn stability_sum(ctx: &CurveCtx, datum: &HiggsDatum) -> Result<StabilityReport> {
    let HiggsDatum::DirectSum { summands } = datum else {
        unreachable!("called on a direct sum")
    };
    if summands.is_empty() {
        return Err(Error::OutOfClassifiedRange("empty direct sum".into()));
    }
    let mut worst = Stability::StrictlyPolystable;
    for s in summands {
        match stability(ctx, s)?.verdict {
            Stability::Unstable => {
                return Ok(report(Stability::Unstable, "stability.direct-sum.unstable-summand"))
            }
            Stability::SemistableNotPoly => worst = Stability::SemistableNotPoly,
            _ => {}
        }
    }
    Ok(if worst == Stability::SemistableNotPoly {
        report(worst, "stability.direct-sum.semistable-summand")
    } else {
        report(worst, "stability.direct-sum.all-polystable")
    })
}

/// The three kinds of rank-2 orthogonal Cayley partner.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum CayleyCase {
    /// `W = L ⊕ L⁻¹`, `c = deg L`.
    SplitLine { l: LineBundleClass, c: i64 },
    /// `W` from a connected double cover with the stored invariants.
    ConnectedCover {
        w1: F2Vec,
        #[serde(with = "f2::bit")]
        w2: bool,
    },
    /// `W = M1 ⊕ M2` with `M_i² = O`.
    TorsionPair { m1: F2Vec, m2: F2Vec },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CayleyPartner {
    pub w: CayleyCase,
    pub theta_present: bool,
}

fn ensure_max_poly<'a>(ctx: &CurveCtx, datum: &'a HiggsDatum) -> Result<Cow<'a, HiggsDatum>> {
    datum.validate(ctx)?;
    let t = toledo(ctx, datum);
    let max = datum.rank() as i64 * (ctx.genus - 1);
    if t != max {
        return Err(Error::NotMaximal { toledo: t, max });
    }
    let s = stability(ctx, datum)?;
    if !s.verdict.is_polystable() {
        return Err(Error::NotPolystable(s.clause.to_string()));
    }
    Ok(normalized(ctx, datum))
}

fn ensure_sp4<'a>(ctx: &CurveCtx, datum: &'a HiggsDatum) -> Result<Cow<'a, HiggsDatum>> {
    let d = ensure_max_poly(ctx, datum)?;
    if d.rank() != 2 {
        return Err(Error::OutOfClassifiedRange(format!(
            "expected Sp(4,R) data, got rank {}",
            d.rank()
        )));
    }
    Ok(d)
}

/// Cayley partner `W = V* ⊗ L0` for the square root `L0 = K^{1/2} ⊗ spin_choice`.
pub fn cayley_partner(
    ctx: &CurveCtx,
    datum: &HiggsDatum,
    spin_choice: &F2Vec,
) -> Result<CayleyPartner> {
    ctx.check_torsion(spin_choice)?;
    let d = ensure_sp4(ctx, datum)?;
    let shift = LineBundleClass::new(-1, 0, spin_choice.clone());
    match d.as_ref() {
        HiggsDatum::Diagonal {
            n,
            beta1,
            beta2,
            beta3,
        } => {
            let l = n.tensor(&shift);
            let c = l.degree(ctx);
            Ok(CayleyPartner {
                w: CayleyCase::SplitLine { l, c },
                theta_present: !(beta1.is_zero() && beta2.is_zero() && beta3.is_zero()),
            })
        }
        HiggsDatum::CoverOrth {
            w1,
            w2,
            beta_present,
            ..
        } => Ok(CayleyPartner {
            w: CayleyCase::ConnectedCover {
                w1: w1.clone(),
                w2: *w2,
            },
            theta_present: *beta_present,
        }),
        HiggsDatum::TorsionSplit {
            l1_torsion,
            l2_torsion,
            beta1,
            beta2,
        } => Ok(CayleyPartner {
            w: CayleyCase::TorsionPair {
                m1: l1_torsion + spin_choice,
                m2: l2_torsion + spin_choice,
            },
            theta_present: !(beta1.is_zero() && beta2.is_zero()),
        }),
        HiggsDatum::IrrImage { l, .. } => {
            // N = L³, so the Cayley line is L³ ⊗ K^{-1/2}: degree 2g-2.
            let lc = l.pow(3).tensor(&shift);
            let c = lc.degree(ctx);
            Ok(CayleyPartner {
                w: CayleyCase::SplitLine { l: lc, c },
                theta_present: true,
            })
        }
        _ => Err(Error::OutOfClassifiedRange(
            "no Cayley partner for this shape".into(),
        )),
    }
}

/// Second topological invariant: the integer `c` when `w1 = 0` in rank 2,
/// otherwise `w2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SecondInvariant {
    C(i64),
    #[serde(serialize_with = "f2::bit::serialize")]
    W2(bool),
}

impl SecondInvariant {
    /// Reduction mod 2.
    pub fn w2(self) -> bool {
        match self {
            SecondInvariant::C(c) => c.rem_euclid(2) == 1,
            SecondInvariant::W2(w) => w,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SWInvariants {
    pub toledo: i64,
    pub w1: F2Vec,
    #[serde(flatten)]
    pub second: SecondInvariant,
}

/// Invariants `(w1, w2)` of one summand, as classes in F2.
fn summand_classes(ctx: &CurveCtx, s: &HiggsDatum) -> Result<(F2Vec, bool)> {
    match s {
        HiggsDatum::Sl2r { l, .. } => {
            if !l.is_spin() {
                return Err(Error::OutOfClassifiedRange(
                    "maximal SL(2,R) piece needs L = K^{1/2} ⊗ τ".into(),
                ));
            }
            Ok((l.torsion.clone(), false))
        }
        other => {
            let inv = sw_invariants(ctx, other)?;
            Ok((inv.w1.clone(), inv.second.w2()))
        }
    }
}

/// Stiefel–Whitney data of a maximal polystable datum, computed with the
/// base square root.
pub fn sw_invariants(ctx: &CurveCtx, datum: &HiggsDatum) -> Result<SWInvariants> {
    let d = ensure_max_poly(ctx, datum)?;
    let t = toledo(ctx, &d);
    let zero = ctx.zero_torsion();
    if d.rank() == 2 {
        let partner = cayley_partner(ctx, &d, &zero)?;
        let (w1, second) = match partner.w {
            CayleyCase::SplitLine { c, .. } => (zero, SecondInvariant::C(c)),
            CayleyCase::ConnectedCover { w1, w2 } => (w1, SecondInvariant::W2(w2)),
            CayleyCase::TorsionPair { m1, m2 } => {
                let w1 = &m1 + &m2;
                if w1.is_zero() {
                    // (M ⊕ M, diag(q, q)) ≅ M ⊕ M⁻¹ with a degree-0 line.
                    (w1, SecondInvariant::C(0))
                } else {
                    let w2 = f2::cup(&m1, &m2)?;
                    (w1, SecondInvariant::W2(w2))
                }
            }
        };
        return Ok(SWInvariants {
            toledo: t,
            w1,
            second,
        });
    }
    let parts: Vec<HiggsDatum> = match d.as_ref() {
        HiggsDatum::DirectSum { summands } => summands.clone(),
        other => vec![other.clone()],
    };
    let mut w1 = zero;
    let mut w2 = false;
    for p in &parts {
        let (a, b) = summand_classes(ctx, p)?;
        // (1 + w1 + w2)(1 + a + b) in degree two: w2 + b + w1·a.
        w2 ^= b ^ f2::cup(&w1, &a)?;
        w1 = &w1 + &a;
    }
    Ok(SWInvariants {
        toledo: t,
        w1,
        second: SecondInvariant::W2(w2),
    })
}

/// Shape-level test for a reduction to `G_Δ`: `V = U ⊗ L` with `L² = K` and
/// `β` a multiple of the orthogonal structure on `U`.
pub fn gdelta_reduction_check(ctx: &CurveCtx, datum: &HiggsDatum) -> Result<bool> {
    let d = ensure_max_poly(ctx, datum)?;
    Ok(match d.as_ref() {
        HiggsDatum::Diagonal {
            n, beta1, beta2, ..
        } => n.degree(ctx) == ctx.genus - 1 && beta1.is_zero() && beta2.is_zero(),
        HiggsDatum::CoverOrth {
            beta_present,
            beta_scalar,
            ..
        } => !beta_present || *beta_scalar,
        HiggsDatum::TorsionSplit { beta1, beta2, .. } => beta1.coeffs == beta2.coeffs,
        _ => false,
    })
}

/// Shape-level test for a splitting as a sum of two maximal SL(2,R)-Higgs
/// bundles.
pub fn sl2xsl2_reduction_check(ctx: &CurveCtx, datum: &HiggsDatum) -> Result<bool> {
    let d = ensure_max_poly(ctx, datum)?;
    Ok(match d.as_ref() {
        // Both summands must equal N = N⁻¹K, and β must be diagonal in the
        // basis (e1 ± e2), which forces β1 = β2.
        HiggsDatum::Diagonal {
            n, beta1, beta2, ..
        } => n.is_spin() && beta1.coeffs == beta2.coeffs,
        HiggsDatum::TorsionSplit { .. } => true,
        _ => false,
    })
}

/// Degree test on the connected double cover `X' -> X`: `g' = 2g - 1`,
/// `deg p*V = 2 deg V`, and the two line summands of `p*V` must square to
/// `K_{X'}`.
pub fn double_cover_degree_check(ctx: &CurveCtx, deg_v: i64, deg_summand: i64) -> bool {
    let g_cover = 2 * ctx.genus - 1;
    let pulled = 2 * deg_v;
    pulled % 2 == 0 && pulled / 2 == g_cover - 1 && 2 * deg_summand == g_cover - 1
}

/// Shape-level test for a reduction to `G_p`.
pub fn gp_reduction_check(ctx: &CurveCtx, datum: &HiggsDatum) -> Result<bool> {
    if sl2xsl2_reduction_check(ctx, datum)? {
        return Ok(true);
    }
    let d = normalized(ctx, datum);
    Ok(match d.as_ref() {
        HiggsDatum::CoverOrth { .. } => {
            let deg_v = toledo(ctx, &d);
            double_cover_degree_check(ctx, deg_v, deg_v / 2)
        }
        // With w1 = 0 the cover test forces deg N = g - 1; the remaining
        // condition is the same diagonal-β test as above, already failed.
        _ => false,
    })
}

/// Shape-level test for a reduction to the irreducible `G_i`.
///
/// The irreducible image is recognised directly. A diagonal datum is
/// recognised only in the `β̃ = 0` slice, where `β1 = β3 = 0`.
pub fn gi_reduction_check(ctx: &CurveCtx, datum: &HiggsDatum) -> Result<bool> {
    let d = ensure_max_poly(ctx, datum)?;
    Ok(match d.as_ref() {
        HiggsDatum::IrrImage { l, .. } => l.is_spin(),
        HiggsDatum::Diagonal {
            n,
            beta1,
            beta2,
            beta3,
        } => n.k_halves == 3 && n.extra_degree == 0 && beta1.is_zero() && beta3.is_zero() && !beta2.is_zero(),
        _ => false,
    })
}

/// Push an SL(2,R)-Higgs bundle through the irreducible representation.
pub fn irr_embed(ctx: &CurveCtx, datum: &HiggsDatum) -> Result<HiggsDatum> {
    let HiggsDatum::Sl2r { l, beta, gamma } = datum else {
        return Err(Error::OutOfClassifiedRange(
            "irreducible embedding takes an sl2r datum".into(),
        ));
    };
    let d = l.degree(ctx);
    if d < 0 || d > ctx.genus - 1 {
        return Err(Error::DegreeOutOfRange {
            deg: d,
            lo: 0,
            hi: ctx.genus - 1,
        });
    }
    let s = stability_sl2(ctx, datum)?;
    if !s.verdict.is_polystable() {
        return Err(Error::NotPolystable(s.clause.to_string()));
    }
    Ok(HiggsDatum::IrrImage {
        l: l.clone(),
        beta_tilde: beta.clone(),
        gamma_tilde: gamma.clone(),
    })
}

/// Normal form of the irreducible image when `L² = K`:
/// `γ = γ̃ (0 1; 1 0)`, `β = γ̃ (β1 β3; β3 1)` with `β3 = 5 β̃/γ̃` and
/// `β1 = (16/25) β3²`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IrrNormalForm {
    pub n: LineBundleClass,
    pub gamma_scale: FieldElem,
    pub beta3: SectionSlot,
    /// `β1` is the square of `β3` times 16/25, so it vanishes with `β3`.
    pub beta1_is_zero: bool,
    pub beta2: SectionSlot,
}

pub fn irr_normal_form(ctx: &CurveCtx, datum: &HiggsDatum) -> Result<IrrNormalForm> {
    let HiggsDatum::IrrImage {
        l,
        beta_tilde,
        gamma_tilde,
    } = datum
    else {
        return Err(Error::OutOfClassifiedRange(
            "normal form applies to irreducible images".into(),
        ));
    };
    if !l.is_spin() {
        return Err(Error::DegreeOutOfRange {
            deg: l.degree(ctx),
            lo: ctx.genus - 1,
            hi: ctx.genus - 1,
        });
    }
    datum.validate(ctx)?;
    let gt = gamma_tilde
        .coeffs
        .first()
        .filter(|c| !c.is_zero())
        .ok_or(Error::SingularNormalization)?
        .clone();
    let r = &FieldElem::from_int(5) * &gt.inv();
    let beta3 = SectionSlot::new(LineBundleClass::k_power(ctx, 4), beta_tilde.scale(&r).coeffs);
    let n = l.pow(3);
    let [_, b2_bundle, _] = slots::diagonal(ctx, &n);
    Ok(IrrNormalForm {
        beta1_is_zero: beta3.is_zero(),
        beta3,
        beta2: SectionSlot::unit(ctx, b2_bundle)?,
        n,
        gamma_scale: gt,
    })
}

/// Local minimum of the Hitchin function on the datum's component.
pub fn is_hitchin_minimum(ctx: &CurveCtx, datum: &HiggsDatum) -> Result<bool> {
    let d = ensure_sp4(ctx, datum)?;
    let inv = sw_invariants(ctx, &d)?;
    let c = match inv.second {
        SecondInvariant::C(c) if inv.w1.is_zero() => Some(c),
        _ => None,
    };
    Ok(match d.as_ref() {
        HiggsDatum::Diagonal {
            beta1,
            beta2,
            beta3,
            ..
        } => match c {
            Some(0) => beta1.is_zero() && beta2.is_zero() && beta3.is_zero(),
            _ => beta1.is_zero() && beta3.is_zero(),
        },
        HiggsDatum::IrrImage { beta_tilde, .. } => beta_tilde.is_zero(),
        HiggsDatum::CoverOrth { beta_present, .. } => !beta_present,
        HiggsDatum::TorsionSplit { beta1, beta2, .. } => beta1.is_zero() && beta2.is_zero(),
        _ => false,
    })
}

/// Canonical representative under `(β1, β2, β3) -> (t²β1, t⁻²β2, β3)`:
/// the first nonzero coordinate of `β2` becomes 1.
pub fn iso_normal_form(ctx: &CurveCtx, datum: &HiggsDatum) -> Result<HiggsDatum> {
    let HiggsDatum::Diagonal {
        n,
        beta1,
        beta2,
        beta3,
    } = datum
    else {
        return Err(Error::OutOfClassifiedRange(
            "normal form applies to the diagonal shape".into(),
        ));
    };
    datum.validate(ctx)?;
    let g = ctx.genus;
    let c = n.degree(ctx) - (g - 1);
    if c <= 0 || c > 2 * g - 2 {
        return Err(Error::DegreeOutOfRange {
            deg: c,
            lo: 1,
            hi: 2 * g - 2,
        });
    }
    if c == 2 * g - 2 {
        return Ok(datum.clone());
    }
    let Some(s) = beta2.coeffs.iter().find(|x| !x.is_zero()) else {
        return Err(Error::UnstableInput("beta2 = 0".into()));
    };
    let t2 = s.clone();
    Ok(HiggsDatum::Diagonal {
        n: n.clone(),
        beta1: beta1.scale(&t2),
        beta2: beta2.scale(&t2.inv()),
        beta3: beta3.clone(),
    })
}

/// Apply `(β1, β2) -> (t²β1, t⁻²β2)` for a given `t²`.
pub fn scale_diagonal(datum: &HiggsDatum, t2: &FieldElem) -> Option<HiggsDatum> {
    match datum {
        HiggsDatum::Diagonal {
            n,
            beta1,
            beta2,
            beta3,
        } => Some(HiggsDatum::Diagonal {
            n: n.clone(),
            beta1: beta1.scale(t2),
            beta2: beta2.scale(&t2.try_inv().ok()?),
            beta3: beta3.clone(),
        }),
        _ => None,
    }
}

/// Diagonal datum with `deg N = g - 1 + c`, built from `N = K^{1/2} ⊗ M ⊗ τ`
/// with `deg M = c`. Slots whose dimension is not decided by degree use a
/// one-dimensional override.
pub fn diagonal_with_c(
    ctx: &CurveCtx,
    c: i64,
    torsion: F2Vec,
    beta1_nonzero: bool,
    beta2_nonzero: bool,
    beta3_nonzero: bool,
) -> Result<HiggsDatum> {
    ctx.check_torsion(&torsion)?;
    let n = LineBundleClass::new(1, c, torsion);
    let [b1, b2, b3] = slots::diagonal(ctx, &n);
    let mk = |bundle, nonzero| SectionSlot::sample(ctx, bundle, nonzero);
    Ok(HiggsDatum::Diagonal {
        beta1: mk(b1, beta1_nonzero)?,
        beta2: mk(b2, beta2_nonzero)?,
        beta3: mk(b3, beta3_nonzero)?,
        n,
    })
}

/// SL(2,R) datum with given `L`, filling `β̃` and `γ̃` with either zero or the
/// first basis section.
pub fn sl2r_datum(
    ctx: &CurveCtx,
    l: LineBundleClass,
    beta_nonzero: bool,
    gamma_nonzero: bool,
) -> Result<HiggsDatum> {
    let [b, c] = slots::sl2r(ctx, &l);
    let pick = |bundle, nz| SectionSlot::sample(ctx, bundle, nz);
    Ok(HiggsDatum::Sl2r {
        beta: pick(b, beta_nonzero)?,
        gamma: pick(c, gamma_nonzero)?,
        l,
    })
}

/// Torsion-split datum with zero `β`.
pub fn torsion_split_datum(ctx: &CurveCtx, l1: F2Vec, l2: F2Vec) -> Result<HiggsDatum> {
    let k2 = slots::torsion_split(ctx);
    Ok(HiggsDatum::TorsionSplit {
        l1_torsion: l1,
        l2_torsion: l2,
        beta1: SectionSlot::zero(ctx, k2.clone())?,
        beta2: SectionSlot::zero(ctx, k2)?,
    })
}

/// Scalar multiple of a coefficient vector by a rational.
pub fn scale_slot(slot: &SectionSlot, q: &Rational) -> SectionSlot {
    slot.scale(&FieldElem::from_rational(q.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(g: i64) -> CurveCtx {
        CurveCtx::new(g).unwrap()
    }

    #[test]
    fn genus_must_be_at_least_two() {
        assert_eq!(CurveCtx::new(1), Err(Error::GenusTooSmall(1)));
    }

    #[test]
    fn h0_rules() {
        let c = ctx(3);
        assert_eq!(h0(&c, &LineBundleClass::k_power(&c, 4)).unwrap(), 6);
        let n = LineBundleClass::new(1, 1, c.zero_torsion());
        let n2k = n.pow(2).tensor(&LineBundleClass::k_power(&c, 2));
        assert_eq!(h0(&c, &n2k).unwrap(), 8);
        assert_eq!(h0(&c, &LineBundleClass::new(0, -1, c.zero_torsion())).unwrap(), 0);
        assert_eq!(h0(&c, &LineBundleClass::trivial(&c)).unwrap(), 1);
        assert_eq!(h0(&c, &LineBundleClass::k_power(&c, 2)).unwrap(), 3);
        let tau = F2Vec::unit(6, 0);
        assert_eq!(h0(&c, &LineBundleClass::torsion_only(tau.clone())).unwrap(), 0);
        assert_eq!(h0(&c, &LineBundleClass::new(2, 0, tau)).unwrap(), 2);
        assert!(matches!(
            h0(&c, &LineBundleClass::k_power(&c, 1)),
            Err(Error::RequiresExplicitH0 { .. })
        ));
    }

    #[test]
    fn milnor_wood_bound() {
        let c = ctx(2);
        assert!(milnor_wood(&c, 2));
        assert!(!milnor_wood(&c, 3));
        assert!(milnor_wood(&c, 0));
        assert!(milnor_wood(&c, -2));
    }

    #[test]
    fn datum_json_is_tagged() {
        let c = ctx(2);
        let d = sl2r_datum(&c, LineBundleClass::k_power(&c, 1), false, true).unwrap();
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(v["shape"], "sl2r");
        let back: HiggsDatum = serde_json::from_value(v).unwrap();
        assert_eq!(back, d);
        let cover = HiggsDatum::CoverOrth {
            w1: F2Vec::unit(4, 1),
            w2: true,
            beta_present: false,
            beta_scalar: false,
        };
        let s = serde_json::to_string(&cover).unwrap();
        assert!(s.contains(r#""w2":1"#), "{s}");
    }

    #[test]
    fn empty_sum_is_identity() {
        let c = ctx(2);
        let d = sl2r_datum(&c, LineBundleClass::k_power(&c, 1), false, true).unwrap();
        let empty = HiggsDatum::DirectSum { summands: vec![] };
        assert_eq!(direct_sum(&c, &d, &empty), d);
        assert_eq!(direct_sum(&c, &empty, &d), d);
    }
}
