//! Connected components of the maximal moduli space: labels, counts,
//! reduction verdicts, fibre dimensions, and the F2 surjectivity scan.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Mode};
use crate::f2::{self, F2Vec};
use crate::higgs::{self, CurveCtx, HiggsDatum, LineBundleClass, SecondInvariant, SectionSlot};
use crate::numfield::FieldElem;

/// Connected component of the maximal moduli space containing a datum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "component")]
pub enum ComponentLabel {
    /// Hitchin component of the square root `K^{1/2} ⊗ spin`.
    Hitchin { spin: F2Vec },
    /// `w1 = 0`, Cayley line of degree `c` with `0 ≤ c < 2g - 2`.
    ZeroSW { c: i64 },
    /// `w1 ≠ 0`.
    SW {
        w1: F2Vec,
        #[serde(with = "f2::bit")]
        w2: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Group {
    #[serde(rename = "G_Delta")]
    GDelta,
    #[serde(rename = "G_p")]
    Gp,
    #[serde(rename = "G_i")]
    Gi,
}

/// Subgroups to whose Higgs bundles every point of a component deforms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionVerdict {
    pub admits: BTreeSet<Group>,
    pub zariski_dense: bool,
}

/// Component label of a maximal polystable Sp(4,R) datum.
pub fn classify(ctx: &CurveCtx, datum: &HiggsDatum) -> Result<ComponentLabel> {
    let inv = higgs::sw_invariants(ctx, datum)?;
    if datum.rank() != 2 {
        return Err(Error::OutOfClassifiedRange(
            "component labels are defined for Sp(4,R) data".into(),
        ));
    }
    let c = match inv.second {
        SecondInvariant::W2(w2) => {
            return Ok(ComponentLabel::SW { w1: inv.w1, w2 });
        }
        SecondInvariant::C(c) => c,
    };
    if c < ctx.deg_k() {
        return Ok(ComponentLabel::ZeroSW { c });
    }
    // c = 2g-2 forces N² = K³, so N K⁻¹ is a square root of K.
    let n = match datum {
        HiggsDatum::Diagonal { n, .. } => n.clone(),
        HiggsDatum::IrrImage { l, .. } => l.pow(3),
        _ => {
            return Err(Error::OutOfClassifiedRange(
                "c = 2g-2 reached by an unexpected shape".into(),
            ))
        }
    };
    let root = n.tensor(&LineBundleClass::k_power(ctx, -2));
    if !root.is_spin() {
        return Err(Error::OutOfClassifiedRange(format!(
            "N = {n} has maximal degree but N² ≠ K³"
        )));
    }
    Ok(ComponentLabel::Hitchin {
        spin: ctx.spin_base() + &root.torsion,
    })
}

/// Reduction verdict attached to each kind of component.
pub fn reduction_verdict(label: &ComponentLabel) -> ReductionVerdict {
    let admits: BTreeSet<Group> = match label {
        ComponentLabel::Hitchin { .. } => [Group::Gi].into(),
        ComponentLabel::SW { .. } | ComponentLabel::ZeroSW { c: 0 } => {
            [Group::GDelta, Group::Gp].into()
        }
        ComponentLabel::ZeroSW { .. } => BTreeSet::new(),
    };
    ReductionVerdict {
        zariski_dense: admits.is_empty(),
        admits,
    }
}

/// Component counts of the maximal moduli space and of the representation
/// variety.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentCounts {
    pub total: u128,
    pub rep_variety: u128,
    /// `(w1 ≠ 0, w1 = 0 with 0 ≤ c < 2g-2, Hitchin)`.
    pub breakdown: [u128; 3],
    /// `(Hitchin, w1 ≠ 0 or c = 0, Zariski dense)`.
    pub alt_breakdown: [u128; 3],
}

fn pow4(g: i64) -> Result<u128> {
    u32::try_from(2 * g)
        .ok()
        .and_then(|e| 2u128.checked_pow(e))
        .ok_or(Error::CountOverflow(g))
}

pub fn count_components(ctx: &CurveCtx) -> Result<ComponentCounts> {
    let g = ctx.genus();
    let p = pow4(g)?;
    let g = g as u128;
    let ovf = || Error::CountOverflow(g as i64);
    let sw = p.checked_sub(1).and_then(|x| x.checked_mul(2)).ok_or_else(ovf)?;
    let zero = 2 * g - 2;
    let total = sw
        .checked_add(zero)
        .and_then(|x| x.checked_add(p))
        .ok_or_else(ovf)?;
    let rep = p
        .checked_mul(6)
        .and_then(|x| x.checked_add(8 * g))
        .and_then(|x| x.checked_sub(13))
        .ok_or_else(ovf)?;
    let alt = [p, 2 * p - 1, 2 * g - 3];
    Ok(ComponentCounts {
        total,
        rep_variety: rep,
        breakdown: [sw, zero, p],
        alt_breakdown: alt,
    })
}

/// Number of components of maximal Sp(2n,R)-Higgs bundles, `n ≥ 3`.
pub fn count_components_sp2n(ctx: &CurveCtx, n: i64) -> Result<u128> {
    if n < 3 {
        return Err(Error::RankTooSmall(n));
    }
    pow4(ctx.genus())?
        .checked_mul(3)
        .ok_or(Error::CountOverflow(ctx.genus()))
}

/// Dimensions in the fibration of the component with `w1 = 0` and fixed `c`
/// over the Jacobian: fibre `O_{P^s}(1)^{⊕r} × C^{3g-3}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberGeometry {
    pub c: i64,
    pub r: i64,
    pub s: i64,
    pub base_dim: i64,
    pub extra: i64,
    pub total_dim: i64,
}

pub fn fiber_geometry(ctx: &CurveCtx, c: i64) -> Result<FiberGeometry> {
    let g = ctx.genus();
    if c <= 0 || c >= g - 1 {
        return Err(Error::FiberRangeRefused { c, bound: g - 1 });
    }
    let r = 2 * c + 3 * g - 3;
    let s = 3 * g - 4 - 2 * c;
    let extra = 3 * g - 3;
    Ok(FiberGeometry {
        c,
        r,
        s,
        base_dim: g,
        extra,
        total_dim: g + r + s + extra,
    })
}

fn first_nonzero(w: &[FieldElem]) -> Option<usize> {
    w.iter().position(|x| !x.is_zero())
}

/// Image of `(z, w)` under `[(z_1..z_r), w] -> ([w], (z_1 w, ..., z_r w))`,
/// with `[w]` represented by scaling its first nonzero entry to 1.
pub fn quotient_image(z: &[FieldElem], w: &[FieldElem]) -> Result<(Vec<FieldElem>, Vec<Vec<FieldElem>>)> {
    let k = first_nonzero(w).ok_or(Error::ZeroVector)?;
    let inv = w[k].inv();
    let line = w.iter().map(|x| x * &inv).collect();
    let points = z
        .iter()
        .map(|zi| w.iter().map(|wj| zi * wj).collect())
        .collect();
    Ok((line, points))
}

/// Apply the map, invert it on the collinear locus, and check that the result
/// is `(t⁻² z, t² w)` for a single `t²`.
pub fn quotient_roundtrip(z: &[FieldElem], w: &[FieldElem]) -> Result<bool> {
    let (line, points) = quotient_image(z, w)?;
    let k = first_nonzero(&line).ok_or(Error::ZeroVector)?;
    // Inverse: w' is the line representative, z'_i the ratio x_i / w'.
    let mut z_rec = Vec::with_capacity(points.len());
    for x in &points {
        let zi = &x[k] * &line[k].inv();
        let collinear = x.iter().zip(&line).all(|(xj, lj)| *xj == &zi * lj);
        if !collinear {
            return Ok(false);
        }
        z_rec.push(zi);
    }
    let t2 = &line[k] * &w[k].inv();
    let t2_inv = t2.inv();
    let w_ok = line.iter().zip(w).all(|(a, b)| *a == &t2 * b);
    let z_ok = z_rec.iter().zip(z).all(|(a, b)| *a == &t2_inv * b);
    Ok(w_ok && z_ok)
}

/// `Σ a_i b'_i + a'_i b_i`.
pub fn f2_pairing(a: &F2Vec, b: &F2Vec, a2: &F2Vec, b2: &F2Vec) -> Result<bool> {
    let g = a.len();
    for v in [b, a2, b2] {
        v.expect_len(g)?;
    }
    f2::cup(&F2Vec::join(a, b), &F2Vec::join(a2, b2))
}

/// `(x, y) -> (x + y, pairing(x, y))`.
pub fn f2_sw_map(x: &F2Vec, y: &F2Vec) -> Result<(F2Vec, bool)> {
    let w2 = f2::cup(x, y)?;
    Ok((x.try_add(y)?, w2))
}

/// How [`f2_image_scan`] covers the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMode {
    /// Exhaustive for `g ≤ 3`, sampled for `g = 4`.
    Default,
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 0x5eed;
/// Largest genus the scan accepts.
pub const MAX_SCAN_GENUS: usize = 4;
const EXHAUSTIVE_DEFAULT_GENUS: usize = 3;
const CHUNK: u64 = 1 << 14;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub genus: usize,
    pub exhaustive: bool,
    pub pairs_checked: u64,
    pub image_size: usize,
    pub expected_size: usize,
    /// Points of `F2^{2g} × F2` other than `(0, 1)` that were not hit.
    pub missing: Vec<(F2Vec, u8)>,
    pub contains_zero_one: bool,
    pub matches_expected: bool,
}

/// Bitset over `F2^{2g} × F2`, indexed by `2·mask + w2`.
#[derive(Clone)]
struct Hits(Vec<u64>);

impl Hits {
    fn new(g: usize) -> Self {
        Hits(vec![0; (1usize << (2 * g + 1)).div_ceil(64)])
    }

    fn insert(&mut self, idx: usize) {
        self.0[idx / 64] |= 1 << (idx % 64);
    }

    fn contains(&self, idx: usize) -> bool {
        self.0[idx / 64] >> (idx % 64) & 1 == 1
    }

    fn union(mut self, other: Hits) -> Hits {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a |= b;
        }
        self
    }
}

fn record(g: usize, hits: &mut Hits, x: u64, y: u64) {
    let w2 = f2::pairing_mask(g, x, y);
    hits.insert((((x ^ y) as usize) << 1) | usize::from(w2));
}

/// Brute-force image of [`f2_sw_map`], split across workers in `exec`.
pub fn f2_image_scan(genus: usize, mode: ScanMode, exec_mode: Mode) -> Result<ScanReport> {
    if genus == 0 || genus > MAX_SCAN_GENUS {
        return Err(Error::ScanBudgetExceeded(genus));
    }
    let g = genus;
    let side = 1u64 << (2 * g);
    let mode = match mode {
        ScanMode::Default if g <= EXHAUSTIVE_DEFAULT_GENUS => ScanMode::Exhaustive,
        ScanMode::Default => ScanMode::Sampled {
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
        },
        m => m,
    };
    let (hits, checked, exhaustive) = match mode {
        ScanMode::Exhaustive => {
            let n = side * side;
            let hits = exec::fold_range(
                exec_mode,
                n,
                || Hits::new(g),
                |mut h, k| {
                    record(g, &mut h, k / side, k % side);
                    h
                },
                Hits::union,
            );
            (hits, n, true)
        }
        ScanMode::Sampled { samples, seed } => {
            let chunks = samples.div_ceil(CHUNK);
            let hits = exec::fold_range(
                exec_mode,
                chunks,
                || Hits::new(g),
                |mut h, chunk| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(chunk);
                    let len = CHUNK.min(samples - chunk * CHUNK);
                    for _ in 0..len {
                        record(g, &mut h, rng.gen_range(0..side), rng.gen_range(0..side));
                    }
                    h
                },
                Hits::union,
            );
            (hits, samples, false)
        }
        ScanMode::Default => unreachable!("resolved above"),
    };
    let universe = (side as usize) << 1;
    let image_size = (0..universe).filter(|&i| hits.contains(i)).count();
    let missing: Vec<(F2Vec, u8)> = (0..universe)
        .filter(|&i| i != 1 && !hits.contains(i))
        .map(|i| (F2Vec::from_mask(2 * g, (i >> 1) as u64), (i & 1) as u8))
        .collect();
    let contains_zero_one = hits.contains(1);
    Ok(ScanReport {
        genus: g,
        exhaustive,
        pairs_checked: checked,
        image_size,
        expected_size: universe - 1,
        matches_expected: missing.is_empty() && !contains_zero_one,
        missing,
        contains_zero_one,
    })
}

/// `K^{1/2} ⊗ τ` with `β̃ = 0` and `γ̃ = 1`: a maximal SL(2,R) datum.
pub fn maximal_sl2r(ctx: &CurveCtx, torsion: F2Vec) -> Result<HiggsDatum> {
    ctx.spin_base().expect_len(torsion.len())?;
    let l = LineBundleClass::new(1, 0, torsion);
    let [b, c] = higgs::slots::sl2r(ctx, &l);
    Ok(HiggsDatum::Sl2r {
        beta: SectionSlot::zero(ctx, b)?,
        gamma: SectionSlot::unit(ctx, c)?,
        l,
    })
}

/// Reducible maximal Sp(2n,R) datum realising `(w1, w2)`.
///
/// For `(w1, w2) ≠ (0, 1)` this is a sum of `n` maximal SL(2,R) data with
/// torsions `x, y, 0, ..., 0` where `x + y = w1` and `x·y = w2`. For `(0, 1)`
/// an Sp(4,R) piece with odd `c` replaces the first two.
pub fn sp2n_reduction_witness(ctx: &CurveCtx, n: i64, w1: &F2Vec, w2: bool) -> Result<HiggsDatum> {
    if n < 3 {
        return Err(Error::RankTooSmall(n));
    }
    w1.expect_len(ctx.two_g())?;
    let zero = ctx.zero_torsion();
    let mut summands = Vec::with_capacity(n as usize);
    if w1.is_zero() && w2 {
        summands.push(higgs::diagonal_with_c(ctx, 1, zero.clone(), false, true, false)?);
    } else {
        // x·y = w1·y since y·y = 0, so y only needs to pair with w1 to w2.
        let y = if w2 {
            (0..ctx.two_g())
                .map(|j| F2Vec::unit(ctx.two_g(), j))
                .find(|e| f2::cup(w1, e) == Ok(true))
                .expect("pairing is nondegenerate")
        } else {
            zero.clone()
        };
        let x = w1 + &y;
        summands.push(maximal_sl2r(ctx, x)?);
        summands.push(maximal_sl2r(ctx, y)?);
    }
    while (summands.iter().map(HiggsDatum::rank).sum::<usize>() as i64) < n {
        summands.push(maximal_sl2r(ctx, zero.clone())?);
    }
    Ok(HiggsDatum::DirectSum { summands })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_genus_two() {
        let c = count_components(&CurveCtx::new(2).unwrap()).unwrap();
        assert_eq!(c.total, 48);
        assert_eq!(c.rep_variety, 99);
        assert_eq!(c.alt_breakdown, [16, 31, 1]);
        assert_eq!(c.breakdown, [30, 2, 16]);
    }

    #[test]
    fn fiber_refuses_edge() {
        let ctx = CurveCtx::new(4).unwrap();
        assert!(fiber_geometry(&ctx, 3).is_err());
        assert!(fiber_geometry(&ctx, 0).is_err());
        let f = fiber_geometry(&ctx, 1).unwrap();
        assert_eq!((f.r, f.s, f.total_dim), (11, 6, 30));
    }

    #[test]
    fn verdict_serialises_group_names() {
        let v = reduction_verdict(&ComponentLabel::ZeroSW { c: 0 });
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"admits":["G_Delta","G_p"],"zariski_dense":false}"#);
    }

    #[test]
    fn scan_genus_one() {
        let r = f2_image_scan(1, ScanMode::Exhaustive, Mode::Sequential).unwrap();
        assert_eq!(r.image_size, 7);
        assert!(r.matches_expected);
    }
}
