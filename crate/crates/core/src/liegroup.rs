//! Explicit embeddings of SL(2) into Sp(4) and their differentials.
//!
//! `rho1` is the irreducible four-dimensional representation in the monomial
//! basis, preserving `J₀`. `rho13` is the same representation moved to the
//! `J₁₃` frame by `h_sym3`. `phi` conjugates further by `H̃·T`, which turns the
//! image of SO(2) into the diagonal torus.

use std::sync::OnceLock;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matalg::{
    h_perm, htilde, i2, is_symplectic, j0, j13, kron, t2, t4, SqMatrix,
};
use crate::numfield::{rat, FieldElem};

/// 2x2 matrix with determinant 1, or ±1 when built with [`SL2Elem::new_signed`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SL2Elem {
    a: FieldElem,
    b: FieldElem,
    c: FieldElem,
    d: FieldElem,
}

impl SL2Elem {
    pub fn new(a: FieldElem, b: FieldElem, c: FieldElem, d: FieldElem) -> Result<Self> {
        let m = SL2Elem { a, b, c, d };
        let det = m.det();
        if det.is_one() {
            Ok(m)
        } else {
            Err(Error::BadDeterminant {
                expected: "1",
                got: det.to_string(),
            })
        }
    }

    /// Accepts determinant ±1.
    pub fn new_signed(a: FieldElem, b: FieldElem, c: FieldElem, d: FieldElem) -> Result<Self> {
        let m = SL2Elem { a, b, c, d };
        let det = m.det();
        if det.is_one() || (-&det).is_one() {
            Ok(m)
        } else {
            Err(Error::BadDeterminant {
                expected: "±1",
                got: det.to_string(),
            })
        }
    }

    pub fn from_matrix(m: &SqMatrix) -> Result<Self> {
        if m.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: m.dim(),
            });
        }
        Self::new(
            m.get(0, 0).clone(),
            m.get(0, 1).clone(),
            m.get(1, 0).clone(),
            m.get(1, 1).clone(),
        )
    }

    pub fn identity() -> Self {
        Self::new(FieldElem::one(), FieldElem::zero(), FieldElem::zero(), FieldElem::one())
            .expect("identity")
    }

    /// `(0 1; 1 0)`, determinant -1.
    pub fn swap() -> Self {
        Self::new_signed(FieldElem::zero(), FieldElem::one(), FieldElem::one(), FieldElem::zero())
            .expect("swap")
    }

    /// Rotation `(a -c; c a)` with `a² + c² = 1`.
    pub fn rotation(a: FieldElem, c: FieldElem) -> Result<Self> {
        Self::new(a.clone(), -&c, c, a)
    }

    pub fn diag(l: &FieldElem) -> Result<Self> {
        Self::new(l.clone(), FieldElem::zero(), FieldElem::zero(), l.try_inv()?)
    }

    pub fn det(&self) -> FieldElem {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn matrix(&self) -> SqMatrix {
        SqMatrix::from_rows(vec![
            vec![self.a.clone(), self.b.clone()],
            vec![self.c.clone(), self.d.clone()],
        ])
        .expect("2x2")
    }

    pub fn mul(&self, rhs: &SL2Elem) -> SL2Elem {
        let m = &self.matrix() * &rhs.matrix();
        SL2Elem {
            a: m.get(0, 0).clone(),
            b: m.get(0, 1).clone(),
            c: m.get(1, 0).clone(),
            d: m.get(1, 1).clone(),
        }
    }

    fn vars(&self) -> [&FieldElem; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }
}

/// Traceless 2x2 matrix.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SL2AlgElem(SqMatrix);

impl SL2AlgElem {
    pub fn new(m: SqMatrix) -> Result<Self> {
        if m.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: m.dim(),
            });
        }
        if !m.trace().is_zero() {
            return Err(Error::NotTraceless);
        }
        Ok(SL2AlgElem(m))
    }

    pub fn e() -> Self {
        SL2AlgElem(SqMatrix::from_ints([[0, 1], [0, 0]]))
    }

    pub fn f() -> Self {
        SL2AlgElem(SqMatrix::from_ints([[0, 0], [1, 0]]))
    }

    /// The matrix `diag(1, -1)`.
    pub fn h0() -> Self {
        SL2AlgElem(SqMatrix::from_ints([[1, 0], [0, -1]]))
    }

    /// `(x y; y -x)`, the non-compact directions.
    pub fn symmetric(x: FieldElem, y: FieldElem) -> Self {
        let m = SqMatrix::from_rows(vec![vec![x.clone(), y.clone()], vec![y, -x]]).expect("2x2");
        SL2AlgElem(m)
    }

    pub fn matrix(&self) -> &SqMatrix {
        &self.0
    }

    pub fn add(&self, other: &Self) -> Self {
        SL2AlgElem(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        SL2AlgElem(&self.0 - &other.0)
    }
}

/// One monomial: integer coefficient, optional √3 factor, exponents of `a, b, c, d`.
type Term = (i64, bool, [u32; 4]);

const A3: Term = (1, false, [3, 0, 0, 0]);
const B3: Term = (1, false, [0, 3, 0, 0]);
const C3: Term = (1, false, [0, 0, 3, 0]);
const D3: Term = (1, false, [0, 0, 0, 3]);

/// Entries of `rho1` as polynomials in `a, b, c, d`.
const RHO1: [[&[Term]; 4]; 4] = [
    [&[A3], &[(3, false, [2, 1, 0, 0])], &[B3], &[(3, false, [1, 2, 0, 0])]],
    [
        &[(1, false, [2, 0, 1, 0])],
        &[(1, false, [2, 0, 0, 1]), (2, false, [1, 1, 1, 0])],
        &[(1, false, [0, 2, 0, 1])],
        &[(1, false, [0, 2, 1, 0]), (2, false, [1, 1, 0, 1])],
    ],
    [&[C3], &[(3, false, [0, 0, 2, 1])], &[D3], &[(3, false, [0, 0, 1, 2])]],
    [
        &[(1, false, [1, 0, 2, 0])],
        &[(1, false, [0, 1, 2, 0]), (2, false, [1, 0, 1, 1])],
        &[(1, false, [0, 1, 0, 2])],
        &[(1, false, [1, 0, 0, 2]), (2, false, [0, 1, 1, 1])],
    ],
];

/// Entries of `rho13`, the same representation in the `J₁₃` frame.
const RHO13: [[&[Term]; 4]; 4] = [
    [&[A3], &[(1, true, [1, 2, 0, 0])], &[B3], &[(1, true, [2, 1, 0, 0])]],
    [
        &[(1, true, [1, 0, 2, 0])],
        &[(1, false, [1, 0, 0, 2]), (2, false, [0, 1, 1, 1])],
        &[(1, true, [0, 1, 0, 2])],
        &[(1, false, [0, 1, 2, 0]), (2, false, [1, 0, 1, 1])],
    ],
    [&[C3], &[(1, true, [0, 0, 1, 2])], &[D3], &[(1, true, [0, 0, 2, 1])]],
    [
        &[(1, true, [2, 0, 1, 0])],
        &[(1, false, [0, 2, 1, 0]), (2, false, [1, 1, 0, 1])],
        &[(1, true, [0, 2, 0, 1])],
        &[(1, false, [2, 0, 0, 1]), (2, false, [1, 1, 1, 0])],
    ],
];

fn term_coeff(t: &Term) -> FieldElem {
    let n = FieldElem::from_int(t.0);
    if t.1 {
        &n * &FieldElem::sqrt3()
    } else {
        n
    }
}

fn monomial(vars: [&FieldElem; 4], exps: [u32; 4]) -> FieldElem {
    let mut acc = FieldElem::one();
    for k in 0..4 {
        if exps[k] > 0 {
            acc = &acc * &vars[k].pow(exps[k]);
        }
    }
    acc
}

fn eval_table(table: &[[&[Term]; 4]; 4], g: &SL2Elem) -> SqMatrix {
    let vars = g.vars();
    SqMatrix::from_fn(4, |i, j| {
        let mut acc = FieldElem::zero();
        for t in table[i][j] {
            acc += &(&term_coeff(t) * &monomial(vars, t.2));
        }
        acc
    })
}

/// First-order term of the table at the identity in direction `x`.
fn differentiate_table(table: &[[&[Term]; 4]; 4], x: &SqMatrix) -> SqMatrix {
    // Identity point (a, b, c, d) = (1, 0, 0, 1); tangent (x11, x12, x21, x22).
    let base = [1u32, 0, 0, 1];
    let dir = [x.get(0, 0), x.get(0, 1), x.get(1, 0), x.get(1, 1)];
    SqMatrix::from_fn(4, |i, j| {
        let mut acc = FieldElem::zero();
        for t in table[i][j] {
            for k in 0..4 {
                if t.2[k] == 0 {
                    continue;
                }
                // Remaining factors evaluated at the identity: any leftover
                // power of b or c kills the term.
                let survives = (0..4).all(|l| {
                    let e = if l == k { t.2[l] - 1 } else { t.2[l] };
                    base[l] == 1 || e == 0
                });
                if survives {
                    let c = &term_coeff(t) * &FieldElem::from_int(t.2[k] as i64);
                    acc += &(&c * dir[k]);
                }
            }
        }
        acc
    })
}

pub fn rho1(g: &SL2Elem) -> SqMatrix {
    eval_table(&RHO1, g)
}

pub fn rho13(g: &SL2Elem) -> SqMatrix {
    eval_table(&RHO13, g)
}

pub fn rho1_star(x: &SL2AlgElem) -> SqMatrix {
    differentiate_table(&RHO1, x.matrix())
}

pub fn rho13_star(x: &SL2AlgElem) -> SqMatrix {
    differentiate_table(&RHO13, x.matrix())
}

/// `(A, B) -> diag(A, B)`, symplectic for `J₁₂`.
pub fn rho_p(a: &SL2Elem, b: &SL2Elem) -> SqMatrix {
    let z = SqMatrix::zero(2);
    SqMatrix::from_blocks(&a.matrix(), &z, &z, &b.matrix())
}

/// `A -> A ⊗ I`, symplectic for `J₁₃`.
pub fn rho_delta(a: &SL2Elem) -> SqMatrix {
    kron(&a.matrix(), &i2()).expect("2x2")
}

/// The composite change of frame `P = H̃·T` used by [`phi`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyFrame {
    pub htilde: SqMatrix,
    pub t: SqMatrix,
    pub p: SqMatrix,
    pub p_inv: SqMatrix,
}

impl CayleyFrame {
    pub fn standard() -> &'static CayleyFrame {
        static FRAME: OnceLock<CayleyFrame> = OnceLock::new();
        FRAME.get_or_init(|| CayleyFrame::with_htilde(htilde()).expect("H̃ is invertible"))
    }

    pub fn with_htilde(htilde: SqMatrix) -> Result<CayleyFrame> {
        let t = t4();
        let p = &htilde * &t;
        let p_inv = p.try_inverse()?;
        Ok(CayleyFrame { htilde, t, p, p_inv })
    }

    pub fn phi(&self, g: &SL2Elem) -> SqMatrix {
        &(&self.p * &rho13(g)) * &self.p_inv
    }

    pub fn phi_star(&self, x: &SL2AlgElem) -> SqMatrix {
        &(&self.p * &rho13_star(x)) * &self.p_inv
    }

    /// [`s_conjugate`] computed in this frame.
    pub fn s_conjugate(&self, beta: &FieldElem, gamma: &FieldElem) -> Result<SqMatrix> {
        let r = beta * &gamma.try_inv().map_err(|_| Error::SingularNormalization)?;
        let half = FieldElem::from_frac(1, 2);
        let x = &(beta + gamma) * &half;
        let y = &(&(beta - gamma) * &half) * &FieldElem::i().inv();
        let m = self.phi_star(&SL2AlgElem::symmetric(x, y));
        crate::matalg::conjugate(&m, &crate::matalg::s_matrix(&r))
    }

    /// Image of the torus element with eigenvalues `λ, λ⁻¹`.
    pub fn phi_torus(&self, lambda: &FieldElem) -> Result<SqMatrix> {
        Ok(self.phi(&torus_element(lambda)?))
    }
}

pub fn phi(g: &SL2Elem) -> SqMatrix {
    CayleyFrame::standard().phi(g)
}

pub fn phi_star(x: &SL2AlgElem) -> SqMatrix {
    CayleyFrame::standard().phi_star(x)
}

/// `T₂⁻¹ diag(λ, λ⁻¹) T₂`: the element of SO(2,C) with eigenvalue `λ` on
/// the line where rotations act by `a + ic`.
pub fn torus_element(lambda: &FieldElem) -> Result<SL2Elem> {
    let d = SL2Elem::diag(lambda)?.matrix();
    let t = t2();
    let m = &(&t.try_inverse()? * &d) * &t;
    SL2Elem::from_matrix(&m)
}

pub fn phi_torus(lambda: &FieldElem) -> Result<SqMatrix> {
    CayleyFrame::standard().phi_torus(lambda)
}

/// Expected torus image `diag(λ³, λ⁻¹, λ⁻³, λ)`.
pub fn torus_weights(lambda: &FieldElem) -> Result<SqMatrix> {
    let d: Result<Vec<FieldElem>> = [3, -1, -3, 1].iter().map(|&e| lambda.powi(e)).collect();
    Ok(SqMatrix::diag(&d?))
}

fn times_i(m: SqMatrix) -> SqMatrix {
    m.scale(&FieldElem::i())
}

/// Reference value of `phi_star(e - f)`.
pub fn golden_e_minus_f() -> SqMatrix {
    times_i(SqMatrix::diag(&[
        FieldElem::from_int(-3),
        FieldElem::from_int(1),
        FieldElem::from_int(3),
        FieldElem::from_int(-1),
    ]))
}

/// Reference value of `phi_star(e + f)`.
pub fn golden_e_plus_f() -> SqMatrix {
    times_i(SqMatrix::from_ints([
        [0, 0, 0, 3],
        [0, 0, 3, -1],
        [0, -1, 0, 0],
        [-1, 4, 0, 0],
    ]))
}

/// Reference value of `phi_star(h₀)`.
pub fn golden_h0() -> SqMatrix {
    SqMatrix::from_ints([[0, 0, 0, 3], [0, 0, 3, 1], [0, 1, 0, 0], [1, 4, 0, 0]])
}

/// `S · phi_star((x y; y -x)) · S⁻¹` where `β = x + iy`, `γ = x - iy` and `S`
/// is built from `β/γ`.
pub fn s_conjugate(beta: &FieldElem, gamma: &FieldElem) -> Result<SqMatrix> {
    CayleyFrame::standard().s_conjugate(beta, gamma)
}

/// Expected shape of [`s_conjugate`]:
/// `γ · [(0,0,16r²,5r), (0,0,5r,1), (0,1,0,0), (1,0,0,0)]` with `r = β/γ`.
pub fn s_normal_form(beta: &FieldElem, gamma: &FieldElem) -> Result<SqMatrix> {
    let r = beta * &gamma.try_inv().map_err(|_| Error::SingularNormalization)?;
    let mut m = SqMatrix::zero(4);
    m.set(0, 2, &(&r * &r) * &FieldElem::from_int(16));
    m.set(0, 3, &r * &FieldElem::from_int(5));
    m.set(1, 2, &r * &FieldElem::from_int(5));
    m.set(1, 3, FieldElem::one());
    m.set(2, 1, FieldElem::one());
    m.set(3, 0, FieldElem::one());
    Ok(m.scale(gamma))
}

/// `J₁₃` transported to the post-`T` frame: `T⁻ᵀ J₁₃ T⁻¹ = (i/2) J₁₃`.
pub fn transported_form() -> &'static SqMatrix {
    static FORM: OnceLock<SqMatrix> = OnceLock::new();
    FORM.get_or_init(|| {
        let tinv = t4().try_inverse().expect("T is invertible");
        &(&tinv.transpose() * &j13()) * &tinv
    })
}

pub fn in_sp4c(x: &SqMatrix) -> bool {
    let j = transported_form();
    x.dim() == 4 && (&(&x.transpose() * j) + &(j * x)).is_zero()
}

/// Decomposition `X = (Z 0; 0 -Zᵀ) + (0 β; γ 0)` with symmetric `β`, `γ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CartanSplit {
    pub h_part: SqMatrix,
    pub m_part: SqMatrix,
    pub z: SqMatrix,
    pub beta: SqMatrix,
    pub gamma: SqMatrix,
}

pub fn cartan_split(x: &SqMatrix) -> Result<CartanSplit> {
    if !in_sp4c(x) {
        return Err(Error::NotInAlgebra);
    }
    let z2 = SqMatrix::zero(2);
    let z = x.block(0, 0);
    let beta = x.block(0, 1);
    let gamma = x.block(1, 0);
    let h_part = SqMatrix::from_blocks(&z, &z2, &z2, &x.block(1, 1));
    let m_part = SqMatrix::from_blocks(&z2, &beta, &gamma, &z2);
    Ok(CartanSplit {
        h_part,
        m_part,
        z,
        beta,
        gamma,
    })
}

/// `(β̃, γ̃)` when `X = (0 β̃I; γ̃I 0)`.
pub fn m_delta_membership(x: &SqMatrix) -> Option<(FieldElem, FieldElem)> {
    if x.dim() != 4 || !x.block(0, 0).is_zero() || !x.block(1, 1).is_zero() {
        return None;
    }
    let scalar = |m: SqMatrix| {
        let s = m.get(0, 0).clone();
        (m.get(0, 1).is_zero() && m.get(1, 0).is_zero() && *m.get(1, 1) == s).then_some(s)
    };
    Some((scalar(x.block(0, 1))?, scalar(x.block(1, 0))?))
}

/// Real-frame element `(aI bI; bI -aI)` moved by `X -> T X Tᴴ`, which yields
/// `β̃ = 2(a + ib)`, `γ̃ = 2(a - ib)`.
pub fn m_delta_from_real(a: &FieldElem, b: &FieldElem) -> SqMatrix {
    let ia = i2().scale(a);
    let ib = i2().scale(b);
    let x = SqMatrix::from_blocks(&ia, &ib, &ib, &-&ia);
    let t = t4();
    &(&t * &x) * &t.conj_transpose()
}

/// Membership in the maximal compact `{(A B; -B A) : AᵀA + BᵀB = I, AᵀB = BᵀA}`.
pub fn in_u2_image(m: &SqMatrix) -> bool {
    if m.dim() != 4 {
        return false;
    }
    let a = m.block(0, 0);
    let b = m.block(0, 1);
    if m.block(1, 0) != -&b || m.block(1, 1) != a {
        return false;
    }
    let at = a.transpose();
    let bt = b.transpose();
    &(&at * &a) + &(&bt * &b) == i2() && &at * &b == &bt * &a
}

/// Outcome of checking that `rho1(swap)` normalises `rho1(SL₂)` without
/// lying in the symplectic group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizerReport {
    pub normalizes_generators: bool,
    pub det_is_one: bool,
    pub j0_symplectic: bool,
    pub generators_checked: usize,
}

impl NormalizerReport {
    pub fn holds(&self) -> bool {
        self.normalizes_generators && self.det_is_one && !self.j0_symplectic
    }
}

fn generator_samples() -> Vec<SL2Elem> {
    let mut out = Vec::new();
    for &(n, d) in &[(1, 1), (2, 1), (-3, 2), (5, 7)] {
        let t = FieldElem::from_frac(n, d);
        let (o, z) = (FieldElem::one(), FieldElem::zero());
        out.push(SL2Elem::new(o.clone(), t.clone(), z.clone(), o.clone()).expect("unipotent"));
        out.push(SL2Elem::new(o.clone(), z, t.clone(), o).expect("unipotent"));
        out.push(SL2Elem::diag(&t).expect("nonzero"));
    }
    out
}

pub fn normalizer_witness_check() -> NormalizerReport {
    let w = SL2Elem::swap();
    let rw = rho1(&w);
    let rw_inv = rw.try_inverse().expect("permutation matrix");
    let gens = generator_samples();
    let normalizes = gens.iter().all(|g| {
        let lhs = &(&rw * &rho1(g)) * &rw_inv;
        lhs == rho1(&w.mul(g).mul(&w))
    });
    NormalizerReport {
        normalizes_generators: normalizes,
        det_is_one: rw.det().is_one(),
        j0_symplectic: is_symplectic(&rw, &j0()),
        generators_checked: gens.len(),
    }
}

/// `h_perm · (I ⊗ A) · h_perm`, which should equal [`rho_delta`].
pub fn rho_delta_via_perm(a: &SL2Elem) -> SqMatrix {
    let h = h_perm();
    &(&h * &kron(&i2(), &a.matrix()).expect("2x2")) * &h
}

/// Random rational in `[-bound, bound]` with denominator in `1..=bound`.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> FieldElem {
    FieldElem::from_rational(rat(rng.gen_range(-bound..=bound), rng.gen_range(1..=bound)))
}

/// Random element of SL(2,Q): `a, b, c` have numerators and denominators
/// bounded by `bound`, `d = (1 + bc)/a`.
pub fn random_sl2<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> SL2Elem {
    loop {
        let a = random_rational(rng, bound);
        if a.is_zero() {
            continue;
        }
        let b = random_rational(rng, bound);
        let c = random_rational(rng, bound);
        let d = &(&FieldElem::one() + &(&b * &c)) * &a.inv();
        return SL2Elem::new(a, b, c, d).expect("determinant one by construction");
    }
}
