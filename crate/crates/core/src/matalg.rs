//! Dense 2x2 and 4x4 matrices over [`FieldElem`], Kronecker products, and the
//! fixed symplectic forms and change-of-frame matrices.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numfield::{embed_u_v, rat, FieldElem, Rational};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SqMatrix {
    dim: usize,
    entries: Vec<FieldElem>,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

impl SqMatrix {
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> FieldElem) -> Self {
        assert!(dim == 2 || dim == 4, "unsupported dimension {dim}");
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        SqMatrix { dim, entries }
    }

    pub fn from_rows(rows: Vec<Vec<FieldElem>>) -> Result<Self> {
        let dim = rows.len();
        check_dim(dim)?;
        for r in &rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.len(),
                });
            }
        }
        Ok(SqMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Integer matrix literal.
    pub fn from_ints<const N: usize>(rows: [[i64; N]; N]) -> Self {
        Self::from_fn(N, |i, j| FieldElem::from_int(rows[i][j]))
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| FieldElem::zero())
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| {
            if i == j {
                FieldElem::one()
            } else {
                FieldElem::zero()
            }
        })
    }

    pub fn diag(d: &[FieldElem]) -> Self {
        Self::from_fn(d.len(), |i, j| {
            if i == j {
                d[i].clone()
            } else {
                FieldElem::zero()
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElem {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<FieldElem>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn map(&self, f: impl Fn(&FieldElem) -> FieldElem) -> Self {
        SqMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, s: &FieldElem) -> Self {
        self.map(|e| e * s)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).clone())
    }

    /// Entrywise complex conjugate of the transpose.
    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> FieldElem {
        let mut t = FieldElem::zero();
        for k in 0..self.dim {
            t += self.get(k, k);
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(FieldElem::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn diagonal(&self) -> Vec<FieldElem> {
        (0..self.dim).map(|k| self.get(k, k).clone()).collect()
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            })
        }
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.same_dim(rhs)?;
        let n = self.dim;
        Ok(Self::from_fn(n, |i, j| {
            let mut acc = FieldElem::zero();
            for k in 0..n {
                let a = self.get(i, k);
                let b = rhs.get(k, j);
                if !a.is_zero() && !b.is_zero() {
                    acc += &(a * b);
                }
            }
            acc
        }))
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.same_dim(rhs)?;
        Ok(SqMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.same_dim(rhs)?;
        Ok(SqMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        })
    }

    fn minor(&self, row: usize, col: usize) -> Vec<Vec<FieldElem>> {
        (0..self.dim)
            .filter(|&i| i != row)
            .map(|i| {
                (0..self.dim)
                    .filter(|&j| j != col)
                    .map(|j| self.get(i, j).clone())
                    .collect()
            })
            .collect()
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> FieldElem {
        det_rows(&self.rows())
    }

    pub fn adjugate(&self) -> Self {
        if self.dim == 2 {
            return Self::from_fn(2, |i, j| match (i, j) {
                (0, 0) => self.get(1, 1).clone(),
                (1, 1) => self.get(0, 0).clone(),
                _ => -self.get(i, j),
            });
        }
        Self::from_fn(self.dim, |i, j| {
            let m = det_rows(&self.minor(j, i));
            if (i + j) % 2 == 0 {
                m
            } else {
                -m
            }
        })
    }

    pub fn try_inverse(&self) -> Result<Self> {
        let d = self.det();
        let dinv = d.try_inv().map_err(|_| Error::Singular)?;
        Ok(self.adjugate().scale(&dinv))
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::identity(self.dim), |acc, _| &acc * self)
    }

    /// 2x2 block `(bi, bj)` of a 4x4 matrix.
    pub fn block(&self, bi: usize, bj: usize) -> SqMatrix {
        assert_eq!(self.dim, 4, "blocks are defined for 4x4 matrices");
        Self::from_fn(2, |i, j| self.get(2 * bi + i, 2 * bj + j).clone())
    }

    /// Assemble `(a b; c d)` from 2x2 blocks.
    pub fn from_blocks(a: &SqMatrix, b: &SqMatrix, c: &SqMatrix, d: &SqMatrix) -> SqMatrix {
        let blocks = [[a, b], [c, d]];
        Self::from_fn(4, |i, j| blocks[i / 2][j / 2].get(i % 2, j % 2).clone())
    }
}

fn det_rows(rows: &[Vec<FieldElem>]) -> FieldElem {
    let n = rows.len();
    match n {
        1 => rows[0][0].clone(),
        2 => &rows[0][0] * &rows[1][1] - &rows[0][1] * &rows[1][0],
        _ => {
            let mut acc = FieldElem::zero();
            for col in 0..n {
                if rows[0][col].is_zero() {
                    continue;
                }
                let sub: Vec<Vec<FieldElem>> = rows[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != col)
                            .map(|(_, e)| e.clone())
                            .collect()
                    })
                    .collect();
                let term = &rows[0][col] * &det_rows(&sub);
                if col % 2 == 0 {
                    acc += &term;
                } else {
                    acc -= &term;
                }
            }
            acc
        }
    }
}

impl Mul<&SqMatrix> for &SqMatrix {
    type Output = SqMatrix;
    fn mul(self, rhs: &SqMatrix) -> SqMatrix {
        self.try_mul(rhs).expect("matrix dimensions differ")
    }
}

impl Mul for SqMatrix {
    type Output = SqMatrix;
    fn mul(self, rhs: SqMatrix) -> SqMatrix {
        &self * &rhs
    }
}

impl Add<&SqMatrix> for &SqMatrix {
    type Output = SqMatrix;
    fn add(self, rhs: &SqMatrix) -> SqMatrix {
        self.try_add(rhs).expect("matrix dimensions differ")
    }
}

impl Add for SqMatrix {
    type Output = SqMatrix;
    fn add(self, rhs: SqMatrix) -> SqMatrix {
        &self + &rhs
    }
}

impl Sub<&SqMatrix> for &SqMatrix {
    type Output = SqMatrix;
    fn sub(self, rhs: &SqMatrix) -> SqMatrix {
        self.try_sub(rhs).expect("matrix dimensions differ")
    }
}

impl Sub for SqMatrix {
    type Output = SqMatrix;
    fn sub(self, rhs: SqMatrix) -> SqMatrix {
        &self - &rhs
    }
}

impl Neg for &SqMatrix {
    type Output = SqMatrix;
    fn neg(self) -> SqMatrix {
        self.map(|e| -e)
    }
}

impl fmt::Display for SqMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.entries.chunks(self.dim) {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    entries: Vec<Vec<FieldElem>>,
}

impl Serialize for SqMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            dim: self.dim,
            entries: self.rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SqMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        let m = SqMatrix::from_rows(repr.entries).map_err(D::Error::custom)?;
        if m.dim != repr.dim {
            return Err(D::Error::custom(format!(
                "declared dim {} but entries are {}x{}",
                repr.dim, m.dim, m.dim
            )));
        }
        Ok(m)
    }
}

/// Block matrix with blocks `a_ij * b`.
pub fn kron(a: &SqMatrix, b: &SqMatrix) -> Result<SqMatrix> {
    for m in [a, b] {
        if m.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: m.dim(),
            });
        }
    }
    Ok(SqMatrix::from_fn(4, |i, j| {
        a.get(i / 2, j / 2) * b.get(i % 2, j % 2)
    }))
}

/// `gᵀ J g == J`, exactly.
pub fn is_symplectic(g: &SqMatrix, j: &SqMatrix) -> bool {
    g.dim() == j.dim() && &(&g.transpose() * j) * g == *j
}

/// The scalar `c` with `Mᵀ J M = c J`, if one exists.
pub fn preserves_symplectic_up_to_scalar(m: &SqMatrix, j: &SqMatrix) -> Option<FieldElem> {
    if m.dim() != j.dim() {
        return None;
    }
    let x = &(&m.transpose() * j) * m;
    let n = j.dim();
    let (pi, pj) = (0..n)
        .flat_map(|i| (0..n).map(move |k| (i, k)))
        .find(|&(i, k)| !j.get(i, k).is_zero())?;
    let c = x.get(pi, pj) / j.get(pi, pj);
    (x == j.scale(&c)).then_some(c)
}

/// `P M P⁻¹`.
pub fn conjugate(m: &SqMatrix, p: &SqMatrix) -> Result<SqMatrix> {
    if m.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: p.dim(),
        });
    }
    let pinv = p.try_inverse()?;
    Ok(&(p * m) * &pinv)
}

/// `exp(N)` for nilpotent `N`, as the finite series.
pub fn exp_nilpotent(n: &SqMatrix) -> Result<SqMatrix> {
    let dim = n.dim();
    if !n.pow(dim as u32).is_zero() {
        return Err(Error::NotNilpotent);
    }
    let mut acc = SqMatrix::identity(dim);
    let mut term = SqMatrix::identity(dim);
    for k in 1..dim {
        term = (&term * n).scale(&FieldElem::from_frac(1, k as i64));
        if term.is_zero() {
            break;
        }
        acc = &acc + &term;
    }
    Ok(acc)
}

fn is_diag_matrix(m: &SqMatrix) -> bool {
    m.is_diagonal()
}

/// Check the tensor-product identities on one set of 2x2 inputs.
///
/// Always checks the mixed product `(A⊗B)(C⊗D) = AC⊗BD` and
/// `(A⊗B)ᵀ = Aᵀ⊗Bᵀ`. When `A` and `B` are nilpotent it also checks
/// `exp(A⊗I + I⊗B) = exp(A)⊗exp(B)`. When they are diagonal the exponential
/// identity reduces to additivity of eigenvalue exponents, which is checked on
/// the diagonal directly.
pub fn kron_identities_check(a: &SqMatrix, b: &SqMatrix, c: &SqMatrix, d: &SqMatrix) -> bool {
    let Ok(ab) = kron(a, b) else { return false };
    let Ok(cd) = kron(c, d) else { return false };
    let Ok(acbd) = kron(&(a * c), &(b * d)) else {
        return false;
    };
    if &ab * &cd != acbd {
        return false;
    }
    match kron(&a.transpose(), &b.transpose()) {
        Ok(t) if t == ab.transpose() => {}
        _ => return false,
    }
    let i2 = SqMatrix::identity(2);
    let sum = &kron(a, &i2).expect("2x2") + &kron(&i2, b).expect("2x2");
    if let (Ok(ea), Ok(eb)) = (exp_nilpotent(a), exp_nilpotent(b)) {
        let Ok(lhs) = exp_nilpotent(&sum) else {
            return false;
        };
        if lhs != kron(&ea, &eb).expect("2x2") {
            return false;
        }
    } else if is_diag_matrix(a) && is_diag_matrix(b) {
        // exp of a diagonal matrix has entries e^{d_k}; the identity holds iff
        // the exponents of A⊗I + I⊗B are the pairwise sums a_i + b_j.
        let expected: Vec<FieldElem> = (0..4)
            .map(|k| a.get(k / 2, k / 2) + b.get(k % 2, k % 2))
            .collect();
        if !sum.is_diagonal() || sum.diagonal() != expected {
            return false;
        }
    }
    true
}

fn q(n: i64) -> FieldElem {
    FieldElem::from_int(n)
}

/// `J = (0 1; -1 0)`.
pub fn j2() -> SqMatrix {
    SqMatrix::from_ints([[0, 1], [-1, 0]])
}

pub fn i2() -> SqMatrix {
    SqMatrix::identity(2)
}

pub fn i4() -> SqMatrix {
    SqMatrix::identity(4)
}

/// `J₁₃ = J ⊗ I = (0 I; -I 0)`.
pub fn j13() -> SqMatrix {
    kron(&j2(), &i2()).expect("2x2")
}

/// `J₁₂ = I ⊗ J`, block diagonal.
pub fn j12() -> SqMatrix {
    kron(&i2(), &j2()).expect("2x2")
}

/// Form preserved by the irreducible representation in its monomial basis.
pub fn j0() -> SqMatrix {
    SqMatrix::from_ints([[0, 0, 1, 0], [0, 0, 0, -3], [-1, 0, 0, 0], [0, 3, 0, 0]])
}

/// Permutation swapping the middle two basis vectors, with
/// `A ⊗ B = h (B ⊗ A) h` and `h J₁₂ = J₁₃ h`.
pub fn h_perm() -> SqMatrix {
    SqMatrix::from_ints([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
}

/// Symmetriser carrying `J₀` to `J₁₃`: `hᵀ J₀ h = J₁₃`.
pub fn h_sym3() -> SqMatrix {
    let s = FieldElem::basis(2, rat(1, 3));
    let mut m = SqMatrix::zero(4);
    m.set(0, 0, q(1));
    m.set(2, 2, q(1));
    m.set(1, 3, s.clone());
    m.set(3, 1, s);
    m
}

/// Complex change of frame `(I iI; I -iI)`.
pub fn t4() -> SqMatrix {
    let i = FieldElem::i();
    SqMatrix::from_blocks(&i2(), &i2().scale(&i), &i2(), &i2().scale(&-&i))
}

/// 2x2 analogue `(1 i; 1 -i)`, diagonalising rotations.
pub fn t2() -> SqMatrix {
    let i = FieldElem::i();
    SqMatrix::from_rows(vec![vec![q(1), i.clone()], vec![q(1), -i]]).expect("2x2")
}

/// Second change of frame, diagonalising the image of SO(2).
pub fn htilde() -> SqMatrix {
    let (u, v) = embed_u_v();
    htilde_from(&u, &v)
}

/// The same matrix built from arbitrary values of `u` and `v`.
pub fn htilde_from(u: &FieldElem, v: &FieldElem) -> SqMatrix {
    let s3 = FieldElem::sqrt3();
    let eighth = FieldElem::from_frac(1, 8);
    let (ui, vi) = (u.inv(), v.inv());
    let mut m = SqMatrix::zero(4);
    m.set(0, 2, &(&(&s3 - q(1)) * &eighth) * u);
    m.set(0, 3, &(&(&s3 - q(3)) * &eighth) * u);
    m.set(1, 2, -(&(&(&s3 + q(3)) * &eighth) * v));
    m.set(1, 3, -(&(&(&s3 + q(1)) * &eighth) * v));
    m.set(2, 0, (&s3 + q(1)) * &ui);
    m.set(2, 1, -((&s3 + q(3)) * &ui));
    m.set(3, 0, (&s3 - q(3)) * &vi);
    m.set(3, 1, -((&s3 - q(1)) * &vi));
    m
}

/// Normalising matrix built from `r = β/γ`.
pub fn s_matrix(r: &FieldElem) -> SqMatrix {
    let two_r = r.scale(&Rational::from_integer(2.into()));
    let mut m = SqMatrix::identity(4);
    m.set(0, 1, two_r.clone());
    m.set(3, 2, -two_r);
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_forms() {
        assert_eq!(kron(&j2(), &i2()).unwrap(), j13());
        assert_eq!(kron(&i2(), &j2()).unwrap(), j12());
        assert_eq!(kron(&i2(), &i2()).unwrap(), i4());
        assert_eq!(
            j13(),
            SqMatrix::from_ints([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
        );
    }

    #[test]
    fn kron_rejects_4x4() {
        assert!(kron(&i4(), &i2()).is_err());
    }

    #[test]
    fn h_relations() {
        let h = h_perm();
        assert_eq!(h.transpose(), h);
        assert_eq!(&h * &h, i4());
        assert_eq!(&h * &j12(), &j13() * &h);
        let hs = h_sym3();
        assert_eq!(&(&hs.transpose() * &j0()) * &hs, j13());
    }

    #[test]
    fn det_and_inverse() {
        let m = SqMatrix::from_ints([[2, 1, 0, 0], [1, 1, 0, 0], [0, 0, 3, 1], [0, 0, 5, 2]]);
        assert!(m.det().is_one());
        assert_eq!(&m * &m.try_inverse().unwrap(), i4());
        assert_eq!(SqMatrix::zero(4).try_inverse(), Err(Error::Singular));
    }

    #[test]
    fn diagonal_symplectic() {
        let d = SqMatrix::diag(&[q(2), q(1), FieldElem::from_frac(1, 2), q(1)]);
        assert!(is_symplectic(&d, &j13()));
    }

    #[test]
    fn frames_scale_the_form() {
        let ct = preserves_symplectic_up_to_scalar(&t4(), &j13()).unwrap();
        assert_eq!(ct, FieldElem::complex(rat(0, 1), rat(-2, 1)));
        let ch = preserves_symplectic_up_to_scalar(&htilde(), &j13()).unwrap();
        assert!(!ch.is_zero());
        let generic = SqMatrix::from_ints([[1, 2, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        assert!(preserves_symplectic_up_to_scalar(&generic, &j13()).is_none());
    }

    #[test]
    fn exp_of_nilpotent() {
        let e = SqMatrix::from_ints([[0, 1], [0, 0]]);
        assert_eq!(exp_nilpotent(&e).unwrap(), SqMatrix::from_ints([[1, 1], [0, 1]]));
        assert_eq!(exp_nilpotent(&i2()), Err(Error::NotNilpotent));
    }

    #[test]
    fn json_shape() {
        let v: serde_json::Value = serde_json::to_value(j2()).unwrap();
        assert_eq!(v["dim"], 2);
        assert_eq!(v["entries"][0][1][0], "1/1");
        let back: SqMatrix = serde_json::from_value(v).unwrap();
        assert_eq!(back, j2());
    }
}
