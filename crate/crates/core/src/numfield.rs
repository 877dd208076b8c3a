//! Exact arithmetic in the degree-8 field Q(i, √2, √3).
//!
//! Elements are stored as eight rational coordinates in the basis
//! `1, √2, √3, √6, i, i√2, i√3, i√6`. Multiplication goes through a fixed
//! structure-constant table; inversion multiplies by Galois conjugates until
//! the norm lands in Q.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always reduced with positive denominator.
pub type Rational = BigRational;

/// Build a rational from a machine numerator and denominator.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Radicands of the real basis `1, √2, √3, √6`.
const RADICAND: [i64; 4] = [1, 2, 3, 6];

/// `REAL_MUL[r][s] = (k, m)` means `basis_r * basis_s = m * basis_k`
/// on the real part.
const REAL_MUL: [[(usize, i64); 4]; 4] = [
    [(0, 1), (1, 1), (2, 1), (3, 1)],
    [(1, 1), (0, 2), (3, 1), (2, 2)],
    [(2, 1), (3, 1), (0, 3), (1, 3)],
    [(3, 1), (2, 2), (1, 3), (0, 6)],
];

/// Full 8x8 structure constants: `(target index, integer factor)`.
fn structure_table() -> &'static [[(usize, i64); 8]; 8] {
    static TABLE: OnceLock<[[(usize, i64); 8]; 8]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[(0usize, 0i64); 8]; 8];
        for (a, row) in t.iter_mut().enumerate() {
            for (b, slot) in row.iter_mut().enumerate() {
                let (ja, ra) = (a / 4, a % 4);
                let (jb, rb) = (b / 4, b % 4);
                let (k, m) = REAL_MUL[ra][rb];
                let j = ja + jb;
                *slot = match j {
                    0 => (k, m),
                    1 => (k + 4, m),
                    _ => (k, -m),
                };
            }
        }
        t
    })
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldElem {
    c: [Rational; 8],
}

impl FieldElem {
    pub fn zero() -> Self {
        FieldElem {
            c: std::array::from_fn(|_| Rational::zero()),
        }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_coeffs(c: [Rational; 8]) -> Self {
        FieldElem { c }
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut e = Self::zero();
        e.c[0] = q;
        e
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(n.into()))
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        Self::from_rational(rat(n, d))
    }

    /// Rational multiple of a single basis vector.
    pub fn basis(index: usize, coeff: Rational) -> Self {
        let mut e = Self::zero();
        e.c[index] = coeff;
        e
    }

    pub fn i() -> Self {
        Self::basis(4, Rational::one())
    }

    pub fn sqrt2() -> Self {
        Self::basis(1, Rational::one())
    }

    pub fn sqrt3() -> Self {
        Self::basis(2, Rational::one())
    }

    pub fn sqrt6() -> Self {
        Self::basis(3, Rational::one())
    }

    /// `re + i*im` for rational parts.
    pub fn complex(re: Rational, im: Rational) -> Self {
        let mut e = Self::zero();
        e.c[0] = re;
        e.c[4] = im;
        e
    }

    pub fn coeffs(&self) -> &[Rational; 8] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(Zero::is_zero)
    }

    /// True when all i-coordinates vanish.
    pub fn is_real(&self) -> bool {
        self.c[4..].iter().all(Zero::is_zero)
    }

    /// The rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.c[1..].iter().all(Zero::is_zero) {
            Some(&self.c[0])
        } else {
            None
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        FieldElem {
            c: std::array::from_fn(|k| &self.c[k] * q),
        }
    }

    /// Complex conjugation: i -> -i.
    pub fn conj(&self) -> Self {
        self.flip(&[4, 5, 6, 7])
    }

    /// Galois automorphism √2 -> -√2.
    pub fn sigma2(&self) -> Self {
        self.flip(&[1, 3, 5, 7])
    }

    /// Galois automorphism √3 -> -√3.
    pub fn sigma3(&self) -> Self {
        self.flip(&[2, 3, 6, 7])
    }

    fn flip(&self, idx: &[usize]) -> Self {
        let mut out = self.clone();
        for &k in idx {
            out.c[k] = -&out.c[k];
        }
        out
    }

    pub fn real_part(&self) -> Self {
        let mut out = self.clone();
        for k in 4..8 {
            out.c[k] = Rational::zero();
        }
        out
    }

    pub fn imag_part(&self) -> Self {
        let mut out = Self::zero();
        for k in 0..4 {
            out.c[k] = self.c[k + 4].clone();
        }
        out
    }

    pub fn try_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // a * conj(a) lies in Q(√2,√3); times its σ2-image lies in Q(√3);
        // times that σ3-image lies in Q.
        let ca = self.conj();
        let n1 = self * &ca;
        let s2 = n1.sigma2();
        let n2 = &n1 * &s2;
        let s3 = n2.sigma3();
        let n3 = &n2 * &s3;
        let norm = n3
            .as_rational()
            .expect("field norm must be rational")
            .clone();
        let num = &(&ca * &s2) * &s3;
        Ok(num.scale(&norm.recip()))
    }

    pub fn inv(&self) -> Self {
        self.try_inv().expect("inverse of zero field element")
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Integer power allowing negative exponents.
    pub fn powi(&self, e: i32) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            Ok(self.try_inv()?.pow(e.unsigned_abs()))
        }
    }

    /// Complex value, computed exactly against 60-digit approximations of the
    /// radicals and rounded once.
    pub fn numeric(&self) -> Complex64 {
        let r = radical_approximations();
        let mut re = Rational::zero();
        let mut im = Rational::zero();
        for k in 0..4 {
            if !self.c[k].is_zero() {
                re += &self.c[k] * &r[k];
            }
            if !self.c[k + 4].is_zero() {
                im += &self.c[k + 4] * &r[k];
            }
        }
        Complex64::new(to_f64(&re), to_f64(&im))
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        let table = structure_table();
        let mut out = Self::zero();
        for a in 0..8 {
            if self.c[a].is_zero() {
                continue;
            }
            for b in 0..8 {
                if rhs.c[b].is_zero() {
                    continue;
                }
                let (k, m) = table[a][b];
                let p = &self.c[a] * &rhs.c[b];
                out.c[k] += p * BigInt::from(m);
            }
        }
        out
    }
}

fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Truncations of 1, √2, √3, √6 to 60 decimal digits.
fn radical_approximations() -> &'static [Rational; 4] {
    static APPROX: OnceLock<[Rational; 4]> = OnceLock::new();
    APPROX.get_or_init(|| {
        let scale = BigUint::from(10u32).pow(60);
        std::array::from_fn(|k| {
            let n = BigUint::from(RADICAND[k] as u64) * &scale * &scale;
            BigRational::new(BigInt::from(n.sqrt()), BigInt::from(scale.clone()))
        })
    })
}

/// Exact images of the two nested radicals used by the Cayley frame:
/// `u = -4 √(6 + 3√3) = -2√6 - 6√2` and `v = 2 / √(2 + √3) = √6 - √2`.
pub fn embed_u_v() -> (FieldElem, FieldElem) {
    let u = FieldElem::basis(3, rat(-2, 1)) + FieldElem::basis(1, rat(-6, 1));
    let v = FieldElem::sqrt6() - FieldElem::sqrt2();
    (u, v)
}

impl Default for FieldElem {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for FieldElem {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<Rational> for FieldElem {
    fn from(q: Rational) -> Self {
        Self::from_rational(q)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&FieldElem> for &FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: &FieldElem) -> FieldElem {
                let f: fn(&FieldElem, &FieldElem) -> FieldElem = $body;
                f(self, rhs)
            }
        }
        impl $tr<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: FieldElem) -> FieldElem {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: &FieldElem) -> FieldElem {
                (&self).$m(rhs)
            }
        }
        impl $tr<FieldElem> for &FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: FieldElem) -> FieldElem {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| FieldElem {
    c: std::array::from_fn(|k| &a.c[k] + &b.c[k])
});
binop!(Sub, sub, |a, b| FieldElem {
    c: std::array::from_fn(|k| &a.c[k] - &b.c[k])
});
binop!(Mul, mul, |a, b| a.mul_ref(b));
binop!(Div, div, |a, b| a.mul_ref(&b.inv()));

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem {
            c: std::array::from_fn(|k| -&self.c[k]),
        }
    }
}

impl AddAssign<&FieldElem> for FieldElem {
    fn add_assign(&mut self, rhs: &FieldElem) {
        for k in 0..8 {
            self.c[k] += &rhs.c[k];
        }
    }
}

impl SubAssign<&FieldElem> for FieldElem {
    fn sub_assign(&mut self, rhs: &FieldElem) {
        for k in 0..8 {
            self.c[k] -= &rhs.c[k];
        }
    }
}

impl MulAssign<&FieldElem> for FieldElem {
    fn mul_assign(&mut self, rhs: &FieldElem) {
        *self = self.mul_ref(rhs);
    }
}

const BASIS_NAMES: [&str; 8] = ["", "√2", "√3", "√6", "i", "i√2", "i√3", "i√6"];

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, q) in self.c.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let neg = q.is_negative();
            let mag = q.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let name = BASIS_NAMES[k];
            if name.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{name}")?;
            } else if mag.is_integer() {
                write!(f, "{mag}{name}")?;
            } else {
                write!(f, "({mag}){name}")?;
            }
        }
        Ok(())
    }
}

/// Parse a rational written as `"n"` or `"n/d"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    let d = BigInt::from_str(d).map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

impl Serialize for FieldElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = self.c.iter().map(format_rational).collect();
        strs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let strs: Vec<String> = Vec::deserialize(d)?;
        if strs.len() != 8 {
            return Err(D::Error::custom(format!(
                "field element needs 8 coordinates, got {}",
                strs.len()
            )));
        }
        let mut c: [Rational; 8] = std::array::from_fn(|_| Rational::zero());
        for (slot, s) in c.iter_mut().zip(&strs) {
            *slot = parse_rational(s).map_err(D::Error::custom)?;
        }
        Ok(FieldElem { c })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_products() {
        assert_eq!(FieldElem::sqrt2() * FieldElem::sqrt3(), FieldElem::sqrt6());
        assert_eq!(FieldElem::sqrt6() * FieldElem::sqrt6(), FieldElem::from_int(6));
        assert_eq!(
            FieldElem::sqrt2() * FieldElem::sqrt6(),
            FieldElem::basis(2, rat(2, 1))
        );
        assert_eq!(FieldElem::i() * FieldElem::i(), FieldElem::from_int(-1));
    }

    #[test]
    fn norm_identity() {
        let a = FieldElem::one() + FieldElem::i();
        let b = FieldElem::one() - FieldElem::i();
        assert_eq!(a * b, FieldElem::from_int(2));
    }

    #[test]
    fn inverse_of_sqrt2() {
        let inv = FieldElem::sqrt2().inv();
        assert_eq!(inv, FieldElem::basis(1, rat(1, 2)));
        assert!((FieldElem::sqrt2() * inv).is_one());
    }

    #[test]
    fn zero_has_no_inverse() {
        assert_eq!(FieldElem::zero().try_inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn display_is_readable() {
        let e = FieldElem::one() + FieldElem::basis(1, rat(2, 1)) - FieldElem::basis(6, rat(1, 1));
        assert_eq!(e.to_string(), "1 + 2√2 - i√3");
    }

    #[test]
    fn json_roundtrip() {
        let (u, _) = embed_u_v();
        let s = serde_json::to_string(&u).unwrap();
        assert_eq!(s, r#"["0/1","-6/1","0/1","-2/1","0/1","0/1","0/1","0/1"]"#);
        let back: FieldElem = serde_json::from_str(&s).unwrap();
        assert_eq!(back, u);
        let short: FieldElem =
            serde_json::from_str(r#"["1","0","0","0","0","0","0","3/6"]"#).unwrap();
        assert_eq!(short.coeffs()[7], rat(1, 2));
    }
}
