//! Exact arithmetic over `Q` and the cyclotomic field `Q(ζ₈)`.
//!
//! A [`Scalar`] is stored as `c₀ + c₁ζ + c₂ζ² + c₃ζ³` reduced modulo `ζ⁴ + 1`,
//! with `ζ = e^{iπ/4}`. Inside this field `i = ζ²` and `√2 = ζ − ζ³`, which is
//! all the normalized supersymmetry generators need.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Renders a rational as `a` or `a/b`.
pub fn render_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Element of `Q(ζ₈)`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    c: [Rational; 4],
}

impl Scalar {
    pub fn from_coeffs(c: [Rational; 4]) -> Self {
        Scalar { c }
    }

    pub fn coeffs(&self) -> &[Rational; 4] {
        &self.c
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar {
            c: [r, Rational::zero(), Rational::zero(), Rational::zero()],
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(int(n))
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        Self::from_rational(rat(n, d))
    }

    pub fn zeta() -> Self {
        Scalar {
            c: [Rational::zero(), Rational::one(), Rational::zero(), Rational::zero()],
        }
    }

    pub fn i() -> Self {
        Scalar {
            c: [Rational::zero(), Rational::zero(), Rational::one(), Rational::zero()],
        }
    }

    pub fn sqrt2() -> Self {
        Scalar {
            c: [Rational::zero(), Rational::one(), Rational::zero(), -Rational::one()],
        }
    }

    /// Builds `a + b√2 + c·i + d·i√2`.
    pub fn from_real_imag_parts(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        // √2 = ζ − ζ³ and i√2 = ζ + ζ³.
        Scalar {
            c: [a, &b + &d, c, &d - &b],
        }
    }

    /// Coordinates in the basis `(1, √2, i, i√2)`.
    pub fn real_imag_parts(&self) -> [Rational; 4] {
        let two = int(2);
        [
            self.c[0].clone(),
            (&self.c[1] - &self.c[3]) / &two,
            self.c[2].clone(),
            (&self.c[1] + &self.c[3]) / &two,
        ]
    }

    pub fn is_rational(&self) -> bool {
        self.c[1].is_zero() && self.c[2].is_zero() && self.c[3].is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.c[0])
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Scalar::from_rational(r.recip()));
        }
        let modulus = vec![Rational::one(), Rational::zero(), Rational::zero(), Rational::zero(), Rational::one()];
        let a = trim(self.c.to_vec());
        let s = poly_inverse_mod(&a, &modulus).ok_or(Error::DivisionByZero)?;
        let mut c: [Rational; 4] = Default::default();
        for (k, v) in s.into_iter().enumerate() {
            c[k] = v;
        }
        Ok(Scalar { c })
    }

    pub fn pow(&self, mut e: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Canonical textual form, e.g. `3/2`, `-i`, `1/2*sqrt2`, `1 + i*sqrt2`.
    pub fn render(&self) -> String {
        let parts = self.real_imag_parts();
        let names = ["", "sqrt2", "i", "i*sqrt2"];
        let mut out = String::new();
        for (k, p) in parts.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let neg = p.is_negative();
            let mag = p.abs();
            let body = if names[k].is_empty() {
                render_rational(&mag)
            } else if mag.is_one() {
                names[k].to_string()
            } else {
                format!("{}*{}", render_rational(&mag), names[k])
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// Number of nonzero components in the `(1, √2, i, i√2)` basis.
    pub fn component_count(&self) -> usize {
        self.real_imag_parts().iter().filter(|p| !p.is_zero()).count()
    }
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_sub_mul(a: &[Rational], q: &[Rational], b: &[Rational]) -> Vec<Rational> {
    // a - q*b
    let len = a.len().max(q.len() + b.len());
    let mut out = vec![Rational::zero(); len];
    for (k, v) in a.iter().enumerate() {
        out[k] += v;
    }
    for (i, x) in q.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] -= x * y;
        }
    }
    trim(out)
}

fn poly_divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r = trim(a.to_vec());
    let b = trim(b.to_vec());
    let lead = b.last().expect("nonzero divisor").clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![Rational::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let factor = r.last().unwrap() / &lead;
        for (j, y) in b.iter().enumerate() {
            r[shift + j] -= &factor * y;
        }
        q[shift] = factor;
        r = trim(r);
    }
    (trim(q), r)
}

/// Inverse of `a` modulo `f` by the extended Euclidean algorithm over `Q[x]`.
fn poly_inverse_mod(a: &[Rational], f: &[Rational]) -> Option<Vec<Rational>> {
    let (mut r0, mut r1) = (trim(f.to_vec()), trim(a.to_vec()));
    let (mut s0, mut s1): (Vec<Rational>, Vec<Rational>) = (Vec::new(), vec![Rational::one()]);
    while !r1.is_empty() {
        let (q, r) = poly_divmod(&r0, &r1);
        let s = poly_sub_mul(&s0, &q, &s1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    if r0.len() != 1 {
        return None;
    }
    let c = r0[0].recip();
    let (_, s) = poly_divmod(&s0.iter().map(|x| x * &c).collect::<Vec<_>>(), f);
    Some(s)
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::default()
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::from_int(1)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar {
            c: [&self.c[0] + &o.c[0], &self.c[1] + &o.c[1], &self.c[2] + &o.c[2], &self.c[3] + &o.c[3]],
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar {
            c: [&self.c[0] - &o.c[0], &self.c[1] - &o.c[1], &self.c[2] - &o.c[2], &self.c[3] - &o.c[3]],
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if let (Some(a), Some(b)) = (self.as_rational(), o.as_rational()) {
            return Scalar::from_rational(a * b);
        }
        let mut prod: [Rational; 7] = Default::default();
        for i in 0..4 {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                if o.c[j].is_zero() {
                    continue;
                }
                prod[i + j] += &self.c[i] * &o.c[j];
            }
        }
        // ζ⁴ = −1
        let [p0, p1, p2, p3, p4, p5, p6] = prod;
        Scalar {
            c: [p0 - p4, p1 - p5, p2 - p6, p3],
        }
    }
}

impl<'a> Neg for &'a Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            c: [-&self.c[0], -&self.c[1], -&self.c[2], -&self.c[3]],
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    /// Panics on division by zero; use [`Scalar::inv`] for a fallible version.
    fn div(self, o: &Scalar) -> Scalar {
        self * &o.inv().expect("division by zero scalar")
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        for k in 0..4 {
            self.c[k] += &o.c[k];
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        for k in 0..4 {
            self.c[k] -= &o.c[k];
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = &*self * o;
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::from_rational(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", self.render())
    }
}

/// JSON form: the four `ζ`-basis coordinates as rational strings.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(4)?;
        for c in &self.c {
            t.serialize_element(&render_rational(c))?;
        }
        t.end()
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parts: [String; 4] = Deserialize::deserialize(d)?;
        let mut c: [Rational; 4] = Default::default();
        for (k, p) in parts.iter().enumerate() {
            c[k] = parse_rational(p).ok_or_else(|| serde::de::Error::custom(format!("bad rational {p:?}")))?;
        }
        Ok(Scalar { c })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defining_relations() {
        assert_eq!(Scalar::i() * Scalar::i(), Scalar::from_int(-1));
        assert_eq!(Scalar::sqrt2() * Scalar::sqrt2(), Scalar::from_int(2));
        assert_eq!(Scalar::zeta().pow(8), Scalar::one());
        assert_eq!(Scalar::zeta().pow(4), Scalar::from_int(-1));
    }

    #[test]
    fn inverse_of_inverse_sqrt2() {
        let inv_sqrt2 = Scalar::sqrt2().inv().unwrap();
        assert_eq!(&inv_sqrt2 * &Scalar::sqrt2(), Scalar::one());
        assert_eq!(inv_sqrt2.inv().unwrap(), Scalar::sqrt2());
        assert_eq!(inv_sqrt2.render(), "1/2*sqrt2");
    }

    #[test]
    fn zero_has_no_inverse() {
        assert_eq!(Scalar::zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn rendering() {
        assert_eq!(Scalar::from_frac(-3, 2).render(), "-3/2");
        assert_eq!(Scalar::i().render(), "i");
        assert_eq!((-Scalar::i()).render(), "-i");
        let x = Scalar::from_int(1) + Scalar::i() * Scalar::sqrt2();
        assert_eq!(x.render(), "1 + i*sqrt2");
        assert_eq!(Scalar::zero().render(), "0");
    }

    #[test]
    fn json_is_four_rational_strings() {
        let s = serde_json::to_string(&Scalar::from_frac(1, 2)).unwrap();
        assert_eq!(s, r#"["1/2","0","0","0"]"#);
        let back: Scalar = serde_json::from_str(&s).unwrap();
        assert_eq!(back, Scalar::from_frac(1, 2));
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        prop::array::uniform4((-20i64..20, 1i64..7)).prop_map(|a| {
            Scalar::from_coeffs([rat(a[0].0, a[0].1), rat(a[1].0, a[1].1), rat(a[2].0, a[2].1), rat(a[3].0, a[3].1)])
        })
    }

    proptest! {
        #[test]
        fn field_laws(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!((&a + &b) + c.clone(), &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!((&a * &b) * c.clone(), &a * &(&b * &c));
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), Scalar::one());
            }
        }

        #[test]
        fn rational_subring_closed(p in -50i64..50, q in 1i64..9, r in -50i64..50, s in 1i64..9) {
            let a = Scalar::from_frac(p, q);
            let b = Scalar::from_frac(r, s);
            prop_assert!((&a * &b).is_rational());
            prop_assert!((&a + &b).is_rational());
            if p != 0 {
                prop_assert!(a.inv().unwrap().is_rational());
            }
        }

        #[test]
        fn basis_change_roundtrip(a in arb_scalar()) {
            let [x, y, z, w] = a.real_imag_parts();
            prop_assert_eq!(Scalar::from_real_imag_parts(x, y, z, w), a);
        }
    }
}
