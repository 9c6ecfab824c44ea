//! Ground fields.
//!
//! Everything in the crate is generic over [`Field`], which layers a few
//! exactness-related operations on top of `num_traits::Num`. Two families
//! are provided: arbitrary-precision rationals ([`Rational`]) and prime
//! fields [`Fp<P>`] with the modulus fixed at compile time.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact field usable as scalars for every computation in the crate.
pub trait Field: Num + Neg<Output = Self> + Clone + Debug + Display + Eq + Hash + Send + Sync + 'static {
    /// 0 for the rationals, `p` for `F_p`.
    fn characteristic() -> u64;

    /// Short name used in reports, e.g. `Q` or `F2`.
    fn field_name() -> String;

    /// Image of the fraction `num/den`; `None` when `den` vanishes in the field.
    fn from_fraction(num: &BigInt, den: &BigInt) -> Option<Self>;

    fn inverse(&self) -> Option<Self>;

    fn from_i64(v: i64) -> Self {
        Self::from_fraction(&BigInt::from(v), &BigInt::one()).expect("unit denominator")
    }

    /// Parses `"a"` or `"a/b"` with integer `a`, `b`.
    fn parse_scalar(text: &str) -> Result<Self> {
        let t = text.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num = BigInt::from_str(n).map_err(|_| Error::Parse(format!("bad scalar `{text}`")))?;
        let den = BigInt::from_str(d).map_err(|_| Error::Parse(format!("bad scalar `{text}`")))?;
        Self::from_fraction(&num, &den)
            .ok_or_else(|| Error::Parse(format!("denominator of `{text}` vanishes in {}", Self::field_name())))
    }
}

pub type Rational = BigRational;

impl Field for BigRational {
    fn characteristic() -> u64 {
        0
    }

    fn field_name() -> String {
        "Q".to_string()
    }

    fn from_fraction(num: &BigInt, den: &BigInt) -> Option<Self> {
        if den.is_zero() {
            None
        } else {
            Some(BigRational::new(num.clone(), den.clone()))
        }
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}

pub const fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Element of the prime field `F_P`, stored as a residue in `[0, P)`.
///
/// `P` must be a prime below `2^32` so that products fit in a `u64`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    const CHECK: () = assert!(P < (1 << 32) && is_prime(P), "modulus must be a prime below 2^32");

    pub fn new(v: i64) -> Self {
        #[allow(clippy::let_unit_value)]
        let _ = Self::CHECK;
        Fp(v.rem_euclid(P as i64) as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self.0;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % P;
            }
            base = base * base % P;
            e >>= 1;
        }
        Fp(acc)
    }

    fn from_bigint(v: &BigInt) -> Self {
        let r = v.mod_floor(&BigInt::from(P));
        Fp(r.to_u64().expect("residue fits"))
    }
}

impl<const P: u64> Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Fp((self.0 + rhs.0) % P)
    }
}

impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Fp((self.0 + P - rhs.0) % P)
    }
}

impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Fp(self.0 * rhs.0 % P)
    }
}

impl<const P: u64> Div for Fp<P> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.inverse().expect("division by zero in F_p")
    }
}

/// Remainder in a field is always zero; present only to satisfy `Num`.
impl<const P: u64> Rem for Fp<P> {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        assert!(rhs.0 != 0, "remainder by zero in F_p");
        Fp(0)
    }
}

impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp((P - self.0) % P)
    }
}

impl<const P: u64> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> One for Fp<P> {
    fn one() -> Self {
        Fp(1 % P)
    }
}

impl<const P: u64> Num for Fp<P> {
    type FromStrRadixErr = num_bigint::ParseBigIntError;
    fn from_str_radix(s: &str, radix: u32) -> std::result::Result<Self, Self::FromStrRadixErr> {
        BigInt::from_str_radix(s, radix).map(|v| Self::from_bigint(&v))
    }
}

impl<const P: u64> Field for Fp<P> {
    fn characteristic() -> u64 {
        #[allow(clippy::let_unit_value)]
        let _ = Self::CHECK;
        P
    }

    fn field_name() -> String {
        format!("F{P}")
    }

    fn from_fraction(num: &BigInt, den: &BigInt) -> Option<Self> {
        let d = Self::from_bigint(den);
        d.inverse().map(|inv| Self::from_bigint(num) * inv)
    }

    fn inverse(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            // Fermat; P is prime.
            Some(self.pow(P - 2))
        }
    }
}

/// Whether `x` is negative in its canonical rendering (rationals only).
pub(crate) fn renders_negative<F: Field>(x: &F) -> bool {
    format!("{x}").starts_with('-')
}

pub type F2 = Fp<2>;
pub type F3 = Fp<3>;
pub type F5 = Fp<5>;
pub type F7 = Fp<7>;

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn rationals_lowest_terms() {
        let x = Rational::parse_scalar("6/-4").unwrap();
        assert_eq!(x, q(-3, 2));
        assert_eq!(x.denom(), &BigInt::from(2));
        assert_eq!(format!("{x}"), "-3/2");
    }

    #[test]
    fn rational_zero_denominator_rejected() {
        assert!(Rational::parse_scalar("1/0").is_err());
        assert!(Rational::parse_scalar("abc").is_err());
    }

    #[test]
    fn prime_field_arithmetic() {
        let a = F7::new(3);
        let b = F7::new(5);
        assert_eq!((a + b).value(), 1);
        assert_eq!((a - b).value(), 5);
        assert_eq!((a * b).value(), 1);
        assert_eq!(a.inverse().unwrap() * a, F7::one());
        assert_eq!(F7::new(-1).value(), 6);
        assert!(F7::zero().inverse().is_none());
    }

    #[test]
    fn prime_field_parse() {
        assert_eq!(F7::parse_scalar("1/2").unwrap(), F7::new(4));
        assert_eq!(F2::parse_scalar("-1").unwrap(), F2::one());
        assert!(F2::parse_scalar("1/2").is_err());
    }

    #[test]
    fn characteristics() {
        assert_eq!(Rational::characteristic(), 0);
        assert_eq!(F2::characteristic(), 2);
        assert_eq!(F2::field_name(), "F2");
    }
}
