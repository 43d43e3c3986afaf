//! Exact coefficient fields: the rationals and prime fields `F_p`.
//!
//! A [`Field`] is a runtime descriptor; [`FieldScalar`] values carry their own
//! field tag so that matrices never need a separate context object. Mixing
//! scalars from different fields is a programming error and panics.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} is too large (limit 2^31)")]
    PrimeTooLarge(u64),
    #[error("unrecognised field selector {0:?} (expected `q` or `p:PRIME`)")]
    BadSelector(String),
    #[error("cannot parse {0:?} as a field element")]
    BadScalar(String),
}

/// Which coefficient field a computation runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[derive(Default)]
pub enum Field {
    #[default]
    Rational,
    Prime(u64),
}


fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if p >= 1 << 31 {
            return Err(FieldError::PrimeTooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Field::Prime(p))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => *p,
        }
    }

    pub fn zero(&self) -> FieldScalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldScalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> FieldScalar {
        match *self {
            Field::Rational => FieldScalar::Q(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => FieldScalar::Fp {
                value: v.rem_euclid(p as i64) as u64,
                modulus: p,
            },
        }
    }

    /// `(-1)^exponent` as a field element.
    pub fn sign(&self, exponent: i64) -> FieldScalar {
        if exponent.rem_euclid(2) == 0 {
            self.one()
        } else {
            self.from_i64(-1)
        }
    }

    /// Parses `"a"` or `"a/b"`.
    pub fn parse_scalar(&self, s: &str) -> Result<FieldScalar, FieldError> {
        let bad = || FieldError::BadScalar(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        match *self {
            Field::Rational => Ok(FieldScalar::Q(BigRational::new(num, den))),
            Field::Prime(p) => {
                let reduce = |x: &BigInt| -> u64 {
                    let m = BigInt::from(p);
                    (((x % &m) + &m) % &m).to_u64().expect("residue fits in u64")
                };
                let d = self.from_i64(reduce(&den) as i64);
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(&self.from_i64(reduce(&num) as i64) / &d)
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "q"),
            Field::Prime(p) => write!(f, "p:{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(Field::Rational);
        }
        if let Some(rest) = s.strip_prefix("p:") {
            let p: u64 = rest
                .parse()
                .map_err(|_| FieldError::BadSelector(s.to_string()))?;
            return Field::prime(p);
        }
        Err(FieldError::BadSelector(s.to_string()))
    }
}

/// An element of `Q` or `F_p`.
///
/// Rationals are kept in lowest terms with a positive denominator (guaranteed
/// by `BigRational`); residues always lie in `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum FieldScalar {
    Q(BigRational),
    Fp { value: u64, modulus: u64 },
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

impl FieldScalar {
    pub fn field(&self) -> Field {
        match self {
            FieldScalar::Q(_) => Field::Rational,
            FieldScalar::Fp { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldScalar::Q(q) => q.is_zero(),
            FieldScalar::Fp { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldScalar::Q(q) => q.is_one(),
            FieldScalar::Fp { value, .. } => *value == 1,
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> FieldScalar {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            FieldScalar::Q(q) => FieldScalar::Q(q.recip()),
            FieldScalar::Fp { value, modulus } => FieldScalar::Fp {
                value: mod_pow(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
        }
    }

    /// `Some(+1)` / `Some(-1)` when the scalar is a sign, `None` otherwise.
    /// Over `F_2` the two signs coincide and `+1` is reported.
    pub fn as_sign(&self) -> Option<i8> {
        if self.is_one() {
            return Some(1);
        }
        if (-self).is_one() {
            return Some(-1);
        }
        None
    }

    pub fn to_rational(&self) -> Option<&BigRational> {
        match self {
            FieldScalar::Q(q) => Some(q),
            FieldScalar::Fp { .. } => None,
        }
    }

    fn check_same(&self, other: &FieldScalar) {
        if let (FieldScalar::Fp { modulus: a, .. }, FieldScalar::Fp { modulus: b, .. }) =
            (self, other)
        {
            assert_eq!(a, b, "mixed prime fields");
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $q:expr, $fp:expr) => {
        impl<'a> $trait<&'a FieldScalar> for &'a FieldScalar {
            type Output = FieldScalar;
            fn $method(self, rhs: &'a FieldScalar) -> FieldScalar {
                self.check_same(rhs);
                match (self, rhs) {
                    (FieldScalar::Q(a), FieldScalar::Q(b)) => FieldScalar::Q($q(a, b)),
                    (
                        FieldScalar::Fp { value: a, modulus },
                        FieldScalar::Fp { value: b, .. },
                    ) => FieldScalar::Fp {
                        value: $fp(*a, *b, *modulus),
                        modulus: *modulus,
                    },
                    _ => panic!("mixed rational and prime-field scalars"),
                }
            }
        }
        impl $trait for FieldScalar {
            type Output = FieldScalar;
            fn $method(self, rhs: FieldScalar) -> FieldScalar {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a: &BigRational, b: &BigRational| a + b, |a: u64,
                                                              b: u64,
                                                              m: u64| (a + b) % m);
binop!(Sub, sub, |a: &BigRational, b: &BigRational| a - b, |a: u64,
                                                              b: u64,
                                                              m: u64| (a + m - b) % m);
binop!(Mul, mul, |a: &BigRational, b: &BigRational| a * b, |a: u64,
                                                              b: u64,
                                                              m: u64| a * b % m);

impl<'a> Div<&'a FieldScalar> for &'a FieldScalar {
    type Output = FieldScalar;
    fn div(self, rhs: &'a FieldScalar) -> FieldScalar {
        self * &rhs.inv()
    }
}

impl Div for FieldScalar {
    type Output = FieldScalar;
    fn div(self, rhs: FieldScalar) -> FieldScalar {
        &self / &rhs
    }
}

impl Neg for &FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        match self {
            FieldScalar::Q(q) => FieldScalar::Q(-q),
            FieldScalar::Fp { value, modulus } => FieldScalar::Fp {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
        }
    }
}

impl Neg for FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        -&self
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldScalar::Q(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            FieldScalar::Fp { value, .. } => write!(f, "{value}"),
        }
    }
}

impl fmt::Debug for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldScalar::Q(_) => write!(f, "{self}"),
            FieldScalar::Fp { modulus, .. } => write!(f, "{self} (mod {modulus})"),
        }
    }
}

/// Total order used only for deterministic output (not a field order).
impl PartialOrd for FieldScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (FieldScalar::Q(a), FieldScalar::Q(b)) => a.cmp(b),
            (FieldScalar::Fp { value: a, .. }, FieldScalar::Fp { value: b, .. }) => a.cmp(b),
            (FieldScalar::Q(_), _) => Ordering::Less,
            _ => Ordering::Greater,
        }
    }
}

impl FieldScalar {
    pub fn is_negative_rational(&self) -> bool {
        matches!(self, FieldScalar::Q(q) if q.is_negative())
    }
}
