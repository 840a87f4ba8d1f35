//! Exact arithmetic in `Z[φ]` and its fraction field `Q(φ)`.
//!
//! An element `a + bφ` is stored by its two integer coordinates. Signs are
//! decided exactly from `a + bφ = ((2a + b) + b√5) / 2`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeration::fib_pair;

/// The element `a + bφ` of `Z[φ]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GoldenInt {
    pub a: BigInt,
    pub b: BigInt,
}

/// Integer square root, `⌊√n⌋` for `n ≥ 0`.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of a negative number");
    n.sqrt()
}

impl GoldenInt {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        GoldenInt { a: a.into(), b: b.into() }
    }

    pub fn zero() -> Self {
        GoldenInt::new(0, 0)
    }

    pub fn one() -> Self {
        GoldenInt::new(1, 0)
    }

    /// `φ` itself.
    pub fn phi() -> Self {
        GoldenInt::new(0, 1)
    }

    pub fn from_int(a: impl Into<BigInt>) -> Self {
        GoldenInt::new(a, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact sign of the real number `a + bφ`.
    pub fn signum(&self) -> i32 {
        let c = BigInt::from(2) * &self.a + &self.b;
        let sc = sign_of(&c);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return sc;
        }
        if sc == 0 || sc == sb {
            return sb;
        }
        // opposite signs: compare c² with 5b²
        let lhs = &c * &c;
        let rhs = BigInt::from(5) * &self.b * &self.b;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sc,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    /// Field norm `(a + bφ)(a + b - bφ) = a² + ab - b²`.
    pub fn norm(&self) -> BigInt {
        &self.a * &self.a + &self.a * &self.b - &self.b * &self.b
    }

    /// Galois conjugate `a + b - bφ`.
    pub fn conj(&self) -> Self {
        GoldenInt { a: &self.a + &self.b, b: -&self.b }
    }

    /// `φ^k` for any integer `k`.
    pub fn phi_pow(k: i64) -> Self {
        let m = k.unsigned_abs() as usize;
        // φ^m = F_m φ + F_{m-1}
        let (fm1, fm) = fib_pair(m);
        if k >= 0 {
            return GoldenInt::new(BigInt::from(fm1), BigInt::from(fm));
        }
        // φ^{-m} = (-1)^m (F_{m+1} - F_m φ)
        let fp1 = BigInt::from(&fm1 + &fm);
        let fm = BigInt::from(fm);
        if m % 2 == 0 {
            GoldenInt { a: fp1, b: -fm }
        } else {
            GoldenInt { a: -fp1, b: fm }
        }
    }

    /// Multiplication by an integer.
    pub fn scale(&self, k: &BigInt) -> Self {
        GoldenInt { a: &self.a * k, b: &self.b * k }
    }

    /// `⌊a + bφ⌋`.
    pub fn floor(&self) -> BigInt {
        let c = BigInt::from(2) * &self.a + &self.b;
        let t = if self.b.is_zero() {
            BigInt::zero()
        } else {
            let s = isqrt(&(BigInt::from(5) * &self.b * &self.b));
            if self.b.is_positive() {
                s
            } else {
                // ⌊-√(5b²)⌋ = -isqrt - 1 since 5b² is never a square here
                -s - 1
            }
        };
        // ⌊(c + b√5)/2⌋ = ⌊(c + ⌊b√5⌋)/2⌋ because b√5 is irrational when b ≠ 0
        (c + t).div_floor(&BigInt::from(2))
    }

    /// `x - ⌊x⌋`, an element of `[0, 1)`.
    pub fn frac(&self) -> Self {
        let f = self.floor();
        GoldenInt { a: &self.a - f, b: self.b.clone() }
    }

    /// Rational approximation with relative error below `2^{-bits}`.
    /// The result is `m / 2^s` computed from an exact floor.
    pub fn to_float(&self, bits: u32) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let threshold = BigInt::one() << (bits as usize + 1);
        let mut s: usize = bits as usize + 2;
        loop {
            let scaled = self.scale(&(BigInt::one() << s));
            let m = scaled.floor();
            if m.abs() >= threshold {
                return BigRational::new(m, BigInt::one() << s);
            }
            s += bits as usize;
        }
    }

    /// Nearest double, for reporting and candidate screening.
    pub fn to_f64(&self) -> f64 {
        let bits_a = self.a.bits().max(self.b.bits());
        if bits_a < 50 {
            let a = self.a.to_f64().unwrap_or(0.0);
            let b = self.b.to_f64().unwrap_or(0.0);
            let v = a + b * crate::golden::PHI;
            // cancellation is mild when the value is not tiny
            if v.abs() > 1e-3 * (a.abs() + b.abs()).max(1.0) {
                return v;
            }
        }
        ratio_to_f64(&self.to_float(64))
    }
}

/// `φ` as a double.
pub const PHI: f64 = 1.618_033_988_749_895;

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    let n = r.numer();
    let d = r.denom();
    let shift = n.bits() as i64 - 60;
    let dshift = d.bits() as i64 - 60;
    let nn = if shift > 0 { n >> shift as usize } else { n.clone() };
    let dd = if dshift > 0 { d >> dshift as usize } else { d.clone() };
    let base = nn.to_f64().unwrap_or(0.0) / dd.to_f64().unwrap_or(1.0);
    base * 2f64.powi((shift.max(0) - dshift.max(0)) as i32)
}

fn sign_of(x: &BigInt) -> i32 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl PartialOrd for GoldenInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GoldenInt {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl fmt::Display for GoldenInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_negative() {
            write!(f, "{} - {}φ", self.a, -&self.b)
        } else {
            write!(f, "{} + {}φ", self.a, self.b)
        }
    }
}

impl<'a> Add<&'a GoldenInt> for &'a GoldenInt {
    type Output = GoldenInt;
    fn add(self, o: &GoldenInt) -> GoldenInt {
        GoldenInt { a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl<'a> Sub<&'a GoldenInt> for &'a GoldenInt {
    type Output = GoldenInt;
    fn sub(self, o: &GoldenInt) -> GoldenInt {
        GoldenInt { a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl<'a> Mul<&'a GoldenInt> for &'a GoldenInt {
    type Output = GoldenInt;
    fn mul(self, o: &GoldenInt) -> GoldenInt {
        let bd = &self.b * &o.b;
        GoldenInt {
            a: &self.a * &o.a + &bd,
            b: &self.a * &o.b + &self.b * &o.a + bd,
        }
    }
}

impl Neg for &GoldenInt {
    type Output = GoldenInt;
    fn neg(self) -> GoldenInt {
        GoldenInt { a: -&self.a, b: -&self.b }
    }
}

impl Neg for GoldenInt {
    type Output = GoldenInt;
    fn neg(self) -> GoldenInt {
        GoldenInt { a: -self.a, b: -self.b }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<GoldenInt> for GoldenInt {
            type Output = GoldenInt;
            fn $m(self, o: GoldenInt) -> GoldenInt {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a GoldenInt> for GoldenInt {
            type Output = GoldenInt;
            fn $m(self, o: &GoldenInt) -> GoldenInt {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<GoldenInt> for &'a GoldenInt {
            type Output = GoldenInt;
            fn $m(self, o: GoldenInt) -> GoldenInt {
                self.$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&GoldenInt> for GoldenInt {
    fn add_assign(&mut self, o: &GoldenInt) {
        self.a += &o.a;
        self.b += &o.b;
    }
}

impl SubAssign<&GoldenInt> for GoldenInt {
    fn sub_assign(&mut self, o: &GoldenInt) {
        self.a -= &o.a;
        self.b -= &o.b;
    }
}

impl From<i64> for GoldenInt {
    fn from(a: i64) -> Self {
        GoldenInt::from_int(a)
    }
}

/// `gadd(x, y) = x + y`.
pub fn gadd(x: &GoldenInt, y: &GoldenInt) -> GoldenInt {
    x + y
}

/// `gmul(x, y) = xy`.
pub fn gmul(x: &GoldenInt, y: &GoldenInt) -> GoldenInt {
    x * y
}

/// `gneg(x) = -x`.
pub fn gneg(x: &GoldenInt) -> GoldenInt {
    -x
}

/// Exact sign in `{-1, 0, 1}`.
pub fn gsign(x: &GoldenInt) -> i32 {
    x.signum()
}

/// Field norm.
pub fn gnorm(x: &GoldenInt) -> BigInt {
    x.norm()
}

/// `φ^k`.
pub fn phi_pow(k: i64) -> GoldenInt {
    GoldenInt::phi_pow(k)
}

/// `⌊x⌋`.
pub fn gfloor(x: &GoldenInt) -> BigInt {
    x.floor()
}

/// `x - ⌊x⌋`.
pub fn gfrac(x: &GoldenInt) -> GoldenInt {
    x.frac()
}

/// Approximation of `x` with relative error below `2^{1-bits}`.
pub fn to_float(x: &GoldenInt, bits: u32) -> Result<BigRational> {
    if bits < 24 {
        return Err(Error::InvalidArgument("to_float needs at least 24 bits".into()));
    }
    Ok(x.to_float(bits))
}

/// An element `num / den` of `Q(φ)` with `den > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GoldenRational {
    num: GoldenInt,
    den: BigInt,
}

impl GoldenRational {
    pub fn new(num: GoldenInt, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        let mut r = GoldenRational { num, den };
        r.reduce();
        Ok(r)
    }

    pub fn from_golden(num: GoldenInt) -> Self {
        GoldenRational { num, den: BigInt::one() }
    }

    pub fn from_ratio(p: i64, q: i64) -> Result<Self> {
        GoldenRational::new(GoldenInt::from_int(p), q)
    }

    pub fn zero() -> Self {
        GoldenRational::from_golden(GoldenInt::zero())
    }

    pub fn one() -> Self {
        GoldenRational::from_golden(GoldenInt::one())
    }

    pub fn numer(&self) -> &GoldenInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    fn reduce(&mut self) {
        if self.den.is_negative() {
            self.den = -&self.den;
            self.num = -&self.num;
        }
        let g = self.num.a.gcd(&self.num.b).gcd(&self.den);
        if !g.is_zero() && !g.is_one() {
            self.num.a /= &g;
            self.num.b /= &g;
            self.den /= &g;
        }
        if self.num.is_zero() {
            self.den = BigInt::one();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn signum(&self) -> i32 {
        self.num.signum()
    }

    /// Multiplicative inverse, `conj(x) / N(x)`.
    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidArgument("inverse of zero".into()));
        }
        let n = self.num.norm();
        GoldenRational::new(self.num.conj().scale(&self.den), n)
    }

    pub fn add(&self, o: &Self) -> Self {
        let num = self.num.scale(&o.den) + o.num.scale(&self.den);
        GoldenRational::new(num, &self.den * &o.den).expect("nonzero denominator")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        GoldenRational { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        GoldenRational::new(&self.num * &o.num, &self.den * &o.den).expect("nonzero denominator")
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.recip()?))
    }

    /// Value as `(p + qφ)` with rational coordinates.
    pub fn coords(&self) -> (BigRational, BigRational) {
        (
            BigRational::new(self.num.a.clone(), self.den.clone()),
            BigRational::new(self.num.b.clone(), self.den.clone()),
        )
    }

    /// Rational coordinate when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num.b.is_zero() {
            Some(BigRational::new(self.num.a.clone(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.num.to_float(64) / BigRational::from_integer(self.den.clone());
        ratio_to_f64(&r)
    }
}

impl PartialOrd for GoldenRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GoldenRational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sub(other).signum().cmp(&0)
    }
}

impl From<GoldenInt> for GoldenRational {
    fn from(g: GoldenInt) -> Self {
        GoldenRational::from_golden(g)
    }
}

impl fmt::Display for GoldenRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / {}", self.num, self.den)
        }
    }
}
