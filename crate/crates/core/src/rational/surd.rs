//! Exact arithmetic on quadratic irrationals (p + q sqrt(d)) / r.
//!
//! Certified convergents need exact floors, signs and comparisons, so this
//! stays in integer arithmetic throughout. A value is normalised to r > 0,
//! gcd(p, q, r) = 1, and a perfect-square or vanishing radicand folded away,
//! which makes `q != 0` a proof of irrationality.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::integer::Roots;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticReal {
    p: BigInt,
    q: BigInt,
    d: u64,
    r: BigInt,
}

impl QuadraticReal {
    pub fn new(p: BigInt, q: BigInt, d: u64, r: BigInt) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::RatioParse("zero denominator".into()));
        }
        let mut v = Self { p, q, d, r };
        v.normalize();
        Ok(v)
    }

    pub fn from_rational(num: BigInt, den: BigInt) -> Result<Self> {
        Self::new(num, BigInt::zero(), 0, den)
    }

    pub fn from_int(n: i64) -> Self {
        Self {
            p: BigInt::from(n),
            q: BigInt::zero(),
            d: 0,
            r: BigInt::one(),
        }
    }

    pub fn sqrt_of(d: u64) -> Self {
        let mut v = Self {
            p: BigInt::zero(),
            q: BigInt::one(),
            d,
            r: BigInt::one(),
        };
        v.normalize();
        v
    }

    fn normalize(&mut self) {
        if self.q.is_zero() {
            self.d = 0;
        } else if self.d == 0 {
            self.q = BigInt::zero();
        } else {
            let s = self.d.sqrt();
            if s * s == self.d {
                // radicand is a perfect square: fold into the rational part
                self.p += &self.q * BigInt::from(s);
                self.q = BigInt::zero();
                self.d = 0;
            }
        }
        if self.r.is_negative() {
            self.p = -std::mem::take(&mut self.p);
            self.q = -std::mem::take(&mut self.q);
            self.r = -std::mem::take(&mut self.r);
        }
        let g = self.p.gcd(&self.q).gcd(&self.r);
        if !g.is_zero() && !g.is_one() {
            self.p /= &g;
            self.q /= &g;
            self.r /= &g;
        }
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    /// True iff the normalised form proves irrationality (nonzero multiple
    /// of a non-square radical).
    pub fn certified_irrational(&self) -> bool {
        !self.q.is_zero()
    }

    /// Rational numerator/denominator, when rational.
    pub fn as_rational(&self) -> Option<(BigInt, BigInt)> {
        self.is_rational().then(|| (self.p.clone(), self.r.clone()))
    }

    fn radicand(&self, other: &Self) -> u64 {
        // binary operations require compatible radicands
        if self.q.is_zero() {
            other.d
        } else if other.q.is_zero() {
            self.d
        } else {
            assert_eq!(self.d, other.d, "mixed radicands {} vs {}", self.d, other.d);
            self.d
        }
    }

    /// Sign of a + b sqrt(d) for d non-square (or b = 0).
    fn surd_sign(a: &BigInt, b: &BigInt, d: u64) -> Ordering {
        if b.is_zero() {
            return a.cmp(&BigInt::zero());
        }
        if a.is_zero() {
            return b.cmp(&BigInt::zero());
        }
        match (a.is_positive(), b.is_positive()) {
            (true, true) => Ordering::Greater,
            (false, false) => Ordering::Less,
            (true, false) => (a * a).cmp(&(b * b * BigInt::from(d))),
            (false, true) => (b * b * BigInt::from(d)).cmp(&(a * a)),
        }
    }

    pub fn sign(&self) -> Ordering {
        Self::surd_sign(&self.p, &self.q, self.d)
    }

    /// Compare against the fraction a/b, b != 0.
    pub fn cmp_rational(&self, a: &BigInt, b: &BigInt) -> Ordering {
        assert!(!b.is_zero());
        let (a, b) = if b.is_negative() {
            (-a.clone(), -b.clone())
        } else {
            (a.clone(), b.clone())
        };
        // sign of (p b - a r) + (q b) sqrt(d), denominator r b > 0
        Self::surd_sign(&(&self.p * &b - &a * &self.r), &(&self.q * &b), self.d)
    }

    pub fn cmp(&self, other: &Self) -> Ordering {
        self.sub(other).sign()
    }

    pub fn neg(&self) -> Self {
        let mut v = Self {
            p: -self.p.clone(),
            q: -self.q.clone(),
            d: self.d,
            r: self.r.clone(),
        };
        v.normalize();
        v
    }

    pub fn sub(&self, other: &Self) -> Self {
        let d = self.radicand(other);
        let mut v = Self {
            p: &self.p * &other.r - &other.p * &self.r,
            q: &self.q * &other.r - &other.q * &self.r,
            d,
            r: &self.r * &other.r,
        };
        v.normalize();
        v
    }

    pub fn sub_int(&self, n: &BigInt) -> Self {
        let mut v = Self {
            p: &self.p - n * &self.r,
            q: self.q.clone(),
            d: self.d,
            r: self.r.clone(),
        };
        v.normalize();
        v
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.radicand(other);
        let mut v = Self {
            p: &self.p * &other.p + &self.q * &other.q * BigInt::from(d),
            q: &self.p * &other.q + &self.q * &other.p,
            d,
            r: &self.r * &other.r,
        };
        v.normalize();
        v
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        let mut v = Self {
            p: &self.p * n,
            q: &self.q * n,
            d: self.d,
            r: self.r.clone(),
        };
        v.normalize();
        v
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    /// 1/x via conjugate rationalisation. Errors on zero.
    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::RatioParse("division by zero".into()));
        }
        // 1 / ((p + q sqrt d)/r) = r (p - q sqrt d) / (p^2 - q^2 d)
        let denom = &self.p * &self.p - &self.q * &self.q * BigInt::from(self.d);
        let mut v = Self {
            p: &self.r * &self.p,
            q: -(&self.r * &self.q),
            d: self.d,
            r: denom,
        };
        if v.r.is_zero() {
            return Err(Error::RatioParse("division by zero".into()));
        }
        v.normalize();
        Ok(v)
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        if self.q.is_zero() {
            return self.p.div_floor(&self.r);
        }
        // bracket q sqrt(d) between consecutive integers
        let qq_d = (&self.q * &self.q * BigInt::from(self.d)).to_biguint().unwrap();
        let s = BigInt::from(qq_d.sqrt());
        let approx_num = if self.q.is_positive() {
            &self.p + &s
        } else {
            &self.p - &s - BigInt::one()
        };
        let mut f = approx_num.div_floor(&self.r);
        // verify f <= x < f + 1 exactly, adjusting by one if the bracket
        // straddled a multiple of r
        while self.cmp_rational(&f, &BigInt::one()) == Ordering::Less {
            f -= BigInt::one();
        }
        while self.cmp_rational(&(&f + BigInt::one()), &BigInt::one()) != Ordering::Less {
            f += BigInt::one();
        }
        f
    }

    pub fn abs(&self) -> Self {
        if self.sign() == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// |self| compared with |other|, exactly, via squares.
    pub fn abs_cmp(&self, other: &Self) -> Ordering {
        self.square().cmp(&other.square())
    }

    pub fn to_f64(&self) -> f64 {
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        let q = self.q.to_f64().unwrap_or(f64::NAN);
        let r = self.r.to_f64().unwrap_or(f64::NAN);
        (p + q * (self.d as f64).sqrt()) / r
    }
}

impl std::fmt::Display for QuadraticReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.q.is_zero() {
            if self.r.is_one() {
                write!(f, "{}", self.p)
            } else {
                write!(f, "{}/{}", self.p, self.r)
            }
        } else {
            write!(f, "({} + {}*sqrt({}))/{}", self.p, self.q, self.d, self.r)
        }
    }
}
