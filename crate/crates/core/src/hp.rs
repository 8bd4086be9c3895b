//! Interval evaluation of `ln` and `exp` on rationals.
//!
//! Every result is a closed rational interval guaranteed to contain the true
//! value. Series are summed in binary fixed point with floor/ceil rounding on
//! the lower/upper track and an explicit tail bound, so widths are around
//! `2^-PRECISION_BITS` relative.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_reals::Rational;

pub const PRECISION_BITS: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RealInterval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    pub fn exact(x: Rational) -> Self {
        Self {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self::exact(Rational::from_integer(n.into()))
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    /// Midpoint as `f64`, for presentation only.
    pub fn approx(&self) -> f64 {
        to_f64(&self.midpoint())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(&self.lo - &other.hi, &self.hi - &other.lo)
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.hi, -&self.lo)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = p.iter().min().cloned().unwrap_or_default();
        let hi = p.iter().max().cloned().unwrap_or_default();
        Self::new(lo, hi)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.mul(&Self::exact(c.clone()))
    }

    pub fn recip(&self) -> Result<Self> {
        if !self.lo.is_positive() && !self.hi.is_negative() {
            return Err(Error::DomainError("reciprocal of an interval containing 0".into()));
        }
        Ok(Self::new(self.hi.recip(), self.lo.recip()))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    /// Widens to dyadic endpoints with `bits` fractional bits.
    pub fn outward(&self, bits: usize) -> Self {
        let scale = BigInt::one() << bits;
        let lo = floor_rat(&(&self.lo * Rational::from_integer(scale.clone())));
        let hi = ceil_rat(&(&self.hi * Rational::from_integer(scale.clone())));
        Self::new(Rational::new(lo, scale.clone()), Rational::new(hi, scale))
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    // Scale into a range where numerator and denominator are both finite.
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db;
    let scaled = if shift >= 0 {
        r / Rational::from_integer(BigInt::one() << shift as usize)
    } else {
        r * Rational::from_integer(BigInt::one() << (-shift) as usize)
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

fn floor_rat(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

fn ceil_rat(r: &Rational) -> BigInt {
    r.numer().div_ceil(r.denom())
}

fn fixed_floor(r: &Rational, bits: usize) -> BigInt {
    floor_rat(&(r * Rational::from_integer(BigInt::one() << bits)))
}

fn fixed_ceil(r: &Rational, bits: usize) -> BigInt {
    ceil_rat(&(r * Rational::from_integer(BigInt::one() << bits)))
}

fn from_fixed(v: BigInt, bits: usize) -> Rational {
    Rational::new(v, BigInt::one() << bits)
}

fn mul_floor(a: &BigInt, b: &BigInt, bits: usize) -> BigInt {
    (a * b) >> bits
}

fn mul_ceil(a: &BigInt, b: &BigInt, bits: usize) -> BigInt {
    -((-(a * b)) >> bits)
}

/// `atanh(z)` for rational `0 <= z <= 1/3`.
fn atanh_small(z: &Rational, bits: usize) -> RealInterval {
    debug_assert!(!z.is_negative() && z <= &Rational::new(1.into(), 3.into()));
    let zl = fixed_floor(z, bits);
    let zh = fixed_ceil(z, bits);
    let z2l = mul_floor(&zl, &zl, bits);
    let z2h = mul_ceil(&zh, &zh, bits);
    let (mut term_l, mut term_h) = (zl, zh);
    let (mut sum_l, mut sum_h) = (BigInt::zero(), BigInt::zero());
    let mut k: u64 = 0;
    loop {
        let d = BigInt::from(2 * k + 1);
        sum_l += term_l.div_floor(&d);
        sum_h += term_h.div_ceil(&d);
        term_l = mul_floor(&term_l, &z2l, bits);
        term_h = mul_ceil(&term_h, &z2h, bits);
        k += 1;
        if term_h <= BigInt::one() {
            // Remaining terms sum to at most term_h / (1 - z²) <= 9/8 term_h.
            sum_h += &term_h * 2 + 1;
            break;
        }
    }
    RealInterval::new(from_fixed(sum_l, bits), from_fixed(sum_h, bits))
}

fn ln2_at(bits: usize) -> RealInterval {
    let a = atanh_small(&Rational::new(1.into(), 3.into()), bits);
    a.scale(&Rational::from_integer(2.into()))
}

/// `ln 2` at the default precision.
pub fn ln2() -> &'static RealInterval {
    static LN2: OnceLock<RealInterval> = OnceLock::new();
    LN2.get_or_init(|| ln2_at(PRECISION_BITS + 16))
}

/// Certified `ln x` for rational `x > 0`.
pub fn ln(x: &Rational) -> Result<RealInterval> {
    if !x.is_positive() {
        return Err(Error::DomainError(format!("ln of non-positive {x}")));
    }
    // x = y 2^e with 1 <= y < 2
    let mut e = x.numer().bits() as i64 - x.denom().bits() as i64;
    let pow2 = |e: i64| -> Rational {
        if e >= 0 {
            Rational::from_integer(BigInt::one() << e as usize)
        } else {
            Rational::new(BigInt::one(), BigInt::one() << (-e) as usize)
        }
    };
    let mut y = x / pow2(e);
    let one = Rational::one();
    let two = Rational::from_integer(2.into());
    if y < one {
        e -= 1;
        y *= &two;
    } else if y >= two {
        e += 1;
        y /= &two;
    }
    let z = (&y - &one) / (&y + &one);
    let bits = PRECISION_BITS + 16;
    let ln_y = atanh_small(&z, bits).scale(&two);
    let ln2_part = ln2().scale(&Rational::from_integer(e.into()));
    Ok(ln_y.add(&ln2_part))
}

/// `ln` of every point of a positive interval.
pub fn ln_interval(x: &RealInterval) -> Result<RealInterval> {
    let lo = ln(&x.lo)?;
    let hi = ln(&x.hi)?;
    Ok(RealInterval::new(lo.lo, hi.hi))
}

/// Certified `exp x` for rational `x`.
pub fn exp(x: &Rational) -> RealInterval {
    if x.is_zero() {
        return RealInterval::exact(Rational::one());
    }
    if x.is_negative() {
        let pos = exp(&-x);
        return pos.recip().expect("exp is positive");
    }
    // r = x / 2^s <= 1/16
    let int_bits = ceil_rat(x).bits() as usize;
    let s = int_bits + 4;
    let bits = PRECISION_BITS + s + 32;
    let r = x / Rational::from_integer(BigInt::one() << s);
    let rl = fixed_floor(&r, bits);
    let rh = fixed_ceil(&r, bits);
    let unit = BigInt::one() << bits;
    let (mut term_l, mut term_h) = (unit.clone(), unit.clone());
    let (mut sum_l, mut sum_h) = (unit.clone(), unit);
    let mut k: u64 = 1;
    loop {
        let d = BigInt::from(k);
        term_l = mul_floor(&term_l, &rl, bits).div_floor(&d);
        term_h = mul_ceil(&term_h, &rh, bits).div_ceil(&d);
        sum_l += &term_l;
        sum_h += &term_h;
        k += 1;
        if term_h <= BigInt::one() {
            // r <= 1/16 so the tail is below term_h * r / (1 - r) < term_h.
            sum_h += &term_h + 1;
            break;
        }
    }
    for _ in 0..s {
        sum_l = mul_floor(&sum_l, &sum_l, bits);
        sum_h = mul_ceil(&sum_h, &sum_h, bits);
    }
    RealInterval::new(from_fixed(sum_l, bits), from_fixed(sum_h, bits))
}

/// `exp` of every point of an interval.
pub fn exp_interval(x: &RealInterval) -> RealInterval {
    RealInterval::new(exp(&x.lo).lo, exp(&x.hi).hi)
}

/// Certified `log2 x` for rational `x > 0`.
pub fn log2(x: &Rational) -> Result<RealInterval> {
    ln(x)?.div(ln2())
}

/// `log2` of every point of a positive interval.
pub fn log2_interval(x: &RealInterval) -> Result<RealInterval> {
    ln_interval(x)?.div(ln2())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    // Decimal digits frozen from an independent 60-digit mpmath evaluation.
    fn dec(s: &str) -> Rational {
        crate::exact_reals::parse_rational(s).unwrap()
    }

    fn tiny() -> Rational {
        Rational::new(1.into(), BigInt::one() << 200)
    }

    #[test]
    fn ln2_digits() {
        let l = ln2();
        assert!(l.width() < tiny());
        let lo = dec("0.693147180559945309417232121458176568075500134360255254120679");
        let hi = dec("0.693147180559945309417232121458176568075500134360255254120681");
        assert!(lo < l.lo && l.hi < hi);
    }

    #[test]
    fn exp_one_digits() {
        let e = exp(&q(1, 1));
        let lo = dec("2.718281828459045235360287471352662497757247093699959574966967");
        let hi = dec("2.718281828459045235360287471352662497757247093699959574966968");
        assert!(lo < e.lo && e.hi < hi, "{:?}", e);
        assert!(e.width() < tiny());
    }

    #[test]
    fn ln_of_exp_contains_argument() {
        for x in [q(1, 3), q(5, 2), q(-7, 4), q(100, 1), q(1, 1000)] {
            let e = exp(&x);
            let l = ln_interval(&e).unwrap();
            assert!(l.contains(&x), "{x}");
            assert!(l.width() < Rational::new(1.into(), BigInt::one() << 180));
        }
    }

    #[test]
    fn ln_small_and_large() {
        // ln(1/1024) = -10 ln 2
        let l = ln(&q(1, 1024)).unwrap();
        let expect = ln2().scale(&q(-10, 1));
        assert!(l.lo <= expect.hi && expect.lo <= l.hi);
        assert!(ln(&q(0, 1)).is_err());
        assert!(ln(&q(-1, 2)).is_err());
        let zero = ln(&q(1, 1)).unwrap();
        assert!(zero.lo <= q(0, 1) && q(0, 1) <= zero.hi);
    }

    #[test]
    fn exp_large_argument() {
        let e = exp(&q(1300, 1));
        let l = ln_interval(&e).unwrap();
        assert!(l.contains(&q(1300, 1)));
        let rel = e.width() / &e.lo;
        assert!(rel < Rational::new(1.into(), BigInt::one() << 200));
    }

    #[test]
    fn approx_matches_f64() {
        assert!((ln(&q(24, 1)).unwrap().approx() - 24f64.ln()).abs() < 1e-15);
        assert!((exp(&q(-3, 2)).approx() - (-1.5f64).exp()).abs() < 1e-15);
        assert!((log2(&q(10, 1)).unwrap().approx() - 10f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn outward_contains_original() {
        let x = ln(&q(3, 1)).unwrap();
        let o = x.outward(64);
        assert!(o.lo <= x.lo && x.hi <= o.hi);
        assert!(o.width() <= Rational::new(2.into(), BigInt::one() << 64) + x.width());
    }
}
