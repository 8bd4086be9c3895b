//! Exact arithmetic in a real quadratic field `Q(√d)`.
//!
//! Specs whose partial quotients are eventually periodic denote quadratic
//! irrationals, and so does anything built from them with `sq:` and `poly:`.
//! For such inputs two values of `δ` can coincide exactly, which no
//! enclosure can certify; the sweep falls back to this module to settle
//! those comparisons.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exact_reals::{PartialQuotients, Rational, RealSpec};
use crate::words::WordSpec;

/// `a + b √d` with `d > 1` not a square whenever `b != 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quadratic {
    pub a: Rational,
    pub b: Rational,
    pub d: BigInt,
}

impl Quadratic {
    pub fn rational(a: Rational) -> Self {
        Self {
            a,
            b: Rational::zero(),
            d: BigInt::zero(),
        }
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self::rational(Rational::from_integer(n.into()))
    }

    /// `(p + q √disc) / r`, collapsing to a rational when `disc` is a square.
    fn surd(p: BigInt, q: BigInt, disc: BigInt, r: BigInt) -> Self {
        let root = disc.sqrt();
        if &root * &root == disc {
            return Self::rational(Rational::new(p + q * root, r));
        }
        let (mut d, mut q) = (disc, q);
        // strip small square factors so equal fields share a radicand
        let mut f = BigInt::from(2);
        while &f * &f <= d && f < BigInt::from(10_000) {
            let f2 = &f * &f;
            while (&d % &f2).is_zero() {
                d /= &f2;
                q *= &f;
            }
            f += 1;
        }
        Self {
            a: Rational::new(p, r.clone()),
            b: Rational::new(q, r),
            d,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Field of the pair, or `None` when both are irrational in different
    /// radicands.
    fn common_d(&self, other: &Self) -> Option<BigInt> {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Some(BigInt::zero()),
            (true, false) => Some(other.d.clone()),
            (false, true) => Some(self.d.clone()),
            (false, false) => (self.d == other.d).then(|| self.d.clone()),
        }
    }

    pub fn add(&self, other: &Self) -> Option<Self> {
        Some(Self {
            d: self.common_d(other)?,
            a: &self.a + &other.a,
            b: &self.b + &other.b,
        }
        .normalized())
    }

    pub fn neg(&self) -> Self {
        Self {
            a: -&self.a,
            b: -&self.b,
            d: self.d.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Option<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Option<Self> {
        let d = self.common_d(other)?;
        let dr = Rational::from_integer(d.clone());
        Some(
            Self {
                a: &self.a * &other.a + &self.b * &other.b * dr,
                b: &self.a * &other.b + &self.b * &other.a,
                d,
            }
            .normalized(),
        )
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            a: &self.a * c,
            b: &self.b * c,
            d: self.d.clone(),
        }
        .normalized()
    }

    pub fn recip(&self) -> Option<Self> {
        let norm = &self.a * &self.a - &self.b * &self.b * Rational::from_integer(self.d.clone());
        if norm.is_zero() {
            return None;
        }
        Some(Self {
            a: &self.a / &norm,
            b: -&self.b / &norm,
            d: self.d.clone(),
        })
    }

    fn normalized(mut self) -> Self {
        if self.b.is_zero() {
            self.d = BigInt::zero();
        }
        self
    }

    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        if sb == Ordering::Equal || sa == sb {
            return if sa == Ordering::Equal { sb } else { sa };
        }
        if sa == Ordering::Equal {
            return sb;
        }
        // opposite signs: the larger of a² and b² d wins
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * Rational::from_integer(self.d.clone());
        if a2 > b2d {
            sa
        } else {
            sb
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Exact comparison, `None` for different fields.
    pub fn compare(&self, other: &Self) -> Option<Ordering> {
        Some(self.sub(other)?.signum())
    }
}

/// `[b1; b2, ..., bm, b1, b2, ...]` as the positive root of
/// `q_m y² + (q_{m-1} - p_m) y - p_{m-1} = 0`.
fn purely_periodic(period: &[BigInt]) -> Quadratic {
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (period[0].clone(), BigInt::one());
    for a in &period[1..] {
        let p = a * &p1 + &p0;
        let q = a * &q1 + &q0;
        p0 = std::mem::replace(&mut p1, p);
        q0 = std::mem::replace(&mut q1, q);
    }
    let lin = &q0 - &p1;
    let disc = &lin * &lin + BigInt::from(4) * &q1 * &p0;
    Quadratic::surd(-lin, BigInt::one(), disc, q1 * 2)
}

fn periodic_value(a0: &BigInt, period: &[BigInt]) -> Option<Quadratic> {
    let tail = purely_periodic(period).recip()?;
    Quadratic::from_integer(a0.clone()).add(&tail)
}

fn finite_value(terms: &[BigInt]) -> Quadratic {
    let mut r = Rational::from_integer(terms[terms.len() - 1].clone());
    for a in terms[..terms.len() - 1].iter().rev() {
        r = Rational::from_integer(a.clone()) + r.recip();
    }
    Quadratic::rational(r)
}

/// Exact value of a spec that lies in a quadratic field, if it does in an
/// evident way.
pub fn exact_value(spec: &RealSpec) -> Option<Quadratic> {
    match spec {
        RealSpec::ContinuedFraction(cf) => match cf {
            PartialQuotients::Finite(t) => Some(finite_value(t)),
            PartialQuotients::Periodic { a0, period } => periodic_value(a0, period),
            PartialQuotients::Word { a0, word } => match word {
                WordSpec::Periodic(pattern) => {
                    let period: Vec<BigInt> = pattern.iter().map(|&p| BigInt::from(p)).collect();
                    periodic_value(a0, &period)
                }
                WordSpec::Explicit(letters) => {
                    let mut terms = vec![a0.clone()];
                    terms.extend(letters.iter().map(|&l| BigInt::from(l)));
                    Some(finite_value(&terms))
                }
                _ => None,
            },
        },
        RealSpec::Square(inner) => {
            let v = exact_value(inner)?;
            v.mul(&v)
        }
        RealSpec::Expression { coeffs, arg } => {
            let t = exact_value(arg)?;
            let mut acc = Quadratic::rational(Rational::zero());
            for c in coeffs.iter().rev() {
                acc = acc.mul(&t)?.add(&Quadratic::rational(c.clone()))?;
            }
            Some(acc)
        }
    }
}
