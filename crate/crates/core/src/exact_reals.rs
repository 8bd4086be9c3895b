//! Certified rational enclosures of real numbers given by continued fractions.
//!
//! A [`RealSpec`] is either a continued fraction, the square of another spec,
//! or a polynomial image of one. [`enclose`] evaluates it to a closed
//! rational interval; [`refine`] consumes two more partial quotients.
//!
//! Textual format:
//!
//! ```text
//! cf:[a0;a1,a2,...,ak]        finite continued fraction (a rational number)
//! cf:[a0;a1,...,ak,...]       the terms after `;` repeat forever
//! word:<word-id>              [0; w1, w2, ...] for a word from `words`
//! sq:<spec>                   square
//! poly:c0,c1,...,cn:<spec>    c0 + c1 t + ... + cn t^n at t = <spec>
//! ```

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::words::WordSpec;

pub type Rational = BigRational;

/// Partial quotients added by one call to [`refine`].
pub const REFINE_STEP: usize = 2;

/// Default cap on the number of partial quotients consumed.
pub const DEFAULT_MAX_DEPTH: usize = 512;

/// Source of partial quotients `a0; a1, a2, ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PartialQuotients {
    Finite(Vec<BigInt>),
    Periodic { a0: BigInt, period: Vec<BigInt> },
    Word { a0: BigInt, word: WordSpec },
}

impl PartialQuotients {
    /// Number of terms available, `None` when unbounded.
    pub fn len(&self) -> Option<usize> {
        match self {
            PartialQuotients::Finite(t) => Some(t.len()),
            PartialQuotients::Periodic { .. } => None,
            PartialQuotients::Word { word, .. } => word.finite_len().map(|n| n + 1),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// Exactly `k` terms or `StreamExhausted`.
    pub fn take(&self, k: usize) -> Result<Vec<BigInt>> {
        if let Some(n) = self.len() {
            if n < k {
                return Err(Error::StreamExhausted {
                    needed: k,
                    available: n,
                });
            }
        }
        Ok(match self {
            PartialQuotients::Finite(t) => t[..k].to_vec(),
            PartialQuotients::Periodic { a0, period } => {
                let mut out = Vec::with_capacity(k);
                if k > 0 {
                    out.push(a0.clone());
                }
                out.extend(period.iter().cycle().take(k.saturating_sub(1)).cloned());
                out
            }
            PartialQuotients::Word { a0, word } => {
                if k == 0 {
                    return Ok(Vec::new());
                }
                let mut out = Vec::with_capacity(k);
                out.push(a0.clone());
                out.extend(word.letters(k - 1)?.into_iter().map(BigInt::from));
                out
            }
        })
    }

    fn validate(&self) -> Result<()> {
        let positive = |t: &[BigInt]| t.iter().all(|a| a.is_positive());
        match self {
            PartialQuotients::Finite(t) => {
                if t.is_empty() {
                    return Err(Error::Parse("continued fraction needs a0".into()));
                }
                if !positive(&t[1..]) {
                    return Err(Error::Parse("partial quotients a1, a2, ... must be positive".into()));
                }
            }
            PartialQuotients::Periodic { period, .. } => {
                if period.is_empty() || !positive(period) {
                    return Err(Error::Parse("period must be non-empty and positive".into()));
                }
            }
            PartialQuotients::Word { .. } => {}
        }
        Ok(())
    }
}

/// Convergents `p_0/q_0, ..., p_{k-1}/q_{k-1}` of the first `k` terms.
pub fn convergents(cf: &PartialQuotients, k: usize) -> Result<Vec<Rational>> {
    let terms = cf.take(k)?;
    Ok(convergent_pairs(&terms)
        .into_iter()
        .map(|(p, q)| Rational::new(p, q))
        .collect())
}

fn convergent_pairs(terms: &[BigInt]) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::with_capacity(terms.len());
    // (p_{-2}, q_{-2}) = (0, 1), (p_{-1}, q_{-1}) = (1, 0)
    let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    for a in terms {
        let p = a * &p1 + &p2;
        let q = a * &q1 + &q2;
        p2 = std::mem::replace(&mut p1, p.clone());
        q2 = std::mem::replace(&mut q1, q.clone());
        out.push((p, q));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RealSpec {
    ContinuedFraction(PartialQuotients),
    Square(Box<RealSpec>),
    /// `coeffs[0] + coeffs[1] t + ...` evaluated at `t = arg`.
    Expression { coeffs: Vec<Rational>, arg: Box<RealSpec> },
}

impl RealSpec {
    pub fn continued_fraction(cf: PartialQuotients) -> Result<Self> {
        cf.validate()?;
        Ok(RealSpec::ContinuedFraction(cf))
    }

    pub fn word(word: WordSpec) -> Self {
        RealSpec::ContinuedFraction(PartialQuotients::Word {
            a0: BigInt::zero(),
            word,
        })
    }

    pub fn rational(r: &Rational) -> Self {
        RealSpec::ContinuedFraction(PartialQuotients::Finite(rational_cf(r)))
    }

    pub fn square(self) -> Self {
        RealSpec::Square(Box::new(self))
    }

    fn base(&self) -> &PartialQuotients {
        match self {
            RealSpec::ContinuedFraction(cf) => cf,
            RealSpec::Square(inner) => inner.base(),
            RealSpec::Expression { arg, .. } => arg.base(),
        }
    }

    /// Number of partial quotients after which the value is known exactly.
    pub fn exact_depth(&self) -> Option<usize> {
        self.base().len()
    }
}

/// Partial quotients of a rational number.
pub fn rational_cf(r: &Rational) -> Vec<BigInt> {
    let mut out = Vec::new();
    let (mut p, mut q) = (r.numer().clone(), r.denom().clone());
    while !q.is_zero() {
        let (a, rem) = p.div_mod_floor(&q);
        out.push(a);
        p = std::mem::replace(&mut q, rem);
    }
    out
}

/// Closed interval `[lo, hi]` containing the value of a spec.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
    pub depth: usize,
}

impl Enclosure {
    pub fn exact(value: Rational, depth: usize) -> Self {
        Self {
            lo: value.clone(),
            hi: value,
            depth,
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    fn square(&self) -> Self {
        let (a, b) = (&self.lo * &self.lo, &self.hi * &self.hi);
        let (lo, hi) = if !self.lo.is_negative() {
            (a, b)
        } else if !self.hi.is_positive() {
            (b, a)
        } else {
            (Rational::zero(), a.max(b))
        };
        Self {
            lo,
            hi,
            depth: self.depth,
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = products.iter().min().cloned().unwrap_or_default();
        let hi = products.iter().max().cloned().unwrap_or_default();
        Self {
            lo,
            hi,
            depth: self.depth.max(other.depth),
        }
    }

    fn add_scalar(&self, c: &Rational) -> Self {
        Self {
            lo: &self.lo + c,
            hi: &self.hi + c,
            depth: self.depth,
        }
    }
}

/// Encloses `spec` using `depth` partial quotients of its continued fraction.
pub fn enclose(spec: &RealSpec, depth: usize) -> Result<Enclosure> {
    match spec {
        RealSpec::ContinuedFraction(cf) => enclose_cf(cf, depth),
        RealSpec::Square(inner) => Ok(enclose(inner, depth)?.square()),
        RealSpec::Expression { coeffs, arg } => {
            let t = enclose(arg, depth)?;
            let mut acc = Enclosure::exact(Rational::zero(), t.depth);
            for c in coeffs.iter().rev() {
                acc = acc.mul(&t).add_scalar(c);
            }
            Ok(acc)
        }
    }
}

fn enclose_cf(cf: &PartialQuotients, depth: usize) -> Result<Enclosure> {
    if let Some(n) = cf.len() {
        if depth >= n {
            let terms = cf.take(n)?;
            let (p, q) = convergent_pairs(&terms).pop().ok_or(Error::StreamExhausted {
                needed: 1,
                available: 0,
            })?;
            return Ok(Enclosure::exact(Rational::new(p, q), n));
        }
    }
    if depth < 2 {
        return Err(Error::InvalidDepth(depth));
    }
    let terms = cf.take(depth)?;
    let pairs = convergent_pairs(&terms);
    let (p1, q1) = pairs[depth - 2].clone();
    let (p2, q2) = pairs[depth - 1].clone();
    let (a, b) = (Rational::new(p1, q1), Rational::new(p2, q2));
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    Ok(Enclosure { lo, hi, depth })
}

/// Adds [`REFINE_STEP`] partial quotients. Exact enclosures come back unchanged.
pub fn refine(spec: &RealSpec, enc: &Enclosure) -> Result<Enclosure> {
    if let Some(n) = spec.exact_depth() {
        if enc.depth >= n {
            return Ok(enc.clone());
        }
    }
    enclose(spec, enc.depth + REFINE_STEP)
}

/// Result of rounding an enclosure to the nearest integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Nearest {
    Integer(BigInt),
    Undecided,
}

/// Integer `n` with the enclosure inside `(n - 1/2, n + 1/2]`; exact
/// half-integers round down.
pub fn nearest_integer(enc: &Enclosure) -> Nearest {
    let lo = round_half_down(&enc.lo);
    let hi = round_half_down(&enc.hi);
    if lo == hi {
        Nearest::Integer(lo)
    } else {
        Nearest::Undecided
    }
}

/// `ceil(x - 1/2)`.
pub fn round_half_down(x: &Rational) -> BigInt {
    let two = BigInt::from(2);
    let num = x.numer() * &two - x.denom();
    let den = x.denom() * &two;
    num.div_ceil(&den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    Less,
    Greater,
    Undecided,
    EqualExact,
}

pub fn compare(a: &Enclosure, b: &Enclosure) -> Comparison {
    if a.hi < b.lo {
        Comparison::Less
    } else if a.lo > b.hi {
        Comparison::Greater
    } else if a.is_exact() && b.is_exact() && a.lo == b.lo {
        Comparison::EqualExact
    } else {
        Comparison::Undecided
    }
}

/// Parses `a/b`, an integer, or a finite decimal such as `0.618`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.trim_start().starts_with('-');
        let int: BigInt = match int.trim() {
            "" | "-" | "+" => BigInt::zero(),
            t => t.parse().map_err(|_| bad())?,
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac: BigInt = frac.parse().map_err(|_| bad())?;
        let mag = int.abs() * &scale + frac;
        let num = if negative { -mag } else { mag };
        return Ok(Rational::new(num, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// `num/den` for every rational, including integers.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_terms(s: &str) -> Result<Vec<BigInt>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad partial quotient `{}`", t.trim())))
        })
        .collect()
}

impl FromStr for RealSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("cf:") {
            let body = rest
                .trim()
                .strip_prefix('[')
                .and_then(|b| b.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("expected cf:[a0;a1,...], got `{s}`")))?;
            let (a0, tail) = match body.split_once(';') {
                Some((a0, tail)) => (a0, Some(tail)),
                None => (body, None),
            };
            let a0: BigInt = a0
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad a0 in `{s}`")))?;
            let cf = match tail.map(str::trim) {
                None | Some("") => PartialQuotients::Finite(vec![a0]),
                Some(t) => match t.strip_suffix("...") {
                    Some(p) => PartialQuotients::Periodic {
                        a0,
                        period: parse_terms(p.trim().trim_end_matches(','))?,
                    },
                    None => {
                        let mut terms = vec![a0];
                        terms.extend(parse_terms(t)?);
                        PartialQuotients::Finite(terms)
                    }
                },
            };
            return RealSpec::continued_fraction(cf);
        }
        if let Some(rest) = s.strip_prefix("word:") {
            return Ok(RealSpec::word(rest.parse()?));
        }
        if let Some(rest) = s.strip_prefix("sq:") {
            return Ok(rest.parse::<RealSpec>()?.square());
        }
        if let Some(rest) = s.strip_prefix("poly:") {
            let (coeffs, inner) = rest
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected poly:<c0>,...:<spec>, got `{s}`")))?;
            let coeffs = coeffs
                .split(',')
                .map(parse_rational)
                .collect::<Result<Vec<_>>>()?;
            return Ok(RealSpec::Expression {
                coeffs,
                arg: Box::new(inner.parse()?),
            });
        }
        Err(Error::Parse(format!("unknown real spec `{s}`")))
    }
}

impl fmt::Display for RealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[BigInt]| v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
        match self {
            RealSpec::ContinuedFraction(PartialQuotients::Finite(t)) => {
                if t.len() == 1 {
                    write!(f, "cf:[{}]", t[0])
                } else {
                    write!(f, "cf:[{};{}]", t[0], join(&t[1..]))
                }
            }
            RealSpec::ContinuedFraction(PartialQuotients::Periodic { a0, period }) => {
                write!(f, "cf:[{};{},...]", a0, join(period))
            }
            RealSpec::ContinuedFraction(PartialQuotients::Word { a0, word }) => {
                if a0.is_zero() {
                    write!(f, "word:{word}")
                } else {
                    write!(f, "poly:{a0},1:word:{word}")
                }
            }
            RealSpec::Square(inner) => write!(f, "sq:{inner}"),
            RealSpec::Expression { coeffs, arg } => {
                let c: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                write!(f, "poly:{}:{}", c.join(","), arg)
            }
        }
    }
}
