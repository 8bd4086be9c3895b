//! Minimal points of a pair `(xi, eta)`.
//!
//! For `x0 >= 1` let `δ(x0) = max(|x0 xi - x1|, |x0 eta - x2|)` with `x1`,
//! `x2` the nearest integers. The sweep walks `x0 = 1..=X` and records `x0`
//! whenever `δ(x0)` is certified strictly below every earlier value, so the
//! recorded `x0` are exactly the jumps of the step function
//! `Δ(X) = min_{x0 <= X} δ(x0)`. Since `δ` only depends on the integer `x0`,
//! probing integers is complete.
//!
//! Every decision is made on rational enclosures. An undecided rounding or
//! comparison moves both operands to a deeper enclosure (two more partial
//! quotients per step) until `max_depth`, after which the sweep fails with
//! `PrecisionExhausted`. When both inputs lie in one quadratic field an
//! undecided comparison is settled exactly instead, since there `δ` values
//! of different `x0` can coincide.
//!
//! The range is cut into fixed-size chunks that are swept in parallel, each
//! against its own running minimum; the chunk record lists are then merged
//! in order. A global record is always a record of its chunk, so the merge
//! only filters, and the result does not depend on the thread count.

use std::io::{Read, Write};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_reals::{
    enclose, format_rational, parse_rational, Enclosure, Rational, RealSpec, DEFAULT_MAX_DEPTH,
    REFINE_STEP,
};
use crate::geometry::{primitivize, IntVec3};
use crate::quadratic::{exact_value, Quadratic};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepOptions {
    /// Partial quotients used for the first attempt at every decision.
    pub initial_depth: usize,
    pub max_depth: usize,
    /// Worker threads; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
    pub chunk_size: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            initial_depth: 64,
            max_depth: DEFAULT_MAX_DEPTH,
            threads: None,
            chunk_size: 1 << 14,
        }
    }
}

impl SweepOptions {
    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn with_max_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalPoint {
    /// 1-based position in the sequence.
    pub index: usize,
    pub vec: IntVec3,
    /// `X_i`, equal to `vec.x0`.
    pub x: u64,
    pub delta: Enclosure,
}

impl AsRef<IntVec3> for MinimalPoint {
    fn as_ref(&self) -> &IntVec3 {
        &self.vec
    }
}

/// `Δ` as a step function over the computed horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaFunction {
    pub points: Vec<MinimalPoint>,
    pub horizon: u64,
}

/// Interval `[lo/scale, hi/scale]` with a shared integer denominator.
#[derive(Debug, Clone)]
struct Scaled {
    lo: BigInt,
    hi: BigInt,
    scale: BigInt,
}

impl Scaled {
    fn from_enclosure(e: &Enclosure) -> Self {
        let scale = e.lo.denom().lcm(e.hi.denom());
        Self {
            lo: e.lo.numer() * (&scale / e.lo.denom()),
            hi: e.hi.numer() * (&scale / e.hi.denom()),
            scale,
        }
    }

    /// Nearest integer to every point of `x0 * self`, and `|x0 * self - n|`
    /// as a scaled interval, or `None` if the rounding is not determined.
    fn round(&self, x0: &BigInt) -> Option<(BigInt, BigInt, BigInt)> {
        let a_lo = x0 * &self.lo;
        let a_hi = x0 * &self.hi;
        let two_s = &self.scale << 1;
        // n = ceil(a/S - 1/2)
        let n = Integer::div_ceil(&(&a_lo * 2 - &self.scale), &two_s);
        let ns = &n * &self.scale;
        let dev_lo: BigInt = a_lo - &ns;
        let dev_hi: BigInt = a_hi - &ns;
        // a_hi/S must still lie in (n - 1/2, n + 1/2]
        if &dev_hi * 2 > self.scale {
            return None;
        }
        let (lo, hi) = if !dev_lo.is_negative() {
            (dev_lo, dev_hi)
        } else if !dev_hi.is_positive() {
            (-dev_hi, -dev_lo)
        } else {
            let neg = -dev_lo;
            (BigInt::zero(), if neg > dev_hi { neg } else { dev_hi })
        };
        Some((n, lo, hi))
    }
}

struct Level {
    depth: usize,
    xi: Scaled,
    eta: Scaled,
    /// Both enclosures are exact.
    exact: bool,
}

/// Best approximation data for one `x0` at one level; `δ ∈ [lo, hi] / scale`.
#[derive(Debug, Clone)]
struct Approx {
    level: usize,
    x1: BigInt,
    x2: BigInt,
    lo: BigInt,
    hi: BigInt,
}

enum Order {
    Less,
    NotLess,
    Undecided,
}

/// Enclosures of `(xi, eta)` at depths `initial, initial + 2, ...`, built lazily.
struct Ladder<'a> {
    xi: &'a RealSpec,
    eta: &'a RealSpec,
    initial_depth: usize,
    levels: Vec<OnceLock<Result<Level>>>,
    /// Exact values of `(xi, eta)` in a common quadratic field.
    exact: Option<(Quadratic, Quadratic)>,
}

impl<'a> Ladder<'a> {
    fn new(xi: &'a RealSpec, eta: &'a RealSpec, opts: &SweepOptions) -> Self {
        let initial_depth = opts.initial_depth.clamp(2, opts.max_depth.max(2));
        let count = (opts.max_depth.max(initial_depth) - initial_depth) / REFINE_STEP + 1;
        Self {
            xi,
            eta,
            initial_depth,
            levels: (0..count).map(|_| OnceLock::new()).collect(),
            exact: exact_value(xi)
                .zip(exact_value(eta))
                .filter(|(a, b)| a.compare(b).is_some()),
        }
    }

    fn max_depth(&self) -> usize {
        self.initial_depth + (self.levels.len() - 1) * REFINE_STEP
    }

    fn level(&self, k: usize) -> Result<&Level> {
        self.levels[k]
            .get_or_init(|| {
                let depth = self.initial_depth + k * REFINE_STEP;
                let ex = enclose(self.xi, depth)?;
                let ey = enclose(self.eta, depth)?;
                Ok(Level {
                    depth,
                    exact: ex.is_exact() && ey.is_exact(),
                    xi: Scaled::from_enclosure(&ex),
                    eta: Scaled::from_enclosure(&ey),
                })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn is_last(&self, k: usize) -> Result<bool> {
        Ok(k + 1 >= self.levels.len() || self.level(k)?.exact)
    }

    fn exhausted(&self, x0: u64) -> Error {
        Error::PrecisionExhausted {
            x0,
            max_depth: self.max_depth(),
        }
    }

    fn approx_at_level(&self, x0: u64, k: usize) -> Result<Option<Approx>> {
        let level = self.level(k)?;
        let x = BigInt::from(x0);
        let Some((x1, lo1, hi1)) = level.xi.round(&x) else {
            return Ok(None);
        };
        let Some((x2, lo2, hi2)) = level.eta.round(&x) else {
            return Ok(None);
        };
        let (s1, s2) = (&level.xi.scale, &level.eta.scale);
        let (lo1, hi1) = (lo1 * s2, hi1 * s2);
        let (lo2, hi2) = (lo2 * s1, hi2 * s1);
        Ok(Some(Approx {
            level: k,
            x1,
            x2,
            lo: lo1.max(lo2),
            hi: hi1.max(hi2),
        }))
    }

    /// First level at or above `from` where both roundings are decided.
    fn approx_from(&self, x0: u64, from: usize) -> Result<Approx> {
        let mut k = from;
        loop {
            if let Some(a) = self.approx_at_level(x0, k)? {
                return Ok(a);
            }
            if self.is_last(k)? {
                return Err(self.exhausted(x0));
            }
            k += 1;
        }
    }

    fn scale(&self, k: usize) -> Result<BigInt> {
        let l = self.level(k)?;
        Ok(&l.xi.scale * &l.eta.scale)
    }

    /// Certified `δ(a) < δ(b)`, escalating both sides as needed. Exact ties
    /// count as not less, so the smaller `x0` keeps the record.
    fn less(&self, xa: u64, a: &mut Approx, xb: u64, b: &mut Approx) -> Result<bool> {
        loop {
            let k = a.level.max(b.level);
            if a.level < k {
                *a = self.approx_from(xa, k)?;
                continue;
            }
            if b.level < k {
                *b = self.approx_from(xb, k)?;
                continue;
            }
            let order = if a.hi < b.lo {
                Order::Less
            } else if a.lo >= b.hi {
                Order::NotLess
            } else {
                Order::Undecided
            };
            match order {
                Order::Less => return Ok(true),
                Order::NotLess => return Ok(false),
                Order::Undecided => {
                    if let Some(less) = self.exact_less(xa, a, xb, b) {
                        return Ok(less);
                    }
                    if self.is_last(k)? {
                        if self.level(k)?.exact {
                            return Ok(false);
                        }
                        return Err(self.exhausted(xa));
                    }
                    *a = self.approx_from(xa, k + 1)?;
                }
            }
        }
    }
}

impl Ladder<'_> {
    fn exact_delta(&self, x0: u64, a: &Approx) -> Option<Quadratic> {
        let (xi, eta) = self.exact.as_ref()?;
        let x = Rational::from_integer(x0.into());
        let d1 = xi.scale(&x).sub(&Quadratic::from_integer(a.x1.clone()))?.abs();
        let d2 = eta.scale(&x).sub(&Quadratic::from_integer(a.x2.clone()))?.abs();
        Some(match d1.compare(&d2)? {
            std::cmp::Ordering::Less => d2,
            _ => d1,
        })
    }

    /// Exact `δ(a) < δ(b)` when the inputs are quadratic.
    fn exact_less(&self, xa: u64, a: &Approx, xb: u64, b: &Approx) -> Option<bool> {
        let da = self.exact_delta(xa, a)?;
        let db = self.exact_delta(xb, b)?;
        Some(da.compare(&db)? == std::cmp::Ordering::Less)
    }
}

/// `(x0, x1, x2)` with `x1`, `x2` nearest to `x0 xi`, `x0 eta`, and an
/// enclosure of `δ`.
pub fn best_approx_at(
    x0: u64,
    xi: &RealSpec,
    eta: &RealSpec,
    opts: &SweepOptions,
) -> Result<(IntVec3, Enclosure)> {
    if x0 == 0 {
        return Err(Error::DomainError("x0 must be >= 1".into()));
    }
    let ladder = Ladder::new(xi, eta, opts);
    let a = ladder.approx_from(x0, 0)?;
    let scale = ladder.scale(a.level)?;
    let depth = ladder.level(a.level)?.depth;
    Ok((
        IntVec3::new(x0, a.x1, a.x2),
        Enclosure {
            lo: Rational::new(a.lo, scale.clone()),
            hi: Rational::new(a.hi, scale),
            depth,
        },
    ))
}

fn sweep_chunk(ladder: &Ladder<'_>, start: u64, end: u64) -> Result<Vec<(u64, Approx)>> {
    let mut records: Vec<(u64, Approx)> = Vec::new();
    for x0 in start..=end {
        let mut a = ladder.approx_from(x0, 0)?;
        match records.last_mut() {
            None => records.push((x0, a)),
            Some((xb, b)) => {
                let xb = *xb;
                if ladder.less(x0, &mut a, xb, b)? {
                    records.push((x0, a));
                }
            }
        }
        if let Some((_, best)) = records.last() {
            if best.hi.is_zero() {
                break;
            }
        }
    }
    Ok(records)
}

/// Minimal points with `X_i <= x_max`.
pub fn minimal_point_sequence(
    xi: &RealSpec,
    eta: &RealSpec,
    x_max: u64,
    opts: &SweepOptions,
) -> Result<Vec<MinimalPoint>> {
    if x_max == 0 {
        return Err(Error::DomainError("x_max must be >= 1".into()));
    }
    match opts.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Io(e.to_string()))?;
            pool.install(|| sweep(xi, eta, x_max, opts))
        }
        None => sweep(xi, eta, x_max, opts),
    }
}

fn sweep(xi: &RealSpec, eta: &RealSpec, x_max: u64, opts: &SweepOptions) -> Result<Vec<MinimalPoint>> {
    let ladder = Ladder::new(xi, eta, opts);
    let chunk = opts.chunk_size.max(1);
    let chunks: Vec<(u64, u64)> = (0..x_max.div_ceil(chunk))
        .map(|c| (c * chunk + 1, ((c + 1) * chunk).min(x_max)))
        .collect();

    // Batches keep the early exit for exact zeros while staying deterministic.
    let batch = 64;
    let mut merged: Vec<(u64, Approx)> = Vec::new();
    'outer: for group in chunks.chunks(batch) {
        let local: Vec<Result<Vec<(u64, Approx)>>> = group
            .par_iter()
            .map(|&(s, e)| sweep_chunk(&ladder, s, e))
            .collect();
        for records in local {
            for (x0, mut a) in records? {
                let keep = match merged.last_mut() {
                    None => true,
                    Some((xb, b)) => {
                        let xb = *xb;
                        ladder.less(x0, &mut a, xb, b)?
                    }
                };
                if keep {
                    merged.push((x0, a));
                }
                if merged.last().is_some_and(|(_, b)| b.hi.is_zero()) {
                    break 'outer;
                }
            }
        }
    }
    finalize(&ladder, &merged)
}

/// Recomputes every record at the first level where all roundings are
/// decided and the decrease of `δ` is certified, so the output does not
/// depend on which comparisons forced refinement during the sweep.
fn finalize(ladder: &Ladder<'_>, records: &[(u64, Approx)]) -> Result<Vec<MinimalPoint>> {
    let mut k = 0;
    'levels: loop {
        let mut approxes = Vec::with_capacity(records.len());
        for (x0, _) in records {
            match ladder.approx_at_level(*x0, k)? {
                Some(a) => approxes.push(a),
                None => {
                    if ladder.is_last(k)? {
                        return Err(ladder.exhausted(*x0));
                    }
                    k += 1;
                    continue 'levels;
                }
            }
        }
        let certified = approxes.windows(2).all(|w| w[1].hi < w[0].lo);
        if !certified {
            if ladder.is_last(k)? {
                let bad = approxes
                    .windows(2)
                    .position(|w| w[1].hi >= w[0].lo)
                    .map(|p| records[p + 1].0)
                    .unwrap_or(0);
                return Err(ladder.exhausted(bad));
            }
            k += 1;
            continue;
        }
        let scale = ladder.scale(k)?;
        let depth = ladder.level(k)?.depth;
        return records
            .iter()
            .zip(approxes)
            .enumerate()
            .map(|(i, ((x0, _), a))| {
                Ok(MinimalPoint {
                    index: i + 1,
                    vec: primitivize(&IntVec3::new(*x0, a.x1, a.x2))?,
                    x: *x0,
                    delta: Enclosure {
                        lo: Rational::new(a.lo, scale.clone()),
                        hi: Rational::new(a.hi, scale.clone()),
                        depth,
                    },
                })
            })
            .collect();
    }
}

impl DeltaFunction {
    pub fn new(points: Vec<MinimalPoint>, horizon: u64) -> Self {
        Self { points, horizon }
    }

    /// `Δ(X)` for real `X` in `[1, horizon]`.
    pub fn delta_at(&self, x: &Rational) -> Result<&Enclosure> {
        let horizon = Rational::from_integer(self.horizon.into());
        if x < &Rational::one() || x > &horizon {
            return Err(Error::HorizonExceeded {
                x: format_rational(x),
                horizon: self.horizon,
            });
        }
        self.points
            .iter()
            .rev()
            .find(|p| Rational::from_integer(p.x.into()) <= *x)
            .map(|p| &p.delta)
            .ok_or(Error::HorizonExceeded {
                x: format_rational(x),
                horizon: self.horizon,
            })
    }
}

pub fn delta_at<'a>(df: &'a DeltaFunction, x: &Rational) -> Result<&'a Enclosure> {
    df.delta_at(x)
}

/// `delta_i.hi <= X_{i+1}^(-λ)` in exact arithmetic, with `λ = p/q`:
/// `delta_i.hi^q * X_{i+1}^p <= 1`.
pub fn satisfies_delta_bound(delta_hi: &Rational, x_next: u64, lambda: &Rational) -> bool {
    let (Some(p), Some(q)) = (lambda.numer().to_usize(), lambda.denom().to_usize()) else {
        return false;
    };
    let lhs = num_traits::pow(delta_hi.clone(), q)
        * Rational::from_integer(num_traits::pow(BigInt::from(x_next), p));
    lhs <= Rational::one()
}

/// Smallest `i0 >= 2` with `Δ_i <= X_{i+1}^(-λ)` for every `i` from `i0` to
/// the last index whose successor is known.
pub fn find_i0(seq: &[MinimalPoint], lambda: &Rational) -> Option<usize> {
    if seq.len() < 3 || !lambda.is_positive() {
        return None;
    }
    let mut i0 = None;
    for i in (2..seq.len()).rev() {
        if satisfies_delta_bound(&seq[i - 1].delta.hi, seq[i].x, lambda) {
            i0 = Some(i);
        } else {
            break;
        }
    }
    i0
}

/// One row of the CSV/JSON export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    #[serde(rename = "X_i")]
    pub x_i: u64,
    pub x0: String,
    pub x1: String,
    pub x2: String,
    pub delta_lo: String,
    pub delta_hi: String,
}

impl From<&MinimalPoint> for PointRecord {
    fn from(p: &MinimalPoint) -> Self {
        Self {
            index: p.index,
            x_i: p.x,
            x0: p.vec.x0.to_string(),
            x1: p.vec.x1.to_string(),
            x2: p.vec.x2.to_string(),
            delta_lo: format_rational(&p.delta.lo),
            delta_hi: format_rational(&p.delta.hi),
        }
    }
}

impl TryFrom<&PointRecord> for MinimalPoint {
    type Error = Error;

    fn try_from(r: &PointRecord) -> Result<Self> {
        let int = |s: &str| {
            s.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad integer `{s}`")))
        };
        Ok(MinimalPoint {
            index: r.index,
            vec: IntVec3::new(int(&r.x0)?, int(&r.x1)?, int(&r.x2)?),
            x: r.x_i,
            delta: Enclosure {
                lo: parse_rational(&r.delta_lo)?,
                hi: parse_rational(&r.delta_hi)?,
                depth: 0,
            },
        })
    }
}

pub fn write_csv<W: Write>(points: &[MinimalPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(PointRecord::from(p))?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(points: &[MinimalPoint]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(points, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

pub fn to_json_string(points: &[MinimalPoint]) -> Result<String> {
    let records: Vec<PointRecord> = points.iter().map(PointRecord::from).collect();
    let mut s = serde_json::to_string_pretty(&records)?;
    s.push('\n');
    Ok(s)
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<MinimalPoint>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize::<PointRecord>()
        .map(|rec| MinimalPoint::try_from(&rec?))
        .collect()
}

pub fn read_json(input: &str) -> Result<Vec<MinimalPoint>> {
    let records: Vec<PointRecord> = serde_json::from_str(input)?;
    records.iter().map(MinimalPoint::try_from).collect()
}
