//! Reference computations written without the library's number code.
//!
//! Reals are decimal fixed point: an integer `v` stands for `v / 10^DIGITS`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const DIGITS: u32 = 200;
/// Guard digits used inside `ln` and `exp`.
const GUARD: u32 = 40;

pub fn scale() -> BigInt {
    BigInt::from(10u32).pow(DIGITS)
}

/// Fibonacci word as the fixed point of `a -> ab, b -> a`.
pub fn fibonacci_morphism(a: u64, b: u64, n: usize) -> Vec<u64> {
    let mut w = vec![0u8];
    while w.len() < n {
        w = w.iter().flat_map(|&c| if c == 0 { vec![0, 1] } else { vec![0] }).collect();
    }
    w.truncate(n);
    w.into_iter().map(|c| if c == 0 { a } else { b }).collect()
}

/// Value of `[a0; a1, a2, ...]` from the given terms, in fixed point.
pub fn cf_value(terms: &[u64]) -> BigInt {
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::from(terms[0]), BigInt::one());
    for &a in &terms[1..] {
        let p = BigInt::from(a) * &p1 + &p0;
        let q = BigInt::from(a) * &q1 + &q0;
        p0 = std::mem::replace(&mut p1, p);
        q0 = std::mem::replace(&mut q1, q);
    }
    p1 * scale() / q1
}

/// `[0; w1, w2, ...]` for a word given by its first letters.
pub fn word_value(letters: &[u64]) -> BigInt {
    let mut terms = vec![0];
    terms.extend_from_slice(letters);
    cf_value(&terms)
}

pub fn fixed_mul(a: &BigInt, b: &BigInt) -> BigInt {
    a * b / scale()
}

/// Cutting sequence `floor((k+1) θ) - floor(k θ)`, `0 -> a`, `1 -> b`.
pub fn cutting_sequence(theta: &BigInt, a: u64, b: u64, n: usize) -> Vec<u64> {
    let s = scale();
    (1..=n)
        .map(|k| {
            let hi = (theta * BigInt::from(k + 1)).div_floor(&s);
            let lo = (theta * BigInt::from(k)).div_floor(&s);
            if hi == lo { a } else { b }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OraclePoint {
    pub x0: u64,
    pub x1: BigInt,
    pub x2: BigInt,
    /// Fixed point.
    pub delta: BigInt,
}

/// Nearest integer to `v / S` with halves rounded down, and `|v - n S|`.
fn round_half_down(v: &BigInt, s: &BigInt) -> (BigInt, BigInt) {
    let two_s = s * 2;
    let num: BigInt = v * 2 - s;
    // ceil(num / 2S)
    let n = -((-num).div_floor(&two_s));
    let dev = (v - &n * s).abs();
    (n, dev)
}

pub fn delta_at(x0: u64, xi: &BigInt, eta: &BigInt) -> OraclePoint {
    let s = scale();
    let x = BigInt::from(x0);
    let (x1, d1) = round_half_down(&(&x * xi), &s);
    let (x2, d2) = round_half_down(&(&x * eta), &s);
    OraclePoint {
        x0,
        x1,
        x2,
        delta: d1.max(d2),
    }
}

/// Every `x0 <= x_max` whose `delta` is strictly below all earlier ones.
pub fn brute_force(xi: &BigInt, eta: &BigInt, x_max: u64) -> Vec<OraclePoint> {
    let mut out: Vec<OraclePoint> = Vec::new();
    for x0 in 1..=x_max {
        let p = delta_at(x0, xi, eta);
        if out.last().is_none_or(|last| p.delta < last.delta) {
            let done = p.delta.is_zero();
            out.push(p);
            if done {
                break;
            }
        }
    }
    out
}

fn pow10(k: u32) -> BigInt {
    BigInt::from(10u32).pow(k)
}

/// Natural logarithm of a positive fixed-point value.
pub fn ln(x: &BigInt) -> BigInt {
    assert!(x.is_positive());
    let ws = pow10(DIGITS + GUARD);
    let mut v = x * pow10(GUARD);
    let tol = &ws / BigInt::from(1u64 << 30);
    let mut halvings = 0u32;
    while (&v - &ws).abs() > tol {
        v = (&v * &ws).sqrt();
        halvings += 1;
    }
    // ln(1 + u) = u - u^2/2 + u^3/3 - ...
    let u = &v - &ws;
    let mut term = u.clone();
    let mut sum = BigInt::zero();
    let mut k = 1i64;
    while !term.is_zero() {
        let t = &term / BigInt::from(k);
        if k % 2 == 1 {
            sum += t;
        } else {
            sum -= t;
        }
        term = &term * &u / &ws;
        k += 1;
    }
    (sum << halvings) / pow10(GUARD)
}

/// Exponential of a fixed-point value.
pub fn exp(x: &BigInt) -> BigInt {
    let ws = pow10(DIGITS + GUARD);
    let mut r = x * pow10(GUARD);
    let mut squarings = 0u32;
    while r.abs() > &ws >> 20 {
        r /= 2;
        squarings += 1;
    }
    let mut term = ws.clone();
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    while !term.is_zero() {
        sum += &term;
        term = &term * &r / &ws / BigInt::from(k);
        k += 1;
    }
    for _ in 0..squarings {
        sum = &sum * &sum / &ws;
    }
    sum / pow10(GUARD)
}

pub fn from_int(n: u64) -> BigInt {
    BigInt::from(n) * scale()
}

pub fn div(a: &BigInt, b: &BigInt) -> BigInt {
    a * scale() / b
}

pub fn log2(x: &BigInt) -> BigInt {
    div(&ln(x), &ln(&from_int(2)))
}

pub fn to_f64(v: &BigInt) -> f64 {
    let shifted = v / pow10(DIGITS - 30);
    shifted.to_f64().unwrap() / 1e30
}

pub fn to_rational(v: &BigInt) -> BigRational {
    BigRational::new(v.clone(), scale())
}

/// Elementary divisors of a 2 x 3 integer matrix by row and column
/// elimination.
pub fn smith_2x3(rows: [[i64; 3]; 2]) -> (i64, i64) {
    let mut m = rows;
    let mut divisors = [0i64; 2];
    for (k, slot) in divisors.iter_mut().enumerate() {
        loop {
            // smallest non-zero pivot in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in m.iter().enumerate().skip(k) {
                for (j, &v) in row.iter().enumerate().skip(k) {
                    if v != 0 && best.is_none_or(|(bi, bj)| v.abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return (divisors[0], 0);
            };
            m.swap(k, bi);
            for row in m.iter_mut() {
                row.swap(k, bj);
            }
            let p = m[k][k];
            let mut clean = true;
            let pivot_row = m[k];
            for row in m.iter_mut().skip(k + 1) {
                let q = row[k] / p;
                for (x, y) in row.iter_mut().zip(pivot_row) {
                    *x -= q * y;
                }
                clean &= row[k] == 0;
            }
            for j in k + 1..3 {
                let q = m[k][j] / p;
                for row in m.iter_mut() {
                    row[j] -= q * row[k];
                }
                clean &= m[k][j] == 0;
            }
            if !clean {
                continue;
            }
            // pivot must divide the rest of the block
            let mut rest = (k + 1..2).flat_map(|i| (k + 1..3).map(move |j| (i, j)));
            if let Some((i, _)) = rest.find(|&(i, j)| m[i][j] % p != 0) {
                let other = m[i];
                for (x, y) in m[k].iter_mut().zip(other) {
                    *x += y;
                }
                continue;
            }
            *slot = p.abs();
            break;
        }
    }
    (divisors[0], divisors[1])
}
