//! Exponent estimates and horizon-limited checks of the growth properties of
//! a minimal-point sequence, plus the subspace-count and transcendence
//! measure calculators.
//!
//! Every verdict comes from exact integer or rational comparisons. The
//! `f64` fields (`approx`, `slack_log10`) are presentation only.
//!
//! Logarithms without a base are natural logarithms throughout.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact_reals::{format_rational, Rational};
use crate::geometry::{conic_eval, subspace_of, wedge, ConicForm, Subspace};
use crate::hp::{self, RealInterval};
use crate::minimal_points::MinimalPoint;

/// Fractional bits kept when exponent intervals are written out.
const EXPONENT_BITS: usize = 80;

fn ser_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

fn rat(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

fn pow_int(x: u64, e: usize) -> BigInt {
    num_traits::pow(BigInt::from(x), e)
}

/// `log10 |r|` from bit lengths and leading digits; presentation only.
fn log10_approx(r: &Rational) -> f64 {
    fn log2_int(n: &BigInt) -> f64 {
        let bits = n.bits();
        if bits <= 1000 {
            return n.abs().to_f64().unwrap_or(f64::NAN).log2();
        }
        let shift = bits - 64;
        let top = (n.abs() >> shift).to_f64().unwrap_or(f64::NAN);
        top.log2() + shift as f64
    }
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    (log2_int(r.numer()) - log2_int(r.denom())) * std::f64::consts::LOG10_2
}

/// Split `λ = p/q` into small non-negative integers.
fn exponent_parts(r: &Rational) -> Result<(usize, usize)> {
    match (r.numer().to_usize(), r.denom().to_usize()) {
        (Some(p), Some(q)) if p <= 100_000 && q <= 100_000 => Ok((p, q)),
        _ => Err(Error::DomainError(format!(
            "exponent {} must be a non-negative rational with small numerator and denominator",
            format_rational(r)
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaEstimate {
    pub index: usize,
    /// `X_{i+1}`, the abscissa paired with `Δ_i`.
    pub x_next: u64,
    #[serde(serialize_with = "ser_rational")]
    pub lo: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub hi: Rational,
    pub approx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailMin {
    /// Lower bound of the smallest `λ̂_i` over the tail.
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
    pub approx: f64,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentEstimate {
    pub tail_from: usize,
    pub tail_min: TailMin,
    pub per_index: Vec<LambdaEstimate>,
}

/// First index `i` with `X_{i+1} >= threshold`.
pub fn tail_index_for(seq: &[MinimalPoint], threshold: u64) -> Option<usize> {
    (1..seq.len()).find(|&i| seq[i].x >= threshold)
}

/// Certified `λ̂_i = -ln Δ_i / ln X_{i+1}` for `i = 1..len-1` and the
/// smallest lower bound over `i >= tail_from`.
pub fn estimate_lambda(seq: &[MinimalPoint], tail_from: usize) -> Result<ExponentEstimate> {
    if tail_from < 1 || seq.len() <= tail_from {
        return Err(Error::InsufficientData(format!(
            "need more than {tail_from} points for an exponent estimate, have {}",
            seq.len()
        )));
    }
    let mut per_index = Vec::with_capacity(seq.len() - 1);
    for i in 1..seq.len() {
        let delta = &seq[i - 1].delta;
        if !delta.lo.is_positive() {
            return Err(Error::DegenerateDelta { index: i });
        }
        let x_next = seq[i].x;
        let minus_ln_delta = hp::ln_interval(&RealInterval::new(delta.lo.clone(), delta.hi.clone()))?.neg();
        let ln_x = hp::ln(&rat(x_next))?;
        let lambda = minus_ln_delta.div(&ln_x)?.outward(EXPONENT_BITS);
        per_index.push(LambdaEstimate {
            index: i,
            x_next,
            approx: lambda.approx(),
            lo: lambda.lo,
            hi: lambda.hi,
        });
    }
    let tail = per_index
        .iter()
        .filter(|e| e.index >= tail_from)
        .min_by(|a, b| a.lo.cmp(&b.lo))
        .ok_or_else(|| Error::InsufficientData("empty tail".into()))?;
    Ok(ExponentEstimate {
        tail_from,
        tail_min: TailMin {
            value: tail.lo.clone(),
            approx: hp::to_f64(&tail.lo),
            index: tail.index,
        },
        per_index,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    HoldsOnHorizon,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partner: Option<usize>,
    pub kind: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Margin {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partner: Option<usize>,
    pub check: String,
    pub lhs: String,
    pub rhs: String,
    /// `log10(rhs / lhs)`; positive when the inequality holds with room.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack_log10: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub lemma_id: String,
    pub verdict: VerdictKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub relation: String,
    pub checked_range: [usize; 2],
    pub margins: Vec<Margin>,
    pub details: BTreeMap<String, serde_json::Value>,
}

impl LemmaReport {
    fn new(lemma_id: &str, relation: &str, checked_range: [usize; 2]) -> Self {
        Self {
            lemma_id: lemma_id.into(),
            verdict: VerdictKind::HoldsOnHorizon,
            witness: None,
            reason: None,
            relation: relation.into(),
            checked_range,
            margins: Vec::new(),
            details: BTreeMap::new(),
        }
    }

    fn inconclusive(mut self, reason: impl Into<String>) -> Self {
        if self.verdict != VerdictKind::Violated {
            self.verdict = VerdictKind::Inconclusive;
            self.reason = Some(reason.into());
        }
        self
    }

    fn violate(&mut self, w: Witness) {
        if self.verdict != VerdictKind::Violated {
            self.verdict = VerdictKind::Violated;
            self.witness = Some(w);
        }
    }

    fn detail(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.details.insert(key.into(), value.into());
    }

    pub fn is_violated(&self) -> bool {
        self.verdict == VerdictKind::Violated
    }

    pub fn holds(&self) -> bool {
        self.verdict == VerdictKind::HoldsOnHorizon
    }
}

/// Each consecutive pair spans a plane and is a basis of its integer points.
pub fn verify_lemma_w(seq: &[MinimalPoint]) -> LemmaReport {
    let mut r = LemmaReport::new(
        "W",
        "x_i ∧ x_{i+1} != 0 and gcd(x_i ∧ x_{i+1}) = 1",
        [1, seq.len().saturating_sub(1)],
    );
    if seq.len() < 2 {
        return r.inconclusive("fewer than two points");
    }
    for i in 1..seq.len() {
        let raw = wedge(&seq[i - 1].vec, &seq[i].vec);
        let g = raw.content();
        r.margins.push(Margin {
            index: i,
            partner: Some(i + 1),
            check: "wedge-content".into(),
            lhs: g.to_string(),
            rhs: "1".into(),
            slack_log10: None,
        });
        if raw.is_zero() {
            r.violate(Witness {
                index: i,
                partner: Some(i + 1),
                kind: "dimension".into(),
                lhs: raw.to_string(),
                rhs: "non-zero".into(),
            });
        } else if !g.is_one() {
            r.violate(Witness {
                index: i,
                partner: Some(i + 1),
                kind: "basis".into(),
                lhs: g.to_string(),
                rhs: "1".into(),
            });
        }
    }
    r
}

/// Subspace `W_i` spanned by points `i` and `i + 1` (1-based).
pub fn subspace_at(seq: &[MinimalPoint], i: usize) -> Result<Subspace> {
    subspace_of(&seq[i - 1].vec, &seq[i].vec)
}

/// For consecutive `i < j` in `I`: `W_i != W_j` and `X_j² <= H(W_i)² H(W_j)²`.
pub fn verify_lemma_x(seq: &[MinimalPoint], index_set: &[usize]) -> Result<LemmaReport> {
    if index_set.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "index set has {} element(s), need 2",
            index_set.len()
        )));
    }
    let mut r = LemmaReport::new(
        "X",
        "W_i != W_j and X_j^2 <= H(W_i)^2 H(W_j)^2 for consecutive i < j in I",
        [index_set[0], index_set[index_set.len() - 1]],
    );
    r.detail("index_set_size", index_set.len());
    r.detail("index_set", index_set.to_vec());
    for pair in index_set.windows(2) {
        let (i, j) = (pair[0], pair[1]);
        let (wi, wj) = match (subspace_at(seq, i), subspace_at(seq, j)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                r.violate(Witness {
                    index: i,
                    partner: Some(j),
                    kind: "dimension".into(),
                    lhs: "x_i ∧ x_{i+1} = 0".into(),
                    rhs: "non-zero".into(),
                });
                continue;
            }
        };
        if wi.same_as(&wj) {
            r.violate(Witness {
                index: i,
                partner: Some(j),
                kind: "W_i = W_j".into(),
                lhs: wi.wedge.to_string(),
                rhs: wj.wedge.to_string(),
            });
        }
        let lhs = pow_int(seq[j - 1].x, 2);
        let rhs = &wi.height_sq * &wj.height_sq;
        r.margins.push(Margin {
            index: i,
            partner: Some(j),
            check: "X_j^2 <= H_i^2 H_j^2".into(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            slack_log10: Some(log10_approx(&Rational::new(rhs.clone(), lhs.clone()))),
        });
        if lhs > rhs {
            r.violate(Witness {
                index: i,
                partner: Some(j),
                kind: "height".into(),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
    }
    Ok(r)
}

/// Non-vanishing of `φ(x_i)` on a tail of the sequence, and the largest
/// value of `X_{i+1}^λ / X_i` (reported as the exact rational
/// `X_{i+1}^p / X_i^q` for `λ = p/q`).
pub fn verify_lemma_f(seq: &[MinimalPoint], phi: &ConicForm, lambda: &Rational) -> Result<LemmaReport> {
    let (p, q) = exponent_parts(lambda)?;
    let mut r = LemmaReport::new(
        "f",
        "phi(x_i) != 0 on a tail; X_{i+1}^lambda / X_i bounded",
        [1, seq.len()],
    );
    let mut last_zero = None;
    let mut max_ratio: Option<(Rational, usize)> = None;
    for (k, point) in seq.iter().enumerate() {
        let i = k + 1;
        let value = conic_eval(phi, &point.vec);
        if value.is_zero() {
            last_zero = Some(i);
        }
        let (rhs, slack) = match seq.get(i) {
            Some(next) => {
                let ratio = Rational::new(pow_int(next.x, p), pow_int(point.x, q));
                let slack = log10_approx(&ratio) / q as f64;
                if max_ratio.as_ref().is_none_or(|(m, _)| &ratio > m) {
                    max_ratio = Some((ratio.clone(), i));
                }
                (format_rational(&ratio), Some(slack))
            }
            None => ("-".into(), None),
        };
        r.margins.push(Margin {
            index: i,
            partner: None,
            check: "phi(x_i); X_{i+1}^p / X_i^q".into(),
            lhs: format_rational(&value),
            rhs,
            slack_log10: slack,
        });
    }
    r.detail("lambda", format_rational(lambda));
    r.detail(
        "last_vanishing_index",
        last_zero.map_or(serde_json::Value::Null, serde_json::Value::from),
    );
    r.detail("nonvanishing_from", last_zero.map_or(1, |i| i + 1));
    if let Some((m, i)) = &max_ratio {
        r.detail("max_ratio", format_rational(m));
        r.detail("max_ratio_index", *i);
        r.detail("empirical_constant", 10f64.powf(log10_approx(m) / q as f64));
    }
    if seq.is_empty() {
        return Ok(r.inconclusive("empty sequence"));
    }
    if last_zero == Some(seq.len()) {
        return Ok(r.inconclusive("phi vanishes at the last computed point"));
    }
    Ok(r)
}

/// `(1 - λ) / (2λ - 1)`.
pub fn critical_theta(lambda: &Rational) -> Result<Rational> {
    let half = Rational::new(1.into(), 2.into());
    if lambda <= &half {
        return Err(Error::BadLambda(format_rational(lambda)));
    }
    Ok((Rational::one() - lambda) / (lambda * rat(2) - Rational::one()))
}

/// Smallest `i1 ∈ I` such that every consecutive pair `i < j` of `I` with
/// `i >= i1` has `H(W_i) < H(W_j)` and `X_{j+1} < X_{i+1}^θ`.
pub fn verify_lemma_main(
    seq: &[MinimalPoint],
    index_set: &[usize],
    lambda: &Rational,
    theta: &Rational,
) -> Result<LemmaReport> {
    let critical = critical_theta(lambda)?;
    if theta <= &critical {
        return Err(Error::ThetaTooSmall {
            theta: format_rational(theta),
            critical: format_rational(&critical),
        });
    }
    let (tp, tq) = exponent_parts(theta)?;
    let mut r = LemmaReport::new(
        "main",
        "H(W_i)^2 < H(W_j)^2 and X_{j+1}^q < X_{i+1}^p (theta = p/q) for consecutive i < j in I, i >= i1",
        [
            index_set.first().copied().unwrap_or(0),
            index_set.last().copied().unwrap_or(0),
        ],
    );
    r.detail("theta", format_rational(theta));
    r.detail("critical_theta", format_rational(&critical));
    if index_set.len() < 2 {
        return Ok(r.inconclusive("index set has fewer than two elements"));
    }
    let mut last_failure: Option<usize> = None;
    for (k, pair) in index_set.windows(2).enumerate() {
        let (i, j) = (pair[0], pair[1]);
        let (wi, wj) = (subspace_at(seq, i)?, subspace_at(seq, j)?);
        let height_ok = wi.height_sq < wj.height_sq;
        let lhs = pow_int(seq[j].x, tq);
        let rhs = pow_int(seq[i].x, tp);
        let growth_ok = lhs < rhs;
        r.margins.push(Margin {
            index: i,
            partner: Some(j),
            check: "H_i^2 < H_j^2".into(),
            lhs: wi.height_sq.to_string(),
            rhs: wj.height_sq.to_string(),
            slack_log10: Some(log10_approx(&Rational::new(wj.height_sq.clone(), wi.height_sq.clone()))),
        });
        r.margins.push(Margin {
            index: i,
            partner: Some(j),
            check: "X_{j+1}^q < X_{i+1}^p".into(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            slack_log10: Some(log10_approx(&Rational::new(rhs, lhs)) / tq as f64),
        });
        if !(height_ok && growth_ok) {
            last_failure = Some(k);
        }
    }
    let pairs = index_set.len() - 1;
    let i1_pos = last_failure.map_or(0, |k| k + 1);
    if i1_pos >= pairs {
        r.detail("i1", serde_json::Value::Null);
        return Ok(r.inconclusive("the last pair of I on the horizon fails"));
    }
    r.detail("i1", index_set[i1_pos]);
    r.detail("pairs_beyond_i1", pairs - i1_pos);
    Ok(r)
}

/// `Δ_i² X_i <= 1` for every recorded point.
pub fn verify_dirichlet(seq: &[MinimalPoint]) -> LemmaReport {
    let mut r = LemmaReport::new("dirichlet", "delta_i.hi^2 * X_i <= 1", [1, seq.len()]);
    for p in seq {
        let lhs = &p.delta.hi * &p.delta.hi * rat(p.x);
        let slack = if lhs.is_zero() { None } else { Some(-log10_approx(&lhs)) };
        r.margins.push(Margin {
            index: p.index,
            partner: None,
            check: "delta^2 X <= 1".into(),
            lhs: format_rational(&lhs),
            rhs: "1/1".into(),
            slack_log10: slack,
        });
        if lhs > Rational::one() {
            r.violate(Witness {
                index: p.index,
                partner: None,
                kind: "dirichlet".into(),
                lhs: format_rational(&lhs),
                rhs: "1/1".into(),
            });
        }
    }
    if seq.is_empty() {
        return r.inconclusive("empty sequence");
    }
    r
}

/// `log2` of `2^(60 n²) δ^(-7n) ln(4D) ln ln(4D)`.
pub fn evertse_count_log2(n: u32, delta: &Rational, big_d: u64) -> Result<RealInterval> {
    if n < 2 {
        return Err(Error::DomainError(format!("n = {n} must be >= 2")));
    }
    check_delta(delta)?;
    if big_d < 1 {
        return Err(Error::DomainError("D must be >= 1".into()));
    }
    let ln_4d = hp::ln(&rat(4 * big_d as u128))?;
    let lnln_4d = hp::ln_interval(&ln_4d)?;
    if !lnln_4d.lo.is_positive() {
        return Err(Error::DomainError("ln ln(4D) <= 0".into()));
    }
    let n = n as u64;
    let head = RealInterval::from_integer(60 * n * n);
    let delta_term = hp::log2(&delta.recip())?.scale(&rat(7 * n));
    Ok(head
        .add(&delta_term)
        .add(&hp::log2_interval(&ln_4d)?)
        .add(&hp::log2_interval(&lnln_4d)?))
}

/// The `n = 3`, `D = 2d` case `2^540 δ^-21 ln(8d) ln ln(8d)`, evaluated as
/// a product before taking `log2`.
pub fn evertse_specialized_log2(delta: &Rational, d: u64) -> Result<RealInterval> {
    check_delta(delta)?;
    if d < 1 {
        return Err(Error::DomainError("d must be >= 1".into()));
    }
    let ln_8d = hp::ln(&rat(8 * d as u128))?;
    let lnln_8d = hp::ln_interval(&ln_8d)?;
    if !lnln_8d.lo.is_positive() {
        return Err(Error::DomainError("ln ln(8d) <= 0".into()));
    }
    let product = RealInterval::exact(num_traits::pow(delta.recip(), 21))
        .mul(&ln_8d)
        .mul(&lnln_8d);
    Ok(RealInterval::from_integer(540).add(&hp::log2_interval(&product)?))
}

fn check_delta(delta: &Rational) -> Result<()> {
    if !delta.is_positive() || delta > &Rational::one() {
        return Err(Error::DomainError(format!(
            "delta = {} must lie in (0, 1]",
            format_rational(delta)
        )));
    }
    Ok(())
}

/// `δ = (2λ - 1) / 7`, which satisfies `6δ < 2λ - 1`.
pub fn choose_delta(lambda: &Rational) -> Result<Rational> {
    if lambda <= &Rational::new(1.into(), 2.into()) {
        return Err(Error::BadLambda(format_rational(lambda)));
    }
    Ok((lambda * rat(2) - Rational::one()) / rat(7))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureParams {
    pub c: Rational,
    pub d: u64,
    pub h: BigInt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureValue {
    /// `w(d) = exp(c ln d ln ln d)`.
    pub w: RealInterval,
    /// `ln` of the lower bound `H^(-w(d))`, i.e. `-w ln H`.
    pub log_bound: RealInterval,
}

fn check_measure_domain(c: &Rational, d: u64) -> Result<()> {
    if d < 3 {
        return Err(Error::DomainError(format!("d = {d} must be >= 3")));
    }
    if !c.is_positive() {
        return Err(Error::DomainError("c must be positive".into()));
    }
    Ok(())
}

/// `c ln d ln ln d`.
pub fn measure_exponent(c: &Rational, d: u64) -> Result<RealInterval> {
    check_measure_domain(c, d)?;
    let ln_d = hp::ln(&rat(d))?;
    let lnln_d = hp::ln_interval(&ln_d)?;
    Ok(ln_d.mul(&lnln_d).scale(c))
}

/// `c (ln d)² (ln ln d)²`, the exponent of the earlier measure.
pub fn measure_exponent_ab(c: &Rational, d: u64) -> Result<RealInterval> {
    check_measure_domain(c, d)?;
    let ln_d = hp::ln(&rat(d))?;
    let lnln_d = hp::ln_interval(&ln_d)?;
    let t = ln_d.mul(&lnln_d);
    Ok(t.mul(&t).scale(c))
}

pub fn measure_w(params: &MeasureParams) -> Result<MeasureValue> {
    if params.h < BigInt::from(2) {
        return Err(Error::DomainError("H must be >= 2".into()));
    }
    let w = hp::exp_interval(&measure_exponent(&params.c, params.d)?);
    let ln_h = hp::ln(&Rational::from_integer(params.h.clone()))?;
    let log_bound = w.mul(&ln_h).neg();
    Ok(MeasureValue { w, log_bound })
}

/// `exp(c (ln d)² (ln ln d)²)`.
pub fn measure_w_ab(c: &Rational, d: u64) -> Result<RealInterval> {
    Ok(hp::exp_interval(&measure_exponent_ab(c, d)?))
}

/// Certified `w_AB(d) > w(d)`, decided on the exponents.
pub fn ab_measure_exceeds(c: &Rational, d: u64) -> Result<bool> {
    Ok(measure_exponent_ab(c, d)?.lo > measure_exponent(c, d)?.hi)
}

/// Naive height (largest absolute coefficient) and degree of an integer
/// polynomial given by coefficients from the constant term up.
pub fn naive_height_and_degree(coeffs: &[BigInt]) -> Result<(BigInt, usize)> {
    let degree = coeffs
        .iter()
        .rposition(|c| !c.is_zero())
        .ok_or(Error::ZeroPolynomial)?;
    let height = coeffs.iter().map(|c| c.abs()).max().unwrap_or_default();
    Ok((height, degree))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue {
    pub approx: f64,
    #[serde(serialize_with = "ser_rational")]
    pub lo: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub hi: Rational,
}

impl From<&RealInterval> for BoundValue {
    fn from(x: &RealInterval) -> Self {
        let o = x.outward(64);
        Self {
            approx: x.approx(),
            lo: o.lo,
            hi: o.hi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunInfo {
    pub xi_spec: String,
    pub eta_spec: String,
    pub x_max: u64,
    pub max_depth: usize,
    pub tie_rule: String,
    pub lambda: String,
    pub theta: String,
    pub conic: String,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Lemmas {
    #[serde(rename = "W", skip_serializing_if = "Option::is_none")]
    pub w: Option<LemmaReport>,
    #[serde(rename = "X", skip_serializing_if = "Option::is_none")]
    pub x: Option<LemmaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<LemmaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub main: Option<LemmaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dirichlet: Option<LemmaReport>,
}

impl Lemmas {
    fn iter(&self) -> impl Iterator<Item = &LemmaReport> {
        [&self.w, &self.x, &self.f, &self.main, &self.dirichlet]
            .into_iter()
            .flatten()
    }

    fn is_empty(&self) -> bool {
        self.iter().next().is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Bounds {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evertse_log2: Option<BoundValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<BoundValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_bound: Option<BoundValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<RunInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<ExponentEstimate>,
    pub lemmas: Lemmas,
    pub bounds: Bounds,
}

impl Report {
    pub fn any_violated(&self) -> bool {
        self.lemmas.iter().any(LemmaReport::is_violated)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Collects verification outputs into one [`Report`].
#[derive(Debug, Clone, Default)]
pub struct ReportBuilder {
    run: Option<RunInfo>,
    exponent: Option<ExponentEstimate>,
    lemmas: Lemmas,
    bounds: Bounds,
}

impl ReportBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn run(mut self, run: RunInfo) -> Self {
        self.run = Some(run);
        self
    }

    pub fn exponent(mut self, e: ExponentEstimate) -> Self {
        self.exponent = Some(e);
        self
    }

    pub fn lemma(mut self, r: LemmaReport) -> Self {
        let slot = match r.lemma_id.as_str() {
            "W" => &mut self.lemmas.w,
            "X" => &mut self.lemmas.x,
            "f" => &mut self.lemmas.f,
            "main" => &mut self.lemmas.main,
            _ => &mut self.lemmas.dirichlet,
        };
        *slot = Some(r);
        self
    }

    pub fn evertse_log2(mut self, v: &RealInterval) -> Self {
        self.bounds.evertse_log2 = Some(v.into());
        self
    }

    pub fn measure(mut self, m: &MeasureValue) -> Self {
        self.bounds.w = Some((&m.w).into());
        self.bounds.log_bound = Some((&m.log_bound).into());
        self
    }

    pub fn build(self) -> Result<Report> {
        let empty = self.exponent.is_none()
            && self.lemmas.is_empty()
            && self.bounds == Bounds::default();
        if empty {
            return Err(Error::EmptyReport);
        }
        Ok(Report {
            run: self.run,
            exponent: self.exponent,
            lemmas: self.lemmas,
            bounds: self.bounds,
        })
    }
}

pub fn build_report(builder: ReportBuilder) -> Result<Report> {
    builder.build()
}

/// Parameters for [`verify_sequence`].
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub xi_spec: String,
    pub eta_spec: String,
    pub x_max: u64,
    pub max_depth: usize,
    pub lambda: Rational,
    pub theta: Rational,
    pub conic: ConicForm,
    pub conic_label: String,
    /// Exponent tail starts at the first `i` with `X_{i+1} >=` this.
    pub tail_threshold: u64,
}

/// `theta = (1 - λ)/(2λ - 1) + 1/20`.
pub fn auto_theta(lambda: &Rational) -> Result<Rational> {
    Ok(critical_theta(lambda)? + Rational::new(1.into(), 20.into()))
}

/// Runs every check on a computed (or replayed) sequence.
pub fn verify_sequence(seq: &[MinimalPoint], cfg: &VerifyConfig) -> Result<Report> {
    let index_set = crate::geometry::index_set_i(seq);
    let run = RunInfo {
        xi_spec: cfg.xi_spec.clone(),
        eta_spec: cfg.eta_spec.clone(),
        x_max: cfg.x_max,
        max_depth: cfg.max_depth,
        tie_rule: "exact half-integers round down".into(),
        lambda: format_rational(&cfg.lambda),
        theta: format_rational(&cfg.theta),
        conic: cfg.conic_label.clone(),
        points: seq.len(),
    };
    let mut b = ReportBuilder::new().run(run);

    let usable = seq
        .iter()
        .rposition(|p| p.delta.lo.is_positive())
        .map_or(0, |k| k + 2)
        .min(seq.len());
    if usable >= 2 {
        let tail_from = tail_index_for(&seq[..usable], cfg.tail_threshold).unwrap_or(usable - 1);
        b = b.exponent(estimate_lambda(&seq[..usable], tail_from)?);
    }

    b = b.lemma(verify_lemma_w(seq));
    let x_report = match verify_lemma_x(seq, &index_set) {
        Ok(r) => r,
        Err(Error::InsufficientData(reason)) => {
            let mut r = LemmaReport::new("X", "index set too small", [0, 0]);
            r.detail("index_set_size", index_set.len());
            r.detail("index_set", index_set.clone());
            r.inconclusive(reason)
        }
        Err(e) => return Err(e),
    };
    b = b.lemma(x_report);
    b = b.lemma(verify_lemma_f(seq, &cfg.conic, &cfg.lambda)?);
    let main = match verify_lemma_main(seq, &index_set, &cfg.lambda, &cfg.theta) {
        Err(Error::DependentVectors) => {
            LemmaReport::new("main", "dependent consecutive points", [0, 0])
                .inconclusive("consecutive points are dependent")
        }
        other => other?,
    };
    b = b.lemma(main);
    b = b.lemma(verify_dirichlet(seq));
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_reals::Enclosure;
    use crate::geometry::IntVec3;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn point(index: usize, v: (i64, i64, i64), delta: Rational) -> MinimalPoint {
        MinimalPoint {
            index,
            vec: IntVec3::new(v.0, v.1, v.2),
            x: v.0 as u64,
            delta: Enclosure::exact(delta, 0),
        }
    }

    #[test]
    fn choose_delta_examples() {
        assert_eq!(choose_delta(&q(3, 5)).unwrap(), q(1, 35));
        assert_eq!(choose_delta(&q(309, 500)).unwrap(), q(59, 1750));
        assert!(matches!(choose_delta(&q(1, 2)), Err(Error::BadLambda(_))));
        let d = choose_delta(&q(2, 3)).unwrap();
        assert!(d * q(6, 1) < q(1, 3));
    }

    #[test]
    fn naive_height_examples() {
        let b = |v: &[i64]| v.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>();
        assert_eq!(naive_height_and_degree(&b(&[-2, 0, 1])).unwrap(), (2.into(), 2));
        assert_eq!(naive_height_and_degree(&b(&[1, -7, 0, 3])).unwrap(), (7.into(), 3));
        assert_eq!(naive_height_and_degree(&b(&[0, 1])).unwrap(), (1.into(), 1));
        assert_eq!(naive_height_and_degree(&b(&[0, 0])), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn two_point_exponent() {
        let seq = vec![point(1, (1, 0, 0), q(1, 4)), point(2, (2, 1, 1), q(1, 8))];
        let e = estimate_lambda(&seq, 1).unwrap();
        assert_eq!(e.per_index.len(), 1);
        // -ln(1/4) / ln 2 = 2
        assert!(e.per_index[0].lo <= q(2, 1) && q(2, 1) <= e.per_index[0].hi);
        assert_eq!(e.tail_min.index, 1);
        assert_eq!(e.tail_min.value, e.per_index[0].lo);
        assert!(matches!(estimate_lambda(&seq, 2), Err(Error::InsufficientData(_))));
        let degenerate = vec![point(1, (1, 0, 0), q(0, 1)), point(2, (2, 1, 1), q(0, 1))];
        assert_eq!(
            estimate_lambda(&degenerate, 1),
            Err(Error::DegenerateDelta { index: 1 })
        );
    }

    #[test]
    fn lemma_w_detects_dependent_pair() {
        let seq = vec![point(1, (1, 1, 1), q(1, 4)), point(2, (2, 2, 2), q(1, 8))];
        let r = verify_lemma_w(&seq);
        assert!(r.is_violated());
        assert_eq!(r.witness.as_ref().unwrap().kind, "dimension");

        let seq = vec![point(1, (1, 0, 0), q(1, 4)), point(2, (0, 1, 0), q(1, 8))];
        assert!(verify_lemma_w(&seq).holds());

        let seq = vec![point(1, (1, 0, 0), q(1, 4)), point(2, (1, 2, 0), q(1, 8))];
        let r = verify_lemma_w(&seq);
        assert_eq!(r.witness.unwrap().kind, "basis");
    }

    #[test]
    fn lemma_x_equal_wedges_and_small_sets() {
        // points 2, 3 and 4 all lie in the plane x2 = 0
        let seq = vec![
            point(1, (1, 0, 1), q(1, 2)),
            point(2, (1, 0, 0), q(1, 3)),
            point(3, (2, 1, 0), q(1, 4)),
            point(4, (3, 1, 0), q(1, 5)),
            point(5, (5, 2, 1), q(1, 6)),
        ];
        let r = verify_lemma_x(&seq, &[2, 3]).unwrap();
        assert!(r.is_violated());
        assert_eq!(r.witness.unwrap().kind, "W_i = W_j");
        assert!(matches!(
            verify_lemma_x(&seq, &[2]),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn lemma_main_theta_precondition() {
        let seq = vec![point(1, (1, 0, 0), q(1, 4)), point(2, (2, 1, 1), q(1, 8))];
        assert!(matches!(
            verify_lemma_main(&seq, &[2, 3], &q(3, 5), &q(1, 2)),
            Err(Error::ThetaTooSmall { .. })
        ));
        assert!(matches!(
            verify_lemma_main(&seq, &[2, 3], &q(3, 5), &q(2, 1)),
            Err(Error::ThetaTooSmall { .. })
        ));
        let r = verify_lemma_main(&seq, &[2], &q(3, 5), &q(41, 20)).unwrap();
        assert_eq!(r.verdict, VerdictKind::Inconclusive);
        assert_eq!(critical_theta(&q(3, 5)).unwrap(), q(2, 1));
        assert_eq!(auto_theta(&q(3, 5)).unwrap(), q(41, 20));
    }

    #[test]
    fn lemma_f_flags_conic_point() {
        let seq = vec![point(1, (1, 1, 1), q(1, 4)), point(2, (2, 3, 5), q(1, 8))];
        let r = verify_lemma_f(&seq, &ConicForm::parabola(), &q(3, 5)).unwrap();
        assert_eq!(r.details["last_vanishing_index"], serde_json::json!(1));
        assert_eq!(r.margins[0].lhs, "0/1");
        assert_eq!(r.margins[1].lhs, "1/1");
        assert!(r.holds());
    }

    #[test]
    fn evertse_examples() {
        let v = evertse_count_log2(3, &q(1, 10), 6).unwrap();
        let f = 540.0 + 21.0 * 10f64.log2() + 24f64.ln().log2() + 24f64.ln().ln().log2();
        assert!((v.approx() - f).abs() < 1e-9);
        let v = evertse_count_log2(2, &q(1, 1), 5).unwrap();
        let f = 240.0 + 20f64.ln().log2() + 20f64.ln().ln().log2();
        assert!((v.approx() - f).abs() < 1e-9);
        assert!(evertse_count_log2(1, &q(1, 2), 5).is_err());
        assert!(evertse_count_log2(3, &q(0, 1), 5).is_err());
        assert!(evertse_count_log2(3, &q(3, 2), 5).is_err());
        assert!(evertse_count_log2(3, &q(1, 2), 0).is_err());
    }

    #[test]
    fn measure_examples() {
        let m = measure_w(&MeasureParams {
            c: q(1, 1),
            d: 3,
            h: 2.into(),
        })
        .unwrap();
        let expect = (3f64.ln() * 3f64.ln().ln()).exp();
        assert!((m.w.approx() - expect).abs() < 1e-12);
        assert!((m.log_bound.approx() + expect * 2f64.ln()).abs() < 1e-12);
        assert!(m.w.lo > q(1, 1));
        assert!(measure_w(&MeasureParams { c: q(1, 1), d: 2, h: 2.into() }).is_err());
        assert!(measure_w(&MeasureParams { c: q(1, 1), d: 3, h: 1.into() }).is_err());
        assert!(ab_measure_exceeds(&q(1, 1), 16).unwrap());
    }

    #[test]
    fn report_requires_a_section() {
        assert_eq!(ReportBuilder::new().build(), Err(Error::EmptyReport));
        let seq = vec![point(1, (1, 0, 0), q(1, 4)), point(2, (0, 1, 0), q(1, 8))];
        let r = build_report(ReportBuilder::new().lemma(verify_lemma_w(&seq))).unwrap();
        let json: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(json["lemmas"].as_object().unwrap().len(), 1);
        assert_eq!(json["lemmas"]["W"]["verdict"], "holds-on-horizon");
    }
}
