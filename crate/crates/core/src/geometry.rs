//! Exact integer-lattice geometry in dimension three: wedge products,
//! primitive vectors, heights of rank-2 subspaces, Weil heights of rational
//! points and ternary quadratic forms.
//!
//! Heights are returned squared so that every result stays rational.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_reals::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntVec3 {
    pub x0: BigInt,
    pub x1: BigInt,
    pub x2: BigInt,
}

impl IntVec3 {
    pub fn new(x0: impl Into<BigInt>, x1: impl Into<BigInt>, x2: impl Into<BigInt>) -> Self {
        Self {
            x0: x0.into(),
            x1: x1.into(),
            x2: x2.into(),
        }
    }

    pub fn coords(&self) -> [&BigInt; 3] {
        [&self.x0, &self.x1, &self.x2]
    }

    pub fn is_zero(&self) -> bool {
        self.x0.is_zero() && self.x1.is_zero() && self.x2.is_zero()
    }

    pub fn dot(&self, other: &IntVec3) -> BigInt {
        &self.x0 * &other.x0 + &self.x1 * &other.x1 + &self.x2 * &other.x2
    }

    pub fn norm_sq(&self) -> BigInt {
        self.dot(self)
    }

    /// gcd of the entries (0 for the zero vector).
    pub fn content(&self) -> BigInt {
        self.x0.gcd(&self.x1).gcd(&self.x2)
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == BigInt::from(1)
    }

    pub fn scale(&self, c: &BigInt) -> IntVec3 {
        IntVec3 {
            x0: &self.x0 * c,
            x1: &self.x1 * c,
            x2: &self.x2 * c,
        }
    }

    pub fn add(&self, other: &IntVec3) -> IntVec3 {
        IntVec3 {
            x0: &self.x0 + &other.x0,
            x1: &self.x1 + &other.x1,
            x2: &self.x2 + &other.x2,
        }
    }
}

impl AsRef<IntVec3> for IntVec3 {
    fn as_ref(&self) -> &IntVec3 {
        self
    }
}

impl fmt::Display for IntVec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x0, self.x1, self.x2)
    }
}

/// Raw cross product `x ∧ y`.
pub fn wedge(x: &IntVec3, y: &IntVec3) -> IntVec3 {
    IntVec3 {
        x0: &x.x1 * &y.x2 - &x.x2 * &y.x1,
        x1: &x.x2 * &y.x0 - &x.x0 * &y.x2,
        x2: &x.x0 * &y.x1 - &x.x1 * &y.x0,
    }
}

/// Divides out the content and makes the first non-zero entry positive.
pub fn primitivize(v: &IntVec3) -> Result<IntVec3> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let g = v.content();
    let first = v.coords().into_iter().find(|c| !c.is_zero()).cloned().unwrap_or_default();
    let g = if first.is_negative() { -g } else { g };
    Ok(IntVec3 {
        x0: &v.x0 / &g,
        x1: &v.x1 / &g,
        x2: &v.x2 / &g,
    })
}

/// The rank-2 subspace spanned by two integer vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    /// Primitive, sign-normalised normal vector.
    pub wedge: IntVec3,
    /// `‖wedge‖²`, the squared height of the subspace.
    pub height_sq: BigInt,
    pub span_witness: (IntVec3, IntVec3),
    /// Whether the witnesses form a basis of the subspace's integer points.
    pub basis_flag: bool,
}

impl Subspace {
    /// Same subspace as `other` (normals parallel).
    pub fn same_as(&self, other: &Subspace) -> bool {
        self.wedge == other.wedge
    }
}

pub fn subspace_of(x: &IntVec3, y: &IntVec3) -> Result<Subspace> {
    let raw = wedge(x, y);
    if raw.is_zero() {
        return Err(Error::DependentVectors);
    }
    let basis_flag = raw.is_primitive();
    let w = primitivize(&raw)?;
    Ok(Subspace {
        height_sq: w.norm_sq(),
        wedge: w,
        span_witness: (x.clone(), y.clone()),
        basis_flag,
    })
}

/// `{x, y}` is a basis of `span(x, y) ∩ Z³` iff `x ∧ y` is primitive.
pub fn is_lattice_basis(x: &IntVec3, y: &IntVec3) -> Result<bool> {
    let raw = wedge(x, y);
    if raw.is_zero() {
        return Err(Error::DependentVectors);
    }
    Ok(raw.is_primitive())
}

pub fn det3(a: &IntVec3, b: &IntVec3, c: &IntVec3) -> BigInt {
    a.dot(&wedge(b, c))
}

pub fn triple_independent(a: &IntVec3, b: &IntVec3, c: &IntVec3) -> bool {
    !det3(a, b, c).is_zero()
}

/// Indices `i` (1-based, `2 <= i <= len - 1`) where points `i-1, i, i+1`
/// are linearly independent.
pub fn index_set_i<P: AsRef<IntVec3>>(points: &[P]) -> Vec<usize> {
    (2..points.len())
        .filter(|&i| {
            triple_independent(
                points[i - 2].as_ref(),
                points[i - 1].as_ref(),
                points[i].as_ref(),
            )
        })
        .collect()
}

/// Squared absolute Weil height of a non-zero rational point.
///
/// At the archimedean place the local factor is the Euclidean norm and at
/// each prime `p` it is the largest p-adic absolute value of the entries.
/// Scaling to a primitive integer vector `w` makes every finite factor 1, so
/// the product formula leaves `H(v) = ‖w‖₂`, i.e. `‖u‖₂ / content(u)` for any
/// integer multiple `u` of `v`.
pub fn weil_height_sq(v: &[Rational]) -> Result<Rational> {
    if v.len() < 2 {
        return Err(Error::Dimension(v.len()));
    }
    if v.iter().all(Zero::is_zero) {
        return Err(Error::ZeroVector);
    }
    let lcm = v
        .iter()
        .fold(BigInt::from(1), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = v.iter().map(|r| r.numer() * (&lcm / r.denom())).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let norm_sq: BigInt = ints.iter().map(|x| x * x).sum();
    Ok(Rational::new(norm_sq, &content * &content))
}

/// Polynomial in `x, y` with rational coefficients, keyed by exponents.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BivariatePoly {
    pub terms: BTreeMap<(u32, u32), Rational>,
}

impl BivariatePoly {
    /// From `[c_xx, c_xy, c_yy, c_x, c_y, c_1]`.
    pub fn from_lex_coeffs(c: &[Rational; 6]) -> Self {
        let keys = [(2, 0), (1, 1), (0, 2), (1, 0), (0, 1), (0, 0)];
        let terms = keys
            .into_iter()
            .zip(c.iter().cloned())
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Self { terms }
    }

    pub fn total_degree(&self) -> Option<usize> {
        self.terms
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(&(i, j), _)| (i + j) as usize)
            .max()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        self.terms
            .iter()
            .map(|(&(i, j), c)| c * num_traits::pow(x.clone(), i as usize) * num_traits::pow(y.clone(), j as usize))
            .sum()
    }
}

/// Symmetric ternary quadratic form `φ(v) = vᵀ M v` with `f(x, y) = φ(1, x, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConicForm {
    pub matrix: [[Rational; 3]; 3],
}

impl ConicForm {
    /// `x0 x2 - x1²`, the form attached to `y = x²`.
    pub fn parabola() -> Self {
        conic_from_poly(&parabola_poly()).expect("parabola has degree 2")
    }

    /// Least common denominator of the matrix entries of `2 M`, i.e. of the
    /// coefficients of `φ` as a polynomial.
    pub fn coefficient_denominator(&self) -> BigInt {
        let mut den = BigInt::from(1);
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, m) in row.iter().enumerate() {
                let c = if i == j { m.clone() } else { m * Rational::from_integer(2.into()) };
                den = den.lcm(c.denom());
            }
        }
        den
    }
}

pub fn parabola_poly() -> BivariatePoly {
    let one = Rational::from_integer(1.into());
    let zero = Rational::zero();
    BivariatePoly::from_lex_coeffs(&[-one.clone(), zero.clone(), zero.clone(), zero.clone(), one, zero])
}

pub fn conic_from_poly(f: &BivariatePoly) -> Result<ConicForm> {
    match f.total_degree() {
        Some(2) => {}
        Some(d) => return Err(Error::BadDegree(d)),
        None => return Err(Error::BadDegree(0)),
    }
    let half = Rational::new(1.into(), 2.into());
    let mut m: [[Rational; 3]; 3] = Default::default();
    m[0][0] = f.coeff(0, 0);
    m[1][1] = f.coeff(2, 0);
    m[2][2] = f.coeff(0, 2);
    let off = [
        ((0, 1), f.coeff(1, 0)),
        ((0, 2), f.coeff(0, 1)),
        ((1, 2), f.coeff(1, 1)),
    ];
    for ((i, j), c) in off {
        let v = c * &half;
        m[i][j] = v.clone();
        m[j][i] = v;
    }
    Ok(ConicForm { matrix: m })
}

pub fn conic_eval(phi: &ConicForm, v: &IntVec3) -> Rational {
    let coords: Vec<Rational> = v
        .coords()
        .iter()
        .map(|c| Rational::from_integer((*c).clone()))
        .collect();
    let mut acc = Rational::zero();
    for i in 0..3 {
        for j in 0..3 {
            acc += &phi.matrix[i][j] * &coords[i] * &coords[j];
        }
    }
    acc
}

/// Parses `parabola` or `conic:poly:c_xx,c_xy,c_yy,c_x,c_y,c_1`.
impl FromStr for ConicForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "parabola" || s == "conic:parabola" {
            return Ok(ConicForm::parabola());
        }
        let body = s
            .strip_prefix("conic:poly:")
            .ok_or_else(|| Error::Parse(format!("unknown conic `{s}`")))?;
        let coeffs = body
            .split(',')
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()?;
        let coeffs: [Rational; 6] = coeffs
            .try_into()
            .map_err(|_| Error::Parse(format!("conic needs 6 coefficients: `{s}`")))?;
        conic_from_poly(&BivariatePoly::from_lex_coeffs(&coeffs))
    }
}
