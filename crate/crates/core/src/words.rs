//! Words over positive integers used as partial-quotient sequences.
//!
//! Sturmian words follow the standard-sequence construction
//! `s1 = a`, `s2 = a^(a1-1) b`, `s(k+1) = s(k)^(a(k+1)) s(k-1)` for a slope
//! `[0; a1, a2, ...]`. With this convention the output equals the cutting
//! sequence `floor((k+1) t) - floor(k t)` (0 mapped to `a`, 1 to `b`).
//! When `a1 = 1` the word starts with `b`; in particular the Fibonacci word
//! on `(a, b)` is the Sturmian word of slope `[0; 1, 1, ...]` on `(b, a)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Two distinct positive letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LetterPair {
    a: u64,
    b: u64,
}

impl LetterPair {
    pub fn new(a: u64, b: u64) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::InvalidLetters(format!(
                "letters must be positive, got ({a},{b})"
            )));
        }
        if a == b {
            return Err(Error::InvalidLetters(format!(
                "letters must be distinct, got ({a},{b})"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn swapped(&self) -> Self {
        Self { a: self.b, b: self.a }
    }
}

/// Partial quotients `a1, a2, ...` of a slope `[0; a1, a2, ...]` in (0, 1).
///
/// With `periodic` set the listed quotients repeat forever, which gives a
/// quadratic irrational slope with bounded partial quotients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Slope {
    quotients: Vec<u64>,
    periodic: bool,
}

impl Slope {
    pub fn new(quotients: Vec<u64>, periodic: bool) -> Result<Self> {
        if quotients.is_empty() {
            return Err(Error::Parse("slope needs at least one partial quotient".into()));
        }
        if quotients.contains(&0) {
            return Err(Error::Parse("slope partial quotients must be >= 1".into()));
        }
        Ok(Self { quotients, periodic })
    }

    /// Quotient `a_k` for `k >= 1`, or `None` when a finite slope runs out.
    pub fn get(&self, k: usize) -> Option<u64> {
        debug_assert!(k >= 1);
        let i = k - 1;
        if i < self.quotients.len() {
            Some(self.quotients[i])
        } else if self.periodic {
            Some(self.quotients[i % self.quotients.len()])
        } else {
            None
        }
    }

    pub fn quotients(&self) -> &[u64] {
        &self.quotients
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum WordSpec {
    Fibonacci(LetterPair),
    Sturmian { slope: Slope, pair: LetterPair },
    Periodic(Vec<u64>),
    Explicit(Vec<u64>),
}

impl WordSpec {
    /// First `n` letters, or `StreamExhausted` when the word is finite (or
    /// its slope is) and cannot supply them.
    pub fn letters(&self, n: usize) -> Result<Vec<u64>> {
        match self {
            WordSpec::Fibonacci(pair) => Ok(fibonacci_word(*pair, n)),
            WordSpec::Sturmian { slope, pair } => sturmian_word(slope, *pair, n),
            WordSpec::Periodic(pattern) => Ok(periodic_word(pattern, n)),
            WordSpec::Explicit(letters) => {
                if letters.len() < n {
                    Err(Error::StreamExhausted {
                        needed: n,
                        available: letters.len(),
                    })
                } else {
                    Ok(letters[..n].to_vec())
                }
            }
        }
    }

    /// Number of letters the word can produce, `None` if unbounded.
    pub fn finite_len(&self) -> Option<usize> {
        match self {
            WordSpec::Explicit(letters) => Some(letters.len()),
            _ => None,
        }
    }
}

/// First `n` letters of the Fibonacci word `w1 = a, w2 = ab, w(k+1) = w(k) w(k-1)`.
pub fn fibonacci_word(pair: LetterPair, n: usize) -> Vec<u64> {
    let mut prev = vec![pair.a];
    let mut cur = vec![pair.a, pair.b];
    while cur.len() < n {
        let next: Vec<u64> = cur.iter().chain(prev.iter()).copied().collect();
        prev = cur;
        cur = next;
    }
    cur.truncate(n);
    cur
}

/// First `n` letters of the characteristic Sturmian word of the given slope.
pub fn sturmian_word(slope: &Slope, pair: LetterPair, n: usize) -> Result<Vec<u64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let a1 = slope.get(1).ok_or(Error::StreamExhausted {
        needed: 1,
        available: 0,
    })?;
    // s1 = a, s2 = a^(a1-1) b
    let mut prev = vec![pair.a];
    let mut cur: Vec<u64> = std::iter::repeat_n(pair.a, (a1 - 1) as usize)
        .chain(std::iter::once(pair.b))
        .collect();
    let mut k = 2;
    while cur.len() < n {
        let reps = slope.get(k).ok_or(Error::StreamExhausted {
            needed: k,
            available: k - 1,
        })?;
        let mut next = Vec::with_capacity(cur.len() * reps as usize + prev.len());
        for _ in 0..reps {
            next.extend_from_slice(&cur);
        }
        next.extend_from_slice(&prev);
        prev = cur;
        cur = next;
        k += 1;
    }
    cur.truncate(n);
    Ok(cur)
}

/// `pattern` repeated cyclically and cut to `n` letters.
pub fn periodic_word(pattern: &[u64], n: usize) -> Vec<u64> {
    pattern.iter().copied().cycle().take(n).collect()
}

impl fmt::Display for WordSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(v: &[u64]) -> String {
            v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        }
        match self {
            WordSpec::Fibonacci(p) => write!(f, "fib({},{})", p.a, p.b),
            WordSpec::Sturmian { slope, pair } => {
                let tail = if slope.periodic { ",..." } else { "" };
                write!(
                    f,
                    "sturm([0;{}{}],{},{})",
                    join(&slope.quotients),
                    tail,
                    pair.a,
                    pair.b
                )
            }
            WordSpec::Periodic(p) => write!(f, "per({})", join(p)),
            WordSpec::Explicit(p) => write!(f, "expl({})", join(p)),
        }
    }
}

fn parse_letters(body: &str) -> Result<Vec<u64>> {
    body.split(',')
        .map(|t| {
            let t = t.trim();
            let v: u64 = t
                .parse()
                .map_err(|_| Error::Parse(format!("bad letter `{t}`")))?;
            if v == 0 {
                return Err(Error::InvalidLetters("letters must be positive".into()));
            }
            Ok(v)
        })
        .collect()
}

fn strip_call<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?
        .trim_start()
        .strip_prefix('(')?
        .strip_suffix(')')
}

impl FromStr for WordSpec {
    type Err = Error;

    /// Grammar: `fib(a,b)`, `sturm([0;a1,a2,...],a,b)`, `per(p1,p2,...)`,
    /// `expl(t1,t2,...)`. A slope list ending in `,...` repeats cyclically.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(body) = strip_call(s, "fib") {
            let letters = parse_letters(body)?;
            if letters.len() != 2 {
                return Err(Error::Parse(format!("fib needs two letters: `{s}`")));
            }
            return Ok(WordSpec::Fibonacci(LetterPair::new(letters[0], letters[1])?));
        }
        if let Some(body) = strip_call(s, "sturm") {
            let body = body.trim();
            let rest = body
                .strip_prefix('[')
                .ok_or_else(|| Error::Parse(format!("sturm slope must start with `[`: `{s}`")))?;
            let (slope_txt, after) = rest
                .split_once(']')
                .ok_or_else(|| Error::Parse(format!("unterminated slope in `{s}`")))?;
            let slope_txt = slope_txt.trim();
            let quotients = slope_txt
                .strip_prefix('0')
                .and_then(|t| t.trim_start().strip_prefix(';'))
                .ok_or_else(|| Error::Parse(format!("slope must be `[0;a1,...]`: `{s}`")))?;
            let (quotients, periodic) = match quotients.trim().strip_suffix("...") {
                Some(q) => (q.trim().trim_end_matches(',').to_string(), true),
                None => (quotients.trim().to_string(), false),
            };
            let slope = Slope::new(parse_letters(&quotients)?, periodic)?;
            let letters = parse_letters(
                after
                    .trim()
                    .strip_prefix(',')
                    .ok_or_else(|| Error::Parse(format!("missing letters in `{s}`")))?,
            )?;
            if letters.len() != 2 {
                return Err(Error::Parse(format!("sturm needs two letters: `{s}`")));
            }
            return Ok(WordSpec::Sturmian {
                slope,
                pair: LetterPair::new(letters[0], letters[1])?,
            });
        }
        if let Some(body) = strip_call(s, "per") {
            let pattern = parse_letters(body)?;
            return Ok(WordSpec::Periodic(pattern));
        }
        if let Some(body) = strip_call(s, "expl") {
            return Ok(WordSpec::Explicit(parse_letters(body)?));
        }
        Err(Error::Parse(format!("unknown word id `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a: u64, b: u64) -> LetterPair {
        LetterPair::new(a, b).unwrap()
    }

    #[test]
    fn fibonacci_examples() {
        assert_eq!(fibonacci_word(pair(1, 2), 8), vec![1, 2, 1, 1, 2, 1, 2, 1]);
        assert_eq!(fibonacci_word(pair(1, 2), 1), vec![1]);
        assert_eq!(fibonacci_word(pair(3, 4), 5), vec![3, 4, 3, 3, 4]);
    }

    #[test]
    fn periodic_examples() {
        assert_eq!(periodic_word(&[2], 4), vec![2, 2, 2, 2]);
        assert_eq!(periodic_word(&[1, 2], 5), vec![1, 2, 1, 2, 1]);
        assert_eq!(periodic_word(&[3, 1, 4], 7), vec![3, 1, 4, 3, 1, 4, 3]);
    }

    #[test]
    fn sturmian_slope_two_ones() {
        // Slope [0;2,1,1,...] = 1/(1+golden ratio), letters cut by hand.
        let quotients = std::iter::once(2).chain(std::iter::repeat_n(1, 30));
        let slope = Slope::new(quotients.collect(), false).unwrap();
        assert_eq!(
            sturmian_word(&slope, pair(1, 2), 6).unwrap(),
            vec![1, 2, 1, 1, 2, 1]
        );
    }

    #[test]
    fn sturmian_first_letter() {
        let s = Slope::new(vec![3, 2], true).unwrap();
        assert_eq!(sturmian_word(&s, pair(5, 7), 1).unwrap(), vec![5]);
        // a1 = 1: the majority letter is b and comes first.
        let s = Slope::new(vec![1], true).unwrap();
        assert_eq!(sturmian_word(&s, pair(5, 7), 1).unwrap(), vec![7]);
    }

    #[test]
    fn sturmian_exhausts_on_finite_slope() {
        let s = Slope::new(vec![1, 1], false).unwrap();
        assert!(matches!(
            sturmian_word(&s, pair(1, 2), 50),
            Err(Error::StreamExhausted { .. })
        ));
    }

    #[test]
    fn letter_pair_rejects_equal_or_zero() {
        assert!(LetterPair::new(1, 1).is_err());
        assert!(LetterPair::new(0, 2).is_err());
    }

    #[test]
    fn parse_word_ids() {
        assert_eq!(
            "fib(1,2)".parse::<WordSpec>().unwrap(),
            WordSpec::Fibonacci(pair(1, 2))
        );
        assert!("fib(1,1)".parse::<WordSpec>().is_err());
        let w: WordSpec = "sturm([0;2,1,...],1,2)".parse().unwrap();
        assert_eq!(w.to_string(), "sturm([0;2,1,...],1,2)");
        assert_eq!(w.letters(6).unwrap(), vec![1, 2, 1, 1, 2, 1]);
        assert_eq!(
            "per(1,2)".parse::<WordSpec>().unwrap().letters(3).unwrap(),
            vec![1, 2, 1]
        );
        let e: WordSpec = "expl(3,1,4)".parse().unwrap();
        assert!(e.letters(4).is_err());
        assert!("nope(1)".parse::<WordSpec>().is_err());
        assert!("per(0)".parse::<WordSpec>().is_err());
    }
}
