#![allow(dead_code)]

pub mod oracle;

use minpoints::exact_reals::RealSpec;

pub fn spec(s: &str) -> RealSpec {
    s.parse().unwrap()
}

pub fn fib_xi() -> RealSpec {
    spec("word:fib(1,2)")
}

pub fn fib_eta() -> RealSpec {
    fib_xi().square()
}
