//! The equation `D1·x² + D2 = λ²·m^y` in positive integers.
//!
//! `λ ∈ {1, √2, 2}` is carried as `λ² ∈ {1, 2, 4}` so all arithmetic stays
//! integral. Besides windowed solving this module classifies instances
//! against the exceptional families `F`, `G`, `H` and the finite set `S`,
//! outside of which the number of solutions is at most `2^(ω(m)-1)`.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::One;

use crate::integers::{is_perfect_square, is_perfect_square_big, omega};
use crate::{Error, Result};

/// The nine exceptional tuples `(λ², D1, D2, m)`, as printed with `λ`
/// replaced by `λ²`.
pub const S_TABLE: [(u8, u64, u64, u64); 9] = [
    (4, 13, 3, 4),
    (2, 7, 11, 9),
    (2, 1, 1, 5),
    (2, 1, 1, 13),
    (4, 1, 3, 7),
    (1, 1, 19, 55),
    (1, 1, 341, 377),
    (1, 2, 1, 3),
    (4, 7, 1, 2),
];

/// Validated `(λ², D1, D2, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BsInstance {
    lambda_sq: u8,
    d1: u64,
    d2: u64,
    m: u64,
}

impl BsInstance {
    /// Checks `λ² ∈ {1, 2, 4}`, `m ≥ 2`, `gcd(D1, D2) = gcd(D1·D2, m) = 1`
    /// and that even `m` comes with `λ = 2`.
    pub fn new(lambda_sq: u8, d1: u64, d2: u64, m: u64) -> Result<Self> {
        if !matches!(lambda_sq, 1 | 2 | 4) {
            return Err(Error::domain(alloc::format!(
                "lambda^2 = {lambda_sq} is not one of 1, 2, 4"
            )));
        }
        if d1 == 0 || d2 == 0 {
            return Err(Error::domain("D1 and D2 must be positive"));
        }
        if m < 2 {
            return Err(Error::domain(alloc::format!("m = {m} is less than 2")));
        }
        if d1.gcd(&d2) != 1 {
            return Err(Error::domain(alloc::format!(
                "gcd(D1, D2) = gcd({d1}, {d2}) != 1"
            )));
        }
        if d1.gcd(&m) != 1 || d2.gcd(&m) != 1 {
            return Err(Error::domain(alloc::format!(
                "gcd(D1·D2, m) = gcd({}, {m}) != 1",
                d1 as u128 * d2 as u128
            )));
        }
        if m.is_multiple_of(2) && lambda_sq != 4 {
            return Err(Error::domain(alloc::format!(
                "m = {m} is even, so lambda must be 2 (lambda^2 = 4), got {lambda_sq}"
            )));
        }
        Ok(BsInstance {
            lambda_sq,
            d1,
            d2,
            m,
        })
    }

    pub fn lambda_sq(&self) -> u8 {
        self.lambda_sq
    }

    pub fn d1(&self) -> u64 {
        self.d1
    }

    pub fn d2(&self) -> u64 {
        self.d2
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn as_tuple(&self) -> (u8, u64, u64, u64) {
        (self.lambda_sq, self.d1, self.d2, self.m)
    }

    /// Whether `(x, y)` satisfies the equation exactly.
    pub fn is_solution(&self, x: &BigUint, y: u32) -> bool {
        let lhs = BigUint::from(self.d1) * x * x + BigUint::from(self.d2);
        let rhs = BigUint::from(self.lambda_sq) * BigUint::from(self.m).pow(y);
        lhs == rhs
    }
}

impl fmt::Display for BsInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}·x² + {} = {}·{}^y",
            self.d1, self.d2, self.lambda_sq, self.m
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Solution {
    pub x: BigUint,
    pub y: u32,
}

/// Membership witness for `F`: `(D1, D2, m) = (F_{i-2ε}, L_{i+ε}, F_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FWitness {
    pub i: u32,
    pub epsilon: i8,
}

/// Membership witness for `H`: `D1·s² + D2 = λ²·m^r` and `3·D1·s² - D2 = ±λ²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HWitness {
    pub r: u32,
    pub s: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Classification {
    pub f: Option<FWitness>,
    /// Exponent `r` with `D2 = 4m^r - 1`.
    pub g: Option<u32>,
    pub h: Option<HWitness>,
    pub s: bool,
}

impl Classification {
    /// In `F ∪ G ∪ H ∪ S`.
    pub fn is_exceptional(&self) -> bool {
        self.f.is_some() || self.g.is_some() || self.h.is_some() || self.s
    }

    pub fn labels(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.f.is_some() {
            out.push("F");
        }
        if self.g.is_some() {
            out.push("G");
        }
        if self.h.is_some() {
            out.push("H");
        }
        if self.s {
            out.push("S");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSet {
    pub instance: BsInstance,
    pub y_max: u32,
    /// Sorted by `y`, then `x`.
    pub solutions: Vec<Solution>,
    pub classification: Classification,
}

/// All `(x, y)` with `1 ≤ y ≤ y_max`, `x ≥ 1`.
pub fn solve(instance: &BsInstance, y_max: u32) -> Result<SolutionSet> {
    if y_max == 0 {
        return Err(Error::domain("y_max must be at least 1"));
    }
    let d1 = BigInt::from(instance.d1);
    let d2 = BigInt::from(instance.d2);
    let mut power = BigInt::from(instance.lambda_sq);
    let m = BigInt::from(instance.m);
    let mut solutions = Vec::new();
    for y in 1..=y_max {
        power *= &m;
        let rest = &power - &d2;
        let (q, r) = rest.div_rem(&d1);
        if r != BigInt::ZERO || q <= BigInt::ZERO {
            continue;
        }
        if let Some(x) = is_perfect_square_big(&q) {
            solutions.push(Solution { x, y });
        }
    }
    Ok(SolutionSet {
        instance: *instance,
        y_max,
        solutions,
        classification: classify(instance.lambda_sq, instance.d1, instance.d2, instance.m),
    })
}

/// Fibonacci and Lucas numbers up to the first Fibonacci number above `limit`
/// (plus two for the `i + 2` lookups).
fn fib_lucas_tables(limit: u64) -> (Vec<u128>, Vec<u128>) {
    let mut fib = alloc::vec![0u128, 1];
    let mut luc = alloc::vec![2u128, 1];
    let mut over = 0;
    while over < 3 {
        let n = fib.len();
        fib.push(fib[n - 1] + fib[n - 2]);
        luc.push(luc[n - 1] + luc[n - 2]);
        if fib[n] > limit as u128 {
            over += 1;
        }
    }
    (fib, luc)
}

/// Scans `i ≥ 2` until `F_i > m`, both signs of `ε`.
pub fn in_family_f(d1: u64, d2: u64, m: u64) -> Option<FWitness> {
    let (fib, luc) = fib_lucas_tables(m);
    let (d1, d2, m) = (d1 as u128, d2 as u128, m as u128);
    let mut i = 2usize;
    while fib[i] <= m {
        for epsilon in [1i8, -1] {
            let (first, second) = if epsilon == 1 {
                (fib[i - 2], luc[i + 1])
            } else {
                (fib[i + 2], luc[i - 1])
            };
            if first == d1 && second == d2 && fib[i] == m {
                return Some(FWitness {
                    i: i as u32,
                    epsilon,
                });
            }
        }
        i += 1;
    }
    None
}

/// `r` with `m^r = n`, `r ≥ 1`.
fn log_exact(mut n: u128, m: u64) -> Option<u32> {
    let m = m as u128;
    if m < 2 || n < m {
        return None;
    }
    let mut r = 0;
    while n.is_multiple_of(m) {
        n /= m;
        r += 1;
    }
    (n == 1 && r >= 1).then_some(r)
}

/// `D1 = 1` and `D2 + 1 = 4·m^r` for some `r ≥ 1`.
pub fn in_family_g(d1: u64, d2: u64, m: u64) -> Option<u32> {
    if d1 != 1 {
        return None;
    }
    let v = d2 as u128 + 1;
    if !v.is_multiple_of(4) {
        return None;
    }
    log_exact(v / 4, m)
}

/// Solves `3·D1·s² = D2 ± λ²` for `s` (at most two candidates) and checks
/// `D1·s² + D2 = λ²·m^r`.
pub fn in_family_h(lambda_sq: u8, d1: u64, d2: u64, m: u64) -> Option<HWitness> {
    let (lam, d1w, d2w) = (lambda_sq as i128, d1 as i128, d2 as i128);
    for rhs in [d2w + lam, d2w - lam] {
        if rhs <= 0 || rhs % (3 * d1w) != 0 {
            continue;
        }
        let Some(s) = is_perfect_square(rhs / (3 * d1w)) else {
            continue;
        };
        if s == 0 {
            continue;
        }
        let w = d1 as u128 * s * s + d2 as u128;
        if !w.is_multiple_of(lambda_sq as u128) {
            continue;
        }
        if let Some(r) = log_exact(w / lambda_sq as u128, m) {
            return Some(HWitness { r, s: s as u64 });
        }
    }
    None
}

pub fn in_set_s(lambda_sq: u8, d1: u64, d2: u64, m: u64) -> bool {
    S_TABLE.contains(&(lambda_sq, d1, d2, m))
}

pub fn classify(lambda_sq: u8, d1: u64, d2: u64, m: u64) -> Classification {
    Classification {
        f: in_family_f(d1, d2, m),
        g: in_family_g(d1, d2, m),
        h: in_family_h(lambda_sq, d1, d2, m),
        s: in_set_s(lambda_sq, d1, d2, m),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditStatus {
    Pass,
    Fail,
    /// In an exceptional family; the bound does not apply.
    Exempt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundAudit {
    pub instance: BsInstance,
    pub y_max: u32,
    pub classification: Classification,
    pub count: usize,
    /// `2^(ω(m)-1)`.
    pub bound: u64,
    pub status: AuditStatus,
}

/// Compares the windowed solution count against `2^(ω(m)-1)` for
/// non-exceptional instances. A `Fail` is a counterexample, not an error.
pub fn audit_bound(instance: &BsInstance, y_max: u32) -> Result<BoundAudit> {
    let set = solve(instance, y_max)?;
    let bound = 1u64 << (omega(instance.m as u128).max(1) - 1);
    let count = set.solutions.len();
    let status = if set.classification.is_exceptional() {
        AuditStatus::Exempt
    } else if count as u64 <= bound {
        AuditStatus::Pass
    } else {
        AuditStatus::Fail
    };
    Ok(BoundAudit {
        instance: *instance,
        y_max,
        classification: set.classification,
        count,
        bound,
        status,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LebesgueReport {
    pub n_max: u32,
    pub y_bound: u64,
    pub checked: u64,
    /// `(x, y, n)` with `x² + 1 = 2y^n`; expected empty.
    pub hits: Vec<(BigUint, u64, u32)>,
}

/// Scans odd `3 ≤ n ≤ n_max`, odd `3 ≤ y ≤ y_bound` for `2y^n - 1` square.
pub fn lebesgue_check(n_max: u32, y_bound: u64) -> Result<LebesgueReport> {
    if n_max < 3 || y_bound < 3 {
        return Err(Error::domain("lebesgue_check bounds must be at least 3"));
    }
    let mut checked = 0;
    let mut hits = Vec::new();
    for y in (3..=y_bound).step_by(2) {
        let yb = BigUint::from(y);
        let y_sq = &yb * &yb;
        let mut power = yb.clone();
        for n in (3..=n_max).step_by(2) {
            power *= &y_sq;
            checked += 1;
            let v = BigInt::from(&power * 2u32 - BigUint::one());
            if let Some(x) = is_perfect_square_big(&v) {
                hits.push((x, y, n));
            }
        }
    }
    hits.sort();
    Ok(LebesgueReport {
        n_max,
        y_bound,
        checked,
        hits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn inst(l: u8, d1: u64, d2: u64, m: u64) -> BsInstance {
        BsInstance::new(l, d1, d2, m).unwrap()
    }

    fn pairs(set: &SolutionSet) -> Vec<(u64, u32)> {
        set.solutions
            .iter()
            .map(|s| (u64::try_from(&s.x).unwrap(), s.y))
            .collect()
    }

    #[test]
    fn instance_validation() {
        assert!(BsInstance::new(3, 1, 1, 5).is_err());
        assert!(BsInstance::new(2, 3, 6, 5).is_err());
        assert!(BsInstance::new(2, 5, 1, 5).is_err());
        assert!(BsInstance::new(2, 1, 1, 1).is_err());
        assert!(BsInstance::new(2, 1, 1, 4).is_err());
        assert!(BsInstance::new(4, 1, 3, 4).is_ok());
        assert!(BsInstance::new(4, 1, 3, 7).is_ok());
        let err = BsInstance::new(2, 5, 0, 3).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn solve_examples() {
        assert_eq!(pairs(&solve(&inst(2, 5, 1, 3), 30).unwrap()), vec![(1, 1)]);
        assert_eq!(
            pairs(&solve(&inst(2, 1, 1, 5), 30).unwrap()),
            vec![(3, 1), (7, 2)]
        );
        assert_eq!(pairs(&solve(&inst(2, 9, 1, 5), 30).unwrap()), vec![(1, 1)]);
        assert!(solve(&inst(2, 9, 1, 5), 0).is_err());
    }

    #[test]
    fn family_f() {
        assert_eq!(in_family_f(1, 7, 2), Some(FWitness { i: 3, epsilon: 1 }));
        assert_eq!(in_family_f(5, 1, 3), None);
        assert_eq!(in_family_f(3, 1, 1), Some(FWitness { i: 2, epsilon: -1 }));
        for m in 2..50 {
            assert_eq!(in_family_f(3, 1, m), None);
        }
        // ε = -1 branch: (F_{i+2}, L_{i-1}, F_i) at i = 5 is (13, 7, 5).
        assert_eq!(in_family_f(13, 7, 5), Some(FWitness { i: 5, epsilon: -1 }));
    }

    #[test]
    fn family_g() {
        assert_eq!(in_family_g(1, 19, 5), Some(1));
        assert_eq!(in_family_g(1, 99, 5), Some(2));
        assert_eq!(in_family_g(5, 1, 3), None);
        assert_eq!(in_family_g(1, 3, 5), None);
    }

    #[test]
    fn family_h() {
        assert_eq!(in_family_h(1, 1, 2, 3), Some(HWitness { r: 1, s: 1 }));
        for m in 3..40 {
            assert_eq!(in_family_h(2, 2 * m - 1, 1, m), None, "m = {m}");
        }
        assert_eq!(in_family_h(1, 1, 1, 4), None);
    }

    #[test]
    fn set_s() {
        assert!(in_set_s(2, 1, 1, 5));
        assert!(in_set_s(4, 13, 3, 4));
        assert!(!in_set_s(2, 5, 1, 3));
        for (l, d1, d2, m) in S_TABLE {
            assert!(BsInstance::new(l, d1, d2, m).is_ok());
        }
    }

    #[test]
    fn bound_audit_examples() {
        let a = audit_bound(&inst(2, 5, 1, 3), 30).unwrap();
        assert_eq!((a.bound, a.count, a.status), (1, 1, AuditStatus::Pass));
        assert!(!a.classification.is_exceptional());

        let a = audit_bound(&inst(2, 1, 1, 5), 30).unwrap();
        assert_eq!((a.count, a.status), (2, AuditStatus::Exempt));
        assert_eq!(a.classification.labels(), vec!["S"]);

        let a = audit_bound(&inst(2, 17, 1, 9), 30).unwrap();
        assert_eq!(a.bound, 1);
        assert!(a.count <= 1);
        assert_eq!(a.status, AuditStatus::Pass);
    }

    #[test]
    fn lebesgue_small_windows() {
        for (n, y) in [(3, 3), (5, 5)] {
            let r = lebesgue_check(n, y).unwrap();
            assert!(r.hits.is_empty());
        }
        assert_eq!(lebesgue_check(5, 5).unwrap().checked, 4);
        assert!(lebesgue_check(1, 5).is_err());
    }

    #[test]
    fn is_solution_check() {
        let i = inst(2, 1, 1, 13);
        assert!(i.is_solution(&BigUint::from(239u32), 4));
        assert!(!i.is_solution(&BigUint::from(238u32), 4));
    }
}
