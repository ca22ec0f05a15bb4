//! Is `±2^((p-1)/2)·(1 + sqrt(1 - 2m^p))` a p-th power in `Z[sqrt(d0)]`?
//!
//! Write `1 - 2m^p = s²·d0` with `d0` square-free, so `α = 1 + s·sqrt(d0)`
//! has norm `2m^p`. Any root `a + b·sqrt(d0)` of `2^e·α` (`e = (p-1)/2`) has
//! `a | 2^e`, `b | 2^e·s` and norm `a² - b²d0 = 2m`. The tester walks exactly
//! that candidate set and checks survivors by exact exponentiation;
//! [`exact_root_oracle`] is an unpruned box search used to cross-check it.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Mul, Neg};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::integers::{factorize, is_prime, squarefree_decompose};
use crate::{Error, Result};

/// `x + y·sqrt(d0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadInt {
    pub x: BigInt,
    pub y: BigInt,
    d0: i128,
}

impl QuadInt {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>, d0: i128) -> Result<Self> {
        if d0 >= 0 {
            return Err(Error::domain(alloc::format!("d0 = {d0} is not negative")));
        }
        Ok(QuadInt {
            x: x.into(),
            y: y.into(),
            d0,
        })
    }

    pub fn d0(&self) -> i128 {
        self.d0
    }

    pub fn one(d0: i128) -> Self {
        QuadInt {
            x: BigInt::one(),
            y: BigInt::zero(),
            d0,
        }
    }

    /// `x² - d0·y²`, positive unless zero.
    pub fn norm(&self) -> BigInt {
        &self.x * &self.x - BigInt::from(self.d0) * &self.y * &self.y
    }

    pub fn scale(&self, k: &BigInt) -> QuadInt {
        QuadInt {
            x: &self.x * k,
            y: &self.y * k,
            d0: self.d0,
        }
    }

    pub fn pow(&self, mut n: u32) -> QuadInt {
        let mut acc = QuadInt::one(self.d0);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

impl Mul for &QuadInt {
    type Output = QuadInt;

    fn mul(self, rhs: &QuadInt) -> QuadInt {
        debug_assert_eq!(self.d0, rhs.d0);
        let d0 = BigInt::from(self.d0);
        QuadInt {
            x: &self.x * &rhs.x + &self.y * &rhs.y * d0,
            y: &self.x * &rhs.y + &self.y * &rhs.x,
            d0: self.d0,
        }
    }
}

impl Neg for &QuadInt {
    type Output = QuadInt;

    fn neg(self) -> QuadInt {
        QuadInt {
            x: -&self.x,
            y: -&self.y,
            d0: self.d0,
        }
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_negative() {
            write!(f, "{} - {}·√{}", self.x, -&self.y, self.d0)
        } else {
            write!(f, "{} + {}·√{}", self.x, self.y, self.d0)
        }
    }
}

/// `α = 1 + s·sqrt(d0)` together with the scale `2^((p-1)/2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialTarget {
    pub m: u64,
    pub p: u32,
    pub alpha: QuadInt,
    pub scale: BigInt,
    pub s: u128,
}

impl SpecialTarget {
    /// `2^((p-1)/2)·α`.
    pub fn scaled(&self) -> QuadInt {
        self.alpha.scale(&self.scale)
    }

    pub fn d0(&self) -> i128 {
        self.alpha.d0
    }

    fn half_exponent(&self) -> u32 {
        (self.p - 1) / 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PthPowerVerdict {
    pub is_pth_power: bool,
    /// A root whose p-th power is `±2^((p-1)/2)·α`.
    pub witness: Option<QuadInt>,
    pub checked_candidates: u64,
}

fn check_parameters(m: u64, p: u32) -> Result<()> {
    if m < 3 || m.is_multiple_of(2) {
        return Err(Error::domain(alloc::format!(
            "m = {m} must be odd and >= 3"
        )));
    }
    if p < 3 || !is_prime(p as u128) {
        return Err(Error::domain(alloc::format!(
            "p = {p} must be an odd prime"
        )));
    }
    Ok(())
}

/// `1 - 2m^t` with overflow checking.
pub(crate) fn family_radicand(m: u64, t: u32) -> Result<i128> {
    (m as i128)
        .checked_pow(t)
        .and_then(|x| x.checked_mul(2))
        .map(|x| 1 - x)
        .ok_or(Error::Overflow("1 - 2m^t"))
}

pub fn target_element(m: u64, p: u32) -> Result<SpecialTarget> {
    check_parameters(m, p)?;
    let d = family_radicand(m, p)?;
    let sd = squarefree_decompose(d)?;
    let alpha = QuadInt::new(1, BigInt::from(sd.s), sd.d0)?;
    Ok(SpecialTarget {
        m,
        p,
        alpha,
        scale: BigInt::one() << ((p - 1) / 2) as usize,
        s: sd.s,
    })
}

/// Signed divisors of `2^e·s`.
fn signed_divisors_of_power_of_two_times(e: u32, s: u128) -> Vec<BigInt> {
    let mut fac = factorize(s);
    match fac.factors.first_mut() {
        Some((2, k)) => *k += e,
        _ if e > 0 => fac.factors.insert(0, (2, e)),
        _ => {}
    }
    fac.divisors()
        .into_iter()
        .flat_map(|d| [BigInt::from(d), -BigInt::from(d)])
        .collect()
}

fn matches_up_to_sign(candidate: &QuadInt, target: &QuadInt) -> bool {
    *candidate == *target || *candidate == -target
}

/// Exhaustive test over the constrained candidate set.
pub fn is_special_pth_power(m: u64, p: u32) -> Result<PthPowerVerdict> {
    let target = target_element(m, p)?;
    let goal = target.scaled();
    let e = target.half_exponent();
    let two_m = BigInt::from(2 * m);
    let d0 = BigInt::from(target.d0());

    let a_values: Vec<BigInt> = (0..=e)
        .flat_map(|j| {
            let v = BigInt::one() << j as usize;
            [v.clone(), -v]
        })
        .collect();
    let b_values = signed_divisors_of_power_of_two_times(e, target.s);

    let mut checked = 0u64;
    for a in &a_values {
        for b in &b_values {
            checked += 1;
            if a * a - b * b * &d0 != two_m {
                continue;
            }
            let root = QuadInt::new(a.clone(), b.clone(), target.d0())?;
            if matches_up_to_sign(&root.pow(p), &goal) {
                return Ok(PthPowerVerdict {
                    is_pth_power: true,
                    witness: Some(root),
                    checked_candidates: checked,
                });
            }
        }
    }
    Ok(PthPowerVerdict {
        is_pth_power: false,
        witness: None,
        checked_candidates: checked,
    })
}

/// Box search over `|a|, |b| ≤ ⌈N^(1/2p)⌉ + 1` for `(a + b·sqrt(d0))^p = ±target`.
pub fn exact_root_oracle(target: &QuadInt, p: u32) -> Option<QuadInt> {
    let norm = target.norm();
    if !norm.is_positive() || p == 0 {
        return None;
    }
    let norm: BigUint = norm.magnitude().clone();
    let k = 2 * p;
    let mut bound = norm.nth_root(k);
    if bound.pow(k) < norm {
        bound += 1u32;
    }
    let bound: BigInt = BigInt::from(bound) + 1;
    let mut a = -bound.clone();
    while a <= bound {
        let mut b = -bound.clone();
        while b <= bound {
            let candidate = QuadInt {
                x: a.clone(),
                y: b.clone(),
                d0: target.d0,
            };
            if matches_up_to_sign(&candidate.pow(p), target) {
                return Some(candidate);
            }
            b += 1;
        }
        a += 1;
    }
    None
}

/// Whether `root` obeys `a | 2^((p-1)/2)` and `b | 2^((p-1)/2)·s`.
pub fn satisfies_divisibility_constraints(root: &QuadInt, p: u32, s: u128) -> bool {
    let bound = BigInt::from(s) << ((p - 1) / 2) as usize;
    let two_e = BigInt::one() << ((p - 1) / 2) as usize;
    let divides = |d: &BigInt, n: &BigInt| !d.is_zero() && (n % d).is_zero();
    divides(&root.x, &two_e) && divides(&root.y, &bound)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwinVerdict {
    pub m: u64,
    pub p: u32,
    pub lower: PthPowerVerdict,
    pub upper: PthPowerVerdict,
}

impl TwinVerdict {
    /// At least one of the two elements fails to be a power.
    pub fn holds(&self) -> bool {
        !self.lower.is_pth_power || !self.upper.is_pth_power
    }
}

/// Runs the tester at `p` and `p + 2`. A verdict with [`TwinVerdict::holds`]
/// false is a counterexample, reported rather than raised.
pub fn twin_prime_joint_check(m: u64, p: u32) -> Result<TwinVerdict> {
    if !is_prime(p as u128 + 2) {
        return Err(Error::domain(alloc::format!(
            "({p}, {}) is not a twin prime pair",
            p + 2
        )));
    }
    Ok(TwinVerdict {
        m,
        p,
        lower: is_special_pth_power(m, p)?,
        upper: is_special_pth_power(m, p + 2)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_examples() {
        let t = target_element(3, 3).unwrap();
        assert_eq!(t.alpha, QuadInt::new(1, 1, -53).unwrap());
        assert_eq!(t.scale, BigInt::from(2));
        assert_eq!(t.alpha.norm(), BigInt::from(54));

        let t = target_element(3, 5).unwrap();
        assert_eq!(t.alpha, QuadInt::new(1, 1, -485).unwrap());
        assert_eq!(t.scale, BigInt::from(4));
        assert_eq!(t.alpha.norm(), BigInt::from(2 * 243));

        // 1 - 2·5^7 = -156249 = -81·1929
        let t = target_element(5, 7).unwrap();
        assert_eq!(t.s, 9);
        assert_eq!(t.d0(), -1929);
        assert_eq!(t.alpha.norm(), BigInt::from(2 * 78125));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(target_element(4, 3).is_err());
        assert!(target_element(1, 3).is_err());
        assert!(target_element(3, 2).is_err());
        assert!(target_element(3, 9).is_err());
        assert!(is_special_pth_power(6, 3).is_err());
    }

    #[test]
    fn special_elements_are_not_powers() {
        for (m, p) in [(3, 3), (5, 3), (3, 7)] {
            let v = is_special_pth_power(m, p).unwrap();
            assert!(!v.is_pth_power, "m={m} p={p}");
            assert!(v.witness.is_none());
            assert!(v.checked_candidates > 0);
        }
    }

    #[test]
    fn candidate_count_for_small_case() {
        // (3, 3): a ∈ ±{1, 2}, b ∈ ±{1, 2}.
        assert_eq!(is_special_pth_power(3, 3).unwrap().checked_candidates, 16);
    }

    #[test]
    fn oracle_recovers_synthetic_cube() {
        let root = QuadInt::new(2, 1, -3).unwrap();
        let target = root.pow(3);
        assert_eq!(target, QuadInt::new(-10, 9, -3).unwrap());
        let found = exact_root_oracle(&target, 3).unwrap();
        assert!(found == root || found == -&root);
        assert!(exact_root_oracle(&-&target, 3).is_some());
    }

    #[test]
    fn oracle_finds_nothing_for_family_target() {
        let t = target_element(3, 3).unwrap();
        assert_eq!(exact_root_oracle(&t.scaled(), 3), None);
    }

    #[test]
    fn twin_check() {
        let v = twin_prime_joint_check(3, 3).unwrap();
        assert!(!v.lower.is_pth_power && !v.upper.is_pth_power);
        assert!(v.holds());
        assert!(twin_prime_joint_check(3, 7).is_err());
    }

    #[test]
    fn quad_int_arithmetic() {
        let z = QuadInt::new(3, -2, -5).unwrap();
        assert_eq!(z.norm(), BigInt::from(9 + 20));
        assert_eq!(z.pow(4).norm(), BigInt::from(29).pow(4));
        assert_eq!(z.pow(0), QuadInt::one(-5));
        assert!(QuadInt::new(1, 1, 5).is_err());
    }

    #[test]
    fn divisibility_constraint_check() {
        let r = QuadInt::new(-1, 2, -53).unwrap();
        assert!(satisfies_divisibility_constraints(&r, 3, 1));
        let r = QuadInt::new(3, 2, -53).unwrap();
        assert!(!satisfies_divisibility_constraints(&r, 3, 1));
    }
}
