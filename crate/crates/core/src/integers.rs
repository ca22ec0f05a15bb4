//! Integer primitives: primality, factorization, square-free parts, perfect
//! squares and the Fibonacci/Lucas sequences.
//!
//! Factorization works on `u128`. Everything the family code feeds it
//! (`|1 - 2m^t|` for desk-scale `m`, `t`) fits comfortably; callers that build
//! larger values get an [`Error::Overflow`] from their own checked arithmetic
//! before reaching this module.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Trial division runs up to this bound before switching to Pollard rho.
pub const TRIAL_DIVISION_BOUND: u128 = 1_000_000;

/// Miller-Rabin with these bases is deterministic below
/// [`DETERMINISTIC_PRIMALITY_LIMIT`].
const DETERMINISTIC_BASES: [u128; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const EXTRA_BASES: [u128; 12] = [43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];

/// 3 317 044 064 679 887 385 961 981
pub const DETERMINISTIC_PRIMALITY_LIMIT: u128 = 3_317_044_064_679_887_385_961_981;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primality {
    Composite,
    Prime,
    /// Passed Miller-Rabin with a fixed base set above the range where that
    /// base set is known to be deterministic.
    ProbablePrime,
}

impl Primality {
    pub fn is_prime(self) -> bool {
        !matches!(self, Primality::Composite)
    }
}

/// `value = ∏ prime^exponent`, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub value: u128,
    pub factors: Vec<(u128, u32)>,
    /// True when some factor was only shown to be a probable prime.
    pub probabilistic: bool,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u128> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    pub fn product(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, &(p, e)| acc * BigUint::from(p).pow(e))
    }

    /// All positive divisors, sorted. Only sensible for small values.
    pub fn divisors(&self) -> Vec<u128> {
        let mut divs = alloc::vec![1u128];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u128;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// `n = s² · d0` with `d0` square-free and of the same sign as `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SquarefreeDecomposition {
    pub value: i128,
    pub s: u128,
    pub d0: i128,
}

fn add_mod(a: u128, b: u128, n: u128) -> u128 {
    if a >= n - b {
        a - (n - b)
    } else {
        a + b
    }
}

/// `a·b mod n` for `a, b < n`.
pub fn mul_mod(a: u128, b: u128, n: u128) -> u128 {
    if n <= u64::MAX as u128 {
        return (a * b) % n;
    }
    // Double-and-add; only reached for moduli above 2^64.
    let (mut x, mut y) = if a < b { (b, a) } else { (a, b) };
    let mut acc = 0u128;
    while y > 0 {
        if y & 1 == 1 {
            acc = add_mod(acc, x, n);
        }
        x = add_mod(x, x, n);
        y >>= 1;
    }
    acc
}

pub fn pow_mod(mut base: u128, mut exp: u128, n: u128) -> u128 {
    if n == 1 {
        return 0;
    }
    let mut acc = 1u128;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        exp >>= 1;
    }
    acc
}

fn miller_rabin_round(n: u128, d: u128, r: u32, base: u128) -> bool {
    let a = base % n;
    if a == 0 {
        return true;
    }
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..r {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

pub fn primality(n: u128) -> Primality {
    if n < 2 {
        return Primality::Composite;
    }
    for &p in DETERMINISTIC_BASES.iter() {
        if n == p {
            return Primality::Prime;
        }
        if n.is_multiple_of(p) {
            return Primality::Composite;
        }
    }
    let r = (n - 1).trailing_zeros();
    let d = (n - 1) >> r;
    if !DETERMINISTIC_BASES
        .iter()
        .all(|&b| miller_rabin_round(n, d, r, b))
    {
        return Primality::Composite;
    }
    if n < DETERMINISTIC_PRIMALITY_LIMIT {
        return Primality::Prime;
    }
    if EXTRA_BASES.iter().all(|&b| miller_rabin_round(n, d, r, b)) {
        Primality::ProbablePrime
    } else {
        Primality::Composite
    }
}

pub fn is_prime(n: u128) -> bool {
    primality(n).is_prime()
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    a.gcd(&b)
}

/// Brent's variant of Pollard rho with polynomial `x² + c`. Returns a
/// non-trivial factor, or `None` when this `c` cycles without one.
fn pollard_brent(n: u128, c: u128) -> Option<u128> {
    const BATCH: u32 = 128;
    let f = |x: u128| add_mod(mul_mod(x, x, n), c % n, n);
    let mut y = 2 % n;
    let mut r: u64 = 1;
    let mut q = 1u128;
    let mut g = 1u128;
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0u64;
        while k < r && g == 1 {
            ys = y;
            let steps = core::cmp::min(BATCH as u64, r - k);
            for _ in 0..steps {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd_u128(q, n);
            k += steps;
        }
        r *= 2;
        if r > 1 << 40 {
            return None;
        }
    }
    if g == n {
        // Batch overshot; step back one at a time.
        loop {
            ys = f(ys);
            g = gcd_u128(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    if g == n {
        None
    } else {
        Some(g)
    }
}

fn split_composite(n: u128, out: &mut Vec<u128>, probabilistic: &mut bool) {
    if n == 1 {
        return;
    }
    match primality(n) {
        Primality::Prime => {
            out.push(n);
            return;
        }
        Primality::ProbablePrime => {
            *probabilistic = true;
            out.push(n);
            return;
        }
        Primality::Composite => {}
    }
    // Perfect squares are split directly.
    let root = n.sqrt();
    if root * root == n {
        split_composite(root, out, probabilistic);
        split_composite(root, out, probabilistic);
        return;
    }
    // Deterministic retry seeds.
    for c in 1u128.. {
        if let Some(d) = pollard_brent(n, c) {
            split_composite(d, out, probabilistic);
            split_composite(n / d, out, probabilistic);
            return;
        }
    }
}

/// Prime factorization of `n ≥ 1`; `factorize(1)` is the empty product.
pub fn factorize(n: u128) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut primes = Vec::new();
    let mut rest = n;
    let mut probabilistic = false;

    for p in [2u128, 3] {
        while rest.is_multiple_of(p) {
            primes.push(p);
            rest /= p;
        }
    }
    let mut p = 5u128;
    let mut step = 2u128;
    while p <= TRIAL_DIVISION_BOUND && p * p <= rest {
        if rest <= u64::MAX as u128 {
            let (r, q) = (rest as u64, p as u64);
            if r % q == 0 {
                primes.push(p);
                rest = (r / q) as u128;
                continue;
            }
        } else if rest.is_multiple_of(p) {
            primes.push(p);
            rest /= p;
            continue;
        }
        p += step;
        step = 6 - step;
    }
    if rest > 1 {
        if p * p > rest {
            primes.push(rest);
        } else {
            split_composite(rest, &mut primes, &mut probabilistic);
        }
    }
    primes.sort_unstable();

    let mut factors: Vec<(u128, u32)> = Vec::new();
    for q in primes {
        match factors.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => factors.push((q, 1)),
        }
    }
    Factorization {
        value: n,
        factors,
        probabilistic,
    }
}

/// Number of distinct prime divisors of `m`.
pub fn omega(m: u128) -> u32 {
    factorize(m).omega()
}

/// True iff no prime square divides `|n|`. Zero is not square-free.
pub fn is_squarefree(n: i128) -> bool {
    if n == 0 {
        return false;
    }
    factorize(n.unsigned_abs())
        .factors
        .iter()
        .all(|&(_, e)| e == 1)
}

pub fn squarefree_decompose(n: i128) -> Result<SquarefreeDecomposition> {
    if n == 0 {
        return Err(Error::domain("square-free decomposition of 0"));
    }
    let fac = factorize(n.unsigned_abs());
    let mut s = 1u128;
    let mut core = 1u128;
    for &(p, e) in &fac.factors {
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            core *= p;
        }
    }
    let d0 = if n < 0 { -(core as i128) } else { core as i128 };
    Ok(SquarefreeDecomposition { value: n, s, d0 })
}

pub fn isqrt(n: u128) -> u128 {
    n.sqrt()
}

/// Nonnegative square root of `n` when `n` is a perfect square.
pub fn is_perfect_square(n: i128) -> Option<u128> {
    if n < 0 {
        return None;
    }
    let n = n as u128;
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

pub fn is_perfect_square_big(n: &BigInt) -> Option<BigUint> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let n = n.magnitude();
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// A square root of `a` modulo the odd prime `p` (Tonelli-Shanks), if `a`
/// is a quadratic residue or zero.
pub fn sqrt_mod_prime(a: u128, p: u128) -> Option<u128> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2u128;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1u128 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// `(F_n, F_{n+1})` by fast doubling.
fn fib_pair(n: u64) -> (BigUint, BigUint) {
    if n == 0 {
        return (BigUint::zero(), BigUint::one());
    }
    let (a, b) = fib_pair(n / 2);
    let two_b = &b << 1usize;
    let c = &a * (&two_b - &a);
    let d = &a * &a + &b * &b;
    if n.is_multiple_of(2) {
        (c, d)
    } else {
        let e = &c + &d;
        (d, e)
    }
}

/// `F_0 = 0, F_1 = 1, F_i = F_{i-1} + F_{i-2}`.
pub fn fibonacci(i: u64) -> BigUint {
    fib_pair(i).0
}

/// `(L_n, L_{n+1})` by doubling on the Lucas numbers directly:
/// `L_2k = L_k² - 2(-1)^k`, `L_{2k+1} = L_k L_{k+1} - (-1)^k`.
fn lucas_pair(n: u64) -> (BigInt, BigInt) {
    if n == 0 {
        return (BigInt::from(2), BigInt::one());
    }
    let k = n / 2;
    let (lk, lk1) = lucas_pair(k);
    let sign = if k.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    let l2k = &lk * &lk - &sign * 2;
    let l2k1 = &lk * &lk1 - &sign;
    if n.is_multiple_of(2) {
        (l2k, l2k1)
    } else {
        // L_{2k+2} = L_{k+1}² - 2(-1)^{k+1}
        let l2k2 = &lk1 * &lk1 + &sign * 2;
        (l2k1, l2k2)
    }
}

/// `L_0 = 2, L_1 = 1, L_i = L_{i-1} + L_{i-2}`.
pub fn lucas(i: u64) -> BigUint {
    lucas_pair(i)
        .0
        .to_biguint()
        .expect("Lucas numbers are positive")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn trial_is_prime(n: u128) -> bool {
        n >= 2
            && (2..)
                .take_while(|d| d * d <= n)
                .all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12).factors, vec![(2, 2), (3, 1)]);
        assert!(factorize(1).factors.is_empty());
        assert_eq!(factorize(4373).factors, vec![(4373, 1)]);
        assert!(trial_is_prime(4373));
    }

    #[test]
    fn factorize_past_trial_division() {
        // Two primes above the trial-division bound.
        let p = 1_000_003u128;
        let q = 998_244_353u128;
        assert_eq!(factorize(p * q).factors, vec![(p, 1), (q, 1)]);
        assert_eq!(factorize(p * p * q).factors, vec![(p, 2), (q, 1)]);
        // 2^61 - 1 and 2^31 - 1, product above 2^64.
        let m61 = (1u128 << 61) - 1;
        let m31 = (1u128 << 31) - 1;
        let f = factorize(m61 * m31 * 7);
        assert_eq!(f.factors, vec![(7, 1), (m31, 1), (m61, 1)]);
        assert!(!f.probabilistic);
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(7));
        assert!(!is_prime(1));
        assert!(is_prime(4373));
        assert!(!is_prime(561));
        assert!(is_prime((1u128 << 89) - 1));
        assert!(!is_prime((1u128 << 67) - 1));
        assert_eq!(primality((1u128 << 61) - 1), Primality::Prime);
        assert_eq!(primality((1u128 << 127) - 1), Primality::ProbablePrime);
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0..20_000u128 {
            assert_eq!(is_prime(n), trial_is_prime(n), "n = {n}");
        }
    }

    #[test]
    fn squarefree_examples() {
        assert!(is_squarefree(-53));
        assert!(!is_squarefree(45));
        assert!(is_squarefree(1));
        let sd = squarefree_decompose(-45).unwrap();
        assert_eq!((sd.s, sd.d0), (3, -5));
        let sd = squarefree_decompose(-53).unwrap();
        assert_eq!((sd.s, sd.d0), (1, -53));
        let sd = squarefree_decompose(1).unwrap();
        assert_eq!((sd.s, sd.d0), (1, 1));
        assert!(squarefree_decompose(0).is_err());
    }

    #[test]
    fn perfect_squares() {
        assert_eq!(is_perfect_square(49), Some(7));
        assert_eq!(is_perfect_square(48), None);
        assert_eq!(is_perfect_square(0), Some(0));
        assert_eq!(is_perfect_square(-4), None);
        for r in 0..=100_000u128 {
            assert_eq!(is_perfect_square((r * r) as i128), Some(r));
        }
        let big: BigInt = BigInt::from(10u32).pow(40u32) + 1;
        assert_eq!(is_perfect_square_big(&(&big * &big)), big.to_biguint());
        assert_eq!(is_perfect_square_big(&(&big * &big + 1)), None);
    }

    #[test]
    fn fibonacci_and_lucas() {
        assert_eq!(fibonacci(0), BigUint::zero());
        assert_eq!(fibonacci(1), BigUint::one());
        assert_eq!(fibonacci(10), BigUint::from(55u32));
        assert_eq!(lucas(0), BigUint::from(2u32));
        assert_eq!(lucas(1), BigUint::one());
        assert_eq!(lucas(4), BigUint::from(7u32));
        // Recurrences unrolled step by step.
        let (mut f0, mut f1) = (BigUint::zero(), BigUint::one());
        let (mut l0, mut l1) = (BigUint::from(2u32), BigUint::one());
        for i in 0..200u64 {
            assert_eq!(fibonacci(i), f0);
            assert_eq!(lucas(i), l0);
            let f2 = &f0 + &f1;
            f0 = core::mem::replace(&mut f1, f2);
            let l2 = &l0 + &l1;
            l0 = core::mem::replace(&mut l1, l2);
        }
    }

    #[test]
    fn lucas_fibonacci_cross_identity() {
        for i in 1..=40u64 {
            assert_eq!(lucas(i), fibonacci(i - 1) + fibonacci(i + 1));
        }
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(12), 2);
        assert_eq!(omega(9), 1);
        assert_eq!(omega(105), 3);
    }

    #[test]
    fn tonelli_shanks() {
        for p in [3u128, 5, 13, 17, 41, 97, 65537, 998_244_353] {
            for a in 0..60u128 {
                match sqrt_mod_prime(a, p) {
                    Some(r) => assert_eq!(mul_mod(r, r, p), a % p),
                    None => assert_eq!(pow_mod(a, (p - 1) / 2, p), p - 1),
                }
            }
        }
    }

    #[test]
    fn divisors_of_factorization() {
        assert_eq!(factorize(12).divisors(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(factorize(1).divisors(), vec![1]);
    }
}
