//! Positive definite binary quadratic forms `ax² + bxy + cy²` of negative
//! discriminant, standing in for ideal classes of imaginary quadratic orders.
//!
//! A form is *reduced* when `|b| ≤ a ≤ c` and `b ≥ 0` whenever `|b| = a` or
//! `a = c`. Every class contains exactly one reduced form, so the class number
//! `h(D)` is the number of primitive reduced forms of discriminant `D`.

use alloc::vec::Vec;
use core::fmt;
use core::ops::RangeInclusive;

use num_integer::{Integer, Roots};

use crate::integers::{self, is_prime};
use crate::{Error, Result};

/// Default bound on `|D|` for exhaustive enumeration.
pub const DEFAULT_DISC_CAP: u64 = 120_000_000;

/// A negative integer congruent to 0 or 1 modulo 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(d: i64) -> Result<Self> {
        if d >= 0 {
            return Err(Error::domain(alloc::format!(
                "discriminant {d} is not negative"
            )));
        }
        match d.rem_euclid(4) {
            0 | 1 => Ok(Discriminant(d)),
            r => Err(Error::domain(alloc::format!(
                "discriminant {d} is {r} mod 4"
            ))),
        }
    }

    pub fn get(self) -> i64 {
        self.0
    }

    pub fn abs(self) -> u64 {
        self.0.unsigned_abs()
    }

    /// Largest `b` a reduced form of this discriminant can have.
    pub fn max_reduced_b(self) -> u64 {
        (self.abs() / 3).sqrt()
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Discriminant of the maximal order of `Q(sqrt(d0))` for square-free `d0 < 0`.
pub fn fundamental_discriminant(d0: i128) -> Result<Discriminant> {
    if d0 >= 0 {
        return Err(Error::domain(alloc::format!("d0 = {d0} is not negative")));
    }
    if !integers::is_squarefree(d0) {
        return Err(Error::domain(alloc::format!(
            "d0 = {d0} is not square-free"
        )));
    }
    let d = if d0.rem_euclid(4) == 1 { d0 } else { 4 * d0 };
    let d = i64::try_from(d).map_err(|_| Error::Overflow("fundamental discriminant"))?;
    Discriminant::new(d)
}

/// A primitive positive definite form `(a, b, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuadForm {
    a: i64,
    b: i64,
    c: i64,
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        let f = QuadForm { a, b, c };
        if a <= 0 || c <= 0 {
            return Err(Error::domain(alloc::format!(
                "{f} is not positive definite"
            )));
        }
        let d = f.raw_discriminant();
        if d >= 0 {
            return Err(Error::domain(alloc::format!(
                "{f} has discriminant {d} >= 0"
            )));
        }
        if a.gcd(&b).gcd(&c) != 1 {
            return Err(Error::domain(alloc::format!("{f} is not primitive")));
        }
        i64::try_from(d).map_err(|_| Error::Overflow("form discriminant"))?;
        Ok(f)
    }

    fn from_wide(a: i128, b: i128, c: i128) -> Result<Self> {
        let narrow = |x: i128| i64::try_from(x).map_err(|_| Error::Overflow("form coefficient"));
        Ok(QuadForm {
            a: narrow(a)?,
            b: narrow(b)?,
            c: narrow(c)?,
        })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    fn raw_discriminant(&self) -> i128 {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        b * b - 4 * a * c
    }

    pub fn discriminant(&self) -> Discriminant {
        Discriminant(self.raw_discriminant() as i64)
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    /// The reduced form in the same class.
    pub fn reduce(&self) -> QuadForm {
        let (a, b, c) = reduce_wide(self.a as i128, self.b as i128, self.c as i128);
        // Reduced coefficients are bounded by |D|.
        QuadForm::from_wide(a, b, c).expect("reduced coefficients fit")
    }

    /// `(a, -b, c)`, reduced.
    pub fn inverse(&self) -> QuadForm {
        QuadForm {
            a: self.a,
            b: -self.b,
            c: self.c,
        }
        .reduce()
    }

    pub fn is_principal(&self) -> bool {
        self.reduce().a == 1
    }
}

/// Brings `b` into `(-a, a]` by `x -> x + ry`.
fn normalize_wide(a: i128, b: i128, c: i128) -> (i128, i128, i128) {
    if -a < b && b <= a {
        return (a, b, c);
    }
    let r = (a - b).div_euclid(2 * a);
    let b2 = b + 2 * r * a;
    let c2 = a * r * r + b * r + c;
    (a, b2, c2)
}

fn reduce_wide(a: i128, b: i128, c: i128) -> (i128, i128, i128) {
    let (mut a, mut b, mut c) = normalize_wide(a, b, c);
    while a > c {
        (a, b, c) = normalize_wide(c, -b, a);
    }
    if a == c && b < 0 {
        b = -b;
    }
    (a, b, c)
}

/// `(1, 0, -D/4)` or `(1, 1, (1-D)/4)`.
pub fn principal_form(d: Discriminant) -> QuadForm {
    let d = d.get();
    if d.rem_euclid(4) == 0 {
        QuadForm {
            a: 1,
            b: 0,
            c: -d / 4,
        }
    } else {
        QuadForm {
            a: 1,
            b: 1,
            c: (1 - d) / 4,
        }
    }
}

/// Extended Euclid: `(g, x, y)` with `x·a + y·b = g = gcd(a, b) ≥ 0`.
fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

/// Dirichlet composition of two forms of the same discriminant, without the
/// final reduction. For coprime first coefficients the result has
/// `a = f.a · g.a`.
pub fn compose_unreduced(f: &QuadForm, g: &QuadForm) -> Result<QuadForm> {
    let (df, dg) = (f.discriminant(), g.discriminant());
    if df != dg {
        return Err(Error::DiscriminantMismatch {
            left: df.get(),
            right: dg.get(),
        });
    }
    let (f, g) = if f.a > g.a { (g, f) } else { (f, g) };
    let (a1, b1) = (f.a as i128, f.b as i128);
    let (a2, b2, c2) = (g.a as i128, g.b as i128, g.c as i128);

    let s = (b1 + b2) / 2;
    let n = b2 - s;
    let (d, y1) = if a2 % a1 == 0 {
        (a1, 0)
    } else {
        let (d, u, _) = xgcd(a2, a1);
        (d, u)
    };
    let (d1, x2, y2) = if s % d == 0 {
        (d, 0, -1)
    } else {
        let (d1, x2, y2) = xgcd(s, d);
        (d1, x2, -y2)
    };
    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
    let b3 = b2 + 2 * v2 * r;
    let a3 = v1 * v2;
    let c3 = (c2 * d1 + r * (b2 + v2 * r)) / v1;
    debug_assert_eq!(b3 * b3 - 4 * a3 * c3, df.get() as i128);
    QuadForm::from_wide(a3, b3, c3)
}

/// Reduced representative of the product class.
pub fn compose(f: &QuadForm, g: &QuadForm) -> Result<QuadForm> {
    let (df, dg) = (f.discriminant(), g.discriminant());
    if df != dg {
        return Err(Error::DiscriminantMismatch {
            left: df.get(),
            right: dg.get(),
        });
    }
    let f = f.reduce();
    let g = g.reduce();
    Ok(compose_unreduced(&f, &g)?.reduce())
}

/// Same-discriminant composition; callers guarantee matching discriminants.
fn mul(f: &QuadForm, g: &QuadForm) -> QuadForm {
    compose(f, g).expect("forms of one discriminant")
}

/// `f^n` by square-and-multiply, reduced. `f^0` is the principal form.
pub fn pow(f: &QuadForm, mut n: u64) -> QuadForm {
    let mut acc = principal_form(f.discriminant());
    let mut base = f.reduce();
    while n > 0 {
        if n & 1 == 1 {
            acc = mul(&acc, &base);
        }
        n >>= 1;
        if n > 0 {
            base = mul(&base, &base);
        }
    }
    acc
}

/// Least `k ≥ 1` with `f^k` principal, by repeated composition.
pub fn order_in_class_group(f: &QuadForm) -> u64 {
    let base = f.reduce();
    let mut acc = base;
    let mut k = 1u64;
    while acc.a != 1 {
        acc = mul(&acc, &base);
        k += 1;
    }
    k
}

/// Kronecker symbol `(D / q)` for a prime `q`.
pub fn kronecker(d: Discriminant, q: u64) -> i8 {
    let d = d.get() as i128;
    if q == 2 {
        return match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    let q = q as u128;
    let r = d.rem_euclid(q as i128) as u128;
    if r == 0 {
        0
    } else if integers::pow_mod(r, (q - 1) / 2, q) == 1 {
        1
    } else {
        -1
    }
}

/// The form `(q, b, (b² - D)/4q)` with the least `0 ≤ b ≤ q` satisfying
/// `b² ≡ D (mod 4q)`; it corresponds to a prime ideal of norm `q`. The
/// conjugate ideal is its [`QuadForm::inverse`]. The form is not reduced.
pub fn prime_form(d: Discriminant, q: u64) -> Result<QuadForm> {
    if !is_prime(q as u128) {
        return Err(Error::domain(alloc::format!("{q} is not prime")));
    }
    if kronecker(d, q) == -1 {
        return Err(Error::InertPrime {
            discriminant: d.get(),
            prime: q,
        });
    }
    let dd = d.get() as i128;
    let q_wide = q as i128;
    let b = if q == 2 {
        (0..=2i128)
            .find(|b| (b * b - dd).rem_euclid(8) == 0)
            .expect("2 is split or ramified")
    } else {
        let r = integers::sqrt_mod_prime(dd.rem_euclid(q_wide) as u128, q as u128)
            .expect("non-inert prime has a square root") as i128;
        let parity = dd.rem_euclid(2);
        let (lo, hi) = if r <= q_wide - r {
            (r, q_wide - r)
        } else {
            (q_wide - r, r)
        };
        if lo.rem_euclid(2) == parity {
            lo
        } else {
            hi
        }
    };
    let c = (b * b - dd) / (4 * q_wide);
    debug_assert_eq!(b * b - 4 * q_wide * c, dd);
    let f = QuadForm::from_wide(q_wide, b, c)?;
    QuadForm::new(f.a, f.b, f.c)
}

/// Primitive reduced forms of discriminant `d` whose middle coefficient has
/// absolute value in `b_range`, sorted by `(a, b)`.
///
/// For each admissible `b ≥ 0` (same parity as `D`, `b ≤ sqrt(|D|/3)`) the
/// value `(b² - D)/4` is split as `a·c` with `b ≤ a ≤ c`; both signs of `b`
/// are kept except on the reduction boundary.
pub fn enumerate_b_range(d: Discriminant, b_range: RangeInclusive<u64>) -> Vec<QuadForm> {
    let mut forms = Vec::new();
    for_each_reduced(d, b_range, |f| forms.push(f));
    forms.sort_unstable_by_key(|f| (f.a, f.b));
    forms
}

/// Count of primitive reduced forms with `|b|` in `b_range`.
pub fn count_b_range(d: Discriminant, b_range: RangeInclusive<u64>) -> u64 {
    let mut h = 0u64;
    for_each_reduced(d, b_range, |_| h += 1);
    h
}

fn for_each_reduced(d: Discriminant, b_range: RangeInclusive<u64>, mut emit: impl FnMut(QuadForm)) {
    let abs_d = d.abs();
    let parity = abs_d % 2;
    let b_max = core::cmp::min(*b_range.end(), d.max_reduced_b());
    let mut b = *b_range.start();
    if b % 2 != parity {
        b += 1;
    }
    while b <= b_max {
        let n = (b * b + abs_d) / 4;
        let a_max = n.sqrt();
        let a_min = core::cmp::max(b, 1);
        for a in a_min..=a_max {
            if !n.is_multiple_of(a) {
                continue;
            }
            let c = n / a;
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            let (ai, bi, ci) = (a as i64, b as i64, c as i64);
            emit(QuadForm {
                a: ai,
                b: bi,
                c: ci,
            });
            if b > 0 && b < a && a < c {
                emit(QuadForm {
                    a: ai,
                    b: -bi,
                    c: ci,
                });
            }
        }
        b += 2;
    }
}

fn check_cap(d: Discriminant, cap: u64) -> Result<()> {
    if d.abs() > cap {
        Err(Error::CapExceeded {
            discriminant: d.get(),
            cap,
        })
    } else {
        Ok(())
    }
}

/// The full set of reduced forms of discriminant `d`.
pub fn enumerate_reduced(d: Discriminant, cap: u64) -> Result<ClassGroup> {
    check_cap(d, cap)?;
    Ok(ClassGroup::from_sorted_forms(
        d,
        enumerate_b_range(d, 0..=d.max_reduced_b()),
    ))
}

/// `h(D)` without materializing the form list.
pub fn class_number(d: Discriminant, cap: u64) -> Result<u64> {
    check_cap(d, cap)?;
    Ok(count_b_range(d, 0..=d.max_reduced_b()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassGroup {
    discriminant: Discriminant,
    forms: Vec<QuadForm>,
}

impl ClassGroup {
    /// Assembles a group from forms already sorted by `(a, b)`, e.g. merged
    /// from several [`enumerate_b_range`] calls.
    pub fn from_sorted_forms(discriminant: Discriminant, forms: Vec<QuadForm>) -> Self {
        debug_assert!(forms
            .windows(2)
            .all(|w| (w[0].a, w[0].b) < (w[1].a, w[1].b)));
        ClassGroup {
            discriminant,
            forms,
        }
    }

    pub fn discriminant(&self) -> Discriminant {
        self.discriminant
    }

    pub fn h(&self) -> u64 {
        self.forms.len() as u64
    }

    pub fn forms(&self) -> &[QuadForm] {
        &self.forms
    }

    pub fn principal(&self) -> QuadForm {
        principal_form(self.discriminant)
    }

    pub fn contains(&self, f: &QuadForm) -> bool {
        self.forms
            .binary_search_by_key(&(f.a, f.b), |g| (g.a, g.b))
            .is_ok()
    }

    /// Some element of exact order `k`, if the group has one.
    pub fn element_of_order(&self, k: u64) -> Option<QuadForm> {
        if k == 0 || !self.h().is_multiple_of(k) {
            return None;
        }
        let prime_divisors: Vec<u64> = integers::factorize(k as u128)
            .primes()
            .map(|p| p as u64)
            .collect();
        self.forms
            .iter()
            .copied()
            .find(|f| pow(f, k).a == 1 && prime_divisors.iter().all(|&p| pow(f, k / p).a != 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(d: i64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    fn form(a: i64, b: i64, c: i64) -> QuadForm {
        QuadForm::new(a, b, c).unwrap()
    }

    #[test]
    fn discriminant_validation() {
        assert!(Discriminant::new(0).is_err());
        assert!(Discriminant::new(5).is_err());
        assert!(Discriminant::new(-6).is_err());
        assert!(Discriminant::new(-5).is_err());
        assert!(Discriminant::new(-3).is_ok());
        assert!(Discriminant::new(-4).is_ok());
    }

    #[test]
    fn fundamental_discriminants() {
        assert_eq!(fundamental_discriminant(-53).unwrap().get(), -212);
        assert_eq!(fundamental_discriminant(-3).unwrap().get(), -3);
        assert_eq!(fundamental_discriminant(-5).unwrap().get(), -20);
        assert!(fundamental_discriminant(-12).is_err());
        assert!(fundamental_discriminant(7).is_err());
    }

    #[test]
    fn principal_forms() {
        assert_eq!(principal_form(disc(-4)), form(1, 0, 1));
        assert_eq!(principal_form(disc(-212)), form(1, 0, 53));
        assert_eq!(principal_form(disc(-163)), form(1, 1, 41));
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(form(1, 0, 53).reduce(), form(1, 0, 53));
        assert_eq!(form(53, 0, 1).reduce(), form(1, 0, 53));
        assert_eq!(form(2, -2, 27).reduce(), form(2, 2, 27));
        // (41, 1, 1) swaps to (1, -1, 41) then normalizes to (1, 1, 41).
        assert_eq!(form(41, 1, 1).reduce(), form(1, 1, 41));
        assert!(form(6, -2, 9).is_reduced());
        assert!(!form(2, -2, 27).is_reduced());
    }

    #[test]
    fn enumeration_examples() {
        let g = enumerate_reduced(disc(-163), DEFAULT_DISC_CAP).unwrap();
        assert_eq!(g.h(), 1);
        let g = enumerate_reduced(disc(-4), DEFAULT_DISC_CAP).unwrap();
        assert_eq!(g.forms(), &[form(1, 0, 1)]);
        let g = enumerate_reduced(disc(-212), DEFAULT_DISC_CAP).unwrap();
        assert_eq!(g.h(), 6);
        assert_eq!(
            g.forms(),
            &[
                form(1, 0, 53),
                form(2, 2, 27),
                form(3, -2, 18),
                form(3, 2, 18),
                form(6, -2, 9),
                form(6, 2, 9),
            ]
        );
        assert_eq!(class_number(disc(-212), DEFAULT_DISC_CAP).unwrap(), 6);
    }

    #[test]
    fn enumeration_respects_cap() {
        let err = enumerate_reduced(disc(-1_000_004), 1_000_000).unwrap_err();
        assert_eq!(
            err,
            Error::CapExceeded {
                discriminant: -1_000_004,
                cap: 1_000_000
            }
        );
    }

    #[test]
    fn non_primitive_forms_are_skipped() {
        // (3, 0, 3) has discriminant -36 but is not primitive.
        let g = enumerate_reduced(disc(-36), DEFAULT_DISC_CAP).unwrap();
        assert!(g.forms().iter().all(|f| f.a().gcd(&f.b()).gcd(&f.c()) == 1));
        assert_eq!(g.h(), 2);
    }

    #[test]
    fn composition_examples() {
        let d = disc(-212);
        let p = principal_form(d);
        let f = form(6, 2, 9);
        assert_eq!(compose(&p, &f).unwrap(), f);
        assert_eq!(compose(&form(2, 2, 27), &form(2, 2, 27)).unwrap(), p);
        assert_eq!(compose(&f, &f.inverse()).unwrap(), p);
        assert!(matches!(
            compose(&f, &form(1, 1, 41)),
            Err(Error::DiscriminantMismatch { .. })
        ));
    }

    #[test]
    fn composition_of_coprime_norms_multiplies_norms() {
        let d = disc(-212);
        let p2 = prime_form(d, 2).unwrap();
        let p3 = prime_form(d, 3).unwrap();
        let raw = compose_unreduced(&p2, &p3).unwrap();
        assert_eq!(raw.a(), 6);
        assert_eq!(raw.discriminant(), d);
        assert_eq!(raw.reduce(), form(6, 2, 9));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(form(1, 0, 53).inverse(), form(1, 0, 53));
        assert_eq!(form(6, 2, 9).inverse(), form(6, -2, 9).reduce());
        assert_eq!(form(2, 2, 27).inverse(), form(2, 2, 27));
    }

    #[test]
    fn order_examples() {
        assert_eq!(order_in_class_group(&principal_form(disc(-212))), 1);
        assert_eq!(order_in_class_group(&form(2, 2, 27)), 2);
        assert_eq!(order_in_class_group(&form(6, 2, 9)), 3);
        assert_eq!(order_in_class_group(&form(3, 2, 18)), 6);
        assert_eq!(pow(&form(6, 2, 9), 3), principal_form(disc(-212)));
    }

    #[test]
    fn prime_form_examples() {
        assert_eq!(prime_form(disc(-212), 2).unwrap(), form(2, 2, 27));
        assert_eq!(prime_form(disc(-212), 3).unwrap(), form(3, 2, 18));
        assert_eq!(prime_form(disc(-163), 41).unwrap(), form(41, 1, 1));
        // -212 ≡ 3 (mod 5) is a non-residue.
        assert_eq!(
            prime_form(disc(-212), 5),
            Err(Error::InertPrime {
                discriminant: -212,
                prime: 5
            })
        );
        assert!(prime_form(disc(-212), 9).is_err());
        // Split 2: D ≡ 1 (mod 8).
        assert_eq!(prime_form(disc(-7), 2).unwrap(), form(2, 1, 1));
        // Ramified odd prime with odd D picks b = q.
        assert_eq!(prime_form(disc(-15), 5).unwrap(), form(5, 5, 2));
    }

    #[test]
    fn kronecker_symbol() {
        assert_eq!(kronecker(disc(-212), 2), 0);
        assert_eq!(kronecker(disc(-212), 53), 0);
        assert_eq!(kronecker(disc(-212), 3), 1);
        assert_eq!(kronecker(disc(-212), 5), -1);
        assert_eq!(kronecker(disc(-7), 2), 1);
        assert_eq!(kronecker(disc(-3), 2), -1);
    }

    #[test]
    fn element_of_given_order() {
        let g = enumerate_reduced(disc(-212), DEFAULT_DISC_CAP).unwrap();
        assert_eq!(order_in_class_group(&g.element_of_order(3).unwrap()), 3);
        assert_eq!(order_in_class_group(&g.element_of_order(6).unwrap()), 6);
        assert_eq!(g.element_of_order(4), None);
        assert!(g.contains(&form(6, -2, 9)));
        assert!(!g.contains(&form(2, -2, 27)));
    }
}
