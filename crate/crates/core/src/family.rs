//! The fields `Q(sqrt(1 - 2m^t))` for odd `m, t ≥ 3`, the explicit class of
//! order `p` built from the primes above `2m`, and the auxiliary fields used
//! by the consecutive-pair `d, d+1` and `Q(sqrt(1 - 4U^k))` checks.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::cell::RefCell;

use num_bigint::BigInt;
use num_traits::{One, Pow};

use crate::integers::{factorize, is_prime, is_squarefree, squarefree_decompose};
use crate::pthpower::{family_radicand, is_special_pth_power};
use crate::quadforms::{
    self, compose, compose_unreduced, fundamental_discriminant, order_in_class_group, pow,
    prime_form, Discriminant, QuadForm,
};
use crate::{Error, Result};

/// `Q(sqrt(radicand))` for a negative radicand: `radicand = s²·d0`, and the
/// fundamental discriminant of `d0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticField {
    pub radicand: i128,
    pub s: u128,
    pub d0: i128,
    pub disc: Discriminant,
}

impl QuadraticField {
    pub fn from_radicand(radicand: i128) -> Result<Self> {
        if radicand >= 0 {
            return Err(Error::domain(alloc::format!(
                "radicand {radicand} is not negative"
            )));
        }
        let sd = squarefree_decompose(radicand)?;
        Ok(QuadraticField {
            radicand,
            s: sd.s,
            d0: sd.d0,
            disc: fundamental_discriminant(sd.d0)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyPoint {
    pub m: u64,
    pub t: u32,
    pub field: QuadraticField,
    /// Filled in by [`class_number`].
    pub h: Option<u64>,
}

impl FamilyPoint {
    /// `1 - 2m^t`.
    pub fn d(&self) -> i128 {
        self.field.radicand
    }

    pub fn s(&self) -> u128 {
        self.field.s
    }

    pub fn d0(&self) -> i128 {
        self.field.d0
    }

    pub fn disc(&self) -> Discriminant {
        self.field.disc
    }
}

fn check_odd_at_least_three(name: &str, v: u64) -> Result<()> {
    if v < 3 || v.is_multiple_of(2) {
        Err(Error::domain(alloc::format!(
            "{name} = {v} must be odd and at least 3"
        )))
    } else {
        Ok(())
    }
}

pub fn make_family_point(m: u64, t: u32) -> Result<FamilyPoint> {
    check_odd_at_least_three("m", m)?;
    check_odd_at_least_three("t", t as u64)?;
    let field = QuadraticField::from_radicand(family_radicand(m, t)?)?;
    // 1 - 2m^t ≡ 3 (mod 4) and s is odd, so d0 ≡ 3 (mod 4) as well.
    if field.radicand.rem_euclid(4) != 3 || field.d0.rem_euclid(4) != 3 || field.d0 == -1 {
        return Err(Error::domain(alloc::format!(
            "family point (m={m}, t={t}) violates d ≡ d0 ≡ 3 (mod 4), d0 ≠ -1"
        )));
    }
    debug_assert_eq!(field.disc.get() as i128, 4 * field.d0);
    Ok(FamilyPoint {
        m,
        t,
        field,
        h: None,
    })
}

/// Class numbers keyed by discriminant. Methods take `&self` so that
/// implementations can be shared between threads behind a lock.
pub trait ClassNumberCache {
    fn get(&self, disc: Discriminant) -> Option<u64>;
    fn put(&self, disc: Discriminant, h: u64);
}

/// Single-threaded in-memory cache.
#[derive(Debug, Default)]
pub struct MemoryCache {
    map: RefCell<BTreeMap<i64, u64>>,
}

impl MemoryCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.borrow().is_empty()
    }
}

impl ClassNumberCache for MemoryCache {
    fn get(&self, disc: Discriminant) -> Option<u64> {
        self.map.borrow().get(&disc.get()).copied()
    }

    fn put(&self, disc: Discriminant, h: u64) {
        self.map.borrow_mut().insert(disc.get(), h);
    }
}

/// `h(D)`, served from `cache` when present.
pub fn class_number_of<C: ClassNumberCache + ?Sized>(
    disc: Discriminant,
    cache: &C,
    cap: u64,
) -> Result<u64> {
    if let Some(h) = cache.get(disc) {
        return Ok(h);
    }
    let h = quadforms::class_number(disc, cap)?;
    cache.put(disc, h);
    Ok(h)
}

/// Class number of the point's field; stores it on the point.
pub fn class_number<C: ClassNumberCache + ?Sized>(
    point: &mut FamilyPoint,
    cache: &C,
    cap: u64,
) -> Result<u64> {
    if let Some(h) = point.h {
        return Ok(h);
    }
    let h = class_number_of(point.disc(), cache, cap)?;
    point.h = Some(h);
    Ok(h)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisibilityOutcome {
    pub t: u64,
    pub h: u64,
    /// `(p, p | h)` for each prime `p | t`.
    pub prime_divisors: Vec<(u64, bool)>,
}

impl DivisibilityOutcome {
    pub fn new(t: u64, h: u64) -> Self {
        let prime_divisors = factorize(t as u128)
            .primes()
            .map(|p| (p as u64, h.is_multiple_of(p as u64)))
            .collect();
        DivisibilityOutcome {
            t,
            h,
            prime_divisors,
        }
    }

    /// Every prime divisor of `t` divides `h`; for square-free `t` this is `t | h`.
    pub fn holds(&self) -> bool {
        self.prime_divisors.iter().all(|&(_, ok)| ok)
    }

    pub fn t_divides_h(&self) -> bool {
        self.h.is_multiple_of(self.t)
    }
}

pub fn divisibility_check<C: ClassNumberCache + ?Sized>(
    point: &mut FamilyPoint,
    cache: &C,
    cap: u64,
) -> Result<DivisibilityOutcome> {
    let h = class_number(point, cache, cap)?;
    Ok(DivisibilityOutcome::new(point.t as u64, h))
}

/// A certified class of order `p` in the class group of a family point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderPClass {
    /// Reduced representative.
    pub form: QuadForm,
    /// Product of the prime forms before any reduction; its first coefficient
    /// is the ideal norm `2m`.
    pub unreduced: QuadForm,
    pub order: u64,
    /// `(p_i, r_i)` with `m = ∏ p_i^r_i`.
    pub prime_powers: Vec<(u64, u32)>,
    /// Per `p_i`: true when the conjugate prime form was used.
    pub conjugated: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderPOutcome {
    Certified(OrderPClass),
    /// No orientation gave a class whose p-th power is principal.
    Counterexample {
        orientations_tried: u64,
    },
}

fn conjugate_unreduced(f: &QuadForm) -> QuadForm {
    QuadForm::new(f.a(), -f.b(), f.c()).expect("conjugate of a valid form")
}

/// Builds `J = P·∏ Q_i^{r_i}` from the prime form above 2 and prime forms
/// above the primes of `m`, trying each conjugate orientation until `J^p` is
/// principal, then certifies the order of `J` by repeated composition.
pub fn construct_order_p_class(point: &FamilyPoint) -> Result<OrderPOutcome> {
    let p = point.t;
    if !is_prime(p as u128) {
        return Err(Error::domain(alloc::format!("t = {p} is not prime")));
    }
    if is_special_pth_power(point.m, p)?.is_pth_power {
        return Err(Error::domain(alloc::format!(
            "±2^((p-1)/2)·α is a {p}-th power for m = {}",
            point.m
        )));
    }
    let disc = point.disc();
    let ramified = prime_form(disc, 2)?;
    let prime_powers: Vec<(u64, u32)> = factorize(point.m as u128)
        .factors
        .iter()
        .map(|&(q, e)| (q as u64, e))
        .collect();
    let split: Vec<QuadForm> = prime_powers
        .iter()
        .map(|&(q, _)| prime_form(disc, q))
        .collect::<Result<_>>()?;

    let n = prime_powers.len();
    let orientations = 1u64 << n;
    for mask in 0..orientations {
        let conjugated: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let mut unreduced = ramified;
        let mut reduced = ramified.reduce();
        for ((q_form, &(_, r)), &conj) in split.iter().zip(&prime_powers).zip(&conjugated) {
            let q_form = if conj {
                conjugate_unreduced(q_form)
            } else {
                *q_form
            };
            for _ in 0..r {
                unreduced = compose_unreduced(&unreduced, &q_form)?;
            }
            reduced = compose(&reduced, &pow(&q_form, r as u64))?;
        }
        debug_assert_eq!(unreduced.reduce(), reduced);
        if reduced.is_principal() || !pow(&reduced, p as u64).is_principal() {
            continue;
        }
        let order = order_in_class_group(&reduced);
        return Ok(OrderPOutcome::Certified(OrderPClass {
            form: reduced,
            unreduced,
            order,
            prime_powers,
            conjugated,
        }));
    }
    Ok(OrderPOutcome::Counterexample {
        orientations_tried: orientations,
    })
}

/// `d = 4(1 - 2m^t)^t` and `d + 1 = 1 - 4U^t` with `U = 2m^t - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IizukaPair {
    pub m: u64,
    pub t: u32,
    pub u: BigInt,
    pub d: BigInt,
    pub d_plus_1: BigInt,
    pub first: QuadraticField,
    pub second: QuadraticField,
}

pub fn iizuka_pair(m: u64, t: u32) -> Result<IizukaPair> {
    check_odd_at_least_three("m", m)?;
    check_odd_at_least_three("t", t as u64)?;
    if !is_squarefree(t as i128) {
        return Err(Error::domain(alloc::format!("t = {t} is not square-free")));
    }
    let base = family_radicand(m, t)?;
    // U = 2m^t - 1 = -(1 - 2m^t)
    let u = BigInt::from(-base);
    let d = BigInt::from(4) * Pow::pow(BigInt::from(base), t);
    let d_plus_1 = &d + 1;
    let other = BigInt::one() - BigInt::from(4) * Pow::pow(u.clone(), t);
    if d_plus_1 != other {
        return Err(Error::domain("4(1-2m^t)^t + 1 != 1 - 4U^t"));
    }
    // Q(sqrt(d)) is Q(sqrt(1 - 2m^t)) since t is odd; use d itself when it fits.
    let first = match i128::try_from(&d) {
        Ok(d) => QuadraticField::from_radicand(d)?,
        Err(_) => QuadraticField::from_radicand(base)?,
    };
    let second = i128::try_from(&d_plus_1)
        .map_err(|_| Error::Overflow("4(1-2m^t)^t + 1"))
        .and_then(QuadraticField::from_radicand)?;
    Ok(IizukaPair {
        m,
        t,
        u,
        d,
        d_plus_1,
        first,
        second,
    })
}

/// `Q(sqrt(1 - 4U^k))`.
pub fn louboutin_point(u: u64, k: u32) -> Result<QuadraticField> {
    if u < 2 {
        return Err(Error::domain(alloc::format!("U = {u} is less than 2")));
    }
    check_odd_at_least_three("k", k as u64)?;
    let d = (u as i128)
        .checked_pow(k)
        .and_then(|x| x.checked_mul(4))
        .map(|x| 1 - x)
        .ok_or(Error::Overflow("1 - 4U^k"))?;
    QuadraticField::from_radicand(d)
}

/// Distinct square-free parts among the points `(m, t)`, `t ∈ exponents`.
pub fn distinct_fields_count(m: u64, exponents: &[u32]) -> Result<usize> {
    let mut seen = BTreeSet::new();
    for &t in exponents {
        seen.insert(make_family_point(m, t)?.d0());
    }
    Ok(seen.len())
}
