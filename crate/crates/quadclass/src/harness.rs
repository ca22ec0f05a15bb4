//! Runs each claim over a parameter grid and collects a [`TheoremReport`].

use std::fmt;
use std::str::FromStr;

use quadclass_core::diophantine::{self, AuditStatus, BsInstance, S_TABLE};
use quadclass_core::family::{self, DivisibilityOutcome, FamilyPoint, QuadraticField};
use quadclass_core::integers::{factorize, is_prime, is_squarefree};
use quadclass_core::pthpower;
use quadclass_core::quadforms::DEFAULT_DISC_CAP;
use rayon::prelude::*;
use serde::Serialize;

use crate::cache::ClassCache;
use crate::enumerate;
use crate::report::{Case, Evidence, Params, TheoremReport};

/// Radicands larger than this are not factored unless `4|d|` is within the
/// discriminant cap anyway; Pollard rho on a 10^38 semiprime is not desk scale.
pub const FACTOR_BUDGET: u128 = 1_000_000_000_000_000_000_000_000_000_000;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] quadclass_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Caps {
    /// Largest `|D|` enumerated.
    pub disc_cap: u64,
    /// Window for exponents in the Diophantine audits.
    pub y_max: u32,
    /// Largest prime allowed to divide an exponent.
    pub p_max: u32,
    pub m_max: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            disc_cap: DEFAULT_DISC_CAP,
            y_max: 30,
            p_max: 13,
            m_max: 31,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremId {
    T2,
    T3,
    T4,
    T5Scan,
    T7,
    T9,
    Cc,
    C6,
    C8,
    OrderK,
    Lebesgue,
    BoundAudit,
}

impl TheoremId {
    pub const ALL: [TheoremId; 12] = [
        TheoremId::T2,
        TheoremId::T3,
        TheoremId::T4,
        TheoremId::T5Scan,
        TheoremId::T7,
        TheoremId::T9,
        TheoremId::Cc,
        TheoremId::C6,
        TheoremId::C8,
        TheoremId::OrderK,
        TheoremId::Lebesgue,
        TheoremId::BoundAudit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::T2 => "t2",
            TheoremId::T3 => "t3",
            TheoremId::T4 => "t4",
            TheoremId::T5Scan => "t5scan",
            TheoremId::T7 => "t7",
            TheoremId::T9 => "t9",
            TheoremId::Cc => "cc",
            TheoremId::C6 => "c6",
            TheoremId::C8 => "c8",
            TheoremId::OrderK => "T2",
            TheoremId::Lebesgue => "lebesgue",
            TheoremId::BoundAudit => "bound_audit",
        }
    }

    pub fn claim(self) -> &'static str {
        match self {
            TheoremId::T2 => "3 | h(Q(sqrt(1-2m^3))) for every odd m >= 3",
            TheoremId::T3 => "p | h(Q(sqrt(1-2m^p))) for odd primes p and odd prime powers m",
            TheoremId::T4 => "t | h(Q(sqrt(1-2m^t))) for odd square-free t and odd prime powers m",
            TheoremId::T5Scan => {
                "for odd m >= 3, p | h(Q(sqrt(1-2m^p))) for all but finitely many primes p"
            }
            TheoremId::T7 => "p | h(Q(sqrt(1-2m^p))) whenever 2m^p - 1 is square-free",
            TheoremId::T9 => {
                "for twin primes (p, p+2), p | h(Q(sqrt(1-2m^p))) or p+2 | h(Q(sqrt(1-2m^(p+2))))"
            }
            TheoremId::Cc => "t | h(Q(sqrt(d))) and t | h(Q(sqrt(d+1))) for d = 4(1-2m^t)^t",
            TheoremId::C6 => {
                "for odd m, every prime p | t divides h(Q(sqrt(1-2m^t))) outside a finite set of primes"
            }
            TheoremId::C8 => {
                "every prime p | t divides h(Q(sqrt(1-2m^t))) whenever 2m^t - 1 is square-free"
            }
            TheoremId::OrderK => "Cl(Q(sqrt(1-4U^k))) has an element of order k for odd k, U >= 2",
            TheoremId::Lebesgue => "x^2 + 1 = 2y^n has no solution with odd n >= 3, odd y >= 3",
            TheoremId::BoundAudit => {
                "outside F, G, H and S, D1 x^2 + D2 = lambda^2 m^y has at most 2^(omega(m)-1) solutions"
            }
        }
    }

    fn evidence(self) -> Evidence {
        match self {
            TheoremId::T5Scan | TheoremId::C6 => Evidence::Windowed,
            _ => Evidence::Exact,
        }
    }

    /// Claims that allow finitely many exceptional primes.
    fn tracks_exceptions(self) -> bool {
        matches!(self, TheoremId::T5Scan | TheoremId::C6)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TheoremId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = TheoremId::ALL.iter().map(|id| id.as_str()).collect();
                HarnessError::Usage(format!(
                    "unknown theorem id `{s}` (known: {})",
                    known.join(", ")
                ))
            })
    }
}

/// Parameter ranges. Empty fields are filled from per-theorem defaults.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Grid {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub m: Vec<u64>,
    /// Exponents `t` (or primes `p`, or `k` for the `1 - 4U^k` fields).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub t: Vec<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<(u32, u32)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub u: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_bound: Option<u64>,
    /// `(lambda^2, D1, D2, m)`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub instances: Vec<(u8, u64, u64, u64)>,
}

fn odd_range(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|m| m % 2 == 1).collect()
}

fn odd_primes_to(hi: u32) -> Vec<u32> {
    (3..=hi).filter(|&p| is_prime(p as u128)).collect()
}

fn is_odd_prime_power(m: u64) -> bool {
    m % 2 == 1 && m > 1 && factorize(m as u128).omega() == 1
}

impl Grid {
    /// The grid actually run for `id`: given fields kept, the rest defaulted.
    pub fn resolved(&self, id: TheoremId, caps: &Caps) -> Grid {
        let mut g = self.clone();
        let m_to = caps.m_max;
        let odd_prime_powers =
            || -> Vec<u64> { (3..=m_to).filter(|&m| is_odd_prime_power(m)).collect() };
        match id {
            TheoremId::T2 => {
                fill(&mut g.m, || odd_range(3, 25.min(m_to)));
            }
            TheoremId::T3 => {
                fill(&mut g.m, odd_prime_powers);
                fill(&mut g.t, || odd_primes_to(caps.p_max));
            }
            TheoremId::T4 => {
                fill(&mut g.m, odd_prime_powers);
                fill(&mut g.t, || vec![3, 5, 7, 11, 13, 15]);
            }
            TheoremId::T5Scan => {
                fill(&mut g.m, || odd_range(3, m_to));
                fill(&mut g.t, || odd_primes_to(caps.p_max));
            }
            TheoremId::T7 => {
                fill(&mut g.m, || odd_range(3, 15.min(m_to)));
                fill(&mut g.t, || vec![3, 5, 7]);
            }
            TheoremId::T9 => {
                fill(&mut g.m, || vec![3, 5, 9]);
                fill(&mut g.pairs, || vec![(3, 5), (5, 7), (11, 13)]);
            }
            TheoremId::Cc => {
                fill(&mut g.m, || odd_range(3, m_to));
                fill(&mut g.t, || vec![3]);
            }
            TheoremId::C6 | TheoremId::C8 => {
                fill(&mut g.m, || odd_range(3, m_to));
                fill(&mut g.t, || (3..=15).step_by(2).collect());
            }
            TheoremId::OrderK => {
                fill(&mut g.u, || (2..=10).collect());
                fill(&mut g.t, || vec![3, 5, 7]);
            }
            TheoremId::Lebesgue => {
                g.n_max.get_or_insert(9);
                g.y_bound.get_or_insert(999);
            }
            TheoremId::BoundAudit => {
                fill(&mut g.instances, || {
                    let mut v: Vec<_> = odd_range(3, m_to)
                        .into_iter()
                        .map(|m| (2, 2 * m - 1, 1, m))
                        .collect();
                    v.extend(S_TABLE);
                    v
                });
            }
        }
        g
    }
}

fn fill<T>(v: &mut Vec<T>, default: impl FnOnce() -> Vec<T>) {
    if v.is_empty() {
        *v = default();
    }
}

/// Runs `id` over `grid` (defaults filled in) and assembles the report.
///
/// Grid points are evaluated in parallel; the report is the same for any
/// number of workers.
pub fn verify(
    id: TheoremId,
    grid: &Grid,
    caps: &Caps,
    cache: &ClassCache,
) -> Result<TheoremReport, HarnessError> {
    if caps.disc_cap == 0 || caps.y_max == 0 || caps.p_max == 0 || caps.m_max == 0 {
        return Err(HarnessError::Usage("caps must be positive".into()));
    }
    let grid = grid.resolved(id, caps);
    let ctx = Ctx { caps, cache };
    let cases: Vec<Case> = match id {
        TheoremId::T2 => par_map(&grid.m, |&m| ctx.t2(m)),
        TheoremId::T3 => par_map(&product(&grid.m, &grid.t), |&(m, p)| ctx.t3(m, p)),
        TheoremId::T4 => par_map(&product(&grid.m, &grid.t), |&(m, t)| ctx.t4(m, t)),
        TheoremId::T5Scan => par_map(&product(&grid.m, &grid.t), |&(m, p)| ctx.t5(m, p)),
        TheoremId::T7 => par_map(&product(&grid.m, &grid.t), |&(m, p)| ctx.t7(m, p)),
        TheoremId::T9 => par_map(&product(&grid.m, &grid.pairs), |&(m, pair)| ctx.t9(m, pair)),
        TheoremId::Cc => par_map(&product(&grid.m, &grid.t), |&(m, t)| ctx.cc(m, t)),
        TheoremId::C6 => par_map(&product(&grid.m, &grid.t), |&(m, t)| ctx.c6(m, t)),
        TheoremId::C8 => par_map(&product(&grid.m, &grid.t), |&(m, t)| ctx.c8(m, t)),
        TheoremId::OrderK => par_map(&product(&grid.u, &grid.t), |&(u, k)| ctx.order_k(u, k)),
        TheoremId::Lebesgue => vec![ctx.lebesgue(grid.n_max.unwrap(), grid.y_bound.unwrap())],
        TheoremId::BoundAudit => par_map(&grid.instances, |&inst| ctx.bound_audit(inst)),
    };
    if cases.is_empty() {
        return Err(HarnessError::Usage(format!("empty grid for {id}")));
    }
    Ok(TheoremReport::assemble(
        id.as_str(),
        id.claim(),
        id.evidence(),
        serde_json::to_value(&grid).expect("grid serializes"),
        serde_json::to_value(caps).expect("caps serialize"),
        cases,
        id.tracks_exceptions(),
    ))
}

fn par_map<T: Sync, F: Fn(&T) -> Case + Sync + Send>(items: &[T], f: F) -> Vec<Case> {
    items.par_iter().map(f).collect()
}

fn product<A: Copy, B: Copy>(a: &[A], b: &[B]) -> Vec<(A, B)> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| (x, y)))
        .collect()
}

/// `1 - 2m^t`, if it fits.
pub fn family_radicand(m: u64, t: u32) -> Option<i128> {
    (m as i128)
        .checked_pow(t)
        .and_then(|x| x.checked_mul(2))
        .map(|x| 1 - x)
}

/// Why a field with this radicand will not be computed, if it will not.
fn budget_skip(radicand: Option<i128>, caps: &Caps) -> Option<String> {
    match radicand {
        None => Some("radicand exceeds 128 bits".into()),
        Some(r) => {
            let abs = r.unsigned_abs();
            let small = abs.saturating_mul(4) <= caps.disc_cap as u128;
            (!small && abs > FACTOR_BUDGET)
                .then(|| format!("|radicand| = {abs} exceeds the factoring budget"))
        }
    }
}

struct Ctx<'a> {
    caps: &'a Caps,
    cache: &'a ClassCache,
}

/// Outcome of preparing a family point: either ready or a skip reason.
type Prepared<T> = Result<T, String>;

impl Ctx<'_> {
    fn field_h(&self, field: &QuadraticField) -> Prepared<u64> {
        if field.disc.abs() > self.caps.disc_cap {
            return Err(format!(
                "|D_K| = {} exceeds cap {}",
                field.disc.abs(),
                self.caps.disc_cap
            ));
        }
        enumerate::cached_class_number(field.disc, self.cache, self.caps.disc_cap)
            .map_err(|e| e.to_string())
    }

    fn point(&self, m: u64, t: u32) -> Prepared<FamilyPoint> {
        if m < 3 || m.is_multiple_of(2) {
            return Err(format!("m = {m} must be odd and >= 3"));
        }
        if t < 3 || t.is_multiple_of(2) {
            return Err(format!("t = {t} must be odd and >= 3"));
        }
        if m > self.caps.m_max {
            return Err(format!("m exceeds cap {}", self.caps.m_max));
        }
        if let Some(p) = factorize(t as u128)
            .primes()
            .find(|&p| p > self.caps.p_max as u128)
        {
            return Err(format!("prime {p} | t exceeds cap {}", self.caps.p_max));
        }
        if let Some(why) = budget_skip(family_radicand(m, t), self.caps) {
            return Err(why);
        }
        family::make_family_point(m, t).map_err(|e| e.to_string())
    }

    /// Prepares `(m, t)` and checks that every prime of `t` divides `h`.
    fn divisibility(&self, case: Case, m: u64, t: u32, allow_exceptions: bool) -> Case {
        let point = match self.point(m, t) {
            Ok(p) => p,
            Err(why) => return case.skipped(why),
        };
        self.divisibility_at(case, &point, allow_exceptions)
    }

    fn divisibility_at(&self, case: Case, point: &FamilyPoint, allow_exceptions: bool) -> Case {
        let h = match self.field_h(&point.field) {
            Ok(h) => h,
            Err(why) => return case.skipped(why),
        };
        let out = DivisibilityOutcome::new(point.t as u64, h);
        let observed = format!("h = {h}, D_K = {}", point.disc());
        if allow_exceptions {
            case.judged_allowing_exceptions(observed, out.holds())
        } else {
            case.judged(observed, out.holds())
        }
    }

    fn t2(&self, m: u64) -> Case {
        let case = Case::new(Params::new().with("m", m), "3 | h");
        self.divisibility(case, m, 3, false)
    }

    fn t3(&self, m: u64, p: u32) -> Case {
        let case = Case::new(Params::new().with("m", m).with("p", p), format!("{p} | h"));
        if !is_odd_prime_power(m) {
            return case.skipped("m is not an odd prime power");
        }
        if p < 3 || !is_prime(p as u128) {
            return case.skipped("p is not an odd prime");
        }
        self.divisibility(case, m, p, false)
    }

    fn t4(&self, m: u64, t: u32) -> Case {
        let case = Case::new(Params::new().with("m", m).with("t", t), format!("{t} | h"));
        if !is_odd_prime_power(m) {
            return case.skipped("m is not an odd prime power");
        }
        if !is_squarefree(t as i128) {
            return case.skipped("t is not square-free");
        }
        self.divisibility(case, m, t, false)
    }

    fn t5(&self, m: u64, p: u32) -> Case {
        let case = Case::new(Params::new().with("m", m).with("p", p), format!("{p} | h"));
        if p < 3 || !is_prime(p as u128) {
            return case.skipped("p is not an odd prime");
        }
        self.divisibility(case, m, p, true)
    }

    fn t7(&self, m: u64, p: u32) -> Case {
        let case = Case::new(Params::new().with("m", m).with("p", p), format!("{p} | h"));
        if p < 3 || !is_prime(p as u128) {
            return case.skipped("p is not an odd prime");
        }
        match self.point(m, p) {
            Err(why) => case.skipped(why),
            Ok(point) if point.s() != 1 => case.skipped("2m^p - 1 is not square-free"),
            Ok(point) => self.divisibility_at(case, &point, false),
        }
    }

    fn c6(&self, m: u64, t: u32) -> Case {
        let case = Case::new(
            Params::new().with("m", m).with("t", t),
            "p | h for every prime p | t",
        );
        self.divisibility(case, m, t, true)
    }

    fn c8(&self, m: u64, t: u32) -> Case {
        let case = Case::new(
            Params::new().with("m", m).with("t", t),
            "p | h for every prime p | t",
        );
        match self.point(m, t) {
            Err(why) => case.skipped(why),
            Ok(point) if point.s() != 1 => case.skipped("2m^t - 1 is not square-free"),
            Ok(point) => self.divisibility_at(case, &point, false),
        }
    }

    fn t9(&self, m: u64, (p, q): (u32, u32)) -> Case {
        let case = Case::new(
            Params::new().with("m", m).with("p", p).with("p2", q),
            format!("{p} | h(m^{p}) or {q} | h(m^{q})"),
        );
        if q != p + 2 || !is_prime(p as u128) || !is_prime(q as u128) || p < 3 {
            return case.skipped("not a pair of odd twin primes");
        }
        if m < 3 || m.is_multiple_of(2) {
            return case.skipped(format!("m = {m} must be odd and >= 3"));
        }
        if q > self.caps.p_max {
            return case.skipped(format!("p + 2 exceeds cap {}", self.caps.p_max));
        }
        let twin = match pthpower::twin_prime_joint_check(m, p) {
            Ok(v) => v,
            Err(e) => return case.skipped(e.to_string()),
        };
        let power_note = |v: &pthpower::PthPowerVerdict, e: u32| {
            if v.is_pth_power {
                format!("exponent {e}: a power")
            } else {
                format!("exponent {e}: not a power")
            }
        };
        let mut observed = format!(
            "{}; {}",
            power_note(&twin.lower, p),
            power_note(&twin.upper, q)
        );
        let mut class_side = None;
        let h_low = self.point(m, p).and_then(|pt| self.field_h(&pt.field));
        let h_high = self.point(m, q).and_then(|pt| self.field_h(&pt.field));
        match (h_low, h_high) {
            (Ok(a), Ok(b)) => {
                observed.push_str(&format!("; h(m^{p}) = {a}, h(m^{q}) = {b}"));
                class_side = Some(a % p as u64 == 0 || b % q as u64 == 0);
            }
            (Ok(a), Err(_)) if a % p as u64 == 0 => {
                observed.push_str(&format!("; h(m^{p}) = {a}"));
                class_side = Some(true);
            }
            (Err(_), Ok(b)) if b % q as u64 == 0 => {
                observed.push_str(&format!("; h(m^{q}) = {b}"));
                class_side = Some(true);
            }
            _ => observed.push_str("; class numbers beyond cap"),
        }
        case.judged(observed, twin.holds() && class_side != Some(false))
    }

    fn cc(&self, m: u64, t: u32) -> Case {
        let case = Case::new(
            Params::new().with("m", m).with("t", t),
            format!("{t} | h(d) and {t} | h(d+1)"),
        );
        if let Err(why) = self.point(m, t) {
            return case.skipped(why);
        }
        if !is_squarefree(t as i128) {
            return case.skipped("t is not square-free");
        }
        // d + 1 = 1 - 4U^t; refuse to factor it when it is out of reach.
        let u = family_radicand(m, t).map(|r| -r);
        let second = u
            .and_then(|u| u.checked_pow(t))
            .and_then(|x| x.checked_mul(4))
            .map(|x| 1 - x);
        if let Some(why) = budget_skip(second, self.caps) {
            return case.skipped(format!("d+1: {why}"));
        }
        let pair = match family::iizuka_pair(m, t) {
            Ok(p) => p,
            Err(e) => return case.skipped(e.to_string()),
        };
        let (h1, h2) = match (self.field_h(&pair.first), self.field_h(&pair.second)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(why), _) | (_, Err(why)) => return case.skipped(why),
        };
        let ok = DivisibilityOutcome::new(t as u64, h1).holds()
            && DivisibilityOutcome::new(t as u64, h2).holds();
        case.judged(
            format!(
                "d = {}, h(d) = {h1} (D_K = {}), h(d+1) = {h2} (D_K = {})",
                pair.d, pair.first.disc, pair.second.disc
            ),
            ok,
        )
    }

    fn order_k(&self, u: u64, k: u32) -> Case {
        let case = Case::new(
            Params::new().with("u", u).with("k", k),
            format!("element of order {k}"),
        );
        if u < 2 || k < 3 || k.is_multiple_of(2) {
            return case.skipped("need U >= 2 and odd k >= 3");
        }
        let radicand = (u as i128)
            .checked_pow(k)
            .and_then(|x| x.checked_mul(4))
            .map(|x| 1 - x);
        if let Some(why) = budget_skip(radicand, self.caps) {
            return case.skipped(why);
        }
        let field = match family::louboutin_point(u, k) {
            Ok(f) => f,
            Err(e) => return case.skipped(e.to_string()),
        };
        if field.disc.abs() > self.caps.disc_cap {
            return case.skipped(format!(
                "|D_K| = {} exceeds cap {}",
                field.disc.abs(),
                self.caps.disc_cap
            ));
        }
        let group = match enumerate::class_group(field.disc, self.caps.disc_cap) {
            Ok(g) => g,
            Err(e) => return case.skipped(e.to_string()),
        };
        self.cache_put(field.disc, group.h());
        match group.element_of_order(k as u64) {
            Some(f) => case.judged(format!("h = {}, {f} has order {k}", group.h()), true),
            None => case.judged(format!("h = {}, no element of order {k}", group.h()), false),
        }
    }

    fn cache_put(&self, disc: quadclass_core::Discriminant, h: u64) {
        use quadclass_core::family::ClassNumberCache;
        if self.cache.get(disc).is_none() {
            self.cache.put(disc, h);
        }
    }

    fn lebesgue(&self, n_max: u32, y_bound: u64) -> Case {
        let case = Case::new(
            Params::new().with("n_max", n_max).with("y_bound", y_bound),
            "no solutions",
        );
        match diophantine::lebesgue_check(n_max, y_bound) {
            Err(e) => case.skipped(e.to_string()),
            Ok(r) if r.hits.is_empty() => case.judged(
                format!("0 solutions among {} pairs (n, y)", r.checked),
                true,
            ),
            Ok(r) => {
                let hits: Vec<String> = r
                    .hits
                    .iter()
                    .map(|(x, y, n)| format!("(x={x}, y={y}, n={n})"))
                    .collect();
                case.judged(hits.join(", "), false)
            }
        }
    }

    fn bound_audit(&self, (l, d1, d2, m): (u8, u64, u64, u64)) -> Case {
        let case = Case::new(
            Params::new()
                .with("lambda_sq", l)
                .with("d1", d1)
                .with("d2", d2)
                .with("m", m),
            "at most 2^(omega(m)-1) solutions",
        );
        let inst = match BsInstance::new(l, d1, d2, m) {
            Ok(i) => i,
            Err(e) => return case.skipped(e.to_string()),
        };
        let audit = match diophantine::audit_bound(&inst, self.caps.y_max) {
            Ok(a) => a,
            Err(e) => return case.skipped(e.to_string()),
        };
        let observed = format!(
            "{} solutions with y <= {}, bound {}",
            audit.count, audit.y_max, audit.bound
        );
        match audit.status {
            AuditStatus::Pass => case.judged(observed, true),
            AuditStatus::Fail => case.judged(observed, false),
            AuditStatus::Exempt => case.exempt(format!(
                "{observed}; in {}",
                audit.classification.labels().join(", ")
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    fn run(id: TheoremId, grid: Grid) -> TheoremReport {
        verify(id, &grid, &Caps::default(), &ClassCache::in_memory()).unwrap()
    }

    #[test]
    fn ids_round_trip() {
        for id in TheoremId::ALL {
            assert_eq!(id.as_str().parse::<TheoremId>().unwrap(), id);
        }
        assert!(matches!(
            "t6".parse::<TheoremId>(),
            Err(HarnessError::Usage(_))
        ));
    }

    #[test]
    fn t2_small_grid() {
        let r = run(
            TheoremId::T2,
            Grid {
                m: vec![3, 5, 7, 4],
                ..Grid::default()
            },
        );
        assert_eq!(r.summary.pass, 3);
        assert_eq!(r.summary.skipped, 1);
        assert_eq!(r.cases[0].observed, "h = 6, D_K = -212");
        assert!(!r.has_counterexample());
    }

    #[test]
    fn t7_filters_non_squarefree() {
        let r = run(
            TheoremId::T7,
            Grid {
                m: vec![5],
                t: vec![7],
                ..Grid::default()
            },
        );
        assert_eq!(r.cases[0].status, Status::Skipped);
        assert_eq!(r.cases[0].observed, "2m^p - 1 is not square-free");
    }

    #[test]
    fn caps_skip_explicitly() {
        let r = run(
            TheoremId::T3,
            Grid {
                m: vec![13],
                t: vec![7],
                ..Grid::default()
            },
        );
        assert_eq!(r.cases[0].status, Status::Skipped);
        assert!(r.cases[0].observed.contains("exceeds cap"));
    }

    #[test]
    fn t9_and_order_k() {
        let r = run(
            TheoremId::T9,
            Grid {
                m: vec![3],
                pairs: vec![(3, 5), (5, 7)],
                ..Grid::default()
            },
        );
        assert_eq!(r.summary.pass, 2);
        let r = run(
            TheoremId::OrderK,
            Grid {
                u: vec![2],
                t: vec![3],
                ..Grid::default()
            },
        );
        assert_eq!(r.summary.pass, 1);
        assert!(r.cases[0].observed.starts_with("h = 3"));
    }

    #[test]
    fn bound_audit_marks_s_exempt() {
        let r = run(
            TheoremId::BoundAudit,
            Grid {
                instances: vec![(2, 5, 1, 3), (2, 1, 1, 5)],
                ..Grid::default()
            },
        );
        assert_eq!(r.cases[0].status, Status::Exempt);
        assert_eq!(r.cases[1].status, Status::Pass);
    }

    #[test]
    fn t5scan_tracks_exceptions() {
        let r = run(
            TheoremId::T5Scan,
            Grid {
                m: vec![3],
                t: vec![3, 5],
                ..Grid::default()
            },
        );
        assert_eq!(r.evidence, Evidence::Windowed);
        assert_eq!(r.exceptional_set, Some(vec![]));
    }

    #[test]
    fn cache_is_shared_between_suites() {
        let cache = ClassCache::in_memory();
        let caps = Caps::default();
        let grid = Grid {
            m: vec![3],
            t: vec![3],
            ..Grid::default()
        };
        verify(TheoremId::T7, &grid, &caps, &cache).unwrap();
        assert_eq!(cache.len(), 1);
        verify(TheoremId::Cc, &grid, &caps, &cache).unwrap();
        // Q(sqrt(d)) reuses D_K = -212; Q(sqrt(d+1)) adds one entry.
        assert_eq!(cache.len(), 2);
    }
}
