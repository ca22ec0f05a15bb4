//! Parallel class-number computation over slices of the `b` range.

use quadclass_core::family::ClassNumberCache;
use quadclass_core::quadforms::{count_b_range, enumerate_b_range};
use quadclass_core::{ClassGroup, Discriminant, Error, Result};
use rayon::prelude::*;

/// Discriminants below this size are counted on the calling thread.
const SERIAL_BELOW: u64 = 1_000_000;
const CHUNKS_PER_THREAD: u64 = 8;

fn chunks(d: Discriminant) -> Vec<(u64, u64)> {
    let max_b = d.max_reduced_b();
    let pieces = (rayon::current_num_threads() as u64 * CHUNKS_PER_THREAD).max(1);
    let width = (max_b / pieces).max(64);
    let mut out = Vec::new();
    let mut lo = 0;
    while lo <= max_b {
        let hi = lo.saturating_add(width - 1).min(max_b);
        out.push((lo, hi));
        lo = hi + 1;
    }
    out
}

fn check_cap(d: Discriminant, cap: u64) -> Result<()> {
    if d.abs() > cap {
        return Err(Error::CapExceeded {
            discriminant: d.get(),
            cap,
        });
    }
    Ok(())
}

/// `h(D)`. The answer does not depend on the number of worker threads.
pub fn class_number(d: Discriminant, cap: u64) -> Result<u64> {
    check_cap(d, cap)?;
    if d.abs() < SERIAL_BELOW {
        return Ok(count_b_range(d, 0..=d.max_reduced_b()));
    }
    Ok(chunks(d)
        .into_par_iter()
        .map(|(lo, hi)| count_b_range(d, lo..=hi))
        .sum())
}

/// All reduced forms of discriminant `D`, sorted by `(a, b)`.
pub fn class_group(d: Discriminant, cap: u64) -> Result<ClassGroup> {
    check_cap(d, cap)?;
    let mut forms: Vec<_> = chunks(d)
        .into_par_iter()
        .flat_map_iter(|(lo, hi)| enumerate_b_range(d, lo..=hi))
        .collect();
    forms.sort_unstable_by_key(|f| (f.a(), f.b()));
    Ok(ClassGroup::from_sorted_forms(d, forms))
}

/// `h(D)` through `cache`, computing and storing it on a miss.
pub fn cached_class_number<C: ClassNumberCache + ?Sized>(
    d: Discriminant,
    cache: &C,
    cap: u64,
) -> Result<u64> {
    if let Some(h) = cache.get(d) {
        return Ok(h);
    }
    let h = class_number(d, cap)?;
    cache.put(d, h);
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use quadclass_core::quadforms::{self, DEFAULT_DISC_CAP};

    #[test]
    fn matches_serial_enumeration() {
        for d in [-3, -4, -212, -996, -595_507, -4 * 29_000_003] {
            let d = Discriminant::new(d).unwrap();
            assert_eq!(
                class_number(d, DEFAULT_DISC_CAP).unwrap(),
                quadforms::class_number(d, DEFAULT_DISC_CAP).unwrap()
            );
        }
        let d = Discriminant::new(-4 * 1_940_003).unwrap();
        assert_eq!(
            class_group(d, DEFAULT_DISC_CAP).unwrap(),
            quadforms::enumerate_reduced(d, DEFAULT_DISC_CAP).unwrap()
        );
    }

    #[test]
    fn same_count_on_any_pool_size() {
        let d = Discriminant::new(-4 * 5_000_011).unwrap();
        let counts: Vec<u64> = [1, 2, 7]
            .into_iter()
            .map(|n| {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .unwrap()
                    .install(|| class_number(d, DEFAULT_DISC_CAP).unwrap())
            })
            .collect();
        assert!(counts.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn cap_is_enforced() {
        let d = Discriminant::new(-1_000_003).unwrap();
        assert!(matches!(
            class_number(d, 1_000_000),
            Err(Error::CapExceeded { .. })
        ));
    }
}
