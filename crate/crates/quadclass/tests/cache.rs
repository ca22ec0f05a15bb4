use std::fs;
use std::io::Write;

use quadclass::cache::{CacheRecord, ClassCache};
use quadclass_core::family::ClassNumberCache;
use quadclass_core::Discriminant;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn disc(d: i64) -> Discriminant {
    Discriminant::new(d).unwrap()
}

#[test]
fn persists_across_reopen() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.cache");
    {
        let cache = ClassCache::open(&path).unwrap();
        assert_eq!(cache.get(disc(-212)), None);
        cache.put(disc(-212), 6);
        cache.put(disc(-1940), 20);
    }
    let cache = ClassCache::open(&path).unwrap();
    assert_eq!(cache.get(disc(-212)), Some(6));
    assert_eq!(cache.get(disc(-1940)), Some(20));
    assert_eq!(cache.get(disc(-4)), None);
}

#[test]
fn duplicate_put_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.cache");
    let cache = ClassCache::open(&path).unwrap();
    cache.put(disc(-212), 6);
    cache.put(disc(-212), 6);
    drop(cache);
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 1);
}

#[test]
fn corrupt_lines_are_skipped_and_last_write_wins() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.cache");
    let mut f = fs::File::create(&path).unwrap();
    writeln!(f, "disc=-212 h=5 version=0.0.1 computed_at=1").unwrap();
    writeln!(f, "this is not a record").unwrap();
    writeln!(f, "disc=-212 h=6 version=0.0.1 computed_at=2").unwrap();
    writeln!(f, "disc=-23 h=").unwrap();
    writeln!(f).unwrap();
    f.write_all(b"disc=-31 h=3 vers\xffion=x computed_at=3\n")
        .unwrap();
    writeln!(f, "disc=-31 h=3 version=0.0.1 computed_at=4").unwrap();
    drop(f);
    let cache = ClassCache::open(&path).unwrap();
    assert_eq!(cache.get(disc(-212)), Some(6));
    assert_eq!(cache.get(disc(-31)), Some(3));
    assert_eq!(cache.get(disc(-23)), None);
    assert_eq!(cache.skipped_lines(), 3);
    assert_eq!(cache.len(), 2);
}

#[test]
fn reverification_replaces_wrong_entries() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.cache");
    fs::write(
        &path,
        "disc=-212 h=7 version=0.0.1 computed_at=1\ndisc=-31 h=3 version=0.0.1 computed_at=1\n",
    )
    .unwrap();
    let cache = ClassCache::open(&path).unwrap();
    let report = cache
        .reverify_sample(1.0, 1_000_000, &mut StdRng::seed_from_u64(1))
        .unwrap();
    assert_eq!(report.checked, 2);
    assert_eq!(report.mismatches, vec![(-212, 7, 6)]);
    assert_eq!(cache.get(disc(-212)), Some(6));
    drop(cache);
    // The correction is appended, so it survives a reload.
    assert_eq!(ClassCache::open(&path).unwrap().get(disc(-212)), Some(6));
}

#[test]
fn sample_is_five_percent_rounded_up() {
    let cache = ClassCache::in_memory();
    for n in 1..=60i64 {
        let d = disc(-4 * n);
        cache
            .insert(CacheRecord::new(
                d,
                quadclass::enumerate::class_number(d, 1000).unwrap(),
            ))
            .unwrap();
    }
    let report = cache
        .reverify_sample(0.05, 1000, &mut StdRng::seed_from_u64(7))
        .unwrap();
    assert_eq!(report.checked, 3);
    assert!(report.mismatches.is_empty());
}

#[test]
fn shared_between_threads() {
    let cache = ClassCache::in_memory();
    std::thread::scope(|s| {
        for k in 0..8i64 {
            let cache = &cache;
            s.spawn(move || {
                for n in 1..200i64 {
                    let d = disc(-4 * (n * 8 + k));
                    quadclass::enumerate::cached_class_number(d, cache, 10_000).unwrap();
                }
            });
        }
    });
    assert_eq!(cache.len(), 8 * 199);
    assert_eq!(cache.get(disc(-212)), Some(6));
}
