use quadclass::cli;
use quadclass::report::Status;
use quadclass::{verify, CacheRecord, Caps, ClassCache, Grid, TheoremId};
use quadclass_core::Discriminant;

#[test]
fn poisoned_cache_yields_counterexample() {
    let cache = ClassCache::in_memory();
    cache
        .insert(CacheRecord::new(Discriminant::new(-212).unwrap(), 4))
        .unwrap();
    let grid = Grid {
        m: vec![3, 5],
        ..Grid::default()
    };
    let report = verify(TheoremId::T2, &grid, &Caps::default(), &cache).unwrap();
    assert!(report.has_counterexample());
    assert_eq!(report.counterexamples.len(), 1);
    assert_eq!(report.counterexamples[0].params.to_string(), "m=3");
    assert_eq!(report.cases[0].status, Status::Fail);
    assert_eq!(report.summary.pass, 1);
}

#[test]
fn poisoned_cache_file_is_caught_when_sampled() {
    // With a single entry the 5% sample always includes it.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.cache");
    std::fs::write(&path, "disc=-212 h=4 version=0.0.1 computed_at=1\n").unwrap();
    let path = path.to_str().unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(
        ["quadclass", "--cache", path, "verify", "t2", "--m", "3"],
        &mut out,
        &mut err,
    );
    assert_eq!(code, cli::EXIT_OK, "{}", String::from_utf8_lossy(&out));
    let cache = ClassCache::open(path).unwrap();
    assert_eq!(cache.record(Discriminant::new(-212).unwrap()).unwrap().h, 6);
}

#[test]
fn every_theorem_runs_on_its_default_grid() {
    let cache = ClassCache::in_memory();
    let caps = Caps {
        disc_cap: 2_000_000,
        ..Caps::default()
    };
    for id in TheoremId::ALL {
        let report = verify(id, &Grid::default(), &caps, &cache).unwrap();
        assert!(!report.cases.is_empty());
        assert!(!report.has_counterexample(), "{id}: {}", report.to_table());
        assert_eq!(report.theorem_id, id.as_str());
        if matches!(id, TheoremId::T5Scan | TheoremId::C6) {
            assert_eq!(report.exceptional_set, Some(vec![]));
        }
    }
}

#[test]
fn skipped_points_are_listed_not_dropped() {
    let caps = Caps {
        disc_cap: 10_000,
        ..Caps::default()
    };
    let grid = Grid {
        m: vec![3],
        t: vec![3, 5, 7, 9],
        ..Grid::default()
    };
    let report = verify(TheoremId::C8, &grid, &caps, &ClassCache::in_memory()).unwrap();
    let statuses: Vec<Status> = report.cases.iter().map(|c| c.status).collect();
    assert_eq!(
        statuses,
        [Status::Pass, Status::Pass, Status::Skipped, Status::Skipped]
    );
    assert!(report.cases[2].observed.contains("exceeds cap 10000"));
}

#[test]
fn empty_caps_are_usage_errors() {
    let caps = Caps {
        disc_cap: 0,
        ..Caps::default()
    };
    assert!(verify(
        TheoremId::T2,
        &Grid::default(),
        &caps,
        &ClassCache::in_memory()
    )
    .is_err());
}
