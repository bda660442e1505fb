use std::collections::BTreeSet;
use std::fs;

use alcq::pcfg::PoolName;
use alcq::pipeline::{
    check_shape, merge_pools, read_jsonl, run_generation, split_by_kb, verify_records, write_generated,
    PipelineConfig, PipelineError, SymbolicVariant, SEED_ENV,
};
use alcq::syntax::Level;

fn small(seed: u64) -> PipelineConfig {
    let mut cfg = PipelineConfig::new(PoolName::all().to_vec(), 1, Level::new(1).unwrap(), 3, seed);
    cfg.jobs = Some(2);
    cfg
}

fn kb_ids(records: &[alcq::pipeline::DatasetRecord]) -> BTreeSet<String> {
    records.iter().map(|r| r.kb_id.clone()).collect()
}

#[test]
fn same_seed_writes_identical_files() {
    let cfg = small(11);
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut written = Vec::new();
    for d in &dirs {
        written.push(write_generated(d.path(), &run_generation(&cfg).unwrap()).unwrap());
    }
    assert_eq!(written[0].len(), written[1].len());
    for (a, b) in written[0].iter().zip(&written[1]) {
        assert_eq!(a.file_name(), b.file_name());
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap(), "{} differs", a.display());
    }
    let other = run_generation(&small(12)).unwrap();
    let first = read_jsonl(&dirs[0].path().join("train.jsonl")).unwrap();
    assert_ne!(first, other.splits.train);
}

#[test]
fn every_kb_contributes_a_full_example_set() {
    let mut cfg = small(3);
    cfg.depth = 2;
    cfg.symbolic = SymbolicVariant::Hard;
    let g = run_generation(&cfg).unwrap();
    assert_eq!(g.dataset.len(), 6 * 9);
    assert!(check_shape(&g.dataset, 2).is_empty());
    assert!(verify_records(&g.dataset).failures.is_empty());
    assert!(g.dataset.iter().all(|r| r.symbolic_variant == SymbolicVariant::Hard));
    assert_eq!(g.renaming.len(), 2);
    // hard form hides every pool word
    for r in &g.dataset {
        assert!(!r.question.contains("Anne") && !r.question.contains("likes"), "{}", r.question);
    }
}

#[test]
fn splits_never_share_a_kb() {
    let g = run_generation(&small(5)).unwrap();
    let sets: Vec<_> = g.splits.named().iter().map(|(_, d)| kb_ids(d)).collect();
    for i in 0..3 {
        for j in i + 1..3 {
            assert!(sets[i].is_disjoint(&sets[j]));
        }
    }
    let n: usize = sets.iter().map(BTreeSet::len).sum();
    assert_eq!(n, 6);
    for total in [10usize, 37, 100] {
        let records: Vec<_> = (0..total)
            .map(|i| {
                let mut r = g.dataset[0].clone();
                r.kb_id = format!("k{i:03}");
                r
            })
            .collect();
        let s = split_by_kb(&records, 9);
        let share = |d: &Vec<_>| d.len() as f64;
        assert!((share(&s.train) - 0.7 * total as f64).abs() <= 1.0);
        assert!((share(&s.validation) - 0.1 * total as f64).abs() <= 1.0);
        assert_eq!(s.train.len() + s.validation.len() + s.test.len(), total);
    }
}

#[test]
fn seed_comes_from_the_environment() {
    let text = "pools = [\"A\"]\ndepth = 1\nlevel = 1\ncount = 1\nseed = 4\n";
    std::env::set_var(SEED_ENV, "77");
    let with_env = PipelineConfig::from_toml(text);
    std::env::set_var(SEED_ENV, "seventy");
    let garbage = PipelineConfig::from_toml(text);
    std::env::remove_var(SEED_ENV);
    assert_eq!(with_env.unwrap().seed, 77);
    assert!(matches!(garbage, Err(PipelineError::Config(_))));
    assert_eq!(PipelineConfig::from_toml(text).unwrap().seed, 4);
    assert!(PipelineConfig::from_toml(&format!("{text}colour = 1\n")).is_err());
}

#[test]
fn merging_needs_matching_settings() {
    let one = |pool, depth| {
        let mut cfg = PipelineConfig::new(vec![pool], depth, Level::new(1).unwrap(), 2, 1);
        cfg.jobs = Some(2);
        run_generation(&cfg).unwrap().dataset
    };
    let a = one(PoolName::A, 1);
    let b = one(PoolName::B, 1);
    let merged = merge_pools(vec![a.clone(), b.clone()]).unwrap();
    assert_eq!(merged.len(), a.len() + b.len());
    let order: Vec<_> = merged.iter().map(|r| r.pool).collect::<Vec<_>>().chunk_by(|x, y| x == y).map(|c| c[0]).collect();
    assert_eq!(order, [PoolName::A, PoolName::B, PoolName::A, PoolName::B]);
    assert!(matches!(merge_pools(vec![a.clone(), a.clone()]), Err(PipelineError::MismatchedConfig(_))));
    assert!(matches!(merge_pools(vec![a, one(PoolName::B, 2)]), Err(PipelineError::MismatchedConfig(_))));
}
