use metaspin::liouvillian::{solve_qme, QmeOptions};
use metaspin::ModelParams;
use metaspin_cli::cache::{Cache, SolveKey};
use metaspin_cli::commands;
use metaspin_cli::config::{CommonArgs, RunConfig};

fn small_sweep(dir: &std::path::Path) -> RunConfig {
    let a = CommonArgs {
        gamma_min: Some(1.0),
        gamma_max: Some(3.0),
        gamma_step: Some(1.0),
        spin_j: vec![6.0, 8.0],
        cache_dir: Some(dir.into()),
        jobs: Some(2),
        ..Default::default()
    };
    RunConfig::resolve(&a).unwrap()
}

#[test]
fn warm_cache_performs_no_solves() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_sweep(dir.path());
    let cold = Cache::new(cfg.cache_dir.clone()).unwrap();
    let r1 = commands::steady_sweep(&cfg, &cold).unwrap();
    assert_eq!((cold.hits(), cold.solves()), (0, 6));
    let warm = Cache::new(cfg.cache_dir.clone()).unwrap();
    let r2 = commands::steady_sweep(&cfg, &warm).unwrap();
    assert_eq!((warm.hits(), warm.solves()), (6, 0));
    assert_eq!(r1.rows, r2.rows);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 6);
}

#[test]
fn cache_hit_is_bit_identical_to_recomputation() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(Some(dir.path().into())).unwrap();
    let p = ModelParams::new(0.25, 9.0, 12.0).unwrap();
    let opts = QmeOptions::default();
    cache.solve(&p, &opts).unwrap();
    let hit = cache.solve(&p, &opts).unwrap();
    assert_eq!(cache.hits(), 1);
    let fresh = solve_qme(&p, &opts).unwrap();
    assert_eq!(hit.m_z.to_bits(), fresh.m_z.to_bits());
    assert_eq!(hit.lambda.unwrap().to_bits(), fresh.gap.unwrap().lambda.to_bits());
}

#[test]
fn keys_are_canonical() {
    let opts = QmeOptions::default();
    let a = SolveKey::new(&ModelParams::new(0.25, 0.0, 4.0).unwrap(), &opts);
    let b = SolveKey::new(&ModelParams::new(0.25, -0.0, 4.0).unwrap(), &opts);
    assert_eq!(a.hash(), b.hash());
    let c = SolveKey::new(&ModelParams::new(0.25, 0.0, 4.5).unwrap(), &opts);
    assert_ne!(a.hash(), c.hash());
    let d = SolveKey::new(&ModelParams::new(0.25, 0.0, 4.0).unwrap(), &QmeOptions { compute_gap: false, ..opts });
    assert_ne!(a.hash(), d.hash());
    assert_eq!(a.canonical(), "omega=0.25;Gamma=0.0;twoJ=8;precision=double;g=1.0;e=default;gap=true");
    assert_eq!(a.hash().len(), 64);
}

#[test]
fn records_are_never_overwritten() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::new(Some(dir.path().into())).unwrap();
    let p = ModelParams::new(0.25, 2.0, 3.0).unwrap();
    let opts = QmeOptions::default();
    cache.solve(&p, &opts).unwrap();
    let path = dir.path().join(format!("{}.json", SolveKey::new(&p, &opts).hash()));
    let before = std::fs::read(&path).unwrap();
    let again = Cache::new(Some(dir.path().into())).unwrap();
    again.solve(&p, &opts).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), before);
    let rec = cache.lookup(&SolveKey::new(&p, &opts)).unwrap().unwrap();
    assert_eq!(rec.provenance.version, env!("CARGO_PKG_VERSION"));
}
