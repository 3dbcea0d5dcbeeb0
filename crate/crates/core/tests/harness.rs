use std::path::Path;

use lbm1d::fields::diagnostics;
use lbm1d::harness::compare::{compare_runs, convergence, Coarsening, ReferenceSpec};
use lbm1d::harness::output::{read_diag, read_index, Snapshot, DIAG_FILE, SNAPSHOT_COLUMNS};
use lbm1d::harness::run::initial_fields;
use lbm1d::harness::{parse_config, preset, run_experiment, with_overrides, Outcome};

fn run(name: &str, overrides: &[&str], dir: &Path) {
    let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    let r = with_overrides(&preset(name).unwrap(), &o).unwrap();
    run_experiment(&r, dir).unwrap();
}

#[test]
fn fig1_on_three_meshes() {
    let dir = tempfile::tempdir().unwrap();
    for n in [40, 80, 160] {
        let d = dir.path().join(format!("n{n}"));
        run("fig1", &[&format!("grid.n={n}")], &d);
        let idx = read_index(&d).unwrap();
        assert_eq!(idx.first().unwrap().step, 0);
        assert_eq!(idx.last().unwrap().step, 3 * n);
        assert!((idx.last().unwrap().t - 3.0).abs() < 1e-12);
        let snap = Snapshot::read(&d.join(&idx.last().unwrap().file)).unwrap();
        assert_eq!(snap.len(), n);
    }
    let coarse = compare_runs(&dir.path().join("n40"), &dir.path().join("n80"), Coarsening::Inject).unwrap();
    let fine = compare_runs(&dir.path().join("n80"), &dir.path().join("n160"), Coarsening::Inject).unwrap();
    let order = (coarse.get("rho").unwrap().l2 / fine.get("rho").unwrap().l2).log2();
    assert!(order > 1.8, "{order}");
}

#[test]
fn snapshots_are_thermodynamically_consistent() {
    let dir = tempfile::tempdir().unwrap();
    run("fig3", &[], dir.path());
    let r = with_overrides(&preset("fig3").unwrap(), &[]).unwrap();
    let text = std::fs::read_to_string(dir.path().join("snap_000120.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), SNAPSHOT_COLUMNS.join(","));
    let snap = Snapshot::read(&dir.path().join("snap_000120.csv")).unwrap();
    for i in 0..snap.len() {
        let prt = snap.rho[i] * r.gas.r * snap.t[i];
        assert!((snap.p[i] - prt).abs() <= 1e-10 * snap.p[i]);
    }
}

#[test]
fn diagnostics_start_from_initial_totals() {
    let dir = tempfile::tempdir().unwrap();
    run("fig2", &[], dir.path());
    let r = with_overrides(&preset("fig2").unwrap(), &[]).unwrap();
    let diag = read_diag(&dir.path().join(DIAG_FILE)).unwrap();
    assert_eq!(diag.len(), r.derived.steps + 1);
    assert_eq!(diag[0].totals, diagnostics(&initial_fields(&r), &r.gas).unwrap());
    assert!(diag.windows(2).all(|w| w[1].t > w[0].t));
}

#[test]
fn fig4_writes_both_source_variants() {
    let dir = tempfile::tempdir().unwrap();
    let r = with_overrides(&preset("fig4").unwrap(), &[]).unwrap();
    let Outcome::Runs(runs) = run_experiment(&r, dir.path()).unwrap() else {
        panic!("expected runs")
    };
    assert_eq!(runs.len(), 2);
    let drift = |sub: &str| {
        let d = read_diag(&dir.path().join(sub).join(DIAG_FILE)).unwrap();
        let (a, b) = (d[0].totals.energy, d.last().unwrap().totals.energy);
        ((b - a) / a).abs()
    };
    assert!(drift("source-on") < drift("source-off"));
    let off = read_diag(&dir.path().join("source-off").join(DIAG_FILE)).unwrap();
    assert!(off
        .iter()
        .all(|d| (d.totals.entropy - off[0].totals.entropy).abs() < 1e-15));
}

#[test]
fn output_is_bit_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run("fig3", &["output.snapshot_every=30"], &a);
    run("fig3", &["output.snapshot_every=30"], &b);
    for e in read_index(&a).unwrap() {
        assert_eq!(
            std::fs::read(a.join(&e.file)).unwrap(),
            std::fs::read(b.join(&e.file)).unwrap()
        );
    }
    assert_eq!(
        std::fs::read(a.join(DIAG_FILE)).unwrap(),
        std::fs::read(b.join(DIAG_FILE)).unwrap()
    );
    assert_eq!(
        std::fs::read(a.join("config.toml")).unwrap(),
        std::fs::read(b.join("config.toml")).unwrap()
    );
}

#[test]
fn config_echo_reloads_to_the_same_run() {
    let dir = tempfile::tempdir().unwrap();
    run("fig2", &["grid.n=80"], dir.path());
    let echo = std::fs::read_to_string(dir.path().join("config.toml")).unwrap();
    let again = parse_config(&echo, &[]).unwrap();
    assert_eq!(
        again,
        with_overrides(&preset("fig2").unwrap(), &["grid.n=80".into()]).unwrap()
    );
}

#[test]
fn comparisons() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    run("fig2", &[], &p.join("lbm40"));
    run("fig2", &["grid.n=80"], &p.join("lbm80"));
    run("fig2", &["scheme=reference-fd", "grid.n=640"], &p.join("fd"));
    run("fig2", &["time.t_final=2.0"], &p.join("short"));

    let same = compare_runs(&p.join("lbm40"), &p.join("lbm40"), Coarsening::Average).unwrap();
    assert!(same.fields.iter().all(|f| f.l2 == 0.0 && f.linf == 0.0));

    let e40 = compare_runs(&p.join("lbm40"), &p.join("fd"), Coarsening::Average).unwrap();
    let e80 = compare_runs(&p.join("lbm80"), &p.join("fd"), Coarsening::Average).unwrap();
    let (a, b) = (e40.get("rho").unwrap(), e80.get("rho").unwrap());
    assert!(a.l2.is_finite() && b.l2 < a.l2, "{a:?} {b:?}");

    let err = compare_runs(&p.join("lbm40"), &p.join("short"), Coarsening::Average).unwrap_err();
    assert!(err.to_string().contains("times differ"), "{err}");
    // a listed snapshot file carries its time through the index
    let first = p.join("lbm40").join("snap_000000.csv");
    assert!(compare_runs(&first, &p.join("lbm40"), Coarsening::Average).is_err());
}

#[test]
fn convergence_against_refined_lbm() {
    let base = preset("fig2").unwrap();
    let rep = convergence(&base, &[40, 80, 160], ReferenceSpec::Lbm(640), &[]).unwrap();
    assert!(rep.rho.min_order().unwrap() > 1.8, "{:?}", rep.rho);
    assert!(convergence(&base, &[40, 60], ReferenceSpec::SelfConvergence, &[]).is_err());
}
