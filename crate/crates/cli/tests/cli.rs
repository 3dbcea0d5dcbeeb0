use std::path::Path;
use std::process::{Command, Output};

fn lbm1d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lbm1d"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_a_run_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig1");
    let o = lbm1d(&["run", "--preset", "fig1", "--mesh", "80", "--out", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("N=80 steps=240"), "{}", stdout(&o));
    for f in [
        "config.toml",
        "diag.csv",
        "snapshots.csv",
        "summary.toml",
        "snap_000000.csv",
        "snap_000240.csv",
    ] {
        assert!(out.join(f).exists(), "missing {f}");
    }
}

#[test]
fn overrides_and_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "scheme = \"advdiff-d1q3\"\n[initial]\nprofile = \"gaussian\"\n[advdiff]\nkappa = 2e-3\n[time]\nt_final = 0.5\n",
    )
    .unwrap();
    let out = dir.path().join("ad");
    let o = lbm1d(&[
        "run",
        "--config",
        path(&cfg),
        "--set",
        "advdiff.u0=0.1",
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let echo = std::fs::read_to_string(out.join("config.toml")).unwrap();
    assert!(echo.contains("u0 = 0.1") && echo.contains("[derived]"), "{echo}");

    // the echo is itself a valid configuration
    let again = dir.path().join("again");
    let o = lbm1d(&["run", "--config", path(&out.join("config.toml")), "--out", path(&again)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        std::fs::read(out.join("diag.csv")).unwrap(),
        std::fs::read(again.join("diag.csv")).unwrap()
    );
}

#[test]
fn stability_scan_reports_verdict() {
    let o = lbm1d(&["stability", "--preset", "stab7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("verdict=Stable") && s.contains("samples=512"), "{s}");
    assert!(s.contains("differ from the Jacobian"), "{s}");

    let dir = tempfile::tempdir().unwrap();
    let o = lbm1d(&[
        "stability",
        "--preset",
        "stab7",
        "--set",
        "stability.u0=0.15",
        "--set",
        "stability.s0=0.2",
        "--set",
        "stability.equilibria=jacobian",
        "--out",
        path(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("verdict=Unstable"), "{}", stdout(&o));
    let csv = std::fs::read_to_string(dir.path().join("stability.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("k_dx,spectral_radius"));
    assert_eq!(csv.lines().count(), 513);
}

#[test]
fn compare_prints_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(lbm1d(&["run", "--preset", "fig2", "--out", path(&a)]).status.success());
    assert!(lbm1d(&["run", "--preset", "fig2", "--mesh", "80", "--out", path(&b)])
        .status
        .success());
    let o = lbm1d(&["compare", path(&a), path(&a), "--norm", "linf"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("rho,0.000000e0"), "{}", stdout(&o));
    let o = lbm1d(&["compare", path(&a), path(&b), "--norm", "l2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("N = 40"), "{}", stdout(&o));
}

#[test]
fn convergence_prints_orders() {
    let o = lbm1d(&[
        "convergence",
        "--preset",
        "fig2",
        "--meshes",
        "40,80,160",
        "--reference",
        "self",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.lines().any(|l| l.starts_with("rho")), "{s}");
}

#[test]
fn failures_exit_nonzero_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str); 5] = [
        (&["run", "--preset", "fig9"], "unknown preset"),
        (
            &[
                "run",
                "--preset",
                "fig1",
                "--set",
                "advdiff.alpha=1.2",
                "--set",
                "scheme=advdiff-d1q3",
            ],
            "alpha=1.2 outside (-2,1)",
        ),
        (
            &[
                "run",
                "--preset",
                "fig1",
                "--set",
                "transport.s_e=1.5",
                "--set",
                "grid.lambda=1.0",
            ],
            "conflicts",
        ),
        (&["compare", "nowhere-a", "nowhere-b"], "error"),
        (
            &["convergence", "--preset", "fig2", "--reference", "exact"],
            "reference 'exact'",
        ),
    ];
    for (args, needle) in cases {
        let mut a: Vec<&str> = args.to_vec();
        let out = dir.path().join("x");
        if a[0] == "run" {
            a.extend(["--out", path(&out)]);
        }
        let o = lbm1d(&a);
        assert!(!o.status.success(), "{args:?} succeeded");
        assert!(stderr(&o).contains(needle), "{args:?}: {}", stderr(&o));
    }
}
